//! Linear (one layer per step) Hensel lifting of a residue factorization
//! `f = g h` in `A[t, sigma, delta]`, generic over the coefficient ring.

use crate::error::{Error, Result};
use crate::residue::{ext_gcd, twist_coprime_check, twist_residue, ResiduePoly, TwistCheck};
use crate::skew_poly::{
    lift_residue, mul_x_pow, phi_pow, poly_add, poly_max_abs, poly_mul, poly_sub, precision_units,
    reduce_residue, truncate_poly, BaseRing, SkewPoly,
};

#[derive(Clone, Debug)]
pub struct HenselConfig {
    /// Layers of the defect below `eps * scale` count as zero.
    pub eps: f64,
    /// Relative tolerance for residue root clustering and gcd decisions.
    pub residue_tol: f64,
    /// Recompute `f - g h` from scratch after every step and assert its order.
    pub check_invariant: bool,
    /// Assert `p x^n h = p phi^n(h) x^n` at every step.
    pub check_congruence: bool,
    /// Extra passes at layer 0 to polish an approximate residue factorization.
    pub residue_polish: usize,
}

impl HenselConfig {
    pub fn for_bits(bits: usize) -> Self {
        HenselConfig {
            eps: 2f64.powi(-(bits as i32) + 16),
            residue_tol: 2f64.powf(-(bits as f64) / 3.0),
            check_invariant: false,
            check_congruence: false,
            residue_polish: 8,
        }
    }

    pub fn checked(mut self) -> Self {
        self.check_invariant = true;
        self.check_congruence = true;
        self
    }
}

#[derive(Clone, Debug)]
pub struct HenselOutcome<E> {
    pub g: SkewPoly<E>,
    pub h: SkewPoly<E>,
    /// `ord(f - g h) >= achieved` in powers of the uniformizer; `None` when
    /// the product is exact.
    pub achieved: Option<i64>,
    /// Layers that needed a correction.
    pub corrections: usize,
    /// Largest Bezout cofactor norm seen.
    pub kappa: f64,
}

/// Residue-level test that `g` and every `phi^n(h)`, `n >= 1`, are coprime.
pub fn twist_precheck<R: BaseRing>(
    ring: &R,
    g: &SkewPoly<R::Elem>,
    h: &SkewPoly<R::Elem>,
    tol: f64,
) -> Result<TwistCheck> {
    let gb = reduce_residue(ring, g)?;
    let hb = reduce_residue(ring, h)?;
    twist_coprime_check(&gb, &hb, &ring.residue_twist(), tol)
}

fn check_monic<R: BaseRing>(ring: &R, p: &SkewPoly<R::Elem>, tol: f64) -> Result<usize> {
    let d = p.degree(ring).ok_or(Error::NotMonic)?;
    if ring.max_abs(&ring.sub(&p.coeffs[d], &ring.one())) > tol {
        return Err(Error::NotMonic);
    }
    Ok(d)
}

/// Largest modulus in layer `n` over all coefficients.
fn layer_norm<R: BaseRing>(ring: &R, p: &SkewPoly<R::Elem>, n: i64) -> f64 {
    p.coeffs
        .iter()
        .map(|c| ring.layer_abs(c, n))
        .fold(0.0, f64::max)
}

/// Lowest layer of `p` holding a term above `eps`, if any below `limit`.
fn first_layer_above<R: BaseRing>(
    ring: &R,
    p: &SkewPoly<R::Elem>,
    limit: i64,
    eps: f64,
) -> Option<i64> {
    let mut best: Option<i64> = None;
    for c in &p.coeffs {
        for k in ring.layers(c) {
            if k < limit && best.is_none_or(|b| k < b) && ring.layer_abs(c, k) > eps {
                best = Some(k);
            }
        }
    }
    best
}

/// Lifts the residue factorization `f = g h` to `ord(f - g h) >= n_target`.
pub fn hensel_lift<R: BaseRing>(
    ring: &R,
    f: &SkewPoly<R::Elem>,
    g: &SkewPoly<R::Elem>,
    h: &SkewPoly<R::Elem>,
    n_target: i64,
    cfg: &HenselConfig,
) -> Result<HenselOutcome<R::Elem>> {
    let scale = poly_max_abs(ring, f).max(1.0);
    let eps = cfg.eps * scale;
    let d = check_monic(ring, f, eps)?;
    let m = check_monic(ring, g, eps)?;
    let dm = check_monic(ring, h, eps)?;
    if m + dm != d {
        return Err(Error::Domain(format!(
            "factor degrees {m} + {dm} differ from {d}"
        )));
    }
    for (i, c) in f
        .coeffs
        .iter()
        .chain(&g.coeffs)
        .chain(&h.coeffs)
        .enumerate()
    {
        if ring.valuation(c).is_some_and(|v| v < 0) {
            return Err(Error::NegativeOrder {
                degree: i % (d + 1),
                ord: crate::scalar::rat_int(ring.valuation(c).unwrap()),
            });
        }
    }
    if let Some(p) = precision_units(ring, f) {
        if p < n_target {
            return Err(Error::PrecisionExhausted {
                needed: crate::scalar::rat_int(n_target),
                available: crate::scalar::rat_int(p),
            });
        }
    }
    let mut gbar = reduce_residue(ring, g)?;
    let mut hbar = reduce_residue(ring, h)?;
    let fbar = reduce_residue(ring, f)?;
    let mismatch = fbar.distance(&gbar.mul(&hbar));
    if mismatch > cfg.residue_tol * scale.max(gbar.norm() * hbar.norm()) {
        return Err(Error::Domain(format!(
            "residues do not factor: mismatch {mismatch:e}"
        )));
    }
    if let TwistCheck::FailsAt { n, witness } =
        twist_coprime_check(&gbar, &hbar, &ring.residue_twist(), cfg.residue_tol)?
    {
        return Err(Error::TwistCoprimeFailed {
            n,
            witness: witness.to_string(),
        });
    }

    let exact_input = precision_units(ring, f).is_none();
    let mut g = g.clone();
    let mut h = h.clone();
    let full = poly_sub(ring, f, &poly_mul(ring, &g, &h));
    if exact_input && full.is_zero_poly(ring) && precision_units(ring, &full).is_none() {
        return Ok(HenselOutcome {
            g,
            h,
            achieved: None,
            corrections: 0,
            kappa: 1.0,
        });
    }
    let mut defect = truncate_poly(ring, &full, n_target);
    g = truncate_poly(ring, &g, n_target);
    h = truncate_poly(ring, &h, n_target);
    let twist = ring.residue_twist();
    let mut corrections = 0;
    let mut kappa: f64 = 1.0;

    let mut n: i64 = 0;
    let mut polish = 0;
    let mut eps = eps;
    while n < n_target {
        // rounding noise follows the size of the current factors
        eps = eps.max(cfg.eps * poly_max_abs(ring, &g) * poly_max_abs(ring, &h));
        if cfg.check_invariant {
            if let Some(k) = first_layer_above(ring, &defect, n, eps) {
                return Err(Error::Invariant(format!(
                    "defect has a term of order {k} before step {n}"
                )));
            }
        }
        if layer_norm(ring, &defect, n) <= eps {
            n += 1;
            continue;
        }
        let layer = ResiduePoly::new(
            defect
                .coeffs
                .iter()
                .map(|c| ring.left_layer(c, n))
                .collect(),
            ring.bits(),
        );
        let fn_bar = twist_residue(&layer, n, &twist);
        let h_tw = twist_residue(&hbar, n, &twist);
        let e = ext_gcd(&gbar, &h_tw, cfg.residue_tol)?;
        if !e.coprime() {
            return Err(Error::TwistCoprimeFailed {
                n: n.max(0) as u64,
                witness: h_tw.to_string(),
            });
        }
        kappa = kappa.max(e.kappa);
        let (quo, p) = e.b.mul(&fn_bar).divmod(&gbar)?;
        let q = e.a.mul(&fn_bar).add(&quo.mul(&h_tw)).truncate_degree(dm);
        let p_corr = mul_x_pow(ring, &lift_residue(ring, &p), n);
        let q_corr = mul_x_pow(ring, &lift_residue(ring, &q), n);
        if cfg.check_congruence && n > 0 {
            let lhs = truncate_poly(ring, &poly_mul(ring, &p_corr, &h), n_target);
            let rhs = mul_x_pow(
                ring,
                &poly_mul(ring, &lift_residue(ring, &p), &phi_pow(ring, &h, n)),
                n,
            );
            let rhs = truncate_poly(ring, &rhs, n_target);
            let gap = poly_max_abs(ring, &poly_sub(ring, &lhs, &rhs));
            if gap > eps * poly_max_abs(ring, &h).max(1.0) * p.norm().max(1.0) {
                return Err(Error::Invariant(format!(
                    "congruence p x^n h = p phi^n(h) x^n fails at n = {n} by {gap:e}"
                )));
            }
        }
        let ph = poly_mul(ring, &p_corr, &h);
        let gq = poly_mul(ring, &g, &q_corr);
        let pq = poly_mul(ring, &p_corr, &q_corr);
        let delta = truncate_poly(
            ring,
            &poly_add(ring, &poly_add(ring, &ph, &gq), &pq),
            n_target,
        );
        defect = truncate_poly(ring, &poly_sub(ring, &defect, &delta), n_target);
        g = truncate_poly(ring, &poly_add(ring, &g, &p_corr), n_target);
        h = truncate_poly(ring, &poly_add(ring, &h, &q_corr), n_target);
        corrections += 1;
        if n == 0 {
            // a layer-0 correction refines the residue factorization itself
            gbar = reduce_residue(ring, &g)?;
            hbar = reduce_residue(ring, &h)?;
            polish += 1;
            if polish >= cfg.residue_polish {
                n = 1;
            }
            continue;
        }
        if cfg.check_invariant {
            let recomputed =
                truncate_poly(ring, &poly_sub(ring, f, &poly_mul(ring, &g, &h)), n_target);
            if let Some(k) = first_layer_above(ring, &recomputed, n + 1, eps) {
                return Err(Error::Invariant(format!(
                    "ord(f - g h) = {k} after step {n}"
                )));
            }
        }
        n += 1;
    }
    if let Some(k) = first_layer_above(ring, &defect, n_target, eps) {
        return Err(Error::Invariant(format!(
            "defect keeps a term of order {k}"
        )));
    }
    Ok(HenselOutcome {
        g,
        h,
        achieved: Some(n_target),
        corrections,
        kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puiseux::{PuiseuxSeries, SkewContext};
    use crate::scalar::{rat, Alpha, BigComplex, DEFAULT_BITS as P};
    use crate::skew_poly::{evaluate, truncate_at};
    use crate::skew_series::SkewSeriesRing;
    use proptest::prelude::*;

    fn cx(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, P)
    }

    fn s(terms: &[(i64, f64)]) -> PuiseuxSeries {
        PuiseuxSeries::from_terms(1, terms.iter().map(|(k, v)| (*k, cx(*v, 0.0))), None, P)
    }

    fn ctx(p: i64, q: i64) -> SkewContext {
        SkewContext::plain(Alpha::rational(rat(p, q), P).unwrap())
    }

    fn near_square() -> SkewPoly<PuiseuxSeries> {
        SkewPoly::new(vec![
            s(&[(0, 1.0), (1, 2.0)]),
            s(&[(0, -2.0), (1, -1.0)]),
            s(&[(0, 1.0)]),
        ])
    }

    fn linear(c: f64) -> SkewPoly<PuiseuxSeries> {
        SkewPoly::new(vec![s(&[(0, -c)]), s(&[(0, 1.0)])])
    }

    #[test]
    fn near_square_lifts_over_two() {
        let ring = ctx(2, 1);
        let f = near_square();
        let cfg = HenselConfig::for_bits(P).checked();
        let out = hensel_lift(&ring, &f, &linear(1.0), &linear(1.0), 8, &cfg).unwrap();
        let prod = poly_mul(&ring, &out.g, &out.h);
        let diff = truncate_at(&poly_sub(&ring, &f, &prod), &rat(8, 1));
        assert!(poly_max_abs(&ring, &diff) < 2f64.powi(-100));
        let z = out.h.coeffs[0].neg();
        for (k, want) in [(0, 1.0), (1, -1.0), (2, -1.0)] {
            assert!(
                z.coeff_or_zero(k)
                    .approx_eq(&cx(want, 0.0), 2f64.powi(-100)),
                "z_{k} = {}",
                z.coeff_or_zero(k)
            );
        }
        let ev = evaluate(&ring, &f, &z);
        assert!(ev
            .terms()
            .iter()
            .all(|(k, c)| *k >= 8 || c.abs_f64() < 2f64.powi(-100)));
    }

    #[test]
    fn near_square_fails_without_twist() {
        let ring = ctx(1, 1);
        let cfg = HenselConfig::for_bits(P);
        let err =
            hensel_lift(&ring, &near_square(), &linear(1.0), &linear(1.0), 8, &cfg).unwrap_err();
        assert!(matches!(err, Error::TwistCoprimeFailed { n: 1, .. }));
        assert!(err.is_obstruction());
    }

    #[test]
    fn conjugation_ring_fails_at_one() {
        let ring = SkewSeriesRing::new(P);
        let f = SkewPoly::new(vec![
            ring.element(&[(0, cx(1.0, 0.0)), (1, cx(1.0, 0.0))], None),
            ring.zero(),
            ring.one(),
        ]);
        let g = SkewPoly::new(vec![ring.from_complex(&cx(0.0, 1.0)), ring.one()]);
        let h = SkewPoly::new(vec![ring.from_complex(&cx(0.0, -1.0)), ring.one()]);
        match twist_precheck(&ring, &g, &h, 1e-12).unwrap() {
            TwistCheck::FailsAt { n, witness } => {
                assert_eq!(n, 1);
                assert_eq!(witness.to_string(), "t + i");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = hensel_lift(&ring, &f, &g, &h, 6, &HenselConfig::for_bits(P)).unwrap_err();
        assert!(matches!(err, Error::TwistCoprimeFailed { n: 1, .. }));
    }

    #[test]
    fn skew_series_instance_lifts() {
        let ring = SkewSeriesRing::new(P);
        let g0 = SkewPoly::new(vec![
            ring.element(
                &[(0, cx(0.0, -1.0)), (1, cx(1.0, 2.0)), (3, cx(-1.0, 0.0))],
                None,
            ),
            ring.one(),
        ]);
        let h0 = SkewPoly::new(vec![
            ring.element(&[(0, cx(-2.0, 0.0)), (2, cx(0.0, 1.0))], None),
            ring.one(),
        ]);
        let f = poly_mul(&ring, &g0, &h0);
        let g = SkewPoly::new(vec![ring.from_complex(&cx(0.0, -1.0)), ring.one()]);
        let h = SkewPoly::new(vec![ring.from_complex(&cx(-2.0, 0.0)), ring.one()]);
        let out = hensel_lift(&ring, &f, &g, &h, 10, &HenselConfig::for_bits(P).checked()).unwrap();
        let diff = truncate_poly(
            &ring,
            &poly_sub(&ring, &f, &poly_mul(&ring, &out.g, &out.h)),
            10,
        );
        assert!(poly_max_abs(&ring, &diff) < 2f64.powi(-100));
    }

    #[test]
    fn exact_product_returns_exact() {
        let ring = ctx(2, 1);
        let f = poly_mul(&ring, &linear(1.0), &linear(1.0));
        let out = hensel_lift(
            &ring,
            &f,
            &linear(1.0),
            &linear(1.0),
            40,
            &HenselConfig::for_bits(P),
        )
        .unwrap();
        assert!(out.achieved.is_none());
        assert!(out.h.coeffs[0].is_exact());
    }

    #[test]
    fn commutative_instance_reduces_to_coprimality() {
        let ring = ctx(1, 1);
        let tol = 1e-12;
        let pairs = [
            ((1.0, 0.0), (2.0, 0.0)),
            ((1.0, 0.0), (1.0, 0.0)),
            ((0.0, 1.0), (0.0, -1.0)),
            ((3.0, 1.0), (3.0, 1.0)),
        ];
        for (a, b) in pairs {
            let g = SkewPoly::new(vec![ring.from_complex(&cx(-a.0, -a.1)), ring.one()]);
            let h = SkewPoly::new(vec![ring.from_complex(&cx(-b.0, -b.1)), ring.one()]);
            let twist = twist_precheck(&ring, &g, &h, tol).unwrap().passes();
            let gb = reduce_residue(&ring, &g).unwrap();
            let hb = reduce_residue(&ring, &h).unwrap();
            assert_eq!(twist, ext_gcd(&gb, &hb, tol).unwrap().coprime());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(25))]

        #[test]
        fn loop_invariant_holds(al in prop::sample::select(vec![(2i64, 1i64), (3, 2), (1, 2)]), m in 1usize..4, extra in 0usize..3, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ring = ctx(al.0, al.1);
            let dm = (extra + 1).min(6 - m);
            let rand_monic = |deg: usize, rng: &mut rand_chacha::ChaCha8Rng| {
                let mut cs: Vec<PuiseuxSeries> = (0..deg)
                    .map(|_| {
                        let terms: Vec<(i64, BigComplex)> = (0..4)
                            .map(|k| (k, cx(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))))
                            .collect();
                        PuiseuxSeries::from_terms(1, terms, None, P)
                    })
                    .collect();
                cs.push(PuiseuxSeries::one(P));
                SkewPoly::new(cs)
            };
            let g0 = rand_monic(m, &mut rng);
            let h0 = rand_monic(dm, &mut rng);
            let f = poly_mul(&ring, &g0, &h0);
            let lift_res = |p: &SkewPoly<PuiseuxSeries>| lift_residue(&ring, &reduce_residue(&ring, p).unwrap());
            let (g, h) = (lift_res(&g0), lift_res(&h0));
            prop_assume!(twist_precheck(&ring, &g, &h, 2f64.powf(-(P as f64) / 3.0)).unwrap().passes());
            let n = 12;
            let out = hensel_lift(&ring, &f, &g, &h, n, &HenselConfig::for_bits(P).checked()).unwrap();
            let diff = truncate_poly(&ring, &poly_sub(&ring, &f, &poly_mul(&ring, &out.g, &out.h)), n);
            let scale = poly_max_abs(&ring, &f).max(1.0);
            prop_assert!(poly_max_abs(&ring, &diff) <= scale * 2f64.powi(-(P as i32) + 16));
            prop_assert_eq!(out.g.degree(&ring), Some(m));
            prop_assert_eq!(out.h.degree(&ring), Some(dm));
        }
    }
}
