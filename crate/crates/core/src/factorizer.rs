//! Factorization of monic skew polynomials over `F[t, sigma]` into linear
//! factors: scale, normalize, shift, split by an orbit partition of the
//! residue roots, lift, pull back and recurse.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hensel::{hensel_lift, HenselConfig};
use crate::puiseux::{PuiseuxSeries, SkewContext};
use crate::residue::{
    delta_set_member, orbit_partition, roots, DeltaMembership, ResiduePoly, TMap,
};
use crate::scalar::{lcm_u32, rat_int, BigComplex, Rational};
use crate::skew_poly::{
    evaluate, left_divmod, lift_residue, poly_max_abs, poly_mul, poly_ram, poly_scale_left,
    poly_sub, SkewPoly,
};
use crate::structure_maps::{
    certify_beta_law, normalize_scaled, pullback_poly, pullback_zero, scaling_exponent, shift_iso,
    significant_ord, trace_solve, IsoRecord,
};

#[derive(Clone, Debug)]
pub struct FactorConfig {
    /// Zeros and the product identity are wanted modulo `x^target_order`.
    pub target_order: Rational,
    pub max_ramification: u32,
    pub max_classical_iterations: u32,
    pub bits: usize,
    /// Relative distance below which residue roots are merged.
    pub root_tol: f64,
    /// Relative tolerance for orbit membership.
    pub orbit_tol: f64,
    /// Relative size below which a term is treated as zero in order decisions.
    pub zero_eps: f64,
    /// Relative size below which a Hensel defect layer is skipped.
    pub hensel_eps: f64,
    /// Shift by the whole trace preimage instead of its constant term.
    pub full_shift: bool,
    /// Recurse on the two factors of a split concurrently.
    pub parallel: bool,
    /// Run Hensel with per-step invariant assertions.
    pub check_invariants: bool,
    /// Attempts with increasing working order before reporting.
    pub max_attempts: u32,
    /// Relative product residual above which the computation is repeated
    /// with more bits.
    pub residual_tol: f64,
    /// Largest working precision the driver may escalate to.
    pub max_bits: usize,
}

impl FactorConfig {
    pub fn new(bits: usize, target_order: Rational) -> Self {
        let p = bits as f64;
        FactorConfig {
            target_order,
            max_ramification: 256,
            max_classical_iterations: 64,
            bits,
            root_tol: 2f64.powf(-p / 3.0),
            orbit_tol: 2f64.powf(-p / 4.0),
            zero_eps: 2f64.powf(-p / 2.0),
            hensel_eps: 2f64.powf(-p + 16.0),
            full_shift: false,
            parallel: true,
            check_invariants: false,
            max_attempts: 4,
            residual_tol: 2f64.powf(-0.75 * p),
            max_bits: 8 * bits,
        }
    }

    fn hensel(&self) -> HenselConfig {
        HenselConfig {
            eps: self.hensel_eps,
            residue_tol: self.root_tol,
            check_invariant: self.check_invariants,
            check_congruence: self.check_invariants,
            residue_polish: 8,
        }
    }
}

/// `f = u (t - c_1) (t - c_2) ... (t - c_d)` with `u` the leading coefficient.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub factors: Vec<PuiseuxSeries>,
    pub unit: PuiseuxSeries,
    /// Largest coefficient modulus of `f - u prod (t - c_i)` below `precision`.
    pub residual: f64,
    pub iso_trail: Vec<IsoRecord>,
    /// The product identity is known modulo `x^precision`.
    pub precision: Rational,
    /// The product identity holds exactly.
    pub exact: bool,
    /// Order of `f(c_d)` for the rightmost zero.
    pub check_ord: Option<Rational>,
    pub ramification: u32,
    /// False when a classical iteration budget ran out and some factors are
    /// truncated expansions.
    pub complete: bool,
}

/// Outcome of one dispatch of the splitting step.
#[derive(Clone, Debug)]
pub enum StepOutcome {
    /// `f = g h` in the transformed ring.
    Split {
        g: SkewPoly<PuiseuxSeries>,
        h: SkewPoly<PuiseuxSeries>,
    },
    Linear,
    /// `alpha = 1` with residue `t^d`: rescale and repeat.
    ClassicalLoop,
}

fn beta_law_gate() -> Result<()> {
    static GATE: OnceLock<std::result::Result<(), String>> = OnceLock::new();
    GATE.get_or_init(|| certify_beta_law().map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::Invariant)
}

fn x_units(q: &Rational, ram: u32) -> i64 {
    (q * Rational::from_integer(BigInt::from(ram)))
        .ceil()
        .to_integer()
        .to_i64()
        .expect("order fits in i64")
}

fn rat_of(k: i64, ram: u32) -> Rational {
    Rational::new(BigInt::from(k), BigInt::from(ram))
}

/// Largest coefficient magnitude over terms of order at most one. Higher
/// terms may grow geometrically and say nothing about the noise level at the
/// orders where decisions are made.
fn poly_scale(f: &SkewPoly<PuiseuxSeries>) -> f64 {
    f.coeffs
        .iter()
        .flat_map(|c| {
            let ram = c.ram() as i64;
            c.terms()
                .iter()
                .filter(move |(k, _)| *k <= ram)
                .map(|(_, v)| v.abs_f64())
        })
        .fold(1.0, f64::max)
}

/// Residue with coefficients at most `eps` replaced by zero.
fn chopped_residue(f: &SkewPoly<PuiseuxSeries>, eps: f64) -> ResiduePoly {
    let bits = f.coeffs.first().map_or(128, |c| c.bits());
    let cs = f
        .coeffs
        .iter()
        .map(|c| {
            let v = c.coeff_or_zero(0);
            if v.abs_f64() <= eps {
                BigComplex::zero(bits)
            } else {
                v
            }
        })
        .collect();
    ResiduePoly::new(cs, bits)
}

/// Removes negative-order terms, which only noise below the decision
/// threshold can produce after normalization.
fn drop_negative_terms(f: &SkewPoly<PuiseuxSeries>) -> SkewPoly<PuiseuxSeries> {
    SkewPoly::new(
        f.coeffs
            .iter()
            .map(|c| {
                if c.ord_units().is_some_and(|k| k < 0) {
                    PuiseuxSeries::from_terms(
                        c.ram(),
                        c.terms().iter().filter(|(k, _)| *k >= 0).cloned(),
                        c.trunc(),
                        c.bits(),
                    )
                } else {
                    c.clone()
                }
            })
            .collect(),
    )
}

fn min_trunc(f: &SkewPoly<PuiseuxSeries>) -> Option<Rational> {
    f.coeffs.iter().filter_map(|c| c.trunc_q()).min()
}

/// The splitting step on a monic `f` with integral coefficients, some lower
/// coefficient of order zero and the `t^(d-1)` residue zero.
pub fn factor_step(
    ctx: &SkewContext,
    f: &SkewPoly<PuiseuxSeries>,
    n_units: i64,
    cfg: &FactorConfig,
) -> Result<StepOutcome> {
    let d = f.coeffs.len() - 1;
    if d <= 1 {
        return Ok(StepOutcome::Linear);
    }
    let eps = cfg.zero_eps * poly_scale(f);
    let res = chopped_residue(f, eps);
    let one = ctx.alpha.is_one();
    let hcfg = cfg.hensel();
    if res.coeffs()[..d].iter().any(|c| !c.is_zero()) {
        let rs = roots(&res, cfg.root_tol)?;
        let tm = TMap::new(ctx.alpha_eff(), ctx.a0()).with_identity(one);
        let alpha_f = ctx.alpha_eff().re_f64();
        let mut cands: Vec<(u8, f64, BigComplex)> = rs
            .roots
            .iter()
            .map(|(c, _)| {
                let pri = match delta_set_member(c, &tm.a0, alpha_f, d, 32) {
                    DeltaMembership::NonMember => 0,
                    DeltaMembership::Unknown => 1,
                    DeltaMembership::Member(_) => 2,
                };
                (pri, c.abs_f64(), c.clone())
            })
            .collect();
        cands.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1)));
        for (_, _, c1) in &cands {
            let op = orbit_partition(&rs, c1, &tm, cfg.orbit_tol);
            if op.j == 0 || op.j >= d {
                continue;
            }
            let u = lift_residue(ctx, &op.member_poly(ctx.bits));
            let v = lift_residue(ctx, &op.outsider_poly(ctx.bits));
            let out = hensel_lift(ctx, f, &u, &v, n_units, &hcfg)?;
            return Ok(StepOutcome::Split { g: out.g, h: out.h });
        }
        return Err(Error::NoSplittingRoot(format!("residue {res}")));
    }
    if one {
        return Ok(StepOutcome::ClassicalLoop);
    }
    let g = SkewPoly::monomial(ctx, PuiseuxSeries::one(ctx.bits), d - 1);
    let h = SkewPoly::t(ctx);
    let out = hensel_lift(ctx, f, &g, &h, n_units, &hcfg)?;
    Ok(StepOutcome::Split { g: out.g, h: out.h })
}

struct Split {
    zeros: Vec<PuiseuxSeries>,
    trail: Vec<IsoRecord>,
    complete: bool,
}

/// Zeros `c_i` with `f = prod (t - c_i)` for monic `f` in the `delta = 0` ring.
fn split_rec(
    ctx: &SkewContext,
    f: &SkewPoly<PuiseuxSeries>,
    w: &Rational,
    depth: u32,
    cfg: &FactorConfig,
) -> Result<Split> {
    let d = f.coeffs.len() - 1;
    let bits = ctx.bits;
    if d == 0 {
        return Ok(Split {
            zeros: Vec::new(),
            trail: Vec::new(),
            complete: true,
        });
    }
    if d == 1 {
        return Ok(Split {
            zeros: vec![f.coeffs[0].neg()],
            trail: Vec::new(),
            complete: true,
        });
    }
    let eps = cfg.zero_eps * poly_scale(f);
    let r = match scaling_exponent(f, eps) {
        Some(r) => r,
        None => {
            // every lower coefficient vanishes to the known precision
            let theta = (0..d)
                .filter_map(|i| {
                    f.coeffs[i]
                        .trunc_q()
                        .map(|t| t / Rational::from_integer(BigInt::from((d - i) as i64)))
                })
                .min();
            let z = match theta {
                Some(t) => PuiseuxSeries::zero_trunc(
                    t.denom().to_u32().expect("ramification fits in u32"),
                    t.numer().to_i64().expect("order fits in i64"),
                    bits,
                ),
                None => PuiseuxSeries::zero(bits),
            };
            return Ok(Split {
                zeros: vec![z; d],
                trail: Vec::new(),
                complete: true,
            });
        }
    };
    let (f1, ctx1, mut records) = normalize_scaled(ctx, f, &r)?;
    let f1 = drop_negative_terms(&f1);
    let lead = &f1.coeffs[d - 1];
    let mut b = PuiseuxSeries::zero(bits);
    if lead.coeff_or_zero(0).abs_f64() > eps {
        let full = trace_solve(lead, d, &ctx.alpha)?;
        b = if ctx.alpha.is_one() || cfg.full_shift {
            full
        } else {
            PuiseuxSeries::constant(full.coeff_or_zero(0))
        };
    }
    let (f2, ctx2) = if b.is_zero() {
        (f1, ctx1)
    } else {
        shift_iso(&ctx1, &f1, &b)
    };
    if !b.is_zero() {
        records.push(IsoRecord::Shift { b });
    }
    let ram2 = lcm_u32(ctx2.ram, poly_ram(&f2));
    let ctx2 = ctx2.with_ram(ram2);
    if ram2 > cfg.max_ramification || depth > cfg.max_classical_iterations {
        return budget_exhausted(ctx, f, &r, d, &records, depth, cfg);
    }
    // working order in the transformed coordinates
    let mut n_x = w + r.abs() * Rational::from_integer(BigInt::from(d as i64)) + Rational::one();
    if let Some(t) = min_trunc(&f2) {
        n_x = n_x.min(t);
    }
    let n_units = x_units(&n_x, ram2).max(1);
    let step = factor_step(&ctx2, &f2, n_units, cfg)?;
    let (g_s, h_s) = match step {
        StepOutcome::Linear => unreachable!("degree is at least two"),
        StepOutcome::ClassicalLoop => {
            let inner_w = w + &r;
            let inner = split_rec(
                &ctx2.with_a(PuiseuxSeries::zero(bits)),
                &f2,
                &inner_w,
                depth + 1,
                cfg,
            )?;
            let zeros = inner
                .zeros
                .iter()
                .map(|z| pullback_zero(&records, z))
                .collect();
            let mut trail = records;
            trail.extend(inner.trail);
            return Ok(Split {
                zeros,
                trail,
                complete: inner.complete,
            });
        }
        StepOutcome::Split { g, h } => (g, h),
    };
    let target = n_x.clone() + Rational::from_integer(BigInt::from(d as i64)) * r.abs();
    let (h, hctx) = pullback_poly(&ctx2, &h_s, &records, &target)?;
    let ram = lcm_u32(lcm_u32(ctx.ram, hctx.ram), poly_ram(&h));
    let base = SkewContext::new(ctx.alpha.clone(), ram, PuiseuxSeries::zero(bits));
    let (g, _rem) = left_divmod(&base, f, &h)?;
    let _ = g_s;
    let (left, right) = if cfg.parallel {
        rayon::join(
            || split_rec(&base, &g, w, depth, cfg),
            || split_rec(&base, &h, w, depth, cfg),
        )
    } else {
        let right = split_rec(&base, &h, w, depth, cfg);
        (split_rec(&base, &g, w, depth, cfg), right)
    };
    let (left, right) = (left?, right?);
    let mut zeros = left.zeros;
    zeros.extend(right.zeros);
    let mut trail = records;
    trail.extend(right.trail);
    Ok(Split {
        zeros,
        trail,
        complete: left.complete && right.complete,
    })
}

fn budget_exhausted(
    ctx: &SkewContext,
    f: &SkewPoly<PuiseuxSeries>,
    r: &Rational,
    d: usize,
    records: &[IsoRecord],
    depth: u32,
    cfg: &FactorConfig,
) -> Result<Split> {
    let _ = (ctx, f);
    if cfg.max_classical_iterations == 0 && depth == 0 {
        return Err(Error::Budget {
            kind: "classical iteration",
            spent: 0,
        });
    }
    // in the normalized coordinates every zero has order at least 0
    let z = PuiseuxSeries::zero_trunc(1, 0, cfg.bits);
    let z = pullback_zero(records, &z);
    let _ = r;
    Ok(Split {
        zeros: vec![z; d],
        trail: records.to_vec(),
        complete: false,
    })
}

/// Largest coefficient deviation of `f - u prod (t - c_i)` and the order to
/// which it is known.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub deviation: f64,
    pub precision: Option<Rational>,
    pub check_ord: Option<Rational>,
}

pub fn product_of_linear(
    ctx: &SkewContext,
    unit: &PuiseuxSeries,
    zeros: &[PuiseuxSeries],
) -> SkewPoly<PuiseuxSeries> {
    let mut p = SkewPoly::constant(ctx, unit.clone());
    for z in zeros {
        p = poly_mul(ctx, &p, &SkewPoly::linear(ctx, z));
    }
    p
}

pub fn verify_factorization(
    ctx: &SkewContext,
    f: &SkewPoly<PuiseuxSeries>,
    fac: &Factorization,
    tol: f64,
) -> VerifyReport {
    let ram = fac
        .factors
        .iter()
        .fold(lcm_u32(ctx.ram, poly_ram(f)), |acc, z| {
            lcm_u32(acc, z.ram())
        });
    let c = ctx.with_ram(ram);
    let prod = product_of_linear(&c, &fac.unit, &fac.factors);
    let diff = poly_sub(&c, f, &prod);
    let precision = min_trunc(&diff);
    let deviation = poly_max_abs(&c, &diff);
    let check_ord = fac.factors.last().and_then(|z| {
        let v = evaluate(&c, f, z);
        let eps = tol * poly_scale(f).max(1.0);
        match (significant_ord(&v, eps), v.trunc_q()) {
            (Some(o), Some(t)) => Some(o.min(t)),
            (Some(o), None) => Some(o),
            (None, t) => t,
        }
    });
    VerifyReport {
        deviation,
        precision,
        check_ord,
    }
}

/// Factors `f` into linear factors to the configured order.
pub fn newton_puiseux_factor(
    ctx: &SkewContext,
    f: &SkewPoly<PuiseuxSeries>,
    cfg: &FactorConfig,
) -> Result<Factorization> {
    beta_law_gate()?;
    if !ctx.alpha.is_positive_real() {
        return Err(Error::Domain(
            "factorization needs a positive real alpha".into(),
        ));
    }
    if !ctx.a.is_zero() {
        return Err(Error::Domain(
            "factorization starts in the ring without derivation".into(),
        ));
    }
    let f = f.clone().trimmed(ctx);
    let scale = poly_scale(&f);
    let mut fac = factor_at(ctx, &f, cfg)?;
    let mut bits = ctx.bits;
    // split factors whose series grow fast cancel in the product, so the
    // residual is bought back with working precision
    while fac.residual > cfg.residual_tol * scale && bits < cfg.max_bits {
        let lost = (fac.residual / (cfg.residual_tol * scale)).log2().ceil() as usize;
        bits = (bits + lost + 32).next_multiple_of(64).min(cfg.max_bits);
        let c = ctx.with_bits(bits);
        let g = SkewPoly::new(f.coeffs.iter().map(|x| x.with_bits(bits)).collect());
        let fresh = FactorConfig::new(bits, cfg.target_order.clone());
        let cfg2 = FactorConfig {
            bits,
            root_tol: fresh.root_tol,
            orbit_tol: fresh.orbit_tol,
            zero_eps: fresh.zero_eps,
            hensel_eps: fresh.hensel_eps,
            ..cfg.clone()
        };
        fac = factor_at(&c, &g, &cfg2)?;
    }
    Ok(fac)
}

fn factor_at(
    ctx: &SkewContext,
    f: &SkewPoly<PuiseuxSeries>,
    cfg: &FactorConfig,
) -> Result<Factorization> {
    let f = f.clone();
    let d = f
        .degree(ctx)
        .ok_or_else(|| Error::Domain("the zero polynomial has no factorization".into()))?;
    let lc = f.coeffs[d].clone();
    let target = cfg.target_order.clone();
    let mut trail = Vec::new();
    let (monic, unit) = if lc.is_exact()
        && lc.terms().len() == 1
        && lc.terms()[0].0 == 0
        && lc.terms()[0].1 == BigComplex::one(ctx.bits)
    {
        (f.clone(), PuiseuxSeries::one(ctx.bits))
    } else {
        let k = lc.ord().ok_or(Error::NotMonic)?;
        let inv_target =
            target.clone() + k.abs() * Rational::from_integer(BigInt::from(2 * d as i64 + 2));
        let inv = lc.inv(&inv_target)?;
        let mut m = poly_scale_left(ctx, &inv, &f);
        m.coeffs[d] = PuiseuxSeries::one(ctx.bits);
        trail.push(IsoRecord::UnitNormalize {
            scalar: lc.leading().unwrap().1.clone(),
            exponent: k,
        });
        (m, lc.clone())
    };
    let base = ctx.with_ram(lcm_u32(ctx.ram, poly_ram(&monic)));
    // zeros have order at least -r, so products of d - 1 of them lose up to
    // (d - 1) r orders
    let r_max = scaling_exponent(&monic, cfg.zero_eps * poly_scale(&monic))
        .map_or(Rational::zero(), |r| r.max(Rational::zero()));
    let unit_loss = lc
        .ord()
        .map_or(Rational::zero(), |k| (-k).max(Rational::zero()));
    let mut w =
        target.clone() + Rational::one() + r_max * rat_int(d as i64 - 1) + unit_loss.clone();
    let coeff_ords: Vec<Option<Rational>> = f.coeffs.iter().map(|c| c.ord()).collect();
    let mut best: Option<Factorization> = None;
    for _ in 0..cfg.max_attempts.max(1) {
        let split = split_rec(&base, &monic, &w, 0, cfg)?;
        let zeros = trim_zeros(
            split.zeros,
            &target,
            &unit_loss,
            &coeff_ords,
            cfg.hensel_eps,
        );
        let ramification = zeros.iter().fold(1, |acc, z| lcm_u32(acc, z.ram()));
        let mut fac = Factorization {
            factors: zeros,
            unit: unit.clone(),
            residual: 0.0,
            iso_trail: trail.iter().cloned().chain(split.trail).collect(),
            precision: target.clone(),
            exact: false,
            check_ord: None,
            ramification,
            complete: split.complete,
        };
        let rep = verify_factorization(&base, &f, &fac, cfg.zero_eps);
        fac.residual = rep.deviation;
        fac.exact = rep.precision.is_none() && rep.deviation == 0.0;
        fac.precision = rep.precision.clone().unwrap_or_else(|| target.clone());
        fac.check_ord = rep.check_ord;
        let done = fac.exact || fac.precision >= target || !fac.complete;
        let better = best.as_ref().is_none_or(|b| fac.precision > b.precision);
        if better {
            best = Some(fac);
        }
        if done {
            break;
        }
        let short = target.clone() - best.as_ref().unwrap().precision.clone();
        w = w + short.max(Rational::one()) * rat_int(2);
    }
    Ok(best.expect("at least one attempt"))
}

/// Drops rounding noise and truncates each zero at the order the product
/// identity needs, given the negative orders of the other zeros.
/// The rightmost zero also keeps enough terms for `f(c_d)` to be known to
/// the target.
fn trim_zeros(
    zeros: Vec<PuiseuxSeries>,
    target: &Rational,
    unit_loss: &Rational,
    coeff_ords: &[Option<Rational>],
    eps: f64,
) -> Vec<PuiseuxSeries> {
    let zeros: Vec<PuiseuxSeries> = zeros
        .into_iter()
        .map(|z| {
            let lo = z
                .ord()
                .map_or(Rational::zero(), |o| o.max(Rational::zero()))
                + Rational::one();
            let scale = z.max_abs_below(&lo).max(1.0);
            z.chop(eps * scale)
        })
        .collect();
    let neg: Vec<Rational> = zeros
        .iter()
        .map(|z| {
            z.ord()
                .map_or(Rational::zero(), |o| (-o).max(Rational::zero()))
        })
        .collect();
    let total: Rational = neg.iter().sum();
    let last = zeros.len().saturating_sub(1);
    zeros
        .iter()
        .zip(&neg)
        .enumerate()
        .map(|(j, (z, n))| {
            let mut need = target.clone() + total.clone() - n.clone() + unit_loss.clone();
            if j == last {
                for (i, o) in coeff_ords.iter().enumerate().skip(1) {
                    if let Some(o) = o {
                        need = need.max(target.clone() + n.clone() * rat_int(i as i64 - 1) - o);
                    }
                }
            }
            match z.trunc_q() {
                Some(t) if t > need => z.truncate(&need),
                _ => z.clone(),
            }
        })
        .collect()
}

/// Rightmost zero of the factorization.
pub fn sigma_zero(
    ctx: &SkewContext,
    f: &SkewPoly<PuiseuxSeries>,
    cfg: &FactorConfig,
) -> Result<(PuiseuxSeries, Factorization)> {
    let fac = newton_puiseux_factor(ctx, f, cfg)?;
    let z = fac
        .factors
        .last()
        .cloned()
        .ok_or_else(|| Error::Domain("constant polynomial has no zero".into()))?;
    Ok((z, fac))
}

/// Newton steps on the `(m-1)`-th derivative, where a root of multiplicity
/// `m` is simple.
fn refine_root(p: &ResiduePoly, c: BigComplex, mult: usize) -> BigComplex {
    let mut q = p.clone();
    for _ in 1..mult {
        q = q.derivative();
    }
    let dq = q.derivative();
    let mut c = c;
    for _ in 0..8 {
        let step = match q.eval(&c).div(&dq.eval(&c)) {
            Ok(s) => s,
            Err(_) => break,
        };
        c = c.sub(&step);
    }
    c
}

/// Solves `sigma(z) z + f_1 z + f_0 = 0` coefficient by coefficient at the
/// ramification of the input, starting from a residue root; reports the
/// first exponent whose multiplier vanishes while its forcing term does not.
pub fn sigma_zero_quadratic(
    ctx: &SkewContext,
    f: &SkewPoly<PuiseuxSeries>,
    cfg: &FactorConfig,
) -> Result<PuiseuxSeries> {
    let f = f.clone().trimmed(ctx);
    if f.coeffs.len() != 3 {
        return Err(Error::Domain("the quadratic oracle needs degree 2".into()));
    }
    if ctx.has_delta() {
        return Err(Error::Domain("the quadratic oracle needs delta = 0".into()));
    }
    let bits = ctx.bits;
    if (f.coeffs[2].sub(&PuiseuxSeries::one(bits))).max_abs() != 0.0 {
        return Err(Error::NotMonic);
    }
    let ram = lcm_u32(ctx.ram, poly_ram(&f));
    let f1 = f.coeffs[1].to_ram(ram);
    let f0 = f.coeffs[0].to_ram(ram);
    for c in [&f0, &f1] {
        if c.ord_units().is_some_and(|k| k < 0) {
            return Err(Error::NegativeOrder {
                degree: 0,
                ord: c.ord().unwrap(),
            });
        }
    }
    let res = ResiduePoly::new(
        vec![
            f0.coeff_or_zero(0),
            f1.coeff_or_zero(0),
            BigComplex::one(bits),
        ],
        bits,
    );
    let rs = roots(&res, cfg.root_tol)?;
    let (g0, mult) = rs.roots[0].clone();
    let g0 = refine_root(&res, g0, mult);
    let n = x_units(&cfg.target_order, ram).max(1);
    let mut trunc = n;
    for c in [&f0, &f1] {
        if let Some(t) = c.trunc() {
            trunc = trunc.min(t);
        }
    }
    let scale = poly_scale(&f).max(g0.abs_f64()).max(1.0);
    let tol = cfg.zero_eps * scale;
    let alpha_pows: Vec<BigComplex> = (0..trunc.max(1))
        .map(|k| ctx.alpha.pow(&rat_of(k, ram)))
        .collect();
    let mut g: Vec<BigComplex> = vec![g0.clone()];
    for k in 1..trunc {
        let mut forcing = f0.coeff_or_zero(k);
        for i in 1..k {
            forcing = forcing.add(
                &alpha_pows[i as usize]
                    .mul(&g[i as usize])
                    .mul(&g[(k - i) as usize]),
            );
        }
        for j in 0..k {
            let c = f1.coeff_or_zero(k - j);
            if !c.is_zero() {
                forcing = forcing.add(&c.mul(&g[j as usize]));
            }
        }
        let mult = alpha_pows[k as usize]
            .mul(&g0)
            .add(&g0)
            .add(&f1.coeff_or_zero(0));
        if mult.abs_f64() <= tol {
            if forcing.abs_f64() > tol {
                return Err(Error::Obstruction { q: rat_of(k, ram) });
            }
            g.push(BigComplex::zero(bits));
            continue;
        }
        g.push(forcing.neg().div(&mult)?);
    }
    let terms = g.into_iter().enumerate().map(|(k, c)| (k as i64, c));
    Ok(PuiseuxSeries::from_terms(ram, terms, Some(trunc), bits).normalized_ram())
}

/// Whether the top-level split carries a positive exponent.
pub fn is_positive(q: &Rational) -> bool {
    q.is_positive() && !q.is_zero()
}
