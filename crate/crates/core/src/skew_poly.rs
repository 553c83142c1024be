//! Skew polynomials `A[t, sigma, delta]` over a base ring, with the
//! multiplication rule `t c = sigma(c) t + delta(c)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::puiseux::{PuiseuxSeries, SkewContext};
use crate::residue::{ResiduePoly, ResidueTwist, TMap};
use crate::scalar::{BigComplex, Rational};

/// Capabilities a coefficient ring must provide. The ring is complete with
/// respect to a uniformizer `y`; valuations are counted in powers of `y`.
pub trait BaseRing: Clone + Send + Sync {
    type Elem: Clone + Send + Sync + fmt::Debug;

    fn bits(&self) -> usize;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_complex(&self, c: &BigComplex) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// No stored terms (a truncated zero also counts).
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn sigma(&self, a: &Self::Elem) -> Self::Elem;
    fn delta(&self, a: &Self::Elem) -> Self::Elem;
    fn has_delta(&self) -> bool;
    /// Exponent of the first stored term in powers of `y`.
    fn valuation(&self, a: &Self::Elem) -> Option<i64>;
    /// Known precision in powers of `y`; `None` when exact.
    fn precision(&self, a: &Self::Elem) -> Option<i64>;
    fn truncate(&self, a: &Self::Elem, n: i64) -> Self::Elem;
    fn residue(&self, a: &Self::Elem) -> Result<BigComplex>;
    /// Residue of `y^(-n) a`.
    fn left_layer(&self, a: &Self::Elem, n: i64) -> BigComplex;
    /// Largest coefficient modulus in the layer `y^n`.
    fn layer_abs(&self, a: &Self::Elem, n: i64) -> f64;
    /// `y^n a`.
    fn x_mul(&self, a: &Self::Elem, n: i64) -> Self::Elem;
    /// Coefficient part of `phi^n`, where `phi(p) = y p y^(-1)`.
    fn phi_pow_coeff(&self, a: &Self::Elem, n: i64) -> Self::Elem;
    /// `phi^n(t) = c1 t + c0`, returned as `(c0, c1)`.
    fn phi_pow_t(&self, n: i64) -> (Self::Elem, Self::Elem);
    /// Action of `phi` on residue polynomials.
    fn residue_twist(&self) -> ResidueTwist;
    fn max_abs(&self, a: &Self::Elem) -> f64;
    fn chop(&self, a: &Self::Elem, eps: f64) -> Self::Elem;
    /// Exponents in `y` of the nonzero terms of `a`.
    fn layers(&self, a: &Self::Elem) -> Vec<i64>;
}

/// Dense skew polynomial; index `i` holds the coefficient of `t^i`
/// (coefficients written on the left).
#[derive(Clone, Debug)]
pub struct SkewPoly<E> {
    pub coeffs: Vec<E>,
}

impl<E: Clone> SkewPoly<E> {
    pub fn new(coeffs: Vec<E>) -> Self {
        SkewPoly { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Option<&E> {
        self.coeffs.get(i)
    }
}

impl<E: Clone> SkewPoly<E> {
    pub fn zero() -> Self {
        SkewPoly { coeffs: Vec::new() }
    }

    pub fn constant<R: BaseRing<Elem = E>>(_ring: &R, c: E) -> Self {
        SkewPoly { coeffs: vec![c] }
    }

    pub fn one<R: BaseRing<Elem = E>>(ring: &R) -> Self {
        SkewPoly {
            coeffs: vec![ring.one()],
        }
    }

    /// The variable `t`.
    pub fn t<R: BaseRing<Elem = E>>(ring: &R) -> Self {
        SkewPoly {
            coeffs: vec![ring.zero(), ring.one()],
        }
    }

    /// `t - c`.
    pub fn linear<R: BaseRing<Elem = E>>(ring: &R, c: &E) -> Self {
        SkewPoly {
            coeffs: vec![ring.neg(c), ring.one()],
        }
    }

    /// `c t^k`.
    pub fn monomial<R: BaseRing<Elem = E>>(ring: &R, c: E, k: usize) -> Self {
        let mut coeffs = vec![ring.zero(); k];
        coeffs.push(c);
        SkewPoly { coeffs }
    }

    /// Index of the last coefficient with stored terms.
    pub fn degree<R: BaseRing<Elem = E>>(&self, ring: &R) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !ring.is_zero(c))
    }

    /// Removes trailing coefficients without stored terms.
    pub fn trimmed<R: BaseRing<Elem = E>>(mut self, ring: &R) -> Self {
        while self.coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero_poly<R: BaseRing<Elem = E>>(&self, ring: &R) -> bool {
        self.coeffs.iter().all(|c| ring.is_zero(c))
    }
}

fn coeff_or_zero<R: BaseRing>(ring: &R, p: &SkewPoly<R::Elem>, i: usize) -> R::Elem {
    p.coeffs.get(i).cloned().unwrap_or_else(|| ring.zero())
}

pub fn poly_add<R: BaseRing>(
    ring: &R,
    f: &SkewPoly<R::Elem>,
    g: &SkewPoly<R::Elem>,
) -> SkewPoly<R::Elem> {
    let n = f.len().max(g.len());
    let coeffs = (0..n)
        .map(|i| match (f.coeffs.get(i), g.coeffs.get(i)) {
            (Some(a), Some(b)) => ring.add(a, b),
            (Some(a), None) => a.clone(),
            (None, Some(b)) => b.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    SkewPoly { coeffs }
}

pub fn poly_neg<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>) -> SkewPoly<R::Elem> {
    SkewPoly {
        coeffs: f.coeffs.iter().map(|c| ring.neg(c)).collect(),
    }
}

pub fn poly_sub<R: BaseRing>(
    ring: &R,
    f: &SkewPoly<R::Elem>,
    g: &SkewPoly<R::Elem>,
) -> SkewPoly<R::Elem> {
    poly_add(ring, f, &poly_neg(ring, g))
}

/// `c f`, multiplying every coefficient on the left.
pub fn poly_scale_left<R: BaseRing>(
    ring: &R,
    c: &R::Elem,
    f: &SkewPoly<R::Elem>,
) -> SkewPoly<R::Elem> {
    SkewPoly {
        coeffs: f.coeffs.iter().map(|a| ring.mul(c, a)).collect(),
    }
}

/// `t f = sum sigma(f_i) t^(i+1) + delta(f_i) t^i`.
pub fn t_mul<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>) -> SkewPoly<R::Elem> {
    let n = f.len();
    let mut coeffs: Vec<R::Elem> = Vec::with_capacity(n + 1);
    coeffs.push(ring.zero());
    for c in &f.coeffs {
        coeffs.push(ring.sigma(c));
    }
    if ring.has_delta() {
        for (i, c) in f.coeffs.iter().enumerate() {
            let d = ring.delta(c);
            if !ring.is_zero(&d) || ring.precision(&d).is_some() {
                coeffs[i] = ring.add(&coeffs[i], &d);
            }
        }
    }
    SkewPoly { coeffs }
}

/// Ring product `f g`.
pub fn poly_mul<R: BaseRing>(
    ring: &R,
    f: &SkewPoly<R::Elem>,
    g: &SkewPoly<R::Elem>,
) -> SkewPoly<R::Elem> {
    if f.is_empty() || g.is_empty() {
        return SkewPoly::zero();
    }
    let mut out: Vec<Option<R::Elem>> = vec![None; f.len() + g.len() - 1];
    let mut tg = g.clone();
    for (i, fi) in f.coeffs.iter().enumerate() {
        if i > 0 {
            tg = t_mul(ring, &tg);
        }
        if ring.is_zero(fi) && ring.precision(fi).is_none() {
            continue;
        }
        for (j, c) in tg.coeffs.iter().enumerate() {
            let p = ring.mul(fi, c);
            let slot = &mut out[j];
            *slot = Some(match slot.take() {
                Some(v) => ring.add(&v, &p),
                None => p,
            });
        }
    }
    SkewPoly {
        coeffs: out
            .into_iter()
            .map(|c| c.unwrap_or_else(|| ring.zero()))
            .collect(),
    }
}

/// Left division with remainder: `f = q p + r`, `deg r < deg p`, `p` monic.
pub fn left_divmod<R: BaseRing>(
    ring: &R,
    f: &SkewPoly<R::Elem>,
    p: &SkewPoly<R::Elem>,
) -> Result<(SkewPoly<R::Elem>, SkewPoly<R::Elem>)> {
    let p = p.clone().trimmed(ring);
    let m = match p.degree(ring) {
        Some(m) => m,
        None => return Err(Error::NotMonic),
    };
    let lead = &p.coeffs[m];
    let one = ring.one();
    if ring.precision(lead).is_some() || ring.max_abs(&ring.sub(lead, &one)) != 0.0 {
        return Err(Error::NotMonic);
    }
    let mut r = f.clone().trimmed(ring);
    if r.len() <= m {
        return Ok((SkewPoly::zero(), r));
    }
    let qlen = r.len() - m;
    let mut q: Vec<R::Elem> = vec![ring.zero(); qlen];
    let mut shifted = vec![p.clone()];
    for _ in 1..qlen {
        let next = t_mul(ring, shifted.last().unwrap());
        shifted.push(next);
    }
    for k in (m..r.len()).rev() {
        let j = k - m;
        let c = r.coeffs[k].clone();
        r.coeffs.pop();
        if ring.is_zero(&c) && ring.precision(&c).is_none() {
            continue;
        }
        let sp = &shifted[j];
        for (i, s) in sp.coeffs.iter().enumerate().take(k) {
            let prod = ring.mul(&c, s);
            r.coeffs[i] = ring.sub(&r.coeffs[i], &prod);
        }
        q[j] = c;
    }
    Ok((SkewPoly { coeffs: q }, r))
}

/// `(sigma, delta)`-substitution via the remainder of division by `t - a`.
pub fn evaluate<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>, a: &R::Elem) -> R::Elem {
    let lin = SkewPoly::linear(ring, a);
    let (_, r) = left_divmod(ring, f, &lin).expect("t - a is monic");
    coeff_or_zero(ring, &r, 0)
}

/// `f(a) = sum f_i N_i` with `N_0 = 1`, `N_(i+1) = sigma(N_i) a + delta(N_i)`.
pub fn evaluate_closed_form<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>, a: &R::Elem) -> R::Elem {
    let mut n = ring.one();
    let mut acc = ring.zero();
    for (i, fi) in f.coeffs.iter().enumerate() {
        if i > 0 {
            let next = ring.mul(&ring.sigma(&n), a);
            n = if ring.has_delta() {
                ring.add(&next, &ring.delta(&n))
            } else {
                next
            };
        }
        acc = ring.add(&acc, &ring.mul(fi, &n));
    }
    acc
}

/// Coefficient-wise residue into `K[t]`.
pub fn reduce_residue<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>) -> Result<ResiduePoly> {
    let mut coeffs = Vec::with_capacity(f.len());
    for (i, c) in f.coeffs.iter().enumerate() {
        match ring.residue(c) {
            Ok(r) => coeffs.push(r),
            Err(Error::NegativeOrder { ord, .. }) => {
                return Err(Error::NegativeOrder { degree: i, ord })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ResiduePoly::new(coeffs, ring.bits()))
}

/// `phi^n(f) = y^n f y^(-n)`.
pub fn phi_pow<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>, n: i64) -> SkewPoly<R::Elem> {
    if n == 0 || f.is_empty() {
        return f.clone();
    }
    let (c0, c1) = ring.phi_pow_t(n);
    let tt = SkewPoly {
        coeffs: vec![c0, c1],
    };
    let mut acc = SkewPoly::constant(ring, ring.phi_pow_coeff(f.coeffs.last().unwrap(), n));
    for c in f.coeffs.iter().rev().skip(1) {
        acc = poly_mul(ring, &acc, &tt);
        let pc = ring.phi_pow_coeff(c, n);
        acc.coeffs[0] = ring.add(&acc.coeffs[0], &pc);
    }
    acc
}

/// `f^phi`, the polynomial with `f^phi y = y f`.
pub fn conj_by_x<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>) -> SkewPoly<R::Elem> {
    phi_pow(ring, f, 1)
}

/// `y^n f`.
pub fn x_pow_mul<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>, n: i64) -> SkewPoly<R::Elem> {
    SkewPoly {
        coeffs: f.coeffs.iter().map(|c| ring.x_mul(c, n)).collect(),
    }
}

/// `f y^n = y^n phi^(-n)(f)`.
pub fn mul_x_pow<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>, n: i64) -> SkewPoly<R::Elem> {
    x_pow_mul(ring, &phi_pow(ring, f, -n), n)
}

/// Minimum coefficient valuation in powers of `y`.
pub fn ord_poly_units<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>) -> Option<i64> {
    f.coeffs.iter().filter_map(|c| ring.valuation(c)).min()
}

/// Minimum coefficient precision in powers of `y`.
pub fn precision_units<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>) -> Option<i64> {
    f.coeffs.iter().filter_map(|c| ring.precision(c)).min()
}

pub fn truncate_poly<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>, n: i64) -> SkewPoly<R::Elem> {
    SkewPoly {
        coeffs: f.coeffs.iter().map(|c| ring.truncate(c, n)).collect(),
    }
}

pub fn poly_max_abs<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>) -> f64 {
    f.coeffs.iter().map(|c| ring.max_abs(c)).fold(0.0, f64::max)
}

pub fn poly_chop<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>, eps: f64) -> SkewPoly<R::Elem> {
    SkewPoly {
        coeffs: f.coeffs.iter().map(|c| ring.chop(c, eps)).collect(),
    }
}

/// Largest coefficient modulus of `f - g` among the known terms.
pub fn poly_distance<R: BaseRing>(ring: &R, f: &SkewPoly<R::Elem>, g: &SkewPoly<R::Elem>) -> f64 {
    poly_max_abs(ring, &poly_sub(ring, f, g))
}

/// Lifts a residue polynomial by constant coefficients.
pub fn lift_residue<R: BaseRing>(ring: &R, p: &ResiduePoly) -> SkewPoly<R::Elem> {
    SkewPoly {
        coeffs: p.coeffs().iter().map(|c| ring.from_complex(c)).collect(),
    }
}

impl BaseRing for SkewContext {
    type Elem = PuiseuxSeries;

    fn bits(&self) -> usize {
        self.bits
    }

    fn zero(&self) -> PuiseuxSeries {
        PuiseuxSeries::zero(self.bits)
    }

    fn one(&self) -> PuiseuxSeries {
        PuiseuxSeries::one(self.bits)
    }

    fn from_complex(&self, c: &BigComplex) -> PuiseuxSeries {
        PuiseuxSeries::constant(c.clone())
    }

    fn add(&self, a: &PuiseuxSeries, b: &PuiseuxSeries) -> PuiseuxSeries {
        a.add(b)
    }

    fn neg(&self, a: &PuiseuxSeries) -> PuiseuxSeries {
        a.neg()
    }

    fn sub(&self, a: &PuiseuxSeries, b: &PuiseuxSeries) -> PuiseuxSeries {
        a.sub(b)
    }

    fn mul(&self, a: &PuiseuxSeries, b: &PuiseuxSeries) -> PuiseuxSeries {
        a.mul(b)
    }

    fn is_zero(&self, a: &PuiseuxSeries) -> bool {
        a.is_zero()
    }

    fn sigma(&self, a: &PuiseuxSeries) -> PuiseuxSeries {
        SkewContext::sigma(self, a)
    }

    fn delta(&self, a: &PuiseuxSeries) -> PuiseuxSeries {
        self.delta_apply(a)
    }

    fn has_delta(&self) -> bool {
        SkewContext::has_delta(self)
    }

    fn valuation(&self, a: &PuiseuxSeries) -> Option<i64> {
        a.ord().map(|q| units(&q, self.ram))
    }

    fn precision(&self, a: &PuiseuxSeries) -> Option<i64> {
        a.trunc_q().map(|q| units_floor(&q, self.ram))
    }

    fn truncate(&self, a: &PuiseuxSeries, n: i64) -> PuiseuxSeries {
        a.to_ram(num_integer::lcm(a.ram(), self.ram))
            .truncate(&Rational::new(BigInt::from(n), BigInt::from(self.ram)))
    }

    fn residue(&self, a: &PuiseuxSeries) -> Result<BigComplex> {
        a.residue()
    }

    fn left_layer(&self, a: &PuiseuxSeries, n: i64) -> BigComplex {
        layer_coeff(a, n, self.ram)
    }

    fn layer_abs(&self, a: &PuiseuxSeries, n: i64) -> f64 {
        layer_coeff(a, n, self.ram).abs_f64()
    }

    fn x_mul(&self, a: &PuiseuxSeries, n: i64) -> PuiseuxSeries {
        a.shift_exponent(&Rational::new(BigInt::from(n), BigInt::from(self.ram)))
    }

    fn phi_pow_coeff(&self, a: &PuiseuxSeries, _n: i64) -> PuiseuxSeries {
        a.clone()
    }

    fn phi_pow_t(&self, n: i64) -> (PuiseuxSeries, PuiseuxSeries) {
        let an = self
            .alpha
            .pow(&Rational::new(BigInt::from(-n), BigInt::from(self.ram)));
        let c0 = self.a.scale(&an.sub(&BigComplex::one(self.bits)));
        (c0, PuiseuxSeries::constant(an))
    }

    fn residue_twist(&self) -> ResidueTwist {
        ResidueTwist::Affine(TMap::new(self.alpha_eff(), self.a0()))
    }

    fn max_abs(&self, a: &PuiseuxSeries) -> f64 {
        a.max_abs()
    }

    fn chop(&self, a: &PuiseuxSeries, eps: f64) -> PuiseuxSeries {
        a.chop(eps)
    }

    fn layers(&self, a: &PuiseuxSeries) -> Vec<i64> {
        let k = (self.ram / gcd_u32(self.ram, a.ram())) as i64;
        let m = (a.ram() / gcd_u32(self.ram, a.ram())) as i64;
        a.terms()
            .iter()
            .filter(|(e, _)| e % m == 0)
            .map(|(e, _)| e / m * k)
            .collect()
    }
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    num_integer::gcd(a, b)
}

/// `q * L`, which must be an integer.
fn units(q: &Rational, ram: u32) -> i64 {
    let v = q * Rational::from_integer(BigInt::from(ram));
    num_traits::ToPrimitive::to_i64(&v.floor().to_integer()).expect("exponent fits in i64")
}

fn units_floor(q: &Rational, ram: u32) -> i64 {
    let v = q * Rational::from_integer(BigInt::from(ram));
    num_traits::ToPrimitive::to_i64(&v.ceil().to_integer()).expect("exponent fits in i64")
}

fn layer_coeff(a: &PuiseuxSeries, n: i64, ram: u32) -> BigComplex {
    // exponent n/ram expressed at the series' own ramification
    let num = n * a.ram() as i64;
    if num % ram as i64 != 0 {
        return BigComplex::zero(a.bits());
    }
    a.coeff_or_zero(num / ram as i64)
}

/// Order of a Puiseux polynomial as an exponent of `x`.
pub fn ord_poly(f: &SkewPoly<PuiseuxSeries>) -> Option<Rational> {
    f.coeffs.iter().filter_map(|c| c.ord()).min()
}

/// Smallest truncation among the coefficients, as an exponent of `x`.
pub fn poly_trunc(f: &SkewPoly<PuiseuxSeries>) -> Option<Rational> {
    f.coeffs.iter().filter_map(|c| c.trunc_q()).min()
}

/// Least common ramification of the coefficients.
pub fn poly_ram(f: &SkewPoly<PuiseuxSeries>) -> u32 {
    f.coeffs
        .iter()
        .fold(1, |acc, c| num_integer::lcm(acc, c.ram()))
}

/// Truncates every coefficient at the exponent `q` of `x`.
pub fn truncate_at(f: &SkewPoly<PuiseuxSeries>, q: &Rational) -> SkewPoly<PuiseuxSeries> {
    SkewPoly {
        coeffs: f.coeffs.iter().map(|c| c.truncate(q)).collect(),
    }
}

/// Whether `q` lies on the grid `(1/L) Z`.
pub fn on_grid(q: &Rational, ram: u32) -> bool {
    (q * Rational::from_integer(BigInt::from(ram))).is_integer()
}

pub fn is_zero_rational(q: &Rational) -> bool {
    q.is_zero()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int, Alpha, DEFAULT_BITS as P};
    use proptest::prelude::*;

    /// `C[t, rho]`: complex coefficients, `sigma` = conjugation, no `delta`.
    #[derive(Clone)]
    struct ConjugateField;

    impl BaseRing for ConjugateField {
        type Elem = BigComplex;
        fn bits(&self) -> usize {
            P
        }
        fn zero(&self) -> BigComplex {
            BigComplex::zero(P)
        }
        fn one(&self) -> BigComplex {
            BigComplex::one(P)
        }
        fn from_complex(&self, c: &BigComplex) -> BigComplex {
            c.clone()
        }
        fn add(&self, a: &BigComplex, b: &BigComplex) -> BigComplex {
            a.add(b)
        }
        fn neg(&self, a: &BigComplex) -> BigComplex {
            a.neg()
        }
        fn mul(&self, a: &BigComplex, b: &BigComplex) -> BigComplex {
            a.mul(b)
        }
        fn is_zero(&self, a: &BigComplex) -> bool {
            a.is_zero()
        }
        fn sigma(&self, a: &BigComplex) -> BigComplex {
            a.conj()
        }
        fn delta(&self, _a: &BigComplex) -> BigComplex {
            BigComplex::zero(P)
        }
        fn has_delta(&self) -> bool {
            false
        }
        fn valuation(&self, a: &BigComplex) -> Option<i64> {
            (!a.is_zero()).then_some(0)
        }
        fn precision(&self, _a: &BigComplex) -> Option<i64> {
            None
        }
        fn truncate(&self, a: &BigComplex, _n: i64) -> BigComplex {
            a.clone()
        }
        fn residue(&self, a: &BigComplex) -> Result<BigComplex> {
            Ok(a.clone())
        }
        fn left_layer(&self, a: &BigComplex, n: i64) -> BigComplex {
            if n == 0 {
                a.clone()
            } else {
                BigComplex::zero(P)
            }
        }
        fn layer_abs(&self, a: &BigComplex, n: i64) -> f64 {
            self.left_layer(a, n).abs_f64()
        }
        fn x_mul(&self, a: &BigComplex, _n: i64) -> BigComplex {
            a.clone()
        }
        fn phi_pow_coeff(&self, a: &BigComplex, _n: i64) -> BigComplex {
            a.clone()
        }
        fn phi_pow_t(&self, _n: i64) -> (BigComplex, BigComplex) {
            (BigComplex::zero(P), BigComplex::one(P))
        }
        fn residue_twist(&self) -> ResidueTwist {
            ResidueTwist::Conjugation
        }
        fn max_abs(&self, a: &BigComplex) -> f64 {
            a.abs_f64()
        }
        fn chop(&self, a: &BigComplex, eps: f64) -> BigComplex {
            if a.abs_f64() <= eps {
                BigComplex::zero(P)
            } else {
                a.clone()
            }
        }
        fn layers(&self, a: &BigComplex) -> Vec<i64> {
            if a.is_zero() {
                vec![]
            } else {
                vec![0]
            }
        }
    }

    pub(crate) fn cx(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, P)
    }

    pub(crate) fn xpow(c: f64, k: i64, ram: u32) -> PuiseuxSeries {
        PuiseuxSeries::monomial(cx(c, 0.0), k, ram)
    }

    pub(crate) fn konst(c: f64) -> PuiseuxSeries {
        PuiseuxSeries::constant(cx(c, 0.0))
    }

    fn ctx(alpha: (i64, i64), a: PuiseuxSeries) -> SkewContext {
        SkewContext::new(Alpha::rational(rat(alpha.0, alpha.1), P).unwrap(), 1, a)
    }

    pub(crate) fn near_square() -> SkewPoly<PuiseuxSeries> {
        SkewPoly::new(vec![
            konst(1.0).add(&xpow(2.0, 1, 1)),
            konst(-2.0).sub(&xpow(1.0, 1, 1)),
            konst(1.0),
        ])
    }

    fn pclose(
        ring: &SkewContext,
        f: &SkewPoly<PuiseuxSeries>,
        g: &SkewPoly<PuiseuxSeries>,
        tol: f64,
    ) -> bool {
        let s = poly_max_abs(ring, f).max(poly_max_abs(ring, g)).max(1.0);
        poly_distance(ring, f, g) <= tol * s
    }

    #[test]
    fn t_times_x() {
        let r = ctx((2, 1), PuiseuxSeries::zero(P));
        let p = poly_mul(
            &r,
            &SkewPoly::t(&r),
            &SkewPoly::constant(&r, xpow(1.0, 1, 1)),
        );
        let want = SkewPoly::new(vec![PuiseuxSeries::zero(P), xpow(2.0, 1, 1)]);
        assert!(pclose(&r, &p, &want, 1e-35));

        let a = PuiseuxSeries::constant(cx(0.5, 1.5));
        let r = ctx((3, 2), a.clone());
        let p = poly_mul(
            &r,
            &SkewPoly::t(&r),
            &SkewPoly::constant(&r, xpow(1.0, 1, 1)),
        );
        let want = SkewPoly::new(vec![a.mul(&xpow(0.5, 1, 1)), xpow(1.5, 1, 1)]);
        assert!(pclose(&r, &p, &want, 1e-35));
    }

    #[test]
    fn central_constants() {
        let r = ctx((2, 1), PuiseuxSeries::zero(P));
        let f = SkewPoly::linear(&r, &konst(-1.0));
        let g = SkewPoly::linear(&r, &konst(1.0));
        let p = poly_mul(&r, &f, &g);
        let want = SkewPoly::new(vec![konst(-1.0), konst(0.0), konst(1.0)]);
        assert!(pclose(&r, &p, &want, 0.0));
    }

    #[test]
    fn division_examples() {
        let r = ctx((2, 1), PuiseuxSeries::one(P));
        let t2 = SkewPoly::monomial(&r, konst(1.0), 2);
        let p = SkewPoly::linear(&r, &konst(1.0));
        let (q, rem) = left_divmod(&r, &t2, &p).unwrap();
        assert!(pclose(
            &r,
            &q,
            &SkewPoly::new(vec![konst(1.0), konst(1.0)]),
            1e-35
        ));
        assert!(pclose(&r, &rem, &SkewPoly::new(vec![konst(1.0)]), 1e-35));
        let (q, rem) = left_divmod(&r, &p, &p).unwrap();
        assert!(pclose(&r, &q, &SkewPoly::one(&r), 0.0));
        assert!(rem.is_zero_poly(&r));
        let c = SkewPoly::constant(&r, xpow(3.0, 2, 1));
        let (q, rem) = left_divmod(&r, &c, &p).unwrap();
        assert!(q.is_zero_poly(&r));
        assert!(pclose(&r, &rem, &c, 0.0));
        let bad = SkewPoly::new(vec![konst(1.0), konst(2.0)]);
        assert!(matches!(left_divmod(&r, &t2, &bad), Err(Error::NotMonic)));
    }

    #[test]
    fn evaluation_examples() {
        let r = ctx((2, 1), PuiseuxSeries::zero(P));
        let t2 = SkewPoly::monomial(&r, konst(1.0), 2);
        let v = evaluate(&r, &t2, &xpow(1.0, 1, 1));
        assert!(v.sub(&xpow(2.0, 2, 1)).max_abs() < 1e-35);
        for alpha in [(2, 1), (1, 3), (7, 5)] {
            let r = ctx(alpha, PuiseuxSeries::zero(P));
            let f = SkewPoly::new(vec![konst(1.0), konst(-2.0), konst(1.0)]);
            assert!(evaluate(&r, &f, &konst(1.0)).is_zero());
        }
        let cf = ConjugateField;
        let f = SkewPoly::new(vec![cx(-1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]);
        for theta in [0.3f64, 1.0, 2.5, -0.7] {
            let a = cx(theta.cos(), theta.sin());
            assert!(evaluate(&cf, &f, &a).abs_f64() < 1e-15);
        }
    }

    #[test]
    fn residue_examples() {
        let r = ctx((2, 1), PuiseuxSeries::zero(P));
        let rp = reduce_residue(&r, &near_square()).unwrap();
        let want = ResiduePoly::new(vec![cx(1.0, 0.0), cx(-2.0, 0.0), cx(1.0, 0.0)], P);
        assert!(rp.distance(&want) == 0.0);
        let neg = SkewPoly::new(vec![xpow(1.0, -1, 1), konst(1.0)]);
        assert!(matches!(
            reduce_residue(&r, &neg),
            Err(Error::NegativeOrder { degree: 0, .. })
        ));
    }

    #[test]
    fn conj_by_x_examples() {
        let r = ctx((2, 1), PuiseuxSeries::zero(P));
        let t = SkewPoly::t(&r);
        let ft = conj_by_x(&r, &t);
        assert!(pclose(
            &r,
            &ft,
            &SkewPoly::new(vec![konst(0.0), konst(0.5)]),
            1e-35
        ));
        let x = SkewPoly::constant(&r, xpow(1.0, 1, 1));
        assert!(pclose(&r, &conj_by_x(&r, &x), &x, 0.0));
    }

    #[test]
    fn ord_poly_examples() {
        let f = SkewPoly::new(vec![xpow(1.0, 2, 1), xpow(1.0, 1, 1)]);
        assert_eq!(ord_poly(&f), Some(rat_int(1)));
        assert_eq!(ord_poly(&SkewPoly::<PuiseuxSeries>::zero()), None);
    }

    fn arb_series() -> impl Strategy<Value = PuiseuxSeries> {
        (
            1u32..=2,
            prop::collection::vec((-2i64..5, -3i8..4, -3i8..4), 0..4),
        )
            .prop_map(|(ram, ts)| {
                PuiseuxSeries::from_terms(
                    ram,
                    ts.into_iter()
                        .map(|(k, a, b)| (k, cx(a as f64 / 2.0, b as f64 / 2.0))),
                    None,
                    P,
                )
            })
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = SkewPoly<PuiseuxSeries>> {
        prop::collection::vec(arb_series(), 1..=max_deg + 1).prop_map(SkewPoly::new)
    }

    fn arb_ring() -> impl Strategy<Value = SkewContext> {
        (
            prop::sample::select(vec![(2i64, 1i64), (3, 2), (1, 2)]),
            -2i8..3,
            -2i8..3,
        )
            .prop_map(|(al, a0, a1)| {
                let a = PuiseuxSeries::from_terms(
                    1,
                    vec![(0, cx(a0 as f64, 0.0)), (1, cx(a1 as f64, 1.0))],
                    None,
                    P,
                );
                SkewContext::new(Alpha::rational(rat(al.0, al.1), P).unwrap(), 2, a)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn associativity(r in arb_ring(), f in arb_poly(2), g in arb_poly(2), h in arb_poly(2)) {
            let lhs = poly_mul(&r, &poly_mul(&r, &f, &g), &h);
            let rhs = poly_mul(&r, &f, &poly_mul(&r, &g, &h));
            prop_assert!(pclose(&r, &lhs, &rhs, 2f64.powi(-(P as i32) + 16)));
            let d1 = poly_mul(&r, &f, &poly_add(&r, &g, &h));
            let d2 = poly_add(&r, &poly_mul(&r, &f, &g), &poly_mul(&r, &f, &h));
            prop_assert!(pclose(&r, &d1, &d2, 2f64.powi(-(P as i32) + 16)));
        }

        #[test]
        fn division_identity(r in arb_ring(), f in arb_poly(4), p in arb_poly(2)) {
            let mut p = p;
            p.coeffs.push(r.one());
            let (q, rem) = left_divmod(&r, &f, &p).unwrap();
            prop_assert!(rem.len() < p.len());
            let back = poly_add(&r, &poly_mul(&r, &q, &p), &rem);
            prop_assert!(pclose(&r, &back, &f, 2f64.powi(-(P as i32) + 16)));
        }

        #[test]
        fn evaluate_two_paths(r in arb_ring(), f in arb_poly(3), a in arb_series()) {
            let e1 = evaluate(&r, &f, &a);
            let e2 = evaluate_closed_form(&r, &f, &a);
            let s = e1.scale_hint().max(e2.scale_hint());
            prop_assert!(e1.sub(&e2).max_abs() <= 2f64.powi(-(P as i32) + 16) * s);
        }

        #[test]
        fn conjugation_by_x(r in arb_ring(), f in arb_poly(3), n in 1i64..=4) {
            let y = SkewPoly::constant(&r, PuiseuxSeries::monomial(cx(1.0, 0.0), n, r.ram));
            let lhs = poly_mul(&r, &y, &f);
            let rhs = poly_mul(&r, &phi_pow(&r, &f, n), &y);
            prop_assert!(pclose(&r, &lhs, &rhs, 2f64.powi(-(P as i32) + 16)));
        }

        #[test]
        fn residue_is_homomorphism(f in arb_poly(2), g in arb_poly(2), alpha in prop::sample::select(vec![(2i64, 1i64), (3, 2)])) {
            let r = ctx(alpha, konst(1.5));
            let nonneg = |p: &SkewPoly<PuiseuxSeries>| SkewPoly::new(p.coeffs.iter().map(|c| c.truncate(&rat_int(8)).shift_exponent(&rat_int(2))).collect());
            let (f, g) = (nonneg(&f), nonneg(&g));
            let lhs = reduce_residue(&r, &poly_mul(&r, &f, &g)).unwrap();
            let rhs = reduce_residue(&r, &f).unwrap().mul(&reduce_residue(&r, &g).unwrap());
            prop_assert!(lhs.distance(&rhs) <= 1e-30);
            let tc = poly_mul(&r, &SkewPoly::t(&r), &SkewPoly::constant(&r, f.coeffs[0].clone()));
            let want = ResiduePoly::new(vec![BigComplex::zero(P), f.coeffs[0].residue().unwrap()], P);
            prop_assert!(reduce_residue(&r, &tc).unwrap().distance(&want) <= 1e-30);
        }
    }
}
