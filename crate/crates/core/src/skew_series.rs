//! The skew power series ring `C[[x, rho]]` with `x c = conj(c) x`, used as
//! a coefficient ring for ordinary polynomials in a central `t`.

use crate::error::Result;
use crate::puiseux::PuiseuxSeries;
use crate::residue::ResidueTwist;
use crate::scalar::BigComplex;
use crate::skew_poly::BaseRing;

/// Elements are stored as `sum u_k x^k` (coefficients on the left) in a
/// ramification-1 [`PuiseuxSeries`].
#[derive(Clone, Debug)]
pub struct SkewSeriesRing {
    pub bits: usize,
}

impl SkewSeriesRing {
    pub fn new(bits: usize) -> Self {
        SkewSeriesRing { bits }
    }

    /// `sum c_k x^k` from `(k, c_k)` pairs.
    pub fn element(&self, terms: &[(i64, BigComplex)], trunc: Option<i64>) -> PuiseuxSeries {
        PuiseuxSeries::from_terms(1, terms.iter().cloned(), trunc, self.bits)
    }

    fn split_parity(a: &PuiseuxSeries) -> (PuiseuxSeries, PuiseuxSeries) {
        let even = a
            .terms()
            .iter()
            .filter(|(k, _)| k.rem_euclid(2) == 0)
            .cloned();
        let odd = a
            .terms()
            .iter()
            .filter(|(k, _)| k.rem_euclid(2) == 1)
            .cloned();
        (
            PuiseuxSeries::from_terms(1, even, a.trunc(), a.bits()),
            PuiseuxSeries::from_terms(1, odd, a.trunc(), a.bits()),
        )
    }

    /// `rho^n` applied to every coefficient.
    pub fn rho_pow(&self, a: &PuiseuxSeries, n: i64) -> PuiseuxSeries {
        if n.rem_euclid(2) == 0 {
            return a.clone();
        }
        conj_series(a)
    }
}

fn conj_series(a: &PuiseuxSeries) -> PuiseuxSeries {
    PuiseuxSeries::from_terms(
        a.ram(),
        a.terms().iter().map(|(k, c)| (*k, c.conj())),
        a.trunc(),
        a.bits(),
    )
}

impl BaseRing for SkewSeriesRing {
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

    /// `(sum u_i x^i)(sum v_j x^j) = sum u_i rho^i(v_j) x^(i+j)`.
    fn mul(&self, a: &PuiseuxSeries, b: &PuiseuxSeries) -> PuiseuxSeries {
        let (even, odd) = Self::split_parity(a);
        let e = even.mul(b);
        if odd.is_zero() {
            return e;
        }
        e.add(&odd.mul(&conj_series(b)))
    }

    fn is_zero(&self, a: &PuiseuxSeries) -> bool {
        a.is_zero()
    }

    fn sigma(&self, a: &PuiseuxSeries) -> PuiseuxSeries {
        a.clone()
    }

    fn delta(&self, a: &PuiseuxSeries) -> PuiseuxSeries {
        PuiseuxSeries::zero(a.bits())
    }

    fn has_delta(&self) -> bool {
        false
    }

    fn valuation(&self, a: &PuiseuxSeries) -> Option<i64> {
        a.ord_units()
    }

    fn precision(&self, a: &PuiseuxSeries) -> Option<i64> {
        a.trunc()
    }

    fn truncate(&self, a: &PuiseuxSeries, n: i64) -> PuiseuxSeries {
        a.truncate_units(n)
    }

    fn residue(&self, a: &PuiseuxSeries) -> Result<BigComplex> {
        a.residue()
    }

    /// Residue of `x^(-n) a`, which is `rho^(-n)(a_n)`.
    fn left_layer(&self, a: &PuiseuxSeries, n: i64) -> BigComplex {
        let c = a.coeff_or_zero(n);
        if n.rem_euclid(2) == 1 {
            c.conj()
        } else {
            c
        }
    }

    fn layer_abs(&self, a: &PuiseuxSeries, n: i64) -> f64 {
        a.coeff_or_zero(n).abs_f64()
    }

    /// `x^n a = sum rho^n(a_k) x^(k+n)`.
    fn x_mul(&self, a: &PuiseuxSeries, n: i64) -> PuiseuxSeries {
        self.rho_pow(a, n).shift_units(n)
    }

    fn phi_pow_coeff(&self, a: &PuiseuxSeries, n: i64) -> PuiseuxSeries {
        self.rho_pow(a, n)
    }

    fn phi_pow_t(&self, _n: i64) -> (PuiseuxSeries, PuiseuxSeries) {
        (self.zero(), self.one())
    }

    fn residue_twist(&self) -> ResidueTwist {
        ResidueTwist::Conjugation
    }

    fn max_abs(&self, a: &PuiseuxSeries) -> f64 {
        a.max_abs()
    }

    fn chop(&self, a: &PuiseuxSeries, eps: f64) -> PuiseuxSeries {
        a.chop(eps)
    }

    fn layers(&self, a: &PuiseuxSeries) -> Vec<i64> {
        a.terms().iter().map(|(k, _)| *k).collect()
    }
}
