//! Truncated Puiseux series in `y = x^(1/L)` and the skew context
//! `(alpha, L, a)` that defines `sigma` and `delta_a`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{lcm_u32, Alpha, BigComplex, Rational};

/// `sum c_k x^(k/L)` known modulo `x^(trunc/L)`; `trunc = None` means exact.
#[derive(Clone)]
pub struct PuiseuxSeries {
    ram: u32,
    terms: Vec<(i64, BigComplex)>,
    trunc: Option<i64>,
    bits: usize,
}

impl fmt::Debug for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parse::format_series(self, true))
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parse::format_series(self, true))
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl PuiseuxSeries {
    pub fn zero(bits: usize) -> Self {
        PuiseuxSeries {
            ram: 1,
            terms: Vec::new(),
            trunc: None,
            bits,
        }
    }

    /// The zero series known only modulo `x^(t/ram)`.
    pub fn zero_trunc(ram: u32, t: i64, bits: usize) -> Self {
        PuiseuxSeries {
            ram,
            terms: Vec::new(),
            trunc: Some(t),
            bits,
        }
    }

    pub fn one(bits: usize) -> Self {
        Self::constant(BigComplex::one(bits))
    }

    pub fn constant(c: BigComplex) -> Self {
        Self::monomial(c, 0, 1)
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        Self::constant(BigComplex::from_i64(v, bits))
    }

    /// `c x^(k/ram)`.
    pub fn monomial(c: BigComplex, k: i64, ram: u32) -> Self {
        let bits = c.bits();
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            vec![(k, c)]
        };
        PuiseuxSeries {
            ram,
            terms,
            trunc: None,
            bits,
        }
        .normalized_ram()
    }

    /// `c x^q` for rational `q`.
    pub fn monomial_q(c: BigComplex, q: &Rational) -> Self {
        let ram = q.denom().to_u32().expect("ramification fits in u32");
        let k = q.numer().to_i64().expect("exponent fits in i64");
        Self::monomial(c, k, ram)
    }

    /// Builds a series from unsorted terms; zero coefficients and terms at or
    /// beyond the truncation are dropped, equal exponents are summed.
    pub fn from_terms(
        ram: u32,
        terms: impl IntoIterator<Item = (i64, BigComplex)>,
        trunc: Option<i64>,
        bits: usize,
    ) -> Self {
        let mut map: BTreeMap<i64, BigComplex> = BTreeMap::new();
        for (k, c) in terms {
            if trunc.is_some_and(|t| k >= t) {
                continue;
            }
            match map.get_mut(&k) {
                Some(v) => *v = v.add(&c),
                None => {
                    map.insert(k, c);
                }
            }
        }
        let terms = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        PuiseuxSeries {
            ram: ram.max(1),
            terms,
            trunc,
            bits,
        }
    }

    pub fn ram(&self) -> u32 {
        self.ram
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn terms(&self) -> &[(i64, BigComplex)] {
        &self.terms
    }

    pub fn trunc(&self) -> Option<i64> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// Truncation as an exponent of `x`.
    pub fn trunc_q(&self) -> Option<Rational> {
        self.trunc
            .map(|t| Rational::new(BigInt::from(t), BigInt::from(self.ram)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Order in units of `1/L`; `None` for the zero series.
    pub fn ord_units(&self) -> Option<i64> {
        self.terms.first().map(|(k, _)| *k)
    }

    /// Order as an exact rational; `None` stands for `+infinity`.
    pub fn ord(&self) -> Option<Rational> {
        self.ord_units()
            .map(|k| Rational::new(BigInt::from(k), BigInt::from(self.ram)))
    }

    /// Lower bound on the true order: the first stored exponent, or the
    /// truncation for a series with no known terms.
    fn ord_bound(&self) -> Option<i64> {
        self.ord_units().or(self.trunc)
    }

    pub fn coeff(&self, k: i64) -> Option<&BigComplex> {
        self.terms
            .binary_search_by_key(&k, |(e, _)| *e)
            .ok()
            .map(|i| &self.terms[i].1)
    }

    pub fn coeff_or_zero(&self, k: i64) -> BigComplex {
        self.coeff(k)
            .cloned()
            .unwrap_or_else(|| BigComplex::zero(self.bits))
    }

    pub fn leading(&self) -> Option<&(i64, BigComplex)> {
        self.terms.first()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms
            .iter()
            .map(|(_, c)| c.abs_f64())
            .fold(0.0, f64::max)
    }

    /// Constant term; errors if the series has negative order.
    pub fn residue(&self) -> Result<BigComplex> {
        if let Some(q) = self.ord() {
            if q < Rational::zero() {
                return Err(Error::NegativeOrder { degree: 0, ord: q });
            }
        }
        Ok(self.coeff_or_zero(0))
    }

    /// Same series stored at ramification `k * L`.
    pub fn reembed(&self, k: u32) -> Self {
        if k == 1 {
            return self.clone();
        }
        let kk = k as i64;
        PuiseuxSeries {
            ram: self.ram * k,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e * kk, c.clone()))
                .collect(),
            trunc: self.trunc.map(|t| t * kk),
            bits: self.bits,
        }
    }

    pub fn to_ram(&self, ram: u32) -> Self {
        assert!(
            ram % self.ram == 0,
            "ramification {ram} is not a multiple of {}",
            self.ram
        );
        self.reembed(ram / self.ram)
    }

    /// Smallest ramification that represents the same series.
    pub fn normalized_ram(mut self) -> Self {
        let mut g = self.ram as i64;
        for (k, _) in &self.terms {
            g = g.gcd(k);
        }
        if let Some(t) = self.trunc {
            g = g.gcd(&t);
        }
        if g > 1 {
            self.ram /= g as u32;
            for (k, _) in self.terms.iter_mut() {
                *k /= g;
            }
            self.trunc = self.trunc.map(|t| t / g);
        }
        self
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        let r = lcm_u32(a.ram, b.ram);
        (a.to_ram(r), b.to_ram(r))
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.ram != o.ram {
            let (a, b) = Self::aligned(self, o);
            return a.add(&b);
        }
        let trunc = min_opt(self.trunc, o.trunc);
        let bits = self.bits.max(o.bits);
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < o.terms.len() {
            let ka = self.terms.get(i).map(|t| t.0).unwrap_or(i64::MAX);
            let kb = o.terms.get(j).map(|t| t.0).unwrap_or(i64::MAX);
            let (k, c) = if ka < kb {
                i += 1;
                (ka, self.terms[i - 1].1.clone())
            } else if kb < ka {
                j += 1;
                (kb, o.terms[j - 1].1.clone())
            } else {
                i += 1;
                j += 1;
                (ka, self.terms[i - 1].1.add(&o.terms[j - 1].1))
            };
            if trunc.is_some_and(|t| k >= t) {
                break;
            }
            if !c.is_zero() {
                out.push((k, c));
            }
        }
        PuiseuxSeries {
            ram: self.ram,
            terms: out,
            trunc,
            bits,
        }
    }

    pub fn neg(&self) -> Self {
        PuiseuxSeries {
            ram: self.ram,
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
            trunc: self.trunc,
            bits: self.bits,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &BigComplex) -> Self {
        if c.is_zero() {
            return PuiseuxSeries {
                ram: self.ram,
                terms: Vec::new(),
                trunc: self.trunc,
                bits: self.bits,
            };
        }
        PuiseuxSeries {
            ram: self.ram,
            terms: self.terms.iter().map(|(k, v)| (*k, v.mul(c))).collect(),
            trunc: self.trunc,
            bits: self.bits,
        }
    }

    /// Multiplication by `x^(k/L)` at this series' ramification.
    pub fn shift_units(&self, k: i64) -> Self {
        PuiseuxSeries {
            ram: self.ram,
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            trunc: self.trunc.map(|t| t + k),
            bits: self.bits,
        }
    }

    /// Multiplication by `x^q`.
    pub fn shift_exponent(&self, q: &Rational) -> Self {
        let qd = q.denom().to_u32().expect("ramification fits in u32");
        let r = lcm_u32(self.ram, qd);
        let s = self.to_ram(r);
        let k = (q * Rational::from_integer(BigInt::from(r)))
            .to_integer()
            .to_i64()
            .expect("exponent fits in i64");
        s.shift_units(k)
    }

    /// Product with tracked truncation `min(T_f + ord g, T_g + ord f)`.
    pub fn mul(&self, o: &Self) -> Self {
        if self.ram != o.ram {
            let (a, b) = Self::aligned(self, o);
            return a.mul(&b);
        }
        let bits = self.bits.max(o.bits);
        let ta = match (self.trunc, o.ord_bound()) {
            (Some(t), Some(k)) => Some(t + k),
            (Some(_), None) => None,
            (None, _) => None,
        };
        let tb = match (o.trunc, self.ord_bound()) {
            (Some(t), Some(k)) => Some(t + k),
            (Some(_), None) => None,
            (None, _) => None,
        };
        let trunc = min_opt(ta, tb);
        let trunc = match (self.ord_bound(), o.ord_bound()) {
            (None, _) | (_, None) => None,
            _ => trunc,
        };
        if self.terms.is_empty() || o.terms.is_empty() {
            return PuiseuxSeries {
                ram: self.ram,
                terms: Vec::new(),
                trunc,
                bits,
            };
        }
        let (a, b) = if self.terms.len() <= o.terms.len() {
            (self, o)
        } else {
            (o, self)
        };
        let lo = a.terms[0].0 + b.terms[0].0;
        let mut hi = a.terms.last().unwrap().0 + b.terms.last().unwrap().0 + 1;
        if let Some(t) = trunc {
            hi = hi.min(t);
        }
        if hi <= lo {
            return PuiseuxSeries {
                ram: self.ram,
                terms: Vec::new(),
                trunc,
                bits,
            };
        }
        let span = (hi - lo) as usize;
        let terms = if a.terms.len() == 1 {
            let (ka, ca) = &a.terms[0];
            b.terms
                .iter()
                .filter(|(kb, _)| ka + kb < hi)
                .map(|(kb, cb)| (ka + kb, ca.mul(cb)))
                .collect()
        } else if span <= 4 * a.terms.len() * b.terms.len() + 64 {
            let mut acc: Vec<Option<BigComplex>> = vec![None; span];
            for (ka, ca) in &a.terms {
                for (kb, cb) in &b.terms {
                    let k = ka + kb;
                    if k >= hi {
                        break;
                    }
                    let p = ca.mul(cb);
                    let slot = &mut acc[(k - lo) as usize];
                    *slot = Some(match slot.take() {
                        Some(v) => v.add(&p),
                        None => p,
                    });
                }
            }
            acc.into_iter()
                .enumerate()
                .filter_map(|(i, c)| c.filter(|c| !c.is_zero()).map(|c| (lo + i as i64, c)))
                .collect()
        } else {
            let mut acc: BTreeMap<i64, BigComplex> = BTreeMap::new();
            for (ka, ca) in &a.terms {
                for (kb, cb) in &b.terms {
                    let k = ka + kb;
                    if k >= hi {
                        break;
                    }
                    let p = ca.mul(cb);
                    match acc.get_mut(&k) {
                        Some(v) => *v = v.add(&p),
                        None => {
                            acc.insert(k, p);
                        }
                    }
                }
            }
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        };
        PuiseuxSeries {
            ram: self.ram,
            terms,
            trunc,
            bits,
        }
    }

    /// Inverse known modulo `x^target` (or the precision the input supports,
    /// whichever is smaller).
    pub fn inv(&self, target: &Rational) -> Result<Self> {
        let (k0, c0) = match self.terms.first() {
            Some((k, c)) => (*k, c.clone()),
            None => return Err(Error::NotInvertible("zero series".into())),
        };
        let ram = lcm_u32(
            self.ram,
            target.denom().to_u32().expect("ramification fits in u32"),
        );
        let f = self.to_ram(ram);
        let k0 = k0 * (ram / self.ram) as i64;
        let target_units = (target * Rational::from_integer(BigInt::from(ram)))
            .ceil()
            .to_integer()
            .to_i64()
            .expect("target fits in i64");
        let mut t_out = target_units;
        if let Some(tf) = f.trunc {
            t_out = t_out.min(tf - 2 * k0);
        }
        let exact_monomial = f.terms.len() == 1 && f.trunc.is_none();
        let c0inv = c0.inv()?;
        if exact_monomial {
            return Ok(PuiseuxSeries {
                ram,
                terms: vec![(-k0, c0inv)],
                trunc: None,
                bits: self.bits,
            });
        }
        let n = (t_out + k0).max(0) as usize;
        // u_j: coefficients of f / (c0 x^k0) - 1, indexed by j >= 1
        let u: Vec<(usize, BigComplex)> = f.terms[1..]
            .iter()
            .filter_map(|(k, c)| {
                let j = (k - k0) as usize;
                (j < n).then(|| (j, c.mul(&c0inv)))
            })
            .collect();
        let mut g: Vec<BigComplex> = Vec::with_capacity(n);
        for m in 0..n {
            if m == 0 {
                g.push(BigComplex::one(self.bits));
                continue;
            }
            let mut s = BigComplex::zero(self.bits);
            for (j, uj) in &u {
                if *j > m {
                    break;
                }
                let gm = &g[m - j];
                if !gm.is_zero() {
                    s = s.sub(&uj.mul(gm));
                }
            }
            g.push(s);
        }
        let terms = g
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m as i64 - k0, c.mul(&c0inv)));
        Ok(PuiseuxSeries::from_terms(
            ram,
            terms,
            Some(t_out),
            self.bits,
        ))
    }

    /// Drops everything at or beyond `x^(t/L)` and records the truncation.
    pub fn truncate_units(&self, t: i64) -> Self {
        let t = min_opt(self.trunc, Some(t)).unwrap();
        PuiseuxSeries {
            ram: self.ram,
            terms: self.terms.iter().filter(|(k, _)| *k < t).cloned().collect(),
            trunc: Some(t),
            bits: self.bits,
        }
    }

    /// Truncation at an exponent of `x`, rounded up to the series' grid.
    pub fn truncate(&self, q: &Rational) -> Self {
        let t = (q * Rational::from_integer(BigInt::from(self.ram)))
            .ceil()
            .to_integer()
            .to_i64()
            .expect("truncation fits in i64");
        self.truncate_units(t)
    }

    /// Removes terms whose modulus is at most `eps`.
    pub fn chop(&self, eps: f64) -> Self {
        PuiseuxSeries {
            ram: self.ram,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs_f64() > eps)
                .cloned()
                .collect(),
            trunc: self.trunc,
            bits: self.bits,
        }
    }

    pub fn with_trunc(mut self, trunc: Option<i64>) -> Self {
        if let Some(t) = trunc {
            self.terms.retain(|(k, _)| *k < t);
        }
        self.trunc = trunc;
        self
    }

    pub fn with_bits(&self, bits: usize) -> Self {
        PuiseuxSeries {
            ram: self.ram,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c.with_bits(bits)))
                .collect(),
            trunc: self.trunc,
            bits,
        }
    }

    /// `sigma^q`: `c x^(k/L) -> c alpha^(q k / L) x^(k/L)`.
    pub fn sigma_apply(&self, q: &Rational, alpha: &Alpha) -> Self {
        if q.is_zero() || alpha.is_one() {
            return self.clone();
        }
        let l = Rational::from_integer(BigInt::from(self.ram));
        PuiseuxSeries {
            ram: self.ram,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| {
                    if *k == 0 {
                        (*k, c.clone())
                    } else {
                        let e = q * Rational::from_integer(BigInt::from(*k)) / &l;
                        (*k, c.mul(&alpha.pow(&e)))
                    }
                })
                .collect(),
            trunc: self.trunc,
            bits: self.bits,
        }
    }

    /// Magnitude scale used for noise thresholds.
    pub fn scale_hint(&self) -> f64 {
        self.max_abs().max(1.0)
    }

    /// Largest coefficient modulus among terms strictly below `x^q`.
    pub fn max_abs_below(&self, q: &Rational) -> f64 {
        let l = Rational::from_integer(BigInt::from(self.ram));
        self.terms
            .iter()
            .filter(|(k, _)| Rational::from_integer(BigInt::from(*k)) < q * &l)
            .map(|(_, c)| c.abs_f64())
            .fold(0.0, f64::max)
    }

    /// Order ignoring terms of modulus at most `eps`, capped by the truncation.
    pub fn significant_ord(&self, eps: f64) -> Option<Rational> {
        let k = self
            .terms
            .iter()
            .find(|(_, c)| c.abs_f64() > eps)
            .map(|(k, _)| *k);
        match (k, self.trunc) {
            (Some(k), Some(t)) => Some(Rational::new(
                BigInt::from(k.min(t)),
                BigInt::from(self.ram),
            )),
            (Some(k), None) => Some(Rational::new(BigInt::from(k), BigInt::from(self.ram))),
            (None, Some(t)) => Some(Rational::new(BigInt::from(t), BigInt::from(self.ram))),
            (None, None) => None,
        }
    }
}

/// Modulus of the largest coefficient of `f - g` below the shared truncation.
pub fn series_distance(f: &PuiseuxSeries, g: &PuiseuxSeries) -> f64 {
    f.sub(g).max_abs()
}

/// The ring `F[t, sigma, delta_a]`: multiplier, working ramification and the
/// `delta` parameter.
#[derive(Clone, Debug)]
pub struct SkewContext {
    pub alpha: Alpha,
    pub ram: u32,
    pub a: PuiseuxSeries,
    pub bits: usize,
}

impl SkewContext {
    pub fn new(alpha: Alpha, ram: u32, a: PuiseuxSeries) -> Self {
        let bits = alpha.bits();
        let ram = lcm_u32(ram, a.ram());
        let a = a.to_ram(ram);
        SkewContext {
            alpha,
            ram,
            a,
            bits,
        }
    }

    /// The commutative-coefficient ring with `delta = 0` at ramification 1.
    pub fn plain(alpha: Alpha) -> Self {
        let bits = alpha.bits();
        SkewContext {
            alpha,
            ram: 1,
            a: PuiseuxSeries::zero(bits),
            bits,
        }
    }

    pub fn with_ram(&self, ram: u32) -> Self {
        SkewContext::new(self.alpha.clone(), ram, self.a.clone())
    }

    pub fn with_bits(&self, bits: usize) -> Self {
        SkewContext::new(self.alpha.with_bits(bits), self.ram, self.a.with_bits(bits))
    }

    pub fn with_a(&self, a: PuiseuxSeries) -> Self {
        SkewContext::new(self.alpha.clone(), self.ram, a)
    }

    /// `alpha^(1/L)`, the multiplier on the uniformizer.
    pub fn alpha_eff(&self) -> BigComplex {
        self.alpha
            .pow(&Rational::new(BigInt::from(1), BigInt::from(self.ram)))
    }

    pub fn has_delta(&self) -> bool {
        !self.a.is_zero() && !self.alpha.is_one()
    }

    pub fn sigma(&self, f: &PuiseuxSeries) -> PuiseuxSeries {
        f.sigma_apply(&Rational::from_integer(BigInt::from(1)), &self.alpha)
    }

    pub fn sigma_inv(&self, f: &PuiseuxSeries) -> PuiseuxSeries {
        f.sigma_apply(&Rational::from_integer(BigInt::from(-1)), &self.alpha)
    }

    /// `delta_a(f) = a (sigma(f) - f)`.
    pub fn delta_apply(&self, f: &PuiseuxSeries) -> PuiseuxSeries {
        if !self.has_delta() {
            return PuiseuxSeries {
                ram: f.ram,
                terms: Vec::new(),
                trunc: None,
                bits: f.bits,
            };
        }
        self.a.mul(&self.sigma(f).sub(f))
    }

    /// Constant term of the `delta` parameter.
    pub fn a0(&self) -> BigComplex {
        self.a.coeff_or_zero(0)
    }

    pub fn same_ring(&self, o: &SkewContext) -> bool {
        self.ram == o.ram && series_distance(&self.a, &o.a) == 0.0
    }
}

/// Free-function form of [`PuiseuxSeries::sigma_apply`].
pub fn sigma_apply(f: &PuiseuxSeries, q: &Rational, alpha: &Alpha) -> PuiseuxSeries {
    f.sigma_apply(q, alpha)
}

/// Free-function form of [`SkewContext::delta_apply`].
pub fn delta_apply(ctx: &SkewContext, f: &PuiseuxSeries) -> PuiseuxSeries {
    ctx.delta_apply(f)
}
