//! Ring isomorphisms used by the reduction pipeline: shift `t -> t - b`,
//! scale `t -> x^(-r) t`, ramification change, the trace-preimage solver and
//! monic normalization after scaling.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::puiseux::{PuiseuxSeries, SkewContext};
use crate::scalar::{denom_u32, lcm_u32, Alpha, BigComplex, Rational};
use crate::skew_poly::{poly_mul, poly_ram, poly_scale_left, SkewPoly};

/// One invertible step of the pipeline.
#[derive(Clone)]
pub enum IsoRecord {
    /// `t -> t - b`, from the `delta_a` ring to the `delta_(a-b)` ring.
    Shift { b: PuiseuxSeries },
    /// `t -> x^(-r) t`, from the `delta_a` ring to the `delta_(a x^r)` ring.
    Scale { r: Rational },
    /// Working ramification multiplied by `n`.
    Reembed { n: u32 },
    /// Left multiplication by `(scalar x^exponent)^(-1)`.
    UnitNormalize {
        scalar: BigComplex,
        exponent: Rational,
    },
}

impl fmt::Debug for IsoRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

impl IsoRecord {
    pub fn summary(&self) -> String {
        match self {
            IsoRecord::Shift { b } => format!("shift({})", crate::parse::format_series(b, false)),
            IsoRecord::Scale { r } => format!("scale({r})"),
            IsoRecord::Reembed { n } => format!("reembed({n})"),
            IsoRecord::UnitNormalize { scalar, exponent } => {
                format!(
                    "unit_normalize({}, {exponent})",
                    scalar.to_string_digits(12)
                )
            }
        }
    }
}

/// `sum f_i (t - b)^i`, expanded in the `delta_(a-b)` ring.
pub fn shift_iso(
    ctx: &SkewContext,
    f: &SkewPoly<PuiseuxSeries>,
    b: &PuiseuxSeries,
) -> (SkewPoly<PuiseuxSeries>, SkewContext) {
    let target = SkewContext::new(ctx.alpha.clone(), lcm_u32(ctx.ram, b.ram()), ctx.a.sub(b));
    if b.is_zero() {
        return (f.clone(), target);
    }
    let s = SkewPoly::new(vec![b.neg(), PuiseuxSeries::one(ctx.bits)]);
    (horner(&target, f, &s), target)
}

/// `sum f_i (x^(-r) t)^i`, expanded in the `delta_(a x^r)` ring.
pub fn scale_iso(
    ctx: &SkewContext,
    f: &SkewPoly<PuiseuxSeries>,
    r: &Rational,
) -> (SkewPoly<PuiseuxSeries>, SkewContext) {
    let a = ctx
        .a
        .mul(&PuiseuxSeries::monomial_q(BigComplex::one(ctx.bits), r));
    let target = SkewContext::new(ctx.alpha.clone(), lcm_u32(ctx.ram, denom_u32(r)), a);
    if r.is_zero() {
        return (f.clone(), target);
    }
    let u = SkewPoly::new(vec![
        PuiseuxSeries::zero(ctx.bits),
        PuiseuxSeries::monomial_q(BigComplex::one(ctx.bits), &-r),
    ]);
    (horner(&target, f, &u), target)
}

/// `sum f_i s^i` by Horner's rule, coefficients kept on the left.
fn horner(
    ctx: &SkewContext,
    f: &SkewPoly<PuiseuxSeries>,
    s: &SkewPoly<PuiseuxSeries>,
) -> SkewPoly<PuiseuxSeries> {
    let mut it = f.coeffs.iter().rev();
    let mut acc = match it.next() {
        Some(c) => SkewPoly::new(vec![c.clone()]),
        None => return SkewPoly::zero(),
    };
    for c in it {
        acc = poly_mul(ctx, &acc, s);
        acc.coeffs[0] = acc.coeffs[0].add(c);
    }
    acc
}

/// Same polynomial over a ramification `n` times finer.
pub fn reembed_iso(
    ctx: &SkewContext,
    f: &SkewPoly<PuiseuxSeries>,
    n: u32,
) -> (SkewPoly<PuiseuxSeries>, SkewContext) {
    let ram = lcm_u32(ctx.ram * n, poly_ram(f));
    let target = ctx.with_ram(ram);
    (
        SkewPoly::new(
            f.coeffs
                .iter()
                .map(|c| c.to_ram(lcm_u32(ram, c.ram())))
                .collect(),
        ),
        target,
    )
}

/// `b + sigma(b) + ... + sigma^(d-1)(b)`.
pub fn trace_map(b: &PuiseuxSeries, d: usize, alpha: &Alpha) -> PuiseuxSeries {
    let mut acc = PuiseuxSeries::zero(b.bits());
    let mut cur = b.clone();
    for j in 0..d {
        if j > 0 {
            cur = cur.sigma_apply(&Rational::one(), alpha);
        }
        acc = acc.add(&cur);
    }
    acc
}

/// Preimage of `g` under the trace map: `b_q = g_q / (1 + beta + ... + beta^(d-1))`
/// with `beta = alpha^q`.
pub fn trace_solve(g: &PuiseuxSeries, d: usize, alpha: &Alpha) -> Result<PuiseuxSeries> {
    if d == 0 {
        return Err(Error::Domain("trace of degree zero".into()));
    }
    let bits = g.bits();
    let ram = g.ram();
    let mut terms = Vec::with_capacity(g.terms().len());
    for (k, c) in g.terms() {
        let q = Rational::new(BigInt::from(*k), BigInt::from(ram));
        let beta = alpha.pow(&q);
        let mut s = BigComplex::zero(bits);
        let mut p = BigComplex::one(bits);
        for _ in 0..d {
            s = s.add(&p);
            p = p.mul(&beta);
        }
        if s.below_pow2(-((bits / 2) as i32)) {
            return Err(Error::Obstruction { q });
        }
        terms.push((*k, c.div(&s)?));
    }
    Ok(PuiseuxSeries::from_terms(ram, terms, g.trunc(), bits))
}

/// Order ignoring terms of modulus at most `eps`; `None` when nothing
/// significant is stored.
pub fn significant_ord(c: &PuiseuxSeries, eps: f64) -> Option<Rational> {
    c.terms()
        .iter()
        .find(|(_, v)| v.abs_f64() > eps)
        .map(|(k, _)| Rational::new(BigInt::from(*k), BigInt::from(c.ram())))
}

/// `max_i -ord(f_i) / (d - i)` over the significant lower coefficients;
/// `None` when all of them vanish.
pub fn scaling_exponent(f: &SkewPoly<PuiseuxSeries>, eps: f64) -> Option<Rational> {
    let d = f.coeffs.len().checked_sub(1)?;
    (0..d)
        .filter_map(|i| {
            significant_ord(&f.coeffs[i], eps)
                .map(|o| -o / Rational::from_integer(BigInt::from((d - i) as i64)))
        })
        .max()
}

/// Exponent `e` with `(x^(-r) t)^i = alpha^e x^(-r i) t^i` when `delta = 0`.
pub fn beta_exponent(r: &Rational, i: u32) -> Rational {
    let i = i as i64;
    -r * Rational::from_integer(BigInt::from(i * (i - 1) / 2))
}

#[derive(Clone, Debug, PartialEq)]
enum Letter {
    X(Rational),
    T,
}

/// Rewrites the word `(x^(-r) t)^i` to the normal form `alpha^e x^q t^k`
/// using only `t x^q = alpha^q x^q t` and `x^a x^b = x^(a+b)`; returns
/// `(e, q, k)`.
pub fn expand_monomial_word(r: &Rational, i: u32) -> (Rational, Rational, u32) {
    let mut word = Vec::new();
    for _ in 0..i {
        word.push(Letter::X(-r.clone()));
        word.push(Letter::T);
    }
    let mut e = Rational::zero();
    loop {
        let mut changed = false;
        let mut k = 0;
        while k + 1 < word.len() {
            match (&word[k], &word[k + 1]) {
                (Letter::T, Letter::X(q)) => {
                    e += q;
                    let q = q.clone();
                    word[k] = Letter::X(q);
                    word[k + 1] = Letter::T;
                    changed = true;
                }
                (Letter::X(a), Letter::X(b)) => {
                    let s = a + b;
                    word[k] = Letter::X(s);
                    word.remove(k + 1);
                    changed = true;
                    continue;
                }
                _ => {}
            }
            k += 1;
        }
        if !changed {
            break;
        }
    }
    let mut q = Rational::zero();
    let mut tcount = 0;
    for l in &word {
        match l {
            Letter::X(a) => q += a,
            Letter::T => tcount += 1,
        }
    }
    (e, q, tcount)
}

/// Checks [`beta_exponent`] against [`expand_monomial_word`] for `i <= 4`
/// on a fixed set of exponents.
pub fn certify_beta_law() -> Result<()> {
    let samples = [(1, 1), (1, 2), (-1, 1), (2, 3), (3, 1), (-5, 4), (0, 1)];
    for (p, q) in samples {
        let r = Rational::new(BigInt::from(p), BigInt::from(q));
        for i in 0..=4u32 {
            let (e, xq, k) = expand_monomial_word(&r, i);
            let want_x = -&r * Rational::from_integer(BigInt::from(i));
            if e != beta_exponent(&r, i) || xq != want_x || k != i {
                return Err(Error::Invariant(format!(
                    "monomial law fails for r = {r}, i = {i}: alpha^{e} x^{xq} t^{k}"
                )));
            }
        }
    }
    Ok(())
}

/// `scale_iso` followed by left multiplication with the inverse of the
/// (monomial) leading coefficient.
pub fn normalize_scaled(
    ctx: &SkewContext,
    f: &SkewPoly<PuiseuxSeries>,
    r: &Rational,
) -> Result<(SkewPoly<PuiseuxSeries>, SkewContext, Vec<IsoRecord>)> {
    let (g, target) = scale_iso(ctx, f, r);
    let lc = g.coeffs.last().ok_or(Error::NotMonic)?;
    let (scalar, exponent) = monomial_parts(lc).ok_or(Error::NotMonic)?;
    let inv = PuiseuxSeries::monomial_q(scalar.inv()?, &-exponent.clone());
    let mut out = poly_scale_left(&target, &inv, &g);
    *out.coeffs.last_mut().unwrap() = PuiseuxSeries::one(ctx.bits);
    let records = vec![
        IsoRecord::Scale { r: r.clone() },
        IsoRecord::UnitNormalize { scalar, exponent },
    ];
    Ok((out, target, records))
}

/// `(c, q)` when `s = c x^q` exactly.
pub fn monomial_parts(s: &PuiseuxSeries) -> Option<(BigComplex, Rational)> {
    if s.terms().len() != 1 || !s.is_exact() {
        return None;
    }
    let (k, c) = &s.terms()[0];
    Some((
        c.clone(),
        Rational::new(BigInt::from(*k), BigInt::from(s.ram())),
    ))
}

/// `u (t - c) = (t - c') u'` with `u' = sigma^(-1)(u)` and
/// `c' = (u c + delta(u')) u'^(-1)`; inverses are known to `x^target`.
pub fn pull_unit_through_linear(
    ctx: &SkewContext,
    u: &PuiseuxSeries,
    c: &PuiseuxSeries,
    target: &Rational,
) -> Result<(PuiseuxSeries, PuiseuxSeries)> {
    if u.is_zero() {
        return Err(Error::NotInvertible("zero unit".into()));
    }
    let up = ctx.sigma_inv(u);
    let num = u.mul(c).add(&ctx.delta_apply(&up));
    let inv = up.inv(target)?;
    Ok((num.mul(&inv), up))
}

/// Maps a zero of the transformed polynomial back through `records`
/// (applied in order from the original ring), innermost first.
pub fn pullback_zero(records: &[IsoRecord], c: &PuiseuxSeries) -> PuiseuxSeries {
    let mut z = c.clone();
    for rec in records.iter().rev() {
        z = match rec {
            IsoRecord::Shift { b } => z.sub(b),
            IsoRecord::Scale { r } => z.shift_exponent(&-r.clone()),
            IsoRecord::Reembed { .. } | IsoRecord::UnitNormalize { .. } => z,
        };
    }
    z
}

/// Maps a monic factor of the transformed polynomial back through `records`
/// and makes it monic again; returns the factor and its ring.
pub fn pullback_poly(
    ctx: &SkewContext,
    h: &SkewPoly<PuiseuxSeries>,
    records: &[IsoRecord],
    target: &Rational,
) -> Result<(SkewPoly<PuiseuxSeries>, SkewContext)> {
    let mut cur = h.clone();
    let mut cctx = ctx.clone();
    for rec in records.iter().rev() {
        match rec {
            IsoRecord::Shift { b } => {
                let (p, c) = shift_iso(&cctx, &cur, &b.neg());
                cur = p;
                cctx = c;
            }
            IsoRecord::Scale { r } => {
                let (p, c) = scale_iso(&cctx, &cur, &-r.clone());
                cur = p;
                cctx = c;
            }
            IsoRecord::Reembed { .. } | IsoRecord::UnitNormalize { .. } => {}
        }
    }
    let lc = cur.coeffs.last().cloned().ok_or(Error::NotMonic)?;
    let inv = match monomial_parts(&lc) {
        Some((c, q)) => PuiseuxSeries::monomial_q(c.inv()?, &-q),
        None => lc.inv(target)?,
    };
    let mut out = poly_scale_left(&cctx, &inv, &cur);
    *out.coeffs.last_mut().unwrap() = PuiseuxSeries::one(ctx.bits);
    Ok((out, cctx))
}

/// Whether a rational is a nonnegative integer multiple of `1/ram`.
pub fn integral_at(q: &Rational, ram: u32) -> bool {
    (q * Rational::from_integer(BigInt::from(ram))).is_integer()
}

/// Smallest `k >= 1` with `r k` on the grid `1/ram`.
pub fn ramification_factor(r: &Rational, ram: u32) -> u32 {
    let v = r * Rational::from_integer(BigInt::from(ram));
    v.denom().to_u32().unwrap_or(1).max(1)
}

pub fn is_negative(q: &Rational) -> bool {
    q.is_negative()
}
