//! Exact rationals, arbitrary-precision complex numbers and rational powers of
//! the automorphism multiplier `alpha`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub const DEFAULT_BITS: usize = 128;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p`, `p/q` or a plain decimal such as `-1.25e-3` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{ip}{fp}0").parse::<BigInt>().ok()? / 10;
    let scale = exp - fp.len() as i64;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

pub fn lcm_u32(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

pub fn denom_u32(q: &Rational) -> u32 {
    q.denom().to_u32().expect("denominator fits in u32")
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn bigint_to_float(n: &BigInt, bits: usize) -> BigFloat {
    if let Some(v) = n.to_i64() {
        return BigFloat::from_i64(v, bits.max(64));
    }
    with_consts(|cc| BigFloat::parse(&n.to_string(), Radix::Dec, bits, RM, cc))
}

/// Precision holding `n` exactly.
fn exact_bits(n: &BigInt, bits: usize) -> usize {
    (n.bits() as usize + 64).max(bits).div_ceil(64) * 64
}

/// Correctly rounded conversion.
pub fn rational_to_float(q: &Rational, bits: usize) -> BigFloat {
    let n = bigint_to_float(q.numer(), exact_bits(q.numer(), bits));
    if q.denom().is_one() {
        let mut n = n;
        n.set_precision(bits, RM).ok();
        return n;
    }
    let d = bigint_to_float(q.denom(), exact_bits(q.denom(), bits));
    n.div(&d, bits, RM)
}

/// The exact value of a finite float.
pub fn float_to_rational(x: &BigFloat) -> Rational {
    match x.as_raw_parts() {
        Some((words, _, sign, exp, _)) if !x.is_zero() => {
            let mut m = BigInt::zero();
            for w in words.iter().rev() {
                m = (m << 64) + BigInt::from(*w);
            }
            let e = exp as i64 - 64 * words.len() as i64;
            let mut q = if e >= 0 {
                Rational::from_integer(m << e as usize)
            } else {
                Rational::new(m, BigInt::one() << (-e) as usize)
            };
            if sign == Sign::Neg {
                q = -q;
            }
            q
        }
        _ => Rational::zero(),
    }
}

fn float_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    match x.as_raw_parts() {
        Some((words, _, sign, exp, _)) => {
            let top = *words.last().unwrap_or(&0) as f64;
            let mag = top * 2f64.powi(exp - 64);
            if sign == Sign::Neg {
                -mag
            } else {
                mag
            }
        }
        None => f64::NAN,
    }
}

/// Binary exponent `e` with `2^(e-1) <= |x| < 2^e`; `None` for zero.
fn float_exponent(x: &BigFloat) -> Option<i32> {
    if x.is_zero() {
        None
    } else {
        x.exponent()
    }
}

/// Complex number with both parts at the same binary precision.
#[derive(Clone)]
pub struct BigComplex {
    re: BigFloat,
    im: BigFloat,
    bits: usize,
}

impl BigComplex {
    pub fn zero(bits: usize) -> Self {
        BigComplex {
            re: BigFloat::new(bits),
            im: BigFloat::new(bits),
            bits,
        }
    }

    pub fn one(bits: usize) -> Self {
        Self::from_i64(1, bits)
    }

    pub fn i(bits: usize) -> Self {
        BigComplex {
            re: BigFloat::new(bits),
            im: BigFloat::from_i64(1, bits),
            bits,
        }
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        BigComplex {
            re: BigFloat::from_i64(v, bits),
            im: BigFloat::new(bits),
            bits,
        }
    }

    pub fn from_f64(re: f64, im: f64, bits: usize) -> Self {
        BigComplex {
            re: BigFloat::from_f64(re, bits),
            im: BigFloat::from_f64(im, bits),
            bits,
        }
    }

    pub fn from_rational(q: &Rational, bits: usize) -> Self {
        BigComplex {
            re: rational_to_float(q, bits),
            im: BigFloat::new(bits),
            bits,
        }
    }

    pub fn from_rationals(re: &Rational, im: &Rational, bits: usize) -> Self {
        BigComplex {
            re: rational_to_float(re, bits),
            im: rational_to_float(im, bits),
            bits,
        }
    }

    pub fn from_floats(re: BigFloat, im: BigFloat, bits: usize) -> Self {
        BigComplex { re, im, bits }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn with_bits(&self, bits: usize) -> Self {
        let mut re = self.re.clone();
        let mut im = self.im.clone();
        re.set_precision(bits, RM).ok();
        im.set_precision(bits, RM).ok();
        BigComplex { re, im, bits }
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn re_f64(&self) -> f64 {
        float_to_f64(&self.re)
    }

    pub fn im_f64(&self) -> f64 {
        float_to_f64(&self.im)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn p(&self, other: &Self) -> usize {
        self.bits.max(other.bits)
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.p(o);
        BigComplex {
            re: self.re.add(&o.re, p, RM),
            im: self.im.add(&o.im, p, RM),
            bits: p,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.p(o);
        BigComplex {
            re: self.re.sub(&o.re, p, RM),
            im: self.im.sub(&o.im, p, RM),
            bits: p,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.p(o);
        if self.im.is_zero() && o.im.is_zero() {
            return BigComplex {
                re: self.re.mul(&o.re, p, RM),
                im: BigFloat::new(p),
                bits: p,
            };
        }
        if o.im.is_zero() {
            return self.scale(&o.re);
        }
        if self.im.is_zero() {
            return o.scale(&self.re);
        }
        let q = p + 8;
        let ac = self.re.mul(&o.re, q, RM);
        let bd = self.im.mul(&o.im, q, RM);
        let ad = self.re.mul(&o.im, q, RM);
        let bc = self.im.mul(&o.re, q, RM);
        BigComplex {
            re: ac.sub(&bd, p, RM),
            im: ad.add(&bc, p, RM),
            bits: p,
        }
    }

    /// Multiplication by a real scalar.
    pub fn scale(&self, r: &BigFloat) -> Self {
        let p = self.bits;
        BigComplex {
            re: self.re.mul(r, p, RM),
            im: self.im.mul(r, p, RM),
            bits: p,
        }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.scale(&BigFloat::from_i64(k, self.bits))
    }

    pub fn neg(&self) -> Self {
        BigComplex {
            re: BigFloat::neg(&self.re),
            im: BigFloat::neg(&self.im),
            bits: self.bits,
        }
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: BigFloat::neg(&self.im),
            bits: self.bits,
        }
    }

    pub fn norm_sqr(&self) -> BigFloat {
        let q = self.bits + 8;
        self.re
            .mul(&self.re, q, RM)
            .add(&self.im.mul(&self.im, q, RM), self.bits, RM)
    }

    pub fn abs(&self) -> BigFloat {
        if self.im.is_zero() {
            return self.re.abs();
        }
        if self.re.is_zero() {
            return self.im.abs();
        }
        self.norm_sqr().sqrt(self.bits, RM)
    }

    pub fn abs_f64(&self) -> f64 {
        let (r, i) = (self.re_f64(), self.im_f64());
        r.hypot(i)
    }

    /// `log2 |z|` rounded down, cheap; `None` for zero.
    pub fn log2_floor(&self) -> Option<i32> {
        match (float_exponent(&self.re), float_exponent(&self.im)) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(i32::MIN).max(b.unwrap_or(i32::MIN)) - 1),
        }
    }

    /// True when `|self| <= eps` where `eps = 2^e`; tolerant, cheap comparison.
    pub fn below_pow2(&self, e: i32) -> bool {
        match self.log2_floor() {
            None => true,
            Some(l) => l < e,
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible("complex zero".into()));
        }
        let p = self.bits;
        if self.im.is_zero() {
            return Ok(BigComplex {
                re: BigFloat::from_i64(1, p).div(&self.re, p, RM),
                im: BigFloat::new(p),
                bits: p,
            });
        }
        let n = self.norm_sqr();
        Ok(BigComplex {
            re: self.re.div(&n, p, RM),
            im: BigFloat::neg(&self.im).div(&n, p, RM),
            bits: p,
        })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.im.is_zero() {
            if o.re.is_zero() {
                return Err(Error::NotInvertible("division by complex zero".into()));
            }
            let p = self.p(o);
            return Ok(BigComplex {
                re: self.re.div(&o.re, p, RM),
                im: self.im.div(&o.re, p, RM),
                bits: p,
            });
        }
        Ok(self.mul(&o.inv()?))
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv()?.powi(-n);
        }
        let mut base = self.clone();
        let mut acc = BigComplex::one(self.bits);
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    pub fn exp(&self) -> Self {
        let p = self.bits;
        with_consts(|cc| {
            let m = self.re.exp(p + 16, RM, cc);
            if self.im.is_zero() {
                let mut m = m;
                m.set_precision(p, RM).ok();
                return BigComplex {
                    re: m,
                    im: BigFloat::new(p),
                    bits: p,
                };
            }
            let c = self.im.cos(p + 16, RM, cc);
            let s = self.im.sin(p + 16, RM, cc);
            BigComplex {
                re: m.mul(&c, p, RM),
                im: m.mul(&s, p, RM),
                bits: p,
            }
        })
    }

    /// Principal argument in `(-pi, pi]`.
    pub fn arg(&self) -> BigFloat {
        let p = self.bits;
        with_consts(|cc| {
            let pi = cc.pi(p + 16, RM);
            if self.re.is_zero() {
                if self.im.is_zero() {
                    return BigFloat::new(p);
                }
                let half = pi.div(&BigFloat::from_i64(2, p), p, RM);
                return if self.im.is_negative() {
                    BigFloat::neg(&half)
                } else {
                    half
                };
            }
            let t = self.im.div(&self.re, p + 16, RM).atan(p + 16, RM, cc);
            if self.re.is_positive() {
                let mut t = t;
                t.set_precision(p, RM).ok();
                t
            } else if self.im.is_negative() {
                t.sub(&pi, p, RM)
            } else {
                t.add(&pi, p, RM)
            }
        })
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("logarithm of zero".into()));
        }
        let p = self.bits;
        let lr = with_consts(|cc| self.abs().ln(p, RM, cc));
        Ok(BigComplex {
            re: lr,
            im: self.arg(),
            bits: p,
        })
    }

    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        if self.im.is_zero() && self.re.is_positive() {
            return BigComplex {
                re: self.re.sqrt(self.bits, RM),
                im: BigFloat::new(self.bits),
                bits: self.bits,
            };
        }
        let p = self.bits;
        let r = self.abs();
        let two = BigFloat::from_i64(2, p);
        let a = r.add(&self.re, p + 8, RM).div(&two, p + 8, RM).sqrt(p, RM);
        let b = r.sub(&self.re, p + 8, RM).div(&two, p + 8, RM).sqrt(p, RM);
        let b = if self.im.is_negative() {
            BigFloat::neg(&b)
        } else {
            b
        };
        BigComplex {
            re: a,
            im: b,
            bits: p,
        }
    }

    /// `exp(q ln z)` with the principal branch.
    pub fn pow_rational(&self, q: &Rational) -> Result<Self> {
        if q.is_integer() {
            if let Some(n) = q.to_i64() {
                return self.powi(n);
            }
        }
        let l = self.with_bits(self.bits + 16).ln()?;
        let qf = rational_to_float(q, self.bits + 16);
        Ok(l.scale(&qf).exp().with_bits(self.bits))
    }

    /// Relative-or-absolute closeness: `|a-b| <= tol * max(1, |a|, |b|)`.
    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        let d = self.sub(o).abs_f64();
        let s = 1f64.max(self.abs_f64()).max(o.abs_f64());
        d <= tol * s
    }

    /// Decimal rendering with `digits` significant digits; parts smaller than
    /// `2^-(bits/2)` times the modulus are dropped.
    pub fn to_string_digits(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let cut = -((self.bits / 2) as i32);
        let mag = self.log2_floor().unwrap_or(0);
        let re_small =
            self.re.is_zero() || float_exponent(&self.re).map_or(true, |e| e - 1 - mag < cut);
        let im_small =
            self.im.is_zero() || float_exponent(&self.im).map_or(true, |e| e - 1 - mag < cut);
        let re = format_float(&self.re, digits);
        let im = format_float(&self.im, digits);
        match (re_small, im_small) {
            (false, true) => re,
            (true, false) => imag_part(&im),
            _ => {
                let imp = imag_part(&im);
                if let Some(rest) = imp.strip_prefix('-') {
                    format!("{re}-{rest}")
                } else {
                    format!("{re}+{imp}")
                }
            }
        }
    }

    pub fn default_digits(&self) -> usize {
        ((self.bits as f64) * std::f64::consts::LOG10_2).floor() as usize - 2
    }
}

fn imag_part(im: &str) -> String {
    match im {
        "1" => "i".into(),
        "-1" => "-i".into(),
        s => format!("{s}i"),
    }
}

/// Formats a float with at most `digits` significant digits, trimmed.
/// First `digits` significant decimal digits of a positive rational, rounded
/// half up, with the decimal exponent of the first digit.
fn decimal_digits(q: &Rational, digits: usize) -> (Vec<u8>, i64) {
    let ten = BigInt::from(10);
    let est = (q.numer().bits() as f64 - q.denom().bits() as f64) * std::f64::consts::LOG10_2;
    let mut exp10 = est.floor() as i64 - 1;
    loop {
        let shift = digits as i64 - 1 - exp10;
        let scaled = if shift >= 0 {
            q * Rational::from_integer(num_traits::pow(ten.clone(), shift as usize))
        } else {
            q / Rational::from_integer(num_traits::pow(ten.clone(), (-shift) as usize))
        };
        let n = (scaled + Rational::new(BigInt::one(), BigInt::from(2)))
            .floor()
            .to_integer();
        let s = n.to_string();
        if s.len() > digits {
            exp10 += 1;
            continue;
        }
        if s.len() < digits {
            exp10 -= 1;
            continue;
        }
        return (s.bytes().map(|b| b - b'0').collect(), exp10);
    }
}

pub fn format_float(x: &BigFloat, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let q = float_to_rational(x);
    let neg = q.is_negative();
    let (mut ds, exp10) = decimal_digits(&q.abs(), digits.max(1));
    while ds.len() > 1 && *ds.last().unwrap() == 0 {
        ds.pop();
    }
    let digits_str: String = ds.iter().map(|d| (d + b'0') as char).collect();
    let body = if (-6..=20).contains(&exp10) {
        if exp10 >= 0 {
            let e = exp10 as usize;
            if digits_str.len() <= e + 1 {
                format!("{}{}", digits_str, "0".repeat(e + 1 - digits_str.len()))
            } else {
                format!("{}.{}", &digits_str[..e + 1], &digits_str[e + 1..])
            }
        } else {
            format!("0.{}{}", "0".repeat((-exp10 - 1) as usize), digits_str)
        }
    } else if digits_str.len() == 1 {
        format!("{digits_str}e{exp10}")
    } else {
        format!("{}.{}e{}", &digits_str[..1], &digits_str[1..], exp10)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_digits(self.default_digits()))
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_digits(20))
    }
}

impl PartialEq for BigComplex {
    fn eq(&self, o: &Self) -> bool {
        self.re.cmp(&o.re) == Some(0) && self.im.cmp(&o.im) == Some(0)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $m(self, o: &BigComplex) -> BigComplex {
                $body(self, o)
            }
        }
    };
}

forward_binop!(Add, add, |a: &BigComplex, b: &BigComplex| BigComplex::add(
    a, b
));
forward_binop!(Sub, sub, |a: &BigComplex, b: &BigComplex| BigComplex::sub(
    a, b
));
forward_binop!(Mul, mul, |a: &BigComplex, b: &BigComplex| BigComplex::mul(
    a, b
));
forward_binop!(Div, div, |a: &BigComplex, b: &BigComplex| BigComplex::div(
    a, b
)
.expect("division by zero"));

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::neg(self)
    }
}

#[derive(Clone, Debug)]
pub enum AlphaValue {
    Rational(Rational),
    Complex(BigComplex),
}

/// The multiplier of the automorphism `x -> alpha x`, with a cache of its
/// rational powers.
#[derive(Clone)]
pub struct Alpha {
    value: AlphaValue,
    allow_complex: bool,
    bits: usize,
    cache: Arc<Mutex<HashMap<Rational, BigComplex>>>,
}

impl fmt::Debug for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            AlphaValue::Rational(q) => write!(f, "Alpha({q})"),
            AlphaValue::Complex(c) => write!(f, "Alpha({c})"),
        }
    }
}

impl Alpha {
    pub fn rational(q: Rational, bits: usize) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::Domain("alpha must be nonzero".into()));
        }
        if q.is_negative() {
            return Err(Error::Domain(format!(
                "alpha = {q} is not a positive real; complex mode is required"
            )));
        }
        Ok(Alpha {
            value: AlphaValue::Rational(q),
            allow_complex: false,
            bits,
            cache: Default::default(),
        })
    }

    pub fn from_i64(n: i64, bits: usize) -> Result<Self> {
        Self::rational(rat_int(n), bits)
    }

    /// Accepts a complex value; non-positive-real values need `allow_complex`.
    pub fn complex(c: BigComplex, allow_complex: bool) -> Result<Self> {
        let bits = c.bits();
        if c.is_zero() {
            return Err(Error::Domain("alpha must be nonzero".into()));
        }
        let positive_real = c.is_real() && c.re().is_positive();
        if !positive_real && !allow_complex {
            return Err(Error::Domain(format!(
                "alpha = {c} is not a positive real; complex mode is required"
            )));
        }
        Ok(Alpha {
            value: AlphaValue::Complex(c),
            allow_complex,
            bits,
            cache: Default::default(),
        })
    }

    /// Same multiplier carried at another precision.
    pub fn with_bits(&self, bits: usize) -> Self {
        let value = match &self.value {
            AlphaValue::Rational(q) => AlphaValue::Rational(q.clone()),
            AlphaValue::Complex(c) => AlphaValue::Complex(c.with_bits(bits)),
        };
        Alpha {
            value,
            allow_complex: self.allow_complex,
            bits,
            cache: Default::default(),
        }
    }

    pub fn value(&self) -> &AlphaValue {
        &self.value
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn allow_complex(&self) -> bool {
        self.allow_complex
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match &self.value {
            AlphaValue::Rational(q) => Some(q),
            AlphaValue::Complex(_) => None,
        }
    }

    pub fn is_positive_real(&self) -> bool {
        match &self.value {
            AlphaValue::Rational(_) => true,
            AlphaValue::Complex(c) => c.is_real() && c.re().is_positive(),
        }
    }

    pub fn to_complex(&self) -> BigComplex {
        match &self.value {
            AlphaValue::Rational(q) => BigComplex::from_rational(q, self.bits),
            AlphaValue::Complex(c) => c.clone(),
        }
    }

    /// Exact test on a rational value, else `|alpha - 1| < 2^(-P/4)`.
    pub fn is_one(&self) -> bool {
        match &self.value {
            AlphaValue::Rational(q) => q.is_one(),
            AlphaValue::Complex(c) => c
                .sub(&BigComplex::one(self.bits))
                .below_pow2(-((self.bits / 4) as i32)),
        }
    }

    /// `alpha^q`: principal real root for positive real alpha, polar
    /// convention `|alpha|^q e^(i q arg alpha)` otherwise.
    pub fn pow(&self, q: &Rational) -> BigComplex {
        if q.is_zero() || self.is_one() {
            return BigComplex::one(self.bits);
        }
        if let Some(v) = self.cache.lock().unwrap().get(q) {
            return v.clone();
        }
        let v = match &self.value {
            AlphaValue::Rational(a) if q.is_integer() && q.abs() <= rat_int(4096) => {
                let n = q.to_i64().unwrap();
                let p = if n >= 0 {
                    num_traits::pow(a.clone(), n as usize)
                } else {
                    num_traits::pow(a.recip(), (-n) as usize)
                };
                BigComplex::from_rational(&p, self.bits)
            }
            AlphaValue::Rational(a) => {
                let base = BigComplex::from_rational(a, self.bits + 16);
                base.pow_rational(q)
                    .expect("alpha nonzero")
                    .with_bits(self.bits)
            }
            AlphaValue::Complex(c) => c
                .with_bits(self.bits + 16)
                .pow_rational(q)
                .expect("alpha nonzero")
                .with_bits(self.bits),
        };
        self.cache.lock().unwrap().insert(q.clone(), v.clone());
        v
    }

    pub fn pow_i(&self, k: i64, ram: u32) -> BigComplex {
        self.pow(&Rational::new(BigInt::from(k), BigInt::from(ram)))
    }
}

/// Free-function form of [`Alpha::pow`].
pub fn alpha_pow(alpha: &Alpha, q: &Rational) -> Result<BigComplex> {
    Ok(alpha.pow(q))
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            AlphaValue::Rational(q) => write!(f, "{q}"),
            AlphaValue::Complex(c) => write!(f, "{c}"),
        }
    }
}
