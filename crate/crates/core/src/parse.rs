//! Text grammar for scalars, series and skew polynomials, and the matching
//! printers.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::puiseux::{PuiseuxSeries, SkewContext};
use crate::scalar::{parse_rational, Alpha, BigComplex, Rational};
use crate::skew_poly::{poly_mul, SkewPoly};

fn format_exponent(q: &Rational) -> String {
    if q.is_one() {
        "x".into()
    } else if q.is_integer() && *q > Rational::zero() {
        format!("x^{q}")
    } else {
        format!("x^({q})")
    }
}

/// `(sign, body)` of a coefficient; values with both a real and an
/// imaginary part are parenthesized.
fn coeff_parts(c: &BigComplex, digits: usize) -> (bool, String) {
    let s = c.to_string_digits(digits);
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r.to_string()),
        None => (false, s.clone()),
    };
    if is_compound(&body) {
        (false, format!("({s})"))
    } else {
        (neg, body)
    }
}

/// Whether a rendered scalar contains a sign that is not part of an exponent.
fn is_compound(s: &str) -> bool {
    let b = s.as_bytes();
    (1..b.len()).any(|i| (b[i] == b'+' || b[i] == b'-') && b[i - 1] != b'e' && b[i - 1] != b'E')
}

/// Renders a series term list, lowest exponent first.
pub fn format_series_digits(f: &PuiseuxSeries, with_trunc: bool, digits: usize) -> String {
    let mut out = String::new();
    for (k, c) in f.terms() {
        let q = Rational::new(BigInt::from(*k), BigInt::from(f.ram()));
        let (neg, body) = coeff_parts(c, digits);
        let term = if q.is_zero() {
            body
        } else if body == "1" {
            format_exponent(&q)
        } else {
            format!("{body}*{}", format_exponent(&q))
        };
        push_term(&mut out, neg, &term);
    }
    push_trunc(&mut out, f, with_trunc);
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Renders a series with shortest round-trip scalars.
pub fn format_series(f: &PuiseuxSeries, with_trunc: bool) -> String {
    let mut out = String::new();
    for j in 0..f.terms().len() {
        let (neg, term) = series_term(f, j);
        push_term(&mut out, neg, &term);
    }
    push_trunc(&mut out, f, with_trunc);
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn push_trunc(out: &mut String, f: &PuiseuxSeries, with_trunc: bool) {
    if with_trunc {
        if let Some(t) = f.trunc_q() {
            push_term(
                out,
                false,
                &format!(
                    "O({})",
                    if t.is_zero() {
                        "1".to_string()
                    } else {
                        format_exponent(&t)
                    }
                ),
            );
        }
    }
}

pub fn default_digits(bits: usize) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).floor() as usize - 2
}

fn push_term(out: &mut String, neg: bool, term: &str) {
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    out.push_str(term);
}

/// Renders a residue polynomial in `t`, highest degree first.
pub fn format_residue(p: &crate::residue::ResiduePoly) -> String {
    let digits = default_digits(p.bits());
    let mut out = String::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let (neg, body) = coeff_parts(c, digits);
        let var = match i {
            0 => String::new(),
            1 => "t".into(),
            _ => format!("t^{i}"),
        };
        let term = if var.is_empty() {
            body
        } else if body == "1" {
            var
        } else {
            format!("{body}*{var}")
        };
        push_term(&mut out, neg, &term);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational, bool),
    I,
    X,
    T,
    BigO,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        pos,
        msg: msg.into(),
    })
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                    i += 1;
                }
                if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                    let mut j = i + 1;
                    if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                        j += 1;
                    }
                    if j < b.len() && b[j].is_ascii_digit() {
                        while j < b.len() && b[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let q = match parse_rational(&text[start..i]) {
                    Some(q) => q,
                    None => return err(start, format!("malformed number '{}'", &text[start..i])),
                };
                let imag = i < b.len() && b[i] == b'i';
                if imag {
                    i += 1;
                }
                out.push((Tok::Num(q, imag), start));
                continue;
            }
            b'i' => out.push((Tok::I, start)),
            b'x' => out.push((Tok::X, start)),
            b't' => out.push((Tok::T, start)),
            b'O' => out.push((Tok::BigO, start)),
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            _ => {
                return err(
                    start,
                    format!(
                        "unexpected character '{}'",
                        text[start..].chars().next().unwrap()
                    ),
                )
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Polynomial value during parsing: `coeffs[k]` multiplies `t^k` on the left.
type Val = Vec<PuiseuxSeries>;

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    bits: usize,
    ctx: Option<&'a SkewContext>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let at = self.at();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => err(at, format!("expected {what}")),
        }
    }

    fn scalar(&self, c: BigComplex) -> Val {
        vec![PuiseuxSeries::constant(c)]
    }

    fn expr(&mut self) -> Result<Val> {
        let mut neg = false;
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                neg = true;
            }
            Some(Tok::Plus) => {
                self.bump();
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if neg {
            acc = v_neg(&acc);
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let r = self.term()?;
                    acc = v_add(&acc, &r);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let r = self.term()?;
                    acc = v_add(&acc, &v_neg(&r));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Val> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    let at = self.at();
                    self.bump();
                    let r = self.factor()?;
                    acc = self.mul(&acc, &r, at)?;
                }
                Some(Tok::Slash) => {
                    let at = self.at();
                    self.bump();
                    let r = self.factor()?;
                    let c = match as_scalar(&r) {
                        Some(c) if !c.is_zero() => c,
                        _ => return err(at, "division needs a nonzero scalar divisor"),
                    };
                    let inv = BigComplex::one(self.bits).div(&c)?;
                    acc = acc.iter().map(|s| s.scale(&inv)).collect();
                }
                _ => return Ok(acc),
            }
        }
    }

    fn mul(&self, a: &Val, b: &Val, at: usize) -> Result<Val> {
        if let Some(ctx) = self.ctx {
            return Ok(poly_mul(ctx, &SkewPoly::new(a.clone()), &SkewPoly::new(b.clone())).coeffs);
        }
        if a.len() == 1 {
            return Ok(b.iter().map(|s| a[0].mul(s)).collect());
        }
        if let Some(cs) = constant_coeffs(b) {
            // complex constants commute with t
            let mut out = vec![PuiseuxSeries::zero(self.bits); a.len() + cs.len() - 1];
            for (i, s) in a.iter().enumerate() {
                for (j, c) in cs.iter().enumerate() {
                    if !c.is_zero() {
                        out[i + j] = out[i + j].add(&s.scale(c));
                    }
                }
            }
            return Ok(out);
        }
        err(at, "a product with t on the left needs the ring")
    }

    fn factor(&mut self) -> Result<Val> {
        let at = self.at();
        let (base, is_x) = match self.bump() {
            Some(Tok::Num(q, imag)) => {
                let c = BigComplex::from_rational(&q, self.bits);
                (
                    self.scalar(if imag {
                        c.mul(&BigComplex::i(self.bits))
                    } else {
                        c
                    }),
                    false,
                )
            }
            Some(Tok::I) => (self.scalar(BigComplex::i(self.bits)), false),
            Some(Tok::X) => (
                vec![PuiseuxSeries::monomial(BigComplex::one(self.bits), 1, 1)],
                true,
            ),
            Some(Tok::T) => (
                vec![
                    PuiseuxSeries::zero(self.bits),
                    PuiseuxSeries::one(self.bits),
                ],
                false,
            ),
            Some(Tok::BigO) => {
                self.expect(Tok::LParen, "'(' after O")?;
                let inner_at = self.at();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                let q = match as_monomial_order(&inner) {
                    Some(q) => q,
                    None => return err(inner_at, "O(...) takes 1 or a power of x"),
                };
                let ram = q.denom().to_u32().unwrap_or(1);
                let k = q.numer().to_i64().unwrap_or(0);
                return Ok(vec![PuiseuxSeries::zero_trunc(ram, k, self.bits)]);
            }
            Some(Tok::LParen) => {
                let v = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                (v, false)
            }
            _ => return err(at, "expected a number, i, x, t, O(...) or '('"),
        };
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let eat = self.at();
        let e = self.exponent()?;
        if is_x {
            return Ok(vec![PuiseuxSeries::monomial_q(
                BigComplex::one(self.bits),
                &e,
            )]);
        }
        let n = match (e.is_integer(), e.to_integer().to_u32()) {
            (true, Some(n)) => n,
            _ => return err(eat, "only x takes fractional or negative exponents"),
        };
        let mut acc = self.scalar(BigComplex::one(self.bits));
        for _ in 0..n {
            acc = self.mul(&acc, &base, eat)?;
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<Rational> {
        let at = self.at();
        let paren = self.peek() == Some(&Tok::LParen);
        if paren {
            self.bump();
        }
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let mut q = match self.bump() {
            Some(Tok::Num(q, false)) if q.is_integer() => q,
            _ => return err(at, "expected an integer exponent"),
        };
        if paren && self.peek() == Some(&Tok::Slash) {
            self.bump();
            let dat = self.at();
            match self.bump() {
                Some(Tok::Num(d, false)) if d.is_integer() && !d.is_zero() => q /= d,
                _ => return err(dat, "expected an integer denominator"),
            }
        }
        if paren {
            self.expect(Tok::RParen, "')'")?;
        }
        Ok(if neg { -q } else { q })
    }
}

fn v_add(a: &Val, b: &Val) -> Val {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| match (a.get(k), b.get(k)) {
            (Some(x), Some(y)) => x.add(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect()
}

fn v_neg(a: &Val) -> Val {
    a.iter().map(|s| s.neg()).collect()
}

fn as_scalar(v: &Val) -> Option<BigComplex> {
    if v.iter().skip(1).any(|s| !s.is_zero() || !s.is_exact()) {
        return None;
    }
    let s = v.first()?;
    if !s.is_exact() {
        return None;
    }
    match s.terms() {
        [] => Some(BigComplex::zero(s.bits())),
        [(0, c)] => Some(c.clone()),
        _ => None,
    }
}

fn constant_coeffs(v: &Val) -> Option<Vec<BigComplex>> {
    v.iter()
        .map(|s| match (s.is_exact(), s.terms()) {
            (true, []) => Some(BigComplex::zero(s.bits())),
            (true, [(0, c)]) => Some(c.clone()),
            _ => None,
        })
        .collect()
}

fn as_monomial_order(v: &Val) -> Option<Rational> {
    if v.len() != 1 || !v[0].is_exact() {
        return None;
    }
    match v[0].terms() {
        [(k, c)] if c.sub(&BigComplex::one(c.bits())).is_zero() => {
            Some(Rational::new(BigInt::from(*k), BigInt::from(v[0].ram())))
        }
        _ => None,
    }
}

fn run_parser(text: &str, bits: usize, ctx: Option<&SkewContext>) -> Result<Val> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return err(0, "empty input");
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        bits,
        ctx,
    };
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        return err(p.at(), "unexpected trailing input");
    }
    Ok(v)
}

/// Parses a scalar literal such as `3/2`, `-0.25`, `1+2i` or `(2-i)/3`.
pub fn parse_scalar(text: &str, bits: usize) -> Result<BigComplex> {
    let v = run_parser(text, bits, None)?;
    as_scalar(&v).ok_or_else(|| Error::Parse {
        pos: 0,
        msg: "expected a scalar".into(),
    })
}

/// Parses a series such as `1 - 3/2*x^(1/2) + (2+i)*x^2 + O(x^3)`.
pub fn parse_series(text: &str, bits: usize) -> Result<PuiseuxSeries> {
    let v = run_parser(text, bits, None)?;
    if v.iter().skip(1).any(|s| !s.is_zero() || !s.is_exact()) {
        return err(0, "a series must not contain t");
    }
    Ok(v.into_iter()
        .next()
        .unwrap_or_else(|| PuiseuxSeries::zero(bits)))
}

/// Parses a polynomial whose terms have the shape `coeff*t^k`; products with
/// `t` on the left of a non-constant factor need [`parse_poly_in`].
pub fn parse_poly(text: &str, bits: usize) -> Result<SkewPoly<PuiseuxSeries>> {
    Ok(SkewPoly::new(run_parser(text, bits, None)?))
}

/// Parses a polynomial, multiplying factors in the given ring.
pub fn parse_poly_in(ctx: &SkewContext, text: &str) -> Result<SkewPoly<PuiseuxSeries>> {
    Ok(SkewPoly::new(run_parser(text, ctx.bits, Some(ctx))?))
}

/// A rational literal gives a rational `alpha`; anything else is a complex
/// value, accepted only when `allow_complex` is set.
pub fn parse_alpha(text: &str, bits: usize, allow_complex: bool) -> Result<Alpha> {
    if let Some(q) = parse_rational(text) {
        return Alpha::rational(q, bits);
    }
    Alpha::complex(parse_scalar(text, bits)?, allow_complex)
}

fn scalar_round_trips(c: &BigComplex, s: &str) -> bool {
    parse_scalar(s, c.bits()).is_ok_and(|v| v.sub(c).is_zero())
}

/// Shortest decimal rendering that parses back to the same value.
pub fn format_scalar(c: &BigComplex) -> String {
    let max = default_digits(c.bits()) + 6;
    for n in 1..=max {
        let s = c.to_string_digits(n);
        if scalar_round_trips(c, &s) {
            return s;
        }
    }
    c.to_string_digits(max)
}

/// Renders a polynomial, highest degree first; series coefficients with
/// more than one term or a truncation are parenthesized.
pub fn format_poly(f: &SkewPoly<PuiseuxSeries>, with_trunc: bool) -> String {
    let mut out = String::new();
    for (i, c) in f.coeffs.iter().enumerate().rev() {
        if c.is_zero() && (c.is_exact() || !with_trunc) {
            continue;
        }
        let var = match i {
            0 => String::new(),
            1 => "t".into(),
            _ => format!("t^{i}"),
        };
        let simple = c.terms().len() == 1 && (c.is_exact() || !with_trunc);
        let (neg, body) = if simple {
            series_term(c, 0)
        } else if c.terms().first().is_some_and(|_| series_term(c, 0).0) {
            (true, format!("({})", format_series(&c.neg(), with_trunc)))
        } else {
            (false, format!("({})", format_series(c, with_trunc)))
        };
        let term = if var.is_empty() {
            body
        } else if body == "1" {
            var
        } else {
            format!("{body}*{var}")
        };
        push_term(&mut out, neg, &term);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `(sign, body)` of the `j`-th term of a series.
fn series_term(f: &PuiseuxSeries, j: usize) -> (bool, String) {
    let (k, c) = &f.terms()[j];
    let q = Rational::new(BigInt::from(*k), BigInt::from(f.ram()));
    let (neg, body) = coeff_parts_exact(c);
    let term = if q.is_zero() {
        body
    } else if body == "1" {
        format_exponent(&q)
    } else {
        format!("{body}*{}", format_exponent(&q))
    };
    (neg, term)
}

fn coeff_parts_exact(c: &BigComplex) -> (bool, String) {
    let s = format_scalar(c);
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r.to_string()),
        None => (false, s.clone()),
    };
    if is_compound(&body) {
        (false, format!("({s})"))
    } else {
        (neg, body)
    }
}

/// `t - c` as text, without truncation terms.
pub fn format_linear(c: &PuiseuxSeries) -> String {
    if c.is_zero() {
        return "t".into();
    }
    if c.terms().len() == 1 {
        let (neg, body) = series_term(c, 0);
        return format!("t {} {body}", if neg { "+" } else { "-" });
    }
    if series_term(c, 0).0 {
        return format!("t + ({})", format_series(&c.neg(), false));
    }
    format!("t - ({})", format_series(c, false))
}
