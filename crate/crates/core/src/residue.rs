//! Commutative toolkit over `C[t]`: roots, extended gcd, the affine twist
//! `T`, orbit partitions and the all-`n` twist-coprimality decision.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::BigComplex;

/// Dense polynomial over big complex scalars, lowest degree first.
#[derive(Clone)]
pub struct ResiduePoly {
    coeffs: Vec<BigComplex>,
    bits: usize,
}

impl fmt::Debug for ResiduePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ResiduePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parse::format_residue(self))
    }
}

impl ResiduePoly {
    /// Trailing exact zeros are removed.
    pub fn new(mut coeffs: Vec<BigComplex>, bits: usize) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ResiduePoly { coeffs, bits }
    }

    pub fn zero(bits: usize) -> Self {
        ResiduePoly {
            coeffs: Vec::new(),
            bits,
        }
    }

    pub fn one(bits: usize) -> Self {
        ResiduePoly {
            coeffs: vec![BigComplex::one(bits)],
            bits,
        }
    }

    pub fn constant(c: BigComplex) -> Self {
        let bits = c.bits();
        Self::new(vec![c], bits)
    }

    /// `t - c`.
    pub fn linear(c: &BigComplex) -> Self {
        let bits = c.bits();
        ResiduePoly {
            coeffs: vec![c.neg(), BigComplex::one(bits)],
            bits,
        }
    }

    /// `t^d`.
    pub fn monomial(d: usize, bits: usize) -> Self {
        let mut coeffs = vec![BigComplex::zero(bits); d];
        coeffs.push(BigComplex::one(bits));
        ResiduePoly { coeffs, bits }
    }

    /// `prod (t - c)^m`.
    pub fn from_roots(roots: &[(BigComplex, usize)], bits: usize) -> Self {
        let mut p = ResiduePoly::one(bits);
        for (c, m) in roots {
            for _ in 0..*m {
                p = p.mul(&ResiduePoly::linear(c));
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[BigComplex] {
        &self.coeffs
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigComplex {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| BigComplex::zero(self.bits))
    }

    pub fn leading(&self) -> Option<&BigComplex> {
        self.coeffs.last()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs_f64()).fold(0.0, f64::max)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(
            (0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect(),
            self.bits.max(o.bits),
        )
    }

    pub fn neg(&self) -> Self {
        ResiduePoly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            bits: self.bits,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &BigComplex) -> Self {
        Self::new(self.coeffs.iter().map(|v| v.mul(c)).collect(), self.bits)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.bits.max(o.bits));
        }
        let bits = self.bits.max(o.bits);
        let mut out = vec![BigComplex::zero(bits); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out, bits)
    }

    /// Euclidean division by a polynomial with nonzero leading coefficient.
    pub fn divmod(&self, d: &Self) -> Result<(Self, Self)> {
        let dl = d
            .leading()
            .ok_or_else(|| Error::SingularElimination("division by the zero polynomial".into()))?;
        let inv = dl.inv()?;
        let m = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= m {
            return Ok((Self::zero(self.bits), self.clone()));
        }
        let mut q = vec![BigComplex::zero(self.bits); r.len() - m];
        for k in (m..r.len()).rev() {
            let c = r[k].mul(&inv);
            for (i, dc) in d.coeffs.iter().enumerate().take(m) {
                r[k - m + i] = r[k - m + i].sub(&c.mul(dc));
            }
            q[k - m] = c;
        }
        r.truncate(m);
        Ok((Self::new(q, self.bits), Self::new(r, self.bits)))
    }

    pub fn eval(&self, z: &BigComplex) -> BigComplex {
        let mut acc = BigComplex::zero(self.bits);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul_i64(i as i64))
                .collect(),
            self.bits,
        )
    }

    /// `p(a t + b)`.
    pub fn compose_affine(&self, a: &BigComplex, b: &BigComplex) -> Self {
        let lin = Self::new(vec![b.clone(), a.clone()], self.bits);
        let mut acc = Self::zero(self.bits);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(c.clone()));
        }
        acc
    }

    pub fn conj(&self) -> Self {
        ResiduePoly {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
            bits: self.bits,
        }
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Result<Self> {
        match self.leading() {
            Some(l) => Ok(self.scale(&l.inv()?)),
            None => Err(Error::SingularElimination(
                "zero polynomial has no monic form".into(),
            )),
        }
    }

    /// Drops leading coefficients of modulus at most `eps`.
    pub fn trim_eps(&self, eps: f64) -> Self {
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|v| v.abs_f64() <= eps) {
            c.pop();
        }
        Self::new(c, self.bits)
    }

    /// Keeps the coefficients of degree below `n`.
    pub fn truncate_degree(&self, n: usize) -> Self {
        Self::new(self.coeffs.iter().take(n).cloned().collect(), self.bits)
    }

    pub fn distance(&self, o: &Self) -> f64 {
        self.sub(o).norm()
    }

    pub fn with_bits(&self, bits: usize) -> Self {
        ResiduePoly {
            coeffs: self.coeffs.iter().map(|c| c.with_bits(bits)).collect(),
            bits,
        }
    }
}

/// Roots with multiplicities and the largest `|p(root)|`.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<(BigComplex, usize)>,
    pub max_residual: f64,
    pub iterations: usize,
}

impl RootSet {
    pub fn total(&self) -> usize {
        self.roots.iter().map(|(_, m)| m).sum()
    }

    /// Roots repeated by multiplicity.
    pub fn flat(&self) -> Vec<BigComplex> {
        self.roots
            .iter()
            .flat_map(|(c, m)| std::iter::repeat(c.clone()).take(*m))
            .collect()
    }
}

pub const MAX_ROOT_ITERATIONS: usize = 512;

/// Durand-Kerner from the starting points `(0.4+0.9i)^k` scaled to the root
/// radius, iterated at twice the working precision; roots closer than
/// `cluster_tol` (relative) are merged and averaged.
pub fn roots(p: &ResiduePoly, cluster_tol: f64) -> Result<RootSet> {
    let bits = p.bits();
    let n = p
        .degree()
        .ok_or_else(|| Error::Domain("roots of the zero polynomial".into()))?;
    if n == 0 {
        return Err(Error::Domain("roots of a constant polynomial".into()));
    }
    let mut zero_mult = 0;
    while p.coeffs[zero_mult].is_zero() {
        zero_mult += 1;
    }
    let deflated = ResiduePoly::new(p.coeffs[zero_mult..].to_vec(), bits);
    let mut found: Vec<BigComplex> = Vec::new();
    let mut iterations = 0;
    let m = n - zero_mult;
    if m == 1 {
        found.push(deflated.coeffs[0].neg().div(&deflated.coeffs[1])?);
    } else if m >= 2 {
        let wp = 2 * bits;
        let q = deflated.with_bits(wp).monic()?;
        let qc = q.coeffs();
        let radius = (0..m)
            .map(|i| qc[i].abs_f64().powf(1.0 / (m - i) as f64))
            .fold(0.0, f64::max)
            .max(1e-300);
        let seed = BigComplex::from_f64(0.4, 0.9, wp);
        let r = BigComplex::from_f64(radius, 0.0, wp);
        let mut z: Vec<BigComplex> = Vec::with_capacity(m);
        let mut s = seed.clone();
        for _ in 0..m {
            z.push(s.mul(&r));
            s = s.mul(&seed);
        }
        let scale_coeffs: Vec<f64> = qc.iter().map(|c| c.abs_f64()).collect();
        let noise = 2f64.powi(-(wp as i32) + 8);
        let mut converged = false;
        while iterations < MAX_ROOT_ITERATIONS {
            iterations += 1;
            let mut done = true;
            for k in 0..m {
                let pz = q.eval(&z[k]);
                let az = z[k].abs_f64();
                let bound: f64 = scale_coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * az.powi(i as i32))
                    .sum::<f64>()
                    * noise;
                if pz.abs_f64() <= bound {
                    continue;
                }
                done = false;
                let mut den = BigComplex::one(wp);
                for j in 0..m {
                    if j != k {
                        den = den.mul(&z[k].sub(&z[j]));
                    }
                }
                if den.is_zero() {
                    den = BigComplex::from_f64(noise, noise, wp);
                }
                let step = pz.div(&den)?;
                z[k] = z[k].sub(&step);
            }
            if done {
                converged = true;
                break;
            }
        }
        if !converged {
            let worst = z.iter().map(|w| q.eval(w).abs_f64()).fold(0.0, f64::max);
            // tolerate slow linear convergence towards multiple roots
            if worst > cluster_tol.powi(2) * q.norm().max(1.0) {
                return Err(Error::NonConvergence {
                    iterations,
                    residual: worst,
                });
            }
        }
        found.extend(z.into_iter().map(|w| w.with_bits(bits)));
    }
    let mut clusters = cluster(&found, cluster_tol);
    if zero_mult > 0 {
        clusters.insert(0, (BigComplex::zero(bits), zero_mult));
    }
    let max_residual = clusters
        .iter()
        .map(|(c, _)| p.eval(c).abs_f64())
        .fold(0.0, f64::max);
    Ok(RootSet {
        roots: clusters,
        max_residual,
        iterations,
    })
}

/// Single-linkage clustering; each cluster is replaced by its mean.
fn cluster(pts: &[BigComplex], tol: f64) -> Vec<(BigComplex, usize)> {
    let n = pts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let nx = p[j];
            p[j] = r;
            j = nx;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let s = 1f64.max(pts[i].abs_f64()).max(pts[j].abs_f64());
            if pts[i].sub(&pts[j]).abs_f64() <= tol * s {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(g, _)| *g == r) {
            Some((_, v)) => v.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    groups
        .into_iter()
        .map(|(_, idx)| {
            let bits = pts[idx[0]].bits();
            let mut s = BigComplex::zero(bits);
            for &i in &idx {
                s = s.add(&pts[i]);
            }
            let mean = s
                .div(&BigComplex::from_i64(idx.len() as i64, bits))
                .expect("nonzero count");
            (mean, idx.len())
        })
        .collect()
}

/// `a p + b q = g`; `g` is monic (and equal to 1 when coprime).
#[derive(Clone, Debug)]
pub struct ExtGcd {
    pub g: ResiduePoly,
    pub a: ResiduePoly,
    pub b: ResiduePoly,
    /// Largest cofactor coefficient, a condition estimate.
    pub kappa: f64,
}

impl ExtGcd {
    pub fn coprime(&self) -> bool {
        self.g.degree() == Some(0)
    }
}

/// Extended Euclid; remainder coefficients at most `tol` times the dividend
/// norm are treated as zero.
pub fn ext_gcd(p: &ResiduePoly, q: &ResiduePoly, tol: f64) -> Result<ExtGcd> {
    let bits = p.bits().max(q.bits());
    if p.is_zero() && q.is_zero() {
        return Err(Error::SingularElimination(
            "gcd of two zero polynomials".into(),
        ));
    }
    let (mut r0, mut r1) = (p.clone(), q.clone());
    let (mut s0, mut s1) = (ResiduePoly::one(bits), ResiduePoly::zero(bits));
    let (mut t0, mut t1) = (ResiduePoly::zero(bits), ResiduePoly::one(bits));
    let scale = p.norm().max(q.norm()).max(1.0);
    r1 = r1.trim_eps(tol * scale);
    while !r1.is_zero() {
        let (quo, rem) = r0.divmod(&r1)?;
        let rem = rem.trim_eps(tol * scale.max(r0.norm()));
        let s2 = s0.sub(&quo.mul(&s1));
        let t2 = t0.sub(&quo.mul(&t1));
        r0 = std::mem::replace(&mut r1, rem);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let lc = r0
        .leading()
        .cloned()
        .ok_or_else(|| Error::SingularElimination("vanishing gcd".into()))?;
    let inv = lc.inv()?;
    let (g, a, b) = if r0.degree() == Some(0) {
        (ResiduePoly::one(bits), s0.scale(&inv), t0.scale(&inv))
    } else {
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    };
    let kappa = a.norm().max(b.norm()).max(1.0);
    Ok(ExtGcd { g, a, b, kappa })
}

/// `T(w) = alpha_eff^(-1) w + a0 (alpha_eff^(-1) - 1)`.
#[derive(Clone, Debug)]
pub struct TMap {
    pub alpha_eff: BigComplex,
    pub a0: BigComplex,
    /// `alpha_eff = 1`, decided exactly when the multiplier is rational.
    pub identity: bool,
}

impl TMap {
    pub fn new(alpha_eff: BigComplex, a0: BigComplex) -> Self {
        let bits = alpha_eff.bits();
        let identity = alpha_eff
            .sub(&BigComplex::one(bits))
            .below_pow2(-((bits / 4) as i32));
        TMap {
            alpha_eff,
            a0,
            identity,
        }
    }

    pub fn with_identity(mut self, identity: bool) -> Self {
        self.identity = identity;
        self
    }

    /// `alpha_eff^(-n)`.
    pub fn factor(&self, n: i64) -> BigComplex {
        if self.identity {
            return BigComplex::one(self.alpha_eff.bits());
        }
        self.alpha_eff.powi(-n).expect("alpha nonzero")
    }

    /// `T^n(w)`.
    pub fn apply(&self, w: &BigComplex, n: i64) -> BigComplex {
        let f = self.factor(n);
        f.mul(w)
            .add(&self.a0.mul(&f.sub(&BigComplex::one(w.bits()))))
    }
}

/// How `phi` acts on residue polynomials.
#[derive(Clone, Debug)]
pub enum ResidueTwist {
    /// `t -> alpha^(-n) t + a0 (alpha^(-n) - 1)`, coefficients fixed.
    Affine(TMap),
    /// Complex conjugation of the coefficients, `t` fixed (period 2).
    Conjugation,
}

/// Residue of `phi^n(p)`.
pub fn twist_residue(p: &ResiduePoly, n: i64, twist: &ResidueTwist) -> ResiduePoly {
    if n == 0 {
        return p.clone();
    }
    match twist {
        ResidueTwist::Affine(tm) => {
            if tm.identity {
                return p.clone();
            }
            let f = tm.factor(n);
            let b = tm.a0.mul(&f.sub(&BigComplex::one(p.bits())));
            p.compose_affine(&f, &b)
        }
        ResidueTwist::Conjugation => {
            if n.rem_euclid(2) == 1 {
                p.conj()
            } else {
                p.clone()
            }
        }
    }
}

/// Smallest `n >= n_min` with `T^n(c1) = c` (to `tol`), if any.
pub fn orbit_exponent(
    c: &BigComplex,
    c1: &BigComplex,
    tm: &TMap,
    n_min: i64,
    tol: f64,
) -> Option<i64> {
    let scale = 1f64.max(c.abs_f64()).max(c1.abs_f64()).max(tm.a0.abs_f64());
    let close = |u: &BigComplex, v: &BigComplex| u.sub(v).abs_f64() <= tol * scale;
    let base = c1.add(&tm.a0);
    if tm.identity || base.abs_f64() <= tol * scale {
        // fixed point: the orbit is {c1}
        return close(c, c1).then_some(n_min);
    }
    let target = c.add(&tm.a0);
    if target.abs_f64() <= tol * scale {
        return None;
    }
    let ratio = target.div(&base).ok()?;
    let la = tm.alpha_eff.abs_f64().ln();
    if la.abs() < 1e-12 {
        // |alpha_eff| = 1: no monotone log, enumerate a bounded window
        return (n_min..n_min + 64).find(|&n| close(&tm.apply(c1, n), c));
    }
    let ln_ratio = ratio.ln().ok()?;
    let nf = -ln_ratio.re_f64() / la;
    let n = nf.round();
    if (nf - n).abs() > 0.25 || n < n_min as f64 || n > 1e9 {
        return None;
    }
    let n = n as i64;
    let image = tm.apply(c1, n);
    let s2 = scale.max(image.abs_f64());
    (image.sub(c).abs_f64() <= tol * s2 * (1.0 + n as f64)).then_some(n)
}

/// Roots split into the forward orbit of `c1` under `T` and the rest.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    pub base_root: BigComplex,
    /// `(root, multiplicity, n)` with `root = T^n(c1)`.
    pub members: Vec<(BigComplex, usize, i64)>,
    pub outsiders: Vec<(BigComplex, usize)>,
    pub j: usize,
}

impl OrbitPartition {
    pub fn member_poly(&self, bits: usize) -> ResiduePoly {
        ResiduePoly::from_roots(
            &self
                .members
                .iter()
                .map(|(c, m, _)| (c.clone(), *m))
                .collect::<Vec<_>>(),
            bits,
        )
    }

    pub fn outsider_poly(&self, bits: usize) -> ResiduePoly {
        ResiduePoly::from_roots(&self.outsiders, bits)
    }
}

pub fn orbit_partition(rts: &RootSet, c1: &BigComplex, tm: &TMap, tol: f64) -> OrbitPartition {
    let mut members = Vec::new();
    let mut outsiders = Vec::new();
    for (c, m) in &rts.roots {
        match orbit_exponent(c, c1, tm, 0, tol) {
            Some(n) => members.push((c.clone(), *m, n)),
            None => outsiders.push((c.clone(), *m)),
        }
    }
    let j = members.iter().map(|(_, m, _)| m).sum();
    OrbitPartition {
        base_root: c1.clone(),
        members,
        outsiders,
        j,
    }
}

#[derive(Clone, Debug)]
pub enum TwistCheck {
    CoprimeForAllN,
    /// The residue of `g` and the `n`-th twist of the residue of `h` share a
    /// root; `witness` is that twisted residue.
    FailsAt {
        n: u64,
        witness: ResiduePoly,
    },
}

impl TwistCheck {
    pub fn passes(&self) -> bool {
        matches!(self, TwistCheck::CoprimeForAllN)
    }
}

/// Decides whether `g` and `phi^n(h)` have coprime residues for every `n >= 1`.
pub fn twist_coprime_check(
    g: &ResiduePoly,
    h: &ResiduePoly,
    twist: &ResidueTwist,
    tol: f64,
) -> Result<TwistCheck> {
    match twist {
        ResidueTwist::Affine(tm) => {
            if g.degree() == Some(0) || h.degree() == Some(0) {
                return Ok(TwistCheck::CoprimeForAllN);
            }
            let rg = roots(g, tol)?;
            let rh = roots(h, tol)?;
            let orbit_tol = tol.powf(0.75);
            let mut best: Option<i64> = None;
            for (c, _) in &rg.roots {
                for (cp, _) in &rh.roots {
                    // the twisted h vanishes at w exactly when T^n(w) is a root of h
                    if let Some(n) = orbit_exponent(cp, c, tm, 1, orbit_tol) {
                        best = Some(best.map_or(n, |b| b.min(n)));
                    }
                }
            }
            Ok(match best {
                Some(n) => TwistCheck::FailsAt {
                    n: n as u64,
                    witness: twist_residue(h, n, twist),
                },
                None => TwistCheck::CoprimeForAllN,
            })
        }
        ResidueTwist::Conjugation => {
            for n in 1..=2 {
                let th = twist_residue(h, n, twist);
                let e = ext_gcd(g, &th, tol)?;
                if !e.coprime() {
                    return Ok(TwistCheck::FailsAt {
                        n: n as u64,
                        witness: th,
                    });
                }
            }
            Ok(TwistCheck::CoprimeForAllN)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeltaMembership {
    Member(Vec<u32>),
    NonMember,
    Unknown,
}

/// Whether `c = a0 (d / (alpha^(-n_1) + ... + alpha^(-n_d)) - 1)` for some
/// `n_k` in `0..=depth`.
pub fn delta_set_member(
    c: &BigComplex,
    a0: &BigComplex,
    alpha: f64,
    d: usize,
    depth: u32,
) -> DeltaMembership {
    let tol = 1e-12;
    let scale = 1f64.max(c.abs_f64()).max(a0.abs_f64());
    if a0.abs_f64() <= tol * scale {
        return if c.abs_f64() <= tol * scale {
            DeltaMembership::Member(vec![0; d])
        } else {
            DeltaMembership::NonMember
        };
    }
    let den = a0.add(c);
    if den.abs_f64() <= tol * scale {
        return DeltaMembership::NonMember;
    }
    let s = match a0.mul_i64(d as i64).div(&den) {
        Ok(s) => s,
        Err(_) => return DeltaMembership::NonMember,
    };
    let (sr, si) = (s.re_f64(), s.im_f64());
    if si.abs() > tol * sr.abs().max(1.0) || sr <= 0.0 {
        return DeltaMembership::NonMember;
    }
    let gamma = 1.0 / alpha;
    if (gamma - 1.0).abs() < 1e-15 {
        return if (sr - d as f64).abs() <= tol * d as f64 {
            DeltaMembership::Member(vec![0; d])
        } else {
            DeltaMembership::NonMember
        };
    }
    let term = |n: u32| gamma.powi(n as i32);
    let (lo, hi) = (term(0).min(term(depth)), term(0).max(term(depth)));
    if sr > d as f64 * hi * (1.0 + tol) || sr < d as f64 * lo * (1.0 - tol) {
        // beyond what depth-bounded terms can reach; decide whether deeper terms could
        let reachable_beyond = if gamma < 1.0 {
            sr > 0.0 && sr < d as f64 * lo
        } else {
            sr > d as f64 * hi
        };
        return if reachable_beyond {
            DeltaMembership::Unknown
        } else {
            DeltaMembership::NonMember
        };
    }
    let mut chosen = Vec::with_capacity(d);
    let mut hit_depth = false;
    fn dfs(
        rem: f64,
        left: usize,
        n_min: u32,
        depth: u32,
        gamma: f64,
        tol: f64,
        chosen: &mut Vec<u32>,
        hit_depth: &mut bool,
    ) -> bool {
        if left == 0 {
            return rem.abs() <= tol;
        }
        for n in n_min..=depth {
            let t = gamma.powi(n as i32);
            // terms are chosen in nondecreasing n, so every remaining term lies between t and the extreme
            let (tmin, tmax) = if gamma < 1.0 {
                (gamma.powi(depth as i32), t)
            } else {
                (t, gamma.powi(depth as i32))
            };
            if rem < left as f64 * tmin - tol || rem > left as f64 * tmax + tol {
                if gamma < 1.0 && rem < left as f64 * tmin {
                    *hit_depth = true;
                }
                continue;
            }
            chosen.push(n);
            if dfs(rem - t, left - 1, n, depth, gamma, tol, chosen, hit_depth) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    if dfs(
        sr,
        d,
        0,
        depth,
        gamma,
        tol * d as f64,
        &mut chosen,
        &mut hit_depth,
    ) {
        DeltaMembership::Member(chosen)
    } else if hit_depth {
        DeltaMembership::Unknown
    } else {
        DeltaMembership::NonMember
    }
}

/// All values `d / (alpha^(-n_1) + ... + alpha^(-n_d)) - 1` with
/// `n_1 <= ... <= n_d <= depth`.
pub fn gamma_elements(alpha: f64, d: usize, depth: u32) -> Vec<f64> {
    let mut out = Vec::new();
    let mut ns = vec![0u32; d];
    fn rec(pos: usize, start: u32, depth: u32, alpha: f64, ns: &mut Vec<u32>, out: &mut Vec<f64>) {
        if pos == ns.len() {
            let s: f64 = ns.iter().map(|&n| alpha.powi(-(n as i32))).sum();
            out.push(ns.len() as f64 / s - 1.0);
            return;
        }
        for n in start..=depth {
            ns[pos] = n;
            rec(pos + 1, n, depth, alpha, ns, out);
        }
    }
    if d > 0 {
        rec(0, 0, depth, alpha, &mut ns, &mut out);
    }
    out
}
