//! Quartic and quadratic Gauss sums over ℤ[i].
//!
//! g₄(ν,c) = Σ_{d mod c} (d/c)₄ ě(νd/c) with ě(z) = e(z + z̄). Every phase
//! is an exact rational multiple of 2π, so the direct evaluator runs in
//! double-double precision with exact integer argument reduction. The
//! fast evaluator factors the modulus, applies the local prime-power
//! table, and recombines with twisted multiplicativity; prime base
//! values g₄(π), g₂(π) are computed once by direct summation and cached.

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::RwLock;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dd::{sincos_2pi_rational, CDD, DD};
use crate::gaussint::{self, factor, GaussInt};
use crate::quartic::{self, QuarticValue};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum SumError {
    #[error("modulus is not primary")]
    NotPrimary,
    #[error("direct evaluation budget exceeded (norm {norm} > budget {budget})")]
    BudgetExceeded { norm: u64, budget: u64 },
    #[error("argument must be squarefree")]
    NotSquarefree,
    #[error("arguments must be pairwise coprime")]
    NotCoprime,
    #[error("arithmetic error: {0}")]
    Gauss(#[from] gaussint::GaussError),
}

/// ν ∈ λ^{-k}ℤ[i], stored as num·λ^{-lam_den}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Nu {
    pub num: GaussInt,
    pub lam_den: u32,
}

impl Nu {
    pub fn integral(num: GaussInt) -> Nu {
        Nu { num, lam_den: 0 }
    }

    pub fn one() -> Nu {
        Nu::integral(GaussInt::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// ν·z for integral z.
    pub fn mul_gauss(&self, z: &GaussInt) -> Nu {
        Nu { num: &self.num * z, lam_den: self.lam_den }
    }

    /// ν/z when the quotient stays in λ^{-k}ℤ[i].
    pub fn exact_div(&self, z: &GaussInt) -> Option<Nu> {
        Some(Nu { num: self.num.exact_div(z)?, lam_den: self.lam_den })
    }

    /// Valuation at an odd prime π (= valuation of the numerator).
    pub fn valuation(&self, pi: &GaussInt) -> Option<u32> {
        if self.num.is_zero() {
            return None; // +infinity
        }
        let mut v = 0;
        let mut z = self.num.clone();
        while let Some(q) = z.exact_div(pi) {
            z = q;
            v += 1;
        }
        Some(v)
    }
}

impl std::fmt::Display for Nu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.lam_den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "lam^-{}*{}", self.lam_den, self.num)
        }
    }
}

impl FromStr for Nu {
    type Err = gaussint::GaussError;

    /// Accepts `a+bi` or `lam^-K*a+bi` with K ∈ {1, 2}.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix("lam^-") {
            let (k, num) = rest
                .split_once('*')
                .ok_or_else(|| gaussint::GaussError::Parse(s.into()))?;
            let lam_den: u32 =
                k.trim().parse().map_err(|_| gaussint::GaussError::Parse(s.into()))?;
            Ok(Nu { num: num.parse()?, lam_den })
        } else {
            Ok(Nu::integral(t.parse()?))
        }
    }
}

/// A computed sum: high-precision complex value plus an absolute error bound.
#[derive(Debug, Clone, Copy)]
pub struct GaussSumValue {
    pub value: CDD,
    pub err: f64,
}

impl GaussSumValue {
    pub fn exact(value: CDD) -> GaussSumValue {
        GaussSumValue { value, err: 0.0 }
    }

    pub fn to_complex(&self) -> (f64, f64) {
        self.value.to_f64()
    }

    pub fn abs(&self) -> f64 {
        self.value.abs().to_f64()
    }

    pub fn agrees_with(&self, other: &GaussSumValue) -> bool {
        let d = self.value - other.value;
        let tol = self.err + other.err + 1e-20 * (1.0 + self.abs().max(other.abs()));
        d.abs().to_f64() <= tol
    }
}

// ---------------------------------------------------------------------------
// residue systems

/// Fundamental domain for ℤ[i]/(c) from the column HNF of the lattice
/// (c, ic): residues are x + yi with 0 ≤ x < d1, 0 ≤ y < d2.
#[derive(Debug, Clone, Copy)]
pub struct ResidueSystem {
    pub d1: i64,
    pub d2: i64,
    t: i64,
}

impl ResidueSystem {
    pub fn new(c: &GaussInt) -> Option<ResidueSystem> {
        let (a, b) = c.to_i64_pair()?;
        if a == 0 && b == 0 {
            return None;
        }
        let norm = (a as i128) * (a as i128) + (b as i128) * (b as i128);
        if norm > i64::MAX as i128 {
            return None;
        }
        // columns u = (a, b), v = (-b, a); euclid on first row
        let (mut u, mut v) = ((a, b), (-b, a));
        while v.0 != 0 {
            let q = u.0.div_euclid(v.0);
            u = (u.0 - q * v.0, u.1 - q * v.1);
            std::mem::swap(&mut u, &mut v);
        }
        if u.0 < 0 {
            u = (-u.0, -u.1);
        }
        let d2 = v.1.abs();
        let d1 = u.0;
        debug_assert_eq!(d1 as i128 * d2 as i128, norm);
        let t = u.1.rem_euclid(d2);
        Some(ResidueSystem { d1, d2, t })
    }

    pub fn count(&self) -> u64 {
        (self.d1 as u64) * (self.d2 as u64)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (d1, d2) = (self.d1, self.d2);
        (0..d1).flat_map(move |x| (0..d2).map(move |y| (x, y)))
    }

    /// Canonical representative of z in the fundamental domain.
    pub fn reduce(&self, z: (i64, i64)) -> (i64, i64) {
        let x = z.0.rem_euclid(self.d1);
        let k = ((z.0 as i128) - (x as i128)) / (self.d1 as i128);
        let y128 = (z.1 as i128) - k * (self.t as i128);
        let y = y128.rem_euclid(self.d2 as i128) as i64;
        (x, y)
    }

    pub fn index(&self, z: (i64, i64)) -> usize {
        let (x, y) = self.reduce(z);
        (x as usize) * (self.d2 as usize) + (y as usize)
    }
}

/// Table of (d/c)₄ over the residue system of c: -1 encodes zero,
/// otherwise the entry is the exponent k of i^k.
pub fn symbol_table(c: &GaussInt) -> Result<(ResidueSystem, Vec<i8>), SumError> {
    require_primary(c)?;
    let rs = ResidueSystem::new(c).ok_or(SumError::BudgetExceeded {
        norm: u64::MAX,
        budget: u64::MAX,
    })?;
    let mut table = vec![0i8; rs.count() as usize];
    for (x, y) in rs.iter() {
        let v = quartic::quartic_symbol_fast(&GaussInt::new(x, y), c)?;
        let idx = (x as usize) * (rs.d2 as usize) + (y as usize);
        table[idx] = match v {
            QuarticValue::Zero => -1,
            QuarticValue::Root(k) => k as i8,
        };
    }
    Ok((rs, table))
}

fn require_primary(c: &GaussInt) -> Result<(), SumError> {
    if c.is_zero() || !c.is_odd() || !c.is_primary() {
        return Err(SumError::NotPrimary);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// direct evaluation

const PER_TERM_ERR: f64 = 1e-30;

fn direct_sum(nu: &Nu, c: &GaussInt, power: u8, budget: u64) -> Result<GaussSumValue, SumError> {
    require_primary(c)?;
    if c.is_one() {
        return Ok(GaussSumValue::exact(CDD::ONE));
    }
    let norm = c.norm_u64().ok_or(SumError::BudgetExceeded {
        norm: u64::MAX,
        budget,
    })?;
    if norm > budget {
        return Err(SumError::BudgetExceeded { norm, budget });
    }
    let (rs, table) = symbol_table(c)?;
    // ě(νd/c) = e(P/Q) with P = 2·Re(num·(1−i)^k·c̄·d), Q = 2^k·N(c)
    let k = nu.lam_den;
    let mut pre = &nu.num * &c.conj();
    for _ in 0..k {
        pre = &pre * &GaussInt::new(1, -1);
    }
    let (pre_re, pre_im) = pre
        .to_i64_pair()
        .map(|(r, i)| (r as i128, i as i128))
        .ok_or(SumError::BudgetExceeded { norm, budget })?;
    let q_den: i128 = (1i128 << k) * norm as i128;
    let mut acc = CDD::ZERO;
    for (x, y) in rs.iter() {
        let s = table[(x as usize) * (rs.d2 as usize) + (y as usize)];
        if s < 0 {
            continue;
        }
        let p = 2 * (pre_re * x as i128 - pre_im * y as i128);
        let term = sincos_2pi_rational(p, q_den).mul_i_pow((s as u8) * power % 4);
        acc = acc + term;
    }
    let err = (norm as f64) * PER_TERM_ERR * (1.0 + acc.abs().to_f64() / norm as f64);
    Ok(GaussSumValue { value: acc, err })
}

/// g₄(ν,c) by literal summation over a complete residue system mod c.
pub fn gauss4_direct(nu: &Nu, c: &GaussInt, budget: u64) -> Result<GaussSumValue, SumError> {
    direct_sum(nu, c, 1, budget)
}

/// g₂(ν,c) by literal summation.
pub fn gauss2_direct(nu: &Nu, c: &GaussInt, budget: u64) -> Result<GaussSumValue, SumError> {
    direct_sum(nu, c, 2, budget)
}

// ---------------------------------------------------------------------------
// cached prime data and the fast evaluator

#[derive(Debug, Serialize, Deserialize, Clone, Copy)]
struct StoredCdd {
    re_hi: f64,
    re_lo: f64,
    im_hi: f64,
    im_lo: f64,
    err: f64,
}

impl StoredCdd {
    fn pack(v: &GaussSumValue) -> StoredCdd {
        StoredCdd {
            re_hi: v.value.re.hi,
            re_lo: v.value.re.lo,
            im_hi: v.value.im.hi,
            im_lo: v.value.im.lo,
            err: v.err,
        }
    }

    fn unpack(&self) -> GaussSumValue {
        GaussSumValue {
            value: CDD::new(DD::new(self.re_hi, self.re_lo), DD::new(self.im_hi, self.im_lo)),
            err: self.err,
        }
    }
}

/// Shared evaluation context: budget for direct sums plus the cache of
/// prime base values g₄(π), g₂(π). Concurrent reads, synchronized writes.
pub struct GaussSumCtx {
    pub budget: u64,
    g4_cache: RwLock<HashMap<(i64, i64), GaussSumValue>>,
    g2_cache: RwLock<HashMap<(i64, i64), GaussSumValue>>,
}

impl Default for GaussSumCtx {
    fn default() -> Self {
        GaussSumCtx::new(1_000_000)
    }
}

impl GaussSumCtx {
    pub fn new(budget: u64) -> GaussSumCtx {
        GaussSumCtx {
            budget,
            g4_cache: RwLock::new(HashMap::new()),
            g2_cache: RwLock::new(HashMap::new()),
        }
    }

    fn cached(
        &self,
        which: u8,
        pi: &GaussInt,
    ) -> Result<GaussSumValue, SumError> {
        let key = pi.to_i64_pair().ok_or(SumError::BudgetExceeded {
            norm: u64::MAX,
            budget: self.budget,
        })?;
        let cache = if which == 4 { &self.g4_cache } else { &self.g2_cache };
        if let Some(v) = cache.read().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = direct_sum(&Nu::one(), pi, if which == 4 { 1 } else { 2 }, self.budget)?;
        cache.write().unwrap().insert(key, v);
        Ok(v)
    }

    /// g₄(π) for a primary prime π, direct-summed once and cached.
    pub fn g4_prime(&self, pi: &GaussInt) -> Result<GaussSumValue, SumError> {
        self.cached(4, pi)
    }

    /// g₂(π) for a primary prime π.
    pub fn g2_prime(&self, pi: &GaussInt) -> Result<GaussSumValue, SumError> {
        self.cached(2, pi)
    }

    pub fn save(&self, path: &std::path::Path) -> std::io::Result<()> {
        let pack = |m: &HashMap<(i64, i64), GaussSumValue>| -> Vec<((i64, i64), StoredCdd)> {
            let mut v: Vec<_> = m.iter().map(|(k, val)| (*k, StoredCdd::pack(val))).collect();
            v.sort_by_key(|(k, _)| *k);
            v
        };
        let data = (
            pack(&self.g4_cache.read().unwrap()),
            pack(&self.g2_cache.read().unwrap()),
        );
        std::fs::write(path, serde_json::to_vec(&data)?)
    }

    pub fn load(&self, path: &std::path::Path) -> std::io::Result<()> {
        let bytes = std::fs::read(path)?;
        type Packed = Vec<((i64, i64), StoredCdd)>;
        let (g4, g2): (Packed, Packed) = serde_json::from_slice(&bytes)?;
        let mut w4 = self.g4_cache.write().unwrap();
        for (k, v) in g4 {
            w4.insert(k, v.unpack());
        }
        let mut w2 = self.g2_cache.write().unwrap();
        for (k, v) in g2 {
            w2.insert(k, v.unpack());
        }
        Ok(())
    }
}

/// χ_π(-1) = (-1/π)₄ as an i-power.
fn chi_minus_one(pi: &GaussInt) -> Result<QuarticValue, SumError> {
    Ok(quartic::i_symbol(pi)?.pow(2))
}

/// Local value g₄(π^k, π^ℓ) from the seven-case table. The `k = None`
/// case encodes valuation +∞ (numerator zero at this prime).
fn local_g4(
    ctx: &GaussSumCtx,
    pi: &GaussInt,
    k: Option<u32>,
    l: u32,
) -> Result<GaussSumValue, SumError> {
    debug_assert!(l >= 1);
    let n = pi.norm_u64().expect("prime norm fits u64") as i128;
    let finite_k_eq_l_minus_1 = matches!(k, Some(kk) if kk + 1 == l);
    if finite_k_eq_l_minus_1 {
        let kk = k.unwrap();
        let nk = DD::from_i128(n.pow(kk));
        let v = match kk % 4 {
            0 => {
                let g = ctx.g4_prime(pi)?;
                GaussSumValue { value: g.value.scale(nk), err: g.err * nk.to_f64() }
            }
            1 => {
                let g = ctx.g2_prime(pi)?;
                GaussSumValue { value: g.value.scale(nk), err: g.err * nk.to_f64() }
            }
            2 => {
                let g = ctx.g4_prime(pi)?;
                let rot = match chi_minus_one(pi)? {
                    QuarticValue::Root(r) => r,
                    QuarticValue::Zero => unreachable!("unit is coprime to pi"),
                };
                GaussSumValue {
                    value: g.value.conj().scale(nk).mul_i_pow(rot),
                    err: g.err * nk.to_f64(),
                }
            }
            _ => GaussSumValue::exact(CDD::from_f64(-(n.pow(kk) as f64), 0.0)),
        };
        return Ok(v);
    }
    let k_ge_l = k.map_or(true, |kk| kk >= l);
    if k_ge_l && l % 4 == 0 {
        // φ(π^ℓ) = N^{ℓ-1}(N-1)
        let phi = n.pow(l - 1) * (n - 1);
        return Ok(GaussSumValue::exact(CDD::new(DD::from_i128(phi), DD::ZERO)));
    }
    Ok(GaussSumValue::exact(CDD::ZERO))
}

/// g₄(ν,c) via factorization: strip (ν,c)-content per prime, apply the
/// local table, recombine with twisted multiplicativity.
pub fn gauss4_fast(nu: &Nu, c: &GaussInt, ctx: &GaussSumCtx) -> Result<GaussSumValue, SumError> {
    require_primary(c)?;
    if c.is_one() {
        return Ok(GaussSumValue::exact(CDD::ONE));
    }
    let f = factor(c)?;
    debug_assert_eq!(f.lambda_exp, 0);
    // cross factors from Lemma 4.1(ii), as an exact i-power
    let mut rot: u8 = 0;
    for i in 0..f.factors.len() {
        for j in (i + 1)..f.factors.len() {
            let (pi, li) = &f.factors[i];
            let (pj, lj) = &f.factors[j];
            let sij = match quartic::quartic_symbol_fast(pj, pi)? {
                QuarticValue::Root(r) => r,
                QuarticValue::Zero => unreachable!("distinct primes are coprime"),
            };
            let sji = match quartic::quartic_symbol_fast(pi, pj)? {
                QuarticValue::Root(r) => r,
                QuarticValue::Zero => unreachable!("distinct primes are coprime"),
            };
            rot = (rot + (sij as u32 * li * lj + sji as u32 * li * lj) as u8 % 4) % 4;
        }
    }
    let mut acc = GaussSumValue::exact(CDD::ONE);
    for (pi, l) in &f.factors {
        let kv = nu.valuation(pi);
        let local = match kv {
            None => local_g4(ctx, pi, None, *l)?,
            Some(k) => {
                let delta = if k == 0 {
                    nu.clone()
                } else {
                    nu.exact_div(&pi.pow(k)).expect("valuation divides")
                };
                let base = local_g4(ctx, pi, Some(k), *l)?;
                // g₄(δπ^k, π^ℓ) = χ̄_{π^ℓ}(δ)·g₄(π^k, π^ℓ)
                let chi = quartic::quartic_symbol_lambda_den(&delta.num, delta.lam_den, pi)?
                    .pow(-(*l as i64));
                match chi {
                    QuarticValue::Zero => unreachable!("delta coprime to pi"),
                    QuarticValue::Root(r) => GaussSumValue {
                        value: base.value.mul_i_pow(r),
                        err: base.err,
                    },
                }
            }
        };
        let new_err =
            acc.err * local.abs() + local.err * acc.abs() + acc.err * local.err;
        acc = GaussSumValue { value: acc.value * local.value, err: new_err };
        if acc.abs() == 0.0 && acc.err == 0.0 {
            return Ok(GaussSumValue::exact(CDD::ZERO));
        }
    }
    Ok(GaussSumValue { value: acc.value.mul_i_pow(rot), err: acc.err })
}

/// g₂(ν,c) for squarefree primary c via primes and twisted
/// multiplicativity; falls back to direct summation otherwise.
pub fn gauss2_fast(nu: &Nu, c: &GaussInt, ctx: &GaussSumCtx) -> Result<GaussSumValue, SumError> {
    require_primary(c)?;
    if c.is_one() {
        return Ok(GaussSumValue::exact(CDD::ONE));
    }
    let f = factor(c)?;
    if !f.is_squarefree() {
        return gauss2_direct(nu, c, ctx.budget);
    }
    let mut rot: u8 = 0;
    for i in 0..f.factors.len() {
        for j in (i + 1)..f.factors.len() {
            let (pi, _) = &f.factors[i];
            let (pj, _) = &f.factors[j];
            let sij = quartic::quartic_symbol_fast(pj, pi)?.pow(2);
            let sji = quartic::quartic_symbol_fast(pi, pj)?.pow(2);
            if let (QuarticValue::Root(a), QuarticValue::Root(b)) = (sij, sji) {
                rot = (rot + a + b) % 4;
            }
        }
    }
    let mut acc = GaussSumValue::exact(CDD::ONE);
    for (pi, _) in &f.factors {
        let k = nu.valuation(pi).unwrap_or(1);
        let local = if k == 0 {
            // g₂(δ, π) = χ̄²_π(δ)·g₂(π)
            let chi = quartic::quartic_symbol_lambda_den(&nu.num, nu.lam_den, pi)?.pow(-2);
            let base = ctx.g2_prime(pi)?;
            match chi {
                QuarticValue::Zero => unreachable!("k = 0 means coprime"),
                QuarticValue::Root(r) => GaussSumValue {
                    value: base.value.mul_i_pow(r),
                    err: base.err,
                },
            }
        } else {
            // g₂(π^k δ, π) = Σ (d/π)₂ = 0 for k ≥ 1 on a prime modulus... except
            // the full sum of a nontrivial quadratic character vanishes.
            GaussSumValue::exact(CDD::ZERO)
        };
        let new_err = acc.err * local.abs() + local.err * acc.abs() + acc.err * local.err;
        acc = GaussSumValue { value: acc.value * local.value, err: new_err };
    }
    Ok(GaussSumValue { value: acc.value.mul_i_pow(rot), err: acc.err })
}

/// Normalized sum g̃₄(ν,c) = g₄(ν,c)/√N(c).
pub fn gauss4_tilde(nu: &Nu, c: &GaussInt, ctx: &GaussSumCtx) -> Result<GaussSumValue, SumError> {
    let g = gauss4_fast(nu, c, ctx)?;
    let root = DD::from_i128(c.norm().to_i128().expect("norm fits")).sqrt();
    Ok(GaussSumValue {
        value: g.value * CDD::new(DD::ONE / root, DD::ZERO),
        err: g.err / root.to_f64() + 1e-30,
    })
}

pub fn gauss2_tilde(nu: &Nu, c: &GaussInt, ctx: &GaussSumCtx) -> Result<GaussSumValue, SumError> {
    let g = gauss2_fast(nu, c, ctx)?;
    let root = DD::from_i128(c.norm().to_i128().expect("norm fits")).sqrt();
    Ok(GaussSumValue {
        value: g.value * CDD::new(DD::ONE / root, DD::ZERO),
        err: g.err / root.to_f64() + 1e-30,
    })
}

/// Checks the scaling identity g₄(νμ,c) = χ̄_c(ν)·g₄(μ,c) within error
/// bounds, both sides by direct summation. ν must be integral and
/// coprime to c.
pub fn gauss4_scaling(
    nu: &GaussInt,
    mu: &Nu,
    c: &GaussInt,
    budget: u64,
) -> Result<bool, SumError> {
    let lhs = gauss4_direct(&mu.mul_gauss(nu), c, budget)?;
    let rhs = gauss4_direct(mu, c, budget)?;
    let chi = quartic::quartic_symbol_fast(nu, c)?.conj();
    let rhs_rot = match chi {
        QuarticValue::Zero => return Err(SumError::NotCoprime),
        QuarticValue::Root(r) => GaussSumValue {
            value: rhs.value.mul_i_pow(r),
            err: rhs.err,
        },
    };
    Ok(lhs.agrees_with(&rhs_rot))
}

// ---------------------------------------------------------------------------
// finite Fourier transforms of quartic characters

/// h̃₄(μ, χ_c) for c = c₁c₂²c₃³ by the defining sum over x mod c₁c₂c₃.
pub fn h4_tilde_direct(
    mu: &Nu,
    c1: &GaussInt,
    c2: &GaussInt,
    c3: &GaussInt,
    budget: u64,
) -> Result<GaussSumValue, SumError> {
    for c in [c1, c2, c3] {
        require_primary(c)?;
    }
    let modulus = &(c1 * c2) * c3;
    let norm = modulus.norm_u64().ok_or(SumError::BudgetExceeded {
        norm: u64::MAX,
        budget,
    })?;
    if norm > budget {
        return Err(SumError::BudgetExceeded { norm, budget });
    }
    if modulus.is_one() {
        return Ok(GaussSumValue::exact(CDD::ONE));
    }
    let rs = ResidueSystem::new(&modulus).ok_or(SumError::BudgetExceeded { norm, budget })?;
    let k = mu.lam_den;
    let mut pre = &mu.num * &modulus.conj();
    for _ in 0..k {
        pre = &pre * &GaussInt::new(1, -1);
    }
    let (pre_re, pre_im) = pre
        .to_i64_pair()
        .map(|(r, i)| (r as i128, i as i128))
        .ok_or(SumError::BudgetExceeded { norm, budget })?;
    let q_den: i128 = (1i128 << k) * norm as i128;
    let mut acc = CDD::ZERO;
    for (x, y) in rs.iter() {
        let d = GaussInt::new(x, y);
        let s1 = quartic::quartic_symbol_fast(&d, c1)?;
        let s2 = quartic::quartic_symbol_fast(&d, c2)?.pow(2);
        let s3 = quartic::quartic_symbol_fast(&d, c3)?.conj();
        let s = s1.mul(s2).mul(s3);
        let QuarticValue::Root(rot) = s else { continue };
        let p = 2 * (pre_re * x as i128 - pre_im * y as i128);
        acc = acc + sincos_2pi_rational(p, q_den).mul_i_pow(rot);
    }
    let root = DD::from_i128(norm as i128).sqrt();
    Ok(GaussSumValue {
        value: acc * CDD::new(DD::ONE / root, DD::ZERO),
        err: (norm as f64) * PER_TERM_ERR / root.to_f64() + 1e-28,
    })
}

/// h̃₄(μ, χ_c) by the factored product formula (pairwise coprime case,
/// with c₁c₂ squarefree):
/// χ_{c₁}(c₂c₃)·χ²_{c₂}(c₁c₃)·χ̄_{c₃}(c₁c₂)·χ_{c₃}(−1)·g̃₄(μ,c₁)·g̃₂(μ,c₂)·conj(g̃₄(μ,c₃)).
///
/// The χ_{c₃}(−1) factor comes from turning Σ χ̄_{c₃}(u)ě(μu/c₃) into a
/// conjugated Gauss sum via u ↦ −u; it matches the defining sum exactly
/// (see the product-vs-direct test).
pub fn h4_tilde(
    mu: &Nu,
    c1: &GaussInt,
    c2: &GaussInt,
    c3: &GaussInt,
    ctx: &GaussSumCtx,
) -> Result<GaussSumValue, SumError> {
    for c in [c1, c2, c3] {
        require_primary(c)?;
    }
    if !gaussint::is_squarefree(&(c1 * c2))? {
        return Err(SumError::NotSquarefree);
    }
    if !gaussint::coprime(c1, c2) || !gaussint::coprime(c1, c3) || !gaussint::coprime(c2, c3) {
        return Err(SumError::NotCoprime);
    }
    let chi1 = quartic::quartic_symbol_fast(&(c2 * c3), c1)?;
    let chi2 = quartic::quartic_symbol_fast(&(c1 * c3), c2)?.pow(2);
    let chi3 = quartic::quartic_symbol_fast(&(c1 * c2), c3)?.conj();
    let chi3_m1 = quartic::quartic_symbol_fast(&GaussInt::new(-1, 0), c3)?;
    let front = chi1.mul(chi2).mul(chi3).mul(chi3_m1);
    let QuarticValue::Root(rot) = front else {
        return Ok(GaussSumValue::exact(CDD::ZERO));
    };
    let g1 = gauss4_tilde(mu, c1, ctx)?;
    let g2 = gauss2_tilde(mu, c2, ctx)?;
    let g3 = gauss4_tilde(mu, c3, ctx)?;
    let a1 = g1.abs();
    let a2 = g2.abs();
    let a3 = g3.abs();
    let value = (g1.value * g2.value * g3.value.conj()).mul_i_pow(rot);
    let err = g1.err * a2 * a3 + g2.err * a1 * a3 + g3.err * a1 * a2 + 1e-28;
    Ok(GaussSumValue { value, err })
}
