//! Exact arithmetic in ℤ[i].
//!
//! Elements carry arbitrary-precision components. The ramified prime is
//! λ = 1+i; an odd element is *primary* when it is ≡ 1 (mod λ³), and every
//! odd nonzero element has exactly one primary associate. Factorizations
//! are normalized as unit · λ^k · ∏ πᵉ over primary primes π, ordered by
//! (norm, re, im) so serialized output is stable.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum GaussError {
    #[error("zero argument")]
    Zero,
    #[error("argument has even norm (divisible by lambda)")]
    NormEven,
    #[error("argument is not primary")]
    NotPrimary,
    #[error("cannot parse Gaussian integer from {0:?}")]
    Parse(String),
}

/// A unit of ℤ[i], represented as a power of i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Unit(u8);

impl Unit {
    pub const ONE: Unit = Unit(0);
    pub const I: Unit = Unit(1);
    pub const MINUS_ONE: Unit = Unit(2);
    pub const MINUS_I: Unit = Unit(3);

    pub fn from_i_power(k: i64) -> Unit {
        Unit(k.rem_euclid(4) as u8)
    }

    pub fn i_power(self) -> u8 {
        self.0
    }

    pub fn mul(self, other: Unit) -> Unit {
        Unit((self.0 + other.0) % 4)
    }

    pub fn inverse(self) -> Unit {
        Unit((4 - self.0) % 4)
    }

    pub fn to_gauss(self) -> GaussInt {
        match self.0 {
            0 => GaussInt::one(),
            1 => GaussInt::i(),
            2 => -GaussInt::one(),
            _ => -GaussInt::i(),
        }
    }
}

/// A Gaussian integer a + bi with arbitrary-precision components.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new<R: Into<BigInt>, S: Into<BigInt>>(re: R, im: S) -> Self {
        GaussInt { re: re.into(), im: im.into() }
    }

    pub fn zero() -> Self {
        GaussInt::new(0, 0)
    }

    pub fn one() -> Self {
        GaussInt::new(1, 0)
    }

    pub fn i() -> Self {
        GaussInt::new(0, 1)
    }

    /// The ramified prime λ = 1 + i.
    pub fn lambda() -> Self {
        GaussInt::new(1, 1)
    }

    pub fn lambda_pow(k: u32) -> Self {
        GaussInt::lambda().pow(k)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn as_unit(&self) -> Option<Unit> {
        if !self.is_unit() {
            return None;
        }
        Some(if self.re.is_one() {
            Unit::ONE
        } else if self.im.is_one() {
            Unit::I
        } else if self.im.is_zero() {
            Unit::MINUS_ONE
        } else {
            Unit::MINUS_I
        })
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn norm_biguint(&self) -> BigUint {
        self.norm().to_biguint().expect("norm is nonnegative")
    }

    pub fn norm_u64(&self) -> Option<u64> {
        self.norm().to_u64()
    }

    pub fn conj(&self) -> GaussInt {
        GaussInt { re: self.re.clone(), im: -&self.im }
    }

    pub fn mul_i_pow(&self, k: u8) -> GaussInt {
        match k % 4 {
            0 => self.clone(),
            1 => GaussInt { re: -&self.im, im: self.re.clone() },
            2 => -self.clone(),
            _ => GaussInt { re: self.im.clone(), im: -&self.re },
        }
    }

    pub fn mul_unit(&self, u: Unit) -> GaussInt {
        self.mul_i_pow(u.i_power())
    }

    pub fn pow(&self, mut e: u32) -> GaussInt {
        let mut base = self.clone();
        let mut acc = GaussInt::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &GaussInt) -> Option<GaussInt> {
        if d.is_zero() {
            return None;
        }
        let n = d.norm();
        let num = self * &d.conj();
        let (qr, rr) = num.re.div_rem(&n);
        let (qi, ri) = num.im.div_rem(&n);
        if rr.is_zero() && ri.is_zero() {
            Some(GaussInt { re: qr, im: qi })
        } else {
            None
        }
    }

    pub fn divides(&self, other: &GaussInt) -> bool {
        other.exact_div(self).is_some()
    }

    /// Quotient and remainder with components rounded to nearest, so the
    /// remainder satisfies N(r) ≤ N(d)/2.
    pub fn div_rem_nearest(&self, d: &GaussInt) -> (GaussInt, GaussInt) {
        assert!(!d.is_zero(), "division by zero");
        let n = d.norm();
        let num = self * &d.conj();
        let q = GaussInt { re: round_div(&num.re, &n), im: round_div(&num.im, &n) };
        let r = self - &(&q * d);
        (q, r)
    }

    pub fn mod_nearest(&self, d: &GaussInt) -> GaussInt {
        self.div_rem_nearest(d).1
    }

    /// True when the element is odd, i.e. coprime to λ.
    pub fn is_odd(&self) -> bool {
        // N(a+bi) is odd iff a+b is odd.
        (&self.re + &self.im).is_odd()
    }

    /// Tests z ≡ 1 (mod λ³) by exact division of z − 1 by λ³ = −2+2i.
    pub fn is_primary(&self) -> bool {
        let d = self - &GaussInt::one();
        if d.is_zero() {
            return true;
        }
        d.exact_div(&GaussInt::new(-2, 2)).is_some()
    }

    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        Some((self.re.to_i64()?, self.im.to_i64()?))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().expect("BigInt -> f64"),
            self.im.to_f64().expect("BigInt -> f64"),
        )
    }

    /// Complex argument of the element as an f64.
    pub fn arg(&self) -> f64 {
        let (re, im) = self.to_f64_pair();
        im.atan2(re)
    }
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    // round-half-away-from-zero; any nearest rounding keeps N(r) <= N(b)/2
    let two = BigInt::from(2);
    let (mut q, r) = a.div_rem(b);
    if &r.abs() * &two >= b.abs() {
        if (a.sign() == b.sign() && !r.is_zero()) || r.is_zero() {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

impl Add for &GaussInt {
    type Output = GaussInt;
    fn add(self, rhs: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &GaussInt {
    type Output = GaussInt;
    fn sub(self, rhs: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &GaussInt {
    type Output = GaussInt;
    fn mul(self, rhs: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt { re: -&self.re, im: -&self.im }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussInt {
            type Output = GaussInt;
            fn $method(self, rhs: GaussInt) -> GaussInt {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&GaussInt> for GaussInt {
            type Output = GaussInt;
            fn $method(self, rhs: &GaussInt) -> GaussInt {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if !self.re.is_zero() {
            write!(f, "{}", self.re)?;
            if !self.im.is_negative() {
                write!(f, "+")?;
            }
        }
        if self.im.is_one() {
            write!(f, "i")
        } else if self.im == BigInt::from(-1) {
            write!(f, "-i")
        } else {
            write!(f, "{}i", self.im)
        }
    }
}

impl FromStr for GaussInt {
    type Err = GaussError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_gauss(s).ok_or_else(|| GaussError::Parse(s.to_string()))
    }
}

fn parse_gauss(s: &str) -> Option<GaussInt> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    // split into at most two signed terms
    let bytes = t.as_bytes();
    let mut split = None;
    for (k, &b) in bytes.iter().enumerate().skip(1) {
        if (b == b'+' || b == b'-') && bytes[k - 1] != b'+' && bytes[k - 1] != b'-' {
            split = Some(k);
        }
    }
    let (first, second) = match split {
        Some(k) => (&t[..k], Some(&t[k..])),
        None => (&t[..], None),
    };
    let parse_term = |term: &str| -> Option<(BigInt, bool)> {
        // returns (coefficient, is_imaginary)
        if let Some(num) = term.strip_suffix(['i', 'I']) {
            let coeff = match num {
                "" | "+" => BigInt::one(),
                "-" => -BigInt::one(),
                _ => BigInt::from_str(num).ok()?,
            };
            Some((coeff, true))
        } else {
            Some((BigInt::from_str(term).ok()?, false))
        }
    };
    let (c1, im1) = parse_term(first)?;
    let mut re = BigInt::zero();
    let mut im = BigInt::zero();
    if im1 {
        im = c1;
    } else {
        re = c1;
    }
    if let Some(sec) = second {
        let (c2, im2) = parse_term(sec)?;
        if im2 == im1 {
            return None;
        }
        if im2 {
            im = c2;
        } else {
            re = c2;
        }
    }
    Some(GaussInt { re, im })
}

/// unit · λ^k · ∏ πᵉ over primary primes π, pairwise non-associate,
/// ordered by (norm, re, im).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Unit,
    pub lambda_exp: u32,
    pub factors: Vec<(GaussInt, u32)>,
}

impl Factorization {
    pub fn reassemble(&self) -> GaussInt {
        let mut z = self.unit.to_gauss();
        z = &z * &GaussInt::lambda_pow(self.lambda_exp);
        for (p, e) in &self.factors {
            z = &z * &p.pow(*e);
        }
        z
    }

    pub fn is_squarefree(&self) -> bool {
        self.lambda_exp <= 1 && self.factors.iter().all(|(_, e)| *e <= 1)
    }

    /// Number of distinct prime ideals dividing the element (λ included).
    pub fn num_primes(&self) -> usize {
        self.factors.len() + usize::from(self.lambda_exp > 0)
    }
}

/// Splits an odd nonzero z as (unit, primary) with z = unit · primary.
pub fn primary_associate(z: &GaussInt) -> Result<(Unit, GaussInt), GaussError> {
    if z.is_zero() {
        return Err(GaussError::Zero);
    }
    if !z.is_odd() {
        return Err(GaussError::NormEven);
    }
    for k in 0u8..4 {
        let assoc = z.mul_i_pow(k);
        if assoc.is_primary() {
            // z = i^{-k} * assoc
            return Ok((Unit::from_i_power(-(k as i64)), assoc));
        }
    }
    unreachable!("every odd element has a primary associate")
}

/// λ-adic valuation: z = λ^k · w with w odd. Returns (k, w).
pub fn lambda_valuation(z: &GaussInt) -> (u32, GaussInt) {
    assert!(!z.is_zero());
    let lam = GaussInt::lambda();
    let mut k = 0u32;
    let mut w = z.clone();
    while !w.is_odd() {
        w = w.exact_div(&lam).expect("even element divisible by lambda");
        k += 1;
    }
    (k, w)
}

// ---------------------------------------------------------------------------
// rational factorization support

const SMALL_PRIME_LIMIT: u64 = 1_000_000;

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    // deterministic witness set for all n < 3.3e24
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard–Brent rho with deterministic seeding.
fn rho_factor(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime_u64(n));
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let f = |v: u64| (mulmod(v, v, n) + c) % n;
        let mut count = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
            count += 1;
            if count > 1 << 24 {
                break;
            }
        }
        if d != n && d != 1 {
            return d;
        }
        c += 1;
    }
}

/// Factors a u64 into (prime, exponent) pairs, ascending. Trial division
/// below 10^6, then Pollard–Brent rho.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, e: u32, out: &mut Vec<(u64, u32)>| {
        if let Some(last) = out.iter_mut().find(|(q, _)| *q == p) {
            last.1 += e;
        } else {
            out.push((p, e));
        }
    };
    for p in [2u64, 3, 5] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            push(p, e, &mut out);
        }
    }
    let mut d = 7u64;
    let wheel = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut wi = 0;
    while d * d <= n && d < SMALL_PRIME_LIMIT {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            push(d, e, &mut out);
        }
        d += wheel[wi];
        wi = (wi + 1) % 8;
    }
    // remaining cofactor: prime, prime power, or composite for rho
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            push(m, 1, &mut out);
        } else {
            let d = rho_factor(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    out.sort_unstable();
    out
}

/// Computes x with x² ≡ −1 (mod p) for p ≡ 1 (mod 4), by raising a
/// quadratic non-residue to the power (p−1)/4.
pub fn sqrt_minus_one_mod(p: u64) -> u64 {
    debug_assert!(p % 4 == 1);
    let mut a = 2u64;
    loop {
        let x = powmod(a, (p - 1) / 4, p);
        if mulmod(x, x, p) == p - 1 {
            return x;
        }
        a += 1;
    }
}

// ---------------------------------------------------------------------------

/// Factors z over ℤ[i].
pub fn factor(z: &GaussInt) -> Result<Factorization, GaussError> {
    if z.is_zero() {
        return Err(GaussError::Zero);
    }
    let (lambda_exp, odd) = lambda_valuation(z);
    let mut unit;
    let mut factors: Vec<(GaussInt, u32)> = Vec::new();
    if odd.is_unit() {
        unit = odd.as_unit().unwrap();
    } else {
        let (u0, mut c) = primary_associate(&odd)?;
        unit = u0;
        let norm = c
            .norm_u64()
            .ok_or(GaussError::Parse("norm exceeds u64 in factor()".into()))?;
        for (p, e) in factor_u64(norm) {
            debug_assert!(p % 2 == 1);
            if p % 4 == 3 {
                // inert; norm exponent is even and -p is the primary associate
                debug_assert!(e % 2 == 0);
                let prime = GaussInt::new(-(p as i64), 0);
                for _ in 0..e / 2 {
                    c = c.exact_div(&prime).expect("inert prime divides");
                }
                factors.push((prime, e / 2));
            } else {
                let x = sqrt_minus_one_mod(p);
                let pi = gcd(&GaussInt::new(p as i64, 0), &GaussInt::new(x as i64, 1));
                let (_, pi) = primary_associate(&pi)?;
                let (_, pi_bar) = primary_associate(&pi.conj())?;
                for prime in [pi, pi_bar] {
                    let mut v = 0u32;
                    while let Some(q) = c.exact_div(&prime) {
                        c = q;
                        v += 1;
                    }
                    if v > 0 {
                        factors.push((prime, v));
                    }
                }
            }
        }
        // leftover is the unit mismatch between c and the primary primes
        debug_assert!(c.is_unit());
        unit = unit.mul(c.as_unit().expect("leftover cofactor is a unit"));
    }
    factors.sort_by(|(a, _), (b, _)| cmp_gauss(a, b));
    let f = Factorization { unit, lambda_exp, factors };
    debug_assert_eq!(&f.reassemble(), z);
    Ok(f)
}

fn cmp_gauss(a: &GaussInt, b: &GaussInt) -> Ordering {
    a.norm()
        .cmp(&b.norm())
        .then_with(|| a.re.cmp(&b.re))
        .then_with(|| a.im.cmp(&b.im))
}

/// Möbius function on ℤ[i] (λ counts as a prime).
pub fn moebius(z: &GaussInt) -> Result<i32, GaussError> {
    let f = factor(z)?;
    if !f.is_squarefree() {
        return Ok(0);
    }
    Ok(if f.num_primes() % 2 == 0 { 1 } else { -1 })
}

/// Euler function φ(z) = #(ℤ[i]/z)^×.
pub fn euler_phi(z: &GaussInt) -> Result<BigUint, GaussError> {
    let f = factor(z)?;
    let mut phi = BigUint::one();
    if f.lambda_exp > 0 {
        phi *= BigUint::one() << (f.lambda_exp - 1);
    }
    for (p, e) in &f.factors {
        let n = p.norm_biguint();
        phi *= n.pow(e - 1) * (n.clone() - BigUint::one());
    }
    Ok(phi)
}

/// rad(z) = λ^{1 if λ|z} · ∏_{π | z} π over primary primes.
pub fn radical(z: &GaussInt) -> Result<GaussInt, GaussError> {
    let f = factor(z)?;
    let mut r = if f.lambda_exp > 0 { GaussInt::lambda() } else { GaussInt::one() };
    for (p, _) in &f.factors {
        r = &r * p;
    }
    Ok(r)
}

pub fn is_squarefree(z: &GaussInt) -> Result<bool, GaussError> {
    Ok(factor(z)?.is_squarefree())
}

/// Euclidean gcd, primary-normalized when odd, λ^k · primary otherwise.
pub fn gcd(a: &GaussInt, b: &GaussInt) -> GaussInt {
    if a.is_zero() && b.is_zero() {
        return GaussInt::zero();
    }
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let r = x.mod_nearest(&y);
        x = y;
        y = r;
    }
    if x.is_zero() {
        return x;
    }
    let (k, odd) = lambda_valuation(&x);
    let (_, primary) = primary_associate(&odd).expect("odd part is odd");
    &GaussInt::lambda_pow(k) * &primary
}

pub fn coprime(a: &GaussInt, b: &GaussInt) -> bool {
    gcd(a, b).is_unit()
}

// ---------------------------------------------------------------------------
// enumeration of primary elements

/// Congruence condition for [`enumerate_primary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimaryModulus {
    /// q ≡ 1 (mod λ³), i.e. every primary element.
    Lambda3,
    /// q ≡ 1 (mod λ⁷), the family condition.
    Lambda7,
}

/// z = a+bi primary ⟺ (a ≡ 1, b ≡ 0) or (a ≡ 3, b ≡ 2) (mod 4).
pub fn is_primary_i64(a: i64, b: i64) -> bool {
    let (ra, rb) = (a.rem_euclid(4), b.rem_euclid(4));
    (ra == 1 && rb == 0) || (ra == 3 && rb == 2)
}

/// q ≡ 1 (mod λ⁷) ⟺ 16 | (a−1−b) and 16 | (a−1+b).
pub fn is_one_mod_lambda7_i64(a: i64, b: i64) -> bool {
    (a - 1 - b).rem_euclid(16) == 0 && (a - 1 + b).rem_euclid(16) == 0
}

/// Yields every primary q with N(q) ≤ bound satisfying the congruence
/// (and squarefreeness when requested), each exactly once, in
/// nondecreasing norm order (ties by (re, im)). Iterates the disk in
/// norm shells so memory stays proportional to the shell size.
pub struct PrimaryEnumerator {
    bound: u64,
    modulus: PrimaryModulus,
    squarefree_only: bool,
    shell_lo: u64,
    shell: Vec<(u64, i64, i64)>,
    pos: usize,
    shell_width: u64,
}

impl PrimaryEnumerator {
    pub fn new(bound: u64, modulus: PrimaryModulus, squarefree_only: bool) -> Self {
        PrimaryEnumerator {
            bound,
            modulus,
            squarefree_only,
            shell_lo: 1,
            shell: Vec::new(),
            pos: 0,
            shell_width: 1 << 16,
        }
    }

    fn fill_shell(&mut self) {
        self.shell.clear();
        self.pos = 0;
        while self.shell.is_empty() && self.shell_lo <= self.bound {
            let lo = self.shell_lo;
            let hi = (lo + self.shell_width - 1).min(self.bound);
            let rmax = (hi as f64).sqrt() as i64 + 2;
            let b_start = if rmax % 2 == 0 { -rmax } else { -rmax - 1 };
            let a_start = if rmax % 2 == 0 { -rmax + 1 } else { -rmax };
            for b in (b_start..=rmax).step_by(2) {
                let b2 = (b * b) as u64;
                if b2 > hi {
                    continue;
                }
                for a in (a_start..=rmax).step_by(2) {
                    let n = (a * a) as u64 + b2;
                    if n < lo || n > hi {
                        continue;
                    }
                    if !is_primary_i64(a, b) {
                        continue;
                    }
                    if self.modulus == PrimaryModulus::Lambda7 && !is_one_mod_lambda7_i64(a, b) {
                        continue;
                    }
                    if self.squarefree_only {
                        let z = GaussInt::new(a, b);
                        if !is_squarefree(&z).expect("nonzero") {
                            continue;
                        }
                    }
                    self.shell.push((n, a, b));
                }
            }
            self.shell.sort_unstable();
            self.shell_lo = hi + 1;
        }
    }
}

impl Iterator for PrimaryEnumerator {
    type Item = GaussInt;

    fn next(&mut self) -> Option<GaussInt> {
        if self.pos >= self.shell.len() {
            self.fill_shell();
            if self.shell.is_empty() {
                return None;
            }
        }
        let (_, a, b) = self.shell[self.pos];
        self.pos += 1;
        Some(GaussInt::new(a, b))
    }
}

pub fn enumerate_primary(
    bound: u64,
    modulus: PrimaryModulus,
    squarefree_only: bool,
) -> PrimaryEnumerator {
    PrimaryEnumerator::new(bound, modulus, squarefree_only)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gi(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    #[test]
    fn primary_associate_examples() {
        assert_eq!(primary_associate(&gi(1, 0)).unwrap(), (Unit::ONE, gi(1, 0)));
        assert_eq!(primary_associate(&gi(3, 0)).unwrap(), (Unit::MINUS_ONE, gi(-3, 0)));
        assert_eq!(primary_associate(&gi(1, 2)).unwrap(), (Unit::MINUS_ONE, gi(-1, -2)));
        assert_eq!(primary_associate(&gi(0, 0)), Err(GaussError::Zero));
        assert_eq!(primary_associate(&gi(1, 1)), Err(GaussError::NormEven));
    }

    #[test]
    fn exactly_one_primary_associate() {
        for re in -9..=9i64 {
            for im in -9..=9i64 {
                let z = gi(re, im);
                if z.is_zero() || !z.is_odd() {
                    continue;
                }
                let count = (0u8..4).filter(|&k| z.mul_i_pow(k).is_primary()).count();
                assert_eq!(count, 1, "z = {z}");
                let (u, p) = primary_associate(&z).unwrap();
                assert_eq!(&u.to_gauss() * &p, z);
                assert_eq!(primary_associate(&p).unwrap(), (Unit::ONE, p.clone()));
            }
        }
    }

    #[test]
    fn factor_examples() {
        let f = factor(&gi(2, 0)).unwrap();
        assert_eq!(f.unit, Unit::MINUS_I);
        assert_eq!(f.lambda_exp, 2);
        assert!(f.factors.is_empty());

        let f = factor(&gi(-3, 0)).unwrap();
        assert_eq!(f.unit, Unit::ONE);
        assert_eq!(f.lambda_exp, 0);
        assert_eq!(f.factors, vec![(gi(-3, 0), 1)]);

        let f = factor(&gi(5, 0)).unwrap();
        assert_eq!(f.lambda_exp, 0);
        let primes: Vec<_> = f.factors.iter().map(|(p, _)| p.clone()).collect();
        assert_eq!(primes, vec![gi(-1, -2), gi(-1, 2)]);
        assert_eq!(f.reassemble(), gi(5, 0));
    }

    #[test]
    fn factor_recombines_products() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = gi(rng.gen_range(-500..=500), rng.gen_range(-500..=500));
            let b = gi(rng.gen_range(-500..=500), rng.gen_range(-500..=500));
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let prod = &a * &b;
            let f = factor(&prod).unwrap();
            assert_eq!(f.reassemble(), prod);
            let fa = factor(&a).unwrap();
            let fb = factor(&b).unwrap();
            assert_eq!(f.lambda_exp, fa.lambda_exp + fb.lambda_exp);
        }
    }

    #[test]
    fn multiplicative_functions() {
        assert_eq!(moebius(&gi(1, 0)).unwrap(), 1);
        assert_eq!(euler_phi(&gi(1, 0)).unwrap(), BigUint::one());
        assert_eq!(euler_phi(&gi(-3, 0)).unwrap(), BigUint::from(8u32));
        assert!(!is_squarefree(&gi(49, 0)).unwrap());
        assert_eq!(radical(&gi(49, 0)).unwrap(), gi(-7, 0));
        assert_eq!(moebius(&gi(49, 0)).unwrap(), 0);
        assert_eq!(moebius(&gi(-7, 0)).unwrap(), -1);
        // φ(π^k) = N(π)^{k-1}(N(π)-1)
        let pi = gi(-1, -2);
        assert_eq!(euler_phi(&pi.pow(3)).unwrap(), BigUint::from(25u32 * 4));
    }

    #[test]
    fn phi_mu_rad_multiplicative_on_coprime_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 60 {
            let a = gi(rng.gen_range(-300..=300), rng.gen_range(-300..=300));
            let b = gi(rng.gen_range(-300..=300), rng.gen_range(-300..=300));
            if a.is_zero() || b.is_zero() || !gcd(&a, &b).is_unit() {
                continue;
            }
            let ab = &a * &b;
            assert_eq!(
                euler_phi(&ab).unwrap(),
                euler_phi(&a).unwrap() * euler_phi(&b).unwrap()
            );
            assert_eq!(
                moebius(&ab).unwrap(),
                moebius(&a).unwrap() * moebius(&b).unwrap()
            );
            let ra = radical(&a).unwrap();
            let rb = radical(&b).unwrap();
            let rab = radical(&ab).unwrap();
            assert!(rab.divides(&(&ra * &rb)) && (&ra * &rb).divides(&rab));
            done += 1;
        }
    }

    #[test]
    fn gcd_divides_both_and_any_common_divisor_divides_it() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let d = gi(rng.gen_range(-30..=30), rng.gen_range(-30..=30));
            let a0 = gi(rng.gen_range(-40..=40), rng.gen_range(-40..=40));
            let b0 = gi(rng.gen_range(-40..=40), rng.gen_range(-40..=40));
            if d.is_zero() || a0.is_zero() || b0.is_zero() {
                continue;
            }
            let a = &a0 * &d;
            let b = &b0 * &d;
            let g = gcd(&a, &b);
            assert!(g.divides(&a) && g.divides(&b));
            assert!(d.divides(&g), "common divisor {d} must divide gcd {g}");
            if g.is_odd() {
                assert!(g.is_primary());
            }
        }
    }

    #[test]
    fn enumerate_primary_small() {
        let all: Vec<_> = enumerate_primary(1, PrimaryModulus::Lambda7, false).collect();
        assert_eq!(all, vec![gi(1, 0)]);

        // λ³ stream at 50 picks up -7 (norm 49) but not the square (-1-2i)² = -3+4i
        let l3: Vec<_> = enumerate_primary(50, PrimaryModulus::Lambda3, true).collect();
        assert!(l3.contains(&gi(-7, 0)));
        assert!(!l3.contains(&gi(-3, 4)));
        assert!(l3.iter().all(|z| z.is_primary()));
        let norms: Vec<u64> = l3.iter().map(|z| z.norm_u64().unwrap()).collect();
        assert!(norms.windows(2).all(|w| w[0] <= w[1]));

        // λ⁷ members start at norm 113: ±(7∓8i) shapes
        let l7: Vec<_> = enumerate_primary(120, PrimaryModulus::Lambda7, true).collect();
        assert_eq!(l7[0], gi(1, 0));
        assert_eq!(l7.len(), 3);
        assert!(l7.contains(&gi(-7, -8)) && l7.contains(&gi(-7, 8)));
        for z in &l7 {
            let d = z - &gi(1, 0);
            assert!(d.is_zero() || d.exact_div(&GaussInt::lambda_pow(7)).is_some());
        }
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["0", "1", "-1", "i", "-i", "3+4i", "-3-4i", "17", "-7+8i", "123456789012345678901+9i"] {
            let z: GaussInt = s.parse().unwrap();
            assert_eq!(z.to_string(), s);
        }
        assert_eq!("1 + 2i".parse::<GaussInt>().unwrap(), gi(1, 2));
        assert_eq!("2i".parse::<GaussInt>().unwrap(), gi(0, 2));
        assert!("".parse::<GaussInt>().is_err());
        assert!("1+2".parse::<GaussInt>().is_err());
    }

    #[test]
    fn norm_multiplicative() {
        let a = gi(12, -5);
        let b = gi(-7, 3);
        assert_eq!((&a * &b).norm(), a.norm() * b.norm());
    }

    #[test]
    fn nearest_division_halves_norm() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let a = gi(rng.gen_range(-1000..=1000), rng.gen_range(-1000..=1000));
            let d = gi(rng.gen_range(-100..=100), rng.gen_range(-100..=100));
            if d.is_zero() {
                continue;
            }
            let (q, r) = a.div_rem_nearest(&d);
            assert_eq!(&(&q * &d) + &r, a);
            assert!(r.norm() * 2u32 <= d.norm(), "a={a} d={d}");
        }
    }
}
