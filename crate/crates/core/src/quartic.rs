//! Quartic and quadratic residue symbols over ℤ[i].
//!
//! Two independent evaluation routes are provided: the Euler criterion
//! driven by factoring the modulus, and a factorization-free Euclidean
//! reduction using biquadratic reciprocity together with the
//! supplementary laws for i and λ. The fast route reduces the top
//! argument to the representative of least norm each round, so norms
//! strictly decrease.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::gaussint::{
    self, factor, lambda_valuation, primary_associate, GaussError, GaussInt,
};

/// Value of a quartic residue symbol: zero or a fourth root of unity i^k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuarticValue {
    Zero,
    Root(u8),
}

impl QuarticValue {
    pub const ONE: QuarticValue = QuarticValue::Root(0);

    pub fn root(k: i64) -> QuarticValue {
        QuarticValue::Root(k.rem_euclid(4) as u8)
    }

    pub fn is_zero(self) -> bool {
        self == QuarticValue::Zero
    }

    pub fn mul(self, other: QuarticValue) -> QuarticValue {
        match (self, other) {
            (QuarticValue::Root(a), QuarticValue::Root(b)) => QuarticValue::Root((a + b) % 4),
            _ => QuarticValue::Zero,
        }
    }

    pub fn pow(self, e: i64) -> QuarticValue {
        match self {
            QuarticValue::Zero => {
                if e == 0 {
                    QuarticValue::ONE
                } else {
                    QuarticValue::Zero
                }
            }
            QuarticValue::Root(k) => QuarticValue::root(k as i64 * e),
        }
    }

    pub fn conj(self) -> QuarticValue {
        self.pow(-1)
    }

    /// The symbol squared, as the quadratic symbol value in {−1, 0, 1}.
    pub fn squared_sign(self) -> i8 {
        match self {
            QuarticValue::Zero => 0,
            QuarticValue::Root(k) => {
                if k % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn to_complex(self) -> (f64, f64) {
        match self {
            QuarticValue::Zero => (0.0, 0.0),
            QuarticValue::Root(0) => (1.0, 0.0),
            QuarticValue::Root(1) => (0.0, 1.0),
            QuarticValue::Root(2) => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    }

    pub fn to_gauss(self) -> GaussInt {
        match self {
            QuarticValue::Zero => GaussInt::zero(),
            QuarticValue::Root(k) => crate::gaussint::Unit::from_i_power(k as i64).to_gauss(),
        }
    }
}

impl std::fmt::Display for QuarticValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuarticValue::Zero => write!(f, "0"),
            QuarticValue::Root(0) => write!(f, "1"),
            QuarticValue::Root(1) => write!(f, "i"),
            QuarticValue::Root(2) => write!(f, "-1"),
            _ => write!(f, "-i"),
        }
    }
}

fn require_primary(c: &GaussInt) -> Result<(), GaussError> {
    if c.is_zero() || !c.is_odd() || !c.is_primary() {
        Err(GaussError::NotPrimary)
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Euler criterion route

/// (a/π)₄ for a primary prime power π^e via a^{(N(π)−1)/4} (mod π).
fn euler_prime_power(a: &GaussInt, pi: &GaussInt, e: u32) -> QuarticValue {
    let r = a.mod_nearest(pi);
    if r.is_zero() {
        return QuarticValue::Zero;
    }
    let npi = pi.norm_biguint();
    let exp = (npi - BigUint::one()) >> 2;
    let t = powmod_gauss(&r, &exp, pi);
    for k in 0u8..4 {
        let diff = &t - &crate::gaussint::Unit::from_i_power(k as i64).to_gauss();
        if diff.is_zero() || diff.exact_div(pi).is_some() {
            return QuarticValue::Root(k).pow(e as i64);
        }
    }
    unreachable!("a^((N(pi)-1)/4) must be a 4th root of unity mod pi")
}

fn powmod_gauss(base: &GaussInt, exp: &BigUint, modulus: &GaussInt) -> GaussInt {
    let mut result = GaussInt::one();
    let mut b = base.mod_nearest(modulus);
    let bits = exp.bits();
    for i in 0..bits {
        if exp.bit(i) {
            result = (&result * &b).mod_nearest(modulus);
        }
        if i + 1 < bits {
            b = (&b * &b).mod_nearest(modulus);
        }
    }
    result
}

/// Quartic symbol (a/c)₄ by the Euler criterion, extended
/// multiplicatively over the factorization of the primary modulus c.
pub fn quartic_symbol_euler(a: &GaussInt, c: &GaussInt) -> Result<QuarticValue, GaussError> {
    require_primary(c)?;
    if c.is_one() {
        return Ok(QuarticValue::ONE);
    }
    let f = factor(c)?;
    debug_assert_eq!(f.lambda_exp, 0);
    let mut acc = QuarticValue::ONE;
    for (pi, e) in &f.factors {
        acc = acc.mul(euler_prime_power(a, pi, *e));
        if acc.is_zero() {
            return Ok(QuarticValue::Zero);
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// reciprocity route

/// λ-adic digits (a₃, a₄, a₅, a₆) of a primary γ = 1 + a₃λ³ + a₄λ⁴ + ⋯.
fn lambda_digits(gamma: &GaussInt) -> (u8, u8, u8, u8) {
    let lam = GaussInt::lambda();
    let lam3 = GaussInt::new(-2, 2);
    let d = gamma - &GaussInt::one();
    if d.is_zero() {
        return (0, 0, 0, 0);
    }
    let mut e = d.exact_div(&lam3).expect("primary element is 1 mod lambda^3");
    let mut digits = [0u8; 4];
    for slot in digits.iter_mut() {
        if e.is_zero() {
            break;
        }
        if (&e.re + &e.im).is_odd() {
            *slot = 1;
            e = &e - &GaussInt::one();
        }
        e = e.exact_div(&lam).expect("exact after digit subtraction");
    }
    (digits[0], digits[1], digits[2], digits[3])
}

/// Exponents (s, t) with (λ/γ)₄ = i^s and (i/γ)₄ = i^t, from the
/// supplementary laws driven by the λ-adic digits of γ.
fn supplement_exponents(gamma: &GaussInt) -> (u8, u8) {
    let (a3, a4, a5, a6) = lambda_digits(gamma);
    let lam = (-(a4 as i64) + 2 * a6 as i64 + 2 * a3 as i64).rem_euclid(4) as u8;
    let i_exp = (2 * (a4 as i64 + a5 as i64) + a3 as i64).rem_euclid(4) as u8;
    (lam, i_exp)
}

/// (λ/γ)₄ for primary γ.
pub fn lambda_symbol(gamma: &GaussInt) -> Result<QuarticValue, GaussError> {
    require_primary(gamma)?;
    Ok(QuarticValue::Root(supplement_exponents(gamma).0))
}

/// (i/γ)₄ for primary γ.
pub fn i_symbol(gamma: &GaussInt) -> Result<QuarticValue, GaussError> {
    require_primary(gamma)?;
    Ok(QuarticValue::Root(supplement_exponents(gamma).1))
}

/// Parity of C(α,γ) = (N(α)−1)/4 · (N(γ)−1)/4 for primary α, γ.
/// (N ≡ 5 mod 8 makes the quarter odd.)
fn c_parity(n_mod8_alpha: u8, n_mod8_gamma: u8) -> u8 {
    u8::from(n_mod8_alpha == 5) & u8::from(n_mod8_gamma == 5)
}

fn norm_mod8(z: &GaussInt) -> u8 {
    (z.norm() & num_bigint::BigInt::from(7)).to_u8().unwrap()
}

/// The reciprocity sign (−1)^{C(α,γ)} as ±1.
pub fn reciprocity_sign(alpha: &GaussInt, gamma: &GaussInt) -> Result<i8, GaussError> {
    require_primary(alpha)?;
    require_primary(gamma)?;
    Ok(if c_parity(norm_mod8(alpha), norm_mod8(gamma)) == 1 {
        -1
    } else {
        1
    })
}

/// Quartic symbol (a/c)₄ by Euclidean reduction and reciprocity;
/// factorization-free. Agrees with [`quartic_symbol_euler`] everywhere.
pub fn quartic_symbol_fast(a: &GaussInt, c: &GaussInt) -> Result<QuarticValue, GaussError> {
    require_primary(c)?;
    if let (Some(ap), Some(cp)) = (a.to_i64_pair(), c.to_i64_pair()) {
        if fits_fast(ap) && fits_fast(cp) {
            return Ok(fast_i128(ap, cp));
        }
    }
    Ok(fast_bigint(a.clone(), c.clone()))
}

fn fast_bigint(mut a: GaussInt, mut c: GaussInt) -> QuarticValue {
    let mut acc: u8 = 0;
    loop {
        if c.is_one() {
            return QuarticValue::Root(acc);
        }
        a = a.mod_nearest(&c);
        if a.is_zero() {
            return QuarticValue::Zero;
        }
        let (v, odd) = lambda_valuation(&a);
        let (u, prim) = primary_associate(&odd).expect("odd nonzero");
        // odd = u·prim, so (odd/c) = (i/c)^{u} (prim/c); a adds (λ/c)^v
        let (lam_e, i_e) = supplement_exponents(&c);
        acc = (acc + (v % 4) as u8 * lam_e + u.i_power() * i_e) % 4;
        if prim.is_one() {
            return QuarticValue::Root(acc);
        }
        acc = (acc + 2 * c_parity(norm_mod8(&prim), norm_mod8(&c))) % 4;
        a = c;
        c = prim;
    }
}

// ---------------------------------------------------------------------------
// i128 fast path (components bounded by 2^40)

const FAST_LIMIT: i64 = 1 << 40;

fn fits_fast((re, im): (i64, i64)) -> bool {
    re.abs() < FAST_LIMIT && im.abs() < FAST_LIMIT
}

#[inline]
fn norm128(a: (i64, i64)) -> i128 {
    a.0 as i128 * a.0 as i128 + a.1 as i128 * a.1 as i128
}

#[inline]
fn round_div_i128(a: i128, b: i128) -> i128 {
    // b > 0; round half away from zero
    if a >= 0 {
        (a + b / 2) / b
    } else {
        -((-a + b / 2) / b)
    }
}

#[inline]
fn mod_nearest_i128(a: (i64, i64), c: (i64, i64)) -> (i64, i64) {
    let n = norm128(c);
    let nr = a.0 as i128 * c.0 as i128 + a.1 as i128 * c.1 as i128;
    let ni = a.1 as i128 * c.0 as i128 - a.0 as i128 * c.1 as i128;
    let qr = round_div_i128(nr, n);
    let qi = round_div_i128(ni, n);
    let rr = a.0 as i128 - (qr * c.0 as i128 - qi * c.1 as i128);
    let ri = a.1 as i128 - (qr * c.1 as i128 + qi * c.0 as i128);
    (rr as i64, ri as i64)
}

#[inline]
fn mul_i_pow_i64(z: (i64, i64), k: u8) -> (i64, i64) {
    match k % 4 {
        0 => z,
        1 => (-z.1, z.0),
        2 => (-z.0, -z.1),
        _ => (z.1, -z.0),
    }
}

#[inline]
fn is_primary_pair(z: (i64, i64)) -> bool {
    gaussint::is_primary_i64(z.0, z.1)
}

/// λ-adic digits (a₃..a₆) of primary γ, by exact divisions in i64.
#[inline]
fn lambda_digits_i64(gamma: (i64, i64)) -> (u8, u8, u8, u8) {
    // e = (γ-1)/λ³ with λ³ = -2+2i: (x+yi)/(-2+2i) = ((-2x+2y) + (-2y-2x) i)/8
    let x = gamma.0 - 1;
    let y = gamma.1;
    let mut er = (-2 * x + 2 * y) / 8;
    let mut ei = (-2 * x - 2 * y) / 8;
    let mut digits = [0u8; 4];
    for slot in digits.iter_mut() {
        if er == 0 && ei == 0 {
            break;
        }
        if (er + ei) & 1 == 1 {
            *slot = 1;
            er -= 1;
        }
        // divide by λ = 1+i: (er+ei*i)(1-i)/2
        let nr = (er + ei) / 2;
        let ni = (ei - er) / 2;
        er = nr;
        ei = ni;
    }
    (digits[0], digits[1], digits[2], digits[3])
}

#[inline]
fn supplement_exponents_i64(gamma: (i64, i64)) -> (u8, u8) {
    let (a3, a4, a5, a6) = lambda_digits_i64(gamma);
    let lam = (-(a4 as i64) + 2 * a6 as i64 + 2 * a3 as i64).rem_euclid(4) as u8;
    let i_exp = (2 * (a4 as i64 + a5 as i64) + a3 as i64).rem_euclid(4) as u8;
    (lam, i_exp)
}

fn fast_i128(mut a: (i64, i64), mut c: (i64, i64)) -> QuarticValue {
    let mut acc: u8 = 0;
    loop {
        if c == (1, 0) {
            return QuarticValue::Root(acc);
        }
        a = mod_nearest_i128(a, c);
        if a == (0, 0) {
            return QuarticValue::Zero;
        }
        // strip λ^v
        let mut v = 0u8;
        while (a.0 + a.1) & 1 == 0 {
            let nr = (a.0 + a.1) / 2;
            let ni = (a.1 - a.0) / 2;
            a = (nr, ni);
            v = (v + 1) % 4;
        }
        // strip unit: a = i^{-k}·prim  =>  symbol gains (i/c)^{k'} with i^{k'} the unit
        let mut u = 0u8;
        while !is_primary_pair(a) {
            a = mul_i_pow_i64(a, 1);
            u += 1;
        }
        // original odd part = i^{4-u} · a
        let unit_pow = (4 - u) % 4;
        let (lam_e, i_e) = supplement_exponents_i64(c);
        acc = (acc + v * lam_e + unit_pow * i_e) % 4;
        if a == (1, 0) {
            return QuarticValue::Root(acc);
        }
        let na = norm128(a);
        let nc = norm128(c);
        if (na & 7) == 5 && (nc & 7) == 5 {
            acc = (acc + 2) % 4;
        }
        std::mem::swap(&mut a, &mut c);
    }
}

// ---------------------------------------------------------------------------

/// Quadratic symbol (a/c)₂ = (a/c)₄², in {−1, 0, +1}.
pub fn quadratic_symbol(a: &GaussInt, c: &GaussInt) -> Result<i8, GaussError> {
    Ok(quartic_symbol_fast(a, c)?.squared_sign())
}

/// (ν/c)₄ for ν = num·λ^{−lam_den}, using (λ/c)₄^{−lam_den}·(num/c)₄.
pub fn quartic_symbol_lambda_den(
    num: &GaussInt,
    lam_den: u32,
    c: &GaussInt,
) -> Result<QuarticValue, GaussError> {
    let base = quartic_symbol_fast(num, c)?;
    let lam = lambda_symbol(c)?;
    Ok(base.mul(lam.pow(-(lam_den as i64))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn gi(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    #[test]
    fn trivial_top() {
        for c in [gi(1, 0), gi(-3, 0), gi(-1, -2), gi(-7, 8)] {
            assert_eq!(quartic_symbol_euler(&gi(1, 0), &c).unwrap(), QuarticValue::ONE);
            assert_eq!(quartic_symbol_fast(&gi(1, 0), &c).unwrap(), QuarticValue::ONE);
        }
    }

    #[test]
    fn euler_examples() {
        // 2^{(5-1)/4} = 2 ≡ i (mod -1-2i)
        assert_eq!(
            quartic_symbol_euler(&gi(2, 0), &gi(-1, -2)).unwrap(),
            QuarticValue::Root(1)
        );
        // (i/-3)₄ = (-1)^{a₄+a₅} with -3 = 1 + λ⁴
        assert_eq!(
            quartic_symbol_euler(&gi(0, 1), &gi(-3, 0)).unwrap(),
            QuarticValue::Root(2)
        );
        assert_eq!(i_symbol(&gi(-3, 0)).unwrap(), QuarticValue::Root(2));
    }

    #[test]
    fn supplement_lambda_example() {
        // γ = 1 + λ⁶ = 1 - 8i has digits a₄ = a₅ = 0, a₆ = 1, so (λ/γ)₄ = i² = -1
        let gamma = gi(1, -8);
        assert_eq!(lambda_symbol(&gamma).unwrap(), QuarticValue::Root(2));
    }

    #[test]
    fn quadratic_examples() {
        assert_eq!(quadratic_symbol(&gi(1, 0), &gi(-7, 0)).unwrap(), 1);
        assert_eq!(quadratic_symbol(&gi(2, 0), &gi(-1, -2)).unwrap(), -1);
    }

    #[test]
    fn reciprocity_sign_examples() {
        assert_eq!(reciprocity_sign(&gi(1, 0), &gi(-3, 0)).unwrap(), 1);
        assert_eq!(reciprocity_sign(&gi(-3, 0), &gi(-3, 0)).unwrap(), 1);
        // N(-1-2i) = 5, N(-3) = 9: C = 1·2 even
        assert_eq!(reciprocity_sign(&gi(-1, -2), &gi(-3, 0)).unwrap(), 1);
        // N = 5, 5: C = 1 odd
        assert_eq!(reciprocity_sign(&gi(-1, -2), &gi(-1, 2)).unwrap(), -1);
        assert_eq!(
            reciprocity_sign(&gi(1, 1), &gi(-3, 0)),
            Err(GaussError::NotPrimary)
        );
    }

    #[test]
    fn reciprocity_sign_additivity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let primaries: Vec<GaussInt> =
            gaussint::enumerate_primary(400, gaussint::PrimaryModulus::Lambda3, false).collect();
        for _ in 0..200 {
            let a = &primaries[rng.gen_range(0..primaries.len())];
            let b = &primaries[rng.gen_range(0..primaries.len())];
            let g = &primaries[rng.gen_range(0..primaries.len())];
            let ab = a * b;
            assert!(ab.is_primary());
            assert_eq!(
                reciprocity_sign(&ab, g).unwrap(),
                reciprocity_sign(a, g).unwrap() * reciprocity_sign(b, g).unwrap()
            );
        }
    }

    #[test]
    fn reciprocity_example_instance() {
        // (-3 / -1-2i)₄ = (-1)^C (-1-2i / -3)₄ with C even
        let lhs = quartic_symbol_euler(&gi(-3, 0), &gi(-1, -2)).unwrap();
        let rhs = quartic_symbol_euler(&gi(-1, -2), &gi(-3, 0)).unwrap();
        assert_eq!(reciprocity_sign(&gi(-3, 0), &gi(-1, -2)).unwrap(), 1);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn fast_matches_euler_randomized() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let primaries: Vec<GaussInt> =
            gaussint::enumerate_primary(800, gaussint::PrimaryModulus::Lambda3, false).collect();
        for _ in 0..400 {
            let a = gi(rng.gen_range(-900..=900), rng.gen_range(-900..=900));
            if a.is_zero() {
                continue;
            }
            let c = &primaries[rng.gen_range(0..primaries.len())];
            let e = quartic_symbol_euler(&a, c).unwrap();
            let f = quartic_symbol_fast(&a, c).unwrap();
            assert_eq!(e, f, "a={a} c={c}");
            // bigint route must agree with the i128 fast path
            assert_eq!(fast_bigint(a.clone(), c.clone()), f);
        }
    }

    #[test]
    fn complete_multiplicativity_in_top() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let primaries: Vec<GaussInt> =
            gaussint::enumerate_primary(500, gaussint::PrimaryModulus::Lambda3, false).collect();
        for _ in 0..200 {
            let a = gi(rng.gen_range(-50..=50), rng.gen_range(-50..=50));
            let b = gi(rng.gen_range(-50..=50), rng.gen_range(-50..=50));
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let c = &primaries[rng.gen_range(0..primaries.len())];
            let ab = &a * &b;
            assert_eq!(
                quartic_symbol_fast(&ab, c).unwrap(),
                quartic_symbol_fast(&a, c).unwrap().mul(quartic_symbol_fast(&b, c).unwrap())
            );
        }
    }

    #[test]
    fn multiplicativity_in_bottom() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let primaries: Vec<GaussInt> =
            gaussint::enumerate_primary(300, gaussint::PrimaryModulus::Lambda3, false).collect();
        for _ in 0..200 {
            let c1 = &primaries[rng.gen_range(0..primaries.len())];
            let c2 = &primaries[rng.gen_range(0..primaries.len())];
            let a = gi(rng.gen_range(-80..=80), rng.gen_range(-80..=80));
            if a.is_zero() {
                continue;
            }
            let c12 = c1 * c2;
            assert_eq!(
                quartic_symbol_fast(&a, &c12).unwrap(),
                quartic_symbol_fast(&a, c1).unwrap().mul(quartic_symbol_fast(&a, c2).unwrap())
            );
        }
    }

    #[test]
    fn supplements_periodic_mod_lambda7() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        let lam7 = GaussInt::lambda_pow(7);
        let primaries: Vec<GaussInt> =
            gaussint::enumerate_primary(600, gaussint::PrimaryModulus::Lambda3, false).collect();
        for _ in 0..200 {
            let g = &primaries[rng.gen_range(0..primaries.len())];
            let t = gi(rng.gen_range(-20..=20), rng.gen_range(-20..=20));
            let g2 = g + &(&lam7 * &t);
            assert!(g2.is_primary());
            assert_eq!(lambda_symbol(g).unwrap(), lambda_symbol(&g2).unwrap());
            assert_eq!(i_symbol(g).unwrap(), i_symbol(&g2).unwrap());
        }
    }

    #[test]
    fn zero_on_common_factor() {
        let pi = gi(-1, -2);
        let c = &pi * &gi(-3, 0);
        assert_eq!(quartic_symbol_fast(&pi, &c).unwrap(), QuarticValue::Zero);
        assert_eq!(quartic_symbol_euler(&pi, &c).unwrap(), QuarticValue::Zero);
        assert_eq!(quadratic_symbol(&pi, &c).unwrap(), 0);
    }

    #[test]
    fn rejects_non_primary_modulus() {
        assert_eq!(
            quartic_symbol_fast(&gi(2, 0), &gi(3, 0)),
            Err(GaussError::NotPrimary)
        );
        assert_eq!(
            quartic_symbol_euler(&gi(2, 0), &gi(1, 2)),
            Err(GaussError::NotPrimary)
        );
    }

    #[test]
    fn quadratic_is_sign_when_coprime() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let primaries: Vec<GaussInt> =
            gaussint::enumerate_primary(500, gaussint::PrimaryModulus::Lambda3, false).collect();
        for _ in 0..100 {
            let a = gi(rng.gen_range(-100..=100), rng.gen_range(-100..=100));
            let c = &primaries[rng.gen_range(0..primaries.len())];
            if a.is_zero() || !gaussint::coprime(&a, c) {
                continue;
            }
            assert!(quadratic_symbol(&a, c).unwrap().abs() == 1);
        }
    }
}
