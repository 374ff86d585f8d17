//! Double-double arithmetic (~31 significant digits).
//!
//! Used by the Gauss-sum evaluators, where every phase is an exact
//! rational multiple of 2π: ě(νd/c) reduces to e(2πi·P/Q) with integers
//! P, Q, so [`sincos_2pi_rational`] performs the argument reduction
//! exactly in integer arithmetic and only the final ±π/4 window is
//! evaluated by a Taylor series.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134217729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };
    /// 2π
    pub const TWO_PI: DD = DD { hi: 6.283185307179586, lo: 2.4492935982947064e-16 };

    #[inline]
    pub fn new(hi: f64, lo: f64) -> DD {
        let (s, e) = quick_two_sum(hi, lo);
        DD { hi: s, lo: e }
    }

    #[inline]
    pub fn from_f64(x: f64) -> DD {
        DD { hi: x, lo: 0.0 }
    }

    /// Exact for |x| < 2^106.
    pub fn from_i128(x: i128) -> DD {
        let hi = x as f64;
        let lo = (x - hi as i128) as f64;
        DD::new(hi, lo)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> DD {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> DD {
        if self.hi == 0.0 && self.lo == 0.0 {
            return DD::ZERO;
        }
        assert!(self.hi > 0.0, "sqrt of negative double-double");
        // one Newton step on x = 1/sqrt doubles precision
        let x = 1.0 / self.hi.sqrt();
        let ax = DD::from_f64(self.hi * x);
        let err = self - ax * ax;
        DD::new(ax.hi, ax.lo) + err * DD::from_f64(x * 0.5)
    }

    pub fn recip(self) -> DD {
        DD::ONE / self
    }
}

impl Add for DD {
    type Output = DD;
    #[inline]
    fn add(self, rhs: DD) -> DD {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        DD { hi: s1, lo: s2 }
    }
}

impl Sub for DD {
    type Output = DD;
    #[inline]
    fn sub(self, rhs: DD) -> DD {
        self + (-rhs)
    }
}

impl Neg for DD {
    type Output = DD;
    #[inline]
    fn neg(self) -> DD {
        DD { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for DD {
    type Output = DD;
    #[inline]
    fn mul(self, rhs: DD) -> DD {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (s, e) = quick_two_sum(p1, p2);
        DD { hi: s, lo: e }
    }
}

impl Div for DD {
    type Output = DD;
    #[inline]
    fn div(self, rhs: DD) -> DD {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * DD::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * DD::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        DD::new(s, e + q3)
    }
}

impl Mul<f64> for DD {
    type Output = DD;
    #[inline]
    fn mul(self, rhs: f64) -> DD {
        self * DD::from_f64(rhs)
    }
}

/// Complex number with double-double components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CDD {
    pub re: DD,
    pub im: DD,
}

impl CDD {
    pub const ZERO: CDD = CDD { re: DD::ZERO, im: DD::ZERO };
    pub const ONE: CDD = CDD { re: DD::ONE, im: DD::ZERO };

    pub fn new(re: DD, im: DD) -> CDD {
        CDD { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> CDD {
        CDD { re: DD::from_f64(re), im: DD::from_f64(im) }
    }

    pub fn conj(self) -> CDD {
        CDD { re: self.re, im: -self.im }
    }

    pub fn scale(self, s: DD) -> CDD {
        CDD { re: self.re * s, im: self.im * s }
    }

    pub fn abs(self) -> DD {
        (self.re * self.re + self.im * self.im).sqrt()
    }

    pub fn to_f64(self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Multiply by i^k.
    pub fn mul_i_pow(self, k: u8) -> CDD {
        match k % 4 {
            0 => self,
            1 => CDD { re: -self.im, im: self.re },
            2 => -self,
            _ => CDD { re: self.im, im: -self.re },
        }
    }
}

impl Add for CDD {
    type Output = CDD;
    #[inline]
    fn add(self, rhs: CDD) -> CDD {
        CDD { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for CDD {
    type Output = CDD;
    #[inline]
    fn sub(self, rhs: CDD) -> CDD {
        CDD { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Neg for CDD {
    type Output = CDD;
    #[inline]
    fn neg(self) -> CDD {
        CDD { re: -self.re, im: -self.im }
    }
}

impl Mul for CDD {
    type Output = CDD;
    #[inline]
    fn mul(self, rhs: CDD) -> CDD {
        CDD {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Div for CDD {
    type Output = CDD;
    fn div(self, rhs: CDD) -> CDD {
        let n = rhs.re * rhs.re + rhs.im * rhs.im;
        let c = self * rhs.conj();
        CDD { re: c.re / n, im: c.im / n }
    }
}

// Taylor coefficients 1/(2k+1)! and 1/(2k)! as double-doubles.
fn sin_coeffs() -> &'static [DD; 16] {
    static CELL: OnceLock<[DD; 16]> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut c = [DD::ZERO; 16];
        let mut fact: i128 = 1; // (2k+1)!
        for (k, slot) in c.iter_mut().enumerate() {
            if k > 0 {
                fact *= (2 * k) as i128 * (2 * k + 1) as i128;
            }
            *slot = DD::ONE / DD::from_i128(fact);
        }
        c
    })
}

fn cos_coeffs() -> &'static [DD; 16] {
    static CELL: OnceLock<[DD; 16]> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut c = [DD::ZERO; 16];
        let mut fact: i128 = 1; // (2k)!
        for (k, slot) in c.iter_mut().enumerate() {
            if k > 0 {
                fact *= (2 * k - 1) as i128 * (2 * k) as i128;
            }
            *slot = DD::ONE / DD::from_i128(fact);
        }
        c
    })
}

/// sin and cos of θ for |θ| ≤ π/4, by alternating Taylor series:
/// sin θ = θ·Σ (−1)^k x^k/(2k+1)!, cos θ = Σ (−1)^k x^k/(2k)!, x = θ².
fn sincos_small(theta: DD) -> (DD, DD) {
    let x = theta * theta;
    let sc = sin_coeffs();
    let cc = cos_coeffs();
    let mut s = sc[15];
    let mut c = cc[15];
    for k in (0..15).rev() {
        s = sc[k] - x * s;
        c = cc[k] - x * c;
    }
    (theta * s, c)
}

/// e(p/q) = cos(2πp/q) + i·sin(2πp/q) with the reduction p mod q done in
/// exact integer arithmetic. `q` must be positive.
pub fn sincos_2pi_rational(p: i128, q: i128) -> CDD {
    assert!(q > 0);
    let p = p.rem_euclid(q);
    // nearest quarter turn: m = round(4p/q)
    let m = ((8 * p + q) / (2 * q)) as u8; // 0..=4
    let rn = 4 * p - m as i128 * q; // in [-q/2, q/2]
    let r = DD::from_i128(rn) / DD::from_i128(4 * q);
    let theta = r * DD::TWO_PI;
    let (s, c) = sincos_small(theta);
    CDD { re: c, im: s }.mul_i_pow(m % 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_basics() {
        let a = DD::from_f64(1.0) / DD::from_f64(3.0);
        let b = a * DD::from_f64(3.0);
        assert!((b - DD::ONE).to_f64().abs() < 1e-30);
        let s = DD::from_f64(2.0).sqrt();
        assert!(((s * s) - DD::from_f64(2.0)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn from_i128_exact() {
        let big: i128 = (1 << 80) + 12345;
        let d = DD::from_i128(big);
        assert_eq!(d.hi as i128 + d.lo as i128, big);
    }

    #[test]
    fn sincos_special_angles() {
        let e0 = sincos_2pi_rational(0, 8);
        assert_eq!(e0.to_f64(), (1.0, 0.0));
        let e4 = sincos_2pi_rational(2, 8); // quarter turn
        assert!((e4.re.to_f64()).abs() < 1e-31 && (e4.im.to_f64() - 1.0).abs() < 1e-31);
        let ehalf = sincos_2pi_rational(4, 8);
        assert!((ehalf.re.to_f64() + 1.0).abs() < 1e-31 && ehalf.im.to_f64().abs() < 1e-31);
        // eighth turn: both components √2/2
        let e8 = sincos_2pi_rational(1, 8);
        let r2 = DD::from_f64(2.0).sqrt() * 0.5;
        assert!((e8.re - r2).to_f64().abs() < 1e-30);
        assert!((e8.im - r2).to_f64().abs() < 1e-30);
    }

    #[test]
    fn sincos_matches_f64() {
        for (p, q) in [(1i128, 7i128), (3, 11), (100, 12345), (999999, 1000003), (-5, 13)] {
            let e = sincos_2pi_rational(p, q);
            let x = 2.0 * std::f64::consts::PI * (p.rem_euclid(q) as f64) / (q as f64);
            assert!((e.re.to_f64() - x.cos()).abs() < 1e-13);
            assert!((e.im.to_f64() - x.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn sincos_unit_modulus() {
        for p in 0..200i128 {
            let e = sincos_2pi_rational(p, 201);
            let norm = (e.re * e.re + e.im * e.im).to_f64();
            assert!((norm - 1.0).abs() < 1e-30);
        }
    }

    #[test]
    fn sincos_group_law() {
        // e(a/q)·e(b/q) = e((a+b)/q) to double-double accuracy
        let q = 997i128;
        for (a, b) in [(1i128, 995i128), (123, 456), (996, 996)] {
            let ea = sincos_2pi_rational(a, q);
            let eb = sincos_2pi_rational(b, q);
            let eab = sincos_2pi_rational(a + b, q);
            let prod = ea * eb;
            assert!((prod.re - eab.re).to_f64().abs() < 1e-29);
            assert!((prod.im - eab.im).to_f64().abs() < 1e-29);
        }
    }
}
