//! Minimal double-double arithmetic (real and complex), enough to sum
//! alternating hypergeometric series whose partial sums cancel by many orders
//! of magnitude.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        DD { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> f64 {
        self.hi.abs()
    }

    /// Exact sum of two doubles.
    pub fn sum(a: f64, b: f64) -> Self {
        let (s, e) = two_sum(a, b);
        DD { hi: s, lo: e }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DD { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - DD::new(b).mul_f64(q1);
        let q2 = r.hi / b;
        let r = r - DD::new(b).mul_f64(q2);
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        DD { hi, lo } + DD::new(q3)
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, b: DD) -> DD {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DD { hi, lo }
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, b: DD) -> DD {
        self + (-b)
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, b: DD) -> DD {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DD { hi, lo }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, b: DD) -> DD {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DD { hi, lo } + DD::new(q3)
    }
}

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CDD {
    pub re: DD,
    pub im: DD,
}

impl CDD {
    pub const ZERO: CDD = CDD {
        re: DD::ZERO,
        im: DD::ZERO,
    };

    pub fn from_c64(z: Complex64) -> Self {
        CDD {
            re: DD::new(z.re),
            im: DD::new(z.im),
        }
    }

    pub fn from_parts(re: DD, im: DD) -> Self {
        CDD { re, im }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Cheap magnitude estimate, `|re| + |im|` of the leading parts.
    pub fn l1(self) -> f64 {
        self.re.abs() + self.im.abs()
    }

    pub fn mul_f64(self, b: f64) -> Self {
        CDD {
            re: self.re.mul_f64(b),
            im: self.im.mul_f64(b),
        }
    }

    pub fn div_f64(self, b: f64) -> Self {
        CDD {
            re: self.re.div_f64(b),
            im: self.im.div_f64(b),
        }
    }

    pub fn conj(self) -> Self {
        CDD {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(self) -> DD {
        self.re * self.re + self.im * self.im
    }

    pub fn div_dd(self, b: DD) -> Self {
        CDD {
            re: self.re / b,
            im: self.im / b,
        }
    }
}

impl Add for CDD {
    type Output = CDD;
    fn add(self, b: CDD) -> CDD {
        CDD {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl Sub for CDD {
    type Output = CDD;
    fn sub(self, b: CDD) -> CDD {
        CDD {
            re: self.re - b.re,
            im: self.im - b.im,
        }
    }
}

impl Mul for CDD {
    type Output = CDD;
    fn mul(self, b: CDD) -> CDD {
        if self.im.hi == 0.0 && self.im.lo == 0.0 && b.im.hi == 0.0 && b.im.lo == 0.0 {
            return CDD {
                re: self.re * b.re,
                im: DD::ZERO,
            };
        }
        CDD {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl Div for CDD {
    type Output = CDD;
    fn div(self, b: CDD) -> CDD {
        if b.im.hi == 0.0 && b.im.lo == 0.0 {
            return self.div_dd(b.re);
        }
        (self * b.conj()).div_dd(b.norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_lost_digits() {
        let a = DD::new(1.0) + DD::new(1e-20);
        let b = a - DD::new(1.0);
        assert!((b.to_f64() - 1e-20).abs() < 1e-35);
    }

    #[test]
    fn division_is_accurate() {
        let third = DD::new(1.0) / DD::new(3.0);
        let back = third * DD::new(3.0) - DD::new(1.0);
        assert!(back.to_f64().abs() < 1e-31);
        let z = CDD::from_c64(Complex64::new(1.0, 2.0)) / CDD::from_c64(Complex64::new(3.0, -1.0));
        let w = z.to_c64() - Complex64::new(1.0, 2.0) / Complex64::new(3.0, -1.0);
        assert!(w.norm() < 1e-15);
    }

    #[test]
    fn alternating_exponential_series() {
        // e^{-20} by its Taylor series: terms reach 4e7, result 2e-9.
        let x = -20.0;
        let mut term = DD::new(1.0);
        let mut sum = DD::new(1.0);
        for k in 1..200 {
            term = term.mul_f64(x).div_f64(k as f64);
            sum = sum + term;
        }
        let rel = (sum.to_f64() - (-20.0f64).exp()).abs() / (-20.0f64).exp();
        assert!(rel < 1e-14, "rel {rel}");
    }
}
