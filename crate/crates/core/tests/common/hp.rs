//! Fixed-point arithmetic with 256 fractional bits, used as a
//! high-precision reference for the floating-point formulas.

use std::ops::{Add, Div, Mul, Sub};

use num_bigint::{BigInt, Sign};

const BITS: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fx(pub BigInt);

impl Fx {
    pub fn int(n: i64) -> Fx {
        Fx(BigInt::from(n) << BITS)
    }

    pub fn ratio(num: &BigInt, den: &BigInt) -> Fx {
        Fx((num.clone() << BITS) / den)
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Fx {
        assert!(x.is_finite());
        if x == 0.0 {
            return Fx(BigInt::from(0));
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let m = BigInt::from(mant) * sign;
        let shift = e + BITS as i64;
        Fx(if shift >= 0 { m << shift as u32 } else { m >> (-shift) as u32 })
    }

    fn is_zero(&self) -> bool {
        self.0.sign() == Sign::NoSign
    }

    fn abs(&self) -> Fx {
        Fx(if self.0.sign() == Sign::Minus { -self.0.clone() } else { self.0.clone() })
    }

    fn shl(&self, k: i64) -> Fx {
        Fx(if k >= 0 { self.0.clone() << k as u32 } else { self.0.clone() >> (-k) as u32 })
    }

    pub fn ln2() -> Fx {
        // 2 atanh(1/3)
        Fx::atanh(&(Fx::int(1) / Fx::int(3))).shl(1)
    }

    fn atanh(z: &Fx) -> Fx {
        let z2 = z.clone() * z.clone();
        let mut term = z.clone();
        let mut sum = Fx::int(0);
        let mut k = 1i64;
        while !term.is_zero() {
            sum = sum + term.clone() / Fx::int(k);
            term = term * z2.clone();
            k += 2;
        }
        sum
    }

    pub fn exp(&self) -> Fx {
        let ln2 = Fx::ln2();
        // x = k ln2 + r with |r| <= ln2 / 2
        let k = {
            let q = self.clone() / ln2.clone();
            let half = Fx::int(1).shl(-1);
            let shifted = if q.0.sign() == Sign::Minus { q - half } else { q + half };
            shifted.0 >> BITS
        };
        let k: i64 = k.try_into().expect("small exponent");
        let r = self.clone() - ln2 * Fx::int(k);
        let mut term = Fx::int(1);
        let mut sum = Fx::int(0);
        let mut i = 1i64;
        while !term.is_zero() {
            sum = sum + term.clone();
            term = term * r.clone() / Fx::int(i);
            i += 1;
        }
        sum.shl(k)
    }

    pub fn ln(&self) -> Fx {
        assert!(self.0.sign() == Sign::Plus);
        // self = m 2^k with m in [1, 2)
        let k = self.0.bits() as i64 - 1 - BITS as i64;
        let m = self.shl(-k);
        let z = (m.clone() - Fx::int(1)) / (m + Fx::int(1));
        Fx::atanh(&z).shl(1) + Fx::ln2() * Fx::int(k)
    }

    pub fn sqrt(&self) -> Fx {
        assert!(self.0.sign() != Sign::Minus);
        Fx((self.0.clone() << BITS).sqrt())
    }

    /// `|approx - self| <= tol |self|` with `tol = 10^-digits`.
    pub fn close_to(&self, approx: f64, digits: u32) -> bool {
        let err = (Fx::from_f64(approx) - self.clone()).abs();
        err.0 * BigInt::from(10).pow(digits) <= self.abs().0
    }
}

impl Add for Fx {
    type Output = Fx;
    fn add(self, o: Fx) -> Fx {
        Fx(self.0 + o.0)
    }
}

impl Sub for Fx {
    type Output = Fx;
    fn sub(self, o: Fx) -> Fx {
        Fx(self.0 - o.0)
    }
}

impl Mul for Fx {
    type Output = Fx;
    fn mul(self, o: Fx) -> Fx {
        Fx((self.0 * o.0) >> BITS)
    }
}

impl Div for Fx {
    type Output = Fx;
    fn div(self, o: Fx) -> Fx {
        Fx((self.0 << BITS) / o.0)
    }
}
