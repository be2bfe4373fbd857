//! Real-number backends for certified complex arithmetic.
//!
//! Every backend reports a per-operation relative rounding bound through
//! [`Real::unit_roundoff`]; [`crate::complex::ComplexApprox`] turns those
//! into absolute error bounds.

use std::fmt::Debug;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

/// Precision of the built-in double-double backend.
pub const DOUBLE_DOUBLE_BITS: u32 = 106;

pub trait Real: Clone + Debug + Send + Sync + 'static {
    /// Mantissa bits carried by this value.
    fn precision(&self) -> u32;
    /// Bound on the relative error of one rounded add/sub/mul/div.
    fn unit_roundoff(&self) -> f64;
    /// Exact conversion (every finite f64 is representable in every backend).
    fn from_f64(x: f64, prec: u32) -> Self;
    fn to_f64(&self) -> f64;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// pi to within one unit roundoff.
    fn pi(prec: u32) -> Self;
    /// Backend name recorded in cache headers.
    fn backend_name() -> &'static str;
    /// Lossless byte encoding used by the table cache.
    fn encode(&self) -> Vec<u8>;
    fn decode(bytes: &[u8], prec: u32) -> Option<Self>;

    fn zero(prec: u32) -> Self {
        Self::from_f64(0.0, prec)
    }

    /// Upper bound on |self| as an f64.
    fn abs_bound(&self) -> f64 {
        let x = self.to_f64().abs();
        x * (1.0 + 2.0 * f64::EPSILON) + f64::MIN_POSITIVE
    }

    /// Splits into an integer and a small f64 remainder: `self = i + r`
    /// up to the rounding of `r`.
    fn split_int(&self) -> (i128, f64) {
        let mut i = 0i128;
        let mut rest = self.clone();
        for _ in 0..8 {
            let step = rest.to_f64().round();
            if step == 0.0 {
                break;
            }
            i += step as i128;
            rest = rest.sub(&Self::from_f64(step, self.precision()));
        }
        (i, rest.to_f64())
    }
}

impl Real for f64 {
    fn precision(&self) -> u32 {
        53
    }
    fn unit_roundoff(&self) -> f64 {
        f64::EPSILON / 2.0
    }
    fn from_f64(x: f64, _prec: u32) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn pi(_prec: u32) -> Self {
        std::f64::consts::PI
    }
    fn backend_name() -> &'static str {
        "f64"
    }
    fn encode(&self) -> Vec<u8> {
        self.to_le_bytes().to_vec()
    }
    fn decode(bytes: &[u8], _prec: u32) -> Option<Self> {
        Some(f64::from_le_bytes(bytes.try_into().ok()?))
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
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
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

// Dekker's product; avoids a dependence on hardware FMA so results are
// identical across machines.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    fn dd_add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        DoubleDouble { hi, lo }
    }

    #[inline]
    fn dd_mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    #[inline]
    fn dd_div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self.dd_add(b.dd_mul(DoubleDouble::new(-q1, 0.0)));
        let q2 = r.hi / b.hi;
        let r = r.dd_add(b.dd_mul(DoubleDouble::new(-q2, 0.0)));
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo }.dd_add(DoubleDouble::new(q3, 0.0))
    }
}

impl Real for DoubleDouble {
    fn precision(&self) -> u32 {
        DOUBLE_DOUBLE_BITS
    }
    fn unit_roundoff(&self) -> f64 {
        // The accurate double-double kernels stay within a few u^2, u = 2^-53.
        2f64.powi(-100)
    }
    fn from_f64(x: f64, _prec: u32) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
    fn to_f64(&self) -> f64 {
        self.hi + self.lo
    }
    fn add(&self, other: &Self) -> Self {
        self.dd_add(*other)
    }
    fn sub(&self, other: &Self) -> Self {
        self.dd_add(other.neg())
    }
    fn mul(&self, other: &Self) -> Self {
        self.dd_mul(*other)
    }
    fn div(&self, other: &Self) -> Self {
        self.dd_div(*other)
    }
    fn neg(&self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
    fn pi(_prec: u32) -> Self {
        DoubleDouble::new(std::f64::consts::PI, 1.224_646_799_147_353_2e-16)
    }
    fn backend_name() -> &'static str {
        "double-double"
    }
    fn encode(&self) -> Vec<u8> {
        let mut out = self.hi.to_le_bytes().to_vec();
        out.extend_from_slice(&self.lo.to_le_bytes());
        out
    }
    fn decode(bytes: &[u8], _prec: u32) -> Option<Self> {
        if bytes.len() != 16 {
            return None;
        }
        let hi = f64::from_le_bytes(bytes[..8].try_into().ok()?);
        let lo = f64::from_le_bytes(bytes[8..].try_into().ok()?);
        Some(DoubleDouble::new(hi, lo))
    }
    fn split_int(&self) -> (i128, f64) {
        let a = self.hi.round();
        let r = (self.hi - a) + self.lo;
        let b = r.round();
        ((a as i128) + (b as i128), r - b)
    }
}

type Big = FBig<HalfEven, 2>;

/// Arbitrary-precision binary floating point.
#[derive(Clone, Debug)]
pub struct BigReal(Big);

impl BigReal {
    fn with_prec(x: Big, prec: u32) -> Self {
        BigReal(x.with_precision(prec as usize).value())
    }

    fn machin_pi(prec: u32) -> Self {
        // pi = 16 atan(1/5) - 4 atan(1/239), evaluated with guard bits.
        let work = prec + 32;
        let atan_inv = |m: u32| -> BigReal {
            let one = BigReal::from_f64(1.0, work);
            let mf = BigReal::from_f64(m as f64, work);
            let m2 = mf.mul(&mf);
            let mut power = one.div(&mf);
            let mut sum = power.clone();
            let mut k = 1u64;
            let tiny = 2f64.powi(-(work as i32) - 8);
            loop {
                power = power.div(&m2);
                let term = power.div(&BigReal::from_f64((2 * k + 1) as f64, work));
                if term.to_f64().abs() < tiny {
                    break;
                }
                sum = if k % 2 == 1 { sum.sub(&term) } else { sum.add(&term) };
                k += 1;
            }
            sum
        };
        let a = atan_inv(5).mul(&BigReal::from_f64(16.0, work));
        let b = atan_inv(239).mul(&BigReal::from_f64(4.0, work));
        BigReal::with_prec(a.sub(&b).0, prec)
    }
}

impl Real for BigReal {
    fn precision(&self) -> u32 {
        self.0.precision() as u32
    }
    fn unit_roundoff(&self) -> f64 {
        // Round-half-even gives 2^-p; allow one extra bit for division.
        2f64.powi(1 - self.precision() as i32)
    }
    fn from_f64(x: f64, prec: u32) -> Self {
        let v = Big::try_from(x).expect("finite f64");
        BigReal::with_prec(v, prec.max(53))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn add(&self, other: &Self) -> Self {
        BigReal(&self.0 + &other.0)
    }
    fn sub(&self, other: &Self) -> Self {
        BigReal(&self.0 - &other.0)
    }
    fn mul(&self, other: &Self) -> Self {
        BigReal(&self.0 * &other.0)
    }
    fn div(&self, other: &Self) -> Self {
        BigReal(&self.0 / &other.0)
    }
    fn neg(&self) -> Self {
        BigReal(-self.0.clone())
    }
    fn pi(prec: u32) -> Self {
        BigReal::machin_pi(prec)
    }
    fn backend_name() -> &'static str {
        "bigfloat"
    }
    fn encode(&self) -> Vec<u8> {
        let repr = self.0.repr();
        format!("{}p{}", repr.significand(), repr.exponent()).into_bytes()
    }
    fn decode(bytes: &[u8], prec: u32) -> Option<Self> {
        let s = std::str::from_utf8(bytes).ok()?;
        let (sig, exp) = s.split_once('p')?;
        let sig: dashu_int::IBig = sig.parse().ok()?;
        let exp: isize = exp.parse().ok()?;
        let v = Big::from_parts(sig, exp);
        Some(BigReal::with_prec(v, prec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_carries_extra_precision() {
        let third = DoubleDouble::from_f64(1.0, 106).div(&DoubleDouble::from_f64(3.0, 106));
        let back = third.mul(&DoubleDouble::from_f64(3.0, 106));
        let diff = back.sub(&DoubleDouble::from_f64(1.0, 106));
        assert!(diff.to_f64().abs() < 1e-31);
        // 1 + 2^-80 survives, which f64 cannot represent.
        let x = DoubleDouble::from_f64(1.0, 106).add(&DoubleDouble::from_f64(2f64.powi(-80), 106));
        assert_eq!(x.sub(&DoubleDouble::from_f64(1.0, 106)).to_f64(), 2f64.powi(-80));
    }

    #[test]
    fn bigreal_pi_matches_reference_digits() {
        let pi = BigReal::pi(256);
        let dd = DoubleDouble::pi(106);
        let diff = pi.sub(&BigReal::from_f64(dd.hi, 256)).sub(&BigReal::from_f64(dd.lo, 256));
        assert!(diff.to_f64().abs() < 1e-32);
        // 3.14159265358979323846264338327950288419716939937510...
        let tail = pi.sub(&BigReal::from_f64(std::f64::consts::PI, 256));
        assert!((tail.to_f64() - 1.224_646_799_147_353_2e-16).abs() < 1e-30);
    }

    #[test]
    fn encodings_round_trip() {
        let x = DoubleDouble::pi(106);
        assert_eq!(DoubleDouble::decode(&x.encode(), 106), Some(x));
        let y = BigReal::pi(200);
        let z = BigReal::decode(&y.encode(), 200).unwrap();
        assert_eq!(y.sub(&z).to_f64(), 0.0);
        assert_eq!(f64::decode(&0.1f64.encode(), 53), Some(0.1));
    }

    #[test]
    fn split_int_recovers_large_integers() {
        let big = DoubleDouble::from_f64(2f64.powi(60), 106).add(&DoubleDouble::from_f64(3.25, 106));
        let (i, r) = big.split_int();
        assert_eq!(i, (1i128 << 60) + 3);
        assert!((r - 0.25).abs() < 1e-12);
        let b = BigReal::from_f64(1e20, 128).add(&BigReal::from_f64(0.25, 128));
        let (i, r) = b.split_int();
        assert_eq!(r, 0.25);
        assert_eq!(i, 100_000_000_000_000_000_000);
    }
}
