//! Complex numbers with a certified absolute error bound.

use crate::numeric::Real;

/// Inflation applied whenever an error bound is evaluated in f64.
const BOUND_SLACK: f64 = 1.0 + 8.0 * f64::EPSILON;

/// A complex value `re + i im` whose exact counterpart lies within `err`
/// (in absolute value) of it.
#[derive(Clone, Debug)]
pub struct ComplexApprox<R> {
    pub re: R,
    pub im: R,
    pub err: f64,
}

impl<R: Real> ComplexApprox<R> {
    pub fn new(re: R, im: R, err: f64) -> Self {
        debug_assert!(err >= 0.0);
        ComplexApprox { re, im, err }
    }

    pub fn exact(re: R, im: R) -> Self {
        ComplexApprox { re, im, err: 0.0 }
    }

    /// An exactly representable integer (|x| < 2^53).
    pub fn from_int(x: i64, prec: u32) -> Self {
        debug_assert!(x.unsigned_abs() < 1 << 53);
        Self::exact(R::from_f64(x as f64, prec), R::zero(prec))
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_int(0, prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    pub fn precision(&self) -> u32 {
        self.re.precision()
    }

    /// Upper bound on |re| + |im| of the stored value.
    pub fn magnitude_bound(&self) -> f64 {
        self.re.abs_bound() + self.im.abs_bound()
    }

    /// Upper bound on the modulus of the stored value.
    pub fn modulus_bound(&self) -> f64 {
        let (a, b) = (self.re.abs_bound(), self.im.abs_bound());
        (a * a + b * b).sqrt() * BOUND_SLACK
    }

    fn rounding(&self) -> f64 {
        self.re.unit_roundoff()
    }

    pub fn add(&self, other: &Self) -> Self {
        let re = self.re.add(&other.re);
        let im = self.im.add(&other.im);
        let round = self.rounding() * (re.abs_bound() + im.abs_bound());
        let err = (self.err + other.err + round) * BOUND_SLACK;
        ComplexApprox { re, im, err }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        let round = 3.0 * self.rounding() * self.magnitude_bound() * other.magnitude_bound();
        let ma = self.modulus_bound();
        let mb = other.modulus_bound();
        let err = (round + ma * other.err + mb * self.err + self.err * other.err) * BOUND_SLACK;
        ComplexApprox { re, im, err }
    }

    /// Multiplies by a real approximation `x` known to within `x_err`.
    pub fn scale(&self, x: &R, x_err: f64) -> Self {
        let re = self.re.mul(x);
        let im = self.im.mul(x);
        let mx = x.abs_bound();
        let round = self.rounding() * self.magnitude_bound() * mx;
        let err = (round + self.modulus_bound() * x_err + mx * self.err + self.err * x_err) * BOUND_SLACK;
        ComplexApprox { re, im, err }
    }

    pub fn neg(&self) -> Self {
        ComplexApprox {
            re: self.re.neg(),
            im: self.im.neg(),
            err: self.err,
        }
    }

    pub fn conj(&self) -> Self {
        ComplexApprox {
            re: self.re.clone(),
            im: self.im.neg(),
            err: self.err,
        }
    }

    /// Multiplication by i^k, exact.
    pub fn rotate_quarter(&self, k: u32) -> Self {
        let (re, im) = match k % 4 {
            0 => (self.re.clone(), self.im.clone()),
            1 => (self.im.neg(), self.re.clone()),
            2 => (self.re.neg(), self.im.neg()),
            _ => (self.im.clone(), self.re.neg()),
        };
        ComplexApprox { re, im, err: self.err }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Approximate |z|^2 as f64 (diagnostics only).
    pub fn norm_sqr_f64(&self) -> f64 {
        let (a, b) = self.to_f64_pair();
        a * a + b * b
    }

    /// True when the two disks of uncertainty intersect (with `slack` added).
    pub fn overlaps(&self, other: &Self, slack: f64) -> bool {
        let d = self.sub(other);
        let (a, b) = d.to_f64_pair();
        (a * a + b * b).sqrt() <= self.err + other.err + slack + d.err
    }
}

/// `exp(2 pi i num / den)` with a certified error bound.
pub fn unit_root<R: Real>(num: u64, den: u64, prec: u32) -> ComplexApprox<R> {
    assert!(den > 0);
    let r = (num % den) as u128;
    let den = den as u128;
    // quadrant k and position 4r - k den within it, in units of 1/(4 den) turns
    let k = (4 * r / den) as u32;
    let t = 4 * r - k as u128 * den;
    let base = if 2 * t <= den {
        small_angle::<R>(t, den, prec)
    } else {
        // angle = pi/2 - b, so cos and sin swap
        let s = small_angle::<R>(den - t, den, prec);
        ComplexApprox {
            re: s.im,
            im: s.re,
            err: s.err,
        }
    };
    base.rotate_quarter(k)
}

/// `(cos a, sin a)` for `a = pi t / (2 den)`, `0 <= t <= den / 2`.
fn small_angle<R: Real>(t: u128, den: u128, prec: u32) -> ComplexApprox<R> {
    if t == 0 {
        return ComplexApprox::one(prec);
    }
    let u_ref = R::zero(prec).unit_roundoff();
    // t and 2 den are exact in f64 for every table size used here.
    debug_assert!(2 * den < 1 << 53);
    let a = R::pi(prec)
        .mul(&R::from_f64(t as f64, prec))
        .div(&R::from_f64((2 * den) as f64, prec));
    let a2 = a.mul(&a);
    let tiny = 2f64.powi(-(prec as i32) - 4);

    let mut sin = a.clone();
    let mut cos = R::from_f64(1.0, prec);
    let mut term_s = a.clone();
    let mut term_c = R::from_f64(1.0, prec);
    let mut j = 1u64;
    let mut terms = 0u32;
    loop {
        term_c = term_c
            .mul(&a2)
            .div(&R::from_f64(((2 * j - 1) * (2 * j)) as f64, prec))
            .neg();
        term_s = term_s
            .mul(&a2)
            .div(&R::from_f64(((2 * j) * (2 * j + 1)) as f64, prec))
            .neg();
        cos = cos.add(&term_c);
        sin = sin.add(&term_s);
        terms += 1;
        j += 1;
        if term_c.to_f64().abs() < tiny && term_s.to_f64().abs() < tiny {
            break;
        }
    }
    // Angle error (3 roundings on a <= pi/4), truncation (bounded by the last
    // term), and per-term rounding, summed over both components.
    let per_component = 3.0 * u_ref + 2.0 * tiny + (4 * (terms + 2)) as f64 * u_ref;
    ComplexApprox::new(cos, sin, 2.0 * per_component * BOUND_SLACK)
}

/// `exp(2 pi i t / n)` for all t, stored as two tables of size ~sqrt(n).
#[derive(Clone, Debug)]
pub struct RootTable<R> {
    n: u64,
    block: u64,
    low: Vec<ComplexApprox<R>>,
    high: Vec<ComplexApprox<R>>,
}

impl<R: Real> RootTable<R> {
    pub fn new(n: u64, prec: u32) -> Self {
        assert!(n > 0);
        let block = ((n as f64).sqrt().ceil() as u64).max(1);
        let low = (0..block).map(|j| unit_root(j, n, prec)).collect();
        let high = (0..=n / block).map(|h| unit_root(h * block, n, prec)).collect();
        RootTable { n, block, low, high }
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn get(&self, t: u64) -> ComplexApprox<R> {
        let t = t % self.n;
        let (h, l) = (t / self.block, t % self.block);
        if h == 0 {
            self.low[l as usize].clone()
        } else if l == 0 {
            self.high[h as usize].clone()
        } else {
            self.high[h as usize].mul(&self.low[l as usize])
        }
    }

    /// `exp(-2 pi i t / n)`.
    pub fn get_conj(&self, t: u64) -> ComplexApprox<R> {
        self.get((self.n - t % self.n) % self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{BigReal, DoubleDouble};

    #[test]
    fn unit_roots_match_libm_and_are_certified() {
        for den in [1u64, 2, 3, 5, 6, 7, 12, 100, 1021] {
            for num in 0..den.min(200) {
                let z: ComplexApprox<DoubleDouble> = unit_root(num, den, 106);
                let ang = 2.0 * std::f64::consts::PI * num as f64 / den as f64;
                let (c, s) = z.to_f64_pair();
                assert!((c - ang.cos()).abs() < 1e-14, "{num}/{den}");
                assert!((s - ang.sin()).abs() < 1e-14, "{num}/{den}");
                assert!(z.err < 1e-27);
            }
        }
    }

    #[test]
    fn exact_quadrant_points() {
        let z: ComplexApprox<DoubleDouble> = unit_root(1, 4, 106);
        assert_eq!(z.to_f64_pair(), (0.0, 1.0));
        let z: ComplexApprox<DoubleDouble> = unit_root(3, 6, 106);
        assert_eq!(z.to_f64_pair(), (-1.0, 0.0));
    }

    #[test]
    fn bigreal_roots_agree_with_double_double() {
        for (num, den) in [(1u64, 5u64), (7, 13), (123, 1000)] {
            let a: ComplexApprox<BigReal> = unit_root(num, den, 200);
            let b: ComplexApprox<DoubleDouble> = unit_root(num, den, 106);
            let dre = a.re.sub(&BigReal::from_f64(b.re.hi(), 200)).sub(&BigReal::from_f64(b.re.lo(), 200));
            let dim = a.im.sub(&BigReal::from_f64(b.im.hi(), 200)).sub(&BigReal::from_f64(b.im.lo(), 200));
            assert!(dre.to_f64().abs() < 1e-29);
            assert!(dim.to_f64().abs() < 1e-29);
            assert!(a.err < 1e-55);
        }
    }

    #[test]
    fn fifth_roots_sum_to_zero_within_error() {
        let mut s = ComplexApprox::<DoubleDouble>::zero(106);
        for j in 0..5 {
            s = s.add(&unit_root(j, 5, 106));
        }
        assert!(s.overlaps(&ComplexApprox::zero(106), 0.0));
        assert!(s.err < 1e-26);
    }

    #[test]
    fn root_table_matches_direct_evaluation() {
        let table = RootTable::<DoubleDouble>::new(1000, 106);
        for t in [0u64, 1, 31, 32, 33, 500, 999, 1000, 2001] {
            let direct: ComplexApprox<DoubleDouble> = unit_root(t, 1000, 106);
            assert!(table.get(t).overlaps(&direct, 0.0));
        }
        assert!(table.get_conj(1).overlaps(&table.get(999), 0.0));
    }

    #[test]
    fn multiplication_error_bound_is_sound() {
        let a: ComplexApprox<f64> = unit_root(1, 7, 53);
        let b: ComplexApprox<f64> = unit_root(2, 7, 53);
        let c = a.mul(&b);
        let exact: ComplexApprox<DoubleDouble> = unit_root(3, 7, 106);
        let (x, y) = c.to_f64_pair();
        let (ex, ey) = exact.to_f64_pair();
        assert!(((x - ex).powi(2) + (y - ey).powi(2)).sqrt() <= c.err);
    }
}
