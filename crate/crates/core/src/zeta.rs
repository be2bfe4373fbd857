//! Truncated zeta series, the signed quotient and its structure checks.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::IntPolynomial;

/// `c_0 + c_1 T + .. + c_K T^K (mod T^(K+1))` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        TruncatedSeries { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); order + 1];
        coeffs[0] = BigRational::one();
        Self::new(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.coeffs[i]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        let mut out = vec![BigRational::zero(); k + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(k + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(k + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len()];
        out[0] = c0.recip();
        for m in 1..out.len() {
            let s: BigRational = (1..=m).map(|i| &self.coeffs[i] * &out[m - i]).sum();
            out[m] = -s / c0;
        }
        Ok(Self::new(out))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.order()), |acc, _| acc.mul(self))
    }

    /// `s(T^k)`, keeping the order of `s` times `k`.
    pub fn substitute_power(&self, k: usize) -> Self {
        let mut out = vec![BigRational::zero(); self.order() * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k] = c.clone();
        }
        Self::new(out)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Exponents with a nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i).collect()
    }

    pub fn all_integer(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// The counts `N_1..N_K` whose zeta this is (logarithmic derivative).
    pub fn counts(&self) -> Vec<BigRational> {
        let k = self.order();
        let mut n: Vec<BigRational> = Vec::with_capacity(k);
        for m in 1..=k {
            let mut v = BigRational::from_integer(BigInt::from(m)) * &self.coeffs[m];
            for j in 1..m {
                v -= &n[j - 1] * &self.coeffs[m - j];
            }
            n.push(v);
        }
        n
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

/// `exp(sum_k N_k T^k / k)` to order `K = counts.len()`.
pub fn zeta_from_counts(counts: &[u64]) -> TruncatedSeries {
    let k = counts.len();
    let mut z = vec![BigRational::zero(); k + 1];
    z[0] = BigRational::one();
    for m in 1..=k {
        let s: BigRational = (1..=m)
            .map(|j| BigRational::from_integer(BigInt::from(counts[j - 1])) * &z[m - j])
            .sum();
        z[m] = s / BigRational::from_integer(BigInt::from(m));
    }
    TruncatedSeries::new(z)
}

/// `(zx / zy)^((-1)^n)`.
pub fn signed_quotient(zx: &TruncatedSeries, zy: &TruncatedSeries, n: u32) -> Result<TruncatedSeries> {
    if zx.order() != zy.order() {
        return Err(Error::OrderMismatch(format!("{} vs {}", zx.order(), zy.order())));
    }
    if n.is_multiple_of(2) {
        zx.div(zy)
    } else {
        zy.div(zx)
    }
}

/// `base(T)^k = ext(T^k)` through the common order.
pub fn kth_root_check(base: &TruncatedSeries, ext: &TruncatedSeries, k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let common = base.order().min(ext.order() * k);
    if common < k {
        return Err(Error::OrderMismatch(format!(
            "base order {} and extension order {} leave nothing to compare for k = {k}",
            base.order(),
            ext.order()
        )));
    }
    let lhs = base.truncate(common).pow(k as u32);
    let rhs = ext.substitute_power(k).truncate(common);
    Ok(lhs == rhs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Detection {
    Polynomial(IntPolynomial),
    /// The order does not exceed `max_deg`, so vanishing beyond it is unconfirmed.
    Insufficient,
    /// A coefficient beyond `max_deg` is nonzero.
    NotPolynomial { exponent: usize },
}

pub fn detect_polynomial(s: &TruncatedSeries, max_deg: usize) -> Result<Detection> {
    for (i, c) in s.coeffs().iter().enumerate() {
        if !c.is_integer() {
            return Err(Error::NonIntegerCoefficient {
                index: i,
                value: c.to_string(),
            });
        }
    }
    if s.order() <= max_deg {
        return Ok(Detection::Insufficient);
    }
    if let Some(exponent) = s.support().into_iter().find(|&i| i > max_deg) {
        return Ok(Detection::NotPolynomial { exponent });
    }
    let coeffs = s.coeffs()[..=max_deg].iter().map(|c| c.to_integer()).collect();
    Ok(Detection::Polynomial(IntPolynomial::new(coeffs)?))
}

/// `n (n^n - (-1)^n)/(n+1) - n`.
pub fn degree_formula(n: u32) -> BigInt {
    let nb = BigInt::from(n);
    let sign = if n.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    let num = &nb * (num_traits::pow(nb.clone(), n as usize) - sign);
    let den = BigInt::from(n + 1);
    assert!((&num % &den).is_zero(), "n (n^n - (-1)^n) is divisible by n + 1");
    num / den - nb
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurityVerdict {
    /// `|alpha|` for each reciprocal root, in root-finder order.
    pub magnitudes: Vec<f64>,
    pub target: f64,
    pub per_root: Vec<bool>,
    pub pure: bool,
}

/// Whether every reciprocal root has absolute value `q_eff^(w/2)` within
/// relative tolerance `tol`.
pub fn purity_check(p: &IntPolynomial, q_eff: &BigInt, w: i32, tol: f64) -> Result<PurityVerdict> {
    if p.degree() == 0 {
        return Err(Error::InvalidArgument("purity needs a polynomial of degree at least 1".into()));
    }
    let roots = p.complex_roots()?;
    let q = q_eff.to_f64().ok_or_else(|| Error::InvalidArgument("q_eff out of range".into()))?;
    let target = q.powf(w as f64 / 2.0);
    let magnitudes: Vec<f64> = roots.iter().map(|z| 1.0 / z.norm()).collect();
    let per_root: Vec<bool> = magnitudes.iter().map(|m| (m - target).abs() < tol * target).collect();
    Ok(PurityVerdict {
        pure: per_root.iter().all(|&b| b),
        magnitudes,
        target,
        per_root,
    })
}

/// `lambda^(n+1) != (-(n+1))^(n+1)` in the field.
pub fn is_smooth(n: u32, f: &Arc<FieldSpec>, lambda: FieldElement) -> Result<bool> {
    if arith::gcd(n as u64 + 1, f.p() as u64) != 1 {
        return Err(Error::CharacteristicDividesDegree { p: f.p(), degree: n + 1 });
    }
    let e = n as u64 + 1;
    let lhs = f.pow(lambda, e);
    let rhs = f.pow(f.from_int(-(n as i64 + 1)), e);
    Ok(lhs != rhs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorReport {
    pub polynomial: String,
    pub coefficients: Vec<String>,
    pub degree: usize,
    pub multiplicity: u32,
    pub purity: Option<PurityVerdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DetectionReport {
    Polynomial { degree: usize, coefficients: Vec<String> },
    Partial { consistent_through: usize },
    NotPolynomial { exponent: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub n: u32,
    pub p: u32,
    pub m: u32,
    pub lambda: String,
    /// Whether the member passes the smoothness gate.
    pub smooth: bool,
    pub order: usize,
    /// Multiplicative order of q modulo n + 1.
    pub k: u64,
    pub counts_x: Vec<u64>,
    pub counts_y: Vec<u64>,
    pub coefficients: Vec<String>,
    pub support: Vec<usize>,
    pub integral: bool,
    pub support_in_k_z: bool,
    pub kth_root: Option<bool>,
    pub detection: DetectionReport,
    pub factors: Vec<FactorReport>,
    pub degree_formula: String,
    pub degree_consistent: Option<bool>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use proptest::prelude::*;
    use num_traits::Signed;

    fn ints(s: &TruncatedSeries) -> Vec<i64> {
        s.coeffs().iter().map(|c| c.to_integer().to_i64().unwrap()).collect()
    }

    #[test]
    fn point_and_projective_line() {
        assert_eq!(ints(&zeta_from_counts(&[1; 6])), vec![1; 7]);
        let q = 3u64;
        let counts: Vec<u64> = (1..=6).map(|k| q.pow(k) + 1).collect();
        // 1/((1-T)(1-3T)) has coefficients (3^(m+1) - 1)/2
        let expected: Vec<i64> = (0..=6).map(|m| (3i64.pow(m + 1) - 1) / 2).collect();
        assert_eq!(ints(&zeta_from_counts(&counts)), expected);
    }

    #[test]
    fn quotient_of_equal_series_is_one() {
        let z = zeta_from_counts(&[3, 9, 27, 81]);
        for n in 1..4 {
            assert!(signed_quotient(&z, &z, n).unwrap().is_one());
        }
        let short = zeta_from_counts(&[3, 9]);
        assert!(signed_quotient(&z, &short, 2).is_err());
    }

    #[test]
    fn kth_root_identity() {
        let base = TruncatedSeries::from_integers(&[1, 0, 3, 0, 5, 0, 7]);
        let ext = base.pow(2).truncate(6);
        // base(T)^2 has support in 2Z; reinterpret it as a series in T^2
        let halved = TruncatedSeries::new(ext.coeffs().iter().step_by(2).cloned().collect());
        assert!(kth_root_check(&base, &halved, 2).unwrap());
        let mut bent = halved.coeffs().to_vec();
        bent[2] += BigRational::one();
        assert!(!kth_root_check(&base, &TruncatedSeries::new(bent), 2).unwrap());
        assert!(kth_root_check(&base, &base, 1).unwrap());
        assert!(kth_root_check(&base, &halved, 8).is_err());
    }

    #[test]
    fn polynomial_detection() {
        let s = TruncatedSeries::from_integers(&[1, -5, 6, 0, 0, 0]);
        assert_eq!(
            detect_polynomial(&s, 2).unwrap(),
            Detection::Polynomial(IntPolynomial::from_i64(&[1, -5, 6]).unwrap())
        );
        assert_eq!(detect_polynomial(&s, 6).unwrap(), Detection::Insufficient);
        let geom = TruncatedSeries::from_integers(&[1; 11]);
        assert_eq!(detect_polynomial(&geom, 3).unwrap(), Detection::NotPolynomial { exponent: 4 });
        let half = TruncatedSeries::new(vec![BigRational::one(), BigRational::new(1.into(), 2.into())]);
        assert!(matches!(detect_polynomial(&half, 0), Err(Error::NonIntegerCoefficient { index: 1, .. })));
    }

    #[test]
    fn degree_formula_values() {
        let vals: Vec<BigInt> = (2..=4).map(degree_formula).collect();
        assert_eq!(vals, vec![0.into(), 18.into(), 200.into()]);
        assert_eq!(degree_formula(1), BigInt::zero());
    }

    #[test]
    fn purity() {
        let q = BigInt::from(7);
        let line = IntPolynomial::from_i64(&[1, -7]).unwrap();
        assert!(purity_check(&line, &q, 2, 1e-9).unwrap().pure);
        let one = IntPolynomial::from_i64(&[1, 1]).unwrap();
        assert!(purity_check(&one, &BigInt::from(123), 0, 1e-9).unwrap().pure);
        let two = IntPolynomial::from_i64(&[1, -2]).unwrap();
        assert!(!purity_check(&two, &q, 0, 1e-9).unwrap().pure);
        // weight one: 1 - 2T + 7T^2 has |alpha| = sqrt 7
        let ell = IntPolynomial::from_i64(&[1, -2, 7]).unwrap();
        assert!(purity_check(&ell, &q, 1, 1e-9).unwrap().pure);
    }

    #[test]
    fn smoothness_gate() {
        let f = make_field(11, 1).unwrap();
        // psi = 1 is lambda = -5
        assert!(!is_smooth(4, &f, f.from_int(-5)).unwrap());
        assert!(is_smooth(4, &f, FieldElement::ZERO).unwrap());
        // 2^5 = 10 and (-5)^5 = 6^5 = 10 in F_11
        assert!(!is_smooth(4, &f, f.from_int(2)).unwrap());
        assert!(is_smooth(4, &f, f.from_int(3)).unwrap());
        let f5 = make_field(5, 1).unwrap();
        assert!(is_smooth(4, &f5, FieldElement::ONE).is_err());
    }

    proptest! {
        #[test]
        fn exp_log_round_trip(counts in proptest::collection::vec(0u64..10_000, 1..9)) {
            let z = zeta_from_counts(&counts);
            let back: Vec<BigRational> = z.counts();
            let expected: Vec<BigRational> = counts.iter().map(|&c| BigRational::from_integer(c.into())).collect();
            prop_assert_eq!(back, expected);
            prop_assert!(z.coeff(0).is_one());
        }
    }

    #[test]
    fn variety_counts_give_integer_zeta() {
        // elliptic curve y^2 = x^3 + 1 over F_5: 6 points, a = 0
        let counts: Vec<u64> = (1..=8u32)
            .map(|k| {
                let q = 5i64.pow(k);
                let alpha_sum = if k % 2 == 1 { 0 } else { 2 * (-5i64).pow(k / 2) };
                (q + 1 - alpha_sum) as u64
            })
            .collect();
        let z = zeta_from_counts(&counts);
        assert!(z.all_integer());
        assert!(z.coeffs().iter().all(|c| !c.is_negative()));
    }
}
