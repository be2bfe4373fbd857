//! Integer polynomials in `1 + T Z[T]` and their complex roots.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients low degree first, trailing zeros trimmed, constant term 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.first().is_none_or(|c| !c.is_one()) {
            return Err(Error::InvalidArgument("constant term must be 1".into()));
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> Self {
        IntPolynomial { coeffs: vec![BigInt::one()] }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out).expect("constant terms multiply to 1")
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// All complex roots by Aberth iteration, in the order the iteration
    /// leaves them.
    pub fn complex_roots(&self) -> Result<Vec<Complex64>> {
        let d = self.degree();
        if d == 0 {
            return Ok(Vec::new());
        }
        let a: Vec<f64> = self
            .coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
            .collect();
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::RootFindingFailure("coefficients exceed f64 range".into()));
        }
        let eval = |z: Complex64| -> (Complex64, Complex64) {
            let mut p = Complex64::new(0.0, 0.0);
            let mut dp = Complex64::new(0.0, 0.0);
            for &c in a.iter().rev() {
                dp = dp * z + p;
                p = p * z + c;
            }
            (p, dp)
        };
        let radius = (a[0].abs() / a[d].abs()).powf(1.0 / d as f64);
        let mut z: Vec<Complex64> = (0..d)
            .map(|j| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / d as f64 + 0.4))
            .collect();
        for _ in 0..2000 {
            let mut worst = 0f64;
            for i in 0..d {
                let (p, dp) = eval(z[i]);
                if p == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let ratio = p / dp;
                let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
                let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                if w.is_finite() {
                    z[i] -= w;
                    worst = worst.max(w.norm() / z[i].norm().max(f64::MIN_POSITIVE));
                }
            }
            if worst < 1e-14 {
                return Ok(z);
            }
        }
        Err(Error::RootFindingFailure(format!("no convergence for {self}")))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("T")?,
                (1, false) => write!(f, "{mag}T")?,
                (_, true) => write!(f, "T^{i}")?,
                (_, false) => write!(f, "{mag}T^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_term_enforced() {
        assert!(IntPolynomial::from_i64(&[2, 1]).is_err());
        assert_eq!(IntPolynomial::from_i64(&[1, -5, 6, 0, 0]).unwrap().degree(), 2);
    }

    #[test]
    fn display() {
        let p = IntPolynomial::from_i64(&[1, -5, 6, 0, 1]).unwrap();
        assert_eq!(p.to_string(), "1 - 5T + 6T^2 + T^4");
    }

    #[test]
    fn multiplication() {
        let a = IntPolynomial::from_i64(&[1, -2]).unwrap();
        let b = IntPolynomial::from_i64(&[1, -3]).unwrap();
        assert_eq!(a.mul(&b), IntPolynomial::from_i64(&[1, -5, 6]).unwrap());
        assert_eq!(a.pow(2), IntPolynomial::from_i64(&[1, -4, 4]).unwrap());
    }

    #[test]
    fn roots_of_small_polynomials() {
        let p = IntPolynomial::from_i64(&[1, -5, 6]).unwrap();
        let mut r: Vec<f64> = p.complex_roots().unwrap().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        assert!((r[0] - 1.0 / 3.0).abs() < 1e-12 && (r[1] - 0.5).abs() < 1e-12);
        let c = IntPolynomial::from_i64(&[1, 1, 1]).unwrap();
        for z in c.complex_roots().unwrap() {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }
}
