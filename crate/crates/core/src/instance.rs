//! Members of the family, their addressing keys, and count records.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// `x_1^(n+1) + .. + x_(n+1)^(n+1) + lambda x_1 .. x_(n+1) = 0` in P^n over `field`.
#[derive(Clone, Debug)]
pub struct DworkInstance {
    pub n: u32,
    pub field: Arc<FieldSpec>,
    pub lambda: FieldElement,
    pub psi: Option<FieldElement>,
}

impl DworkInstance {
    pub fn new(n: u32, field: Arc<FieldSpec>, lambda: FieldElement) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if !field.contains(lambda) {
            return Err(Error::FieldMismatch);
        }
        Ok(DworkInstance { n, field, lambda, psi: None })
    }

    /// The member with `lambda = -(n+1) psi`.
    pub fn from_psi(n: u32, field: Arc<FieldSpec>, psi: FieldElement) -> Result<Self> {
        if arith::gcd(n as u64 + 1, field.p() as u64) != 1 {
            return Err(Error::CharacteristicDividesDegree {
                p: field.p(),
                degree: n + 1,
            });
        }
        if !field.contains(psi) {
            return Err(Error::FieldMismatch);
        }
        let lambda = field.mul(field.from_int(-(n as i64 + 1)), psi);
        let mut inst = DworkInstance::new(n, field, lambda)?;
        inst.psi = Some(psi);
        Ok(inst)
    }

    pub fn q(&self) -> u64 {
        self.field.q() as u64
    }

    /// `psi` if given, else `-lambda/(n+1)` when that is defined.
    pub fn psi(&self) -> Option<FieldElement> {
        self.psi.or_else(|| {
            let f = &self.field;
            let k = f.from_int(-(self.n as i64 + 1));
            f.div(self.lambda, k).ok()
        })
    }

    pub fn lambda_key(&self) -> LambdaKey {
        LambdaKey::of(&self.field, self.lambda)
    }

    pub fn key(&self) -> InstanceKey {
        InstanceKey {
            p: self.field.p(),
            m: self.field.m(),
            n: self.n,
            lambda: self.lambda_key(),
        }
    }
}

/// `lambda` addressed by its discrete logarithm, or the literal `zero`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LambdaKey {
    Zero,
    Log(u32),
}

impl LambdaKey {
    pub fn of(f: &FieldSpec, x: FieldElement) -> Self {
        match f.log(x) {
            Ok(l) => LambdaKey::Log(l),
            Err(_) => LambdaKey::Zero,
        }
    }

    pub fn element(self, f: &FieldSpec) -> Result<FieldElement> {
        match self {
            LambdaKey::Zero => Ok(FieldElement::ZERO),
            LambdaKey::Log(l) if l < f.group_order() => Ok(f.exp(l as u64)),
            LambdaKey::Log(l) => Err(Error::InvalidArgument(format!(
                "log index {l} is outside [0, {})",
                f.group_order()
            ))),
        }
    }
}

impl fmt::Display for LambdaKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaKey::Zero => f.write_str("zero"),
            LambdaKey::Log(l) => write!(f, "{l}"),
        }
    }
}

impl FromStr for LambdaKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "zero" {
            return Ok(LambdaKey::Zero);
        }
        s.parse::<u32>()
            .map(LambdaKey::Log)
            .map_err(|_| Error::InvalidArgument(format!("expected a log index or 'zero', got {s:?}")))
    }
}

impl Serialize for LambdaKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LambdaKey::Zero => s.serialize_str("zero"),
            LambdaKey::Log(l) => s.serialize_u32(*l),
        }
    }
}

impl<'de> Deserialize<'de> for LambdaKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Log(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Log(l) => Ok(LambdaKey::Log(l)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceKey {
    pub p: u32,
    pub m: u32,
    pub n: u32,
    pub lambda: LambdaKey,
}

impl fmt::Display for InstanceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} q={}^{} lambda={}", self.n, self.p, self.m, self.lambda)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Direct,
    GaussFormula,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::GaussFormula => "gauss_formula",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub key: InstanceKey,
    pub count_x: Option<u64>,
    pub count_y: Option<u64>,
    pub count_nstar: Option<u64>,
    pub method: Method,
    /// Largest certified error met while rounding (0 for enumeration).
    pub err_budget_used: f64,
}

impl CountRecord {
    /// Checks the record-level invariant linking `count_y` and `count_nstar`.
    pub fn check(&self, q: u64) -> Result<()> {
        if let (Some(y), Some(ns)) = (self.count_y, self.count_nstar) {
            let expected = count_y(self.key.n, q, ns)?;
            if expected != y {
                return Err(Error::InvariantViolated(format!(
                    "{}: count_Y {y} but the N* relation gives {expected}",
                    self.key
                )));
            }
        }
        Ok(())
    }
}

/// `#Y = N* - (q-1)^n/q + (-1)^n/q + (q^n - 1)/(q-1)`, checked to be a
/// nonnegative integer.
pub fn count_y(n: u32, q: u64, nstar: u64) -> Result<u64> {
    use num_bigint::BigInt;
    use num_integer::Integer;

    let qb = BigInt::from(q);
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    let over_q: BigInt = BigInt::from(nstar) * &qb - arith::big_pow(q as i64 - 1, n) + sign;
    let (a, r) = over_q.div_rem(&qb);
    let geom = (arith::big_pow(q as i64, n) - 1u32) / BigInt::from(q - 1);
    if r != BigInt::from(0) {
        return Err(Error::NonIntegral {
            value: format!("({over_q})/{q}"),
            err: 0.0,
        });
    }
    let y = a + geom;
    u64::try_from(&y).map_err(|_| Error::NonIntegral {
        value: y.to_string(),
        err: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    #[test]
    fn psi_parametrisation() {
        let f = make_field(7, 1).unwrap();
        let inst = DworkInstance::from_psi(2, f.clone(), FieldElement::ONE).unwrap();
        assert_eq!(inst.lambda, FieldElement::from_index(4));
        assert_eq!(inst.psi(), Some(FieldElement::ONE));
        let plain = DworkInstance::new(2, f, FieldElement::from_index(4)).unwrap();
        assert_eq!(plain.psi(), Some(FieldElement::ONE));
        let f3 = make_field(3, 1).unwrap();
        assert!(DworkInstance::from_psi(2, f3, FieldElement::ONE).is_err());
    }

    #[test]
    fn lambda_keys_round_trip() {
        let f = make_field(5, 1).unwrap();
        for x in f.elements() {
            let k = LambdaKey::of(&f, x);
            assert_eq!(k.element(&f).unwrap(), x);
            let s = k.to_string();
            assert_eq!(s.parse::<LambdaKey>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(serde_json::from_str::<LambdaKey>(&json).unwrap(), k);
        }
        assert!("x".parse::<LambdaKey>().is_err());
        assert!(LambdaKey::Log(4).element(&f).is_err());
    }

    #[test]
    fn y_correction_is_integral() {
        for n in 1..=4u32 {
            for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13] {
                // N* = (q-1)^n leaves the correction itself; it must be integral.
                let ns = (q - 1).pow(n);
                assert!(count_y(n, q, ns).is_ok(), "n={n} q={q}");
            }
        }
        assert_eq!(count_y(2, 5, 3).unwrap(), 6);
    }
}
