//! Counting by exhaustive enumeration. These are the oracles every formula
//! is checked against, so they follow the defining equations literally.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::instance::{count_y, CountRecord, DworkInstance, Method};

/// Limit on the number of loop iterations one operation may perform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub iterations: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            iterations: 1_000_000_000,
        }
    }
}

impl Budget {
    pub fn new(iterations: u64) -> Self {
        Budget { iterations }
    }

    pub fn check(&self, what: &'static str, size: u128) -> Result<()> {
        if size > self.iterations as u128 {
            return Err(Error::BoundExceeded {
                what,
                size,
                bound: self.iterations as u128,
            });
        }
        Ok(())
    }
}

fn power(base: u64, exp: u32) -> u128 {
    (base as u128).saturating_pow(exp)
}

fn power_table(f: &FieldSpec, e: u64) -> Vec<FieldElement> {
    f.elements().map(|x| f.pow(x, e)).collect()
}

/// Sums `leaf(sum, prod)` over `(x_1, .., x_k) in domain^k`, where `sum` is
/// the running sum of `weight[x_i]` and `prod` the product of the `x_i`.
/// Partitioned on the first coordinate; the reduction is an integer sum.
fn sum_over_tuples<L>(f: &FieldSpec, k: usize, domain: &[FieldElement], weight: &[FieldElement], leaf: L) -> u64
where
    L: Fn(FieldElement, FieldElement) -> u64 + Sync,
{
    fn rec<L: Fn(FieldElement, FieldElement) -> u64>(
        f: &FieldSpec,
        left: usize,
        domain: &[FieldElement],
        weight: &[FieldElement],
        sum: FieldElement,
        prod: FieldElement,
        leaf: &L,
    ) -> u64 {
        if left == 0 {
            return leaf(sum, prod);
        }
        domain
            .iter()
            .map(|&x| {
                let s = f.add(sum, weight[x.index() as usize]);
                rec(f, left - 1, domain, weight, s, f.mul(prod, x), leaf)
            })
            .sum()
    }
    if k == 0 {
        return leaf(FieldElement::ZERO, FieldElement::ONE);
    }
    domain
        .par_iter()
        .map(|&x| rec(f, k - 1, domain, weight, weight[x.index() as usize], x, &leaf))
        .sum()
}

/// Solutions of the X equation with every coordinate drawn from `domain`.
fn affine_x(inst: &DworkInstance, domain: &[FieldElement]) -> u64 {
    let f = &*inst.field;
    let pw = power_table(f, inst.n as u64 + 1);
    let lambda = inst.lambda;
    sum_over_tuples(f, inst.n as usize, domain, &pw, |sum, prod| {
        let lp = f.mul(lambda, prod);
        domain
            .iter()
            .filter(|&&x| f.add(f.add(sum, pw[x.index() as usize]), f.mul(lp, x)).is_zero())
            .count() as u64
    })
}

fn exact_projective(affine: u64, q: u64, what: &str) -> Result<u64> {
    if !affine.is_multiple_of(q - 1) {
        return Err(Error::InvariantViolated(format!(
            "{what}: {affine} affine solutions are not a multiple of q - 1 = {}",
            q - 1
        )));
    }
    Ok(affine / (q - 1))
}

/// `#X_lambda(F_q)` in P^n, via affine solutions: `(A - 1)/(q - 1)`.
pub fn count_x_direct(inst: &DworkInstance, budget: &Budget) -> Result<u64> {
    let q = inst.q();
    budget.check("affine enumeration of X", power(q, inst.n + 1))?;
    let all: Vec<FieldElement> = inst.field.elements().collect();
    let affine = affine_x(inst, &all);
    exact_projective(affine - 1, q, "X")
}

/// Both evaluations of `N*`: the torus equation `g = 0` in n variables and the
/// system `x_1 + .. + x_(n+1) = -lambda, x_1 .. x_(n+1) = 1`.
pub fn count_nstar_both(inst: &DworkInstance, budget: &Budget) -> Result<(u64, u64)> {
    let f = &*inst.field;
    let q = inst.q();
    budget.check("torus enumeration of N*", power(q - 1, inst.n))?;
    let units: Vec<FieldElement> = f.nonzero_elements().collect();
    let ident: Vec<FieldElement> = f.elements().collect();
    let lambda = inst.lambda;
    let n = inst.n as usize;

    // g(x) = x_1 + .. + x_n + 1/(x_1 .. x_n) + lambda
    let torus = sum_over_tuples(f, n, &units, &ident, |sum, prod| {
        let inv = f.inv(prod).expect("units");
        f.add(f.add(sum, inv), lambda).is_zero() as u64
    });
    // x_(n+1) is determined by the linear equation; keep it if the product is 1.
    let minus_lambda = f.neg(lambda);
    let toric = sum_over_tuples(f, n, &units, &ident, |sum, prod| {
        let last = f.sub(minus_lambda, sum);
        (!last.is_zero() && f.mul(prod, last) == FieldElement::ONE) as u64
    });
    Ok((torus, toric))
}

pub fn count_nstar_direct(inst: &DworkInstance, budget: &Budget) -> Result<u64> {
    let (torus, toric) = count_nstar_both(inst, budget)?;
    if torus != toric {
        return Err(Error::OracleMismatch(format!(
            "{}: N* is {torus} on the torus but {toric} from the toric system",
            inst.key()
        )));
    }
    Ok(torus)
}

/// `M_i^*`: points of P^(n-i) with all coordinates nonzero on
/// `x_(i+1)^(n+1) + .. + x_(n+1)^(n+1) = 0`.
pub fn count_diagonal(i: u32, n: u32, f: &FieldSpec, budget: &Budget) -> Result<u64> {
    if n < 2 || i < 1 || i > n - 1 {
        return Err(Error::InvalidArgument(format!("diagonal index {i} outside [1, {}]", n.saturating_sub(1))));
    }
    let q = f.q() as u64;
    let vars = n + 1 - i;
    budget.check("diagonal enumeration", power(q - 1, vars))?;
    let units: Vec<FieldElement> = f.nonzero_elements().collect();
    let pw = power_table(f, n as u64 + 1);
    let affine = sum_over_tuples(f, vars as usize, &units, &pw, |sum, _| sum.is_zero() as u64);
    exact_projective(affine, q, "diagonal")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Points of X with every coordinate nonzero.
    pub m0: u64,
    /// `M_1^*, .., M_(n-1)^*`.
    pub mi: Vec<u64>,
    /// `M_0^* + sum_i binom(n+1, i) M_i^*`.
    pub recomposed: u64,
}

/// Splits `#X` by the number of vanishing coordinates.
pub fn decompose_x(inst: &DworkInstance, budget: &Budget) -> Result<Decomposition> {
    let f = &*inst.field;
    let q = inst.q();
    let n = inst.n;
    budget.check("torus enumeration of X", power(q - 1, n + 1))?;
    let units: Vec<FieldElement> = f.nonzero_elements().collect();
    let m0 = exact_projective(affine_x(inst, &units), q, "M_0")?;
    let mi = (1..n).map(|i| count_diagonal(i, n, f, budget)).collect::<Result<Vec<_>>>()?;
    let recomposed = m0
        + mi.iter()
            .enumerate()
            .map(|(j, &m)| arith::binomial(n as u64 + 1, j as u64 + 1) * m)
            .sum::<u64>();
    Ok(Decomposition { m0, mi, recomposed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupOrders {
    pub d: u64,
    /// The order `d^n` stated for G.
    pub stated: u64,
    /// Classes of `(zeta_1, .., zeta_(n+1))`, `zeta_j^(n+1) = 1`, product 1,
    /// modulo the diagonal.
    pub enumerated: u64,
    /// `(i, d^(n-i), enumerated #G_i)` for `1 <= i <= n-1`.
    pub partial: Vec<(u32, u64, u64)>,
}

/// Orders of the root-of-unity groups acting on the torus strata.
pub fn group_order(n: u32, f: &FieldSpec, budget: &Budget) -> Result<GroupOrders> {
    let q = f.q() as u64;
    let d = arith::gcd(n as u64 + 1, q - 1);
    budget.check("root-of-unity tuples", power(d, n + 1))?;
    let roots: Vec<FieldElement> = f
        .nonzero_elements()
        .filter(|&x| f.pow(x, n as u64 + 1) == FieldElement::ONE)
        .collect();
    debug_assert_eq!(roots.len() as u64, d);

    let classes = |len: u32, product_one: bool| -> u64 {
        let mut seen = HashSet::new();
        let mut idx = vec![0usize; len as usize];
        loop {
            let tuple: Vec<FieldElement> = idx.iter().map(|&j| roots[j]).collect();
            let prod = tuple.iter().fold(FieldElement::ONE, |a, &b| f.mul(a, b));
            if !product_one || prod == FieldElement::ONE {
                // normal form: scale so the first entry is 1
                let s = f.inv(tuple[0]).expect("root of unity");
                let normal: Vec<u32> = tuple.iter().map(|&z| f.mul(z, s).index()).collect();
                seen.insert(normal);
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return seen.len() as u64;
                }
                idx[pos] += 1;
                if idx[pos] < roots.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    };
    let enumerated = classes(n + 1, true);
    let partial = (1..n)
        .map(|i| (i, d.pow(n - i), classes(n + 1 - i, false)))
        .collect();
    Ok(GroupOrders {
        d,
        stated: d.pow(n),
        enumerated,
        partial,
    })
}

/// `#X`, `N*` and `#Y` by enumeration, as one record.
pub fn count_record_direct(inst: &DworkInstance, budget: &Budget) -> Result<CountRecord> {
    let x = count_x_direct(inst, budget)?;
    let nstar = count_nstar_direct(inst, budget)?;
    let y = count_y(inst.n, inst.q(), nstar)?;
    Ok(CountRecord {
        key: inst.key(),
        count_x: Some(x),
        count_y: Some(y),
        count_nstar: Some(nstar),
        method: Method::Direct,
        err_budget_used: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn inst(n: u32, p: u32, m: u32, lambda: u32) -> DworkInstance {
        DworkInstance::new(n, make_field(p, m).unwrap(), FieldElement::from_index(lambda)).unwrap()
    }

    /// Projective points by normalised representatives (first nonzero = 1),
    /// an enumeration independent of the affine one.
    fn projective_oracle(inst: &DworkInstance) -> u64 {
        let f = &*inst.field;
        let n = inst.n as usize;
        let q = f.q();
        let mut count = 0;
        let mut x = vec![0u32; n + 1];
        for lead in 0..=n {
            let free = n - lead;
            let total = (q as u64).pow(free as u32);
            for code in 0..total {
                let mut c = code;
                for v in x.iter_mut() {
                    *v = 0;
                }
                x[lead] = 1;
                for v in x.iter_mut().skip(lead + 1) {
                    *v = (c % q as u64) as u32;
                    c /= q as u64;
                }
                let mut sum = FieldElement::ZERO;
                let mut prod = FieldElement::ONE;
                for &v in &x {
                    let e = FieldElement::from_index(v);
                    sum = f.add(sum, f.pow(e, n as u64 + 1));
                    prod = f.mul(prod, e);
                }
                if f.add(sum, f.mul(inst.lambda, prod)).is_zero() {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn conics_at_lambda_zero() {
        assert_eq!(count_x_direct(&inst(1, 5, 1, 0), &Budget::default()).unwrap(), 2);
        assert_eq!(count_x_direct(&inst(1, 7, 1, 0), &Budget::default()).unwrap(), 0);
        assert_eq!(count_nstar_direct(&inst(1, 5, 1, 0), &Budget::default()).unwrap(), 2);
        assert_eq!(count_nstar_direct(&inst(1, 7, 1, 0), &Budget::default()).unwrap(), 0);
    }

    #[test]
    fn affine_and_projective_counts_agree() {
        for (n, p, m) in [(1, 5, 1), (2, 5, 1), (2, 7, 1), (2, 2, 2), (3, 3, 1), (2, 3, 2)] {
            let f = make_field(p, m).unwrap();
            for l in 0..f.q() {
                let i = inst(n, p, m, l);
                let x = count_x_direct(&i, &Budget::default()).unwrap();
                assert_eq!(x, projective_oracle(&i), "n={n} q={p}^{m} lambda={l}");
                let bound = ((f.q() as u64).pow(n + 1) - 1) / (f.q() as u64 - 1);
                assert!(x <= bound);
            }
        }
    }

    #[test]
    fn known_small_counts() {
        // n = 2 over F_7: smooth cubics have 9 points, the three singular
        // members (psi^3 = 1) are triangles of lines with 21.
        let f = make_field(7, 1).unwrap();
        for l in f.elements() {
            let i = DworkInstance::new(2, f.clone(), l).unwrap();
            let r = count_record_direct(&i, &Budget::default()).unwrap();
            let psi = i.psi().unwrap();
            let singular = f.pow(psi, 3) == FieldElement::ONE;
            assert_eq!(r.count_x, Some(if singular { 21 } else { 9 }));
            assert_eq!(r.count_y, Some(if singular { 7 } else { 9 }));
        }
        // n = 2 over F_5, lambda = 0..4
        let expect = [(6, 6, 3), (6, 6, 3), (7, 7, 4), (3, 3, 0), (9, 9, 6)];
        for (l, &(x, y, ns)) in expect.iter().enumerate() {
            let r = count_record_direct(&inst(2, 5, 1, l as u32), &Budget::default()).unwrap();
            assert_eq!((r.count_x, r.count_y, r.count_nstar), (Some(x), Some(y), Some(ns)));
            r.check(5).unwrap();
        }
    }

    #[test]
    fn decomposition_recomposes() {
        for (n, p, m) in [(2, 7, 1), (3, 5, 1), (2, 2, 2), (3, 3, 1), (4, 11, 1)] {
            let f = make_field(p, m).unwrap();
            for l in [0u32, 1, 2] {
                let i = inst(n, p, m, l);
                let dec = decompose_x(&i, &Budget::default()).unwrap();
                assert_eq!(dec.recomposed, count_x_direct(&i, &Budget::default()).unwrap());
                let d = arith::gcd(n as u64 + 1, f.q() as u64 - 1);
                for (j, &mi) in dec.mi.iter().enumerate() {
                    assert_eq!(mi % d.pow(n - 1 - j as u32), 0);
                }
            }
        }
    }

    #[test]
    fn diagonal_counts() {
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(count_diagonal(1, 2, &f5, &Budget::default()).unwrap(), 1);
        assert!(count_diagonal(0, 2, &f5, &Budget::default()).is_err());
        assert!(count_diagonal(2, 2, &f5, &Budget::default()).is_err());
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(count_diagonal(1, 2, &f7, &Budget::default()).unwrap() % 3, 0);
    }

    #[test]
    fn root_of_unity_groups() {
        let f7 = make_field(7, 1).unwrap();
        let g = group_order(2, &f7, &Budget::default()).unwrap();
        assert_eq!((g.d, g.stated), (3, 9));
        // the product-one subgroup modulo the diagonal has d^(n-1) classes
        assert_eq!(g.enumerated, 3);
        assert_eq!(g.partial, vec![(1, 3, 3)]);
        let f5 = make_field(5, 1).unwrap();
        let g = group_order(2, &f5, &Budget::default()).unwrap();
        assert_eq!((g.d, g.stated, g.enumerated), (1, 1, 1));
        let f11 = make_field(11, 1).unwrap();
        let g = group_order(4, &f11, &Budget::default()).unwrap();
        assert_eq!((g.d, g.stated, g.enumerated), (5, 625, 125));
    }

    #[test]
    fn budget_refuses_large_enumerations() {
        let i = inst(3, 13, 1, 1);
        let err = count_x_direct(&i, &Budget::new(1000)).unwrap_err();
        assert!(matches!(err, Error::BoundExceeded { .. }));
    }
}
