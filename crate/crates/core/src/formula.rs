//! Point counts from Gauss sums.
//!
//! Exponent vectors `k in [0, q-1]^(n+2)` with `Mk = 0 mod (q-1)` index the
//! terms `S_k = q^(n+1-s)/(q-1)^(n+3-s) prod_j G(k_j) chi(lambda)^(k_(n+2))`,
//! `s` being the number of nonzero entries of `Mk` over the integers. Both
//! representatives 0 and q-1 of the zero residue are enumerated.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::complex::{ComplexApprox, RootTable};
use crate::direct::{count_x_direct, Budget};
use crate::error::{Error, Result};
use crate::field::{make_field, FieldElement};
use crate::gauss::{Convention, GaussMode, GaussTable};
use crate::instance::{count_y, CountRecord, DworkInstance, Method};
use crate::numeric::Real;

/// Largest certified error accepted when rounding a total to an integer.
pub const ROUNDING_BUDGET: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MMatrix {
    pub n: u32,
    pub rows: Vec<Vec<i64>>,
}

/// Row 1 is all ones; row `i+1` is `(n+1) e_i + e_(n+2)`.
pub fn build_m(n: u32) -> MMatrix {
    let size = n as usize + 2;
    let mut rows = vec![vec![1i64; size]];
    for i in 0..=n as usize {
        let mut row = vec![0i64; size];
        row[i] = n as i64 + 1;
        row[size - 1] = 1;
        rows.push(row);
    }
    MMatrix { n, rows }
}

impl MMatrix {
    pub fn apply(&self, k: &[u64]) -> Vec<i64> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(k).map(|(&a, &b)| a * b as i64).sum())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EClass {
    E1,
    E2Star,
    E2Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector {
    pub k: Vec<u64>,
    pub mk: Vec<i64>,
    pub s: u32,
    pub class: EClass,
}

impl ExponentVector {
    /// Classifies `k` if it lies in E for the modulus `q - 1`.
    pub fn classify(n: u32, q: u64, k: &[u64]) -> Option<ExponentVector> {
        let big_n = q - 1;
        assert_eq!(k.len(), n as usize + 2);
        if k.iter().any(|&x| x > big_n) {
            return None;
        }
        let mk = build_m(n).apply(k);
        if mk.iter().any(|&r| r.rem_euclid(big_n as i64) != 0) {
            return None;
        }
        let s = mk.iter().filter(|&&r| r != 0).count() as u32;
        let first = &k[..=n as usize];
        let class = if first.iter().all(|&x| x == first[0]) {
            if first[0] > 0 && first[0] < big_n && s == n + 2 {
                EClass::E2Star
            } else {
                EClass::E2Other
            }
        } else {
            EClass::E1
        };
        Some(ExponentVector {
            k: k.to_vec(),
            mk,
            s,
            class,
        })
    }
}

/// Candidates in `[0, N]` for `k_i` given `k_(n+2) = c`, or `None` when
/// `(n+1) x = -c (mod N)` has no solution.
fn coordinate_candidates(n: u32, big_n: u64, c: u64) -> Option<(Vec<u64>, u64)> {
    let g = arith::gcd(n as u64 + 1, big_n);
    if !c.is_multiple_of(g) {
        return None;
    }
    let step = big_n / g;
    let a = (n as u64 + 1) / g;
    let rhs = ((big_n - c % big_n) % big_n) / g;
    let x0 = if step == 1 {
        0
    } else {
        (rhs as u128 * arith::mod_inverse(a % step, step).expect("coprime") as u128 % step as u128) as u64
    };
    let mut cands: Vec<u64> = (0..g).map(|j| x0 + j * step).collect();
    if x0 == 0 {
        cands.push(big_n);
    }
    Some((cands, step))
}

/// Calls `visit` on every `k in E` with `k_(n+2) = c`, in lexicographic order
/// of the first n coordinates.
fn for_each_with_last(n: u32, big_n: u64, c: u64, mut visit: impl FnMut(&[u64])) {
    let Some((cands, _)) = coordinate_candidates(n, big_n, c) else {
        return;
    };
    let n = n as usize;
    let mut k = vec![0u64; n + 2];
    k[n + 1] = c;
    let mut idx = vec![0usize; n];
    loop {
        let mut partial = c % big_n;
        for (slot, &j) in k.iter_mut().zip(&idx) {
            *slot = cands[j];
            partial = (partial + cands[j]) % big_n;
        }
        let last = (big_n - partial) % big_n;
        k[n] = last;
        visit(&k);
        if last == 0 {
            k[n] = big_n;
            visit(&k);
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < cands.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// All of E, by solving the row congruences coordinatewise.
pub fn enumerate_e(n: u32, q: u64) -> Vec<ExponentVector> {
    let big_n = q - 1;
    let mut out = Vec::new();
    for c in 0..=big_n {
        for_each_with_last(n, big_n, c, |k| {
            out.push(ExponentVector::classify(n, q, k).expect("enumerated vectors lie in E"));
        });
    }
    out
}

/// All of E by scanning `[0, q-1]^(n+2)`; the oracle for [`enumerate_e`].
pub fn enumerate_e_scan(n: u32, q: u64) -> Vec<ExponentVector> {
    let len = n as usize + 2;
    let mut k = vec![0u64; len];
    let mut out = Vec::new();
    loop {
        if let Some(v) = ExponentVector::classify(n, q, &k) {
            out.push(v);
        }
        let mut pos = 0;
        loop {
            if pos == len {
                return out;
            }
            k[pos] += 1;
            if k[pos] < q {
                break;
            }
            k[pos] = 0;
            pos += 1;
        }
    }
}

fn rational_pow(base: i64, e: i32) -> BigRational {
    let b = BigRational::from_integer(BigInt::from(base));
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

/// `q^(n+1-s) / (q-1)^(n+3-s)` exactly.
fn prefactor_exact(n: u32, q: u64, s: u32) -> BigRational {
    rational_pow(q as i64, n as i32 + 1 - s as i32) * rational_pow(q as i64 - 1, s as i32 - n as i32 - 3)
}

/// `S_k` for k with every entry in `{0, q-1}`: exact.
fn degenerate_term(n: u32, q: u64, v: &ExponentVector) -> BigRational {
    let big_n = q - 1;
    let g = v.k.iter().fold(BigInt::one(), |acc, &x| {
        if x == 0 {
            acc * BigInt::from(big_n)
        } else {
            acc * -BigInt::from(q)
        }
    });
    prefactor_exact(n, q, v.s) * BigRational::from_integer(g)
}

fn is_degenerate(k: &[u64], big_n: u64) -> bool {
    k.iter().all(|&x| x == 0 || x == big_n)
}

/// `prefactor(s)` as a real with its absolute error bound.
fn prefactor_real<R: Real>(n: u32, q: u64, s: u32, prec: u32) -> (R, f64) {
    let e_q = n as i32 + 1 - s as i32;
    let e_q1 = s as i32 - n as i32 - 3;
    let qr = R::from_f64(q as f64, prec);
    let q1r = R::from_f64((q - 1) as f64, prec);
    let mut x = R::from_f64(1.0, prec);
    let mut ops = 0u32;
    for (base, e) in [(&qr, e_q), (&q1r, e_q1)] {
        for _ in 0..e.unsigned_abs() {
            x = if e > 0 { x.mul(base) } else { x.div(base) };
            ops += 1;
        }
    }
    let err = x.abs_bound() * x.unit_roundoff() * (ops as f64 + 1.0) * 1.01;
    (x, err)
}

/// One term `S_k`, as an exact rational when every entry is 0 or q-1.
#[derive(Clone, Debug)]
pub struct STerm<R> {
    pub k: Vec<u64>,
    pub value: ComplexApprox<R>,
    pub exact: Option<BigRational>,
}

pub fn s_term<R: Real>(v: &ExponentVector, inst: &DworkInstance, gt: &GaussTable<R>) -> Result<STerm<R>> {
    let n = inst.n;
    let q = inst.q();
    let big_n = q - 1;
    let c = v.k[n as usize + 1];
    let prec = gt.precision();
    if inst.lambda.is_zero() && c != 0 {
        return Err(Error::ZeroLambdaNonzeroK(c));
    }
    if is_degenerate(&v.k, big_n) {
        let exact = degenerate_term(n, q, v);
        let value = rational_to_complex::<R>(&exact, prec);
        return Ok(STerm {
            k: v.k.clone(),
            value,
            exact: Some(exact),
        });
    }
    let (pref, pref_err) = prefactor_real::<R>(n, q, v.s, prec);
    let mut prod = ComplexApprox::one(prec);
    for &kj in &v.k {
        prod = prod.mul(gt.get(kj));
    }
    if !inst.lambda.is_zero() {
        prod = prod.mul(&gt.lambda_power(inst.lambda, c)?);
    }
    Ok(STerm {
        k: v.k.clone(),
        value: prod.scale(&pref, pref_err),
        exact: None,
    })
}

fn rational_to_complex<R: Real>(x: &BigRational, prec: u32) -> ComplexApprox<R> {
    let num = R::from_f64(x.numer().to_f64().unwrap_or(f64::NAN), prec);
    let den = R::from_f64(x.denom().to_f64().unwrap_or(f64::NAN), prec);
    let v = num.div(&den);
    let err = v.abs_bound() * 2f64.powi(-50);
    ComplexApprox::new(v, R::zero(prec), err)
}

/// A real total split into an exact rational and a certified approximation.
#[derive(Clone, Debug)]
pub struct Total<R> {
    pub exact: BigRational,
    pub approx: ComplexApprox<R>,
}

impl<R: Real> Total<R> {
    pub fn new(prec: u32) -> Self {
        Total {
            exact: BigRational::zero(),
            approx: ComplexApprox::zero(prec),
        }
    }

    /// Rounds to the nearest integer, refusing when the certified error is
    /// too large or the value is demonstrably not an integer.
    pub fn round(&self) -> Result<Rounded> {
        let prec = self.approx.precision();
        let floor = self.exact.floor();
        let frac = &self.exact - &floor;
        let mut t = self.approx.add(&rational_to_complex_exactish::<R>(&frac, prec));
        t.err *= 1.0 + 1e-12;
        let err = t.err;
        if err >= ROUNDING_BUDGET {
            return Err(Error::PrecisionBudgetExceeded {
                err,
                budget: ROUNDING_BUDGET,
            });
        }
        let (i, r) = t.re.split_int();
        let slack = 4.0 * t.re.unit_roundoff() * (1.0 + t.re.abs_bound());
        let im = t.im.to_f64().abs();
        if r.abs() > err + slack || im > err + slack {
            return Err(Error::NonIntegral {
                value: format!("{} + {}i (exact part {})", t.re.to_f64() + floor.to_integer().to_f64().unwrap_or(0.0), t.im.to_f64(), self.exact),
                err,
            });
        }
        Ok(Rounded {
            value: floor.to_integer() + BigInt::from(i),
            err,
        })
    }
}

/// A fraction in [0, 1) as a real, with its conversion error.
fn rational_to_complex_exactish<R: Real>(x: &BigRational, prec: u32) -> ComplexApprox<R> {
    if x.is_zero() {
        return ComplexApprox::zero(prec);
    }
    // Reduce the numerator and denominator to f64-exact sizes when possible.
    match (x.numer().to_i64(), x.denom().to_i64()) {
        (Some(a), Some(b)) if a.unsigned_abs() < 1 << 53 && b.unsigned_abs() < 1 << 53 => {
            let v = R::from_f64(a as f64, prec).div(&R::from_f64(b as f64, prec));
            let err = v.abs_bound() * v.unit_roundoff() * 1.01;
            ComplexApprox::new(v, R::zero(prec), err)
        }
        _ => rational_to_complex(x, prec),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rounded {
    pub value: BigInt,
    pub err: f64,
}

impl Rounded {
    pub fn to_u64(&self) -> Result<u64> {
        self.value.to_u64().ok_or_else(|| Error::InvariantViolated(format!("count {} is negative or too large", self.value)))
    }
}

/// Sums over E for one value of `k_(n+2) = c`, with the common `G(c)` factor
/// applied. Degenerate vectors are kept apart as exact rationals.
#[derive(Clone, Debug)]
struct Partition<R> {
    c: u64,
    e1: ComplexApprox<R>,
    e2star: ComplexApprox<R>,
    e1_exact: BigRational,
    counts: [u64; 3],
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EStats {
    pub e1: u64,
    pub e2star: u64,
    pub e2_other: u64,
}

/// Precomputed partition sums for one `(n, F_q)`; evaluates counts for any
/// `lambda` in O(q).
pub struct FormulaEngine<R> {
    n: u32,
    table: Arc<GaussTable<R>>,
    partitions: Vec<Partition<R>>,
    lambda_roots: RootTable<R>,
    stats: EStats,
}

impl<R: Real> FormulaEngine<R> {
    pub fn new(n: u32, table: Arc<GaussTable<R>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        let q = table.field().q() as u64;
        let big_n = q - 1;
        let prec = table.precision();
        let g = arith::gcd(n as u64 + 1, big_n);
        let prefs: Vec<(R, f64)> = (0..=n + 2).map(|s| prefactor_real::<R>(n, q, s, prec)).collect();
        let cs: Vec<u64> = (0..=big_n).filter(|c| c % g == 0).collect();
        let partitions = cs
            .par_iter()
            .map(|&c| Self::partition(n, q, c, &table, &prefs))
            .collect::<Result<Vec<_>>>()?;
        let mut stats = EStats::default();
        for p in &partitions {
            stats.e1 += p.counts[0];
            stats.e2star += p.counts[1];
            stats.e2_other += p.counts[2];
        }
        Ok(FormulaEngine {
            n,
            lambda_roots: RootTable::new(big_n, prec),
            table,
            partitions,
            stats,
        })
    }

    fn partition(n: u32, q: u64, c: u64, table: &GaussTable<R>, prefs: &[(R, f64)]) -> Result<Partition<R>> {
        let big_n = q - 1;
        let prec = table.precision();
        let mut by_s_e1: Vec<ComplexApprox<R>> = vec![ComplexApprox::zero(prec); n as usize + 3];
        let mut by_s_e2: Vec<ComplexApprox<R>> = vec![ComplexApprox::zero(prec); n as usize + 3];
        let mut e1_exact = BigRational::zero();
        let mut counts = [0u64; 3];
        let mut failure = None;
        for_each_with_last(n, big_n, c, |k| {
            let first = &k[..=n as usize];
            let all_equal = first.iter().all(|&x| x == first[0]);
            let mut s = (k.iter().sum::<u64>() != 0) as u32;
            s += first.iter().filter(|&&x| (n as u64 + 1) * x + c != 0).count() as u32;
            if all_equal {
                if first[0] > 0 && first[0] < big_n {
                    if s != n + 2 {
                        failure = Some(Error::InvariantViolated(format!(
                            "E2 vector {k:?} with s = {s} < n + 2"
                        )));
                        return;
                    }
                    counts[1] += 1;
                    let prod = first.iter().fold(ComplexApprox::one(prec), |acc, &x| acc.mul(table.get(x)));
                    by_s_e2[s as usize] = by_s_e2[s as usize].add(&prod);
                } else {
                    counts[2] += 1;
                }
                return;
            }
            counts[0] += 1;
            if is_degenerate(k, big_n) {
                let v = ExponentVector::classify(n, q, k).expect("in E");
                e1_exact += degenerate_term(n, q, &v);
                return;
            }
            let prod = first.iter().fold(ComplexApprox::one(prec), |acc, &x| acc.mul(table.get(x)));
            by_s_e1[s as usize] = by_s_e1[s as usize].add(&prod);
        });
        if let Some(e) = failure {
            return Err(e);
        }
        let combine = |by_s: &[ComplexApprox<R>]| -> ComplexApprox<R> {
            let sum = by_s
                .iter()
                .zip(prefs)
                .fold(ComplexApprox::zero(prec), |acc, (v, (p, pe))| acc.add(&v.scale(p, *pe)));
            sum.mul(table.get(c))
        };
        Ok(Partition {
            c,
            e1: combine(&by_s_e1),
            e2star: combine(&by_s_e2),
            e1_exact,
            counts,
        })
    }

    /// Upper bound on the number of exponent vectors visited when building
    /// an engine for `(n, q)`.
    pub fn work_estimate(n: u32, q: u64) -> u128 {
        let g = arith::gcd(n as u64 + 1, q - 1) as u128;
        ((q as u128 - 1) / g + 1) * (g + 1).pow(n) * 2
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn table(&self) -> &Arc<GaussTable<R>> {
        &self.table
    }

    pub fn stats(&self) -> EStats {
        self.stats
    }

    fn q(&self) -> u64 {
        self.table.field().q() as u64
    }

    fn prec(&self) -> u32 {
        self.table.precision()
    }

    /// `sum_c chi(lambda)^c (selected partition sums)`; only `c = 0` for
    /// `lambda = 0`.
    fn weighted(&self, lambda: FieldElement, pick: impl Fn(&Partition<R>) -> (ComplexApprox<R>, BigRational)) -> Result<Total<R>> {
        let mut total = Total::new(self.prec());
        let f = self.table.field();
        let big_n = self.q() - 1;
        let log = if lambda.is_zero() { None } else { Some(f.log(lambda)? as u64) };
        for part in &self.partitions {
            let (approx, exact) = pick(part);
            match log {
                None if part.c != 0 => continue,
                None => {
                    total.approx = total.approx.add(&approx);
                    total.exact += exact;
                }
                Some(l) => {
                    let e = self.table.convention().lambda_exponent(part.c, big_n);
                    let w = self.lambda_roots.get((e as u128 * l as u128 % big_n as u128) as u64);
                    total.approx = total.approx.add(&approx.mul(&w));
                    // exact parts only occur at c = 0 or q-1, where chi^c = 1
                    total.exact += exact;
                }
            }
        }
        Ok(total)
    }

    /// `sum_{E1} S_k`.
    pub fn sum_e1(&self, lambda: FieldElement) -> Result<Total<R>> {
        self.weighted(lambda, |p| (p.e1.clone(), p.e1_exact.clone()))
    }

    /// `sum_{E2*} S_k`.
    pub fn sum_e2star(&self, lambda: FieldElement) -> Result<Total<R>> {
        self.weighted(lambda, |p| (p.e2star.clone(), BigRational::zero()))
    }

    fn constant(&self, expr: impl Fn(&BigInt, &BigInt, u32, i64) -> BigRational) -> BigRational {
        let q = BigInt::from(self.q());
        let q1 = &q - 1;
        let sign = if self.n.is_multiple_of(2) { 1 } else { -1 };
        expr(&q, &q1, self.n, sign)
    }

    pub fn nstar_total(&self, lambda: FieldElement) -> Result<Total<R>> {
        let mut t = self.sum_e2star(lambda)?;
        t.exact += self.constant(|q, q1, n, sign| {
            let qn = num_traits::pow(q1.clone(), n as usize);
            if lambda.is_zero() {
                // (q-1)^n/q + (-1)^(n+1)/q
                BigRational::new(qn - sign, q.clone())
            } else {
                // (q-1)^n/q + (-1)^n/(q(q-1))
                BigRational::new(qn, q.clone()) + BigRational::new(BigInt::from(sign), q * q1)
            }
        });
        Ok(t)
    }

    pub fn x_total(&self, lambda: FieldElement) -> Result<Total<R>> {
        let e1 = self.sum_e1(lambda)?;
        let mut t = if lambda.is_zero() {
            let ns = self.nstar_total(lambda)?;
            let mut t = e1;
            t.approx = t.approx.add(&ns.approx);
            t.exact += ns.exact;
            t.exact += self.constant(|q, q1, n, sign| {
                // (q^(n+1)-1)/(q-1) + (-1)^(n+1) q^n + ((-1)^n - (q-1)^n)/q
                let qn = num_traits::pow(q.clone(), n as usize);
                BigRational::new(&qn * q - 1, q1.clone())
                    + BigRational::from_integer(-sign * qn)
                    + BigRational::new(BigInt::from(sign) - num_traits::pow(q1.clone(), n as usize), q.clone())
            });
            t
        } else {
            let e2 = self.sum_e2star(lambda)?;
            let mut t = e1;
            t.approx = t.approx.add(&e2.approx);
            t.exact += self.constant(|q, q1, n, sign| {
                // [q^(n+1) + (-1)^n q^n - 1 - (q-1)^(n+1)]/(q-1)
                let qn = num_traits::pow(q.clone(), n as usize);
                let num = &qn * q + sign * &qn - 1 - num_traits::pow(q1.clone(), n as usize + 1);
                BigRational::new(num, q1.clone())
            });
            t
        };
        t.approx.err *= 1.0 + 1e-12;
        Ok(t)
    }

    pub fn count_x(&self, lambda: FieldElement) -> Result<Rounded> {
        self.x_total(lambda)?.round()
    }

    pub fn count_nstar(&self, lambda: FieldElement) -> Result<Rounded> {
        self.nstar_total(lambda)?.round()
    }

    /// `#X`, `N*` and `#Y` for one member.
    pub fn record(&self, inst: &DworkInstance) -> Result<CountRecord> {
        if inst.n != self.n || !Arc::ptr_eq(&inst.field, self.table.field()) && inst.field.q() != self.table.field().q() {
            return Err(Error::FieldMismatch);
        }
        let x = self.count_x(inst.lambda)?;
        let ns = self.count_nstar(inst.lambda)?;
        let nstar = ns.to_u64()?;
        Ok(CountRecord {
            key: inst.key(),
            count_x: Some(x.to_u64()?),
            count_y: Some(count_y(self.n, self.q(), nstar)?),
            count_nstar: Some(nstar),
            method: Method::GaussFormula,
            err_budget_used: x.err.max(ns.err),
        })
    }

    /// The expression that the closed form for `sum_{E1}` makes vanish:
    /// `sum_{E1} - (q-1)^n + (q^(n+1) + (-1)^n q^n + (-1)^(n+1) - q^n)/(q-1)`
    /// for `lambda != 0` and `q^n((-1)^(n+1) + 1) + sum_{E1}` for `lambda = 0`.
    pub fn lemma_difference(&self, lambda: FieldElement) -> Result<Rounded> {
        let mut t = self.sum_e1(lambda)?;
        let zero = lambda.is_zero();
        t.exact += self.constant(|q, q1, n, sign| {
            let qn = num_traits::pow(q.clone(), n as usize);
            if zero {
                BigRational::from_integer(qn * (1 - sign))
            } else {
                let num = &qn * q + sign * &qn - sign - &qn;
                BigRational::new(num, q1.clone()) - BigRational::from_integer(num_traits::pow(q1.clone(), n as usize))
            }
        });
        t.round()
    }
}

/// `A` (for `lambda = 0`) or `A + B` (otherwise), where
/// `A = q^n((-1)^n - 1)` and `B = ((-1)^n + (-1)^(n+1) q^(n+1) + (q-1)^(n+1))/(q-1)`.
pub fn sum_e1_closed_form(n: u32, q: u64, lambda_zero: bool) -> Result<BigRational> {
    let g = arith::gcd(n as u64 + 1, q - 1);
    if g != 1 {
        return Err(Error::HypothesisViolated(format!("gcd(n+1, q-1) = {g} for n = {n}, q = {q}")));
    }
    let qb = BigInt::from(q);
    let q1 = BigInt::from(q - 1);
    let sign: i64 = if n.is_multiple_of(2) { 1 } else { -1 };
    let qn = num_traits::pow(qb.clone(), n as usize);
    let a = BigRational::from_integer(&qn * (sign - 1));
    if lambda_zero {
        return Ok(a);
    }
    let b_num = BigInt::from(sign) - sign * &qn * &qb + num_traits::pow(q1.clone(), n as usize + 1);
    Ok(a + BigRational::new(b_num, q1))
}

/// The literal evaluation: every `k in E` from the scan oracle, each `S_k`
/// through [`s_term`]. Only for small fields.
pub fn count_x_by_scan<R: Real>(inst: &DworkInstance, gt: &GaussTable<R>) -> Result<Rounded> {
    let n = inst.n;
    let q = inst.q();
    let prec = gt.precision();
    let zero = inst.lambda.is_zero();
    let mut e1 = Total::<R>::new(prec);
    let mut e2 = Total::<R>::new(prec);
    for v in enumerate_e_scan(n, q) {
        if zero && v.k[n as usize + 1] != 0 {
            continue;
        }
        let target = match v.class {
            EClass::E1 => &mut e1,
            EClass::E2Star => &mut e2,
            EClass::E2Other => continue,
        };
        let t = s_term(&v, inst, gt)?;
        match t.exact {
            Some(x) => target.exact += x,
            None => target.approx = target.approx.add(&t.value),
        }
    }
    let qb = BigInt::from(q);
    let q1 = BigInt::from(q - 1);
    let sign: i64 = if n.is_multiple_of(2) { 1 } else { -1 };
    let qn = num_traits::pow(qb.clone(), n as usize);
    let mut total = e1;
    total.approx = total.approx.add(&e2.approx);
    total.exact += e2.exact;
    if zero {
        let q1n = num_traits::pow(q1.clone(), n as usize);
        total.exact += BigRational::new(&q1n - sign, qb.clone());
        total.exact += BigRational::new(&qn * &qb - 1, q1.clone());
        total.exact += BigRational::from_integer(-sign * &qn);
        total.exact += BigRational::new(BigInt::from(sign) - q1n, qb.clone());
    } else {
        let num = &qn * &qb + sign * &qn - 1 - num_traits::pow(q1.clone(), n as usize + 1);
        total.exact += BigRational::new(num, q1);
    }
    total.round()
}

/// Tests both pairings of `chi(lambda)` against enumeration on the smallest
/// informative case (n = 2 over F_5) and returns the one that matches.
pub fn resolve_convention() -> Result<Convention> {
    let f = make_field(5, 1)?;
    let mut winners = Vec::new();
    for conv in Convention::ALL {
        let table = Arc::new(GaussTable::<f64>::build(f.clone(), GaussMode::Naive, 53, conv)?);
        let engine = FormulaEngine::new(2, table)?;
        let mut ok = true;
        for lambda in f.elements() {
            let inst = DworkInstance::new(2, f.clone(), lambda)?;
            let direct = count_x_direct(&inst, &Budget::default())?;
            let formula = engine.count_x(lambda)?;
            if formula.value != BigInt::from(direct) {
                ok = false;
                break;
            }
        }
        if ok {
            winners.push(conv);
        }
    }
    match winners.as_slice() {
        [one] => Ok(*one),
        [] => Err(Error::OracleMismatch("no character convention reproduces enumeration".into())),
        _ => Err(Error::InvariantViolated("both character conventions reproduce enumeration".into())),
    }
}

/// [`resolve_convention`], evaluated once per process.
pub fn resolved_convention() -> Result<Convention> {
    static RESOLVED: OnceLock<Result<Convention>> = OnceLock::new();
    RESOLVED.get_or_init(resolve_convention).clone()
}
