//! Theorem verifiers over grids of fields and parameters.

use std::sync::Arc;

use mirrorcount_core::arith;
use mirrorcount_core::direct::{decompose_x, group_order};
use mirrorcount_core::factor::factor_over_z;
use mirrorcount_core::field::{Embedding, FieldElement, FieldSpec};
use mirrorcount_core::instance::{CountRecord, DworkInstance, LambdaKey, Method};
use mirrorcount_core::zeta::{
    degree_formula, detect_polynomial, is_smooth, kth_root_check, purity_check, signed_quotient, zeta_from_counts,
    Detection, DetectionReport, FactorReport, QuotientReport,
};
use mirrorcount_core::{Error, Result};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::engine::Counter;
use crate::report::{TheoremId, Verdict, VerificationReport};

/// Largest extension field used by the default grids.
pub const EXT_LIMIT: u64 = 1_000_000;
/// Enumeration double-checks run when the affine scan stays below this.
pub const ORACLE_LIMIT: u128 = 1 << 21;
/// Relative tolerance for purity verdicts.
pub const PURITY_TOL: f64 = 1e-6;

/// Prime powers `q <= limit` as `(p, m)`, ordered by q.
pub fn prime_powers(limit: u64) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for q in 2..=limit {
        let f = arith::factorize(q);
        if f.len() == 1 {
            out.push((f[0].0 as u32, f[0].1));
        }
    }
    out
}

/// `l` when `n = l^a` for a prime `l`.
pub fn prime_power_base(n: u64) -> Option<u64> {
    match arith::factorize(n).as_slice() {
        [(l, _)] => Some(*l),
        _ => None,
    }
}

/// Largest k with `q^k <= limit` (at least 1).
pub fn max_k(q: u64, limit: u64) -> u32 {
    let mut k = 1;
    while (q as u128).pow(k + 1) <= limit as u128 {
        k += 1;
    }
    k
}

fn grid(n: u32, p: u32, m: u32, extra: &str) -> String {
    if extra.is_empty() {
        format!("n={n} q={p}^{m}")
    } else {
        format!("n={n} q={p}^{m} {extra}")
    }
}

fn lambdas(f: &FieldSpec, only: Option<LambdaKey>) -> Result<Vec<FieldElement>> {
    match only {
        Some(k) => Ok(vec![k.element(f)?]),
        None => Ok(f.elements().collect()),
    }
}

fn key_of(f: &FieldSpec, x: FieldElement) -> String {
    LambdaKey::of(f, x).to_string()
}

fn power(q: u64, e: u32) -> u128 {
    (q as u128).saturating_pow(e)
}

fn oracle_affordable(n: u32, q: u64) -> bool {
    power(q, n + 1) <= ORACLE_LIMIT
}

fn x_of(r: &CountRecord) -> u64 {
    r.count_x.expect("records carry #X")
}

fn y_of(r: &CountRecord) -> u64 {
    r.count_y.expect("records carry #Y")
}

/// Formula counts against enumeration for every `lambda` in F_q.
pub fn verify_oracle(c: &Counter, n: u32, p: u32, m: u32) -> Result<VerificationReport> {
    let f = c.field(p, m)?;
    let mut rep = VerificationReport::new(TheoremId::Oracle, grid(n, p, m, ""));
    if let Err(e) = c.engine(n, &f) {
        rep.push_error("engine", None, &e);
        return Ok(rep);
    }
    let results: Vec<_> = f
        .elements()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&l| {
            let inst = DworkInstance::new(n, f.clone(), l)?;
            let a = c.record(&inst, Method::GaussFormula);
            let b = c.record(&inst, Method::Direct);
            Ok((inst.key(), a, b))
        })
        .collect::<Result<_>>()?;
    for (key, a, b) in results {
        let case = format!("lambda={}", key.lambda);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let ok = a.count_x == b.count_x && a.count_nstar == b.count_nstar && a.count_y == b.count_y;
                rep.push(
                    case,
                    Some(key),
                    Verdict::of(ok),
                    json!({
                        "formula": {"x": a.count_x, "nstar": a.count_nstar, "y": a.count_y},
                        "direct": {"x": b.count_x, "nstar": b.count_nstar, "y": b.count_y},
                        "err": a.err_budget_used,
                    }),
                );
            }
            (Err(e), _) | (_, Err(e)) => rep.push_error(case, Some(key), &e),
        }
    }
    Ok(rep)
}

/// `#X = #Y` over `F_(q^k)` for every `k <= kmax` passing the gcd gate, with
/// base-field `lambda` embedded.
pub fn verify_equal(
    c: &Counter,
    n: u32,
    p: u32,
    m: u32,
    kmax: Option<u32>,
    lambda: Option<LambdaKey>,
) -> Result<VerificationReport> {
    let base = c.field(p, m)?;
    let q = base.q() as u64;
    let kmax = kmax.unwrap_or_else(|| max_k(q, EXT_LIMIT));
    let set = lambdas(&base, lambda)?;
    let mut rep = VerificationReport::new(TheoremId::Equal, grid(n, p, m, &format!("kmax={kmax}")));
    for k in 1..=kmax {
        let qk = power(q, k);
        let g = arith::gcd(n as u64 + 1, (qk - 1) as u64);
        if g != 1 {
            rep.push(format!("k={k}"), None, Verdict::Excluded, json!({"k": k, "gcd": g}));
            continue;
        }
        let ext = match c.field(p, m * k).and_then(|e| c.engine(n, &e).map(|_| e)) {
            Ok(e) => e,
            Err(e) => {
                rep.push_error(format!("k={k}"), None, &e);
                continue;
            }
        };
        let emb = Embedding::new(base.clone(), ext.clone())?;
        let check_oracle = oracle_affordable(n, qk as u64);
        let rows: Vec<_> = set
            .par_iter()
            .map(|&l| {
                let inst = DworkInstance::new(n, ext.clone(), emb.embed(l))?;
                let rec = c.record(&inst, Method::GaussFormula);
                let oracle = check_oracle.then(|| c.record(&inst, Method::Direct));
                Ok((l, inst.key(), rec, oracle))
            })
            .collect::<Result<_>>()?;
        for (l, key, rec, oracle) in rows {
            let case = format!("k={k} lambda={}", key_of(&base, l));
            let rec = match rec {
                Ok(r) => r,
                Err(e) => {
                    rep.push_error(case, Some(key), &e);
                    continue;
                }
            };
            let (x, y) = (x_of(&rec), y_of(&rec));
            let mut values = json!({
                "k": k,
                "lambda": key_of(&base, l),
                "lambda_ext": key.lambda,
                "count_x": x,
                "count_y": y,
            });
            let mut ok = x == y;
            match oracle {
                Some(Ok(o)) => {
                    ok &= o.count_x == rec.count_x && o.count_y == rec.count_y;
                    values["oracle"] = json!({"x": o.count_x, "y": o.count_y});
                }
                Some(Err(e)) => values["oracle"] = json!({"error": e.to_string()}),
                None => {}
            }
            rep.push(case, Some(key), Verdict::of(ok), values);
        }
    }
    Ok(rep)
}

/// Both parts of the congruence theorem over `F_(q^k)`, `k <= kmax`,
/// sweeping every parameter of the field. Returns the part-1 report and the
/// two part-2 reports.
pub fn verify_cong(c: &Counter, n: u32, p: u32, m: u32, kmax: u32) -> Result<Vec<VerificationReport>> {
    let ell = prime_power_base(n as u64 + 1);
    let mut cong1 = VerificationReport::new(TheoremId::Cong1, grid(n, p, m, &format!("kmax={kmax}")));
    let mut cong2x = VerificationReport::new(TheoremId::Cong2X, grid(n, p, m, &format!("kmax={kmax}")));
    let mut cong2y = VerificationReport::new(TheoremId::Cong2Y, grid(n, p, m, &format!("kmax={kmax}")));
    let part2_gate = match ell {
        None => Some(format!("n+1 = {} is not a prime power", n + 1)),
        Some(_) if arith::gcd(n as u64 + 1, p as u64) != 1 => Some(format!("p = {p} divides n+1 = {}", n + 1)),
        Some(_) => None,
    };
    for k in 1..=kmax {
        let f = match c.field(p, m * k).and_then(|f| c.engine(n, &f).map(|_| f)) {
            Ok(f) => f,
            Err(e) => {
                for r in [&mut cong1, &mut cong2x, &mut cong2y] {
                    r.push_error(format!("k={k}"), None, &e);
                }
                continue;
            }
        };
        let qk = f.q() as u64;
        let d = arith::gcd(n as u64 + 1, qk - 1);
        if d == 1 {
            for r in [&mut cong1, &mut cong2x, &mut cong2y] {
                r.push(format!("k={k}"), None, Verdict::Excluded, json!({"k": k, "d": d}));
            }
            continue;
        }
        let elements: Vec<FieldElement> = f.elements().collect();
        let by_lambda: Vec<_> = elements
            .par_iter()
            .map(|&l| {
                let inst = DworkInstance::new(n, f.clone(), l)?;
                Ok((inst.key(), c.record(&inst, Method::GaussFormula)))
            })
            .collect::<Result<_>>()?;
        for (key, rec) in by_lambda {
            let case = format!("k={k} lambda={}", key.lambda);
            match rec {
                Ok(r) => {
                    let x = x_of(&r);
                    rep_push_mod(&mut cong1, case, key, x, d, 0, json!({"k": k, "d": d}));
                }
                Err(e) => cong1.push_error(case, Some(key), &e),
            }
        }
        if let Some(reason) = &part2_gate {
            for r in [&mut cong2x, &mut cong2y] {
                r.push(format!("k={k}"), None, Verdict::Excluded, json!({"reason": reason}));
            }
            continue;
        }
        let ell = ell.expect("gate passed");
        let by_psi: Vec<_> = elements
            .par_iter()
            .map(|&psi| {
                let inst = DworkInstance::from_psi(n, f.clone(), psi)?;
                Ok((psi, inst.key(), c.record(&inst, Method::GaussFormula)))
            })
            .collect::<Result<_>>()?;
        for (psi, key, rec) in by_psi {
            let psi_key = key_of(&f, psi);
            let case = format!("k={k} psi={psi_key}");
            match rec {
                Ok(r) => {
                    let singular = f.pow(psi, n as u64 + 1) == FieldElement::ONE;
                    let extra = json!({"k": k, "d": d, "ell": ell, "psi": psi_key, "psi_n1_is_one": singular});
                    rep_push_mod(&mut cong2x, case.clone(), key, x_of(&r), ell * d, 0, extra.clone());
                    rep_push_mod(&mut cong2y, case, key, y_of(&r), ell, singular as u64, extra);
                }
                Err(e) => {
                    cong2x.push_error(case.clone(), Some(key), &e);
                    cong2y.push_error(case, Some(key), &e);
                }
            }
        }
    }
    Ok(vec![cong1, cong2x, cong2y])
}

fn rep_push_mod(
    rep: &mut VerificationReport,
    case: String,
    key: mirrorcount_core::instance::InstanceKey,
    value: u64,
    modulus: u64,
    expected: u64,
    mut extra: Value,
) {
    let residue = value % modulus;
    extra["value"] = json!(value);
    extra["modulus"] = json!(modulus);
    extra["residue"] = json!(residue);
    extra["expected"] = json!(expected);
    rep.push(case, Some(key), Verdict::of(residue == expected), extra);
}

/// `#X = #Y (mod l q^k)` for base-field `psi` with `psi^(n+1) != 1`.
pub fn verify_crt(c: &Counter, n: u32, p: u32, m: u32, kmax: u32) -> Result<VerificationReport> {
    let base = c.field(p, m)?;
    let mut rep = VerificationReport::new(TheoremId::Crt, grid(n, p, m, &format!("kmax={kmax}")));
    let Some(ell) = prime_power_base(n as u64 + 1) else {
        rep.push("gate", None, Verdict::Excluded, json!({"reason": "n+1 is not a prime power"}));
        return Ok(rep);
    };
    if arith::gcd(n as u64 + 1, base.q() as u64) != 1 {
        rep.push("gate", None, Verdict::Excluded, json!({"reason": "gcd(n+1, q) > 1"}));
        return Ok(rep);
    }
    for k in 1..=kmax {
        let ext = match c.field(p, m * k).and_then(|e| c.engine(n, &e).map(|_| e)) {
            Ok(e) => e,
            Err(e) => {
                rep.push_error(format!("k={k}"), None, &e);
                continue;
            }
        };
        let emb = Embedding::new(base.clone(), ext.clone())?;
        let modulus = ell * ext.q() as u64;
        for psi in base.elements() {
            let psi_key = key_of(&base, psi);
            let case = format!("k={k} psi={psi_key}");
            if base.pow(psi, n as u64 + 1) == FieldElement::ONE {
                rep.push(case, None, Verdict::Excluded, json!({"k": k, "psi": psi_key, "reason": "psi^(n+1) = 1"}));
                continue;
            }
            let inst = DworkInstance::from_psi(n, ext.clone(), emb.embed(psi))?;
            match c.record(&inst, Method::GaussFormula) {
                Ok(r) => {
                    let (x, y) = (x_of(&r), y_of(&r));
                    rep.push(
                        case,
                        Some(inst.key()),
                        Verdict::of(x % modulus == y % modulus),
                        json!({"k": k, "psi": psi_key, "count_x": x, "count_y": y, "modulus": modulus}),
                    );
                }
                Err(e) => rep.push_error(case, Some(inst.key()), &e),
            }
        }
    }
    Ok(rep)
}

/// The closed form of `sum_{E1} S_k` and the vanishing lemma expressions.
pub fn verify_lemma(c: &Counter, n: u32, p: u32, m: u32) -> Result<VerificationReport> {
    let f = c.field(p, m)?;
    let q = f.q() as u64;
    let mut rep = VerificationReport::new(TheoremId::LemmaE1, grid(n, p, m, ""));
    let g = arith::gcd(n as u64 + 1, q - 1);
    if g != 1 {
        rep.push("gate", None, Verdict::Excluded, json!({"gcd": g}));
        return Ok(rep);
    }
    for l in f.elements() {
        let inst = DworkInstance::new(n, f.clone(), l)?;
        let case = format!("lambda={}", inst.key().lambda);
        match c.lemma_check(&inst) {
            Ok((a, b)) => rep.push(
                case,
                Some(inst.key()),
                Verdict::of(a.value.is_zero() && b.value.is_zero()),
                json!({
                    "sum_e1_minus_closed_form": a.value.to_string(),
                    "difference": b.value.to_string(),
                    "err": a.err.max(b.err),
                }),
            ),
            Err(e) => rep.push_error(case, Some(inst.key()), &e),
        }
    }
    Ok(rep)
}

/// Group orders, divisibility of the torus strata, and the recomposition
/// of `#X` from them.
pub fn verify_group_orders(c: &Counter, n: u32, p: u32, m: u32) -> Result<VerificationReport> {
    let f = c.field(p, m)?;
    let budget = c.budget();
    let mut rep = VerificationReport::new(TheoremId::GroupOrders, grid(n, p, m, ""));
    let orders = match group_order(n, &f, &budget) {
        Ok(o) => o,
        Err(e) => {
            rep.push_error("G", None, &e);
            return Ok(rep);
        }
    };
    let d = orders.d;
    rep.push(
        "G",
        None,
        Verdict::of(orders.enumerated == orders.stated),
        json!({"d": d, "stated": orders.stated, "enumerated": orders.enumerated}),
    );
    for &(i, stated, enumerated) in &orders.partial {
        rep.push(
            format!("G_{i}"),
            None,
            Verdict::of(enumerated == stated),
            json!({"i": i, "d": d, "stated": stated, "enumerated": enumerated}),
        );
    }
    for l in f.elements() {
        let inst = DworkInstance::new(n, f.clone(), l)?;
        let key = inst.key();
        let case = format!("lambda={}", key.lambda);
        let dec = match decompose_x(&inst, &budget) {
            Ok(dec) => dec,
            Err(e) => {
                rep.push_error(case, Some(key), &e);
                continue;
            }
        };
        let dn = d.pow(n);
        rep.push(
            format!("{case} M0*"),
            Some(key),
            Verdict::of(dec.m0 % dn == 0),
            json!({"m0": dec.m0, "divisor": dn, "residue": dec.m0 % dn}),
        );
        for (j, &mi) in dec.mi.iter().enumerate() {
            let i = j as u32 + 1;
            let div = d.pow(n - i);
            rep.push(
                format!("{case} M{i}*"),
                Some(key),
                Verdict::of(mi % div == 0),
                json!({"i": i, "mi": mi, "divisor": div, "residue": mi % div}),
            );
        }
        match c.record(&inst, Method::Direct) {
            Ok(r) => rep.push(
                format!("{case} recomposition"),
                Some(key),
                Verdict::of(dec.recomposed == x_of(&r)),
                json!({"recomposed": dec.recomposed, "count_x": x_of(&r)}),
            ),
            Err(e) => rep.push_error(format!("{case} recomposition"), Some(key), &e),
        }
    }
    Ok(rep)
}

fn counts_over_extensions(
    c: &Counter,
    n: u32,
    base: &Arc<FieldSpec>,
    lambda: FieldElement,
    order: usize,
) -> Result<(Vec<u64>, Vec<u64>)> {
    let mut xs = Vec::with_capacity(order);
    let mut ys = Vec::with_capacity(order);
    for k in 1..=order as u32 {
        let ext = c.field(base.p(), base.m() * k)?;
        let emb = Embedding::new(base.clone(), ext.clone())?;
        let inst = DworkInstance::new(n, ext, emb.embed(lambda))?;
        let r = c.record(&inst, Method::GaussFormula)?;
        xs.push(x_of(&r));
        ys.push(y_of(&r));
    }
    Ok((xs, ys))
}

/// Computes the records behind several quotients one extension at a time,
/// so each engine is built once.
fn warm_extensions(c: &Counter, n: u32, base: &Arc<FieldSpec>, lambdas: &[FieldElement], order: usize) -> Result<()> {
    for k in 1..=order as u32 {
        let ext = c.field(base.p(), base.m() * k)?;
        c.engine(n, &ext)?;
        let emb = Embedding::new(base.clone(), ext.clone())?;
        lambdas.par_iter().try_for_each(|&l| {
            let inst = DworkInstance::new(n, ext.clone(), emb.embed(l))?;
            c.record(&inst, Method::GaussFormula).map(|_| ())
        })?;
    }
    Ok(())
}

/// [`run_quotient`] for several members of one family.
pub fn run_quotients(
    c: &Counter,
    n: u32,
    p: u32,
    m: u32,
    lambdas: &[LambdaKey],
    order: usize,
    enforce_gate: bool,
) -> Result<Vec<Result<QuotientReport>>> {
    let base = c.field(p, m)?;
    let mut warm = Vec::new();
    for key in lambdas {
        let l = key.element(&base)?;
        if !enforce_gate || is_smooth(n, &base, l)? {
            warm.push(l);
        }
    }
    // Failures here resurface per member below.
    let _ = warm_extensions(c, n, &base, &warm, order);
    Ok(lambdas
        .iter()
        .map(|&key| run_quotient(c, n, p, m, key, order, enforce_gate))
        .collect())
}

/// Reverses `T -> q^k T^k` when every exponent is a multiple of `k` and the
/// coefficients divide accordingly.
fn unsubstitute(
    poly: &mirrorcount_core::poly::IntPolynomial,
    qk: &BigInt,
    k: usize,
) -> Option<mirrorcount_core::poly::IntPolynomial> {
    let mut out = Vec::new();
    for (i, c) in poly.coeffs().iter().enumerate() {
        if i % k != 0 {
            if !c.is_zero() {
                return None;
            }
            continue;
        }
        let scale = num_traits::pow(qk.clone(), i / k);
        if !(c % &scale).is_zero() {
            return None;
        }
        out.push(c / scale);
    }
    mirrorcount_core::poly::IntPolynomial::new(out).ok()
}

/// Zeta quotient structure for one member through `T^order`. With
/// `enforce_gate` a member failing the smoothness inequality is refused.
pub fn run_quotient(
    c: &Counter,
    n: u32,
    p: u32,
    m: u32,
    lambda: LambdaKey,
    order: usize,
    enforce_gate: bool,
) -> Result<QuotientReport> {
    if order == 0 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    let base = c.field(p, m)?;
    let l = lambda.element(&base)?;
    let smooth = is_smooth(n, &base, l)?;
    if enforce_gate && !smooth {
        return Err(Error::SmoothnessGate(format!(
            "lambda^{} = (-{})^{} for n={n} q={p}^{m} lambda={lambda}",
            n + 1,
            n + 1,
            n + 1
        )));
    }
    let q = base.q() as u64;
    let k = arith::multiplicative_order(q % (n as u64 + 1), n as u64 + 1).expect("q is a unit mod n+1");
    let (xs, ys) = counts_over_extensions(c, n, &base, l, order)?;
    let quotient = signed_quotient(&zeta_from_counts(&xs), &zeta_from_counts(&ys), n)?;
    let support = quotient.support();
    let integral = quotient.all_integer();
    let support_in_k_z = support.iter().all(|&e| (e as u64).is_multiple_of(k));
    let kth_root = if (k as usize) <= order {
        let ext_len = order / k as usize;
        let ex: Vec<u64> = (1..=ext_len).map(|s| xs[s * k as usize - 1]).collect();
        let ey: Vec<u64> = (1..=ext_len).map(|s| ys[s * k as usize - 1]).collect();
        let ext_quot = signed_quotient(&zeta_from_counts(&ex), &zeta_from_counts(&ey), n)?;
        Some(kth_root_check(&quotient, &ext_quot, k as usize)?)
    } else {
        None
    };
    let formula = degree_formula(n);
    let max_deg = formula.to_usize().unwrap_or(usize::MAX);
    let mut factors = Vec::new();
    let mut degree_consistent = None;
    let detection = if !integral {
        let exponent = quotient.coeffs().iter().position(|c| !c.is_integer()).unwrap_or(0);
        DetectionReport::NotPolynomial { exponent }
    } else {
        match detect_polynomial(&quotient, max_deg)? {
            Detection::Insufficient => DetectionReport::Partial { consistent_through: order },
            Detection::NotPolynomial { exponent } => DetectionReport::NotPolynomial { exponent },
            Detection::Polynomial(poly) => {
                degree_consistent = Some(BigInt::from(poly.degree()) == formula);
                let qk = num_traits::pow(BigInt::from(q), k as usize);
                for (g, mult) in factor_over_z(&poly)? {
                    let purity = unsubstitute(&g, &qk, k as usize)
                        .filter(|u| u.degree() > 0)
                        .map(|u| purity_check(&u, &qk, n as i32 - 3, PURITY_TOL))
                        .transpose()?;
                    factors.push(FactorReport {
                        polynomial: g.to_string(),
                        coefficients: g.coeffs().iter().map(|c| c.to_string()).collect(),
                        degree: g.degree(),
                        multiplicity: mult,
                        purity,
                    });
                }
                DetectionReport::Polynomial {
                    degree: poly.degree(),
                    coefficients: poly.coeffs().iter().map(|c| c.to_string()).collect(),
                }
            }
        }
    };
    Ok(QuotientReport {
        n,
        p,
        m,
        lambda: lambda.to_string(),
        smooth,
        order,
        k,
        counts_x: xs,
        counts_y: ys,
        coefficients: quotient.coeff_strings(),
        support,
        integral,
        support_in_k_z,
        kth_root,
        detection,
        factors,
        degree_formula: formula.to_string(),
        degree_consistent,
    })
}

/// Whether a quotient report is consistent with the quotient theorem.
pub fn quotient_consistent(r: &QuotientReport) -> bool {
    r.integral
        && r.support_in_k_z
        && r.kth_root != Some(false)
        && r.degree_consistent != Some(false)
        && !matches!(r.detection, DetectionReport::NotPolynomial { .. })
}

fn quotient_case(c: &Counter, n: u32, p: u32, m: u32) -> Result<VerificationReport> {
    let f = c.field(p, m)?;
    let q = f.q() as u64;
    let mut rep = VerificationReport::new(TheoremId::Quot, grid(n, p, m, ""));
    if !arith::is_prime(n as u64 + 1) || arith::gcd(n as u64 + 1, q) != 1 {
        rep.push("gate", None, Verdict::Excluded, json!({"reason": "n+1 is not a prime unit mod q"}));
        return Ok(rep);
    }
    let order = max_k(q, EXT_LIMIT).min(8) as usize;
    let candidates = (0..f.group_order()).map(LambdaKey::Log).chain(std::iter::once(LambdaKey::Zero));
    let mut chosen = None;
    for key in candidates {
        if is_smooth(n, &f, key.element(&f)?)? {
            chosen = Some(key);
            break;
        }
    }
    let key = chosen.expect("lambda = 0 passes the gate");
    let case = format!("lambda={key} order={order}");
    match run_quotient(c, n, p, m, key, order, true) {
        Ok(r) => {
            let ok = quotient_consistent(&r);
            rep.push(case, None, Verdict::of(ok), serde_json::to_value(&r).expect("serializable"));
        }
        Err(e) => rep.push_error(case, None, &e),
    }
    Ok(rep)
}

/// The default grid: n in 1..=4, every prime power q <= 13 with
/// gcd(p, n+1) = 1, extensions up to 10^6 elements.
pub fn verify_all(c: &Counter) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for n in 1..=4u32 {
        for (p, m) in prime_powers(13) {
            if arith::gcd(p as u64, n as u64 + 1) != 1 {
                continue;
            }
            out.push(verify_oracle(c, n, p, m)?);
            out.push(verify_equal(c, n, p, m, None, None)?);
            out.extend(verify_cong(c, n, p, m, 1)?);
            out.push(verify_crt(c, n, p, m, 1)?);
            out.push(verify_lemma(c, n, p, m)?);
            out.push(verify_group_orders(c, n, p, m)?);
            out.push(quotient_case(c, n, p, m)?);
        }
    }
    c.flush()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Settings;

    fn counter() -> Counter {
        Counter::new(Settings::default()).unwrap()
    }

    #[test]
    fn grid_helpers() {
        let q: Vec<u32> = prime_powers(13).iter().map(|&(p, m)| p.pow(m)).collect();
        assert_eq!(q, vec![2, 3, 4, 5, 7, 8, 9, 11, 13]);
        assert_eq!(prime_power_base(9), Some(3));
        assert_eq!(prime_power_base(6), None);
        assert_eq!(max_k(2, EXT_LIMIT), 19);
        assert_eq!(max_k(13, EXT_LIMIT), 5);
    }

    #[test]
    fn equal_on_f5() {
        let r = verify_equal(&counter(), 2, 5, 1, Some(3), None).unwrap();
        assert_eq!(r.summary.fail, 0);
        // k = 2 fails the gate: gcd(3, 24) = 3
        assert_eq!(r.summary.excluded, 1);
        assert_eq!(r.summary.pass, 10);
    }

    #[test]
    fn gate_excludes_f7() {
        let r = verify_equal(&counter(), 2, 7, 1, Some(1), None).unwrap();
        assert_eq!(r.summary.excluded, 1);
        assert_eq!(r.summary.pass + r.summary.fail, 0);
    }

    #[test]
    fn cong_on_f7() {
        let reps = verify_cong(&counter(), 2, 7, 1, 1).unwrap();
        assert_eq!(reps[0].summary.fail, 0);
        // psi = 1 has #Y = 7 = 1 mod 3
        let y = &reps[2];
        assert_eq!(y.summary.fail, 0);
        let psi1 = y.cases.iter().find(|c| c.case == "k=1 psi=0").unwrap();
        assert_eq!(psi1.values["value"], json!(7));
    }

    #[test]
    fn crt_on_f7_and_f4() {
        let c = counter();
        let r = verify_crt(&c, 2, 7, 1, 1).unwrap();
        assert_eq!((r.summary.pass, r.summary.fail, r.summary.excluded), (4, 0, 3));
        let r4 = verify_crt(&c, 2, 2, 2, 1).unwrap();
        assert_eq!(r4.summary.fail, 0);
        assert!(r4.summary.pass > 0);
    }

    #[test]
    fn quotient_for_cubic_curves() {
        let c = counter();
        let r = run_quotient(&c, 2, 7, 1, LambdaKey::Log(1), 4, true).unwrap();
        assert!(r.smooth);
        assert!(quotient_consistent(&r));
        assert!(matches!(r.detection, DetectionReport::Polynomial { degree: 0, .. }));
        let singular = run_quotient(&c, 2, 7, 1, LambdaKey::Log(2), 4, true);
        assert!(matches!(singular, Err(Error::SmoothnessGate(_))));
    }
}
