//! Factorization in Z[T]: squarefree split, Cantor-Zassenhaus modulo a small
//! prime, Hensel lifting and subset recombination.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

pub const MAX_FACTOR_DEGREE: usize = 64;

const SEED: u64 = 0x6d69_7272_6f72;

type Z = Vec<BigInt>;
type Q = Vec<BigRational>;
type P = Vec<u64>;

fn trim<T: Zero>(v: &mut Vec<T>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn zmul(a: &[BigInt], b: &[BigInt]) -> Z {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Divides out the content and makes the leading coefficient positive.
fn primitive(a: &[BigInt]) -> Z {
    let c = content(a);
    if c.is_zero() {
        return Vec::new();
    }
    let sign = if a.last().is_some_and(|x| x.is_negative()) { -1 } else { 1 };
    a.iter().map(|x| x / &c * sign).collect()
}

fn to_q(a: &[BigInt]) -> Q {
    a.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn q_to_primitive(a: &[BigRational]) -> Z {
    let l = a.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let z: Z = a.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    primitive(&z)
}

fn q_sub(a: &[BigRational], b: &[BigRational]) -> Q {
    let mut out: Q = (0..a.len().max(b.len()))
        .map(|i| {
            a.get(i).cloned().unwrap_or_else(BigRational::zero) - b.get(i).cloned().unwrap_or_else(BigRational::zero)
        })
        .collect();
    trim(&mut out);
    out
}

fn q_deriv(a: &[BigRational]) -> Q {
    let mut out: Q = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    trim(&mut out);
    out
}

fn q_divrem(a: &[BigRational], b: &[BigRational]) -> (Q, Q) {
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut quo = vec![BigRational::zero(); r.len() - b.len() + 1];
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &c * bi;
        }
        quo[shift] = c;
        r.pop();
        trim(&mut r);
    }
    trim(&mut quo);
    (quo, r)
}

fn q_gcd(a: &[BigRational], b: &[BigRational]) -> Q {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = q_divrem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in x.iter_mut() {
            *c = &*c / &lead;
        }
    }
    x
}

/// Yun's algorithm over Q; returns primitive integer parts with multiplicity.
fn squarefree(f: &[BigInt]) -> Vec<(Z, u32)> {
    let fq = to_q(f);
    let df = q_deriv(&fq);
    let a0 = q_gcd(&fq, &df);
    let mut b = q_divrem(&fq, &a0).0;
    let c = q_divrem(&df, &a0).0;
    let mut d = q_sub(&c, &q_deriv(&b));
    let mut out = Vec::new();
    let mut i = 1;
    while b.len() > 1 {
        let a = q_gcd(&b, &d);
        let next_b = q_divrem(&b, &a).0;
        let next_c = q_divrem(&d, &a).0;
        if a.len() > 1 {
            out.push((q_to_primitive(&a), i));
        }
        d = q_sub(&next_c, &q_deriv(&next_b));
        b = next_b;
        i += 1;
    }
    out
}

fn pm_reduce(a: &[BigInt], p: u64) -> P {
    let pb = BigInt::from(p);
    let mut out: P = a.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
    trim(&mut out);
    out
}

fn pm_mul(a: &[u64], b: &[u64], p: u64) -> P {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    trim(&mut out);
    out
}

fn pm_sub(a: &[u64], b: &[u64], p: u64) -> P {
    let mut out: P = (0..a.len().max(b.len()))
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(&mut out);
    out
}

fn pm_inv(x: u64, p: u64) -> u64 {
    arith::mod_inverse(x, p).expect("invertible mod p")
}

fn pm_divrem(a: &[u64], b: &[u64], p: u64) -> (P, P) {
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let inv = pm_inv(*b.last().unwrap(), p);
    let mut quo = vec![0u64; r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = (*r.last().unwrap() as u128 * inv as u128 % p as u128) as u64;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - (c as u128 * bi as u128 % p as u128) as u64) % p;
        }
        quo[shift] = c;
        r.pop();
        trim(&mut r);
    }
    trim(&mut quo);
    (quo, r)
}

fn pm_monic(a: &[u64], p: u64) -> P {
    let inv = pm_inv(*a.last().unwrap(), p);
    a.iter().map(|&c| (c as u128 * inv as u128 % p as u128) as u64).collect()
}

fn pm_gcd(a: &[u64], b: &[u64], p: u64) -> P {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = pm_divrem(&x, &y, p);
        x = y;
        y = r;
    }
    if x.is_empty() {
        x
    } else {
        pm_monic(&x, p)
    }
}

/// `(s, t)` with `s a + t b = 1 mod p` for coprime `a`, `b`.
fn pm_bezout(a: &[u64], b: &[u64], p: u64) -> (P, P) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1): (P, P) = (vec![1], Vec::new());
    let (mut t0, mut t1): (P, P) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = pm_divrem(&r0, &r1, p);
        let s = pm_sub(&s0, &pm_mul(&q, &s1, p), p);
        let t = pm_sub(&t0, &pm_mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    assert_eq!(r0.len(), 1, "not coprime mod {p}");
    let inv = pm_inv(r0[0], p);
    let scale = |v: &[u64]| -> P { v.iter().map(|&c| (c as u128 * inv as u128 % p as u128) as u64).collect() };
    (scale(&s0), scale(&t0))
}

fn pm_powmod(base: &[u64], exp: &BigUint, modulus: &[u64], p: u64) -> P {
    let mut result: P = vec![1];
    let base = pm_divrem(base, modulus, p).1;
    for i in (0..exp.bits()).rev() {
        result = pm_divrem(&pm_mul(&result, &result, p), modulus, p).1;
        if exp.bit(i) {
            result = pm_divrem(&pm_mul(&result, &base, p), modulus, p).1;
        }
    }
    result
}

fn pm_deriv(a: &[u64], p: u64) -> P {
    let mut out: P = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| (c as u128 * (i as u64 % p) as u128 % p as u128) as u64)
        .collect();
    trim(&mut out);
    out
}

/// Monic irreducible factors of a monic squarefree `f` modulo an odd prime.
fn factor_mod_p(f: &[u64], p: u64, rng: &mut ChaCha8Rng) -> Vec<P> {
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let x: P = vec![0, 1];
    let mut h = x.clone();
    let mut d = 0;
    while rest.len() > 1 {
        d += 1;
        if 2 * d > rest.len() - 1 {
            out.push(rest.clone());
            break;
        }
        h = pm_powmod(&h, &BigUint::from(p), &rest, p);
        let g = pm_gcd(&pm_sub(&h, &x, p), &rest, p);
        if g.len() > 1 {
            equal_degree(&g, d, p, rng, &mut out);
            rest = pm_divrem(&rest, &g, p).0;
            h = pm_divrem(&h, &rest, p).1;
        }
    }
    out.sort();
    out
}

fn equal_degree(f: &[u64], d: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<P>) {
    let deg = f.len() - 1;
    if deg == d {
        out.push(f.to_vec());
        return;
    }
    let exp = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let mut a: P = (0..deg).map(|_| rng.gen_range(0..p)).collect();
        trim(&mut a);
        if a.len() < 2 {
            continue;
        }
        let b = pm_sub(&pm_powmod(&a, &exp, f, p), &[1], p);
        let g = pm_gcd(&b, f, p);
        if g.len() > 1 && g.len() < f.len() {
            let other = pm_divrem(f, &g, p).0;
            equal_degree(&g, d, p, rng, out);
            equal_degree(&pm_monic(&other, p), d, p, rng, out);
            return;
        }
    }
}

fn mod_pos(x: &BigInt, m: &BigInt) -> BigInt {
    x.mod_floor(m)
}

fn mm_reduce(a: &[BigInt], m: &BigInt) -> Z {
    let mut out: Z = a.iter().map(|c| mod_pos(c, m)).collect();
    trim(&mut out);
    out
}

fn mm_mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Z {
    mm_reduce(&zmul(a, b), m)
}

fn mm_add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Z {
    let v: Z = (0..a.len().max(b.len()))
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect();
    mm_reduce(&v, m)
}

fn mm_sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Z {
    let v: Z = (0..a.len().max(b.len()))
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect();
    mm_reduce(&v, m)
}

/// Division by a monic polynomial modulo `m`.
fn mm_divrem(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (Z, Z) {
    let mut r = mm_reduce(a, m);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    debug_assert!(b.last().unwrap().is_one());
    let mut quo = vec![BigInt::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap().clone();
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] = mod_pos(&(&r[shift + i] - &c * bi), m);
        }
        quo[shift] = c;
        r.pop();
        trim(&mut r);
    }
    trim(&mut quo);
    (quo, r)
}

/// One quadratic Hensel step: from `f = g h`, `s g + t h = 1` modulo `m` to
/// the same modulo `m^2`; `h` is monic.
fn hensel_step(f: &[BigInt], g: &Z, h: &Z, s: &Z, t: &Z, m: &BigInt) -> (Z, Z, Z, Z) {
    let m2 = m * m;
    let e = mm_sub(f, &mm_mul(g, h, &m2), &m2);
    let (q, r) = mm_divrem(&mm_mul(s, &e, &m2), h, &m2);
    let g2 = mm_add(g, &mm_add(&mm_mul(t, &e, &m2), &mm_mul(&q, g, &m2), &m2), &m2);
    let h2 = mm_add(h, &r, &m2);
    let b = mm_sub(&mm_add(&mm_mul(s, &g2, &m2), &mm_mul(t, &h2, &m2), &m2), &[BigInt::one()], &m2);
    let (c, d) = mm_divrem(&mm_mul(s, &b, &m2), &h2, &m2);
    let s2 = mm_sub(s, &d, &m2);
    let t2 = mm_sub(&mm_sub(t, &mm_mul(t, &b, &m2), &m2), &mm_mul(&c, &g2, &m2), &m2);
    (g2, h2, s2, t2)
}

/// Lifts `f = lc(f) prod u_i (mod p)` to a factorization modulo `p^(2^j) >= bound`.
fn hensel_lift(f: &[BigInt], factors: &[P], p: u64, bound: &BigInt) -> (Vec<Z>, BigInt) {
    let pb = BigInt::from(p);
    let mut steps = 0;
    let mut m = pb.clone();
    while &m < bound {
        m = &m * &m;
        steps += 1;
    }
    let mut lifted = Vec::new();
    let mut current: Z = f.to_vec();
    for (idx, u) in factors.iter().enumerate() {
        if idx + 1 == factors.len() {
            // what remains is lc * u_last; make it monic modulo m
            let lc = current.last().unwrap().clone();
            let inv = lc.modinv(&m).expect("leading coefficient invertible");
            lifted.push(mm_reduce(&current.iter().map(|c| c * &inv).collect::<Z>(), &m));
            break;
        }
        let cur_p = pm_reduce(&current, p);
        let rest_p = pm_divrem(&cur_p, u, p).0;
        let (sp, tp) = pm_bezout(&rest_p, u, p);
        let to_z = |v: &P| -> Z { v.iter().map(|&c| BigInt::from(c)).collect() };
        let (mut g, mut h, mut s, mut t) = (to_z(&rest_p), to_z(u), to_z(&sp), to_z(&tp));
        let mut mm = pb.clone();
        for _ in 0..steps {
            (g, h, s, t) = hensel_step(&current, &g, &h, &s, &t, &mm);
            mm = &mm * &mm;
        }
        lifted.push(h);
        current = g;
    }
    (lifted, m)
}

fn symmetric(a: &[BigInt], m: &BigInt) -> Z {
    let half = m / 2;
    let mut out: Z = a
        .iter()
        .map(|c| {
            let r = mod_pos(c, m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect();
    trim(&mut out);
    out
}

fn norm1(a: &[BigInt]) -> BigInt {
    a.iter().map(|c| c.abs()).sum()
}

fn is_prime_good(f: &[BigInt], p: u64) -> bool {
    let lc = f.last().unwrap();
    if (lc % BigInt::from(p)).is_zero() {
        return false;
    }
    let fp = pm_reduce(f, p);
    pm_gcd(&fp, &pm_deriv(&fp, p), p).len() == 1
}

/// The `skip`-th odd prime (counting from 0) that keeps `f` squarefree with
/// the same degree.
fn good_prime(f: &[BigInt], skip: usize) -> u64 {
    (3u64..)
        .filter(|&p| arith::is_prime(p) && is_prime_good(f, p))
        .nth(skip)
        .expect("good primes exist for squarefree f")
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Irreducible factors of a primitive squarefree `f` with positive leading
/// coefficient, using the `skip`-th good prime.
fn zassenhaus(f: &[BigInt], skip: usize) -> Vec<Z> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.to_vec()];
    }
    let p = good_prime(f, skip);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ p);
    let fp = pm_monic(&pm_reduce(f, p), p);
    let modular = factor_mod_p(&fp, p, &mut rng);
    if modular.len() == 1 {
        return vec![f.to_vec()];
    }
    let a = f.iter().map(|c| c.abs()).max().unwrap();
    let b = f.last().unwrap().abs();
    let root = BigInt::from((n as f64 + 1.0).sqrt().ceil() as u64);
    let bound = root * (BigInt::one() << n) * a * &b;
    let (mut lifted, m) = hensel_lift(f, &modular, p, &(&bound * 2 + 1));

    let mut found = Vec::new();
    let mut fstar = f.to_vec();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let lc = fstar.last().unwrap().clone();
        let mut hit = None;
        for subset in combinations(lifted.len(), size) {
            let pick = |inside: bool| -> Z {
                let init: Z = vec![lc.clone()];
                let prod = lifted
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| subset.contains(i) == inside)
                    .fold(init, |acc, (_, u)| mm_mul(&acc, u, &m));
                symmetric(&prod, &m)
            };
            let g = pick(true);
            let h = pick(false);
            if norm1(&g) * norm1(&h) <= bound {
                hit = Some((subset, g, h));
                break;
            }
        }
        match hit {
            Some((subset, g, h)) => {
                found.push(primitive(&g));
                fstar = primitive(&h);
                lifted = lifted
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, u)| u)
                    .collect();
            }
            None => size += 1,
        }
    }
    found.push(fstar);
    found
}

fn normalize(mut z: Z) -> Result<IntPolynomial> {
    if z[0].sign() == Sign::Minus {
        z.iter_mut().for_each(|c| *c = -&*c);
    }
    IntPolynomial::new(z)
}

/// Complete factorization over Z; factors have constant term 1 and are
/// listed by (degree, coefficients).
pub fn factor_over_z(f: &IntPolynomial) -> Result<Vec<(IntPolynomial, u32)>> {
    if f.degree() > MAX_FACTOR_DEGREE {
        return Err(Error::DegreeBound {
            degree: f.degree(),
            bound: MAX_FACTOR_DEGREE,
        });
    }
    if f.degree() == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (part, mult) in squarefree(&primitive(f.coeffs())) {
        for g in zassenhaus(&part, 0) {
            out.push((normalize(g)?, mult));
        }
    }
    out.sort();
    let product = out.iter().fold(IntPolynomial::one(), |acc, (g, e)| acc.mul(&g.pow(*e)));
    if &product != f {
        return Err(Error::InvariantViolated(format!("factors of {f} multiply to {product}")));
    }
    Ok(out)
}

/// Irreducibility confirmed independently with two different primes.
pub fn is_irreducible(f: &IntPolynomial) -> Result<bool> {
    if f.degree() > MAX_FACTOR_DEGREE {
        return Err(Error::DegreeBound {
            degree: f.degree(),
            bound: MAX_FACTOR_DEGREE,
        });
    }
    let parts = squarefree(&primitive(f.coeffs()));
    if parts.len() != 1 || parts[0].1 != 1 {
        return Ok(false);
    }
    let a = zassenhaus(&parts[0].0, 0).len() == 1;
    let b = zassenhaus(&parts[0].0, 1).len() == 1;
    if a != b {
        return Err(Error::InvariantViolated(format!("primes disagree on irreducibility of {f}")));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn small_factorizations() {
        assert_eq!(
            factor_over_z(&poly(&[1, -5, 6])).unwrap(),
            vec![(poly(&[1, -3]), 1), (poly(&[1, -2]), 1)]
        );
        assert_eq!(
            factor_over_z(&poly(&[1, 0, -1])).unwrap(),
            vec![(poly(&[1, -1]), 1), (poly(&[1, 1]), 1)]
        );
        assert_eq!(factor_over_z(&poly(&[1, 1, 1])).unwrap(), vec![(poly(&[1, 1, 1]), 1)]);
        assert!(is_irreducible(&poly(&[1, 1, 1])).unwrap());
        assert!(factor_over_z(&IntPolynomial::one()).unwrap().is_empty());
    }

    #[test]
    fn repeated_factors() {
        let f = poly(&[1, -2]).pow(3).mul(&poly(&[1, 1, 1]).pow(2));
        assert_eq!(
            factor_over_z(&f).unwrap(),
            vec![(poly(&[1, -2]), 3), (poly(&[1, 1, 1]), 2)]
        );
        assert!(!is_irreducible(&f).unwrap());
    }

    #[test]
    fn swinnerton_dyer_style_splitting() {
        // x^4 + 1 reversed: irreducible over Z but splits modulo every prime
        let f = poly(&[1, 0, 0, 0, 1]);
        assert_eq!(factor_over_z(&f).unwrap(), vec![(f.clone(), 1)]);
        assert!(is_irreducible(&f).unwrap());
        // 1 - 10 T^2 + T^4 likewise
        let g = poly(&[1, 0, -10, 0, 1]);
        assert_eq!(factor_over_z(&g).unwrap(), vec![(g.clone(), 1)]);
    }

    #[test]
    fn cyclotomic_products() {
        // 1 - T^12 splits into the cyclotomic polynomials of the divisors of 12
        let mut c = vec![0i64; 13];
        c[0] = 1;
        c[12] = -1;
        let factors = factor_over_z(&poly(&c)).unwrap();
        assert_eq!(factors.len(), 6);
        let degrees: Vec<usize> = factors.iter().map(|(g, _)| g.degree()).collect();
        assert_eq!(degrees.iter().sum::<usize>(), 12);
        assert!(factors.iter().all(|(g, e)| *e == 1 && is_irreducible(g).unwrap()));
    }

    #[test]
    fn degree_bound() {
        let mut c = vec![0i64; 66];
        c[0] = 1;
        c[65] = 1;
        assert!(matches!(factor_over_z(&poly(&c)), Err(Error::DegreeBound { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn products_refactor(
            a in proptest::collection::vec(-6i64..6, 1..4),
            b in proptest::collection::vec(-6i64..6, 1..4),
            e in 1u32..3,
        ) {
            let mut ca = vec![1i64];
            ca.extend(a);
            let mut cb = vec![1i64];
            cb.extend(b);
            let f = poly(&ca).pow(e).mul(&poly(&cb));
            let factors = factor_over_z(&f).unwrap();
            let back = factors.iter().fold(IntPolynomial::one(), |acc, (g, k)| acc.mul(&g.pow(*k)));
            prop_assert_eq!(back, f);
            for (g, _) in &factors {
                prop_assert!(is_irreducible(g).unwrap());
            }
        }
    }
}
