//! Table-backed arithmetic in F_q, q = p^m.
//!
//! Elements are stored packed: the coordinate vector `(c_0, .., c_{m-1})` in
//! the power basis of the modulus becomes the integer `c_0 + c_1 p + .. +
//! c_{m-1} p^{m-1}`. The packed integer is also the "element order" used
//! whenever a deterministic smallest element is required.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Default upper bound on q for table construction.
pub const DEFAULT_FIELD_BOUND: u64 = 10_000_000;

/// Fields up to this size get a full addition table.
const ADD_TABLE_MAX_Q: u32 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Packed index in `[0, q)`.
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn from_index(index: u32) -> Self {
        FieldElement(index)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub struct FieldSpec {
    p: u32,
    m: u32,
    q: u32,
    /// `a_0 .. a_{m-1}` of the monic modulus `x^m + a_{m-1} x^{m-1} + .. + a_0`.
    modulus: Vec<u32>,
    generator: FieldElement,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace_basis: Vec<u32>,
    add_table: Option<Vec<u32>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish()
    }
}

/// Summary of a field's deterministic construction, for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldInfo {
    pub p: u32,
    pub m: u32,
    pub q: u64,
    /// Full modulus coefficients, constant term first, leading 1 included.
    pub modulus: Vec<u32>,
    pub generator: Vec<u32>,
    pub generator_index: u32,
    pub group_order_factorization: Vec<(u64, u32)>,
}

/// Builds F_{p^m} with the default size bound.
pub fn make_field(p: u32, m: u32) -> Result<Arc<FieldSpec>> {
    FieldSpec::new(p, m, DEFAULT_FIELD_BOUND).map(Arc::new)
}

impl FieldSpec {
    pub fn new(p: u32, m: u32, bound: u64) -> Result<FieldSpec> {
        if !arith::is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("extension degree must be at least 1".into()));
        }
        let q = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
        if q > bound as u128 || q > u32::MAX as u128 {
            return Err(Error::BoundExceeded {
                what: "field size",
                size: q,
                bound: bound as u128,
            });
        }
        let q = q as u32;
        let modulus = smallest_irreducible(p, m);
        let (generator, exp) = primitive_element_and_powers(p, m, q, &modulus);
        let mut log = vec![u32::MAX; q as usize];
        for (t, &x) in exp.iter().enumerate() {
            log[x as usize] = t as u32;
        }
        let trace_basis = (0..m)
            .map(|i| {
                let mut alpha_i = vec![0u32; m as usize];
                alpha_i[i as usize] = 1;
                fp_poly::trace(&alpha_i, &modulus, p, m)
            })
            .collect();

        let mut field = FieldSpec {
            p,
            m,
            q,
            modulus,
            generator,
            exp,
            log,
            trace_basis,
            add_table: None,
        };
        if m > 1 && p > 2 && q <= ADD_TABLE_MAX_Q {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = field.add_digits(a, b);
                }
            }
            field.add_table = Some(table);
        }
        Ok(field)
    }

    /// The same field with its log tables rebuilt for another primitive element.
    pub fn with_generator(&self, generator: FieldElement) -> Result<FieldSpec> {
        let n = self.q as u64 - 1;
        if generator.is_zero() || !self.contains(generator) || self.order(generator)? != n {
            return Err(Error::InvalidArgument(format!("{generator} is not a primitive element")));
        }
        let mut exp = Vec::with_capacity(n as usize);
        let mut cur = FieldElement::ONE;
        for _ in 0..n {
            exp.push(cur.0);
            cur = self.mul(cur, generator);
        }
        let mut log = vec![u32::MAX; self.q as usize];
        for (t, &x) in exp.iter().enumerate() {
            log[x as usize] = t as u32;
        }
        Ok(FieldSpec {
            p: self.p,
            m: self.m,
            q: self.q,
            modulus: self.modulus.clone(),
            generator,
            exp,
            log,
            trace_basis: self.trace_basis.clone(),
            add_table: self.add_table.clone(),
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Order of the multiplicative group, q - 1.
    pub fn group_order(&self) -> u32 {
        self.q - 1
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn info(&self) -> FieldInfo {
        let mut modulus = self.modulus.clone();
        modulus.push(1);
        FieldInfo {
            p: self.p,
            m: self.m,
            q: self.q as u64,
            modulus,
            generator: self.coeffs(self.generator),
            generator_index: self.generator.0,
            group_order_factorization: arith::factorize(self.q as u64 - 1),
        }
    }

    /// Iterates over all q elements in element order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q).map(FieldElement)
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        let mut v = x.0;
        (0..self.m)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.m as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates in [0, {})",
                self.m, self.p
            )));
        }
        Ok(FieldElement(
            coeffs.iter().rev().fold(0u32, |acc, &c| acc * self.p + c),
        ))
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, k: i64) -> FieldElement {
        FieldElement(k.rem_euclid(self.p as i64) as u32)
    }

    pub fn contains(&self, x: FieldElement) -> bool {
        x.0 < self.q
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let mut out = 0;
        let mut scale = 1;
        while a > 0 || b > 0 {
            let d = (a % self.p + b % self.p) % self.p;
            out += d * scale;
            scale *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.m == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= self.p { s - self.p } else { s });
        }
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if let Some(t) = &self.add_table {
            return FieldElement(t[(a.0 * self.q + b.0) as usize]);
        }
        FieldElement(self.add_digits(a.0, b.0))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 || a.0 == 0 {
            return a;
        }
        if self.m == 1 {
            return FieldElement(self.p - a.0);
        }
        let mut v = a.0;
        let mut out = 0;
        let mut scale = 1;
        while v > 0 {
            let d = v % self.p;
            out += ((self.p - d) % self.p) * scale;
            scale *= self.p;
            v /= self.p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let n = self.q - 1;
        let t = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElement(self.exp[(if t >= n { t - n } else { t }) as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(FieldElement(self.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`, with `0^0 = 1`.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let n = (self.q - 1) as u64;
        let t = (self.log[a.0 as usize] as u64 * (e % n)) % n;
        FieldElement(self.exp[t as usize])
    }

    /// `generator^t`.
    pub fn exp(&self, t: u64) -> FieldElement {
        FieldElement(self.exp[(t % (self.q as u64 - 1)) as usize])
    }

    /// Discrete logarithm to the base of the field generator, in `[0, q-2]`.
    pub fn log(&self, x: FieldElement) -> Result<u32> {
        if x.0 == 0 {
            return Err(Error::LogOfZero);
        }
        Ok(self.log[x.0 as usize])
    }

    /// Absolute trace to F_p, as a residue in `[0, p)`.
    pub fn trace(&self, x: FieldElement) -> u32 {
        let mut v = x.0;
        let mut acc = 0u64;
        for &t in &self.trace_basis {
            acc += (v % self.p) as u64 * t as u64;
            v /= self.p;
        }
        (acc % self.p as u64) as u32
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, x: FieldElement) -> Result<u64> {
        let n = (self.q - 1) as u64;
        let l = self.log(x)? as u64;
        Ok(n / arith::gcd(l, n))
    }

    /// Evaluates a polynomial with prime-field coefficients (constant first).
    pub fn eval_prime_poly(&self, coeffs: &[u32], x: FieldElement) -> FieldElement {
        coeffs.iter().rev().fold(FieldElement::ZERO, |acc, &c| {
            self.add(self.mul(acc, x), self.from_int(c as i64))
        })
    }
}

/// A ring embedding F_{p^m} -> F_{p^{mk}} determined by the image of the
/// modulus root.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: Arc<FieldSpec>,
    target: Arc<FieldSpec>,
    root_image: FieldElement,
    generator_image: FieldElement,
}

impl Embedding {
    /// Uses the smallest root of the source modulus in the target.
    pub fn new(source: Arc<FieldSpec>, target: Arc<FieldSpec>) -> Result<Self> {
        Self::with_root(source, target, 0)
    }

    /// Uses the `choice`-th root (in element order) of the source modulus.
    pub fn with_root(source: Arc<FieldSpec>, target: Arc<FieldSpec>, choice: usize) -> Result<Self> {
        let roots = Self::roots(&source, &target)?;
        let root_image = *roots.get(choice).ok_or_else(|| {
            Error::InvalidArgument(format!("only {} roots available", roots.len()))
        })?;
        let mut emb = Embedding {
            source,
            target,
            root_image,
            generator_image: FieldElement::ZERO,
        };
        emb.generator_image = emb.embed(emb.source.generator);
        Ok(emb)
    }

    /// All roots of the source modulus in the target, in element order.
    pub fn roots(source: &FieldSpec, target: &FieldSpec) -> Result<Vec<FieldElement>> {
        if source.p != target.p {
            return Err(Error::InvalidArgument(format!(
                "characteristics differ: {} vs {}",
                source.p, target.p
            )));
        }
        if !target.m.is_multiple_of(source.m) {
            return Err(Error::IncompatibleDegrees {
                from: source.m,
                target: target.m,
            });
        }
        let mut full = source.modulus.clone();
        full.push(1);
        // The roots lie in the copy of F_{p^m} inside the target.
        let step = (target.q as u64 - 1) / (source.q as u64 - 1);
        // For a prime source the modulus is x itself and its root is zero.
        let mut roots: Vec<FieldElement> = std::iter::once(FieldElement::ZERO)
            .chain((0..source.q as u64 - 1).map(|t| target.exp(t * step)))
            .filter(|&x| target.eval_prime_poly(&full, x).is_zero())
            .collect();
        roots.sort();
        if roots.len() != source.m as usize {
            return Err(Error::InvariantViolated(format!(
                "expected {} roots of the source modulus, found {}",
                source.m,
                roots.len()
            )));
        }
        Ok(roots)
    }

    pub fn source(&self) -> &Arc<FieldSpec> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FieldSpec> {
        &self.target
    }

    pub fn root_image(&self) -> FieldElement {
        self.root_image
    }

    pub fn image_of_source_generator(&self) -> FieldElement {
        self.generator_image
    }

    pub fn embed(&self, x: FieldElement) -> FieldElement {
        let coeffs = self.source.coeffs(x);
        self.target.eval_prime_poly(&coeffs, self.root_image)
    }
}

fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    if m == 1 {
        return vec![0];
    }
    let q = (p as u64).pow(m);
    (0..q)
        .map(|packed| {
            let mut v = packed;
            (0..m)
                .map(|_| {
                    let d = (v % p as u64) as u32;
                    v /= p as u64;
                    d
                })
                .collect::<Vec<u32>>()
        })
        .find(|low| {
            let mut f = low.clone();
            f.push(1);
            fp_poly::is_irreducible(&f, p)
        })
        .expect("an irreducible polynomial of every degree exists")
}

fn primitive_element_and_powers(p: u32, m: u32, q: u32, modulus: &[u32]) -> (FieldElement, Vec<u32>) {
    let n = q as u64 - 1;
    let primes = arith::prime_divisors(n);
    let unpack = |x: u32| -> Vec<u32> {
        let mut v = x;
        (0..m)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    };
    let is_one = |v: &[u32]| v[0] == 1 && v[1..].iter().all(|&c| c == 0);
    let generator = (1..q)
        .find(|&x| {
            let a = unpack(x);
            primes
                .iter()
                .all(|&r| !is_one(&fp_poly::powmod(&a, n / r, modulus, p)))
        })
        .expect("F_q* is cyclic");

    // Multiplication by the generator as an m x m matrix over F_p.
    let g = unpack(generator);
    let columns: Vec<Vec<u32>> = (0..m as usize)
        .map(|i| {
            let mut basis = vec![0u32; m as usize];
            basis[i] = 1;
            fp_poly::mulmod(&basis, &g, modulus, p)
        })
        .collect();
    let mut exp = Vec::with_capacity(n as usize);
    let mut cur = vec![0u32; m as usize];
    cur[0] = 1;
    let mut next = vec![0u64; m as usize];
    for _ in 0..n {
        exp.push(cur.iter().rev().fold(0u32, |acc, &c| acc * p + c));
        next.iter_mut().for_each(|x| *x = 0);
        for (i, &c) in cur.iter().enumerate() {
            if c != 0 {
                for (j, &col) in columns[i].iter().enumerate() {
                    next[j] += c as u64 * col as u64;
                }
            }
        }
        for (c, &x) in cur.iter_mut().zip(&next) {
            *c = (x % p as u64) as u32;
        }
    }
    (FieldElement(generator), exp)
}

/// Dense polynomials over F_p, coefficients constant-first.
mod fp_poly {
    fn trim(v: &mut Vec<u32>) {
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    /// Remainder of `a` modulo a monic or non-monic `f`.
    pub fn rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        let mut r: Vec<u32> = a.to_vec();
        let df = f.len() - 1;
        let lead_inv = inv_mod(f[df], p) as u64;
        while r.len() > df && !r.is_empty() {
            let top = r.len() - 1;
            let c = r[top] as u64 * lead_inv % p as u64;
            if c != 0 {
                let shift = top - df;
                for (i, &fc) in f.iter().enumerate() {
                    let v = (r[shift + i] as u64 + (p as u64 - c) * fc as u64 % p as u64) % p as u64;
                    r[shift + i] = v as u32;
                }
            }
            r.pop();
        }
        if r.is_empty() {
            r.push(0);
        }
        trim(&mut r);
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut v: Vec<u32> = out.into_iter().map(|x| x as u32).collect();
        trim(&mut v);
        v
    }

    /// `a * b mod (x^m + low)`, returned with exactly m coefficients.
    pub fn mulmod(a: &[u32], b: &[u32], low: &[u32], p: u32) -> Vec<u32> {
        let mut f = low.to_vec();
        f.push(1);
        let mut r = rem(&mul(a, b, p), &f, p);
        r.resize(low.len(), 0);
        r
    }

    pub fn powmod(a: &[u32], mut e: u64, low: &[u32], p: u32) -> Vec<u32> {
        let m = low.len();
        let mut result = vec![0u32; m];
        result[0] = 1;
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                result = mulmod(&result, &base, low, p);
            }
            base = mulmod(&base, &base, low, p);
            e >>= 1;
        }
        result
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !(y.len() == 1 && y[0] == 0) {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// Rabin's test: f of degree m is irreducible iff x^{p^m} = x mod f and
    /// gcd(x^{p^{m/r}} - x, f) = 1 for each prime r | m.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let m = f.len() - 1;
        if m == 1 {
            return true;
        }
        let low = &f[..m];
        let mut x = vec![0u32; m];
        x[1 % m] = 1;
        let frob = |k: usize| -> Vec<u32> {
            let mut y = x.clone();
            for _ in 0..k {
                y = powmod(&y, p as u64, low, p);
            }
            y
        };
        if frob(m) != x {
            return false;
        }
        for r in crate::arith::prime_divisors(m as u64) {
            let mut d = frob(m / r as usize);
            d[1] = (d[1] + p - 1) % p;
            let g = gcd(f, &d, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }

    /// Trace of the element `a` of F_p[x]/(x^m + low).
    pub fn trace(a: &[u32], low: &[u32], p: u32, m: u32) -> u32 {
        let mut acc = vec![0u32; m as usize];
        let mut y = a.to_vec();
        for _ in 0..m {
            for (s, &c) in acc.iter_mut().zip(&y) {
                *s = (*s + c) % p;
            }
            y = powmod(&y, p as u64, low, p);
        }
        debug_assert!(acc[1..].iter().all(|&c| c == 0));
        acc[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_order(f: &FieldSpec, x: FieldElement) -> u64 {
        let mut y = x;
        let mut k = 1;
        while y != FieldElement::ONE {
            y = f.mul(y, x);
            k += 1;
        }
        k
    }

    #[test]
    fn f5_generator_is_two() {
        let f = make_field(5, 1).unwrap();
        assert_eq!(f.q(), 5);
        assert_eq!(f.generator(), FieldElement::from_index(2));
        assert_eq!(brute_order(&f, f.generator()), 4);
    }

    #[test]
    fn f9_modulus_is_smallest_irreducible_quadratic() {
        let f = make_field(3, 2).unwrap();
        assert_eq!(f.q(), 9);
        // Monic quadratics over F_3 in packed order: x^2 (reducible) then x^2 + 1.
        // x^2 + 1 has no root since -1 is not a square mod 3.
        let roots = (0..3u32).filter(|x| (x * x + 1) % 3 == 0).count();
        assert_eq!(roots, 0);
        assert_eq!(f.modulus(), &[1, 0]);
    }

    #[test]
    fn composite_characteristic_is_rejected() {
        assert_eq!(make_field(4, 1).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(
            FieldSpec::new(2, 30, 1 << 20).unwrap_err(),
            Error::BoundExceeded { .. }
        ));
    }

    #[test]
    fn small_prime_field_arithmetic() {
        let f = make_field(5, 1).unwrap();
        let e = FieldElement::from_index;
        assert_eq!(f.mul(e(3), e(4)), e(2));
        assert_eq!(f.inv(e(2)).unwrap(), e(3));
        assert_eq!(f.inv(e(0)), Err(Error::DivisionByZero));
        assert_eq!(f.log(e(4)).unwrap(), 2);
        assert_eq!(f.log(e(1)).unwrap(), 0);
        assert_eq!(f.log(f.generator()).unwrap(), 1);
        assert_eq!(f.log(e(0)), Err(Error::LogOfZero));
    }

    #[test]
    fn field_axioms_and_lagrange_on_small_fields() {
        for (p, m) in [(2, 1), (2, 3), (3, 2), (5, 2), (7, 1), (2, 4), (3, 3)] {
            let f = make_field(p, m).unwrap();
            let q = f.q() as u64;
            for a in f.elements() {
                if !a.is_zero() {
                    assert_eq!(f.pow(a, q - 1), FieldElement::ONE);
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                for b in f.elements().step_by(3) {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    for c in f.elements().step_by(5) {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn generator_passes_primitive_root_test() {
        for (p, m) in [(2, 1), (2, 5), (3, 4), (5, 3), (7, 2), (11, 2), (13, 1), (2, 8)] {
            let f = make_field(p, m).unwrap();
            let n = f.group_order() as u64;
            for r in arith::prime_divisors(n) {
                assert_ne!(f.pow(f.generator(), n / r), FieldElement::ONE);
            }
            assert_eq!(f.pow(f.generator(), n), FieldElement::ONE);
            for t in 0..n {
                assert_eq!(f.log(f.exp(t)).unwrap() as u64, t);
            }
        }
    }

    #[test]
    fn trace_values_and_linearity() {
        let f5 = make_field(5, 1).unwrap();
        for x in f5.elements() {
            assert_eq!(f5.trace(x), x.index());
        }
        let f9 = make_field(3, 2).unwrap();
        assert_eq!(f9.trace(FieldElement::ONE), 2);
        for a in f9.elements() {
            for b in f9.elements() {
                assert_eq!(f9.trace(f9.add(a, b)), (f9.trace(a) + f9.trace(b)) % 3);
            }
        }
        // Trace agrees with the sum of Frobenius conjugates.
        let f = make_field(2, 5).unwrap();
        for x in f.elements() {
            let mut s = FieldElement::ZERO;
            let mut y = x;
            for _ in 0..5 {
                s = f.add(s, y);
                y = f.pow(y, 2);
            }
            assert_eq!(s.index(), f.trace(x));
        }
    }

    #[test]
    fn trace_surjects_evenly() {
        // Each residue is hit q/p times, so the additive character sums to zero.
        let f = make_field(3, 2).unwrap();
        let mut hits = [0u32; 3];
        for x in f.elements() {
            hits[f.trace(x) as usize] += 1;
        }
        assert_eq!(hits, [3, 3, 3]);
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        let f5 = make_field(5, 1).unwrap();
        let f25 = make_field(5, 2).unwrap();
        let e = Embedding::new(f5.clone(), f25.clone()).unwrap();
        assert_eq!(e.embed(FieldElement::ZERO), FieldElement::ZERO);
        assert_eq!(e.embed(FieldElement::ONE), FieldElement::ONE);
        let two = e.embed(FieldElement::from_index(2));
        assert_eq!(brute_order(&f25, two), 4);

        let f4 = make_field(2, 2).unwrap();
        let f16 = make_field(2, 4).unwrap();
        for choice in 0..2 {
            let e = Embedding::with_root(f4.clone(), f16.clone(), choice).unwrap();
            for a in f4.elements() {
                for b in f4.elements() {
                    assert_eq!(e.embed(f4.add(a, b)), f16.add(e.embed(a), e.embed(b)));
                    assert_eq!(e.embed(f4.mul(a, b)), f16.mul(e.embed(a), e.embed(b)));
                }
            }
        }
    }

    #[test]
    fn embedding_requires_divisible_degree() {
        let f9 = make_field(3, 2).unwrap();
        let f27 = make_field(3, 3).unwrap();
        assert_eq!(
            Embedding::new(f9, f27).unwrap_err(),
            Error::IncompatibleDegrees { from: 2, target: 3 }
        );
    }

    #[test]
    fn add_table_agrees_with_digit_addition() {
        let f = make_field(3, 3).unwrap();
        assert!(f.add_table.is_some());
        for a in 0..27 {
            for b in 0..27 {
                let got = f.add(FieldElement(a), FieldElement(b)).0;
                assert_eq!(got, f.add_digits(a, b));
            }
        }
    }

    #[test]
    fn alternative_generator_keeps_arithmetic() {
        let f = make_field(7, 1).unwrap();
        let g = f.with_generator(FieldElement(5)).unwrap();
        assert_eq!(g.log(FieldElement(5)).unwrap(), 1);
        for t in 0..6u64 {
            assert_eq!(g.log(g.exp(t)).unwrap() as u64, t);
        }
        assert_eq!(g.mul(FieldElement(3), FieldElement(4)), FieldElement(5));
        assert!(f.with_generator(FieldElement(2)).is_err());
    }
}
