//! Additive and multiplicative characters and tables of Gauss sums.
//!
//! `G(k) = sum_{x != 0} omega(x)^k psi(x)` where `omega(g) = exp(2 pi i/(q-1))`
//! for the field generator `g` and `psi(x) = exp(2 pi i Tr(x)/p)`. The two
//! endpoints are pinned exactly: `G(0) = q - 1` and `G(q-1) = -q`.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{unit_root, ComplexApprox, RootTable};
use crate::error::{Error, Result};
use crate::fft;
use crate::field::{FieldElement, FieldSpec};
use crate::numeric::Real;

const CACHE_MAGIC: &[u8; 4] = b"MCGT";
const CACHE_VERSION: u32 = 1;

/// How `chi(lambda)^c` pairs with the table: `omega(lambda)^(-c)` or
/// `omega(lambda)^(+c)`. Only one of the two reproduces enumeration counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    LambdaInverse,
    LambdaDirect,
}

impl Convention {
    pub const ALL: [Convention; 2] = [Convention::LambdaInverse, Convention::LambdaDirect];

    pub fn id(self) -> &'static str {
        match self {
            Convention::LambdaInverse => "G(k)=sum omega^k psi; chi(l)^c=omega(l)^-c",
            Convention::LambdaDirect => "G(k)=sum omega^k psi; chi(l)^c=omega(l)^+c",
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Convention::LambdaInverse => "inv",
            Convention::LambdaDirect => "dir",
        }
    }

    /// Exponent actually applied to `omega(lambda)` for `chi(lambda)^c`.
    pub fn lambda_exponent(self, c: u64, group_order: u64) -> u64 {
        let c = c % group_order;
        match self {
            Convention::LambdaInverse => (group_order - c) % group_order,
            Convention::LambdaDirect => c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaussMode {
    Naive,
    Dft,
}

/// `exp(2 pi i Tr(x) / p)`.
pub fn additive_char<R: Real>(f: &FieldSpec, x: FieldElement, prec: u32) -> ComplexApprox<R> {
    unit_root(f.trace(x) as u64, f.p() as u64, prec)
}

/// `omega(x)^k = exp(2 pi i k log(x) / (q-1))`.
pub fn mult_char_power<R: Real>(f: &FieldSpec, k: i64, x: FieldElement, prec: u32) -> Result<ComplexApprox<R>> {
    if x.is_zero() {
        return Err(Error::EvalAtZero);
    }
    let n = f.group_order() as i128;
    let e = (k as i128 * f.log(x)? as i128).rem_euclid(n);
    Ok(unit_root(e as u64, n as u64, prec))
}

/// Per-entry error budget `2^-32 sqrt(q)`.
pub fn default_budget(q: u32) -> f64 {
    2f64.powi(-32) * (q as f64).sqrt()
}

#[derive(Clone, Debug)]
pub struct GaussTable<R> {
    field: Arc<FieldSpec>,
    values: Vec<ComplexApprox<R>>,
    convention: Convention,
    mode: GaussMode,
    precision: u32,
}

impl<R: Real> GaussTable<R> {
    pub fn build(field: Arc<FieldSpec>, mode: GaussMode, precision: u32, convention: Convention) -> Result<Self> {
        let n = field.group_order() as usize;
        let q = field.q();
        let psi_roots: Vec<ComplexApprox<R>> = (0..field.p() as u64)
            .map(|a| unit_root(a, field.p() as u64, precision))
            .collect();
        let psi: Vec<ComplexApprox<R>> = (0..n as u64)
            .map(|t| psi_roots[field.trace(field.exp(t)) as usize].clone())
            .collect();

        let mut values = match mode {
            GaussMode::Dft => fft::dft(&psi, precision),
            GaussMode::Naive => {
                let omega = RootTable::<R>::new(n as u64, precision);
                (0..n as u64)
                    .map(|k| {
                        psi.iter().enumerate().fold(ComplexApprox::zero(precision), |acc, (t, pt)| {
                            acc.add(&pt.mul(&omega.get(k * t as u64 % n as u64)))
                        })
                    })
                    .collect()
            }
        };
        values[0] = ComplexApprox::from_int(q as i64 - 1, precision);
        values.push(ComplexApprox::from_int(-(q as i64), precision));

        let table = GaussTable {
            field,
            values,
            convention,
            mode,
            precision,
        };
        let budget = default_budget(q);
        let worst = table.max_err();
        if worst > budget {
            return Err(Error::PrecisionBudgetExceeded { err: worst, budget });
        }
        Ok(table)
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    /// `G(k)` for `0 <= k <= q-1`.
    pub fn get(&self, k: u64) -> &ComplexApprox<R> {
        &self.values[k as usize]
    }

    pub fn values(&self) -> &[ComplexApprox<R>] {
        &self.values
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn convention_id(&self) -> &'static str {
        self.convention.id()
    }

    pub fn mode(&self) -> GaussMode {
        self.mode
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn max_err(&self) -> f64 {
        self.values.iter().map(|v| v.err).fold(0.0, f64::max)
    }

    /// `omega(lambda)^(+-c)` as dictated by the convention.
    pub fn lambda_power(&self, lambda: FieldElement, c: u64) -> Result<ComplexApprox<R>> {
        if lambda.is_zero() {
            return Err(Error::EvalAtZero);
        }
        let n = self.field.group_order() as u64;
        let e = self.convention.lambda_exponent(c, n);
        mult_char_power(&self.field, e as i64, lambda, self.precision)
    }

    pub fn cache_path(dir: &Path, field: &FieldSpec, precision: u32, convention: Convention) -> PathBuf {
        dir.join(format!(
            "gauss-p{}-m{}-g{}-{}-{}-{}.bin",
            field.p(),
            field.m(),
            field.generator().index(),
            R::backend_name(),
            precision,
            convention.tag()
        ))
    }

    /// Writes the table atomically (temporary file, then rename).
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        let path = Self::cache_path(dir, &self.field, self.precision, self.convention);
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        fs::create_dir_all(dir).map_err(io)?;
        let tmp = path.with_extension("bin.tmp");
        {
            let mut w = BufWriter::new(fs::File::create(&tmp).map_err(io)?);
            w.write_all(CACHE_MAGIC).map_err(io)?;
            for v in [CACHE_VERSION, self.field.p(), self.field.m(), self.field.generator().index(), self.precision] {
                w.write_all(&v.to_le_bytes()).map_err(io)?;
            }
            write_bytes(&mut w, R::backend_name().as_bytes()).map_err(io)?;
            write_bytes(&mut w, self.convention.id().as_bytes()).map_err(io)?;
            w.write_all(&(self.values.len() as u64).to_le_bytes()).map_err(io)?;
            for v in &self.values {
                write_bytes(&mut w, &v.re.encode()).map_err(io)?;
                write_bytes(&mut w, &v.im.encode()).map_err(io)?;
                w.write_all(&v.err.to_le_bytes()).map_err(io)?;
            }
            w.flush().map_err(io)?;
        }
        fs::rename(&tmp, &path).map_err(io)?;
        Ok(path)
    }

    /// Reads a cached table; `Ok(None)` if no cache file exists.
    pub fn load(dir: &Path, field: Arc<FieldSpec>, precision: u32, convention: Convention) -> Result<Option<Self>> {
        let path = Self::cache_path(dir, &field, precision, convention);
        if !path.exists() {
            return Ok(None);
        }
        let bad = |what: &str| Error::Cache(format!("{}: {what}", path.display()));
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        let mut r = BufReader::new(fs::File::open(&path).map_err(io)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != CACHE_MAGIC {
            return Err(bad("bad magic"));
        }
        let mut header = [0u32; 5];
        for h in header.iter_mut() {
            *h = read_u32(&mut r).map_err(io)?;
        }
        let expected = [CACHE_VERSION, field.p(), field.m(), field.generator().index(), precision];
        if header != expected {
            return Err(bad("header mismatch"));
        }
        if read_bytes(&mut r).map_err(io)? != R::backend_name().as_bytes() {
            return Err(bad("backend mismatch"));
        }
        if read_bytes(&mut r).map_err(io)? != convention.id().as_bytes() {
            return Err(bad("convention mismatch"));
        }
        let mut len = [0u8; 8];
        r.read_exact(&mut len).map_err(io)?;
        let len = u64::from_le_bytes(len) as usize;
        if len != field.q() as usize {
            return Err(bad("wrong number of entries"));
        }
        let mut values = Vec::with_capacity(len);
        for _ in 0..len {
            let re = R::decode(&read_bytes(&mut r).map_err(io)?, precision).ok_or_else(|| bad("bad real"))?;
            let im = R::decode(&read_bytes(&mut r).map_err(io)?, precision).ok_or_else(|| bad("bad real"))?;
            let mut e = [0u8; 8];
            r.read_exact(&mut e).map_err(io)?;
            values.push(ComplexApprox::new(re, im, f64::from_le_bytes(e)));
        }
        Ok(Some(GaussTable {
            field,
            values,
            convention,
            mode: GaussMode::Dft,
            precision,
        }))
    }
}

fn write_bytes(w: &mut impl Write, bytes: &[u8]) -> std::io::Result<()> {
    w.write_all(&(bytes.len() as u32).to_le_bytes())?;
    w.write_all(bytes)
}

fn read_u32(r: &mut impl Read) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_bytes(r: &mut impl Read) -> std::io::Result<Vec<u8>> {
    let len = read_u32(r)? as usize;
    if len > 1 << 20 {
        return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, "oversized record"));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::numeric::DoubleDouble;

    type Table = GaussTable<DoubleDouble>;

    fn table(p: u32, m: u32, mode: GaussMode) -> Table {
        Table::build(make_field(p, m).unwrap(), mode, 106, Convention::LambdaInverse).unwrap()
    }

    fn c(x: f64, y: f64) -> ComplexApprox<DoubleDouble> {
        ComplexApprox::exact(DoubleDouble::from_f64(x, 106), DoubleDouble::from_f64(y, 106))
    }

    #[test]
    fn characters_on_small_fields() {
        let f5 = make_field(5, 1).unwrap();
        let one: ComplexApprox<DoubleDouble> = additive_char(&f5, FieldElement::ZERO, 106);
        assert!(one.overlaps(&c(1.0, 0.0), 0.0));
        let mut sum = ComplexApprox::<DoubleDouble>::zero(106);
        for x in f5.elements() {
            sum = sum.add(&additive_char(&f5, x, 106));
        }
        assert!(sum.overlaps(&c(0.0, 0.0), 0.0));

        let f7 = make_field(7, 1).unwrap();
        let v: ComplexApprox<DoubleDouble> = mult_char_power(&f7, 3, f7.generator(), 106).unwrap();
        assert!(v.overlaps(&c(-1.0, 0.0), 0.0));
        let v: ComplexApprox<DoubleDouble> = mult_char_power(&f7, 5, FieldElement::ONE, 106).unwrap();
        assert!(v.overlaps(&c(1.0, 0.0), 0.0));
        assert_eq!(
            mult_char_power::<DoubleDouble>(&f7, 1, FieldElement::ZERO, 106).unwrap_err(),
            Error::EvalAtZero
        );
    }

    #[test]
    fn f3_table() {
        let t = table(3, 1, GaussMode::Dft);
        assert!(t.get(0).overlaps(&c(2.0, 0.0), 0.0));
        assert!(t.get(2).overlaps(&c(-3.0, 0.0), 0.0));
        // generator 2: G(1) = omega(1) psi(1) + omega(2) psi(2) = zeta_3 - zeta_3^2
        let z3: ComplexApprox<DoubleDouble> = unit_root(1, 3, 106);
        let z9: ComplexApprox<DoubleDouble> = unit_root(2, 3, 106);
        assert!(t.get(1).overlaps(&z3.sub(&z9), 0.0));
        assert!(t.get(1).mul(&t.get(1).conj()).overlaps(&c(3.0, 0.0), 0.0));
    }

    #[test]
    fn absolute_values_and_conjugation() {
        for (p, m) in [(5, 1), (7, 1), (2, 3), (3, 2), (13, 1), (2, 4)] {
            let t = table(p, m, GaussMode::Dft);
            let f = t.field().clone();
            let n = f.group_order() as u64;
            let minus_one_log = f.log(f.neg(FieldElement::ONE)).unwrap() as u64;
            for k in 1..n {
                let g = t.get(k);
                let norm = g.mul(&g.conj());
                assert!(norm.overlaps(&c(f.q() as f64, 0.0), 0.0), "|G({k})|^2 over F_{p}^{m}");
                // chi(-1)^k = omega(-1)^k = +-1
                let sign = if (minus_one_log * k).is_multiple_of(n) { 1.0 } else { -1.0 };
                let other = t.get(n - k);
                let expected = if sign > 0.0 { other.clone() } else { other.neg() };
                assert!(g.conj().overlaps(&expected, 0.0));
            }
        }
    }

    #[test]
    fn quadratic_gauss_sum_sign() {
        for p in [5u32, 7, 11, 13] {
            let t = table(p, 1, GaussMode::Dft);
            let half = (p as u64 - 1) / 2;
            let g = t.get(half);
            let sq = g.mul(g);
            let expected = if p % 4 == 1 { p as f64 } else { -(p as f64) };
            assert!(sq.overlaps(&c(expected, 0.0), 0.0), "p = {p}");
        }
    }

    #[test]
    fn naive_and_dft_agree() {
        for (p, m) in [(3, 1), (5, 1), (7, 1), (2, 2), (3, 2), (2, 5), (11, 1), (13, 1)] {
            let a = table(p, m, GaussMode::Naive);
            let b = table(p, m, GaussMode::Dft);
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!(x.overlaps(y, 0.0));
            }
        }
    }

    #[test]
    fn jacobi_magnitude() {
        let t = table(13, 1, GaussMode::Dft);
        let n = 12u64;
        for j in 1..n {
            for k in 1..n - j {
                // |G(j) G(k)|^2 = q |G(j+k)|^2 = q^2
                let prod = t.get(j).mul(t.get(k));
                assert!(prod.mul(&prod.conj()).overlaps(&c(169.0, 0.0), 0.0));
            }
        }
    }

    #[test]
    fn generator_change_permutes_entries() {
        let f = make_field(7, 1).unwrap();
        let alt = Arc::new(f.with_generator(FieldElement::from_index(5)).unwrap());
        let a = Table::build(f.clone(), GaussMode::Dft, 106, Convention::LambdaInverse).unwrap();
        let b = Table::build(alt, GaussMode::Dft, 106, Convention::LambdaInverse).unwrap();
        // 5 = 3^5, so omega'(x) = omega(x)^u with u = 5^-1 = 5 mod 6
        for k in 1..6u64 {
            assert!(b.get(k).overlaps(a.get(5 * k % 6), 0.0));
        }
    }

    #[test]
    fn f64_backend_and_budget() {
        let f = make_field(5, 1).unwrap();
        let t = GaussTable::<f64>::build(f, GaussMode::Dft, 53, Convention::LambdaInverse).unwrap();
        assert!(t.max_err() < default_budget(5));
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = table(3, 2, GaussMode::Dft);
        t.save(dir.path()).unwrap();
        let back = Table::load(dir.path(), t.field().clone(), 106, Convention::LambdaInverse)
            .unwrap()
            .unwrap();
        for (x, y) in t.values().iter().zip(back.values()) {
            assert_eq!(x.re, y.re);
            assert_eq!(x.im, y.im);
            assert_eq!(x.err, y.err);
        }
        assert!(Table::load(dir.path(), t.field().clone(), 106, Convention::LambdaDirect)
            .unwrap()
            .is_none());
    }
}
