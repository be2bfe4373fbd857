//! One entry point for counts: fields, Gauss tables and formula engines are
//! built on demand and kept in small caches; records go through the count
//! cache.

use std::any::Any;
use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use mirrorcount_core::direct::{count_record_direct, Budget};
use mirrorcount_core::field::{make_field, FieldElement, FieldSpec};
use mirrorcount_core::formula::{resolved_convention, sum_e1_closed_form, FormulaEngine, Rounded};
use mirrorcount_core::gauss::{Convention, GaussMode, GaussTable};
use mirrorcount_core::instance::{CountRecord, DworkInstance, Method};
use mirrorcount_core::numeric::{BigReal, DoubleDouble, Real, DOUBLE_DOUBLE_BITS};
use mirrorcount_core::{Error, Result};

use crate::cache::CountCache;

#[derive(Clone, Debug)]
pub struct Settings {
    /// Working precision in bits: up to 53 uses f64, up to 106 double-double,
    /// anything larger arbitrary precision.
    pub precision: u32,
    pub budget: u64,
    pub cache_dir: Option<PathBuf>,
    pub verify_cache: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            precision: DOUBLE_DOUBLE_BITS,
            budget: Budget::default().iterations,
            cache_dir: None,
            verify_cache: false,
        }
    }
}

/// The formula engine with its real backend erased.
pub trait CountEngine: Send + Sync {
    fn record(&self, inst: &DworkInstance) -> Result<CountRecord>;
    /// `sum_{E1} S_k` minus its closed form, and the vanishing lemma expression.
    fn lemma_check(&self, lambda: FieldElement) -> Result<(Rounded, Rounded)>;
}

impl<R: Real> CountEngine for FormulaEngine<R> {
    fn record(&self, inst: &DworkInstance) -> Result<CountRecord> {
        FormulaEngine::record(self, inst)
    }

    fn lemma_check(&self, lambda: FieldElement) -> Result<(Rounded, Rounded)> {
        let f = self.table().field();
        let closed = sum_e1_closed_form(self.n(), f.q() as u64, lambda.is_zero())?;
        let mut total = self.sum_e1(lambda)?;
        total.exact -= closed;
        Ok((total.round()?, self.lemma_difference(lambda)?))
    }
}

struct Lru<K, V> {
    cap: usize,
    items: Vec<(K, V)>,
}

impl<K: PartialEq, V: Clone> Lru<K, V> {
    fn new(cap: usize) -> Self {
        Lru { cap, items: Vec::new() }
    }

    fn get(&mut self, k: &K) -> Option<V> {
        let pos = self.items.iter().position(|(key, _)| key == k)?;
        let item = self.items.remove(pos);
        let v = item.1.clone();
        self.items.push(item);
        Some(v)
    }

    fn put(&mut self, k: K, v: V) {
        self.items.retain(|(key, _)| key != &k);
        self.items.push((k, v));
        if self.items.len() > self.cap {
            self.items.remove(0);
        }
    }
}

type AnyTable = Arc<dyn Any + Send + Sync>;
type EngineCache = Lru<(u32, u32, u32), Arc<dyn CountEngine>>;

pub struct Counter {
    settings: Settings,
    convention: Convention,
    fields: Mutex<Lru<(u32, u32), Arc<FieldSpec>>>,
    tables: Mutex<Lru<(u32, u32), AnyTable>>,
    engines: Mutex<EngineCache>,
    records: Mutex<HashMap<(mirrorcount_core::instance::InstanceKey, Method), CountRecord>>,
    disk: Option<Mutex<CountCache>>,
}

impl Counter {
    pub fn new(settings: Settings) -> Result<Self> {
        if settings.precision < 24 {
            return Err(Error::InvalidArgument(format!(
                "precision {} is below the supported minimum of 24 bits",
                settings.precision
            )));
        }
        let disk = match &settings.cache_dir {
            Some(dir) => Some(Mutex::new(CountCache::load(dir)?)),
            None => None,
        };
        Ok(Counter {
            convention: resolved_convention()?,
            settings,
            fields: Mutex::new(Lru::new(24)),
            tables: Mutex::new(Lru::new(3)),
            engines: Mutex::new(Lru::new(4)),
            records: Mutex::new(HashMap::new()),
            disk,
        })
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    pub fn budget(&self) -> Budget {
        Budget::new(self.settings.budget)
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn field(&self, p: u32, m: u32) -> Result<Arc<FieldSpec>> {
        if let Some(f) = self.fields.lock().unwrap().get(&(p, m)) {
            return Ok(f);
        }
        let f = make_field(p, m)?;
        self.fields.lock().unwrap().put((p, m), f.clone());
        Ok(f)
    }

    fn table<R: Real>(&self, f: &Arc<FieldSpec>, precision: u32) -> Result<Arc<GaussTable<R>>> {
        let key = (f.p(), f.m());
        if let Some(t) = self.tables.lock().unwrap().get(&key) {
            if let Ok(t) = t.downcast::<GaussTable<R>>() {
                if t.precision() == precision {
                    return Ok(t);
                }
            }
        }
        let dir = self.settings.cache_dir.as_ref();
        let cached = match dir {
            Some(d) => GaussTable::<R>::load(d, f.clone(), precision, self.convention)?,
            None => None,
        };
        let table = match cached {
            Some(t) => t,
            None => {
                let t = GaussTable::<R>::build(f.clone(), GaussMode::Dft, precision, self.convention)?;
                if let Some(d) = dir {
                    t.save(d)?;
                }
                t
            }
        };
        let table = Arc::new(table);
        self.tables.lock().unwrap().put(key, table.clone() as AnyTable);
        Ok(table)
    }

    fn build<R: Real>(&self, n: u32, f: &Arc<FieldSpec>, precision: u32) -> Result<Arc<dyn CountEngine>> {
        let table = self.table::<R>(f, precision)?;
        Ok(Arc::new(FormulaEngine::new(n, table)?))
    }

    pub fn engine(&self, n: u32, f: &Arc<FieldSpec>) -> Result<Arc<dyn CountEngine>> {
        let key = (n, f.p(), f.m());
        if let Some(e) = self.engines.lock().unwrap().get(&key) {
            return Ok(e);
        }
        self.budget()
            .check("exponent vectors", FormulaEngine::<f64>::work_estimate(n, f.q() as u64))?;
        let prec = self.settings.precision;
        let engine = if prec <= 53 {
            self.build::<f64>(n, f, 53)?
        } else if prec <= DOUBLE_DOUBLE_BITS {
            self.build::<DoubleDouble>(n, f, DOUBLE_DOUBLE_BITS)?
        } else {
            self.build::<BigReal>(n, f, prec)?
        };
        self.engines.lock().unwrap().put(key, engine.clone());
        Ok(engine)
    }

    fn compute(&self, inst: &DworkInstance, method: Method) -> Result<CountRecord> {
        match method {
            Method::Direct => count_record_direct(inst, &self.budget()),
            Method::GaussFormula => self.engine(inst.n, &inst.field)?.record(inst),
        }
    }

    /// The record for `inst`, from memory, the count cache, or fresh.
    pub fn record(&self, inst: &DworkInstance, method: Method) -> Result<CountRecord> {
        let key = (inst.key(), method);
        if let Some(r) = self.records.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let stored = self
            .disk
            .as_ref()
            .and_then(|d| d.lock().unwrap().get(&key.0, method, self.settings.precision).cloned());
        let record = match stored {
            Some(r) if !self.settings.verify_cache => r,
            Some(r) => {
                let fresh = self.compute(inst, method)?;
                if fresh != r {
                    return Err(Error::Cache(format!(
                        "cached record for {} ({method}) differs from recomputation",
                        inst.key()
                    )));
                }
                fresh
            }
            None => {
                let fresh = self.compute(inst, method)?;
                if let Some(d) = &self.disk {
                    d.lock().unwrap().put(fresh.clone(), self.settings.precision);
                }
                fresh
            }
        };
        self.records.lock().unwrap().insert(key, record.clone());
        Ok(record)
    }

    pub fn lemma_check(&self, inst: &DworkInstance) -> Result<(Rounded, Rounded)> {
        self.engine(inst.n, &inst.field)?.lemma_check(inst.lambda)
    }

    /// Writes the count cache, if one is configured.
    pub fn flush(&self) -> Result<()> {
        match &self.disk {
            Some(d) => d.lock().unwrap().save(),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backends_agree() {
        let f = make_field(5, 2).unwrap();
        let mut values = Vec::new();
        for precision in [53, 106, 140] {
            let c = Counter::new(Settings {
                precision,
                ..Settings::default()
            })
            .unwrap();
            let inst = DworkInstance::new(2, c.field(5, 2).unwrap(), f.exp(3)).unwrap();
            let r = c.record(&inst, Method::GaussFormula).unwrap();
            values.push((r.count_x, r.count_y));
        }
        assert!(values.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn lru_evicts_oldest() {
        let mut l = Lru::new(2);
        l.put(1, 'a');
        l.put(2, 'b');
        assert_eq!(l.get(&1), Some('a'));
        l.put(3, 'c');
        assert_eq!(l.get(&2), None);
        assert_eq!(l.get(&1), Some('a'));
    }

    #[test]
    fn budget_refuses_large_engines() {
        let c = Counter::new(Settings {
            budget: 1000,
            ..Settings::default()
        })
        .unwrap();
        let f = c.field(7, 4).unwrap();
        assert!(matches!(c.engine(2, &f), Err(Error::BoundExceeded { .. })));
    }
}
