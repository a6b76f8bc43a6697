//! The backend contract consumed by the interior-point loop, and its two
//! implementations: the multifrontal sparse solver and the dense oracle.

use super::{analyze, factorize, DenseFactorization, Inertia, LdlError, NumericFactorization};
use super::{PivotOptions, SymbolicFactorization};
use crate::sparse::{fill_reducing_order, SymCsc};

/// A direct solver for sparse symmetric indefinite systems. Analysis is
/// reused across factorizations sharing a pattern; a factorization serves
/// arbitrarily many solves.
pub trait KktBackend: Send {
    fn id(&self) -> &'static str;
    /// Factorizes `a`, replacing any previous factorization.
    fn factorize(&mut self, a: &SymCsc) -> Result<(), LdlError>;
    /// Inertia of the current factorization.
    fn inertia(&self) -> Option<Inertia>;
    /// Solves against the current factorization.
    fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LdlError>;
    fn solve_multi(&self, cols: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, LdlError> {
        cols.iter().map(|b| self.solve(b)).collect()
    }
    /// Delayed pivots of the current factorization, when the notion applies.
    fn delayed_pivots(&self) -> usize {
        0
    }
}

/// Multifrontal sparse backend with a cached symbolic analysis and a
/// dedicated worker pool for the dense front kernels.
pub struct SparseBackend {
    opts: PivotOptions,
    workers: usize,
    pool: rayon::ThreadPool,
    symbolic: Option<SymbolicFactorization>,
    pattern_key: Option<(usize, Vec<usize>, Vec<usize>)>,
    numeric: Option<NumericFactorization>,
}

impl SparseBackend {
    /// `workers` sets the pool size; it never affects the computed values,
    /// only wall time.
    pub fn new(opts: PivotOptions, workers: usize) -> Self {
        let workers = workers.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool construction");
        SparseBackend { opts, workers, pool, symbolic: None, pattern_key: None, numeric: None }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn numeric(&self) -> Option<&NumericFactorization> {
        self.numeric.as_ref()
    }
}

impl KktBackend for SparseBackend {
    fn id(&self) -> &'static str {
        "sparse"
    }

    fn factorize(&mut self, a: &SymCsc) -> Result<(), LdlError> {
        let key = (a.n, a.col_start.clone(), a.row_idx.clone());
        if self.pattern_key.as_ref() != Some(&key) {
            let order = fill_reducing_order(a);
            self.symbolic = Some(analyze(a, &order)?);
            self.pattern_key = Some(key);
        }
        let sym = self.symbolic.as_ref().expect("symbolic analysis present");
        let opts = self.opts;
        self.numeric = Some(self.pool.install(|| factorize(sym, a, &opts))?);
        Ok(())
    }

    fn inertia(&self) -> Option<Inertia> {
        self.numeric.as_ref().map(|f| f.inertia)
    }

    fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LdlError> {
        let fact = self
            .numeric
            .as_ref()
            .ok_or_else(|| LdlError::Internal("solve before factorize".into()))?;
        fact.solve(b)
    }

    fn delayed_pivots(&self) -> usize {
        self.numeric.as_ref().map_or(0, |f| f.delayed_pivots)
    }
}

/// Dense Bunch–Kaufman backend for oracle comparisons and small systems.
pub struct DenseBackend {
    opts: PivotOptions,
    limit: usize,
    fact: Option<DenseFactorization>,
}

impl DenseBackend {
    pub fn new(opts: PivotOptions, limit: usize) -> Self {
        DenseBackend { opts, limit, fact: None }
    }
}

impl KktBackend for DenseBackend {
    fn id(&self) -> &'static str {
        "dense"
    }

    fn factorize(&mut self, a: &SymCsc) -> Result<(), LdlError> {
        self.fact = Some(DenseFactorization::new(a, &self.opts, self.limit)?);
        Ok(())
    }

    fn inertia(&self) -> Option<Inertia> {
        self.fact.as_ref().map(|f| f.inertia())
    }

    fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LdlError> {
        let fact = self
            .fact
            .as_ref()
            .ok_or_else(|| LdlError::Internal("solve before factorize".into()))?;
        fact.solve(b)
    }
}
