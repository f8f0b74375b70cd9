//! Empirical MLE-existence probabilities over a `(kappa, gamma)` grid.
//!
//! Each replicate draws `x_i ~ N(0, I_p)` with `p = round(kappa n)`, a
//! coefficient vector with equal positive entries and `||beta|| = gamma0`,
//! and labels from the logistic model; the MLE exists iff the separation LP
//! says the data overlap.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{sigmoid, ModelParams, RngSeed};
use crate::separability::{check_separation, Dataset, DatasetMeta, SeparationOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub kappa_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    /// `beta0 = rho gamma`, `gamma0 = sqrt(1 - rho^2) gamma`.
    pub rho: f64,
    pub replicates: usize,
    pub fit_intercept: bool,
    pub base_seed: RngSeed,
}

impl GridSpec {
    /// Desk-scale defaults: `n = 400`, 20 replicates, `kappa` in
    /// `0.05, 0.10, ..., 0.60` and `gamma` in `0, 1, ..., 10`.
    pub fn desk(rho: f64, seed: u64) -> Self {
        Self {
            n: 400,
            kappa_grid: (1..=12).map(|k| k as f64 * 0.05).collect(),
            gamma_grid: (0..=10).map(f64::from).collect(),
            rho,
            replicates: 20,
            fit_intercept: true,
            base_seed: RngSeed::new(seed),
        }
    }

    /// Same grid at `n = 4000` with 50 replicates.
    pub fn paper_scale(rho: f64, seed: u64) -> Self {
        Self {
            n: 4000,
            replicates: 50,
            ..Self::desk(rho, seed)
        }
    }

    pub fn p_for(&self, kappa: f64) -> usize {
        (kappa * self.n as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidParameter("replicates must be at least 1".into()));
        }
        if self.kappa_grid.is_empty() || self.gamma_grid.is_empty() {
            return Err(Error::InvalidParameter("kappa and gamma grids must be nonempty".into()));
        }
        for &kappa in &self.kappa_grid {
            check_dimensions(kappa, self.n)?;
        }
        for &gamma in &self.gamma_grid {
            ModelParams::from_rho_gamma(self.rho, gamma)?;
        }
        Ok(())
    }
}

fn check_dimensions(kappa: f64, n: usize) -> Result<usize> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::InvalidParameter(format!("kappa must lie in (0, 1), got {kappa}")));
    }
    let p = (kappa * n as f64).round() as usize;
    if p < 1 || p + 1 >= n {
        return Err(Error::InvalidParameter(format!(
            "p = round(kappa n) = {p} must satisfy 1 <= p < n - 1 (n = {n}, kappa = {kappa})"
        )));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEstimate {
    pub kappa: f64,
    pub gamma: f64,
    pub p: usize,
    /// Replicates that produced a verdict.
    pub replicates: usize,
    pub exists_count: usize,
    /// `exists_count / replicates`; NaN if every replicate failed.
    pub p_hat: f64,
    /// Replicates whose LP failed, with the error message.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub spec: GridSpec,
    /// Row-major: one row per `gamma`, `kappa` varying fastest.
    pub cells: Vec<CellEstimate>,
}

impl PhaseDiagram {
    pub fn cell(&self, kappa: f64, gamma: f64) -> Option<&CellEstimate> {
        self.cells.iter().find(|c| c.kappa == kappa && c.gamma == gamma)
    }

    pub fn row(&self, gamma: f64) -> impl Iterator<Item = &CellEstimate> {
        self.cells.iter().filter(move |c| c.gamma == gamma)
    }

    pub fn failure_count(&self) -> usize {
        self.cells.iter().map(|c| c.failures.len()).sum()
    }
}

/// One logistic dataset: `x_i ~ N(0, I_p)`, `beta` with equal positive
/// entries and norm `gamma0`, `P(y_i = 1) = sigmoid(beta0 + x_i'beta)`.
pub fn simulate_dataset(params: &ModelParams, n: usize, p: usize, seed: RngSeed) -> Result<Dataset> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidParameter(format!("need n, p >= 1, got n = {n}, p = {p}")));
    }
    let mut rng = seed.rng();
    let coef = params.gamma0() / (p as f64).sqrt();
    let mut x = DMatrix::zeros(n, p);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let mut eta = params.beta0();
        for j in 0..p {
            let v: f64 = rng.sample(StandardNormal);
            x[(i, j)] = v;
            eta += coef * v;
        }
        let u: f64 = rng.random();
        y.push(if u < sigmoid(eta) { 1.0 } else { -1.0 });
    }
    let kappa = p as f64 / n as f64;
    Ok(Dataset::new(x, y)?.with_meta(DatasetMeta {
        params: *params,
        seed,
        kappa,
    }))
}

fn replicate_exists(
    params: &ModelParams,
    n: usize,
    p: usize,
    opts: &SeparationOptions,
    seed: RngSeed,
) -> Result<bool> {
    let data = simulate_dataset(params, n, p, seed)?;
    Ok(check_separation(&data, opts)?.mle_exists())
}

fn summarize(kappa: f64, gamma: f64, p: usize, outcomes: Vec<Result<bool>>) -> CellEstimate {
    let mut exists_count = 0;
    let mut replicates = 0;
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(exists) => {
                replicates += 1;
                exists_count += usize::from(exists);
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    CellEstimate {
        kappa,
        gamma,
        p,
        replicates,
        exists_count,
        p_hat: if replicates > 0 {
            exists_count as f64 / replicates as f64
        } else {
            f64::NAN
        },
        failures,
    }
}

/// Fraction of `replicates` simulated datasets for which the MLE exists.
/// Replicate `r` draws from `seed.substream(&[r])`.
pub fn estimate_cell(
    params: &ModelParams,
    kappa: f64,
    n: usize,
    replicates: usize,
    fit_intercept: bool,
    seed: RngSeed,
) -> Result<CellEstimate> {
    let p = check_dimensions(kappa, n)?;
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be at least 1".into()));
    }
    let opts = SeparationOptions {
        fit_intercept,
        ..Default::default()
    };
    let outcomes = (0..replicates as u64)
        .into_par_iter()
        .map(|r| replicate_exists(params, n, p, &opts, seed.substream(&[r])))
        .collect();
    Ok(summarize(kappa, params.gamma(), p, outcomes))
}

/// Seed of the cell at `(kappa, gamma)`: keyed by the values themselves so
/// that growing or reordering the grid leaves existing cells untouched.
pub fn cell_seed(base: RngSeed, kappa: f64, gamma: f64) -> RngSeed {
    base.substream(&[kappa.to_bits(), gamma.to_bits()])
}

/// Fills every cell of `spec`. Work is spread over the current rayon pool;
/// the result does not depend on its size or on scheduling.
pub fn run_phase_diagram(spec: &GridSpec) -> Result<PhaseDiagram> {
    spec.validate()?;
    let opts = SeparationOptions {
        fit_intercept: spec.fit_intercept,
        ..Default::default()
    };
    let mut jobs = Vec::new();
    for &gamma in &spec.gamma_grid {
        for &kappa in &spec.kappa_grid {
            for r in 0..spec.replicates as u64 {
                jobs.push((kappa, gamma, r));
            }
        }
    }
    // Largest LPs first keeps the pool busy until the end.
    jobs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let outcomes: Vec<((u64, u64, u64), Result<bool>)> = jobs
        .into_par_iter()
        .map(|(kappa, gamma, r)| {
            let params = ModelParams::from_rho_gamma(spec.rho, gamma)?;
            let seed = cell_seed(spec.base_seed, kappa, gamma).substream(&[r]);
            let p = spec.p_for(kappa);
            Ok(((kappa.to_bits(), gamma.to_bits(), r), replicate_exists(&params, spec.n, p, &opts, seed)))
        })
        .collect::<Result<_>>()?;
    type Replicates = Vec<(u64, Result<bool>)>;
    let mut by_key: std::collections::HashMap<(u64, u64), Replicates> = Default::default();
    for ((k, g, r), outcome) in outcomes {
        by_key.entry((k, g)).or_default().push((r, outcome));
    }
    let mut cells = Vec::with_capacity(spec.kappa_grid.len() * spec.gamma_grid.len());
    for &gamma in &spec.gamma_grid {
        for &kappa in &spec.kappa_grid {
            let mut reps = by_key.remove(&(kappa.to_bits(), gamma.to_bits())).unwrap_or_default();
            reps.sort_by_key(|(r, _)| *r);
            let outcomes = reps.into_iter().map(|(_, o)| o).collect();
            cells.push(summarize(kappa, gamma, spec.p_for(kappa), outcomes));
        }
    }
    Ok(PhaseDiagram {
        spec: spec.clone(),
        cells,
    })
}
