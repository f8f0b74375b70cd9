//! Complete-separation detection.
//!
//! The logistic MLE fails to exist exactly when some `(b0, b) != 0` has
//! `y_i (b0 + x_i'b) >= 0` for every observation. That is decided by the LP
//!
//! ```text
//! maximize  sum_i y_i (b0 + x_i'b)
//! subject to  y_i (b0 + x_i'b) >= 0,   -1 <= b0 <= 1,   -1 <= b <= 1,
//! ```
//!
//! whose optimum is zero when the data overlap and strictly positive
//! otherwise. See [`simplex`] for how it is solved.

mod dataset;
mod simplex;

use serde::{Deserialize, Serialize};

pub use dataset::{Dataset, DatasetMeta};

use crate::error::{ensure_finite, Error, Result};
use simplex::SeparationLp;

/// Scale-free threshold: separated iff the LP optimum exceeds `tol * n`.
pub const DEFAULT_DECISION_TOL: f64 = 1e-7;
/// Slack allowed on `y_i (b0 + x_i'b) >= 0` when validating a witness.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationOptions {
    pub fit_intercept: bool,
    pub tol: f64,
}

impl Default for SeparationOptions {
    fn default() -> Self {
        Self {
            fit_intercept: true,
            tol: DEFAULT_DECISION_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverStatus {
    Optimal,
    /// All labels equal with an intercept in the model: `b0 = y_1` separates
    /// and no LP is solved.
    TrivialSameLabels,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub b0: f64,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityVerdict {
    pub separated: bool,
    pub lp_objective: f64,
    pub witness: Option<Witness>,
    pub solver_status: SolverStatus,
    pub pivots: usize,
}

impl SeparabilityVerdict {
    /// The logistic MLE exists iff the data are not separated.
    pub fn mle_exists(&self) -> bool {
        !self.separated
    }
}

/// Solves the separation LP for `data`.
pub fn check_separation(data: &Dataset, opts: &SeparationOptions) -> Result<SeparabilityVerdict> {
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "decision tolerance must be positive, got {}",
            opts.tol
        )));
    }
    data.validate()?;
    let n = data.n();
    let p = data.p();
    let y = data.y();
    if opts.fit_intercept && y.iter().all(|&v| v == y[0]) {
        return Ok(SeparabilityVerdict {
            separated: true,
            lp_objective: n as f64,
            witness: Some(Witness {
                b0: y[0],
                b: vec![0.0; p],
            }),
            solver_status: SolverStatus::TrivialSameLabels,
            pivots: 0,
        });
    }

    let offset = usize::from(opts.fit_intercept);
    let m = p + offset;
    let mut rows = vec![0.0; n * m];
    for i in 0..n {
        let row = &mut rows[i * m..(i + 1) * m];
        if opts.fit_intercept {
            row[0] = y[i];
        }
        for j in 0..p {
            row[offset + j] = y[i] * data.x()[(i, j)];
        }
    }
    let sol = SeparationLp { rows: &rows, n, m }.solve()?;

    // Re-evaluate the primal objective of the witness on the data itself
    // rather than trusting the tableau's running value.
    let margins: Vec<f64> = (0..n)
        .map(|i| rows[i * m..(i + 1) * m].iter().zip(&sol.u).map(|(a, u)| a * u).sum())
        .collect();
    let primal: f64 = margins.iter().sum();
    let lp_objective = sol.objective.min(primal).max(0.0);
    let separated = lp_objective > opts.tol * n as f64;
    let witness = separated.then(|| Witness {
        b0: if opts.fit_intercept { sol.u[0] } else { 0.0 },
        b: sol.u[offset..].to_vec(),
    });
    if separated {
        let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
        let scale = 1.0 + data.max_abs();
        if worst < -10.0 * FEASIBILITY_TOL * scale {
            return Err(Error::Numerical(format!(
                "LP witness violates a margin by {worst:.3e}; the data are too ill-conditioned for the dense simplex"
            )));
        }
    }
    Ok(SeparabilityVerdict {
        separated,
        lp_objective,
        witness,
        solver_status: SolverStatus::Optimal,
        pivots: sol.pivots,
    })
}

/// Whether the intercept and a single covariate `v` separate the labels,
/// i.e. whether some `(b0, b1) != 0` has `y_i (b0 + b1 v_i) >= 0` for all
/// `i`. True iff the two classes' ranges of `v` are disjoint or touch.
pub fn check_single_variable_separation(v: &[f64], y: &[f64]) -> Result<bool> {
    if v.len() != y.len() || v.is_empty() {
        return Err(Error::InvalidDataset(format!(
            "need equal, nonzero lengths, got {} values and {} labels",
            v.len(),
            y.len()
        )));
    }
    let mut pos = (f64::INFINITY, f64::NEG_INFINITY);
    let mut neg = (f64::INFINITY, f64::NEG_INFINITY);
    for (&vi, &yi) in v.iter().zip(y) {
        ensure_finite("v", vi)?;
        let range = match yi {
            1.0 => &mut pos,
            -1.0 => &mut neg,
            other => return Err(Error::InvalidDataset(format!("labels must be -1 or +1, got {other}"))),
        };
        range.0 = range.0.min(vi);
        range.1 = range.1.max(vi);
    }
    if pos.0 > pos.1 || neg.0 > neg.1 {
        return Ok(true);
    }
    Ok(neg.1 <= pos.0 || pos.1 <= neg.0)
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::*;

    fn data(x: &[f64], p: usize, y: &[f64]) -> Dataset {
        Dataset::new(DMatrix::from_row_slice(y.len(), p, x), y.to_vec()).unwrap()
    }

    #[test]
    fn perfectly_split_pair() {
        let d = data(&[-1.0, 1.0], 1, &[-1.0, 1.0]);
        let v = check_separation(&d, &SeparationOptions::default()).unwrap();
        assert!(v.separated);
        let w = v.witness.unwrap();
        assert!((w.b[0] - 1.0).abs() < 1e-12);
        // Any b0 in [-1, 1] paired with b = 1 is optimal; all keep the margins.
        assert!(w.b0.abs() <= 1.0);
    }

    #[test]
    fn interleaved_labels_overlap() {
        let d = data(&[-1.0, -0.5, 0.5, 1.0], 1, &[1.0, -1.0, 1.0, -1.0]);
        let v = check_separation(&d, &SeparationOptions::default()).unwrap();
        assert!(!v.separated);
        assert!(v.witness.is_none());
        assert!(v.mle_exists());
    }

    #[test]
    fn same_labels_are_trivially_separated() {
        let d = data(&[0.3, -2.0, 1.0], 1, &[-1.0, -1.0, -1.0]);
        let v = check_separation(&d, &SeparationOptions::default()).unwrap();
        assert!(v.separated);
        assert_eq!(v.solver_status, SolverStatus::TrivialSameLabels);
        assert_eq!(v.witness.unwrap().b0, -1.0);

        // Without an intercept the labels alone say nothing: x changes sign.
        let opts = SeparationOptions {
            fit_intercept: false,
            ..Default::default()
        };
        let v = check_separation(&d, &opts).unwrap();
        assert_eq!(v.solver_status, SolverStatus::Optimal);
        assert!(!v.separated);
    }

    #[test]
    fn no_intercept_through_origin() {
        // Separable by a line through the origin in 2-D.
        let d = data(&[1.0, 0.2, 2.0, -0.5, -1.0, 0.3, -0.2, -2.0], 2, &[1.0, 1.0, -1.0, -1.0]);
        let opts = SeparationOptions {
            fit_intercept: false,
            ..Default::default()
        };
        let v = check_separation(&d, &opts).unwrap();
        assert!(v.separated);
        assert_eq!(v.witness.as_ref().unwrap().b0, 0.0);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let d = data(&[-1.0, 1.0], 1, &[-1.0, 1.0]);
        let opts = SeparationOptions {
            tol: 0.0,
            ..Default::default()
        };
        assert!(check_separation(&d, &opts).is_err());
    }

    #[test]
    fn single_variable_cases() {
        assert!(check_single_variable_separation(&[0.1, -3.0], &[1.0, 1.0]).unwrap());
        assert!(check_single_variable_separation(&[1.0, 2.0, 3.0, 4.0], &[1.0, 1.0, -1.0, -1.0]).unwrap());
        assert!(!check_single_variable_separation(&[1.0, 2.0, 3.0, 4.0], &[1.0, -1.0, 1.0, -1.0]).unwrap());
        // Touching ranges separate weakly.
        assert!(check_single_variable_separation(&[1.0, 2.0, 2.0, 3.0], &[-1.0, -1.0, 1.0, 1.0]).unwrap());
        assert!(check_single_variable_separation(&[1.0], &[0.0]).is_err());
        assert!(check_single_variable_separation(&[1.0, 2.0], &[1.0]).is_err());
    }
}
