//! Conic-geometry estimators.
//!
//! For a subspace `W` of `R^n` the cone `C(W) = {w + u : w in W, u >= 0}`
//! has statistical dimension
//!
//! ```text
//! delta(C(W)) = n - E min_{w in W} ||(w - Z)_+||^2,   Z ~ N(0, I_n),
//! ```
//!
//! and a uniformly oriented `(p - 1)`-dimensional subspace hits it
//! nontrivially with high probability once `p - 1 + delta > n + a sqrt(n)`.
//! With `W = span(Y, V)` the inner minimum divided by `n` is `Q_n`, which
//! concentrates around `h_MLE`.
//!
//! Everything here reduces to the same small problem: minimize the mean of
//! `(b_i'alpha - z_i)_+^2` over `alpha` in `R^k`, `k <= 3`, which is convex,
//! once differentiable and piecewise quadratic. It is solved by Newton with a
//! Levenberg shift on the active-set Hessian.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{draw_yv, ModelParams, RngSeed};
use crate::separability::Dataset;

/// Default gradient tolerance for the empirical minimization.
pub const DEFAULT_QN_TOL: f64 = 1e-10;
/// Iterates beyond this norm are taken as an unbounded minimizing sequence.
const DIVERGENCE_NORM: f64 = 1e6;
const LEVENBERG: f64 = 1e-8;
const MAX_ITERATIONS: usize = 200;
const MAX_BASIS: usize = 3;

/// Result of minimizing `(1/n) ||(B alpha - z)_+||^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosPartFit {
    pub coef: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    /// Newton stalled and gradient descent finished the job.
    pub fallback: bool,
    /// The infimum is approached only as `|alpha| -> inf`; `value` is 0.
    pub unbounded: bool,
}

struct PosPartProblem<'a> {
    basis: &'a [&'a [f64]],
    z: &'a [f64],
}

impl PosPartProblem<'_> {
    fn n(&self) -> usize {
        self.z.len()
    }

    fn residual(&self, coef: &[f64], i: usize) -> f64 {
        coef.iter().zip(self.basis).map(|(c, b)| c * b[i]).sum::<f64>() - self.z[i]
    }

    fn value(&self, coef: &[f64]) -> f64 {
        (0..self.n()).map(|i| self.residual(coef, i).max(0.0).powi(2)).sum::<f64>() / self.n() as f64
    }

    /// Value, gradient and (generalized) Hessian.
    fn eval(&self, coef: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let k = coef.len();
        let scale = 1.0 / self.n() as f64;
        let mut value = 0.0;
        let mut grad = DVector::zeros(k);
        let mut hess = DMatrix::zeros(k, k);
        for i in 0..self.n() {
            let r = self.residual(coef, i);
            if r < 0.0 {
                continue;
            }
            value += r * r;
            for a in 0..k {
                let ba = self.basis[a][i];
                grad[a] += 2.0 * r * ba;
                for b in 0..=a {
                    hess[(a, b)] += 2.0 * ba * self.basis[b][i];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                hess[(b, a)] = hess[(a, b)];
            }
        }
        (value * scale, grad * scale, hess * scale)
    }

    fn minimize(&self, tol: f64) -> PosPartFit {
        let k = self.basis.len();
        let mut coef = vec![0.0; k];
        let mut fallback = false;
        let mut iterations = 0;
        loop {
            let (value, grad, hess) = self.eval(&coef);
            let grad_norm = grad.norm();
            let norm = coef.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm > DIVERGENCE_NORM {
                return PosPartFit {
                    coef,
                    value: 0.0,
                    grad_norm,
                    iterations,
                    fallback,
                    unbounded: true,
                };
            }
            if k == 0 || grad_norm <= tol || iterations >= MAX_ITERATIONS {
                return PosPartFit {
                    coef,
                    value,
                    grad_norm,
                    iterations,
                    fallback,
                    unbounded: false,
                };
            }
            iterations += 1;
            let shift = LEVENBERG * hess.trace().max(f64::MIN_POSITIVE);
            let shifted = &hess + DMatrix::identity(k, k) * shift;
            let newton = shifted.cholesky().map(|c| -c.solve(&grad));
            let step = newton
                .as_ref()
                .and_then(|d| self.line_search(&coef, value, &grad, d));
            let next = match step {
                Some(next) => next,
                None => {
                    fallback = true;
                    match self.line_search(&coef, value, &grad, &(-&grad)) {
                        Some(next) => next,
                        // Nothing left to gain at this precision.
                        None => {
                            return PosPartFit {
                                coef,
                                value,
                                grad_norm,
                                iterations,
                                fallback,
                                unbounded: false,
                            }
                        }
                    }
                }
            };
            coef = next;
        }
    }

    fn line_search(&self, coef: &[f64], value: f64, grad: &DVector<f64>, dir: &DVector<f64>) -> Option<Vec<f64>> {
        let slope = grad.dot(dir);
        if !(slope < 0.0) {
            return None;
        }
        let mut alpha = 1.0;
        for _ in 0..60 {
            let trial: Vec<f64> = coef.iter().zip(dir.iter()).map(|(c, d)| c + alpha * d).collect();
            if self.value(&trial) <= value + 1e-4 * alpha * slope {
                return Some(trial);
            }
            alpha *= 0.5;
        }
        None
    }
}

/// `min_alpha (1/n) ||(sum_a alpha_a basis_a - z)_+||^2`.
pub fn fit_positive_part(basis: &[&[f64]], z: &[f64], tol: f64) -> Result<PosPartFit> {
    if z.is_empty() {
        return Err(Error::InvalidParameter("need at least one coordinate".into()));
    }
    if let Some(b) = basis.iter().find(|b| b.len() != z.len()) {
        return Err(Error::InvalidParameter(format!(
            "basis vector of length {} does not match n = {}",
            b.len(),
            z.len()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    Ok(PosPartProblem { basis, z }.minimize(tol))
}

/// One realization of `Q_n` from given `(Y, V, Z)` vectors.
pub fn qn_from_samples(y: &[f64], v: &[f64], z: &[f64], tol: f64) -> Result<PosPartFit> {
    fit_positive_part(&[y, v], z, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QnEstimate {
    pub params: ModelParams,
    pub n: usize,
    pub trials: usize,
    pub values: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
    /// Trials finished by the gradient-descent fallback.
    pub fallbacks: usize,
    /// Trials whose minimum was only approached at infinity.
    pub unbounded: usize,
}

/// Monte Carlo over `trials` independent draws of `Q_n`; trial `t` uses
/// `seed.substream(&[t])`.
pub fn estimate_qn(params: &ModelParams, n: usize, trials: usize, seed: RngSeed, tol: f64) -> Result<QnEstimate> {
    if n < 2 || trials == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 2 and trials >= 1, got n = {n}, trials = {trials}")));
    }
    let fits: Vec<PosPartFit> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed.substream(&[t]).rng();
            let (y, v): (Vec<f64>, Vec<f64>) = (0..n).map(|_| draw_yv(params, &mut rng)).unzip();
            let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            qn_from_samples(&y, &v, &z, tol)
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = fits.iter().map(|f| f.value).collect();
    let (mean, stderr) = mean_stderr(&values);
    Ok(QnEstimate {
        params: *params,
        n,
        trials,
        mean,
        stderr,
        fallbacks: fits.iter().filter(|f| f.fallback).count(),
        unbounded: fits.iter().filter(|f| f.unbounded).count(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatDimEstimate {
    pub n: usize,
    pub dim_w: usize,
    pub trials: usize,
    pub delta_hat: f64,
    pub stderr: f64,
}

/// Monte Carlo estimate of `delta(C(W))` for `W` spanned by `basis`
/// (at most three linearly independent vectors; empty means `W = {0}`).
pub fn statistical_dimension(basis: &[Vec<f64>], n: usize, trials: usize, seed: RngSeed) -> Result<StatDimEstimate> {
    if n == 0 || trials == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 1 and trials >= 1, got n = {n}, trials = {trials}")));
    }
    if basis.len() > MAX_BASIS {
        return Err(Error::InvalidParameter(format!(
            "at most {MAX_BASIS} basis vectors are supported, got {}",
            basis.len()
        )));
    }
    if let Some(b) = basis.iter().find(|b| b.len() != n) {
        return Err(Error::InvalidParameter(format!("basis vector of length {} does not match n = {n}", b.len())));
    }
    if !basis.is_empty() {
        let m = DMatrix::from_fn(n, basis.len(), |i, j| basis[j][i]);
        if m.rank(1e-10 * m.norm().max(1.0)) < basis.len() {
            return Err(Error::RankDeficient);
        }
    }
    let refs: Vec<&[f64]> = basis.iter().map(Vec::as_slice).collect();
    let mins: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed.substream(&[t]).rng();
            let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            Ok(fit_positive_part(&refs, &z, DEFAULT_QN_TOL)?.value * n as f64)
        })
        .collect::<Result<_>>()?;
    let (mean, stderr) = mean_stderr(&mins);
    Ok(StatDimEstimate {
        n,
        dim_w: basis.len(),
        trials,
        delta_hat: n as f64 - mean,
        stderr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prediction {
    NoMleWhp,
    MleWhp,
    IndeterminateBand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinematicVerdict {
    pub p: usize,
    pub n: usize,
    pub delta_hat: f64,
    pub delta_stderr: f64,
    /// `p - 1 + delta_hat - n`.
    pub margin: f64,
    pub predicted: Prediction,
    pub epsilon: f64,
    /// `sqrt(8 ln(4 / epsilon))`.
    pub a_epsilon: f64,
}

pub const DEFAULT_EPSILON: f64 = 0.05;

pub fn a_epsilon(epsilon: f64) -> f64 {
    (8.0 * (4.0 / epsilon).ln()).sqrt()
}

/// Classifies a margin against the `+- a_epsilon sqrt(n)` band.
pub fn classify_margin(margin: f64, n: usize, epsilon: f64) -> Prediction {
    let band = a_epsilon(epsilon) * (n as f64).sqrt();
    if margin > band {
        Prediction::NoMleWhp
    } else if margin < -band {
        Prediction::MleWhp
    } else {
        Prediction::IndeterminateBand
    }
}

/// Kinematic-formula prediction of MLE existence for an `n x p` problem:
/// `(Y, V)` are sampled once from `params` (substream 0 of `seed`) and
/// `delta(C(span(Y, V)))` is estimated over `trials` draws of `Z`.
pub fn kinematic_predict(
    params: &ModelParams,
    n: usize,
    p: usize,
    epsilon: f64,
    trials: usize,
    seed: RngSeed,
) -> Result<KinematicVerdict> {
    if p < 2 || p + 1 >= n {
        return Err(Error::Precondition(format!("need 2 <= p < n - 1, got n = {n}, p = {p}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let mut rng = seed.substream(&[0]).rng();
    let (y, v): (Vec<f64>, Vec<f64>) = (0..n).map(|_| draw_yv(params, &mut rng)).unzip();
    let est = statistical_dimension(&[y, v], n, trials, seed.substream(&[1]))?;
    let margin = p as f64 - 1.0 + est.delta_hat - n as f64;
    Ok(KinematicVerdict {
        p,
        n,
        delta_hat: est.delta_hat,
        delta_stderr: est.stderr,
        margin,
        predicted: classify_margin(margin, n, epsilon),
        epsilon,
        a_epsilon: a_epsilon(epsilon),
    })
}

/// Largest dimensions accepted by [`tiny_orthant_oracle`].
pub const TINY_MAX_N: usize = 10;
pub const TINY_MAX_P: usize = 3;

/// Whether `span(y, y * x_1, ..., y * x_p)` meets the nonnegative orthant
/// outside the origin (drop the `y` column when `fit_intercept` is false),
/// which happens exactly when the data are separated.
///
/// Decided by brute force: the LP `max 1'M alpha` subject to
/// `0 <= M alpha <= 1` is solved by visiting every vertex of its feasible
/// polytope, so the answer shares no code with the simplex.
pub fn tiny_orthant_oracle(data: &Dataset, fit_intercept: bool) -> Result<bool> {
    let (n, p) = (data.n(), data.p());
    if n > TINY_MAX_N || p > TINY_MAX_P {
        return Err(Error::Precondition(format!(
            "tiny oracle is limited to n <= {TINY_MAX_N}, p <= {TINY_MAX_P}; got {n} x {p}"
        )));
    }
    let y = data.y();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    if fit_intercept {
        columns.push(y.to_vec());
    }
    for j in 0..p {
        columns.push((0..n).map(|i| y[i] * data.x()[(i, j)]).collect());
    }
    // Keep a maximal independent subset of columns; the span is unchanged.
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for col in columns {
        let mut candidate = kept.clone();
        candidate.push(col.clone());
        let m = DMatrix::from_fn(n, candidate.len(), |i, j| candidate[j][i]);
        if m.rank(1e-10 * m.norm().max(1.0)) == candidate.len() {
            kept.push(col);
        }
    }
    let k = kept.len();
    if k == 0 {
        return Ok(false);
    }
    let m = DMatrix::from_fn(n, k, |i, j| kept[j][i]);
    let objective: Vec<f64> = (0..k).map(|j| kept[j].iter().sum()).collect();

    let mut best = 0.0_f64;
    for rows in combinations(n, k) {
        for bounds in 0..(1u32 << k) {
            let lhs = DMatrix::from_fn(k, k, |a, b| m[(rows[a], b)]);
            let rhs = DVector::from_fn(k, |a, _| f64::from((bounds >> a) & 1));
            let Some(alpha) = lhs.lu().solve(&rhs) else {
                continue;
            };
            let image = &m * &alpha;
            if image.iter().all(|&u| (-1e-9..=1.0 + 1e-9).contains(&u)) {
                let value: f64 = objective.iter().zip(alpha.iter()).map(|(c, a)| c * a).sum();
                best = best.max(value);
            }
        }
    }
    Ok(best > 1e-9)
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
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
