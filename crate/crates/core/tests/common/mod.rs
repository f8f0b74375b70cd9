//! Oracles shared by the integration tests. None of them call into the code
//! they check beyond building inputs.

#![allow(dead_code)]

use mle_phase::prob::{ModelParams, RngSeed};
use mle_phase::separability::Dataset;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// `E f(Z)` by composite Simpson on `[-12, 12]`.
pub fn simpson_normal(f: impl Fn(f64) -> f64) -> f64 {
    simpson_normal_with(f, 24_000)
}

/// As [`simpson_normal`] with `m` (even) subintervals.
pub fn simpson_normal_with(f: impl Fn(f64) -> f64, m: usize) -> f64 {
    let (a, b) = (-12.0_f64, 12.0_f64);
    let h = (b - a) / m as f64;
    let dens = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = 0.0;
    for k in 0..=m {
        let x = a + k as f64 * h;
        let w = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(x) * dens(x);
    }
    s * h / 3.0
}

/// Plain logistic function, written out independently of the library.
pub fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Draws `(Y, V)` directly from the model definition.
pub fn draw_yv_oracle(beta0: f64, gamma0: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let x: f64 = rng.sample(StandardNormal);
    let y = if rng.random::<f64>() < logistic(beta0 + gamma0 * x) { 1.0 } else { -1.0 };
    (y, y * x)
}

/// Sample mean and its standard error.
pub fn mean_se(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut mean, mut m2) = (0.0_f64, 0.0_f64, 0.0_f64);
    for v in values {
        n += 1.0;
        let d = v - mean;
        mean += d / n;
        m2 += d * (v - mean);
    }
    (mean, (m2 / (n - 1.0) / n).sqrt())
}

/// Monte Carlo estimate of `E (t0 Y + t1 V - Z)_+^2` from `draws` samples.
pub fn mc_objective(params: &ModelParams, t: [f64; 2], draws: usize, seed: u64) -> (f64, f64) {
    let mut rng = RngSeed::new(seed).rng();
    mean_se((0..draws).map(|_| {
        let (y, v) = draw_yv_oracle(params.beta0(), params.gamma0(), &mut rng);
        let z: f64 = rng.sample(StandardNormal);
        (t[0] * y + t[1] * v - z).max(0.0).powi(2)
    }))
}

/// Rows `y_i (1, x_i)` (or `y_i x_i`) of the separation problem.
fn signed_rows(data: &Dataset, fit_intercept: bool) -> Vec<Vec<f64>> {
    (0..data.n())
        .map(|i| {
            let y = data.y()[i];
            let mut row = Vec::new();
            if fit_intercept {
                row.push(y);
            }
            row.extend((0..data.p()).map(|j| y * data.x()[(i, j)]));
            row
        })
        .collect()
}

fn feasible(rows: &[Vec<f64>], d: &[f64]) -> bool {
    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return false;
    }
    rows.iter()
        .all(|a| a.iter().zip(d).map(|(a, d)| a * d).sum::<f64>() / norm >= -1e-10)
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Brute-force geometric separation check for `p + intercept <= 3`: is
/// there a direction `d != 0` with `y_i (b0 + x_i'b) >= 0` for every `i`?
///
/// Candidates are a fine angular grid over the unit sphere plus every
/// direction that makes two constraints tight at once (the hyperplanes
/// through pairs of points), which contains an extreme ray of the feasible
/// cone whenever that cone is nontrivial.
pub fn geometric_separated(data: &Dataset, fit_intercept: bool) -> bool {
    let rows = signed_rows(data, fit_intercept);
    let k = rows[0].len();
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    match k {
        1 => candidates.extend([vec![1.0], vec![-1.0]]),
        2 => {
            let steps = 3600;
            for s in 0..steps {
                let th = 2.0 * std::f64::consts::PI * s as f64 / steps as f64;
                candidates.push(vec![th.cos(), th.sin()]);
            }
            for a in &rows {
                candidates.push(vec![-a[1], a[0]]);
                candidates.push(vec![a[1], -a[0]]);
            }
        }
        3 => {
            let steps = 120;
            for s in 0..steps {
                for u in 0..=steps / 2 {
                    let th = 2.0 * std::f64::consts::PI * s as f64 / steps as f64;
                    let ph = std::f64::consts::PI * u as f64 / (steps / 2) as f64;
                    candidates.push(vec![ph.sin() * th.cos(), ph.sin() * th.sin(), ph.cos()]);
                }
            }
            let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            for (i, a) in rows.iter().enumerate() {
                for b in rows[i + 1..].iter().map(Vec::as_slice).chain(axes.iter().map(|e| e.as_slice())) {
                    let c = cross(a, b);
                    candidates.push(c.to_vec());
                    candidates.push(c.iter().map(|v| -v).collect());
                }
            }
        }
        _ => panic!("geometric oracle handles at most three coefficients"),
    }
    candidates.iter().any(|d| feasible(&rows, d))
}

/// A small logistic dataset with `2 <= n <= n_max`, `1 <= p <= p_max`,
/// random coefficients, and labels from the model.
pub fn random_tiny_dataset(rng: &mut ChaCha8Rng, n_max: usize, p_max: usize) -> Dataset {
    let n = rng.random_range(2..=n_max);
    let p = rng.random_range(1..=p_max);
    let b0: f64 = rng.random_range(-1.5..1.5);
    let beta: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
    let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let y = (0..n)
        .map(|i| {
            let eta = b0 + (0..p).map(|j| beta[j] * x[(i, j)]).sum::<f64>();
            if rng.random::<f64>() < logistic(eta) { 1.0 } else { -1.0 }
        })
        .collect();
    Dataset::new(x, y).unwrap()
}

/// Two-proportion z statistic for `a / n` vs `b / m`; zero when both
/// proportions sit at the same boundary.
pub fn two_proportion_z(a: usize, n: usize, b: usize, m: usize) -> f64 {
    let (p1, p2) = (a as f64 / n as f64, b as f64 / m as f64);
    let pooled = (a + b) as f64 / (n + m) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n as f64 + 1.0 / m as f64)).sqrt();
    if se == 0.0 {
        0.0
    } else {
        (p1 - p2).abs() / se
    }
}

/// First `kappa` at which the piecewise-linear interpolant of `(kappa,
/// p_hat)` (sorted by `kappa`) falls below `level`.
pub fn crossing(points: &[(f64, f64)], level: f64) -> Option<f64> {
    let j = points.iter().position(|&(_, p)| p < level)?;
    if j == 0 {
        return Some(points[0].0);
    }
    let ((k0, p0), (k1, p1)) = (points[j - 1], points[j]);
    Some(k0 + (k1 - k0) * (p0 - level) / (p0 - p1))
}
