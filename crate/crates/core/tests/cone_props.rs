mod common;

use common::mean_se;
use mle_phase::boundary::{solve_boundary, DEFAULT_TOL};
use mle_phase::cone::{
    estimate_qn, kinematic_predict, qn_from_samples, statistical_dimension, tiny_orthant_oracle, Prediction,
    DEFAULT_QN_TOL,
};
use mle_phase::prob::{draw_yv, ModelParams, QuadratureRule, RngSeed};
use mle_phase::separability::Dataset;
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

fn h(params: &ModelParams) -> f64 {
    solve_boundary(params, &QuadratureRule::default(), DEFAULT_TOL).unwrap().h
}

#[test]
fn qn_null_model_is_one_half() {
    let est = estimate_qn(&ModelParams::new(0.0, 0.0).unwrap(), 10_000, 10, RngSeed::new(51), DEFAULT_QN_TOL).unwrap();
    assert!((est.mean - 0.5).abs() <= 4.0 * est.stderr, "{} +- {}", est.mean, est.stderr);
    assert!(est.values.iter().all(|&v| v >= 0.0));
}

#[test]
fn qn_concentrates_at_the_boundary_at_root_n_rate() {
    let params = ModelParams::new(0.0, 1.0).unwrap();
    let target = h(&params);
    let mut scaled = Vec::new();
    let mut last = None;
    for (k, n) in [500usize, 2000, 8000].into_iter().enumerate() {
        let est = estimate_qn(&params, n, 100, RngSeed::with_stream(52, k as u64), DEFAULT_QN_TOL).unwrap();
        let rms = (est.values.iter().map(|v| (v - target).powi(2)).sum::<f64>() / est.trials as f64).sqrt();
        scaled.push((n, rms, rms * (n as f64).sqrt()));
        last = Some(est);
    }
    for w in scaled.windows(2) {
        assert!(w[1].1 < w[0].1, "rms error not decreasing: {scaled:?}");
    }
    // One constant C describes all three sizes.
    let c_min = scaled.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let c_max = scaled.iter().map(|s| s.2).fold(0.0, f64::max);
    assert!(c_max / c_min < 1.5, "rms * sqrt(n) not stable: {scaled:?}");
    let last = last.unwrap();
    assert!((last.mean - target).abs() <= 0.02);
    assert!((last.mean - target).abs() <= 4.0 * last.stderr + 1e-3);
}

#[test]
fn qn_mean_within_four_standard_errors_at_large_n() {
    for (i, (b0, g0)) in [(0.5, 0.5), (9f64.ln(), 0.0), (0.0, 3.0)].into_iter().enumerate() {
        let params = ModelParams::new(b0, g0).unwrap();
        let est = estimate_qn(&params, 4000, 30, RngSeed::with_stream(53, i as u64), DEFAULT_QN_TOL).unwrap();
        let target = h(&params);
        assert!((est.mean - target).abs() <= 4.0 * est.stderr, "({b0}, {g0}): {} +- {} vs {target}", est.mean, est.stderr);
    }
}

#[test]
fn qn_is_permutation_invariant_and_stationary() {
    let params = ModelParams::new(0.4, 1.5).unwrap();
    let mut rng = RngSeed::new(54).rng();
    for _ in 0..10 {
        let n = 300;
        let (y, v): (Vec<f64>, Vec<f64>) = (0..n).map(|_| draw_yv(&params, &mut rng)).unzip();
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let fit = qn_from_samples(&y, &v, &z, DEFAULT_QN_TOL).unwrap();
        assert!(fit.grad_norm <= DEFAULT_QN_TOL);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let pick = |a: &[f64]| idx.iter().map(|&i| a[i]).collect::<Vec<_>>();
        let permuted = qn_from_samples(&pick(&y), &pick(&v), &pick(&z), DEFAULT_QN_TOL).unwrap();
        assert!((permuted.value - fit.value).abs() <= 1e-12 * (1.0 + fit.value));
    }
}

#[test]
fn orthant_statistical_dimension_is_half_n() {
    let est = statistical_dimension(&[], 1000, 2000, RngSeed::new(55)).unwrap();
    assert!((est.delta_hat - 500.0).abs() <= 4.0 * est.stderr, "{} +- {}", est.delta_hat, est.stderr);
}

#[test]
fn ones_direction_matches_grid_oracle() {
    let n = 100;
    let trials = 400;
    let est = statistical_dimension(&[vec![1.0; n]], n, trials, RngSeed::new(56)).unwrap();
    // Oracle: independent draws, minimum over t of ||(t 1 - Z)_+||^2 on a grid.
    let mut rng = RngSeed::with_stream(56, 99).rng();
    let grid: Vec<f64> = (0..=4000).map(|k| -4.0 + k as f64 * 1e-3).collect();
    let (mean, se) = mean_se((0..trials).map(|_| {
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let best = grid
            .iter()
            .map(|&t| z.iter().map(|&zi| (t - zi).max(0.0).powi(2)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        n as f64 - best
    }));
    let combined = (est.stderr.powi(2) + se.powi(2)).sqrt();
    assert!((est.delta_hat - mean).abs() <= 4.0 * combined, "{} vs {mean} (se {combined})", est.delta_hat);
}

#[test]
fn yv_span_at_null_model_is_half_n() {
    let n = 10_000;
    let params = ModelParams::new(0.0, 0.0).unwrap();
    let mut rng = RngSeed::new(57).rng();
    let (y, v): (Vec<f64>, Vec<f64>) = (0..n).map(|_| draw_yv(&params, &mut rng)).unzip();
    let est = statistical_dimension(&[y, v], n, 20, RngSeed::new(58)).unwrap();
    assert!((est.delta_hat / n as f64 - 0.5).abs() <= 0.02);
}

#[test]
fn statistical_dimension_grows_with_the_subspace() {
    let n = 400;
    let mut rng = RngSeed::new(59).rng();
    let b1: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let b2: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let b3: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut prev = None::<(f64, f64)>;
    let bases = [vec![], vec![b1.clone()], vec![b1.clone(), b2.clone()], vec![b1, b2, b3]];
    for basis in &bases {
        let est = statistical_dimension(basis, n, 300, RngSeed::new(60)).unwrap();
        assert!(est.delta_hat >= n as f64 / 2.0 - 4.0 * est.stderr);
        if let Some((d, se)) = prev {
            assert!(est.delta_hat >= d - 4.0 * (se * se + est.stderr * est.stderr).sqrt(), "{} < {d}", est.delta_hat);
        }
        prev = Some((est.delta_hat, est.stderr));
    }
}

#[test]
fn kinematic_predictions_at_the_null_model() {
    let params = ModelParams::new(0.0, 0.0).unwrap();
    let n = 10_000;
    for (p, want) in [(7000, Prediction::NoMleWhp), (3000, Prediction::MleWhp), (5000, Prediction::IndeterminateBand)] {
        let v = kinematic_predict(&params, n, p, 0.05, 20, RngSeed::new(61)).unwrap();
        assert_eq!(v.predicted, want, "p = {p}: margin {}", v.margin);
        assert!((v.margin - (p as f64 - 1.0 + v.delta_hat - n as f64)).abs() < 1e-9);
    }
}

#[test]
fn tiny_oracle_on_constant_labels() {
    let mut rng = RngSeed::new(62).rng();
    for _ in 0..20 {
        let n = rng.random_range(1..=10);
        let p = rng.random_range(1..=3);
        let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal) * 10.0);
        assert!(tiny_orthant_oracle(&Dataset::new(x, vec![1.0; n]).unwrap(), true).unwrap());
    }
}
