mod common;

use common::{geometric_separated, random_tiny_dataset};
use mle_phase::cone::tiny_orthant_oracle;
use mle_phase::phase::simulate_dataset;
use mle_phase::prob::{ModelParams, RngSeed};
use mle_phase::separability::{check_separation, check_single_variable_separation, Dataset, SeparationOptions};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

fn separated(data: &Dataset, fit_intercept: bool) -> bool {
    let opts = SeparationOptions { fit_intercept, ..Default::default() };
    check_separation(data, &opts).unwrap().separated
}

#[test]
fn lp_matches_geometric_and_orthant_oracles_on_tiny_data() {
    let mut rng = RngSeed::new(31).rng();
    let mut counts = [0usize; 2];
    for case in 0..200 {
        let data = random_tiny_dataset(&mut rng, 8, 2);
        for fit_intercept in [true, false] {
            let lp = separated(&data, fit_intercept);
            let geo = geometric_separated(&data, fit_intercept);
            let orth = tiny_orthant_oracle(&data, fit_intercept).unwrap();
            assert_eq!(lp, geo, "case {case}, intercept {fit_intercept}: LP vs geometric\n{}", data.to_csv_string());
            assert_eq!(lp, orth, "case {case}, intercept {fit_intercept}: LP vs orthant\n{}", data.to_csv_string());
            counts[usize::from(lp)] += 1;
        }
    }
    // Both outcomes must be well represented for the comparison to mean anything.
    assert!(counts[0] > 50 && counts[1] > 50, "{counts:?}");
}

#[test]
fn witness_separates_the_data() {
    let mut rng = RngSeed::new(32).rng();
    for _ in 0..100 {
        let data = random_tiny_dataset(&mut rng, 8, 2);
        let v = check_separation(&data, &SeparationOptions::default()).unwrap();
        let Some(w) = v.witness else { continue };
        let margins: Vec<f64> = (0..data.n())
            .map(|i| data.y()[i] * (w.b0 + (0..data.p()).map(|j| w.b[j] * data.x()[(i, j)]).sum::<f64>()))
            .collect();
        assert!(margins.iter().all(|&m| m >= -1e-8), "{margins:?}");
        assert!(margins.iter().any(|&m| m > 0.0));
    }
}

#[test]
fn verdict_is_scale_invariant() {
    let mut rng = RngSeed::new(33).rng();
    for _ in 0..50 {
        let data = random_tiny_dataset(&mut rng, 8, 2);
        let base = separated(&data, true);
        for c in [1e-3, 0.5, 7.0, 1e3] {
            let scaled = Dataset::new(data.x() * c, data.y().to_vec()).unwrap();
            assert_eq!(separated(&scaled, true), base, "scale {c}");
        }
    }
}

#[test]
fn verdict_is_invariant_under_linear_maps() {
    let mut rng = RngSeed::new(34).rng();
    for case in 0..20 {
        let params = ModelParams::new(0.3, 2.0).unwrap();
        // Near the transition so both verdicts occur.
        let n = 12 + case % 6;
        let data = simulate_dataset(&params, n, 3, RngSeed::with_stream(34, case as u64)).unwrap();
        let base = separated(&data, true);
        let m = loop {
            let m = DMatrix::from_fn(3, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
            if m.determinant().abs() > 0.1 {
                break m;
            }
        };
        let mapped = Dataset::new(data.x() * m.transpose(), data.y().to_vec()).unwrap();
        assert_eq!(separated(&mapped, true), base, "case {case}");
    }
}

#[test]
fn flipping_labels_keeps_the_verdict() {
    let mut rng = RngSeed::new(35).rng();
    for _ in 0..50 {
        let data = random_tiny_dataset(&mut rng, 8, 2);
        let flipped = Dataset::new(data.x().clone(), data.y().iter().map(|y| -y).collect()).unwrap();
        assert_eq!(separated(&flipped, true), separated(&data, true));
    }
}

#[test]
fn removing_rows_keeps_separation() {
    let params = ModelParams::new(0.0, 1.0).unwrap();
    let mut checked = 0;
    for case in 0..10u64 {
        let data = simulate_dataset(&params, 60, 32, RngSeed::with_stream(36, case)).unwrap();
        if !separated(&data, true) {
            continue;
        }
        checked += 1;
        for drop in [0usize, 7, 30, 59] {
            let keep: Vec<usize> = (0..data.n()).filter(|&i| i != drop).collect();
            let x = data.x().select_rows(&keep);
            let y = keep.iter().map(|&i| data.y()[i]).collect();
            assert!(separated(&Dataset::new(x, y).unwrap(), true), "case {case}, dropped {drop}");
        }
    }
    assert!(checked >= 5, "only {checked} separated datasets");
}

#[test]
fn single_variable_check_matches_lp() {
    let mut rng = RngSeed::new(37).rng();
    let mut seen = [0usize; 2];
    for case in 0..500 {
        let n = rng.random_range(1..=12);
        let shift: f64 = rng.random_range(0.0..3.0);
        let y: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let v: Vec<f64> = y.iter().map(|&yi| yi * shift + rng.sample::<f64, _>(StandardNormal)).collect();
        let quick = check_single_variable_separation(&v, &y).unwrap();
        let data = Dataset::new(DMatrix::from_column_slice(n, 1, &v), y.clone()).unwrap();
        assert_eq!(quick, separated(&data, true), "case {case}: v = {v:?}, y = {y:?}");
        seen[usize::from(quick)] += 1;
    }
    assert!(seen[0] > 50 && seen[1] > 50, "{seen:?}");
}

#[test]
fn zero_one_labels_give_the_same_verdict() {
    let mut rng = RngSeed::new(38).rng();
    for _ in 0..20 {
        let data = random_tiny_dataset(&mut rng, 8, 2);
        let pm = Dataset::from_csv_reader(data.to_csv_string().as_bytes()).unwrap();
        let zero_one = data.to_csv_string().replace("\n-1,", "\n0,");
        let zo = Dataset::from_csv_reader(zero_one.as_bytes()).unwrap();
        assert_eq!(zo.y(), data.y());
        assert_eq!(separated(&zo, true), separated(&pm, true));
    }
}
