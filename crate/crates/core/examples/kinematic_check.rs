//! Predicts MLE existence for an `n x p` problem from the kinematic formula
//! and compares it with the boundary and with a simulated dataset.

use mle_phase::boundary::{solve_boundary, DEFAULT_TOL};
use mle_phase::cone::{kinematic_predict, DEFAULT_EPSILON};
use mle_phase::phase::simulate_dataset;
use mle_phase::prob::{ModelParams, QuadratureRule, RngSeed};
use mle_phase::separability::{check_separation, SeparationOptions};

fn main() -> mle_phase::Result<()> {
    let params = ModelParams::new(0.0, 1.0)?;
    let n = 2000;
    let h = solve_boundary(&params, &QuadratureRule::default(), DEFAULT_TOL)?.h;
    println!("h_MLE(0, 1) = {h:.4}");
    for p in [400, 1200] {
        let k = kinematic_predict(&params, n, p, DEFAULT_EPSILON, 200, RngSeed::new(13))?;
        let data = simulate_dataset(&params, n, p, RngSeed::new(14))?;
        let exists = check_separation(&data, &SeparationOptions::default())?.mle_exists();
        println!(
            "p / n = {:.2}: margin {:>8.1} (band +- {:.1}) -> {:?}; simulated MLE exists = {exists}",
            p as f64 / n as f64,
            k.margin,
            k.a_epsilon * (n as f64).sqrt(),
            k.predicted
        );
    }
    Ok(())
}
