//! The empirical boundary `Q_n` settles on `h_MLE` as `n` grows.

use mle_phase::boundary::{solve_boundary, DEFAULT_TOL};
use mle_phase::cone::{estimate_qn, DEFAULT_QN_TOL};
use mle_phase::prob::{ModelParams, QuadratureRule, RngSeed};

fn main() -> mle_phase::Result<()> {
    let params = ModelParams::new(0.0, 1.0)?;
    let h = solve_boundary(&params, &QuadratureRule::default(), DEFAULT_TOL)?.h;
    println!("h_MLE(0, 1) = {h:.6}");
    for n in [250, 1000, 4000, 16000] {
        let q = estimate_qn(&params, n, 40, RngSeed::new(7), DEFAULT_QN_TOL)?;
        let rms = (q.values.iter().map(|v| (v - h).powi(2)).sum::<f64>() / q.trials as f64).sqrt();
        println!(
            "n = {n:>5}: mean {:.5} +- {:.5}, rms error {rms:.5}, rms * sqrt(n) = {:.3}",
            q.mean,
            q.stderr,
            rms * (n as f64).sqrt()
        );
    }
    Ok(())
}
