//! Statistical dimension of the cone generated by a subspace and the
//! nonnegative orthant.

use mle_phase::boundary::{solve_boundary, DEFAULT_TOL};
use mle_phase::cone::statistical_dimension;
use mle_phase::prob::{sample_yv, ModelParams, QuadratureRule, RngSeed};

fn main() -> mle_phase::Result<()> {
    let n = 1000;
    let seed = RngSeed::new(9);
    let orthant = statistical_dimension(&[], n, 500, seed)?;
    println!("orthant:        delta = {:.2} +- {:.2} (n / 2 = {})", orthant.delta_hat, orthant.stderr, n / 2);

    let ones = statistical_dimension(&[vec![1.0; n]], n, 500, seed)?;
    println!("span(1):        delta = {:.2} +- {:.2} (n = {n})", ones.delta_hat, ones.stderr);

    let params = ModelParams::new(0.0, 1.0)?;
    let h = solve_boundary(&params, &QuadratureRule::default(), DEFAULT_TOL)?.h;
    let (y, v) = sample_yv(&params, seed.substream(&[1]), n)?.into_iter().unzip();
    let yv = statistical_dimension(&[y, v], n, 500, seed)?;
    println!(
        "span(Y, V):     delta = {:.2} +- {:.2}, delta / n = {:.4} (1 - h_MLE(0, 1) = {:.4})",
        yv.delta_hat,
        yv.stderr,
        yv.delta_hat / n as f64,
        1.0 - h
    );
    Ok(())
}
