//! With no signal, or no intercept, one coordinate of the minimiser vanishes
//! and a one-dimensional solve gives the same boundary.

use mle_phase::boundary::{solve_boundary, solve_boundary_1d, Reduction, DEFAULT_TOL};
use mle_phase::prob::{ModelParams, QuadratureRule};

fn main() -> mle_phase::Result<()> {
    let rule = QuadratureRule::default();
    for (b0, g0, which) in [
        (0.0, 1.0, Reduction::VOnly),
        (0.0, 5.0, Reduction::VOnly),
        (9f64.ln(), 0.0, Reduction::YOnly),
        (3.0, 0.0, Reduction::YOnly),
    ] {
        let params = ModelParams::new(b0, g0)?;
        let full = solve_boundary(&params, &rule, DEFAULT_TOL)?;
        let reduced = solve_boundary_1d(&params, which, &rule, DEFAULT_TOL)?;
        println!(
            "({b0:.3}, {g0}) {which:?}: 2D {:.9} at {:?}, 1D {:.9}",
            full.h, full.t_star, reduced.h
        );
    }
    Ok(())
}
