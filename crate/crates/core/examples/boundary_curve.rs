//! The existence boundary `h_MLE` along a ray of signal strength.
//!
//! ```text
//! cargo run --example boundary_curve -- 0.5
//! ```

use mle_phase::boundary::{boundary_curve, CurveSpec, DEFAULT_TOL};
use mle_phase::prob::QuadratureRule;

fn main() -> mle_phase::Result<()> {
    let rho: f64 = std::env::args().nth(1).map_or(0.0, |s| s.parse().expect("rho must be a number"));
    let spec = CurveSpec::equispaced(rho, 10.0, 11)?;
    println!("rho = {rho}");
    println!("{:>6} {:>10} {:>10} {:>10}", "gamma", "h", "t0", "t1");
    for point in boundary_curve(&spec, &QuadratureRule::default(), DEFAULT_TOL)? {
        let sol = point.solution?;
        println!("{:>6.1} {:>10.6} {:>10.4} {:>10.4}", point.gamma, sol.h, sol.t_star[0], sol.t_star[1]);
    }
    Ok(())
}
