//! A small simulated phase diagram next to the theoretical boundary.

use mle_phase::boundary::{solve_boundary, DEFAULT_TOL};
use mle_phase::phase::{run_phase_diagram, GridSpec};
use mle_phase::prob::{ModelParams, QuadratureRule};

fn main() -> mle_phase::Result<()> {
    let spec = GridSpec {
        n: 200,
        kappa_grid: (1..=6).map(|k| k as f64 * 0.1).collect(),
        gamma_grid: vec![0.0, 2.0, 5.0],
        replicates: 10,
        ..GridSpec::desk(0.0, 11)
    };
    let diagram = run_phase_diagram(&spec)?;
    print!("{:>6} {:>8} |", "gamma", "h");
    for k in &spec.kappa_grid {
        print!(" {k:>5.2}");
    }
    println!();
    for &g in &spec.gamma_grid {
        let h = solve_boundary(&ModelParams::from_rho_gamma(spec.rho, g)?, &QuadratureRule::default(), DEFAULT_TOL)?.h;
        print!("{g:>6.1} {h:>8.4} |");
        for cell in diagram.row(g) {
            print!(" {:>5.2}", cell.p_hat);
        }
        println!();
    }
    println!("entries: fraction of {} replicates in which the MLE exists (n = {})", spec.replicates, spec.n);
    Ok(())
}
