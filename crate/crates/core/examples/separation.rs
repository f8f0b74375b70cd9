//! Checks whether a dataset is separated, so that the logistic MLE does not
//! exist, and prints the separating direction.
//!
//! Reads a CSV with a `y` column (labels in {-1, 1} or {0, 1}) and numeric
//! feature columns. Without an argument a simulated dataset is used.
//!
//! ```text
//! cargo run --example separation -- data.csv
//! ```

use mle_phase::phase::simulate_dataset;
use mle_phase::prob::{ModelParams, RngSeed};
use mle_phase::separability::{check_separation, Dataset, SeparationOptions};

fn main() -> mle_phase::Result<()> {
    let data = match std::env::args().nth(1) {
        Some(path) => Dataset::from_csv_path(path)?,
        None => simulate_dataset(&ModelParams::new(0.0, 2.0)?, 200, 70, RngSeed::new(5))?,
    };
    for fit_intercept in [true, false] {
        let opts = SeparationOptions { fit_intercept, ..Default::default() };
        let v = check_separation(&data, &opts)?;
        println!(
            "n = {}, p = {}, intercept = {fit_intercept}: separated = {}, MLE exists = {}, {} pivots",
            data.n(),
            data.p(),
            v.separated,
            v.mle_exists(),
            v.pivots
        );
        if let Some(w) = v.witness {
            let shown: Vec<String> = w.b.iter().take(5).map(|b| format!("{b:.3}")).collect();
            println!("  witness b0 = {:.3}, b = [{}{}]", w.b0, shown.join(", "), if w.b.len() > 5 { ", ..." } else { "" });
        }
    }
    Ok(())
}
