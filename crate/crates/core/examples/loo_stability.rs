//! Leave-one-out stability of three pipelines on synthetic data, written
//! as JSON, CSV and a text table.
//!
//! ```bash
//! cargo run --release -p inflated-argmax --example loo_stability -- /tmp/loo
//! ```

use std::path::PathBuf;

use inflated_argmax::experiments::{run_loo_experiment, ExperimentConfig, LearnerKind};
use inflated_argmax::metrics::text_summary;
use inflated_argmax::Result;

fn main() -> Result<()> {
    let config = ExperimentConfig {
        seed: Some(2024),
        learner: LearnerKind::Logistic,
        ..ExperimentConfig::default()
    };
    let outcome = run_loo_experiment(&config)?;
    print!("{}", text_summary(&outcome.reports));

    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        outcome.write_to_dir(&dir)?;
        println!(
            "wrote report.json, delta_j.csv and summary.txt to {}",
            dir.display()
        );
    }
    Ok(())
}
