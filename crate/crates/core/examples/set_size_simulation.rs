//! Compares mean set sizes of the inflated argmax and the fixed-margin rule
//! on softmax-of-Gaussian score vectors.
//!
//! ```bash
//! cargo run --release -p inflated-argmax --example set_size_simulation
//! ```

use inflated_argmax::experiments::simulate_sizes;
use inflated_argmax::{Epsilon, Result};

fn main() -> Result<()> {
    let rows = simulate_sizes(&[2, 5, 10, 25, 50, 100], Epsilon::new(0.1)?, 1000, 11)?;
    println!(
        "{:>5} {:>16} {:>16} {:>7}",
        "L", "inflated (se)", "margin (se)", "ratio"
    );
    for r in rows {
        println!(
            "{:>5} {:>7.3} ({:.3}) {:>7.3} ({:.3}) {:>7.3}",
            r.classes, r.mean_inflated, r.se_inflated, r.mean_margin, r.se_margin, r.ratio
        );
    }
    Ok(())
}
