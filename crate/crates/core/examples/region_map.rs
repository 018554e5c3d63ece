//! Writes the three-class region map as CSV, ready for a ternary plot.
//!
//! ```bash
//! cargo run -p inflated-argmax --example region_map > map.csv
//! ```

use inflated_argmax::experiments::region_map::{region_map, write_region_csv};
use inflated_argmax::{Epsilon, Result};

fn main() -> Result<()> {
    let points = region_map(Epsilon::new(0.15)?, 40)?;
    let full = points.iter().filter(|p| p.mask == 0b111).count();
    eprintln!(
        "{} grid points, {full} select all three classes",
        points.len()
    );
    write_region_csv(&points, std::io::stdout().lock())
}
