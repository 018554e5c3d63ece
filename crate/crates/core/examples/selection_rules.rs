//! The three selection rules on a few score vectors, plus the scalars
//! behind the inflated argmax.
//!
//! ```bash
//! cargo run -p inflated-argmax --example selection_rules
//! ```

use inflated_argmax::selection::thresholds;
use inflated_argmax::{
    argmax_set, fixed_margin, inflated_argmax, Epsilon, InflationParams, Result, ScoreVector,
    SelectionRule,
};

fn main() -> Result<()> {
    let eps = Epsilon::new(0.3)?;
    let params = InflationParams::from(eps);

    for scores in [
        vec![0.5, 0.3, 0.2],
        vec![1.0, 0.0, 0.0],
        vec![0.34, 0.33, 0.33],
        vec![0.45, 0.45, 0.10],
    ] {
        let w = ScoreVector::new(scores)?;
        let t = thresholds(&w, &params);
        println!(
            "w = {:?}\n  argmax {}  inflated {}  fixed-margin {}\n  k_hat = {}, c = {:.6}, t = {:.6}",
            w.as_slice(),
            argmax_set(&w, 0.0),
            inflated_argmax(&w, &params),
            fixed_margin(&w, eps),
            t.k_hat,
            t.water_level,
            t.threshold,
        );
    }

    // Rules are plain values and serialize for configuration files.
    let rule = SelectionRule::inflated(eps);
    println!("\nconfigured rule: {}", serde_json::to_string(&rule)?);
    let w = ScoreVector::new(vec![0.2, 0.41, 0.39])?;
    println!("{} selects {}", rule.name(), rule.apply(&w));
    Ok(())
}
