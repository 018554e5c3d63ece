//! Runs the randomized property suites, then shows what a failure looks like
//! by swapping in a broken fixed-margin rule.
//!
//! ```bash
//! cargo run --release -p inflated-argmax --example property_suites
//! ```

use inflated_argmax::experiments::verify::{compatibility, mutant_fixed_margin_rule, run_all};

fn main() {
    let report = run_all(5, 2000, false);
    print!("{}", report.summary());
    assert!(report.passed());

    let broken = compatibility("broken_margin", mutant_fixed_margin_rule, 4, 1000, 5);
    let c = broken.counterexample.expect("the broken rule fails");
    println!(
        "\nbroken rule: w = {:?}, v = {:?}, eps = {}, sets {:?}",
        c.w, c.v, c.epsilon, c.sets
    );
}
