//! Projects a score vector onto each region `R_j` and rebuilds the
//! inflated argmax from the projection distances.
//!
//! ```bash
//! cargo run -p inflated-argmax --example region_projection
//! ```

use inflated_argmax::region::{inflated_argmax_by_definition, kkt_residual, project_onto_region};
use inflated_argmax::{in_region, inflated_argmax, Epsilon, Result, ScoreVector};

fn main() -> Result<()> {
    let eps = Epsilon::new(0.3)?;
    let w = ScoreVector::new(vec![0.5, 0.3, 0.2])?;

    for j in 0..w.classes() {
        let p = project_onto_region(&w, eps, j)?;
        println!(
            "class {j}: anchor {:.6}, projection {:?}, distance {:.6} ({}), kkt residual {:.1e}",
            p.anchor,
            p.projected
                .iter()
                .map(|v| format!("{v:.4}"))
                .collect::<Vec<_>>(),
            p.distance,
            if p.distance < eps.get() {
                "selected"
            } else {
                "not selected"
            },
            kkt_residual(&w, j, &p),
        );
        assert!(in_region(
            &p.projected,
            Epsilon::new(eps.get() * (1.0 - 1e-9))?,
            j
        )?);
    }

    let by_definition = inflated_argmax_by_definition(&w, eps)?;
    let closed_form = inflated_argmax(&w, &eps.into());
    println!("by definition {by_definition}, closed form {closed_form}");
    assert_eq!(by_definition, closed_form);
    Ok(())
}
