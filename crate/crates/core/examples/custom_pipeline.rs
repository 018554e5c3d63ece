//! Per-test-point instability for a hand-built pipeline: a nearest-centroid
//! learner, bootstrapped, followed by the fixed-margin rule.
//!
//! ```bash
//! cargo run --release -p inflated-argmax --example custom_pipeline
//! ```

use inflated_argmax::data::GaussianMixture;
use inflated_argmax::ensemble::BagScheme;
use inflated_argmax::learners::NearestCentroid;
use inflated_argmax::metrics::{delta_j_curve, Bagged, Plain};
use inflated_argmax::{Epsilon, Result, SelectionRule};

fn main() -> Result<()> {
    let mixture = GaussianMixture::new(4, 3, 0.8)?;
    let train = mixture.sample(120, 1)?;
    let test = mixture.sample(40, 2)?;
    let points: Vec<&[f64]> = (0..test.len()).map(|i| test.row(i)).collect();

    let learner = NearestCentroid { temperature: 0.5 };
    let rule = SelectionRule::fixed_margin(Epsilon::new(0.1)?);
    let plain = delta_j_curve(
        &Plain(learner),
        &SelectionRule::argmax(),
        &train,
        &points,
        30,
        9,
    )?;
    let bagged = Bagged {
        learner,
        scheme: BagScheme::bootstrap(120, 50)?,
    };
    let stable = delta_j_curve(&bagged, &rule, &train, &points, 30, 9)?;

    let max = |d: &[f64]| d.iter().copied().fold(0.0, f64::max);
    println!("max delta_j, plain argmax:          {:.3}", max(&plain));
    println!("max delta_j, bagged fixed margin:   {:.3}", max(&stable));
    Ok(())
}
