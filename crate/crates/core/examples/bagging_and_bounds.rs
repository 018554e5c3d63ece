//! Subbagging a base learner and the stability bounds for the result.
//!
//! ```bash
//! cargo run -p inflated-argmax --example bagging_and_bounds
//! ```

use inflated_argmax::data::GaussianMixture;
use inflated_argmax::ensemble::{fit_bagged, p_nm, stability_bound, BagScheme};
use inflated_argmax::learners::{Learner, MultinomialLogistic, Scorer};
use inflated_argmax::{inflated_argmax, Epsilon, Result};

fn main() -> Result<()> {
    let data = GaussianMixture::new(5, 5, 0.5)?.sample(200, 7)?;
    let learner = MultinomialLogistic::default();
    let scheme = BagScheme::subbag(100, 100)?;

    let single = learner.fit(&data, 7)?;
    let bagged = fit_bagged(&learner, &data, &scheme, 7)?;
    let x = data.row(0);
    let eps = Epsilon::new(0.1)?;
    println!("label {}", data.label(0));
    println!("single model {:?}", single.score(x).as_slice());
    println!("bagged model {:?}", bagged.score(x).as_slice());
    println!(
        "inflated set {}",
        inflated_argmax(&bagged.score(x), &eps.into())
    );

    println!("\np(n=200, subbag m=100) = {}", p_nm(200, &scheme));
    for (label, scheme) in [
        ("subbag m=100, B=100", scheme),
        ("subbag m=20, B=10000", BagScheme::subbag(20, 10_000)?),
        ("bootstrap m=200, B=100", BagScheme::bootstrap(200, 100)?),
    ] {
        println!(
            "{label:<24} infinite-B bound {:>9.4}   finite-B bound {:>9.4}",
            stability_bound(0.1, 200, 5, &scheme, false)?,
            stability_bound(0.1, 200, 5, &scheme, true)?,
        );
    }
    Ok(())
}
