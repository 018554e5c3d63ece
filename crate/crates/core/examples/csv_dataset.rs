//! Loads a labeled CSV and fits both base learners on it.
//!
//! ```bash
//! cargo run -p inflated-argmax --example csv_dataset
//! ```

use inflated_argmax::data::LabeledDataset;
use inflated_argmax::learners::{Learner, MultinomialLogistic, NearestCentroid, Scorer};
use inflated_argmax::{inflated_argmax, Epsilon, Result};

const CSV: &str = "\
petal,sepal,species
1.4,3.5,0
1.3,3.0,0
4.7,3.2,1
4.5,3.2,1
6.0,3.3,2
5.1,2.7,2
";

fn main() -> Result<()> {
    let data = LabeledDataset::from_csv(CSV.as_bytes(), "species", None)?;
    println!(
        "{} rows, {} features, {} classes",
        data.len(),
        data.dim(),
        data.classes()
    );

    let eps = Epsilon::new(0.2)?;
    let centroid = NearestCentroid::default().fit(&data, 0)?;
    let logistic = MultinomialLogistic {
        epochs: 200,
        learning_rate: 0.05,
    }
    .fit(&data, 0)?;
    for x in [[1.5, 3.1], [4.9, 3.0], [5.5, 3.0]] {
        let a = centroid.score(&x);
        let b = logistic.score(&x);
        println!(
            "x = {x:?}: centroid {} logistic {}",
            inflated_argmax(&a, &eps.into()),
            inflated_argmax(&b, &eps.into())
        );
    }

    let bad = "petal,species\n1.0,0\noops,1\n";
    if let Err(e) = LabeledDataset::from_csv(bad.as_bytes(), "species", None) {
        println!("malformed input: {e}");
    }
    Ok(())
}
