use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::{GaussianMixture, LabeledDataset};
use crate::ensemble::stability_bound;
use crate::error::{Error, Result};
use crate::metrics::{
    loo_scores, text_summary, write_delta_j_csv, Bagged, Plain, ReportConfig, StabilityReport,
    REPORT_SCHEMA_VERSION,
};
use crate::rng::{derive_seed, rng_for};
use crate::selection::SelectionRule;

use super::config::ExperimentConfig;

pub const METHOD_ARGMAX_BASE: &str = "argmax_base";
pub const METHOD_ARGMAX_SUBBAG: &str = "argmax_bagged";
pub const METHOD_INFLATED_SUBBAG: &str = "inflated_argmax_bagged";

/// The three pipelines of one leave-one-out study, evaluated on the same
/// data, test points, held-out rows and seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LooOutcome {
    pub schema_version: u32,
    pub reports: Vec<StabilityReport>,
}

impl LooOutcome {
    pub fn report(&self, method: &str) -> Option<&StabilityReport> {
        self.reports.iter().find(|r| r.method == method)
    }

    /// Writes `report.json`, `delta_j.csv` and `summary.txt` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let json = BufWriter::new(File::create(dir.join("report.json"))?);
        serde_json::to_writer_pretty(json, self)?;
        write_delta_j_csv(&self.reports, File::create(dir.join("delta_j.csv"))?)?;
        std::fs::write(dir.join("summary.txt"), text_summary(&self.reports))?;
        Ok(())
    }
}

/// Training and test data for a study: either the synthetic mixture or a
/// seeded split of a CSV file.
pub fn load_datasets(
    config: &ExperimentConfig,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    ExperimentConfig::positive("n_test", config.n_test)?;
    match &config.data {
        None => {
            ExperimentConfig::positive("n", config.n)?;
            let mixture = GaussianMixture::new(config.dim, config.classes, config.overlap)?;
            let train = mixture.sample(config.n, derive_seed(seed, 10))?;
            let test = mixture.sample(config.n_test, derive_seed(seed, 11))?;
            Ok((train, test))
        }
        Some(path) => {
            let file = File::open(path)?;
            let data = LabeledDataset::from_csv(file, &config.label_column, None)?;
            if data.len() <= config.n_test + 1 {
                return Err(Error::Config(format!(
                    "{} has {} rows; need more than n_test + 1 = {}",
                    path.display(),
                    data.len(),
                    config.n_test + 1
                )));
            }
            let mut order: Vec<usize> = (0..data.len()).collect();
            order.shuffle(&mut rng_for(seed, 12));
            let (test, train) = order.split_at(config.n_test);
            Ok((data.select(train)?, data.select(test)?))
        }
    }
}

/// Runs the base learner with argmax, its bagged version with argmax, and
/// the bagged version with the inflated argmax.
pub fn run_loo_experiment(config: &ExperimentConfig) -> Result<LooOutcome> {
    let seed = config.require_seed()?;
    let eps = config.epsilon()?;
    let scheme = config.bag_scheme()?;
    ExperimentConfig::positive("k", config.k)?;
    let (train, test) = load_datasets(config, seed)?;
    let learner = config.base_learner();
    let points: Vec<&[f64]> = (0..test.len()).map(|i| test.row(i)).collect();

    let echo = |bagged: bool| ReportConfig {
        n: train.len(),
        classes: train.classes(),
        scheme: bagged.then_some(scheme),
        epsilon: eps.get(),
        draws: config.k,
        test_points: test.len(),
        learner: learner.name().to_string(),
        seed,
    };

    log::info!("fitting base pipeline ({} refits)", config.k);
    let base = loo_scores(&Plain(learner), &train, &points, config.k, seed)?;
    log::info!(
        "fitting bagged pipeline ({} refits of {} bags)",
        config.k,
        scheme.bags
    );
    let bagged_procedure = Bagged { learner, scheme };
    let bagged = loo_scores(&bagged_procedure, &train, &points, config.k, seed)?;

    let bounds = (
        stability_bound(eps.get(), train.len(), train.classes(), &scheme, true)?,
        stability_bound(eps.get(), train.len(), train.classes(), &scheme, false)?,
    );
    let argmax = SelectionRule::argmax();
    let reports = vec![
        StabilityReport::build(
            METHOD_ARGMAX_BASE,
            &argmax,
            &base,
            test.labels(),
            echo(false),
            None,
        )?,
        StabilityReport::build(
            METHOD_ARGMAX_SUBBAG,
            &argmax,
            &bagged,
            test.labels(),
            echo(true),
            None,
        )?,
        StabilityReport::build(
            METHOD_INFLATED_SUBBAG,
            &SelectionRule::inflated(eps),
            &bagged,
            test.labels(),
            echo(true),
            Some(bounds),
        )?,
    ];
    Ok(LooOutcome {
        schema_version: REPORT_SCHEMA_VERSION,
        reports,
    })
}
