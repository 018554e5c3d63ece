use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ensemble::{BagKind, BagScheme};
use crate::error::{Error, Result};
use crate::learners::{BaseLearner, MultinomialLogistic, NearestCentroid};
use crate::scores::Epsilon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    NearestCentroid,
    Logistic,
}

/// Settings shared by every experiment. Fields an experiment does not use
/// are ignored by it. A JSON file may set any subset of fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Required by every experiment; there is no clock-based fallback.
    pub seed: Option<u64>,
    pub epsilon: f64,

    /// Class counts for the set-size simulation.
    pub class_list: Vec<usize>,
    /// Score vectors drawn per class count.
    pub draws: usize,

    pub classes: usize,
    pub n: usize,
    pub dim: usize,
    pub overlap: f64,
    pub n_test: usize,
    pub scheme: BagKind,
    pub m: usize,
    pub bags: usize,
    /// Leave-one-out refits sampled per pipeline.
    pub k: usize,
    pub learner: LearnerKind,
    pub temperature: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    /// CSV training data; synthetic mixture data when absent.
    pub data: Option<PathBuf>,
    pub label_column: String,

    /// Subdivisions per simplex edge for the region map.
    pub grid: usize,
    /// Cases per property suite.
    pub trials: usize,

    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let logistic = MultinomialLogistic::default();
        Self {
            seed: None,
            epsilon: 0.1,
            class_list: vec![2, 25, 100],
            draws: 1000,
            classes: 5,
            n: 200,
            dim: 5,
            overlap: 0.5,
            n_test: 200,
            scheme: BagKind::Subbag,
            m: 100,
            bags: 100,
            k: 50,
            learner: LearnerKind::NearestCentroid,
            temperature: NearestCentroid::default().temperature,
            epochs: logistic.epochs,
            learning_rate: logistic.learning_rate,
            data: None,
            label_column: "label".into(),
            grid: 60,
            trials: 10_000,
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("a seed is required (--seed or \"seed\")".into()))
    }

    pub fn epsilon(&self) -> Result<Epsilon> {
        Epsilon::new(self.epsilon)
    }

    pub fn bag_scheme(&self) -> Result<BagScheme> {
        BagScheme::new(self.scheme, self.m, self.bags)
    }

    pub fn base_learner(&self) -> BaseLearner {
        match self.learner {
            LearnerKind::NearestCentroid => BaseLearner::NearestCentroid(NearestCentroid {
                temperature: self.temperature,
            }),
            LearnerKind::Logistic => BaseLearner::Logistic(MultinomialLogistic {
                epochs: self.epochs,
                learning_rate: self.learning_rate,
            }),
        }
    }

    pub(crate) fn positive(name: &str, value: usize) -> Result<()> {
        if value == 0 {
            Err(Error::Config(format!("{name} must be positive")))
        } else {
            Ok(())
        }
    }
}
