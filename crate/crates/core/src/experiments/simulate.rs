use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::softmax_in_place;
use crate::metrics::mean_and_se;
use crate::rng::rng_for;
use crate::scores::{Epsilon, InflationParams, ScoreVector};
use crate::selection::{fixed_margin, inflated_argmax};

/// Mean set sizes of the inflated argmax and the fixed-margin rule for one
/// class count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRow {
    pub classes: usize,
    pub draws: usize,
    pub mean_inflated: f64,
    pub se_inflated: f64,
    pub mean_margin: f64,
    pub se_margin: f64,
    /// `mean_inflated / mean_margin`.
    pub ratio: f64,
}

/// For each class count `L`, draws `draws` vectors `softmax(Z)` with
/// `Z ~ N(0, I_L)` and records both rules' set sizes. Class count `L` draws
/// from its own stream, so rows do not depend on the order of `class_list`.
pub fn simulate_sizes(
    class_list: &[usize],
    eps: Epsilon,
    draws: usize,
    seed: u64,
) -> Result<Vec<SizeRow>> {
    if draws < 2 {
        return Err(Error::Config("draws must be at least 2".into()));
    }
    if class_list.is_empty() || class_list.contains(&0) {
        return Err(Error::Config(
            "class_list must hold positive class counts".into(),
        ));
    }
    let params = InflationParams::from(eps);
    class_list
        .iter()
        .map(|&classes| {
            let mut rng = rng_for(seed, classes as u64);
            let mut inflated = Vec::with_capacity(draws);
            let mut margin = Vec::with_capacity(draws);
            for _ in 0..draws {
                let mut z: Vec<f64> = (0..classes)
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect();
                softmax_in_place(&mut z);
                let w = ScoreVector::new(z)?;
                inflated.push(inflated_argmax(&w, &params).len() as f64);
                margin.push(fixed_margin(&w, eps).len() as f64);
            }
            let (mean_inflated, se_inflated) = mean_and_se(&inflated);
            let (mean_margin, se_margin) = mean_and_se(&margin);
            Ok(SizeRow {
                classes,
                draws,
                mean_inflated,
                se_inflated,
                mean_margin,
                se_margin,
                ratio: mean_inflated / mean_margin,
            })
        })
        .collect()
}
