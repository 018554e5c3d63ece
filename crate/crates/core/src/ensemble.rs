//! Bagging and subbagging of any [`Learner`], and the stability bounds that
//! bagged score functions satisfy.
//!
//! Every bag `b` gets its own seed `derive_seed(seed, b)`. The bag indices
//! are drawn from stream 0 of that seed and the learner is fitted with
//! `derive_seed(bag_seed, 1)`, so a bag never depends on how many threads
//! fitted the others.
//!
//! Leave-one-out refits reuse the same per-bag seeds. Indices are drawn by
//! rejection from the same stream with the held-out row rejected, so a bag
//! that never contained that row comes out identical in both fits.

use std::f64::consts::E;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::learners::{Learner, Scorer};
use crate::rng::{derive_seed, rng_for};
use crate::scores::ScoreVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BagKind {
    /// `m` draws with replacement.
    Bootstrap,
    /// `m` distinct indices.
    Subbag,
}

/// How bags are drawn and how many.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BagScheme {
    pub kind: BagKind,
    pub m: usize,
    pub bags: usize,
}

impl BagScheme {
    pub fn new(kind: BagKind, m: usize, bags: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("bag size m must be >= 1".into()));
        }
        if bags == 0 {
            return Err(Error::EmptyBagScheme);
        }
        Ok(Self { kind, m, bags })
    }

    pub fn subbag(m: usize, bags: usize) -> Result<Self> {
        Self::new(BagKind::Subbag, m, bags)
    }

    pub fn bootstrap(m: usize, bags: usize) -> Result<Self> {
        Self::new(BagKind::Bootstrap, m, bags)
    }

    /// Checks the scheme against a pool of `n` available rows.
    pub fn check_pool(&self, n: usize) -> Result<()> {
        if self.bags == 0 {
            return Err(Error::EmptyBagScheme);
        }
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if self.m == 0 {
            return Err(Error::Config("bag size m must be >= 1".into()));
        }
        if self.kind == BagKind::Subbag && self.m > n {
            return Err(Error::BagTooLarge { m: self.m, n });
        }
        Ok(())
    }
}

/// Draws one bag of indices in `0..n`.
pub fn sample_bag<R: Rng>(n: usize, scheme: &BagScheme, rng: &mut R) -> Result<Vec<usize>> {
    sample_bag_excluding(n, scheme, rng, None)
}

/// Draws one bag of indices in `0..n`, never returning `exclude`.
///
/// Draws are uniform on `0..n` and rejected when they hit `exclude` (or, for
/// subbags, an index already taken). With `exclude = None` this is the
/// plain sampler, and a bag that avoids `exclude` consumes the generator
/// identically in both modes.
pub fn sample_bag_excluding<R: Rng>(
    n: usize,
    scheme: &BagScheme,
    rng: &mut R,
    exclude: Option<usize>,
) -> Result<Vec<usize>> {
    let available = n - usize::from(exclude.is_some_and(|i| i < n));
    scheme.check_pool(available)?;
    let mut bag = Vec::with_capacity(scheme.m);
    let mut taken = vec![false; if scheme.kind == BagKind::Subbag { n } else { 0 }];
    while bag.len() < scheme.m {
        let draw = rng.random_range(0..n);
        if Some(draw) == exclude {
            continue;
        }
        if scheme.kind == BagKind::Subbag {
            if taken[draw] {
                continue;
            }
            taken[draw] = true;
        }
        bag.push(draw);
    }
    Ok(bag)
}

/// Average of `B` fitted base models, combined in bag order.
#[derive(Debug, Clone)]
pub struct BaggedScorer<M> {
    models: Vec<M>,
    scheme: BagScheme,
    seed: u64,
    classes: usize,
}

impl<M: Scorer> BaggedScorer<M> {
    pub fn models(&self) -> &[M] {
        &self.models
    }

    pub fn scheme(&self) -> &BagScheme {
        &self.scheme
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl<M: Scorer> Scorer for BaggedScorer<M> {
    fn classes(&self) -> usize {
        self.classes
    }

    fn score(&self, x: &[f64]) -> ScoreVector {
        let mut total = vec![0.0; self.classes];
        for model in &self.models {
            for (t, v) in total.iter_mut().zip(model.score(x).iter()) {
                *t += v;
            }
        }
        let b = self.models.len() as f64;
        total.iter_mut().for_each(|t| *t /= b);
        ScoreVector::new(total).expect("average of finite scores")
    }
}

fn bag_rng(seed: u64, bag: usize) -> (ChaCha8Rng, u64) {
    let bag_seed = derive_seed(seed, bag as u64);
    (rng_for(bag_seed, 0), derive_seed(bag_seed, 1))
}

/// Fits `scheme.bags` models on bags of `data`. Bags are fitted in parallel.
pub fn fit_bagged<L: Learner>(
    learner: &L,
    data: &LabeledDataset,
    scheme: &BagScheme,
    seed: u64,
) -> Result<BaggedScorer<L::Model>> {
    fit_bagged_excluding(learner, data, scheme, seed, None)
}

/// Like [`fit_bagged`] but as if row `exclude` had been removed from `data`.
pub fn fit_bagged_excluding<L: Learner>(
    learner: &L,
    data: &LabeledDataset,
    scheme: &BagScheme,
    seed: u64,
    exclude: Option<usize>,
) -> Result<BaggedScorer<L::Model>> {
    if let Some(i) = exclude {
        if i >= data.len() {
            return Err(Error::RowOutOfRange {
                index: i,
                rows: data.len(),
            });
        }
        if data.len() == 1 {
            return Err(Error::DropLastRow);
        }
    }
    let available = data.len() - usize::from(exclude.is_some());
    scheme.check_pool(available)?;

    let models = (0..scheme.bags)
        .into_par_iter()
        .map(|b| {
            let (mut rng, fit_seed) = bag_rng(seed, b);
            let bag = sample_bag_excluding(data.len(), scheme, &mut rng, exclude)?;
            learner
                .fit(&data.select(&bag)?, fit_seed)
                .map_err(|e| Error::BagFit {
                    bag: b,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BaggedScorer {
        models,
        scheme: *scheme,
        seed,
        classes: data.classes(),
    })
}

/// Probability that a fixed row lands in a bag drawn from `n` rows.
pub fn p_nm(n: usize, scheme: &BagScheme) -> f64 {
    let m = scheme.m as f64;
    let n = n as f64;
    match scheme.kind {
        BagKind::Subbag => m / n,
        BagKind::Bootstrap => -(m * (-1.0 / n).ln_1p()).exp_m1(),
    }
}

/// Selection-instability bound for the inflated argmax applied to a bagged
/// learner. With `finite_b` the Monte Carlo error of `scheme.bags` bags is
/// included; otherwise the bound is for the exact bag average. The raw value
/// is returned and may exceed 1.
pub fn stability_bound(
    eps: f64,
    n: usize,
    classes: usize,
    scheme: &BagScheme,
    finite_b: bool,
) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    if n < 2 {
        return Err(Error::BoundPrecondition("n must be at least 2"));
    }
    if classes < 2 {
        return Err(Error::BoundPrecondition("at least 2 classes are required"));
    }
    scheme.check_pool(n)?;
    let p = p_nm(n, scheme);
    if p >= 1.0 {
        return Err(Error::UnboundedStability);
    }
    let class_factor = 1.0 - 1.0 / classes as f64;
    let sampling = p / ((n as f64 - 1.0) * (1.0 - p));
    let monte_carlo = if finite_b {
        16.0 * E * E / scheme.bags as f64
    } else {
        0.0
    };
    Ok(class_factor * (sampling + monte_carlo) / (eps * eps))
}
