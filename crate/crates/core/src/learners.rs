//! Base learners. Each fits a [`Scorer`] that maps a feature vector to a
//! point strictly inside the probability simplex.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::rng_for;
use crate::scores::ScoreVector;

/// Additive smoothing folded into every learner's output.
pub const OUTPUT_SMOOTHING: f64 = 1e-6;

/// A fitted model producing class-probability vectors.
pub trait Scorer: Send + Sync {
    fn classes(&self) -> usize;

    /// Scores for one feature vector; entries are positive and sum to one.
    fn score(&self, x: &[f64]) -> ScoreVector;
}

/// A learning algorithm: data and a seed in, fitted scorer out.
pub trait Learner: Sync {
    type Model: Scorer;

    fn fit(&self, data: &LabeledDataset, seed: u64) -> Result<Self::Model>;
}

/// Numerically stable softmax, in place.
pub fn softmax_in_place(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in logits.iter_mut() {
        *v = (*v - max).exp();
        total += *v;
    }
    for v in logits.iter_mut() {
        *v /= total;
    }
}

fn smoothed(mut probs: Vec<f64>) -> ScoreVector {
    let norm = 1.0 + OUTPUT_SMOOTHING * probs.len() as f64;
    for p in probs.iter_mut() {
        *p = (*p + OUTPUT_SMOOTHING) / norm;
    }
    ScoreVector::new(probs).expect("softmax output is finite")
}

fn check_dim(expected: usize, x: &[f64]) {
    assert_eq!(x.len(), expected, "feature vector has the wrong dimension");
}

/// Softmax over negative squared distances to class centroids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearestCentroid {
    pub temperature: f64,
}

impl Default for NearestCentroid {
    fn default() -> Self {
        Self { temperature: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentroidModel {
    centroids: Vec<f64>,
    dim: usize,
    classes: usize,
    temperature: f64,
}

impl CentroidModel {
    pub fn centroid(&self, class: usize) -> &[f64] {
        &self.centroids[class * self.dim..(class + 1) * self.dim]
    }
}

impl Learner for NearestCentroid {
    type Model = CentroidModel;

    fn fit(&self, data: &LabeledDataset, _seed: u64) -> Result<CentroidModel> {
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::Config(format!(
                "temperature must be > 0, got {}",
                self.temperature
            )));
        }
        let (dim, classes) = (data.dim(), data.classes());
        let mut sums = vec![0.0; classes * dim];
        let mut counts = vec![0usize; classes];
        let mut global = vec![0.0; dim];
        for (x, y) in data.rows() {
            counts[y] += 1;
            for (k, &v) in x.iter().enumerate() {
                sums[y * dim + k] += v;
                global[k] += v;
            }
        }
        let n = data.len() as f64;
        global.iter_mut().for_each(|g| *g /= n);
        for class in 0..classes {
            let block = &mut sums[class * dim..(class + 1) * dim];
            if counts[class] == 0 {
                block.copy_from_slice(&global);
            } else {
                let c = counts[class] as f64;
                block.iter_mut().for_each(|v| *v /= c);
            }
        }
        Ok(CentroidModel {
            centroids: sums,
            dim,
            classes,
            temperature: self.temperature,
        })
    }
}

impl Scorer for CentroidModel {
    fn classes(&self) -> usize {
        self.classes
    }

    fn score(&self, x: &[f64]) -> ScoreVector {
        check_dim(self.dim, x);
        let mut logits: Vec<f64> = (0..self.classes)
            .map(|class| {
                let sq: f64 = self
                    .centroid(class)
                    .iter()
                    .zip(x)
                    .map(|(m, v)| (v - m) * (v - m))
                    .sum();
                -sq / self.temperature
            })
            .collect();
        softmax_in_place(&mut logits);
        smoothed(logits)
    }
}

/// Softmax-linear classifier trained by plain SGD on cross-entropy, with the
/// visiting order reshuffled from the seed every epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultinomialLogistic {
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for MultinomialLogistic {
    fn default() -> Self {
        Self {
            epochs: 20,
            learning_rate: 0.1,
        }
    }
}

/// Weights are `classes x dim`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    weights: Vec<f64>,
    bias: Vec<f64>,
    dim: usize,
    classes: usize,
}

impl LogisticModel {
    pub fn zeros(dim: usize, classes: usize) -> Self {
        Self {
            weights: vec![0.0; dim * classes],
            bias: vec![0.0; classes],
            dim,
            classes,
        }
    }

    pub fn from_parameters(weights: Vec<f64>, bias: Vec<f64>, dim: usize) -> Result<Self> {
        let classes = bias.len();
        if weights.len() != classes * dim {
            return Err(Error::LengthMismatch {
                left: weights.len(),
                right: classes * dim,
            });
        }
        Ok(Self {
            weights,
            bias,
            dim,
            classes,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        check_dim(self.dim, x);
        (0..self.classes)
            .map(|c| {
                let row = &self.weights[c * self.dim..(c + 1) * self.dim];
                self.bias[c] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            })
            .collect()
    }

    /// Unsmoothed softmax probabilities.
    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        let mut logits = self.logits(x);
        softmax_in_place(&mut logits);
        logits
    }

    /// Cross-entropy `-log p_y(x)`, computed as `log sum_k exp(z_k - z_y)`
    /// so that small losses keep their relative precision.
    pub fn loss(&self, x: &[f64], y: usize) -> f64 {
        let logits = self.logits(x);
        let zy = logits[y];
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max <= zy {
            let rest: f64 = logits
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != y)
                .map(|(_, &z)| (z - zy).exp())
                .sum();
            rest.ln_1p()
        } else {
            max - zy + logits.iter().map(|&z| (z - max).exp()).sum::<f64>().ln()
        }
    }

    /// Gradient of [`LogisticModel::loss`] in the layout of
    /// `(weights, bias)`: `(p - e_y) x^T` and `p - e_y`.
    pub fn gradient(&self, x: &[f64], y: usize) -> (Vec<f64>, Vec<f64>) {
        let mut residual = self.probabilities(x);
        // p_y - 1 as minus the other classes' mass, exact when p_y is near 1.
        residual[y] = -residual
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != y)
            .map(|(_, &p)| p)
            .sum::<f64>();
        let weights = residual
            .iter()
            .flat_map(|&r| x.iter().map(move |&v| r * v))
            .collect();
        (weights, residual)
    }

    fn sgd_step(&mut self, x: &[f64], y: usize, lr: f64) {
        let mut residual = self.probabilities(x);
        residual[y] -= 1.0;
        for (c, &r) in residual.iter().enumerate() {
            let row = &mut self.weights[c * self.dim..(c + 1) * self.dim];
            for (w, &v) in row.iter_mut().zip(x) {
                *w -= lr * r * v;
            }
            self.bias[c] -= lr * r;
        }
    }
}

impl Learner for MultinomialLogistic {
    type Model = LogisticModel;

    fn fit(&self, data: &LabeledDataset, seed: u64) -> Result<LogisticModel> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        let mut model = LogisticModel::zeros(data.dim(), data.classes());
        let mut rng = rng_for(seed, 0);
        let mut order: Vec<usize> = (0..data.len()).collect();
        for _ in 0..self.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                model.sgd_step(data.row(i), data.label(i), self.learning_rate);
            }
        }
        Ok(model)
    }
}

impl Scorer for LogisticModel {
    fn classes(&self) -> usize {
        self.classes
    }

    fn score(&self, x: &[f64]) -> ScoreVector {
        smoothed(self.probabilities(x))
    }
}

/// Runtime choice of base learner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseLearner {
    NearestCentroid(NearestCentroid),
    Logistic(MultinomialLogistic),
}

impl BaseLearner {
    pub fn name(&self) -> &'static str {
        match self {
            BaseLearner::NearestCentroid(_) => "nearest_centroid",
            BaseLearner::Logistic(_) => "logistic_sgd",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaseModel {
    Centroid(CentroidModel),
    Logistic(LogisticModel),
}

impl Learner for BaseLearner {
    type Model = BaseModel;

    fn fit(&self, data: &LabeledDataset, seed: u64) -> Result<BaseModel> {
        match self {
            BaseLearner::NearestCentroid(l) => l.fit(data, seed).map(BaseModel::Centroid),
            BaseLearner::Logistic(l) => l.fit(data, seed).map(BaseModel::Logistic),
        }
    }
}

impl Scorer for BaseModel {
    fn classes(&self) -> usize {
        match self {
            BaseModel::Centroid(m) => m.classes(),
            BaseModel::Logistic(m) => m.classes(),
        }
    }

    fn score(&self, x: &[f64]) -> ScoreVector {
        match self {
            BaseModel::Centroid(m) => m.score(x),
            BaseModel::Logistic(m) => m.score(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::GaussianMixture;
    use crate::selection::argmax_set;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn separable() -> LabeledDataset {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let side = if i % 2 == 0 { 1.0 } else { -1.0 };
                vec![side * (1.0 + 0.1 * i as f64), 0.05 * i as f64 - 0.5]
            })
            .collect();
        let labels = (0..20).map(|i| i % 2).collect();
        LabeledDataset::new(rows, labels, 2).unwrap()
    }

    #[test]
    fn single_point_centroid_ties_everywhere() {
        let data = LabeledDataset::new(vec![vec![0.3, -0.2]], vec![0], 3).unwrap();
        let model = NearestCentroid::default().fit(&data, 0).unwrap();
        for x in [[0.0, 0.0], [5.0, -1.0], [0.3, -0.2]] {
            let w = model.score(&x);
            assert!(argmax_set(&w, 1e-12).contains(0));
            assert!(w.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-12));
        }
    }

    #[test]
    fn mirrored_two_class_data_is_even_at_origin() {
        let data = LabeledDataset::new(
            vec![
                vec![1.0, 0.5],
                vec![2.0, -0.5],
                vec![-1.0, -0.5],
                vec![-2.0, 0.5],
            ],
            vec![0, 0, 1, 1],
            2,
        )
        .unwrap();
        let w = NearestCentroid::default()
            .fit(&data, 0)
            .unwrap()
            .score(&[0.0, 0.0]);
        assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn absent_class_centroid_is_global_mean() {
        let data = LabeledDataset::new(vec![vec![1.0], vec![3.0]], vec![0, 0], 2).unwrap();
        let model = NearestCentroid::default().fit(&data, 0).unwrap();
        assert_eq!(model.centroid(1), &[2.0]);
    }

    #[test]
    fn zero_epochs_gives_uniform() {
        let model = MultinomialLogistic {
            epochs: 0,
            learning_rate: 0.1,
        }
        .fit(&separable(), 3)
        .unwrap();
        let w = model.score(&[0.7, -0.1]);
        assert!(w.iter().all(|&p| (p - 0.5).abs() < 1e-15));
    }

    #[test]
    fn separable_data_fits_perfectly() {
        let data = separable();
        let model = MultinomialLogistic {
            epochs: 200,
            learning_rate: 0.5,
        }
        .fit(&data, 1)
        .unwrap();
        let correct = data
            .rows()
            .filter(|(x, y)| argmax_set(&model.score(x), 0.0).as_singleton() == Some(*y))
            .count();
        assert_eq!(correct, data.len());
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (dim, classes) = (4, 3);
        for _ in 0..25 {
            let weights: Vec<f64> = (0..dim * classes)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let bias: Vec<f64> = (0..classes).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
            let y = rng.random_range(0..classes);
            let model = LogisticModel::from_parameters(weights.clone(), bias.clone(), dim).unwrap();
            let (gw, gb) = model.gradient(&x, y);
            let analytic: Vec<f64> = gw.into_iter().chain(gb).collect();

            let h = 1e-5;
            let params: Vec<f64> = weights.iter().chain(&bias).copied().collect();
            let numeric: Vec<f64> = (0..params.len())
                .map(|p| {
                    let eval = |delta: f64| {
                        let mut q = params.clone();
                        q[p] += delta;
                        let (w, b) = q.split_at(dim * classes);
                        LogisticModel::from_parameters(w.to_vec(), b.to_vec(), dim)
                            .unwrap()
                            .loss(&x, y)
                    };
                    (eval(h) - eval(-h)) / (2.0 * h)
                })
                .collect();
            let diff: f64 = analytic
                .iter()
                .zip(&numeric)
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            let scale: f64 = numeric.iter().map(|b| b * b).sum();
            assert!(diff.sqrt() <= 1e-5 * scale.sqrt());
        }
    }

    #[test]
    fn fits_are_deterministic() {
        let data = GaussianMixture::new(4, 3, 0.6)
            .unwrap()
            .sample(60, 2)
            .unwrap();
        let learner = MultinomialLogistic::default();
        let a = learner.fit(&data, 17).unwrap();
        let b = learner.fit(&data, 17).unwrap();
        let c = learner.fit(&data, 18).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let nc = NearestCentroid::default();
        assert_eq!(nc.fit(&data, 1).unwrap(), nc.fit(&data, 1).unwrap());
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        let data = separable();
        assert!(NearestCentroid { temperature: 0.0 }.fit(&data, 0).is_err());
        assert!(MultinomialLogistic {
            epochs: 1,
            learning_rate: -1.0
        }
        .fit(&data, 0)
        .is_err());
    }

    proptest! {
        #[test]
        fn outputs_stay_inside_simplex(
            seed in 0u64..1000,
            x in prop::collection::vec(-50.0f64..50.0, 3),
            logistic in any::<bool>(),
        ) {
            let data = GaussianMixture::new(3, 3, 1.0).unwrap().sample(15, seed).unwrap();
            let learner = if logistic {
                BaseLearner::Logistic(MultinomialLogistic { epochs: 5, learning_rate: 1.0 })
            } else {
                BaseLearner::NearestCentroid(NearestCentroid { temperature: 0.01 })
            };
            let w = learner.fit(&data, seed).unwrap().score(&x);
            prop_assert!(w.is_on_simplex(1e-9));
            prop_assert!(w.iter().all(|&p| p > 0.0));
        }
    }
}
