//! Empirical stability and accuracy metrics for a training procedure
//! followed by a selection rule.
//!
//! The per-test-point instability `delta_j` is the fraction of sampled
//! leave-one-out refits whose selection set at test point `j` is disjoint
//! from the full-data selection set. Its mean over test points is the
//! empirical selection instability `delta_hat`.

use std::io::Write;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::ensemble::{fit_bagged, fit_bagged_excluding, BagScheme, BaggedScorer};
use crate::error::{Error, Result};
use crate::learners::{Learner, Scorer};
use crate::rng::{derive_seed, rng_for};
use crate::scores::{ScoreVector, SelectionSet};
use crate::selection::SelectionRule;

/// Version tag written into serialized reports.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Fraction of `loo_sets` that share no member with `full`.
pub fn disjoint_fraction(full: &SelectionSet, loo_sets: &[SelectionSet]) -> Result<f64> {
    if loo_sets.is_empty() {
        return Err(Error::EmptySequence("leave-one-out sets"));
    }
    let mut disjoint = 0usize;
    for set in loo_sets {
        if set.universe() != full.universe() {
            return Err(Error::UniverseMismatch {
                left: full.universe(),
                right: set.universe(),
            });
        }
        disjoint += usize::from(!full.intersects(set));
    }
    Ok(disjoint as f64 / loo_sets.len() as f64)
}

/// Fraction of `loo_scores` at Euclidean distance `>= eps` from `full`.
pub fn tail_instability(full: &ScoreVector, loo_scores: &[ScoreVector], eps: f64) -> Result<f64> {
    if loo_scores.is_empty() {
        return Err(Error::EmptySequence("leave-one-out score vectors"));
    }
    let mut far = 0usize;
    for p in loo_scores {
        far += usize::from(full.distance(p)? >= eps);
    }
    Ok(far as f64 / loo_scores.len() as f64)
}

/// `(beta_prec, beta_size)`: how often the set is exactly `{label}`, and the
/// mean set size.
pub fn precision_and_size(sets: &[SelectionSet], labels: &[usize]) -> Result<(f64, f64)> {
    if sets.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: sets.len(),
            right: labels.len(),
        });
    }
    if sets.is_empty() {
        return Err(Error::EmptySequence("selection sets"));
    }
    let n = sets.len() as f64;
    let exact = sets
        .iter()
        .zip(labels)
        .filter(|(s, &y)| s.as_singleton() == Some(y))
        .count();
    let size: usize = sets.iter().map(SelectionSet::len).sum();
    Ok((exact as f64 / n, size as f64 / n))
}

/// Mean and standard error (sample standard deviation over `sqrt(N)`).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// A way of turning a dataset into a scorer, with a matching
/// leave-one-out refit that shares all seeds with the full fit.
pub trait Procedure: Sync {
    type Model: Scorer;

    fn fit(&self, data: &LabeledDataset, seed: u64) -> Result<Self::Model>;

    fn fit_without(&self, data: &LabeledDataset, row: usize, seed: u64) -> Result<Self::Model>;
}

/// The base learner alone.
#[derive(Debug, Clone)]
pub struct Plain<L>(pub L);

impl<L: Learner> Procedure for Plain<L> {
    type Model = L::Model;

    fn fit(&self, data: &LabeledDataset, seed: u64) -> Result<L::Model> {
        self.0.fit(data, seed)
    }

    fn fit_without(&self, data: &LabeledDataset, row: usize, seed: u64) -> Result<L::Model> {
        self.0.fit(&data.drop(row)?, seed)
    }
}

/// The base learner averaged over bags.
#[derive(Debug, Clone)]
pub struct Bagged<L> {
    pub learner: L,
    pub scheme: BagScheme,
}

impl<L: Learner> Procedure for Bagged<L> {
    type Model = BaggedScorer<L::Model>;

    fn fit(&self, data: &LabeledDataset, seed: u64) -> Result<Self::Model> {
        fit_bagged(&self.learner, data, &self.scheme, seed)
    }

    fn fit_without(&self, data: &LabeledDataset, row: usize, seed: u64) -> Result<Self::Model> {
        fit_bagged_excluding(&self.learner, data, &self.scheme, seed, Some(row))
    }
}

/// Scores at each test point from the full fit and from `K` leave-one-out
/// refits.
#[derive(Debug, Clone)]
pub struct LooScores {
    /// Training rows held out, in sampling order.
    pub dropped: Vec<usize>,
    /// `full[j]` is the full-data score at test point `j`.
    pub full: Vec<ScoreVector>,
    /// `refits[k][j]` is the score at test point `j` without `dropped[k]`.
    pub refits: Vec<Vec<ScoreVector>>,
}

/// Fits `procedure` on `data` and on `draws` leave-one-out datasets, with
/// held-out rows sampled without replacement, and scores `test_points`.
/// Refits run in parallel and are collected in sampling order.
pub fn loo_scores<P: Procedure>(
    procedure: &P,
    data: &LabeledDataset,
    test_points: &[&[f64]],
    draws: usize,
    seed: u64,
) -> Result<LooScores> {
    if draws > data.len() {
        return Err(Error::TooManyDraws {
            k: draws,
            n: data.len(),
        });
    }
    if draws == 0 {
        return Err(Error::EmptySequence("leave-one-out draws"));
    }
    if test_points.is_empty() {
        return Err(Error::EmptySequence("test points"));
    }
    let dropped = index::sample(&mut rng_for(seed, 1), data.len(), draws).into_vec();
    let fit_seed = derive_seed(seed, 2);
    let score_all = |model: &P::Model| test_points.iter().map(|x| model.score(x)).collect();

    let full = score_all(&procedure.fit(data, fit_seed)?);
    let refits = dropped
        .par_iter()
        .map(|&i| Ok(score_all(&procedure.fit_without(data, i, fit_seed)?)))
        .collect::<Result<Vec<Vec<ScoreVector>>>>()?;
    Ok(LooScores {
        dropped,
        full,
        refits,
    })
}

impl LooScores {
    pub fn test_points(&self) -> usize {
        self.full.len()
    }

    /// Full-data selection sets at each test point.
    pub fn full_sets(&self, rule: &SelectionRule) -> Vec<SelectionSet> {
        self.full.iter().map(|w| rule.apply(w)).collect()
    }

    /// `delta_j` for every test point under `rule`.
    pub fn delta_j(&self, rule: &SelectionRule) -> Vec<f64> {
        (0..self.test_points())
            .map(|j| {
                let full = rule.apply(&self.full[j]);
                let loo: Vec<SelectionSet> =
                    self.refits.iter().map(|r| rule.apply(&r[j])).collect();
                disjoint_fraction(&full, &loo).expect("refits share the universe")
            })
            .collect()
    }

    /// Tail instability at radius `eps`, averaged over test points.
    pub fn tail_delta(&self, eps: f64) -> f64 {
        let per_point: Vec<f64> = (0..self.test_points())
            .map(|j| {
                let loo: Vec<ScoreVector> = self.refits.iter().map(|r| r[j].clone()).collect();
                tail_instability(&self.full[j], &loo, eps).expect("nonempty refits")
            })
            .collect();
        per_point.iter().sum::<f64>() / per_point.len() as f64
    }
}

/// `delta_j` for `rule` applied after `procedure`, over `draws` sampled
/// leave-one-out refits.
pub fn delta_j_curve<P: Procedure>(
    procedure: &P,
    rule: &SelectionRule,
    data: &LabeledDataset,
    test_points: &[&[f64]],
    draws: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    Ok(loo_scores(procedure, data, test_points, draws, seed)?.delta_j(rule))
}

/// Settings echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub n: usize,
    pub classes: usize,
    pub scheme: Option<BagScheme>,
    pub epsilon: f64,
    pub draws: usize,
    pub test_points: usize,
    pub learner: String,
    pub seed: u64,
}

/// Stability and accuracy of one pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub schema_version: u32,
    pub method: String,
    pub rule: String,
    pub delta_hat: f64,
    pub delta_hat_se: f64,
    pub max_delta_j: f64,
    pub tail_delta_hat: f64,
    pub beta_prec: f64,
    pub beta_prec_se: f64,
    pub beta_size: f64,
    pub beta_size_se: f64,
    /// Finite-B bound, present for inflated-argmax pipelines over bagging.
    pub theoretical_bound: Option<f64>,
    pub theoretical_bound_infinite_b: Option<f64>,
    pub config: ReportConfig,
    pub delta_j: Vec<f64>,
}

impl StabilityReport {
    /// Assembles a report from leave-one-out scores and test labels.
    pub fn build(
        method: &str,
        rule: &SelectionRule,
        scores: &LooScores,
        test_labels: &[usize],
        config: ReportConfig,
        bounds: Option<(f64, f64)>,
    ) -> Result<Self> {
        let delta_j = scores.delta_j(rule);
        let sets = scores.full_sets(rule);
        precision_and_size(&sets, test_labels)?;
        let exact: Vec<f64> = sets
            .iter()
            .zip(test_labels)
            .map(|(s, &y)| f64::from(u8::from(s.as_singleton() == Some(y))))
            .collect();
        let sizes: Vec<f64> = sets.iter().map(|s| s.len() as f64).collect();
        let (delta_hat, delta_hat_se) = mean_and_se(&delta_j);
        let (beta_prec, beta_prec_se) = mean_and_se(&exact);
        let (beta_size, beta_size_se) = mean_and_se(&sizes);
        Ok(Self {
            schema_version: REPORT_SCHEMA_VERSION,
            method: method.to_string(),
            rule: rule.name().to_string(),
            delta_hat,
            delta_hat_se,
            max_delta_j: delta_j.iter().copied().fold(0.0, f64::max),
            tail_delta_hat: scores.tail_delta(config.epsilon),
            beta_prec,
            beta_prec_se,
            beta_size,
            beta_size_se,
            theoretical_bound: bounds.map(|b| b.0),
            theoretical_bound_infinite_b: bounds.map(|b| b.1),
            config,
            delta_j,
        })
    }
}

fn fmt_bound(b: Option<f64>) -> String {
    b.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

/// Aligned plain-text table, one row per report.
pub fn text_summary(reports: &[StabilityReport]) -> String {
    let mut out = format!(
        "{:<28} {:>16} {:>9} {:>10} {:>16} {:>16} {:>10}\n",
        "method", "delta_hat (se)", "max d_j", "tail", "beta_prec (se)", "beta_size (se)", "bound"
    );
    for r in reports {
        out.push_str(&format!(
            "{:<28} {:>7.4} ({:.4}) {:>9.4} {:>10.4} {:>7.4} ({:.4}) {:>7.4} ({:.4}) {:>10}\n",
            r.method,
            r.delta_hat,
            r.delta_hat_se,
            r.max_delta_j,
            r.tail_delta_hat,
            r.beta_prec,
            r.beta_prec_se,
            r.beta_size,
            r.beta_size_se,
            fmt_bound(r.theoretical_bound),
        ));
    }
    out
}

/// CSV with one row per test point and one `delta_j` column per report.
pub fn write_delta_j_csv<W: Write>(reports: &[StabilityReport], writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let mut header = vec!["test_point".to_string()];
    header.extend(reports.iter().map(|r| r.method.clone()));
    csv.write_record(&header)?;
    let rows = reports.first().map_or(0, |r| r.delta_j.len());
    for j in 0..rows {
        let mut record = vec![j.to_string()];
        record.extend(reports.iter().map(|r| r.delta_j[j].to_string()));
        csv.write_record(&record)?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::GaussianMixture;
    use crate::learners::NearestCentroid;
    use crate::scores::Epsilon;

    fn set(members: &[usize], universe: usize) -> SelectionSet {
        SelectionSet::new(members.iter().copied(), universe).unwrap()
    }

    fn sv(v: &[f64]) -> ScoreVector {
        ScoreVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn disjoint_fraction_examples() {
        let loo = [set(&[0], 3), set(&[0, 1], 3), set(&[1], 3)];
        assert!((disjoint_fraction(&set(&[0], 3), &loo).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            disjoint_fraction(&SelectionSet::full(3), &loo).unwrap(),
            0.0
        );
        let loo = [set(&[0], 3), set(&[2], 3), set(&[0, 2], 3)];
        assert_eq!(disjoint_fraction(&set(&[1], 3), &loo).unwrap(), 1.0);
        assert!(disjoint_fraction(&set(&[1], 3), &[]).is_err());
        assert!(matches!(
            disjoint_fraction(&set(&[1], 3), &[set(&[1], 4)]),
            Err(Error::UniverseMismatch { .. })
        ));
    }

    #[test]
    fn tail_instability_examples() {
        let full = sv(&[1.0, 0.0]);
        assert_eq!(
            tail_instability(&full, &[full.clone(), full.clone()], 0.1).unwrap(),
            0.0
        );
        assert_eq!(
            tail_instability(&full, std::slice::from_ref(&full), 0.0).unwrap(),
            1.0
        );
        let loo = [sv(&[0.9, 0.1]), sv(&[0.5, 0.5])];
        assert_eq!(tail_instability(&full, &loo, 0.2).unwrap(), 0.5);
        assert!(tail_instability(&full, &[], 0.2).is_err());
    }

    #[test]
    fn precision_and_size_examples() {
        assert_eq!(
            precision_and_size(&[set(&[0], 3), set(&[1], 3)], &[0, 1]).unwrap(),
            (1.0, 1.0)
        );
        assert_eq!(
            precision_and_size(&[set(&[0, 1], 3)], &[0]).unwrap(),
            (0.0, 2.0)
        );
        let (p, s) =
            precision_and_size(&[set(&[0], 3), set(&[0, 2], 3), set(&[1], 3)], &[0, 2, 0]).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-15 && (s - 4.0 / 3.0).abs() < 1e-15);
        assert!(precision_and_size(&[set(&[0], 3)], &[0, 1]).is_err());
    }

    struct Constant;

    impl Scorer for Constant {
        fn classes(&self) -> usize {
            3
        }

        fn score(&self, _x: &[f64]) -> ScoreVector {
            ScoreVector::new(vec![0.8, 0.1, 0.1]).unwrap()
        }
    }

    impl Learner for Constant {
        type Model = Constant;

        fn fit(&self, _data: &LabeledDataset, _seed: u64) -> Result<Constant> {
            Ok(Constant)
        }
    }

    fn mixture(n: usize, seed: u64) -> LabeledDataset {
        GaussianMixture::new(3, 3, 0.7)
            .unwrap()
            .sample(n, seed)
            .unwrap()
    }

    #[test]
    fn constant_classifier_is_stable() {
        let data = mixture(20, 0);
        let points: Vec<&[f64]> = (0..5).map(|i| data.row(i)).collect();
        let d = delta_j_curve(
            &Plain(Constant),
            &SelectionRule::argmax(),
            &data,
            &points,
            10,
            1,
        )
        .unwrap();
        assert_eq!(d, vec![0.0; 5]);
        assert!(matches!(
            delta_j_curve(
                &Plain(Constant),
                &SelectionRule::argmax(),
                &data,
                &points,
                21,
                1
            ),
            Err(Error::TooManyDraws { k: 21, n: 20 })
        ));
    }

    #[test]
    fn exhaustive_draws_match_full_average() {
        let data = mixture(12, 3);
        let points: Vec<&[f64]> = vec![&[0.4, 0.4, 0.2], &[0.0, 0.0, 0.0]];
        let rule = SelectionRule::argmax();
        let procedure = Plain(NearestCentroid { temperature: 0.2 });
        let d = delta_j_curve(&procedure, &rule, &data, &points, data.len(), 5).unwrap();
        let full = procedure.fit(&data, 0).unwrap();
        for (j, x) in points.iter().enumerate() {
            let s = rule.apply(&full.score(x));
            let loo: Vec<SelectionSet> = (0..data.len())
                .map(|i| rule.apply(&procedure.fit_without(&data, i, 0).unwrap().score(x)))
                .collect();
            assert_eq!(d[j], disjoint_fraction(&s, &loo).unwrap());
        }
    }

    #[test]
    fn report_roundtrip_and_outputs() {
        let data = mixture(40, 7);
        let test = mixture(15, 8);
        let points: Vec<&[f64]> = (0..test.len()).map(|i| test.row(i)).collect();
        let procedure = Bagged {
            learner: NearestCentroid::default(),
            scheme: BagScheme::subbag(20, 5).unwrap(),
        };
        let scores = loo_scores(&procedure, &data, &points, 10, 2).unwrap();
        let rule = SelectionRule::inflated(Epsilon::new(0.1).unwrap());
        let config = ReportConfig {
            n: 40,
            classes: 3,
            scheme: Some(procedure.scheme),
            epsilon: 0.1,
            draws: 10,
            test_points: 15,
            learner: "nearest_centroid".into(),
            seed: 2,
        };
        let report = StabilityReport::build(
            "bagged",
            &rule,
            &scores,
            test.labels(),
            config,
            Some((1.0, 0.5)),
        )
        .unwrap();
        assert!(report.beta_size >= 1.0);
        assert!((0.0..=1.0).contains(&report.delta_hat));
        let json = serde_json::to_string(&report).unwrap();
        let back: StabilityReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);

        let text = text_summary(std::slice::from_ref(&report));
        assert!(text.lines().count() == 2 && text.contains("bagged"));
        let mut buf = Vec::new();
        write_delta_j_csv(std::slice::from_ref(&report), &mut buf).unwrap();
        let csv = String::from_utf8(buf).unwrap();
        assert_eq!(csv.lines().count(), 16);
        assert!(csv.starts_with("test_point,bagged\n"));
    }

    #[test]
    fn standard_error_convention() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // sample sd = sqrt(5/3), over sqrt(4)
        assert!((se - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
    }
}
