//! End-to-end checks that tie learners, bagging, selection and metrics
//! together.

use inflated_argmax::data::GaussianMixture;
use inflated_argmax::ensemble::{stability_bound, BagScheme};
use inflated_argmax::experiments::{run_loo_experiment, ExperimentConfig};
use inflated_argmax::learners::{MultinomialLogistic, NearestCentroid};
use inflated_argmax::metrics::{delta_j_curve, loo_scores, Bagged};
use inflated_argmax::{Epsilon, SelectionRule};

fn eps() -> Epsilon {
    Epsilon::new(0.1).unwrap()
}

#[test]
fn close_scores_give_intersecting_sets() {
    let mixture = GaussianMixture::new(4, 4, 0.7).unwrap();
    let train = mixture.sample(80, 1).unwrap();
    let test = mixture.sample(40, 2).unwrap();
    let points: Vec<&[f64]> = (0..test.len()).map(|i| test.row(i)).collect();
    let procedure = Bagged {
        learner: MultinomialLogistic::default(),
        scheme: BagScheme::subbag(40, 20).unwrap(),
    };
    let scores = loo_scores(&procedure, &train, &points, 30, 5).unwrap();
    let rule = SelectionRule::inflated(eps());

    let mut close = 0;
    for refit in &scores.refits {
        for (j, p) in refit.iter().enumerate() {
            if scores.full[j].distance(p).unwrap() < eps().get() {
                close += 1;
                assert!(rule.apply(&scores.full[j]).intersects(&rule.apply(p)));
            }
        }
    }
    assert!(close > 0);
    let delta_hat = scores.delta_j(&rule).iter().sum::<f64>() / points.len() as f64;
    assert!(delta_hat <= scores.tail_delta(eps().get()));
}

#[test]
fn relabeling_classes_leaves_delta_j_unchanged() {
    let mixture = GaussianMixture::new(3, 3, 0.8).unwrap();
    let train = mixture.sample(60, 3).unwrap();
    let test = mixture.sample(25, 4).unwrap();
    let relabeled = train.relabel(&[2, 0, 1]).unwrap();
    let points: Vec<&[f64]> = (0..test.len()).map(|i| test.row(i)).collect();
    let procedure = Bagged {
        learner: NearestCentroid::default(),
        scheme: BagScheme::subbag(30, 15).unwrap(),
    };
    let rule = SelectionRule::inflated(eps());
    let a = delta_j_curve(&procedure, &rule, &train, &points, 20, 8).unwrap();
    let b = delta_j_curve(&procedure, &rule, &relabeled, &points, 20, 8).unwrap();
    assert_eq!(a, b);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let config = ExperimentConfig {
        seed: Some(6),
        n: 80,
        m: 40,
        bags: 20,
        k: 12,
        n_test: 30,
        ..ExperimentConfig::default()
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_loo_experiment(&config).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn bootstrap_pipeline_respects_its_bound() {
    for seed in 1..=3 {
        let config = ExperimentConfig {
            seed: Some(seed),
            scheme: inflated_argmax::ensemble::BagKind::Bootstrap,
            m: 100,
            bags: 50,
            k: 20,
            n_test: 100,
            ..ExperimentConfig::default()
        };
        let outcome = run_loo_experiment(&config).unwrap();
        let inflated = &outcome.reports[2];
        let bound = stability_bound(0.1, 200, 5, &config.bag_scheme().unwrap(), true).unwrap();
        assert_eq!(inflated.theoretical_bound, Some(bound));
        assert!(inflated.delta_hat <= bound);
        assert!(inflated.beta_size >= 1.0);
    }
}
