//! Randomized property suites for the selection rules. Each suite draws
//! its cases from its own seeded stream and stops at the first failure,
//! keeping it as a replayable counterexample.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::learners::softmax_in_place;
use crate::region::region_distance;
use crate::rng::rng_for;
use crate::scores::{Epsilon, InflationParams, ScoreVector, SelectionSet};
use crate::selection::{
    argmax_set, fixed_margin, in_region, inflated_argmax, thresholds, water_level_excess,
};

/// Inputs closer than this to a membership boundary are skipped where a
/// suite compares two numerically different computations.
pub const BOUNDARY_GAP: f64 = 1e-7;

/// A selection rule under test.
pub type RuleFn = fn(&ScoreVector, Epsilon) -> SelectionSet;

pub fn inflated_rule(w: &ScoreVector, eps: Epsilon) -> SelectionSet {
    inflated_argmax(w, &InflationParams::from(eps))
}

pub fn fixed_margin_rule(w: &ScoreVector, eps: Epsilon) -> SelectionSet {
    fixed_margin(w, eps)
}

/// Fixed-margin rule with its inequality reversed. Used to check that the
/// suites can fail.
pub fn mutant_fixed_margin_rule(w: &ScoreVector, eps: Epsilon) -> SelectionSet {
    let cut = w.max() - eps.margin();
    SelectionSet::new(
        w.iter()
            .enumerate()
            .filter(|&(_, &v)| v < cut)
            .map(|(j, _)| j),
        w.classes(),
    )
    .expect("indices in range")
}

/// Inputs and outputs of a failing case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub w: Vec<f64>,
    pub v: Option<Vec<f64>>,
    pub epsilon: f64,
    pub sets: Vec<Vec<usize>>,
    pub detail: String,
}

impl Counterexample {
    fn new(
        w: &ScoreVector,
        eps: Epsilon,
        sets: &[&SelectionSet],
        detail: impl Into<String>,
    ) -> Self {
        Self {
            w: w.to_vec(),
            v: None,
            epsilon: eps.get(),
            sets: sets.iter().map(|s| s.members().to_vec()).collect(),
            detail: detail.into(),
        }
    }

    fn with_v(mut self, v: &ScoreVector) -> Self {
        self.v = Some(v.to_vec());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: usize,
    /// Cases drawn but not checked because they sat on a boundary.
    pub skipped: usize,
    pub failures: usize,
    pub counterexample: Option<Counterexample>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Result of checking one drawn case.
pub enum Case {
    Pass,
    Skip,
    Fail(Counterexample),
}

/// Runs `check` on `trials` cases drawn from stream `stream` of `seed`,
/// stopping at the first failure.
pub fn run_suite(
    name: &str,
    trials: usize,
    seed: u64,
    stream: u64,
    mut check: impl FnMut(&mut ChaCha8Rng) -> Case,
) -> SuiteOutcome {
    let mut rng = rng_for(seed, stream);
    let mut outcome = SuiteOutcome {
        name: name.to_string(),
        cases: 0,
        skipped: 0,
        failures: 0,
        counterexample: None,
    };
    for _ in 0..trials {
        outcome.cases += 1;
        match check(&mut rng) {
            Case::Pass => {}
            Case::Skip => outcome.skipped += 1,
            Case::Fail(c) => {
                outcome.failures += 1;
                outcome.counterexample = Some(c);
                break;
            }
        }
    }
    outcome
}

/// Draws a score vector from a mix of families: softmax of Gaussians at
/// several scales, flat Dirichlet, raw Gaussian, near-ties and exact ties.
pub fn random_scores<R: Rng>(rng: &mut R, classes: usize) -> ScoreVector {
    let gauss = |rng: &mut R| -> f64 { StandardNormal.sample(rng) };
    let values: Vec<f64> = match rng.random_range(0..6) {
        0 => {
            let scale = [0.3, 1.0, 3.0][rng.random_range(0..3)];
            let mut z: Vec<f64> = (0..classes).map(|_| scale * gauss(rng)).collect();
            softmax_in_place(&mut z);
            z
        }
        1 => {
            let g: Vec<f64> = (0..classes).map(|_| Exp1.sample(rng)).collect();
            let total: f64 = g.iter().sum();
            g.into_iter().map(|v| v / total).collect()
        }
        2 => (0..classes).map(|_| gauss(rng)).collect(),
        3 => {
            let top: f64 = rng.random();
            (0..classes)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        top + 1e-9 * gauss(rng)
                    } else {
                        top * rng.random::<f64>()
                    }
                })
                .collect()
        }
        4 => (0..classes)
            .map(|_| f64::from(rng.random_range(0..5u8)) / 10.0)
            .collect(),
        _ => {
            let level = 1.0 / classes as f64;
            (0..classes).map(|_| level + 0.05 * gauss(rng)).collect()
        }
    };
    ScoreVector::new(values).expect("finite draws")
}

/// Log-uniform radius in `[0.01, 1]`.
pub fn random_epsilon<R: Rng>(rng: &mut R) -> Epsilon {
    Epsilon::new(10f64.powf(rng.random_range(-2.0..=0.0))).expect("positive")
}

fn unit_direction<R: Rng>(rng: &mut R, classes: usize) -> Vec<f64> {
    loop {
        let d: Vec<f64> = (0..classes).map(|_| StandardNormal.sample(rng)).collect();
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return d.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// A point strictly within `eps` of `w`, sometimes just inside the radius.
pub fn nearby<R: Rng>(rng: &mut R, w: &ScoreVector, eps: Epsilon) -> ScoreVector {
    let r = if rng.random_bool(0.3) {
        eps.get() * rng.random_range(0.999..(1.0 - 1e-7))
    } else {
        eps.get() * rng.random::<f64>()
    };
    let d = unit_direction(rng, w.classes());
    let v = ScoreVector::new(w.iter().zip(&d).map(|(a, b)| a + r * b).collect()).expect("finite");
    // Rounding can push the distance up to eps; shrink until it is inside.
    if w.distance(&v).expect("same length") < eps.get() {
        v
    } else {
        ScoreVector::new(w.iter().zip(&d).map(|(a, b)| a + 0.5 * r * b).collect()).expect("finite")
    }
}

fn pick_classes<R: Rng>(rng: &mut R, choices: &[usize]) -> usize {
    choices[rng.random_range(0..choices.len())]
}

/// Closed form against membership by projection distance.
pub fn oracle_equivalence(classes: usize, eps: Epsilon, trials: usize, seed: u64) -> SuiteOutcome {
    let params = InflationParams::from(eps);
    run_suite("oracle_equivalence", trials, seed, 1, |rng| {
        let w = random_scores(rng, classes);
        let t = thresholds(&w, &params).threshold;
        let mut by_definition = Vec::new();
        for j in 0..classes {
            let d = region_distance(&w, eps, j).expect("valid class");
            if (w[j] - t).abs() < BOUNDARY_GAP || (d - eps.get()).abs() < BOUNDARY_GAP {
                return Case::Skip;
            }
            if d < eps.get() {
                by_definition.push(j);
            }
        }
        let closed = inflated_argmax(&w, &params);
        let definition = SelectionSet::new(by_definition, classes).expect("in range");
        if closed == definition {
            Case::Pass
        } else {
            Case::Fail(Counterexample::new(
                &w,
                eps,
                &[&closed, &definition],
                "closed form vs projection",
            ))
        }
    })
}

/// Points within `eps` of each other must get intersecting sets.
pub fn compatibility(
    name: &str,
    rule: RuleFn,
    classes: usize,
    trials: usize,
    seed: u64,
) -> SuiteOutcome {
    run_suite(name, trials, seed, 2, |rng| {
        let w = random_scores(rng, classes);
        let eps = random_epsilon(rng);
        let v = nearby(rng, &w, eps);
        let (a, b) = (rule(&w, eps), rule(&v, eps));
        if a.intersects(&b) {
            Case::Pass
        } else {
            Case::Fail(
                Counterexample::new(&w, eps, &[&a, &b], "disjoint sets within eps").with_v(&v),
            )
        }
    })
}

pub fn argmax_inclusion(
    rule: RuleFn,
    class_choices: &[usize],
    trials: usize,
    seed: u64,
) -> SuiteOutcome {
    run_suite("argmax_inclusion", trials, seed, 3, |rng| {
        let classes = pick_classes(rng, class_choices);
        let w = random_scores(rng, classes);
        let eps = random_epsilon(rng);
        let (top, s) = (argmax_set(&w, 0.0), rule(&w, eps));
        if top.is_subset(&s) {
            Case::Pass
        } else {
            Case::Fail(Counterexample::new(
                &w,
                eps,
                &[&top, &s],
                "argmax not contained",
            ))
        }
    })
}

pub fn epsilon_monotonicity(
    rule: RuleFn,
    class_choices: &[usize],
    trials: usize,
    seed: u64,
) -> SuiteOutcome {
    run_suite("epsilon_monotonicity", trials, seed, 4, |rng| {
        let classes = pick_classes(rng, class_choices);
        let w = random_scores(rng, classes);
        let small = random_epsilon(rng);
        let large = Epsilon::new(small.get() * rng.random_range(1.0..3.0)).expect("positive");
        let (a, b) = (rule(&w, small), rule(&w, large));
        if a.is_subset(&b) {
            Case::Pass
        } else {
            Case::Fail(Counterexample::new(
                &w,
                small,
                &[&a, &b],
                format!("not nested at eps' = {large}"),
            ))
        }
    })
}

pub fn score_monotonicity(
    rule: RuleFn,
    class_choices: &[usize],
    trials: usize,
    seed: u64,
) -> SuiteOutcome {
    run_suite("score_monotonicity", trials, seed, 5, |rng| {
        let classes = pick_classes(rng, class_choices);
        let w = random_scores(rng, classes);
        let eps = random_epsilon(rng);
        let s = rule(&w, eps);
        for j in s.iter() {
            if let Some(k) = (0..w.classes()).find(|&k| w[k] >= w[j] && !s.contains(k)) {
                return Case::Fail(Counterexample::new(
                    &w,
                    eps,
                    &[&s],
                    format!("class {j} selected but higher-scoring class {k} is not"),
                ));
            }
        }
        Case::Pass
    })
}

pub fn permutation_invariance(
    rule: RuleFn,
    class_choices: &[usize],
    trials: usize,
    seed: u64,
) -> SuiteOutcome {
    use rand::seq::SliceRandom;
    run_suite("permutation_invariance", trials, seed, 6, |rng| {
        let classes = pick_classes(rng, class_choices);
        let w = random_scores(rng, classes);
        let eps = random_epsilon(rng);
        let mut sigma: Vec<usize> = (0..w.classes()).collect();
        sigma.shuffle(rng);
        // v_j = w_sigma(j), so j is in s(v) iff sigma(j) is in s(w).
        let v = ScoreVector::new(sigma.iter().map(|&s| w[s]).collect()).expect("finite");
        let (sw, sv) = (rule(&w, eps), rule(&v, eps));
        let mapped = SelectionSet::new(sv.iter().map(|j| sigma[j]), w.classes()).expect("in range");
        if mapped == sw {
            Case::Pass
        } else {
            Case::Fail(
                Counterexample::new(&w, eps, &[&sw, &sv], format!("permutation {sigma:?}"))
                    .with_v(&v),
            )
        }
    })
}

/// The inflated argmax is `{j}` exactly when `w` lies in region `j`.
pub fn singleton_region(class_choices: &[usize], trials: usize, seed: u64) -> SuiteOutcome {
    run_suite("singleton_iff_region", trials, seed, 7, |rng| {
        let classes = pick_classes(rng, class_choices);
        let w = random_scores(rng, classes);
        let eps = random_epsilon(rng);
        let s = inflated_rule(&w, eps);
        for j in 0..w.classes() {
            let rest = (0..w.classes())
                .filter(|&k| k != j)
                .map(|k| w[k])
                .fold(f64::NEG_INFINITY, f64::max);
            if (w[j] - rest - eps.margin()).abs() < BOUNDARY_GAP {
                return Case::Skip;
            }
            let inside = in_region(&w, eps, j).expect("valid class");
            if inside != (s.as_singleton() == Some(j)) {
                return Case::Fail(Counterexample::new(
                    &w,
                    eps,
                    &[&s],
                    format!("region {j} membership is {inside}"),
                ));
            }
        }
        Case::Pass
    })
}

/// Every set of `inner` is contained in the matching set of `outer`.
pub fn nested_rules(
    inner: RuleFn,
    outer: RuleFn,
    class_choices: &[usize],
    trials: usize,
    seed: u64,
) -> SuiteOutcome {
    run_suite("inflated_within_fixed_margin", trials, seed, 8, |rng| {
        let classes = pick_classes(rng, class_choices);
        let w = random_scores(rng, classes);
        let eps = random_epsilon(rng);
        let (a, b) = (inner(&w, eps), outer(&w, eps));
        if a.is_subset(&b) {
            Case::Pass
        } else {
            Case::Fail(Counterexample::new(
                &w,
                eps,
                &[&a, &b],
                "inner set not contained",
            ))
        }
    })
}

/// With two classes the inflated argmax and the fixed-margin rule agree.
pub fn two_class_agreement(margin: RuleFn, trials: usize, seed: u64) -> SuiteOutcome {
    run_suite("two_class_agreement", trials, seed, 9, |rng| {
        let w = random_scores(rng, 2);
        let eps = random_epsilon(rng);
        if ((w[0] - w[1]).abs() - eps.margin()).abs() < BOUNDARY_GAP {
            return Case::Skip;
        }
        let (a, b) = (inflated_rule(&w, eps), margin(&w, eps));
        if a == b {
            Case::Pass
        } else {
            Case::Fail(Counterexample::new(
                &w,
                eps,
                &[&a, &b],
                "rules differ at two classes",
            ))
        }
    })
}

/// The water level solves its equation and the threshold sits below it.
pub fn threshold_kernel(class_choices: &[usize], trials: usize, seed: u64) -> SuiteOutcome {
    run_suite("threshold_kernel", trials, seed, 10, |rng| {
        let classes = pick_classes(rng, class_choices);
        let w = random_scores(rng, classes);
        let eps = random_epsilon(rng);
        let th = thresholds(&w, &InflationParams::from(eps));
        let target = eps.get() * eps.get();
        let residual = (water_level_excess(&w, th.water_level) - target).abs();
        let s = inflated_rule(&w, eps);
        if th.threshold > th.water_level + 1e-12 * (1.0 + th.water_level.abs()) {
            Case::Fail(Counterexample::new(
                &w,
                eps,
                &[&s],
                format!("t = {} > c = {}", th.threshold, th.water_level),
            ))
        } else if residual >= 1e-9 * target {
            Case::Fail(Counterexample::new(
                &w,
                eps,
                &[&s],
                format!("water-level residual {residual:e}"),
            ))
        } else {
            Case::Pass
        }
    })
}

/// All suites of the `verify` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub suites: Vec<SuiteOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteOutcome::passed)
    }

    pub fn first_failure(&self) -> Option<&SuiteOutcome> {
        self.suites.iter().find(|s| !s.passed())
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!(
                "{:<32} {:>4} cases={:<7} skipped={:<5} failures={}\n",
                s.name,
                if s.passed() { "ok" } else { "FAIL" },
                s.cases,
                s.skipped,
                s.failures
            ));
        }
        out
    }
}

/// Runs every suite with `trials` cases. With `mutant` the fixed-margin
/// rule is replaced by [`mutant_fixed_margin_rule`].
pub fn run_all(seed: u64, trials: usize, mutant: bool) -> VerifyReport {
    const CLASSES: [usize; 5] = [2, 3, 5, 10, 50];
    let margin: RuleFn = if mutant {
        mutant_fixed_margin_rule
    } else {
        fixed_margin_rule
    };
    let suites = vec![
        oracle_equivalence_mixed(&CLASSES, trials, seed),
        compatibility_mixed(
            "compatibility_inflated",
            inflated_rule,
            &CLASSES,
            trials,
            seed,
        ),
        compatibility_mixed("compatibility_fixed_margin", margin, &CLASSES, trials, seed),
        argmax_inclusion(inflated_rule, &CLASSES, trials, seed),
        epsilon_monotonicity(inflated_rule, &CLASSES, trials, seed),
        score_monotonicity(inflated_rule, &CLASSES, trials, seed),
        permutation_invariance(inflated_rule, &CLASSES, trials, seed),
        singleton_region(&CLASSES, trials, seed),
        nested_rules(inflated_rule, margin, &CLASSES, trials, seed),
        two_class_agreement(margin, trials, seed),
        threshold_kernel(&CLASSES, trials, seed),
    ];
    VerifyReport {
        seed,
        trials,
        suites,
    }
}

fn oracle_equivalence_mixed(class_choices: &[usize], trials: usize, seed: u64) -> SuiteOutcome {
    run_suite("oracle_equivalence", trials, seed, 11, |rng| {
        let classes = pick_classes(rng, class_choices);
        let eps = random_epsilon(rng);
        let case_seed: u64 = rng.random();
        let one = oracle_equivalence(classes, eps, 1, case_seed);
        match (one.failures, one.skipped) {
            (0, 0) => Case::Pass,
            (0, _) => Case::Skip,
            _ => Case::Fail(one.counterexample.expect("failure carries a case")),
        }
    })
}

fn compatibility_mixed(
    name: &str,
    rule: RuleFn,
    class_choices: &[usize],
    trials: usize,
    seed: u64,
) -> SuiteOutcome {
    run_suite(name, trials, seed, 12, |rng| {
        let classes = pick_classes(rng, class_choices);
        let case_seed: u64 = rng.random();
        let one = compatibility(name, rule, classes, 1, case_seed);
        match one.counterexample {
            None => Case::Pass,
            Some(c) => Case::Fail(c),
        }
    })
}
