//! Acceptance checks. Each test prints one PASS/FAIL line.

use std::io::{self, Write};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use inflated_argmax::ensemble::{stability_bound, BagScheme};
use inflated_argmax::experiments::loo::{
    METHOD_ARGMAX_BASE, METHOD_ARGMAX_SUBBAG, METHOD_INFLATED_SUBBAG,
};
use inflated_argmax::experiments::verify::{
    argmax_inclusion, compatibility, epsilon_monotonicity, fixed_margin_rule, inflated_rule,
    nested_rules, oracle_equivalence, permutation_invariance, score_monotonicity, singleton_region,
    threshold_kernel, SuiteOutcome,
};
use inflated_argmax::experiments::{
    run_loo_experiment, simulate_sizes, ExperimentConfig, LearnerKind,
};
use inflated_argmax::learners::LogisticModel;
use inflated_argmax::Epsilon;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

/// Writes to the raw stderr handle so the verdict shows even when the test
/// harness captures output.
fn report(criterion: u32, title: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {criterion} [{verdict}] {title}: {detail}\n");
    io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn failures(suites: &[SuiteOutcome]) -> Vec<String> {
    suites
        .iter()
        .filter(|s| !s.passed())
        .map(|s| format!("{} {:?}", s.name, s.counterexample))
        .collect()
}

#[test]
fn criterion_1_closed_form_matches_projection_oracle() {
    let start = Instant::now();
    let mut suites = Vec::new();
    let mut checked = 0;
    for classes in [2, 3, 5, 10, 50] {
        for eps in [0.01, 0.1, 0.5, 1.0] {
            let s = oracle_equivalence(classes, Epsilon::new(eps).unwrap(), 10_000, SEED);
            checked += s.cases - s.skipped;
            suites.push(s);
        }
    }
    let elapsed = start.elapsed();
    let bad = failures(&suites);
    let skipped: usize = suites.iter().map(|s| s.skipped).sum();
    report(
        1,
        "oracle equivalence",
        bad.is_empty() && elapsed < Duration::from_secs(60),
        &format!(
            "{checked} vectors compared, {skipped} boundary cases skipped, {} mismatching grids, {elapsed:.1?}",
            bad.len()
        ),
    );
}

#[test]
fn criterion_2_compatibility_fuzzing() {
    let start = Instant::now();
    let mut suites = Vec::new();
    for classes in [2, 5, 20] {
        suites.push(compatibility(
            "inflated",
            inflated_rule,
            classes,
            100_000,
            SEED,
        ));
        suites.push(compatibility(
            "fixed_margin",
            fixed_margin_rule,
            classes,
            100_000,
            SEED,
        ));
    }
    let elapsed = start.elapsed();
    let bad = failures(&suites);
    let pairs: usize = suites.iter().map(|s| s.cases).sum();
    report(
        2,
        "eps-compatibility",
        bad.is_empty() && elapsed < Duration::from_secs(60),
        &format!("{pairs} pairs, disjoint: {bad:?}, {elapsed:.1?}"),
    );
}

#[test]
fn criterion_3_property_suite() {
    const CLASSES: [usize; 5] = [2, 3, 5, 10, 50];
    const N: usize = 10_000;
    let suites = vec![
        argmax_inclusion(inflated_rule, &CLASSES, N, SEED),
        epsilon_monotonicity(inflated_rule, &CLASSES, N, SEED),
        score_monotonicity(inflated_rule, &CLASSES, N, SEED),
        permutation_invariance(inflated_rule, &CLASSES, N, SEED),
        singleton_region(&CLASSES, N, SEED),
        nested_rules(inflated_rule, fixed_margin_rule, &CLASSES, N, SEED),
        threshold_kernel(&CLASSES, N, SEED),
    ];
    let bad = failures(&suites);
    let enough = suites.iter().all(|s| s.cases - s.skipped >= N * 99 / 100);
    let names: Vec<String> = suites
        .iter()
        .map(|s| format!("{}={}", s.name, s.cases - s.skipped))
        .collect();
    report(
        3,
        "property suite",
        bad.is_empty() && enough,
        &format!("checked {names:?}, violations: {bad:?}"),
    );
}

#[test]
fn criterion_4_set_size_ratios() {
    let start = Instant::now();
    let eps = Epsilon::new(0.1).unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for seed in [SEED, SEED + 1, SEED + 2] {
        let rows = simulate_sizes(&[2, 25, 100], eps, 1000, seed).unwrap();
        ok &= rows[0].ratio == 1.0;
        ok &= (rows[1].ratio - 0.78).abs() <= 0.05;
        ok &= (rows[2].ratio - 0.48).abs() <= 0.05;
        detail.push(format!(
            "seed {seed}: L=2 {:.3}, L=25 {:.3}, L=100 {:.3}",
            rows[0].ratio, rows[1].ratio, rows[2].ratio
        ));
    }
    let elapsed = start.elapsed();
    report(
        4,
        "set-size simulation",
        ok && elapsed < Duration::from_secs(30),
        &format!("{}; {elapsed:.1?}", detail.join("; ")),
    );
}

#[test]
fn criterion_5_bound_conformance() {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for seed in 1..=5 {
        let config = ExperimentConfig {
            seed: Some(seed),
            learner: LearnerKind::NearestCentroid,
            ..ExperimentConfig::default()
        };
        assert_eq!(
            (config.n, config.m, config.bags, config.k),
            (200, 100, 100, 50)
        );
        assert_eq!(config.epsilon, 0.1);
        let outcome = run_loo_experiment(&config).unwrap();
        let r = outcome.report(METHOD_INFLATED_SUBBAG).unwrap();
        let bound = r.theoretical_bound.unwrap();
        ok &= r.delta_hat <= bound;
        detail.push(format!("seed {seed}: {:.4} <= {bound:.4}", r.delta_hat));
    }
    let elapsed = start.elapsed();
    report(
        5,
        "bound conformance",
        ok && elapsed < Duration::from_secs(600),
        &format!("{}; {elapsed:.1?}", detail.join("; ")),
    );
}

#[test]
fn criterion_6_method_ordering() {
    let mut ordered = 0;
    let mut accuracy_ok = true;
    let mut detail = Vec::new();
    for seed in 1..=5 {
        let config = ExperimentConfig {
            seed: Some(seed),
            overlap: 0.5,
            learner: LearnerKind::Logistic,
            ..ExperimentConfig::default()
        };
        let outcome = run_loo_experiment(&config).unwrap();
        let base = outcome.report(METHOD_ARGMAX_BASE).unwrap();
        let bagged = outcome.report(METHOD_ARGMAX_SUBBAG).unwrap();
        let inflated = outcome.report(METHOD_INFLATED_SUBBAG).unwrap();
        if inflated.max_delta_j <= bagged.max_delta_j && bagged.max_delta_j <= base.max_delta_j {
            ordered += 1;
        }
        accuracy_ok &= inflated.beta_size <= 1.5;
        accuracy_ok &= (inflated.beta_prec - bagged.beta_prec).abs() <= 0.05;
        detail.push(format!(
            "seed {seed}: max d_j {:.2}/{:.2}/{:.2}, size {:.3}, prec {:.3} vs {:.3}",
            inflated.max_delta_j,
            bagged.max_delta_j,
            base.max_delta_j,
            inflated.beta_size,
            inflated.beta_prec,
            bagged.beta_prec
        ));
    }
    report(
        6,
        "method ordering",
        ordered >= 4 && accuracy_ok,
        &format!("{ordered}/5 ordered; {}", detail.join("; ")),
    );
}

#[test]
fn criterion_7_bound_spot_values() {
    let scheme = BagScheme::subbag(500, 1).unwrap();
    let spot = stability_bound(0.1, 1000, 10, &scheme, false).unwrap();
    let two = stability_bound(0.1, 1000, 2, &scheme, false).unwrap();
    // 1 - 1/L is within 1e-12 of 1 here, standing in for L -> infinity.
    let many = stability_bound(0.1, 1000, 1_000_000_000_000, &scheme, false).unwrap();
    let ratio = many / two;
    report(
        7,
        "bound calculator",
        (spot - 0.090_090_1).abs() <= 1e-6 && (ratio - 2.0).abs() <= 1e-9,
        &format!("delta = {spot:.9}, large-L / two-class ratio = {ratio:.12}"),
    );
}

#[test]
fn criterion_8_numerical_kernels() {
    let kernel = threshold_kernel(&[2, 3, 5, 10, 20, 50, 100], 100_000, SEED);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let dim = rng.random_range(1..8);
        let classes = rng.random_range(2..7);
        let weights: Vec<f64> = (0..dim * classes)
            .map(|_| rng.random_range(-2.0..2.0))
            .collect();
        let bias: Vec<f64> = (0..classes).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y = rng.random_range(0..classes);
        let model = LogisticModel::from_parameters(weights.clone(), bias.clone(), dim).unwrap();
        let (gw, gb) = model.gradient(&x, y);
        let analytic: Vec<f64> = gw.into_iter().chain(gb).collect();

        let params: Vec<f64> = weights.into_iter().chain(bias).collect();
        let loss_at = |p: &[f64]| {
            let (w, b) = p.split_at(dim * classes);
            LogisticModel::from_parameters(w.to_vec(), b.to_vec(), dim)
                .unwrap()
                .loss(&x, y)
        };
        let h = 1e-5;
        let numeric: Vec<f64> = (0..params.len())
            .map(|i| {
                let mut up = params.clone();
                let mut down = params.clone();
                up[i] += h;
                down[i] -= h;
                (loss_at(&up) - loss_at(&down)) / (2.0 * h)
            })
            .collect();
        let err = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale = numeric.iter().map(|b| b * b).sum::<f64>().sqrt().max(1e-12);
        worst = worst.max(err / scale);
    }
    report(
        8,
        "numerical kernels",
        kernel.passed() && worst <= 1e-5,
        &format!(
            "{} water-level solves ({:?}), worst gradient relative error {worst:.2e}",
            kernel.cases, kernel.counterexample
        ),
    );
}

fn run_cli(args: &[&str], dir: &Path) -> Vec<u8> {
    let output = Command::new(env!("CARGO_BIN_EXE_inflated-argmax"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    output.stdout
}

#[test]
fn criterion_9_cli_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(
        dir.join("config.json"),
        r#"{"seed": 17, "k": 20, "trials": 2000, "grid": 30}"#,
    )
    .unwrap();
    let mut identical = Vec::new();
    for (name, extra, files) in [
        ("simulate-sizes", vec!["--format", "json"], vec![]),
        (
            "loo-stability",
            vec![],
            vec!["report.json", "delta_j.csv", "summary.txt"],
        ),
        ("region-map", vec![], vec![]),
        ("verify", vec![], vec![]),
    ] {
        let mut runs = Vec::new();
        for run in 0..2 {
            let out = dir.join(format!("{name}-{run}"));
            let out_str = out.to_str().unwrap();
            let mut args = vec![name, "--config", "config.json", "--out", out_str];
            args.extend(&extra);
            let stdout = run_cli(&args, dir);
            let mut bytes = vec![stdout];
            if files.is_empty() {
                bytes.push(std::fs::read(&out).unwrap());
            } else {
                for f in &files {
                    bytes.push(std::fs::read(out.join(f)).unwrap());
                }
            }
            runs.push(bytes);
        }
        identical.push((
            name,
            runs[0] == runs[1] && runs[0].iter().any(|b| !b.is_empty()),
        ));
    }
    report(
        9,
        "determinism",
        identical.iter().all(|(_, same)| *same),
        &format!("byte-identical reruns: {identical:?}"),
    );
}
