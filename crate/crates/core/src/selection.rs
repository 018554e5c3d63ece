//! Selection rules: standard argmax with ties, the inflated argmax and the
//! fixed-margin baseline.
//!
//! The inflated argmax of `w` at radius `eps` is the set of classes `j` for
//! which `w` lies strictly within distance `eps` of the region
//!
//! ```text
//! R_j = { v : v_j >= max_{l != j} v_l + eps / sqrt(2) }.
//! ```
//!
//! Membership reduces to a single threshold: `j` is selected iff
//! `w_j > t(w)`, where
//!
//! ```text
//! f_w(c) = (sum_j (w_j - c)_+)^2 + sum_j (w_j - c)_+^2
//! c(w)   = the unique c with f_w(c) = eps^2
//! t(w)   = c(w) + eps / sqrt(2) - sum_j (w_j - c(w))_+
//! ```
//!
//! Only the `k̂` largest scores are active at `c(w)`, so `c` has a closed form
//! in their mean and second moment. Sorting dominates, giving `O(L log L)`.
//!
//! ```
//! use inflated_argmax::{inflated_argmax, InflationParams, ScoreVector};
//!
//! let w = ScoreVector::new(vec![0.5, 0.3, 0.2]).unwrap();
//! let set = inflated_argmax(&w, &InflationParams::with_epsilon(0.3).unwrap());
//! assert_eq!(set.members(), &[0, 1]);
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scores::{Epsilon, InflationParams, ScoreVector, SelectionSet, DEFAULT_TIE_TOL};

const BISECTION_MAX_ITER: usize = 200;

/// All indices whose score is within `tie_tol` of the maximum.
pub fn argmax_set(w: &ScoreVector, tie_tol: f64) -> SelectionSet {
    let cutoff = w.max() - tie_tol;
    select_where(w, |v| v >= cutoff)
}

/// `f_w(c) = (sum_j (w_j - c)_+)^2 + sum_j (w_j - c)_+^2`.
///
/// Zero for `c >= max w`, strictly decreasing below it.
pub fn water_level_excess(w: &[f64], c: f64) -> f64 {
    let (linear, quadratic) = w.iter().fold((0.0, 0.0), |(lin, quad), &v| {
        let excess = (v - c).max(0.0);
        (lin + excess, quad + excess * excess)
    });
    linear * linear + quadratic
}

/// Number of leading order statistics active at the water level:
/// the largest `k` with `f_w(w_[k]) <= eps^2`.
pub fn k_hat(w: &ScoreVector, eps: Epsilon) -> usize {
    k_hat_sorted(&w.sorted_desc(), eps.get())
}

fn k_hat_sorted(sorted: &[f64], eps: f64) -> usize {
    let budget = eps * eps;
    let mut k_hat = 1;
    // f_w(w_[k]) is nondecreasing in k, so stop at the first violation.
    for k in 2..=sorted.len() {
        let level = sorted[k - 1];
        let (linear, quadratic) = sorted[..k].iter().fold((0.0, 0.0), |(lin, quad), &v| {
            let gap = v - level;
            (lin + gap, quad + gap * gap)
        });
        if linear * linear + quadratic > budget {
            break;
        }
        k_hat = k;
    }
    k_hat
}

/// The water level `c(w)` solving `f_w(c) = eps^2`.
pub fn c_epsilon(w: &ScoreVector, eps: Epsilon) -> f64 {
    thresholds(w, &InflationParams::from(eps)).water_level
}

/// The membership threshold `t(w)`; always `t(w) <= c(w)`.
pub fn t_epsilon(w: &ScoreVector, eps: Epsilon) -> f64 {
    thresholds(w, &InflationParams::from(eps)).threshold
}

/// Intermediate quantities of the closed-form inflated argmax.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub k_hat: usize,
    pub water_level: f64,
    pub threshold: f64,
}

/// Computes `k̂`, `c(w)` and `t(w)` in one pass.
///
/// `c(w)` comes from the closed form over the `k̂` active scores, with a
/// bisection fallback when the discriminant is within `params.tie_tol` of
/// zero.
pub fn thresholds(w: &ScoreVector, params: &InflationParams) -> Thresholds {
    let eps = params.epsilon.get();
    let sorted = w.sorted_desc();
    let top = sorted[0];
    let k = k_hat_sorted(&sorted, eps);
    let active = &sorted[..k];
    let kf = k as f64;

    // Work with gaps below the top score to avoid cancellation.
    let mean_gap = active.iter().map(|v| top - v).sum::<f64>() / kf;
    let gap_var = active
        .iter()
        .map(|v| {
            let d = (top - v) - mean_gap;
            d * d
        })
        .sum::<f64>()
        / kf;
    let discriminant = (eps * eps / kf - gap_var) / (kf + 1.0);

    let water_level = if discriminant > params.tie_tol {
        top - (mean_gap + discriminant.sqrt())
    } else {
        bisect_water_level(w, eps)
    };
    let active_mass: f64 = w.iter().map(|&v| (v - water_level).max(0.0)).sum();
    let threshold = water_level + params.epsilon.margin() - active_mass;

    Thresholds {
        k_hat: k,
        water_level,
        threshold,
    }
}

fn bisect_water_level(w: &[f64], eps: f64) -> f64 {
    let target = eps * eps;
    let top = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // f_w(top - eps) >= 2 eps^2 > eps^2 and f_w(top) = 0.
    let (mut lo, mut hi) = (top - eps, top);
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if water_level_excess(w, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The inflated argmax: `{ j : w_j > t(w) }`.
///
/// Always nonempty and always contains every maximizer of `w`.
pub fn inflated_argmax(w: &ScoreVector, params: &InflationParams) -> SelectionSet {
    let t = thresholds(w, params).threshold;
    select_where(w, |v| v > t)
}

/// The fixed-margin rule: `{ j : w_j > max w - eps / sqrt(2) }`.
pub fn fixed_margin(w: &ScoreVector, eps: Epsilon) -> SelectionSet {
    let cutoff = w.max() - eps.margin();
    select_where(w, |v| v > cutoff)
}

/// Whether `w` lies in the closed region `w_j >= max_{l != j} w_l + eps/sqrt(2)`.
///
/// With a single class the competitor maximum is `-inf`, so this is `true`.
pub fn in_region(w: &ScoreVector, eps: Epsilon, j: usize) -> Result<bool> {
    if j >= w.classes() {
        return Err(Error::ClassOutOfRange {
            index: j,
            classes: w.classes(),
        });
    }
    let competitor = w
        .iter()
        .enumerate()
        .filter(|&(l, _)| l != j)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(w[j] >= competitor + eps.margin())
}

fn select_where(w: &ScoreVector, keep: impl Fn(f64) -> bool) -> SelectionSet {
    let members = w
        .iter()
        .enumerate()
        .filter(|&(_, &v)| keep(v))
        .map(|(j, _)| j)
        .collect();
    SelectionSet::from_sorted(members, w.classes())
}

/// A selection rule as a value, so pipelines can be configured at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SelectionRule {
    Argmax { tie_tol: f64 },
    Inflated { params: InflationParams },
    FixedMargin { epsilon: Epsilon },
}

impl SelectionRule {
    pub fn argmax() -> Self {
        SelectionRule::Argmax { tie_tol: 0.0 }
    }

    pub fn inflated(epsilon: Epsilon) -> Self {
        SelectionRule::Inflated {
            params: InflationParams {
                epsilon,
                tie_tol: DEFAULT_TIE_TOL,
            },
        }
    }

    pub fn fixed_margin(epsilon: Epsilon) -> Self {
        SelectionRule::FixedMargin { epsilon }
    }

    pub fn apply(&self, w: &ScoreVector) -> SelectionSet {
        match self {
            SelectionRule::Argmax { tie_tol } => argmax_set(w, *tie_tol),
            SelectionRule::Inflated { params } => inflated_argmax(w, params),
            SelectionRule::FixedMargin { epsilon } => fixed_margin(w, *epsilon),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SelectionRule::Argmax { .. } => "argmax",
            SelectionRule::Inflated { .. } => "inflated_argmax",
            SelectionRule::FixedMargin { .. } => "fixed_margin",
        }
    }
}
