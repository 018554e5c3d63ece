//! Definition-level geometry of the regions `R_j`: Euclidean projection onto
//! `R_j` and the inflated argmax computed from projection distances.
//!
//! This path shares no code with [`crate::selection`] and serves as an
//! independent oracle for the closed form.
//!
//! The projection of `w` onto `R_j` is parametrized by a scalar anchor `a`,
//! the unique root of the strictly decreasing map
//!
//! ```text
//! g(a) = w_j - a + sum_{k != j} (w_k - a)_+ - eps / sqrt(2)
//! ```
//!
//! and then `v_j = a + eps/sqrt(2)`, `v_k = min(a, w_k)` for `k != j`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scores::{Epsilon, ScoreVector, SelectionSet};

const ANCHOR_TOL: f64 = 1e-12;
const ANCHOR_MAX_ITER: usize = 200;

/// Projection of a score vector onto `R_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionResult {
    pub anchor: f64,
    pub projected: ScoreVector,
    pub distance: f64,
}

fn check_class(w: &ScoreVector, j: usize) -> Result<()> {
    if j < w.classes() {
        Ok(())
    } else {
        Err(Error::ClassOutOfRange {
            index: j,
            classes: w.classes(),
        })
    }
}

fn anchor_equation(w: &[f64], margin: f64, j: usize, a: f64) -> f64 {
    let spill: f64 = w
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, &v)| (v - a).max(0.0))
        .sum();
    w[j] - a + spill - margin
}

/// Solves for the projection anchor `a` by bisection.
pub fn solve_anchor(w: &ScoreVector, eps: Epsilon, j: usize) -> Result<f64> {
    check_class(w, j)?;
    let margin = eps.margin();
    let hi_w = w.max();
    let lo_w = w.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = hi_w - lo_w;
    let (mut lo, mut hi) = (lo_w - eps.get() - spread, hi_w + eps.get());

    let g = |a| anchor_equation(w, margin, j, a);
    if !(g(lo) > 0.0 && g(hi) < 0.0) {
        return Err(Error::BracketFailure { lo, hi });
    }
    for _ in 0..ANCHOR_MAX_ITER {
        if hi - lo <= ANCHOR_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Euclidean projection of `w` onto `R_j`.
pub fn project_onto_region(w: &ScoreVector, eps: Epsilon, j: usize) -> Result<ProjectionResult> {
    let anchor = solve_anchor(w, eps, j)?;
    let projected: Vec<f64> = w
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            if k == j {
                anchor + eps.margin()
            } else {
                anchor.min(v)
            }
        })
        .collect();
    let distance = w
        .iter()
        .zip(&projected)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(ProjectionResult {
        anchor,
        projected: ScoreVector::new(projected)?,
        distance,
    })
}

/// `dist(w, R_j)`.
pub fn region_distance(w: &ScoreVector, eps: Epsilon, j: usize) -> Result<f64> {
    Ok(project_onto_region(w, eps, j)?.distance)
}

/// The inflated argmax straight from its definition:
/// `{ j : dist(w, R_j) < eps }`.
pub fn inflated_argmax_by_definition(w: &ScoreVector, eps: Epsilon) -> Result<SelectionSet> {
    let mut members = Vec::new();
    for j in 0..w.classes() {
        if region_distance(w, eps, j)? < eps.get() {
            members.push(j);
        }
    }
    SelectionSet::new(members, w.classes())
}

/// Largest absolute entry of the stationarity residual
/// `v - w - sum_{k != j} lambda_k (e_j - e_k)` with `lambda_k = (w_k - a)_+`.
pub fn kkt_residual(w: &ScoreVector, j: usize, projection: &ProjectionResult) -> f64 {
    let a = projection.anchor;
    let multipliers: Vec<f64> = w
        .iter()
        .enumerate()
        .map(|(k, &v)| if k == j { 0.0 } else { (v - a).max(0.0) })
        .collect();
    let total: f64 = multipliers.iter().sum();
    w.iter()
        .zip(projection.projected.iter())
        .enumerate()
        .map(|(k, (&wk, &vk))| {
            let stationarity = if k == j {
                vk - wk - total
            } else {
                vk - wk + multipliers[k]
            };
            stationarity.abs()
        })
        .fold(0.0, f64::max)
}
