//! Domain types shared by every selection rule: score vectors, selection
//! sets and the inflation radius.
//!
//! Class indices are zero-based throughout the crate: a problem with `L`
//! classes uses labels `0..L`.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance used for tie detection and near-degenerate guards.
pub const DEFAULT_TIE_TOL: f64 = 1e-12;

/// A finite, nonempty vector of class scores.
///
/// Scores are not required to lie on the probability simplex; use
/// [`ScoreVector::is_on_simplex`] when a pipeline needs that.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyScores);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteScore { index, value });
        }
        Ok(Self(values))
    }

    /// The uniform vector `(1/L, ..., 1/L)`.
    pub fn uniform(classes: usize) -> Result<Self> {
        if classes == 0 {
            return Err(Error::EmptyScores);
        }
        Ok(Self(vec![1.0 / classes as f64; classes]))
    }

    /// Number of classes `L`.
    pub fn classes(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Entries nonnegative and summing to one, both within `tol`.
    pub fn is_on_simplex(&self, tol: f64) -> bool {
        let sum: f64 = self.0.iter().sum();
        self.0.iter().all(|&v| v >= -tol) && (sum - 1.0).abs() <= tol
    }

    /// Euclidean distance to another vector of the same length.
    pub fn distance(&self, other: &ScoreVector) -> Result<f64> {
        if self.classes() != other.classes() {
            return Err(Error::LengthMismatch {
                left: self.classes(),
                right: other.classes(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    /// Entries in descending order.
    pub(crate) fn sorted_desc(&self) -> Vec<f64> {
        let mut sorted = self.0.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        sorted
    }
}

impl Deref for ScoreVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ScoreVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<ScoreVector> for Vec<f64> {
    fn from(w: ScoreVector) -> Self {
        w.0
    }
}

/// A set of class indices drawn from a universe of `L` classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SelectionSet {
    members: Vec<usize>,
    universe: usize,
}

impl SelectionSet {
    /// Builds a set from arbitrary indices; duplicates are merged.
    pub fn new(members: impl IntoIterator<Item = usize>, universe: usize) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        if let Some(&index) = members.iter().find(|&&j| j >= universe) {
            return Err(Error::ClassOutOfRange {
                index,
                classes: universe,
            });
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self { members, universe })
    }

    /// Members are assumed sorted, unique and in range.
    pub(crate) fn from_sorted(members: Vec<usize>, universe: usize) -> Self {
        debug_assert!(members.windows(2).all(|p| p[0] < p[1]));
        debug_assert!(members.iter().all(|&j| j < universe));
        Self { members, universe }
    }

    pub fn singleton(index: usize, universe: usize) -> Result<Self> {
        Self::new([index], universe)
    }

    pub fn full(universe: usize) -> Self {
        Self {
            members: (0..universe).collect(),
            universe,
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    /// The single member, if the set has exactly one.
    pub fn as_singleton(&self) -> Option<usize> {
        match self.members.as_slice() {
            [j] => Some(*j),
            _ => None,
        }
    }

    pub fn intersects(&self, other: &SelectionSet) -> bool {
        let (mut a, mut b) = (
            self.members.iter().peekable(),
            other.members.iter().peekable(),
        );
        while let (Some(&&x), Some(&&y)) = (a.peek(), b.peek()) {
            match x.cmp(&y) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn is_subset(&self, other: &SelectionSet) -> bool {
        self.members.iter().all(|&j| other.contains(j))
    }

    /// Bit `j` set for every member `j`; `None` when `L > 64`.
    pub fn to_bitmask(&self) -> Option<u64> {
        if self.universe > 64 {
            return None;
        }
        Some(self.members.iter().fold(0u64, |acc, &j| acc | (1u64 << j)))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }
}

impl fmt::Display for SelectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, j) in self.members.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

/// The inflation radius: a positive, finite real.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidEpsilon(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// The region margin `eps / sqrt(2)`.
    pub fn margin(self) -> f64 {
        self.0 / std::f64::consts::SQRT_2
    }
}

impl TryFrom<f64> for Epsilon {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Epsilon> for f64 {
    fn from(eps: Epsilon) -> Self {
        eps.0
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Parameters of the inflated argmax.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InflationParams {
    pub epsilon: Epsilon,
    /// Guard for near-degenerate arithmetic in the closed form. Should be
    /// far below `epsilon`.
    pub tie_tol: f64,
}

impl InflationParams {
    pub fn new(epsilon: f64, tie_tol: f64) -> Result<Self> {
        let epsilon = Epsilon::new(epsilon)?;
        if !(tie_tol.is_finite() && tie_tol >= 0.0) {
            return Err(Error::InvalidTieTolerance(tie_tol));
        }
        if tie_tol > epsilon.get() / 100.0 {
            log::warn!(
                "tie tolerance {tie_tol} is not small relative to epsilon {}",
                epsilon.get()
            );
        }
        Ok(Self { epsilon, tie_tol })
    }

    pub fn with_epsilon(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, DEFAULT_TIE_TOL)
    }
}

impl From<Epsilon> for InflationParams {
    fn from(epsilon: Epsilon) -> Self {
        Self {
            epsilon,
            tie_tol: DEFAULT_TIE_TOL,
        }
    }
}
