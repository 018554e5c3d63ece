//! Stable set-valued classification.
//!
//! The central object is the inflated argmax: given a score vector on the
//! probability simplex and a tolerance `epsilon`, it returns every class whose
//! score clears a data-dependent threshold. Paired with a bagged learner the
//! resulting selection is stable under removal of any single training row.
//!
//! ```
//! use inflated_argmax::{inflated_argmax, InflationParams, ScoreVector};
//!
//! let w = ScoreVector::new(vec![0.48, 0.47, 0.05]).unwrap();
//! let set = inflated_argmax(&w, &InflationParams::with_epsilon(0.1).unwrap());
//! assert_eq!(set.to_string(), "{0,1}");
//! ```
//!
//! [`selection`] holds the rules, [`region`] the geometric oracle, and
//! [`ensemble`] with [`learners`] the bagging pipeline. [`metrics`] measures
//! leave-one-out stability and [`experiments`] drives the reproducible runs.

pub mod data;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod learners;
pub mod metrics;
pub mod region;
pub mod rng;
pub mod scores;
pub mod selection;

pub use error::{Error, Result};
pub use scores::{Epsilon, InflationParams, ScoreVector, SelectionSet, DEFAULT_TIE_TOL};
pub use selection::{
    argmax_set, c_epsilon, fixed_margin, in_region, inflated_argmax, k_hat, t_epsilon,
    SelectionRule,
};
