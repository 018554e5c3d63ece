//! Labeled datasets: construction, leave-one-out views, CSV ingestion and a
//! seeded Gaussian-mixture generator.

use std::io::Read;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_for;

/// `n` rows of `d` finite features with labels in `0..classes`.
///
/// `classes` is declared, not inferred: a class may have no rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Vec<f64>,
    labels: Vec<usize>,
    dim: usize,
    classes: usize,
}

impl LabeledDataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>, classes: usize) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::InvalidDataset(format!(
                "row {i} has {} features, expected {dim}",
                row.len()
            )));
        }
        Self::from_flat(rows.into_iter().flatten().collect(), labels, dim, classes)
    }

    /// Row-major feature matrix with `labels.len()` rows.
    pub fn from_flat(
        features: Vec<f64>,
        labels: Vec<usize>,
        dim: usize,
        classes: usize,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if classes == 0 {
            return Err(Error::InvalidDataset("need at least one class".into()));
        }
        if features.len() != labels.len() * dim {
            return Err(Error::LengthMismatch {
                left: features.len(),
                right: labels.len() * dim,
            });
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= classes) {
            return Err(Error::ClassOutOfRange {
                index: bad,
                classes,
            });
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "row {} feature {} is not finite",
                pos / dim.max(1),
                pos % dim.max(1)
            )));
        }
        Ok(Self {
            features,
            labels,
            dim,
            classes,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], usize)> + '_ {
        (0..self.len()).map(move |i| (self.row(i), self.labels[i]))
    }

    /// The dataset without row `i`; remaining rows keep their order, so
    /// rows after `i` shift down by one.
    pub fn drop(&self, i: usize) -> Result<Self> {
        if self.len() == 1 {
            return Err(Error::DropLastRow);
        }
        if i >= self.len() {
            return Err(Error::RowOutOfRange {
                index: i,
                rows: self.len(),
            });
        }
        let mut features = self.features.clone();
        features.drain(i * self.dim..(i + 1) * self.dim);
        let mut labels = self.labels.clone();
        labels.remove(i);
        Ok(Self {
            features,
            labels,
            dim: self.dim,
            classes: self.classes,
        })
    }

    /// Rows at `indices`, in that order; repeats are allowed.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::RowOutOfRange {
                    index: i,
                    rows: self.len(),
                });
            }
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Ok(Self {
            features,
            labels,
            dim: self.dim,
            classes: self.classes,
        })
    }

    /// Relabels every row through `map` (`new = map[old]`).
    pub fn relabel(&self, map: &[usize]) -> Result<Self> {
        if map.len() != self.classes {
            return Err(Error::LengthMismatch {
                left: map.len(),
                right: self.classes,
            });
        }
        let labels = self.labels.iter().map(|&y| map[y]).collect();
        Self::from_flat(self.features.clone(), labels, self.dim, self.classes)
    }

    /// Reads a CSV with a header row. `label_column` names the label
    /// column (integers in `0..classes`); every other column is a numeric
    /// feature. When `classes` is `None` it is one more than the largest
    /// label seen.
    pub fn from_csv<R: Read>(
        reader: R,
        label_column: &str,
        classes: Option<usize>,
    ) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let headers = csv.headers()?.clone();
        let label_pos = headers
            .iter()
            .position(|h| h.trim() == label_column)
            .ok_or_else(|| Error::Parse {
                line: 1,
                message: format!("no column named '{label_column}'"),
            })?;

        let mut features = Vec::new();
        let mut labels = Vec::new();
        for record in csv.records() {
            let record = record?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != headers.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} fields, found {}", headers.len(), record.len()),
                });
            }
            for (pos, field) in record.iter().enumerate() {
                let field = field.trim();
                if pos == label_pos {
                    let label = field.parse::<usize>().map_err(|_| Error::Parse {
                        line,
                        message: format!("label '{field}' is not a nonnegative integer"),
                    })?;
                    labels.push(label);
                } else {
                    let value = field.parse::<f64>().ok().filter(|v| v.is_finite());
                    let value = value.ok_or_else(|| Error::Parse {
                        line,
                        message: format!("column '{}': invalid number '{field}'", &headers[pos]),
                    })?;
                    features.push(value);
                }
            }
            if let Some(classes) = classes {
                let label = *labels.last().unwrap();
                if label >= classes {
                    return Err(Error::Parse {
                        line,
                        message: format!("label {label} out of range for {classes} classes"),
                    });
                }
            }
        }
        let classes = classes.unwrap_or_else(|| labels.iter().max().map_or(0, |m| m + 1));
        Self::from_flat(features, labels, headers.len() - 1, classes)
    }
}

/// Gaussian mixture with class means at scaled simplex vertices
/// `scale * e_l` and isotropic noise of standard deviation `overlap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    pub dim: usize,
    pub classes: usize,
    pub overlap: f64,
    pub scale: f64,
}

impl GaussianMixture {
    pub fn new(dim: usize, classes: usize, overlap: f64) -> Result<Self> {
        let mixture = Self {
            dim,
            classes,
            overlap,
            scale: 1.0,
        };
        mixture.validate()?;
        Ok(mixture)
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes == 0 || self.dim < self.classes {
            return Err(Error::Config(format!(
                "mixture needs 1 <= classes <= dim, got classes = {}, dim = {}",
                self.classes, self.dim
            )));
        }
        if !(self.overlap.is_finite() && self.overlap >= 0.0) {
            return Err(Error::Config(format!(
                "overlap must be >= 0, got {}",
                self.overlap
            )));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::Config(format!(
                "scale must be > 0, got {}",
                self.scale
            )));
        }
        Ok(())
    }

    /// Draws `n` rows with uniformly random labels.
    pub fn sample(&self, n: usize, seed: u64) -> Result<LabeledDataset> {
        self.validate()?;
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut rng = rng_for(seed, 0);
        let noise = Normal::new(0.0, self.overlap)
            .map_err(|e| Error::Config(format!("noise distribution: {e}")))?;
        let mut features = Vec::with_capacity(n * self.dim);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let label = rng.random_range(0..self.classes);
            labels.push(label);
            for k in 0..self.dim {
                let mean = if k == label { self.scale } else { 0.0 };
                features.push(mean + noise.sample(&mut rng));
            }
        }
        LabeledDataset::from_flat(features, labels, self.dim, self.classes)
    }
}
