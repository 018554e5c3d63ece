use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scores::{Epsilon, InflationParams, ScoreVector};
use crate::selection::inflated_argmax;

/// One grid point of the three-class simplex and its selection set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    /// Bit `j` is set when class `j` is selected.
    pub mask: u64,
    pub set: String,
}

/// Labels the barycentric grid `(i, j, r - i - j) / r` over the simplex.
pub fn region_map(eps: Epsilon, resolution: usize) -> Result<Vec<RegionPoint>> {
    if resolution < 2 {
        return Err(Error::Config("grid resolution must be at least 2".into()));
    }
    let params = InflationParams::from(eps);
    let r = resolution as f64;
    let mut points = Vec::with_capacity((resolution + 1) * (resolution + 2) / 2);
    for i in 0..=resolution {
        for j in 0..=resolution - i {
            let k = resolution - i - j;
            let w = ScoreVector::new(vec![i as f64 / r, j as f64 / r, k as f64 / r])?;
            let set = inflated_argmax(&w, &params);
            points.push(RegionPoint {
                w1: w[0],
                w2: w[1],
                w3: w[2],
                mask: set.to_bitmask().expect("three classes fit in a mask"),
                set: set.to_string(),
            });
        }
    }
    Ok(points)
}

pub fn write_region_csv<W: Write>(points: &[RegionPoint], writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for p in points {
        csv.serialize(p)?;
    }
    csv.flush()?;
    Ok(())
}
