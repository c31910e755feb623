//! Performance profiles over run records.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack for comparing a ratio against a grid point, so that e.g. 90 / 100
/// counts as reaching 0.9.
const RATIO_EPS: f64 = 1e-12;

/// The fields of a record that profiles read. Deserializes from a
/// [`RunRecord`](super::RunRecord) line as well as from hand-written lines
/// for external solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub instance: String,
    pub algorithm: String,
    pub weight: f64,
    #[serde(default)]
    pub seconds: Option<f64>,
    /// `false` marks a timeout: the record is left out of time profiles.
    #[serde(default = "yes")]
    pub solved: bool,
}

fn yes() -> bool {
    true
}

impl From<&super::RunRecord> for ProfileRecord {
    fn from(r: &super::RunRecord) -> Self {
        ProfileRecord {
            instance: r.instance.clone(),
            algorithm: r.algorithm.clone(),
            weight: r.weight,
            seconds: r.seconds,
            solved: r.solved,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub algorithm: String,
    /// `(τ, fraction)` in grid order.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("no records")]
    Empty,
    #[error("algorithm '{algorithm}' appears twice on instance '{instance}'")]
    Duplicate { instance: String, algorithm: String },
    #[error("record for '{algorithm}' on '{instance}' has invalid weight {weight}")]
    BadWeight {
        instance: String,
        algorithm: String,
        weight: f64,
    },
    #[error("record for '{algorithm}' on '{instance}' has no positive time")]
    BadTime { instance: String, algorithm: String },
    #[error("grid point {0} is outside the profile's range")]
    BadGrid(f64),
}

/// 100 evenly spaced points from 0.8 to 1.0.
pub fn default_quality_grid() -> Vec<f64> {
    (0..100).map(|i| 0.8 + 0.2 * i as f64 / 99.0).collect()
}

/// 100 logarithmically spaced points from 1 to 64.
pub fn default_time_grid() -> Vec<f64> {
    (0..100).map(|i| 64f64.powf(i as f64 / 99.0)).collect()
}

/// Per instance, the value of each algorithm present there.
fn table<F>(records: &[ProfileRecord], value: F) -> Result<BTreeMap<&str, BTreeMap<&str, f64>>, ProfileError>
where
    F: Fn(&ProfileRecord) -> Result<Option<f64>, ProfileError>,
{
    let mut out: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for r in records {
        if !seen.insert((r.instance.as_str(), r.algorithm.as_str())) {
            return Err(ProfileError::Duplicate {
                instance: r.instance.clone(),
                algorithm: r.algorithm.clone(),
            });
        }
        if let Some(v) = value(r)? {
            out.entry(&r.instance).or_default().insert(&r.algorithm, v);
        }
    }
    Ok(out)
}

fn algorithms(records: &[ProfileRecord]) -> BTreeSet<&str> {
    records.iter().map(|r| r.algorithm.as_str()).collect()
}

/// Fraction of instances on which each algorithm reaches at least `τ` times
/// the best weight any algorithm found there. An algorithm without a record
/// on an instance has not solved it.
pub fn quality_profile(records: &[ProfileRecord], grid: &[f64]) -> Result<Vec<ProfileCurve>, ProfileError> {
    if records.is_empty() {
        return Err(ProfileError::Empty);
    }
    if let Some(&t) = grid.iter().find(|&&t| !(t > 0.0 && t <= 1.0)) {
        return Err(ProfileError::BadGrid(t));
    }
    let by_instance = table(records, |r| {
        if r.weight.is_finite() && r.weight >= 0.0 {
            Ok(Some(r.weight))
        } else {
            Err(ProfileError::BadWeight {
                instance: r.instance.clone(),
                algorithm: r.algorithm.clone(),
                weight: r.weight,
            })
        }
    })?;
    let count = by_instance.len() as f64;
    Ok(algorithms(records)
        .into_iter()
        .map(|alg| {
            let points = grid
                .iter()
                .map(|&tau| {
                    let hits = by_instance
                        .values()
                        .filter(|row| {
                            let best = row.values().copied().fold(0.0, f64::max);
                            match row.get(alg) {
                                None => false,
                                Some(_) if best == 0.0 => true,
                                Some(&w) => w / best >= tau - RATIO_EPS,
                            }
                        })
                        .count();
                    (tau, hits as f64 / count)
                })
                .collect();
            ProfileCurve {
                algorithm: alg.to_string(),
                points,
            }
        })
        .collect())
}

/// Fraction of instances each algorithm solves within `τ` times the fastest
/// solved time there. Unsolved records count as misses and do not enter the
/// minimum; instances nobody solved are left out.
pub fn time_profile(records: &[ProfileRecord], grid: &[f64]) -> Result<Vec<ProfileCurve>, ProfileError> {
    if records.is_empty() {
        return Err(ProfileError::Empty);
    }
    if let Some(&t) = grid.iter().find(|&&t| !(t >= 1.0 && t.is_finite())) {
        return Err(ProfileError::BadGrid(t));
    }
    let by_instance = table(records, |r| {
        if !r.solved {
            return Ok(None);
        }
        match r.seconds {
            Some(t) if t > 0.0 && t.is_finite() => Ok(Some(t)),
            _ => Err(ProfileError::BadTime {
                instance: r.instance.clone(),
                algorithm: r.algorithm.clone(),
            }),
        }
    })?;
    let count = by_instance.len() as f64;
    Ok(algorithms(records)
        .into_iter()
        .map(|alg| {
            let points = grid
                .iter()
                .map(|&tau| {
                    if count == 0.0 {
                        return (tau, 0.0);
                    }
                    let hits = by_instance
                        .values()
                        .filter(|row| {
                            let fastest = row.values().copied().fold(f64::INFINITY, f64::min);
                            row.get(alg).is_some_and(|&t| t / fastest <= tau + RATIO_EPS)
                        })
                        .count();
                    (tau, hits as f64 / count)
                })
                .collect();
            ProfileCurve {
                algorithm: alg.to_string(),
                points,
            }
        })
        .collect())
}
