//! How much the reductions remove, per instance class.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::reduce::Rule;

use super::pipeline::{BenchError, RunRecord};

/// External solver times, imported by editing the records file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExternalTimes {
    /// Seconds to solve the input.
    pub full: f64,
    /// Seconds to reduce and solve the kernel.
    pub kernel: f64,
}

impl ExternalTimes {
    pub fn speedup(&self) -> Option<f64> {
        (self.full > 0.0 && self.kernel > 0.0).then(|| self.full / self.kernel)
    }
}

/// Edges decided by one rule, as a fraction of all input edges in a class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleShare {
    pub included: f64,
    pub excluded: f64,
    pub folded: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: String,
    pub instances: usize,
    pub edges_before: f64,
    pub edges_after: f64,
    pub vertices_before: f64,
    pub vertices_after: f64,
    /// Mean of kernel edges over input edges.
    pub relative_edges: f64,
    pub relative_vertices: f64,
    pub rules: Vec<(Rule, RuleShare)>,
    pub arithmetic_speedup: Option<f64>,
    pub geometric_speedup: Option<f64>,
}

pub fn geometric_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() || values.iter().any(|&v| v <= 0.0) {
        return None;
    }
    Some((values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64).exp())
}

/// Reads `instance class` pairs, one per line. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_manifest(text: &str) -> Result<BTreeMap<String, String>, BenchError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        match (it.next(), it.next(), it.next()) {
            (Some(name), Some(class), None) => {
                out.insert(name.to_string(), class.to_string());
            }
            _ => {
                return Err(BenchError::Config(format!(
                    "manifest line {}: expected '<instance> <class>'",
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

fn relative(after: usize, before: usize) -> f64 {
    if before == 0 {
        0.0
    } else {
        after as f64 / before as f64
    }
}

/// Groups records by class and summarizes their reduction statistics. The
/// class comes from `manifest`, then from the record, then defaults to
/// `all`.
pub fn effectiveness_report(records: &[RunRecord], manifest: &BTreeMap<String, String>) -> Vec<ClassSummary> {
    let mut groups: BTreeMap<String, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let class = manifest
            .get(&r.instance)
            .cloned()
            .or_else(|| r.class.clone())
            .unwrap_or_else(|| "all".to_string());
        groups.entry(class).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(class, rs)| {
            let n = rs.len() as f64;
            let mean = |f: &dyn Fn(&RunRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
            let total_edges: usize = rs.iter().map(|r| r.reduction.edges_before).sum();
            let rules = Rule::ALL
                .into_iter()
                .map(|rule| {
                    let mut share = RuleShare::default();
                    for r in &rs {
                        let e = r.reduction.effect(rule);
                        share.included += e.included as f64;
                        share.excluded += e.excluded as f64;
                        share.folded += e.folded as f64;
                    }
                    if total_edges > 0 {
                        let t = total_edges as f64;
                        share.included /= t;
                        share.excluded /= t;
                        share.folded /= t;
                    }
                    (rule, share)
                })
                .collect();
            let speedups: Vec<f64> = rs
                .iter()
                .filter_map(|r| r.external.and_then(|x| x.speedup()))
                .collect();
            ClassSummary {
                class,
                instances: rs.len(),
                edges_before: mean(&|r| r.reduction.edges_before as f64),
                edges_after: mean(&|r| r.reduction.edges_after as f64),
                vertices_before: mean(&|r| r.reduction.vertices_before as f64),
                vertices_after: mean(&|r| r.reduction.vertices_after as f64),
                relative_edges: mean(&|r| relative(r.reduction.edges_after, r.reduction.edges_before)),
                relative_vertices: mean(&|r| relative(r.reduction.vertices_after, r.reduction.vertices_before)),
                rules,
                arithmetic_speedup: (!speedups.is_empty())
                    .then(|| speedups.iter().sum::<f64>() / speedups.len() as f64),
                geometric_speedup: geometric_mean(&speedups),
            }
        })
        .collect()
}
