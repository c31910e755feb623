use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{PriorityFunction, PriorityOrder};
use crate::error::{ModelError, ParseError};
use crate::hypergraph::{
    assign_random_weights, make_capacity, validate_matching, CapacityMap, CapacitySpec, Hypergraph, Matching, Weight,
};
use crate::improve::{exhaustive_one_two_swap, ils, IlsConfig, IlsConfigError, SearchTrace};
use crate::io::{parse_capacities, parse_hmetis, parse_matrix_market};
use crate::reduce::{run_reductions, unfold, ConfigError, KernelResult, ReductionConfig, ReductionReport, UnfoldError};

use super::effectiveness::ExternalTimes;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Reduction(#[from] ConfigError),
    #[error(transparent)]
    Ils(#[from] IlsConfigError),
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
    #[error("final matching is infeasible: {0}")]
    Infeasible(String),
    #[error("{0}")]
    Config(String),
}

fn read(path: &Path) -> Result<String, BenchError> {
    fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Hmetis,
    Mtx,
}

impl FromStr for InputFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hmetis" | "hgr" => Ok(InputFormat::Hmetis),
            "mtx" | "mm" => Ok(InputFormat::Mtx),
            other => Err(BenchError::Config(format!("unknown format '{other}' (expected hmetis or mtx)"))),
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::Hmetis => "hmetis",
            InputFormat::Mtx => "mtx",
        })
    }
}

/// Edge weights: as read from the input, or redrawn uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightSpec {
    File,
    Uniform { lo: Weight, hi: Weight },
}

impl FromStr for WeightSpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BenchError::Config(format!("bad weight spec '{s}' (expected file or uniform:<lo>:<hi>)"));
        let s = s.trim();
        if s == "file" {
            return Ok(WeightSpec::File);
        }
        let rest = s.strip_prefix("uniform:").ok_or_else(bad)?;
        let (lo, hi) = rest.split_once(':').ok_or_else(bad)?;
        let lo = lo.parse().map_err(|_| bad())?;
        let hi = hi.parse().map_err(|_| bad())?;
        if lo < 1 || hi < lo {
            return Err(BenchError::Model(ModelError::BadWeightRange { lo, hi }));
        }
        Ok(WeightSpec::Uniform { lo, hi })
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::File => f.write_str("file"),
            WeightSpec::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CapacitySource {
    Const(usize),
    /// `b(v)` uniform in `[1, deg(v)]`.
    Random,
    File(PathBuf),
}

impl FromStr for CapacitySource {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "rand" || s == "random" {
            return Ok(CapacitySource::Random);
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(CapacitySource::File(PathBuf::from(path)));
        }
        let k = s
            .strip_prefix("const:")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k >= 1)
            .ok_or_else(|| BenchError::Config(format!("bad capacity spec '{s}' (expected const:<k>, rand or file:<path>)")))?;
        Ok(CapacitySource::Const(k))
    }
}

impl fmt::Display for CapacitySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapacitySource::Const(k) => write!(f, "const:{k}"),
            CapacitySource::Random => f.write_str("rand"),
            CapacitySource::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalSearch {
    None,
    Swap,
    Ils,
}

impl FromStr for LocalSearch {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "none" => Ok(LocalSearch::None),
            "swap" => Ok(LocalSearch::Swap),
            "ils" => Ok(LocalSearch::Ils),
            other => Err(BenchError::Config(format!(
                "unknown local search '{other}' (expected none, swap or ils)"
            ))),
        }
    }
}

/// Everything that happens after the instance is loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub reductions: ReductionConfig,
    pub initial: PriorityFunction,
    pub local_search: LocalSearch,
    /// Repetition `i` runs the search with seed `seed + i`.
    pub ils: IlsConfig,
    pub seed: u64,
    pub reps: usize,
    /// Record wall times. Off for byte-reproducible reports.
    pub timings: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            reductions: ReductionConfig::default(),
            initial: PriorityFunction::Pin,
            local_search: LocalSearch::None,
            ils: IlsConfig::default(),
            seed: 0,
            reps: 1,
            timings: true,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        self.reductions.validate()?;
        if self.local_search == LocalSearch::Ils {
            self.ils.validate()?;
        }
        if self.reps < 1 {
            return Err(BenchError::Config("repetitions must be at least 1".into()));
        }
        Ok(())
    }
}

/// Short name such as `red+pin+ils15` or `weight`.
pub fn algorithm_label(cfg: &SolveConfig) -> String {
    let mut parts = Vec::new();
    if !cfg.reductions.enabled.is_empty() {
        parts.push("red".to_string());
    }
    parts.push(cfg.initial.name().to_string());
    match cfg.local_search {
        LocalSearch::None => {}
        LocalSearch::Swap => parts.push("swap".into()),
        LocalSearch::Ils => parts.push(format!("ils{}", cfg.ils.k)),
    }
    parts.join("+")
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub weights: WeightSpec,
    pub capacities: CapacitySource,
    pub solve: SolveConfig,
    /// Defaults to [`algorithm_label`].
    pub label: Option<String>,
    pub class: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub reduce: f64,
    pub construct: f64,
    pub improve: f64,
    pub unfold: f64,
}

impl PhaseTimes {
    pub fn total(&self) -> f64 {
        self.reduce + self.construct + self.improve + self.unfold
    }

    fn add(&mut self, other: &PhaseTimes) {
        self.reduce += other.reduce;
        self.construct += other.construct;
        self.improve += other.improve;
        self.unfold += other.unfold;
    }

    fn scale(&mut self, f: f64) {
        self.reduce *= f;
        self.construct *= f;
        self.improve *= f;
        self.unfold *= f;
    }
}

/// One line of a records file. Times are means over the repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    pub seed: u64,
    pub reps: usize,
    /// Arithmetic mean over the repetitions.
    pub weight: f64,
    pub weights: Vec<Weight>,
    pub best_weight: Weight,
    pub feasible: bool,
    #[serde(default = "yes")]
    pub solved: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<PhaseTimes>,
    pub weight_offset: Weight,
    pub reduction: ReductionReport,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub traces: Vec<SearchTrace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external: Option<ExternalTimes>,
}

fn yes() -> bool {
    true
}

/// Machine-readable summary of one or more runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<RunRecord>,
}

/// Result of a run: the record, the heaviest matching over the repetitions
/// and the kernel it was computed on.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub matching: Matching,
    pub kernel: KernelResult,
}

pub fn load_instance(path: &Path, format: InputFormat) -> Result<Hypergraph, BenchError> {
    let text = read(path)?;
    let parsed = match format {
        InputFormat::Hmetis => parse_hmetis(&text),
        InputFormat::Mtx => parse_matrix_market(&text),
    };
    parsed.map_err(|source| BenchError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Reduce, construct on the kernel, improve, unfold and validate against
/// the input, `cfg.reps` times.
pub fn run_instance(
    name: &str,
    h: &Hypergraph,
    b: &CapacityMap,
    cfg: &SolveConfig,
    label: Option<&str>,
) -> Result<RunOutcome, BenchError> {
    cfg.validate()?;
    b.check_len(h)?;
    let mut weights = Vec::with_capacity(cfg.reps);
    let mut traces = Vec::new();
    let mut times = PhaseTimes::default();
    let mut best: Option<(Matching, KernelResult)> = None;
    for rep in 0..cfg.reps {
        let mut t = PhaseTimes::default();

        let start = Instant::now();
        let kr = run_reductions(h, b, &cfg.reductions)?;
        t.reduce = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let order = PriorityOrder::new(cfg.initial, &kr.kernel, &kr.capacities);
        let mut m = order.greedy(&kr.kernel, &kr.capacities);
        t.construct = start.elapsed().as_secs_f64();

        let start = Instant::now();
        match cfg.local_search {
            LocalSearch::None => {}
            LocalSearch::Swap => {
                exhaustive_one_two_swap(&kr.kernel, &kr.capacities, &mut m, &order, cfg.ils.max_candidates);
            }
            LocalSearch::Ils => {
                let ils_cfg = IlsConfig {
                    seed: cfg.seed.wrapping_add(rep as u64),
                    ..cfg.ils.clone()
                };
                let (improved, trace) = ils(&kr.kernel, &kr.capacities, &m, &order, &ils_cfg);
                m = improved;
                traces.push(trace);
            }
        }
        t.improve = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let kernel_weight = m.weight();
        let full = unfold(h, b, &kr, &m)?;
        t.unfold = start.elapsed().as_secs_f64();

        let check = validate_matching(h, b, full.edges());
        if !check.feasible {
            return Err(BenchError::Infeasible(check.diagnostic.unwrap_or_default()));
        }
        if check.weight != kernel_weight + kr.weight_offset {
            return Err(BenchError::Unfold(UnfoldError::WeightMismatch {
                expected: kernel_weight + kr.weight_offset,
                found: check.weight,
            }));
        }
        weights.push(full.weight());
        times.add(&t);
        if best.as_ref().is_none_or(|(bm, _)| full.weight() > bm.weight()) {
            best = Some((full, kr));
        }
    }
    times.scale(1.0 / cfg.reps as f64);
    let (matching, kernel) = best.expect("at least one repetition");
    let mut reduction = kernel.report.clone();
    if !cfg.timings {
        reduction.strip_timings();
    }
    let record = RunRecord {
        instance: name.to_string(),
        algorithm: label.map_or_else(|| algorithm_label(cfg), str::to_string),
        class: None,
        seed: cfg.seed,
        reps: cfg.reps,
        weight: weights.iter().map(|&w| w as f64).sum::<f64>() / cfg.reps as f64,
        best_weight: matching.weight(),
        weights,
        feasible: true,
        solved: true,
        seconds: cfg.timings.then(|| times.total()),
        phases: cfg.timings.then_some(times),
        weight_offset: kernel.weight_offset,
        reduction,
        traces,
        external: None,
    };
    Ok(RunOutcome {
        record,
        matching,
        kernel,
    })
}

/// Loads the input, applies the weight and capacity specs and runs
/// [`run_instance`]. Random capacities use `seed + 1` so they are drawn
/// independently of random weights.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunOutcome, BenchError> {
    let mut h = load_instance(&cfg.input, cfg.format)?;
    let seed = cfg.solve.seed;
    if let WeightSpec::Uniform { lo, hi } = cfg.weights {
        h = assign_random_weights(&h, seed, lo, hi)?;
    }
    let b = match &cfg.capacities {
        CapacitySource::Const(k) => make_capacity(CapacitySpec::Const(*k), &h, seed)?,
        CapacitySource::Random => make_capacity(CapacitySpec::Random, &h, seed.wrapping_add(1))?,
        CapacitySource::File(path) => {
            parse_capacities(&read(path)?, h.num_vertices()).map_err(|source| BenchError::Parse {
                path: path.clone(),
                source,
            })?
        }
    };
    let name = cfg
        .input
        .file_stem()
        .map_or_else(|| cfg.input.display().to_string(), |s| s.to_string_lossy().into_owned());
    let mut out = run_instance(&name, &h, &b, &cfg.solve, cfg.label.as_deref())?;
    out.record.class.clone_from(&cfg.class);
    Ok(out)
}

/// Runs each configuration in turn; one failure does not stop the others.
pub fn run_batch(configs: &[RunConfig]) -> Vec<Result<RunOutcome, BenchError>> {
    configs.iter().map(run_pipeline).collect()
}
