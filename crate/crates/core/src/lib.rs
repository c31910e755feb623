//! Maximum-weight b-matching on weighted hypergraphs: data reductions,
//! greedy construction, local search, an exact oracle and a benchmark
//! harness.

pub mod bench;
pub mod construct;
pub mod error;
pub mod exact;
pub mod hypergraph;
pub mod improve;
pub mod io;
pub mod reduce;

pub use construct::{greedy, is_maximal, maximize, PriorityFunction, PriorityOrder};
pub use error::{ModelError, ParseError};
pub use exact::{brute_force_opt, export_lp, oracle_weight, OracleLimits};
pub use hypergraph::{
    blocked, blocked_edges, nmax, validate_matching, CapacityMap, CapacitySpec, EdgeId, Hypergraph, Matching,
    Validation, VertexId, Weight,
};
pub use improve::{ils, IlsConfig, SearchTrace};
pub use reduce::{run_reductions, unfold, KernelResult, ReductionConfig, Rule, RuleSet};
