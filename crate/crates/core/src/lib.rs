//! Action dependency graphs (ADGs) for multi-agent path-finding plans.
//!
//! An ADG turns a time-indexed MAPF plan into a precedence graph: each
//! action may run once the actions it depends on have finished, so robots
//! can execute faster or slower than planned without colliding.
//!
//! * [`model`]: grid maps, plan files, actions and collision checking.
//! * [`adg`]: the graph, cycle detection, reachability and export.
//! * [`construction`]: the exhaustive, candidate-partitioning (CP) and
//!   sparse candidate-partitioning (SCP) builders and wait removal.
//! * [`validation`]: closure-based equivalence and redundancy checks.
//! * [`simulation`]: discrete-event execution and makespan.
//! * [`instancegen`]: random valid plans via prioritized planning.
//! * [`bench`]: construction timing over generated instances.
//!
//! Simulated time is generic over [`TimeScalar`]; the aliases below fix it
//! to exact rationals ([`Seconds`]) or `f64`.

pub mod adg;
pub mod bench;
pub mod construction;
pub mod instancegen;
pub mod model;
pub mod scalar;
pub mod simulation;
pub mod validation;

pub use adg::{Adg, AdgError, DependencyType, Edge, NodeId};
pub use construction::{build, Algorithm, BuildOptions};
pub use model::{derive_actions, Action, ActionKey, ActionSet, GridMap, Solution, Vertex};
pub use scalar::TimeScalar;

/// Exact seconds. Decimal durations such as 0.8 s are held as `4/5`, so long
/// traces accumulate no rounding error.
pub type Seconds = num_rational::Ratio<i64>;

pub type TimingModelExact = simulation::TimingModel<Seconds>;
pub type TimingModelF64 = simulation::TimingModel<f64>;
pub type TraceExact = simulation::ExecutionTrace<Seconds>;
pub type TraceF64 = simulation::ExecutionTrace<f64>;
