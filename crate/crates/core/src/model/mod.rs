//! Grid maps, agent plans and the actions derived from them.

mod action;
mod grid;
mod plan;
mod validate;

pub use action::{derive_actions, Action, ActionKey, ActionSet};
pub use grid::{GridMap, MapError, Vertex};
pub use plan::{AgentId, AgentPath, PlanError, Solution};
pub use validate::{validate_solution, Conflict, ValidityReport};
