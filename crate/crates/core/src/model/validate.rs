//! Collision checking for multi-agent plans.
//!
//! An agent occupies `path[t]` at step `t` and stays parked at its last
//! vertex until the global horizon. Two agents conflict when they share a
//! cell at the same step (vertex conflict) or traverse the same edge in
//! opposite directions during the same step (swap conflict).

use std::collections::HashMap;

use serde::Serialize;

use super::grid::Vertex;
use super::plan::{AgentId, Solution};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Conflict {
    Vertex {
        step: usize,
        vertex: Vertex,
        agents: (AgentId, AgentId),
    },
    /// `agents.0` moves `from -> to` while `agents.1` moves `to -> from`
    /// between `step` and `step + 1`.
    Swap {
        step: usize,
        from: Vertex,
        to: Vertex,
        agents: (AgentId, AgentId),
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub conflicts: Vec<Conflict>,
}

impl ValidityReport {
    pub fn is_ok(&self) -> bool {
        self.conflicts.is_empty()
    }

    pub fn has_swap(&self) -> bool {
        self.conflicts.iter().any(|c| matches!(c, Conflict::Swap { .. }))
    }
}

/// Reports every vertex and swap conflict, ordered by step.
pub fn validate_solution(sol: &Solution) -> ValidityReport {
    let horizon = sol.horizon();
    let mut conflicts = Vec::new();
    let mut at: HashMap<Vertex, AgentId> = HashMap::new();
    let mut moves: HashMap<(Vertex, Vertex), AgentId> = HashMap::new();

    for step in 0..horizon {
        at.clear();
        for p in &sol.paths {
            let v = p.position(step);
            if let Some(&other) = at.get(&v) {
                conflicts.push(Conflict::Vertex {
                    step,
                    vertex: v,
                    agents: (other, p.agent),
                });
            } else {
                at.insert(v, p.agent);
            }
        }

        if step + 1 < horizon {
            moves.clear();
            for p in &sol.paths {
                let (from, to) = (p.position(step), p.position(step + 1));
                if from == to {
                    continue;
                }
                if let Some(&other) = moves.get(&(to, from)) {
                    conflicts.push(Conflict::Swap {
                        step,
                        from: to,
                        to: from,
                        agents: (other, p.agent),
                    });
                }
                moves.insert((from, to), p.agent);
            }
        }
    }

    ValidityReport { conflicts }
}
