//! Per-agent vertex paths and their canonical JSON form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::grid::{GridMap, Vertex};

pub type AgentId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentPath {
    pub agent: AgentId,
    /// `vertices[t]` is the agent's cell at time step `t`.
    pub vertices: Vec<Vertex>,
}

impl AgentPath {
    /// Cell occupied at step `t`; agents park at their last vertex.
    pub fn position(&self, t: usize) -> Vertex {
        self.vertices[t.min(self.vertices.len() - 1)]
    }
}

/// A multi-agent plan over a grid map. Validity is checked separately by
/// [`validate_solution`](super::validate::validate_solution).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub map: GridMap,
    /// The `map` field of the plan file: a path or a name.
    pub map_ref: String,
    pub paths: Vec<AgentPath>,
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("plan is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("agent {agent}: path is empty")]
    EmptyPath { agent: AgentId },
    #[error("agent {agent}: vertex {vertex} at step {step} is outside the map")]
    OutOfBounds {
        agent: AgentId,
        step: usize,
        vertex: Vertex,
    },
    #[error("agent {agent}: vertex {vertex} at step {step} is blocked")]
    Blocked {
        agent: AgentId,
        step: usize,
        vertex: Vertex,
    },
    #[error("agent {agent}: {from} -> {to} at step {step} is not a 4-neighbour move")]
    NotAdjacent {
        agent: AgentId,
        step: usize,
        from: Vertex,
        to: Vertex,
    },
    #[error("agent id {0} appears more than once")]
    DuplicateAgent(AgentId),
    #[error("agent ids must be contiguous from 0; id {0} is missing")]
    MissingAgent(AgentId),
}

#[derive(Serialize, Deserialize)]
struct PlanFile {
    map: String,
    agents: Vec<PlanAgent>,
}

#[derive(Serialize, Deserialize)]
struct PlanAgent {
    id: AgentId,
    path: Vec<[u32; 2]>,
}

impl Solution {
    /// Builds a solution from paths, checking bounds, traversability,
    /// adjacency and id uniqueness. Paths are reordered by agent id.
    pub fn new(
        map: GridMap,
        map_ref: impl Into<String>,
        mut paths: Vec<AgentPath>,
    ) -> Result<Self, PlanError> {
        paths.sort_by_key(|p| p.agent);
        for w in paths.windows(2) {
            if w[0].agent == w[1].agent {
                return Err(PlanError::DuplicateAgent(w[0].agent));
            }
        }
        for (expected, path) in paths.iter().enumerate() {
            if path.agent != expected as AgentId {
                return Err(PlanError::MissingAgent(expected as AgentId));
            }
            check_path(&map, path)?;
        }
        Ok(Self {
            map,
            map_ref: map_ref.into(),
            paths,
        })
    }

    /// Parses the canonical plan JSON against `map`.
    pub fn parse(text: &str, map: GridMap) -> Result<Self, PlanError> {
        let file: PlanFile = serde_json::from_str(text)?;
        let paths = file
            .agents
            .into_iter()
            .map(|a| AgentPath {
                agent: a.id,
                vertices: a.path.into_iter().map(|[x, y]| Vertex::new(x, y)).collect(),
            })
            .collect();
        Self::new(map, file.map, paths)
    }

    pub fn to_json(&self) -> String {
        let file = PlanFile {
            map: self.map_ref.clone(),
            agents: self
                .paths
                .iter()
                .map(|p| PlanAgent {
                    id: p.agent,
                    path: p.vertices.iter().map(|v| [v.x, v.y]).collect(),
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("plan serialization is infallible")
    }

    pub fn n_agents(&self) -> usize {
        self.paths.len()
    }

    /// Length of the longest path, in vertices.
    pub fn horizon(&self) -> usize {
        self.paths.iter().map(|p| p.vertices.len()).max().unwrap_or(0)
    }
}

fn check_path(map: &GridMap, path: &AgentPath) -> Result<(), PlanError> {
    let agent = path.agent;
    if path.vertices.is_empty() {
        return Err(PlanError::EmptyPath { agent });
    }
    for (step, &vertex) in path.vertices.iter().enumerate() {
        if !map.contains(vertex) {
            return Err(PlanError::OutOfBounds {
                agent,
                step,
                vertex,
            });
        }
        if !map.is_traversable(vertex) {
            return Err(PlanError::Blocked {
                agent,
                step,
                vertex,
            });
        }
    }
    for (step, w) in path.vertices.windows(2).enumerate() {
        if w[0] != w[1] && !w[0].is_adjacent(w[1]) {
            return Err(PlanError::NotAdjacent {
                agent,
                step,
                from: w[0],
                to: w[1],
            });
        }
    }
    Ok(())
}
