//! Actions derived from vertex paths.

use serde::{Deserialize, Serialize};

use super::grid::Vertex;
use super::plan::{AgentId, Solution};

/// One step of one agent: leave `s` at step `t` and arrive at `g` at `t + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Action {
    pub s: Vertex,
    pub g: Vertex,
    pub t: u32,
    pub agent: AgentId,
    /// Position in the agent's original (wait-inclusive) action list.
    pub seq: u32,
}

impl Action {
    pub fn is_wait(&self) -> bool {
        self.s == self.g
    }

    pub fn is_move(&self) -> bool {
        self.s != self.g
    }

    pub fn key(&self) -> ActionKey {
        ActionKey {
            agent: self.agent,
            t: self.t,
        }
    }
}

/// The identity of an action across graphs built from the same plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionKey {
    pub agent: AgentId,
    pub t: u32,
}

/// Actions grouped per agent (index = agent id), each group ordered by `seq`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActionSet {
    per_agent: Vec<Vec<Action>>,
}

impl ActionSet {
    pub fn new(per_agent: Vec<Vec<Action>>) -> Self {
        debug_assert!(per_agent.iter().enumerate().all(|(i, acts)| {
            acts.iter().all(|a| a.agent as usize == i)
                && acts.windows(2).all(|w| w[0].seq < w[1].seq && w[0].t < w[1].t)
        }));
        Self { per_agent }
    }

    pub fn agents(&self) -> &[Vec<Action>] {
        &self.per_agent
    }

    pub fn n_agents(&self) -> usize {
        self.per_agent.len()
    }

    pub fn len(&self) -> usize {
        self.per_agent.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Action> {
        self.per_agent.iter().flatten()
    }

    pub fn n_waits(&self) -> usize {
        self.iter().filter(|a| a.is_wait()).count()
    }
}

/// Turns each path of length `L` into `L - 1` actions with `t == seq == i`.
pub fn derive_actions(sol: &Solution) -> ActionSet {
    let per_agent = sol
        .paths
        .iter()
        .map(|p| {
            p.vertices
                .windows(2)
                .enumerate()
                .map(|(i, w)| Action {
                    s: w[0],
                    g: w[1],
                    t: i as u32,
                    agent: p.agent,
                    seq: i as u32,
                })
                .collect()
        })
        .collect();
    ActionSet::new(per_agent)
}
