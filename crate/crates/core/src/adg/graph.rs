use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::AdgError;
use crate::model::{Action, ActionKey, ActionSet, AgentId};

pub type NodeId = u32;

/// Most nodes have one type-1 and at most a couple of type-2 neighbours.
type Adjacency = SmallVec<[(NodeId, DependencyType); 2]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DependencyType {
    /// Consecutive actions of one agent.
    Type1,
    /// An action of one agent waiting on an action of another.
    Type2,
}

impl DependencyType {
    pub fn tag(self) -> &'static str {
        match self {
            DependencyType::Type1 => "1",
            DependencyType::Type2 => "2",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "1" => Some(DependencyType::Type1),
            "2" => Some(DependencyType::Type2),
            _ => None,
        }
    }
}

impl fmt::Display for DependencyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type{}", self.tag())
    }
}

/// `to` may only start once `from` has completed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub kind: DependencyType,
}

/// An action dependency graph.
///
/// Node ids are dense and assigned agent-major, then by time, so the nodes
/// of one agent occupy a contiguous id range. Edge insertion is idempotent.
/// Cyclic graphs can be represented; [`Adg::detect_cycle`] flags them.
#[derive(Debug, Clone, Default)]
pub struct Adg {
    nodes: Vec<Action>,
    agent_ranges: Vec<Range<usize>>,
    /// Edge counts by kind: `[type-1, type-2]`.
    n_edges: [usize; 2],
    succ: Vec<Adjacency>,
    pred: Vec<Adjacency>,
}

impl Adg {
    /// A graph with one node per action and no edges.
    pub fn from_actions(actions: &ActionSet) -> Self {
        Self::from_actions_where(actions, |_| true)
    }

    /// A graph over the actions accepted by `keep`, in their original order.
    pub fn from_actions_where(actions: &ActionSet, keep: impl Fn(&Action) -> bool) -> Self {
        let mut nodes = Vec::with_capacity(actions.len());
        let mut agent_ranges = Vec::with_capacity(actions.n_agents());
        for group in actions.agents() {
            let start = nodes.len();
            nodes.extend(group.iter().filter(|a| keep(a)).copied());
            agent_ranges.push(start..nodes.len());
        }
        let n = nodes.len();
        Self {
            nodes,
            agent_ranges,
            n_edges: [0, 0],
            succ: vec![Adjacency::new(); n],
            pred: vec![Adjacency::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_agents(&self) -> usize {
        self.agent_ranges.len()
    }

    pub fn nodes(&self) -> &[Action] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Action {
        &self.nodes[id as usize]
    }

    pub fn node_id(&self, key: ActionKey) -> Option<NodeId> {
        let range = self.agent_ranges.get(key.agent as usize)?;
        let slice = &self.nodes[range.clone()];
        let k = slice.binary_search_by_key(&key.t, |a| a.t).ok()?;
        Some((range.start + k) as NodeId)
    }

    /// Node ids of one agent, in execution order.
    pub fn agent_nodes(&self, agent: AgentId) -> Range<NodeId> {
        let r = &self.agent_ranges[agent as usize];
        r.start as NodeId..r.end as NodeId
    }

    /// The node executed by the same agent right after `id`, if any.
    pub fn next_of_agent(&self, id: NodeId) -> Option<NodeId> {
        let range = self.agent_nodes(self.node(id).agent);
        (id + 1 < range.end).then_some(id + 1)
    }

    /// All edges, sorted by `(from, to, kind)`.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.n_edges[0] + self.n_edges[1]);
        for (from, succ) in self.succ.iter().enumerate() {
            let start = out.len();
            out.extend(succ.iter().map(|&(to, kind)| Edge {
                from: from as NodeId,
                to,
                kind,
            }));
            out[start..].sort_unstable();
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges[0] + self.n_edges[1]
    }

    pub fn successors(&self, id: NodeId) -> &[(NodeId, DependencyType)] {
        &self.succ[id as usize]
    }

    pub fn predecessors(&self, id: NodeId) -> &[(NodeId, DependencyType)] {
        &self.pred[id as usize]
    }

    pub fn contains_edge(&self, edge: Edge) -> bool {
        self.succ
            .get(edge.from as usize)
            .is_some_and(|out| out.contains(&(edge.to, edge.kind)))
    }

    pub fn count_edges(&self, kind: DependencyType) -> usize {
        self.n_edges[kind_slot(kind)]
    }

    /// Type-2 edges sorted by `(from, to)`.
    pub fn type2_edges(&self) -> Vec<Edge> {
        let mut out = self.edges();
        out.retain(|e| e.kind == DependencyType::Type2);
        out
    }

    /// Inserts an edge; returns `false` when it was already present.
    pub fn add_edge(&mut self, from: NodeId, to: NodeId, kind: DependencyType) -> Result<bool, AdgError> {
        let n = self.nodes.len() as NodeId;
        if from >= n || to >= n {
            return Err(AdgError::UnknownNode(from.max(to)));
        }
        if from == to {
            return Err(AdgError::SelfEdge(from));
        }
        let edge = Edge { from, to, kind };
        if self.contains_edge(edge) {
            return Ok(false);
        }
        self.push_edge(edge);
        Ok(true)
    }

    /// Appends an edge the caller knows is new and valid. Builders visit each
    /// ordered pair once, so they skip the duplicate scan.
    pub(crate) fn push_edge(&mut self, edge: Edge) {
        debug_assert!(edge.from != edge.to && !self.contains_edge(edge));
        self.n_edges[kind_slot(edge.kind)] += 1;
        self.succ[edge.from as usize].push((edge.to, edge.kind));
        self.pred[edge.to as usize].push((edge.from, edge.kind));
    }

    pub fn remove_edge(&mut self, edge: Edge) -> Result<(), AdgError> {
        if !self.contains_edge(edge) {
            return Err(AdgError::MissingEdge(edge));
        }
        self.n_edges[kind_slot(edge.kind)] -= 1;
        self.succ[edge.from as usize].retain(|&mut (n, k)| (n, k) != (edge.to, edge.kind));
        self.pred[edge.to as usize].retain(|&mut (n, k)| (n, k) != (edge.from, edge.kind));
        Ok(())
    }

    /// Links each agent's consecutive nodes with a type-1 edge.
    pub fn add_type1_edges(&mut self) {
        for agent in 0..self.n_agents() as AgentId {
            let range = self.agent_nodes(agent);
            for id in range.start..range.end.saturating_sub(1) {
                self.add_edge(id, id + 1, DependencyType::Type1)
                    .expect("chain endpoints are distinct in-range nodes");
            }
        }
    }

    /// Kahn's algorithm with a min-id ready set, so the order is deterministic.
    pub fn topological_order(&self) -> Result<Vec<NodeId>, AdgError> {
        let n = self.nodes.len();
        let mut indeg: Vec<usize> = self.pred.iter().map(|p| p.len()).collect();
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<NodeId>> = (0..n as NodeId)
            .filter(|&i| indeg[i as usize] == 0)
            .map(std::cmp::Reverse)
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(std::cmp::Reverse(u)) = ready.pop() {
            order.push(u);
            for &(v, _) in &self.succ[u as usize] {
                indeg[v as usize] -= 1;
                if indeg[v as usize] == 0 {
                    ready.push(std::cmp::Reverse(v));
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(AdgError::Cycle(
                self.detect_cycle().expect("Kahn left nodes unvisited, so a cycle exists"),
            ))
        }
    }

    /// Returns one directed cycle `[n0, n1, .., nk]` (with `nk -> n0` closing
    /// it), or `None` if the graph is acyclic. Nodes and successors are
    /// visited in id/insertion order, so the witness is deterministic.
    pub fn detect_cycle(&self) -> Option<Vec<NodeId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let n = self.nodes.len();
        let mut mark = vec![Mark::New; n];
        // (node, index of next successor to visit)
        let mut stack: Vec<(NodeId, usize)> = Vec::new();

        for root in 0..n as NodeId {
            if mark[root as usize] != Mark::New {
                continue;
            }
            mark[root as usize] = Mark::Active;
            stack.push((root, 0));
            while let Some(&mut (u, ref mut next)) = stack.last_mut() {
                let succ = &self.succ[u as usize];
                if *next == succ.len() {
                    mark[u as usize] = Mark::Done;
                    stack.pop();
                    continue;
                }
                let (v, _) = succ[*next];
                *next += 1;
                match mark[v as usize] {
                    Mark::New => {
                        mark[v as usize] = Mark::Active;
                        stack.push((v, 0));
                    }
                    Mark::Active => {
                        let pos = stack
                            .iter()
                            .position(|&(w, _)| w == v)
                            .expect("active nodes are on the stack");
                        return Some(stack[pos..].iter().map(|&(w, _)| w).collect());
                    }
                    Mark::Done => {}
                }
            }
        }
        None
    }

    pub fn is_acyclic(&self) -> bool {
        self.detect_cycle().is_none()
    }

    /// Builds a graph from explicit nodes and edges, as produced by an import.
    pub(crate) fn from_parts(
        per_agent: Vec<Vec<Action>>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, AdgError> {
        let mut adg = Self::from_actions(&ActionSet::new(per_agent));
        for e in edges {
            adg.add_edge(e.from, e.to, e.kind)?;
        }
        Ok(adg)
    }
}

fn kind_slot(kind: DependencyType) -> usize {
    match kind {
        DependencyType::Type1 => 0,
        DependencyType::Type2 => 1,
    }
}

/// Graphs compare equal when they have the same nodes and the same edge set,
/// regardless of insertion order.
impl PartialEq for Adg {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.n_edges == other.n_edges && self.edges() == other.edges()
    }
}

impl Eq for Adg {}
