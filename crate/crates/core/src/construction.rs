//! ADG builders.
//!
//! All three builders link each agent's actions with type-1 edges and then
//! add a type-2 edge `c -> a` for actions `c`, `a` of different agents where
//! `c` leaves the cell `a` enters (`c.s == a.g`) no later than `a` starts
//! (`c.t <= a.t`):
//!
//! * [`build_exhaustive`] tests every ordered pair, `O(n^2)`.
//! * [`build_cp`] only tests actions bucketed under `a.g` in a
//!   [`CandidateIndex`]; it yields exactly the exhaustive edge set.
//! * [`build_scp`] keeps only the latest such candidate per action, found by
//!   binary search in a time-sorted bucket, `O(n log n)`. Its edge set is a
//!   subset of CP's with the same transitive closure on valid plans.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adg::{Adg, DependencyType, Edge, NodeId};
use crate::model::{Action, ActionSet, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Exhaustive,
    Cp,
    Scp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Exhaustive, Algorithm::Cp, Algorithm::Scp];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Exhaustive => "exhaustive",
            Algorithm::Cp => "cp",
            Algorithm::Scp => "scp",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exhaustive" => Ok(Algorithm::Exhaustive),
            "cp" => Ok(Algorithm::Cp),
            "scp" => Ok(Algorithm::Scp),
            other => Err(format!("unknown algorithm `{other}` (expected exhaustive, cp or scp)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub algorithm: Algorithm,
    /// Drop wait actions before building. On by default for every algorithm;
    /// the exhaustive builder with waits kept is the original construction.
    pub remove_waits: bool,
}

impl BuildOptions {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            remove_waits: true,
        }
    }

    /// The exhaustive builder over the full action set, waits included.
    pub fn original() -> Self {
        Self {
            algorithm: Algorithm::Exhaustive,
            remove_waits: false,
        }
    }

    pub fn keep_waits(mut self) -> Self {
        self.remove_waits = false;
        self
    }
}

/// Drops every action with `s == g`, keeping order and original `t`/`seq`.
pub fn remove_wait_actions(actions: &ActionSet) -> ActionSet {
    ActionSet::new(
        actions
            .agents()
            .iter()
            .map(|group| group.iter().copied().filter(|a| a.is_move()).collect())
            .collect(),
    )
}

pub fn build(actions: &ActionSet, opts: &BuildOptions) -> Adg {
    match opts.algorithm {
        Algorithm::Exhaustive => build_exhaustive(actions, opts),
        Algorithm::Cp => build_cp(actions, opts),
        Algorithm::Scp => build_scp(actions, opts),
    }
}

fn prepare(actions: &ActionSet, opts: &BuildOptions) -> Adg {
    let mut adg = if opts.remove_waits {
        Adg::from_actions_where(actions, Action::is_move)
    } else {
        Adg::from_actions(actions)
    };
    adg.add_type1_edges();
    adg
}

fn add_type2(adg: &mut Adg, from: NodeId, to: NodeId) {
    adg.push_edge(Edge {
        from,
        to,
        kind: DependencyType::Type2,
    });
}

/// Pairwise scan over all actions. May produce cycles on invalid plans; run
/// [`Adg::detect_cycle`] on the result.
pub fn build_exhaustive(actions: &ActionSet, opts: &BuildOptions) -> Adg {
    let mut adg = prepare(actions, opts);
    let nodes = adg.nodes().to_vec();
    for (i, ai) in nodes.iter().enumerate() {
        for (j, aj) in nodes.iter().enumerate() {
            if ai.agent == aj.agent {
                continue;
            }
            if aj.s == ai.g && aj.t <= ai.t {
                add_type2(&mut adg, j as NodeId, i as NodeId);
            }
        }
    }
    adg
}

/// Candidate partitioning: the same edges as [`build_exhaustive`], found by
/// looking only at actions that start where each action ends.
pub fn build_cp(actions: &ActionSet, opts: &BuildOptions) -> Adg {
    let mut adg = prepare(actions, opts);
    let index = CandidateIndex::new(&adg);
    for i in 0..adg.len() as NodeId {
        let ai = *adg.node(i);
        for &c in index.candidates(ai.g) {
            let ac = adg.node(c);
            if ac.agent != ai.agent && ac.t <= ai.t {
                add_type2(&mut adg, c, i);
            }
        }
    }
    adg
}

/// Sparse candidate partitioning: at most one incoming type-2 edge per
/// action, from the latest candidate with `t <= a.t`. When that candidate is
/// the action's own agent no type-2 edge is added; the type-1 chain already
/// orders them.
pub fn build_scp(actions: &ActionSet, opts: &BuildOptions) -> Adg {
    let mut adg = prepare(actions, opts);
    let index = CandidateIndex::time_sorted(&adg);
    for i in 0..adg.len() as NodeId {
        let ai = *adg.node(i);
        let Some(c) = index.latest_at_or_before(ai.g, ai.t) else {
            continue;
        };
        if adg.node(c).agent == ai.agent {
            continue;
        }
        add_type2(&mut adg, c, i);
    }
    adg
}

/// Nodes bucketed by start vertex in a dense array over the bounding box of
/// all vertices the graph mentions. Buckets are stored back to back, with
/// each node's start time alongside its id.
#[derive(Debug, Clone)]
pub struct CandidateIndex {
    width: u32,
    height: u32,
    /// Bucket `k` is `ids[offsets[k]..offsets[k + 1]]`.
    offsets: Vec<usize>,
    ids: Vec<NodeId>,
    times: Vec<u32>,
    sorted: bool,
}

impl CandidateIndex {
    /// Buckets hold node ids in increasing id order.
    pub fn new(adg: &Adg) -> Self {
        Self::bucketed(adg, 0..adg.len() as NodeId, false)
    }

    /// Like [`CandidateIndex::new`] but with every bucket already in start
    /// time order.
    pub fn time_sorted(adg: &Adg) -> Self {
        let nodes = adg.nodes();
        let horizon = nodes.iter().map(|a| a.t as usize + 1).max().unwrap_or(0);
        let mut offsets = vec![0usize; horizon + 1];
        for a in nodes {
            offsets[a.t as usize + 1] += 1;
        }
        for k in 1..offsets.len() {
            offsets[k] += offsets[k - 1];
        }
        let mut by_time = vec![0 as NodeId; nodes.len()];
        for (id, a) in nodes.iter().enumerate() {
            let slot = &mut offsets[a.t as usize];
            by_time[*slot] = id as NodeId;
            *slot += 1;
        }
        Self::bucketed(adg, by_time.into_iter(), true)
    }

    /// Stable scatter of `order` into buckets by start vertex.
    fn bucketed(adg: &Adg, order: impl Iterator<Item = NodeId>, sorted: bool) -> Self {
        let (mut width, mut height) = (0, 0);
        for a in adg.nodes() {
            width = width.max(a.s.x.max(a.g.x) + 1);
            height = height.max(a.s.y.max(a.g.y) + 1);
        }
        let cell = |v: Vertex| (v.y * width + v.x) as usize;
        let mut offsets = vec![0usize; (width as usize) * (height as usize) + 1];
        for a in adg.nodes() {
            offsets[cell(a.s) + 1] += 1;
        }
        for k in 1..offsets.len() {
            offsets[k] += offsets[k - 1];
        }
        let mut fill = offsets.clone();
        let mut ids = vec![0 as NodeId; adg.len()];
        let mut times = vec![0u32; adg.len()];
        for id in order {
            let a = adg.node(id);
            let slot = &mut fill[cell(a.s)];
            ids[*slot] = id;
            times[*slot] = a.t;
            *slot += 1;
        }
        let index = Self {
            width,
            height,
            offsets,
            ids,
            times,
            sorted,
        };
        debug_assert!(
            !sorted || index.times.windows(2).zip(index.ids.windows(2)).all(|(t, i)| {
                adg.node(i[0]).s != adg.node(i[1]).s || t[0] < t[1]
            }),
            "two actions leave the same vertex at the same step"
        );
        index
    }

    /// Reorders each bucket by start time. On a collision-free plan no two
    /// actions share a start vertex and time, so the order is strict.
    pub fn sort_by_time(&mut self, adg: &Adg) {
        if !self.sorted {
            *self = Self::time_sorted(adg);
        }
    }

    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    fn range(&self, v: Vertex) -> std::ops::Range<usize> {
        if v.x >= self.width || v.y >= self.height {
            return 0..0;
        }
        let k = (v.y * self.width + v.x) as usize;
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn candidates(&self, v: Vertex) -> &[NodeId] {
        &self.ids[self.range(v)]
    }

    /// The candidate leaving `v` with the largest `t <= at`. Requires a
    /// sorted index.
    pub fn latest_at_or_before(&self, v: Vertex, at: u32) -> Option<NodeId> {
        assert!(self.sorted, "latest_at_or_before needs a time-sorted index");
        let range = self.range(v);
        let k = self.times[range.clone()].partition_point(|&t| t <= at);
        k.checked_sub(1).map(|k| self.ids[range.start + k])
    }

    pub fn n_buckets(&self) -> usize {
        self.offsets.windows(2).filter(|w| w[1] > w[0]).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_actions, Action, AgentPath, GridMap, Solution};

    fn v(x: u32, y: u32) -> Vertex {
        Vertex::new(x, y)
    }

    fn solution(width: u32, height: u32, paths: Vec<Vec<Vertex>>) -> Solution {
        let paths = paths
            .into_iter()
            .enumerate()
            .map(|(i, vertices)| AgentPath { agent: i as u32, vertices })
            .collect();
        Solution::new(GridMap::open(width, height), "t", paths).unwrap()
    }

    /// R0: v1 -> v2 -> v3, R1: v0 -> v1 -> v2 on a 4x1 corridor.
    fn follow_instance() -> Solution {
        solution(4, 1, vec![vec![v(1, 0), v(2, 0), v(3, 0)], vec![v(0, 0), v(1, 0), v(2, 0)]])
    }

    fn type2_pairs(adg: &Adg) -> Vec<(u32, u32)> {
        adg.type2_edges().iter().map(|e| (e.from, e.to)).collect()
    }

    #[test]
    fn wait_removal() {
        let sol = solution(4, 1, vec![vec![v(0, 0), v(1, 0), v(1, 0), v(2, 0)]]);
        let moves = remove_wait_actions(&derive_actions(&sol));
        let ts: Vec<u32> = moves.iter().map(|a| a.t).collect();
        assert_eq!(ts, vec![0, 2]);

        let idle = solution(4, 1, vec![vec![v(0, 0), v(0, 0), v(0, 0)]]);
        assert!(remove_wait_actions(&derive_actions(&idle)).is_empty());
    }

    #[test]
    fn type1_links_moves_across_removed_wait() {
        let sol = solution(4, 1, vec![vec![v(0, 0), v(1, 0), v(1, 0), v(2, 0)]]);
        let adg = build(&derive_actions(&sol), &BuildOptions::new(Algorithm::Scp));
        assert_eq!(adg.len(), 2);
        assert_eq!(
            adg.edges(),
            [Edge { from: 0, to: 1, kind: DependencyType::Type1 }]
        );
        assert_eq!((adg.node(0).t, adg.node(1).t), (0, 2));
    }

    #[test]
    fn follow_instance_hand_trace() {
        // Nodes: 0 = R0@0, 1 = R0@1, 2 = R1@0, 3 = R1@1.
        let actions = derive_actions(&follow_instance());
        for algo in Algorithm::ALL {
            let adg = build(&actions, &BuildOptions::new(algo));
            assert_eq!(type2_pairs(&adg), vec![(0, 2), (1, 3)], "{algo}");
            assert_eq!(adg.count_edges(DependencyType::Type1), 2);
        }
    }

    #[test]
    fn single_agent_has_no_type2() {
        let sol = solution(4, 1, vec![vec![v(0, 0), v(1, 0), v(2, 0), v(1, 0)]]);
        for algo in Algorithm::ALL {
            let adg = build(&derive_actions(&sol), &BuildOptions::new(algo).keep_waits());
            assert!(adg.type2_edges().is_empty());
        }
    }

    #[test]
    fn swap_produces_mutual_edges() {
        let sol = solution(2, 1, vec![vec![v(0, 0), v(1, 0)], vec![v(1, 0), v(0, 0)]]);
        let adg = build_exhaustive(&derive_actions(&sol), &BuildOptions::original());
        assert_eq!(type2_pairs(&adg), vec![(0, 1), (1, 0)]);
        assert_eq!(adg.detect_cycle(), Some(vec![0, 1]));
    }

    #[test]
    fn distinct_vertices_give_empty_buckets() {
        let sol = solution(3, 2, vec![vec![v(0, 0), v(1, 0)], vec![v(0, 1), v(1, 1)]]);
        let adg = build_cp(&derive_actions(&sol), &BuildOptions::new(Algorithm::Cp));
        assert!(adg.type2_edges().is_empty());
        let index = CandidateIndex::new(&adg);
        assert!(index.candidates(v(1, 0)).is_empty());
        assert!(index.candidates(v(1, 1)).is_empty());
    }

    #[test]
    fn scp_picks_rightmost_candidate() {
        // Three visitors leave (0,0) at t = 1, 3, 5; the target enters it at t = 4.
        let a = |agent, t, s: Vertex, g: Vertex| Action { s, g, t, agent, seq: t };
        let per_agent = vec![
            vec![a(0, 1, v(0, 0), v(1, 0))],
            vec![a(1, 3, v(0, 0), v(0, 1))],
            vec![a(2, 5, v(0, 0), v(1, 0))],
            vec![a(3, 4, v(1, 1), v(0, 1)), a(3, 6, v(0, 1), v(0, 0))],
        ];
        let actions = ActionSet::new(per_agent);
        let adg = build_scp(&actions, &BuildOptions::new(Algorithm::Scp));
        let target = adg.node_id(crate::model::ActionKey { agent: 3, t: 6 }).unwrap();
        let into_target: Vec<NodeId> = adg
            .predecessors(target)
            .iter()
            .filter(|(_, k)| *k == DependencyType::Type2)
            .map(|&(n, _)| n)
            .collect();
        // Candidates at t = 1, 3, 5 for a.t = 6: latest is t = 5 (agent 2).
        assert_eq!(into_target, vec![adg.node_id(crate::model::ActionKey { agent: 2, t: 5 }).unwrap()]);

        let mut index = CandidateIndex::new(&adg);
        index.sort_by_time(&adg);
        let hit = index.latest_at_or_before(v(0, 0), 4).unwrap();
        assert_eq!(adg.node(hit).t, 3);
        assert_eq!(index.latest_at_or_before(v(0, 0), 0), None);
        assert_eq!(index.latest_at_or_before(v(3, 3), 9), None);
    }

    #[test]
    fn scp_skips_own_agent_candidate() {
        // R0 loops back into (1,0) at t=3; the only action leaving (1,0) is its own.
        let sol = solution(3, 2, vec![
            vec![v(1, 0), v(2, 0), v(2, 1), v(1, 1), v(1, 0)],
            vec![v(0, 1), v(0, 1), v(0, 1), v(0, 1), v(0, 1)],
        ]);
        let adg = build_scp(&derive_actions(&sol), &BuildOptions::new(Algorithm::Scp));
        assert!(adg.type2_edges().is_empty());
    }

    #[test]
    fn algorithm_parsing() {
        assert_eq!("SCP".parse::<Algorithm>().unwrap(), Algorithm::Scp);
        assert!("fast".parse::<Algorithm>().is_err());
    }
}
