//! Executable checks of the ADG construction guarantees.
//!
//! Graphs built from the same plan are compared through their transitive
//! closures over the nodes they share, identified by `(agent, t)`. Every
//! failing report carries a witness pair that is minimal: no shared node
//! lies between its endpoints in the graph that orders them.

use serde::Serialize;
use thiserror::Error;

use crate::adg::{transitive_closure, Adg, AdgError, ClosureMatrix, DependencyType, Edge, NodeId};
use crate::construction::{build, Algorithm, BuildOptions};
use crate::model::{derive_actions, ActionKey, Solution};

pub const DEFAULT_ORACLE_CAP: usize = 5_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest graph (in nodes) the closure-based checks accept.
    pub max_nodes: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_nodes: DEFAULT_ORACLE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("graph has {nodes} nodes, above the oracle cap of {cap}")]
    OverCap { nodes: usize, cap: usize },
    #[error("graphs do not share the same node set ({only_a} nodes only in the first, {only_b} only in the second)")]
    NodeSetMismatch { only_a: usize, only_b: usize },
    #[error(transparent)]
    Graph(#[from] AdgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// A pair of actions whose reachability differs between two graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub instance: String,
    pub from: ActionKey,
    pub to: ActionKey,
    pub reachable_in_a: bool,
    pub reachable_in_b: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub instances_checked: usize,
    pub mismatches: Vec<Mismatch>,
    pub status: Status,
}

impl EquivalenceReport {
    pub fn empty() -> Self {
        Self {
            instances_checked: 0,
            mismatches: Vec::new(),
            status: Status::Pass,
        }
    }

    fn single(mismatch: Option<Mismatch>) -> Self {
        let mismatches: Vec<Mismatch> = mismatch.into_iter().collect();
        Self {
            instances_checked: 1,
            status: if mismatches.is_empty() { Status::Pass } else { Status::Fail },
            mismatches,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Tags every mismatch with an instance id (typically the seed).
    pub fn with_instance(mut self, instance: impl Into<String>) -> Self {
        let instance = instance.into();
        for m in &mut self.mismatches {
            m.instance = instance.clone();
        }
        self
    }

    pub fn merge(&mut self, other: EquivalenceReport) {
        self.instances_checked += other.instances_checked;
        self.mismatches.extend(other.mismatches);
        if !self.mismatches.is_empty() {
            self.status = Status::Fail;
        }
    }
}

fn check_cap(adg: &Adg, cfg: &OracleConfig) -> Result<(), ValidationError> {
    if adg.len() > cfg.max_nodes {
        return Err(ValidationError::OverCap {
            nodes: adg.len(),
            cap: cfg.max_nodes,
        });
    }
    Ok(())
}

/// Compares the closures of two graphs over their shared nodes.
///
/// With `restrict_to_moves` only move actions are compared and both graphs
/// must contain the same moves; otherwise both node sets must be equal.
pub fn check_closure_equivalence(
    adg_a: &Adg,
    adg_b: &Adg,
    restrict_to_moves: bool,
    cfg: &OracleConfig,
) -> Result<EquivalenceReport, ValidationError> {
    check_cap(adg_a, cfg)?;
    check_cap(adg_b, cfg)?;

    let keys = |adg: &Adg| -> Vec<ActionKey> {
        let mut k: Vec<ActionKey> = adg
            .nodes()
            .iter()
            .filter(|a| !restrict_to_moves || a.is_move())
            .map(|a| a.key())
            .collect();
        k.sort_unstable();
        k
    };
    let (keys_a, keys_b) = (keys(adg_a), keys(adg_b));
    if keys_a != keys_b {
        let only_a = keys_a.iter().filter(|k| keys_b.binary_search(k).is_err()).count();
        let only_b = keys_b.iter().filter(|k| keys_a.binary_search(k).is_err()).count();
        return Err(ValidationError::NodeSetMismatch { only_a, only_b });
    }

    let ca = transitive_closure(adg_a)?;
    let cb = transitive_closure(adg_b)?;
    let ids_a: Vec<NodeId> = keys_a.iter().map(|&k| adg_a.node_id(k).unwrap()).collect();
    let ids_b: Vec<NodeId> = keys_a.iter().map(|&k| adg_b.node_id(k).unwrap()).collect();

    let view = SharedView {
        ca: &ca,
        cb: &cb,
        ids_a: &ids_a,
        ids_b: &ids_b,
    };
    let witness = view.first_difference().map(|(p, q)| {
        let (p, q) = view.minimize(p, q);
        Mismatch {
            instance: String::new(),
            from: keys_a[p],
            to: keys_a[q],
            reachable_in_a: view.a(p, q),
            reachable_in_b: view.b(p, q),
        }
    });
    Ok(EquivalenceReport::single(witness))
}

/// Closures of two graphs indexed by position in the shared key list.
struct SharedView<'a> {
    ca: &'a ClosureMatrix,
    cb: &'a ClosureMatrix,
    ids_a: &'a [NodeId],
    ids_b: &'a [NodeId],
}

impl SharedView<'_> {
    fn a(&self, p: usize, q: usize) -> bool {
        self.ca.reachable(self.ids_a[p], self.ids_a[q])
    }

    fn b(&self, p: usize, q: usize) -> bool {
        self.cb.reachable(self.ids_b[p], self.ids_b[q])
    }

    fn first_difference(&self) -> Option<(usize, usize)> {
        let m = self.ids_a.len();
        (0..m)
            .flat_map(|p| (0..m).map(move |q| (p, q)))
            .find(|&(p, q)| self.a(p, q) != self.b(p, q))
    }

    /// Shrinks a differing pair until no shared node sits between its ends
    /// in the graph that reaches. If `k` sits between `p` and `q` there,
    /// one of `(p, k)`, `(k, q)` must also differ, so the loop terminates on
    /// a pair that is a direct edge of that graph when the graphs share all
    /// nodes.
    fn minimize(&self, mut p: usize, mut q: usize) -> (usize, usize) {
        let in_a = self.a(p, q);
        let reach = |x: usize, y: usize| if in_a { self.a(x, y) } else { self.b(x, y) };
        let other = |x: usize, y: usize| if in_a { self.b(x, y) } else { self.a(x, y) };
        loop {
            let between = (0..self.ids_a.len()).find(|&k| k != p && k != q && reach(p, k) && reach(k, q));
            match between {
                None => return (p, q),
                Some(k) if !other(p, k) => q = k,
                Some(k) => p = k,
            }
        }
    }
}

/// Compares the exhaustive graph with and without wait actions over the
/// move actions they share.
pub fn check_wait_redundancy(sol: &Solution, cfg: &OracleConfig) -> Result<EquivalenceReport, ValidationError> {
    let actions = derive_actions(sol);
    let with_waits = build(&actions, &BuildOptions::original());
    let without = build(&actions, &BuildOptions::new(Algorithm::Exhaustive));
    check_closure_equivalence(&with_waits, &without, true, cfg)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RedundancyReport {
    pub count: usize,
    pub witnesses: Vec<Edge>,
}

/// Finds every type-2 edge `u -> v` for which `v` is still reachable from
/// `u` through another successor of `u`.
pub fn count_redundant_type2(adg: &Adg, cfg: &OracleConfig) -> Result<RedundancyReport, ValidationError> {
    check_cap(adg, cfg)?;
    let closure = transitive_closure(adg)?;
    let witnesses: Vec<Edge> = adg
        .type2_edges()
        .into_iter()
        .filter(|e| {
            adg.successors(e.from).iter().any(|&(w, kind)| {
                (w, kind) != (e.to, e.kind) && (w == e.to || closure.reachable(w, e.to))
            })
        })
        .collect();
    Ok(RedundancyReport {
        count: witnesses.len(),
        witnesses,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct DependencyStats {
    pub n_actions: usize,
    pub n_type1: usize,
    pub n_type2: usize,
    pub max_type2_in_degree: usize,
    /// `None` when the graph is cyclic or above the oracle cap.
    pub n_redundant_type2: Option<usize>,
}

pub fn collect_stats(adg: &Adg) -> DependencyStats {
    collect_stats_with(adg, &OracleConfig::default())
}

pub fn collect_stats_with(adg: &Adg, cfg: &OracleConfig) -> DependencyStats {
    let max_type2_in_degree = (0..adg.len() as NodeId)
        .map(|n| {
            adg.predecessors(n)
                .iter()
                .filter(|(_, k)| *k == DependencyType::Type2)
                .count()
        })
        .max()
        .unwrap_or(0);
    DependencyStats {
        n_actions: adg.len(),
        n_type1: adg.count_edges(DependencyType::Type1),
        n_type2: adg.count_edges(DependencyType::Type2),
        max_type2_in_degree,
        n_redundant_type2: count_redundant_type2(adg, cfg).ok().map(|r| r.count),
    }
}

/// Type-2 edges present in one graph but not the other, by action key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeSetReport {
    pub equal: bool,
    pub only_in_a: Vec<(ActionKey, ActionKey)>,
    pub only_in_b: Vec<(ActionKey, ActionKey)>,
}

pub fn compare_type2_edges(adg_a: &Adg, adg_b: &Adg) -> EdgeSetReport {
    let keyed = |adg: &Adg| -> Vec<(ActionKey, ActionKey)> {
        let mut v: Vec<_> = adg
            .type2_edges()
            .iter()
            .map(|e| (adg.node(e.from).key(), adg.node(e.to).key()))
            .collect();
        v.sort_unstable();
        v
    };
    let (a, b) = (keyed(adg_a), keyed(adg_b));
    let only_in_a: Vec<_> = a.iter().filter(|e| b.binary_search(e).is_err()).copied().collect();
    let only_in_b: Vec<_> = b.iter().filter(|e| a.binary_search(e).is_err()).copied().collect();
    EdgeSetReport {
        equal: only_in_a.is_empty() && only_in_b.is_empty(),
        only_in_a,
        only_in_b,
    }
}

/// Every construction check on one plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    pub instance: String,
    pub n_actions: usize,
    pub n_moves: usize,
    pub wait_redundancy: EquivalenceReport,
    pub cp_vs_exhaustive: EdgeSetReport,
    pub scp_vs_cp: EquivalenceReport,
    pub scp_max_type2_in_degree: usize,
    pub scp_n_type2: usize,
    pub cp_n_type2: usize,
    /// Type-2 edges of the SCP graph that are implied by other paths.
    pub scp_redundant: RedundancyReport,
    pub status: Status,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Runs wait redundancy, CP-vs-exhaustive edge identity and SCP-vs-CP
/// closure equivalence on one plan. SCP redundancy is reported but does not
/// affect the status.
pub fn validate_instance(
    sol: &Solution,
    instance: impl Into<String>,
    cfg: &OracleConfig,
) -> Result<InstanceReport, ValidationError> {
    let instance = instance.into();
    let actions = derive_actions(sol);
    let original = build(&actions, &BuildOptions::original());
    check_cap(&original, cfg)?;

    let exhaustive = build(&actions, &BuildOptions::new(Algorithm::Exhaustive));
    let cp = build(&actions, &BuildOptions::new(Algorithm::Cp));
    let scp = build(&actions, &BuildOptions::new(Algorithm::Scp));

    let wait_redundancy = check_closure_equivalence(&original, &exhaustive, true, cfg)?.with_instance(&instance);
    let cp_vs_exhaustive = compare_type2_edges(&cp, &exhaustive);
    let scp_vs_cp = check_closure_equivalence(&scp, &cp, false, cfg)?.with_instance(&instance);
    let scp_stats = collect_stats_with(&scp, &OracleConfig { max_nodes: 0 });
    let scp_redundant = count_redundant_type2(&scp, cfg)?;

    let ok = wait_redundancy.passed() && cp_vs_exhaustive.equal && scp_vs_cp.passed();
    Ok(InstanceReport {
        instance,
        n_actions: actions.len(),
        n_moves: exhaustive.len(),
        wait_redundancy,
        cp_vs_exhaustive,
        scp_vs_cp,
        scp_max_type2_in_degree: scp_stats.max_type2_in_degree,
        scp_n_type2: scp_stats.n_type2,
        cp_n_type2: cp.count_edges(DependencyType::Type2),
        scp_redundant,
        status: if ok { Status::Pass } else { Status::Fail },
    })
}
