//! Reachability over an ADG, meant for oracle-scale graphs.

use fixedbitset::FixedBitSet;

use super::graph::{Adg, Edge, NodeId};
use super::AdgError;

/// `reachable(i, j)` holds iff a non-empty directed path `i -> .. -> j`
/// exists. On an acyclic graph no node reaches itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureMatrix {
    rows: Vec<FixedBitSet>,
}

impl ClosureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn reachable(&self, from: NodeId, to: NodeId) -> bool {
        self.rows[from as usize].contains(to as usize)
    }

    pub fn row(&self, from: NodeId) -> &FixedBitSet {
        &self.rows[from as usize]
    }

    /// Number of reachable ordered pairs.
    pub fn count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }
}

/// Bitset rows filled in reverse topological order: each node's row is the
/// union of its successors' rows plus the successors themselves.
pub fn transitive_closure(adg: &Adg) -> Result<ClosureMatrix, AdgError> {
    let order = adg.topological_order()?;
    let n = adg.len();
    let mut rows = vec![FixedBitSet::with_capacity(n); n];
    for &u in order.iter().rev() {
        let mut row = FixedBitSet::with_capacity(n);
        for &(v, _) in adg.successors(u) {
            row.insert(v as usize);
            row.union_with(&rows[v as usize]);
        }
        rows[u as usize] = row;
    }
    Ok(ClosureMatrix { rows })
}

/// An edge is redundant when its head stays reachable from its tail after
/// removing exactly that edge.
pub fn is_edge_redundant(adg: &Adg, edge: Edge) -> Result<bool, AdgError> {
    if !adg.contains_edge(edge) {
        return Err(AdgError::MissingEdge(edge));
    }
    if let Some(cycle) = adg.detect_cycle() {
        return Err(AdgError::Cycle(cycle));
    }
    let mut seen = FixedBitSet::with_capacity(adg.len());
    let mut stack = vec![edge.from];
    seen.insert(edge.from as usize);
    while let Some(u) = stack.pop() {
        for &(v, kind) in adg.successors(u) {
            if u == edge.from && v == edge.to && kind == edge.kind {
                continue;
            }
            if v == edge.to {
                return Ok(true);
            }
            if !seen.put(v as usize) {
                stack.push(v);
            }
        }
    }
    Ok(false)
}
