//! Discrete-event execution of an ADG.
//!
//! Every action starts as soon as all of its predecessors have finished
//! (time 0 if it has none). Wait actions and moves that are not followed by
//! another move of the same agent take `step_duration`; a move whose agent's
//! next queued action is also a move takes `consecutive_move_duration`. The
//! "next queued action" is taken from the graph being simulated, so dropping
//! waits turns move-wait-move into two consecutive moves.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::adg::{Adg, AdgError, NodeId};
use crate::construction::{build, Algorithm, BuildOptions};
use crate::model::{derive_actions, AgentId, Solution};
use crate::scalar::{format_seconds, TimeScalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("timing model requires 0 < consecutive ({consecutive}) <= step ({step})")]
    InvalidModel { step: String, consecutive: String },
    #[error("duration {0} s cannot be represented by the time scalar")]
    Unrepresentable(f64),
    #[error(transparent)]
    Graph(#[from] AdgError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingModel<T> {
    pub step_duration: T,
    pub consecutive_move_duration: T,
}

impl<T: TimeScalar> TimingModel<T> {
    pub fn new(step_duration: T, consecutive_move_duration: T) -> Result<Self, SimError> {
        if !(consecutive_move_duration > T::zero() && consecutive_move_duration <= step_duration) {
            return Err(SimError::InvalidModel {
                step: format!("{step_duration:?}"),
                consecutive: format!("{consecutive_move_duration:?}"),
            });
        }
        Ok(Self {
            step_duration,
            consecutive_move_duration,
        })
    }

    pub fn from_seconds(step: f64, consecutive: f64) -> Result<Self, SimError> {
        let conv = |s: f64| T::from_seconds(s).ok_or(SimError::Unrepresentable(s));
        Self::new(conv(step)?, conv(consecutive)?)
    }

    /// 1 s per step, 0.8 s for a move followed by another move.
    pub fn standard() -> Self {
        Self::from_seconds(1.0, 0.8).expect("standard model is valid")
    }

    /// Duration of node `id` given its agent's next queued action.
    pub fn duration(&self, adg: &Adg, id: NodeId) -> T {
        let action = adg.node(id);
        let next_is_move = adg
            .next_of_agent(id)
            .is_some_and(|next| adg.node(next).is_move());
        if action.is_move() && next_is_move {
            self.consecutive_move_duration
        } else {
            self.step_duration
        }
    }
}

impl<T: TimeScalar> Default for TimingModel<T> {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry<T> {
    pub node: NodeId,
    pub agent: AgentId,
    pub t: u32,
    pub start: T,
    pub finish: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionTrace<T> {
    /// Indexed by node id.
    pub entries: Vec<TraceEntry<T>>,
    pub makespan: T,
}

impl<T: TimeScalar> ExecutionTrace<T> {
    /// `node,agent,t,start,finish` rows followed by a `# makespan=` line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,agent,t,start,finish\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                e.node,
                e.agent,
                e.t,
                format_seconds(e.start),
                format_seconds(e.finish)
            );
        }
        let _ = writeln!(out, "# makespan={}", format_seconds(self.makespan));
        out
    }

    /// One critical chain, first action to last. Starts from the
    /// latest-finishing action and walks back through the predecessor whose
    /// finish fixed each start time; ties go to the lowest node id.
    pub fn critical_path(&self, adg: &Adg) -> Vec<NodeId> {
        let Some(last) = self
            .entries
            .iter()
            .fold(None::<&TraceEntry<T>>, |best, e| match best {
                Some(b) if b.finish >= e.finish => Some(b),
                _ => Some(e),
            })
        else {
            return Vec::new();
        };
        let mut path = vec![last.node];
        let mut cur = last.node;
        loop {
            let start = self.entries[cur as usize].start;
            let binding = adg
                .predecessors(cur)
                .iter()
                .map(|&(p, _)| p)
                .filter(|&p| self.entries[p as usize].finish == start)
                .min();
            match binding {
                Some(p) => {
                    path.push(p);
                    cur = p;
                }
                None => break,
            }
        }
        path.reverse();
        path
    }

    /// True when the schedule has a critical chain made of moves only, i.e.
    /// some chain of back-to-back actions ending at the makespan contains no
    /// wait.
    pub fn has_wait_free_critical_path(&self, adg: &Adg) -> Result<bool, SimError> {
        let order = adg.topological_order()?;
        let mut wait_free = vec![false; adg.len()];
        for &n in &order {
            let e = &self.entries[n as usize];
            if adg.node(n).is_wait() {
                continue;
            }
            wait_free[n as usize] = e.start == T::zero()
                || adg
                    .predecessors(n)
                    .iter()
                    .any(|&(p, _)| wait_free[p as usize] && self.entries[p as usize].finish == e.start);
        }
        Ok(self
            .entries
            .iter()
            .any(|e| e.finish == self.makespan && wait_free[e.node as usize]))
    }
}

/// Heap entry ordered by `(time, node)`.
#[derive(Debug, Clone, Copy)]
struct Event<T>(T, NodeId);

impl<T: PartialOrd> PartialEq for Event<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: PartialOrd> Eq for Event<T> {}

impl<T: PartialOrd> PartialOrd for Event<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: PartialOrd> Ord for Event<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .partial_cmp(&other.0)
            .unwrap_or(Ordering::Equal)
            .then(self.1.cmp(&other.1))
    }
}

/// Runs the graph to completion under eager list scheduling.
pub fn simulate<T: TimeScalar>(adg: &Adg, model: &TimingModel<T>) -> Result<ExecutionTrace<T>, SimError> {
    if let Some(cycle) = adg.detect_cycle() {
        return Err(AdgError::Cycle(cycle).into());
    }
    let n = adg.len();
    let mut remaining: Vec<usize> = (0..n as NodeId).map(|id| adg.predecessors(id).len()).collect();
    let mut ready_at = vec![T::zero(); n];
    let mut entries: Vec<Option<TraceEntry<T>>> = vec![None; n];
    let mut queue = BinaryHeap::new();

    let start = |id: NodeId, at: T, entries: &mut Vec<Option<TraceEntry<T>>>, queue: &mut BinaryHeap<_>| {
        let a = adg.node(id);
        let finish = at + model.duration(adg, id);
        entries[id as usize] = Some(TraceEntry {
            node: id,
            agent: a.agent,
            t: a.t,
            start: at,
            finish,
        });
        queue.push(Reverse(Event(finish, id)));
    };

    for id in 0..n as NodeId {
        if remaining[id as usize] == 0 {
            start(id, T::zero(), &mut entries, &mut queue);
        }
    }

    let mut makespan = T::zero();
    while let Some(Reverse(Event(now, id))) = queue.pop() {
        makespan = makespan.max_of(now);
        for &(succ, _) in adg.successors(id) {
            let s = succ as usize;
            ready_at[s] = ready_at[s].max_of(now);
            remaining[s] -= 1;
            if remaining[s] == 0 {
                start(succ, ready_at[s], &mut entries, &mut queue);
            }
        }
    }

    Ok(ExecutionTrace {
        entries: entries
            .into_iter()
            .map(|e| e.expect("acyclic graphs schedule every node"))
            .collect(),
        makespan,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MakespanComparison<T> {
    pub with_waits: T,
    pub without_waits: T,
}

/// Simulates the exhaustive graph with waits and the SCP graph without.
pub fn compare_wait_removal<T: TimeScalar>(
    sol: &Solution,
    model: &TimingModel<T>,
) -> Result<MakespanComparison<T>, SimError> {
    let actions = derive_actions(sol);
    let with = build(&actions, &BuildOptions::original());
    let without = build(&actions, &BuildOptions::new(Algorithm::Scp));
    Ok(MakespanComparison {
        with_waits: simulate(&with, model)?.makespan,
        without_waits: simulate(&without, model)?.makespan,
    })
}
