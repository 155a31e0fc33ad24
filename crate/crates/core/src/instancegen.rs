//! Random collision-free plans for tests and benchmarks.
//!
//! Obstacles are scattered uniformly at the configured density and agents
//! live in the largest connected free region. Agents are planned one at a
//! time in id order with a space-time A* against a reservation table of all
//! earlier agents:
//!
//! * a step from `c` at `t` to `n` at `t + 1` (with `n == c` for a wait)
//!   needs both `c` and `n` free of earlier agents at `t + 1`. Entering a
//!   cell an earlier agent has just left is allowed, but no earlier agent
//!   may enter a cell this agent is leaving. That rules out swaps, and every
//!   same-step following chain runs from earlier to later agents, so the
//!   resulting ADG has no cycles;
//! * an agent parks at its goal forever, so it may only finish once no
//!   earlier agent passes that cell afterwards.
//!
//! Starts are drawn from cells free at `t = 0`. When an agent cannot be
//! planned, a fresh start and goal are drawn, up to [`MAX_ATTEMPTS`] times.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{AgentPath, GridMap, Solution, Vertex};

pub const MAX_ATTEMPTS: usize = 64;
/// Search nodes expanded per planning attempt before giving up on it.
const MAX_EXPANSIONS: usize = 400_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub width: u32,
    pub height: u32,
    /// Probability that a cell is an obstacle, in `[0, 1)`.
    pub obstacle_density: f64,
    pub n_agents: usize,
    pub seed: u64,
    /// Latest time step any agent may reach its goal.
    pub horizon_cap: u32,
}

impl GenConfig {
    pub fn new(width: u32, height: u32, n_agents: usize, seed: u64) -> Self {
        Self {
            width,
            height,
            obstacle_density: 0.0,
            n_agents,
            seed,
            horizon_cap: 4 * (width + height) + 64,
        }
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.obstacle_density = density;
        self
    }

    pub fn with_horizon(mut self, horizon_cap: u32) -> Self {
        self.horizon_cap = horizon_cap;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("agent {agent} could not be planned in {attempts} attempts (last: {last_reason})")]
    Unsolvable {
        agent: usize,
        attempts: usize,
        last_reason: String,
    },
}

/// Generates a valid plan; identical configs give identical plans.
pub fn generate(cfg: &GenConfig) -> Result<Solution, GenError> {
    if cfg.width == 0 || cfg.height == 0 {
        return Err(GenError::InvalidConfig("map dimensions must be positive".into()));
    }
    if !(0.0..1.0).contains(&cfg.obstacle_density) {
        return Err(GenError::InvalidConfig(format!(
            "obstacle density {} is outside [0, 1)",
            cfg.obstacle_density
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cells: Vec<bool> = (0..cfg.width * cfg.height)
        .map(|_| !rng.gen_bool(cfg.obstacle_density))
        .collect();
    let map = GridMap::from_cells(cfg.width, cfg.height, cells).expect("dimensions checked above");
    let region = largest_region(&map);
    if cfg.n_agents > region.len() / 2 {
        return Err(GenError::InvalidConfig(format!(
            "{} agents need at least {} connected free cells, found {}",
            cfg.n_agents,
            2 * cfg.n_agents,
            region.len()
        )));
    }

    let mut table = Reservations::new(map.len());
    let mut paths = Vec::with_capacity(cfg.n_agents);
    for agent in 0..cfg.n_agents {
        let mut last_reason = String::new();
        let mut planned = None;
        for _ in 0..MAX_ATTEMPTS {
            let starts: Vec<usize> = region
                .iter()
                .copied()
                .filter(|&c| !table.occupied(c, 0) && !table.goal_taken[c])
                .collect();
            let Some(&start) = starts.choose(&mut rng) else {
                last_reason = "no free start cell".into();
                break;
            };
            let goals: Vec<usize> = region
                .iter()
                .copied()
                .filter(|&c| c != start && !table.goal_taken[c] && parking_keeps_connectivity(&map, &table.goal_taken, c))
                .collect();
            let Some(&goal) = goals.choose(&mut rng) else {
                last_reason = "no free goal cell".into();
                break;
            };
            match plan_agent(&map, &table, start, goal, cfg.horizon_cap) {
                Ok(path) => {
                    planned = Some(path);
                    break;
                }
                Err(reason) => last_reason = reason,
            }
        }
        let Some(path) = planned else {
            return Err(GenError::Unsolvable {
                agent,
                attempts: MAX_ATTEMPTS,
                last_reason,
            });
        };
        table.commit(&path);
        paths.push(AgentPath {
            agent: agent as u32,
            vertices: path.into_iter().map(|c| map.vertex(c)).collect(),
        });
    }

    let map_ref = format!(
        "random-{}x{}-d{}-s{}",
        cfg.width, cfg.height, cfg.obstacle_density, cfg.seed
    );
    Ok(Solution::new(map, map_ref, paths).expect("generated paths are well-formed"))
}

/// Two agents exchanging neighbouring cells in one step. Deliberately
/// invalid; used to exercise conflict and cycle detection.
pub fn generate_swap_instance() -> Solution {
    let a = Vertex::new(0, 0);
    let b = Vertex::new(1, 0);
    Solution::new(
        GridMap::open(2, 1),
        "swap",
        vec![
            AgentPath { agent: 0, vertices: vec![a, b] },
            AgentPath { agent: 1, vertices: vec![b, a] },
        ],
    )
    .expect("fixture is well-formed")
}

/// Cells of the largest 4-connected free region, in index order. Ties go to
/// the region containing the lowest index.
fn largest_region(map: &GridMap) -> Vec<usize> {
    let mut label = vec![usize::MAX; map.len()];
    let mut best: Vec<usize> = Vec::new();
    for root in 0..map.len() {
        if label[root] != usize::MAX || !map.is_traversable(map.vertex(root)) {
            continue;
        }
        let mut region = vec![root];
        label[root] = root;
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            for n in map.neighbors(map.vertex(c)) {
                let ni = map.index(n);
                if label[ni] == usize::MAX {
                    label[ni] = root;
                    region.push(ni);
                    queue.push_back(ni);
                }
            }
        }
        if region.len() > best.len() {
            best = region;
        }
    }
    best.sort_unstable();
    best
}

/// True when parking on `cell` leaves its free neighbours connected to each
/// other around it, so the free region cannot split there. Free means
/// traversable and not already a goal.
fn parking_keeps_connectivity(map: &GridMap, goal_taken: &[bool], cell: usize) -> bool {
    const RING: [(i64, i64); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];
    let v = map.vertex(cell);
    let free = |(dx, dy): (i64, i64)| {
        let (x, y) = (i64::from(v.x) + dx, i64::from(v.y) + dy);
        if x < 0 || y < 0 || x >= i64::from(map.width()) || y >= i64::from(map.height()) {
            return false;
        }
        let n = Vertex::new(x as u32, y as u32);
        map.is_traversable(n) && !goal_taken[map.index(n)]
    };
    let ring: Vec<bool> = RING.iter().map(|&d| free(d)).collect();
    // Count cyclic runs of free ring cells that touch an orthogonal neighbour.
    let Some(gap) = ring.iter().position(|&f| !f) else {
        return true;
    };
    let mut runs = 0;
    let mut in_run = false;
    let mut run_has_side = false;
    for k in 1..=8 {
        let i = (gap + k) % 8;
        if ring[i] {
            in_run = true;
            run_has_side |= i % 2 == 0;
        } else if in_run {
            runs += usize::from(run_has_side);
            in_run = false;
            run_has_side = false;
        }
    }
    runs <= 1
}

struct Reservations {
    /// `(cell, t)` held by an agent that is still travelling.
    transient: HashSet<(usize, u32)>,
    /// Latest transient reservation per cell.
    last_transient: Vec<Option<u32>>,
    /// Time from which an agent is parked on the cell for good.
    parked_from: Vec<u32>,
    goal_taken: Vec<bool>,
}

impl Reservations {
    fn new(n: usize) -> Self {
        Self {
            transient: HashSet::new(),
            last_transient: vec![None; n],
            parked_from: vec![u32::MAX; n],
            goal_taken: vec![false; n],
        }
    }

    fn occupied(&self, cell: usize, t: u32) -> bool {
        self.parked_from[cell] <= t || self.transient.contains(&(cell, t))
    }

    /// True when nobody passes through `cell` at or after `t`.
    fn clear_from(&self, cell: usize, t: u32) -> bool {
        self.parked_from[cell] == u32::MAX && self.last_transient[cell].is_none_or(|last| last < t)
    }

    fn commit(&mut self, path: &[usize]) {
        let arrival = path.len() as u32 - 1;
        for (t, &c) in path[..path.len() - 1].iter().enumerate() {
            self.transient.insert((c, t as u32));
            let last = &mut self.last_transient[c];
            *last = Some(last.map_or(t as u32, |l| l.max(t as u32)));
        }
        let goal = path[path.len() - 1];
        self.parked_from[goal] = arrival;
        self.goal_taken[goal] = true;
    }
}

/// Space-time A* from `(start, 0)` to `goal`, where the goal may only be
/// reached once it is clear for the rest of time.
fn plan_agent(
    map: &GridMap,
    table: &Reservations,
    start: usize,
    goal: usize,
    horizon_cap: u32,
) -> Result<Vec<usize>, String> {
    let dist = distances_to(map, goal);
    let h = |c: usize| dist[c];
    if h(start) == u32::MAX {
        return Err("goal unreachable from start".into());
    }

    // Min-heap on (f, t, cell). Among equal f, earlier steps come first, so
    // every parent of a state is expanded before it and the fewest-moves
    // parent is known when the state is popped.
    let mut open = BinaryHeap::new();
    // (cell, t) -> (parent cell, moves so far)
    let mut best: HashMap<(usize, u32), (usize, u32)> = HashMap::new();
    let mut closed: HashSet<(usize, u32)> = HashSet::new();
    open.push(Reverse((h(start), 0u32, start)));
    best.insert((start, 0), (start, 0));
    let mut expansions = 0usize;

    while let Some(Reverse((_, t, cell))) = open.pop() {
        if !closed.insert((cell, t)) {
            continue;
        }
        if cell == goal && table.clear_from(cell, t) {
            let mut path = vec![cell];
            let (mut c, mut tt) = (cell, t);
            while tt > 0 {
                c = best[&(c, tt)].0;
                tt -= 1;
                path.push(c);
            }
            path.reverse();
            return Ok(path);
        }
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err("search budget exhausted".into());
        }
        if t >= horizon_cap {
            continue;
        }
        let nt = t + 1;
        let here = map.vertex(cell);
        if table.occupied(cell, nt) {
            continue;
        }
        let moved = best[&(cell, t)].1;
        let moves = map
            .neighbors(here)
            .map(|n| map.index(n))
            .filter(|&n| !table.occupied(n, nt));
        for next in std::iter::once(cell).chain(moves) {
            if h(next) == u32::MAX || closed.contains(&(next, nt)) {
                continue;
            }
            if nt + h(next) > horizon_cap {
                continue;
            }
            let cost = moved + u32::from(next != cell);
            match best.entry((next, nt)) {
                Entry::Occupied(mut e) => {
                    if cost < e.get().1 {
                        e.insert((cell, cost));
                    }
                }
                Entry::Vacant(e) => {
                    e.insert((cell, cost));
                    open.push(Reverse((nt + h(next), nt, next)));
                }
            }
        }
    }
    Err("no path within the horizon".into())
}

/// BFS distances to `goal` over the static map; `u32::MAX` if unreachable.
fn distances_to(map: &GridMap, goal: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; map.len()];
    dist[goal] = 0;
    let mut queue = VecDeque::from([goal]);
    while let Some(c) = queue.pop_front() {
        for n in map.neighbors(map.vertex(c)) {
            let ni = map.index(n);
            if dist[ni] == u32::MAX {
                dist[ni] = dist[c] + 1;
                queue.push_back(ni);
            }
        }
    }
    dist
}
