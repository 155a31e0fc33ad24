//! Construction benchmarks over generated instances.
//!
//! Each `(size, seed)` cell generates one plan, then times every requested
//! builder on the same derived actions. Generation, parsing and simulation
//! are outside the timed region. The exhaustive builder is timed with waits
//! kept (the original construction); CP and SCP drop waits first and that
//! pass is included in their time.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::adg::{Adg, DependencyType};
use crate::construction::{build, Algorithm, BuildOptions};
use crate::instancegen::{generate, GenConfig};
use crate::model::{derive_actions, ActionSet};
use crate::scalar::{format_seconds, TimeScalar};
use crate::simulation::{compare_wait_removal, TimingModel};
use crate::Seconds;

pub const CSV_HEADER: &str = "instance,algo,n_agents,n_actions,build_s,n_type2,makespan_wait_s,makespan_nowait_s";

/// After one untimed warm-up build, repeat until both `min_total` has
/// elapsed and `min_reps` runs are done, and report the mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimingLoop {
    pub min_total: Duration,
    pub min_reps: usize,
}

impl Default for TimingLoop {
    fn default() -> Self {
        Self {
            min_total: Duration::from_millis(200),
            min_reps: 10,
        }
    }
}

impl TimingLoop {
    /// One timed run, no warm-up. For smoke tests.
    pub fn single() -> Self {
        Self {
            min_total: Duration::ZERO,
            min_reps: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildTiming {
    pub mean_s: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Agent counts.
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub algos: Vec<Algorithm>,
    pub width: u32,
    pub height: u32,
    pub obstacle_density: f64,
    pub timing: TimingLoop,
    /// Worker threads; cells are spread over them, each timing loop stays on
    /// one worker.
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![50, 100, 200],
            seeds: vec![0, 1, 2],
            algos: Algorithm::ALL.to_vec(),
            width: 64,
            height: 64,
            obstacle_density: 0.2,
            timing: TimingLoop::default(),
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub instance: String,
    pub algo: Algorithm,
    pub n_agents: usize,
    /// Nodes in the built graph.
    pub n_actions: usize,
    pub build_s: f64,
    pub n_type2: usize,
    pub makespan_with_waits: f64,
    pub makespan_without_waits: f64,
    /// Set when the cell failed; numeric fields are then meaningless.
    pub error: Option<String>,
}

impl BenchRecord {
    pub fn to_csv_row(&self) -> String {
        match &self.error {
            None => format!(
                "{},{},{},{},{:.9},{},{},{}",
                self.instance,
                self.algo,
                self.n_agents,
                self.n_actions,
                self.build_s,
                self.n_type2,
                format_seconds(self.makespan_with_waits),
                format_seconds(self.makespan_without_waits),
            ),
            Some(tag) => format!(
                "{},{},{},,error:{},,,",
                self.instance,
                self.algo,
                self.n_agents,
                tag.replace([',', '\n'], ";")
            ),
        }
    }
}

/// Options each algorithm is benchmarked with.
pub fn bench_options(algo: Algorithm) -> BuildOptions {
    match algo {
        Algorithm::Exhaustive => BuildOptions::original(),
        other => BuildOptions::new(other),
    }
}

/// Builds repeatedly per `timing`; returns the last graph and the mean
/// wall-clock time per build.
pub fn time_build(actions: &ActionSet, opts: &BuildOptions, timing: &TimingLoop) -> (Adg, BuildTiming) {
    if *timing != TimingLoop::single() {
        drop(build(actions, opts));
    }
    let mut total = Duration::ZERO;
    let mut reps = 0usize;
    loop {
        let started = Instant::now();
        let adg = build(actions, opts);
        total += started.elapsed();
        reps += 1;
        if total >= timing.min_total && reps >= timing.min_reps.max(1) {
            let mean_s = total.as_secs_f64() / reps as f64;
            return (adg, BuildTiming { mean_s, reps });
        }
        drop(adg);
    }
}

pub fn instance_id(n_agents: usize, seed: u64) -> String {
    format!("n{n_agents}-s{seed}")
}

/// Runs one `(size, seed)` cell: one record per algorithm.
pub fn run_cell(cfg: &BenchConfig, n_agents: usize, seed: u64) -> Vec<BenchRecord> {
    let instance = instance_id(n_agents, seed);
    let failed = |algo: Algorithm, tag: String| BenchRecord {
        instance: instance.clone(),
        algo,
        n_agents,
        n_actions: 0,
        build_s: 0.0,
        n_type2: 0,
        makespan_with_waits: 0.0,
        makespan_without_waits: 0.0,
        error: Some(tag),
    };

    let gen = GenConfig::new(cfg.width, cfg.height, n_agents, seed).with_density(cfg.obstacle_density);
    let sol = match generate(&gen) {
        Ok(sol) => sol,
        Err(e) => return cfg.algos.iter().map(|&a| failed(a, format!("gen: {e}"))).collect(),
    };
    let makespans = match compare_wait_removal(&sol, &TimingModel::<Seconds>::standard()) {
        Ok(m) => m,
        Err(e) => return cfg.algos.iter().map(|&a| failed(a, format!("sim: {e}"))).collect(),
    };
    let actions = derive_actions(&sol);

    cfg.algos
        .iter()
        .map(|&algo| {
            let (adg, timing) = time_build(&actions, &bench_options(algo), &cfg.timing);
            BenchRecord {
                instance: instance.clone(),
                algo,
                n_agents,
                n_actions: adg.len(),
                build_s: timing.mean_s,
                n_type2: adg.count_edges(DependencyType::Type2),
                makespan_with_waits: makespans.with_waits.to_seconds(),
                makespan_without_waits: makespans.without_waits.to_seconds(),
                error: None,
            }
        })
        .collect()
}

/// Runs every cell; records come back ordered by size, seed, then algorithm
/// as listed in the config.
pub fn run_bench(cfg: &BenchConfig) -> Vec<BenchRecord> {
    let cells: Vec<(usize, u64)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| cfg.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .expect("thread pool");
    let per_cell: Vec<Vec<BenchRecord>> =
        pool.install(|| cells.par_iter().map(|&(n, s)| run_cell(cfg, n, s)).collect());
    per_cell.into_iter().flatten().collect()
}

pub fn write_csv<W: Write>(records: &[BenchRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.to_csv_row())?;
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x| (x, 3.0 * x * x)).collect();
        assert!((loglog_slope(&pts) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn timing_loop_runs_minimum_reps() {
        let sol = generate(&GenConfig::new(8, 8, 2, 3)).unwrap();
        let actions = derive_actions(&sol);
        let timing = TimingLoop {
            min_total: Duration::ZERO,
            min_reps: 7,
        };
        let (adg, t) = time_build(&actions, &BuildOptions::new(Algorithm::Scp), &timing);
        assert_eq!(t.reps, 7);
        assert!(t.mean_s > 0.0);
        assert!(!adg.is_empty());

        let (_, t) = time_build(&actions, &BuildOptions::new(Algorithm::Scp), &TimingLoop::default());
        assert!(t.reps >= 10);
        assert!(t.mean_s * t.reps as f64 >= 0.2);
    }

    #[test]
    fn cartesian_row_count_and_header() {
        let cfg = BenchConfig {
            sizes: vec![2, 4, 6],
            seeds: vec![0, 1, 2],
            width: 10,
            height: 10,
            timing: TimingLoop::single(),
            threads: 2,
            ..BenchConfig::default()
        };
        let records = run_bench(&cfg);
        assert_eq!(records.len(), 27);
        assert!(records.iter().all(|r| r.error.is_none()));
        assert_eq!(records[0].instance, "n2-s0");
        assert_eq!(records[0].algo, Algorithm::Exhaustive);
        for r in records.iter().filter(|r| r.algo == Algorithm::Scp) {
            assert!(r.n_type2 <= r.n_actions);
            assert!(r.makespan_without_waits <= r.makespan_with_waits);
        }
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(text.lines().count(), 28);
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == 8));
    }

    #[test]
    fn failed_cells_are_tagged() {
        let cfg = BenchConfig {
            sizes: vec![40],
            seeds: vec![0],
            width: 4,
            height: 4,
            timing: TimingLoop::single(),
            ..BenchConfig::default()
        };
        let records = run_bench(&cfg);
        assert_eq!(records.len(), 3);
        let row = records[0].to_csv_row();
        assert!(row.starts_with("n40-s0,exhaustive,40,,error:gen"), "{row}");
        assert_eq!(row.split(',').count(), 8);
    }
}
