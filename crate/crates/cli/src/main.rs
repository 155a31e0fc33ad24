//! `adgkit` command-line front end.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adgkit::adg::{export, ExportFormat};
use adgkit::bench::{run_bench, write_csv, BenchConfig};
use adgkit::instancegen::{generate, generate_swap_instance, GenConfig};
use adgkit::model::validate_solution;
use adgkit::scalar::format_seconds;
use adgkit::simulation::{simulate, TimingModel};
use adgkit::validation::{collect_stats_with, validate_instance, OracleConfig, ValidationError, DEFAULT_ORACLE_CAP};
use adgkit::{build, derive_actions, Adg, AdgError, Algorithm, BuildOptions, GridMap, Seconds, Solution};
use clap::{Parser, Subcommand};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  validation found a mismatch
  2  unreadable or malformed input
  3  plan has vertex or swap conflicts
  4  dependency graph has a cycle (witness printed)
  5  plan is larger than the oracle cap";

#[derive(Parser)]
#[command(name = "adgkit", version, about = "Action dependency graphs for MAPF plans", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a dependency graph and export it.
    #[command(after_help = EXIT_CODES)]
    Build {
        /// Grid map in movingai format.
        map: PathBuf,
        /// Plan JSON.
        plan: PathBuf,
        #[arg(long, default_value = "scp")]
        algo: Algorithm,
        /// Keep wait actions as graph nodes.
        #[arg(long)]
        keep_waits: bool,
        /// Output file; the graph goes to stdout when omitted and the stats
        /// line to stderr.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: ExportFormat,
        /// Build even when the plan has conflicts.
        #[arg(long)]
        skip_validate: bool,
    },
    /// Check wait redundancy, CP/exhaustive edge identity and SCP/CP closure
    /// equivalence; prints a JSON report.
    #[command(after_help = EXIT_CODES)]
    Validate {
        map: PathBuf,
        plan: PathBuf,
        /// Largest graph, in nodes, the closure checks accept.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: usize,
    },
    /// Execute the plan's graph and print the makespan in seconds.
    #[command(after_help = EXIT_CODES)]
    Simulate {
        map: PathBuf,
        plan: PathBuf,
        /// Drop waits and execute the SCP graph instead of the original one.
        #[arg(long)]
        no_waits: bool,
        /// Seconds per action.
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        /// Seconds for a move followed by another move.
        #[arg(long, default_value_t = 0.8)]
        cons: f64,
        /// Write the per-action schedule as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Time the builders on generated plans and write CSV. ADGKIT_THREADS
    /// sets how many cells run at once (default 1).
    Bench {
        /// Agent counts.
        #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        seeds: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_value = "exhaustive,cp,scp")]
        algos: Vec<Algorithm>,
        #[arg(long, default_value_t = 64)]
        width: u32,
        #[arg(long, default_value_t = 64)]
        height: u32,
        #[arg(long, default_value_t = 0.2)]
        density: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generate a random map and a collision-free plan on it.
    Gen {
        #[arg(long, default_value_t = 16)]
        width: u32,
        #[arg(long, default_value_t = 16)]
        height: u32,
        #[arg(long, default_value_t = 0.1)]
        density: f64,
        #[arg(long, default_value_t = 8)]
        agents: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the two-agent swap fixture instead (an invalid plan).
        #[arg(long)]
        swap: bool,
        #[arg(long)]
        map_out: PathBuf,
        #[arg(long)]
        plan_out: PathBuf,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Self::new(2, message)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build {
            map,
            plan,
            algo,
            keep_waits,
            out,
            format,
            skip_validate,
        } => cmd_build(&map, &plan, algo, keep_waits, out.as_deref(), format, skip_validate),
        Command::Validate { map, plan, oracle_cap } => cmd_validate(&map, &plan, oracle_cap),
        Command::Simulate {
            map,
            plan,
            no_waits,
            step,
            cons,
            trace,
        } => cmd_simulate(&map, &plan, no_waits, step, cons, trace.as_deref()),
        Command::Bench {
            sizes,
            seeds,
            algos,
            width,
            height,
            density,
            csv,
        } => cmd_bench(sizes, seeds, algos, width, height, density, csv.as_deref()),
        Command::Gen {
            width,
            height,
            density,
            agents,
            seed,
            swap,
            map_out,
            plan_out,
        } => cmd_gen(width, height, density, agents, seed, swap, &map_out, &plan_out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("adgkit: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CmdResult {
    fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load(map: &Path, plan: &Path) -> Result<Solution, Failure> {
    let grid = GridMap::parse(&read(map)?).map_err(|e| Failure::input(format!("{}: {e}", map.display())))?;
    Solution::parse(&read(plan)?, grid).map_err(|e| Failure::input(format!("{}: {e}", plan.display())))
}

fn require_valid(sol: &Solution) -> CmdResult {
    let report = validate_solution(sol);
    if report.is_ok() {
        return Ok(());
    }
    let details = serde_json::to_string(&report.conflicts).unwrap_or_default();
    Err(Failure::new(3, format!("plan is not collision-free: {details}")))
}

fn cycle_failure(adg: &Adg, witness: &[u32]) -> Failure {
    let steps: Vec<String> = witness
        .iter()
        .map(|&n| {
            let a = adg.node(n);
            format!("n{n}(agent {} t {} {}->{})", a.agent, a.t, a.s, a.g)
        })
        .collect();
    let first = witness.first().map(|n| format!(" -> n{n}")).unwrap_or_default();
    Failure::new(4, format!("cycle: {}{first}", steps.join(" -> ")))
}

fn check_acyclic(adg: &Adg) -> CmdResult {
    match adg.detect_cycle() {
        Some(witness) => Err(cycle_failure(adg, &witness)),
        None => Ok(()),
    }
}

fn cmd_build(
    map: &Path,
    plan: &Path,
    algo: Algorithm,
    keep_waits: bool,
    out: Option<&Path>,
    format: ExportFormat,
    skip_validate: bool,
) -> CmdResult {
    let sol = load(map, plan)?;
    if !skip_validate {
        require_valid(&sol)?;
    }
    let mut opts = BuildOptions::new(algo);
    if keep_waits {
        opts = opts.keep_waits();
    }
    let adg = build(&derive_actions(&sol), &opts);
    check_acyclic(&adg)?;
    let stats = collect_stats_with(&adg, &OracleConfig::default());
    let stats = serde_json::to_string(&stats).expect("stats serialize");
    let text = export(&adg, format);
    match out {
        Some(path) => {
            write(path, &text)?;
            println!("{stats}");
        }
        None => {
            print!("{text}");
            eprintln!("{stats}");
        }
    }
    Ok(())
}

fn cmd_validate(map: &Path, plan: &Path, oracle_cap: usize) -> CmdResult {
    let sol = load(map, plan)?;
    require_valid(&sol)?;
    let cfg = OracleConfig { max_nodes: oracle_cap };
    let instance = plan.display().to_string();
    let report = match validate_instance(&sol, instance, &cfg) {
        Ok(r) => r,
        Err(e @ ValidationError::OverCap { .. }) => return Err(Failure::new(5, e.to_string())),
        Err(ValidationError::Graph(AdgError::Cycle(w))) => {
            let adg = build(&derive_actions(&sol), &BuildOptions::original());
            return Err(cycle_failure(&adg, &w));
        }
        Err(e) => return Err(Failure::new(1, e.to_string())),
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::new(1, "validation failed"))
    }
}

fn cmd_simulate(map: &Path, plan: &Path, no_waits: bool, step: f64, cons: f64, trace: Option<&Path>) -> CmdResult {
    let sol = load(map, plan)?;
    require_valid(&sol)?;
    let model = TimingModel::<Seconds>::from_seconds(step, cons).map_err(|e| Failure::input(e.to_string()))?;
    let opts = if no_waits {
        BuildOptions::new(Algorithm::Scp)
    } else {
        BuildOptions::original()
    };
    let adg = build(&derive_actions(&sol), &opts);
    check_acyclic(&adg)?;
    let result = simulate(&adg, &model).map_err(|e| Failure::new(4, e.to_string()))?;
    if let Some(path) = trace {
        write(path, &result.to_csv())?;
    }
    println!("{}", format_seconds(result.makespan));
    Ok(())
}

fn cmd_bench(
    sizes: Vec<usize>,
    seeds: Vec<u64>,
    algos: Vec<Algorithm>,
    width: u32,
    height: u32,
    density: f64,
    csv: Option<&Path>,
) -> CmdResult {
    let threads = match std::env::var("ADGKIT_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .map_err(|_| Failure::input(format!("ADGKIT_THREADS must be a positive integer, got `{v}`")))?,
        Err(_) => 1,
    };
    let cfg = BenchConfig {
        sizes,
        seeds,
        algos,
        width,
        height,
        obstacle_density: density,
        threads: threads.max(1),
        ..BenchConfig::default()
    };
    let records = run_bench(&cfg);
    let io_err = |e: io::Error| Failure::input(e.to_string());
    match csv {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            let mut out = io::BufWriter::new(file);
            write_csv(&records, &mut out).map_err(io_err)?;
            out.flush().map_err(io_err)
        }
        None => write_csv(&records, io::stdout().lock()).map_err(io_err),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    width: u32,
    height: u32,
    density: f64,
    agents: usize,
    seed: u64,
    swap: bool,
    map_out: &Path,
    plan_out: &Path,
) -> CmdResult {
    let sol = if swap {
        generate_swap_instance()
    } else {
        let cfg = GenConfig::new(width, height, agents, seed).with_density(density);
        generate(&cfg).map_err(|e| Failure::input(e.to_string()))?
    };
    write(map_out, &sol.map.to_text())?;
    write(plan_out, &sol.to_json())?;
    Ok(())
}
