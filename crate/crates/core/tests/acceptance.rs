//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 1 to 5 and 8 to 9 share one campaign of small generated plans.
//! Criteria 6 and 7 share a timing sweep on 64x64 maps. Criterion 5 is soft:
//! redundant SCP edges are listed as findings and do not fail the run.

use std::process::ExitCode;
use std::time::Instant;

use adgkit::bench::{bench_options, loglog_slope, time_build, TimingLoop};
use adgkit::instancegen::{generate, generate_swap_instance, GenConfig};
use adgkit::model::{validate_solution, AgentPath, Conflict, GridMap, Vertex};
use adgkit::simulation::{simulate, ExecutionTrace, TimingModel};
use adgkit::validation::{validate_instance, OracleConfig};
use adgkit::{build, derive_actions, Adg, Algorithm, BuildOptions, DependencyType, NodeId, Seconds, Solution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAMPAIGN_SIZE: usize = 1_200;
const CAMPAIGN_SEED: u64 = 0x00AD_6C0D;
const SWEEP_SIZES: [usize; 3] = [200, 400, 800];
const SWEEP_SEEDS: [u64; 3] = [0, 1, 2];
const SWEEP_DENSITY: f64 = 0.2;

struct Line {
    id: u8,
    name: &'static str,
    pass: bool,
    soft: bool,
    detail: String,
}

fn print_line(l: &Line) {
    let verdict = match (l.pass, l.soft) {
        (true, _) => "PASS",
        (false, false) => "FAIL",
        (false, true) => "FAIL (soft)",
    };
    println!("criterion {:>2} {verdict}: {} | {}", l.id, l.name, l.detail);
}

struct Instance {
    label: String,
    sol: Solution,
}

fn campaign() -> (Vec<Instance>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(CAMPAIGN_SEED);
    let mut out = Vec::with_capacity(CAMPAIGN_SIZE);
    let mut rejected = 0;
    while out.len() < CAMPAIGN_SIZE {
        let w = rng.gen_range(2..=16);
        let h = rng.gen_range(2..=16);
        let n = rng.gen_range(1..=8);
        let density = [0.0, 0.1, 0.2, 0.3][rng.gen_range(0..4)];
        let seed: u64 = rng.gen();
        match generate(&GenConfig::new(w, h, n, seed).with_density(density)) {
            Ok(sol) => out.push(Instance {
                label: format!("{w}x{h} agents={n} density={density} seed={seed}"),
                sol,
            }),
            Err(_) => rejected += 1,
        }
    }
    (out, rejected)
}

/// Longest chain in nodes.
fn unit_critical_path(adg: &Adg) -> usize {
    let mut depth = vec![0usize; adg.len()];
    for n in adg.topological_order().expect("acyclic") {
        let best = adg.predecessors(n).iter().map(|&(p, _)| depth[p as usize]).max().unwrap_or(0);
        depth[n as usize] = best + 1;
    }
    depth.into_iter().max().unwrap_or(0)
}

/// Precedence and per-agent exclusivity; returns a description of the first
/// violation.
fn trace_violation(adg: &Adg, trace: &ExecutionTrace<Seconds>) -> Option<String> {
    for n in 0..adg.len() as NodeId {
        let e = &trace.entries[n as usize];
        for &(p, kind) in adg.predecessors(n) {
            if trace.entries[p as usize].finish > e.start {
                return Some(format!("{kind} edge n{p}->n{n} finishes after start"));
            }
        }
    }
    for agent in 0..adg.n_agents() as u32 {
        let ids: Vec<NodeId> = adg.agent_nodes(agent).collect();
        for w in ids.windows(2) {
            if trace.entries[w[0] as usize].finish > trace.entries[w[1] as usize].start {
                return Some(format!("agent {agent} overlaps at n{}", w[1]));
            }
        }
    }
    None
}

fn single_agent(path: &[(u32, u32)]) -> Solution {
    let vertices = path.iter().map(|&(x, y)| Vertex::new(x, y)).collect();
    Solution::new(GridMap::open(4, 1), "fixture", vec![AgentPath { agent: 0, vertices }]).unwrap()
}

fn run_campaign(lines: &mut Vec<Line>) {
    let started = Instant::now();
    let (instances, rejected) = campaign();
    let cfg = OracleConfig::default();
    let model = TimingModel::<Seconds>::standard();
    let unit = TimingModel::<Seconds>::new(Seconds::from_integer(1), Seconds::from_integer(1)).unwrap();

    let mut closure_fail = Vec::new();
    let mut edge_fail = Vec::new();
    let mut wait_fail = Vec::new();
    let mut sparse_fail = Vec::new();
    let mut redundant = Vec::new();
    let mut n_redundant_edges = 0usize;
    let mut mk_worse = Vec::new();
    let mut mk_not_strict = Vec::new();
    let mut mk_tied_wait_path = 0usize;
    let mut mk_strict_required = 0usize;
    let mut mk_strictly_smaller = 0usize;
    let mut sim_fail = Vec::new();
    let mut traces = 0usize;
    let mut errors = Vec::new();

    for inst in &instances {
        let report = match validate_instance(&inst.sol, inst.label.clone(), &cfg) {
            Ok(r) => r,
            Err(e) => {
                errors.push(format!("{}: {e}", inst.label));
                continue;
            }
        };
        if !report.scp_vs_cp.passed() {
            let m = &report.scp_vs_cp.mismatches[0];
            closure_fail.push(format!("{} ({:?} -> {:?})", inst.label, m.from, m.to));
        }
        if !report.cp_vs_exhaustive.equal {
            edge_fail.push(inst.label.clone());
        }
        if !report.wait_redundancy.passed() {
            wait_fail.push(inst.label.clone());
        }
        if report.scp_max_type2_in_degree > 1 || report.scp_n_type2 > report.n_moves {
            sparse_fail.push(inst.label.clone());
        }
        if report.scp_redundant.count > 0 {
            n_redundant_edges += report.scp_redundant.count;
            redundant.push((inst, report.scp_redundant.witnesses.clone()));
        }

        let actions = derive_actions(&inst.sol);
        let with_graph = build(&actions, &BuildOptions::original());
        let without_graph = build(&actions, &BuildOptions::new(Algorithm::Scp));
        let with = simulate(&with_graph, &model).expect("acyclic");
        let without = simulate(&without_graph, &model).expect("acyclic");
        if without.makespan > with.makespan {
            mk_worse.push(inst.label.clone());
        }
        let path_has_wait = with.critical_path(&with_graph).iter().any(|&n| with_graph.node(n).is_wait());
        let waits_unavoidable = !with.has_wait_free_critical_path(&with_graph).expect("acyclic");
        if waits_unavoidable {
            mk_strict_required += 1;
            if without.makespan >= with.makespan {
                mk_not_strict.push(inst.label.clone());
            }
        } else if path_has_wait {
            mk_tied_wait_path += 1;
        }
        if without.makespan < with.makespan {
            mk_strictly_smaller += 1;
        }

        for (adg, trace) in [(&with_graph, &with), (&without_graph, &without)] {
            traces += 1;
            if let Some(v) = trace_violation(adg, trace) {
                sim_fail.push(format!("{}: {v}", inst.label));
            }
            let unit_trace = simulate(adg, &unit).expect("acyclic");
            traces += 1;
            if let Some(v) = trace_violation(adg, &unit_trace) {
                sim_fail.push(format!("{}: {v}", inst.label));
            }
            if unit_trace.makespan != Seconds::from_integer(unit_critical_path(adg) as i64) {
                sim_fail.push(format!("{}: unit makespan differs from critical path", inst.label));
            }
        }
    }

    let n = instances.len();
    let elapsed = started.elapsed().as_secs_f64();
    let first = |v: &[String]| v.first().cloned().unwrap_or_default();
    let scope = format!("{n} instances ({rejected} unsatisfiable configs redrawn), {elapsed:.1} s");

    lines.push(Line {
        id: 1,
        name: "closure(SCP) == closure(CP)",
        pass: closure_fail.is_empty() && errors.is_empty() && n >= 1000,
        soft: false,
        detail: if closure_fail.is_empty() && errors.is_empty() {
            format!("{scope}, 0 mismatches")
        } else {
            format!("{} mismatches, {} errors; first: {}{}", closure_fail.len(), errors.len(), first(&closure_fail), first(&errors))
        },
    });
    lines.push(Line {
        id: 2,
        name: "CP and exhaustive type-2 edge sets identical",
        pass: edge_fail.is_empty() && errors.is_empty(),
        soft: false,
        detail: format!("{} of {n} differ {}", edge_fail.len(), first(&edge_fail)),
    });
    lines.push(Line {
        id: 3,
        name: "waits add no ordering between moves",
        pass: wait_fail.is_empty() && errors.is_empty(),
        soft: false,
        detail: format!("{} of {n} differ {}", wait_fail.len(), first(&wait_fail)),
    });
    lines.push(Line {
        id: 4,
        name: "SCP type-2 in-degree <= 1 and count <= actions",
        pass: sparse_fail.is_empty() && errors.is_empty(),
        soft: false,
        detail: format!("{} of {n} violate {}", sparse_fail.len(), first(&sparse_fail)),
    });
    lines.push(Line {
        id: 5,
        name: "SCP graphs carry no redundant type-2 edge",
        pass: redundant.is_empty(),
        soft: true,
        detail: if redundant.is_empty() {
            format!("0 redundant edges over {n} instances")
        } else {
            format!(
                "{n_redundant_edges} redundant edges in {} of {n} instances; see findings below",
                redundant.len()
            )
        },
    });
    for (inst, witnesses) in redundant.iter().take(5) {
        let scp = build(&derive_actions(&inst.sol), &BuildOptions::new(Algorithm::Scp));
        let e = witnesses[0];
        let (a, b) = (scp.node(e.from), scp.node(e.to));
        println!(
            "    finding: {} edge agent {} t {} {}->{}  =>  agent {} t {} {}->{}",
            inst.label, a.agent, a.t, a.s, a.g, b.agent, b.t, b.s, b.g
        );
    }

    let three = simulate(&build(&derive_actions(&single_agent(&[(0, 0), (1, 0), (2, 0), (3, 0)])), &BuildOptions::original()), &model)
        .unwrap()
        .makespan;
    let mwm = single_agent(&[(0, 0), (1, 0), (1, 0), (2, 0)]);
    let mwm_actions = derive_actions(&mwm);
    let mwm_with = simulate(&build(&mwm_actions, &BuildOptions::original()), &model).unwrap().makespan;
    let mwm_without = simulate(&build(&mwm_actions, &BuildOptions::new(Algorithm::Scp)), &model).unwrap().makespan;
    let fixtures_ok =
        three == Seconds::new(13, 5) && mwm_with == Seconds::from_integer(3) && mwm_without == Seconds::new(9, 5);
    lines.push(Line {
        id: 8,
        name: "dropping waits never lengthens, and shortens when waits are critical",
        pass: mk_worse.is_empty() && mk_not_strict.is_empty() && fixtures_ok,
        soft: false,
        detail: format!(
            "never longer in {}/{n}; strictly shorter in {}/{} with waits on every critical path \
             ({} more tie a wait-free critical path); shorter overall in {mk_strictly_smaller}; \
             fixtures 3 moves={} s, move-wait-move {} s -> {} s{}",
            n - mk_worse.len(),
            mk_strict_required - mk_not_strict.len(),
            mk_strict_required,
            mk_tied_wait_path,
            three.to_string().replace("13/5", "2.6"),
            mwm_with,
            mwm_without.to_string().replace("9/5", "1.8"),
            first(&mk_not_strict)
        ),
    });
    lines.push(Line {
        id: 9,
        name: "schedules respect edges, agents never overlap, unit makespan = critical path",
        pass: sim_fail.is_empty(),
        soft: false,
        detail: format!("{traces} traces, {} violations {}", sim_fail.len(), first(&sim_fail)),
    });
}

fn run_sweep(lines: &mut Vec<Line>) {
    let started = Instant::now();
    let timing = TimingLoop::default();
    let mut ex_points = Vec::new();
    let mut scp_points = Vec::new();
    let mut ratio_800 = Vec::new();
    let mut type2_ratios: Vec<Vec<f64>> = Vec::new();
    let mut gen_error = None;

    for &seed in &SWEEP_SEEDS {
        let mut ratios = Vec::new();
        for &n in &SWEEP_SIZES {
            let sol = match generate(&GenConfig::new(64, 64, n, seed).with_density(SWEEP_DENSITY)) {
                Ok(s) => s,
                Err(e) => {
                    gen_error = Some(format!("seed {seed} n {n}: {e}"));
                    continue;
                }
            };
            let actions = derive_actions(&sol);
            let (_, ex) = time_build(&actions, &bench_options(Algorithm::Exhaustive), &timing);
            let (scp, scp_t) = time_build(&actions, &bench_options(Algorithm::Scp), &timing);
            let cp = build(&actions, &bench_options(Algorithm::Cp));
            let (cp2, scp2) = (cp.count_edges(DependencyType::Type2), scp.count_edges(DependencyType::Type2));
            println!(
                "    sweep seed={seed} agents={n} actions={} moves={} exhaustive={:.4}s x{} scp={:.6}s x{} type2 cp={cp2} scp={scp2}",
                actions.len(),
                scp.len(),
                ex.mean_s,
                ex.reps,
                scp_t.mean_s,
                scp_t.reps
            );
            ex_points.push((n as f64, ex.mean_s));
            scp_points.push((n as f64, scp_t.mean_s));
            if n == 800 {
                ratio_800.push(ex.mean_s / scp_t.mean_s);
            }
            ratios.push(cp2 as f64 / scp2.max(1) as f64);
        }
        type2_ratios.push(ratios);
    }

    let ex_slope = loglog_slope(&ex_points);
    let scp_slope = loglog_slope(&scp_points);
    let min_ratio = ratio_800.iter().copied().fold(f64::INFINITY, f64::min);
    lines.push(Line {
        id: 6,
        name: "exhaustive exponent >= 1.7, SCP exponent <= 1.3, ratio at 800 agents >= 10",
        pass: gen_error.is_none() && ex_slope >= 1.7 && scp_slope <= 1.3 && min_ratio >= 10.0,
        soft: false,
        detail: format!(
            "exhaustive {ex_slope:.2}, scp {scp_slope:.2}, min ratio at 800 {min_ratio:.0}x \
             ({} seeds x {:?} agents, {:.0} s){}",
            SWEEP_SEEDS.len(),
            SWEEP_SIZES,
            started.elapsed().as_secs_f64(),
            gen_error.clone().map(|e| format!("; generation failed: {e}")).unwrap_or_default()
        ),
    });
    let increasing = type2_ratios
        .iter()
        .all(|r| r.len() == SWEEP_SIZES.len() && r.iter().all(|&x| x >= 1.0) && r.windows(2).all(|w| w[1] > w[0]));
    let shown: Vec<String> = type2_ratios
        .iter()
        .map(|r| r.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join("/"))
        .collect();
    lines.push(Line {
        id: 7,
        name: "CP/SCP type-2 ratio >= 1 and increasing with agents",
        pass: gen_error.is_none() && increasing,
        soft: false,
        detail: format!("density {SWEEP_DENSITY}, ratios per seed {}", shown.join(", ")),
    });
}

fn run_negative(lines: &mut Vec<Line>) {
    let sol = generate_swap_instance();
    let report = validate_solution(&sol);
    let swap_found = report.conflicts.iter().any(|c| matches!(c, Conflict::Swap { .. }));
    let adg = build(&derive_actions(&sol), &BuildOptions::original().keep_waits());
    let witness = adg.detect_cycle();
    let witness_ok = match &witness {
        Some(w) if w.len() == 2 => {
            let (a, b) = (w[0], w[1]);
            adg.node(a).agent != adg.node(b).agent
                && adg.contains_edge(adgkit::Edge { from: a, to: b, kind: DependencyType::Type2 })
                && adg.contains_edge(adgkit::Edge { from: b, to: a, kind: DependencyType::Type2 })
        }
        _ => false,
    };
    lines.push(Line {
        id: 10,
        name: "swap fixture: swap conflict and a 2-cycle witness",
        pass: swap_found && witness_ok && adg.topological_order().is_err(),
        soft: false,
        detail: format!("conflicts {:?}, witness {:?}", report.conflicts, witness),
    });
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--nocapture`; only a name
    // filter that excludes "acceptance" skips the run.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return ExitCode::SUCCESS;
    }

    let mut lines = Vec::new();
    run_negative(&mut lines);
    run_campaign(&mut lines);
    run_sweep(&mut lines);
    lines.sort_by_key(|l| l.id);

    println!();
    println!("acceptance summary");
    for l in &lines {
        print_line(l);
    }
    let hard_failures = lines.iter().filter(|l| !l.pass && !l.soft).count();
    println!("{} criteria, {hard_failures} hard failures", lines.len());
    if hard_failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
