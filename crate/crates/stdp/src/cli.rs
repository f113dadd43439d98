//! Command-line surface: solve, check, generate, compare against the
//! brute-force oracle, and benchmark scaling.
//!
//! Exit codes: 0 success, 1 oracle disagreement in `compare`, 2 parse
//! error, 3 non-conservative input, 4 infeasible generator parameters.

use crate::graph::{is_conservative, ConservativenessCertificate, WeightedInstance};
use crate::oracle::{brute_force_stdp, generate_instance, GenParams, OracleError};
use crate::solver::{solve_with, SolveError, SolveOptions, Solution};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use std::path::{Path as FsPath, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "stdp", about = "Shortest two disjoint paths under conservative weights")]
struct Cli {
    /// Size of the worker pool for compare/bench and the solver guess loops.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance file and print the optimum.
    Solve(SolveArgs),
    /// Certify conservativeness of an instance file.
    Check { file: PathBuf },
    /// Generate a random conservative instance.
    Gen(GenArgs),
    /// Compare the solver against the brute-force oracle.
    Compare(CompareArgs),
    /// Time the solver over a grid of sizes and report log-log slopes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    /// Write a DOT rendering with the solution marked.
    #[arg(long)]
    emit_dot: Option<PathBuf>,
    /// Enable the expensive structural assertions.
    #[arg(long)]
    assert_invariants: bool,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    n: usize,
    c: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Directory of instance files; otherwise instances are generated.
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    c: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "20,30,40")]
    n_grid: String,
    #[arg(long, default_value = "1")]
    c_grid: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    match cli.cmd {
        Cmd::Solve(args) => cmd_solve(&args),
        Cmd::Check { file } => cmd_check(&file),
        Cmd::Gen(args) => cmd_gen(&args),
        Cmd::Compare(args) => cmd_compare(&args),
        Cmd::Bench(args) => cmd_bench(&args),
    }
}

fn load(file: &FsPath) -> Result<WeightedInstance, String> {
    let text = std::fs::read_to_string(file).map_err(|e| e.to_string())?;
    crate::graph::parse_instance(&text)
}

fn cmd_solve(args: &SolveArgs) -> i32 {
    let inst = match load(&args.file) {
        Ok(inst) => inst,
        Err(e) => {
            eprintln!("parse error: {e}");
            return 2;
        }
    };
    let opts = SolveOptions {
        assert_invariants: args.assert_invariants,
        ..SolveOptions::default()
    };
    match solve_with(&inst, &opts) {
        Err(SolveError::NonConservativeInput { cycle, weight }) => {
            eprintln!(
                "non-conservative input: cycle {:?} has weight {}",
                cycle,
                weight / 2
            );
            3
        }
        Ok(None) => {
            if args.json {
                println!("{}", serde_json::json!({"feasible": false}));
            } else {
                println!("INFEASIBLE");
            }
            0
        }
        Ok(Some(sol)) => {
            if let Some(dot) = &args.emit_dot {
                if let Err(e) = std::fs::write(dot, render_dot(&inst, Some(&sol))) {
                    eprintln!("cannot write dot file: {e}");
                }
            }
            if args.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "feasible": true,
                        "weight": sol.weight / 2,
                        "paths": [sol.p1.vertices(), sol.p2.vertices()],
                    })
                );
            } else {
                println!("weight {}", sol.weight / 2);
                println!("{}", join_path(&sol.p1));
                println!("{}", join_path(&sol.p2));
            }
            0
        }
    }
}

fn join_path(p: &crate::graph::Path) -> String {
    p.vertices()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_check(file: &FsPath) -> i32 {
    let inst = match load(file) {
        Ok(inst) => inst,
        Err(e) => {
            eprintln!("parse error: {e}");
            return 2;
        }
    };
    match is_conservative(&inst) {
        ConservativenessCertificate::Conservative => {
            let c = crate::treekit::negative_forest(&inst)
                .map(|f| f.c())
                .unwrap_or(0);
            println!("conservative; negative edges span {c} trees");
            0
        }
        ConservativenessCertificate::NegativeCycle { cycle, weight } => {
            println!(
                "negative cycle {:?} with weight {}",
                cycle,
                weight / 2
            );
            3
        }
    }
}

fn cmd_gen(args: &GenArgs) -> i32 {
    let params = GenParams::new(args.n, args.c, args.density, args.seed);
    match generate_instance(&params) {
        Err(OracleError::ParamsInfeasible(msg)) => {
            eprintln!("infeasible parameters: {msg}");
            4
        }
        Err(e) => {
            eprintln!("{e}");
            4
        }
        Ok(inst) => {
            let json = serde_json::to_string_pretty(&inst.raw()).expect("serializable");
            if let Err(e) = std::fs::write(&args.out, json) {
                eprintln!("cannot write {}: {e}", args.out.display());
                return 2;
            }
            let c = crate::treekit::negative_forest(&inst).map(|f| f.c()).unwrap_or(0);
            println!(
                "wrote {}: n={} edges={} c={}",
                args.out.display(),
                inst.num_ids(),
                inst.edges().len(),
                c
            );
            0
        }
    }
}

fn cmd_compare(args: &CompareArgs) -> i32 {
    let instances: Vec<(String, WeightedInstance)> = if let Some(dir) = &args.dir {
        let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
            Ok(rd) => rd
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
                .collect(),
            Err(e) => {
                eprintln!("cannot read {}: {e}", dir.display());
                return 2;
            }
        };
        files.sort();
        let mut out = Vec::new();
        for f in files {
            match load(&f) {
                Ok(inst) => out.push((f.display().to_string(), inst)),
                Err(e) => {
                    eprintln!("skipping {}: {e}", f.display());
                }
            }
        }
        out
    } else {
        (0..args.count)
            .filter_map(|i| {
                let params = GenParams::new(
                    args.n,
                    args.c,
                    args.density,
                    args.seed.wrapping_add(i as u64),
                );
                generate_instance(&params)
                    .ok()
                    .map(|inst| (format!("gen-{i}"), inst))
            })
            .collect()
    };

    #[derive(PartialEq)]
    enum Outcome {
        Agree,
        Mismatch(String),
        Skipped,
    }
    let results: Vec<(String, Outcome)> = instances
        .par_iter()
        .map(|(name, inst)| {
            let oracle = match brute_force_stdp(inst) {
                Err(OracleError::TooLarge(_)) => return (name.clone(), Outcome::Skipped),
                Err(e) => return (name.clone(), Outcome::Mismatch(e.to_string())),
                Ok(o) => o.map(|x| x.0),
            };
            let got = match crate::solver::solve(inst) {
                Ok(sol) => sol.map(|s| s.weight),
                Err(e) => return (name.clone(), Outcome::Mismatch(e.to_string())),
            };
            if oracle == got {
                (name.clone(), Outcome::Agree)
            } else {
                (
                    name.clone(),
                    Outcome::Mismatch(format!("oracle {oracle:?} vs solver {got:?}")),
                )
            }
        })
        .collect();

    let mut agree = 0;
    let mut skipped = 0;
    let mut mismatched = 0;
    for (name, outcome) in &results {
        match outcome {
            Outcome::Agree => agree += 1,
            Outcome::Skipped => {
                skipped += 1;
                println!("{name}: skipped (too large for the oracle)");
            }
            Outcome::Mismatch(msg) => {
                mismatched += 1;
                println!("{name}: MISMATCH {msg}");
            }
        }
    }
    let total = results.len() - skipped;
    println!("{agree}/{total} agree ({skipped} skipped)");
    if mismatched > 0 {
        1
    } else {
        0
    }
}

fn parse_grid(s: &str) -> Vec<usize> {
    s.split(',')
        .filter_map(|x| x.trim().parse().ok())
        .collect()
}

fn cmd_bench(args: &BenchArgs) -> i32 {
    let ns = parse_grid(&args.n_grid);
    let cs = parse_grid(&args.c_grid);
    println!("{:>4} {:>4} {:>12} {:>14}", "c", "n", "seconds", "weight");
    for &c in &cs {
        let mut points: Vec<(f64, f64)> = Vec::new();
        for &n in &ns {
            let params = GenParams::new(n, c, args.density, args.seed);
            let inst = match generate_instance(&params) {
                Ok(i) => i,
                Err(e) => {
                    eprintln!("generation failed for n={n} c={c}: {e}");
                    continue;
                }
            };
            let start = Instant::now();
            let sol = solve_with(&inst, &SolveOptions::default());
            let secs = start.elapsed().as_secs_f64();
            let weight = match sol {
                Ok(Some(s)) => format!("{}", s.weight / 2),
                Ok(None) => "infeasible".into(),
                Err(_) => "non-conservative".into(),
            };
            println!("{:>4} {:>4} {:>12.4} {:>14}", c, n, secs, weight);
            points.push(((n as f64).ln(), secs.max(1e-6).ln()));
        }
        if points.len() >= 2 {
            println!("c={c}: log-log slope {:.2}", slope(&points));
        }
    }
    0
}

/// Least-squares slope of y over x.
pub fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// DOT rendering: negative edges dashed; solution paths in two colors.
pub fn render_dot(inst: &WeightedInstance, sol: Option<&Solution>) -> String {
    let mut out = String::from("graph stdp {\n  node [shape=circle];\n");
    out.push_str(&format!(
        "  {} [style=filled, fillcolor=lightgray, label=\"s={}\"];\n",
        inst.s(),
        inst.s()
    ));
    out.push_str(&format!(
        "  {} [style=filled, fillcolor=lightgray, label=\"t={}\"];\n",
        inst.t(),
        inst.t()
    ));
    for e in inst.edges() {
        if !inst.is_alive(e.u) || !inst.is_alive(e.v) {
            continue;
        }
        let mut attrs: Vec<String> = vec![format!("label=\"{}\"", e.w / 2)];
        if e.w < 0 {
            attrs.push("style=dashed".into());
        }
        if let Some(sol) = sol {
            if sol.p1.has_edge(e.u, e.v) {
                attrs.push("color=red".into());
                attrs.push("penwidth=2".into());
            } else if sol.p2.has_edge(e.u, e.v) {
                attrs.push("color=blue".into());
                attrs.push("penwidth=2".into());
            }
        }
        out.push_str(&format!("  {} -- {} [{}];\n", e.u, e.v, attrs.join(", ")));
    }
    out.push_str("}\n");
    out
}
