//! Command-line front end.
//!
//! Subcommands: `gen`, `mcg`, `solve`, `experiment`, `perror`.
//! Exit codes: 0 success, 1 usage or invalid input, 2 numerical failure,
//! 3 file I/O or file-format failure. All file output is atomic (temp file
//! plus rename), so a failing run never leaves partial files behind.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dictionary::{gen_gaussian, gen_odct, gen_odct2d, Dictionary};
use crate::error::{Error, Result};
use crate::experiments::{run_recovery_sweep, synth_signal, write_report, TrialSpec};
use crate::mcg::{build_mcg, build_mcg_with_cap, CoherencyGraph, PruneConfig};
use crate::solvers::{
    error_probability, rank_illness, solve_combinatorial, solve_irls, solve_l1,
    solve_mcg_irls, SolverConfig, SparseSolution,
};
use crate::util::{atomic_write, fmt_full};

#[derive(Parser)]
#[command(
    name = "mcg-sparse",
    version,
    about = "Sparse recovery with coherency-graph analysis: dictionary \
             generation, graph construction, solvers, and Monte Carlo sweeps"
)]
struct Cli {
    /// Cap the number of worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dictionary and write it in the text format
    Gen(GenArgs),
    /// Build a coherency graph from a dictionary file and export it
    Mcg(McgArgs),
    /// Run one solver on a signal (from a file or synthesized)
    Solve(SolveArgs),
    /// Run a Monte Carlo sweep described by a JSON spec file
    Experiment(ExperimentArgs),
    /// Exact and closed-form-bound failure probability of the combinatorial search
    Perror(PerrorArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Gaussian,
    Odct,
    Odct2d,
}

#[derive(Args)]
struct GenArgs {
    /// Dictionary family
    #[arg(value_enum)]
    kind: GenKind,
    /// Signal dimension (gaussian, odct)
    #[arg(long)]
    n: Option<usize>,
    /// Atom count (gaussian, odct)
    #[arg(long)]
    k: Option<usize>,
    /// First axis length (odct2d)
    #[arg(long)]
    n1: Option<usize>,
    /// Second axis length (odct2d)
    #[arg(long)]
    n2: Option<usize>,
    /// Total redundancy, a perfect square (odct2d)
    #[arg(long)]
    redundancy: Option<usize>,
    /// Random seed (gaussian)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; omit to print the dictionary to stdout
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Args)]
struct McgArgs {
    /// Dictionary file (text format)
    #[arg(long)]
    dict: PathBuf,
    /// Reject columns that are not already unit norm instead of rescaling
    #[arg(long)]
    no_normalize: bool,
    /// Subset size per hyperedge
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Minimum delta for a subset to count as ill
    #[arg(long, default_value_t = 0.4)]
    threshold: f64,
    /// Skip subsets containing a weakly coherent pair (lower-bound result)
    #[arg(long)]
    prune: bool,
    /// Pair cutoff used with --prune [default: threshold / 2]
    #[arg(long)]
    t_pair: Option<f64>,
    /// Cap on enumerated subsets [default: 10000000]
    #[arg(long)]
    cap: Option<u128>,
    /// Export format [default: from the output extension, else json]
    #[arg(long, value_enum)]
    format: Option<GraphFormat>,
    /// How many of the most-connected atoms to list
    #[arg(long, default_value_t = 6)]
    top: usize,
    /// Output path; omit to print the export to stdout
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliSolver {
    L1,
    Irls,
    McgIrls,
    Combinatorial,
}

#[derive(Args)]
struct SolveArgs {
    /// Dictionary file (text format)
    #[arg(long)]
    dict: PathBuf,
    /// Reject columns that are not already unit norm instead of rescaling
    #[arg(long)]
    no_normalize: bool,
    /// Signal file: N whitespace-separated values
    #[arg(long)]
    y: Option<PathBuf>,
    /// Synthesize an s-sparse signal instead of reading one
    #[arg(long)]
    synth_s: Option<usize>,
    /// Seed for --synth-s
    #[arg(long, default_value_t = 0)]
    synth_seed: u64,
    /// Which solver to run
    #[arg(long, value_enum)]
    solver: CliSolver,
    /// Coherency graph (JSON export); required for mcg-irls
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Ill-block size for the combinatorial partition
    #[arg(long)]
    m: Option<usize>,
    /// Ill-block columns included per combinatorial candidate
    #[arg(long)]
    p: Option<usize>,
    /// JSON file with solver settings; explicit flags below override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Iteration cap [default: 200]
    #[arg(long)]
    max_iters: Option<usize>,
    /// Initial damping [default: 0.1]
    #[arg(long)]
    damping_init: Option<f64>,
    /// Damping decay factor [default: 0.5]
    #[arg(long)]
    damping_decay: Option<f64>,
    /// Damping floor [default: 1e-8]
    #[arg(long)]
    damping_floor: Option<f64>,
    /// Relative-change convergence tolerance [default: 1e-6]
    #[arg(long)]
    convergence_tol: Option<f64>,
    /// Support cutoff relative to the largest coefficient [default: 1e-4]
    #[arg(long)]
    support_tol: Option<f64>,
    /// Measurement noise variance [default: 0]
    #[arg(long)]
    noise_variance: Option<f64>,
    /// Graph order when the graph must be built here [default: 3]
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Graph threshold when the graph must be built here [default: 0.4]
    #[arg(long, default_value_t = 0.4)]
    threshold: f64,
    /// Output path for the solution JSON; omit for stdout
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Sweep spec (JSON); the master seed is a required field
    #[arg(long)]
    spec: PathBuf,
    /// Output directory for report.json, CSVs, and the plot script
    #[arg(short, long)]
    out: PathBuf,
    /// Override the spec's trials_per_s
    #[arg(long)]
    trials_per_s: Option<usize>,
}

#[derive(Args)]
struct PerrorArgs {
    /// Total atom count K
    #[arg(long)]
    k: usize,
    /// Sparsity s
    #[arg(long)]
    s: usize,
    /// Ill-block size |D2|
    #[arg(long)]
    m2: usize,
    /// Ill-block columns per candidate P
    #[arg(long)]
    p: usize,
}

/// Parse arguments, run, and translate errors into exit codes.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        // a second initialization (as in an in-process test harness) keeps
        // the existing pool, which is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::ParseFile { .. } | Error::Json(_) => 3,
        Error::Numerical { .. } => 2,
        _ => 1,
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Gen(a) => cmd_gen(a),
        Command::Mcg(a) => cmd_mcg(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Perror(a) => cmd_perror(a),
    }
}

fn require<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::param(format!("missing required flag {what}")))
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let dict = match a.kind {
        GenKind::Gaussian => {
            gen_gaussian(require(a.n, "--n")?, require(a.k, "--k")?, a.seed)?
        }
        GenKind::Odct => gen_odct(require(a.n, "--n")?, require(a.k, "--k")?)?,
        GenKind::Odct2d => gen_odct2d(
            require(a.n1, "--n1")?,
            require(a.n2, "--n2")?,
            require(a.redundancy, "--redundancy")?,
        )?,
    };
    let mc = dict.mutual_coherence()?;
    match &a.out {
        Some(path) => {
            dict.save(path)?;
            println!(
                "wrote {}: N={} K={} mutual-coherence={}",
                path.display(),
                dict.rows(),
                dict.cols(),
                fmt_full(mc)
            );
        }
        None => {
            // dictionary to stdout, summary to stderr so pipes stay clean
            let tmp = tempdir_free_save(&dict)?;
            print!("{tmp}");
            eprintln!(
                "N={} K={} mutual-coherence={}",
                dict.rows(),
                dict.cols(),
                fmt_full(mc)
            );
        }
    }
    Ok(())
}

/// The text format as a string (same bytes `Dictionary::save` writes).
fn tempdir_free_save(dict: &Dictionary) -> Result<String> {
    let (n, k) = (dict.rows(), dict.cols());
    let mut out = String::new();
    out.push_str(&format!("{n} {k}\n"));
    for i in 0..n {
        for j in 0..k {
            if j > 0 {
                out.push(' ');
            }
            out.push_str(&fmt_full(dict.mat()[(i, j)]));
        }
        out.push('\n');
    }
    Ok(out)
}

fn cmd_mcg(a: McgArgs) -> Result<()> {
    let dict = Dictionary::load(&a.dict, !a.no_normalize)?;
    let prune = if a.prune {
        match a.t_pair {
            Some(t) => PruneConfig::PairCoherence { t_pair: t },
            None => PruneConfig::pair_coherence_default(a.threshold),
        }
    } else {
        PruneConfig::Off
    };
    let graph = match a.cap {
        Some(cap) => build_mcg_with_cap(&dict, a.order, a.threshold, prune, cap)?,
        None => build_mcg(&dict, a.order, a.threshold, prune)?,
    };
    let format = a.format.unwrap_or_else(|| {
        match a.out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("dot") | Some("gv") => GraphFormat::Dot,
            _ => GraphFormat::Json,
        }
    });
    let text = match format {
        GraphFormat::Dot => graph.to_dot(),
        GraphFormat::Json => graph.to_json()?,
    };
    match &a.out {
        Some(path) => atomic_write(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    eprintln!(
        "{} ill subsets at order {} threshold {}{}",
        graph.ill_subsets().len(),
        graph.order(),
        graph.threshold(),
        if graph.is_pruned() {
            " (pruned: counts are lower bounds)"
        } else {
            ""
        }
    );
    let mut ranked: Vec<(usize, usize)> = graph
        .membership_histogram()
        .iter()
        .copied()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let tops: Vec<String> = ranked
        .iter()
        .take(a.top)
        .map(|(c, i)| format!("{i}({c})"))
        .collect();
    eprintln!("most-connected atoms: {}", tops.join(" "));
    if let Some(path) = &a.out {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn read_signal(path: &Path, expected_len: usize) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|e| Error::ParseFile {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: format!("bad value {tok:?}: {e}"),
            })?;
            out.push(v);
        }
    }
    if out.len() != expected_len {
        return Err(Error::dim(format!(
            "signal file {} has {} values but the dictionary expects {}",
            path.display(),
            out.len(),
            expected_len
        )));
    }
    Ok(out)
}

fn merge_config(a: &SolveArgs) -> Result<SolverConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&text)?
        }
        None => SolverConfig::default(),
    };
    if let Some(v) = a.max_iters {
        cfg.max_iters = v;
    }
    if let Some(v) = a.damping_init {
        cfg.damping_init = v;
    }
    if let Some(v) = a.damping_decay {
        cfg.damping_decay = v;
    }
    if let Some(v) = a.damping_floor {
        cfg.damping_floor = v;
    }
    if let Some(v) = a.convergence_tol {
        cfg.convergence_tol = v;
    }
    if let Some(v) = a.support_tol {
        cfg.support_tol = v;
    }
    if let Some(v) = a.noise_variance {
        cfg.noise_variance = v;
    }
    Ok(cfg)
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let dict = Dictionary::load(&a.dict, !a.no_normalize)?;
    let cfg = merge_config(&a)?;
    let (y, x_true) = match (&a.y, a.synth_s) {
        (Some(path), None) => (read_signal(path, dict.rows())?, None),
        (None, Some(s)) => {
            let (x, y) = synth_signal(&dict, s, a.synth_seed)?;
            (y, Some(x))
        }
        _ => {
            return Err(Error::param(
                "provide exactly one of --y <file> or --synth-s <sparsity>",
            ))
        }
    };

    let solution: SparseSolution = match a.solver {
        CliSolver::L1 => solve_l1(&dict, &y, &cfg)?,
        CliSolver::Irls => solve_irls(&dict, &y, &cfg)?,
        CliSolver::McgIrls => {
            let path = a.graph.as_ref().ok_or_else(|| {
                Error::param("--graph <json> is required for the mcg-irls solver")
            })?;
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let graph = CoherencyGraph::from_json(&text)?;
            solve_mcg_irls(&dict, &graph, &y, &cfg)?
        }
        CliSolver::Combinatorial => {
            let m = require(a.m, "--m")?;
            let p = require(a.p, "--p")?;
            let graph = match &a.graph {
                Some(path) => {
                    let text =
                        std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                    CoherencyGraph::from_json(&text)?
                }
                None => build_mcg(&dict, a.order, a.threshold, PruneConfig::Off)?,
            };
            let part = rank_illness(&dict, &graph, m)?;
            let combo = solve_combinatorial(&dict, &part, p, &y, &cfg)?;
            eprintln!(
                "subproblems={} feasible={} winner-subset={:?}",
                combo.subproblems, combo.feasible_count, combo.winning_subset
            );
            combo.solution
        }
    };

    if let Some(x) = &x_true {
        let true_support: Vec<usize> = x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect();
        eprintln!(
            "synthesized signal with support {:?}; exact-support recovery: {}",
            true_support,
            solution.support == true_support
        );
    }
    eprintln!(
        "residual={} iterations={} converged={}",
        fmt_full(solution.residual_norm),
        solution.iterations,
        solution.converged
    );

    let mut json = serde_json::to_string_pretty(&solution)?;
    json.push('\n');
    match &a.out {
        Some(path) => {
            atomic_write(path, json.as_bytes())?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{json}"),
    }
    Ok(())
}

fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.spec).map_err(|e| Error::io(&a.spec, e))?;
    let mut spec: TrialSpec = serde_json::from_str(&text)?;
    if let Some(t) = a.trials_per_s {
        spec.trials_per_s = t;
    }
    let report = run_recovery_sweep(&spec)?;
    let files = write_report(&report, &a.out)?;
    for sr in &report.solvers {
        for st in &sr.per_sparsity {
            println!(
                "{} s={} rate={:.4} mean-iterations={:.2}",
                sr.label,
                st.sparsity,
                st.rate(),
                st.mean_iterations
            );
        }
    }
    for c in &report.correlations {
        match c.pearson {
            Some(r) => println!("correlation {} order {} = {:.4}", c.solver, c.order, r),
            None => println!("correlation {} order {} undefined", c.solver, c.order),
        }
    }
    for f in &files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_perror(a: PerrorArgs) -> Result<()> {
    let e = error_probability(a.k, a.s, a.m2, a.p)?;
    println!("exact {}", fmt_full(e.exact));
    println!("bound {}", fmt_full(e.bound));
    Ok(())
}
