//! Monte Carlo harness: synthesize sparse signals, run solvers over a
//! sparsity sweep, and aggregate success rates, per-atom error counts,
//! membership/error correlations, and iteration counts into a
//! reproducible report.

mod report;

pub use report::write_report;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::dictionary::{gen_gaussian, gen_odct, gen_odct2d, Dictionary};
use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::mcg::{build_mcg, CoherencyGraph, PruneConfig};
use crate::solvers::{
    rank_illness, solve_combinatorial, solve_irls, solve_l1, solve_mcg_irls, Partition,
    SolverConfig, SparseSolution,
};

/// Where the experiment's dictionary comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DictSource {
    Gaussian { n: usize, k: usize, seed: u64 },
    Odct { n: usize, k: usize },
    Odct2d { n1: usize, n2: usize, redundancy: usize },
    File {
        path: PathBuf,
        #[serde(default = "default_true")]
        normalize: bool,
    },
}

fn default_true() -> bool {
    true
}

impl DictSource {
    pub fn build(&self) -> Result<Dictionary> {
        match self {
            DictSource::Gaussian { n, k, seed } => gen_gaussian(*n, *k, *seed),
            DictSource::Odct { n, k } => gen_odct(*n, *k),
            DictSource::Odct2d { n1, n2, redundancy } => gen_odct2d(*n1, *n2, *redundancy),
            DictSource::File { path, normalize } => Dictionary::load(path, *normalize),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    L1,
    Irls,
    McgIrls,
    Combinatorial,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::L1 => "l1",
            SolverKind::Irls => "irls",
            SolverKind::McgIrls => "mcg-irls",
            SolverKind::Combinatorial => "combinatorial",
        }
    }
}

/// One solver entry in a sweep: which algorithm, an optional custom label
/// for the report, and its tuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub kind: SolverKind,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub config: SolverConfig,
}

impl SolverSpec {
    pub fn of(kind: SolverKind) -> Self {
        SolverSpec {
            kind,
            label: None,
            config: SolverConfig::default(),
        }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.kind.name().to_string())
    }
}

/// How a trial counts as a success.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SuccessCriterion {
    /// Estimated support equals the true support exactly.
    #[default]
    ExactSupport,
    /// |x_est - x_true| / |x_true| below the threshold.
    RelativeError { threshold: f64 },
}

/// Graph parameters for sweeps that involve the graph-weighted solver or
/// membership statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McgParams {
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_order() -> usize {
    3
}

fn default_threshold() -> f64 {
    0.4
}

impl Default for McgParams {
    fn default() -> Self {
        McgParams {
            order: default_order(),
            threshold: default_threshold(),
        }
    }
}

/// Ill-block size and per-candidate subset size for the combinatorial solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionParams {
    pub m: usize,
    pub p: usize,
}

/// Full description of one sweep. Reports echo the spec, and the same spec
/// always reproduces the same report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub dict_source: DictSource,
    pub sparsity_range: Vec<usize>,
    pub trials_per_s: usize,
    pub master_seed: u64,
    pub solvers: Vec<SolverSpec>,
    #[serde(default)]
    pub success_criterion: SuccessCriterion,
    #[serde(default)]
    pub mcg_params: Option<McgParams>,
    #[serde(default)]
    pub partition_params: Option<PartitionParams>,
    /// Graph orders at which to correlate membership counts with per-atom
    /// error counts (requires mcg_params for the threshold).
    #[serde(default)]
    pub correlation_orders: Vec<usize>,
}

impl TrialSpec {
    /// Check every field against the dictionary, reporting all problems in
    /// one pass.
    pub fn validate(&self, dict: &Dictionary) -> Result<()> {
        let (n, k) = (dict.rows(), dict.cols());
        let mut problems = Vec::new();
        if self.sparsity_range.is_empty() {
            problems.push("sparsity_range is empty".to_string());
        }
        for &s in &self.sparsity_range {
            if s < 1 || s > n {
                problems.push(format!("sparsity {s} outside [1, N] = [1, {n}]"));
            }
        }
        if self.trials_per_s == 0 {
            problems.push("trials_per_s must be at least 1".to_string());
        }
        if self.solvers.is_empty() {
            problems.push("solvers list is empty".to_string());
        }
        let mut labels: Vec<String> = self.solvers.iter().map(|s| s.label()).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != self.solvers.len() {
            problems.push("solver labels are not unique".to_string());
        }
        for sv in &self.solvers {
            if let Err(e) = sv.config.validate() {
                problems.push(format!("solver {}: {e}", sv.label()));
            }
        }
        let needs_graph = self
            .solvers
            .iter()
            .any(|s| matches!(s.kind, SolverKind::McgIrls | SolverKind::Combinatorial))
            || !self.correlation_orders.is_empty();
        if needs_graph && self.mcg_params.is_none() {
            problems.push(
                "mcg_params required for mcg-irls, combinatorial, or correlation orders"
                    .to_string(),
            );
        }
        if let Some(mp) = &self.mcg_params {
            if mp.order < 2 || mp.order > n.min(k) {
                problems.push(format!(
                    "mcg order {} outside [2, min(N, K)] = [2, {}]",
                    mp.order,
                    n.min(k)
                ));
            }
            if !(mp.threshold > 0.0 && mp.threshold < 1.0) {
                problems.push(format!("mcg threshold {} outside (0, 1)", mp.threshold));
            }
        }
        let needs_partition = self
            .solvers
            .iter()
            .any(|s| matches!(s.kind, SolverKind::Combinatorial));
        if needs_partition && self.partition_params.is_none() {
            problems.push("partition_params required for the combinatorial solver".to_string());
        }
        if let Some(pp) = &self.partition_params {
            if pp.m == 0 || pp.m >= k {
                problems.push(format!("partition size m = {} outside (0, K) = (0, {k})", pp.m));
            }
            if pp.p > pp.m {
                problems.push(format!(
                    "subset size p = {} exceeds partition size m = {}",
                    pp.p, pp.m
                ));
            }
        }
        for &o in &self.correlation_orders {
            if o < 2 || o > n.min(k) {
                problems.push(format!(
                    "correlation order {o} outside [2, min(N, K)] = [2, {}]",
                    n.min(k)
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::param(problems.join("; ")))
        }
    }
}

/// Aggregates for one solver at one sparsity level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityStats {
    pub sparsity: usize,
    pub trials: u64,
    pub successes: u64,
    /// Trials where the solver returned an error (counted as failures).
    pub solver_errors: u64,
    pub mean_iterations: f64,
}

impl SparsityStats {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub label: String,
    pub per_sparsity: Vec<SparsityStats>,
    /// Number of times each atom was estimated wrongly: it sat in the
    /// symmetric difference between the true support and the s largest
    /// recovered magnitudes. Judging the estimate by its s-term truncation
    /// rather than the thresholded support keeps the count aligned with
    /// which atoms the solver confused, instead of flooding it with the
    /// small tail entries an l1 vertex solution carries.
    pub atom_error_counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipEntry {
    pub order: usize,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEntry {
    pub solver: String,
    pub order: usize,
    /// None when either histogram has zero variance.
    pub pearson: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: TrialSpec,
    pub dict_rows: usize,
    pub dict_cols: usize,
    pub solvers: Vec<SolverReport>,
    /// Membership histograms for each requested correlation order.
    pub memberships: Vec<MembershipEntry>,
    pub correlations: Vec<CorrelationEntry>,
}

/// Derive the seed for one trial from the master seed, the sparsity level,
/// and the trial index, with full avalanche so neighboring trials decorrelate.
pub fn trial_seed(master_seed: u64, sparsity: usize, trial_index: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
    let a = mix(master_seed.wrapping_add(0x9e3779b97f4a7c15));
    let b = mix(a ^ mix((sparsity as u64).wrapping_add(0x9e3779b97f4a7c15)));
    mix(b ^ mix((trial_index as u64).wrapping_add(0x3c6ef372fe94f82a)))
}

/// Draw an s-sparse ground truth and its noiseless measurement.
///
/// The support is uniform over size-s index sets; values are standard
/// normal, redrawn while |value| < 0.1 so the support is unambiguous.
pub fn synth_signal(dict: &Dictionary, s: usize, trial_seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (n, k) = (dict.rows(), dict.cols());
    if s < 1 || s > n {
        return Err(Error::param(format!(
            "sparsity {s} outside [1, N] = [1, {n}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    // partial Fisher-Yates for a uniform s-subset
    let mut pool: Vec<usize> = (0..k).collect();
    for i in 0..s {
        let j = rng.random_range(i..k);
        pool.swap(i, j);
    }
    let mut support: Vec<usize> = pool[..s].to_vec();
    support.sort_unstable();
    let mut x = vec![0.0f64; k];
    for &i in &support {
        let v: f64 = loop {
            let v: f64 = StandardNormal.sample(&mut rng);
            if v.abs() >= 0.1 {
                break v;
            }
        };
        x[i] = v;
    }
    let y = dict.mat().mul_vec(&x);
    Ok((x, y))
}

struct TrialOutcome {
    success: bool,
    iterations: u64,
    errored: bool,
    sym_diff: Vec<usize>,
}

fn run_trial(
    dict: &Dictionary,
    graph: Option<&CoherencyGraph>,
    partition: Option<&Partition>,
    sv: &SolverSpec,
    spec: &TrialSpec,
    s: usize,
    trial_index: usize,
) -> TrialOutcome {
    let seed = trial_seed(spec.master_seed, s, trial_index);
    let (x_true, y) = synth_signal(dict, s, seed).expect("sparsity validated");
    let true_support: Vec<usize> = x_true
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, _)| i)
        .collect();
    let result: Result<SparseSolution> = match sv.kind {
        SolverKind::L1 => solve_l1(dict, &y, &sv.config),
        SolverKind::Irls => solve_irls(dict, &y, &sv.config),
        SolverKind::McgIrls => {
            solve_mcg_irls(dict, graph.expect("graph validated"), &y, &sv.config)
        }
        SolverKind::Combinatorial => solve_combinatorial(
            dict,
            partition.expect("partition validated"),
            spec.partition_params.expect("params validated").p,
            &y,
            &sv.config,
        )
        .map(|c| c.solution),
    };
    match result {
        Ok(sol) => {
            let success = match spec.success_criterion {
                SuccessCriterion::ExactSupport => sol.support == true_support,
                SuccessCriterion::RelativeError { threshold } => {
                    let diff: f64 = sol
                        .coefficients
                        .iter()
                        .zip(&x_true)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    diff / norm2(&x_true) < threshold
                }
            };
            let estimate = top_s_support(&sol.coefficients, s);
            let sym_diff = symmetric_difference(&true_support, &estimate);
            TrialOutcome {
                success,
                iterations: sol.iterations as u64,
                errored: false,
                sym_diff,
            }
        }
        // a failed solve counts as a miss on every true-support atom
        Err(_) => TrialOutcome {
            success: false,
            iterations: 0,
            errored: true,
            sym_diff: true_support,
        },
    }
}

/// Indices of the s largest magnitudes, ties broken toward the lower index.
fn top_s_support(coefficients: &[f64], s: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..coefficients.len()).collect();
    idx.sort_by(|&a, &b| {
        coefficients[b]
            .abs()
            .partial_cmp(&coefficients[a].abs())
            .expect("magnitudes are comparable")
            .then(a.cmp(&b))
    });
    idx.truncate(s);
    idx.sort_unstable();
    idx
}

/// Indices in exactly one of the two sorted lists.
fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(&x), Some(&y)) if x < y => {
                out.push(x);
                i += 1;
            }
            (Some(_), Some(&y)) => {
                out.push(y);
                j += 1;
            }
            (Some(&x), None) => {
                out.push(x);
                i += 1;
            }
            (None, Some(&y)) => {
                out.push(y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Run the full sweep described by `spec`.
pub fn run_recovery_sweep(spec: &TrialSpec) -> Result<ExperimentReport> {
    let dict = spec.dict_source.build()?;
    spec.validate(&dict)?;
    let graph = match &spec.mcg_params {
        Some(mp) => Some(build_mcg(&dict, mp.order, mp.threshold, PruneConfig::Off)?),
        None => None,
    };
    let partition = match &spec.partition_params {
        Some(pp) => Some(rank_illness(
            &dict,
            graph.as_ref().expect("mcg_params validated alongside"),
            pp.m,
        )?),
        None => None,
    };
    let k = dict.cols();
    let mut solvers = Vec::with_capacity(spec.solvers.len());
    for sv in &spec.solvers {
        let mut per_sparsity = Vec::with_capacity(spec.sparsity_range.len());
        let mut atom_error_counts = vec![0u64; k];
        for &s in &spec.sparsity_range {
            let outcomes: Vec<TrialOutcome> = (0..spec.trials_per_s)
                .into_par_iter()
                .map(|t| run_trial(&dict, graph.as_ref(), partition.as_ref(), sv, spec, s, t))
                .collect();
            let mut successes = 0u64;
            let mut solver_errors = 0u64;
            let mut iterations_total = 0u64;
            for o in &outcomes {
                successes += o.success as u64;
                solver_errors += o.errored as u64;
                iterations_total += o.iterations;
                for &i in &o.sym_diff {
                    atom_error_counts[i] += 1;
                }
            }
            per_sparsity.push(SparsityStats {
                sparsity: s,
                trials: spec.trials_per_s as u64,
                successes,
                solver_errors,
                mean_iterations: iterations_total as f64 / spec.trials_per_s as f64,
            });
        }
        solvers.push(SolverReport {
            label: sv.label(),
            per_sparsity,
            atom_error_counts,
        });
    }

    let mut memberships = Vec::new();
    let mut correlations = Vec::new();
    if !spec.correlation_orders.is_empty() {
        let t = spec
            .mcg_params
            .as_ref()
            .expect("validated alongside correlation orders")
            .threshold;
        for &order in &spec.correlation_orders {
            let g = build_mcg(&dict, order, t, PruneConfig::Off)?;
            let counts: Vec<u64> = g.membership_histogram().iter().map(|&c| c as u64).collect();
            for sr in &solvers {
                let r = pearson_counts(&counts, &sr.atom_error_counts);
                correlations.push(CorrelationEntry {
                    solver: sr.label.clone(),
                    order,
                    pearson: r,
                });
            }
            memberships.push(MembershipEntry { order, counts });
        }
    }

    Ok(ExperimentReport {
        spec: spec.clone(),
        dict_rows: dict.rows(),
        dict_cols: dict.cols(),
        solvers,
        memberships,
        correlations,
    })
}

/// Pearson correlation, or None when either input has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

fn pearson_counts(a: &[u64], b: &[u64]) -> Option<f64> {
    let xs: Vec<f64> = a.iter().map(|&v| v as f64).collect();
    let ys: Vec<f64> = b.iter().map(|&v| v as f64).collect();
    pearson(&xs, &ys)
}

/// Correlate per-atom error counts against graph membership histograms
/// built fresh at each requested order.
pub fn membership_error_correlation(
    dict: &Dictionary,
    error_counts: &[u64],
    orders: &[usize],
    threshold: f64,
) -> Result<Vec<(usize, Option<f64>)>> {
    if error_counts.len() != dict.cols() {
        return Err(Error::dim(format!(
            "error counts have length {} but the dictionary has {} atoms",
            error_counts.len(),
            dict.cols()
        )));
    }
    let mut out = Vec::with_capacity(orders.len());
    for &order in orders {
        let g = build_mcg(dict, order, threshold, PruneConfig::Off)?;
        let counts: Vec<u64> = g.membership_histogram().iter().map(|&c| c as u64).collect();
        out.push((order, pearson_counts(&counts, error_counts)));
    }
    Ok(out)
}

/// Mean iteration counts per sparsity, per solver, straight from the report.
pub fn iteration_profile(report: &ExperimentReport) -> Vec<(String, Vec<(usize, f64)>)> {
    report
        .solvers
        .iter()
        .map(|sr| {
            (
                sr.label.clone(),
                sr.per_sparsity
                    .iter()
                    .map(|st| (st.sparsity, st.mean_iterations))
                    .collect(),
            )
        })
        .collect()
}
