//! Sparse recovery solvers: reweighted least squares in three flavors
//! (first-power weights for l1, squared-magnitude weights, graph-moderated
//! weights) plus a combinatorial search that solves an l1 subproblem per
//! candidate column set, and the exact failure probability of that search.

mod combinatorial;
mod irls;
mod probability;

pub use combinatorial::{
    rank_illness, solve_combinatorial, solve_combinatorial_with_cap, CombinatorialSolution,
    Partition,
};
pub use irls::{
    solve_irls, solve_irls_traced, solve_l1, solve_mcg_irls, IterationTrace,
};
pub use probability::{error_probability, ErrorProbability};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A recovered coefficient vector with bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSolution {
    /// Full-length coefficient vector x.
    pub coefficients: Vec<f64>,
    /// Indices with |x_i| above the relative support cutoff, ascending.
    /// Empty when x is the zero vector.
    pub support: Vec<usize>,
    /// Euclidean norm of y - D x.
    pub residual_norm: f64,
    /// Number of coefficient updates performed.
    pub iterations: usize,
    pub converged: bool,
    /// Final objective: the l1 norm for the l1 solver, the weighted
    /// quadratic for the reweighted solvers.
    pub objective: f64,
}

/// Exponent schedule for the graph-weighted solver. The coefficient weight
/// is (1/(|x_i|+d))^p (1/(f_i+d))^q where f_i aggregates the neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PqSchedule {
    /// Start at (p, q) = (0, 2) and move linearly to (2, 0) over the first
    /// `ramp_iters` weighted updates, then hold.
    Ramp { ramp_iters: usize },
    /// Hold fixed exponents throughout.
    Fixed { p: f64, q: f64 },
}

impl PqSchedule {
    /// Exponents for weighted update number `update` (0-based).
    pub fn exponents(&self, update: usize) -> (f64, f64) {
        match *self {
            PqSchedule::Ramp { ramp_iters } => {
                let tau = if ramp_iters == 0 {
                    1.0
                } else {
                    (update as f64 / ramp_iters as f64).min(1.0)
                };
                (2.0 * tau, 2.0 * (1.0 - tau))
            }
            PqSchedule::Fixed { p, q } => (p, q),
        }
    }
}

/// How a neighborhood's coefficients collapse to the scalar f_i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborAggregate {
    MaxAbs,
    MeanAbs,
}

/// Tuning knobs shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Hard cap on coefficient updates.
    pub max_iters: usize,
    /// Initial damping term added inside every weight denominator.
    pub damping_init: f64,
    /// Multiplier applied to the damping when the iterate settles.
    pub damping_decay: f64,
    /// Relative iterate change below which the damping decays.
    pub damping_step_tol: f64,
    /// Damping never drops below this floor.
    pub damping_floor: f64,
    /// Relative iterate change declaring convergence (with damping floored).
    pub convergence_tol: f64,
    /// Support cutoff relative to the largest coefficient magnitude.
    pub support_tol: f64,
    /// Measurement noise variance; zero selects the equality-constrained
    /// update, positive the regularized unconstrained one.
    pub noise_variance: f64,
    /// A candidate is feasible when residual <= feasibility_tol * |y|.
    pub feasibility_tol: f64,
    /// Exponent schedule for the graph-weighted solver.
    pub pq_schedule: PqSchedule,
    /// Neighborhood aggregation for the graph-weighted solver.
    pub neighbor_aggregate: NeighborAggregate,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 200,
            damping_init: 1e-1,
            damping_decay: 0.5,
            damping_step_tol: 1e-2,
            damping_floor: 1e-8,
            convergence_tol: 1e-6,
            support_tol: 1e-4,
            noise_variance: 0.0,
            feasibility_tol: 1e-6,
            pq_schedule: PqSchedule::Ramp { ramp_iters: 20 },
            neighbor_aggregate: NeighborAggregate::MaxAbs,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.max_iters == 0 {
            problems.push("max_iters must be positive".to_string());
        }
        for (name, v) in [
            ("damping_init", self.damping_init),
            ("damping_step_tol", self.damping_step_tol),
            ("damping_floor", self.damping_floor),
            ("convergence_tol", self.convergence_tol),
            ("support_tol", self.support_tol),
            ("feasibility_tol", self.feasibility_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                problems.push(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.damping_decay > 0.0 && self.damping_decay < 1.0) {
            problems.push(format!(
                "damping_decay must lie in (0, 1), got {}",
                self.damping_decay
            ));
        }
        if !(self.noise_variance >= 0.0) || !self.noise_variance.is_finite() {
            problems.push(format!(
                "noise_variance must be nonnegative, got {}",
                self.noise_variance
            ));
        }
        if let PqSchedule::Fixed { p, q } = self.pq_schedule {
            if !(p >= 0.0 && q >= 0.0) {
                problems.push(format!("fixed exponents must be nonnegative, got p={p} q={q}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::param(problems.join("; ")))
        }
    }

    /// Support cutoff in absolute terms for a coefficient vector with the
    /// given largest magnitude.
    pub(crate) fn support_cutoff(&self, max_abs: f64) -> f64 {
        self.support_tol * max_abs
    }
}

/// Indices with magnitude above the relative cutoff, ascending.
pub(crate) fn extract_support(coefficients: &[f64], cfg: &SolverConfig) -> Vec<usize> {
    let max_abs = coefficients.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs == 0.0 {
        return Vec::new();
    }
    let cutoff = cfg.support_cutoff(max_abs);
    coefficients
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > cutoff)
        .map(|(i, _)| i)
        .collect()
}
