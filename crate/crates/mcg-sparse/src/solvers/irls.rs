//! Reweighted least squares with three weight rules.
//!
//! Each iteration solves for the minimizer of the weighted quadratic
//! x' W x subject to D x = y, which has the closed form
//! x = W^-1 D' (D W^-1 D')^-1 y. With measurement noise (variance s2) the
//! constraint is dropped and x = (D'D + s2 W)^-1 D' y instead. Weights are
//! recomputed from the previous iterate:
//!
//! - first-power: w_i = 1/(|x_i| + d), driving the l1 objective;
//! - squared-magnitude: w_i = 1/(x_i^2 + d);
//! - graph-moderated: w_i = (1/(|x_i| + d))^p (1/(f_i + d))^q, where f_i
//!   aggregates |x| over atom i's coherency-graph neighborhood, so an atom
//!   is only down-weighted once its whole neighborhood looks inactive.
//!
//! The damping d starts large and halves whenever the iterate settles,
//! flooring at a small positive value; convergence requires both a tiny
//! relative step and a floored damping.
//!
//! Signals are solved at unit norm: y is scaled to length 1 on entry and
//! the solution scaled back on exit, so the damping constants and
//! tolerances are independent of measurement units and solutions scale
//! linearly with the input.

use super::{extract_support, NeighborAggregate, SolverConfig, SparseSolution};
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, solve_spd, Mat};
use crate::mcg::CoherencyGraph;

/// Per-iteration record for convergence audits. The objective fields are
/// the weighted quadratic (plus the residual term when noise is modeled)
/// under the weights used for this update, evaluated at the previous and
/// the new iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub iteration: usize,
    pub damping: f64,
    pub rel_change: f64,
    pub objective_prev: f64,
    pub objective_new: f64,
}

enum WeightRule<'a> {
    FirstPower,
    SquaredMagnitude,
    Graph { graph: &'a CoherencyGraph },
}

/// l1-driving solver: first-power weights.
pub fn solve_l1(dict: &Dictionary, y: &[f64], cfg: &SolverConfig) -> Result<SparseSolution> {
    Ok(run(dict, y, cfg, WeightRule::FirstPower, false)?.0)
}

/// Squared-magnitude weights.
pub fn solve_irls(dict: &Dictionary, y: &[f64], cfg: &SolverConfig) -> Result<SparseSolution> {
    Ok(run(dict, y, cfg, WeightRule::SquaredMagnitude, false)?.0)
}

/// Squared-magnitude weights, with a per-iteration trace.
pub fn solve_irls_traced(
    dict: &Dictionary,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<(SparseSolution, Vec<IterationTrace>)> {
    run(dict, y, cfg, WeightRule::SquaredMagnitude, true)
}

/// Graph-moderated weights following the configured p/q schedule.
pub fn solve_mcg_irls(
    dict: &Dictionary,
    graph: &CoherencyGraph,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<SparseSolution> {
    if graph.num_nodes() != dict.cols() {
        return Err(Error::dim(format!(
            "graph has {} nodes but the dictionary has {} atoms",
            graph.num_nodes(),
            dict.cols()
        )));
    }
    Ok(run(dict, y, cfg, WeightRule::Graph { graph }, false)?.0)
}

fn run(
    dict: &Dictionary,
    y: &[f64],
    cfg: &SolverConfig,
    rule: WeightRule,
    want_trace: bool,
) -> Result<(SparseSolution, Vec<IterationTrace>)> {
    cfg.validate()?;
    let (n, k) = (dict.rows(), dict.cols());
    if y.len() != n {
        return Err(Error::dim(format!(
            "signal has length {} but the dictionary has {} rows",
            y.len(),
            n
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("signal contains a non-finite entry"));
    }
    let y_norm = norm2(y);
    if y_norm == 0.0 {
        return Ok((
            SparseSolution {
                coefficients: vec![0.0; k],
                support: Vec::new(),
                residual_norm: 0.0,
                iterations: 0,
                converged: true,
                objective: 0.0,
            },
            Vec::new(),
        ));
    }

    // Iterate on the unit-norm signal so the absolute tuning constants
    // (damping, tolerances) mean the same thing for every input and the
    // solution scales linearly with y. Coefficients scale back on exit.
    let y_unit: Vec<f64> = y.iter().map(|v| v / y_norm).collect();
    let y = y_unit.as_slice();

    // per-atom neighbor lists, resolved once
    let neighborhoods: Option<Vec<Vec<usize>>> = match &rule {
        WeightRule::Graph { graph } => Some(
            (0..k)
                .map(|i| {
                    graph
                        .neighborhood(i)
                        .expect("node index in range")
                        .indices()
                        .to_vec()
                })
                .collect(),
        ),
        _ => None,
    };

    // Noise variance carries the units of y squared, so it normalizes with it.
    let sigma2 = cfg.noise_variance / (y_norm * y_norm);
    let noisy = sigma2 > 0.0;
    let (gram, dty) = if noisy {
        (Some(dict.mat().gram()), Some(dict.mat().mul_transpose_vec(y)))
    } else {
        (None, None)
    };

    // inv_w holds 1/w_i, the per-atom scale of the weighted update
    let mut inv_w = vec![1.0f64; k];
    let mut delta = cfg.damping_init;
    let mut x = vec![0.0f64; k];
    let mut iterations = 0usize;
    let mut converged = false;
    let mut weighted_updates = 0usize;
    let mut trace = Vec::new();

    for iter in 1..=cfg.max_iters {
        if iter >= 2 {
            compute_inv_w(
                &mut inv_w,
                &x,
                delta,
                &rule,
                neighborhoods.as_deref(),
                cfg,
                weighted_updates,
            );
            weighted_updates += 1;
        }
        let x_new = if noisy {
            noisy_update(
                gram.as_ref().expect("precomputed"),
                dty.as_ref().expect("precomputed"),
                &inv_w,
                sigma2,
            )?
        } else {
            constrained_update(dict, y, &inv_w)?
        };
        iterations = iter;
        let prev_norm = norm2(&x);
        let diff: f64 = x_new
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let rel_change = diff / prev_norm.max(1e-12);
        if want_trace && iter >= 2 {
            trace.push(IterationTrace {
                iteration: iter,
                damping: delta,
                rel_change,
                objective_prev: trace_objective(dict, y, &x, &inv_w, sigma2),
                objective_new: trace_objective(dict, y, &x_new, &inv_w, sigma2),
            });
        }
        x = x_new;
        if iter >= 2 && rel_change < cfg.convergence_tol && delta <= cfg.damping_floor {
            converged = true;
            break;
        }
        if rel_change < cfg.damping_step_tol {
            delta = (delta * cfg.damping_decay).max(cfg.damping_floor);
        }
    }

    let residual = y_norm
        * {
            let dx = dict.mat().mul_vec(&x);
            y.iter()
                .zip(&dx)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        };
    let support = extract_support(&x, cfg);
    for v in x.iter_mut() {
        *v *= y_norm;
    }
    let objective = match rule {
        WeightRule::FirstPower => x.iter().map(|v| v.abs()).sum(),
        // weighted quadratic, reported in the unit-norm frame it was
        // minimized in
        _ => x
            .iter()
            .zip(&inv_w)
            .map(|(v, iw)| (v / y_norm) * (v / y_norm) / iw)
            .sum(),
    };
    Ok((
        SparseSolution {
            coefficients: x,
            support,
            residual_norm: residual,
            iterations,
            converged,
            objective,
        },
        trace,
    ))
}

fn compute_inv_w(
    inv_w: &mut [f64],
    x: &[f64],
    delta: f64,
    rule: &WeightRule,
    neighborhoods: Option<&[Vec<usize>]>,
    cfg: &SolverConfig,
    weighted_updates: usize,
) {
    match rule {
        WeightRule::FirstPower => {
            for (iw, v) in inv_w.iter_mut().zip(x) {
                *iw = v.abs() + delta;
            }
        }
        WeightRule::SquaredMagnitude => {
            for (iw, v) in inv_w.iter_mut().zip(x) {
                *iw = v * v + delta;
            }
        }
        WeightRule::Graph { .. } => {
            let (p, q) = cfg.pq_schedule.exponents(weighted_updates);
            let nbs = neighborhoods.expect("neighborhoods resolved for graph rule");
            for i in 0..x.len() {
                let f = match cfg.neighbor_aggregate {
                    NeighborAggregate::MaxAbs => nbs[i]
                        .iter()
                        .map(|&j| x[j].abs())
                        .fold(0.0f64, f64::max),
                    NeighborAggregate::MeanAbs => {
                        let sum: f64 = nbs[i].iter().map(|&j| x[j].abs()).sum();
                        sum / nbs[i].len() as f64
                    }
                };
                inv_w[i] = pow_pos(x[i].abs() + delta, p) * pow_pos(f + delta, q);
            }
        }
    }
}

/// base^e for positive base, with fast paths for the exponents the ramp
/// schedule hits exactly.
fn pow_pos(base: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        base
    } else if e == 2.0 {
        base * base
    } else {
        base.powf(e)
    }
}

/// Minimize x' W x subject to D x = y: scale-solve-backsubstitute.
fn constrained_update(dict: &Dictionary, y: &[f64], inv_w: &[f64]) -> Result<Vec<f64>> {
    let (n, k) = (dict.rows(), dict.cols());
    assert_eq!(inv_w.len(), k, "one weight per atom");
    let mut a = Mat::zeros(n, n);
    for (i, &c) in inv_w.iter().enumerate() {
        let col = dict.atom(i);
        for b in 0..n {
            let t = c * col[b];
            let acol = a.col_mut(b);
            for (r, &cr) in col.iter().take(b + 1).enumerate() {
                acol[r] += t * cr;
            }
        }
    }
    for b in 0..n {
        for r in 0..b {
            a[(b, r)] = a[(r, b)];
        }
    }
    let z = solve_spd(&a, y)?;
    Ok((0..k).map(|i| inv_w[i] * dot(dict.atom(i), &z)).collect())
}

/// Minimize |y - D x|^2 + s2 x' W x: solve (D'D + s2 W) x = D'y.
fn noisy_update(gram: &Mat, dty: &[f64], inv_w: &[f64], sigma2: f64) -> Result<Vec<f64>> {
    let k = gram.rows();
    let mut m = gram.clone();
    for i in 0..k {
        m[(i, i)] += sigma2 / inv_w[i];
    }
    solve_spd(&m, dty)
}

fn trace_objective(dict: &Dictionary, y: &[f64], x: &[f64], inv_w: &[f64], sigma2: f64) -> f64 {
    let weighted: f64 = x.iter().zip(inv_w).map(|(v, iw)| v * v / iw).sum();
    if sigma2 > 0.0 {
        let dx = dict.mat().mul_vec(x);
        let res: f64 = y.iter().zip(&dx).map(|(a, b)| (a - b) * (a - b)).sum();
        res + sigma2 * weighted
    } else {
        weighted
    }
}
