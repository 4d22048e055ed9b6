//! Combinatorial search over candidate column sets: concatenate the
//! well-conditioned block D1 with every P-subset of the ill block D2,
//! solve an l1 subproblem on each, and keep the sparsest feasible winner.

use rayon::prelude::*;

use super::irls::solve_l1;
use super::{SolverConfig, SparseSolution};
use crate::combinatorics::{binomial, for_each_combination};
use crate::dictionary::{Dictionary, SubsetIndex, DEFAULT_ENUM_CAP};
use crate::error::{Error, Result};
use crate::linalg::{norm2, Mat};
use crate::mcg::CoherencyGraph;

/// A split of the atom indices into a well-conditioned part d1 and an
/// ill-conditioned part d2. Together they cover every index exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    d1: SubsetIndex,
    d2: SubsetIndex,
}

impl Partition {
    /// Build from two index lists that must partition {0, .., k-1}.
    pub fn new(d1: Vec<usize>, d2: Vec<usize>, k: usize) -> Result<Self> {
        let d1 = SubsetIndex::new(d1)?;
        let d2 = SubsetIndex::new(d2)?;
        let mut seen = vec![false; k];
        for &i in d1.indices().iter().chain(d2.indices()) {
            if i >= k {
                return Err(Error::subset(format!(
                    "partition index {i} out of range for {k} atoms"
                )));
            }
            if seen[i] {
                return Err(Error::subset(format!("partition repeats index {i}")));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::subset(format!(
                "partition must cover all {k} indices"
            )));
        }
        Ok(Partition { d1, d2 })
    }

    pub fn d1(&self) -> &SubsetIndex {
        &self.d1
    }

    pub fn d2(&self) -> &SubsetIndex {
        &self.d2
    }

    pub fn num_atoms(&self) -> usize {
        self.d1.len() + self.d2.len()
    }
}

/// Rank atoms by graph ill-ness and place the top `m` into d2.
///
/// Ordering: membership count descending, then summed delta over the ill
/// subsets containing the atom descending, then index ascending.
pub fn rank_illness(dict: &Dictionary, graph: &CoherencyGraph, m: usize) -> Result<Partition> {
    let k = dict.cols();
    if graph.num_nodes() != k {
        return Err(Error::dim(format!(
            "graph has {} nodes but the dictionary has {k} atoms",
            graph.num_nodes()
        )));
    }
    if m == 0 || m >= k {
        return Err(Error::param(format!(
            "ill-block size {m} outside (0, {k})"
        )));
    }
    let counts = graph.membership_histogram();
    let mut delta_sums = vec![0.0f64; k];
    for ill in graph.ill_subsets() {
        for &i in ill.indices.indices() {
            delta_sums[i] += ill.delta;
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        counts[b]
            .cmp(&counts[a])
            .then_with(|| {
                delta_sums[b]
                    .partial_cmp(&delta_sums[a])
                    .expect("delta sums are finite")
            })
            .then_with(|| a.cmp(&b))
    });
    let mut d2: Vec<usize> = order[..m].to_vec();
    d2.sort_unstable();
    let mut d1: Vec<usize> = order[m..].to_vec();
    d1.sort_unstable();
    Partition::new(d1, d2, k)
}

/// Outcome of the combinatorial search.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinatorialSolution {
    /// The winning candidate, mapped back to the full coefficient space.
    pub solution: SparseSolution,
    /// The d2 columns included in the winning candidate set (empty for P=0).
    pub winning_subset: Vec<usize>,
    /// Number of subproblems solved, C(|d2|, P).
    pub subproblems: usize,
    /// How many candidates met the feasibility cutoff.
    pub feasible_count: usize,
}

pub fn solve_combinatorial(
    dict: &Dictionary,
    part: &Partition,
    p: usize,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<CombinatorialSolution> {
    solve_combinatorial_with_cap(dict, part, p, y, cfg, DEFAULT_ENUM_CAP)
}

pub fn solve_combinatorial_with_cap(
    dict: &Dictionary,
    part: &Partition,
    p: usize,
    y: &[f64],
    cfg: &SolverConfig,
    cap: u128,
) -> Result<CombinatorialSolution> {
    cfg.validate()?;
    let k = dict.cols();
    if part.num_atoms() != k {
        return Err(Error::dim(format!(
            "partition covers {} atoms but the dictionary has {k}",
            part.num_atoms()
        )));
    }
    let m2 = part.d2().len();
    if p > m2 {
        return Err(Error::param(format!(
            "subset size {p} exceeds the ill block size {m2}"
        )));
    }
    let required = binomial(m2, p);
    if required > cap {
        return Err(Error::EnumerationCap { required, cap });
    }
    if y.len() != dict.rows() {
        return Err(Error::dim(format!(
            "signal has length {} but the dictionary has {} rows",
            y.len(),
            dict.rows()
        )));
    }

    // candidate P-subsets of d2, in lexicographic order
    let d2 = part.d2().indices();
    let mut choices: Vec<Vec<usize>> = Vec::with_capacity(required as usize);
    for_each_combination(m2, p, |c| {
        choices.push(c.iter().map(|&t| d2[t]).collect());
    });

    let candidates: Vec<Result<(SparseSolution, Vec<usize>)>> = choices
        .into_par_iter()
        .map(|chosen| {
            // merged, sorted column set for this subproblem
            let mut columns: Vec<usize> = part.d1().indices().to_vec();
            columns.extend(chosen.iter().copied());
            columns.sort_unstable();
            let mut sub = Mat::zeros(dict.rows(), columns.len());
            for (local, &global) in columns.iter().enumerate() {
                sub.col_mut(local).copy_from_slice(dict.atom(global));
            }
            let sub_dict = Dictionary::from_unit_columns(sub)?;
            let sub_sol = solve_l1(&sub_dict, y, cfg)?;
            // expand to the full coefficient space
            let mut coefficients = vec![0.0; k];
            for (local, &global) in columns.iter().enumerate() {
                coefficients[global] = sub_sol.coefficients[local];
            }
            let support: Vec<usize> =
                sub_sol.support.iter().map(|&local| columns[local]).collect();
            Ok((
                SparseSolution {
                    coefficients,
                    support,
                    residual_norm: sub_sol.residual_norm,
                    iterations: sub_sol.iterations,
                    converged: sub_sol.converged,
                    objective: sub_sol.objective,
                },
                chosen,
            ))
        })
        .collect();

    let y_norm = norm2(y);
    let feas_cut = cfg.feasibility_tol * y_norm;
    let mut feasible_count = 0usize;
    // winner among feasible candidates: fewest support atoms, then smallest
    // l1 norm, then earliest (lexicographically smallest) subset
    let mut best_feasible: Option<(usize, f64, SparseSolution, Vec<usize>)> = None;
    let mut best_residual: Option<(f64, SparseSolution, Vec<usize>)> = None;
    let mut count = 0usize;
    for cand in candidates {
        let (sol, chosen) = cand?;
        count += 1;
        if best_residual
            .as_ref()
            .is_none_or(|(r, _, _)| sol.residual_norm < *r)
        {
            best_residual = Some((sol.residual_norm, sol.clone(), chosen.clone()));
        }
        if sol.residual_norm <= feas_cut {
            feasible_count += 1;
            let l1: f64 = sol.coefficients.iter().map(|v| v.abs()).sum();
            let better = match &best_feasible {
                None => true,
                Some((cards, l1s, _, _)) => {
                    sol.support.len() < *cards
                        || (sol.support.len() == *cards && l1 < *l1s)
                }
            };
            if better {
                best_feasible = Some((sol.support.len(), l1, sol, chosen));
            }
        }
    }
    debug_assert_eq!(count as u128, required);

    match best_feasible {
        Some((_, _, solution, winning_subset)) => Ok(CombinatorialSolution {
            solution,
            winning_subset,
            subproblems: count,
            feasible_count,
        }),
        None => {
            let (_, mut solution, winning_subset) =
                best_residual.ok_or_else(|| Error::param("no candidate subsets to try"))?;
            solution.converged = false;
            Ok(CombinatorialSolution {
                solution,
                winning_subset,
                subproblems: count,
                feasible_count: 0,
            })
        }
    }
}
