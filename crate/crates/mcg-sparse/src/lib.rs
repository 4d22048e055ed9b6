//! Sparse recovery with coherency-graph analysis.
//!
//! The central object is the coherency graph of a dictionary: enumerate all
//! column subsets of a fixed order, mark a subset ill when the smallest
//! eigenvalue of its Gram matrix drops below `1 - threshold`, and connect
//! every pair of atoms that appears together in some ill subset. The graph
//! localizes where recovery is fragile, and two solvers put that information
//! to work:
//!
//! * a reweighted least-squares solver whose weights mix each coefficient's
//!   magnitude with the magnitudes of its graph neighbors, steering mass away
//!   from clusters of near-dependent atoms, and
//! * a combinatorial search that splits the dictionary into a well-conditioned
//!   block and an ill block, then sweeps small combinations of ill atoms so
//!   each subproblem is better conditioned than the original.
//!
//! Supporting pieces: dictionary generators (random Gaussian, overcomplete
//! DCT in one and two dimensions) and a text file format for exchange;
//! restricted-isometry and spark diagnostics; an exact failure probability
//! (plus the loose closed-form bound) for the combinatorial search; and a
//! Monte Carlo harness that sweeps sparsity levels, compares solvers, and
//! writes machine-readable reports.
//!
//! ```
//! use mcg_sparse::{build_mcg, gen_gaussian, solve_mcg_irls, PruneConfig, SolverConfig};
//!
//! let dict = gen_gaussian(12, 20, 7)?;
//! let graph = build_mcg(&dict, 2, 0.4, PruneConfig::Off)?;
//!
//! // y = 1.3 * atom 4 - 0.9 * atom 11
//! let mut y = vec![0.0; 12];
//! for r in 0..12 {
//!     y[r] = 1.3 * dict.mat()[(r, 4)] - 0.9 * dict.mat()[(r, 11)];
//! }
//! let sol = solve_mcg_irls(&dict, &graph, &y, &SolverConfig::default())?;
//! assert_eq!(sol.support, vec![4, 11]);
//! # Ok::<(), mcg_sparse::Error>(())
//! ```
//!
//! The `mcg-sparse` binary exposes the same functionality as subcommands
//! (`gen`, `mcg`, `solve`, `experiment`, `perror`), and the `examples/`
//! directory walks through each capability end to end.

pub mod cli;
pub mod combinatorics;
pub mod dictionary;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod mcg;
pub mod solvers;
pub mod util;

pub use dictionary::{
    gen_gaussian, gen_odct, gen_odct2d, ConditioningReport, Dictionary, SparkBound,
    SubsetIndex,
};
pub use error::{Error, Result};
pub use mcg::{build_mcg, build_mcg_with_cap, CoherencyGraph, IllSubset, PruneConfig};
pub use solvers::{
    error_probability, rank_illness, solve_combinatorial, solve_combinatorial_with_cap,
    solve_irls, solve_l1, solve_mcg_irls, CombinatorialSolution, ErrorProbability,
    NeighborAggregate, Partition, PqSchedule, SolverConfig, SparseSolution,
};
pub use experiments::{
    run_recovery_sweep, synth_signal, write_report, DictSource, ExperimentReport,
    SolverKind, SolverSpec, SuccessCriterion, TrialSpec,
};
