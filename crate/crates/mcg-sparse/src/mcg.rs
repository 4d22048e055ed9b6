//! The matrix coherency graph: atoms are nodes, and every size-`order`
//! column subset whose restricted-isometry delta reaches the threshold
//! contributes a hyperedge. The pairwise clique expansion of those
//! hyperedges drives per-atom neighborhoods; the hyperedges themselves are
//! kept for export and ranking.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial;
use crate::dictionary::{Dictionary, SubsetIndex, DEFAULT_ENUM_CAP};
use crate::error::{Error, Result};
use crate::linalg::{min_sym_eigenvalue, Mat};

/// One ill subset: its atom indices and its restricted-isometry delta.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IllSubset {
    pub indices: SubsetIndex,
    pub delta: f64,
}

/// Candidate filtering for graph construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PruneConfig {
    /// Enumerate every size-`order` subset. The result is exact.
    Off,
    /// Only visit subsets whose every internal pair has absolute Gram entry
    /// at least `t_pair`. The resulting ill-subset list is a lower bound on
    /// the exhaustive one.
    PairCoherence { t_pair: f64 },
}

impl PruneConfig {
    /// Pair pruning at half the subset threshold, a filter loose enough to
    /// keep every subset whose ill-ness is driven by strong pairwise overlap.
    pub fn pair_coherence_default(threshold: f64) -> Self {
        PruneConfig::PairCoherence {
            t_pair: threshold / 2.0,
        }
    }
}

/// Immutable coherency graph over the atoms of one dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherencyGraph {
    order: usize,
    threshold: f64,
    num_nodes: usize,
    ill_subsets: Vec<IllSubset>,
    pruned: bool,
    // derived: clique expansion of the hyperedges, row-major K x K
    adjacency: Vec<bool>,
    membership_counts: Vec<usize>,
}

/// Serialized form; field order fixed so exports are stable.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    order: usize,
    threshold: f64,
    num_nodes: usize,
    ill_subsets: Vec<IllSubset>,
    pruned: bool,
}

/// Build the coherency graph with the default enumeration cap.
pub fn build_mcg(
    dict: &Dictionary,
    order: usize,
    threshold: f64,
    prune: PruneConfig,
) -> Result<CoherencyGraph> {
    build_mcg_with_cap(dict, order, threshold, prune, DEFAULT_ENUM_CAP)
}

pub fn build_mcg_with_cap(
    dict: &Dictionary,
    order: usize,
    threshold: f64,
    prune: PruneConfig,
    cap: u128,
) -> Result<CoherencyGraph> {
    let (n, k) = (dict.rows(), dict.cols());
    if order < 2 || order > n.min(k) {
        return Err(Error::param(format!(
            "graph order {order} outside [2, min(N, K)] = [2, {}]",
            n.min(k)
        )));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::param(format!(
            "threshold {threshold} outside (0, 1)"
        )));
    }
    let t_pair = match prune {
        PruneConfig::Off => {
            let required = binomial(k, order);
            if required > cap {
                return Err(Error::EnumerationCap { required, cap });
            }
            None
        }
        PruneConfig::PairCoherence { t_pair } => {
            if !(0.0..1.0).contains(&t_pair) {
                return Err(Error::param(format!(
                    "pair-coherence cutoff {t_pair} outside [0, 1)"
                )));
            }
            Some(t_pair)
        }
    };
    let gram = dict.mat().gram();
    // Chunk the lexicographic enumeration by first index; each chunk emits
    // its hits already ordered, so the flattened list is deterministic.
    let chunks: Vec<Result<Vec<IllSubset>>> = (0..=(k - order))
        .into_par_iter()
        .map(|first| {
            let mut hits = Vec::new();
            let mut subset = vec![first];
            visit_extensions(&gram, k, order, t_pair, &mut subset, &mut |s| {
                let mut sub = Mat::zeros(order, order);
                for b in 0..order {
                    for a in 0..=b {
                        let v = gram[(s[a], s[b])];
                        sub[(a, b)] = v;
                        sub[(b, a)] = v;
                    }
                }
                let delta = (1.0 - min_sym_eigenvalue(&sub)?).clamp(0.0, 1.0);
                if delta >= threshold {
                    hits.push(IllSubset {
                        indices: SubsetIndex::from_sorted_unchecked(s.to_vec()),
                        delta,
                    });
                }
                Ok(())
            })?;
            Ok(hits)
        })
        .collect();
    let mut ill_subsets = Vec::new();
    for chunk in chunks {
        ill_subsets.extend(chunk?);
    }
    CoherencyGraph::from_parts(order, threshold, k, ill_subsets, t_pair.is_some())
}

/// Depth-first lexicographic extension of `subset` to size `order`,
/// optionally skipping candidates that fail the pairwise cutoff.
fn visit_extensions(
    gram: &Mat,
    k: usize,
    order: usize,
    t_pair: Option<f64>,
    subset: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if subset.len() == order {
        return visit(subset);
    }
    let start = subset.last().map_or(0, |&last| last + 1);
    let slots_left = order - subset.len();
    for j in start..=(k - slots_left) {
        if let Some(t) = t_pair {
            if subset.iter().any(|&i| gram[(i, j)].abs() < t) {
                continue;
            }
        }
        subset.push(j);
        visit_extensions(gram, k, order, t_pair, subset, visit)?;
        subset.pop();
    }
    Ok(())
}

impl CoherencyGraph {
    /// Assemble a graph from explicit parts, recomputing adjacency and
    /// membership counts and validating every stored subset.
    pub fn from_parts(
        order: usize,
        threshold: f64,
        num_nodes: usize,
        ill_subsets: Vec<IllSubset>,
        pruned: bool,
    ) -> Result<Self> {
        if order < 2 {
            return Err(Error::param(format!("graph order {order} must be at least 2")));
        }
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::param(format!("threshold {threshold} outside (0, 1)")));
        }
        let mut adjacency = vec![false; num_nodes * num_nodes];
        let mut membership_counts = vec![0usize; num_nodes];
        for ill in &ill_subsets {
            let idx = ill.indices.indices();
            if idx.len() != order {
                return Err(Error::subset(format!(
                    "stored subset {idx:?} has size {}, expected the graph order {order}",
                    idx.len()
                )));
            }
            if *idx.last().expect("nonempty") >= num_nodes {
                return Err(Error::subset(format!(
                    "stored subset {idx:?} exceeds node count {num_nodes}"
                )));
            }
            if !(ill.delta >= threshold) {
                return Err(Error::param(format!(
                    "stored subset {idx:?} has delta {} below threshold {threshold}",
                    ill.delta
                )));
            }
            for &i in idx {
                membership_counts[i] += 1;
            }
            for (a, &i) in idx.iter().enumerate() {
                for &j in &idx[a + 1..] {
                    adjacency[i * num_nodes + j] = true;
                    adjacency[j * num_nodes + i] = true;
                }
            }
        }
        Ok(CoherencyGraph {
            order,
            threshold,
            num_nodes,
            ill_subsets,
            pruned,
            adjacency,
            membership_counts,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn ill_subsets(&self) -> &[IllSubset] {
        &self.ill_subsets
    }

    /// True when the build skipped candidates, making the stored subsets a
    /// lower bound on the exhaustive list.
    pub fn is_pruned(&self) -> bool {
        self.pruned
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i < self.num_nodes && j < self.num_nodes && self.adjacency[i * self.num_nodes + j]
    }

    /// All adjacent pairs (i, j) with i < j, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.num_nodes {
            for j in (i + 1)..self.num_nodes {
                if self.adjacency[i * self.num_nodes + j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Node i together with everything adjacent to it, sorted.
    pub fn neighborhood(&self, i: usize) -> Result<SubsetIndex> {
        if i >= self.num_nodes {
            return Err(Error::param(format!(
                "node {i} out of range for a graph with {} nodes",
                self.num_nodes
            )));
        }
        let mut out = Vec::new();
        for j in 0..self.num_nodes {
            if j == i || self.adjacency[i * self.num_nodes + j] {
                out.push(j);
            }
        }
        Ok(SubsetIndex::from_sorted_unchecked(out))
    }

    /// Number of stored ill subsets each atom belongs to.
    pub fn membership_histogram(&self) -> &[usize] {
        &self.membership_counts
    }

    /// Undirected DOT rendering: every node declared, one statement per edge.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph coherency {\n");
        for i in 0..self.num_nodes {
            out.push_str(&format!("  {i};\n"));
        }
        for (i, j) in self.edges() {
            out.push_str(&format!("  {i} -- {j};\n"));
        }
        out.push_str("}\n");
        out
    }

    /// JSON export of the full structure. Export, import, and export again
    /// produces identical bytes.
    pub fn to_json(&self) -> Result<String> {
        let doc = GraphJson {
            order: self.order,
            threshold: self.threshold,
            num_nodes: self.num_nodes,
            ill_subsets: self.ill_subsets.clone(),
            pruned: self.pruned,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphJson = serde_json::from_str(text)?;
        CoherencyGraph::from_parts(
            doc.order,
            doc.threshold,
            doc.num_nodes,
            doc.ill_subsets,
            doc.pruned,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::{gen_gaussian, gen_odct};
    use crate::linalg::dot;
    use itertools::Itertools;

    /// Independent reference: enumerate every subset with itertools and keep
    /// those whose delta (via the public scalar API) reaches the threshold.
    fn brute_force(dict: &Dictionary, order: usize, threshold: f64) -> Vec<IllSubset> {
        let mut out = Vec::new();
        for combo in (0..dict.cols()).combinations(order) {
            let subset = SubsetIndex::new(combo).unwrap();
            let delta = dict.restricted_isometry_delta(&subset).unwrap();
            if delta >= threshold {
                out.push(IllSubset {
                    indices: subset,
                    delta,
                });
            }
        }
        out
    }

    #[test]
    fn orthonormal_dictionary_gives_empty_graph() {
        let d = gen_odct(6, 6).unwrap();
        let g = build_mcg(&d, 2, 0.1, PruneConfig::Off).unwrap();
        assert!(g.ill_subsets().is_empty());
        assert!(g.membership_histogram().iter().all(|&c| c == 0));
        assert!(g.edges().is_empty());
    }

    #[test]
    fn duplicate_columns_create_an_edge_with_delta_one() {
        let m = Mat::from_col_major(
            3,
            3,
            vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0],
        );
        let d = Dictionary::normalize_columns(m).unwrap();
        let g = build_mcg(&d, 2, 0.9, PruneConfig::Off).unwrap();
        assert_eq!(g.ill_subsets().len(), 1);
        assert_eq!(g.ill_subsets()[0].indices.indices(), &[0, 2]);
        assert!((g.ill_subsets()[0].delta - 1.0).abs() < 1e-12);
        assert!(g.adjacent(0, 2) && g.adjacent(2, 0));
        assert!(!g.adjacent(0, 1));
    }

    #[test]
    fn exhaustive_build_matches_independent_enumeration() {
        for seed in [1, 2, 3] {
            let d = gen_gaussian(10, 15, seed).unwrap();
            for order in 2..=4 {
                for &t in &[0.3, 0.5, 0.7] {
                    let g = build_mcg(&d, order, t, PruneConfig::Off).unwrap();
                    let expect = brute_force(&d, order, t);
                    assert_eq!(
                        g.ill_subsets(),
                        expect.as_slice(),
                        "seed {seed} order {order} T {t}"
                    );
                }
            }
        }
    }

    #[test]
    fn higher_threshold_stores_a_subset_of_lower_threshold() {
        let d = gen_gaussian(8, 14, 5).unwrap();
        let low = build_mcg(&d, 3, 0.3, PruneConfig::Off).unwrap();
        let high = build_mcg(&d, 3, 0.6, PruneConfig::Off).unwrap();
        for ill in high.ill_subsets() {
            assert!(
                low.ill_subsets().iter().any(|o| o.indices == ill.indices),
                "subset {:?} missing at the lower threshold",
                ill.indices
            );
        }
        for i in 0..d.cols() {
            for j in 0..d.cols() {
                if high.adjacent(i, j) {
                    assert!(low.adjacent(i, j));
                }
            }
        }
    }

    #[test]
    fn order_two_adjacency_is_the_gram_threshold() {
        let d = gen_gaussian(8, 12, 9).unwrap();
        let t = 0.35;
        let g = build_mcg(&d, 2, t, PruneConfig::Off).unwrap();
        for j in 1..d.cols() {
            for i in 0..j {
                let coh = dot(d.atom(i), d.atom(j)).abs();
                assert_eq!(
                    g.adjacent(i, j),
                    coh >= t,
                    "pair ({i},{j}) coherence {coh}"
                );
            }
        }
    }

    #[test]
    fn neighborhood_contains_self_and_matches_subsets() {
        let d = gen_gaussian(8, 12, 21).unwrap();
        let g = build_mcg(&d, 3, 0.4, PruneConfig::Off).unwrap();
        for i in 0..d.cols() {
            let nb = g.neighborhood(i).unwrap();
            assert!(nb.contains(i));
            // recompute from the hyperedges directly
            let mut expect: Vec<usize> = vec![i];
            for ill in g.ill_subsets() {
                if ill.indices.contains(i) {
                    expect.extend(ill.indices.indices().iter().copied());
                }
            }
            expect.sort_unstable();
            expect.dedup();
            assert_eq!(nb.indices(), expect.as_slice());
        }
        assert!(g.neighborhood(12).is_err());
    }

    #[test]
    fn membership_counts_sum_to_order_times_subsets() {
        let d = gen_gaussian(8, 12, 33).unwrap();
        for order in 2..=4 {
            let g = build_mcg(&d, order, 0.35, PruneConfig::Off).unwrap();
            let total: usize = g.membership_histogram().iter().sum();
            assert_eq!(total, order * g.ill_subsets().len());
        }
    }

    #[test]
    fn dot_export_declares_all_nodes_and_edges() {
        let d = gen_odct(4, 4).unwrap();
        let empty = build_mcg(&d, 2, 0.1, PruneConfig::Off).unwrap();
        let dot = empty.to_dot();
        assert_eq!(dot.matches(';').count(), 4);
        assert!(!dot.contains("--"));

        let m = Mat::from_col_major(2, 3, vec![1.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        let dup = Dictionary::normalize_columns(m).unwrap();
        let g = build_mcg(&dup, 2, 0.9, PruneConfig::Off).unwrap();
        let dot = g.to_dot();
        assert_eq!(dot.matches("--").count(), 1);
        assert!(dot.contains("0 -- 1;"));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let d = gen_gaussian(8, 12, 44).unwrap();
        let g = build_mcg(&d, 3, 0.4, PruneConfig::Off).unwrap();
        let first = g.to_json().unwrap();
        let back = CoherencyGraph::from_json(&first).unwrap();
        assert_eq!(back, g);
        let second = back.to_json().unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn graph_is_invariant_under_column_negation() {
        let d = gen_gaussian(8, 12, 55).unwrap();
        let mut m = d.mat().clone();
        for i in 0..8 {
            m[(i, 5)] = -m[(i, 5)];
        }
        let neg = Dictionary::normalize_columns(m).unwrap();
        for order in 2..=3 {
            let a = build_mcg(&d, order, 0.4, PruneConfig::Off).unwrap();
            let b = build_mcg(&neg, order, 0.4, PruneConfig::Off).unwrap();
            let ia: Vec<_> = a.ill_subsets().iter().map(|s| s.indices.clone()).collect();
            let ib: Vec<_> = b.ill_subsets().iter().map(|s| s.indices.clone()).collect();
            assert_eq!(ia, ib, "order {order}");
            for (x, y) in a.ill_subsets().iter().zip(b.ill_subsets()) {
                assert!((x.delta - y.delta).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pruning_yields_a_subset_and_flags_the_graph() {
        let d = gen_gaussian(8, 14, 66).unwrap();
        let full = build_mcg(&d, 3, 0.4, PruneConfig::Off).unwrap();
        let pruned = build_mcg(
            &d,
            3,
            0.4,
            PruneConfig::pair_coherence_default(0.4),
        )
        .unwrap();
        assert!(pruned.is_pruned());
        assert!(!full.is_pruned());
        for ill in pruned.ill_subsets() {
            assert!(
                full.ill_subsets().iter().any(|o| o.indices == ill.indices),
                "pruned build invented subset {:?}",
                ill.indices
            );
        }
        // zero cutoff disables the filter entirely
        let loose = build_mcg(&d, 3, 0.4, PruneConfig::PairCoherence { t_pair: 0.0 }).unwrap();
        assert_eq!(loose.ill_subsets(), full.ill_subsets());
    }

    #[test]
    fn build_validates_parameters() {
        let d = gen_gaussian(6, 10, 77).unwrap();
        assert!(build_mcg(&d, 1, 0.4, PruneConfig::Off).is_err());
        assert!(build_mcg(&d, 7, 0.4, PruneConfig::Off).is_err());
        assert!(build_mcg(&d, 3, 0.0, PruneConfig::Off).is_err());
        assert!(build_mcg(&d, 3, 1.0, PruneConfig::Off).is_err());
        match build_mcg_with_cap(&d, 3, 0.4, PruneConfig::Off, 10) {
            Err(Error::EnumerationCap { required, cap }) => {
                assert_eq!(required, 120);
                assert_eq!(cap, 10);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
        // pruning lifts the upfront cap
        assert!(build_mcg_with_cap(
            &d,
            3,
            0.4,
            PruneConfig::PairCoherence { t_pair: 0.2 },
            10
        )
        .is_ok());
    }
}
