//! Build the coherency graph of a dictionary: every order-s column subset
//! whose Gram matrix has minimum eigenvalue below 1 - T becomes a hyperedge,
//! and all its atom pairs become graph edges.
//!
//!     cargo run --example coherency_graph

use mcg_sparse::{build_mcg, gen_gaussian, CoherencyGraph, PruneConfig, Result};

fn main() -> Result<()> {
    let dict = gen_gaussian(10, 18, 3)?;

    let graph = build_mcg(&dict, 3, 0.4, PruneConfig::Off)?;
    println!(
        "order {} threshold {}: {} ill subsets on {} atoms",
        graph.order(),
        graph.threshold(),
        graph.ill_subsets().len(),
        graph.num_nodes()
    );

    for ill in graph.ill_subsets().iter().take(5) {
        println!("  {:?} delta = {:.4}", ill.indices.indices(), ill.delta);
    }

    // how often each atom participates in an ill subset; atoms with high
    // counts are the ones sparse solvers most often get wrong
    let histogram = graph.membership_histogram();
    let mut ranked: Vec<(usize, usize)> = histogram.iter().copied().enumerate().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    println!("most entangled atoms (atom: count):");
    for (atom, count) in ranked.iter().take(5) {
        println!("  {atom}: {count}");
    }

    // the neighborhood of an atom is itself plus everything it shares an
    // ill subset with; this is what the graph-weighted solver aggregates over
    let (worst, _) = ranked[0];
    println!("neighborhood of atom {worst}: {:?}", graph.neighborhood(worst)?.indices());

    // pair pruning skips subsets containing a weakly coherent pair, trading
    // exactness for speed; the result is flagged as a lower bound
    let pruned = build_mcg(&dict, 3, 0.4, PruneConfig::pair_coherence_default(0.4))?;
    println!(
        "pruned pass found {} of {} subsets (pruned = {})",
        pruned.ill_subsets().len(),
        graph.ill_subsets().len(),
        pruned.is_pruned()
    );

    // JSON round-trips byte-exactly; DOT is for visualization
    let json = graph.to_json()?;
    let back = CoherencyGraph::from_json(&json)?;
    assert_eq!(back, graph);
    println!("json export: {} bytes, dot export: {} bytes", json.len(), graph.to_dot().len());
    Ok(())
}
