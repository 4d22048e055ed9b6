//! Generate dictionaries, measure how well-conditioned their column subsets
//! are, and round-trip one through the text format.
//!
//!     cargo run --example dictionary_conditioning

use mcg_sparse::{gen_gaussian, gen_odct, gen_odct2d, Result, SparkBound};

fn main() -> Result<()> {
    let gaussian = gen_gaussian(15, 25, 7)?;
    let odct = gen_odct(16, 32)?;
    let odct2d = gen_odct2d(4, 4, 4)?;

    for (name, dict) in [("gaussian 15x25", &gaussian), ("odct 16x32", &odct), ("odct2d 4x4 r4", &odct2d)] {
        println!("{name}: N={} K={}", dict.rows(), dict.cols());
        println!("  mutual coherence: {:.4}", dict.mutual_coherence()?);

        // the worst order-3 subset: the three atoms closest to dependence
        let (subset, delta) = dict.worst_subdictionary(3)?;
        println!("  worst 3-atom subset: {:?} with delta = {:.4}", subset.indices(), delta);

        // scan upward for a numerically dependent subset
        match dict.spark_bound(5, 1e-8)? {
            SparkBound::Found(s) => println!("  spark: {s} (a dependent {s}-subset exists)"),
            SparkBound::NotFoundUpTo(s) => println!("  spark > {s}: no dependent subset up to size {s}"),
        }

        let report = dict.conditioning_report(3, 5, 1e-8)?;
        println!("  report: {}", serde_json::to_string(&report)?);
    }

    // the text format round-trips exactly as long as the loader is not asked
    // to renormalize (renormalizing divides by a norm a few ulps off 1.0)
    let dir = std::env::temp_dir().join("mcg_sparse_example");
    let path = dir.join("gaussian_15x25.txt");
    gaussian.save(&path)?;
    let reloaded = mcg_sparse::Dictionary::load(&path, false)?;
    assert_eq!(reloaded.mat().data(), gaussian.mat().data());
    println!("saved and reloaded {} byte-exactly", path.display());
    Ok(())
}
