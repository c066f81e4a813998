//! Simulate a branching autoregression tree, inspect a generation, and
//! round-trip the sample through its binary format.
//!
//! Run with: `cargo run --example simulate_tree`

use bmc_lsq::kernels::{simulate_tree, InitialLaw, KernelModel, NbarModel};
use bmc_lsq::tree::{triangles_of_generation, NodeId};

fn main() -> bmc_lsq::Result<()> {
    let kernel = KernelModel::Nbar(NbarModel::paper_default());
    let generation = 10u32;
    let seed = 7u64;

    // Triangles over generation n need the children, so simulate to n + 1.
    let sample = simulate_tree(&kernel, &InitialLaw::StandardNormal, generation + 1, seed)?;
    println!(
        "simulated depth-{} tree with {} nodes (seed {seed})",
        sample.depth(),
        sample.values().len()
    );

    let leaves = sample.generation_values(generation);
    let mean = leaves.iter().sum::<f64>() / leaves.len() as f64;
    let var = leaves.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / leaves.len() as f64;
    println!("generation {generation}: {} states, mean {mean:.4}, variance {var:.4}", leaves.len());

    let triangles = triangles_of_generation(&sample, generation)?;
    let t = &triangles[0];
    println!(
        "first triangle: parent {:.4} -> children ({:.4}, {:.4})",
        t.parent, t.child0, t.child1
    );
    let root = sample.value(NodeId::ROOT);
    println!("root state {root:.4}");

    // Binary persistence round trip.
    let dir = std::env::temp_dir().join("bmc-lsq-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("sample.bmct");
    sample.save(&path)?;
    let restored = bmc_lsq::tree::TreeSample::load(&path)?;
    assert_eq!(restored, sample);
    println!("binary round trip OK: {}", path.display());
    Ok(())
}
