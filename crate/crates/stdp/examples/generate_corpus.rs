//! Generate seeded conservative instances and certify them.
//!
//!     cargo run --example generate_corpus

use stdp::graph::is_conservative;
use stdp::oracle::{generate_instance, GenParams};
use stdp::treekit::negative_forest;

fn main() {
    for seed in 0..5u64 {
        let params = GenParams::new(10, 2, 0.5, seed);
        let inst = generate_instance(&params).expect("parameters are feasible");
        let forest = negative_forest(&inst).expect("acyclic negative edges");
        assert!(is_conservative(&inst).is_ok());
        println!(
            "seed {seed}: n={} m={} negative trees={} sizes={:?}",
            inst.num_ids(),
            inst.edges().len(),
            forest.c(),
            forest.trees.iter().map(|t| t.vertices().len()).collect::<Vec<_>>(),
        );
    }

    // The JSON form round-trips through serde.
    let inst = generate_instance(&GenParams::new(8, 1, 0.4, 7)).unwrap();
    let json = serde_json::to_string_pretty(&inst.raw()).unwrap();
    println!("\ninstance as JSON:\n{json}");
}
