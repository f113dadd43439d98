//! The flow machinery on its own: orient the negative trees one-way,
//! solve a min-cost flow with unit vertex capacities, and read the two
//! openly disjoint paths out of it.
//!
//!     cargo run --example min_cost_flow

use std::collections::HashMap;
use stdp::flows::{build_nz, decompose_flow, min_cost_flow};
use stdp::graph::build_instance;
use stdp::treekit::negative_forest;

fn main() {
    let inst = build_instance(
        4,
        &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1), (1, 2, -1)],
        0,
        3,
    )
    .unwrap();
    let forest = negative_forest(&inst).unwrap();
    println!("negative trees: {}", forest.c());

    // Select the orientation root of the single tree; the tree's edge then
    // exists in one direction only.
    for root in forest.trees[0].vertices() {
        let net = build_nz(&inst, &forest, &HashMap::from([(0, *root)])).unwrap();
        let flow = min_cost_flow(&net, 2).unwrap().expect("two disjoint paths exist");
        let paths = decompose_flow(&net, &flow).unwrap();
        println!(
            "root {root}: cost {} -> paths {:?} / {:?}",
            flow.cost / 2,
            paths[0].vertices(),
            paths[1].vertices()
        );
    }
}
