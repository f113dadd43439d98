//! The dynamic program on its own: build the spine for a four-terminal
//! guess, fill the partial-solution table, and read off the optimal
//! permissively disjoint pair.
//!
//!     cargo run --example disjoint_pair_dp

use stdp::graph::build_instance;
use stdp::partsol::build_table;
use stdp::treekit::negative_forest;

fn main() {
    // Negative path tree 0-1-2-3 with 4 hanging off 1 and 5 off 2,
    // embedded in positive connectivity.
    let inst = build_instance(
        8,
        &[
            (0, 1, -2),
            (1, 2, -2),
            (2, 3, -2),
            (1, 4, -2),
            (2, 5, -2),
            (6, 0, 10),
            (6, 4, 10),
            (7, 3, 10),
            (7, 5, 10),
            (0, 4, 12),
            (3, 5, 12),
            (6, 7, 60),
        ],
        6,
        7,
    )
    .unwrap();
    let forest = negative_forest(&inst).unwrap();

    // Guess: paths from {0,4} to {3,5} through the tree.
    let table = build_table(&inst, &forest, 0, 0, 4, 3, 5).expect("guess shares a spine edge");
    let spine = &table.spine;
    println!(
        "spine x-vertices: {:?}; subtrees: {:?}",
        spine.xs(),
        (0..spine.r()).map(|i| spine.subtree(i).to_vec()).collect::<Vec<_>>()
    );

    let mut stored = 0;
    for (_, entry) in table.iter() {
        if entry.is_some() {
            stored += 1;
        }
    }
    println!("table entries with a partial solution: {stored}");

    match table.best_pair() {
        Some((q1, q2, w)) => println!(
            "optimal pair: {:?} / {:?} with weight {}",
            q1.vertices(),
            q2.vertices(),
            w / 2
        ),
        None => println!("no permissively disjoint pair exists for the guess"),
    }
}
