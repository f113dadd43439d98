//! Shortcuts and amendment: detect a detour around a negative tree path
//! and repair it.
//!
//!     cargo run --example shortcut_amend

use stdp::graph::{build_instance, Path};
use stdp::treekit::{amend, find_shortcuts, is_locally_cheapest, negative_forest};

fn main() {
    // Tree edge 0-1 of weight -1 with a positive detour 0-2-1.
    let inst = build_instance(
        5,
        &[(0, 1, -1), (0, 2, 1), (2, 1, 1), (3, 4, 1), (3, 0, 5), (4, 1, 5)],
        3,
        4,
    )
    .unwrap();
    let forest = negative_forest(&inst).unwrap();

    let p1 = Path::new(vec![0, 2, 1], &inst).unwrap();
    let p2 = Path::new(vec![3, 4], &inst).unwrap();
    println!("pair weight before: {}", (p1.weight(&inst) + p2.weight(&inst)) / 2);
    for sc in find_shortcuts(&p1, &p2, &forest) {
        println!("shortcut on path {}: tree path {}..{}", sc.path + 1, sc.z1, sc.z2);
    }

    let (q1, q2) = amend(&p1, &p2, &forest, &inst);
    println!(
        "after amendment: {:?} / {:?} with weight {}",
        q1.vertices(),
        q2.vertices(),
        (q1.weight(&inst) + q2.weight(&inst)) / 2
    );
    assert!(is_locally_cheapest(&q1, &q2, &forest));
}
