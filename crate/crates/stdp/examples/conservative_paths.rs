//! Shortest paths with negative (conservative) weights via the join
//! reduction, next to the plain non-negative backend.
//!
//!     cargo run --example conservative_paths

use stdp::conspath::{conservative_shortest_path, nonneg_shortest_path};
use stdp::graph::{build_instance, GraphView};

fn main() {
    let inst = build_instance(
        4,
        &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1), (1, 2, -1)],
        0,
        3,
    )
    .unwrap();
    let view = GraphView::whole(&inst);

    let (p, w) = conservative_shortest_path(&view, 0, 3)
        .expect("conservative")
        .expect("connected");
    println!("shortest 0-3 path: {:?} weight {}", p.vertices(), w / 2);

    // Restricted to the positive edges the answer changes.
    let positive = build_instance(4, &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1)], 0, 3).unwrap();
    let pview = GraphView::whole(&positive);
    let (p, w) = nonneg_shortest_path(&pview, 0, 3).unwrap().unwrap();
    println!("positive-only 0-3 path: {:?} weight {}", p.vertices(), w / 2);
}
