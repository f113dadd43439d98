//! Build a small instance in code, solve it, and print the optimum.
//!
//!     cargo run --example solve_instance

use stdp::graph::build_instance;
use stdp::solver::solve;

fn main() {
    // Square s-u-t-v with a negative chord between the two middles.
    //   s=0, u=1, v=2, t=3
    let inst = build_instance(
        4,
        &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1), (1, 2, -1)],
        0,
        3,
    )
    .expect("valid instance");

    match solve(&inst) {
        Ok(Some(sol)) => {
            println!("optimal weight (unscaled): {}", sol.weight / 2);
            println!("path 1: {:?}", sol.p1.vertices());
            println!("path 2: {:?}", sol.p2.vertices());
        }
        Ok(None) => println!("no two openly disjoint s-t paths exist"),
        Err(e) => println!("rejected: {e}"),
    }

    // The same graph with the chord dropped to -3 creates a negative cycle;
    // the solver hands back the certificate instead of an answer.
    let bad = build_instance(
        4,
        &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1), (1, 2, -3)],
        0,
        3,
    )
    .unwrap();
    match solve(&bad) {
        Err(e) => println!("as expected: {e}"),
        Ok(_) => unreachable!("the triangle 0-1-2 is negative"),
    }
}
