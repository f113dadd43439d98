//! Time the solver over a size grid and report the log-log slope.
//!
//!     cargo run --release --example scaling_bench

use std::time::Instant;
use stdp::oracle::{generate_instance, GenParams};
use stdp::solver::solve;

fn main() {
    let mut points = Vec::new();
    for n in [20usize, 30, 40, 60] {
        let inst = generate_instance(&GenParams::new(n, 1, 0.3, 7_000 + n as u64)).unwrap();
        let start = Instant::now();
        let sol = solve(&inst).unwrap();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "n={n:>3}  {secs:>8.4}s  {}",
            match sol {
                Some(s) => format!("weight {}", s.weight / 2),
                None => "infeasible".into(),
            }
        );
        points.push(((n as f64).ln(), secs.max(1e-6).ln()));
    }
    println!("log-log slope: {:.2}", stdp::cli::slope(&points));
}
