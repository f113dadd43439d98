//! Pit the solver against the brute-force oracle over a random batch.
//!
//!     cargo run --release --example oracle_showdown

use stdp::oracle::{brute_force_stdp, generate_instance, GenParams};
use stdp::solver::solve;

fn main() {
    let mut agree = 0;
    let mut feasible = 0;
    for seed in 0..100u64 {
        let params = GenParams::new(9, (seed % 3) as usize, 0.5, 4000 + seed);
        let Ok(inst) = generate_instance(&params) else { continue };
        let oracle = brute_force_stdp(&inst).expect("n=9 fits the oracle");
        let got = solve(&inst).expect("generated instances are conservative");
        let (o, g) = (oracle.map(|x| x.0), got.map(|s| s.weight));
        assert_eq!(o, g, "seed {seed} disagrees");
        agree += 1;
        if o.is_some() {
            feasible += 1;
        }
    }
    println!("{agree} instances agree with the oracle ({feasible} feasible)");
}
