//! Where local improvement pays: a star whose leaves all sit on the hub's
//! side of nearly every hyperplane that passes close to the hub.
//!
//! The hub is e1 and every leaf is e2, so the SDP value is k/2 and hyperplane
//! rounding cuts each edge with probability 1/2. Whenever |<g, e1>| < epsilon
//! the hub becomes a candidate, and flipping it gains the edges it failed to cut.
//!
//!     cargo run --release --example local_improvement_star -- [LEAVES] [EPSILON]

use lowdim_maxcut::embedding::UnitEmbedding;
use lowdim_maxcut::graph::WeightedGraph;
use lowdim_maxcut::rounding::{conditional_gain_experiment, round_trial, rounding_trials, RoundingConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(8);
    let epsilon: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.1);

    let g = WeightedGraph::star(k);
    let mut rows = vec![vec![1.0, 0.0]];
    rows.extend((0..k).map(|_| vec![0.0, 1.0]));
    let v = UnitEmbedding::new(2, rows)?;
    let cfg = RoundingConfig { epsilon, trials: 100_000, seed: 11 };

    let first = round_trial(&g, &v, &cfg, 0)?;
    println!("trial 0: candidates {:?}, flipped {:?}, {} -> {}", first.candidate_set, first.flipped, first.initial_value, first.final_value);

    let s = rounding_trials(&g, &v, &cfg)?;
    println!("E[initial] = {:.4} ± {:.4}", s.mean_initial, s.stderr_initial);
    println!("E[final]   = {:.4} ± {:.4}", s.mean_final, s.stderr_final);
    println!(
        "improvement = {:.5} ± {:.5} ({:.1} standard errors), decreases = {}",
        s.mean_improvement,
        s.stderr_improvement,
        s.mean_improvement / s.stderr_improvement,
        s.decreases
    );

    for gain in conditional_gain_experiment(&g, &v, &cfg)?.iter().take(3) {
        println!(
            "vertex {}: candidate in {} trials, E[gain | candidate] = {:?}, normalized = {:?}",
            gain.vertex, gain.candidate_count, gain.mean_gain, gain.mean_normalized_gain
        );
    }
    Ok(())
}
