//! Solve the rank-d SDP of a graph, then round it with hyperplanes plus local improvement.
//!
//!     cargo run --release --example solve_and_round -- [GRAPH] [D]

use lowdim_maxcut::embedding::sdp_objective;
use lowdim_maxcut::graph::{brute_force_maxcut, parse_graph, BRUTE_FORCE_LIMIT};
use lowdim_maxcut::rounding::{alpha_gw, default_epsilon, rounding_trials, RoundingConfig};
use lowdim_maxcut::solver::{solve_low_rank, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/petersen.txt").to_string());
    let d: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let g = parse_graph(&std::fs::read_to_string(&path)?)?;
    println!("{path}: n = {}, m = {}, W = {}", g.n(), g.num_edges(), g.total_weight());

    for (label, cfg) in [("basic", SolverConfig::basic()), ("triangles", SolverConfig::default())] {
        let rep = solve_low_rank(&g, d, &cfg)?;
        println!(
            "{label:>9}: SDP = {:.6}  worst violation = {:.2e}  iterations = {}",
            rep.objective, rep.worst_violation, rep.iterations
        );

        let rc = RoundingConfig { epsilon: default_epsilon(d), trials: 5000, seed: 7 };
        let stats = rounding_trials(&g, &rep.embedding, &rc)?;
        let sdp = sdp_objective(&g, &rep.embedding)?;
        println!(
            "           E[initial] = {:.4} ± {:.4}   E[final] = {:.4} ± {:.4}   best = {}",
            stats.mean_initial, stats.stderr_initial, stats.mean_final, stats.stderr_final, stats.best_value
        );
        println!(
            "           E[initial]/SDP = {:.4} (alpha_GW = {:.4}), E[final]/SDP = {:.4}",
            stats.mean_initial / sdp,
            alpha_gw(),
            stats.mean_final / sdp
        );
    }

    if g.n() <= BRUTE_FORCE_LIMIT {
        let (opt, cut) = brute_force_maxcut(&g)?;
        println!("exact max cut = {opt}  labels = {:?}", cut.labels());
    }
    Ok(())
}
