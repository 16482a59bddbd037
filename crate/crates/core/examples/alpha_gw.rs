//! The Goemans-Williamson constant and per-edge crossing probabilities.
//!
//!     cargo run --release --example alpha_gw

use lowdim_maxcut::graph::WeightedGraph;
use lowdim_maxcut::rounding::{alpha_gw, edge_crossing_frequencies, gw_ratio, rho_star};
use lowdim_maxcut::solver::{solve_low_rank, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("alpha_GW = {:.6} attained at rho* = {:.4}", alpha_gw(), rho_star());
    for rho in [-1.0, -0.9, -0.689, -0.5, 0.0, 0.5, 0.9] {
        println!("  ratio({rho:+.3}) = {:.6}", gw_ratio(rho));
    }

    // The 5-cycle in the plane: every edge spans the angle 4 pi / 5.
    let g = WeightedGraph::cycle(5);
    let v = solve_low_rank(&g, 2, &SolverConfig::basic())?.embedding;
    println!("C5 edges, 200000 hyperplanes:");
    for e in edge_crossing_frequencies(&g, &v, 200_000, 3)? {
        println!(
            "  {}-{}: frequency {:.4}, arccos(rho)/pi = {:.4}, {:+.1} sigma",
            e.u,
            e.v,
            e.frequency,
            e.expected,
            (e.frequency - e.expected) / e.stderr
        );
    }
    Ok(())
}
