//! Triangle inequalities on embeddings, and the embedding file format.
//!
//!     cargo run --release --example feasibility_check

use lowdim_maxcut::embedding::{check_feasibility, load_embedding, save_embedding, UnitEmbedding, FEASIBILITY_TOL};
use lowdim_maxcut::graph::{Cut, WeightedGraph};
use lowdim_maxcut::solver::{solve_low_rank, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Any +-e1 embedding is an integral solution and satisfies every constraint.
    let cut = Cut::new(vec![1, -1, 1, 1, -1])?;
    let r = check_feasibility(&UnitEmbedding::from_cut(&cut, 3), FEASIBILITY_TOL);
    println!("cut embedding: {} constraints, {} violated", r.constraints_checked, r.violation_count);

    // The basic SDP optimum of C5 (the regular pentagon) violates the triangle inequalities.
    let g = WeightedGraph::cycle(5);
    for (label, cfg) in [("basic", SolverConfig::basic()), ("triangles", SolverConfig::default())] {
        let rep = solve_low_rank(&g, 2, &cfg)?;
        let r = check_feasibility(&rep.embedding, FEASIBILITY_TOL);
        println!(
            "{label:>9}: objective {:.5}, {} violated constraints, worst {:.3e}",
            rep.objective, r.violation_count, r.worst_triangle_violation
        );
        if let Some(t) = r.violating_triples.first() {
            println!("           worst: {t:?}");
        }
    }

    let v = solve_low_rank(&g, 2, &SolverConfig::basic())?.embedding;
    let text = save_embedding(&v);
    let back = load_embedding(&text)?;
    let drift = (0..v.n())
        .flat_map(|i| (0..v.d()).map(move |j| (i, j)))
        .map(|(i, j)| (v.vector(i)[j] - back.vector(i)[j]).abs())
        .fold(0.0, f64::max);
    println!("JSON round trip: {} bytes, max coordinate drift {drift:e}", text.len());
    Ok(())
}
