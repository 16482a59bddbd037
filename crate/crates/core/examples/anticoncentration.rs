//! Gaussian sign sums X = sum_i w_i sgn(<g, v_i>): the exact second moment,
//! a Monte Carlo check, and the power-series lower-bound certificates.
//!
//!     cargo run --release --example anticoncentration -- [N] [D]

use lowdim_maxcut::anticonc::{
    default_p_max, exact_second_moment, hadamard_rank_check, mc_second_moment, net_constants,
    random_admissible_configuration, theorem_lower_bound_report, SignConfiguration, ADMISSIBLE_MIN_RHO, RANK_TOL,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(40);
    let d: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);

    let v = random_admissible_configuration(n, d, ADMISSIBLE_MIN_RHO, 5, 1000)?;
    let cfg = SignConfiguration::new(v.clone());
    let exact = exact_second_moment(&cfg)?;
    let mc = mc_second_moment(&cfg, 1_000_000, 6)?;
    println!("n = {n}, d = {d}, min rho = {:.4}", cfg.min_pairwise_inner().unwrap_or(1.0));
    println!("E[X^2] exact = {exact:.4}, Monte Carlo = {:.4} ± {:.4}", mc.estimate, mc.stderr);

    let r = theorem_lower_bound_report(&cfg, default_p_max(d))?;
    println!("E[X^2] / W^2 = {:.4}", r.normalized_second_moment);
    println!(
        "best termwise bound (2/pi) c_k S_p = {:.4} at p = {}; dominated for every odd p: {}",
        r.best_termwise_bound, r.best_termwise_p, r.termwise_domination
    );
    let nc = net_constants(d);
    println!("net constants: c = {:.3}, p = {}", nc.c, nc.p);
    for (name, c) in [("net", &r.net), ("matrix", &r.matrix)] {
        println!(
            "{name:>6}: p = {:4}, S_p = {:.3e} >= floor {:.3e}: {}; implied E[X^2] >= {:.3e}",
            c.p, c.s_p, c.s_p_floor, c.floor_holds, c.implied_lower_bound
        );
    }

    for p in 1..=4 {
        let h = hadamard_rank_check(&v, p, RANK_TOL, 1e-9);
        println!("G^({p}): numeric rank {} <= C(d+p-1, p) = {}, min eigenvalue {:.2e}", h.numeric_rank, h.bound, h.min_eigenvalue);
    }
    println!("all certificates: {}", if r.passed { "pass" } else { "FAIL" });
    Ok(())
}
