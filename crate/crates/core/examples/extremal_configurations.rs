//! The upper-bound side: random configurations on the sphere have E[X^2]
//! close to n on average, while their pairwise inner products rarely leave
//! [-0.9, 0.9] once d is moderate.
//!
//!     cargo run --release --example extremal_configurations -- [D] [N]

use lowdim_maxcut::extremal::{
    cap_tail_bound, cap_tail_empirical, find_flat_configuration, mean_second_moment_identity, ExtremalSearchConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let d: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);

    println!("cap tails P(<U,V> >= a) in d = {d}:");
    for (i, a) in [0.5, 0.7, 0.9].into_iter().enumerate() {
        let t = cap_tail_empirical(a, d, 1_000_000, 40 + i as u64)?;
        println!("  a = {a}: frequency {:.3e} <= (1-a^2)^((d-1)/2) = {:.3e}: {}", t.frequency, cap_tail_bound(a, d)?, t.within_bound);
    }

    let id = mean_second_moment_identity(d, n, 200, 10_000, 9)?;
    println!(
        "E_v E_g[X^2] over {} configurations: Monte Carlo {:.3} ± {:.3}, exact {:.3} ± {:.3}, target {n}",
        id.configs, id.mean, id.stderr, id.mean_exact, id.stderr_exact
    );

    let cfg = ExtremalSearchConfig { mc_samples: 100_000, ..ExtremalSearchConfig::new(d, n) };
    let (_, flat) = find_flat_configuration(&cfg)?;
    println!(
        "flat configuration after {} attempts: found {}, min rho {:.3}, E[X^2] = {:.3} (ratio to n^2 {:.4}), certificates hold: {}",
        flat.attempts,
        flat.found,
        flat.min_rho.unwrap_or(1.0),
        flat.second_moment,
        flat.ratio,
        flat.certificates_hold
    );
    Ok(())
}
