//! The penalty polynomial Delta(t) = (t + 0.9)(1-t)^A = 1.9 (1-t)^A - (1-t)^(A+1) with A = 10d,
//! expanded in normalized Gegenbauer polynomials, and the construction of
//! Q(t) = arcsin(t) - C Delta(t) with nonnegative positive-degree coefficients.
//!
//!     cargo run --release --example gegenbauer_table -- [D]

use lowdim_maxcut::gegenbauer::{construct_q, delta0_bound, ratio_table, GegenbauerBasis};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let basis = GegenbauerBasis::new(d)?;
    let a = basis.penalty_exponent();
    println!("d = {d}, w = {}, lambda = {}, A = {a}", basis.w(), basis.lambda());

    println!("  k        I_k(A) closed      quadrature        delta_k");
    for k in [0, 1, 2, 3, 5, a / 2, a - 1, a, a + 1, a + 2] {
        let q = basis.i_quadrature(k, a).value;
        println!("{k:3} {:>20.10e} {:>15.10e} {:>14.6e}", basis.i_closed(k, a), q, basis.delta(k));
    }

    let table = basis.coefficient_table(a + 3);
    let signs = table.sign_report();
    println!("sign pattern (odd > 0, even < 0, zero past A+1) up to k = {}: {}", signs.checked_up_to, signs.passed);

    let ratio = ratio_table(&basis, a);
    println!(
        "|I_k(A+1)/I_k(A)| increases: {}, minimum {:.6} (closed form {:.6}), above 1.9: {}",
        ratio.strictly_increasing, ratio.minimum, ratio.minimum_closed, ratio.exceeds_slope
    );

    let b = delta0_bound(&basis);
    println!("|delta_0| = {:.4e} >= (1/10)(3/2)^(9d+1) = {:.4e}: {}", b.abs_delta0, b.bound, b.holds);

    let q = construct_q(&basis, 2001);
    println!("C = {:.6e} (attained at k = {}); min q_k = {:.3e}; Q <= arcsin on [-0.9, 1]: {}", q.c, q.argmin_k, q.min_q_positive_degree, q.grid_ok);
    Ok(())
}
