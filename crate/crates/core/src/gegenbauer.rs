//! Gegenbauer polynomials on `S^(d-1)` and the coefficient tables behind the
//! penalty `Delta(t) = (t + 0.9)(1 - t)^(10d)`.
//!
//! Measure: `dsigma(t) = c_d (1 - t^2)^w dt` on `[-1, 1]` with `w = (d-3)/2`
//! and `c_d = Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2))`, so that `sigma` has
//! unit mass. `P_k` is normalized by `P_k(1) = 1`.
//!
//! `I_k(A) = int (1-t)^A P_k(t) dsigma(t)` vanishes for `k > A`, and otherwise
//!
//! ```text
//! I_k(A) = c_d (-1)^k (A-k+1)^(k) / (2^k (w+1)^(k)) * 2^(A+k+2w+1) B(A+w+1, k+w+1)
//! ```
//!
//! with `x^(k)` the rising factorial. The coefficients of `Delta` are
//! `delta_k = 1.9 I_k(A) - I_k(A+1)` at `A = 10d`.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::{beta::ln_beta, gamma::ln_gamma};
use twofloat::TwoFloat;

use crate::embedding::UnitEmbedding;
use crate::error::{Error, Result};
use crate::quadrature::{self, Fixed, QuadratureOptions, QuadratureResult, Real};

/// Coefficient of `(1-t)^A` in `Delta`.
pub const DELTA_SLOPE: f64 = 1.9;

/// Tolerance on `|P_k(t)| <= 1`.
pub const EVAL_BOUND_TOL: f64 = 1e-9;

/// Gegenbauer family for the sphere `S^(d-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GegenbauerBasis {
    d: usize,
    w: f64,
    lambda: f64,
    ln_cd: f64,
}

impl GegenbauerBasis {
    /// Requires `d >= 3` so that `w >= 0`.
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::invalid(format!("dimension must be at least 3, got {d}")));
        }
        let df = d as f64;
        let ln_cd = ln_gamma(df / 2.0) - 0.5 * PI.ln() - ln_gamma((df - 1.0) / 2.0);
        Ok(GegenbauerBasis { d, w: (df - 3.0) / 2.0, lambda: (df - 2.0) / 2.0, ln_cd })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `(d-3)/2`.
    pub fn w(&self) -> f64 {
        self.w
    }

    /// Classical parameter `(d-2)/2`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Normalizing constant of `sigma`.
    pub fn c_d(&self) -> f64 {
        self.ln_cd.exp()
    }

    /// Density of `sigma` with respect to `dt`.
    pub fn density(&self, t: f64) -> f64 {
        self.c_d() * weight(self.w, t)
    }

    /// `P_k(t)`; errors when `t` lies outside `[-1, 1]`.
    pub fn eval_p(&self, k: usize, t: f64) -> Result<f64> {
        check_t(t)?;
        Ok(normalized_sequence(self.lambda, k, t)[k])
    }

    /// `P_0(t), ..., P_kmax(t)`.
    pub fn eval_p_all(&self, kmax: usize, t: f64) -> Result<Vec<f64>> {
        check_t(t)?;
        Ok(normalized_sequence(self.lambda, kmax, t))
    }

    /// Classical (unnormalized) `C_0(t), ..., C_kmax(t)` from
    /// `k C_k = 2(k+lambda-1) t C_(k-1) - (k+2lambda-2) C_(k-2)`.
    pub fn eval_c_all(&self, kmax: usize, t: f64) -> Vec<f64> {
        let lambda = self.lambda;
        let mut c = Vec::with_capacity(kmax + 1);
        c.push(1.0);
        if kmax >= 1 {
            c.push(2.0 * lambda * t);
        }
        for k in 2..=kmax {
            let kf = k as f64;
            let next = (2.0 * (kf + lambda - 1.0) * t * c[k - 1] - (kf + 2.0 * lambda - 2.0) * c[k - 2]) / kf;
            c.push(next);
        }
        c
    }

    /// `ln |I_k(A)|`, or `None` when `I_k(A) = 0` (that is, `k > A`).
    pub fn ln_abs_i(&self, k: usize, a: usize) -> Option<f64> {
        if k > a {
            return None;
        }
        let (kf, af, w) = (k as f64, a as f64, self.w);
        let ln2 = std::f64::consts::LN_2;
        Some(
            self.ln_cd + ln_rising(af - kf + 1.0, k) - kf * ln2 - ln_rising(w + 1.0, k)
                + (af + kf + 2.0 * w + 1.0) * ln2
                + ln_beta(af + w + 1.0, kf + w + 1.0),
        )
    }

    /// Closed form of `I_k(A)`; exactly zero for `k > A`.
    pub fn i_closed(&self, k: usize, a: usize) -> f64 {
        match self.ln_abs_i(k, a) {
            None => 0.0,
            Some(l) => parity_sign(k) * l.exp(),
        }
    }

    /// `|I_k(A+1)| / |I_k(A)|` from the closed ratio, for `k <= A`.
    pub fn i_ratio(&self, k: usize, a: usize) -> f64 {
        let (kf, af, w) = (k as f64, a as f64, self.w);
        2.0 * ((af + 1.0) / (af + 1.0 - kf)) * ((af + w + 1.0) / (af + kf + 2.0 * w + 2.0))
    }

    /// `I_k(A)` by adaptive quadrature, independent of the closed form.
    ///
    /// For large `A` and `k` near `A` the value is up to ~26 orders of
    /// magnitude smaller than `int |integrand|`, beyond `f64`. The integral is
    /// taken in double-double, and again in 320-bit fixed point when the
    /// double-double result is within reach of its round-off floor.
    pub fn i_quadrature(&self, k: usize, a: usize) -> QuadratureResult {
        let (scale, r) = self.i_quadrature_in::<TwoFloat>(k, a, 1e-30, 1e-28);
        if r.value.abs() >= 1e-20 * scale {
            return r;
        }
        self.i_quadrature_in::<Fixed>(k, a, 1e-42, 1e-30).1
    }

    /// Returns `(int (1-t)^A dsigma, I_k(A))`.
    fn i_quadrature_in<R: Real>(&self, k: usize, a: usize, abs_factor: f64, rel_tol: f64) -> (f64, QuadratureResult) {
        let lambda = R::from_f64(self.lambda);
        let w2 = (2.0 * self.w).round() as u32;
        let a = u32::try_from(a).expect("exponent fits in u32");
        let one = R::from_f64(1.0);
        let weight = |t: &R| {
            let s = one.clone() - t.clone() * t.clone();
            let base = s.powi(w2 / 2);
            if w2 % 2 == 1 {
                base * s.sqrt()
            } else {
                base
            }
        };
        // int (1-t)^A dsigma bounds int |integrand| since |P_k| <= 1.
        let cd = self.c_d();
        let scale_opts = QuadratureOptions { abs_tol: 0.0, rel_tol: 1e-20, ..Default::default() };
        let pos = |t: &R| (one.clone() - t.clone()).powi(a) * weight(t);
        let (_, s) = quadrature::integrate_in(pos, -one.clone(), one.clone(), &scale_opts);
        let opts = QuadratureOptions { abs_tol: abs_factor * s.value, rel_tol, ..Default::default() };
        let f = |t: &R| (one.clone() - t.clone()).powi(a) * normalized_value(&lambda, k, t) * weight(t);
        let (_, mut r) = quadrature::integrate_in(f, -one.clone(), one.clone(), &opts);
        r.value *= cd;
        r.error_estimate *= cd;
        (s.value * cd, r)
    }

    /// `int arcsin(t) P_k(t) dsigma(t)`, computed in `theta` with `t = cos(theta)`
    /// so the integrand is smooth.
    pub fn arcsin_coeff(&self, k: usize) -> QuadratureResult {
        self.arcsin_coeff_with(k, &QuadratureOptions { abs_tol: 1e-15, rel_tol: 1e-12, ..Default::default() })
    }

    pub fn arcsin_coeff_with(&self, k: usize, opts: &QuadratureOptions) -> QuadratureResult {
        let lambda = self.lambda;
        let dm2 = self.d as i32 - 2;
        let cd = self.c_d();
        let f = |theta: f64| {
            let p = normalized_value(&lambda, k, &theta.cos());
            cd * (FRAC_PI_2 - theta) * p * theta.sin().powi(dm2)
        };
        quadrature::integrate(f, 0.0, PI, opts)
    }

    /// `int P_j P_k dsigma`.
    pub fn inner_product(&self, j: usize, k: usize) -> QuadratureResult {
        let lambda = self.lambda;
        let dm2 = self.d as i32 - 2;
        let cd = self.c_d();
        let f = |theta: f64| {
            let t = theta.cos();
            cd * normalized_value(&lambda, j, &t) * normalized_value(&lambda, k, &t) * theta.sin().powi(dm2)
        };
        quadrature::integrate(f, 0.0, PI, &QuadratureOptions { abs_tol: 1e-14, rel_tol: 1e-12, ..Default::default() })
    }

    /// `delta_k` at `A = 10d`.
    pub fn delta(&self, k: usize) -> f64 {
        match self.ln_abs_delta(k) {
            None => 0.0,
            Some((sign, l)) => sign * l.exp(),
        }
    }

    /// `(sign, ln |delta_k|)`, or `None` when `delta_k = 0` (`k > 10d + 1`).
    pub fn ln_abs_delta(&self, k: usize) -> Option<(f64, f64)> {
        let a = self.penalty_exponent();
        match (self.ln_abs_i(k, a), self.ln_abs_i(k, a + 1)) {
            (None, None) => None,
            // I_k(A) = 0, so delta_k = -I_k(A+1).
            (None, Some(l1)) => Some((-parity_sign(k), l1)),
            // I_k(A+1) = I_k(A) * ratio with the same sign.
            (Some(l0), _) => {
                let gap = DELTA_SLOPE - self.i_ratio(k, a);
                Some((parity_sign(k) * gap.signum(), l0 + gap.abs().ln()))
            }
        }
    }

    /// `A = 10d`.
    pub fn penalty_exponent(&self) -> usize {
        10 * self.d
    }

    /// Table of `I_k(A)`, `I_k(A+1)` and `delta_k` for `k = 0..=kmax`.
    pub fn coefficient_table(&self, kmax: usize) -> CoefficientTable {
        let a = self.penalty_exponent();
        let entries = (0..=kmax)
            .into_par_iter()
            .map(|k| {
                let ld = self.ln_abs_delta(k);
                CoefficientEntry {
                    k,
                    i_a: self.i_closed(k, a),
                    i_a1: self.i_closed(k, a + 1),
                    delta: self.delta(k),
                    delta_sign: ld.map_or(0, |(s, _)| s as i8),
                    ln_abs_delta: ld.map(|(_, l)| l),
                }
            })
            .collect();
        CoefficientTable { d: self.d, w: self.w, a, entries }
    }
}

fn check_t(t: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::invalid(format!("t = {t} lies outside [-1, 1]")))
    }
}

fn parity_sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn weight(w: f64, t: f64) -> f64 {
    (1.0 - t * t).max(0.0).powf(w)
}

/// `ln(x (x+1) ... (x+k-1))` for `x > 0`.
pub fn ln_rising(x: f64, k: usize) -> f64 {
    ln_gamma(x + k as f64) - ln_gamma(x)
}

/// Normalized recurrence `P_k = (2(k+lambda-1) t P_(k-1) - (k-1) P_(k-2)) / (k+2lambda-1)`,
/// equivalent to running the classical recurrence and dividing by `C_k(1)`
/// but free of overflow at high degree.
fn normalized_step<R: Real>(lambda: &R, k: usize, t: &R, p1: &R, p0: &R) -> R {
    let one = R::from_f64(1.0);
    let two = R::from_f64(2.0);
    let kf = R::from_usize(k);
    let num = two.clone() * (kf.clone() + lambda.clone() - one.clone()) * t.clone() * p1.clone()
        - (kf.clone() - one.clone()) * p0.clone();
    num.quot(&(kf + two * lambda.clone() - one))
}

fn normalized_sequence(lambda: f64, kmax: usize, t: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(kmax + 1);
    p.push(1.0);
    if kmax >= 1 {
        p.push(t);
    }
    for k in 2..=kmax {
        let next = normalized_step(&lambda, k, &t, &p[k - 1], &p[k - 2]);
        p.push(next);
    }
    p
}

fn normalized_value<R: Real>(lambda: &R, k: usize, t: &R) -> R {
    if k == 0 {
        return R::from_f64(1.0);
    }
    let (mut p0, mut p1) = (R::from_f64(1.0), t.clone());
    for j in 2..=k {
        let next = normalized_step(lambda, j, t, &p1, &p0);
        p0 = p1;
        p1 = next;
    }
    p1
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub k: usize,
    pub i_a: f64,
    pub i_a1: f64,
    pub delta: f64,
    /// `-1`, `0` or `1`.
    pub delta_sign: i8,
    pub ln_abs_delta: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub d: usize,
    pub w: f64,
    /// `A = 10d`.
    pub a: usize,
    pub entries: Vec<CoefficientEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignReport {
    pub checked_up_to: usize,
    /// Degrees where `delta_k` has the wrong sign (odd positive, even negative, zero beyond `A+1`).
    pub violations: Vec<usize>,
    pub passed: bool,
}

impl CoefficientTable {
    pub fn sign_report(&self) -> SignReport {
        let last_nonzero = self.a + 1;
        let violations: Vec<usize> = self
            .entries
            .iter()
            .filter(|e| {
                let want: i8 = if e.k > last_nonzero {
                    0
                } else if e.k % 2 == 1 {
                    1
                } else {
                    -1
                };
                e.delta_sign != want || (want == 0 && e.delta != 0.0)
            })
            .map(|e| e.k)
            .collect();
        SignReport {
            checked_up_to: self.entries.last().map_or(0, |e| e.k),
            passed: violations.is_empty(),
            violations,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioReport {
    pub d: usize,
    pub a: usize,
    /// `|I_k(A+1)| / |I_k(A)|` for `k = 0..=A`.
    pub ratios: Vec<f64>,
    pub strictly_increasing: bool,
    pub minimum: f64,
    /// `2(A+w+1)/(A+2w+2)`.
    pub minimum_closed: f64,
    /// `1 + A/(A+2w+2)`.
    pub minimum_lower_bound: f64,
    pub exceeds_slope: bool,
    pub passed: bool,
}

pub fn ratio_table(basis: &GegenbauerBasis, a: usize) -> RatioReport {
    let ratios: Vec<f64> = (0..=a).map(|k| basis.i_ratio(k, a)).collect();
    let strictly_increasing = ratios.windows(2).all(|p| p[1] > p[0]);
    let minimum = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let (af, w) = (a as f64, basis.w());
    let minimum_closed = 2.0 * (af + w + 1.0) / (af + 2.0 * w + 2.0);
    let minimum_lower_bound = 1.0 + af / (af + 2.0 * w + 2.0);
    let exceeds_slope = minimum > DELTA_SLOPE;
    let passed = strictly_increasing
        && (minimum - minimum_closed).abs() <= 1e-12 * minimum_closed
        && minimum >= minimum_lower_bound - 1e-12;
    RatioReport {
        d: basis.d(),
        a,
        ratios,
        strictly_increasing,
        minimum,
        minimum_closed,
        minimum_lower_bound,
        exceeds_slope,
        passed,
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Delta0Bound {
    pub d: usize,
    pub ln_abs_delta0: f64,
    /// `ln((1/10)(3/2)^(9d+1))`.
    pub ln_bound: f64,
    pub abs_delta0: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compares `|delta_0|` against `(1/10)(3/2)^(9d+1)` in log space.
pub fn delta0_bound(basis: &GegenbauerBasis) -> Delta0Bound {
    let (_, ln_abs_delta0) = basis.ln_abs_delta(0).expect("delta_0 is nonzero");
    let ln_bound = delta0_ln_bound(basis.d());
    Delta0Bound {
        d: basis.d(),
        ln_abs_delta0,
        ln_bound,
        abs_delta0: ln_abs_delta0.exp(),
        bound: ln_bound.exp(),
        holds: ln_abs_delta0 >= ln_bound,
    }
}

/// `ln((1/10)(3/2)^(9d+1))`.
pub fn delta0_ln_bound(d: usize) -> f64 {
    (9 * d + 1) as f64 * 1.5f64.ln() - 10f64.ln()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QConstruction {
    pub d: usize,
    /// `min c_k / delta_k` over odd `k <= 10d + 1`.
    pub c: f64,
    pub argmin_k: usize,
    /// Gegenbauer coefficients of `arcsin` for `k = 0..=kmax`.
    pub arcsin_coeffs: Vec<f64>,
    /// `q_k = c_k - C delta_k` for `k = 0..=kmax`.
    pub q: Vec<f64>,
    /// `q_0 = C |delta_0|`.
    pub q0: f64,
    pub min_q_positive_degree: f64,
    pub q_nonnegative: bool,
    /// Largest `Q(t) - arcsin(t)` on the grid over `[-0.9, 1]`.
    pub max_grid_excess: f64,
    pub grid_ok: bool,
    pub passed: bool,
}

/// Tolerance on `q_k >= 0` and `Q(t) <= arcsin(t)`.
pub const Q_TOL: f64 = 1e-9;

/// Builds `Q(t) = arcsin(t) - C Delta(t)` and checks its coefficient signs.
pub fn construct_q(basis: &GegenbauerBasis, grid_points: usize) -> QConstruction {
    let last = basis.penalty_exponent() + 1;
    let arcsin_coeffs: Vec<f64> = (0..=last).into_par_iter().map(|k| basis.arcsin_coeff(k).value).collect();
    let deltas: Vec<f64> = (0..=last).map(|k| basis.delta(k)).collect();
    let (argmin_k, c) = (1..=last)
        .step_by(2)
        .map(|k| (k, arcsin_coeffs[k] / deltas[k]))
        .fold((1, f64::INFINITY), |best, x| if x.1 < best.1 { x } else { best });
    let q: Vec<f64> = arcsin_coeffs.iter().zip(&deltas).map(|(a, dl)| a - c * dl).collect();
    let q0 = c * deltas[0].abs();
    let min_q_positive_degree = q[1..].iter().copied().fold(f64::INFINITY, f64::min);
    let q_nonnegative = min_q_positive_degree >= -Q_TOL && q0 > 0.0;
    let a = basis.penalty_exponent() as i32;
    let n = grid_points.max(2);
    let max_grid_excess = (0..n)
        .map(|i| {
            let t = -0.9 + 1.9 * i as f64 / (n - 1) as f64;
            let q_t = t.asin() - c * (t + 0.9) * (1.0 - t).powi(a);
            q_t - t.asin()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let grid_ok = max_grid_excess <= Q_TOL;
    QConstruction {
        d: basis.d(),
        c,
        argmin_k,
        arcsin_coeffs,
        q,
        q0,
        min_q_positive_degree,
        q_nonnegative,
        max_grid_excess,
        grid_ok,
        passed: q_nonnegative && grid_ok && c > 0.0,
    }
}

/// `sum_ij P_k(<v_i, v_j>)`, nonnegative since `P_k` is a positive-definite
/// kernel on the sphere of matching dimension.
pub fn zonal_kernel_sum(basis: &GegenbauerBasis, k: usize, v: &UnitEmbedding) -> Result<f64> {
    if v.d() != basis.d() {
        return Err(Error::DimensionMismatch { expected: basis.d(), got: v.d() });
    }
    let n = v.n();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| normalized_value(&basis.lambda(), k, &v.inner(i, j).clamp(-1.0, 1.0))).sum())
        .collect();
    Ok(rows.iter().sum())
}
