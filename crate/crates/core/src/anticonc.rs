//! Second moment of Gaussian sign sums and its power-series certificates.
//!
//! For unit vectors `v_i`, weights `w_i` and `g ~ N(0, I_d)`, let
//! `X = sum_i w_i sgn(<g, v_i>)`. Sheppard's formula gives the exact value
//! `E[X^2] = (2/pi) sum_ij w_i w_j arcsin(rho_ij)`. Expanding `arcsin` in its
//! Taylor series (all coefficients positive) and using that every odd power
//! sum `S_p = sum_ij w_i w_j rho_ij^p` is a squared tensor norm yields the
//! termwise bound `E[X^2] >= (2/pi) c_k S_(2k+1)` for every `k`.
//!
//! When every off-diagonal `rho_ij >= -0.9`, two independent routes certify a
//! large odd power sum: a covering (net) argument at `p = 2 ceil(c d) + 1`
//! and a rank argument at `p = 100 d + 1`. Both are checked here.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::UnitEmbedding;
use crate::error::{Error, Result};
use crate::linalg::{self, dot};
use crate::rng;

/// Admissibility threshold on pairwise inner products.
pub const ADMISSIBLE_MIN_RHO: f64 = -0.9;

/// Inner products this close outside `[-1, 1]` are clamped.
pub const RHO_CLAMP_TOL: f64 = 1e-12;

/// Default relative eigenvalue threshold for numeric rank.
pub const RANK_TOL: f64 = 1e-9;

/// Samples drawn per shard in [`mc_second_moment`].
const SHARD: u64 = 1 << 14;

/// Unit vectors with nonnegative weights.
#[derive(Debug, Clone)]
pub struct SignConfiguration {
    embedding: UnitEmbedding,
    weights: Vec<f64>,
}

impl SignConfiguration {
    /// Unit weights.
    pub fn new(embedding: UnitEmbedding) -> Self {
        let weights = vec![1.0; embedding.n()];
        SignConfiguration { embedding, weights }
    }

    pub fn weighted(embedding: UnitEmbedding, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != embedding.n() {
            return Err(Error::LengthMismatch { expected: embedding.n(), got: weights.len() });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        Ok(SignConfiguration { embedding, weights })
    }

    pub fn embedding(&self) -> &UnitEmbedding {
        &self.embedding
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.embedding.n()
    }

    pub fn d(&self) -> usize {
        self.embedding.d()
    }

    /// `W = sum_i w_i`.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn min_pairwise_inner(&self) -> Option<f64> {
        self.embedding.min_pairwise_inner()
    }

    /// Every off-diagonal inner product is at least `-0.9`.
    pub fn is_admissible(&self) -> bool {
        self.min_pairwise_inner().is_none_or(|m| m >= ADMISSIBLE_MIN_RHO)
    }

    /// The unweighted configuration with vector `i` repeated `counts[i]` times.
    pub fn duplicated(&self, counts: &[usize]) -> Result<SignConfiguration> {
        if counts.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: counts.len() });
        }
        let rows = counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(self.embedding.vector(i).to_vec(), c))
            .collect();
        Ok(SignConfiguration::new(UnitEmbedding::new(self.d(), rows)?))
    }

    /// Sum over ordered pairs of `w_i w_j f(rho_ij)`, diagonal included.
    fn pair_sum(&self, f: impl Fn(f64) -> f64 + Sync) -> Result<f64> {
        let n = self.n();
        let rows: Vec<Result<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut s = self.weights[i] * self.weights[i] * f(1.0);
                for j in i + 1..n {
                    let r = clamp_rho(self.embedding.inner(i, j))?;
                    s += 2.0 * self.weights[i] * self.weights[j] * f(r);
                }
                Ok(s)
            })
            .collect();
        rows.into_iter().sum()
    }
}

fn clamp_rho(r: f64) -> Result<f64> {
    if r.abs() > 1.0 + RHO_CLAMP_TOL || r.is_nan() {
        return Err(Error::CorrelationOutOfRange { value: r });
    }
    // arcsin has infinite slope at +-1: round-off in a self inner product
    // would otherwise cost ~1e-8.
    if 1.0 - r.abs() <= 4.0 * f64::EPSILON {
        return Ok(r.signum());
    }
    Ok(r)
}

/// `E[sgn(Y) sgn(Z)] = (2/pi) arcsin(rho)` for unit-variance normals with correlation `rho`.
pub fn sheppard(rho: f64) -> f64 {
    2.0 / PI * rho.asin()
}

/// `E[X^2] = (2/pi) sum_ij w_i w_j arcsin(rho_ij)`.
pub fn exact_second_moment(cfg: &SignConfiguration) -> Result<f64> {
    cfg.pair_sum(sheppard)
}

/// Monte Carlo estimate of `E[X^2]` with its standard error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub samples: u64,
    pub estimate: f64,
    pub stderr: f64,
}

impl MonteCarloEstimate {
    /// `|estimate - target| <= k * stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.estimate - target).abs() <= k * self.stderr + 1e-12 * target.abs().max(1.0)
    }
}

/// Averages `X^2` over `samples` Gaussians. Shards of fixed size are drawn
/// from `(seed, shard)` streams, so the result does not depend on thread count.
pub fn mc_second_moment(cfg: &SignConfiguration, samples: u64, seed: u64) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::invalid("samples must be positive"));
    }
    let d = cfg.d();
    let flat = cfg.embedding.flat();
    let weights = &cfg.weights;
    let shards = samples.div_ceil(SHARD);
    let (sum, sum_sq) = (0..shards)
        .into_par_iter()
        .map(|s| {
            let count = SHARD.min(samples - s * SHARD);
            let mut r = rng::stream_rng(seed, s);
            let mut g = vec![0.0; d];
            let (mut a, mut b) = (0.0, 0.0);
            for _ in 0..count {
                rng::fill_gaussian(&mut r, &mut g);
                let x: f64 = flat
                    .chunks_exact(d)
                    .zip(weights)
                    .map(|(v, w)| if dot(v, &g) >= 0.0 { *w } else { -*w })
                    .sum();
                let x2 = x * x;
                a += x2;
                b += x2 * x2;
            }
            (a, b)
        })
        .reduce(|| (0.0, 0.0), |p, q| (p.0 + q.0, p.1 + q.1));
    let m = samples as f64;
    let mean = sum / m;
    let var = if samples > 1 { ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
    Ok(MonteCarloEstimate { samples, estimate: mean, stderr: (var / m).sqrt() })
}

/// Taylor coefficient `c_k = (2k)! / (4^k (k!)^2 (2k+1))` of `arcsin`.
pub fn arcsin_coeff(k: usize) -> f64 {
    ln_arcsin_coeff(k).exp()
}

/// `ln c_k`, accumulated as `sum_j ln((2j-1)/(2j)) - ln(2k+1)`.
pub fn ln_arcsin_coeff(k: usize) -> f64 {
    let central: f64 = (1..=k).map(|j| ((2 * j - 1) as f64 / (2 * j) as f64).ln()).sum();
    central - ((2 * k + 1) as f64).ln()
}

/// `sign(rho) |rho|^p` via `exp(p ln|rho|)`; underflows to 0.
pub fn signed_power(rho: f64, p: usize) -> f64 {
    if rho == 0.0 {
        return if p == 0 { 1.0 } else { 0.0 };
    }
    let mag = (p as f64 * rho.abs().ln()).exp();
    if rho < 0.0 && p % 2 == 1 {
        -mag
    } else {
        mag
    }
}

/// `S_p = sum_ij w_i w_j rho_ij^p`.
pub fn power_sum(cfg: &SignConfiguration, p: usize) -> Result<f64> {
    cfg.pair_sum(|r| signed_power(r, p))
}

/// A lower bound on `E[X^2]` obtained from one odd power sum.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MomentCertificate {
    /// Odd exponent `p = 2k + 1`.
    pub p: usize,
    pub s_p: f64,
    /// `c_k` with `k = (p - 1) / 2`.
    pub coefficient: f64,
    /// Guaranteed floor on `S_p` for admissible configurations.
    pub s_p_floor: f64,
    /// `S_p >= s_p_floor`.
    pub floor_holds: bool,
    /// `(2/pi) c_k S_p`.
    pub termwise_bound: f64,
    /// `(2/pi) c_k s_p_floor`.
    pub implied_lower_bound: f64,
}

impl MomentCertificate {
    fn new(cfg: &SignConfiguration, p: usize, s_p_floor: f64) -> Result<Self> {
        debug_assert!(p % 2 == 1);
        let s_p = power_sum(cfg, p)?;
        let coefficient = arcsin_coeff((p - 1) / 2);
        Ok(MomentCertificate {
            p,
            s_p,
            coefficient,
            s_p_floor,
            floor_holds: s_p >= s_p_floor,
            termwise_bound: 2.0 / PI * coefficient * s_p,
            implied_lower_bound: 2.0 / PI * coefficient * s_p_floor,
        })
    }
}

/// Constants of the covering argument for dimension `d`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NetConstants {
    pub d: usize,
    /// Net radius `0.1`.
    pub radius: f64,
    /// `1 - 2 radius^2 = 0.98`.
    pub tau: f64,
    /// `ln(2 * 21^2) / ln(tau / 0.9)`.
    pub c: f64,
    /// `2 ceil(c d) + 1`.
    pub p: usize,
    /// `0.9^p`: the guaranteed `S_p / W^2`.
    pub floor_per_w2: f64,
}

pub fn net_constants(d: usize) -> NetConstants {
    let radius = 0.1;
    let tau = 1.0 - 2.0 * radius * radius;
    let net_size_base: f64 = 1.0 + 2.0 / radius;
    let c = (2.0 * net_size_base.powi(2)).ln() / (tau / 0.9).ln();
    let p = 2 * (c * d as f64).ceil() as usize + 1;
    NetConstants { d, radius, tau, c, p, floor_per_w2: 0.9f64.powi(p as i32) }
}

/// Covering-argument certificate at `p = 2 ceil(c d) + 1` with floor `W^2 0.9^p`.
pub fn net_certificate(cfg: &SignConfiguration) -> Result<MomentCertificate> {
    let k = net_constants(cfg.d());
    let w = cfg.total_weight();
    MomentCertificate::new(cfg, k.p, w * w * k.floor_per_w2)
}

/// Exponent of the rank-argument certificate, `100 d + 1`.
pub fn matrix_exponent(d: usize) -> usize {
    100 * d + 1
}

/// Rank-argument certificate at `p = 100 d + 1` with floor `W^2 / 2^(9d+2)`.
pub fn matrix_certificate(cfg: &SignConfiguration) -> Result<MomentCertificate> {
    let d = cfg.d();
    let w = cfg.total_weight();
    let floor = w * w * 2f64.powi(-(9 * d as i32 + 2));
    MomentCertificate::new(cfg, matrix_exponent(d), floor)
}

/// Outcome of [`psd_sum_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsdSumCheck {
    pub n: usize,
    pub rank_bound: usize,
    pub delta: f64,
    /// Precondition failures; the inequality is only guaranteed when empty.
    pub violated_preconditions: Vec<String>,
    /// `sum_ij A_ij`.
    pub lhs: f64,
    /// `n^2 / (2 (D + 1))`.
    pub rhs: f64,
    pub holds: bool,
}

impl PsdSumCheck {
    pub fn preconditions_met(&self) -> bool {
        self.violated_preconditions.is_empty()
    }
}

/// Checks `sum_ij A_ij >= n^2 / (2(D+1))` for a PSD matrix with unit diagonal,
/// rank at most `D` and off-diagonal entries at least `-delta`, given `delta D <= 1/2`.
/// `a` is row-major `n x n`.
pub fn psd_sum_check(a: &[f64], n: usize, rank_bound: usize, delta: f64, tol: f64) -> Result<PsdSumCheck> {
    if a.len() != n * n {
        return Err(Error::LengthMismatch { expected: n * n, got: a.len() });
    }
    let mut bad = Vec::new();
    let asym = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (a[i * n + j] - a[j * n + i]).abs())
        .fold(0.0, f64::max);
    if asym > tol {
        bad.push(format!("not symmetric (max asymmetry {asym:.3e})"));
    }
    if let Some(i) = (0..n).find(|&i| (a[i * n + i] - 1.0).abs() > tol) {
        bad.push(format!("diagonal entry {i} is {} rather than 1", a[i * n + i]));
    }
    let min_off = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| a[i * n + j])
        .fold(f64::INFINITY, f64::min);
    if min_off < -delta - tol {
        bad.push(format!("off-diagonal entry {min_off} is below -delta = {}", -delta));
    }
    if delta * rank_bound as f64 > 0.5 {
        bad.push(format!("delta * D = {} exceeds 1/2", delta * rank_bound as f64));
    }
    let ev = linalg::symmetric_eigenvalues(&linalg::square(n, a));
    let scale = ev.last().copied().unwrap_or(0.0).abs().max(1.0);
    if let Some(&lo) = ev.first() {
        if lo < -tol * scale {
            bad.push(format!("not positive semidefinite (min eigenvalue {lo:.3e})"));
        }
    }
    let rank = linalg::numeric_rank(&ev, RANK_TOL, scale);
    if rank > rank_bound {
        bad.push(format!("numeric rank {rank} exceeds D = {rank_bound}"));
    }
    let lhs: f64 = a.iter().sum();
    let rhs = (n * n) as f64 / (2.0 * (rank_bound as f64 + 1.0));
    Ok(PsdSumCheck {
        n,
        rank_bound,
        delta,
        violated_preconditions: bad,
        lhs,
        rhs,
        holds: lhs >= rhs,
    })
}

/// `C(n, k)` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Entrywise `p`-th power of the Gram matrix.
pub fn hadamard_power(v: &UnitEmbedding, p: usize) -> Vec<f64> {
    v.gram().into_iter().map(|r| signed_power(r, p)).collect()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HadamardRankCheck {
    pub p: usize,
    pub numeric_rank: usize,
    /// `C(d + p - 1, p)`.
    pub bound: f64,
    pub min_eigenvalue: f64,
    pub rank_ok: bool,
    pub psd_ok: bool,
}

/// Numeric rank and PSD-ness of the Hadamard power `G^(p)`; eigenvalues above
/// `tol * max(1, lambda_max)` count toward the rank.
pub fn hadamard_rank_check(v: &UnitEmbedding, p: usize, tol: f64, psd_tol: f64) -> HadamardRankCheck {
    let n = v.n();
    let ev = linalg::symmetric_eigenvalues(&DMatrix::from_row_slice(n, n, &hadamard_power(v, p)));
    let max = ev.last().copied().unwrap_or(0.0).max(1.0);
    let numeric_rank = linalg::numeric_rank(&ev, tol, max);
    let bound = binomial(v.d() + p - 1, p);
    let min_eigenvalue = ev.first().copied().unwrap_or(0.0);
    HadamardRankCheck {
        p,
        numeric_rank,
        bound,
        min_eigenvalue,
        rank_ok: numeric_rank as f64 <= bound,
        psd_ok: min_eigenvalue >= -psd_tol,
    }
}

/// Default largest exponent for the termwise search: `2 ceil(80 d) + 1`, at most 1001.
pub fn default_p_max(d: usize) -> usize {
    (2 * 80 * d + 1).min(1001)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoremReport {
    pub n: usize,
    pub d: usize,
    pub total_weight: f64,
    pub min_rho: Option<f64>,
    pub admissible: bool,
    pub exact_second_moment: f64,
    /// Best `(2/pi) c_k S_p` over odd `p <= p_max`.
    pub best_termwise_p: usize,
    pub best_termwise_bound: f64,
    /// Every odd `p <= p_max` satisfied `exact >= (2/pi) c_k S_p`.
    pub termwise_domination: bool,
    /// Every odd `S_p` was nonnegative up to round-off.
    pub power_sums_nonnegative: bool,
    pub net: MomentCertificate,
    pub matrix: MomentCertificate,
    /// Ratio `E[X^2] / W^2`.
    pub normalized_second_moment: f64,
    /// For admissible inputs: both floors hold and exact dominates both implied bounds.
    pub passed: bool,
}

pub fn theorem_lower_bound_report(cfg: &SignConfiguration, p_max: usize) -> Result<TheoremReport> {
    let exact = exact_second_moment(cfg)?;
    let w = cfg.total_weight();
    let slack = 1e-9 * (w * w).max(1.0);
    let mut best = (1, f64::MIN);
    let mut domination = true;
    let mut nonneg = true;
    for p in (1..=p_max.max(1)).step_by(2) {
        let s = power_sum(cfg, p)?;
        nonneg &= s >= -slack;
        let b = 2.0 / PI * arcsin_coeff((p - 1) / 2) * s;
        domination &= exact >= b - slack;
        if b > best.1 {
            best = (p, b);
        }
    }
    let net = net_certificate(cfg)?;
    let matrix = matrix_certificate(cfg)?;
    let admissible = cfg.is_admissible();
    let dominates = |c: &MomentCertificate| exact >= c.termwise_bound - slack && exact >= c.implied_lower_bound;
    let passed = domination
        && nonneg
        && dominates(&net)
        && dominates(&matrix)
        && (!admissible || (net.floor_holds && matrix.floor_holds));
    Ok(TheoremReport {
        n: cfg.n(),
        d: cfg.d(),
        total_weight: w,
        min_rho: cfg.min_pairwise_inner(),
        admissible,
        exact_second_moment: exact,
        best_termwise_p: best.0,
        best_termwise_bound: best.1,
        termwise_domination: domination,
        power_sums_nonnegative: nonneg,
        net,
        matrix,
        normalized_second_moment: if w > 0.0 { exact / (w * w) } else { 0.0 },
        passed,
    })
}

/// Random configuration whose pairwise inner products are all at least `min_rho`.
///
/// Vectors are drawn uniformly and rejected when they violate the bound;
/// after `retries` rejections a copy of an already accepted vector is used,
/// which keeps the configuration admissible.
pub fn random_admissible_configuration(
    n: usize,
    d: usize,
    min_rho: f64,
    seed: u64,
    retries: usize,
) -> Result<UnitEmbedding> {
    use rand::Rng;
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let mut r = rng::stream_rng(seed, 0);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut accepted = None;
        for _ in 0..retries.max(1) {
            let cand = rng::unit_vector(&mut r, d);
            if rows.iter().all(|v| dot(v, &cand) >= min_rho) {
                accepted = Some(cand);
                break;
            }
        }
        let v = accepted.unwrap_or_else(|| rows[r.random_range(0..rows.len())].clone());
        rows.push(v);
    }
    UnitEmbedding::new(d, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identical(n: usize, d: usize) -> SignConfiguration {
        let mut v = vec![0.0; d];
        v[0] = 1.0;
        SignConfiguration::new(UnitEmbedding::new(d, vec![v; n]).unwrap())
    }

    fn orthonormal(d: usize) -> SignConfiguration {
        let rows = (0..d).map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        SignConfiguration::new(UnitEmbedding::new(d, rows).unwrap())
    }

    fn antipodal_pair() -> SignConfiguration {
        SignConfiguration::new(UnitEmbedding::new(2, vec![vec![0.6, 0.8], vec![-0.6, -0.8]]).unwrap())
    }

    #[test]
    fn sheppard_values() {
        assert_eq!(sheppard(1.0), 1.0);
        assert_eq!(sheppard(0.0), 0.0);
        assert!((sheppard(0.5) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn exact_second_moment_examples() {
        assert!((exact_second_moment(&identical(7, 3)).unwrap() - 49.0).abs() < 1e-12);
        assert!((exact_second_moment(&orthonormal(4)).unwrap() - 4.0).abs() < 1e-12);
        assert!(exact_second_moment(&antipodal_pair()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rho_slightly_beyond_one_is_clamped() {
        let v = UnitEmbedding::new(1, vec![vec![1.0 + 5e-13], vec![1.0]]).unwrap();
        let m = exact_second_moment(&SignConfiguration::new(v)).unwrap();
        assert!((m - 4.0).abs() < 1e-9);
        assert!(clamp_rho(1.0 + 1e-9).is_err());
    }

    #[test]
    fn mc_degenerate_configurations_are_exact() {
        let m = mc_second_moment(&identical(5, 2), 1000, 1).unwrap();
        assert_eq!(m.estimate, 25.0);
        assert_eq!(m.stderr, 0.0);
        let m = mc_second_moment(&antipodal_pair(), 1000, 1).unwrap();
        assert_eq!(m.estimate, 0.0);
        assert!(mc_second_moment(&antipodal_pair(), 0, 1).is_err());
    }

    #[test]
    fn mc_matches_exact_on_random_vectors() {
        let v = random_admissible_configuration(20, 3, -1.0, 4, 1).unwrap();
        let cfg = SignConfiguration::new(v);
        let exact = exact_second_moment(&cfg).unwrap();
        let mc = mc_second_moment(&cfg, 200_000, 9).unwrap();
        assert!(mc.within(exact, 4.0), "{mc:?} vs {exact}");
    }

    #[test]
    fn arcsin_coefficients() {
        assert!((arcsin_coeff(0) - 1.0).abs() < 1e-15);
        assert!((arcsin_coeff(1) - 1.0 / 6.0).abs() < 1e-15);
        assert!((arcsin_coeff(2) - 3.0 / 40.0).abs() < 1e-15);
        // Factorial form for moderate k.
        for k in 0..15usize {
            let fact = |m: usize| (1..=m).map(|x| x as f64).product::<f64>();
            let direct = fact(2 * k) / (4f64.powi(k as i32) * fact(k).powi(2) * (2 * k + 1) as f64);
            assert!((arcsin_coeff(k) - direct).abs() <= 1e-13 * direct);
        }
        assert!(arcsin_coeff(5000) > 0.0);
        // Partial sums reproduce arcsin.
        let t: f64 = 0.7;
        let series: f64 = (0..400).map(|k| arcsin_coeff(k) * t.powi(2 * k as i32 + 1)).sum();
        assert!((series - t.asin()).abs() < 1e-12);
    }

    #[test]
    fn power_sum_examples() {
        assert!((power_sum(&identical(6, 2), 7).unwrap() - 36.0).abs() < 1e-9);
        assert!((power_sum(&orthonormal(5), 3).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn power_sum_is_symmetric_tensor_norm() {
        let v = random_admissible_configuration(5, 2, -1.0, 17, 1).unwrap();
        let cfg = SignConfiguration::new(v.clone());
        // || sum_i v_i (x) v_i (x) v_i ||^2 by explicit 3-index summation.
        let mut t = [[[0.0f64; 2]; 2]; 2];
        for x in v.vectors() {
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        t[a][b][c] += x[a] * x[b] * x[c];
                    }
                }
            }
        }
        let norm2: f64 = t.iter().flatten().flatten().map(|x| x * x).sum();
        assert!((power_sum(&cfg, 3).unwrap() - norm2).abs() < 1e-12);
    }

    #[test]
    fn net_constants_match_closed_form() {
        let k = net_constants(1);
        let c = 882f64.ln() / (0.98f64 / 0.9).ln();
        assert!((k.c - c).abs() < 1e-12);
        assert!((k.c - 79.64).abs() < 0.01);
        assert_eq!(k.p, 2 * c.ceil() as usize + 1);
        assert_eq!(k.p, 161);
        assert_eq!(net_constants(3).p, 2 * (3.0 * c).ceil() as usize + 1);
    }

    #[test]
    fn net_floor_holds_on_admissible_configs() {
        for seed in 0..10 {
            let v = random_admissible_configuration(30, 2, ADMISSIBLE_MIN_RHO, seed, 50).unwrap();
            let cfg = SignConfiguration::new(v);
            assert!(cfg.is_admissible());
            let cert = net_certificate(&cfg).unwrap();
            assert!(cert.floor_holds, "{cert:?}");
        }
    }

    #[test]
    fn psd_sum_examples() {
        let n = 6;
        let ones = vec![1.0; n * n];
        let r = psd_sum_check(&ones, n, 1, 0.0, 1e-9).unwrap();
        assert!(r.preconditions_met() && r.holds);
        assert_eq!((r.lhs, r.rhs), (36.0, 9.0));

        let eye: Vec<f64> = (0..n * n).map(|k| f64::from(u8::from(k % (n + 1) == 0))).collect();
        let r = psd_sum_check(&eye, n, n, 0.0, 1e-9).unwrap();
        assert!(r.preconditions_met() && r.holds);
        assert_eq!(r.lhs, 6.0);

        // delta * D > 1/2 is reported rather than asserted.
        let r = psd_sum_check(&eye, n, n, 0.2, 1e-9).unwrap();
        assert!(!r.preconditions_met());
    }

    #[test]
    fn hadamard_rank_examples() {
        let v = random_admissible_configuration(10, 2, -1.0, 3, 1).unwrap();
        let r1 = hadamard_rank_check(&v, 1, RANK_TOL, 1e-8);
        assert!(r1.numeric_rank <= 2 && r1.rank_ok && r1.psd_ok);
        let r3 = hadamard_rank_check(&v, 3, RANK_TOL, 1e-8);
        assert_eq!(r3.bound, 4.0);
        assert!(r3.rank_ok && r3.psd_ok);
        let copies = identical(8, 3);
        assert_eq!(hadamard_rank_check(copies.embedding(), 5, RANK_TOL, 1e-8).numeric_rank, 1);
        assert_eq!(binomial(101 * 2, 100 * 2 + 1), binomial(202, 1));
    }

    #[test]
    fn matrix_certificate_examples() {
        let cfg = identical(9, 2);
        let m = matrix_certificate(&cfg).unwrap();
        assert_eq!(m.p, 201);
        assert!((m.s_p - 81.0).abs() < 1e-9 && m.floor_holds);

        let rho: f64 = 0.3;
        let pair = SignConfiguration::new(
            UnitEmbedding::normalized(2, vec![vec![1.0, 0.0], vec![rho, (1.0 - rho * rho).sqrt()]]).unwrap(),
        );
        let m = matrix_certificate(&pair).unwrap();
        assert!((m.s_p - (2.0 + 2.0 * rho.powi(201))).abs() < 1e-12);
        assert!(m.floor_holds);
    }

    #[test]
    fn theorem_report_degenerate_cases() {
        let r = theorem_lower_bound_report(&identical(4, 2), 41).unwrap();
        assert!((r.exact_second_moment - 16.0).abs() < 1e-12);
        assert!((r.best_termwise_bound - 2.0 / PI * 16.0).abs() < 1e-9);
        assert!(r.passed);
        let r = theorem_lower_bound_report(&orthonormal(3), 41).unwrap();
        assert!((r.exact_second_moment - 3.0).abs() < 1e-12);
        assert!(r.passed);
    }

    #[test]
    fn weighted_matches_duplication() {
        let v = random_admissible_configuration(4, 3, ADMISSIBLE_MIN_RHO, 21, 50).unwrap();
        let counts = [1usize, 3, 2, 4];
        let weighted = SignConfiguration::weighted(v, counts.iter().map(|&c| c as f64).collect()).unwrap();
        let dup = weighted.duplicated(&counts).unwrap();
        let a = exact_second_moment(&weighted).unwrap();
        let b = exact_second_moment(&dup).unwrap();
        assert!((a - b).abs() < 1e-9);
        let mw = mc_second_moment(&weighted, 100_000, 2).unwrap();
        let md = mc_second_moment(&dup, 100_000, 3).unwrap();
        let se = (mw.stderr.powi(2) + md.stderr.powi(2)).sqrt();
        assert!((mw.estimate - md.estimate).abs() <= 4.0 * se);
    }

    #[test]
    fn rejects_bad_weights() {
        let v = UnitEmbedding::new(1, vec![vec![1.0]]).unwrap();
        assert!(SignConfiguration::weighted(v.clone(), vec![-1.0]).is_err());
        assert!(SignConfiguration::weighted(v, vec![1.0, 2.0]).is_err());
    }
}
