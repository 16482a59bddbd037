//! The upper-bound side: uniformly random configurations are nearly flat.
//!
//! For i.i.d. uniform `v_i` the cross terms of `E_g[X^2]` cancel in
//! expectation (replacing `v_i` by `-v_i` flips their sign), so
//! `E_v E_g[X^2] = n`; the spherical cap bound `P(<U,V> >= a) <= (1-a^2)^((d-1)/2)`
//! makes `<v_i, v_j> >= -0.9` likely for all pairs at once.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anticonc::{self, SignConfiguration, ADMISSIBLE_MIN_RHO};
use crate::embedding::UnitEmbedding;
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::rng;
use crate::rounding::mean_and_stderr;

/// Pairs drawn per shard in [`cap_tail_empirical`].
const SHARD: u64 = 1 << 15;

/// `n` i.i.d. uniform unit vectors in `R^d` (normalized Gaussians).
pub fn sample_sphere(n: usize, d: usize, seed: u64) -> Result<UnitEmbedding> {
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let mut r = rng::stream_rng(seed, 0);
    let flat = (0..n).flat_map(|_| rng::unit_vector(&mut r, d)).collect();
    Ok(UnitEmbedding::from_flat_unchecked(d, flat))
}

/// `(1 - a^2)^((d-1)/2)`, an upper bound on `P(<U,V> >= a)` for `0 < a <= 1`.
pub fn cap_tail_bound(a: f64, d: usize) -> Result<f64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::invalid(format!("cap threshold must lie in (0, 1], got {a}")));
    }
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    Ok((1.0 - a * a).max(0.0).powf((d as f64 - 1.0) / 2.0))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CapTailEstimate {
    pub a: f64,
    pub d: usize,
    pub pairs: u64,
    pub hits: u64,
    pub frequency: f64,
    pub bound: f64,
    /// Binomial standard error at `max(frequency, bound)`.
    pub stderr: f64,
    /// `frequency <= bound + 4 stderr`.
    pub within_bound: bool,
}

/// Frequency of `<U, V> >= a` over independent uniform pairs.
pub fn cap_tail_empirical(a: f64, d: usize, pairs: u64, seed: u64) -> Result<CapTailEstimate> {
    let bound = cap_tail_bound(a, d)?;
    if pairs == 0 {
        return Err(Error::invalid("pairs must be positive"));
    }
    let hits: u64 = (0..pairs.div_ceil(SHARD))
        .into_par_iter()
        .map(|s| {
            let mut r = rng::stream_rng(seed, s);
            let count = SHARD.min(pairs - s * SHARD);
            (0..count)
                .filter(|_| {
                    let u = rng::unit_vector(&mut r, d);
                    let v = rng::unit_vector(&mut r, d);
                    dot(&u, &v) >= a
                })
                .count() as u64
        })
        .sum();
    let frequency = hits as f64 / pairs as f64;
    let p = frequency.max(bound).min(1.0);
    let stderr = (p * (1.0 - p) / pairs as f64).sqrt();
    Ok(CapTailEstimate {
        a,
        d,
        pairs,
        hits,
        frequency,
        bound,
        stderr,
        within_bound: frequency <= bound + 4.0 * stderr,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentIdentityReport {
    pub d: usize,
    pub n: usize,
    pub configs: usize,
    pub mc_samples: u64,
    /// Per-configuration Monte Carlo estimates of `E_g[X^2]`.
    pub estimates: Vec<f64>,
    /// Per-configuration exact `E_g[X^2]`.
    pub exact: Vec<f64>,
    pub mean: f64,
    /// Standard error of `mean` across configurations (includes sampling noise).
    pub stderr: f64,
    pub mean_exact: f64,
    pub stderr_exact: f64,
    /// `|mean - n| <= 4 stderr`.
    pub within: bool,
}

/// Averages `E_g[X^2]` over `configs` independent uniform configurations and
/// compares the grand mean with `n`.
pub fn mean_second_moment_identity(
    d: usize,
    n: usize,
    configs: usize,
    mc_samples: u64,
    seed: u64,
) -> Result<MomentIdentityReport> {
    if configs == 0 || n == 0 {
        return Err(Error::invalid("configs and n must be positive"));
    }
    let per: Vec<(f64, f64)> = (0..configs as u64)
        .into_par_iter()
        .map(|c| {
            let v = sample_sphere(n, d, rng::derive_seed(seed, 2 * c))?;
            let cfg = SignConfiguration::new(v);
            let mc = anticonc::mc_second_moment(&cfg, mc_samples, rng::derive_seed(seed, 2 * c + 1))?;
            Ok((mc.estimate, anticonc::exact_second_moment(&cfg)?))
        })
        .collect::<Result<_>>()?;
    let (estimates, exact): (Vec<f64>, Vec<f64>) = per.into_iter().unzip();
    let (mean, stderr) = mean_and_stderr(&estimates);
    let (mean_exact, stderr_exact) = mean_and_stderr(&exact);
    let target = n as f64;
    let within = (mean - target).abs() <= 4.0 * stderr + 1e-9 * target;
    Ok(MomentIdentityReport {
        d,
        n,
        configs,
        mc_samples,
        estimates,
        exact,
        mean,
        stderr,
        mean_exact,
        stderr_exact,
        within,
    })
}

/// Parameters of [`find_flat_configuration`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExtremalSearchConfig {
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub max_retries: usize,
    /// When positive, the returned configuration is also checked by Monte Carlo.
    pub mc_samples: u64,
}

impl ExtremalSearchConfig {
    pub fn new(d: usize, n: usize) -> Self {
        ExtremalSearchConfig { d, n, seed: rng::DEFAULT_SEED, max_retries: 1000, mc_samples: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::invalid("dimension must be at least 2"));
        }
        if self.n == 0 || self.max_retries == 0 {
            return Err(Error::invalid("n and max_retries must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlatSearchReport {
    pub d: usize,
    pub n: usize,
    pub attempts: usize,
    /// A configuration met both conditions.
    pub found: bool,
    pub min_rho: Option<f64>,
    pub admissible: bool,
    pub second_moment: f64,
    /// `E[X^2] / n^2`.
    pub ratio: f64,
    pub mc_estimate: Option<anticonc::MonteCarloEstimate>,
    /// The lower-bound certificates still hold for the returned configuration.
    pub certificates_hold: bool,
}

/// Resamples uniform configurations until one has all `rho_ij >= -0.9` and
/// `E[X^2] <= 2n`. Without success the admissible configuration with the
/// smallest second moment (or the smallest overall, if none was admissible)
/// is returned with `found = false`.
pub fn find_flat_configuration(cfg: &ExtremalSearchConfig) -> Result<(UnitEmbedding, FlatSearchReport)> {
    cfg.validate()?;
    let limit = 2.0 * cfg.n as f64;
    let mut best: Option<(bool, f64, UnitEmbedding)> = None;
    let mut attempts = 0;
    for attempt in 0..cfg.max_retries as u64 {
        attempts += 1;
        let v = sample_sphere(cfg.n, cfg.d, rng::derive_seed(cfg.seed, attempt))?;
        let sc = SignConfiguration::new(v.clone());
        let admissible = sc.is_admissible();
        let m = anticonc::exact_second_moment(&sc)?;
        let better = match &best {
            None => true,
            Some((adm, bm, _)) => (admissible && !adm) || (admissible == *adm && m < *bm),
        };
        if better {
            best = Some((admissible, m, v));
        }
        if admissible && m <= limit {
            break;
        }
    }
    let (admissible, second_moment, v) = best.expect("at least one attempt");
    let sc = SignConfiguration::new(v.clone());
    let mc_estimate = if cfg.mc_samples > 0 {
        Some(anticonc::mc_second_moment(&sc, cfg.mc_samples, rng::derive_seed(cfg.seed, u64::MAX))?)
    } else {
        None
    };
    let theorem = anticonc::theorem_lower_bound_report(&sc, anticonc::default_p_max(cfg.d))?;
    let n2 = (cfg.n * cfg.n) as f64;
    let report = FlatSearchReport {
        d: cfg.d,
        n: cfg.n,
        attempts,
        found: admissible && second_moment <= limit,
        min_rho: sc.min_pairwise_inner(),
        admissible,
        second_moment,
        ratio: second_moment / n2,
        mc_estimate,
        certificates_hold: theorem.passed,
    };
    Ok((v, report))
}

/// Whether every pairwise inner product is at least `-0.9`.
pub fn is_admissible(v: &UnitEmbedding) -> bool {
    v.min_pairwise_inner().is_none_or(|m| m >= ADMISSIBLE_MIN_RHO)
}
