//! Hyperplane rounding followed by conservative local improvement.
//!
//! After rounding `x_i = sgn(<g, v_i>)`, vertices whose projection has
//! magnitude below `epsilon` form the candidate set `S`. A candidate `i`
//! flips when the weight to its same-side, non-candidate neighbors `B_i`
//! exceeds half of its total incident weight `W_i`. Non-candidate labels
//! never change, so the outcome does not depend on the order in which
//! candidates are visited, and every flip gains at least
//! `Delta_i = (2 * w(B_i) - W_i)_+` because candidate neighbors are
//! charged as losses.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::UnitEmbedding;
use crate::error::{Error, Result};
use crate::graph::{Cut, WeightedGraph};
use crate::linalg::dot;
use crate::rng::{self, DEFAULT_SEED};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RoundingConfig {
    /// Candidate threshold on `|<g, v_i>|`.
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
}

impl RoundingConfig {
    /// `epsilon = 2^(-3d)`.
    pub fn for_dimension(d: usize) -> Self {
        RoundingConfig { epsilon: default_epsilon(d), trials: 1000, seed: DEFAULT_SEED }
    }

    fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::invalid("epsilon must be nonnegative"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be positive"));
        }
        Ok(())
    }
}

pub fn default_epsilon(d: usize) -> f64 {
    2f64.powi(-3 * d as i32)
}

/// `<g, v_i>` for every vertex.
pub fn projections(v: &UnitEmbedding, g: &[f64]) -> Result<Vec<f64>> {
    if g.len() != v.d() {
        return Err(Error::DimensionMismatch { expected: v.d(), got: g.len() });
    }
    Ok(v.vectors().map(|vi| dot(vi, g)).collect())
}

fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// `x_i = +1` when `<g, v_i> >= 0`, else `-1`.
pub fn hyperplane_round(v: &UnitEmbedding, g: &[f64]) -> Result<Cut> {
    Ok(Cut::new(projections(v, g)?.into_iter().map(sign).collect()).expect("signs are ±1"))
}

/// Vertices with `|<g, v_i>| < epsilon`, ascending.
pub fn candidate_set(v: &UnitEmbedding, g: &[f64], epsilon: f64) -> Result<Vec<usize>> {
    Ok(candidates_from(&projections(v, g)?, epsilon))
}

fn candidates_from(proj: &[f64], epsilon: f64) -> Vec<usize> {
    proj.iter()
        .enumerate()
        .filter(|(_, p)| p.abs() < epsilon)
        .map(|(i, _)| i)
        .collect()
}

/// Output of the local-improvement pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub cut: Cut,
    pub candidates: Vec<usize>,
    pub flipped: Vec<usize>,
    /// `Delta_i` for every candidate.
    pub gains: BTreeMap<usize, f64>,
}

/// Runs the improvement pass on `x`, visiting candidates in ascending order.
pub fn local_improve(
    graph: &WeightedGraph,
    v: &UnitEmbedding,
    g: &[f64],
    x: &Cut,
    epsilon: f64,
) -> Result<Improvement> {
    let proj = projections(v, g)?;
    let candidates = candidates_from(&proj, epsilon);
    improve_in_order(graph, &proj, x, epsilon, candidates.clone(), candidates)
}

/// Same as [`local_improve`] but visits candidates in `order`, which must be a
/// permutation of the candidate set.
pub fn local_improve_in_order(
    graph: &WeightedGraph,
    v: &UnitEmbedding,
    g: &[f64],
    x: &Cut,
    epsilon: f64,
    order: &[usize],
) -> Result<Improvement> {
    let proj = projections(v, g)?;
    let candidates = candidates_from(&proj, epsilon);
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != candidates {
        return Err(Error::invalid("order is not a permutation of the candidate set"));
    }
    improve_in_order(graph, &proj, x, epsilon, candidates, order.to_vec())
}

fn improve_in_order(
    graph: &WeightedGraph,
    proj: &[f64],
    x: &Cut,
    epsilon: f64,
    candidates: Vec<usize>,
    order: Vec<usize>,
) -> Result<Improvement> {
    if x.len() != graph.n() || proj.len() != graph.n() {
        return Err(Error::LengthMismatch { expected: graph.n(), got: x.len() });
    }
    let mut cut = x.clone();
    let mut gains = BTreeMap::new();
    let mut flipped = Vec::new();
    for i in order {
        let labels = cut.labels();
        let mut same_side = 0.0;
        let mut total = 0.0;
        for &(j, w) in graph.neighbors(i) {
            total += w;
            // Labels read here are current; B_i only involves non-candidates,
            // whose labels never change, and x_i is visited once.
            if labels[i] == labels[j] && proj[j].abs() >= epsilon {
                same_side += w;
            }
        }
        gains.insert(i, (2.0 * same_side - total).max(0.0));
        if same_side > total / 2.0 {
            cut.flip(i);
            flipped.push(i);
        }
    }
    flipped.sort_unstable();
    Ok(Improvement { cut, candidates, flipped, gains })
}

/// One round of hyperplane rounding with local improvement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingOutcome {
    pub gaussian: Vec<f64>,
    pub initial_cut: Cut,
    pub candidate_set: Vec<usize>,
    pub flipped: Vec<usize>,
    pub final_cut: Cut,
    pub initial_value: f64,
    pub final_value: f64,
    pub gains: BTreeMap<usize, f64>,
}

/// Rounds with the Gaussian drawn for trial 0 of `cfg.seed`.
pub fn round_once(graph: &WeightedGraph, v: &UnitEmbedding, cfg: &RoundingConfig) -> Result<RoundingOutcome> {
    round_trial(graph, v, cfg, 0)
}

/// Rounds with the Gaussian of trial `trial`; depends only on `(cfg.seed, trial)`.
pub fn round_trial(
    graph: &WeightedGraph,
    v: &UnitEmbedding,
    cfg: &RoundingConfig,
    trial: u64,
) -> Result<RoundingOutcome> {
    cfg.validate()?;
    if v.n() != graph.n() {
        return Err(Error::LengthMismatch { expected: graph.n(), got: v.n() });
    }
    let gaussian = rng::gaussian_vector(&mut rng::stream_rng(cfg.seed, trial), v.d());
    round_with(graph, v, gaussian, cfg.epsilon)
}

/// Rounds with a caller-supplied Gaussian.
pub fn round_with(
    graph: &WeightedGraph,
    v: &UnitEmbedding,
    gaussian: Vec<f64>,
    epsilon: f64,
) -> Result<RoundingOutcome> {
    let initial_cut = hyperplane_round(v, &gaussian)?;
    let imp = local_improve(graph, v, &gaussian, &initial_cut, epsilon)?;
    let initial_value = graph.cut_value(&initial_cut)?;
    let final_value = graph.cut_value(&imp.cut)?;
    Ok(RoundingOutcome {
        gaussian,
        initial_cut,
        candidate_set: imp.candidates,
        flipped: imp.flipped,
        final_cut: imp.cut,
        initial_value,
        final_value,
        gains: imp.gains,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialStatistics {
    pub trials: usize,
    pub mean_initial: f64,
    pub stderr_initial: f64,
    pub mean_final: f64,
    pub stderr_final: f64,
    pub mean_improvement: f64,
    pub stderr_improvement: f64,
    /// Trials whose final value fell below the initial value (always 0).
    pub decreases: usize,
    pub best_value: f64,
    pub best_trial: u64,
    pub best_cut: Cut,
    pub initial_values: Vec<f64>,
    pub final_values: Vec<f64>,
}

/// Mean and standard error of the mean.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs `cfg.trials` independent rounds and aggregates their values.
pub fn rounding_trials(
    graph: &WeightedGraph,
    v: &UnitEmbedding,
    cfg: &RoundingConfig,
) -> Result<TrialStatistics> {
    cfg.validate()?;
    let values: Vec<(f64, f64)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| round_trial(graph, v, cfg, t).map(|o| (o.initial_value, o.final_value)))
        .collect::<Result<_>>()?;
    let initial: Vec<f64> = values.iter().map(|p| p.0).collect();
    let fin: Vec<f64> = values.iter().map(|p| p.1).collect();
    let diff: Vec<f64> = values.iter().map(|p| p.1 - p.0).collect();
    let (best_trial, best_value) = fin
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (t, &x)| if x > acc.1 { (t, x) } else { acc });
    let best_cut = round_trial(graph, v, cfg, best_trial as u64)?.final_cut;
    let (mean_initial, stderr_initial) = mean_and_stderr(&initial);
    let (mean_final, stderr_final) = mean_and_stderr(&fin);
    let (mean_improvement, stderr_improvement) = mean_and_stderr(&diff);
    Ok(TrialStatistics {
        trials: cfg.trials,
        mean_initial,
        stderr_initial,
        mean_final,
        stderr_final,
        mean_improvement,
        stderr_improvement,
        decreases: diff.iter().filter(|&&x| x < 0.0).count(),
        best_value,
        best_trial: best_trial as u64,
        best_cut,
        initial_values: initial,
        final_values: fin,
    })
}

/// `(arccos(rho) / pi) / ((1 - rho) / 2)`: hyperplane cut probability over SDP contribution.
pub fn gw_ratio(rho: f64) -> f64 {
    (rho.clamp(-1.0, 1.0).acos() / PI) / ((1.0 - rho) / 2.0)
}

fn gw_minimum() -> (f64, f64) {
    // Golden-section search; the ratio is unimodal on [-1, 1).
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (-1.0, 0.5);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    while b - a > 1e-12 {
        if gw_ratio(c) < gw_ratio(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - inv_phi * (b - a);
        d = a + inv_phi * (b - a);
    }
    let rho = 0.5 * (a + b);
    (gw_ratio(rho), rho)
}

/// The Goemans-Williamson constant `min_rho gw_ratio(rho)`.
pub fn alpha_gw() -> f64 {
    gw_minimum().0
}

/// The minimizing correlation of [`gw_ratio`].
pub fn rho_star() -> f64 {
    gw_minimum().1
}

/// Empirical crossing frequency of one edge against `arccos(rho) / pi`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EdgeCrossing {
    pub u: usize,
    pub v: usize,
    pub frequency: f64,
    pub expected: f64,
    pub stderr: f64,
}

/// Fraction of `trials` Gaussians separating each edge.
pub fn edge_crossing_frequencies(
    graph: &WeightedGraph,
    v: &UnitEmbedding,
    trials: usize,
    seed: u64,
) -> Result<Vec<EdgeCrossing>> {
    if v.n() != graph.n() {
        return Err(Error::LengthMismatch { expected: graph.n(), got: v.n() });
    }
    let counts = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let g = rng::gaussian_vector(&mut rng::stream_rng(seed, t), v.d());
            let x = hyperplane_round(v, &g).expect("dimension checked");
            let l = x.labels();
            graph.edges().iter().map(|e| u64::from(l[e.u] != l[e.v])).collect::<Vec<_>>()
        })
        .reduce(
            || vec![0u64; graph.num_edges()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(graph
        .edges()
        .iter()
        .zip(counts)
        .map(|(e, c)| {
            let expected = v.inner(e.u, e.v).clamp(-1.0, 1.0).acos() / PI;
            EdgeCrossing {
                u: e.u,
                v: e.v,
                frequency: c as f64 / trials as f64,
                expected,
                stderr: (expected * (1.0 - expected) / trials as f64).sqrt(),
            }
        })
        .collect())
}

/// Monte Carlo estimate of `E[Delta_i | i in S]` for one vertex.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VertexGain {
    pub vertex: usize,
    pub vertex_weight: f64,
    pub candidate_count: usize,
    /// `None` when the vertex never became a candidate.
    pub mean_gain: Option<f64>,
    /// `mean_gain / W_i`, or 0 for isolated vertices.
    pub mean_normalized_gain: Option<f64>,
}

pub fn conditional_gain_experiment(
    graph: &WeightedGraph,
    v: &UnitEmbedding,
    cfg: &RoundingConfig,
) -> Result<Vec<VertexGain>> {
    cfg.validate()?;
    let n = graph.n();
    let (counts, sums) = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let o = round_trial(graph, v, cfg, t)?;
            let mut c = vec![0usize; n];
            let mut s = vec![0.0; n];
            for (&i, &gain) in &o.gains {
                c[i] += 1;
                s[i] += gain;
            }
            Ok::<_, Error>((c, s))
        })
        .try_reduce(
            || (vec![0usize; n], vec![0.0; n]),
            |(mut c1, mut s1), (c2, s2)| {
                c1.iter_mut().zip(c2).for_each(|(a, b)| *a += b);
                s1.iter_mut().zip(s2).for_each(|(a, b)| *a += b);
                Ok((c1, s1))
            },
        )?;
    Ok((0..n)
        .map(|i| {
            let w = graph.vertex_weight(i);
            let mean = (counts[i] > 0).then(|| sums[i] / counts[i] as f64);
            VertexGain {
                vertex: i,
                vertex_weight: w,
                candidate_count: counts[i],
                mean_gain: mean,
                mean_normalized_gain: mean.map(|m| if w > 0.0 { m / w } else { 0.0 }),
            }
        })
        .collect())
}
