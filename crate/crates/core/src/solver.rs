//! Low-rank heuristic solver for the Max-Cut SDP with triangle inequalities.
//!
//! Projected gradient ascent over the product of unit spheres. The penalized
//! objective is `sdp_objective - mu * sum(violation^2)` over every triangle
//! constraint; `mu` is multiplied by `penalty_growth` after each phase until
//! the worst violation meets `feasibility_target`. Steps use Armijo
//! backtracking, so every accepted step increases the penalized objective
//! at the current `mu`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{
    check_feasibility, for_each_constraint_of_triple, objective_from, UnitEmbedding,
    FEASIBILITY_TOL,
};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::dot;
use crate::rng::{self, DEFAULT_SEED};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Total gradient steps across all phases.
    pub max_iters: usize,
    /// Gradient steps allowed per penalty phase.
    pub iters_per_phase: usize,
    pub initial_step: f64,
    /// When false the plain SDP (unit norms only) is solved.
    pub enforce_triangles: bool,
    pub penalty_initial: f64,
    pub penalty_growth: f64,
    pub penalty_max: f64,
    /// Stop once the worst triangle violation is at most this.
    pub feasibility_target: f64,
    /// A phase ends when the tangent gradient norm falls below `tol * (1 + W)`.
    pub tol: f64,
    /// Above this many vertices the penalty uses a random sample of triples per step.
    pub full_triangle_limit: usize,
    pub sampled_triples: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 200_000,
            iters_per_phase: 3_000,
            initial_step: 0.1,
            enforce_triangles: true,
            penalty_initial: 1.0,
            penalty_growth: 2.0,
            penalty_max: 1e8,
            feasibility_target: FEASIBILITY_TOL,
            tol: 1e-10,
            full_triangle_limit: 200,
            sampled_triples: 20_000,
            seed: DEFAULT_SEED,
        }
    }
}

impl SolverConfig {
    /// Plain SDP without triangle constraints.
    pub fn basic() -> Self {
        SolverConfig { enforce_triangles: false, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            self.initial_step,
            self.penalty_initial,
            self.penalty_max,
            self.feasibility_target,
            self.tol,
        ];
        if self.max_iters == 0
            || self.iters_per_phase == 0
            || self.sampled_triples == 0
            || positive.iter().any(|x| !(x.is_finite() && *x > 0.0))
            || !(self.penalty_growth > 1.0)
        {
            return Err(Error::invalid("solver configuration values must be positive (growth > 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub penalty_weight: f64,
    pub penalized_objective: f64,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub embedding: UnitEmbedding,
    pub objective: f64,
    pub worst_violation: f64,
    pub iterations: usize,
    pub penalty_weight: f64,
    pub converged: bool,
    pub warning: Option<String>,
    /// Value after every accepted step.
    pub trace: Vec<TracePoint>,
}

/// Solves from a random start drawn from `cfg.seed`.
pub fn solve_low_rank(g: &WeightedGraph, d: usize, cfg: &SolverConfig) -> Result<SolveReport> {
    if d == 0 {
        return Err(Error::invalid("dimension d must be at least 1"));
    }
    let mut r = rng::stream_rng(cfg.seed, 0);
    let rows = (0..g.n()).map(|_| rng::unit_vector(&mut r, d)).collect();
    let init = UnitEmbedding::new(d, rows)?;
    solve_low_rank_from(g, &init, cfg)
}

/// Solves starting at `init`.
pub fn solve_low_rank_from(
    g: &WeightedGraph,
    init: &UnitEmbedding,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    if init.n() != g.n() {
        return Err(Error::LengthMismatch { expected: g.n(), got: init.n() });
    }
    let n = g.n();
    let d = init.d();
    let mut state = Ascent {
        g,
        n,
        d,
        mu: if cfg.enforce_triangles { cfg.penalty_initial } else { 0.0 },
        triples: TripleSet::All,
        grad: vec![0.0; n * d],
        gram: vec![0.0; n * n],
    };
    let sampled = cfg.enforce_triangles && n > cfg.full_triangle_limit;
    let mut sample_rng = rng::stream_rng(cfg.seed, 1);

    let mut x = init.flat().to_vec();
    let mut step = cfg.initial_step;
    let mut iterations = 0;
    let mut trace = Vec::new();
    let grad_tol = cfg.tol * (1.0 + g.total_weight());
    let mut inner_converged;
    let mut feasible = !cfg.enforce_triangles;

    loop {
        inner_converged = false;
        for _ in 0..cfg.iters_per_phase {
            if iterations >= cfg.max_iters {
                break;
            }
            if sampled {
                state.triples = TripleSet::sample(n, cfg.sampled_triples, &mut sample_rng);
            }
            let (f0, _) = state.value_and_gradient(&x, true);
            let gnorm2 = state.project_gradient(&x);
            if gnorm2.sqrt() < grad_tol {
                inner_converged = true;
                break;
            }
            iterations += 1;
            let mut accepted = false;
            while step > 1e-18 {
                let trial = state.retract(&x, step);
                let (f1, obj1) = state.value_and_gradient(&trial, false);
                if f1 >= f0 + 1e-4 * step * gnorm2 {
                    x = trial;
                    trace.push(TracePoint {
                        iteration: iterations,
                        penalty_weight: state.mu,
                        penalized_objective: f1,
                        objective: obj1,
                    });
                    step = (step * 1.5).min(1e3);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                // No ascent direction left at machine precision.
                inner_converged = true;
                step = cfg.initial_step;
                break;
            }
        }
        if !cfg.enforce_triangles {
            break;
        }
        let worst = worst_violation(&x, d);
        if worst <= cfg.feasibility_target {
            feasible = true;
            break;
        }
        if iterations >= cfg.max_iters || state.mu * cfg.penalty_growth > cfg.penalty_max {
            break;
        }
        state.mu *= cfg.penalty_growth;
    }

    let embedding = UnitEmbedding::from_flat_unchecked(d, x);
    let objective = objective_from(g, |i, j| embedding.inner(i, j));
    let worst_violation = if cfg.enforce_triangles || n <= cfg.full_triangle_limit {
        check_feasibility(&embedding, 0.0).worst_triangle_violation
    } else {
        0.0
    };
    // With triangles the penalty schedule ends on feasibility, not stationarity.
    let converged = if cfg.enforce_triangles { feasible } else { inner_converged };
    let warning = (!converged).then(|| {
        format!(
            "solver stopped after {iterations} iterations without convergence \
             (worst violation {worst_violation:.3e}, penalty {:.3e})",
            state.mu
        )
    });
    Ok(SolveReport {
        embedding,
        objective,
        worst_violation,
        iterations,
        penalty_weight: state.mu,
        converged,
        warning,
        trace,
    })
}

fn worst_violation(x: &[f64], d: usize) -> f64 {
    check_feasibility(&UnitEmbedding::from_flat_unchecked(d, x.to_vec()), 0.0)
        .worst_triangle_violation
}

enum TripleSet {
    All,
    Sampled(Vec<(usize, usize, usize)>),
}

impl TripleSet {
    fn sample<R: Rng>(n: usize, count: usize, rng: &mut R) -> Self {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let mut t = [rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n)];
            t.sort_unstable();
            if t[0] < t[1] && t[1] < t[2] {
                out.push((t[0], t[1], t[2]));
            }
        }
        TripleSet::Sampled(out)
    }
}

struct Ascent<'a> {
    g: &'a WeightedGraph,
    n: usize,
    d: usize,
    mu: f64,
    triples: TripleSet,
    grad: Vec<f64>,
    gram: Vec<f64>,
}

impl Ascent<'_> {
    fn row<'x>(&self, x: &'x [f64], i: usize) -> &'x [f64] {
        &x[i * self.d..(i + 1) * self.d]
    }

    /// Returns (penalized objective, objective); fills `self.grad` when asked.
    fn value_and_gradient(&mut self, x: &[f64], with_grad: bool) -> (f64, f64) {
        let (n, d) = (self.n, self.d);
        let objective = objective_from(self.g, |i, j| dot(self.row(x, i), self.row(x, j)));
        if with_grad {
            self.grad.iter_mut().for_each(|v| *v = 0.0);
            for e in self.g.edges() {
                for t in 0..d {
                    self.grad[e.u * d + t] -= 0.5 * e.w * x[e.v * d + t];
                    self.grad[e.v * d + t] -= 0.5 * e.w * x[e.u * d + t];
                }
            }
        }
        if self.mu == 0.0 {
            return (objective, objective);
        }

        for i in 0..n {
            for j in i..n {
                let r = dot(self.row(x, i), self.row(x, j));
                self.gram[i * n + j] = r;
                self.gram[j * n + i] = r;
            }
        }
        let mut sq = 0.0;
        let mut hits: Vec<(usize, usize, usize, f64, f64, f64)> = Vec::new();
        let gram = &self.gram;
        let mut visit = |t: (usize, usize, usize)| {
            for_each_constraint_of_triple(gram, n, t, |i, m, k, b1, b2, s| {
                if s < 0.0 {
                    sq += s * s;
                    if with_grad {
                        hits.push((i, m, k, b1, b2, -s));
                    }
                }
            });
        };
        match &self.triples {
            TripleSet::All => {
                for a in 0..n {
                    for b in a + 1..n {
                        for c in b + 1..n {
                            visit((a, b, c));
                        }
                    }
                }
            }
            TripleSet::Sampled(ts) => ts.iter().copied().for_each(&mut visit),
        }
        if with_grad {
            for (i, m, k, b1, b2, viol) in hits {
                // d(-mu viol^2) = 2 mu viol ds
                let c = 2.0 * self.mu * viol;
                for t in 0..d {
                    let (vi, vm, vk) = (x[i * d + t], x[m * d + t], x[k * d + t]);
                    self.grad[i * d + t] += c * (-b1 * vm + b1 * b2 * vk);
                    self.grad[m * d + t] += c * (-b1 * vi - b2 * vk);
                    self.grad[k * d + t] += c * (-b2 * vm + b1 * b2 * vi);
                }
            }
        }
        (objective - self.mu * sq, objective)
    }

    /// Projects `self.grad` onto the tangent space at `x`; returns its squared norm.
    fn project_gradient(&mut self, x: &[f64]) -> f64 {
        let d = self.d;
        let mut norm2 = 0.0;
        for i in 0..self.n {
            let v = &x[i * d..(i + 1) * d];
            let gi = &mut self.grad[i * d..(i + 1) * d];
            let radial = dot(gi, v);
            for (gt, vt) in gi.iter_mut().zip(v) {
                *gt -= radial * vt;
                norm2 += *gt * *gt;
            }
        }
        norm2
    }

    fn retract(&self, x: &[f64], step: f64) -> Vec<f64> {
        let d = self.d;
        let mut out: Vec<f64> = x.iter().zip(&self.grad).map(|(v, g)| v + step * g).collect();
        for row in out.chunks_exact_mut(d) {
            let norm = dot(row, row).sqrt();
            row.iter_mut().for_each(|v| *v /= norm);
        }
        out
    }
}
