//! Vector solutions of the Max-Cut SDP: representation, objective,
//! triangle-inequality feasibility, rank, and JSON persistence.
//!
//! A solution assigns a unit vector `v_i` in `R^d` to each vertex. The SDP
//! objective is `1/2 * sum_{ij in E} w_ij (1 - <v_i, v_j>)`. The squared
//! triangle inequalities
//!
//! ```text
//! |a_i v_i - a_j v_j|^2 + |a_j v_j - a_k v_k|^2 >= |a_i v_i - a_k v_k|^2
//! ```
//!
//! expand, with `b1 = a_i a_j` and `b2 = a_j a_k`, to the slack
//! `1 - b1 rho_ij - b2 rho_jk + b1 b2 rho_ik >= 0`, where `j` is the middle
//! vertex. Every triple is checked with each of its three vertices in the
//! middle and all four sign patterns.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Cut, WeightedGraph};
use crate::linalg::{self, dot};

/// Allowed deviation of `|v_i|` from 1.
pub const UNIT_NORM_TOL: f64 = 1e-8;

/// Default slack tolerance for triangle constraints.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Default relative eigenvalue threshold for [`UnitEmbedding::gram_rank`].
pub const RANK_TOL: f64 = 1e-9;

/// Longest violation list kept in a [`FeasibilityReport`]; the worst entries are retained.
pub const MAX_REPORTED_VIOLATIONS: usize = 1000;

/// One unit vector per vertex, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitEmbedding {
    d: usize,
    n: usize,
    data: Vec<f64>,
}

impl UnitEmbedding {
    /// Validates that every vector has length `d` and unit norm within [`UNIT_NORM_TOL`].
    pub fn new(d: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let e = Self::from_rows(d, vectors)?;
        if let Some((i, dev)) = e.norm_deviations().enumerate().find(|(_, dev)| *dev > UNIT_NORM_TOL) {
            return Err(Error::InvalidEmbedding(format!(
                "vector {i} has norm deviating from 1 by {dev:.3e}"
            )));
        }
        Ok(e)
    }

    /// Normalizes each row; zero rows are rejected.
    pub fn normalized(d: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let mut e = Self::from_rows(d, vectors)?;
        for i in 0..e.n {
            let row = &mut e.data[i * d..(i + 1) * d];
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::InvalidEmbedding(format!("vector {i} cannot be normalized")));
            }
            row.iter_mut().for_each(|x| *x /= norm);
        }
        Ok(e)
    }

    fn from_rows(d: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidEmbedding("dimension must be positive".into()));
        }
        let n = vectors.len();
        let mut data = Vec::with_capacity(n * d);
        for (i, v) in vectors.into_iter().enumerate() {
            if v.len() != d {
                return Err(Error::InvalidEmbedding(format!(
                    "vector {i} has length {} but d = {d}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidEmbedding(format!("vector {i} is not finite")));
            }
            data.extend(v);
        }
        Ok(UnitEmbedding { d, n, data })
    }

    pub(crate) fn from_flat_unchecked(d: usize, data: Vec<f64>) -> Self {
        let n = data.len() / d;
        UnitEmbedding { d, n, data }
    }

    /// The embedding `v_i = x_i e_1` induced by a cut.
    pub fn from_cut(cut: &Cut, d: usize) -> Self {
        assert!(d >= 1);
        let mut data = vec![0.0; cut.len() * d];
        for (i, &x) in cut.labels().iter().enumerate() {
            data[i * d] = f64::from(x);
        }
        UnitEmbedding { d, n: cut.len(), data }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    pub(crate) fn flat(&self) -> &[f64] {
        &self.data
    }

    pub fn inner(&self, i: usize, j: usize) -> f64 {
        dot(self.vector(i), self.vector(j))
    }

    /// Same vectors with every sign flipped.
    pub fn negated(&self) -> Self {
        UnitEmbedding { d: self.d, n: self.n, data: self.data.iter().map(|x| -x).collect() }
    }

    /// Concatenation of the vectors of `self` and `other`.
    pub fn concat(&self, other: &UnitEmbedding) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: other.d });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(UnitEmbedding { d: self.d, n: self.n + other.n, data })
    }

    fn norm_deviations(&self) -> impl Iterator<Item = f64> + '_ {
        self.vectors().map(|v| (dot(v, v).sqrt() - 1.0).abs())
    }

    pub fn max_norm_deviation(&self) -> f64 {
        self.norm_deviations().fold(0.0, f64::max)
    }

    /// Row-major `n x n` Gram matrix `rho_ij = <v_i, v_j>`.
    pub fn gram(&self) -> Vec<f64> {
        let n = self.n;
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let r = self.inner(i, j);
                g[i * n + j] = r;
                g[j * n + i] = r;
            }
        }
        g
    }

    /// Smallest off-diagonal inner product, or `None` when `n < 2`.
    pub fn min_pairwise_inner(&self) -> Option<f64> {
        let mut min: Option<f64> = None;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let r = self.inner(i, j);
                min = Some(min.map_or(r, |m| m.min(r)));
            }
        }
        min
    }

    /// Number of Gram eigenvalues exceeding `tol` times the largest one.
    pub fn gram_rank(&self, tol: f64) -> usize {
        if self.n == 0 {
            return 0;
        }
        let ev = linalg::symmetric_eigenvalues(&linalg::square(self.n, &self.gram()));
        let max = ev.last().copied().unwrap_or(0.0).max(0.0);
        linalg::numeric_rank(&ev, tol, max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&EmbeddingFile::from(self)).expect("embedding serializes")
    }

    /// Parses the embedding JSON schema `{"d", "n", "vectors"}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: EmbeddingFile = serde_json::from_str(text)?;
        if file.vectors.len() != file.n {
            return Err(Error::InvalidEmbedding(format!(
                "n = {} but {} vectors given",
                file.n,
                file.vectors.len()
            )));
        }
        UnitEmbedding::new(file.d, file.vectors)
    }
}

/// On-disk form of a [`UnitEmbedding`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub d: usize,
    pub n: usize,
    pub vectors: Vec<Vec<f64>>,
}

impl From<&UnitEmbedding> for EmbeddingFile {
    fn from(e: &UnitEmbedding) -> Self {
        EmbeddingFile { d: e.d, n: e.n, vectors: e.vectors().map(<[f64]>::to_vec).collect() }
    }
}

pub fn save_embedding(e: &UnitEmbedding) -> String {
    e.to_json()
}

pub fn load_embedding(text: &str) -> Result<UnitEmbedding> {
    UnitEmbedding::from_json(text)
}

/// `1/2 * sum_{ij in E} w_ij (1 - <v_i, v_j>)`.
pub fn sdp_objective(g: &WeightedGraph, v: &UnitEmbedding) -> Result<f64> {
    if v.n() != g.n() {
        return Err(Error::LengthMismatch { expected: g.n(), got: v.n() });
    }
    Ok(objective_from(g, |i, j| v.inner(i, j)))
}

pub(crate) fn objective_from(g: &WeightedGraph, rho: impl Fn(usize, usize) -> f64) -> f64 {
    0.5 * g.edges().iter().map(|e| e.w * (1.0 - rho(e.u, e.v))).sum::<f64>()
}

/// A single reduced triangle constraint with `middle` as the shared vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleConstraint {
    pub i: usize,
    pub middle: usize,
    pub k: usize,
    pub b1: i8,
    pub b2: i8,
    pub slack: f64,
}

pub(crate) const SIGN_PATTERNS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

/// Calls `f(i, middle, k, b1, b2, slack)` for all 12 constraints of the triple `a < b < c`.
#[inline]
pub(crate) fn for_each_constraint_of_triple(
    gram: &[f64],
    n: usize,
    (a, b, c): (usize, usize, usize),
    mut f: impl FnMut(usize, usize, usize, f64, f64, f64),
) {
    for (i, m, k) in [(b, a, c), (a, b, c), (a, c, b)] {
        let r_im = gram[i * n + m];
        let r_mk = gram[m * n + k];
        let r_ik = gram[i * n + k];
        for (b1, b2) in SIGN_PATTERNS {
            let slack = 1.0 - b1 * r_im - b2 * r_mk + b1 * b2 * r_ik;
            f(i, m, k, b1, b2, slack);
        }
    }
}

/// Result of [`check_feasibility`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub max_norm_deviation: f64,
    /// Largest violation among reported constraints, 0 when none is reported.
    pub worst_triangle_violation: f64,
    /// Smallest slack over every constraint checked (may be positive).
    pub min_slack: f64,
    pub constraints_checked: u64,
    pub violation_count: u64,
    /// Violations beyond `tol`, worst first, truncated to [`MAX_REPORTED_VIOLATIONS`].
    pub violating_triples: Vec<TriangleConstraint>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violation_count == 0
    }
}

/// Checks every triangle constraint and reports those with slack below `-tol`.
pub fn check_feasibility(v: &UnitEmbedding, tol: f64) -> FeasibilityReport {
    let n = v.n();
    let gram = v.gram();
    let per_first: Vec<(f64, u64, Vec<TriangleConstraint>)> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut min_slack = f64::INFINITY;
            let mut checked = 0u64;
            let mut bad = Vec::new();
            for b in a + 1..n {
                for c in b + 1..n {
                    for_each_constraint_of_triple(&gram, n, (a, b, c), |i, m, k, b1, b2, s| {
                        checked += 1;
                        min_slack = min_slack.min(s);
                        if s < -tol {
                            bad.push(TriangleConstraint {
                                i,
                                middle: m,
                                k,
                                b1: b1 as i8,
                                b2: b2 as i8,
                                slack: s,
                            });
                        }
                    });
                }
            }
            (min_slack, checked, bad)
        })
        .collect();

    let mut min_slack = f64::INFINITY;
    let mut checked = 0;
    let mut bad = Vec::new();
    for (s, c, b) in per_first {
        min_slack = min_slack.min(s);
        checked += c;
        bad.extend(b);
    }
    let violation_count = bad.len() as u64;
    bad.sort_by(|x, y| x.slack.total_cmp(&y.slack));
    bad.truncate(MAX_REPORTED_VIOLATIONS);
    let worst = bad.first().map_or(0.0, |t| -t.slack);
    FeasibilityReport {
        max_norm_deviation: v.max_norm_deviation(),
        worst_triangle_violation: worst,
        min_slack: if checked == 0 { 0.0 } else { min_slack },
        constraints_checked: checked,
        violation_count,
        violating_triples: bad,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    pub(crate) fn c5_optimal() -> UnitEmbedding {
        let rows = (0..5)
            .map(|k| {
                let a = 4.0 * PI * k as f64 / 5.0;
                vec![a.cos(), a.sin()]
            })
            .collect();
        UnitEmbedding::normalized(2, rows).unwrap()
    }

    #[test]
    fn objective_examples() {
        let k2 = WeightedGraph::complete(2);
        let v = UnitEmbedding::new(1, vec![vec![1.0], vec![-1.0]]).unwrap();
        assert_eq!(sdp_objective(&k2, &v).unwrap(), 1.0);

        let same = UnitEmbedding::new(2, vec![vec![0.6, 0.8]; 5]).unwrap();
        assert!(sdp_objective(&WeightedGraph::cycle(5), &same).unwrap().abs() < 1e-15);

        // cos(4 pi / 5) = -(1 + sqrt 5) / 4
        let closed = 5.0 * (1.0 + (1.0 + 5f64.sqrt()) / 4.0) / 2.0;
        let got = sdp_objective(&WeightedGraph::cycle(5), &c5_optimal()).unwrap();
        assert!((got - closed).abs() < 1e-12);
        assert!((got - 4.522542).abs() < 1e-6);

        assert!(matches!(sdp_objective(&k2, &same), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn c5_angle_pattern_is_grid_optimal() {
        // Rotation-symmetric planar embeddings place vertex k at angle k * theta.
        let c5 = WeightedGraph::cycle(5);
        let best = (0..=20000)
            .map(|s| {
                let theta = PI * s as f64 / 10000.0;
                let rows = (0..5)
                    .map(|k| vec![(k as f64 * theta).cos(), (k as f64 * theta).sin()])
                    .collect();
                sdp_objective(&c5, &UnitEmbedding::normalized(2, rows).unwrap()).unwrap()
            })
            .fold(f64::MIN, f64::max);
        let target = sdp_objective(&c5, &c5_optimal()).unwrap();
        assert!(best <= target + 1e-6, "{best} > {target}");
    }

    #[test]
    fn integral_embeddings_are_feasible() {
        let cut = Cut::new(vec![1, -1, -1, 1, 1, -1]).unwrap();
        let v = UnitEmbedding::from_cut(&cut, 3);
        let r = check_feasibility(&v, FEASIBILITY_TOL);
        assert!(r.is_feasible());
        assert_eq!(r.worst_triangle_violation, 0.0);
        assert_eq!(r.constraints_checked, 20 * 12);
        let g = WeightedGraph::complete(6);
        assert_eq!(sdp_objective(&g, &v).unwrap(), g.cut_value(&cut).unwrap());
    }

    #[test]
    fn orthonormal_vectors_have_unit_slack() {
        let rows = (0..4).map(|i| (0..4).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        let v = UnitEmbedding::new(4, rows).unwrap();
        let r = check_feasibility(&v, FEASIBILITY_TOL);
        assert!(r.is_feasible());
        assert_eq!(r.min_slack, 1.0);
    }

    #[test]
    fn mercedes_star_violates_by_half() {
        let rows = (0..3)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 3.0;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let v = UnitEmbedding::normalized(2, rows).unwrap();
        let r = check_feasibility(&v, FEASIBILITY_TOL);
        assert!((r.worst_triangle_violation - 0.5).abs() < 1e-12);
        let worst = r.violating_triples[0];
        assert_eq!((worst.b1, worst.b2), (-1, -1));
        // One (-1,-1) constraint per choice of middle vertex.
        assert_eq!(r.violation_count, 3);
    }

    #[test]
    fn gram_rank_examples() {
        let copies = UnitEmbedding::new(3, vec![vec![0.0, 0.6, 0.8]; 7]).unwrap();
        assert_eq!(copies.gram_rank(RANK_TOL), 1);
        let rows = (0..3).map(|i| (0..3).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        assert_eq!(UnitEmbedding::new(3, rows).unwrap().gram_rank(RANK_TOL), 3);
        assert_eq!(c5_optimal().gram_rank(RANK_TOL), 2);
    }

    #[test]
    fn json_round_trip_and_errors() {
        let v = c5_optimal();
        let back = load_embedding(&save_embedding(&v)).unwrap();
        for (a, b) in v.flat().iter().zip(back.flat()) {
            assert!((a - b).abs() <= 1e-12);
        }
        assert!(load_embedding(r#"{"d":2,"n":1,"vectors":[[0.0,0.0]]}"#).is_err());
        assert!(load_embedding(r#"{"d":3,"n":1,"vectors":[[1.0,0.0]]}"#).is_err());
        assert!(load_embedding(r#"{"d":1,"n":2,"vectors":[[1.0]]}"#).is_err());
        assert!(load_embedding("not json").is_err());
    }

    proptest! {
        #[test]
        fn rank_never_exceeds_dimension(n in 1usize..12, d in 1usize..5, seed in any::<u64>()) {
            let mut r = rng::stream_rng(seed, 0);
            let rows = (0..n).map(|_| rng::unit_vector(&mut r, d)).collect();
            let v = UnitEmbedding::new(d, rows).unwrap();
            prop_assert!(v.gram_rank(RANK_TOL) <= d.min(n));
            let back = load_embedding(&save_embedding(&v)).unwrap();
            prop_assert_eq!(back, v);
        }

        #[test]
        fn one_dimensional_sign_embeddings_are_feasible(mask in any::<u64>(), n in 1usize..10) {
            let v = UnitEmbedding::from_cut(&Cut::from_mask(n, mask), 1);
            prop_assert_eq!(check_feasibility(&v, 0.0).worst_triangle_violation, 0.0);
        }
    }
}
