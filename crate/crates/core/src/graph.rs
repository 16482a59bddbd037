//! Weighted Max-Cut instances, cuts, and an exhaustive oracle for small graphs.
//!
//! The text format is a plain edge list:
//!
//! ```text
//! # comment lines start with '#'
//! n m
//! u v w      (m lines, 0-indexed endpoints, nonnegative decimal weight)
//! ```

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vertex count accepted by [`brute_force_maxcut`].
pub const BRUTE_FORCE_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// An undirected graph with nonnegative edge weights.
///
/// Construction validates that endpoints are in range, there are no
/// self-loops or repeated unordered pairs, and every weight is a finite
/// nonnegative number. Isolated vertices are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let edges: Vec<_> = edges.into_iter().collect();
        Self::build(n, edges.into_iter().enumerate().map(|(i, e)| (i + 1, e)))
    }

    fn build(n: usize, edges: impl Iterator<Item = (usize, (usize, usize, f64))>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut adjacency = vec![Vec::new(); n];
        for (line, (u, v, w)) in edges {
            if u >= n || v >= n {
                return Err(Error::parse(
                    line,
                    format!("vertex index out of range: ({u}, {v}) with n = {n}"),
                ));
            }
            if u == v {
                return Err(Error::parse(line, format!("self-loop at vertex {u}")));
            }
            if !w.is_finite() {
                return Err(Error::parse(line, format!("non-finite weight {w}")));
            }
            if w < 0.0 {
                return Err(Error::parse(line, format!("negative weight {w}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::parse(line, format!("duplicate edge ({u}, {v})")));
            }
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
            out.push(Edge { u, v, w });
        }
        Ok(WeightedGraph { n, edges: out, adjacency })
    }

    /// Unit-weight graph from an edge list.
    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, edges.iter().map(|&(u, v)| (u, v, 1.0)))
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)));
        Self::new(n, edges).expect("complete graph is valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).expect("cycle is valid")
    }

    /// Star with center 0 and `leaves` unit-weight spokes.
    pub fn star(leaves: usize) -> Self {
        Self::new(leaves + 1, (1..=leaves).map(|j| (0, j, 1.0))).expect("star is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `i` with the connecting edge weight.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    /// Sum of the weights of edges incident to `i`.
    pub fn vertex_weight(&self, i: usize) -> f64 {
        self.adjacency[i].iter().fold(0.0, |acc, &(_, w)| acc + w)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().fold(0.0, |acc, e| acc + e.w)
    }

    /// Weight of edges whose endpoints carry different labels.
    pub fn cut_value(&self, cut: &Cut) -> Result<f64> {
        if cut.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: cut.len() });
        }
        Ok(self.cut_value_unchecked(cut.labels()))
    }

    pub(crate) fn cut_value_unchecked(&self, labels: &[i8]) -> f64 {
        self.edges
            .iter()
            .filter(|e| labels[e.u] != labels[e.v])
            .fold(0.0, |acc, e| acc + e.w)
    }

    /// Serializes back into the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for e in &self.edges {
            s.push_str(&format!("{} {} {}\n", e.u, e.v, e.w));
        }
        s
    }
}

impl FromStr for WeightedGraph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_graph(text)
    }
}

/// Parses the edge-list format. Errors carry the 1-based line number.
pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::parse(header_line, "header must be \"n m\""));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| Error::parse(header_line, format!("bad vertex count {:?}", fields[0])))?;
    let m: usize = fields[1]
        .parse()
        .map_err(|_| Error::parse(header_line, format!("bad edge count {:?}", fields[1])))?;

    let mut edges = Vec::with_capacity(m);
    for (line, text) in lines.by_ref() {
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(line, "edge line must be \"u v w\""));
        }
        let u = parse_index(line, fields[0])?;
        let v = parse_index(line, fields[1])?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad weight {:?}", fields[2])))?;
        edges.push((line, (u, v, w)));
    }
    if edges.len() != m {
        let line = edges.last().map_or(header_line, |(l, _)| *l);
        return Err(Error::parse(
            line,
            format!("header declares {m} edges but {} were given", edges.len()),
        ));
    }
    WeightedGraph::build(n, edges.into_iter())
}

fn parse_index(line: usize, field: &str) -> Result<usize> {
    if field.starts_with('-') {
        return Err(Error::parse(line, format!("vertex index out of range: {field}")));
    }
    field
        .parse()
        .map_err(|_| Error::parse(line, format!("bad vertex index {field:?}")))
}

/// A ±1 label per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct Cut(Vec<i8>);

impl Cut {
    pub fn new(labels: Vec<i8>) -> Result<Self> {
        if let Some(bad) = labels.iter().find(|&&x| x != 1 && x != -1) {
            return Err(Error::invalid(format!("cut label {bad} is not ±1")));
        }
        Ok(Cut(labels))
    }

    pub fn all_positive(n: usize) -> Self {
        Cut(vec![1; n])
    }

    /// Bit `i` of `mask` set means vertex `i` gets label -1.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Cut((0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn labels(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn flipped(&self) -> Cut {
        Cut(self.0.iter().map(|x| -x).collect())
    }

    pub(crate) fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }
}

impl TryFrom<Vec<i8>> for Cut {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        Cut::new(v)
    }
}

impl From<Cut> for Vec<i8> {
    fn from(c: Cut) -> Self {
        c.0
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.0 {
            f.write_str(if *x > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Exact Max-Cut by enumerating the `2^(n-1)` cuts with vertex 0 fixed to +1.
pub fn brute_force_maxcut(g: &WeightedGraph) -> Result<(f64, Cut)> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::InstanceTooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    if n <= 1 {
        return Ok((0.0, Cut::all_positive(n)));
    }
    // Gray-code walk: each step flips one vertex and updates the value locally.
    let mut labels = vec![1i8; n];
    let mut value = 0.0;
    let mut best = (0.0, 0u64);
    let mut mask = 0u64;
    for step in 1u64..(1 << (n - 1)) {
        let bit = step.trailing_zeros() as usize + 1;
        let before = labels[bit];
        for &(j, w) in g.neighbors(bit) {
            if labels[j] == before {
                value += w;
            } else {
                value -= w;
            }
        }
        labels[bit] = -before;
        mask ^= 1 << bit;
        if value > best.0 {
            best = (value, mask);
        }
    }
    let cut = Cut::from_mask(n, best.1);
    // Recompute from scratch so the reported value carries no accumulated drift.
    let exact = g.cut_value_unchecked(cut.labels());
    Ok((exact, cut))
}
