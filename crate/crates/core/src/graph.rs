//! Finite directed base graphs that generate periodic trees.
//!
//! Labels are 0-based in the API and 1-based in graph documents and reports.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Label = usize;

/// A strongly connected directed multigraph on labels `0..m`, together with
/// the generation function: the ordered list of child labels of each label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseGraph {
    adjacency: Vec<Vec<u32>>,
    chi: Vec<Vec<Label>>,
}

/// On-disk form of a base graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDocument {
    pub m: usize,
    pub adjacency: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<BTreeMap<String, Vec<usize>>>,
}

impl BaseGraph {
    /// Builds a graph with the canonical generation function: children of each
    /// label listed by non-decreasing target label.
    pub fn new(adjacency: Vec<Vec<u32>>) -> Result<Self> {
        let chi = canonical_chi(&adjacency);
        Self::with_chi(adjacency, chi)
    }

    pub fn with_chi(adjacency: Vec<Vec<u32>>, chi: Vec<Vec<Label>>) -> Result<Self> {
        let m = adjacency.len();
        if m == 0 {
            return Err(Error::InvalidGraph("empty adjacency matrix".into()));
        }
        for (i, row) in adjacency.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidGraph(format!(
                    "adjacency is not square: row {} has {} entries, expected {m}",
                    i + 1,
                    row.len()
                )));
            }
        }
        if chi.len() != m {
            return Err(Error::InvalidGraph(format!("chi has {} rows, expected {m}", chi.len())));
        }
        for (i, row) in adjacency.iter().enumerate() {
            let mut counts = vec![0u32; m];
            for &j in &chi[i] {
                if j >= m {
                    return Err(Error::InvalidGraph(format!(
                        "chi of label {} names unknown label {}",
                        i + 1,
                        j + 1
                    )));
                }
                counts[j] += 1;
            }
            if &counts != row {
                return Err(Error::InvalidGraph(format!(
                    "chi of label {} is inconsistent with adjacency row {:?}",
                    i + 1,
                    row
                )));
            }
        }
        if let Some((from, to)) = first_unreachable_pair(&adjacency) {
            return Err(Error::NotStronglyConnected { from: from + 1, to: to + 1 });
        }
        Ok(BaseGraph { adjacency, chi })
    }

    /// Graph with adjacency `[[0,1],[1,1]]`.
    pub fn fibonacci() -> Self {
        Self::new(vec![vec![0, 1], vec![1, 1]]).expect("fibonacci preset is valid")
    }

    /// Graph with adjacency `[[0,alpha],[beta,0]]`.
    pub fn biregular(alpha: u32, beta: u32) -> Result<Self> {
        if alpha == 0 || beta == 0 {
            return Err(Error::InvalidArgument("bi-regular parameters must be positive".into()));
        }
        Self::new(vec![vec![0, alpha], vec![beta, 0]])
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self> {
        if doc.adjacency.len() != doc.m {
            return Err(Error::InvalidGraph(format!(
                "m = {} but adjacency has {} rows",
                doc.m,
                doc.adjacency.len()
            )));
        }
        let mut adjacency = Vec::with_capacity(doc.m);
        for (i, row) in doc.adjacency.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for &v in row {
                if v < 0 {
                    return Err(Error::InvalidGraph(format!("negative entry {v} in row {}", i + 1)));
                }
                let v = u32::try_from(v)
                    .map_err(|_| Error::InvalidGraph(format!("entry {v} in row {} is too large", i + 1)))?;
                out.push(v);
            }
            adjacency.push(out);
        }
        match doc.chi {
            None => Self::new(adjacency),
            Some(map) => {
                let mut chi = vec![Vec::new(); doc.m];
                for (key, children) in map {
                    let label: usize = key
                        .trim()
                        .parse()
                        .map_err(|_| Error::InvalidGraph(format!("chi key {key:?} is not a label")))?;
                    if label == 0 || label > doc.m {
                        return Err(Error::InvalidGraph(format!("chi key {label} out of range")));
                    }
                    let mut row = Vec::with_capacity(children.len());
                    for c in children {
                        if c == 0 || c > doc.m {
                            return Err(Error::InvalidGraph(format!(
                                "chi of label {label} names unknown label {c}"
                            )));
                        }
                        row.push(c - 1);
                    }
                    chi[label - 1] = row;
                }
                Self::with_chi(adjacency, chi)
            }
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_document(&self) -> GraphDocument {
        let chi = self
            .chi
            .iter()
            .enumerate()
            .map(|(i, row)| ((i + 1).to_string(), row.iter().map(|j| j + 1).collect()))
            .collect();
        GraphDocument {
            m: self.m(),
            adjacency: self
                .adjacency
                .iter()
                .map(|row| row.iter().map(|&v| i64::from(v)).collect())
                .collect(),
            chi: Some(chi),
        }
    }

    pub fn m(&self) -> usize {
        self.adjacency.len()
    }

    pub fn labels(&self) -> std::ops::Range<Label> {
        0..self.m()
    }

    /// Edge multiplicity `d_ij`.
    pub fn d(&self, i: Label, j: Label) -> u32 {
        self.adjacency[i][j]
    }

    /// Out-degree `d_i`, the number of children of a vertex of label `i`.
    pub fn degree(&self, i: Label) -> u32 {
        self.adjacency[i].iter().sum()
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }

    /// Child labels of label `i`, in planar order.
    pub fn chi(&self, i: Label) -> &[Label] {
        &self.chi[i]
    }

    /// Simultaneous relabeling: new label `perm[i]` takes the role of old label `i`.
    pub fn relabeled(&self, perm: &[Label]) -> Result<Self> {
        let m = self.m();
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument("relabeling is not a permutation".into()));
        }
        let mut adjacency = vec![vec![0; m]; m];
        let mut chi = vec![Vec::new(); m];
        for i in 0..m {
            for j in 0..m {
                adjacency[perm[i]][perm[j]] = self.adjacency[i][j];
            }
            chi[perm[i]] = self.chi[i].iter().map(|&j| perm[j]).collect();
        }
        Self::with_chi(adjacency, chi)
    }

    pub fn is_strongly_connected(&self) -> bool {
        is_strongly_connected(&self.adjacency)
    }

    /// Perron-Frobenius eigenvalue of the adjacency matrix.
    ///
    /// Power iteration runs on `D + I`, which is primitive whenever `D` is
    /// irreducible, so bipartite graphs converge too. Iteration stops once the
    /// Collatz-Wielandt bounds `min (Av)_i / v_i <= rho <= max (Av)_i / v_i`
    /// are closer than `tolerance`.
    pub fn spectral_radius(&self, tolerance: f64, max_iter: u64) -> Result<SpectralResult> {
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        let m = self.m();
        let apply = |v: &[f64]| -> Vec<f64> {
            (0..m)
                .map(|i| v[i] + (0..m).map(|j| f64::from(self.adjacency[i][j]) * v[j]).sum::<f64>())
                .collect()
        };
        let mut v = vec![1.0; m];
        for iteration in 1..=max_iter {
            let w = apply(&v);
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for (wi, vi) in w.iter().zip(&v) {
                let q = wi / vi;
                lo = lo.min(q);
                hi = hi.max(q);
            }
            let norm = w.iter().cloned().fold(0.0, f64::max);
            v = w.into_iter().map(|x| x / norm).collect();
            if hi - lo < tolerance {
                let rho = 0.5 * (lo + hi) - 1.0;
                let dv: Vec<f64> = apply(&v).iter().zip(&v).map(|(a, b)| a - b).collect();
                let vnorm = v.iter().cloned().fold(0.0, f64::max);
                let residual = dv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - rho * b).abs())
                    .fold(0.0, f64::max)
                    / vnorm;
                return Ok(SpectralResult { rho, iterations: iteration, residual });
            }
        }
        Err(Error::NotConverged { what: "power iteration", iterations: max_iter })
    }

    /// Draws a strongly connected graph with `1..=max_m` labels and entries in
    /// `0..=max_entry`, by rejection.
    pub fn random_strongly_connected<R: Rng + ?Sized>(rng: &mut R, max_m: usize, max_entry: u32) -> Self {
        assert!(max_m >= 1 && max_entry >= 1);
        loop {
            let m = rng.gen_range(1..=max_m);
            let adjacency: Vec<Vec<u32>> = (0..m)
                .map(|_| (0..m).map(|_| rng.gen_range(0..=max_entry)).collect())
                .collect();
            if let Ok(g) = Self::new(adjacency) {
                return g;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralResult {
    pub rho: f64,
    pub iterations: u64,
    pub residual: f64,
}

fn canonical_chi(adjacency: &[Vec<u32>]) -> Vec<Vec<Label>> {
    adjacency
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .flat_map(|(j, &d)| std::iter::repeat_n(j, d as usize))
                .collect()
        })
        .collect()
}

fn reachable(adjacency: &[Vec<u32>], start: usize, reverse: bool) -> Vec<bool> {
    let m = adjacency.len();
    let mut seen = vec![false; m];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for v in 0..m {
            let edge = if reverse { adjacency[v][u] } else { adjacency[u][v] };
            if edge > 0 && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

fn first_unreachable_pair(adjacency: &[Vec<u32>]) -> Option<(usize, usize)> {
    let m = adjacency.len();
    if m == 1 {
        return (adjacency[0][0] == 0).then_some((0, 0));
    }
    if let Some(j) = reachable(adjacency, 0, false).iter().position(|&r| !r) {
        return Some((0, j));
    }
    reachable(adjacency, 0, true).iter().position(|&r| !r).map(|j| (j, 0))
}

/// True iff every ordered pair of labels is joined by a directed path.
///
/// A single label needs a loop, otherwise it would have no children.
pub fn is_strongly_connected(adjacency: &[Vec<u32>]) -> bool {
    !adjacency.is_empty() && first_unreachable_pair(adjacency).is_none()
}
