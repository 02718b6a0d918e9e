//! Independent group-order oracles: chip firing, the reduced Laplacian and
//! brute-force spanning-tree counting.

use std::collections::VecDeque;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::cover::{Target, WiredTree};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::rotor::scan_configs;

/// Chip counts on the non-sink vertices of a wired tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChipConfig(pub Vec<u64>);

impl ChipConfig {
    pub fn empty(w: &WiredTree) -> Self {
        ChipConfig(vec![0; w.len()])
    }

    pub fn is_stable(&self, w: &WiredTree) -> bool {
        self.0.iter().enumerate().all(|(x, &c)| c < w.degree(x) as u64)
    }

    /// The all-`(deg - 1)` configuration.
    pub fn max_stable(w: &WiredTree) -> Self {
        ChipConfig((0..w.len()).map(|x| w.degree(x) as u64 - 1).collect())
    }

    pub fn random<R: Rng + ?Sized>(w: &WiredTree, rng: &mut R, max_per_vertex: u64) -> Self {
        ChipConfig((0..w.len()).map(|_| rng.gen_range(0..=max_per_vertex)).collect())
    }
}

fn check_len(w: &WiredTree, c: &ChipConfig) -> Result<()> {
    if c.0.len() != w.len() {
        return Err(Error::InvalidArgument(format!(
            "chip configuration has {} entries, tree has {} vertices",
            c.0.len(),
            w.len()
        )));
    }
    Ok(())
}

fn fire(w: &WiredTree, chips: &mut [u64], x: usize) {
    chips[x] -= w.degree(x) as u64;
    for t in w.neighbors(x) {
        if let Target::Vertex(y) = *t {
            chips[y] += 1;
        }
    }
}

/// Topples the unstable vertex `x`; chips sent to the sink vanish.
pub fn topple(w: &WiredTree, c: &ChipConfig, x: usize) -> Result<ChipConfig> {
    check_len(w, c)?;
    if x >= w.len() {
        return Err(Error::InvalidArgument(format!("vertex {x} is not a non-sink vertex")));
    }
    if c.0[x] < w.degree(x) as u64 {
        return Err(Error::InvalidArgument(format!(
            "vertex {x} is stable ({} < {})",
            c.0[x],
            w.degree(x)
        )));
    }
    let mut out = c.clone();
    fire(w, &mut out.0, x);
    Ok(out)
}

/// Stabilizes by toppling unstable vertices in FIFO order.
pub fn stabilize(w: &WiredTree, c: &ChipConfig) -> Result<ChipConfig> {
    check_len(w, c)?;
    let mut chips = c.0.clone();
    let unstable = |chips: &[u64], x: usize| chips[x] >= w.degree(x) as u64;
    let mut queued = vec![false; w.len()];
    let mut queue: VecDeque<usize> = (0..w.len()).filter(|&x| unstable(&chips, x)).collect();
    for &x in &queue {
        queued[x] = true;
    }
    while let Some(x) = queue.pop_front() {
        queued[x] = false;
        // Fire as many times as possible at once.
        let deg = w.degree(x) as u64;
        let times = chips[x] / deg;
        if times == 0 {
            continue;
        }
        chips[x] -= times * deg;
        for t in w.neighbors(x) {
            if let Target::Vertex(y) = *t {
                chips[y] += times;
                if !queued[y] && unstable(&chips, y) {
                    queued[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(ChipConfig(chips))
}

/// Stabilizes by repeatedly toppling a uniformly chosen unstable vertex once.
pub fn stabilize_random_order<R: Rng + ?Sized>(w: &WiredTree, c: &ChipConfig, rng: &mut R) -> Result<ChipConfig> {
    check_len(w, c)?;
    let mut chips = c.0.clone();
    let mut unstable: Vec<usize> = (0..w.len()).filter(|&x| chips[x] >= w.degree(x) as u64).collect();
    while !unstable.is_empty() {
        unstable.shuffle(rng);
        let x = unstable.pop().unwrap();
        fire(w, &mut chips, x);
        if chips[x] >= w.degree(x) as u64 {
            unstable.push(x);
        }
        for t in w.neighbors(x) {
            if let Target::Vertex(y) = *t {
                if chips[y] >= w.degree(y) as u64 && !unstable.contains(&y) {
                    unstable.push(y);
                }
            }
        }
    }
    Ok(ChipConfig(chips))
}

/// Laplacian of a wired tree with the sink row and column removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedLaplacian {
    pub entries: Vec<Vec<i64>>,
}

impl ReducedLaplacian {
    pub fn new(w: &WiredTree) -> Self {
        let n = w.len();
        let mut entries = vec![vec![0i64; n]; n];
        for (x, row) in entries.iter_mut().enumerate() {
            row[x] = w.degree(x) as i64;
            for t in w.neighbors(x) {
                if let Target::Vertex(y) = *t {
                    row[y] -= 1;
                }
            }
        }
        ReducedLaplacian { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn determinant(&self) -> BigInt {
        det_bareiss(&self.entries)
    }
}

/// Exact determinant by fraction-free Gaussian elimination.
pub fn det_bareiss(matrix: &[Vec<i64>]) -> BigInt {
    let n = matrix.len();
    assert!(matrix.iter().all(|r| r.len() == n), "matrix must be square");
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a: Vec<Vec<BigInt>> = matrix.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mut negate = false;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let factor = row[k].clone();
            for j in k + 1..n {
                let v = &pivot_row[k] * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Group order via the matrix-tree theorem.
pub fn determinant_order(w: &WiredTree) -> BigUint {
    let det = ReducedLaplacian::new(w).determinant();
    assert!(det.is_positive(), "reduced Laplacian of a wired tree is nonsingular");
    det.magnitude().clone()
}

/// Counts rotor choices whose edges form an oriented spanning tree, by
/// scanning the whole configuration space.
pub fn count_spanning_trees_bruteforce(w: &WiredTree, cap: u64, exec: Execution) -> Result<BigUint> {
    let total = w.config_space_size();
    if total > u128::from(cap) {
        return Err(Error::cap("rotor configuration space", total, cap));
    }
    let counts = exec::map_chunks(exec, total as u64, 1 << 14, |start, end| {
        let mut count = 0u64;
        scan_configs(w, start, end, |_| count += 1);
        count
    });
    Ok(counts.into_iter().map(BigUint::from).sum())
}
