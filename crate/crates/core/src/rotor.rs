//! Rotor-router dynamics on wired trees.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use rand::Rng;

use crate::cover::{Target, WiredTree};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Per-particle step budget. Routing always terminates on a wired tree, so
/// hitting this means the engine is broken.
pub const DEFAULT_STEP_CAP: u64 = 1_000_000_000;

/// Default cap on the number of configurations scanned by brute force.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Rotor index per non-sink vertex. Index 0 points at the ancestor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RotorConfig(Vec<u32>);

impl RotorConfig {
    /// All rotors pointing at their ancestors.
    pub fn zero(w: &WiredTree) -> Self {
        RotorConfig(vec![0; w.len()])
    }

    pub fn new(w: &WiredTree, rotors: Vec<u32>) -> Result<Self> {
        if rotors.len() != w.len() {
            return Err(Error::InvalidArgument(format!(
                "configuration has {} rotors, tree has {} vertices",
                rotors.len(),
                w.len()
            )));
        }
        if let Some(x) = (0..w.len()).find(|&x| rotors[x] as usize >= w.degree(x)) {
            return Err(Error::InvalidArgument(format!(
                "rotor {} at vertex {x} exceeds degree {}",
                rotors[x],
                w.degree(x)
            )));
        }
        Ok(RotorConfig(rotors))
    }

    pub fn random<R: Rng + ?Sized>(w: &WiredTree, rng: &mut R) -> Self {
        RotorConfig((0..w.len()).map(|x| rng.gen_range(0..w.degree(x) as u32)).collect())
    }

    pub fn get(&self, x: usize) -> u32 {
        self.0[x]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&r| r == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exit {
    /// Through the root's ancestor edge.
    Down,
    /// Through an edge into a collapsed leaf.
    Up,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingResult {
    pub final_config: RotorConfig,
    pub exit: Exit,
    pub steps: u64,
}

/// Escape bits of successive particles: 1 iff the particle left through the
/// upper sink.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EscapeSequence(pub Vec<u8>);

impl EscapeSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }
}

impl fmt::Display for EscapeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl WiredTree {
    /// Where the rotor at `x` currently points.
    pub fn rotor_target(&self, c: &RotorConfig, x: usize) -> Target {
        self.neighbors(x)[c.0[x] as usize]
    }

    /// Advances the rotor at `pos` and returns where the particle moves.
    pub fn step(&self, c: &mut RotorConfig, pos: usize) -> Result<Target> {
        if pos >= self.len() {
            return Err(Error::InvalidArgument(format!("vertex {pos} is not a non-sink vertex")));
        }
        let deg = self.degree(pos) as u32;
        let r = &mut c.0[pos];
        *r = if *r + 1 == deg { 0 } else { *r + 1 };
        Ok(self.neighbors(pos)[*r as usize])
    }

    /// Routes one particle from `start` into the sink, updating `c` in place.
    pub fn route(&self, c: &mut RotorConfig, start: usize) -> Result<(Exit, u64)> {
        self.route_capped(c, start, DEFAULT_STEP_CAP)
    }

    pub fn route_capped(&self, c: &mut RotorConfig, start: usize, cap: u64) -> Result<(Exit, u64)> {
        let mut pos = start;
        let mut steps = 0u64;
        loop {
            if steps == cap {
                return Err(Error::cap("rotor walk steps", format!("{cap}+"), cap));
            }
            steps += 1;
            match self.step(c, pos)? {
                Target::Vertex(next) => pos = next,
                Target::SinkDown => return Ok((Exit::Down, steps)),
                Target::SinkUp => return Ok((Exit::Up, steps)),
            }
        }
    }

    /// The routing operator `e_x` applied to a copy of `c`.
    pub fn route_to_sink(&self, c: &RotorConfig, start: usize) -> Result<RoutingResult> {
        let mut final_config = c.clone();
        let (exit, steps) = self.route(&mut final_config, start)?;
        Ok(RoutingResult { final_config, exit, steps })
    }

    /// Routes `n` particles from the root one after another.
    pub fn escape_sequence(&self, c: &RotorConfig, n: usize) -> Result<(EscapeSequence, RotorConfig)> {
        if n == 0 {
            return Err(Error::InvalidArgument("escape sequence needs at least one particle".into()));
        }
        let mut config = c.clone();
        let mut bits = Vec::with_capacity(n);
        for _ in 0..n {
            let (exit, _) = self.route(&mut config, 0)?;
            bits.push(u8::from(exit == Exit::Up));
        }
        Ok((EscapeSequence(bits), config))
    }

    /// True iff the rotor edges form an oriented spanning tree rooted at the sink.
    pub fn is_recurrent(&self, c: &RotorConfig) -> bool {
        let mut stamp = vec![0u32; self.len()];
        targets_acyclic(self, c.as_slice(), &mut stamp)
    }

    /// All recurrent configurations, in lexicographic order of rotor vectors.
    pub fn enumerate_recurrent(&self, cap: u64, exec: Execution) -> Result<Vec<RotorConfig>> {
        let total = self.config_space_size();
        if total > u128::from(cap) {
            return Err(Error::cap("rotor configuration space", total, cap));
        }
        let chunks = exec::map_chunks(exec, total as u64, 1 << 14, |start, end| {
            let mut found = Vec::new();
            scan_configs(self, start, end, |digits| found.push(RotorConfig(digits.to_vec())));
            found
        });
        Ok(chunks.into_iter().flatten().collect())
    }
}

/// Checks that following rotors from every vertex reaches the sink.
///
/// `stamp` must have one slot per vertex and be all zero on entry; it is
/// left dirty.
pub(crate) fn targets_acyclic(w: &WiredTree, rotors: &[u32], stamp: &mut [u32]) -> bool {
    // stamp[x] == u32::MAX: known to reach the sink; stamp[x] == s: on walk s.
    for start in 0..w.len() {
        if stamp[start] != 0 {
            continue;
        }
        let walk = start as u32 + 1;
        let mut x = start;
        loop {
            if stamp[x] == u32::MAX {
                break;
            }
            if stamp[x] == walk {
                return false;
            }
            stamp[x] = walk;
            match w.neighbors(x)[rotors[x] as usize] {
                Target::Vertex(y) => x = y,
                _ => break,
            }
        }
        let mut x = start;
        while stamp[x] == walk {
            stamp[x] = u32::MAX;
            match w.neighbors(x)[rotors[x] as usize] {
                Target::Vertex(y) => x = y,
                _ => break,
            }
        }
    }
    true
}

/// Calls `found` with every acyclic rotor vector whose mixed-radix index lies
/// in `start..end` (vertex 0 is the least significant digit).
pub(crate) fn scan_configs(w: &WiredTree, start: u64, end: u64, mut found: impl FnMut(&[u32])) {
    let n = w.len();
    let mut digits = vec![0u32; n];
    let mut rest = start;
    for (x, d) in digits.iter_mut().enumerate() {
        let deg = w.degree(x) as u64;
        *d = (rest % deg) as u32;
        rest /= deg;
    }
    let mut stamp = vec![0u32; n];
    for _ in start..end {
        stamp.fill(0);
        if targets_acyclic(w, &digits, &mut stamp) {
            found(&digits);
        }
        for (x, d) in digits.iter_mut().enumerate() {
            *d += 1;
            if *d as usize == w.degree(x) {
                *d = 0;
            } else {
                break;
            }
        }
    }
}

/// Outcome of the exhaustive rotor-group checks on one wired tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAxioms {
    pub recurrent: usize,
    /// `e_x(e_y(c)) == e_y(e_x(c))` for all recurrent `c` and all `x, y`.
    pub abelian: bool,
    /// Each `e_x` is injective on the recurrent set.
    pub injective: bool,
    /// Each `e_x` maps recurrent configurations to recurrent ones.
    pub closed: bool,
    /// The orbit of the zero configuration is the whole recurrent set.
    pub transitive: bool,
    pub orbit_size: usize,
}

impl GroupAxioms {
    pub fn all_hold(&self) -> bool {
        self.abelian && self.injective && self.closed && self.transitive
    }
}

/// Exhaustively checks the group-action properties of the routing operators.
pub fn check_group_axioms(w: &WiredTree, cap: u64, exec: Execution) -> Result<GroupAxioms> {
    let rec = w.enumerate_recurrent(cap, exec)?;
    let index: HashMap<&RotorConfig, usize> = rec.iter().enumerate().map(|(k, c)| (c, k)).collect();
    let n = w.len();

    // images[x][k] = index of e_x(rec[k]) in rec, or None if not recurrent.
    let images: Vec<Vec<Option<usize>>> = exec::map_indices(exec, n, |x| {
        rec.iter()
            .map(|c| {
                let r = w.route_to_sink(c, x).expect("routing terminates");
                index.get(&r.final_config).copied()
            })
            .collect()
    });

    let closed = images.iter().all(|row| row.iter().all(Option::is_some));
    let injective = closed
        && images.iter().all(|row| {
            let distinct: HashSet<_> = row.iter().collect();
            distinct.len() == row.len()
        });
    let abelian = closed
        && exec::all_indices(exec, rec.len(), |k| {
            (0..n).all(|x| {
                (x + 1..n).all(|y| {
                    let xy = images[x][images[y][k].unwrap()];
                    let yx = images[y][images[x][k].unwrap()];
                    xy == yx
                })
            })
        });

    let zero = RotorConfig::zero(w);
    let orbit_size = match (closed, index.get(&zero)) {
        (true, Some(&z)) => {
            let mut seen = vec![false; rec.len()];
            seen[z] = true;
            let mut queue = VecDeque::from([z]);
            let mut count = 1;
            while let Some(k) = queue.pop_front() {
                for row in &images {
                    let next = row[k].unwrap();
                    if !seen[next] {
                        seen[next] = true;
                        count += 1;
                        queue.push_back(next);
                    }
                }
            }
            count
        }
        _ => 0,
    };
    Ok(GroupAxioms {
        recurrent: rec.len(),
        abelian,
        injective,
        closed,
        transitive: orbit_size == rec.len(),
        orbit_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::BaseGraph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fib2() -> WiredTree {
        WiredTree::build(&BaseGraph::fibonacci(), 1, 2).unwrap()
    }

    #[test]
    fn step_moves_and_wraps() {
        let w = fib2();
        let mut c = RotorConfig::zero(&w);
        assert_eq!(w.step(&mut c, 0).unwrap(), Target::Vertex(1));
        assert_eq!(c.as_slice(), &[1, 0, 0]);
        let mut c = RotorConfig::new(&w, vec![2, 0, 0]).unwrap();
        assert_eq!(w.step(&mut c, 0).unwrap(), Target::SinkDown);
        assert_eq!(c.get(0), 0);
        assert!(w.step(&mut c, 3).is_err());
    }

    #[test]
    fn height_one_step() {
        let g = BaseGraph::biregular(2, 3).unwrap();
        let w = WiredTree::build(&g, 1, 1).unwrap();
        let mut c = RotorConfig::zero(&w);
        assert_eq!(w.step(&mut c, 0).unwrap(), Target::SinkUp);
        assert_eq!(c.get(0), 1);
    }

    #[test]
    fn route_traced_by_hand() {
        let w = fib2();
        let r = w.route_to_sink(&RotorConfig::zero(&w), 0).unwrap();
        assert_eq!(r.exit, Exit::Up);
        assert_eq!(r.steps, 2);
        assert_eq!(r.final_config.as_slice(), &[1, 1, 0]);

        let c = RotorConfig::new(&w, vec![2, 0, 0]).unwrap();
        let r = w.route_to_sink(&c, 0).unwrap();
        assert_eq!((r.exit, r.steps), (Exit::Down, 1));
    }

    #[test]
    fn config_validation() {
        let w = fib2();
        assert!(RotorConfig::new(&w, vec![0, 2, 0]).is_err());
        assert!(RotorConfig::new(&w, vec![0, 0]).is_err());
    }

    #[test]
    fn height_one_escape_sequence() {
        let g = BaseGraph::new(vec![vec![0, 2, 1], vec![1, 0, 0], vec![0, 1, 1]]).unwrap();
        for i in g.labels() {
            let w = WiredTree::build(&g, i, 1).unwrap();
            let d = g.degree(i) as usize;
            let (seq, last) = w.escape_sequence(&RotorConfig::zero(&w), d + 1).unwrap();
            let mut expected = vec![1u8; d];
            expected.push(0);
            assert_eq!(seq.0, expected);
            assert!(last.is_zero());
        }
    }

    #[test]
    fn fibonacci_period_counts() {
        let w = fib2();
        let (seq, last) = w.escape_sequence(&RotorConfig::zero(&w), 13).unwrap();
        assert_eq!(seq.ones(), 7);
        assert!(last.is_zero());
        assert!(w.escape_sequence(&RotorConfig::zero(&w), 0).is_err());
    }

    #[test]
    fn first_particle_escapes_up() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let g = BaseGraph::random_strongly_connected(&mut rng, 3, 2);
            let h = rng.gen_range(1..=3);
            let w = WiredTree::build(&g, rng.gen_range(0..g.m()), h).unwrap();
            let (seq, _) = w.escape_sequence(&RotorConfig::zero(&w), 1).unwrap();
            assert_eq!(seq.0, vec![1]);
        }
    }

    #[test]
    fn recurrence() {
        let w = fib2();
        assert!(w.is_recurrent(&RotorConfig::zero(&w)));
        // r -> a and a -> r
        let c = RotorConfig::new(&w, vec![1, 0, 0]).unwrap();
        assert!(!w.is_recurrent(&c));
        let e = w.route_to_sink(&RotorConfig::zero(&w), 0).unwrap();
        assert!(w.is_recurrent(&e.final_config));
    }

    #[test]
    fn recurrent_counts() {
        let g = BaseGraph::fibonacci();
        let count = |i, h| {
            WiredTree::build(&g, i, h)
                .unwrap()
                .enumerate_recurrent(DEFAULT_ENUMERATION_CAP, Execution::Sequential)
                .unwrap()
                .len()
        };
        assert_eq!(count(1, 2), 13);
        assert_eq!(count(0, 2), 5);
        assert_eq!(count(1, 1), 3);
        assert_eq!(count(0, 1), 2);
        let w = WiredTree::build(&g, 1, 6).unwrap();
        assert!(matches!(
            w.enumerate_recurrent(1000, Execution::Sequential),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn group_axioms_on_small_trees() {
        let g = BaseGraph::fibonacci();
        for (i, h) in [(0, 1), (1, 2), (1, 3), (0, 3)] {
            let w = WiredTree::build(&g, i, h).unwrap();
            let a = check_group_axioms(&w, DEFAULT_ENUMERATION_CAP, Execution::Parallel).unwrap();
            assert!(a.all_hold(), "{a:?}");
        }
    }
}
