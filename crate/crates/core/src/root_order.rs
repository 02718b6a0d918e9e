//! Order of the root element of the rotor-router group.
//!
//! Routing one particle from the root of a wired cover is a group element;
//! its order `R(i, h)` is the number of particles after which the zero rotor
//! configuration comes back. Of those particles `S_down` leave through the
//! root's ancestor and `S_up` through the leaves:
//!
//! ```text
//! S_down(i, h) = lcm_k R(chi_i(k), h-1)
//! S_up(i, h)   = S_down(i, h) * sum_j d_ij S_up(j, h-1) / R(j, h-1)
//! ```
//!
//! with `S_down(i, 1) = 1` and `S_up(i, 1) = d_i`. The escape sequence of one
//! period is obtained from the branch periods by the explosion operator.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::cover::{Target, WiredTree};
use crate::error::{Error, Result};
use crate::graph::{BaseGraph, Label};
use crate::rotor::{EscapeSequence, RotorConfig, DEFAULT_STEP_CAP};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootOrderCell {
    pub down: BigUint,
    pub up: BigUint,
}

impl RootOrderCell {
    /// Period `R = S_down + S_up`.
    pub fn period(&self) -> BigUint {
        &self.down + &self.up
    }

    /// Probability that a simple random walk from the root exits downwards.
    pub fn hitting_down(&self) -> BigRational {
        BigRational::new(self.down.clone().into(), self.period().into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootOrderTable {
    rows: Vec<Vec<RootOrderCell>>,
}

impl RootOrderTable {
    pub fn h_max(&self) -> u32 {
        self.rows.len() as u32
    }

    pub fn cell(&self, i: Label, h: u32) -> &RootOrderCell {
        assert!(h >= 1, "heights start at 1");
        &self.rows[h as usize - 1][i]
    }

    pub fn down(&self, i: Label, h: u32) -> &BigUint {
        &self.cell(i, h).down
    }

    pub fn up(&self, i: Label, h: u32) -> &BigUint {
        &self.cell(i, h).up
    }

    pub fn period(&self, i: Label, h: u32) -> BigUint {
        self.cell(i, h).period()
    }
}

/// Evaluates the lcm recursion, folding the lcm over children in generation order.
pub fn root_order_recursion(g: &BaseGraph, h_max: u32) -> Result<RootOrderTable> {
    if h_max == 0 {
        return Err(Error::InvalidArgument("h_max must be at least 1".into()));
    }
    let mut rows = vec![g
        .labels()
        .map(|i| RootOrderCell { down: BigUint::one(), up: BigUint::from(g.degree(i)) })
        .collect::<Vec<_>>()];
    for _ in 1..h_max {
        let prev = rows.last().unwrap();
        let periods: Vec<BigUint> = prev.iter().map(RootOrderCell::period).collect();
        let mut next = Vec::with_capacity(g.m());
        for i in g.labels() {
            let down = g.chi(i).iter().fold(BigUint::one(), |acc, &j| acc.lcm(&periods[j]));
            let mut up = BigUint::zero();
            for j in g.labels().filter(|&j| g.d(i, j) > 0) {
                let (q, r) = (&down * &prev[j].up * g.d(i, j)).div_rem(&periods[j]);
                if !r.is_zero() {
                    return Err(Error::NonIntegral("root order recursion"));
                }
                up += q;
            }
            next.push(RootOrderCell { down, up });
        }
        rows.push(next);
    }
    Ok(RootOrderTable { rows })
}

/// Period of routing from the root, measured by simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulatedPeriod {
    pub period: u64,
    pub down: u64,
    pub up: u64,
}

/// Routes particles from the root, starting at the zero configuration, until
/// the configuration is zero again. The first return is the period, so it
/// is minimal by construction.
pub fn root_order_simulated(w: &WiredTree, cap: u64) -> Result<SimulatedPeriod> {
    if cap == 0 {
        return Err(Error::InvalidArgument("cap must be at least 1".into()));
    }
    let mut rotors = vec![0u32; w.len()];
    let mut nonzero = 0usize;
    let (mut down, mut up) = (0u64, 0u64);
    loop {
        if down + up == cap {
            return Err(Error::cap("root element period", format!("{cap}+"), cap));
        }
        let mut pos = 0usize;
        let mut steps = 0u64;
        loop {
            steps += 1;
            if steps > DEFAULT_STEP_CAP {
                return Err(Error::cap("rotor walk steps", format!("{DEFAULT_STEP_CAP}+"), DEFAULT_STEP_CAP));
            }
            let deg = w.degree(pos) as u32;
            let r = &mut rotors[pos];
            if *r == 0 {
                nonzero += 1;
            }
            *r += 1;
            if *r == deg {
                *r = 0;
                nonzero -= 1;
            }
            match w.neighbors(pos)[*r as usize] {
                Target::Vertex(next) => pos = next,
                Target::SinkDown => {
                    down += 1;
                    break;
                }
                Target::SinkUp => {
                    up += 1;
                    break;
                }
            }
        }
        if nonzero == 0 {
            debug_assert!(rotors.iter().all(|&r| r == 0));
            return Ok(SimulatedPeriod { period: down + up, down, up });
        }
    }
}

/// `theta(a) = (0, a_1, a_2, ..)`.
pub fn shift(a: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len() + 1);
    out.push(0);
    out.extend_from_slice(a);
    out
}

/// `X(a_1, a_2, ..) = (1^a_1, 0, 1^a_2, 0, ..)`.
pub fn explosion(a: &[u64]) -> Vec<u8> {
    let ones: u64 = a.iter().sum();
    let mut out = Vec::with_capacity(a.len() + ones as usize);
    for &k in a {
        out.extend(std::iter::repeat_n(1u8, k as usize));
        out.push(0);
    }
    out
}

/// Like [`explosion`] for signed input; rejects negative entries.
pub fn explosion_checked(a: &[i64]) -> Result<Vec<u8>> {
    let a: Vec<u64> = a
        .iter()
        .map(|&k| u64::try_from(k).map_err(|_| Error::InvalidArgument(format!("negative explosion entry {k}"))))
        .collect::<Result<_>>()?;
    Ok(explosion(&a))
}

/// Default cap on the length of a materialized escape period.
pub const DEFAULT_PERIOD_CAP: u64 = 10_000_000;

/// One period of the escape sequence from the zero configuration, built
/// from the branch periods: each branch period is repeated up to the lcm of
/// the branch periods, the repeats are summed elementwise and exploded.
pub fn explosion_escape(g: &BaseGraph, i: Label, h: u32, cap: u64) -> Result<EscapeSequence> {
    if h == 0 {
        return Err(Error::InvalidArgument("height must be at least 1".into()));
    }
    if i >= g.m() {
        return Err(Error::InvalidArgument(format!("type {} out of range", i + 1)));
    }
    // Height 0 escapes every particle: period (1).
    let mut words: Vec<Vec<u8>> = vec![vec![1]; g.m()];
    for level in 1..=h {
        let mut next = Vec::with_capacity(g.m());
        for t in g.labels() {
            // Only the requested type is needed on the last level.
            if level == h && t != i {
                next.push(Vec::new());
                continue;
            }
            let lcm = g
                .chi(t)
                .iter()
                .try_fold(1u64, |acc, &j| {
                    let len = words[j].len() as u64;
                    let l = acc / acc.gcd(&len) * len;
                    (l <= cap).then_some(l)
                })
                .ok_or_else(|| Error::cap("escape period", format!("{cap}+"), cap))?;
            let mut sums = vec![0u64; lcm as usize];
            for &j in g.chi(t) {
                let word = &words[j];
                for (k, s) in sums.iter_mut().enumerate() {
                    *s += u64::from(word[k % word.len()]);
                }
            }
            let total = lcm + sums.iter().sum::<u64>();
            if total > cap {
                return Err(Error::cap("escape period", total, cap));
            }
            next.push(explosion(&sums));
        }
        words = next;
    }
    Ok(EscapeSequence(std::mem::take(&mut words[i])))
}

/// The first `n` escape bits from an arbitrary rotor configuration, by the
/// explosion formula applied recursively through the tree: the branches the
/// root rotor has already passed enter shifted, the others unshifted, and
/// every collapsed leaf escapes all particles.
pub fn explosion_prefix(w: &WiredTree, c: &RotorConfig, n: usize) -> Result<EscapeSequence> {
    if c.as_slice().len() != w.len() {
        return Err(Error::InvalidArgument("configuration does not match tree".into()));
    }
    Ok(EscapeSequence(prefix_at(w, c, 0, n)))
}

fn prefix_at(w: &WiredTree, c: &RotorConfig, x: usize, n: usize) -> Vec<u8> {
    let mut sums = vec![0u64; n];
    let passed = c.get(x) as usize;
    for (k, target) in w.neighbors(x).iter().enumerate().skip(1) {
        let offset = usize::from(k <= passed);
        let branch = match *target {
            Target::Vertex(y) => prefix_at(w, c, y, n - offset),
            _ => vec![1u8; n - offset],
        };
        for (s, b) in sums[offset..].iter_mut().zip(branch) {
            *s += u64::from(b);
        }
    }
    let mut out = explosion(&sums);
    out.truncate(n);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingCell {
    pub down: BigRational,
    pub up: BigRational,
}

/// `H_down(i, h)` and `H_up(i, h)` for every type and height, `rows[h-1][i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingTable {
    pub rows: Vec<Vec<HittingCell>>,
}

impl HittingTable {
    pub fn cell(&self, i: Label, h: u32) -> &HittingCell {
        &self.rows[h as usize - 1][i]
    }
}

/// Exit probabilities of the simple random walk from the root, by first-step
/// analysis: `1 = H_down(i, h) (d_i + 1 - sum_j d_ij H_down(j, h-1))`.
pub fn hitting_probabilities(g: &BaseGraph, h_max: u32) -> Result<HittingTable> {
    if h_max == 0 {
        return Err(Error::InvalidArgument("h_max must be at least 1".into()));
    }
    let cell = |down: BigRational| HittingCell { up: BigRational::one() - &down, down };
    let mut rows: Vec<Vec<HittingCell>> =
        vec![g.labels().map(|i| cell(BigRational::new(1.into(), (g.degree(i) + 1).into()))).collect()];
    for _ in 1..h_max {
        let prev = rows.last().unwrap();
        let next = g
            .labels()
            .map(|i| {
                let returned = g
                    .labels()
                    .fold(BigRational::zero(), |acc, j| acc + &prev[j].down * BigRational::from_integer(g.d(i, j).into()));
                let denom = BigRational::from_integer((g.degree(i) + 1).into()) - returned;
                cell(denom.recip())
            })
            .collect();
        rows.push(next);
    }
    Ok(HittingTable { rows })
}

/// Checks `1 = S_down(i,h)/R(i,h) * (d_i + 1 - sum_j d_ij S_down(j,h-1)/R(j,h-1))`
/// exactly for every cell with `h >= 2`.
pub fn alternative_system_holds(g: &BaseGraph, table: &RootOrderTable) -> bool {
    (2..=table.h_max()).all(|h| {
        g.labels().all(|i| {
            let inner = g.labels().fold(BigRational::from_integer((g.degree(i) + 1).into()), |acc, j| {
                acc - table.cell(j, h - 1).hitting_down() * BigRational::from_integer(g.d(i, j).into())
            });
            table.cell(i, h).hitting_down() * inner == BigRational::one()
        })
    })
}

fn geometric_sum(ratio: &BigUint, terms: u32) -> BigUint {
    // sum_{t < terms} ratio^t, valid for ratio == 1 as well.
    let mut sum = BigUint::zero();
    let mut power = BigUint::one();
    for _ in 0..terms {
        sum += &power;
        power *= ratio;
    }
    sum
}

fn biregular_r1(alpha: u32, beta: u32, h: u32) -> BigUint {
    let ab = BigUint::from(alpha) * beta;
    let k = h / 2;
    if h.is_multiple_of(2) {
        geometric_sum(&ab, k) * (alpha + 1) * beta + 1u32
    } else {
        geometric_sum(&ab, k + 1) * (alpha + 1)
    }
}

/// Root-element orders `(R1, R2)` of the `(alpha, beta)` bi-regular cover in
/// closed form.
pub fn biregular_closed_form(alpha: u32, beta: u32, h: u32) -> Result<(BigUint, BigUint)> {
    if alpha == 0 || beta == 0 || h == 0 {
        return Err(Error::InvalidArgument("alpha, beta and h must be positive".into()));
    }
    Ok((biregular_r1(alpha, beta, h), biregular_r1(beta, alpha, h)))
}

/// `R1(h) = (alpha+1) R2(h-1) - alpha R1(h-2)`, symmetrically for `R2`, with
/// `R(0) = 1` and `R1(1) = alpha + 1`. Returns heights `0..=h_max`.
pub fn biregular_two_term(alpha: u32, beta: u32, h_max: u32) -> Vec<(BigUint, BigUint)> {
    let mut out = vec![(BigUint::one(), BigUint::one())];
    if h_max >= 1 {
        out.push((BigUint::from(alpha + 1), BigUint::from(beta + 1)));
    }
    for h in 2..=h_max as usize {
        let r1 = &out[h - 1].1 * (alpha + 1) - &out[h - 2].0 * alpha;
        let r2 = &out[h - 1].0 * (beta + 1) - &out[h - 2].1 * beta;
        out.push((r1, r2));
    }
    out
}

/// `gcd(S_down, R)` for a cell, as a plain number when it fits.
pub fn down_period_gcd(cell: &RootOrderCell) -> Option<u64> {
    cell.down.gcd(&cell.period()).to_u64()
}
