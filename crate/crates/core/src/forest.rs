//! Rotor-router group orders of wired covers via rooted spanning forests.
//!
//! For a cover of height `h` rooted at type `i`, `F_down(i, h)` counts the
//! spanning forests rooted at the sink that use the root's ancestor edge and
//! `F_up(i, h)` those that connect the root to the leaves. Their sum is the
//! group order. Both satisfy a recursion over the principal branches:
//!
//! ```text
//! F_down(i, h) = prod_j order(j, h-1)^d_ij
//! F_up(i, h)   = F_down(i, h) * sum_j d_ij F_up(j, h-1) / order(j, h-1)
//! ```
//!
//! starting from `F_down(i, 1) = 1`, `F_up(i, 1) = d_i`. The ratio
//! `gamma = F_up / F_down` decreases monotonically to the fixed point of
//! `x_i = sum_j d_ij x_j / (1 + x_j)`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::graph::{BaseGraph, Label};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestCell {
    pub down: BigUint,
    pub up: BigUint,
}

impl ForestCell {
    pub fn order(&self) -> BigUint {
        &self.down + &self.up
    }

    /// `up / down`, reduced.
    pub fn gamma(&self) -> BigRational {
        BigRational::new(self.up.clone().into(), self.down.clone().into())
    }
}

/// Forest counts for every type and every height `1..=h_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestTable {
    rows: Vec<Vec<ForestCell>>,
}

impl ForestTable {
    pub fn h_max(&self) -> u32 {
        self.rows.len() as u32
    }

    pub fn m(&self) -> usize {
        self.rows[0].len()
    }

    pub fn cell(&self, i: Label, h: u32) -> &ForestCell {
        assert!(h >= 1, "heights start at 1");
        &self.rows[h as usize - 1][i]
    }

    pub fn down(&self, i: Label, h: u32) -> &BigUint {
        &self.cell(i, h).down
    }

    pub fn up(&self, i: Label, h: u32) -> &BigUint {
        &self.cell(i, h).up
    }

    pub fn order(&self, i: Label, h: u32) -> BigUint {
        self.cell(i, h).order()
    }

    pub fn gamma(&self, i: Label, h: u32) -> BigRational {
        self.cell(i, h).gamma()
    }
}

pub fn forest_recursion(g: &BaseGraph, h_max: u32) -> Result<ForestTable> {
    forest_recursion_with(g, h_max, Execution::default())
}

/// Evaluates the forest recursion exactly, computing all types of one height
/// in parallel.
pub fn forest_recursion_with(g: &BaseGraph, h_max: u32, exec: Execution) -> Result<ForestTable> {
    if h_max == 0 {
        return Err(Error::InvalidArgument("h_max must be at least 1".into()));
    }
    let first: Vec<ForestCell> = g
        .labels()
        .map(|i| ForestCell { down: BigUint::one(), up: BigUint::from(g.degree(i)) })
        .collect();
    let mut rows = vec![first];
    for _ in 1..h_max {
        let prev = rows.last().unwrap();
        let orders: Vec<BigUint> = prev.iter().map(ForestCell::order).collect();
        let next: Result<Vec<ForestCell>> = exec::map_indices(exec, g.m(), |i| {
            let mut down = BigUint::one();
            for j in g.labels() {
                for _ in 0..g.d(i, j) {
                    down *= &orders[j];
                }
            }
            // up = down * sum_j d_ij up_j / order_j; each term must divide exactly.
            let mut up = BigUint::zero();
            for j in g.labels().filter(|&j| g.d(i, j) > 0) {
                let (q, r) = (&down * &prev[j].up * g.d(i, j)).div_rem(&orders[j]);
                if !r.is_zero() {
                    return Err(Error::NonIntegral("forest recursion"));
                }
                up += q;
            }
            Ok(ForestCell { down, up })
        })
        .into_iter()
        .collect();
        rows.push(next?);
    }
    Ok(ForestTable { rows })
}

/// Group order of the wired cover of height `h` rooted at type `i`.
pub fn group_order(g: &BaseGraph, i: Label, h: u32) -> Result<BigUint> {
    if i >= g.m() {
        return Err(Error::InvalidArgument(format!("type {} out of range", i + 1)));
    }
    Ok(forest_recursion(g, h)?.order(i, h))
}

/// `gamma[h-1][i]` by the ratio recursion alone, without forest counts.
pub fn gamma_sequence(g: &BaseGraph, h_max: u32) -> Result<Vec<Vec<BigRational>>> {
    if h_max == 0 {
        return Err(Error::InvalidArgument("h_max must be at least 1".into()));
    }
    let mut rows: Vec<Vec<BigRational>> = vec![g.labels().map(|i| BigRational::from_integer(g.degree(i).into())).collect()];
    for _ in 1..h_max {
        let prev = rows.last().unwrap();
        let damped: Vec<BigRational> = prev.iter().map(|x| x / (BigRational::one() + x)).collect();
        let next = g
            .labels()
            .map(|i| {
                g.labels()
                    .filter(|&j| g.d(i, j) > 0)
                    .fold(BigRational::zero(), |acc, j| acc + &damped[j] * BigRational::from_integer(g.d(i, j).into()))
            })
            .collect();
        rows.push(next);
    }
    Ok(rows)
}

/// Fixed point of `x_i = sum_j d_ij x_j / (1 + x_j)` reached from `(d_1, .., d_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub upsilon: Vec<f64>,
    /// Sup-norm of `f(upsilon) - upsilon`.
    pub residual: f64,
    pub iterations: u64,
    pub converged: bool,
}

fn damped_map(g: &BaseGraph, x: &[f64]) -> Vec<f64> {
    g.labels()
        .map(|i| g.labels().map(|j| f64::from(g.d(i, j)) * x[j] / (1.0 + x[j])).sum())
        .collect()
}

/// Iterates the ratio map until successive iterates differ by less than
/// `tolerance` in sup-norm. Exhausting `max_iter` is reported through
/// `converged = false` together with the last iterate.
pub fn fixed_point(g: &BaseGraph, tolerance: f64, max_iter: u64) -> Result<FixedPoint> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let mut x: Vec<f64> = g.labels().map(|i| f64::from(g.degree(i))).collect();
    let sup = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let next = damped_map(g, &x);
        iterations += 1;
        let change = sup(&next, &x);
        x = next;
        if change < tolerance {
            converged = true;
            break;
        }
    }
    let residual = sup(&damped_map(g, &x), &x);
    Ok(FixedPoint { upsilon: x, residual, iterations, converged })
}

/// Natural logarithm of a big integer (`-inf` for zero).
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Log-domain forest counts for one type and height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogCell {
    /// `ln F_down`.
    pub x: f64,
    /// `ln F_up`.
    pub y: f64,
    pub gamma: f64,
}

impl LogCell {
    /// `ln |RR| = ln(F_down + F_up)`.
    pub fn log_order(&self) -> f64 {
        self.x + self.gamma.ln_1p()
    }
}

/// Floating-point forest recursion in the log domain, `cells[h-1][i]`:
/// `x_i^h = sum_j d_ij (x_j^{h-1} + ln(1 + gamma_j^{h-1}))`,
/// `y_i^h = x_i^h + ln gamma_i^h`.
pub fn log_forest_table(g: &BaseGraph, h_max: u32) -> Result<Vec<Vec<LogCell>>> {
    if h_max == 0 {
        return Err(Error::InvalidArgument("h_max must be at least 1".into()));
    }
    let mut rows: Vec<Vec<LogCell>> = vec![g
        .labels()
        .map(|i| {
            let d = f64::from(g.degree(i));
            LogCell { x: 0.0, y: d.ln(), gamma: d }
        })
        .collect()];
    for _ in 1..h_max {
        let prev = rows.last().unwrap();
        let gammas = damped_map(g, &prev.iter().map(|c| c.gamma).collect::<Vec<_>>());
        let next = g
            .labels()
            .map(|i| {
                let x = g
                    .labels()
                    .map(|j| f64::from(g.d(i, j)) * (prev[j].x + prev[j].gamma.ln_1p()))
                    .sum::<f64>();
                LogCell { x, y: x + gammas[i].ln(), gamma: gammas[i] }
            })
            .collect();
        rows.push(next);
    }
    Ok(rows)
}

/// Least-squares growth rate of `ln ln |RR|` against the height.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    /// Fitted slope per type.
    pub slopes: Vec<f64>,
    /// `ln rho(D)`.
    pub target: f64,
    pub h_min: u32,
    pub h_max: u32,
}

impl SlopeFit {
    pub fn relative_errors(&self) -> Vec<f64> {
        self.slopes.iter().map(|s| (s - self.target).abs() / self.target).collect()
    }
}

/// Margin above 1 required of the spectral radius for the growth fit.
pub const SUPERCRITICAL_MARGIN: f64 = 1e-9;

pub fn asymptotic_slope(g: &BaseGraph, h_min: u32, h_max: u32) -> Result<SlopeFit> {
    if h_min < 2 || h_max <= h_min {
        return Err(Error::InvalidArgument("need 2 <= h_min < h_max".into()));
    }
    let rho = g.spectral_radius(1e-12, 1_000_000)?.rho;
    if rho <= 1.0 + SUPERCRITICAL_MARGIN {
        return Err(Error::Unsupported(format!(
            "doubly exponential growth needs spectral radius > 1, got {rho}"
        )));
    }
    let table = log_forest_table(g, h_max)?;
    let slopes = g
        .labels()
        .map(|i| {
            let points: Vec<(f64, f64)> =
                (h_min..=h_max).map(|h| (f64::from(h), table[h as usize - 1][i].log_order().ln())).collect();
            least_squares_slope(&points)
        })
        .collect();
    Ok(SlopeFit { slopes, target: rho.ln(), h_min, h_max })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
