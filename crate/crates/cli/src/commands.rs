use num_bigint::BigUint;
use num_integer::Integer;
use rrcover::cover::level_sizes;
use rrcover::forest::asymptotic_slope;
use rrcover::root_order::{explosion_escape, DEFAULT_PERIOD_CAP};
use rrcover::rotor::DEFAULT_ENUMERATION_CAP;
use rrcover::sandpile::{count_spanning_trees_bruteforce, determinant_order};
use rrcover::{BaseGraph, Execution, Exit, Label, RotorConfig, WiredTree};

use crate::report::{int, rational, real, Report, Table};
use crate::{Failure, Opts};

/// A report, plus the failure to exit with after printing it.
pub type Outcome = Result<(Report, Option<Failure>), Failure>;

/// Largest wired tree handed to the determinant oracle.
pub const DETERMINANT_LIMIT: u128 = 600;

/// Default particle budget for simulations.
pub const SIMULATION_CAP: u64 = 1_000_000;

pub fn non_sink_size(g: &BaseGraph, i: Label, h: u32) -> u128 {
    level_sizes(g, i, h)[..h as usize].iter().fold(0u128, |a, &s| a.saturating_add(s))
}

fn header(command: &str, name: &str, o: &Opts) -> Report {
    let mut r = Report::new(command);
    r.param("graph", name);
    if let Some(t) = o.root_type {
        r.param("type", t);
    }
    r
}

fn skipped() -> String {
    "skipped".into()
}

pub fn group_order(o: &Opts) -> Outcome {
    let (name, g) = o.graph()?;
    let types = o.types(&g)?;
    let (a, b) = o.height_range(None)?;
    let cap = o.cap(DEFAULT_ENUMERATION_CAP)?;
    let table = rrcover::forest_recursion(&g, b)?;
    let mut r = header("group-order", &name, o);
    r.param("heights", format!("{a}..{b}"));
    r.param("cap", cap);
    let mut t = Table::new("group_order", &["type", "h", "order", "determinant", "brute_force", "agree"]);
    let mut mismatch = None;
    for &i in &types {
        for h in a..=b {
            let order = table.order(i, h);
            let (mut det, mut brute) = (skipped(), skipped());
            let mut agree = true;
            if non_sink_size(&g, i, h) <= DETERMINANT_LIMIT {
                let w = WiredTree::build(&g, i, h)?;
                let d = determinant_order(&w);
                agree &= d == order;
                det = int(&d);
                if w.config_space_size() <= u128::from(cap) {
                    let bf = count_spanning_trees_bruteforce(&w, cap, Execution::default())?;
                    agree &= bf == order;
                    brute = int(&bf);
                }
            }
            if !agree {
                mismatch = Some(Failure::Mismatch(format!("oracles disagree at type {} h {h}", i + 1)));
            }
            t.push(vec![(i + 1).to_string(), h.to_string(), int(&order), det, brute, agree.to_string()]);
        }
    }
    r.tables.push(t);
    Ok((r, mismatch))
}

pub fn root_order(o: &Opts) -> Outcome {
    let (name, g) = o.graph()?;
    let types = o.types(&g)?;
    let (a, b) = o.height_range(None)?;
    let cap = o.cap(SIMULATION_CAP)?;
    let table = rrcover::root_order_recursion(&g, b)?;
    let mut r = header("root-order", &name, o);
    r.param("heights", format!("{a}..{b}"));
    r.param("cap", cap);
    let mut t = Table::new(
        "root_order",
        &["type", "h", "S_down", "S_up", "R", "H_down", "gcd_S_down_R", "simulated_R"],
    );
    let mut mismatch = None;
    for &i in &types {
        for h in a..=b {
            let cell = table.cell(i, h);
            let period = cell.period();
            let mut simulated = skipped();
            if period <= BigUint::from(cap) && non_sink_size(&g, i, h) <= u128::from(rrcover::cover::DEFAULT_VERTEX_CAP) {
                let w = WiredTree::build(&g, i, h)?;
                let sim = rrcover::root_order_simulated(&w, cap)?;
                if BigUint::from(sim.down) != cell.down || BigUint::from(sim.up) != cell.up {
                    mismatch = Some(Failure::Mismatch(format!(
                        "simulation ({}, {}) differs from recursion at type {} h {h}",
                        sim.down,
                        sim.up,
                        i + 1
                    )));
                }
                simulated = sim.period.to_string();
            }
            t.push(vec![
                (i + 1).to_string(),
                h.to_string(),
                int(&cell.down),
                int(&cell.up),
                int(&period),
                rational(&cell.hitting_down()),
                int(&cell.down.gcd(&period)),
                simulated,
            ]);
        }
    }
    r.tables.push(t);
    Ok((r, mismatch))
}

pub fn gamma(o: &Opts) -> Outcome {
    let (name, g) = o.graph()?;
    let types = o.types(&g)?;
    let (a, b) = o.height_range(None)?;
    let table = rrcover::forest_recursion(&g, b)?;
    let mut r = header("gamma", &name, o);
    r.param("heights", format!("{a}..{b}"));
    let mut t = Table::new("forest", &["type", "h", "F_down", "F_up", "order", "gamma_num", "gamma_den"]);
    for &i in &types {
        for h in a..=b {
            let gamma = table.gamma(i, h);
            t.push(vec![
                (i + 1).to_string(),
                h.to_string(),
                int(table.down(i, h)),
                int(table.up(i, h)),
                int(&table.order(i, h)),
                gamma.numer().to_string(),
                gamma.denom().to_string(),
            ]);
        }
    }
    r.tables.push(t);
    Ok((r, None))
}

pub fn fixed_point(o: &Opts) -> Outcome {
    let (name, g) = o.graph()?;
    let types = o.types(&g)?;
    let tol = o.tolerance(1e-12)?;
    let max_iter = o.cap(10_000_000)?;
    let fp = rrcover::fixed_point(&g, tol, max_iter)?;
    let mut r = header("fixed-point", &name, o);
    r.param("tolerance", real(tol));
    r.param("cap", max_iter);
    r.param("iterations", fp.iterations);
    r.param("converged", fp.converged);
    r.param("residual", real(fp.residual));
    let mut t = Table::new("fixed_point", &["type", "upsilon"]);
    for &i in &types {
        t.push(vec![(i + 1).to_string(), real(fp.upsilon[i])]);
    }
    r.tables.push(t);
    let failure = (!fp.converged).then(|| Failure::Cap(format!("fixed point not reached within {max_iter} iterations")));
    Ok((r, failure))
}

pub fn slope(o: &Opts) -> Outcome {
    let (name, g) = o.graph()?;
    let types = o.types(&g)?;
    let (a, b) = o.height_range(Some((10, 25)))?;
    let fit = asymptotic_slope(&g, a, b)?;
    let mut r = header("slope", &name, o);
    r.param("heights", format!("{a}..{b}"));
    r.param("target", real(fit.target));
    let errors = fit.relative_errors();
    let mut t = Table::new("slope", &["type", "slope", "target", "relative_error"]);
    for &i in &types {
        t.push(vec![(i + 1).to_string(), real(fit.slopes[i]), real(fit.target), real(errors[i])]);
    }
    r.tables.push(t);
    Ok((r, None))
}

pub fn simulate(o: &Opts) -> Outcome {
    let (name, g) = o.graph()?;
    let types = o.types(&g)?;
    let (a, b) = o.height_range(None)?;
    let cap = o.cap(SIMULATION_CAP)?;
    let mut r = header("simulate", &name, o);
    r.param("heights", format!("{a}..{b}"));
    r.param("cap", cap);
    let mut summary = Table::new("period", &["type", "h", "R", "S_down", "S_up"]);
    let mut trace = Table::new("trace", &["type", "h", "particle", "exit", "steps"]);
    for &i in &types {
        for h in a..=b {
            let w = WiredTree::build(&g, i, h)?;
            let mut c = RotorConfig::zero(&w);
            let (mut down, mut up, mut n) = (0u64, 0u64, 0u64);
            loop {
                if n == cap {
                    return Err(Failure::Cap(format!(
                        "period of type {} h {h} exceeds cap ({cap} particles)",
                        i + 1
                    )));
                }
                n += 1;
                let (exit, steps) = w.route(&mut c, 0)?;
                match exit {
                    Exit::Down => down += 1,
                    Exit::Up => up += 1,
                }
                let side = if exit == Exit::Down { "down" } else { "up" };
                trace.push(vec![(i + 1).to_string(), h.to_string(), n.to_string(), side.into(), steps.to_string()]);
                if c.is_zero() {
                    break;
                }
            }
            summary.push(vec![(i + 1).to_string(), h.to_string(), n.to_string(), down.to_string(), up.to_string()]);
        }
    }
    r.tables.push(summary);
    r.tables.push(trace);
    Ok((r, None))
}

pub fn escape(o: &Opts) -> Outcome {
    let (name, g) = o.graph()?;
    let types = o.types(&g)?;
    let (a, b) = o.height_range(None)?;
    let cap = o.cap(DEFAULT_PERIOD_CAP)?;
    let mut r = header("escape", &name, o);
    r.param("heights", format!("{a}..{b}"));
    r.param("cap", cap);
    let mut t = Table::new("escape", &["type", "h", "length", "ones", "sequence"]);
    for &i in &types {
        for h in a..=b {
            let word = explosion_escape(&g, i, h, cap)?;
            t.push(vec![
                (i + 1).to_string(),
                h.to_string(),
                word.len().to_string(),
                word.ones().to_string(),
                word.to_string(),
            ]);
        }
    }
    r.tables.push(t);
    Ok((r, None))
}

pub fn hitting(o: &Opts) -> Outcome {
    let (name, g) = o.graph()?;
    let types = o.types(&g)?;
    let (a, b) = o.height_range(None)?;
    let table = rrcover::hitting_probabilities(&g, b)?;
    let mut r = header("hitting", &name, o);
    r.param("heights", format!("{a}..{b}"));
    let mut t = Table::new("hitting", &["type", "h", "H_down", "H_up"]);
    for &i in &types {
        for h in a..=b {
            let cell = table.cell(i, h);
            t.push(vec![(i + 1).to_string(), h.to_string(), rational(&cell.down), rational(&cell.up)]);
        }
    }
    r.tables.push(t);
    Ok((r, None))
}
