//! Cross-oracle verification matrix.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rrcover::root_order::{alternative_system_holds, explosion_escape, explosion_prefix};
use rrcover::rotor::DEFAULT_ENUMERATION_CAP;
use rrcover::sandpile::{count_spanning_trees_bruteforce, determinant_order, stabilize, stabilize_random_order};
use rrcover::{BaseGraph, ChipConfig, Execution, Label, RotorConfig, WiredTree};

use crate::commands::{non_sink_size, Outcome, DETERMINANT_LIMIT};
use crate::report::{Report, Table};
use crate::{parse_graph, Budget, Failure, Opts};

struct Plan {
    heights: (u32, u32),
    /// Largest period that is simulated.
    simulation_cap: u64,
    enumeration_cap: u64,
    /// Bits compared from random rotor configurations.
    prefix_bits: usize,
    /// Largest tree used for the sandpile check.
    sandpile_limit: u128,
}

impl Plan {
    fn new(o: &Opts) -> Result<Self, Failure> {
        let (default_heights, simulation_cap, sandpile_limit) = match o.budget {
            Budget::Small => ((1, 6), 1_000_000, 200),
            Budget::Full => ((1, 7), 20_000_000, 600),
        };
        Ok(Plan {
            heights: o.height_range(Some(default_heights))?,
            simulation_cap,
            enumeration_cap: o.cap(DEFAULT_ENUMERATION_CAP)?,
            prefix_bits: 64,
            sandpile_limit,
        })
    }
}

enum Status {
    Pass(String),
    Fail(String),
    Skipped(String),
}

struct Cell<'a> {
    table: &'a mut Table,
    graph: &'a str,
    i: Label,
    h: u32,
    failed: &'a mut usize,
}

impl Cell<'_> {
    fn record(&mut self, check: &str, status: Status) {
        let (word, detail) = match status {
            Status::Pass(d) => ("pass", d),
            Status::Fail(d) => {
                *self.failed += 1;
                ("FAIL", d)
            }
            Status::Skipped(d) => ("skipped", d),
        };
        self.table.push(vec![
            self.graph.to_string(),
            (self.i + 1).to_string(),
            self.h.to_string(),
            check.to_string(),
            word.to_string(),
            detail,
        ]);
    }
}

fn check(ok: bool, detail: String) -> Status {
    if ok {
        Status::Pass(detail)
    } else {
        Status::Fail(detail)
    }
}

pub fn run(o: &Opts) -> Outcome {
    let plan = Plan::new(o)?;
    let graphs: Vec<(String, BaseGraph)> = match &o.graph {
        Some(spec) => vec![(spec.clone(), parse_graph(spec)?)],
        None => vec![
            ("fibonacci".to_string(), BaseGraph::fibonacci()),
            ("biregular:2,3".to_string(), BaseGraph::biregular(2, 3)?),
        ],
    };
    let mut report = Report::new("verify");
    report.param("budget", format!("{:?}", o.budget).to_lowercase());
    report.param("heights", format!("{}..{}", plan.heights.0, plan.heights.1));
    report.param("seed", o.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let mut table = Table::new("checks", &["graph", "type", "h", "check", "status", "detail"]);
    let mut failed = 0usize;

    for (name, g) in &graphs {
        let h_max = plan.heights.1;
        let forest = rrcover::forest_recursion(g, h_max)?;
        let roots = rrcover::root_order_recursion(g, h_max)?;
        let hitting = rrcover::hitting_probabilities(g, h_max)?;
        let alternative = alternative_system_holds(g, &roots);
        for i in o.types(g)? {
            for h in plan.heights.0..=h_max {
                let mut cell = Cell { table: &mut table, graph: name, i, h, failed: &mut failed };
                let small = non_sink_size(g, i, h) <= DETERMINANT_LIMIT;
                let w = if small { Some(WiredTree::build(g, i, h)?) } else { None };

                let order = forest.order(i, h);
                let status = match &w {
                    None => Status::Skipped("tree too large for the determinant".into()),
                    Some(w) => {
                        let det = determinant_order(w);
                        if w.config_space_size() <= u128::from(plan.enumeration_cap) {
                            let bf = count_spanning_trees_bruteforce(w, plan.enumeration_cap, Execution::default())?;
                            check(det == order && bf == order, format!("{order} = det {det} = brute {bf}"))
                        } else {
                            check(det == order, format!("{order} = det {det}"))
                        }
                    }
                };
                cell.record("group-order", status);

                let rc = roots.cell(i, h);
                let period = rc.period();
                let status = if period > BigUint::from(plan.simulation_cap) {
                    Status::Skipped(format!("period {period} above {}", plan.simulation_cap))
                } else {
                    let w = match &w {
                        Some(w) => w.clone(),
                        None => WiredTree::build(g, i, h)?,
                    };
                    let sim = rrcover::root_order_simulated(&w, plan.simulation_cap)?;
                    let same = BigUint::from(sim.down) == rc.down && BigUint::from(sim.up) == rc.up;
                    cell.record("root-order", check(same, format!("R = {} = {} + {}", sim.period, sim.down, sim.up)));

                    let word = explosion_escape(g, i, h, plan.simulation_cap)?;
                    let (simulated, end) = w.escape_sequence(&RotorConfig::zero(&w), word.len())?;
                    check(simulated == word && end.is_zero(), format!("{} bits", word.len()))
                };
                match status {
                    Status::Skipped(d) => {
                        cell.record("root-order", Status::Skipped(d.clone()));
                        cell.record("escape", Status::Skipped(d));
                    }
                    other => cell.record("escape", other),
                }

                let status = match &w {
                    None => Status::Skipped("tree too large".into()),
                    Some(w) => {
                        let c = RotorConfig::random(w, &mut rng);
                        let (simulated, _) = w.escape_sequence(&c, plan.prefix_bits)?;
                        let formula = explosion_prefix(w, &c, plan.prefix_bits)?;
                        check(simulated == formula, format!("{} bits from a random configuration", plan.prefix_bits))
                    }
                };
                cell.record("escape-random", status);

                let hc = hitting.cell(i, h);
                let ok = hc.down == rc.hitting_down() && &hc.down + &hc.up == BigRational::one() && alternative;
                cell.record("hitting", check(ok, format!("H_down = {}/{}", hc.down.numer(), hc.down.denom())));

                let status = match &w {
                    Some(w) if non_sink_size(g, i, h) <= plan.sandpile_limit => {
                        let chips = ChipConfig::random(w, &mut rng, 4 * w.len() as u64);
                        let reference = stabilize(w, &chips)?;
                        let mut same = true;
                        for _ in 0..5 {
                            same &= stabilize_random_order(w, &chips, &mut rng)? == reference;
                        }
                        check(same, "5 toppling orders".into())
                    }
                    _ => Status::Skipped("tree too large".into()),
                };
                cell.record("sandpile", status);
            }
        }
    }
    let total = table.rows.len();
    let skipped = table.rows.iter().filter(|r| r[4] == "skipped").count();
    report.param("passed", total - skipped - failed);
    report.param("failed", failed);
    report.param("skipped", skipped);
    report.tables.push(table);
    let failure = (failed > 0).then(|| Failure::Mismatch(format!("{failed} checks failed")));
    Ok((report, failure))
}
