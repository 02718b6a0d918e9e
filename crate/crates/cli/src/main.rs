mod commands;
mod report;
mod verify;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rrcover::{BaseGraph, Error};

use report::Format;

#[derive(Parser, Debug)]
#[command(name = "rrcover", version, about = "Rotor-router groups on directed covers of finite graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Group order |RR| by the forest recursion, checked against the determinant and brute force
    GroupOrder(Opts),
    /// Order of the root element, by the lcm recursion and by simulation
    RootOrder(Opts),
    /// Forest counts and the ratio gamma = F_up / F_down
    Gamma(Opts),
    /// Limit of gamma as the fixed point of the ratio map
    FixedPoint(Opts),
    /// Growth rate of ln ln |RR| against the spectral radius
    Slope(Opts),
    /// Particle-by-particle trace of routing from the root over one period
    Simulate(Opts),
    /// Escape sequence of one period, from the explosion formula
    Escape(Opts),
    /// Exit probabilities of the simple random walk from the root
    Hitting(Opts),
    /// Cross-oracle verification matrix
    Verify(Opts),
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Graph file (JSON) or preset: `fibonacci`, `biregular:A,B`
    #[arg(long)]
    pub graph: Option<String>,
    /// Root type, 1-based; all types when omitted
    #[arg(long = "type")]
    pub root_type: Option<usize>,
    #[arg(long, conflicts_with = "heights")]
    pub height: Option<u32>,
    /// Inclusive range `A..B`
    #[arg(long)]
    pub heights: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Budget::Small)]
    pub budget: Budget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Budget {
    Small,
    Full,
}

/// Failures of a command, each with its own exit status.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Cap(String),
    /// Verification failed; the report is still printed.
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Cap(_) => 3,
            Failure::Mismatch(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } | Error::NotConverged { .. } => Failure::Cap(e.to_string()),
            Error::NonIntegral(_) => Failure::Mismatch(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl Opts {
    pub fn graph(&self) -> Result<(String, BaseGraph), Failure> {
        let spec = self.graph.as_deref().ok_or_else(|| Failure::Input("--graph is required".into()))?;
        Ok((spec.to_string(), parse_graph(spec)?))
    }

    pub fn types(&self, g: &BaseGraph) -> Result<Vec<usize>, Failure> {
        match self.root_type {
            None => Ok(g.labels().collect()),
            Some(t) if (1..=g.m()).contains(&t) => Ok(vec![t - 1]),
            Some(t) => Err(Failure::Input(format!("--type {t} out of range 1..={}", g.m()))),
        }
    }

    /// Heights from `--height` or `--heights`, falling back to `default`.
    pub fn height_range(&self, default: Option<(u32, u32)>) -> Result<(u32, u32), Failure> {
        let (a, b) = match (self.height, &self.heights) {
            (Some(h), _) => (h, h),
            (None, Some(r)) => parse_range(r)?,
            (None, None) => default.ok_or_else(|| Failure::Input("--height or --heights is required".into()))?,
        };
        if a == 0 || b < a {
            return Err(Failure::Input(format!("invalid heights {a}..{b}")));
        }
        Ok((a, b))
    }

    pub fn tolerance(&self, default: f64) -> Result<f64, Failure> {
        match self.tolerance {
            Some(t) if t.is_nan() || t <= 0.0 => Err(Failure::Input("--tolerance must be positive".into())),
            Some(t) => Ok(t),
            None => Ok(default),
        }
    }

    pub fn cap(&self, default: u64) -> Result<u64, Failure> {
        match self.cap {
            Some(0) => Err(Failure::Input("--cap must be positive".into())),
            Some(c) => Ok(c),
            None => Ok(default),
        }
    }
}

fn parse_range(s: &str) -> Result<(u32, u32), Failure> {
    let bad = || Failure::Input(format!("--heights expects A..B, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

pub fn parse_graph(spec: &str) -> Result<BaseGraph, Failure> {
    if spec == "fibonacci" {
        return Ok(BaseGraph::fibonacci());
    }
    if let Some(params) = spec.strip_prefix("biregular:") {
        let bad = || Failure::Input(format!("preset {spec:?}: expected biregular:A,B"));
        let (a, b) = params.split_once(',').ok_or_else(bad)?;
        let a = a.trim().parse().map_err(|_| bad())?;
        let b = b.trim().parse().map_err(|_| bad())?;
        return Ok(BaseGraph::biregular(a, b)?);
    }
    Ok(BaseGraph::from_path(spec)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = match &cli.command {
        Command::GroupOrder(o)
        | Command::RootOrder(o)
        | Command::Gamma(o)
        | Command::FixedPoint(o)
        | Command::Slope(o)
        | Command::Simulate(o)
        | Command::Escape(o)
        | Command::Hitting(o)
        | Command::Verify(o) => o,
    };
    if let Err(f) = opts.tolerance(1.0) {
        return report_failure(&f);
    }
    let result = match &cli.command {
        Command::GroupOrder(o) => commands::group_order(o),
        Command::RootOrder(o) => commands::root_order(o),
        Command::Gamma(o) => commands::gamma(o),
        Command::FixedPoint(o) => commands::fixed_point(o),
        Command::Slope(o) => commands::slope(o),
        Command::Simulate(o) => commands::simulate(o),
        Command::Escape(o) => commands::escape(o),
        Command::Hitting(o) => commands::hitting(o),
        Command::Verify(o) => verify::run(o),
    };
    match result {
        Ok((report, None)) => {
            print!("{}", report.render(opts.format));
            ExitCode::SUCCESS
        }
        Ok((report, Some(failure))) => {
            print!("{}", report.render(opts.format));
            report_failure(&failure)
        }
        Err(failure) => report_failure(&failure),
    }
}

fn report_failure(f: &Failure) -> ExitCode {
    let (Failure::Input(m) | Failure::Cap(m) | Failure::Mismatch(m)) = f;
    eprintln!("error: {m}");
    ExitCode::from(f.code())
}
