//! Command-line front end: one deterministic report file per stage.

mod report;
mod stages;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use crate::coinvariants::Verdict;
use crate::finite_geometry::GeometryParams;
use crate::{Error, Result};

pub use report::FORMAT_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Subspace, hyperplane-complement and chamber counts.
    Geometry,
    /// Partition checks and chamber edges at the base vertex.
    BuildingVerify,
    /// V1–V5 checks on a presentation.
    Validate,
    /// Exhaustive tuple-set search (n = 2).
    Search,
    /// Presented upper bound for the coinvariants.
    Coinvariants,
    /// Abelianization and the ε-quotient comparison.
    Abelianization,
    /// Invariant-distribution certificate.
    Certify,
    /// Every stage in order.
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Geometry => "geometry",
            Command::BuildingVerify => "building-verify",
            Command::Validate => "validate",
            Command::Search => "search",
            Command::Coinvariants => "coinvariants",
            Command::Abelianization => "abelianization",
            Command::Certify => "certify",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "antilde",
    version,
    about = "Finite certificates for boundary coinvariants of Ã_n groups"
)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Dimension n of the projective space P^n.
    #[arg(long = "dim", default_value_t = 2)]
    n: usize,
    /// Residue characteristic p; the residue field is F_p, so q = p.
    #[arg(long = "prime", default_value_t = 2)]
    p: u64,
    /// Line precision m for the partition checks.
    #[arg(long, default_value_t = 2)]
    precision: u32,
    /// Presentation file (antpres-1); searched when omitted.
    #[arg(long)]
    presentation: Option<PathBuf>,
    /// Report directory.
    #[arg(long, default_value = "reports")]
    out: PathBuf,
    /// Seed for the randomized canonical-form sweep.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allow parameters outside n = 2, p ∈ {2, 3}, m ≤ 3.
    #[arg(long)]
    unbounded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub p: u64,
    pub precision: u32,
    pub presentation: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub unbounded: bool,
}

impl RunConfig {
    pub fn new(
        command: Command,
        n: usize,
        p: u64,
        precision: u32,
        out: impl Into<PathBuf>,
    ) -> Self {
        Self {
            command,
            n,
            p,
            precision,
            presentation: None,
            out: out.into(),
            seed: 0,
            unbounded: false,
        }
    }

    /// Residue field size; the building commands need `q = p`.
    pub fn q(&self) -> u32 {
        self.p as u32
    }

    pub fn in_envelope(&self) -> bool {
        self.n == 2 && matches!(self.p, 2 | 3) && self.precision <= 3
    }

    pub fn check(&self) -> Result<GeometryParams> {
        if self.precision == 0 {
            return Err(Error::Parameter("precision must be at least 1".into()));
        }
        if self.p > u64::from(u8::MAX) {
            return Err(Error::Parameter(format!("p = {} is too large", self.p)));
        }
        let params = GeometryParams::new(self.n, self.q())?;
        if !self.in_envelope() && !self.unbounded {
            return Err(Error::Parameter(format!(
                "n = {}, p = {}, m = {} is outside the desk-scale envelope (n = 2, p in {{2, 3}}, m <= 3); pass --unbounded to run anyway",
                self.n, self.p, self.precision
            )));
        }
        Ok(params)
    }

    /// Config echo for report headers. The output directory is left out so
    /// that runs into different directories produce identical reports.
    pub fn echo(&self) -> String {
        let presentation = self
            .presentation
            .as_ref()
            .map_or_else(|| "-".to_string(), |p| p.display().to_string());
        format!(
            "command={} n={} p={} q={} precision={} presentation={} unbounded={}",
            self.command.name(),
            self.n,
            self.p,
            self.q(),
            self.precision,
            presentation,
            self.unbounded
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageOutcome {
    pub stage: &'static str,
    pub report: PathBuf,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOutcome {
    pub stages: Vec<StageOutcome>,
    /// Set by the `certify` stage.
    pub verdict: Option<Verdict>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.passed)
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Runs the configured pipeline, writing one report per stage into
/// `config.out`.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let params = config.check()?;
    if !config.in_envelope() {
        eprintln!(
            "warning: running outside the desk-scale envelope (n = {}, p = {}, m = {}); this may take a long time",
            config.n, config.p, config.precision
        );
    }
    std::fs::create_dir_all(&config.out).map_err(|source| Error::Io {
        path: config.out.clone(),
        source,
    })?;
    stages::Pipeline::new(config, params).run()
}

/// Parses `args`, runs, and maps the result to an exit status.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::parse_from(args);
    let config = RunConfig {
        command: args.command,
        n: args.n,
        p: args.p,
        precision: args.precision,
        presentation: args.presentation,
        out: args.out,
        seed: args.seed,
        unbounded: args.unbounded,
    };
    match run(&config) {
        Ok(outcome) => {
            for s in &outcome.stages {
                let status = if s.passed { "pass" } else { "FAIL" };
                println!("{:<15} {status}  {}", s.stage, s.report.display());
            }
            if let Some(v) = &outcome.verdict {
                println!("certificate: {v}");
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
