use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cubical_omega::analysis::{
    analysis_report, census, thin_decompose, Strategy, DEFAULT_SEARCH_BUDGET,
};
use cubical_omega::cubical_core::{check_cubical_axioms, CubicalCategory, SampleConfig};
use cubical_omega::equivalence::omega_roundtrip_report;
use cubical_omega::folding::relation_suite;
use cubical_omega::nerve::{Nerve, DEFAULT_HOM_CAP};
use cubical_omega::omega_pasting::{
    build_m_with_budget, check_omega_axioms, MCategory, DEFAULT_MEMBER_BUDGET,
};
use cubical_omega::{PathProduct, Report};

#[derive(Parser)]
#[command(
    name = "cubical-omega",
    version,
    about = "Build and audit pasting ω-categories and their cubical nerves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Product of paths, e.g. "1x1" or "2x1"; the empty string is the point.
    #[arg(long)]
    shape: Option<String>,
    /// Truncation of the nerve; defaults to the arity plus one, at most 3.
    #[arg(long)]
    kmax: Option<usize>,
    /// Cap on enumerated nerve elements per grade.
    #[arg(long, default_value_t = DEFAULT_HOM_CAP)]
    cap: usize,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Member budget for builds and node budget for witness search.
    #[arg(long, env = "CUBICAL_OMEGA_BUDGET")]
    budget: Option<usize>,
    /// Where to write the machine-readable output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Omega,
    Cubical,
    Relations,
}

#[derive(Subcommand)]
enum Command {
    /// Build M(K) and print its member and cell counts.
    Build(Common),
    /// Run an axiom or relation suite.
    Check {
        #[arg(value_enum)]
        kind: Kind,
        /// A document written by `build`, instead of --shape.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare M(K) with the globular category of its cubical nerve.
    Roundtrip(Common),
    /// Census of thin elements and commutative shells in the nerve.
    Analyze {
        /// Restrict to one grade and list witnesses.
        #[arg(long)]
        grade: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Face structure of M(K) in DOT.
    ExportDot {
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Usage(String),
    Internal(String),
}

type Outcome = Result<bool, Failure>;

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

macro_rules! emitln {
    ($($arg:tt)*) => {
        emit(&format!("{}\n", format_args!($($arg)*)))
    };
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

impl Common {
    fn shape(&self) -> Result<PathProduct, Failure> {
        let s = self
            .shape
            .as_deref()
            .ok_or_else(|| Failure::Usage("--shape is required".into()))?;
        s.parse()
            .map_err(|e| Failure::Usage(format!("bad shape {s:?}: {e}")))
    }

    fn kmax(&self, shape: &PathProduct) -> usize {
        self.kmax.unwrap_or((shape.arity() + 1).min(3))
    }

    fn sampling(&self) -> SampleConfig {
        SampleConfig::with_seed(self.seed)
    }

    fn build(&self) -> Result<MCategory, Failure> {
        build_m_with_budget(&self.shape()?, self.budget.unwrap_or(DEFAULT_MEMBER_BUDGET))
            .map_err(internal)
    }

    fn nerve(&self) -> Result<Nerve, Failure> {
        let m = self.build()?;
        let k = self.kmax(m.shape());
        Nerve::with_cap(Arc::new(m.table().clone()), k, self.cap).map_err(internal)
    }

    fn write(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(p) => fs::write(p, text)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
            None => Ok(()),
        }
    }
}

fn load(path: &Path) -> Result<MCategory, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    MCategory::from_json(&text).map_err(internal)
}

fn source(input: &Option<PathBuf>, common: &Common) -> Result<MCategory, Failure> {
    match input {
        Some(p) => load(p),
        None => common.build(),
    }
}

fn finish(report: Report, common: &Common) -> Outcome {
    emit(&report.to_string());
    common.write(&report.to_json())?;
    Ok(report.passed())
}

fn build(common: &Common) -> Outcome {
    let m = common.build()?;
    emitln!(
        "M({}): {} members, {} cells",
        m.shape(),
        m.len(),
        m.shape().cells().len()
    );
    let text = match common.format {
        Format::Json => m.to_json(),
        Format::Dot => m.to_dot(),
    };
    common.write(&text)?;
    Ok(true)
}

fn check(kind: Kind, input: &Option<PathBuf>, common: &Common) -> Outcome {
    match kind {
        Kind::Omega => {
            let m = source(input, common)?;
            let mut r = check_omega_axioms(m.table());
            r.extend(m.check_sets());
            finish(r, common)
        }
        Kind::Cubical => finish(
            check_cubical_axioms(&common.nerve()?, &common.sampling()),
            common,
        ),
        Kind::Relations => finish(relation_suite(&common.nerve()?, &common.sampling()), common),
    }
}

fn roundtrip(common: &Common) -> Outcome {
    let shape = common.shape()?;
    let r = omega_roundtrip_report(&shape, common.kmax(&shape), &common.sampling())
        .map_err(internal)?;
    finish(r, common)
}

fn analyze(grade: Option<usize>, common: &Common) -> Outcome {
    let g = common.nerve()?;
    let grades: Vec<usize> = match grade {
        Some(n) if n > g.kmax() => {
            return Err(Failure::Usage(format!(
                "grade {n} exceeds kmax {}",
                g.kmax()
            )))
        }
        Some(n) => vec![n],
        None => (0..=g.kmax()).collect(),
    };
    let mut counts = Vec::new();
    for &n in &grades {
        let c = census(&g, n).map_err(internal)?;
        emitln!(
            "grade {}: {} elements, {} thin, {} commutative boundaries",
            c.grade,
            c.elements,
            c.thin,
            c.commutative_boundaries
        );
        counts.push(c);
    }
    let budget = common.budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
    let max = grades.iter().copied().max().unwrap_or(0);
    let report = analysis_report(&g, max, grade.map(|_| budget));
    let mut witnesses = Vec::new();
    if let Some(n) = grade {
        for x in g.elements(n) {
            if let Ok(w) = thin_decompose(&g, x, Strategy::Constructive) {
                witnesses.push(json!({ "element": g.label(x), "witness": w.to_json(&g) }));
            }
        }
    }
    emit(&report.to_string());
    let doc = json!({ "census": counts, "witnesses": witnesses, "report": report });
    common.write(&serde_json::to_string_pretty(&doc).expect("document serializes"))?;
    Ok(report.passed())
}

fn export_dot(input: &Option<PathBuf>, common: &Common) -> Outcome {
    let dot = source(input, common)?.to_dot();
    match &common.out {
        Some(_) => common.write(&dot)?,
        None => emit(&dot),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Build(c) => build(c),
        Command::Check {
            kind,
            input,
            common,
        } => check(*kind, input, common),
        Command::Roundtrip(c) => roundtrip(c),
        Command::Analyze { grade, common } => analyze(*grade, common),
        Command::ExportDot { input, common } => export_dot(input, common),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
