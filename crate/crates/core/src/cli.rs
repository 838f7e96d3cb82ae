use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::algebra::{AlgebraKind, AlgebraSpec};
use crate::error::{Error, Result};
use crate::io::{self, MapFile};
use crate::maps::{sweep_bilinear, sweep_linear, Check};
use crate::scalar::display_scalar;
use crate::solver::{classify, ClassificationReport, ClassifyConfig, CoreMap, Problem, ResidualCheck};

const FAILURE_LIMIT: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "wbider", version, about = "Exact classification of biderivations and related maps on Virasoro-type algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify maps of the given kind on a degree window.
    Classify(RunConfig),
    /// Check a map file against a defining identity.
    VerifyMap(RunConfig),
    /// Compute the center on a window.
    Center(RunConfig),
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// vir, witt, w22 or w22-centerless
    #[arg(long)]
    pub algebra: Option<String>,

    /// biderivation, derivation, commuting, symmetric-biderivation,
    /// verify-map or center
    #[arg(long)]
    pub problem: Option<String>,

    /// Window radius N.
    #[arg(long, default_value_t = 5)]
    pub window: u32,

    /// Value radius M; defaults to 2N.
    #[arg(long)]
    pub value_radius: Option<u32>,

    /// Core radius K.
    #[arg(long, default_value_t = 2)]
    pub core: u32,

    /// Map file (verify-map).
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Print a human-readable summary.
    #[arg(long)]
    pub summary: bool,

    /// Identity for verify-map: derivation, commuting, biderivation,
    /// symmetric-biderivation or post-lie.
    #[arg(long)]
    pub check: Option<String>,

    /// Eliminate independent blocks in parallel.
    #[arg(long)]
    pub parallel: bool,

    /// Skip the comparison run on window N-1.
    #[arg(long)]
    pub no_stability: bool,

    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

/// Exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Usage,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> ExitCode {
        match s {
            Status::Pass => ExitCode::SUCCESS,
            Status::Fail => ExitCode::from(2),
            Status::Usage => ExitCode::from(1),
        }
    }
}

fn diagnose(stage: &str, e: &Error) -> Status {
    eprintln!("wbider: {stage}: {e}");
    match e {
        Error::NotInClassifiedFamily { .. } => Status::Fail,
        _ => Status::Usage,
    }
}

fn algebra_of(cfg: &RunConfig) -> Result<Option<AlgebraSpec>> {
    cfg.algebra
        .as_deref()
        .map(|a| AlgebraKind::from_name(a).map(AlgebraSpec::from))
        .transpose()
}

fn emit(cfg: &RunConfig, json: &str, summary: &str) -> Result<()> {
    match &cfg.output {
        Some(path) => fs::write(path, json)?,
        None if !cfg.summary => print!("{json}"),
        None => {}
    }
    if cfg.summary {
        print!("{summary}");
    }
    Ok(())
}

pub fn run(cli: Cli) -> Status {
    match cli.command {
        Command::Classify(cfg) => match cfg.problem.as_deref() {
            Some("verify-map") => cmd_verify_map(&cfg),
            Some("center") => cmd_center(&cfg),
            _ => cmd_classify(&cfg),
        },
        Command::VerifyMap(cfg) => cmd_verify_map(&cfg),
        Command::Center(cfg) => cmd_center(&cfg),
    }
}

pub fn cmd_classify(cfg: &RunConfig) -> Status {
    let parsed = (|| -> Result<ClassifyConfig> {
        let algebra = algebra_of(cfg)?.ok_or_else(|| Error::Parse("--algebra is required".into()))?;
        let problem = Problem::from_name(cfg.problem.as_deref().unwrap_or("biderivation"))?;
        Ok(ClassifyConfig {
            problem,
            algebra,
            window: cfg.window,
            value_radius: cfg.value_radius.unwrap_or(2 * cfg.window),
            core: cfg.core,
            parallel: cfg.parallel,
            stability: !cfg.no_stability,
        })
    })();
    let config = match parsed {
        Ok(c) => c,
        Err(e) => return diagnose("configuration", &e),
    };
    let report = match classify(&config) {
        Ok(r) => r,
        Err(e) => return diagnose("classification", &e),
    };
    if cfg.verbose > 0 {
        for (stage, ms) in &report.timings_ms {
            eprintln!("{stage}: {ms} ms");
        }
    }
    if let Err(e) = emit(cfg, &io::report_to_string(&report), &classification_summary(&report)) {
        return diagnose("output", &e);
    }
    match report.residual_check {
        ResidualCheck::Pass => Status::Pass,
        ResidualCheck::Fail { .. } => {
            eprintln!("wbider: residual check: core basis fails its defining identity");
            Status::Fail
        }
    }
}

pub fn classification_summary(r: &ClassificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} {} on N={} M={} K={}",
        r.algebra.kind.name(),
        r.problem,
        r.window,
        r.value_radius,
        r.core
    );
    let _ = writeln!(s, "raw dimension {}, core dimension {}", r.raw_dimension, r.core_dimension);
    if let Some(q) = r.quotient_dimension {
        let _ = writeln!(s, "quotient dimension {q}");
    }
    if let Some(st) = &r.stability {
        let dim = st.dimension.map_or("failed".to_string(), |d| d.to_string());
        let _ = writeln!(
            s,
            "window {}: {dim} ({})",
            st.window,
            if st.stable { "stable" } else { "not stable" }
        );
    }
    for (i, m) in r.core_basis.iter().enumerate() {
        let _ = write!(s, "basis {}", i + 1);
        if let Some((l, mu)) = r.parameters.get(i) {
            let _ = write!(s, ": lambda = {}, mu = {}", display_scalar(l), display_scalar(mu));
        }
        s.push('\n');
        let lines: Vec<String> = match m {
            CoreMap::Linear(phi) => phi
                .values()
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(x, v)| format!("  phi({x}) = {v}"))
                .collect(),
            CoreMap::Bilinear(f) => f
                .values()
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|((x, y), v)| format!("  f({x}, {y}) = {v}"))
                .collect(),
        };
        for l in lines.iter().take(6) {
            let _ = writeln!(s, "{l}");
        }
        if lines.len() > 6 {
            let _ = writeln!(s, "  ... {} more nonzero values", lines.len() - 6);
        }
    }
    let _ = writeln!(
        s,
        "residual check: {}",
        match &r.residual_check {
            ResidualCheck::Pass => "pass".to_string(),
            ResidualCheck::Fail { basis_index, failure } => format!(
                "fail for basis {} at {:?}: {}",
                basis_index + 1,
                failure.args,
                failure.residual
            ),
        }
    );
    s
}

pub fn cmd_verify_map(cfg: &RunConfig) -> Status {
    let loaded = (|| -> Result<MapFile> {
        let path = cfg
            .input
            .as_ref()
            .ok_or_else(|| Error::Parse("--input is required".into()))?;
        let map = io::map_file_from_str(&fs::read_to_string(path)?)?;
        if let Some(a) = algebra_of(cfg)? {
            if a.kind != map.algebra().kind {
                return Err(Error::Parse(format!(
                    "map file is for {}, not {}",
                    map.algebra().kind.name(),
                    a.kind.name()
                )));
            }
        }
        Ok(map)
    })();
    let map = match loaded {
        Ok(m) => m,
        Err(e) => return diagnose("input", &e),
    };
    let check = match &cfg.check {
        Some(name) => match Check::from_name(name) {
            Ok(c) => c,
            Err(e) => return diagnose("configuration", &e),
        },
        None => match map {
            MapFile::Linear(_) => Check::Derivation,
            MapFile::Bilinear(_) => Check::Biderivation,
        },
    };
    let sweep = match (&map, check.is_bilinear()) {
        (MapFile::Linear(phi), false) => sweep_linear(phi, check),
        (MapFile::Bilinear(f), true) => sweep_bilinear(f, check),
        _ => Err(Error::Parse(format!("check {} does not apply to this map kind", check.name()))),
    };
    let sweep = match sweep {
        Ok(s) => s,
        Err(e) => return diagnose("verification", &e),
    };
    let json = io::sweep_report_to_json(&map, check.name(), &sweep, FAILURE_LIMIT);
    let mut text = serde_json::to_string_pretty(&json).expect("report serializes");
    text.push('\n');
    let mut summary = format!(
        "{} check on {} window {}: {} tuples checked, {} skipped, {} failures\n",
        check.name(),
        map.algebra().kind.name(),
        map.radius(),
        sweep.checked,
        sweep.skipped,
        sweep.failures.len()
    );
    for f in sweep.failures.iter().take(FAILURE_LIMIT) {
        let args: Vec<String> = f.args.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(summary, "  {} at ({}): {}", f.identity, args.join(", "), f.residual);
    }
    if let Err(e) = emit(cfg, &text, &summary) {
        return diagnose("output", &e);
    }
    if sweep.passed() {
        Status::Pass
    } else {
        Status::Fail
    }
}

pub fn cmd_center(cfg: &RunConfig) -> Status {
    let computed = (|| -> Result<(AlgebraSpec, Vec<crate::Element>)> {
        let algebra = algebra_of(cfg)?.ok_or_else(|| Error::Parse("--algebra is required".into()))?;
        if cfg.core > cfg.window {
            return Err(Error::InvalidCore {
                core: cfg.core,
                window: cfg.window,
            });
        }
        let basis = algebra.center_basis(cfg.window)?;
        Ok((algebra, crate::algebra::project_to_core(&basis, cfg.core)))
    })();
    let (algebra, basis) = match computed {
        Ok(x) => x,
        Err(e) => return diagnose("center", &e),
    };
    let json = io::center_report_to_json(algebra, cfg.window, cfg.core, &basis);
    let mut text = serde_json::to_string_pretty(&json).expect("report serializes");
    text.push('\n');
    let items: Vec<String> = basis.iter().map(|e| e.to_string()).collect();
    let summary = format!(
        "center of {} on window {}: {{{}}}\n",
        algebra.kind.name(),
        cfg.window,
        items.join(", ")
    );
    match emit(cfg, &text, &summary) {
        Ok(()) => Status::Pass,
        Err(e) => diagnose("output", &e),
    }
}
