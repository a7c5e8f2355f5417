//! `decaylab`: runs the experiments and writes CSV or JSON tables.

mod commands;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use decaylab::decay::DistributionSpec;
use decaylab::verify::Tolerances;

use crate::output::{emit, Format};

#[derive(Debug, Parser)]
#[command(name = "decaylab", version, about = "Decay, restriction and Gevrey-growth experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Exact derivative coefficient tables a_{jk}, b_{jk}.
    BesselTable,
    /// Closed form against quadrature for the sphere's Fourier transform.
    SphereFt,
    /// Convergence of the L^q norm of the sphere's Fourier transform.
    LqScan,
    /// Gevrey fit of the L^q norms of derivatives.
    GevreyFit,
    /// Dyadic operator norms and annulus integrals.
    DyadicNorms,
    /// Restriction ratios on Knapp examples.
    RestrictionScan,
    /// Atoms and masses of a Cantor-type measure.
    SalemBuild,
    /// Fourier decay exponent of a Cantor-type measure.
    SalemDecay,
    /// Directional decay scan of a distribution.
    DecayProbe,
    /// FBI transform of the constant function.
    FbiCheck,
    /// All acceptance checks.
    VerifyAll,
}

/// Options shared by the subcommands; each subcommand accepts a subset.
#[derive(Debug, Clone, Default, clap::Args)]
struct Opts {
    #[arg(long, global = true)]
    d: Option<usize>,
    /// One or more exponents, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Multi-index as a comma list.
    #[arg(long, global = true, value_delimiter = ',')]
    alpha: Option<Vec<u32>>,
    #[arg(long, global = true)]
    kmax: Option<usize>,
    #[arg(long, global = true)]
    depth: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file, or a directory that receives `<subcommand>.<ext>`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, conflicts_with = "full")]
    quick: bool,
    #[arg(long, global = true)]
    full: bool,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cantor measure: middle-thirds, uniform or random.
    #[arg(long, global = true)]
    measure: Option<String>,
    /// Distribution exemplar: x1, one, gaussian or delta-derivative.
    #[arg(long, global = true)]
    distribution: Option<String>,
    /// Full cone aperture in degrees.
    #[arg(long, global = true)]
    aperture: Option<f64>,
    /// JSON file with parameters; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Record wall time in the manifest (makes output time dependent).
    #[arg(long, global = true)]
    timing: bool,
}

/// Parameters read from `--config`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub d: Option<usize>,
    pub q: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub alpha: Option<Vec<u32>>,
    pub kmax: Option<usize>,
    pub depth: Option<u32>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub tier: Option<decaylab::verify::Tier>,
    pub measure: Option<String>,
    pub distribution: Option<String>,
    /// A full distribution description, used by `decay-probe`.
    pub distribution_spec: Option<DistributionSpec>,
    pub aperture: Option<f64>,
    pub tolerances: Option<Tolerances>,
}

/// Effective configuration after merging flags over the config file.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: &'static str,
    pub d: Option<usize>,
    pub q: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub alpha: Option<Vec<u32>>,
    pub kmax: Option<usize>,
    pub depth: Option<u32>,
    pub seed: u64,
    pub format: Format,
    pub tier: decaylab::verify::Tier,
    pub measure: Option<String>,
    pub distribution: Option<String>,
    pub distribution_spec: Option<DistributionSpec>,
    pub aperture: Option<f64>,
    pub tolerances: Tolerances,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::BesselTable => "bessel-table",
            Command::SphereFt => "sphere-ft",
            Command::LqScan => "lq-scan",
            Command::GevreyFit => "gevrey-fit",
            Command::DyadicNorms => "dyadic-norms",
            Command::RestrictionScan => "restriction-scan",
            Command::SalemBuild => "salem-build",
            Command::SalemDecay => "salem-decay",
            Command::DecayProbe => "decay-probe",
            Command::FbiCheck => "fbi-check",
            Command::VerifyAll => "verify-all",
        }
    }

    /// Parameters the subcommand reads; anything else is a usage error.
    fn accepts(self) -> &'static [&'static str] {
        match self {
            Command::BesselTable => &["kmax"],
            Command::SphereFt => &["d", "seed"],
            Command::LqScan => &["d", "q"],
            Command::GevreyFit => &["d", "q", "kmax"],
            Command::DyadicNorms => &["d", "alpha", "kmax"],
            Command::RestrictionScan => &["p", "depth"],
            Command::SalemBuild => &["measure", "depth", "seed"],
            Command::SalemDecay => &["measure", "depth", "seed", "kmax"],
            Command::DecayProbe => &["distribution", "distribution_spec", "q", "aperture"],
            Command::FbiCheck => &["d", "seed"],
            Command::VerifyAll => &["seed", "tier", "tolerances"],
        }
    }
}

fn supplied(opts: &Opts, file: &ConfigFile) -> Vec<&'static str> {
    let mut out = Vec::new();
    let mut note = |name: &'static str, present: bool| {
        if present {
            out.push(name);
        }
    };
    note("d", opts.d.is_some() || file.d.is_some());
    note("q", opts.q.is_some() || file.q.is_some());
    note("p", opts.p.is_some() || file.p.is_some());
    note("alpha", opts.alpha.is_some() || file.alpha.is_some());
    note("kmax", opts.kmax.is_some() || file.kmax.is_some());
    note("depth", opts.depth.is_some() || file.depth.is_some());
    note("measure", opts.measure.is_some() || file.measure.is_some());
    note("distribution", opts.distribution.is_some() || file.distribution.is_some());
    note("distribution_spec", file.distribution_spec.is_some());
    note("aperture", opts.aperture.is_some() || file.aperture.is_some());
    note("tier", opts.quick || opts.full || file.tier.is_some());
    note("tolerances", file.tolerances.is_some());
    out
}

fn read_config(path: &Path) -> Result<ConfigFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn merge(command: Command, opts: Opts, file: ConfigFile) -> Result<ExperimentConfig, String> {
    let unused: Vec<&str> = supplied(&opts, &file)
        .into_iter()
        .filter(|name| !command.accepts().contains(name))
        .collect();
    if !unused.is_empty() {
        return Err(format!(
            "{} does not take: {} (accepted: {})",
            command.name(),
            unused.join(", "),
            command.accepts().join(", ")
        ));
    }
    let format = opts
        .format
        .or(file.format)
        .or_else(|| match opts.out.as_ref().and_then(|p| p.extension()) {
            Some(ext) if ext == "json" => Some(Format::Json),
            _ => None,
        })
        .unwrap_or(Format::Csv);
    let tier = if opts.full {
        decaylab::verify::Tier::Full
    } else if opts.quick {
        decaylab::verify::Tier::Quick
    } else {
        file.tier.unwrap_or(decaylab::verify::Tier::Quick)
    };
    Ok(ExperimentConfig {
        command: command.name(),
        d: opts.d.or(file.d),
        q: opts.q.or(file.q),
        p: opts.p.or(file.p),
        alpha: opts.alpha.or(file.alpha),
        kmax: opts.kmax.or(file.kmax),
        depth: opts.depth.or(file.depth),
        seed: opts.seed.or(file.seed).unwrap_or(0),
        format,
        tier,
        measure: opts.measure.or(file.measure),
        distribution: opts.distribution.or(file.distribution),
        distribution_spec: file.distribution_spec,
        aperture: opts.aperture.or(file.aperture),
        tolerances: file.tolerances.unwrap_or_default(),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    if let Some(n) = cli.opts.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let file = match cli.opts.config.as_deref().map(read_config).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
    };
    let out = cli.opts.out.clone();
    let timing = cli.opts.timing;
    let config = match merge(cli.command, cli.opts, file) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(1);
        }
    };
    let mut report = match commands::run(&config) {
        Ok(r) => r,
        Err(commands::Failure::Usage(e)) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(1);
        }
        Err(commands::Failure::Compute(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if timing {
        report.manifest.wall_time_secs = Some(start.elapsed().as_secs_f64());
    }
    if let Err(e) = emit(&report, out.as_deref()) {
        eprintln!("output error: {e}");
        return ExitCode::from(1);
    }
    if report.manifest.passed {
        ExitCode::SUCCESS
    } else {
        for c in report.manifest.checks.iter().filter(|c| !c.passed) {
            eprintln!("FAILED {}: {}", c.name, c.detail);
        }
        ExitCode::from(2)
    }
}
