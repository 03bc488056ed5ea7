//! `sumprod`: set generation, growth tables, certified pipeline runs, lemma suites
//! and extremal search.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::Value;

use sumprod_core::exactnum::rational::parse_rational;
use sumprod_core::exactnum::Precision;
use sumprod_core::generate::{generate, Family, GeneratorSpec};
use sumprod_core::matrixlab::{FamilyParams, ParamsConfig, Perturbation};
use sumprod_core::report::{emit, growth_row, Format, Report};
use sumprod_core::search::{search, SearchConfig};
use sumprod_core::setalgebra::{profile_csv, ratio_profile, AnySet};
use sumprod_core::suite::{run_suite, SuiteConfig};
use sumprod_core::witness::{run_pipeline, verify_certificate, Certificate, PipelineOptions, SidePolicy};
use sumprod_core::Error;

#[derive(Parser)]
#[command(name = "sumprod", version, about = "Sum-product experiments over quaternions and complex matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a set and write it as set JSON.
    Gen(GenArgs),
    /// Growth table: |A|, |A+A|, |AA|, E(A) and the implied bound.
    Analyze(AnalyzeArgs),
    /// Run the certified energy pipeline and emit its certificate.
    Pipeline(PipelineArgs),
    /// Randomized checks of the contraction, recovery, multiplicity and matrix lemmas.
    VerifyLemmas(LemmaArgs),
    /// Exploratory hill-climbing over small integer 2x2 matrix sets.
    Search(SearchArgs),
    /// Re-derive a certificate from its input set and compare every field.
    VerifyCert(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Markdown,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Markdown => Format::Markdown,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Auto,
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum PerturbationArg {
    Generic,
    Commuting,
}

#[derive(Args)]
struct SetArgs {
    /// range | geometric | random-quaternion | cluster-matrix | chang | from-file
    #[arg(long, default_value = "range")]
    family: String,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Matrix dimension.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Set file; implies `--family from-file`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Ratio of the geometric family.
    #[arg(long, default_value = "2")]
    base: String,
    /// Coordinate numerator/denominator bound for random quaternions.
    #[arg(long, default_value_t = 100)]
    bound: i64,
    /// Keep random quaternions in the all-nonnegative sign class.
    #[arg(long)]
    same_hexadecant: bool,
    /// Random quaternions as scaled positive Hurwitz units.
    #[arg(long)]
    structured: bool,
    /// Cluster spread around the base matrix.
    #[arg(long, default_value = "1/1048576")]
    spread: String,
    #[arg(long, value_enum, default_value = "generic")]
    perturbation: PerturbationArg,
}

impl SetArgs {
    fn spec(&self) -> anyhow::Result<GeneratorSpec> {
        let family: Family = if self.input.is_some() { Family::FromFile } else { self.family.parse()? };
        let mut spec = GeneratorSpec::new(family, self.n);
        spec.seed = self.seed;
        spec.k = self.k;
        spec.base = parse_rational(&self.base).map_err(Error::from)?;
        spec.bound = self.bound;
        spec.same_hexadecant = self.same_hexadecant;
        spec.structured = self.structured;
        spec.spread = parse_rational(&self.spread).map_err(Error::from)?;
        spec.perturbation = match self.perturbation {
            PerturbationArg::Generic => Perturbation::Generic,
            PerturbationArg::Commuting => Perturbation::Commuting,
        };
        spec.path = self.input.clone();
        Ok(spec)
    }

    fn load(&self) -> anyhow::Result<AnySet> {
        Ok(generate(&self.spec()?)?)
    }

    fn label(&self) -> String {
        match &self.input {
            Some(p) => p.display().to_string(),
            None => format!("{} n={} seed={}", self.family, self.n, self.seed),
        }
    }
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    set: SetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    set: SetArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Also write the ratio profile CSV here.
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    set: SetArgs,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long, value_enum, default_value = "auto")]
    side: SideArg,
    /// Override the multiplicity cap K.
    #[arg(long)]
    cap: Option<String>,
    /// Condition-number bound for the matrix class partition.
    #[arg(long = "M")]
    m: Option<String>,
    /// FamilyParams JSON `{k, M, delta?, epsilon?}`; overrides `--M`.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Args)]
struct LemmaArgs {
    /// Random quadruples per randomized check.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pipeline runs for the recovery, multiplicity and chain checks.
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long, default_value_t = 400)]
    steps: usize,
    /// Entries are drawn from [-bound, bound].
    #[arg(long, default_value_t = 4)]
    bound: i64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate JSON, bare or inside a pipeline report.
    #[arg(long)]
    cert: PathBuf,
    #[command(flatten)]
    set: SetArgs,
}

/// Exit status for a failed run.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Unresolved(_)) => 3,
        Some(Error::Mismatch(_) | Error::CondBoundViolated(_) | Error::CenterSeparationViolated { .. }) => 1,
        _ => 2,
    }
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn params_from(args: &PipelineArgs) -> anyhow::Result<Option<FamilyParams>> {
    if let Some(path) = &args.params {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: ParamsConfig = serde_json::from_str(&text).map_err(|e| Error::BadSpec(format!("params: {e}")))?;
        return Ok(Some(cfg.resolve()?));
    }
    match &args.m {
        Some(m) => Ok(Some(FamilyParams::new(args.set.k, parse_rational(m).map_err(Error::from)?)?)),
        None => Ok(None),
    }
}

/// Runs a command and returns whether every assertion it makes passed.
fn run(cli: Cli) -> anyhow::Result<u8> {
    let precision = Precision::from_env()?;
    match cli.command {
        Command::Gen(a) => {
            let set = a.set.load()?;
            let text = serde_json::to_string_pretty(&set.to_json())? + "\n";
            write_output(a.out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Analyze(a) => {
            let set = a.set.load()?;
            let label = a.set.label();
            let (row, profile) = match &set {
                AnySet::Quaternion(s) => (growth_row(&label, s)?, profile_csv(&ratio_profile(s)?)?),
                AnySet::Matrix(s) => (growth_row(&label, s)?, profile_csv(&ratio_profile(s)?)?),
            };
            if let Some(p) = &a.profile {
                write_output(Some(p), &profile)?;
            }
            let report = Report { command: "analyze".into(), rows: vec![row], ..Default::default() };
            write_output(a.out.out.as_deref(), &emit(&report, a.out.format.into())?)?;
            Ok(0)
        }
        Command::Pipeline(a) => {
            let set = a.set.load()?;
            let cap = match &a.cap {
                Some(c) => Some(c.parse::<BigUint>().map_err(|_| Error::BadSpec(format!("bad cap `{c}`")))?),
                None => None,
            };
            let opts = PipelineOptions {
                side: match a.side {
                    SideArg::Auto => SidePolicy::Auto,
                    SideArg::Left => SidePolicy::Left,
                    SideArg::Right => SidePolicy::Right,
                },
                cap,
                params: params_from(&a)?,
                precision,
                ..Default::default()
            };
            let label = a.set.label();
            let (row, cert) = match &set {
                AnySet::Quaternion(s) => (growth_row(&label, s)?, run_pipeline(s, &opts)?),
                AnySet::Matrix(s) => (growth_row(&label, s)?, run_pipeline(s, &opts)?),
            };
            let status = if cert.degenerate {
                2
            } else if cert.all_checks_pass() {
                0
            } else {
                1
            };
            let report =
                Report { command: "pipeline".into(), rows: vec![row], certificate: Some(cert), ..Default::default() };
            write_output(a.out.out.as_deref(), &emit(&report, a.out.format.into())?)?;
            Ok(status)
        }
        Command::VerifyLemmas(a) => {
            let cfg = SuiteConfig {
                seed: a.seed,
                quaternion_quadruples: a.n,
                pipeline_runs: a.runs,
                matrix_quadruples: a.n,
                block_quadruples: a.n,
                delta_pairs: a.n,
                precision,
                ..Default::default()
            };
            let suite = run_suite(&cfg)?;
            let passed = suite.all_passed();
            for v in suite.verdicts.iter().filter(|v| !v.passed) {
                eprintln!("FAIL {}: {}", v.lemma, v.counterexample.as_deref().unwrap_or("no counterexample recorded"));
            }
            let report = Report { command: "verify-lemmas".into(), suite: Some(suite), ..Default::default() };
            write_output(a.out.out.as_deref(), &emit(&report, a.out.format.into())?)?;
            Ok(if passed { 0 } else { 1 })
        }
        Command::Search(a) => {
            let cfg = SearchConfig { n: a.n, seed: a.seed, restarts: a.restarts, steps: a.steps, entry_bound: a.bound };
            let result = search(&cfg)?;
            let report = Report {
                command: "search".into(),
                search: Some(result),
                notes: vec!["exploratory; no growth claim is asserted".into()],
                ..Default::default()
            };
            write_output(a.out.out.as_deref(), &emit(&report, a.out.format.into())?)?;
            Ok(0)
        }
        Command::VerifyCert(a) => {
            let text = std::fs::read_to_string(&a.cert).with_context(|| format!("reading {}", a.cert.display()))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::Io(format!("certificate: {e}")))?;
            let v = v.get("certificate").cloned().unwrap_or(v);
            let cert: Certificate = serde_json::from_value(v).map_err(|e| Error::Io(format!("certificate: {e}")))?;
            match a.set.load()? {
                AnySet::Quaternion(s) => verify_certificate(&cert, &s, &precision)?,
                AnySet::Matrix(s) => verify_certificate(&cert, &s, &precision)?,
            }
            println!("certificate verified");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(cli);
    eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_exit_codes() {
        let code = |e: Error| exit_code(&anyhow::Error::from(e));
        assert_eq!(code(Error::Unresolved("comparison".into())), 3);
        assert_eq!(code(Error::Mismatch("union_size".into())), 1);
        assert_eq!(code(Error::CondBoundViolated("A".into())), 1);
        assert_eq!(code(Error::Precondition("n".into())), 2);
        assert_eq!(code(Error::DegenerateR(1)), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("io")), 2);
    }
}
