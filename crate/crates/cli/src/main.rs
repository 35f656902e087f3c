use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use hardy_core::classifier::ClassifyInput;
use hardy_verify::config::{Suite, SuiteConfig};
use hardy_verify::dump::{self, DumpFormat};
use hardy_verify::report::{Check, SuiteReport, TOOL};
use hardy_verify::spec::OpSpec;
use hardy_verify::{plot, suites};

/// Thread count for the worker pool; results do not depend on it.
const THREADS_VAR: &str = "HARDY_THREADS";

#[derive(Parser, Debug)]
#[command(name = "hardy", version, about = "Truncated operator checks on the Hardy space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite and write its reports.
    Verify {
        suite: Suite,
        /// JSON suite configuration; missing keys take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Main matrix size of the suite.
        #[arg(long)]
        size: Option<usize>,
        /// Main pass threshold of the suite.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Classify the C*-algebra generated by a Toeplitz operator and composition operators.
    Classify {
        #[arg(long)]
        input: PathBuf,
        /// Directory for the certificate file (default: next to the input).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the leading block of an operator: T[curve], C[map], U[map] or @expr.json.
    Dump {
        #[arg(long)]
        op: String,
        #[arg(long)]
        size: usize,
        #[arg(long, value_enum, default_value_t = DumpFormat::Csv)]
        format: DumpFormat,
        /// Output file (default: dump.csv or dump.bin).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Working size as a multiple of the dumped size.
        #[arg(long, default_value_t = 4)]
        factor: usize,
    },
    /// Render a report as SVG.
    Plot {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Verdict failures exit 1; everything reaching `Err` exits 2.
enum Outcome {
    Pass,
    Fail,
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.parse().with_context(|| format!("{THREADS_VAR} must be a positive integer, got '{v}'"))?;
        if n == 0 {
            bail!("{THREADS_VAR} must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn print_report(r: &SuiteReport) {
    for c in &r.checks {
        println!("{:<4} {} | {}: {}", format!("{:?}", c.verdict).to_uppercase(), r.suite.name(), c.name, c.detail);
    }
}

fn verify(suite: Suite, config: Option<&Path>, out: Option<PathBuf>, size: Option<usize>, tol: Option<f64>) -> anyhow::Result<Outcome> {
    let mut cfg = match config {
        Some(p) => SuiteConfig::load(p)?,
        None => SuiteConfig::default(),
    };
    if let Some(o) = out {
        cfg.out = o;
    }
    if let Some(n) = size {
        cfg.set_size(n);
    }
    if let Some(t) = tol {
        cfg.set_tol(t);
    }
    let reports = if suite == Suite::All {
        cfg.check(Suite::All)?;
        // The per-suite reports carry the config without the suite filter.
        let inner = SuiteConfig { suite: None, ..cfg.clone() };
        Suite::EACH.iter().map(|&s| suites::run(s, &inner)).collect::<Result<Vec<_>, _>>()?
    } else {
        vec![suites::run(suite, &cfg)?]
    };
    let mut written = Vec::new();
    for r in &reports {
        print_report(r);
        written.extend(r.write(&cfg.out, &cfg.formats)?);
    }
    let all_pass = reports.iter().all(SuiteReport::passed);
    if suite == Suite::All {
        let summary: Vec<Check> = reports
            .iter()
            .map(|r| {
                let n = r.checks.iter().filter(|c| c.passed()).count();
                Check::new(r.suite.name(), r.passed(), format!("{n}/{} checks pass", r.checks.len()))
            })
            .collect();
        written.extend(SuiteReport::new(Suite::All, &cfg, summary).write(&cfg.out, &cfg.formats)?);
    }
    for p in &written {
        eprintln!("wrote {}", p.display());
    }
    Ok(if all_pass { Outcome::Pass } else { Outcome::Fail })
}

fn classify(input: &Path, out: Option<&Path>) -> anyhow::Result<Outcome> {
    let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let job: ClassifyInput = serde_json::from_str(&text).with_context(|| format!("parsing {}", input.display()))?;
    let result = job.run()?;
    println!("{}", result.canonical);
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| input.parent().map(Path::to_path_buf).unwrap_or_default());
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(&dir)?;
    }
    let path = dir.join(format!("{stem}.certificate.json"));
    let doc = serde_json::json!({ "tool": TOOL, "input": job, "result": result });
    std::fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(Outcome::Pass)
}

fn dump_cmd(op: &str, size: usize, format: DumpFormat, out: Option<PathBuf>, factor: usize) -> anyhow::Result<Outcome> {
    let spec: OpSpec = op.parse()?;
    let (m, prov) = dump::materialize(&spec, size, factor)?;
    let path = out.unwrap_or_else(|| PathBuf::from(match format {
        DumpFormat::Csv => "dump.csv",
        DumpFormat::Bin => "dump.bin",
    }));
    dump::write(&path, &m, &prov, format)?;
    eprintln!("wrote {}", path.display());
    Ok(Outcome::Pass)
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    init_threads()?;
    match cli.command {
        Command::Verify { suite, config, out, size, tol } => verify(suite, config.as_deref(), out, size, tol),
        Command::Classify { input, out } => classify(&input, out.as_deref()),
        Command::Dump { op, size, format, out, factor } => dump_cmd(&op, size, format, out, factor),
        Command::Plot { report, out } => {
            for p in plot::plot_file(&report, out.as_deref())? {
                eprintln!("wrote {}", p.display());
            }
            Ok(Outcome::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
