use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qshape_core::complexes::Window;
use qshape_core::field::FieldSpec;
use qshape_core::harness::{self, Problem, Report};

#[derive(Parser)]
#[command(name = "qshape", version, about = "Exact checks for Q-shaped dg categories of complete resolutions")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Run the suites listed in the problem.
    Check(Common),
    /// Complete resolutions of every stalk.
    Resolve(Common),
    /// Cohomology and products of each endomorphism complex.
    Endring(Common),
    /// Stable Hom oracle table.
    Homtable(Common),
    /// List the bundled problems.
    List,
}

#[derive(Args)]
struct Common {
    /// Path to a problem file, or the name of a bundled problem.
    problem: String,
    /// Field override: a prime such as 32003 or F_3, or "rationals".
    #[arg(long)]
    field: Option<FieldSpec>,
    /// Window override as "lo,hi".
    #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
    window: Option<Window>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Restrict `check` to these suites (comma separated).
    #[arg(long, value_delimiter = ',')]
    suites: Option<Vec<String>>,
}

fn parse_window(s: &str) -> Result<Window, String> {
    let (lo, hi) = s
        .trim_matches(|c| c == '[' || c == ']')
        .split_once(',')
        .ok_or_else(|| format!("expected lo,hi, got {s:?}"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("lo: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("hi: {e}"))?;
    if lo > hi {
        return Err(format!("empty window [{lo}, {hi}]"));
    }
    Ok(Window { lo, hi })
}

fn load(c: &Common) -> Result<Problem> {
    let path = Path::new(&c.problem);
    let mut p = if path.exists() {
        harness::load_problem(path).with_context(|| format!("loading {}", path.display()))?
    } else if let Some(p) = harness::fixture(&c.problem) {
        p
    } else {
        bail!("{} is neither a file nor a bundled problem", c.problem);
    };
    if let Some(f) = c.field {
        p.field = f;
    }
    if let Some(w) = c.window {
        p.window = w;
    }
    if let Some(s) = c.seed {
        p.seed = s;
    }
    if let Some(s) = &c.suites {
        p.suites = s.clone();
    }
    harness::validate_problem(&p)?;
    Ok(p)
}

fn summarize(r: &Report) {
    for s in &r.suites {
        let failed = s.checks.iter().filter(|c| !c.passed).count();
        eprintln!(
            "{:<14} {} ({} checks, {} failed)",
            s.name,
            if s.passed { "pass" } else { "FAIL" },
            s.checks.len(),
            failed
        );
    }
    for c in r.failed_checks() {
        let l = &c.location;
        eprintln!(
            "  {}/{} pair={:?} degree={:?} block={:?}: {}",
            l.suite, c.name, l.pair, l.degree, l.block, c.detail
        );
    }
}

fn run(verb: Verb) -> Result<bool> {
    let (c, f): (Common, fn(&Problem) -> Result<Report, _>) = match verb {
        Verb::List => {
            for (name, _) in harness::FIXTURES {
                let p = harness::fixture(name).expect("bundled");
                println!("{name:<18} {} {} [{}]", p.field, p.window, p.suites.join(", "));
            }
            return Ok(true);
        }
        Verb::Check(c) => (c, harness::run_problem),
        Verb::Resolve(c) => (c, harness::resolve),
        Verb::Endring(c) => (c, harness::endring),
        Verb::Homtable(c) => (c, harness::homtable),
    };
    let p = load(&c)?;
    let report = f(&p)?;
    summarize(&report);
    match &c.out {
        Some(path) => harness::emit_report(&report, path)?,
        None => print!("{}", harness::report_to_json(&report)),
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.verb) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
