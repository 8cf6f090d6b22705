//! `oddu`: runs verification campaigns from a TOML config and writes a JSON report.
//!
//! Exit status is 0 when every check passes, 1 when some check fails and 2
//! when the config is invalid or a resource cap is hit.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Parser, Subcommand};
use odd_unitary::harness::{parse_config_file, run_campaigns, CampaignReport, HarnessOptions, RunReport, CAMPAIGNS};

#[derive(Parser, Debug)]
struct Common {
    /// Experiment config (TOML)
    #[arg(long, short)]
    config: PathBuf,
    /// Where to write the JSON report
    #[arg(long, short, default_value = "oddu-report.json")]
    output: PathBuf,
    /// Override the seed in the config
    #[arg(long)]
    seed: Option<u64>,
    /// Override the group closure cap (default: config, then ODDU_CAP, then 4000000)
    #[arg(long)]
    cap: Option<usize>,
    /// Leave out the timestamp and timings so reports are byte-stable
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Parser, Debug)]
#[command(name = "oddu", version, about = "Verification campaigns for odd unitary groups over finite rings")]
struct Invocation {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Quadratic structure, ring and algebra axioms, and the Heisenberg ring image
    CheckAxioms(Common),
    /// Adjoint, NQ, LT and T identities, the Lambda lemma and Chevalley containments
    Relations(Common),
    /// The Lambda subgroups of the hyperbolic carriers
    Lambda(Common),
    /// Constructed levels: floor, ceiling, envelope, scaling and the group round trip
    Level(Common),
    /// EU(P), U(P), perfection and boundary generation per level
    Groups(Common),
    /// Sandwich inclusions, exhaustive at l <= 3 and sampled at l >= 4
    Sandwich(Common),
    /// Classical group identification and the odd orthogonal case
    Classical(Common),
    /// Every campaign listed under `campaigns` in the config
    All(Common),
}

impl Sub {
    fn split(self) -> (Option<&'static str>, Common) {
        match self {
            Sub::CheckAxioms(c) => (Some("check-axioms"), c),
            Sub::Relations(c) => (Some("relations"), c),
            Sub::Lambda(c) => (Some("lambda"), c),
            Sub::Level(c) => (Some("level"), c),
            Sub::Groups(c) => (Some("groups"), c),
            Sub::Sandwich(c) => (Some("sandwich"), c),
            Sub::Classical(c) => (Some("classical"), c),
            Sub::All(c) => (None, c),
        }
    }
}

fn summary(report: &RunReport) -> String {
    let mut out = String::new();
    for c in &report.campaigns {
        summarize_campaign(&mut out, c);
    }
    out.push_str(&format!("overall: {}\n", report.status));
    out
}

fn summarize_campaign(out: &mut String, c: &CampaignReport) {
    let total: usize = c.sections.iter().map(|s| s.checks.len()).sum();
    let failed = c.failures().count();
    out.push_str(&format!("{}: {} ({} checks, {} failed)\n", c.campaign, c.status, total, failed));
    for s in &c.sections {
        let time = s.timing_ms.map(|t| format!(" [{t} ms]")).unwrap_or_default();
        out.push_str(&format!("  {:<4} {}{}\n", s.status, s.title, time));
        for ch in s.checks.iter().filter(|ch| ch.status != "pass") {
            out.push_str(&format!("       FAIL {}", ch.name));
            if let Some(w) = &ch.witness {
                let w: String = w.chars().take(160).collect();
                out.push_str(&format!(": {w}"));
            }
            out.push('\n');
        }
    }
    for o in &c.orders {
        out.push_str(&format!("  order {} = {}\n", o.name, o.order));
    }
}

fn run(inv: Invocation) -> anyhow::Result<bool> {
    let (which, common) = inv.command.split();
    let mut cfg = parse_config_file(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(cap) = common.cap {
        cfg.cap = Some(cap);
    } else if cfg.cap.is_none() {
        if let Ok(v) = std::env::var("ODDU_CAP") {
            let cap: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("ODDU_CAP: not a positive integer: '{v}'"))?;
            cfg.cap = Some(cap);
        }
    }
    let prep = cfg.prepare()?;
    let names: Vec<String> = match which {
        Some(n) => vec![n.to_string()],
        None => prep.config.campaigns.clone(),
    };
    debug_assert!(names.iter().all(|n| CAMPAIGNS.contains(&n.as_str())));
    let opts = HarnessOptions { timings: !common.no_timestamp };
    let reports = run_campaigns(&prep, &names, &opts)?;
    let timestamp = (!common.no_timestamp).then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    let report = RunReport::new(&prep.config, reports, timestamp);
    std::fs::write(&common.output, report.to_json() + "\n")
        .with_context(|| format!("writing report to {}", common.output.display()))?;
    print!("{}", summary(&report));
    println!("report written to {}", common.output.display());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let inv = match Invocation::try_parse() {
        Ok(inv) => inv,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(inv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        // Config, I/O and resource errors.
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
