//! `towgame`: solve, simulate, and validate discounted tug-of-war games.
//!
//! Every subcommand takes either `--config <path.json>` or a built-in
//! `--scenario <name>`, writes CSV data and a `manifest.json` into `--out`,
//! prints one line per in-run assertion, and exits nonzero (after writing
//! `failure_report.json`) if any assertion fails.

use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use towgame_core::experiments::{
    builtin_scenario, run, scenario_names, Assertion, ExperimentConfig, ExperimentKind,
};

#[derive(Parser)]
#[command(
    name = "towgame",
    about = "Discounted tug-of-war games: fixed-point solves, game simulation, convergence and regularity experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the dynamic programming principle on the configured grid(s).
    Solve(RunArgs),
    /// Monte Carlo estimates of the game value with greedy strategies.
    Simulate(RunArgs),
    /// ε-sweep of solves compared against the analytic/ODE reference.
    Converge(RunArgs),
    /// Game value vs solver value at sampled points.
    Compare(RunArgs),
    /// Interior Lipschitz-quotient survey across the ε sweep.
    Regularity(RunArgs),
    /// Boundary modulus: value gaps near the boundary vs distance.
    Boundary(RunArgs),
    /// Exit-time scaling of the confined pull process on an annulus.
    #[command(name = "stopping-time")]
    StoppingTime(RunArgs),
    /// Operator expansion checks for the registered smooth test functions.
    Expansion(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to an experiment config (JSON).
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Name of a built-in scenario (see `--scenario help`).
    #[arg(long)]
    scenario: Option<String>,
    /// Output directory for CSV data and manifest.json.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread count (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::Solve(_) => ExperimentKind::Solve,
            Command::Simulate(_) => ExperimentKind::Simulate,
            Command::Converge(_) => ExperimentKind::Converge,
            Command::Compare(_) => ExperimentKind::Compare,
            Command::Regularity(_) => ExperimentKind::Regularity,
            Command::Boundary(_) => ExperimentKind::Boundary,
            Command::StoppingTime(_) => ExperimentKind::StoppingTime,
            Command::Expansion(_) => ExperimentKind::Expansion,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Solve(a)
            | Command::Simulate(a)
            | Command::Converge(a)
            | Command::Compare(a)
            | Command::Regularity(a)
            | Command::Boundary(a)
            | Command::StoppingTime(a)
            | Command::Expansion(a) => a,
        }
    }
}

fn load_config(kind: ExperimentKind, args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match (&args.config, &args.scenario) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str::<ExperimentConfig>(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
        }
        (None, Some(name)) => {
            if name == "help" {
                bail!("built-in scenarios: {}", scenario_names().join(", "));
            }
            builtin_scenario(name).with_context(|| {
                format!(
                    "unknown scenario '{name}' (built-ins: {})",
                    scenario_names().join(", ")
                )
            })?
        }
        _ => bail!("exactly one of --config or --scenario is required"),
    };
    if cfg.kind != kind {
        bail!(
            "config is a '{}' experiment but the subcommand is '{}'",
            cfg.kind.as_str(),
            kind.as_str()
        );
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() {
    let cli = Cli::parse();
    let kind = cli.command.kind();
    let args = cli.command.args();

    if let Some(threads) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("warning: thread pool already initialized: {e}");
        }
    }

    let cfg = match load_config(kind, args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    };

    let outcome = match run(&cfg, &args.out) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    };

    for Assertion {
        name,
        passed,
        detail,
    } in &outcome.assertions
    {
        let tag = if *passed { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {detail}");
    }
    println!(
        "{}: {} assertions, config {}, seed {}",
        kind.as_str(),
        outcome.assertions.len(),
        outcome.config_hash,
        outcome.seed
    );

    if !outcome.all_passed() {
        let failed: Vec<&Assertion> = outcome.assertions.iter().filter(|a| !a.passed).collect();
        let report_path = args.out.join("failure_report.json");
        if let Ok(mut f) = std::fs::File::create(&report_path) {
            let _ = serde_json::to_writer_pretty(&mut f, &failed);
            let _ = f.write_all(b"\n");
        }
        eprintln!(
            "{} assertion(s) failed; see {}",
            failed.len(),
            report_path.display()
        );
        std::process::exit(1);
    }
}
