use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use relkit::harness::{self, GeneratorConfig, RelationClass};
use relkit::{LinearRelation, Tolerances};

const USAGE_ERROR: u8 = 2;
const CHECK_FAILURE: u8 = 1;

#[derive(Parser)]
#[command(name = "relkit", version, about = "Linear relation perturbation checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the seeded conformance suite and write a JSON report.
    Run(RunArgs),
    /// Run a named worked example.
    Demo {
        /// One of: remark-3-1, arens, lemma-3-1, block-tail.
        name: String,
        /// Print the example's data as JSON after the text.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Compare two relations stored as JSON and print the report.
    Verify {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
}

#[derive(Args)]
struct TolArgs {
    /// Equality tolerance; overrides RELKIT_TOL_EQ.
    #[arg(long)]
    tol_eq: Option<f64>,
    /// Relative rank cutoff.
    #[arg(long)]
    tol_rank: Option<f64>,
}

impl TolArgs {
    fn resolve(&self) -> relkit::Result<Tolerances> {
        let mut tol = Tolerances::from_env()?;
        if let Some(eq) = self.tol_eq {
            tol = tol.with_eps_eq(eq)?;
        }
        if let Some(rank) = self.tol_rank {
            tol = tol.with_eps_rank(rank)?;
        }
        Ok(tol)
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 6)]
    dim: usize,
    #[arg(long, default_value_t = 2)]
    mul_dim: usize,
    /// Graph dimension; defaults depend on the class.
    #[arg(long)]
    graph_dim: Option<usize>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// generic, hermitian, self_adjoint, additive, gamma_admissible or all.
    #[arg(long, default_value = "all")]
    class: RelationClass,
    #[arg(long, default_value = "conformance_report.json")]
    report: PathBuf,
    /// Record wall time in the report (makes reruns differ).
    #[arg(long)]
    timing: bool,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    tol: TolArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(&args),
        Command::Demo { name, json, tol } => demo(&name, json, &tol),
        Command::Verify { first, second, tol } => verify(&first, &second, &tol),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(CHECK_FAILURE),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}

fn run(args: &RunArgs) -> relkit::Result<bool> {
    let tol = args.tol.resolve()?;
    let cfg = GeneratorConfig {
        dim: args.dim,
        mul_dim: args.mul_dim,
        graph_dim: args.graph_dim,
        seed: args.seed,
        trials: args.trials,
        class: args.class,
    };
    let start = Instant::now();
    let mut report = if args.sequential {
        harness::run_suite_sequential(&cfg, &tol)?
    } else {
        harness::run_suite(&cfg, &tol)?
    };
    if args.timing {
        report.summary.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    report.write(&args.report)?;

    let s = &report.summary;
    println!(
        "{} checks: {} passed, {} failed, {} hypothesis violated; max residual {:.3e}",
        s.overall.total, s.overall.passed, s.overall.failed, s.overall.hypothesis_violated, s.overall.max_residual
    );
    if let Some(r) = s.max_shift_ratio_over_gamma {
        println!("largest shift ratio / gamma: {r:.4}");
    }
    for (id, tally) in s.by_check.iter().filter(|(_, t)| t.failed > 0) {
        println!("FAIL {id}: {} of {}", tally.failed, tally.total);
    }
    println!("report written to {}", args.report.display());
    Ok(!report.has_failures())
}

fn demo(name: &str, json: bool, tol: &TolArgs) -> relkit::Result<bool> {
    let outcome = harness::run_demo(name, &tol.resolve()?)?;
    println!("demo {}", outcome.name);
    for line in &outcome.lines {
        println!("  {line}");
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&outcome.data)?);
    }
    println!("{}", if outcome.passed { "ok" } else { "unexpected result" });
    Ok(outcome.passed)
}

fn read_relation(path: &Path) -> relkit::Result<LinearRelation> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn verify(first: &Path, second: &Path, tol: &TolArgs) -> relkit::Result<bool> {
    let tol = tol.resolve()?;
    let s = read_relation(first)?;
    let t = read_relation(second)?;
    let report = harness::verify_pair(&s, &t, &tol)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(!report.has_failures())
}
