use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gravwell::harness::{self, cases, CaseConfig, Overrides, RunReport};
use gravwell::properties::{self, Campaign};

#[derive(Parser)]
#[command(
    name = "gravwell",
    version,
    about = "Well-balanced finite volumes for the Euler equations with gravity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Replace the grid size(s) of the case.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Run only the well-balanced scheme of this order (1 to 3).
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=3))]
    order: Option<u8>,
    /// Replace the final time of the case.
    #[arg(long, global = true)]
    t_final: Option<f64>,
    /// Output directory (a parent directory for `suite`).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed of the randomized property campaign.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration file.
    Run { config: PathBuf },
    /// Run every `*.conf` file of a directory.
    Suite { dir: PathBuf },
    /// List the registered cases.
    ListCases,
    /// Randomized checks of the interface solver and the update.
    Properties {
        #[arg(long, default_value_t = 100_000)]
        interfaces: usize,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
    },
}

fn print_report(r: &RunReport) {
    println!("case {} ({:.2} s)", r.case, r.wall_clock_s);
    for t in &r.thresholds {
        let value = t
            .value
            .map_or("missing".to_string(), |v| format!("{v:.4e}"));
        let bound = match (t.lower, t.upper) {
            (Some(lo), Some(hi)) => format!("in [{lo:e}, {hi:e}]"),
            (Some(lo), None) => format!(">= {lo:e}"),
            (None, Some(hi)) => format!("<= {hi:e}"),
            (None, None) => String::new(),
        };
        println!(
            "  {} {} = {} {}",
            if t.passed { "PASS" } else { "FAIL" },
            t.metric,
            value,
            bound
        );
    }
    if r.thresholds.is_empty() {
        println!("  no thresholds");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        n: cli.flags.n,
        order: cli.flags.order,
        t_final: cli.flags.t_final,
        output: cli.flags.output.clone(),
    };
    let result = match cli.command {
        Command::ListCases => {
            for c in cases::CASES {
                println!("{:<28}{}", c.id, c.summary);
            }
            Ok(true)
        }
        Command::Run { config } => CaseConfig::load(&config, &overrides).and_then(|cc| {
            let pool = harness::thread_pool()?;
            let r = pool.install(|| harness::run_case(&cc))?;
            print_report(&r);
            println!("output in {}", cc.output.display());
            Ok(r.passed)
        }),
        Command::Suite { dir } => harness::run_suite(&dir, &overrides).map(|runs| {
            let mut ok = true;
            for (path, r) in runs {
                match r {
                    Ok(r) => {
                        print_report(&r);
                        ok &= r.passed;
                    }
                    Err(e) => {
                        eprintln!("{}: {e}", path.display());
                        ok = false;
                    }
                }
            }
            ok
        }),
        Command::Properties { interfaces, steps } => {
            let mut c = Campaign {
                interfaces,
                steps,
                reductions: steps,
                ..Campaign::default()
            };
            if let Some(seed) = cli.flags.seed {
                c.seed = seed;
            }
            properties::run(&c).map(|r| {
                println!("seed {}", r.seed);
                for ch in &r.checks {
                    println!(
                        "  {} {:<32} trials {:>7}  failures {:>3}  worst {:.3e}",
                        if ch.passed() { "PASS" } else { "FAIL" },
                        ch.name,
                        ch.trials,
                        ch.failures,
                        ch.worst
                    );
                    if let Some(ex) = &ch.example {
                        println!("      first failure: {ex}");
                    }
                }
                println!(
                    "  steps that needed a reduced time step: {}",
                    r.halved_steps
                );
                r.passed()
            })
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
