use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use xhermite_lab::{run, Scenario, ScenarioConfig, Verdict};

#[derive(Parser)]
#[command(name = "xhermite", version, about = "Energy-function verification for exceptional Hermite polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON scenario config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    Construct(Common),
    Zeros(Common),
    Hessian(Common),
    Gersgorin(Common),
    Dnu(Common),
    Optimality(Common),
    Sweep(Common),
    Semicircle(Common),
}

#[derive(Args)]
struct Common {
    /// Parts of λ, e.g. `1,1`; empty for the classical case.
    #[arg(long, value_delimiter = ',', default_value = "")]
    partition: Vec<String>,
    /// Number of regular zeros; repeat or comma-separate for a sweep.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 192)]
    precision: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "xhermite-out")]
    out: PathBuf,
}

impl Common {
    fn into_config(self, scenario: Scenario) -> anyhow::Result<ScenarioConfig> {
        let partition = self.partition.iter().filter(|s| !s.is_empty()).map(|s| s.trim().parse()).collect::<Result<Vec<i64>, _>>()?;
        Ok(ScenarioConfig {
            partition,
            n_values: self.n,
            precision_bits: self.precision,
            scenarios: BTreeSet::from([scenario]),
            seed: self.seed,
            output_dir: self.out,
            tolerances: BTreeMap::new(),
        })
    }
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let config = match cli.command {
        Command::Run { config } => ScenarioConfig::from_file(&config)?,
        Command::Construct(c) => c.into_config(Scenario::Construct)?,
        Command::Zeros(c) => c.into_config(Scenario::Zeros)?,
        Command::Hessian(c) => c.into_config(Scenario::Hessian)?,
        Command::Gersgorin(c) => c.into_config(Scenario::Gersgorin)?,
        Command::Dnu(c) => c.into_config(Scenario::Dnu)?,
        Command::Optimality(c) => c.into_config(Scenario::Optimality)?,
        Command::Sweep(c) => c.into_config(Scenario::Sweep)?,
        Command::Semicircle(c) => c.into_config(Scenario::Semicircle)?,
    };
    let bundle = run(&config)?;
    for claim in &bundle.summary.claims {
        let tag = match claim.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Report => "REPORT",
            Verdict::Skipped => "SKIP",
        };
        println!("{tag:6} {:18} {} [{}]", claim.id, claim.detail, claim.tolerance);
    }
    for (n, errs) in &bundle.summary.errors {
        for (scenario, e) in errs {
            eprintln!("n={n} {scenario}: {e}");
        }
    }
    println!("{} files written to {}", bundle.files.len(), config.output_dir.display());
    Ok(())
}
