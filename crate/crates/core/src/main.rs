use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use bplab::experiments::{self, parse_config, ConfigFlags};
use bplab::offspring::{Moment, OffspringDistribution};
use bplab::pgf::extinction_prob;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bplab", version, about = "Galton-Watson branching process laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment and write report.json plus CSV tables
    Run {
        name: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        /// omit wall-clock timing so reruns are byte-identical
        #[arg(long)]
        stable_output: bool,
    },
    /// List the registered experiments
    List,
    /// Print m, variance, E[L log L] and q for an offspring law
    LawInfo {
        /// comma-separated masses p_0,p_1,...
        #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with_all = ["geometric", "heavy_tail"])]
        pmf: Option<Vec<f64>>,
        /// success probability of a geometric law on {0,1,...}
        #[arg(long, conflicts_with = "heavy_tail")]
        geometric: Option<f64>,
        /// mixture weight of the atom in the heavy-tailed family
        #[arg(long)]
        heavy_tail: Option<f64>,
        #[arg(long, default_value_t = 2)]
        atom: u64,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
    },
}

fn moment(m: Moment) -> String {
    match m {
        Moment::Finite(v) => format!("{v}"),
        Moment::Infinite => "infinite".into(),
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<bool> {
    match Cli::parse().command {
        Command::Run { name, config, seed, out, workers, stable_output } => {
            let flags = ConfigFlags { name: Some(name), seed, out, workers };
            let cfg = parse_config(config.as_deref(), &flags)?;
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("results").join(&cfg.name));
            let output = experiments::run(&cfg)?;
            output
                .write(&dir, stable_output)
                .with_context(|| format!("writing results to {}", dir.display()))?;
            for m in &output.report.metrics {
                println!("{:<6} {} = {}", format!("{:?}", m.verdict).to_uppercase(), m.name, m.value);
            }
            let passed = output.report.passed;
            println!(
                "{}: {} ({})",
                cfg.name,
                if passed { "PASS" } else { "FAIL" },
                dir.join("report.json").display()
            );
            Ok(passed)
        }
        Command::List => {
            for e in experiments::list_experiments() {
                println!("{:<18} {}  [{}]", e.name, e.description, e.anchor);
            }
            Ok(true)
        }
        Command::LawInfo { pmf, geometric, heavy_tail, atom, cutoff } => {
            let d = match (pmf, geometric, heavy_tail) {
                (Some(p), None, None) => OffspringDistribution::finite(&p)?,
                (None, Some(p), None) => OffspringDistribution::geometric(p)?,
                (None, None, Some(a)) => OffspringDistribution::heavy_tail_with_atom(a, atom, cutoff)?,
                _ => bail!("give exactly one of --pmf, --geometric, --heavy-tail"),
            };
            println!("law      {}", d.describe());
            println!("m        {}", d.mean());
            println!("sigma^2  {}", moment(d.variance()));
            println!("llogl    {}", moment(d.llogl()));
            println!("q        {}", extinction_prob(&d)?);
            if let Some(b) = d.untruncated_mean_bound() {
                println!("m bound  {b}");
            }
            Ok(true)
        }
    }
}
