//! Command line front end: run one experiment, compare schedulers on
//! identical drops, or dump a drop's report table.

use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use coordsched::io::{
    load_config, render_compare_table, write_compare_json, write_per_ue_csv, write_reports_csv,
    write_summary_json,
};
use coordsched::sim::{compare_experiment, generate_drop, run_experiment, SchedulerKind, SimConfig};
use coordsched::{generate_reports, CsiTable};

#[derive(Parser)]
#[command(name = "coordsched", version, about = "Coordinated multi-cell scheduling simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment and write JSON + CSV results.
    Run(RunArgs),
    /// Run several schedulers on identical drops and compare them against
    /// the non-cooperative baseline.
    Compare(CompareArgs),
    /// Write one drop's per-scenario rate reports as CSV.
    DumpReports(DumpReportsArgs),
}

#[derive(Args)]
struct Overrides {
    /// Experiment config, TOML.
    config: PathBuf,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the reported strongest-interferer set size.
    #[arg(long)]
    m_prime: Option<usize>,
    /// Override the greedy muting breadth.
    #[arg(long)]
    m_tilde: Option<usize>,
}

impl Overrides {
    fn load(&self) -> anyhow::Result<SimConfig> {
        let mut config = load_config(&self.config)
            .with_context(|| format!("loading {}", self.config.display()))?;
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(m_prime) = self.m_prime {
            config.m_prime = m_prime;
        }
        if let Some(m_tilde) = self.m_tilde {
            config.m_tilde = m_tilde;
        }
        Ok(config)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Override the config's scheduler.
    #[arg(long)]
    scheduler: Option<SchedulerKind>,
    /// Output directory for run.json and per_ue.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Schedulers to compare against the baseline.
    #[arg(
        long,
        value_delimiter = ',',
        default_values_t = [SchedulerKind::CsIlp, SchedulerKind::CsGa, SchedulerKind::CsGg]
    )]
    schedulers: Vec<SchedulerKind>,
    /// Output directory for compare.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct DumpReportsArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Drop index to dump.
    #[arg(long, default_value_t = 0)]
    drop: usize,
    /// Output CSV path.
    #[arg(long, default_value = "reports.csv")]
    out: PathBuf,
}

fn drop_table(config: &SimConfig, drop: usize) -> anyhow::Result<CsiTable> {
    let state = generate_drop(config, drop)?;
    Ok(generate_reports(&state.scenario, &state.conn, &state.interferers, &config.rate_mapper()?)?)
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run(args) => {
            let mut config = args.overrides.load()?;
            if let Some(scheduler) = args.scheduler {
                config.scheduler = scheduler;
            }
            let run = run_experiment(&config)?;
            std::fs::create_dir_all(&args.out)?;
            let json = args.out.join("run.json");
            let csv = args.out.join("per_ue.csv");
            write_summary_json(&json, &run)?;
            write_per_ue_csv(&csv, &run)?;
            println!(
                "{}: geo_mean {:.6}, cell_edge {:.6}, muted {:.4} ({} drops x {} TTIs)",
                run.scheduler,
                run.summary.geo_mean,
                run.summary.cell_edge,
                run.summary.muted_fraction,
                config.drops,
                config.ttis
            );
            println!("wrote {} and {}", json.display(), csv.display());
        }
        Command::Compare(args) => {
            let config = args.overrides.load()?;
            let compare = compare_experiment(&config, &args.schedulers)?;
            std::fs::create_dir_all(&args.out)?;
            let json = args.out.join("compare.json");
            write_compare_json(&json, &compare)?;
            print!("{}", render_compare_table(&compare));
            println!("wrote {}", json.display());
        }
        Command::DumpReports(args) => {
            let config = args.overrides.load()?;
            let table = drop_table(&config, args.drop)?;
            if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            write_reports_csv(&args.out, &table)?;
            println!(
                "wrote {} reports ({} UEs x {} PRBs x {} scenarios) to {}",
                table.num_ue() * table.num_prb() * table.j_prime(),
                table.num_ue(),
                table.num_prb(),
                table.j_prime(),
                args.out.display()
            );
        }
    }
    Ok(())
}
