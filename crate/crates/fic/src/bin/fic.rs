use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fic::channel::{sample_channel_pair, synthesize_channel};
use fic::harness::{compare_fic_bas, derive_rng, run_campaign, CampaignConfig, CampaignReport, TimeToTarget};
use fic::reference::OracleCache;

#[derive(Parser)]
#[command(name = "fic", about = "RIS configuration search campaigns", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo campaign from a TOML config and write the CSV report.
    Run {
        /// Campaign config file (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Override the output path from the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compare FIC and BAS time-to-target from a campaign report.
    Compare {
        /// Report CSV produced by `fic run`.
        #[arg(long)]
        report: PathBuf,
        /// Target normalized rate loss.
        #[arg(long)]
        target_eps: f64,
    },
    /// Precompute the oracle cache for every channel a campaign will draw.
    OracleCache {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> fic::Result<()> {
    match cli.command {
        Command::Run { config, output } => {
            let mut config = CampaignConfig::load(&config)?;
            if let Some(path) = output {
                config.output_path = path;
            }
            let report = run_campaign(&config)?;
            println!(
                "wrote {} rows to {}",
                report.rows.len(),
                config.output_path.display()
            );
        }
        Command::Compare { report, target_eps } => {
            let report = CampaignReport::load(&report)?;
            let cmp = compare_fic_bas(&report, target_eps);
            let describe = |t: TimeToTarget| match t {
                TimeToTarget::Reached(v) => format!("{v:.1}"),
                TimeToTarget::NotReached => "not reached".into(),
            };
            println!("target eps      : {target_eps}");
            println!("T_FIC           : {}", describe(cmp.t_fic));
            println!("T_BAS           : {}", describe(cmp.t_bas));
            match cmp.reduction_percent {
                Some(r) => println!("reduction       : {r:.1}%"),
                None => println!("reduction       : undefined (target not reached)"),
            }
        }
        Command::OracleCache { config } => {
            let config = CampaignConfig::load(&config)?;
            config.validate()?;
            let cache = OracleCache::new(OracleCache::resolve(config.cache_dir.as_deref()))?;
            let scenario = &config.scenario;
            for trial in 0..config.trials as u64 {
                let mut rng = derive_rng(config.base_seed, "channel", &[trial]);
                let (pg, ph) = sample_channel_pair(scenario, &mut rng)?;
                let g = synthesize_channel(&pg, &scenario.ris, &scenario.source);
                let h = synthesize_channel(&ph, &scenario.destination, &scenario.ris);
                cache.get_or_compute(
                    &h,
                    &g,
                    &scenario.ris,
                    config.num_blocks(),
                    config.noise.sigma_sq,
                    &config.oracle,
                )?;
            }
            println!(
                "oracle cache ready for {} channels in {}",
                config.trials,
                cache.dir().display()
            );
        }
    }
    Ok(())
}
