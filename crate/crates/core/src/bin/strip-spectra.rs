use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use strip_spectra::analysis::TheoremTag;
use strip_spectra::cli::{
    embed_scenario, parse_config, parse_config_str, run, transverse_table, validate_scenario,
    write_transverse_csv, RunOptions, RunSummary, ScenarioConfig, SHIPPED_ACCEPTANCE,
};

#[derive(Parser, Debug)]
#[command(
    name = "strip-spectra",
    version,
    about = "Spectra of thin twisted and bent strips"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario configuration (TOML); `all` defaults to the shipped acceptance suite.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Scenarios run concurrently.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Solver tolerance overriding every scenario.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Skip SVG plots.
    #[arg(long, global = true)]
    no_svg: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Check every scenario profile against the standing hypotheses.
    Validate,
    /// Flat closed form and discrete-spectrum certificates (T1, T2).
    Spectrum,
    /// Thin and scaled strip sweeps (T5, T6, T8).
    Sweep,
    /// Hardy constants (T3, T4).
    Hardy,
    /// Cross-section tables and the 1D appendix checks (LA1, TA2).
    Transverse,
    /// Resolvent gap sweeps (T7).
    Resolvent,
    /// Frame integration and strip points as `{id}.xyz`.
    Embed,
    /// Every scenario of the configuration.
    All,
}

fn selects(cmd: Command, tag: TheoremTag) -> bool {
    use TheoremTag::*;
    match cmd {
        Command::Spectrum => matches!(tag, T1 | T2),
        Command::Sweep => matches!(tag, T5 | T6 | T8),
        Command::Hardy => matches!(tag, T3 | T4),
        Command::Transverse => matches!(tag, LA1 | TA2),
        Command::Resolvent => tag == T7,
        Command::All => true,
        Command::Validate | Command::Embed => false,
    }
}

fn load(cli: &Cli) -> strip_spectra::Result<Vec<ScenarioConfig>> {
    match (&cli.config, cli.command) {
        (Some(path), _) => parse_config(path),
        (None, Command::All) => parse_config_str(SHIPPED_ACCEPTANCE),
        (None, _) => Err(strip_spectra::Error::InvalidParameter {
            name: "config",
            reason: "--config <path> is required for this subcommand".into(),
        }),
    }
}

fn print_summary(summary: &RunSummary) {
    for o in &summary.outcomes {
        println!(
            "{:<4} {:<24} {:<4} {:>8.1}s  {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.theorem,
            o.seconds,
            o.detail
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn real_main(cli: &Cli) -> strip_spectra::Result<u8> {
    let configs = load(cli)?;
    match cli.command {
        Command::Validate => {
            let mut ok = true;
            for cfg in &configs {
                for rep in validate_scenario(cfg)? {
                    for c in &rep.checks {
                        println!(
                            "{:<24} eps={:<8} {:<24} {:<5} {}",
                            cfg.id, rep.epsilon, c.name, c.passed, c.detail
                        );
                    }
                    ok &= rep.admissible();
                }
            }
            Ok(u8::from(!ok))
        }
        Command::Embed => {
            for cfg in &configs {
                let s = embed_scenario(cfg, &cli.out, 1e-2, 11)?;
                println!(
                    "{} n={} eps={} points={} drift={:.3e}",
                    s.id, s.codimension, s.epsilon, s.points, s.max_drift
                );
            }
            Ok(0)
        }
        cmd => {
            if cmd == Command::Transverse {
                std::fs::create_dir_all(&cli.out)?;
                for cfg in configs
                    .iter()
                    .filter(|c| !matches!(c.theorem, TheoremTag::LA1 | TheoremTag::TA2))
                {
                    let eps = cfg.epsilon[0];
                    let rows = transverse_table(
                        &cfg.profile,
                        eps,
                        cfg.grid.half_length.min(10.0),
                        41,
                        256,
                    )?;
                    write_transverse_csv(
                        &rows,
                        &cli.out.join(format!("{}.transverse.csv", cfg.id)),
                    )?;
                }
            }
            let selected: Vec<ScenarioConfig> = configs
                .into_iter()
                .filter(|c| selects(cmd, c.theorem))
                .collect();
            let opts = RunOptions {
                jobs: cli.jobs.max(1),
                out: cli.out.clone(),
                tol: cli.tol,
                svg: !cli.no_svg,
            };
            let summary = run(&selected, &opts)?;
            print_summary(&summary);
            Ok(summary.exit_code() as u8)
        }
    }
}
