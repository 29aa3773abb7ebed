//! Command-line front end for secrecy-outage sweeps.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 when
//! `--assert-agreement` detects an analytic/Monte-Carlo mismatch.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use relsec::sweep::{self, Engine, SweepSpec, SweepTable};
use relsec::{emit_config, parse_config, Scheme};

const EXIT_CONFIG: u8 = 2;
const EXIT_DISAGREEMENT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "relsec",
    about = "Secrecy outage sweeps for threshold decode-and-forward relay selection",
    version
)]
struct Cli {
    /// List the available figure presets and exit.
    #[arg(long, global = true)]
    list_presets: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and emit CSV.
    Sweep(Box<SweepArgs>),
    /// Print the canonical config file for a preset.
    ShowConfig(ShowConfigArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Figure preset id (see --list-presets), or `custom`.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,

    /// Read the sweep from a config file instead of flags.
    #[arg(long)]
    config: Option<PathBuf>,

    /// SNR points: `start:stop:step` range or comma list, in dB.
    #[arg(long, value_name = "DB")]
    snr_db: Option<String>,

    /// Comma list of schemes to evaluate (TS, ITS, OS).
    #[arg(long)]
    schemes: Option<String>,

    /// Comma list of engines (analytic, mc, quad).
    #[arg(long)]
    engines: Option<String>,

    /// Monte Carlo trials per point.
    #[arg(long)]
    trials: Option<u64>,

    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Parameter override `key=value` (dB for link keys); repeatable.
    /// Keys: n, rate_rs, gamma_th, beta_sd, alpha_se, beta_sk, beta_kd, alpha_ke.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write the canonical config that reproduces this run.
    #[arg(long, value_name = "PATH")]
    emit_config: Option<PathBuf>,

    /// Fail (exit 3) if any analytic/mc pair disagrees beyond the given
    /// multiple of the MC standard error, e.g. `3sigma`.
    #[arg(long, value_name = "KSIGMA")]
    assert_agreement: Option<String>,
}

#[derive(Args)]
struct ShowConfigArgs {
    /// Figure preset id.
    #[arg(long)]
    preset: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_presets {
        print_presets();
        return ExitCode::SUCCESS;
    }
    match cli.command {
        Some(Command::Sweep(args)) => run_sweep_command(*args),
        Some(Command::ShowConfig(args)) => match SweepSpec::for_preset(&args.preset) {
            Ok(spec) => {
                print!("{}", emit_config(&spec));
                ExitCode::SUCCESS
            }
            Err(e) => config_error(e),
        },
        None => {
            eprintln!(
                "error: no command given; try `relsec sweep --preset fig2` or --list-presets"
            );
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn print_presets() {
    println!(
        "{:<12} {:>2} {:>4} {:>9} {:<14} description",
        "preset", "N", "Rs", "gamma_th", "sweep (dB)"
    );
    for p in relsec::PRESETS {
        println!(
            "{:<12} {:>2} {:>4} {:>6} dB {:>4}:{}:{:<5} {}",
            p.id,
            p.n,
            p.rate_rs,
            p.gamma_th_db,
            p.default_sweep.0,
            p.default_sweep.1,
            p.default_sweep.2,
            p.description
        );
    }
    println!(
        "aliases: {} = fig4, {} = fig5",
        sweep::FIG4_ALIAS,
        sweep::FIG5_ALIAS
    );
}

fn config_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_CONFIG)
}

fn run_sweep_command(args: SweepArgs) -> ExitCode {
    // base spec: config file, preset, or bare custom
    let mut spec = if let Some(path) = &args.config {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_CONFIG);
            }
        };
        match parse_config(&text) {
            Ok(s) => s,
            Err(e) => return config_error(e),
        }
    } else {
        let preset = args.preset.clone().unwrap_or_else(|| "custom".to_string());
        if preset == "custom" {
            SweepSpec {
                preset,
                snr_db: vec![],
                schemes: Scheme::ALL.to_vec(),
                engines: vec![Engine::Analytic],
                mc_trials: sweep::DEFAULT_TRIALS,
                mc_seed: sweep::DEFAULT_SEED,
                overrides: Default::default(),
            }
        } else {
            match SweepSpec::for_preset(&preset) {
                Ok(s) => s,
                Err(e) => return config_error(e),
            }
        }
    };

    // flag overrides on top
    if let Some(points) = &args.snr_db {
        match relsec::config::parse_snr_list(points) {
            Ok(v) => spec.snr_db = v,
            Err(e) => return config_error(format!("--snr-db: {e}")),
        }
    }
    if let Some(s) = &args.schemes {
        match s.split(',').map(|t| t.trim().parse::<Scheme>()).collect() {
            Ok(v) => spec.schemes = v,
            Err(e) => return config_error(format!("--schemes: {e}")),
        }
    }
    if let Some(s) = &args.engines {
        match s.split(',').map(|t| t.trim().parse::<Engine>()).collect() {
            Ok(v) => spec.engines = v,
            Err(e) => return config_error(format!("--engines: {e}")),
        }
    }
    if let Some(t) = args.trials {
        spec.mc_trials = t;
    }
    if let Some(s) = args.seed {
        spec.mc_seed = s;
    }
    for kv in &args.overrides {
        let Some((key, value)) = kv.split_once('=') else {
            return config_error(format!("--override `{kv}` is not of the form key=value"));
        };
        if let Err(e) = spec.overrides.apply_kv(key.trim(), value.trim()) {
            return config_error(e);
        }
    }

    if spec.snr_db.is_empty() {
        return config_error("no SNR points: give --snr-db or use a preset");
    }
    let ksigma = match args.assert_agreement.as_deref() {
        None => None,
        Some(s) => match parse_ksigma(s) {
            Ok(k) => Some(k),
            Err(e) => return config_error(e),
        },
    };
    if ksigma.is_some() {
        for needed in [Engine::Analytic, Engine::Mc] {
            if !spec.engines.contains(&needed) {
                return config_error("--assert-agreement needs both the analytic and mc engines");
            }
        }
    }
    if let Err(e) = spec.validate() {
        return config_error(e);
    }

    if let Some(path) = &args.emit_config {
        if let Err(e) = std::fs::write(path, emit_config(&spec)) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::FAILURE;
        }
    }

    let table = match relsec::run_sweep(&spec) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };

    match &args.out {
        Some(path) => {
            if let Err(e) = relsec::emit_csv_path(&table, path) {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = relsec::emit_csv(&table, &mut stdout) {
                // a closed pipe (e.g. piping into `head`) is not an error
                if e.kind() == std::io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
            let _ = stdout.flush();
        }
    }

    if let Some(k) = ksigma {
        if let Some(msg) = agreement_violation(&table, k) {
            eprintln!("oracle disagreement: {msg}");
            return ExitCode::from(EXIT_DISAGREEMENT);
        }
    }
    ExitCode::SUCCESS
}

fn parse_ksigma(s: &str) -> Result<f64, String> {
    let body = s
        .strip_suffix("sigma")
        .ok_or_else(|| format!("--assert-agreement `{s}` should look like `3sigma`"))?;
    let k: f64 = body
        .parse()
        .map_err(|_| format!("--assert-agreement `{s}`: `{body}` is not a number"))?;
    if k <= 0.0 {
        return Err("--assert-agreement multiplier must be positive".into());
    }
    Ok(k)
}

/// Checks every (snr, scheme) analytic/mc pair; returns a description of
/// the first violation.
fn agreement_violation(table: &SweepTable, ksigma: f64) -> Option<String> {
    for row in &table.rows {
        if row.engine != Engine::Analytic {
            continue;
        }
        let mc = table
            .rows
            .iter()
            .find(|r| r.engine == Engine::Mc && r.snr_db == row.snr_db && r.scheme == row.scheme)?;
        let stderr = mc.stderr.unwrap_or(0.0);
        let diff = (row.outage - mc.outage).abs();
        if diff > ksigma * stderr {
            return Some(format!(
                "{} at {} dB: analytic {:.6e} vs mc {:.6e} (|diff| {:.3e} > {}*stderr {:.3e})",
                row.scheme, row.snr_db, row.outage, mc.outage, diff, ksigma, stderr
            ));
        }
    }
    None
}
