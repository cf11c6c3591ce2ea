//! `leggett`: predictions, scans, simulation and self-checks.
//!
//! Angles are given in degrees on the command line and converted to radians
//! immediately. Exit codes: 0 success (for `simulate`: violation seen at the
//! requested significance), 1 error, 2 usage error, 3 `simulate` saw no
//! violation, 4 `check` found a residual above tolerance.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use leggett_povm::analysis::{self, Fault, ModelParams, Provenance};
use leggett_povm::catalog::Catalog;
use leggett_povm::error::{Error, Result};
use leggett_povm::geometry::{default_settings, TripleSettings};
use leggett_povm::inequalities::optimal_phi;

#[derive(Parser)]
#[command(name = "leggett", version, about = "Leggett and Bell bounds for entangled hyperon pairs")]
struct Cli {
    /// Decay catalog file; the built-in table is used when absent.
    #[arg(long, global = true, env = "LEGGETT_CATALOG")]
    catalog: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ChannelArgs {
    /// `[eta_c|chi_c0:]hyperon[.final_state]`, e.g. `SigmaPlus` or `chi_c0:Lambda.p_pi-`.
    #[arg(long, default_value = "SigmaPlus")]
    channel: String,
    /// Override the A-side decay asymmetry.
    #[arg(long, allow_hyphen_values = true)]
    alpha_a: Option<f64>,
    /// Override the B-side decay asymmetry.
    #[arg(long, allow_hyphen_values = true)]
    alpha_b: Option<f64>,
    /// A-side measurement bias (singlet only).
    #[arg(long, allow_hyphen_values = true)]
    eta_a: Option<f64>,
    /// B-side measurement bias (singlet only).
    #[arg(long, allow_hyphen_values = true)]
    eta_b: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Leggett-type LHS at one opening angle, plus the optimum.
    Predict {
        #[command(flatten)]
        ch: ChannelArgs,
        /// Opening angle in degrees (default: the optimum).
        #[arg(long)]
        phi_deg: Option<f64>,
        /// Triple-settings file, overriding --phi-deg.
        #[arg(long)]
        settings: Option<PathBuf>,
        /// Output file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sum-form LHS along a range of opening angles (CSV).
    ScanPhi {
        #[command(flatten)]
        ch: ChannelArgs,
        /// Lower end in degrees (default: phi-max / steps).
        #[arg(long)]
        phi_min_deg: Option<f64>,
        /// Upper end in degrees.
        #[arg(long, default_value_t = 180.0)]
        phi_max_deg: f64,
        /// Number of grid points.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Output file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Violation region over |alpha_a|, |alpha_b| in [0, 1] (CSV).
    ScanRegion {
        /// Grid points per axis.
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Output file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate decay events and estimate the sum-form LHS (JSON).
    Simulate {
        #[command(flatten)]
        ch: ChannelArgs,
        /// Number of event pairs.
        #[arg(long, default_value_t = 1_000_000)]
        events: usize,
        /// RNG seed; equal seeds give byte-identical output.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Opening angle in degrees (default: the optimum).
        #[arg(long)]
        phi_deg: Option<f64>,
        /// Triple-settings file, overriding --phi-deg.
        #[arg(long)]
        settings: Option<PathBuf>,
        /// Event file; the summary goes to `<out>.summary.json` as well.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Significance, in standard errors, required to report a violation.
        #[arg(long, default_value_t = 5.0)]
        sigma_threshold: f64,
    },
    /// Cross-check closed forms, sampler and threshold against oracles.
    Check {
        #[arg(long, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    SingletSign,
}

fn command_line() -> String {
    std::env::args()
        .enumerate()
        .map(|(i, a)| {
            let a = if i == 0 { analysis::TOOL.to_string() } else { a };
            if a.is_empty() || a.contains(|c: char| c.is_whitespace() || "'\"$\\".contains(c)) {
                format!("'{}'", a.replace('\'', r"'\''"))
            } else {
                a
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn load_catalog(path: Option<&Path>) -> Result<Catalog> {
    path.map_or_else(|| Ok(Catalog::builtin()), Catalog::load)
}

fn model(catalog: &Catalog, ch: &ChannelArgs) -> Result<ModelParams> {
    ModelParams::from_channel(catalog.resolve(&ch.channel)?).with_overrides(ch.eta_a, ch.alpha_a, ch.eta_b, ch.alpha_b)
}

fn read_settings(path: &Path) -> Result<TripleSettings> {
    std::fs::read_to_string(path)?.parse()
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json(value: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn run(cli: Cli) -> Result<ExitCode> {
    let catalog = load_catalog(cli.catalog.as_deref())?;
    let hash = catalog.sha256();
    match cli.command {
        Command::Predict { ch, phi_deg, settings, out } => {
            let m = model(&catalog, &ch)?;
            let settings = settings.as_deref().map(read_settings).transpose()?;
            let prov = Provenance::new(command_line(), hash, None);
            let p = analysis::predict(&m, phi_deg.map(f64::to_radians), settings.as_ref(), prov)?;
            emit(&json(&p)?, out.as_deref())?;
        }
        Command::ScanPhi { ch, phi_min_deg, phi_max_deg, steps, out } => {
            let m = model(&catalog, &ch)?;
            if steps == 0 {
                return Err(Error::InvalidArgument("steps must be positive".into()));
            }
            let lo = phi_min_deg.unwrap_or(phi_max_deg / steps as f64);
            let scan = analysis::scan_phi(&m, lo.to_radians(), phi_max_deg.to_radians(), steps)?;
            emit(&scan.to_csv(&Provenance::new(command_line(), hash, None)), out.as_deref())?;
        }
        Command::ScanRegion { steps, out } => {
            let scan = analysis::scan_region(steps)?;
            emit(&scan.to_csv(&Provenance::new(command_line(), hash, None)), out.as_deref())?;
        }
        Command::Simulate { ch, events, seed, phi_deg, settings, out, sigma_threshold } => {
            let m = model(&catalog, &ch)?;
            let settings = match (settings, phi_deg) {
                (Some(p), _) => read_settings(&p)?,
                (None, Some(d)) => default_settings(d.to_radians())?,
                (None, None) => default_settings(optimal_phi(m.pa.alpha(), m.pb.alpha()))?,
            };
            let prov = Provenance::new(command_line(), hash, Some(seed));
            let s = analysis::simulate(&m, &settings, events, seed, sigma_threshold, out.as_deref(), prov)?;
            let text = json(&s)?;
            if let Some(p) = &out {
                let mut name = p.as_os_str().to_owned();
                name.push(".summary.json");
                std::fs::write(PathBuf::from(name), &text)?;
            }
            print!("{text}");
            return Ok(ExitCode::from(if s.violation_observed { 0 } else { 3 }));
        }
        Command::Check { inject_fault } => {
            let fault = inject_fault.map(|FaultArg::SingletSign| Fault::SingletSign);
            let report = analysis::run_checks(fault)?;
            print!("{}", report.render());
            return Ok(ExitCode::from(if report.all_passed() { 0 } else { 4 }));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
