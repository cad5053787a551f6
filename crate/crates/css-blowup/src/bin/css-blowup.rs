use clap::{Parser, Subcommand};
use css_blowup::cli::{self, Command, CommandOptions, RunConfig};
use css_blowup::error::CssError;
use num_complex::Complex64;
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical experiments for radial self-dual Chern–Simons–Schrödinger blow-up.
///
/// Exit status: 0 when every check passes, 1 when a check fails or the
/// computation breaks down, 2 for configuration errors.
#[derive(Parser, Debug)]
#[command(name = "css-blowup", version, after_help = RunConfig::help_text())]
struct Args {
    /// Configuration file of key=value lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Output directory (overrides out.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Check the vortex identities (energy, charge, generalized kernel).
    SolitonCheck,
    /// Report the connection coefficient of the self-similar profile ODE.
    SpecfunCheck {
        /// Exponent as RE or RE,IM (defaults to spec.nu_re, spec.nu_im).
        #[arg(long)]
        nu: Option<String>,
    },
    /// Build the radiation at the start time and its approach to the initial profile.
    RadiationBuild,
    /// Integrate the modulation ODE from the closed form over the window.
    ModOde,
    /// Decompose the prescribed data (or a field CSV) and report refined parameters.
    Decompose {
        /// Field CSV on the decomposition grid.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run the conservation check on generic data (or a field CSV).
    Evolve {
        /// Field CSV on the working grid.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Length of the run.
        #[arg(long, default_value_t = 1.0)]
        duration: f64,
    },
    /// Evolve the prescribed data and track the modulation parameters.
    BlowupVerify,
    /// Apply the pseudoconformal transform at time.tau.
    Transform {
        /// Field CSV on the working grid.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn parse_complex(text: &str) -> Result<Complex64, CssError> {
    let bad = || CssError::Config(format!("--nu: expected RE or RE,IM, got {text:?}"));
    let mut parts = text.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad()));
    let re = parts.next().ok_or_else(bad)??;
    let im = parts.next().transpose()?.unwrap_or(0.0);
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn load_config(args: &Args) -> Result<RunConfig, CssError> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for item in &args.set {
        let (k, v) = item.split_once('=').ok_or_else(|| CssError::Config(format!("--set {item:?}: expected KEY=VALUE")))?;
        config.set(k.trim(), v.trim())?;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn dispatch(args: &Args) -> Result<(Command, CommandOptions), CssError> {
    let mut options = CommandOptions::default();
    let command = match &args.command {
        Sub::SolitonCheck => Command::SolitonCheck,
        Sub::SpecfunCheck { nu } => {
            options.nu = nu.as_deref().map(parse_complex).transpose()?;
            Command::SpecfunCheck
        }
        Sub::RadiationBuild => Command::RadiationBuild,
        Sub::ModOde => Command::ModOde,
        Sub::Decompose { input } => {
            options.input = input.clone();
            Command::Decompose
        }
        Sub::Evolve { input, duration } => {
            options.input = input.clone();
            options.duration = Some(*duration);
            Command::Evolve
        }
        Sub::BlowupVerify => Command::BlowupVerify,
        Sub::Transform { input } => {
            options.input = input.clone();
            Command::Transform
        }
    };
    Ok((command, options))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (config, command, options) = match load_config(&args).and_then(|c| dispatch(&args).map(|(k, o)| (c, k, o))) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let output = match cli::run(command, &config, &options) {
        Ok(output) => output,
        Err(e @ CssError::Config(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("{}: numerical failure: {e}", command.name());
            return ExitCode::from(1);
        }
    };
    match cli::write_output(&output, &config.out_dir) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("error writing output: {e}");
            return ExitCode::from(1);
        }
    }
    let failures = output.failures();
    if failures.is_empty() {
        println!("{}: all checks passed", command.name());
        ExitCode::SUCCESS
    } else {
        eprintln!("{}: failed checks: {}", command.name(), failures.join(", "));
        ExitCode::from(1)
    }
}
