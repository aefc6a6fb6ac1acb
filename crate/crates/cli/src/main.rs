use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qphase_cli::{run, CliError, Command};
use qphase_core::config::{OutputFormat, RunConfig};

#[derive(Parser)]
#[command(name = "qphase", version, about = "Finite-dimensional phase-space identities and tables")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an identity suite; exits 1 if any check fails.
    Verify(Flags),
    /// Tabulate the action-angle Wigner function.
    Wigner(Flags),
    /// Action and angle marginals.
    Marginals(Flags),
    /// Angle marginal under H(n) over [t0, t1].
    Evolve(Flags),
    /// Metaplectic operator for one SL(2, Z_D) element.
    Metaplectic(Flags),
    /// Phase-space symbol of H(n) on the (J, theta) grid.
    Symbol(Flags),
}

#[derive(Args, Clone)]
struct Flags {
    /// Hilbert-space dimension D.
    #[arg(long)]
    dim: Option<usize>,
    /// Suite for `verify` (default all): linalg, modring, schwinger, wk, metaplectic,
    /// hwgroup, qosc, sl2r, aawigner, cli or all.
    #[arg(long)]
    suite: Option<String>,
    /// Replace every check tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Restrict the q-oscillator suite to one kappa (default: all nonzero mod D).
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<i64>,
    /// Polynomial in n of degree at most 4, e.g. "n^2 - 0.5*n".
    #[arg(long, allow_hyphen_values = true)]
    hamiltonian: Option<String>,
    /// fock:<n>, split:<n>, phase:<r> or amps:<file.json>.
    #[arg(long)]
    state: Option<String>,
    /// Number of theta samples on [0, 2 pi) (default 4D).
    #[arg(long)]
    thetas: Option<usize>,
    /// Start time for `evolve` (default 0).
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    /// End time for `evolve` (default 1).
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<f64>,
    /// Number of time steps for `evolve` (default 10, giving 11 samples).
    #[arg(long)]
    steps: Option<usize>,
    /// RNG seed for randomized checks and random SL(2, Z_D) draws (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv (default) or json; `metaplectic` always writes JSON.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// SL(2, Z_D) entries "s1,t1,s2,t2".
    #[arg(long, value_parser = parse_r, allow_hyphen_values = true)]
    r: Option<[i64; 4]>,
    /// JSON file with the same keys; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        _ => Err(format!("expected csv or json, got '{s}'")),
    }
}

fn parse_r(s: &str) -> Result<[i64; 4], String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| format!("'{x}': {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<i64>| format!("expected 4 comma-separated integers, got {}", v.len()))
}

impl Flags {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                RunConfig::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        Ok(base.overlay(RunConfig {
            dim: self.dim,
            suite: self.suite,
            tol: self.tol,
            kappa: self.kappa,
            hamiltonian: self.hamiltonian,
            state: self.state,
            thetas: self.thetas,
            t0: self.t0,
            t1: self.t1,
            steps: self.steps,
            seed: self.seed,
            out: self.out.map(|p| p.to_string_lossy().into_owned()),
            format: self.format,
            r: self.r,
        }))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, flags) = match cli.cmd {
        Cmd::Verify(f) => (Command::Verify, f),
        Cmd::Wigner(f) => (Command::Wigner, f),
        Cmd::Marginals(f) => (Command::Marginals, f),
        Cmd::Evolve(f) => (Command::Evolve, f),
        Cmd::Metaplectic(f) => (Command::Metaplectic, f),
        Cmd::Symbol(f) => (Command::Symbol, f),
    };
    let result = flags.into_config().and_then(|cfg| {
        let outcome = run(cmd, &cfg)?;
        match &cfg.out {
            Some(path) => std::fs::write(path, &outcome.output)?,
            None => {
                // a closed pipe (e.g. `| head`) is not an error
                let mut out = std::io::stdout().lock();
                if let Err(e) = out.write_all(outcome.output.as_bytes()).and_then(|_| out.flush()) {
                    if e.kind() != std::io::ErrorKind::BrokenPipe {
                        return Err(e.into());
                    }
                }
            }
        }
        Ok(outcome.failed)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
