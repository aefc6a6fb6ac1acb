//! Command implementations behind the `qphase` binary. Each command maps a
//! merged [`RunConfig`] to output text plus a pass/fail flag.

pub mod output;
pub mod suites;

use qphase_core::aawigner::{aa_grid, aa_marginals, default_thetas, evolve, wwm_symbol, SpectrumFn};
use qphase_core::config::{OutputFormat, RunConfig};
use qphase_core::linalg::{unitarity_residual, CMat, C64};
use qphase_core::metaplectic::{covariance_error, metaplectic_g, wk_covariance_error};
use qphase_core::modring::is_odd_prime;
use qphase_core::parse::{parse_hamiltonian, parse_state_spec};
use qphase_core::wk::StateVec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use output::{render_evolve_csv, render_marginals_csv, render_symbol_csv, render_wigner_csv, sci_vec, Sci};
use suites::{pick_sl2, run_suite, Check, SuiteError, SuiteParams};

/// Upper bound on `--dim` for the table commands.
pub const MAX_DIM: usize = 512;
/// Upper bound on `--thetas` and `--steps`.
pub const MAX_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Wigner,
    Marginals,
    Evolve,
    Metaplectic,
    Symbol,
}

/// Every variant is a usage or configuration problem (exit code 2).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("missing required option --{0}")]
    Missing(&'static str),
    #[error("invalid --{flag}: {msg}")]
    Invalid { flag: &'static str, msg: String },
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error("config file: {0}")]
    Config(String),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

fn invalid(flag: &'static str, e: impl ToString) -> CliError {
    CliError::Invalid { flag, msg: e.to_string() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    /// Some verification check failed (exit code 1).
    pub failed: bool,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, failed: false }
    }
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Verify => verify(cfg),
        Command::Wigner => wigner(cfg),
        Command::Marginals => marginals(cfg),
        Command::Evolve => evolve_cmd(cfg),
        Command::Metaplectic => metaplectic(cfg),
        Command::Symbol => symbol(cfg),
    }
}

fn dim(cfg: &RunConfig) -> Result<usize, CliError> {
    let d = cfg.dim.ok_or(CliError::Missing("dim"))?;
    if !(1..=MAX_DIM).contains(&d) {
        return Err(invalid("dim", format!("must lie in 1..={MAX_DIM}, got {d}")));
    }
    Ok(d)
}

fn state(cfg: &RunConfig, d: usize) -> Result<StateVec, CliError> {
    let spec = cfg.state.as_deref().ok_or(CliError::Missing("state"))?;
    parse_state_spec(spec).and_then(|s| s.materialize(d)).map_err(|e| invalid("state", e))
}

fn thetas(cfg: &RunConfig, d: usize) -> Result<usize, CliError> {
    let t = cfg.thetas.unwrap_or_else(|| default_thetas(d));
    if !(1..=MAX_SAMPLES).contains(&t) {
        return Err(invalid("thetas", format!("must lie in 1..={MAX_SAMPLES}, got {t}")));
    }
    Ok(t)
}

fn hamiltonian(cfg: &RunConfig) -> Result<SpectrumFn, CliError> {
    parse_hamiltonian(cfg.hamiltonian.as_deref().unwrap_or("n")).map_err(|e| invalid("hamiltonian", e))
}

fn format(cfg: &RunConfig) -> OutputFormat {
    cfg.format.unwrap_or_default()
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    suite: &'a str,
    dim: usize,
    seed: u64,
    checks: &'a [Check],
}

fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = cfg.dim.ok_or(CliError::Missing("dim"))?;
    let suite = cfg.suite.as_deref().unwrap_or("all");
    if let Some(t) = cfg.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(invalid("tol", format!("must be a finite nonnegative number, got {t}")));
        }
    }
    let params = SuiteParams { dim: d, kappa: cfg.kappa, seed: cfg.seed.unwrap_or(0), r: cfg.r, tol: cfg.tol };
    let checks = run_suite(suite, &params)?;
    let failed = checks.iter().any(|c| !c.pass);
    let output = match format(cfg) {
        OutputFormat::Json => json(&VerifyReport { suite, dim: d, seed: params.seed, checks: &checks }),
        OutputFormat::Csv => {
            let mut s = String::from("check,max_residual,tol,pass\n");
            for c in &checks {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    c.name,
                    output::fmt_num(c.max_residual.0),
                    output::fmt_num(c.tol.0),
                    if c.pass { "PASS" } else { "FAIL" }
                ));
            }
            s
        }
    };
    Ok(Outcome { output, failed })
}

#[derive(Serialize)]
struct GridJson {
    dim: usize,
    j: Vec<Sci>,
    theta: Vec<Sci>,
    /// Rows indexed by J.
    w: Vec<Vec<Sci>>,
}

fn wigner(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = dim(cfg)?;
    let psi = state(cfg, d)?;
    let g = aa_grid(&psi, thetas(cfg, d)?).map_err(|e| invalid("state", e))?;
    Ok(Outcome::ok(match format(cfg) {
        OutputFormat::Csv => render_wigner_csv(&g),
        OutputFormat::Json => json(&GridJson {
            dim: d,
            j: sci_vec(&g.j_values),
            theta: sci_vec(&g.theta_values),
            w: g.w.iter().map(|r| sci_vec(r)).collect(),
        }),
    }))
}

#[derive(Serialize)]
struct MarginalsJson {
    j: Vec<Sci>,
    p_j: Vec<Sci>,
    theta: Vec<Sci>,
    p_theta: Vec<Sci>,
}

fn marginals(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = dim(cfg)?;
    let psi = state(cfg, d)?;
    let g = aa_grid(&psi, thetas(cfg, d)?).map_err(|e| invalid("state", e))?;
    let m = aa_marginals(&psi, &g).map_err(|e| invalid("state", e))?;
    Ok(Outcome::ok(match format(cfg) {
        OutputFormat::Csv => render_marginals_csv(&m),
        OutputFormat::Json => json(&MarginalsJson {
            j: sci_vec(&m.j_values),
            p_j: sci_vec(&m.p_j),
            theta: sci_vec(&m.theta_values),
            p_theta: sci_vec(&m.p_theta),
        }),
    }))
}

#[derive(Serialize)]
struct EvolveJson {
    t: Vec<Sci>,
    theta: Vec<Sci>,
    /// Rows indexed by time.
    p_theta: Vec<Vec<Sci>>,
}

fn evolve_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = dim(cfg)?;
    let psi = state(cfg, d)?;
    let h = hamiltonian(cfg)?;
    let t = thetas(cfg, d)?;
    let (t0, t1) = (cfg.t0.unwrap_or(0.0), cfg.t1.unwrap_or(1.0));
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(invalid("t1", "times must be finite"));
    }
    let steps = cfg.steps.unwrap_or(10);
    if !(1..=MAX_SAMPLES).contains(&steps) {
        return Err(invalid("steps", format!("must lie in 1..={MAX_SAMPLES}, got {steps}")));
    }
    let mut series = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let time = t0 + (t1 - t0) * k as f64 / steps as f64;
        let pt = evolve(&psi, &h, time);
        let g = aa_grid(&pt, t).map_err(|e| invalid("state", e))?;
        series.push((time, aa_marginals(&pt, &g).map_err(|e| invalid("state", e))?));
    }
    Ok(Outcome::ok(match format(cfg) {
        OutputFormat::Csv => render_evolve_csv(&series),
        OutputFormat::Json => json(&EvolveJson {
            t: series.iter().map(|(t, _)| Sci(*t)).collect(),
            theta: sci_vec(&series[0].1.theta_values),
            p_theta: series.iter().map(|(_, m)| sci_vec(&m.p_theta)).collect(),
        }),
    }))
}

#[derive(Serialize)]
struct MetaplecticJson {
    dim: usize,
    r: [usize; 4],
    case: qphase_core::metaplectic::GCase,
    /// Row-major `[re, im]` pairs.
    matrix: Vec<Vec<[Sci; 2]>>,
    unitarity_residual: Sci,
    covariance_residual: Sci,
    wk_covariance_residual: Sci,
}

fn matrix_json(m: &CMat) -> Vec<Vec<[Sci; 2]>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| [Sci(m[(i, j)].re), Sci(m[(i, j)].im)]).collect()).collect()
}

fn metaplectic(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = cfg.dim.ok_or(CliError::Missing("dim"))?;
    if !is_odd_prime(d) || d > MAX_DIM {
        return Err(invalid("dim", format!("dimension must be an odd prime, got {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    let r = pick_sl2(d, cfg.r, &mut rng).map_err(|e| invalid("r", e))?;
    let g = metaplectic_g(&r).map_err(|e| invalid("r", e))?;
    Ok(Outcome::ok(json(&MetaplecticJson {
        dim: d,
        r: [r.s1, r.t1, r.s2, r.t2],
        case: g.case_tag,
        matrix: matrix_json(&g.mat),
        unitarity_residual: Sci(unitarity_residual(&g.mat)),
        covariance_residual: Sci(covariance_error(&g)),
        wk_covariance_residual: Sci(wk_covariance_error(&g)),
    })))
}

#[derive(Serialize)]
struct SymbolJson {
    j: Vec<Sci>,
    theta: Vec<Sci>,
    re: Vec<Vec<Sci>>,
    im: Vec<Vec<Sci>>,
}

fn symbol(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = dim(cfg)?;
    let h = hamiltonian(cfg)?;
    let t = thetas(cfg, d)?;
    let op = CMat::from_diag(&(0..d).map(|n| C64::new(h.eval(n as f64), 0.0)).collect::<Vec<_>>());
    let s = wwm_symbol(&op, t).map_err(|e| invalid("thetas", e))?;
    Ok(Outcome::ok(match format(cfg) {
        OutputFormat::Csv => render_symbol_csv(&s),
        OutputFormat::Json => json(&SymbolJson {
            j: sci_vec(&s.j_values),
            theta: sci_vec(&s.theta_values),
            re: s.values.iter().map(|r| r.iter().map(|z| Sci(z.re)).collect()).collect(),
            im: s.values.iter().map(|r| r.iter().map(|z| Sci(z.im)).collect()).collect(),
        }),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dim: usize) -> RunConfig {
        RunConfig { dim: Some(dim), ..Default::default() }
    }

    #[test]
    fn wigner_is_deterministic() {
        let c = RunConfig { state: Some("split:2".into()), ..cfg(5) };
        let a = run(Command::Wigner, &c).unwrap();
        assert_eq!(a, run(Command::Wigner, &c).unwrap());
        assert_eq!(a.output.lines().count(), 1 + 10 * 20);
    }

    #[test]
    fn missing_state_is_config_error() {
        assert!(matches!(run(Command::Wigner, &cfg(5)), Err(CliError::Missing("state"))));
    }

    #[test]
    fn metaplectic_even_rejected() {
        let e = run(Command::Metaplectic, &cfg(6)).unwrap_err();
        assert!(e.to_string().contains("dimension must be an odd prime"));
    }

    #[test]
    fn metaplectic_json_shape() {
        let c = RunConfig { r: Some([1, 1, 0, 1]), ..cfg(5) };
        let out = run(Command::Metaplectic, &c).unwrap().output;
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["matrix"].as_array().unwrap().len(), 5);
        assert!(v["unitarity_residual"].as_f64().unwrap() < 1e-10);
    }

    #[test]
    fn evolve_row_count() {
        let c = RunConfig { state: Some("fock:1".into()), steps: Some(3), thetas: Some(8), ..cfg(4) };
        let out = run(Command::Evolve, &c).unwrap().output;
        assert_eq!(out.lines().count(), 1 + 4 * 8);
    }

    #[test]
    fn symbol_of_number_operator() {
        let c = RunConfig { hamiltonian: Some("n".into()), format: Some(OutputFormat::Json), ..cfg(3) };
        let v: serde_json::Value = serde_json::from_str(&run(Command::Symbol, &c).unwrap().output).unwrap();
        assert_eq!(v["re"][4][0].as_f64().unwrap(), 2.0);
    }
}
