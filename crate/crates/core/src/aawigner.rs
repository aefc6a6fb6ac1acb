//! Action-angle Wigner function on the number-phase realization: shifted
//! Fock vectors, the kernel Δ_CT(J, θ), marginals, symbols and dynamics.
//!
//! J lives on the half-integer grid {0, 1/2, ..., D - 1/2}. The kernel is
//! sector-projected: `<a|Δ_CT(J,θ)|b> = e^{-i(b-a)θ} δ_{a+b,2J} / 2π`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{commutator, trace, CMat, C64};
use crate::qosc::phase_state;
use crate::schwinger::gamma0;
use crate::wk::{StateVec, WkError};

/// Largest polynomial degree accepted for spectra.
pub const MAX_DEGREE: usize = 4;

/// Sign s in `P(θ, t) = P(θ - s ω t, 0)` for `H = ω n` under [`evolve`].
pub const EVOLVE_SIGN: f64 = -1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AaError {
    #[error(transparent)]
    State(#[from] WkError),
    #[error("shift beta must lie in [0, 1), got {0}")]
    BadBeta(f64),
    #[error("2J must be a nonnegative integer, got J = {0}")]
    BadAction(f64),
    #[error("theta grid has {t} samples, needs at least {min}")]
    ThetaGridTooSmall { t: usize, min: usize },
    #[error("polynomial degree {0} exceeds the maximum of 4")]
    DegreeTooHigh(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
}

/// `|n + β> = D^{-1/2} Σ_l e^{-i g0 (n+β) l} |φ>_l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftedFock {
    pub d: usize,
    pub n: i64,
    pub beta: f64,
    pub vector: Vec<C64>,
}

pub fn shifted_fock(d: usize, n: i64, beta: f64) -> Result<ShiftedFock, AaError> {
    if !(0.0..1.0).contains(&beta) {
        return Err(AaError::BadBeta(beta));
    }
    let g0 = gamma0(d);
    let norm = 1.0 / (d as f64).sqrt();
    let mut vector = vec![C64::new(0.0, 0.0); d];
    for l in 0..d {
        let c = C64::from_polar(norm, -g0 * (n as f64 + beta) * l as f64);
        for (v, p) in vector.iter_mut().zip(phase_state(d, l as i64)) {
            *v += c * p;
        }
    }
    Ok(ShiftedFock { d, n, beta, vector })
}

fn two_j(j: f64) -> Result<usize, AaError> {
    let t = 2.0 * j;
    let r = t.round();
    if !(r >= 0.0) || (t - r).abs() > 1e-12 {
        return Err(AaError::BadAction(j));
    }
    Ok(r as usize)
}

/// The kernel as a dense matrix.
pub fn delta_ct(d: usize, j: f64, theta: f64) -> Result<CMat, AaError> {
    let tj = two_j(j)?;
    let mut m = CMat::zeros(d);
    for a in 0..d {
        if let Some(b) = tj.checked_sub(a).filter(|&b| b < d) {
            let k = b as f64 - a as f64;
            m[(a, b)] = C64::from_polar(1.0 / TAU, -k * theta);
        }
    }
    Ok(m)
}

fn amp(psi: &StateVec, twice: i64) -> C64 {
    if twice % 2 != 0 || twice < 0 || twice / 2 >= psi.d as i64 {
        C64::new(0.0, 0.0)
    } else {
        psi.amps[(twice / 2) as usize]
    }
}

/// Complex value of the k-sum, before taking the real part.
fn aa_wigner_complex(psi: &StateVec, tj: usize, theta: f64) -> C64 {
    let d = psi.d as i64;
    let tj = tj as i64;
    (-(d - 1)..=d - 1)
        .map(|k| amp(psi, tj - k).conj() * amp(psi, tj + k) * C64::from_polar(1.0, -(k as f64) * theta))
        .sum::<C64>()
        / TAU
}

/// `W(J,θ) = (1/2π) Σ_{|k|<D} e^{-ikθ} ψ*(J - k/2) ψ(J + k/2)`, with ψ zero off
/// the integer sector.
pub fn aa_wigner(psi: &StateVec, j: f64, theta: f64) -> Result<f64, AaError> {
    psi.check_normalized()?;
    Ok(aa_wigner_complex(psi, two_j(j)?, theta).re)
}

/// Uniform θ grid on [0, 2π).
pub fn theta_grid(t: usize) -> Vec<f64> {
    (0..t).map(|i| TAU * i as f64 / t as f64).collect()
}

pub fn j_grid(d: usize) -> Vec<f64> {
    (0..2 * d).map(|i| i as f64 / 2.0).collect()
}

/// Default θ sample count.
pub fn default_thetas(d: usize) -> usize {
    4 * d
}

/// W tabulated on the half-integer J grid (rows) and a uniform θ grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AAGrid {
    pub d: usize,
    pub j_values: Vec<f64>,
    pub theta_values: Vec<f64>,
    pub w: Vec<Vec<f64>>,
    /// Largest discarded imaginary part.
    pub max_imag: f64,
}

pub fn aa_grid(psi: &StateVec, thetas: usize) -> Result<AAGrid, AaError> {
    psi.check_normalized()?;
    if thetas == 0 {
        return Err(AaError::ThetaGridTooSmall { t: 0, min: 1 });
    }
    let theta_values = theta_grid(thetas);
    let mut max_imag = 0.0f64;
    let w = (0..2 * psi.d)
        .map(|tj| {
            theta_values
                .iter()
                .map(|&th| {
                    let z = aa_wigner_complex(psi, tj, th);
                    max_imag = max_imag.max(z.im.abs());
                    z.re
                })
                .collect()
        })
        .collect();
    Ok(AAGrid { d: psi.d, j_values: j_grid(psi.d), theta_values, w, max_imag })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginals {
    pub j_values: Vec<f64>,
    pub p_j: Vec<f64>,
    pub theta_values: Vec<f64>,
    pub p_theta: Vec<f64>,
}

/// `P(J)` from the exact k = 0 term, `P(θ)` by summing W over the J grid with
/// unit weight.
pub fn aa_marginals(psi: &StateVec, grid: &AAGrid) -> Result<Marginals, AaError> {
    if psi.d != grid.d {
        return Err(AaError::DimMismatch(psi.d, grid.d));
    }
    let p_j = (0..2 * psi.d as i64).map(|tj| amp(psi, tj).norm_sqr()).collect();
    let p_theta = (0..grid.theta_values.len()).map(|c| grid.w.iter().map(|row| row[c]).sum()).collect();
    Ok(Marginals { j_values: grid.j_values.clone(), p_j, theta_values: grid.theta_values.clone(), p_theta })
}

/// Complex symbol table on the (J, θ) grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolTable {
    pub j_values: Vec<f64>,
    pub theta_values: Vec<f64>,
    pub values: Vec<Vec<C64>>,
}

/// `f(J,θ) = 2π Tr{F Δ_CT(J,θ)}`.
pub fn wwm_symbol(f: &CMat, thetas: usize) -> Result<SymbolTable, AaError> {
    let d = f.dim();
    let theta_values = theta_grid(thetas);
    let values = (0..2 * d)
        .map(|tj| {
            theta_values
                .iter()
                .map(|&th| {
                    (0..d)
                        .filter_map(|a| tj.checked_sub(a).filter(|&b| b < d).map(|b| (a, b)))
                        .map(|(a, b)| f[(b, a)] * C64::from_polar(1.0, -(b as f64 - a as f64) * th))
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(SymbolTable { j_values: j_grid(d), theta_values, values })
}

/// `F = (2π/T) Σ_{J,θ} f(J,θ) Δ_CT(J,θ)`; exact when `T >= 2D - 1`.
pub fn reconstruct_from_symbol(table: &SymbolTable) -> Result<CMat, AaError> {
    let d = table.j_values.len() / 2;
    let t = table.theta_values.len();
    let mut out = CMat::zeros(d);
    for (ji, &j) in table.j_values.iter().enumerate() {
        for (ti, &th) in table.theta_values.iter().enumerate() {
            out.add_scaled(&delta_ct(d, j, th)?, table.values[ji][ti] * (TAU / t as f64));
        }
    }
    Ok(out)
}

/// `2π Tr{F Δ}` evaluated through a dense trace, as an independent path.
pub fn symbol_by_trace(f: &CMat, j: f64, theta: f64) -> Result<C64, AaError> {
    Ok(trace(&(f * &delta_ct(f.dim(), j, theta)?)) * TAU)
}

/// Spectrum `H(n) = Σ_p c_p n^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFn {
    pub coeffs: Vec<f64>,
}

impl SpectrumFn {
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self, AaError> {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        let s = SpectrumFn { coeffs };
        if s.degree() > MAX_DEGREE {
            return Err(AaError::DegreeTooHigh(s.degree()));
        }
        Ok(s)
    }

    pub fn linear(omega: f64) -> Self {
        SpectrumFn { coeffs: vec![0.0, omega] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// `H^{(p)}(x) / p!`.
    fn taylor(&self, x: f64, p: usize) -> f64 {
        let mut binom = 1.0;
        let mut sum = 0.0;
        for (i, c) in self.coeffs.iter().enumerate().skip(p) {
            if i > p {
                binom = binom * i as f64 / (i - p) as f64;
            }
            sum += c * binom * x.powi((i - p) as i32);
        }
        sum
    }

    /// `H(x + y) - H(x - y)` as `2 Σ_{p odd} H^{(p)}(x)/p! y^p`.
    pub fn odd_difference(&self, x: f64, y: f64) -> f64 {
        (1..=self.degree()).step_by(2).map(|p| 2.0 * self.taylor(x, p) * y.powi(p as i32)).sum()
    }
}

/// `ψ_n(t) = e^{-i H(n) t} ψ_n(0)`.
pub fn evolve(psi: &StateVec, h: &SpectrumFn, t: f64) -> StateVec {
    let amps = psi
        .amps
        .iter()
        .enumerate()
        .map(|(n, a)| a * C64::from_polar(1.0, -h.eval(n as f64) * t))
        .collect();
    StateVec { d: psi.d, amps }
}

/// `dW/dt = -i {H(J + (i/2)∂θ) - H(J - (i/2)∂θ)} W` with ∂θ applied on the
/// Fourier modes of each J row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoyalRhs {
    pub values: Vec<Vec<f64>>,
    pub max_imag: f64,
}

pub fn moyal_rhs(grid: &AAGrid, h: &SpectrumFn) -> Result<MoyalRhs, AaError> {
    if h.degree() > MAX_DEGREE {
        return Err(AaError::DegreeTooHigh(h.degree()));
    }
    let d = grid.d as i64;
    let t = grid.theta_values.len();
    let min = (2 * d - 1) as usize;
    if t < min {
        return Err(AaError::ThetaGridTooSmall { t, min });
    }
    let mut max_imag = 0.0f64;
    let mut values = Vec::with_capacity(grid.w.len());
    for (row, &j) in grid.w.iter().zip(&grid.j_values) {
        // W = Σ_k w_k e^{-ikθ}
        let modes: Vec<(i64, C64)> = (-(d - 1)..=d - 1)
            .map(|k| {
                let wk = row
                    .iter()
                    .zip(&grid.theta_values)
                    .map(|(w, th)| C64::from_polar(*w, k as f64 * th))
                    .sum::<C64>()
                    / t as f64;
                (k, wk * C64::new(0.0, -h.odd_difference(j, k as f64 / 2.0)))
            })
            .collect();
        let out: Vec<f64> = grid
            .theta_values
            .iter()
            .map(|th| {
                let z: C64 = modes.iter().map(|(k, c)| c * C64::from_polar(1.0, -(*k as f64) * th)).sum();
                max_imag = max_imag.max(z.im.abs());
                z.re
            })
            .collect();
        values.push(out);
    }
    Ok(MoyalRhs { values, max_imag })
}

/// One nonzero element `<n'|A(t)|n>` of `A(t) = e^{-iHt} E^r e^{iHt}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EomElement {
    pub n: usize,
    pub row: usize,
    pub wraps: bool,
    /// `H(n) - H(n')`, the rate read off `i dA/dt = [H, A]`.
    pub direct_delta: f64,
    /// `H(n + r) - H(n)`.
    pub literal_delta: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EomReport {
    pub d: usize,
    pub r: usize,
    /// Largest `|i dA/dt + elem (H(n) - H(n'))|` over elements and times.
    pub direct_residual: f64,
    /// Largest `|direct - literal|` over non-wrapping elements.
    pub literal_mismatch: f64,
    pub elements: Vec<EomElement>,
}

/// Differentiates `A(t)` through the commutator `[H, A(t)]` at each sample
/// time and compares element rates against the direct and literal forms.
pub fn phase_op_eom_check(d: usize, h: &SpectrumFn, r: usize, t_samples: &[f64]) -> EomReport {
    let r = r % d.max(1);
    let hn: Vec<f64> = (0..d).map(|n| h.eval(n as f64)).collect();
    let hmat = CMat::from_diag(&hn.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
    let mut er = CMat::zeros(d);
    for n in 0..d {
        er[((n + d - r) % d, n)] = C64::new(1.0, 0.0);
    }
    let tol = 1e-9 * hn.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut direct_residual = 0.0f64;
    for &t in t_samples {
        let u = CMat::from_diag(&hn.iter().map(|&x| C64::from_polar(1.0, -x * t)).collect::<Vec<_>>());
        let ud = CMat::from_diag(&hn.iter().map(|&x| C64::from_polar(1.0, x * t)).collect::<Vec<_>>());
        let a = &(&u * &er) * &ud;
        let i_dadt = commutator(&hmat, &a);
        for n in 0..d {
            let row = (n + d - r) % d;
            let want = -a[(row, n)] * (hn[n] - hn[row]);
            direct_residual = direct_residual.max((i_dadt[(row, n)] - want).norm());
        }
    }
    let mut literal_mismatch = 0.0f64;
    let elements = (0..d)
        .map(|n| {
            let row = (n + d - r) % d;
            let wraps = n < r;
            let direct_delta = hn[n] - hn[row];
            let literal_delta = h.eval((n + r) as f64) - hn[n];
            let gap = (direct_delta - literal_delta).abs();
            if !wraps {
                literal_mismatch = literal_mismatch.max(gap);
            }
            EomElement { n, row, wraps, direct_delta, literal_delta, agrees: gap <= tol }
        })
        .collect();
    EomReport { d, r, direct_residual, literal_mismatch, elements }
}

/// `(1/2π) |Σ_b ψ_b e^{-ibθ}|^2`, the closed form of the angle marginal.
pub fn angle_marginal_closed_form(psi: &StateVec, theta: f64) -> f64 {
    let s: C64 = psi.amps.iter().enumerate().map(|(b, a)| a * C64::from_polar(1.0, -(b as f64) * theta)).sum();
    s.norm_sqr() / TAU
}

/// `(|n> + |n-1>)/√2`.
pub fn split_state(d: usize, n: usize) -> StateVec {
    let mut amps = vec![C64::new(0.0, 0.0); d];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    amps[n % d] += C64::new(s, 0.0);
    amps[(n + d - 1) % d] += C64::new(s, 0.0);
    StateVec { d, amps }
}

/// Uniform angle density.
pub const FLAT_ANGLE_DENSITY: f64 = 1.0 / (2.0 * PI);
