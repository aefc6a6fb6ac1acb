//! Admissible q-oscillator at a root of unity, the u_q sl(2) realization on
//! Schwinger operators, and the unitary phase operator.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{adjoint, commutator, mat_pow, CMat, C64};
use crate::schwinger::{fourier, gamma0, half_phase, lattice_s, root_of_unity, PhaseVec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QoscError {
    #[error("q-oscillator needs an odd dimension >= 3, got {0}")]
    BadDimension(usize),
    #[error("deformation label must be nonzero mod {d}, got {kappa}")]
    DegenerateKappa { kappa: i64, d: usize },
    #[error("cross product of the two labels vanishes mod {0}")]
    DegenerateCross(usize),
    #[error("dimension must be at least 2, got {0}")]
    TooSmall(usize),
}

/// Named Frobenius residual of one algebraic relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationResidual {
    pub name: String,
    pub residual: f64,
}

fn rel(name: &str, residual: f64) -> RelationResidual {
    RelationResidual { name: name.to_string(), residual }
}

#[derive(Debug, Clone)]
pub struct QOscillator {
    pub d: usize,
    pub kappa: i64,
    /// `q = exp(-i g0 kappa)`.
    pub q: C64,
    /// `C = 1/|sin(g0 kappa)|`.
    pub c: f64,
    /// Structure function; `A^H A = diag(f)`.
    pub f: Vec<f64>,
    pub a: CMat,
    pub adag: CMat,
    /// `Q = q^{-N - (D-1)/2}`.
    pub q_op: CMat,
}

/// `(q^x - q^{-x}) / (q - q^{-1})` for `q = exp(-i g0 kappa)`, which is real.
fn q_number(d: usize, kappa: i64, x: f64) -> f64 {
    let th = gamma0(d) * kappa as f64;
    (th * x).sin() / th.sin()
}

pub fn build_qosc(d: usize, kappa: i64) -> Result<QOscillator, QoscError> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(QoscError::BadDimension(d));
    }
    if kappa.rem_euclid(d as i64) == 0 {
        return Err(QoscError::DegenerateKappa { kappa, d });
    }
    let half = ((d - 1) / 2) as i64;
    let q = root_of_unity(d, -kappa);
    let c = 1.0 / (gamma0(d) * kappa as f64).sin().abs();
    let f: Vec<f64> = (0..d).map(|n| q_number(d, kappa, (n as i64 + half) as f64) + c).collect();
    let mut a = CMat::zeros(d);
    for n in 0..d {
        a[((n + d - 1) % d, n)] = C64::new(f[n].max(0.0).sqrt(), 0.0);
    }
    let adag = adjoint(&a);
    let q_op = CMat::from_diag(&(0..d).map(|n| root_of_unity(d, kappa * (n as i64 + half))).collect::<Vec<_>>());
    Ok(QOscillator { d, kappa, q, c, f, a, adag, q_op })
}

/// Residuals of `AQ = q^{-1} QA`, `A^H A = C + [N]` and
/// `A A^H - q A^H A = (1-q) C + Q`, with `[N] = (Q^{-1} - Q)/(q - q^{-1})`.
pub fn qosc_algebra_residuals(o: &QOscillator) -> Vec<RelationResidual> {
    let d = o.d;
    let id = CMat::identity(d);
    let qinv = o.q.inv();
    let q_op_inv = adjoint(&o.q_op);
    let bracket_n = (&q_op_inv - &o.q_op).scale((o.q - qinv).inv());
    let aq = (&o.a * &o.q_op).dist(&(&o.q_op * &o.a).scale(qinv));
    let ada = (&o.adag * &o.a).dist(&(&id.scale_re(o.c) + &bracket_n));
    let lhs = &(&o.a * &o.adag) - &(&o.adag * &o.a).scale(o.q);
    let rhs = &id.scale((C64::new(1.0, 0.0) - o.q) * o.c) + &o.q_op;
    vec![
        rel("a_q_exchange", aq),
        rel("adag_a_structure", ada),
        rel("q_commutator", lhs.dist(&rhs)),
    ]
}

/// Generators `J- = d S_m + d' S_m'`, `J+ = J-^H`, `L = S_{m-m'}`.
#[derive(Debug, Clone)]
pub struct UqSl2 {
    pub d: usize,
    pub kappa: i64,
    pub q: C64,
    pub q_half: C64,
    pub coeff: C64,
    pub j_minus: CMat,
    pub j_plus: CMat,
    pub l: CMat,
}

pub fn uqsl2_from_schwinger(d: usize, m: &PhaseVec, mprime: &PhaseVec) -> Result<UqSl2, QoscError> {
    if d < 2 {
        return Err(QoscError::TooSmall(d));
    }
    let kappa = m.cross(mprime) as i64;
    if kappa == 0 {
        return Err(QoscError::DegenerateCross(d));
    }
    let (a1, a2) = (m.m1 as i64, m.m2 as i64);
    let (b1, b2) = (mprime.m1 as i64, mprime.m2 as i64);
    // for even D the half phase depends on the integer cross product mod 2D
    let q_half = half_phase(d, -(a1 * b2 - a2 * b1));
    let q = q_half * q_half;
    let coeff = C64::new(1.0 / (2.0 * q_half.arg().sin().abs()), 0.0);
    let s_m = lattice_s(d, a1, a2).to_dense();
    let s_mp = lattice_s(d, b1, b2).to_dense();
    let j_minus = &s_m.scale(coeff) + &s_mp.scale(coeff);
    let j_plus = adjoint(&j_minus);
    let l = lattice_s(d, a1 - b1, a2 - b2).to_dense();
    Ok(UqSl2 { d, kappa, q, q_half, coeff, j_minus, j_plus, l })
}

/// Residuals of `J- L = q L J-`, `J+ L = q^{-1} L J+`,
/// `[J-, J+] = -(L - L^{-1})/(q^{1/2} - q^{-1/2})` and of the coefficient
/// constraint `d d'^* = -(q^{1/2} - q^{-1/2})^{-2}`.
pub fn uqsl2_residuals(u: &UqSl2) -> Vec<RelationResidual> {
    let linv = adjoint(&u.l);
    let r1 = (&u.j_minus * &u.l).dist(&(&u.l * &u.j_minus).scale(u.q));
    let r2 = (&u.j_plus * &u.l).dist(&(&u.l * &u.j_plus).scale(u.q.inv()));
    let denom = u.q_half - u.q_half.inv();
    let rhs = (&u.l - &linv).scale(-denom.inv());
    let r3 = commutator(&u.j_minus, &u.j_plus).dist(&rhs);
    let constraint = (u.coeff * u.coeff.conj() + (denom * denom).inv()).norm();
    vec![
        rel("jminus_l_exchange", r1),
        rel("jplus_l_exchange", r2),
        rel("ladder_commutator", r3),
        rel("coefficient_constraint", constraint),
    ]
}

/// Cyclic lowering `E |n> = |n-1 mod D>` with its eigenbasis
/// `|phi>_r = D^{-1/2} sum_n e^{i g0 n r} |n>` (columns).
#[derive(Debug, Clone)]
pub struct PhaseOp {
    pub d: usize,
    pub e: CMat,
    pub phase_states: CMat,
}

pub fn phase_state(d: usize, r: i64) -> Vec<C64> {
    let norm = 1.0 / (d as f64).sqrt();
    (0..d).map(|n| root_of_unity(d, n as i64 * r) * norm).collect()
}

pub fn phase_operator(d: usize) -> Result<PhaseOp, QoscError> {
    if d < 2 {
        return Err(QoscError::TooSmall(d));
    }
    let mut e = CMat::zeros(d);
    for n in 0..d {
        e[((n + d - 1) % d, n)] = C64::new(1.0, 0.0);
    }
    let cols: Vec<Vec<C64>> = (0..d as i64).map(|r| phase_state(d, r)).collect();
    Ok(PhaseOp { d, e, phase_states: CMat::from_columns(&cols) })
}

/// `max_r ||E |phi>_r - e^{i g0 r} |phi>_r||`.
pub fn phase_eigen_residual(p: &PhaseOp) -> f64 {
    (0..p.d)
        .map(|r| {
            let v = p.phase_states.column(r);
            let ev = p.e.mul_vec(&v);
            let lam = root_of_unity(p.d, r as i64);
            ev.iter().zip(&v).map(|(a, b)| (a - lam * b).norm_sqr()).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max)
}

/// Phase states are DFT columns with the sign of the label flipped:
/// `|phi>_r = F e_{-r}`. Returns the largest deviation.
pub fn phase_states_vs_fourier(p: &PhaseOp) -> f64 {
    let f = fourier(p.d);
    (0..p.d).map(|r| (0..p.d).map(|n| (p.phase_states[(n, r)] - f[(n, (p.d - r) % p.d)]).norm()).fold(0.0, f64::max)).fold(0.0, f64::max)
}

/// One matrix element of `[N, E^r]` that wraps around the cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WrapElement {
    pub n: usize,
    pub row: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberPhaseReport {
    pub d: usize,
    pub kappa: i64,
    pub r: usize,
    /// `max_{G, l in 0..D} ||Q^G E^l - q^{G l} E^l Q^G||_F`.
    pub q_e_exchange: f64,
    /// Largest deviation of `<n-r|[N,E^r]|n>` from `-r` over `n >= r`.
    pub non_wrap_residual: f64,
    /// Elements with `n < r`; each carries `D - r`.
    pub wrap_elements: Vec<WrapElement>,
    /// Largest deviation of the wrap elements from `D - r`.
    pub wrap_residual: f64,
}

pub fn number_phase_commutators(d: usize, kappa: i64, r: usize) -> Result<NumberPhaseReport, QoscError> {
    let osc = build_qosc(d, kappa)?;
    let p = phase_operator(d)?;
    let mut q_e_exchange = 0.0f64;
    let half = ((d - 1) / 2) as i64;
    // powers taken on the integer exponents so the phases stay exact
    for g in 0..d as i64 {
        let qg = CMat::from_diag(&(0..d).map(|n| root_of_unity(d, kappa * g * (n as i64 + half))).collect::<Vec<_>>());
        if g == 1 {
            q_e_exchange = q_e_exchange.max(qg.dist(&osc.q_op));
        }
        for l in 0..d as u64 {
            let el = mat_pow(&p.e, l);
            let phase = root_of_unity(d, -kappa * g * l as i64);
            q_e_exchange = q_e_exchange.max((&qg * &el).dist(&(&el * &qg).scale(phase)));
        }
    }
    let r_red = r % d;
    let number = CMat::from_diag(&(0..d).map(|n| C64::new(n as f64, 0.0)).collect::<Vec<_>>());
    let comm = commutator(&number, &mat_pow(&p.e, r as u64));
    let mut non_wrap_residual = 0.0f64;
    let mut wrap_elements = Vec::new();
    let mut wrap_residual = 0.0f64;
    for n in 0..d {
        let row = (n + d - r_red) % d;
        let value = comm[(row, n)];
        if n >= r_red {
            non_wrap_residual = non_wrap_residual.max((value - C64::new(-(r_red as f64), 0.0)).norm());
        } else {
            wrap_residual = wrap_residual.max((value - C64::new((d - r_red) as f64, 0.0)).norm());
            wrap_elements.push(WrapElement { n, row, value: value.re });
        }
    }
    Ok(NumberPhaseReport { d, kappa, r: r_red, q_e_exchange, non_wrap_residual, wrap_elements, wrap_residual })
}
