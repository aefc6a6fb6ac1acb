//! Discrete Heisenberg-Weyl groups: divisibility analysis of the orders,
//! the canonical Weyl pair and the search for a unitary partner that cycles
//! the spectrum of a given unitary.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{eig_unitary, CMat, EigenSpace, LinalgError, C64};
use crate::modring::gcd;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HwError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Orders `a`, `b`, `c` of the generators `G`, `O` and the central phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaSpec {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub a_prime: Option<u64>,
    pub b_prime: Option<u64>,
    pub valid: bool,
    pub irrep_count: u64,
}

/// The group is well defined iff `c | a` and `c | b`; then `d = gcd(a,b,c) = c`
/// and there are `a' b'` irreducible representations of dimension d.
pub fn gamma_analyze(a: u64, b: u64, c: u64) -> GammaSpec {
    let d = gcd(gcd(a, b), c);
    let valid = c != 0 && a.is_multiple_of(c) && b.is_multiple_of(c);
    let (a_prime, b_prime, irrep_count) = if valid {
        (Some(a / d), Some(b / d), (a / d) * (b / d))
    } else {
        (None, None, 0)
    };
    GammaSpec { a, b, c, d, a_prime, b_prime, valid, irrep_count }
}

/// `G = diag(1, W, ..., W^{d-1})`, `O` the cyclic lower shift, `W = e^{2 pi i/d}`;
/// they satisfy `G O = W O G`.
pub fn weyl_pair(d: usize) -> (CMat, CMat, C64) {
    let omega = C64::from_polar(1.0, std::f64::consts::TAU / d as f64);
    let g = CMat::from_diag(&(0..d).map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64)).collect::<Vec<_>>());
    let mut o = CMat::zeros(d);
    for k in 0..d {
        o[((k + 1) % d, k)] = C64::new(1.0, 0.0);
    }
    (g, o, omega)
}

#[derive(Debug, Clone)]
pub enum Partner {
    Found { o: CMat, omega: C64 },
    /// Spectrum is not a uniform root-of-unity ladder; the clustered
    /// eigenvalues and multiplicities are returned as a diagnostic.
    Absent { spectrum: Vec<(C64, usize)> },
}

impl Partner {
    pub fn is_found(&self) -> bool {
        matches!(self, Partner::Found { .. })
    }
}

fn fix_phase(v: &[C64], tol: f64) -> Vec<C64> {
    match v.iter().find(|z| z.norm() > tol) {
        Some(z) => {
            let rot = z.conj() / z.norm();
            v.iter().map(|x| x * rot).collect()
        }
        None => v.to_vec(),
    }
}

/// Looks for a unitary `O` with `g O = W O g`, `W = e^{2 pi i / p}`, cycling the
/// `p >= 2` eigenspaces of `g`.
pub fn partner_exists(g: &CMat, tol: f64) -> Result<Partner, HwError> {
    let spaces = eig_unitary(g, tol)?;
    let spectrum: Vec<(C64, usize)> = spaces.iter().map(|s| (s.value, s.multiplicity)).collect();
    let absent = || Ok(Partner::Absent { spectrum: spectrum.clone() });
    let p = spaces.len();
    if p < 2 || spaces.iter().any(|s| s.multiplicity != spaces[0].multiplicity) {
        return absent();
    }
    let omega = C64::from_polar(1.0, std::f64::consts::TAU / p as f64);
    // clusters are sorted by angle, so a ladder steps by omega from one to the next
    let ladder_tol = (tol * 10.0).max(1e-9);
    for k in 0..p {
        let next = spaces[(k + 1) % p].value;
        if (next - spaces[k].value * omega).norm() > ladder_tol {
            return absent();
        }
    }
    let n = g.dim();
    let mut o = CMat::zeros(n);
    let fixed: Vec<Vec<Vec<C64>>> = spaces
        .iter()
        .map(|s: &EigenSpace| s.basis.iter().map(|v| fix_phase(v, tol)).collect())
        .collect();
    for k in 0..p {
        let (from, to) = (&fixed[k], &fixed[(k + 1) % p]);
        for (src, dst) in from.iter().zip(to) {
            for i in 0..n {
                for j in 0..n {
                    o[(i, j)] += dst[i] * src[j].conj();
                }
            }
        }
    }
    Ok(Partner::Found { o, omega })
}
