//! Unitary representatives of SL(2, Z_D) built from Gauss sums, for odd prime D.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{adjoint, mat_mul, trace, CMat, C64};
use crate::modring::{gauss_sum, is_odd_prime, mod_inverse, reduce, sl2_inv, sl2_mul, ModError, SL2Elem};
use crate::schwinger::{root_of_unity, schwinger_mono, PhaseVec, WeylMono};
use crate::wk::WkBasis;

/// Residual above which a phase-fitted product is not accepted as projective.
pub const PROJECTIVE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetaplecticError {
    #[error("dimension must be an odd prime, got {0}")]
    NotOddPrime(usize),
    #[error(transparent)]
    Mod(#[from] ModError),
    #[error("no construction case applies to {0:?}")]
    Degenerate(SL2Elem),
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(usize, usize),
    #[error("product is not a phase multiple: residual {residual:.3e}")]
    NotProjective { residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GCase {
    /// `delta = 2 - s1 - t2 != 0`.
    Generic,
    /// `delta = 0`, `t1 != 0`.
    Parabolic,
    /// `delta = t1 = 0`, `s2 != 0`.
    Diagonal,
    Identity,
}

#[derive(Debug, Clone)]
pub struct MetaplecticOp {
    pub r: SL2Elem,
    pub d: usize,
    pub mat: CMat,
    pub case_tag: GCase,
}

/// Basis element attached to the symbol `{a, b}` of the Gauss-sum expansion.
/// The symbol labels the element at `(b, -a)`; with that reading `G^H S_m G`
/// lands on `S_{Rm}`.
fn symbol(d: usize, a: i64, b: i64) -> WeylMono {
    schwinger_mono(&PhaseVec::new(d, b, -a))
}

/// `2 - s1 - t2 mod D`.
pub fn delta_of(r: &SL2Elem) -> usize {
    reduce(2 - r.s1 as i64 - r.t2 as i64, r.d)
}

pub fn case_of(r: &SL2Elem) -> GCase {
    if r.is_identity() {
        GCase::Identity
    } else if delta_of(r) != 0 {
        GCase::Generic
    } else if r.t1 != 0 {
        GCase::Parabolic
    } else {
        GCase::Diagonal
    }
}

pub fn metaplectic_g(r: &SL2Elem) -> Result<MetaplecticOp, MetaplecticError> {
    let d = r.d;
    if !is_odd_prime(d) {
        return Err(MetaplecticError::NotOddPrime(d));
    }
    if r.det() != 1 {
        return Err(ModError::BadDeterminant { det: r.det(), d }.into());
    }
    let di = d as i64;
    let (s1, t1, s2, t2) = (r.s1 as i64, r.t1 as i64, r.s2 as i64, r.t2 as i64);
    let case_tag = case_of(r);
    let mut mat = CMat::zeros(d);
    match case_tag {
        GCase::Identity => mat = CMat::identity(d),
        GCase::Generic => {
            let delta = delta_of(r) as i64;
            let inv = mod_inverse(2 * delta, d)? as i64;
            let pref = gauss_sum(1, d)?.value * gauss_sum(delta, d)?.value / d as f64;
            for m1 in 0..di {
                for m2 in 0..di {
                    let q = reduce(t1 * m1 * m1 + (t2 - s1) * m1 * m2 - s2 * m2 * m2, d) as i64;
                    let phase = root_of_unity(d, q * inv);
                    symbol(d, m1, m2).add_into(&mut mat, pref * phase);
                }
            }
        }
        GCase::Parabolic => {
            let inv2t = mod_inverse(2 * t1, d)? as i64;
            let invt = mod_inverse(t1, d)? as i64;
            let pref = gauss_sum(-2 * t1, d)?.value / (d as f64).sqrt();
            for m1 in 0..di {
                let phase = root_of_unity(d, m1 * m1 % di * inv2t);
                let a = reduce(m1 * (s1 - 1), d) as i64 * invt;
                symbol(d, a, m1).add_into(&mut mat, pref * phase);
            }
        }
        GCase::Diagonal => {
            if s2 == 0 {
                return Err(MetaplecticError::Degenerate(*r));
            }
            let inv2s = mod_inverse(2 * s2, d)? as i64;
            let pref = gauss_sum(-2 * s2, d)?.value / (d as f64).sqrt();
            for m1 in 0..di {
                let phase = root_of_unity(d, -(m1 * m1 % di) * inv2s);
                symbol(d, m1, 0).add_into(&mut mat, pref * phase);
            }
        }
    }
    Ok(MetaplecticOp { r: *r, d, mat, case_tag })
}

/// `max_m ||G^H S_m G - S_{Rm}||_F`.
pub fn covariance_error(g: &MetaplecticOp) -> f64 {
    let gd = adjoint(&g.mat);
    PhaseVec::all(g.d)
        .map(|m| {
            let lhs = &gd * &schwinger_mono(&m).mul_dense(&g.mat);
            let (a, b) = g.r.apply(m.m1 as i64, m.m2 as i64);
            lhs.dist(&schwinger_mono(&PhaseVec { d: g.d, m1: a, m2: b }).to_dense())
        })
        .fold(0.0, f64::max)
}

/// `max_n ||G Delta(n) G^H - Delta(R^{-1} n)||_F` against a prebuilt basis.
pub fn wk_covariance_error_with(g: &MetaplecticOp, basis: &WkBasis) -> f64 {
    let gd = adjoint(&g.mat);
    let rinv = sl2_inv(&g.r);
    PhaseVec::all(g.d)
        .map(|n| {
            let lhs = &(&g.mat * basis.delta(&n)) * &gd;
            let (a, b) = rinv.apply(n.m1 as i64, n.m2 as i64);
            lhs.dist(basis.delta(&PhaseVec { d: g.d, m1: a, m2: b }))
        })
        .fold(0.0, f64::max)
}

pub fn wk_covariance_error(g: &MetaplecticOp) -> f64 {
    wk_covariance_error_with(g, &WkBasis::new(g.d))
}

/// Unit-modulus `lambda` minimizing `||a - lambda b||_F`, with that residual.
pub fn phase_fit(a: &CMat, b: &CMat) -> (C64, f64) {
    let overlap = trace(&(&adjoint(b) * a));
    let lambda = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    (lambda, a.dist(&b.scale(lambda)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveFit {
    pub lambda: C64,
    pub residual: f64,
}

/// Phase relating `G(r1) G(r2)` to the single operator for the composite map.
/// Since `G^H S_m G = S_{Rm}`, conjugating by `G(r1) G(r2)` applies r1 first
/// and then r2, so the composite is `G(r2 r1)`.
pub fn projective_multiplier(r1: &SL2Elem, r2: &SL2Elem) -> Result<ProjectiveFit, MetaplecticError> {
    if r1.d != r2.d {
        return Err(MetaplecticError::ModulusMismatch(r1.d, r2.d));
    }
    let g1 = metaplectic_g(r1)?;
    let g2 = metaplectic_g(r2)?;
    let g12 = metaplectic_g(&sl2_mul(r2, r1)?)?;
    let prod = mat_mul(&g1.mat, &g2.mat).expect("equal dimensions");
    let (lambda, residual) = phase_fit(&prod, &g12.mat);
    if residual > PROJECTIVE_TOL {
        return Err(MetaplecticError::NotProjective { residual });
    }
    Ok(ProjectiveFit { lambda, residual })
}

/// Residual of `G(r^{-1}) = lambda G(r)^H` after phase fitting.
pub fn inverse_residual(r: &SL2Elem) -> Result<f64, MetaplecticError> {
    let g = metaplectic_g(r)?;
    let ginv = metaplectic_g(&sl2_inv(r))?;
    Ok(phase_fit(&ginv.mat, &adjoint(&g.mat)).1)
}

/// Least `k <= max_k` with `G^k` proportional to the identity.
pub fn projective_order(g: &MetaplecticOp, max_k: u64, tol: f64) -> Option<u64> {
    let id = CMat::identity(g.d);
    let mut p = g.mat.clone();
    for k in 1..=max_k {
        if phase_fit(&p, &id).1 <= tol {
            return Some(k);
        }
        p = &p * &g.mat;
    }
    None
}
