//! SL(2,R) canonical transformations at three levels: 2x2 subgroup matrices,
//! finite-dimensional polynomial representations of the generators, and
//! finite-difference checks of phase-space eigenfunctions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{adjoint, commutator, CMat, C64};

pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Sl2rError {
    #[error("generator index must be 1, 2 or 3, got {0}")]
    BadIndex(u8),
    #[error("2*ell must be a nonnegative integer, got ell = {0}")]
    BadSpin(f64),
    #[error("point ({0}, {1}) is within the margin of a singular locus")]
    SingularLocus(f64, f64),
    #[error("grid needs margin > 2h and at least 2 samples per axis")]
    BadGrid,
    #[error("invariant out of range for {mode:?}: {reason}")]
    OutOfRange { mode: FactorMode, reason: String },
    #[error("truncation dimension must be at least 3, got {0}")]
    TooSmall(usize),
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_inv(a: &Mat2) -> Mat2 {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]
}

pub fn mat2_det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn mat2_dist(a: &Mat2, b: &Mat2) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s += (a[i][j] - b[i][j]).powi(2);
        }
    }
    s.sqrt()
}

fn mat2_lin(c: [f64; 3], k: [Mat2; 3]) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for (cj, kj) in c.iter().zip(k.iter()) {
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += cj * kj[i][j];
            }
        }
    }
    out
}

/// Exponential of a traceless 2x2 matrix, using `X^2 = -det(X) I`.
pub fn expm2(x: &Mat2) -> Mat2 {
    let s = -mat2_det(x);
    let (c, f) = if s > 0.0 {
        let r = s.sqrt();
        (r.cosh(), r.sinh() / r)
    } else if s < 0.0 {
        let r = (-s).sqrt();
        (r.cos(), r.sin() / r)
    } else {
        (1.0, 1.0)
    };
    [[c + f * x[0][0], f * x[0][1]], [f * x[1][0], c + f * x[1][1]]]
}

/// Tangent generators `k_j = d/dt Omega_j(t)` at `t = 0`.
pub fn generator_2x2(j: u8) -> Result<Mat2, Sl2rError> {
    match j {
        1 => Ok([[0.0, 0.5], [0.5, 0.0]]),
        2 => Ok([[0.0, 0.5], [-0.5, 0.0]]),
        3 => Ok([[0.5, 0.0], [0.0, -0.5]]),
        _ => Err(Sl2rError::BadIndex(j)),
    }
}

fn k_all() -> [Mat2; 3] {
    [generator_2x2(1).unwrap(), generator_2x2(2).unwrap(), generator_2x2(3).unwrap()]
}

/// Boost `Omega_1(psi)`, rotation `Omega_2(theta)` and squeeze `Omega_3(phi)`.
/// Rotation angles outside `(-pi, pi]` wrap onto the same 2x2 matrix up to sign.
pub fn subgroup_matrix(j: u8, t: f64) -> Result<Mat2, Sl2rError> {
    let h = t / 2.0;
    match j {
        1 => Ok([[h.cosh(), h.sinh()], [h.sinh(), h.cosh()]]),
        2 => Ok([[h.cos(), h.sin()], [-h.sin(), h.cos()]]),
        3 => Ok([[h.exp(), 0.0], [0.0, (-h).exp()]]),
        _ => Err(Sl2rError::BadIndex(j)),
    }
}

/// Coefficients `(x1, x2, x3)` of `m = x1 k1 + x2 k2 + x3 k3` for traceless m.
pub fn decompose_2x2(m: &Mat2) -> [f64; 3] {
    [m[0][1] + m[1][0], m[0][1] - m[1][0], m[0][0] - m[1][1]]
}

/// Hermitian generators as 2x2 complex matrices: `K_j = -i k_j`. They obey
/// `[K1,K2] = i K3`, `[K2,K3] = i K1`, `[K1,K3] = i K2`.
pub fn hermitized_2x2() -> [CMat; 3] {
    k_all().map(|k| CMat::from_fn(2, |i, j| C64::new(0.0, -k[i][j])))
}

/// Residuals of the three structure relations for a triple of matrices.
pub fn structure_residuals(k: &[CMat; 3]) -> [f64; 3] {
    let i = C64::new(0.0, 1.0);
    [
        commutator(&k[0], &k[1]).dist(&k[2].scale(i)),
        commutator(&k[1], &k[2]).dist(&k[0].scale(i)),
        commutator(&k[0], &k[2]).dist(&k[1].scale(i)),
    ]
}

/// Generators on homogeneous polynomials of degree 2l in `u = a1 + i a2`,
/// `v = a1 - i a2`; index `i` holds `u^{i} v^{2l - i}` (so `m = i - l`).
#[derive(Debug, Clone)]
pub struct PolyRep {
    pub two_ell: usize,
    pub k1: CMat,
    pub k2: CMat,
    pub k3: CMat,
}

impl PolyRep {
    pub fn ell(&self) -> f64 {
        self.two_ell as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_ell + 1
    }

    /// `K+ = K1 - i K3`: `e(m) -> -(l - m) e(m+1)`.
    pub fn k_plus(&self) -> CMat {
        &self.k1 - &self.k3.scale(C64::new(0.0, 1.0))
    }

    /// `K- = K1 + i K3`: `e(m) -> (l + m) e(m-1)`.
    pub fn k_minus(&self) -> CMat {
        &self.k1 + &self.k3.scale(C64::new(0.0, 1.0))
    }

    /// `K2^2 - K1^2 - K3^2`, equal to `l(l+1) I`.
    pub fn casimir(&self) -> CMat {
        &(&(&self.k2 * &self.k2) - &(&self.k1 * &self.k1)) - &(&self.k3 * &self.k3)
    }
}

pub fn poly_rep(ell: f64) -> Result<PolyRep, Sl2rError> {
    let two = 2.0 * ell;
    if !(two >= 0.0) || two.fract() != 0.0 || two > 1e6 {
        return Err(Sl2rError::BadSpin(ell));
    }
    let n = two as usize;
    let dim = n + 1;
    let mut k1 = CMat::zeros(dim);
    let mut k2 = CMat::zeros(dim);
    let mut k3 = CMat::zeros(dim);
    for i in 0..dim {
        // u^a v^b with a = i, b = n - i
        let (a, b) = (i as f64, (n - i) as f64);
        k2[(i, i)] = C64::new((a - b) / 2.0, 0.0);
        // (v d_u - u d_v)/2 and -i(u d_v + v d_u)/2
        if i > 0 {
            k1[(i - 1, i)] = C64::new(a / 2.0, 0.0);
            k3[(i - 1, i)] = C64::new(0.0, -a / 2.0);
        }
        if i < n {
            k1[(i + 1, i)] = C64::new(-b / 2.0, 0.0);
            k3[(i + 1, i)] = C64::new(0.0, -b / 2.0);
        }
    }
    Ok(PolyRep { two_ell: n, k1, k2, k3 })
}

/// Truncated Fock-space generators `K1 = (x^2 - p^2)/4`, `K2 = (x^2 + p^2)/4`,
/// `K3 = (xp + px)/4` of dimension `m`.
pub fn qho_generators(m: usize) -> Result<[CMat; 3], Sl2rError> {
    if m < 3 {
        return Err(Sl2rError::TooSmall(m));
    }
    let mut a = CMat::zeros(m);
    for n in 1..m {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let ad = adjoint(&a);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&a + &ad).scale_re(s);
    let p = (&ad - &a).scale(C64::new(0.0, s));
    let x2 = &x * &x;
    let p2 = &p * &p;
    let k1 = (&x2 - &p2).scale_re(0.25);
    let k2 = (&x2 + &p2).scale_re(0.25);
    let k3 = (&(&x * &p) + &(&p * &x)).scale_re(0.25);
    Ok([k1, k2, k3])
}

/// Structure residuals restricted to the leading `(m-2) x (m-2)` block, away
/// from the truncation edge.
pub fn qho_interior_residuals(k: &[CMat; 3]) -> [f64; 3] {
    let m = k[0].dim();
    let block = |x: &CMat| CMat::from_fn(m - 2, |i, j| x[(i, j)]);
    let i = C64::new(0.0, 1.0);
    [
        block(&commutator(&k[0], &k[1])).dist(&block(&k[2].scale(i))),
        block(&commutator(&k[1], &k[2])).dist(&block(&k[0].scale(i))),
        block(&commutator(&k[0], &k[2])).dist(&block(&k[1].scale(i))),
    ]
}

/// Sampling region for finite-difference checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Rect { x: (f64, f64), y: (f64, f64) },
    /// Polar sector; angles in radians.
    Annulus { r: (f64, f64), phi: (f64, f64) },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub region: Region,
    pub samples: usize,
    /// Finite-difference step.
    pub h: f64,
    /// Minimum distance from any singular locus.
    pub margin: f64,
}

impl GridSpec {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.samples;
        let lerp = |(lo, hi): (f64, f64), i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(match self.region {
                    Region::Rect { x, y } => (lerp(x, i), lerp(y, j)),
                    Region::Annulus { r, phi } => {
                        let (rr, pp) = (lerp(r, i), lerp(phi, j));
                        (rr * pp.cos(), rr * pp.sin())
                    }
                });
            }
        }
        out
    }

    pub fn with_step(&self, h: f64) -> GridSpec {
        GridSpec { h, ..*self }
    }
}

fn cpow_real(base: f64, exponent: C64) -> C64 {
    C64::new(base, 0.0).powc(exponent)
}

/// The l = 0 eigenfunctions with unit normalization:
/// `e1 = ((a1+a2)/(a1-a2))^{i g}`, `e2 = ((a1+i a2)/(a1-i a2))^{g}`,
/// `e3 = (a1/a2)^{i g}`.
pub fn eigenfunction(j: u8, alpha: (f64, f64), gamma: f64) -> Result<C64, Sl2rError> {
    let (a1, a2) = alpha;
    let ig = C64::new(0.0, gamma);
    match j {
        1 => Ok(cpow_real((a1 + a2) / (a1 - a2), ig)),
        2 => Ok(C64::from_polar(1.0, 2.0 * gamma * a2.atan2(a1))),
        3 => Ok(cpow_real(a1 / a2, ig)),
        _ => Err(Sl2rError::BadIndex(j)),
    }
}

fn locus_distance(j: u8, alpha: (f64, f64), gamma: f64) -> f64 {
    let (a1, a2) = alpha;
    match j {
        1 => (a1 - a2).abs().min((a1 + a2).abs()) / std::f64::consts::SQRT_2,
        2 => {
            let rho = a1.hypot(a2);
            if (2.0 * gamma).fract() == 0.0 {
                rho
            } else if a1 <= 0.0 {
                rho.min(a2.abs())
            } else {
                rho
            }
        }
        _ => a1.abs().min(a2.abs()),
    }
}

type Field<'a> = &'a dyn Fn(f64, f64) -> C64;

/// `(d1 f, d2 f)` by centered differences.
fn gradient(f: Field, a1: f64, a2: f64, h: f64) -> (C64, C64) {
    let d1 = (f(a1 + h, a2) - f(a1 - h, a2)) / (2.0 * h);
    let d2 = (f(a1, a2 + h) - f(a1, a2 - h)) / (2.0 * h);
    (d1, d2)
}

/// `c1 K1 f + c2 K2 f + c3 K3 f` at a point, with
/// `K1 = -i(a2 d1 + a1 d2)/2`, `K2 = -i(a1 d2 - a2 d1)/2`, `K3 = -i(a1 d1 - a2 d2)/2`.
fn apply_generators(c: [f64; 3], f: Field, a1: f64, a2: f64, h: f64) -> C64 {
    let (d1, d2) = gradient(f, a1, a2, h);
    let mi2 = C64::new(0.0, -0.5);
    let k1 = mi2 * (d1 * a2 + d2 * a1);
    let k2 = mi2 * (d2 * a1 - d1 * a2);
    let k3 = mi2 * (d1 * a1 - d2 * a2);
    k1 * c[0] + k2 * c[1] + k3 * c[2]
}

/// Residual at step h, at step h/2, and their ratio (about 4 for a clean
/// second-order scheme).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenCheck {
    pub residual: f64,
    pub residual_half: f64,
    pub ratio: f64,
}

fn max_relative_residual(
    pts: &[(f64, f64)],
    c: [f64; 3],
    f: Field,
    gamma: f64,
    h: f64,
) -> f64 {
    pts.iter()
        .map(|&(a1, a2)| {
            let val = f(a1, a2);
            let k = apply_generators(c, f, a1, a2, h);
            (k - val * gamma).norm() / val.norm()
        })
        .fold(0.0, f64::max)
}

fn check_grid(grid: &GridSpec) -> Result<(), Sl2rError> {
    if grid.samples < 2 || !(grid.h > 0.0) || !(grid.margin > 2.0 * grid.h) {
        return Err(Sl2rError::BadGrid);
    }
    Ok(())
}

fn run_check(
    grid: &GridSpec,
    c: [f64; 3],
    f: Field,
    gamma: f64,
    dist: &dyn Fn(f64, f64) -> f64,
) -> Result<EigenCheck, Sl2rError> {
    check_grid(grid)?;
    let pts = grid.points();
    if let Some(&(a1, a2)) = pts.iter().find(|&&(a1, a2)| dist(a1, a2) < grid.margin) {
        return Err(Sl2rError::SingularLocus(a1, a2));
    }
    let residual = max_relative_residual(&pts, c, f, gamma, grid.h);
    let residual_half = max_relative_residual(&pts, c, f, gamma, grid.h / 2.0);
    let ratio = if residual_half > 0.0 { residual / residual_half } else { f64::NAN };
    Ok(EigenCheck { residual, residual_half, ratio })
}

/// Finite-difference check of `K_j e_j = gamma e_j` on a grid.
pub fn grid_eigencheck(j: u8, gamma: f64, grid: &GridSpec) -> Result<EigenCheck, Sl2rError> {
    if !(1..=3).contains(&j) {
        return Err(Sl2rError::BadIndex(j));
    }
    let mut c = [0.0; 3];
    c[j as usize - 1] = 1.0;
    let f = move |a1: f64, a2: f64| eigenfunction(j, (a1, a2), gamma).unwrap();
    run_check(grid, c, &f, gamma, &|a1, a2| locus_distance(j, (a1, a2), gamma))
}

fn h_chi_map(a: f64, b: f64) -> Mat2 {
    mat2_mul(&subgroup_matrix(3, b).unwrap(), &subgroup_matrix(2, a).unwrap())
}

/// `h(alpha) = e3(M alpha, gamma)` with `M = Omega3(b) Omega2(a)`.
pub fn h_chi_eval(alpha: (f64, f64), gamma: f64, a: f64, b: f64) -> Result<C64, Sl2rError> {
    let m = h_chi_map(a, b);
    let beta = (m[0][0] * alpha.0 + m[0][1] * alpha.1, m[1][0] * alpha.0 + m[1][1] * alpha.1);
    if beta.0 == 0.0 || beta.1 == 0.0 {
        return Err(Sl2rError::SingularLocus(alpha.0, alpha.1));
    }
    eigenfunction(3, beta, gamma)
}

/// Coefficients of `(K1, K2, K3)` whose combination has `h` as eigenfunction.
/// The 2x2 generator is `M^{-1} k3 M`; on functions `k1 -> K1`, `k2 -> -K2`,
/// `k3 -> K3`.
pub fn h_chi_generator(a: f64, b: f64) -> [f64; 3] {
    let m = h_chi_map(a, b);
    let x = mat2_mul(&mat2_mul(&mat2_inv(&m), &generator_2x2(3).unwrap()), &m);
    let [x1, x2, x3] = decompose_2x2(&x);
    [x1, -x2, x3]
}

/// Finite-difference check that the transported function is an eigenfunction
/// of the pulled-back generator combination with eigenvalue gamma.
pub fn h_chi_check(gamma: f64, a: f64, b: f64, grid: &GridSpec) -> Result<EigenCheck, Sl2rError> {
    let c = h_chi_generator(a, b);
    let m = h_chi_map(a, b);
    let scale = m.iter().flatten().map(|x| x.abs()).sum::<f64>();
    let f = move |a1: f64, a2: f64| h_chi_eval((a1, a2), gamma, a, b).unwrap_or(C64::new(f64::NAN, 0.0));
    let dist = move |a1: f64, a2: f64| {
        let b1 = m[0][0] * a1 + m[0][1] * a2;
        let b2 = m[1][0] * a1 + m[1][1] * a2;
        b1.abs().min(b2.abs()) / scale
    };
    run_check(grid, c, &f, gamma, &dist)
}

/// Target direction of the conjugation in [`factor_lambda`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorMode {
    /// `L1^2 + L3^2 > L2^2`: conjugate to `k3`, `T = Omega2(a) Omega3(-b)`,
    /// `L = Lambda (sin a cosh b, sin a sinh b, cos a)`.
    ToK3,
    /// `L2^2 > L1^2 + L3^2`: conjugate to `k2`, `T = Omega1(a) Omega2(b)`,
    /// `L = Lambda (sinh a sin b, cosh a, sinh a cos b)`.
    ToK2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sl2rParam {
    pub lambda: [f64; 3],
}

impl Sl2rParam {
    /// Signed invariant `L1^2 + L3^2 - L2^2`.
    pub fn invariant(&self) -> f64 {
        let [l1, l2, l3] = self.lambda;
        l1 * l1 + l3 * l3 - l2 * l2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    pub mode: FactorMode,
    pub a: f64,
    pub b: f64,
    pub scale: f64,
    /// `|L - L(a, b, scale)|`.
    pub reconstruction_error: f64,
    /// `||exp(L.k) - T^{-1} exp(scale k_target) T||_F`.
    pub conjugation_residual: f64,
}

fn reconstruct(mode: FactorMode, a: f64, b: f64, s: f64) -> [f64; 3] {
    match mode {
        FactorMode::ToK3 => [s * a.sin() * b.cosh(), s * a.sin() * b.sinh(), s * a.cos()],
        FactorMode::ToK2 => [s * a.sinh() * b.sin(), s * a.cosh(), s * a.sinh() * b.cos()],
    }
}

pub fn factor_lambda(p: &Sl2rParam, mode: FactorMode) -> Result<Factorization, Sl2rError> {
    let [l1, l2, l3] = p.lambda;
    let inv = p.invariant();
    let out_of_range = |reason: &str| Err(Sl2rError::OutOfRange { mode, reason: reason.to_string() });
    let (a, b, s, target, t) = match mode {
        FactorMode::ToK3 => {
            if !(inv > 0.0) {
                return out_of_range("needs L1^2 + L3^2 > L2^2");
            }
            if !(l2.abs() < l1.abs() || (l1 == 0.0 && l2 == 0.0)) {
                return out_of_range("needs |L2| < |L1| or L1 = L2 = 0");
            }
            let s = inv.sqrt();
            let b = if l1 == 0.0 { 0.0 } else { (l2 / l1).atanh() };
            let a = (l1 / b.cosh()).atan2(l3);
            let t = mat2_mul(&subgroup_matrix(2, a)?, &subgroup_matrix(3, -b)?);
            (a, b, s, 3u8, t)
        }
        FactorMode::ToK2 => {
            if !(inv < 0.0) {
                return out_of_range("needs L2^2 > L1^2 + L3^2");
            }
            let s = l2.signum() * (-inv).sqrt();
            let a = (l2 / s).max(1.0).acosh();
            let b = if l1 == 0.0 && l3 == 0.0 { 0.0 } else { (l1 * s.signum()).atan2(l3 * s.signum()) };
            let t = mat2_mul(&subgroup_matrix(1, a)?, &subgroup_matrix(2, b)?);
            (a, b, s, 2u8, t)
        }
    };
    let rec = reconstruct(mode, a, b, s);
    let reconstruction_error = ((rec[0] - l1).powi(2) + (rec[1] - l2).powi(2) + (rec[2] - l3).powi(2)).sqrt();
    let lhs = expm2(&mat2_lin(p.lambda, k_all()));
    let kt = generator_2x2(target)?;
    let scaled = [[s * kt[0][0], s * kt[0][1]], [s * kt[1][0], s * kt[1][1]]];
    let rhs = mat2_mul(&mat2_mul(&mat2_inv(&t), &expm2(&scaled)), &t);
    Ok(Factorization { mode, a, b, scale: s, reconstruction_error, conjugation_residual: mat2_dist(&lhs, &rhs) })
}
