//! Dense complex square matrices and the handful of factorizations the rest of
//! the crate needs.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Default tolerance for grouping eigenvalues by phase angle.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Largest dimension accepted by [`expm_small`].
pub const EXPM_MAX_DIM: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("matrix is not unitary: |a^H a - I|_F = {residual:.3e} exceeds {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },
    #[error("matrix is not Hermitian: |a - a^H|_F = {residual:.3e}")]
    NotHermitian { residual: f64 },
    #[error("dimension {dim} exceeds the limit {limit}")]
    DimTooLarge { dim: usize, limit: usize },
    #[error("row-major data of length {len} cannot form a {dim}x{dim} matrix")]
    BadShape { dim: usize, len: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension must be positive")]
    ZeroDim,
}

/// Dense complex `dim x dim` matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMat { dim, data }
    }

    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if dim == 0 {
            return Err(LinalgError::ZeroDim);
        }
        if data.len() != dim * dim {
            return Err(LinalgError::BadShape { dim, len: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(CMat { dim, data })
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let dim = cols.len();
        Self::from_fn(dim, |i, j| cols[j][i])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn scale(&self, c: C64) -> CMat {
        CMat { dim: self.dim, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn scale_re(&self, c: f64) -> CMat {
        self.scale(C64::new(c, 0.0))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector length must match matrix dimension");
        (0..self.dim)
            .map(|i| {
                let row = &self.data[i * self.dim..(i + 1) * self.dim];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    pub fn add_scaled(&mut self, other: &CMat, c: C64) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * c;
        }
    }

    /// `||self - other||_F`.
    pub fn dist(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        mat_mul(self, rhs).expect("matrix product dimension mismatch")
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMat { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMat { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

pub fn mat_mul(a: &CMat, b: &CMat) -> Result<CMat, LinalgError> {
    if a.dim != b.dim {
        return Err(LinalgError::DimMismatch { left: a.dim, right: b.dim });
    }
    let n = a.dim;
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    // i-k-j order keeps the inner loop on contiguous rows.
    for i in 0..n {
        let row_out = &mut out[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a.data[i * n + k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            let row_b = &b.data[k * n..(k + 1) * n];
            for (o, bkj) in row_out.iter_mut().zip(row_b) {
                *o += aik * bkj;
            }
        }
    }
    Ok(CMat { dim: n, data: out })
}

pub fn adjoint(a: &CMat) -> CMat {
    CMat::from_fn(a.dim, |i, j| a[(j, i)].conj())
}

pub fn trace(a: &CMat) -> C64 {
    (0..a.dim).map(|i| a[(i, i)]).sum()
}

/// `ab - ba`.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    &(a * b) - &(b * a)
}

/// Non-negative integer power by repeated squaring.
pub fn mat_pow(a: &CMat, mut k: u64) -> CMat {
    let mut result = CMat::identity(a.dim);
    let mut base = a.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

/// `||a^H a - I||_F`.
pub fn unitarity_residual(a: &CMat) -> f64 {
    (&adjoint(a) * a).dist(&CMat::identity(a.dim))
}

pub fn hermiticity_residual(a: &CMat) -> f64 {
    a.dist(&adjoint(a))
}

/// One eigenvalue cluster: its representative value, multiplicity and an
/// orthonormal basis of the eigenspace (one vector per entry).
#[derive(Debug, Clone)]
pub struct EigenSpace {
    pub value: C64,
    pub multiplicity: usize,
    pub basis: Vec<Vec<C64>>,
}

/// Eigendecomposition of a unitary matrix with eigenvalues grouped by phase
/// angle. Clusters come out ordered by angle in `[0, 2pi)`.
pub fn eig_unitary(a: &CMat, tol: f64) -> Result<Vec<EigenSpace>, LinalgError> {
    let res = unitarity_residual(a);
    if !(res <= tol.max(1e-12 * a.dim as f64)) {
        return Err(LinalgError::NotUnitary { residual: res, tol });
    }
    let n = a.dim;
    let (q, t) = nalgebra::linalg::Schur::new(a.to_nalgebra()).unpack();
    let two_pi = std::f64::consts::TAU;

    let mut items: Vec<(f64, usize)> =
        (0..n).map(|i| (t[(i, i)].arg().rem_euclid(two_pi), i)).collect();
    items.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut groups: Vec<Vec<(f64, usize)>> = Vec::new();
    for item in items {
        match groups.last_mut() {
            Some(g) if item.0 - g.last().unwrap().0 <= tol => g.push(item),
            _ => groups.push(vec![item]),
        }
    }
    if groups.len() > 1 {
        let first = groups[0][0].0;
        let last = groups.last().unwrap().last().unwrap().0;
        if first + two_pi - last <= tol {
            let tail = groups.pop().unwrap();
            groups[0].extend(tail);
        }
    }

    let mut spaces: Vec<(f64, EigenSpace)> = groups
        .into_iter()
        .map(|g| {
            let mean: C64 = g.iter().map(|&(_, i)| t[(i, i)]).sum::<C64>() / g.len() as f64;
            let value = mean / mean.norm();
            let mut angle = value.arg().rem_euclid(two_pi);
            if two_pi - angle <= tol {
                angle = 0.0;
            }
            let basis = g.iter().map(|&(_, i)| (0..n).map(|r| q[(r, i)]).collect()).collect();
            (angle, EigenSpace { value, multiplicity: g.len(), basis })
        })
        .collect();
    spaces.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(spaces.into_iter().map(|(_, s)| s).collect())
}

/// `||a - V Lambda V^H||_F` for a clustered decomposition.
pub fn eig_reconstruction_residual(a: &CMat, spaces: &[EigenSpace]) -> f64 {
    let mut rec = CMat::zeros(a.dim);
    for s in spaces {
        for v in &s.basis {
            for i in 0..a.dim {
                for j in 0..a.dim {
                    rec[(i, j)] += s.value * v[i] * v[j].conj();
                }
            }
        }
    }
    a.dist(&rec)
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// Hermitian matrix.
pub fn eig_hermitian(a: &CMat, tol: f64) -> Result<(Vec<f64>, CMat), LinalgError> {
    let res = hermiticity_residual(a);
    if res > tol {
        return Err(LinalgError::NotHermitian { residual: res });
    }
    let eig = nalgebra::linalg::SymmetricEigen::new(a.to_nalgebra());
    let mut order: Vec<usize> = (0..a.dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(a.dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm_small(a: &CMat) -> Result<CMat, LinalgError> {
    if a.dim > EXPM_MAX_DIM {
        return Err(LinalgError::DimTooLarge { dim: a.dim, limit: EXPM_MAX_DIM });
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let norm1 = (0..a.dim)
        .map(|j| (0..a.dim).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut s = norm1;
    while s > 0.25 {
        s /= 2.0;
        squarings += 1;
    }
    let b = a.scale_re(0.5f64.powi(squarings as i32));
    let mut result = CMat::identity(a.dim);
    let mut term = CMat::identity(a.dim);
    for k in 1..=30 {
        term = (&term * &b).scale_re(1.0 / k as f64);
        result = &result + &term;
        if term.max_abs() <= f64::EPSILON * 1e-3 * result.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn naive_mul(a: &CMat, b: &CMat) -> CMat {
        let n = a.dim();
        CMat::from_fn(n, |i, j| {
            let mut s = c(0.0, 0.0);
            for k in 0..n {
                s += a[(i, k)] * b[(k, j)];
            }
            s
        })
    }

    fn pseudo_random(n: usize, seed: u64) -> CMat {
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        CMat::from_fn(n, |_, _| c(next(), next()))
    }

    #[test]
    fn identity_products() {
        let i = CMat::identity(4);
        assert_eq!(mat_mul(&i, &i).unwrap(), i);
    }

    #[test]
    fn product_matches_triple_loop() {
        let a = pseudo_random(3, 1);
        let b = pseudo_random(3, 2);
        assert!(mat_mul(&a, &b).unwrap().dist(&naive_mul(&a, &b)) < 1e-14);
    }

    #[test]
    fn product_dimension_mismatch() {
        let err = mat_mul(&CMat::identity(2), &CMat::identity(3)).unwrap_err();
        assert_eq!(err, LinalgError::DimMismatch { left: 2, right: 3 });
    }

    #[test]
    fn adjoint_basics() {
        let a = pseudo_random(4, 3);
        assert_eq!(adjoint(&adjoint(&a)), a);
        assert_eq!(adjoint(&CMat::identity(3)), CMat::identity(3));
        let d = CMat::from_diag(&[c(0.0, 1.0)]);
        assert_eq!(adjoint(&d), CMat::from_diag(&[c(0.0, -1.0)]));
    }

    #[test]
    fn trace_cyclic() {
        assert_eq!(trace(&CMat::identity(5)), c(5.0, 0.0));
        assert_eq!(trace(&CMat::zeros(3)), c(0.0, 0.0));
        let a = pseudo_random(4, 4);
        let b = pseudo_random(4, 5);
        assert!((trace(&(&a * &b)) - trace(&(&b * &a))).norm() < 1e-13);
    }

    #[test]
    fn unitary_times_adjoint_is_identity() {
        let x = CMat::from_row_major(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let u = expm_small(&x.scale(c(0.0, 0.7))).unwrap();
        assert!((&u * &adjoint(&u)).dist(&CMat::identity(2)) < 1e-14);
    }

    #[test]
    fn eig_of_diagonal() {
        let i = c(0.0, 1.0);
        let spaces = eig_unitary(&CMat::from_diag(&[c(1.0, 0.0), i, i]), 1e-8).unwrap();
        assert_eq!(spaces.len(), 2);
        assert!((spaces[0].value - c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(spaces[0].multiplicity, 1);
        assert!((spaces[1].value - i).norm() < 1e-12);
        assert_eq!(spaces[1].multiplicity, 2);
    }

    #[test]
    fn eig_of_swap() {
        let swap = CMat::from_row_major(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let spaces = eig_unitary(&swap, 1e-8).unwrap();
        let mut got: Vec<(f64, usize)> = spaces.iter().map(|s| (s.value.re, s.multiplicity)).collect();
        got.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!((got[0].0 + 1.0).abs() < 1e-12 && got[0].1 == 1);
        assert!((got[1].0 - 1.0).abs() < 1e-12 && got[1].1 == 1);
        assert!(eig_reconstruction_residual(&swap, &spaces) < 1e-12);
    }

    #[test]
    fn eig_of_identity() {
        let spaces = eig_unitary(&CMat::identity(5), 1e-8).unwrap();
        assert_eq!(spaces.len(), 1);
        assert_eq!(spaces[0].multiplicity, 5);
    }

    #[test]
    fn eig_rejects_non_unitary() {
        let a = CMat::identity(3).scale_re(2.0);
        assert!(matches!(eig_unitary(&a, 1e-8), Err(LinalgError::NotUnitary { .. })));
    }

    #[test]
    fn eig_clusters_across_branch_cut() {
        let below = C64::from_polar(1.0, -1e-10);
        let above = C64::from_polar(1.0, 1e-10);
        let spaces = eig_unitary(&CMat::from_diag(&[below, above, c(-1.0, 0.0)]), 1e-8).unwrap();
        assert_eq!(spaces.len(), 2);
        assert_eq!(spaces[0].multiplicity, 2);
    }

    #[test]
    fn hermitian_eig_sorted() {
        let a = CMat::from_diag(&[c(3.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)]);
        let (vals, vecs) = eig_hermitian(&a, 1e-12).unwrap();
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
        assert!(unitarity_residual(&vecs) < 1e-14);
    }

    #[test]
    fn expm_basic_cases() {
        assert!(expm_small(&CMat::zeros(3)).unwrap().dist(&CMat::identity(3)) < 1e-15);
        let ipi = CMat::from_diag(&[c(0.0, std::f64::consts::PI)]);
        assert!((expm_small(&ipi).unwrap()[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn expm_boost_generator() {
        let psi = 1.3;
        let x1 = CMat::from_row_major(2, vec![c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)])
            .unwrap();
        let e = expm_small(&x1.scale_re(psi)).unwrap();
        let (ch, sh) = ((psi / 2.0).cosh(), (psi / 2.0).sinh());
        let want = CMat::from_row_major(2, vec![c(ch, 0.0), c(sh, 0.0), c(sh, 0.0), c(ch, 0.0)])
            .unwrap();
        assert!(e.dist(&want) < 1e-14);
    }

    #[test]
    fn expm_large_norm_relative_error() {
        // diag(10 i, -10, 3) has a closed-form exponential.
        let a = CMat::from_diag(&[c(0.0, 10.0), c(-10.0, 0.0), c(3.0, 0.0)]);
        let e = expm_small(&a).unwrap();
        let want = CMat::from_diag(&[c(0.0, 10.0).exp(), c(-10.0, 0.0).exp(), c(3.0, 0.0).exp()]);
        assert!(e.dist(&want) / want.norm() < 1e-12);
    }

    #[test]
    fn expm_rejects_large_dim() {
        assert!(matches!(expm_small(&CMat::zeros(65)), Err(LinalgError::DimTooLarge { .. })));
    }

    #[test]
    fn from_row_major_validation() {
        assert!(matches!(
            CMat::from_row_major(2, vec![c(0.0, 0.0); 3]),
            Err(LinalgError::BadShape { .. })
        ));
        assert!(matches!(
            CMat::from_row_major(1, vec![c(f64::NAN, 0.0)]),
            Err(LinalgError::NonFinite)
        ));
    }

    #[test]
    fn mat_pow_matches_repeated_product() {
        let a = pseudo_random(3, 9);
        let a3 = &(&a * &a) * &a;
        assert!(mat_pow(&a, 3).dist(&a3) < 1e-13);
        assert_eq!(mat_pow(&a, 0), CMat::identity(3));
    }
}
