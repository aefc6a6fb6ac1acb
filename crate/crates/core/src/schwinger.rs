//! Clock and shift operators, the Schwinger unitary basis and the discrete
//! Fourier operator.
//!
//! Two labelings of the basis are provided. [`lattice_s`] takes unreduced
//! integer labels; on it the composition law `S_m S_m' = e^{i g0 m x m'/2}
//! S_{m+m'}` holds exactly for every D. [`schwinger_s`] takes labels in Z_D and
//! returns a D-periodic basis element whose adjoint is the element at `-m`.
//! For odd D the two coincide because the half is taken as the inverse of 2 mod
//! D. For even D the periodic element is the lattice element at a centered
//! representative, chosen so that conjugation pairs `m` with `-m`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::linalg::{eig_unitary, CMat, LinalgError, C64, DEFAULT_CLUSTER_TOL};
use crate::modring::{mod_inverse, reduce};

/// `2 pi / d`.
pub fn gamma0(d: usize) -> f64 {
    TAU / d as f64
}

/// `exp(i g0 k)` with the integer exponent reduced mod d first.
pub fn root_of_unity(d: usize, k: i64) -> C64 {
    C64::from_polar(1.0, gamma0(d) * reduce(k, d) as f64)
}

/// `exp(i g0 x / 2)`. For odd d the half is the modular inverse of 2, which
/// makes the value depend on x mod d only.
pub fn half_phase(d: usize, x: i64) -> C64 {
    if d % 2 == 1 {
        let half = mod_inverse(2, d).expect("2 is invertible mod odd d") as i128;
        let e = (x as i128 * half).rem_euclid(d as i128) as i64;
        root_of_unity(d, e)
    } else {
        let e = x.rem_euclid(2 * d as i64) as f64;
        C64::from_polar(1.0, PI * e / d as f64)
    }
}

/// Phase-space label in Z_D x Z_D, stored in `[0, D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhaseVec {
    pub d: usize,
    pub m1: usize,
    pub m2: usize,
}

impl PhaseVec {
    pub fn new(d: usize, m1: i64, m2: i64) -> Self {
        PhaseVec { d, m1: reduce(m1, d), m2: reduce(m2, d) }
    }

    pub fn zero(d: usize) -> Self {
        PhaseVec { d, m1: 0, m2: 0 }
    }

    /// `m1 n2 - m2 n1` mod D.
    pub fn cross(&self, other: &PhaseVec) -> usize {
        let d = self.d as i128;
        let c = self.m1 as i128 * other.m2 as i128 - self.m2 as i128 * other.m1 as i128;
        c.rem_euclid(d) as usize
    }

    pub fn neg(&self) -> PhaseVec {
        PhaseVec::new(self.d, -(self.m1 as i64), -(self.m2 as i64))
    }

    pub fn add(&self, other: &PhaseVec) -> PhaseVec {
        PhaseVec::new(self.d, (self.m1 + other.m1) as i64, (self.m2 + other.m2) as i64)
    }

    pub fn sub(&self, other: &PhaseVec) -> PhaseVec {
        self.add(&other.neg())
    }

    /// Every label of Z_D x Z_D in lexicographic order.
    pub fn all(d: usize) -> impl Iterator<Item = PhaseVec> {
        (0..d).flat_map(move |m1| (0..d).map(move |m2| PhaseVec { d, m1, m2 }))
    }

    /// Row-major index `m1 * D + m2`.
    pub fn index(&self) -> usize {
        self.m1 * self.d + self.m2
    }
}

/// Monomial matrix: column k carries `coeff[k]` into row `(k + shift) mod d`.
/// Every Schwinger element has this shape, so products stay O(d).
#[derive(Debug, Clone, PartialEq)]
pub struct WeylMono {
    pub shift: usize,
    pub coeff: Vec<C64>,
}

impl WeylMono {
    pub fn dim(&self) -> usize {
        self.coeff.len()
    }

    pub fn mul(&self, rhs: &WeylMono) -> WeylMono {
        let d = self.dim();
        let coeff = (0..d).map(|k| rhs.coeff[k] * self.coeff[(k + rhs.shift) % d]).collect();
        WeylMono { shift: (self.shift + rhs.shift) % d, coeff }
    }

    pub fn adjoint(&self) -> WeylMono {
        let d = self.dim();
        let shift = (d - self.shift) % d;
        let coeff = (0..d).map(|k| self.coeff[(k + shift) % d].conj()).collect();
        WeylMono { shift, coeff }
    }

    pub fn scale(&self, c: C64) -> WeylMono {
        WeylMono { shift: self.shift, coeff: self.coeff.iter().map(|z| z * c).collect() }
    }

    pub fn trace(&self) -> C64 {
        if self.shift == 0 {
            self.coeff.iter().sum()
        } else {
            C64::new(0.0, 0.0)
        }
    }

    pub fn to_dense(&self) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d);
        for k in 0..d {
            m[((k + self.shift) % d, k)] = self.coeff[k];
        }
        m
    }

    /// Adds `c * self` into a dense accumulator.
    pub fn add_into(&self, acc: &mut CMat, c: C64) {
        let d = self.dim();
        for k in 0..d {
            acc[((k + self.shift) % d, k)] += c * self.coeff[k];
        }
    }

    /// `self * b` for dense `b`.
    pub fn mul_dense(&self, b: &CMat) -> CMat {
        let d = self.dim();
        let mut out = CMat::zeros(d);
        for k in 0..d {
            let row = (k + self.shift) % d;
            for j in 0..d {
                out[(row, j)] = self.coeff[k] * b[(k, j)];
            }
        }
        out
    }

    /// Frobenius distance; infinite when the supports differ.
    pub fn dist(&self, other: &WeylMono) -> f64 {
        if self.shift != other.shift || self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.coeff.iter().zip(&other.coeff).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `U^a V^b` built exactly from the permutation and the clock phases.
pub fn uv_mono(d: usize, a: i64, b: i64) -> WeylMono {
    let coeff = (0..d).map(|k| root_of_unity(d, -(b * k as i64))).collect();
    WeylMono { shift: reduce(a, d), coeff }
}

/// `U` (cyclic shift, `U e_k = e_{k+1}`) and `V = diag(exp(-i g0 k))`.
pub fn clock_shift(d: usize) -> (CMat, CMat) {
    (uv_mono(d, 1, 0).to_dense(), uv_mono(d, 0, 1).to_dense())
}

/// `U^a` as a dense matrix (pure permutation).
pub fn u_pow(d: usize, a: i64) -> CMat {
    uv_mono(d, a, 0).to_dense()
}

/// `V^b` as a dense matrix (pure clock phases).
pub fn v_pow(d: usize, b: i64) -> CMat {
    uv_mono(d, 0, b).to_dense()
}

/// Schwinger element on integer labels: `exp(-i g0 m1 m2 / 2) U^{m1} V^{m2}`.
pub fn lattice_s(d: usize, m1: i64, m2: i64) -> WeylMono {
    uv_mono(d, m1, m2).scale(half_phase(d, -(m1 * m2)))
}

fn centered(x: usize, d: usize) -> i64 {
    if 2 * x <= d {
        x as i64
    } else {
        x as i64 - d as i64
    }
}

/// Periodic basis element as a monomial.
pub fn schwinger_mono(m: &PhaseVec) -> WeylMono {
    let d = m.d;
    if d % 2 == 1 {
        return lattice_s(d, m.m1 as i64, m.m2 as i64);
    }
    let neg = m.neg();
    if (m.m1, m.m2) <= (neg.m1, neg.m2) {
        lattice_s(d, centered(m.m1, d), centered(m.m2, d))
    } else {
        lattice_s(d, centered(neg.m1, d), centered(neg.m2, d)).adjoint()
    }
}

pub fn schwinger_s(m: &PhaseVec) -> CMat {
    schwinger_mono(m).to_dense()
}

/// `F_{kk'} = d^{-1/2} exp(-i g0 k k')`.
pub fn fourier(d: usize) -> CMat {
    let norm = 1.0 / (d as f64).sqrt();
    CMat::from_fn(d, |k, kp| root_of_unity(d, -((k * kp) as i64)) * norm)
}

/// Eigenvalue multiplicities of the DFT on its four possible eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DftMultiplicities {
    pub one: usize,
    pub minus_one: usize,
    pub minus_i: usize,
    pub i: usize,
}

impl DftMultiplicities {
    pub fn total(&self) -> usize {
        self.one + self.minus_one + self.minus_i + self.i
    }
}

pub fn dft_multiplicities(d: usize) -> Result<DftMultiplicities, LinalgError> {
    let spaces = eig_unitary(&fourier(d), DEFAULT_CLUSTER_TOL)?;
    let mut out = DftMultiplicities { one: 0, minus_one: 0, minus_i: 0, i: 0 };
    for s in spaces {
        let quarter = (s.value.arg() / (PI / 2.0)).round() as i64;
        match quarter.rem_euclid(4) {
            0 => out.one += s.multiplicity,
            1 => out.i += s.multiplicity,
            2 => out.minus_one += s.multiplicity,
            _ => out.minus_i += s.multiplicity,
        }
    }
    Ok(out)
}
