//! Discrete Wigner-Kirkwood operator basis and the discrete Wigner function.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{trace, CMat, C64};
use crate::schwinger::{root_of_unity, schwinger_mono, PhaseVec, WeylMono};

/// Tolerance on `||psi|| - 1` for states flagged normalized.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WkError {
    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("state has dimension {state}, expected {expected}")]
    DimMismatch { state: usize, expected: usize },
    #[error("state has non-finite amplitudes")]
    NonFinite,
    #[error("Wigner value has imaginary part {im:.3e}")]
    NotReal { im: f64 },
}

/// Amplitudes in the number basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVec {
    pub d: usize,
    pub amps: Vec<C64>,
}

impl StateVec {
    /// Normalizes the given amplitudes.
    pub fn normalized(amps: Vec<C64>) -> Result<Self, WkError> {
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(WkError::NonFinite);
        }
        // rescale first so the squared norm cannot overflow or underflow
        let big = amps.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);
        if big == 0.0 {
            return Err(WkError::ZeroVector);
        }
        let scaled: Vec<C64> = amps.into_iter().map(|z| z / big).collect();
        let norm = scaled.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Ok(StateVec { d: scaled.len(), amps: scaled.into_iter().map(|z| z / norm).collect() })
    }

    pub fn basis(d: usize, n: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); d];
        amps[n % d] = C64::new(1.0, 0.0);
        StateVec { d, amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn check_normalized(&self) -> Result<(), WkError> {
        let norm = self.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(WkError::NotNormalized { norm });
        }
        Ok(())
    }

    /// `<self| m |self>` for a monomial operator.
    pub fn expectation_mono(&self, m: &WeylMono) -> C64 {
        let d = self.d;
        (0..d).map(|k| self.amps[(k + m.shift) % d].conj() * m.coeff[k] * self.amps[k]).sum()
    }

    pub fn expectation(&self, a: &CMat) -> C64 {
        let av = a.mul_vec(&self.amps);
        self.amps.iter().zip(&av).map(|(x, y)| x.conj() * y).sum()
    }
}

/// `D^{-3/2} sum_m exp(-i g0 m x n) S_m`.
pub fn delta_wk(n: &PhaseVec) -> CMat {
    let d = n.d;
    let mut acc = CMat::zeros(d);
    let norm = (d as f64).powf(-1.5);
    for m in PhaseVec::all(d) {
        schwinger_mono(&m).add_into(&mut acc, root_of_unity(d, -(m.cross(n) as i64)) * norm);
    }
    acc
}

/// All `D^2` WK operators, indexed by [`PhaseVec::index`].
#[derive(Debug, Clone)]
pub struct WkBasis {
    pub d: usize,
    pub deltas: Vec<CMat>,
}

impl WkBasis {
    pub fn new(d: usize) -> Self {
        WkBasis { d, deltas: PhaseVec::all(d).map(|n| delta_wk(&n)).collect() }
    }

    pub fn delta(&self, n: &PhaseVec) -> &CMat {
        &self.deltas[n.index()]
    }

    /// `D^{-1/2} sum_n exp(i g0 m x n) Delta(n)`.
    pub fn s_from_delta(&self, m: &PhaseVec) -> CMat {
        let d = self.d;
        let mut acc = CMat::zeros(d);
        let norm = 1.0 / (d as f64).sqrt();
        for n in PhaseVec::all(d) {
            acc.add_scaled(self.delta(&n), root_of_unity(d, m.cross(&n) as i64) * norm);
        }
        acc
    }

    /// `max_{n,n'} |Tr(Delta(n) Delta(n')) - delta_{nn'}|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.deltas.iter().enumerate() {
            for (j, b) in self.deltas.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((trace(&(a * b)) - C64::new(want, 0.0)).norm());
            }
        }
        worst
    }
}

/// Rebuilds `S_m` from a freshly built WK basis.
pub fn s_from_delta(m: &PhaseVec) -> CMat {
    WkBasis::new(m.d).s_from_delta(m)
}

/// Characteristic function `<psi|S_m|psi>` on every label.
fn characteristic(psi: &StateVec) -> Vec<C64> {
    PhaseVec::all(psi.d).map(|m| psi.expectation_mono(&schwinger_mono(&m))).collect()
}

fn wigner_from_characteristic(d: usize, chi: &[C64], n: &PhaseVec) -> Result<f64, WkError> {
    let norm = (d as f64).powf(-1.5);
    let w: C64 = PhaseVec::all(d)
        .zip(chi)
        .map(|(m, c)| root_of_unity(d, -(m.cross(n) as i64)) * c)
        .sum::<C64>()
        * norm;
    if w.im.abs() > 1e-10 {
        return Err(WkError::NotReal { im: w.im });
    }
    Ok(w.re)
}

/// `W(n) = <psi|Delta(n)|psi>`.
pub fn wigner_wk(psi: &StateVec, n: &PhaseVec) -> Result<f64, WkError> {
    psi.check_normalized()?;
    if n.d != psi.d {
        return Err(WkError::DimMismatch { state: psi.d, expected: n.d });
    }
    wigner_from_characteristic(psi.d, &characteristic(psi), n)
}

/// Wigner function on every label, indexed by [`PhaseVec::index`].
pub fn wigner_table(psi: &StateVec) -> Result<Vec<f64>, WkError> {
    psi.check_normalized()?;
    let chi = characteristic(psi);
    PhaseVec::all(psi.d).map(|n| wigner_from_characteristic(psi.d, &chi, &n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_extreme_magnitudes() {
        for scale in [1e308, 1e-320] {
            let psi = StateVec::normalized(vec![C64::new(scale, scale), C64::new(0.0, scale)]).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-15, "{scale}");
            assert!((psi.amps[1].im - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
    }
    use crate::linalg::{adjoint, hermiticity_residual};
    use crate::schwinger::schwinger_s;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Independent construction: `Delta(n) = D^{-3/2} sum_m exp(-i g0 m x n) S_m`
    /// with dense Schwinger matrices.
    fn delta_oracle(n: &PhaseVec) -> CMat {
        let d = n.d;
        let mut acc = CMat::zeros(d);
        for m in PhaseVec::all(d) {
            let phase = C64::from_polar(1.0, -std::f64::consts::TAU * m.cross(n) as f64 / d as f64);
            acc.add_scaled(&schwinger_s(&m), phase * (d as f64).powf(-1.5));
        }
        acc
    }

    #[test]
    fn delta_matches_dense_construction() {
        for d in [2usize, 3, 4] {
            for n in PhaseVec::all(d) {
                assert!(delta_wk(&n).dist(&delta_oracle(&n)) < 1e-14);
            }
        }
    }

    #[test]
    fn delta_hermitian_trace_orthonormal() {
        for d in 2..=8usize {
            let basis = WkBasis::new(d);
            for delta in &basis.deltas {
                assert!(hermiticity_residual(delta) < 1e-12);
                assert!((trace(delta) - c((d as f64).powf(-0.5), 0.0)).norm() < 1e-12);
            }
            assert!(basis.orthonormality_error() < 1e-11, "d={d}");
        }
    }

    #[test]
    fn delta_sums_to_scaled_identity() {
        for d in 2..=9usize {
            let basis = WkBasis::new(d);
            let mut acc = CMat::zeros(d);
            for delta in &basis.deltas {
                acc = &acc + delta;
            }
            assert!(acc.dist(&CMat::identity(d).scale_re((d as f64).sqrt())) < 1e-11);
        }
    }

    #[test]
    fn round_trip_unit_and_sweeps() {
        assert!(s_from_delta(&PhaseVec::zero(5)).dist(&CMat::identity(5)) < 1e-11);
        for d in [5usize, 8] {
            let basis = WkBasis::new(d);
            let worst = PhaseVec::all(d)
                .map(|m| basis.s_from_delta(&m).dist(&schwinger_s(&m)))
                .fold(0.0, f64::max);
            assert!(worst < 1e-10, "d={d} worst={worst}");
        }
    }

    #[test]
    fn wigner_of_basis_state_is_real() {
        let psi = StateVec::basis(3, 0);
        for n in PhaseVec::all(3) {
            assert!(wigner_wk(&psi, &n).is_ok());
        }
    }

    #[test]
    fn wigner_matches_operator_expectation() {
        let psi = StateVec::normalized(vec![c(1., 0.), c(0.5, -0.2), c(0., 1.), c(-0.3, 0.3)]).unwrap();
        let basis = WkBasis::new(4);
        for n in PhaseVec::all(4) {
            let direct = psi.expectation(basis.delta(&n));
            assert!((wigner_wk(&psi, &n).unwrap() - direct.re).abs() < 1e-13);
            assert!(direct.im.abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_unnormalized() {
        let psi = StateVec { d: 2, amps: vec![c(1., 0.), c(1., 0.)] };
        assert!(matches!(wigner_wk(&psi, &PhaseVec::zero(2)), Err(WkError::NotNormalized { .. })));
        assert_eq!(StateVec::normalized(vec![c(0., 0.); 3]), Err(WkError::ZeroVector));
    }

    #[test]
    fn adjoint_of_delta_sum() {
        let basis = WkBasis::new(6);
        let n = PhaseVec::new(6, 2, 5);
        assert!(adjoint(basis.delta(&n)).dist(basis.delta(&n)) < 1e-12);
    }

    fn state(d: usize) -> impl Strategy<Value = StateVec> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d)
            .prop_filter_map("nonzero", |v| StateVec::normalized(v.into_iter().map(|(a, b)| c(a, b)).collect()).ok())
    }

    proptest! {
        #[test]
        fn wigner_sum_and_phase_invariance(
            (psi, phi) in (2usize..=10).prop_flat_map(|d| (state(d), -3.0f64..3.0))
        ) {
            let w = wigner_table(&psi).unwrap();
            let total: f64 = w.iter().sum();
            prop_assert!((total - (psi.d as f64).sqrt()).abs() < 1e-10);
            let rotated = StateVec { d: psi.d, amps: psi.amps.iter().map(|z| z * C64::from_polar(1.0, phi)).collect() };
            let w2 = wigner_table(&rotated).unwrap();
            for (a, b) in w.iter().zip(&w2) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
