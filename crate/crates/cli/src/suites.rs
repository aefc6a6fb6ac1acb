//! Verification suites, one per library module, each a list of named
//! residual checks.

use std::collections::HashMap;
use std::f64::consts::TAU;

use qphase_core::aawigner::{
    aa_grid, aa_marginals, aa_wigner, default_thetas, delta_ct, evolve, j_grid, moyal_rhs, phase_op_eom_check,
    reconstruct_from_symbol, split_state, theta_grid, wwm_symbol, SpectrumFn, EVOLVE_SIGN,
};
use qphase_core::config::{OutputFormat, RunConfig};
use qphase_core::hwgroup::{gamma_analyze, partner_exists, weyl_pair, Partner};
use qphase_core::linalg::{
    adjoint, eig_hermitian, eig_reconstruction_residual, eig_unitary, expm_small, hermiticity_residual, mat_pow, trace,
    unitarity_residual, CMat, C64, DEFAULT_CLUSTER_TOL, EXPM_MAX_DIM,
};
use qphase_core::metaplectic::{
    covariance_error, inverse_residual, metaplectic_g, projective_multiplier, projective_order,
    wk_covariance_error_with, MetaplecticError,
};
use qphase_core::modring::{
    g1, g2, gauss_sum, gcd, is_odd_prime, mod_inverse, rotation_family, sl2_group_order, sl2_mul, sl2_order,
    SL2Elem,
};
use qphase_core::parse::{parse_hamiltonian, parse_state_spec};
use qphase_core::qosc::{
    build_qosc, number_phase_commutators, phase_eigen_residual, phase_operator, phase_state, phase_states_vs_fourier,
    qosc_algebra_residuals, uqsl2_from_schwinger, uqsl2_residuals,
};
use qphase_core::schwinger::{clock_shift, dft_multiplicities, fourier, half_phase, lattice_s, root_of_unity, schwinger_mono, PhaseVec};
use qphase_core::sl2r::{
    factor_lambda, grid_eigencheck, h_chi_check, hermitized_2x2, poly_rep, qho_generators, qho_interior_residuals,
    structure_residuals, FactorMode, GridSpec, Region, Sl2rParam,
};
use qphase_core::wk::{delta_wk, StateVec, WkBasis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::output::{render_wigner_csv, Sci};

pub const SUITES: [&str; 11] =
    ["linalg", "modring", "schwinger", "wk", "metaplectic", "hwgroup", "qosc", "sl2r", "aawigner", "cli", "all"];

/// Number of random SL(2, Z_D) elements drawn by the metaplectic suite.
pub const METAPLECTIC_SAMPLES: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuiteError {
    #[error("unknown suite '{0}'")]
    Unknown(String),
    #[error("{0}")]
    Domain(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_residual: Sci,
    pub tol: Sci,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Check { name: name.into(), max_residual: Sci(residual), tol: Sci(tol), pass: residual.is_finite() && residual <= tol }
    }

    fn retol(mut self, tol: f64) -> Self {
        self.tol = Sci(tol);
        self.pass = self.max_residual.0.is_finite() && self.max_residual.0 <= tol;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteParams {
    pub dim: usize,
    pub kappa: Option<i64>,
    pub seed: u64,
    pub r: Option<[i64; 4]>,
    /// Replaces every check tolerance when set.
    pub tol: Option<f64>,
}

impl SuiteParams {
    pub fn new(dim: usize) -> Self {
        SuiteParams { dim, kappa: None, seed: 0, r: None, tol: None }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
    }
}

fn domain(ok: bool, msg: impl FnOnce() -> String) -> Result<(), SuiteError> {
    if ok {
        Ok(())
    } else {
        Err(SuiteError::Domain(msg()))
    }
}

fn count(bad: usize) -> f64 {
    bad as f64
}

pub fn run_suite(name: &str, p: &SuiteParams) -> Result<Vec<Check>, SuiteError> {
    let checks = match name {
        "linalg" => linalg(p)?,
        "modring" => modring(p)?,
        "schwinger" => schwinger(p)?,
        "wk" => wk(p)?,
        "metaplectic" => metaplectic(p)?,
        "hwgroup" => hwgroup(p)?,
        "qosc" => qosc(p)?,
        "sl2r" => sl2r(p)?,
        "aawigner" => aawigner(p)?,
        "cli" => cli(p)?,
        "all" => {
            domain(is_odd_prime(p.dim) && p.dim <= 16, || {
                format!("suite all needs an odd prime dimension <= 16, got {}", p.dim)
            })?;
            let mut out = Vec::new();
            for s in SUITES.iter().filter(|s| **s != "all") {
                for c in run_suite(s, &SuiteParams { tol: None, ..p.clone() })? {
                    out.push(Check { name: format!("{s}.{}", c.name), ..c });
                }
            }
            out
        }
        other => return Err(SuiteError::Unknown(other.to_string())),
    };
    Ok(match p.tol {
        Some(t) => checks.into_iter().map(|c| c.retol(t)).collect(),
        None => checks,
    })
}

fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> CMat {
    let a = CMat::from_fn(d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&a + &adjoint(&a)).scale_re(0.5)
}

fn random_state(d: usize, rng: &mut ChaCha8Rng) -> StateVec {
    let amps = (0..d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    StateVec::normalized(amps).expect("nonzero with probability one")
}

fn linalg(p: &SuiteParams) -> Result<Vec<Check>, SuiteError> {
    let d = p.dim;
    domain((1..=EXPM_MAX_DIM).contains(&d), || format!("linalg suite needs 1 <= dim <= {EXPM_MAX_DIM}, got {d}"))?;
    let mut rng = p.rng(1);
    let scale = d as f64;
    let h = random_hermitian(d, &mut rng);
    let u = expm_small(&h.scale(C64::new(0.0, 1.0))).expect("dimension in range");
    let f = fourier(d);
    let eig_res = |m: &CMat| eig_unitary(m, DEFAULT_CLUSTER_TOL).map(|s| eig_reconstruction_residual(m, &s)).unwrap_or(f64::INFINITY);
    let (vals, vecs) = eig_hermitian(&h, DEFAULT_CLUSTER_TOL).expect("hermitian input");
    let lam = CMat::from_diag(&vals.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
    let herm_res = (&(&vecs * &lam) * &adjoint(&vecs)).dist(&h);
    let mult = eig_unitary(&f, DEFAULT_CLUSTER_TOL).map(|s| s.iter().map(|e| e.multiplicity).sum::<usize>()).unwrap_or(0);
    Ok(vec![
        Check::new("fourier_unitarity", unitarity_residual(&f), 1e-10 * scale),
        Check::new("expm_unitarity", unitarity_residual(&u), 1e-10 * scale),
        Check::new("eig_unitary_reconstruction_random", eig_res(&u), 1e-9 * scale),
        Check::new("eig_unitary_reconstruction_dft", eig_res(&f), 1e-9 * scale),
        Check::new("eig_hermitian_reconstruction", herm_res, 1e-9 * scale),
        Check::new("multiplicities_sum_to_dim", (mult as f64 - scale).abs(), 0.0),
    ])
}

/// Random word in the generators `[[1,1],[0,1]]` and `[[1,0],[1,1]]`.
fn random_sl2(d: usize, rng: &mut ChaCha8Rng) -> SL2Elem {
    let up = SL2Elem::new(d, 1, 1, 0, 1).expect("unit determinant");
    let low = SL2Elem::new(d, 1, 0, 1, 1).expect("unit determinant");
    let mut x = SL2Elem::identity(d);
    for _ in 0..rng.gen_range(1..24) {
        x = sl2_mul(&x, if rng.gen_bool(0.5) { &up } else { &low }).expect("same modulus");
    }
    x
}

fn sl2_pow(a: &SL2Elem, k: u64) -> SL2Elem {
    (0..k).fold(SL2Elem::identity(a.d), |x, _| sl2_mul(&x, a).expect("same modulus"))
}

fn modring(p: &SuiteParams) -> Result<Vec<Check>, SuiteError> {
    let d = p.dim;
    domain(d >= 2, || format!("modring suite needs dim >= 2, got {d}"))?;
    let mut rng = p.rng(2);
    let inv_bad = (1..d as i64)
        .filter(|&a| gcd(a as u64, d as u64) == 1)
        .filter(|&a| mod_inverse(a, d).map(|i| (a as usize * i) % d != 1).unwrap_or(true))
        .count();
    let mut assoc_bad = 0;
    let mut det_bad = 0;
    for _ in 0..60 {
        let (a, b, c) = (random_sl2(d, &mut rng), random_sl2(d, &mut rng), random_sl2(d, &mut rng));
        let ab = sl2_mul(&a, &b).expect("same modulus");
        let left = sl2_mul(&ab, &c).expect("same modulus");
        let right = sl2_mul(&a, &sl2_mul(&b, &c).expect("same modulus")).expect("same modulus");
        assoc_bad += usize::from(left != right);
        det_bad += usize::from(ab.det() != 1 % d);
    }
    let mut out = vec![
        Check::new("mod_inverse", count(inv_bad), 0.0),
        Check::new("sl2_associativity", count(assoc_bad), 0.0),
        Check::new("det_multiplicative", count(det_bad), 0.0),
        Check::new("g1_power_d_identity", count(usize::from(!sl2_pow(&g1(d), d as u64).is_identity())), 0.0),
    ];
    if is_odd_prime(d) {
        let g2_ok = g2(d).map(|g| sl2_pow(&g, d as u64 - 1).is_identity()).unwrap_or(false);
        let gauss = (1..d as i64)
            .map(|m| gauss_sum(m, d).map(|g| (g.value.norm_sqr() - 1.0).abs()).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        let order = sl2_group_order(d);
        let distinct: std::collections::HashSet<SL2Elem> =
            (0..order).filter_map(|i| SL2Elem::from_index(d, i).ok()).collect();
        out.push(Check::new("g2_power_d_minus_1_identity", count(usize::from(!g2_ok)), 0.0));
        out.push(Check::new("gauss_sum_unit_modulus", gauss, 1e-12));
        out.push(Check::new("sl2_enumeration", (distinct.len() as f64 - order as f64).abs(), 0.0));
    }
    Ok(out)
}

/// Integer phase-space label.
type Label = (i64, i64);

/// Labels `[0, span D)^2` as integer pairs.
fn labels(d: usize, span: usize) -> Vec<Label> {
    let n = (d * span) as i64;
    (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
}

fn schwinger(p: &SuiteParams) -> Result<Vec<Check>, SuiteError> {
    let d = p.dim;
    domain((2..=64).contains(&d), || format!("schwinger suite needs 2 <= dim <= 64, got {d}"))?;
    let id = CMat::identity(d);
    let periodic: Vec<PhaseVec> = PhaseVec::all(d).collect();
    let mut adj = 0.0f64;
    let mut inv = 0.0f64;
    let mut tr = 0.0f64;
    for m in &periodic {
        let s = schwinger_mono(m);
        let sneg = schwinger_mono(&m.neg());
        adj = adj.max(s.adjoint().dist(&sneg));
        inv = inv.max(s.mul(&sneg).to_dense().dist(&id));
        let want = if m.m1 == 0 && m.m2 == 0 { d as f64 } else { 0.0 };
        tr = tr.max((s.trace() - C64::new(want, 0.0)).norm());
    }
    let unit = schwinger_mono(&PhaseVec::zero(d)).to_dense().dist(&id);

    // Composition on lattice labels, then associativity through the measured
    // multipliers r(x, y) with S_x S_y = r(x, y) S_{x+y}.
    let base = labels(d, 1);
    let wide = labels(d, 2);
    let mut comp = 0.0f64;
    let mut prop = 0.0f64;
    let mut ratio: HashMap<(Label, Label), C64> = HashMap::new();
    let mut measure = |x: (i64, i64), y: (i64, i64), comp_check: bool| {
        let lhs = lattice_s(d, x.0, x.1).mul(&lattice_s(d, y.0, y.1));
        let rhs = lattice_s(d, x.0 + y.0, x.1 + y.1);
        let r = lhs.coeff[0] / rhs.coeff[0];
        prop = prop.max(lhs.dist(&rhs.scale(r)));
        if comp_check {
            let cross = x.0 * y.1 - x.1 * y.0;
            comp = comp.max(lhs.dist(&rhs.scale(half_phase(d, cross))));
        }
        ratio.insert((x, y), r);
    };
    let exhaustive = d <= 16;
    let mut rng = p.rng(3);
    let triples: Vec<[(i64, i64); 3]> = if exhaustive {
        Vec::new()
    } else {
        let pick = |rng: &mut ChaCha8Rng| (rng.gen_range(0..d as i64), rng.gen_range(0..d as i64));
        (0..4000).map(|_| [pick(&mut rng), pick(&mut rng), pick(&mut rng)]).collect()
    };
    if exhaustive {
        for &x in &base {
            for &y in &base {
                measure(x, y, true);
            }
        }
        for &x in &wide {
            for &y in &base {
                measure(x, y, false);
                measure(y, x, false);
            }
        }
    } else {
        for [a, b, c] in &triples {
            let ab = (a.0 + b.0, a.1 + b.1);
            let bc = (b.0 + c.0, b.1 + c.1);
            measure(*a, *b, true);
            measure(*b, *c, true);
            measure(ab, *c, false);
            measure(*a, bc, false);
        }
    }
    let mut assoc = prop;
    let mut assoc_at = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| {
        let ab = (a.0 + b.0, a.1 + b.1);
        let bc = (b.0 + c.0, b.1 + c.1);
        let left = ratio[&(a, b)] * ratio[&(ab, c)];
        let right = ratio[&(b, c)] * ratio[&(a, bc)];
        assoc = assoc.max((left - right).norm());
    };
    if exhaustive {
        for &a in &base {
            for &b in &base {
                for &c in &base {
                    assoc_at(a, b, c);
                }
            }
        }
    } else {
        for [a, b, c] in &triples {
            assoc_at(*a, *b, *c);
        }
    }

    let f = fourier(d);
    let fd = adjoint(&f);
    let f4 = mat_pow(&f, 4).dist(&id);
    let rot_labels: Vec<(i64, i64)> = if d <= 16 {
        base.clone()
    } else {
        (0..64).map(|_| (rng.gen_range(0..d as i64), rng.gen_range(0..d as i64))).collect()
    };
    let rot = rot_labels
        .iter()
        .map(|&(a, b)| (&(&f * &lattice_s(d, a, b).to_dense()) * &fd).dist(&lattice_s(d, -b, a).to_dense()))
        .fold(0.0, f64::max);
    let (u, v) = clock_shift(d);
    let (ui, vi) = (adjoint(&u), adjoint(&v));
    let conj = |x: &CMat| &(&f * x) * &fd;
    let steps = [(&u, &v), (&v, &ui), (&ui, &vi), (&vi, &u), (&u, &v)];
    let cycle = steps
        .windows(2)
        .map(|w| conj(w[0].0).dist(w[1].0).max(conj(w[0].1).dist(w[1].1)))
        .fold(0.0, f64::max);
    let eigvec = (0..d)
        .map(|r| {
            let col = f.column(r);
            let lam = root_of_unity(d, r as i64);
            u.mul_vec(&col).iter().zip(&col).map(|(a, b)| (a - lam * b).norm_sqr()).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max);
    // n_lambda = 1/4 sum_k lambda^{-k} Tr F^k
    let traces: Vec<C64> = (0..4).map(|k| trace(&mat_pow(&f, k))).collect();
    let oracle: Vec<usize> = [C64::new(1., 0.), C64::new(-1., 0.), C64::new(0., -1.), C64::new(0., 1.)]
        .iter()
        .map(|lam| ((0..4).map(|k| lam.powi(-(k as i32)) * traces[k]).sum::<C64>() / 4.0).re.round() as usize)
        .collect();
    let mult_gap = match dft_multiplicities(d) {
        Ok(m) => [m.one, m.minus_one, m.minus_i, m.i].iter().zip(&oracle).map(|(a, b)| a.abs_diff(*b)).sum::<usize>(),
        Err(_) => d,
    };
    Ok(vec![
        Check::new("unit_element", unit, 1e-11),
        Check::new("adjoint", adj, 1e-11),
        Check::new("inverse", inv, 1e-11),
        Check::new("trace", tr, 1e-11),
        Check::new("composition", comp, 1e-11),
        Check::new("associativity", assoc, 1e-11),
        Check::new("fourier_fourth_power", f4, 1e-12),
        Check::new("fourier_quarter_rotation", rot, 1e-12),
        Check::new("fourier_automorphism_cycle", cycle, 1e-12),
        Check::new("shift_eigenvectors", eigvec, 1e-12),
        Check::new("dft_multiplicities", count(mult_gap), 0.0),
    ])
}

fn wk(p: &SuiteParams) -> Result<Vec<Check>, SuiteError> {
    let d = p.dim;
    domain((2..=16).contains(&d), || format!("wk suite needs 2 <= dim <= 16, got {d}"))?;
    let basis = WkBasis::new(d);
    let labels: Vec<PhaseVec> = PhaseVec::all(d).collect();
    let rebuilt: Vec<CMat> = labels.iter().map(|m| basis.s_from_delta(m)).collect();
    let s_round = labels
        .iter()
        .zip(&rebuilt)
        .map(|(m, s)| s.dist(&schwinger_mono(m).to_dense()))
        .fold(0.0, f64::max);
    let norm = (d as f64).powf(-1.5);
    let delta_round = labels
        .iter()
        .map(|n| {
            let mut acc = CMat::zeros(d);
            for (m, s) in labels.iter().zip(&rebuilt) {
                acc.add_scaled(s, root_of_unity(d, -(m.cross(n) as i64)) * norm);
            }
            acc.dist(basis.delta(n))
        })
        .fold(0.0, f64::max);
    let herm = basis.deltas.iter().map(hermiticity_residual).fold(0.0, f64::max);
    let mut rng = p.rng(4);
    let imag = (0..5)
        .map(|_| {
            let psi = random_state(d, &mut rng);
            labels.iter().map(|n| psi.expectation(&delta_wk(n)).im.abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Ok(vec![
        Check::new("duality_delta_to_s", s_round, 1e-10),
        Check::new("duality_s_to_delta", delta_round, 1e-10),
        Check::new("orthonormality", basis.orthonormality_error(), 1e-11),
        Check::new("hermiticity", herm, 1e-12),
        Check::new("wigner_real", imag, 1e-11),
    ])
}

fn metaplectic_domain(d: usize) -> Result<(), SuiteError> {
    domain(is_odd_prime(d), || MetaplecticError::NotOddPrime(d).to_string())
}

/// The explicit element, or a seeded uniform draw.
pub fn pick_sl2(d: usize, r: Option<[i64; 4]>, rng: &mut ChaCha8Rng) -> Result<SL2Elem, SuiteError> {
    match r {
        Some([s1, t1, s2, t2]) => SL2Elem::new(d, s1, t1, s2, t2).map_err(|e| SuiteError::Domain(e.to_string())),
        None => Ok(SL2Elem::from_index(d, rng.gen_range(0..sl2_group_order(d))).expect("index in range")),
    }
}

fn metaplectic(p: &SuiteParams) -> Result<Vec<Check>, SuiteError> {
    let d = p.dim;
    metaplectic_domain(d)?;
    let mut rng = p.rng(5);
    let elems: Vec<SL2Elem> = match p.r {
        Some(_) => vec![pick_sl2(d, p.r, &mut rng)?],
        None => (0..METAPLECTIC_SAMPLES).map(|_| pick_sl2(d, None, &mut rng)).collect::<Result<_, _>>()?,
    };
    let basis = WkBasis::new(d);
    let (mut cov, mut wkc, mut unit, mut inv, mut proj) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (i, r) in elems.iter().enumerate() {
        let g = metaplectic_g(r).map_err(|e| SuiteError::Domain(e.to_string()))?;
        cov = cov.max(covariance_error(&g));
        wkc = wkc.max(wk_covariance_error_with(&g, &basis));
        unit = unit.max(unitarity_residual(&g.mat));
        inv = inv.max(inverse_residual(r).unwrap_or(f64::INFINITY));
        let r2 = &elems[(i + 1) % elems.len()];
        proj = proj.max(match projective_multiplier(r, r2) {
            Ok(fit) => fit.residual,
            Err(MetaplecticError::NotProjective { residual }) => residual,
            Err(_) => f64::INFINITY,
        });
    }
    let rot_bad = rotation_family(d)
        .map(|fam| {
            fam.iter()
                .filter(|r| {
                    let g = metaplectic_g(r).expect("odd prime");
                    projective_order(&g, 4 * d as u64, 1e-9) != sl2_order(r).ok()
                })
                .count()
        })
        .unwrap_or(usize::MAX);
    Ok(vec![
        Check::new("schwinger_covariance", cov, 1e-9),
        Check::new("wk_covariance", wkc, 1e-9),
        Check::new("unitarity", unit, 1e-10),
        Check::new("inverse_adjoint", inv, 1e-9),
        Check::new("projective_multiplier", proj, 1e-9),
        Check::new("rotation_projective_order", count(rot_bad), 0.0),
    ])
}

fn hwgroup(p: &SuiteParams) -> Result<Vec<Check>, SuiteError> {
    let d = p.dim;
    domain((2..=64).contains(&d), || format!("hwgroup suite needs 2 <= dim <= 64, got {d}"))?;
    let (g, o, w) = weyl_pair(d);
    let rel = (&g * &o).dist(&(&o * &g).scale(w));
    let cyc = (&(&adjoint(&o) * &g) * &o).dist(&g.scale(w));
    let partner = match partner_exists(&g, 1e-8) {
        Ok(Partner::Found { o, omega }) => (&g * &o).dist(&(&o * &g).scale(omega)).max(unitarity_residual(&o)),
        _ => f64::INFINITY,
    };
    let dft4 = match partner_exists(&fourier(4), 1e-8) {
        Ok(Partner::Absent { spectrum }) => {
            let mut m: Vec<usize> = spectrum.iter().map(|s| s.1).collect();
            m.sort();
            if m == [1, 1, 2] {
                0
            } else {
                1
            }
        }
        _ => 1,
    };
    let mut irrep_bad = 0;
    for a in 1..=24u64 {
        for b in 1..=24u64 {
            for c in 1..=24u64 {
                let s = gamma_analyze(a, b, c);
                if s.valid && (s.irrep_count == 1) != (s.a_prime == Some(1) && s.b_prime == Some(1)) {
                    irrep_bad += 1;
                }
            }
        }
    }
    Ok(vec![
        Check::new("weyl_relation", rel, 1e-13),
        Check::new("cyclic_eigenbasis", cyc, 1e-13),
        Check::new("partner_for_weyl_g", partner, 1e-9),
        Check::new("dft4_partner_absent", count(dft4), 0.0),
        Check::new("single_irrep_criterion", count(irrep_bad), 0.0),
    ])
}

fn qosc(p: &SuiteParams) -> Result<Vec<Check>, SuiteError> {
    let d = p.dim;
    domain(d >= 3 && d % 2 == 1 && d <= 64, || format!("qosc suite needs an odd dimension in 3..=64, got {d}"))?;
    let kappas: Vec<i64> = match p.kappa {
        Some(k) => {
            domain(k.rem_euclid(d as i64) != 0, || format!("kappa must be nonzero mod {d}, got {k}"))?;
            vec![k]
        }
        None => (1..d as i64).collect(),
    };
    let (mut alg, mut fneg, mut uq, mut qe) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &k in &kappas {
        let o = build_qosc(d, k).map_err(|e| SuiteError::Domain(e.to_string()))?;
        alg = qosc_algebra_residuals(&o).iter().map(|r| r.residual).fold(alg, f64::max);
        fneg = o.f.iter().fold(fneg, |m, &f| m.max(-f));
        let u = uqsl2_from_schwinger(d, &PhaseVec::new(d, 1, 0), &PhaseVec::new(d, 0, k)).map_err(|e| SuiteError::Domain(e.to_string()))?;
        uq = uqsl2_residuals(&u).iter().map(|r| r.residual).fold(uq, f64::max);
        qe = qe.max(number_phase_commutators(d, k, 1).map(|r| r.q_e_exchange).unwrap_or(f64::INFINITY));
    }
    let ph = phase_operator(d).map_err(|e| SuiteError::Domain(e.to_string()))?;
    let non_wrap = (0..d)
        .map(|r| number_phase_commutators(d, kappas[0], r).map(|x| x.non_wrap_residual).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    Ok(vec![
        Check::new("algebra", alg, 1e-10),
        Check::new("structure_function_nonnegative", fneg.max(0.0), 1e-12),
        Check::new("uqsl2_relations", uq, 1e-10),
        Check::new("phase_eigen", phase_eigen_residual(&ph), 1e-12),
        Check::new("phase_power_identity", mat_pow(&ph.e, d as u64).dist(&CMat::identity(d)), 1e-12),
        Check::new("phase_states_dft", phase_states_vs_fourier(&ph), 1e-12),
        Check::new("q_e_exchange", qe, 1e-12),
        Check::new("number_phase_non_wrap", non_wrap, 1e-12),
    ])
}

/// Grids used by the SL(2,R) eigenchecks, clear of every singular locus.
pub fn sl2r_grids() -> [(u8, f64, GridSpec); 3] {
    let wedge = GridSpec { region: Region::Annulus { r: (0.5, 1.5), phi: (-0.6, 0.6) }, samples: 15, h: 1e-3, margin: 0.05 };
    let ring = GridSpec { region: Region::Annulus { r: (0.5, 1.5), phi: (-3.0, 3.0) }, samples: 15, h: 1e-3, margin: 0.05 };
    let quad = GridSpec { region: Region::Rect { x: (0.5, 1.5), y: (0.3, 1.2) }, samples: 15, h: 1e-3, margin: 0.05 };
    [(1, 0.7, wedge), (2, 1.0, ring), (3, 1.3, quad)]
}

fn sl2r(p: &SuiteParams) -> Result<Vec<Check>, SuiteError> {
    let m = p.dim.clamp(8, 64);
    let mut out = Vec::new();
    let (mut comm, mut cas, mut ladder) = (0.0f64, 0.0f64, 0.0f64);
    for two in 0..=16usize {
        let ell = two as f64 / 2.0;
        let rep = poly_rep(ell).expect("valid spin");
        comm = structure_residuals(&[rep.k1.clone(), rep.k2.clone(), rep.k3.clone()]).iter().fold(comm, |a, &b| a.max(b));
        cas = cas.max(rep.casimir().dist(&CMat::identity(rep.dim()).scale_re(ell * (ell + 1.0))));
        let (kp, km) = (rep.k_plus(), rep.k_minus());
        for i in 0..rep.dim() {
            let mm = i as f64 - ell;
            for r in 0..rep.dim() {
                let want_p = if r == i + 1 { -(ell - mm) } else { 0.0 };
                let want_m = if i > 0 && r == i - 1 { ell + mm } else { 0.0 };
                ladder = ladder.max((kp[(r, i)] - want_p).norm()).max((km[(r, i)] - want_m).norm());
            }
        }
    }
    out.push(Check::new("poly_commutators", comm, 1e-12));
    out.push(Check::new("casimir", cas, 1e-12));
    out.push(Check::new("ladder_coefficients", ladder, 1e-12));
    out.push(Check::new("hermitized_2x2", structure_residuals(&hermitized_2x2()).iter().fold(0.0, |a, &b| a.max(b)), 1e-14));
    for (j, gamma, grid) in sl2r_grids() {
        let (res, ratio) = match grid_eigencheck(j, gamma, &grid) {
            Ok(c) => (c.residual, c.ratio),
            Err(_) => (f64::INFINITY, f64::NAN),
        };
        out.push(Check::new(format!("grid_eigencheck_k{j}"), res, 5e-3));
        out.push(Check::new(format!("grid_convergence_k{j}"), (ratio - 4.0).abs(), 0.2));
    }
    let hgrid = GridSpec { region: Region::Rect { x: (0.6, 1.2), y: (0.4, 0.8) }, samples: 11, h: 1e-3, margin: 0.02 };
    let (hres, hratio) = match h_chi_check(1.1, 0.3, 0.2, &hgrid) {
        Ok(c) => (c.residual, c.ratio),
        Err(_) => (f64::INFINITY, f64::NAN),
    };
    out.push(Check::new("h_chi_transport", hres, 5e-3));
    out.push(Check::new("h_chi_convergence", (hratio - 4.0).abs(), 0.2));
    let mut rng = p.rng(6);
    let (mut k3, mut k2) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let l1: f64 = rng.gen_range(-3.0..3.0);
        let lam = [l1, rng.gen_range(-0.95..0.95) * l1, rng.gen_range(-3.0..3.0)];
        k3 = k3.max(match factor_lambda(&Sl2rParam { lambda: lam }, FactorMode::ToK3) {
            Ok(f) => f.reconstruction_error.max(f.conjugation_residual),
            Err(_) => f64::INFINITY,
        });
        let (a, c): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let lam = [a, sign * (a.hypot(c) + rng.gen_range(0.05..2.0)), c];
        k2 = k2.max(match factor_lambda(&Sl2rParam { lambda: lam }, FactorMode::ToK2) {
            Ok(f) => f.reconstruction_error.max(f.conjugation_residual),
            Err(_) => f64::INFINITY,
        });
    }
    out.push(Check::new("factor_to_k3", k3, 1e-10));
    out.push(Check::new("factor_to_k2", k2, 1e-10));
    let qho = qho_generators(m).expect("m >= 3");
    out.push(Check::new("qho_interior_commutators", qho_interior_residuals(&qho).iter().fold(0.0, |a, &b| a.max(b)), 1e-12));
    let min_eig = eig_hermitian(&qho[1], 1e-12).map(|(v, _)| v[0]).unwrap_or(f64::NEG_INFINITY);
    out.push(Check::new("qho_k2_positive", (-min_eig).max(0.0) + if min_eig > 0.0 { 0.0 } else { 1.0 }, 0.0));
    let u = expm_small(&qho[1].scale(C64::new(0.0, -0.7316))).expect("m <= 64");
    let absent = matches!(partner_exists(&u, 1e-8), Ok(Partner::Absent { .. }));
    out.push(Check::new("qho_rotation_partner_absent", count(usize::from(!absent)), 0.0));
    Ok(out)
}

/// `Tr(A B)` without forming the product.
fn trace_of_product(a: &CMat, b: &CMat) -> C64 {
    let d = a.dim();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

fn aawigner(p: &SuiteParams) -> Result<Vec<Check>, SuiteError> {
    let d = p.dim;
    domain((3..=64).contains(&d), || format!("aawigner suite needs 3 <= dim <= 64, got {d}"))?;
    let t = default_thetas(d);
    let n = d / 2;
    let kd = |a: f64, b: f64| if a == b { 1.0 } else { 0.0 };
    let fock = StateVec::basis(d, n);
    let gf = aa_grid(&fock, t).expect("normalized");
    let fock_err = gf
        .j_values
        .iter()
        .zip(&gf.w)
        .flat_map(|(j, row)| row.iter().map(move |w| (w - kd(*j, n as f64) / TAU).abs()))
        .fold(0.0, f64::max);
    let split = split_state(d, n);
    let gs = aa_grid(&split, t).expect("normalized");
    let nf = n as f64;
    let mut split_err = 0.0f64;
    for (j, row) in gs.j_values.iter().zip(&gs.w) {
        for (w, th) in row.iter().zip(&gs.theta_values) {
            let want = (kd(*j, nf) + 2.0 * kd(*j, nf - 0.5) * th.cos() + kd(*j, nf - 1.0)) / (2.0 * TAU);
            split_err = split_err.max((w - want).abs());
        }
    }
    let mf = aa_marginals(&fock, &gf).expect("same dim");
    let ms = aa_marginals(&split, &gs).expect("same dim");
    let fock_marg = mf.p_theta.iter().map(|p| (p - 1.0 / TAU).abs()).fold(0.0, f64::max);
    let split_marg = ms.p_theta.iter().zip(&ms.theta_values).map(|(p, th)| (p - (1.0 + th.cos()) / TAU).abs()).fold(0.0, f64::max);
    let split_j = ms.p_j.iter().zip(&ms.j_values).map(|(p, j)| (p - 0.5 * (kd(*j, nf) + kd(*j, nf - 1.0))).abs()).fold(0.0, f64::max);

    let thetas = theta_grid(t);
    let js = j_grid(d);
    let mut herm = 0.0f64;
    let mut tr = 0.0f64;
    let mut complete = CMat::zeros(d);
    let mut kernels = Vec::with_capacity(js.len() * t);
    for &j in &js {
        for &th in &thetas {
            let k = delta_ct(d, j, th).expect("half-integer J");
            herm = herm.max(hermiticity_residual(&k));
            let want = if j.fract() == 0.0 { 1.0 / TAU } else { 0.0 };
            tr = tr.max((trace(&k) - C64::new(want, 0.0)).norm());
            complete.add_scaled(&k, C64::new(TAU / t as f64, 0.0));
            kernels.push(k);
        }
    }
    let completeness = complete.dist(&CMat::identity(d));

    let mut rng = p.rng(7);
    let f = CMat::from_fn(d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let table = wwm_symbol(&f, t).expect("grid");
    let round = reconstruct_from_symbol(&table).expect("grid").dist(&f);
    let (j0, t0) = (n, t / 3);
    let k0 = &kernels[j0 * t + t0];
    let mut pair = C64::new(0.0, 0.0);
    for (idx, k) in kernels.iter().enumerate() {
        pair += trace_of_product(k0, k) * table.values[idx / t][idx % t];
    }
    let pair_err = (pair * (TAU * TAU / t as f64) - table.values[j0][t0]).norm();

    let num = CMat::from_diag(&(0..d).map(|k| C64::new(k as f64, 0.0)).collect::<Vec<_>>());
    let sym = wwm_symbol(&num, t).expect("grid");
    let sym_err = sym
        .j_values
        .iter()
        .zip(&sym.values)
        .flat_map(|(j, row)| {
            let want = if j.fract() == 0.0 { *j } else { 0.0 };
            row.iter().map(move |z| (z - C64::new(want, 0.0)).norm())
        })
        .fold(0.0, f64::max);

    let psi = random_state(d, &mut rng);
    let imag = aa_grid(&psi, t).expect("normalized").max_imag;

    let lin = SpectrumFn::linear(1.0);
    let mut transport = 0.0f64;
    for step in 0..=8 {
        let time = TAU * step as f64 / 8.0;
        let gt = aa_grid(&evolve(&split, &lin, time), t).expect("normalized");
        for (j, row) in gt.j_values.iter().zip(&gt.w) {
            for (w, th) in row.iter().zip(&gt.theta_values) {
                let back = aa_wigner(&split, *j, th - EVOLVE_SIGN * time).expect("normalized");
                transport = transport.max((w - back).abs());
            }
        }
    }
    let quad = SpectrumFn::new(vec![0.0, 0.0, 1.0]).expect("degree 2");
    let dt = 1e-4;
    let rhs = moyal_rhs(&gs, &quad).expect("grid large enough");
    // five-point stencil: the truncation error of a centered difference
    // grows like (dH)^3 dt^2 and would swamp the check at large D
    let at = |s: f64| aa_grid(&evolve(&split, &quad, s * dt), t).expect("normalized").w;
    let (p2, p1, m1, m2) = (at(2.0), at(1.0), at(-1.0), at(-2.0));
    let mut moyal = 0.0f64;
    for i in 0..gs.w.len() {
        for c in 0..t {
            let fd = (-p2[i][c] + 8.0 * p1[i][c] - 8.0 * m1[i][c] + m2[i][c]) / (12.0 * dt);
            moyal = moyal.max((fd - rhs.values[i][c]).abs());
        }
    }
    let fock_static = moyal_rhs(&gf, &lin).expect("grid").values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let eom = phase_op_eom_check(d, &SpectrumFn::linear(1.5), 1.min(d - 1), &[0.0, 0.5, 2.0]);
    let eom_q = phase_op_eom_check(d, &quad, 2, &[0.0, 0.5, 2.0]);
    Ok(vec![
        Check::new("fock_closed_form", fock_err, 1e-10),
        Check::new("split_closed_form", split_err, 1e-10),
        Check::new("fock_angle_marginal", fock_marg, 1e-10),
        Check::new("split_angle_marginal", split_marg, 1e-10),
        Check::new("split_action_marginal", split_j, 1e-12),
        Check::new("kernel_hermitian", herm, 1e-11),
        Check::new("kernel_trace", tr, 1e-11),
        Check::new("completeness", completeness, 1e-9),
        Check::new("pair_trace", pair_err, 1e-8),
        Check::new("symbol_round_trip", round, 1e-10),
        Check::new("symbol_of_number", sym_err, 1e-10),
        Check::new("wigner_real", imag, 1e-11),
        Check::new("rigid_transport", transport, 1e-9),
        Check::new("moyal_vs_evolution", moyal, 1e-5),
        Check::new("moyal_fock_static", fock_static, 1e-12),
        Check::new("eom_linear_literal_agreement", eom.literal_mismatch.max(eom.direct_residual), 1e-12),
        Check::new("eom_direct_rate", eom_q.direct_residual, 1e-9),
    ])
}

fn cli(p: &SuiteParams) -> Result<Vec<Check>, SuiteError> {
    let d = p.dim;
    domain((3..=64).contains(&d), || format!("cli suite needs 3 <= dim <= 64, got {d}"))?;
    let spec = format!("split:{}", d / 2);
    let render = || {
        let psi = parse_state_spec(&spec).and_then(|s| s.materialize(d)).expect("in range");
        render_wigner_csv(&aa_grid(&psi, default_thetas(d)).expect("normalized"))
    };
    let deterministic = usize::from(render() != render());
    let mut state_err = 0.0f64;
    let fock = parse_state_spec("fock:1").and_then(|s| s.materialize(d)).map(|s| s.amps);
    state_err = state_err.max(fock.map(|a| a.iter().enumerate().map(|(i, z)| (z - C64::new(kd(i, 1), 0.0)).norm()).fold(0.0, f64::max)).unwrap_or(f64::INFINITY));
    let phase = parse_state_spec("phase:2").and_then(|s| s.materialize(d)).map(|s| s.amps);
    state_err = state_err.max(phase.map(|a| a.iter().zip(phase_state(d, 2)).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)).unwrap_or(f64::INFINITY));
    let ham_err = match parse_hamiltonian("n^2 - 0.25*n") {
        Ok(h) => (0..d).map(|k| (h.eval(k as f64) - ((k * k) as f64 - 0.25 * k as f64)).abs()).fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    let cfg = RunConfig { dim: Some(d), suite: Some("all".into()), format: Some(OutputFormat::Json), r: Some([1, 1, 0, 1]), ..Default::default() };
    let rt = serde_json::to_string(&cfg).ok().and_then(|s| RunConfig::from_json(&s).ok());
    Ok(vec![
        Check::new("deterministic_wigner_csv", count(deterministic), 0.0),
        Check::new("state_spec_examples", state_err, 1e-15),
        Check::new("hamiltonian_evaluation", ham_err, 1e-12),
        Check::new("config_round_trip", count(usize::from(rt.as_ref() != Some(&cfg))), 0.0),
    ])
}

fn kd(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert_eq!(run_suite("nope", &SuiteParams::new(5)), Err(SuiteError::Unknown("nope".into())));
    }

    #[test]
    fn metaplectic_rejects_even() {
        match run_suite("metaplectic", &SuiteParams::new(6)) {
            Err(SuiteError::Domain(m)) => assert!(m.contains("dimension must be an odd prime")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tolerance_override_applies() {
        let p = SuiteParams { tol: Some(0.0), ..SuiteParams::new(3) };
        let checks = run_suite("hwgroup", &p).unwrap();
        assert!(checks.iter().all(|c| c.tol.0 == 0.0));
    }

    #[test]
    fn small_suites_pass() {
        for (s, d) in [("linalg", 6), ("modring", 7), ("modring", 8), ("schwinger", 6), ("wk", 4), ("metaplectic", 5), ("hwgroup", 6), ("qosc", 5), ("sl2r", 8), ("aawigner", 7), ("cli", 5)] {
            for c in run_suite(s, &SuiteParams::new(d)).unwrap() {
                assert!(c.pass, "{s} d={d}: {c:?}");
            }
        }
    }
}
