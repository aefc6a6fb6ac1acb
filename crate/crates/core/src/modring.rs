//! Exact arithmetic over Z_D, Gauss sums and SL(2, Z_D).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::C64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModError {
    #[error("{a} is not invertible mod {d} (gcd = {gcd})")]
    NotInvertible { a: i64, d: usize, gcd: usize },
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(usize),
    #[error("{0} is not an odd prime")]
    NotOddPrime(usize),
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(usize, usize),
    #[error("determinant {det} is not 1 mod {d}")]
    BadDeterminant { det: usize, d: usize },
    #[error("no k <= {cap} with a^k = I")]
    OrderExceedsCap { cap: u64 },
    #[error("index {index} out of range for SL(2, Z_{d})")]
    IndexOutOfRange { index: u64, d: usize },
}

/// Reduce `x` into `[0, d)`.
pub fn reduce(x: i64, d: usize) -> usize {
    x.rem_euclid(d as i64) as usize
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn mod_inverse(a: i64, d: usize) -> Result<usize, ModError> {
    if d < 2 {
        return Err(ModError::ModulusTooSmall(d));
    }
    let a_red = reduce(a, d) as i64;
    let (mut r0, mut r1) = (d as i64, a_red);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(ModError::NotInvertible { a, d, gcd: r0 as usize });
    }
    Ok(reduce(t0, d))
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

pub fn is_odd_prime(n: usize) -> bool {
    n % 2 == 1 && is_prime(n)
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn pow_mod(base: usize, mut exp: u64, d: usize) -> usize {
    let m = d as u128;
    let mut result = 1u128 % m;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    result as usize
}

/// Smallest generator of the multiplicative group mod an odd prime.
pub fn primitive_root(d: usize) -> Result<usize, ModError> {
    if !is_odd_prime(d) {
        return Err(ModError::NotOddPrime(d));
    }
    let factors = prime_factors(d - 1);
    (2..d)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, ((d - 1) / q) as u64, d) != 1))
        .ok_or(ModError::NotOddPrime(d))
}

/// Legendre-style symbol (-1 | p) for an odd prime p.
pub fn minus_one_residue_symbol(p: usize) -> i64 {
    if p % 4 == 1 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussSumValue {
    pub value: C64,
    pub modulus: usize,
    pub coefficient: usize,
}

/// `d^{-1/2} sum_n exp(2 pi i m n^2 / d)` by direct summation; the exponent is
/// reduced mod d before it becomes a phase.
pub fn gauss_sum(m: i64, d: usize) -> Result<GaussSumValue, ModError> {
    if d < 2 {
        return Err(ModError::ModulusTooSmall(d));
    }
    let m_red = reduce(m, d);
    let g0 = std::f64::consts::TAU / d as f64;
    let sum: C64 = (0..d)
        .map(|n| {
            let e = (m_red as u128 * (n as u128 * n as u128) % d as u128) as f64;
            C64::from_polar(1.0, g0 * e)
        })
        .sum();
    Ok(GaussSumValue { value: sum / (d as f64).sqrt(), modulus: d, coefficient: m_red })
}

/// Integer 2x2 matrix mod D with unit determinant, acting on columns as
/// `m' = (s1 m1 + t1 m2, s2 m1 + t2 m2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SL2Elem {
    pub d: usize,
    pub s1: usize,
    pub t1: usize,
    pub s2: usize,
    pub t2: usize,
}

impl SL2Elem {
    pub fn new(d: usize, s1: i64, t1: i64, s2: i64, t2: i64) -> Result<Self, ModError> {
        if d < 2 {
            return Err(ModError::ModulusTooSmall(d));
        }
        let e = SL2Elem { d, s1: reduce(s1, d), t1: reduce(t1, d), s2: reduce(s2, d), t2: reduce(t2, d) };
        let det = e.det();
        if det != 1 % d {
            return Err(ModError::BadDeterminant { det, d });
        }
        Ok(e)
    }

    pub fn identity(d: usize) -> Self {
        SL2Elem { d, s1: 1 % d, t1: 0, s2: 0, t2: 1 % d }
    }

    pub fn det(&self) -> usize {
        let d = self.d as i128;
        ((self.s1 as i128 * self.t2 as i128 - self.t1 as i128 * self.s2 as i128).rem_euclid(d)) as usize
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.d)
    }

    /// Image of the label pair `(m1, m2)`, reduced mod D.
    pub fn apply(&self, m1: i64, m2: i64) -> (usize, usize) {
        let d = self.d as i128;
        let (m1, m2) = (m1 as i128, m2 as i128);
        let a = (self.s1 as i128 * m1 + self.t1 as i128 * m2).rem_euclid(d);
        let b = (self.s2 as i128 * m1 + self.t2 as i128 * m2).rem_euclid(d);
        (a as usize, b as usize)
    }

    /// Element number `index` in a fixed enumeration of SL(2, Z_p), p prime.
    /// The index encodes a nonzero first column plus one free entry.
    pub fn from_index(d: usize, index: u64) -> Result<Self, ModError> {
        if !is_prime(d) {
            return Err(ModError::NotOddPrime(d));
        }
        let dd = d as u64;
        if index >= sl2_group_order(d) {
            return Err(ModError::IndexOutOfRange { index, d });
        }
        let free = (index % dd) as i64;
        let col = index / dd + 1;
        let s1 = (col % dd) as i64;
        let s2 = (col / dd) as i64;
        if s1 != 0 {
            let t1 = free;
            let t2 = (1 + t1 * s2) * mod_inverse(s1, d)? as i64;
            SL2Elem::new(d, s1, t1, s2, t2)
        } else {
            let t2 = free;
            let t1 = -(mod_inverse(s2, d)? as i64);
            SL2Elem::new(d, s1, t1, s2, t2)
        }
    }
}

pub fn sl2_mul(a: &SL2Elem, b: &SL2Elem) -> Result<SL2Elem, ModError> {
    if a.d != b.d {
        return Err(ModError::ModulusMismatch(a.d, b.d));
    }
    let d = a.d as u128;
    let f = |x: usize, y: usize, z: usize, w: usize| {
        ((x as u128 * y as u128 + z as u128 * w as u128) % d) as usize
    };
    Ok(SL2Elem {
        d: a.d,
        s1: f(a.s1, b.s1, a.t1, b.s2),
        t1: f(a.s1, b.t1, a.t1, b.t2),
        s2: f(a.s2, b.s1, a.t2, b.s2),
        t2: f(a.s2, b.t1, a.t2, b.t2),
    })
}

pub fn sl2_inv(a: &SL2Elem) -> SL2Elem {
    let d = a.d;
    SL2Elem {
        d,
        s1: a.t2,
        t1: reduce(-(a.t1 as i64), d),
        s2: reduce(-(a.s2 as i64), d),
        t2: a.s1,
    }
}

/// `|SL(2, Z_D)| = D^3 prod_{p | D} (1 - p^{-2})`.
pub fn sl2_group_order(d: usize) -> u64 {
    let mut order = (d as u64).pow(3);
    for p in prime_factors(d) {
        let p = p as u64;
        order = order / (p * p) * (p * p - 1);
    }
    order
}

pub fn sl2_order(a: &SL2Elem) -> Result<u64, ModError> {
    let cap = sl2_group_order(a.d);
    let id = SL2Elem::identity(a.d);
    let mut x = *a;
    for k in 1..=cap {
        if x == id {
            return Ok(k);
        }
        x = sl2_mul(&x, a)?;
    }
    Err(ModError::OrderExceedsCap { cap })
}

/// Translation generator `[[1,1],[0,1]]`.
pub fn g1(d: usize) -> SL2Elem {
    SL2Elem { d, s1: 1 % d, t1: 1 % d, s2: 0, t2: 1 % d }
}

/// Squeeze generator `diag(g0, g0^{-1})` with g0 the minimal primitive root.
pub fn g2(d: usize) -> Result<SL2Elem, ModError> {
    let g0 = primitive_root(d)?;
    let inv = mod_inverse(g0 as i64, d)?;
    SL2Elem::new(d, g0 as i64, 0, 0, inv as i64)
}

/// All rotations `[[a,-b],[b,a]]` with `a^2 + b^2 = 1 mod d`.
pub fn rotation_family(d: usize) -> Result<Vec<SL2Elem>, ModError> {
    if !is_odd_prime(d) {
        return Err(ModError::NotOddPrime(d));
    }
    let mut out = Vec::new();
    for a in 0..d {
        for b in 0..d {
            if (a * a + b * b) % d == 1 {
                out.push(SL2Elem::new(d, a as i64, -(b as i64), b as i64, a as i64)?);
            }
        }
    }
    Ok(out)
}
