//! Deterministic text renderings. Floats use 17 significant digits in
//! scientific notation with a '.' decimal point.

use qphase_core::aawigner::{AAGrid, Marginals, SymbolTable};
use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// A float written into JSON verbatim in the fixed format; non-finite values
/// become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sci(pub f64);

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            RawValue::from_string(fmt_num(self.0)).map_err(serde::ser::Error::custom)?.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

pub fn sci_vec(v: &[f64]) -> Vec<Sci> {
    v.iter().copied().map(Sci).collect()
}

pub fn render_wigner_csv(g: &AAGrid) -> String {
    let mut out = String::from("J,theta,W\n");
    for (j, row) in g.j_values.iter().zip(&g.w) {
        for (th, w) in g.theta_values.iter().zip(row) {
            out.push_str(&format!("{},{},{}\n", fmt_num(*j), fmt_num(*th), fmt_num(*w)));
        }
    }
    out
}

pub fn render_marginals_csv(m: &Marginals) -> String {
    let mut out = String::from("J,P_J\n");
    for (j, p) in m.j_values.iter().zip(&m.p_j) {
        out.push_str(&format!("{},{}\n", fmt_num(*j), fmt_num(*p)));
    }
    out.push_str("\ntheta,P_theta\n");
    for (th, p) in m.theta_values.iter().zip(&m.p_theta) {
        out.push_str(&format!("{},{}\n", fmt_num(*th), fmt_num(*p)));
    }
    out
}

pub fn render_evolve_csv(series: &[(f64, Marginals)]) -> String {
    let mut out = String::from("t,theta,P_theta\n");
    for (t, m) in series {
        for (th, p) in m.theta_values.iter().zip(&m.p_theta) {
            out.push_str(&format!("{},{},{}\n", fmt_num(*t), fmt_num(*th), fmt_num(*p)));
        }
    }
    out
}

pub fn render_symbol_csv(s: &SymbolTable) -> String {
    let mut out = String::from("J,theta,re,im\n");
    for (j, row) in s.j_values.iter().zip(&s.values) {
        for (th, z) in s.theta_values.iter().zip(row) {
            out.push_str(&format!("{},{},{},{}\n", fmt_num(*j), fmt_num(*th), fmt_num(z.re), fmt_num(z.im)));
        }
    }
    out
}
