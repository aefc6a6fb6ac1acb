//! Text front ends: state specifications, amplitude files and polynomial
//! spectra.

use std::path::PathBuf;

use thiserror::Error;

use crate::aawigner::{split_state, SpectrumFn, MAX_DEGREE};
use crate::linalg::C64;
use crate::qosc::phase_state;
use crate::wk::{StateVec, WkError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("{what} = {value} out of range for dimension {dim}")]
    OutOfRange { what: &'static str, value: u64, dim: usize },
    #[error("amplitude file: {0}")]
    Amps(String),
    #[error(transparent)]
    State(#[from] WkError),
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { pos, msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateSpec {
    Fock(u64),
    /// `(|n> + |n-1>)/√2`.
    Split(u64),
    Phase(u64),
    Amps(PathBuf),
}

/// `fock:<n> | split:<n> | phase:<r> | amps:<path>`.
pub fn parse_state_spec(text: &str) -> Result<StateSpec, ParseError> {
    let Some(colon) = text.find(':') else {
        return Err(syntax(text.len(), "expected ':' after state kind"));
    };
    let (kind, arg) = (&text[..colon], &text[colon + 1..]);
    let arg_pos = colon + 1;
    let number = || -> Result<u64, ParseError> {
        if arg.is_empty() {
            return Err(syntax(arg_pos, "expected a nonnegative integer"));
        }
        if let Some(i) = arg.find(|c: char| !c.is_ascii_digit()) {
            return Err(syntax(arg_pos + i, "expected a digit"));
        }
        arg.parse().map_err(|_| syntax(arg_pos, "integer too large"))
    };
    match kind {
        "fock" => Ok(StateSpec::Fock(number()?)),
        "split" => Ok(StateSpec::Split(number()?)),
        "phase" => Ok(StateSpec::Phase(number()?)),
        "amps" if arg.is_empty() => Err(syntax(arg_pos, "expected a file path")),
        "amps" => Ok(StateSpec::Amps(PathBuf::from(arg))),
        _ => Err(syntax(0, format!("unknown state kind '{kind}', expected fock, split, phase or amps"))),
    }
}

impl StateSpec {
    /// Builds the normalized state in dimension `dim`.
    pub fn materialize(&self, dim: usize) -> Result<StateVec, ParseError> {
        let check = |what, value: u64, lo: u64| {
            if value < lo || value >= dim as u64 {
                Err(ParseError::OutOfRange { what, value, dim })
            } else {
                Ok(value as usize)
            }
        };
        match self {
            StateSpec::Fock(n) => Ok(StateVec::basis(dim, check("n", *n, 0)?)),
            StateSpec::Split(n) => Ok(split_state(dim, check("n", *n, 1)?)),
            StateSpec::Phase(r) => {
                let r = check("r", *r, 0)?;
                Ok(StateVec { d: dim, amps: phase_state(dim, r as i64) })
            }
            StateSpec::Amps(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| ParseError::Amps(format!("{}: {e}", path.display())))?;
                let psi = parse_amps_json(&text)?;
                if psi.d != dim {
                    return Err(ParseError::Amps(format!("{} amplitudes, expected {dim}", psi.d)));
                }
                Ok(psi)
            }
        }
    }
}

/// JSON array of `[re, im]` pairs, normalized on load.
pub fn parse_amps_json(text: &str) -> Result<StateVec, ParseError> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text).map_err(|e| ParseError::Amps(e.to_string()))?;
    Ok(StateVec::normalized(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())?)
}

const MAX_NESTING: usize = 64;
const MAX_EXPONENT: u32 = 64;

/// Coefficients, lowest degree first.
type Poly = Vec<f64>;

struct HParser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl HParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(syntax(self.pos, "expression nested too deeply"));
        }
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = add(&acc, &rhs, if op == b'+' { 1.0 } else { -1.0 });
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == b'*' {
                mul(&acc, &rhs, at)?
            } else {
                if degree(&rhs) > 0 {
                    return Err(syntax(at, "division by a non-constant"));
                }
                if rhs[0] == 0.0 {
                    return Err(syntax(at, "division by zero"));
                }
                acc.iter().map(|c| c / rhs[0]).collect()
            };
            finite(&acc, at)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.nest(|p| p.unary()).map(|v| v.iter().map(|c| -c).collect())
            }
            Some(b'+') => {
                self.pos += 1;
                self.nest(|p| p.unary())
            }
            _ => self.power(),
        }
    }

    fn nest(&mut self, f: impl FnOnce(&mut Self) -> Result<Poly, ParseError>) -> Result<Poly, ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(syntax(self.pos, "expression nested too deeply"));
        }
        let out = f(self);
        self.depth -= 1;
        out
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        self.pos += 1;
        let exp = self.nest(|p| p.unary())?;
        if degree(&exp) > 0 || exp[0] < 0.0 || exp[0].fract() != 0.0 || exp[0] > MAX_EXPONENT as f64 {
            return Err(syntax(at, format!("exponent must be an integer in 0..={MAX_EXPONENT}")));
        }
        let mut out = vec![1.0];
        for _ in 0..exp[0] as u32 {
            out = mul(&out, &base, at)?;
        }
        finite(&out, at)?;
        Ok(out)
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            None => Err(syntax(self.pos, "unexpected end of input")),
            Some(b'n') => {
                self.pos += 1;
                Ok(vec![0.0, 1.0])
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(syntax(self.pos, "expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let s = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
                    self.pos += 1;
                }
                if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
                    let mut q = self.pos + 1;
                    if q < self.src.len() && matches!(self.src[q], b'+' | b'-') {
                        q += 1;
                    }
                    if q < self.src.len() && self.src[q].is_ascii_digit() {
                        while q < self.src.len() && self.src[q].is_ascii_digit() {
                            q += 1;
                        }
                        self.pos = q;
                    }
                }
                let text = std::str::from_utf8(&self.src[s..self.pos]).expect("ascii");
                let v: f64 = text.parse().map_err(|_| syntax(s, format!("malformed number '{text}'")))?;
                finite(&[v], s)?;
                Ok(vec![v])
            }
            Some(_) => Err(syntax(self.pos, "expected a number, 'n' or '('")),
        }
    }
}

fn degree(p: &[f64]) -> usize {
    p.iter().rposition(|&c| c != 0.0).unwrap_or(0)
}

fn trim(mut p: Poly) -> Poly {
    p.truncate(degree(&p) + 1);
    p
}

fn add(a: &[f64], b: &[f64], sign: f64) -> Poly {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += sign * c;
    }
    trim(out)
}

fn mul(a: &[f64], b: &[f64], pos: usize) -> Result<Poly, ParseError> {
    let (a, b) = (trim(a.to_vec()), trim(b.to_vec()));
    let deg = degree(&a) + degree(&b);
    if (a.len() > 1 || a[0] != 0.0) && (b.len() > 1 || b[0] != 0.0) && deg > MAX_DEGREE {
        return Err(syntax(pos, format!("polynomial degree exceeds {MAX_DEGREE}")));
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    Ok(trim(out))
}

fn finite(p: &[f64], pos: usize) -> Result<(), ParseError> {
    if p.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(syntax(pos, "coefficient overflow"))
    }
}

/// Polynomial in `n` with `+ - * / ^` and parentheses, e.g. `n^2 - 0.25*n`.
/// Division is by constants only; exponents are literal nonnegative integers.
pub fn parse_hamiltonian(text: &str) -> Result<SpectrumFn, ParseError> {
    let mut p = HParser { src: text.as_bytes(), pos: 0, depth: 0 };
    let poly = p.expr()?;
    if p.peek().is_some() {
        return Err(syntax(p.pos, "unexpected trailing input"));
    }
    SpectrumFn::new(poly).map_err(|e| syntax(0, e.to_string()))
}
