//! Run configuration shared by the command-line front end and config files.
//! Every field is optional so that file values can be overlaid by flags.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dim: Option<usize>,
    pub suite: Option<String>,
    pub tol: Option<f64>,
    pub kappa: Option<i64>,
    pub hamiltonian: Option<String>,
    pub state: Option<String>,
    pub thetas: Option<usize>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub format: Option<OutputFormat>,
    /// SL(2, Z_D) entries `[s1, t1, s2, t2]`.
    pub r: Option<[i64; 4]>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            dim: over.dim.or(self.dim),
            suite: over.suite.or(self.suite),
            tol: over.tol.or(self.tol),
            kappa: over.kappa.or(self.kappa),
            hamiltonian: over.hamiltonian.or(self.hamiltonian),
            state: over.state.or(self.state),
            thetas: over.thetas.or(self.thetas),
            t0: over.t0.or(self.t0),
            t1: over.t1.or(self.t1),
            steps: over.steps.or(self.steps),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
            r: over.r.or(self.r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = RunConfig { dim: Some(7), suite: Some("all".into()), format: Some(OutputFormat::Json), r: Some([1, 2, 0, 1]), ..Default::default() };
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), c);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(RunConfig::from_json("{\"dimension\": 3}").is_err());
        assert!(RunConfig::from_json("{\"format\": \"xml\"}").is_err());
    }

    #[test]
    fn flags_win() {
        let file = RunConfig::from_json("{\"dim\": 5, \"state\": \"fock:1\"}").unwrap();
        let flags = RunConfig { dim: Some(9), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!(merged.dim, Some(9));
        assert_eq!(merged.state.as_deref(), Some("fock:1"));
    }
}
