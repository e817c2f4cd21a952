//! Run configuration shared by the CLI and the test harness.

use std::fmt;
use std::str::FromStr;

use glq_core::{GPParams, ScalarQ, MAX_N};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("n must be between 1 and {MAX_N}, got {0}")]
    BadN(usize),
    #[error("n = {0} needs --allow-heavy for the exact suites")]
    NeedsHeavy(usize),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown sigma `{0}` (expected lambda, r or minus-one)")]
    UnknownSigma(String),
    #[error("--lambda1 and --lambda2 must be given together")]
    HalfPair,
    #[error("bad scalar `{text}`: {source}")]
    Scalar {
        text: String,
        #[source]
        source: glq_core::ScalarError,
    },
    #[error("eigenvalues must be nonzero")]
    ZeroEigenvalue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
    Both,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Numeric => "numeric",
            Mode::Both => "both",
        }
    }

    pub fn exact(self) -> bool {
        matches!(self, Mode::Exact | Mode::Both)
    }

    pub fn numeric(self) -> bool {
        matches!(self, Mode::Numeric | Mode::Both)
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "numeric" => Ok(Mode::Numeric),
            "both" => Ok(Mode::Both),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Rmatrix,
    Bimodule,
    Calculus,
    Connection,
    Ncpoly,
    Involution,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Rmatrix, Suite::Bimodule, Suite::Calculus, Suite::Connection, Suite::Ncpoly, Suite::Involution];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Rmatrix => "rmatrix",
            Suite::Bimodule => "bimodule",
            Suite::Calculus => "calculus",
            Suite::Connection => "connection",
            Suite::Ncpoly => "ncpoly",
            Suite::Involution => "involution",
        }
    }

    pub fn is_numeric(self) -> bool {
        self == Suite::Involution
    }
}

/// Parses `all` or a comma-separated list into a sorted, deduplicated set.
pub fn parse_suites(text: &str) -> Result<Vec<Suite>, ConfigError> {
    if text.trim() == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let s = Suite::ALL.into_iter().find(|s| s.name() == part).ok_or_else(|| ConfigError::UnknownSuite(part.into()))?;
        out.push(s);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// The generalized permutation selected on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigmaChoice {
    Lambda,
    R,
    MinusOne,
    Custom { lambda1: ScalarQ, lambda2: ScalarQ },
}

impl SigmaChoice {
    pub fn params(&self) -> GPParams {
        match self {
            SigmaChoice::Lambda => GPParams::sigma_lambda(),
            SigmaChoice::R => GPParams::sigma_r(),
            SigmaChoice::MinusOne => GPParams::minus_one(),
            SigmaChoice::Custom { lambda1, lambda2 } => GPParams::new(lambda1.clone(), lambda2.clone()).expect("validated"),
        }
    }

    pub fn from_args(named: Option<&str>, l1: Option<&str>, l2: Option<&str>) -> Result<Self, ConfigError> {
        match (l1, l2) {
            (Some(a), Some(b)) => {
                let parse = |t: &str| ScalarQ::parse(t).map_err(|source| ConfigError::Scalar { text: t.into(), source });
                let (lambda1, lambda2) = (parse(a)?, parse(b)?);
                if lambda1.is_zero() || lambda2.is_zero() {
                    return Err(ConfigError::ZeroEigenvalue);
                }
                Ok(SigmaChoice::Custom { lambda1, lambda2 })
            }
            (None, None) => match named.unwrap_or("r") {
                "lambda" => Ok(SigmaChoice::Lambda),
                "r" => Ok(SigmaChoice::R),
                "minus-one" => Ok(SigmaChoice::MinusOne),
                other => Err(ConfigError::UnknownSigma(other.into())),
            },
            _ => Err(ConfigError::HalfPair),
        }
    }
}

impl fmt::Display for SigmaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaChoice::Lambda => f.write_str("lambda"),
            SigmaChoice::R => f.write_str("r"),
            SigmaChoice::MinusOne => f.write_str("minus-one"),
            SigmaChoice::Custom { lambda1, lambda2 } => write!(f, "lambda1={lambda1}; lambda2={lambda2}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub mode: Mode,
    pub sigma: SigmaChoice,
    pub suites: Vec<Suite>,
    pub seed: u64,
    pub allow_heavy: bool,
    pub timings: bool,
}

impl RunConfig {
    pub fn new(n: usize) -> Self {
        RunConfig { n, mode: Mode::Both, sigma: SigmaChoice::R, suites: Suite::ALL.to_vec(), seed: 0, allow_heavy: false, timings: false }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=MAX_N).contains(&self.n) {
            return Err(ConfigError::BadN(self.n));
        }
        let exact_heavy = self.mode.exact() && self.suites.iter().any(|s| !s.is_numeric());
        if self.n > 3 && exact_heavy && !self.allow_heavy {
            return Err(ConfigError::NeedsHeavy(self.n));
        }
        Ok(())
    }

    /// Suites that actually run under the selected mode, in report order.
    pub fn active_suites(&self) -> Vec<Suite> {
        self.suites.iter().copied().filter(|s| if s.is_numeric() { self.mode.numeric() } else { self.mode.exact() }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse() {
        assert_eq!(parse_suites("all").unwrap().len(), 6);
        assert_eq!(parse_suites("ncpoly, rmatrix,ncpoly").unwrap(), vec![Suite::Rmatrix, Suite::Ncpoly]);
        assert!(parse_suites("bogus").is_err());
    }

    #[test]
    fn sigma_args() {
        assert_eq!(SigmaChoice::from_args(Some("lambda"), None, None).unwrap(), SigmaChoice::Lambda);
        assert!(matches!(SigmaChoice::from_args(None, Some("q^-2"), Some("q^2")).unwrap(), SigmaChoice::Custom { .. }));
        assert!(SigmaChoice::from_args(None, Some("q"), None).is_err());
        assert!(SigmaChoice::from_args(None, Some("0"), Some("1")).is_err());
        assert!(SigmaChoice::from_args(None, Some("q^^"), Some("1")).is_err());
    }

    #[test]
    fn heavy_gate() {
        let mut c = RunConfig::new(4);
        assert!(c.validate().is_err());
        c.mode = Mode::Numeric;
        assert!(c.validate().is_ok());
        assert!(RunConfig::new(5).validate().is_err());
    }
}
