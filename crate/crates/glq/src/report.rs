//! Check rows, the JSON report and its text rendering.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::time::Instant;

use glq_core::linalg::Matrix;
use glq_core::ScalarQ;
use serde::Serialize;

use crate::config::{Mode, RunConfig, Suite};
use crate::serial::{ConnectionJson, MetricJson};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// At most this many residual coordinates are kept per failing check.
pub const MAX_COORDS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ResolvedWithConvention,
    Skipped,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ResolvedWithConvention => "RESOLVED",
            Status::Skipped => "SKIP",
        }
    }

    pub fn ok(self) -> bool {
        self != Status::Fail
    }
}

/// Convention under which a cross-check resolved.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Convention {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wedge: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral_sign: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_sign: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension_sign: Option<i8>,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(w) = self.wedge {
            parts.push(format!("wedge={w}"));
        }
        for (k, v) in [("spectral_sign", self.spectral_sign), ("closed_form_sign", self.closed_form_sign), ("extension_sign", self.extension_sign)] {
            if let Some(v) = v {
                parts.push(format!("{k}={v:+}"));
            }
        }
        f.write_str(&parts.join(", "))
    }
}

/// What a check closure reports back.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub convention: Option<Convention>,
    pub residual_nonzeros: usize,
    pub residual: Option<f64>,
    pub coords: Vec<[usize; 2]>,
    pub note: Option<String>,
}

impl Outcome {
    pub fn from_bool(ok: bool) -> Self {
        Outcome {
            status: if ok { Status::Pass } else { Status::Fail },
            convention: None,
            residual_nonzeros: usize::from(!ok),
            residual: None,
            coords: Vec::new(),
            note: None,
        }
    }

    pub fn from_count(nonzeros: usize) -> Self {
        Outcome { residual_nonzeros: nonzeros, ..Self::from_bool(nonzeros == 0) }
    }

    /// Passes iff the residual matrix is exactly zero.
    pub fn zero_matrix(m: &Matrix<ScalarQ>) -> Self {
        let pos = m.nonzero_positions();
        let mut o = Self::from_count(pos.len());
        o.coords = pos.into_iter().take(MAX_COORDS).map(|(i, j)| [i, j]).collect();
        o
    }

    pub fn numeric(residual: f64, ok: bool) -> Self {
        Outcome { residual: Some(residual), ..Self::from_bool(ok) }
    }

    pub fn skipped(why: impl Into<String>) -> Self {
        Outcome { status: Status::Skipped, residual_nonzeros: 0, note: Some(why.into()), ..Self::from_bool(true) }
    }

    /// Marks a passing check as resolved under the given convention.
    pub fn resolved(mut self, convention: Convention) -> Self {
        if self.status == Status::Pass {
            self.status = Status::ResolvedWithConvention;
        }
        self.convention = Some(convention);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Combines sub-results: fails if any fails, nonzeros add up.
    pub fn all(parts: impl IntoIterator<Item = Outcome>) -> Self {
        let mut acc = Outcome::from_bool(true);
        acc.residual_nonzeros = 0;
        for p in parts {
            if p.status == Status::Fail {
                acc.status = Status::Fail;
            }
            acc.residual_nonzeros += p.residual_nonzeros;
            acc.coords.extend(p.coords);
            acc.residual = match (acc.residual, p.residual) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
        }
        acc.coords.truncate(MAX_COORDS);
        acc
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub suite: Suite,
    /// Plain statement of the identity being checked.
    pub paper_ref: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,
    pub residual_nonzeros: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residual_coords: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub runtime_ms: Option<f64>,
}

/// Collects checks for one suite, timing each closure.
pub struct Recorder {
    suite: Suite,
    timings: bool,
    pub checks: Vec<Check>,
}

impl Recorder {
    pub fn new(suite: Suite, timings: bool) -> Self {
        Recorder { suite, timings, checks: Vec::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, statement: &str, f: impl FnOnce() -> Outcome) {
        let t = Instant::now();
        let o = f();
        let ms = t.elapsed().as_secs_f64() * 1e3;
        self.checks.push(Check {
            name: name.into(),
            suite: self.suite,
            paper_ref: statement.to_string(),
            status: o.status,
            convention: o.convention,
            residual_nonzeros: o.residual_nonzeros,
            residual: o.residual,
            residual_coords: o.coords,
            note: o.note,
            runtime_ms: self.timings.then_some((ms * 1000.0).round() / 1000.0),
        });
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub n: usize,
    pub mode: Mode,
    pub seed: u64,
    pub version: &'static str,
    pub sigma: String,
    pub suites: Vec<Suite>,
    pub conventions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Artifacts {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature_hash: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric_basis: Option<MetricJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub checks: Vec<Check>,
    pub artifacts: Artifacts,
}

impl Report {
    pub fn new(cfg: &RunConfig) -> Self {
        Report {
            meta: Meta {
                n: cfg.n,
                mode: cfg.mode,
                seed: cfg.seed,
                version: VERSION,
                sigma: cfg.sigma.to_string(),
                suites: cfg.active_suites(),
                conventions: BTreeMap::new(),
            },
            checks: Vec::new(),
            artifacts: Artifacts::default(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status.ok())
    }

    pub fn count(&self, s: Status) -> usize {
        self.checks.iter().filter(|c| c.status == s).count()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let m = &self.meta;
        let suites: Vec<&str> = m.suites.iter().map(|s| s.name()).collect();
        let _ = writeln!(out, "glq {} | n = {} | mode = {} | sigma = {} | seed = {}", m.version, m.n, m.mode.name(), m.sigma, m.seed);
        let _ = writeln!(out, "suites: {}", suites.join(", "));
        let mut current = None;
        for c in &self.checks {
            if current != Some(c.suite) {
                let _ = writeln!(out, "\n== {} ==", c.suite.name());
                current = Some(c.suite);
            }
            let mut line = format!("[{:<8}] {}", c.status.label(), c.name);
            if c.status == Status::Fail || c.residual_nonzeros > 0 {
                let _ = write!(line, "  nonzeros={}", c.residual_nonzeros);
            }
            if let Some(r) = c.residual {
                let _ = write!(line, "  residual={r:.3e}");
            }
            if let Some(conv) = &c.convention {
                let _ = write!(line, "  [{conv}]");
            }
            if let Some(ms) = c.runtime_ms {
                let _ = write!(line, "  {ms:.1} ms");
            }
            let _ = writeln!(out, "{line}");
            let _ = writeln!(out, "           {}", c.paper_ref);
            if let Some(note) = &c.note {
                let _ = writeln!(out, "           note: {note}");
            }
            if c.status == Status::Fail && !c.residual_coords.is_empty() {
                let coords: Vec<String> = c.residual_coords.iter().map(|[i, j]| format!("({i},{j})")).collect();
                let _ = writeln!(out, "           residual at {}", coords.join(" "));
            }
        }
        if !m.conventions.is_empty() {
            let _ = writeln!(out, "\n== conventions ==");
            for (k, v) in &m.conventions {
                let _ = writeln!(out, "{k}: {v}");
            }
        }
        if let Some(h) = &self.artifacts.curvature_hash {
            let _ = writeln!(out, "\ncurvature sha256: {h}");
        }
        if let Some(mb) = &self.artifacts.metric_basis {
            let _ = writeln!(out, "metric solutions: {}", mb.dimension);
        }
        let _ = writeln!(
            out,
            "\n{} checks: {} pass, {} resolved, {} skipped, {} fail",
            self.checks.len(),
            self.count(Status::Pass),
            self.count(Status::ResolvedWithConvention),
            self.count(Status::Skipped),
            self.count(Status::Fail)
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_combination() {
        let o = Outcome::all([Outcome::from_count(0), Outcome::from_count(3), Outcome::numeric(1e-3, true)]);
        assert_eq!(o.status, Status::Fail);
        assert_eq!(o.residual_nonzeros, 3);
        assert_eq!(o.residual, Some(1e-3));
    }

    #[test]
    fn resolved_keeps_failures() {
        let c = Convention { wedge: Some("pi_image"), closed_form_sign: Some(1), ..Default::default() };
        assert_eq!(c.to_string(), "wedge=pi_image, closed_form_sign=+1");
        assert_eq!(Outcome::from_bool(false).resolved(c.clone()).status, Status::Fail);
        assert_eq!(Outcome::from_bool(true).resolved(c).status, Status::ResolvedWithConvention);
    }

    #[test]
    fn coords_are_capped() {
        let m = Matrix::from_fn(4, 4, |_, _| ScalarQ::one());
        let o = Outcome::zero_matrix(&m);
        assert_eq!(o.residual_nonzeros, 16);
        assert_eq!(o.coords.len(), MAX_COORDS);
    }
}
