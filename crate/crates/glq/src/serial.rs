//! JSON shapes for polynomials, connections and metrics. Indices are 1-based.

use glq_core::connection::{ConnectionMatrix, MetricSolution};
use glq_core::linalg::Matrix;
use glq_core::ncpoly::{Kind, Letter, NCPoly};
use glq_core::ScalarQ;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SerialError {
    #[error("letter index out of range for n = {n}: {letter:?}")]
    Index { n: usize, letter: LetterJson },
    #[error("bad coefficient `{text}`: {source}")]
    Coeff {
        text: String,
        #[source]
        source: glq_core::ScalarError,
    },
    #[error("bad word `{0}` (expected letters like T12 or dT21 joined by *)")]
    Word(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// `[i, j]` for T^i_j and `["d", i, j]` for dT^i_j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LetterJson {
    T([usize; 2]),
    D(String, usize, usize),
}

impl LetterJson {
    fn from_letter(l: &Letter) -> Self {
        match l.kind {
            Kind::T => LetterJson::T([l.i + 1, l.j + 1]),
            Kind::D => LetterJson::D("d".into(), l.i + 1, l.j + 1),
        }
    }

    fn to_letter(&self, n: usize) -> Result<Letter, SerialError> {
        let (kind, i, j) = match self {
            LetterJson::T([i, j]) => (Kind::T, *i, *j),
            LetterJson::D(tag, i, j) if tag == "d" => (Kind::D, *i, *j),
            LetterJson::D(..) => return Err(SerialError::Index { n, letter: self.clone() }),
        };
        if i == 0 || j == 0 || i > n || j > n {
            return Err(SerialError::Index { n, letter: self.clone() });
        }
        Ok(Letter { kind, i: i - 1, j: j - 1 })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub word: Vec<LetterJson>,
    pub coeff: String,
}

pub fn ncpoly_to_json(p: &NCPoly) -> Vec<TermJson> {
    p.terms()
        .map(|(w, c)| TermJson { word: w.iter().map(LetterJson::from_letter).collect(), coeff: c.to_string() })
        .collect()
}

pub fn ncpoly_from_json(n: usize, terms: &[TermJson]) -> Result<NCPoly, SerialError> {
    let mut p = NCPoly::zero();
    for t in terms {
        let word = t.word.iter().map(|l| l.to_letter(n)).collect::<Result<Vec<_>, _>>()?;
        let c = ScalarQ::parse(&t.coeff).map_err(|source| SerialError::Coeff { text: t.coeff.clone(), source })?;
        p.add_term(word, &c);
    }
    Ok(p)
}

/// Parses `T22*T11*dT12` (1-based digits, n ≤ 9).
pub fn parse_word(n: usize, text: &str) -> Result<Vec<Letter>, SerialError> {
    let bad = || SerialError::Word(text.to_string());
    let mut out = Vec::new();
    for part in text.split('*').map(str::trim).filter(|p| !p.is_empty()) {
        let (kind, digits) = if let Some(rest) = part.strip_prefix("dT") {
            (Kind::D, rest)
        } else if let Some(rest) = part.strip_prefix('T') {
            (Kind::T, rest)
        } else {
            return Err(bad());
        };
        let d: Vec<usize> = digits.chars().map(|c| c.to_digit(10).map(|v| v as usize)).collect::<Option<_>>().ok_or_else(bad)?;
        let [i, j] = d[..] else { return Err(bad()) };
        if i == 0 || j == 0 || i > n || j > n {
            return Err(bad());
        }
        out.push(Letter { kind, i: i - 1, j: j - 1 });
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryJson {
    /// ω^i_j ⊗ ω^k_l
    pub index: [usize; 4],
    pub coeff: String,
}

fn entries(n: usize, col: impl Iterator<Item = (usize, ScalarQ)>) -> Vec<EntryJson> {
    col.filter(|(_, c)| !c.is_zero())
        .map(|(row, c)| {
            let (x, y) = (row / (n * n), row % (n * n));
            EntryJson { index: [x / n + 1, x % n + 1, y / n + 1, y % n + 1], coeff: c.to_string() }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnJson {
    /// ∇ω^a_b
    pub of: [usize; 2],
    pub terms: Vec<EntryJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectionJson {
    pub n: usize,
    pub basis: &'static str,
    pub sigma: String,
    pub columns: Vec<ColumnJson>,
}

pub fn connection_to_json(conn: &ConnectionMatrix, sigma: &str) -> ConnectionJson {
    let n = conn.n;
    let columns = (0..n * n)
        .map(|a| ColumnJson {
            of: [a / n + 1, a % n + 1],
            terms: entries(n, conn.column(a / n, a % n).into_iter().enumerate()),
        })
        .collect();
    ConnectionJson { n, basis: "omega", sigma: sigma.to_string(), columns }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricVectorJson {
    pub nondegenerate: bool,
    pub terms: Vec<EntryJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricJson {
    pub dimension: usize,
    pub kernel_pi_dimension: usize,
    pub vectors: Vec<MetricVectorJson>,
}

pub fn metric_to_json(n: usize, m: &MetricSolution) -> MetricJson {
    let vectors = (0..m.basis.cols())
        .map(|k| MetricVectorJson { nondegenerate: m.nondegenerate[k], terms: entries(n, column_iter(&m.basis, k)) })
        .collect();
    MetricJson { dimension: m.dimension, kernel_pi_dimension: m.kernel_pi_dimension, vectors }
}

fn column_iter(m: &Matrix<ScalarQ>, k: usize) -> impl Iterator<Item = (usize, ScalarQ)> + '_ {
    (0..m.rows()).map(move |i| (i, m[(i, k)].clone()))
}

/// One human-readable line per nonzero column entry.
pub fn connection_text(c: &ConnectionJson) -> String {
    let mut out = String::new();
    for col in &c.columns {
        let terms: Vec<String> =
            col.terms.iter().map(|e| format!("({})·ω{}{}⊗ω{}{}", e.coeff, e.index[0], e.index[1], e.index[2], e.index[3])).collect();
        let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        out.push_str(&format!("∇ω{}{} = {}\n", col.of[0], col.of[1], rhs));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ncpoly_round_trip() {
        let mut p = NCPoly::zero();
        p.add_term(vec![Letter::t(0, 1), Letter::dt(1, 0)], &ScalarQ::parse("q^2 - 1").unwrap());
        p.add_term(vec![], &ScalarQ::from_int(3));
        let js = serde_json::to_string(&ncpoly_to_json(&p)).unwrap();
        assert!(js.contains(r#"[1,2]"#) && js.contains(r#"["d",2,1]"#));
        let back: Vec<TermJson> = serde_json::from_str(&js).unwrap();
        assert_eq!(ncpoly_from_json(2, &back).unwrap(), p);
    }

    #[test]
    fn words() {
        assert_eq!(parse_word(2, "T22*dT11").unwrap(), vec![Letter::t(1, 1), Letter::dt(0, 0)]);
        assert!(parse_word(2, "T33").is_err());
        assert!(parse_word(2, "X11").is_err());
        assert!(parse_word(2, "").is_err());
    }

    #[test]
    fn out_of_range_letter_rejected() {
        let t = TermJson { word: vec![LetterJson::T([3, 1])], coeff: "1".into() };
        assert!(ncpoly_from_json(2, &[t]).is_err());
    }
}
