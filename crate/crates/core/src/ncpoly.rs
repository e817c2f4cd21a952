//! Noncommutative polynomials in the generators T^i_j (and optionally
//! dT^i_j) with normal ordering by rewriting rules derived from the RTT
//! relations.
//!
//! Monomial order on letters: every T letter precedes every dT letter, and
//! within a kind letters are ordered by `(row, column)`. A word is normal
//! when it contains no adjacent pair `x y` with a rule, and rules exist
//! exactly for the pairs with `x > y`. dT·dT pairs carry no relation here
//! and are left as they are.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::Matrix;
use crate::rmatrix::{self, MatN2};
use crate::scalars::ScalarQ;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NcError {
    #[error("misordered monomial {0} could not be solved for")]
    RuleDerivationFailure(String),
    #[error("normal ordering exceeded the step budget of {0}")]
    NonTermination(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    T,
    D,
}

/// A generator `T^i_j` or `dT^i_j` (0-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub kind: Kind,
    pub i: usize,
    pub j: usize,
}

impl Letter {
    pub fn t(i: usize, j: usize) -> Self {
        Letter { kind: Kind::T, i, j }
    }

    pub fn dt(i: usize, j: usize) -> Self {
        Letter { kind: Kind::D, i, j }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = if self.kind == Kind::T { "T" } else { "dT" };
        write!(f, "{p}{}{}", self.i + 1, self.j + 1)
    }
}

pub type Word = Vec<Letter>;

/// Sum of words with nonzero ScalarQ coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NCPoly {
    terms: BTreeMap<Word, ScalarQ>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Vec::new(), ScalarQ::one())
    }

    pub fn monomial(w: Word, c: ScalarQ) -> Self {
        let mut p = Self::zero();
        p.add_term(w, &c);
        p
    }

    pub fn letter(l: Letter) -> Self {
        Self::monomial(vec![l], ScalarQ::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &ScalarQ)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, w: Word, c: &ScalarQ) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(v) => {
                *v = &*v + c;
                if v.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c.clone());
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-ScalarQ::one()))
    }

    pub fn scale(&self, c: &ScalarQ) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        NCPoly { terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect() }
    }

    /// Concatenation product (no normal ordering).
    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, &(c1 * c2));
            }
        }
        out
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for l in w {
                write!(f, "*{l}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    TOnly,
    WithDifferentials,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

/// Default step budget for [`RewriteSystem::normal_order`].
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteSystem {
    pub n: usize,
    pub mode: Mode,
    pub rules: BTreeMap<(Letter, Letter), NCPoly>,
}

/// Quadratic component relations as rows over a list of two-letter words.
struct QuadSystem {
    words: Vec<(Letter, Letter)>,
    rows: Vec<Vec<ScalarQ>>,
}

impl QuadSystem {
    fn new(words: Vec<(Letter, Letter)>) -> Self {
        QuadSystem { words, rows: Vec::new() }
    }

    fn push(&mut self, rel: &NCPoly) {
        let mut row = vec![ScalarQ::zero(); self.words.len()];
        for (w, c) in rel.terms() {
            let k = self.words.iter().position(|p| w.len() == 2 && (w[0], w[1]) == *p).expect("word in system");
            row[k] = c.clone();
        }
        self.rows.push(row);
    }
}

/// `Σ R^{ac}_{ef} T^e_b T^f_d − Σ T^a_e T^c_f R^{ef}_{bd}` for all `a,c,b,d`.
pub fn rtt_relations(n: usize) -> Vec<NCPoly> {
    let r = rmatrix::build_r(n);
    let mut out = Vec::new();
    for a in 0..n {
        for c in 0..n {
            for b in 0..n {
                for d in 0..n {
                    let mut p = NCPoly::zero();
                    for e in 0..n {
                        for f in 0..n {
                            p.add_term(vec![Letter::t(e, b), Letter::t(f, d)], r.at(a, c, e, f));
                            p.add_term(vec![Letter::t(a, e), Letter::t(c, f)], &-r.at(e, f, b, d));
                        }
                    }
                    if !p.is_zero() {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// `dT^a_b T^c_d − Σ (R⁻¹)^{ac}_{ef} T^e_g dT^f_h (R⁻¹)^{gh}_{bd}`, the
/// component form of `dT₁T₂ = R⁻¹T₁dT₂R⁻¹`.
pub fn differential_relations(n: usize) -> Vec<NCPoly> {
    let r = rmatrix::build_r(n);
    let ri: MatN2 = rmatrix::r_inverse(&r).expect("Hecke");
    let mut out = Vec::new();
    for a in 0..n {
        for c in 0..n {
            for b in 0..n {
                for d in 0..n {
                    let mut p = NCPoly::monomial(vec![Letter::dt(a, b), Letter::t(c, d)], ScalarQ::one());
                    for e in 0..n {
                        for f in 0..n {
                            let x = ri.at(a, c, e, f);
                            if x.is_zero() {
                                continue;
                            }
                            for g in 0..n {
                                for h in 0..n {
                                    let y = ri.at(g, h, b, d);
                                    if !y.is_zero() {
                                        p.add_term(vec![Letter::t(e, g), Letter::dt(f, h)], &-(x * y));
                                    }
                                }
                            }
                        }
                    }
                    out.push(p);
                }
            }
        }
    }
    out
}

fn letters(n: usize, kind: Kind) -> Vec<Letter> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in 0..n {
            v.push(Letter { kind, i, j });
        }
    }
    v
}

/// Solves the relations for the misordered words, which are placed first
/// (largest first) so that elimination pivots on them.
fn solve_rules(words: Vec<(Letter, Letter)>, relations: &[NCPoly]) -> Result<BTreeMap<(Letter, Letter), NCPoly>, NcError> {
    let mut cols = words;
    cols.sort_by(|x, y| {
        let bx = x.0 > x.1;
        let by = y.0 > y.1;
        by.cmp(&bx).then(y.cmp(x))
    });
    let mut sys = QuadSystem::new(cols);
    for rel in relations {
        sys.push(rel);
    }
    let mut m = Matrix::from_rows(sys.rows);
    let pivots = m.rref_in_place();
    let mut rules = BTreeMap::new();
    for (row, &pc) in pivots.iter().enumerate() {
        let (x, y) = sys.words[pc];
        if x <= y {
            // a relation among ordered words would break the PBW basis
            return Err(NcError::RuleDerivationFailure(alloc::format!("{x}{y} (ordered word became a pivot)")));
        }
        let mut rhs = NCPoly::zero();
        for (k, w) in sys.words.iter().enumerate() {
            if k != pc && !m[(row, k)].is_zero() {
                if w.0 > w.1 {
                    return Err(NcError::RuleDerivationFailure(alloc::format!("{x}{y}")));
                }
                rhs.add_term(vec![w.0, w.1], &-m[(row, k)].clone());
            }
        }
        rules.insert((x, y), rhs);
    }
    for &(x, y) in &sys.words {
        if x > y && !rules.contains_key(&(x, y)) {
            return Err(NcError::RuleDerivationFailure(alloc::format!("{x}{y}")));
        }
    }
    Ok(rules)
}

impl RewriteSystem {
    pub fn derive(n: usize, mode: Mode) -> Result<Self, NcError> {
        let ts = letters(n, Kind::T);
        let mut words = Vec::new();
        for &x in &ts {
            for &y in &ts {
                words.push((x, y));
            }
        }
        let mut rules = solve_rules(words, &rtt_relations(n))?;
        if mode == Mode::WithDifferentials {
            let ds = letters(n, Kind::D);
            let mut mixed = Vec::new();
            for &t in &ts {
                for &d in &ds {
                    mixed.push((t, d));
                    mixed.push((d, t));
                }
            }
            rules.extend(solve_rules(mixed, &differential_relations(n))?);
        }
        Ok(RewriteSystem { n, mode, rules })
    }

    fn redex(&self, w: &[Letter], strategy: Strategy) -> Option<usize> {
        let hit = |k: &usize| self.rules.contains_key(&(w[*k], w[*k + 1]));
        let len = w.len().saturating_sub(1);
        match strategy {
            Strategy::Leftmost => (0..len).find(hit),
            Strategy::Rightmost => (0..len).rev().find(hit),
        }
    }

    pub fn is_normal(&self, w: &[Letter]) -> bool {
        self.redex(w, Strategy::Leftmost).is_none()
    }

    pub fn normal_order(&self, p: &NCPoly) -> Result<NCPoly, NcError> {
        self.normal_order_with(p, Strategy::Leftmost, DEFAULT_BUDGET)
    }

    pub fn normal_order_with(&self, p: &NCPoly, strategy: Strategy, budget: usize) -> Result<NCPoly, NcError> {
        let mut pending = p.clone();
        let mut done = NCPoly::zero();
        let mut steps = 0;
        while let Some((w, c)) = pending.terms.pop_last() {
            let Some(k) = self.redex(&w, strategy) else {
                done.add_term(w, &c);
                continue;
            };
            steps += 1;
            if steps > budget {
                return Err(NcError::NonTermination(budget));
            }
            let rhs = &self.rules[&(w[k], w[k + 1])];
            for (r, rc) in rhs.terms() {
                let mut nw = Vec::with_capacity(w.len());
                nw.extend_from_slice(&w[..k]);
                nw.extend_from_slice(r);
                nw.extend_from_slice(&w[k + 2..]);
                pending.add_term(nw, &(&c * rc));
            }
        }
        Ok(done)
    }

    /// Words of length 3 whose leftmost and rightmost normal forms differ.
    pub fn overlap_failures(&self) -> Result<Vec<Word>, NcError> {
        let ls = letters(self.n, Kind::T);
        let mut bad = Vec::new();
        for &x in &ls {
            for &y in &ls {
                for &z in &ls {
                    let w = NCPoly::monomial(vec![x, y, z], ScalarQ::one());
                    let a = self.normal_order_with(&w, Strategy::Leftmost, DEFAULT_BUDGET)?;
                    let b = self.normal_order_with(&w, Strategy::Rightmost, DEFAULT_BUDGET)?;
                    if a != b {
                        bad.push(vec![x, y, z]);
                    }
                }
            }
        }
        Ok(bad)
    }

    /// Number of normal two-letter T words.
    pub fn degree2_normal_count(&self) -> usize {
        let ls = letters(self.n, Kind::T);
        ls.iter().flat_map(|&x| ls.iter().map(move |&y| [x, y])).filter(|w| self.is_normal(w)).count()
    }
}

/// c = Σ_p (−q)^{inv(p)} T^1_{p(1)}…T^n_{p(n)}.
pub fn qdet(n: usize) -> NCPoly {
    let mut out = NCPoly::zero();
    for (c, p) in crate::calculus::qdet_terms(n) {
        let w: Word = p.iter().enumerate().map(|(r, &s)| Letter::t(r, s)).collect();
        out.add_term(w, &c);
    }
    out
}

/// Normal forms of `c·T^i_j − T^i_j·c` for every generator.
pub fn qdet_commutators(sys: &RewriteSystem) -> Result<Vec<NCPoly>, NcError> {
    let c = qdet(sys.n);
    let mut out = Vec::new();
    for i in 0..sys.n {
        for j in 0..sys.n {
            let t = NCPoly::letter(Letter::t(i, j));
            out.push(sys.normal_order(&c.mul(&t).sub(&t.mul(&c)))?);
        }
    }
    Ok(out)
}

/// Element of the tensor square, keyed by `(left word, right word)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TensorPoly {
    terms: BTreeMap<(Word, Word), ScalarQ>,
}

impl TensorPoly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, k: (Word, Word), c: &ScalarQ) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v = &*v + c;
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c.clone());
            }
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), &-c.clone());
        }
        out
    }

    pub fn tensor(a: &NCPoly, b: &NCPoly) -> Self {
        let mut out = TensorPoly::default();
        for (w1, c1) in a.terms() {
            for (w2, c2) in b.terms() {
                out.add_term((w1.clone(), w2.clone()), &(c1 * c2));
            }
        }
        out
    }

    /// Normal-orders both tensor factors.
    pub fn normal_order(&self, sys: &RewriteSystem) -> Result<Self, NcError> {
        let mut out = TensorPoly::default();
        for ((w1, w2), c) in &self.terms {
            let a = sys.normal_order(&NCPoly::monomial(w1.clone(), ScalarQ::one()))?;
            let b = sys.normal_order(&NCPoly::monomial(w2.clone(), ScalarQ::one()))?;
            for (x, cx) in a.terms() {
                for (y, cy) in b.terms() {
                    out.add_term((x.clone(), y.clone()), &(&(c * cx) * cy));
                }
            }
        }
        Ok(out)
    }
}

/// Δ(T^i_j) = Σ_k T^i_k ⊗ T^k_j, extended multiplicatively to T words.
pub fn coproduct(n: usize, p: &NCPoly) -> TensorPoly {
    let mut out = TensorPoly::default();
    for (w, c) in p.terms() {
        let mut acc: Vec<(Word, Word)> = vec![(Vec::new(), Vec::new())];
        for l in w {
            let mut next = Vec::with_capacity(acc.len() * n);
            for (a, b) in &acc {
                for k in 0..n {
                    let mut a2 = a.clone();
                    a2.push(Letter::t(l.i, k));
                    let mut b2 = b.clone();
                    b2.push(Letter::t(k, l.j));
                    next.push((a2, b2));
                }
            }
            acc = next;
        }
        for key in acc {
            out.add_term(key, c);
        }
    }
    out
}

/// ε(T^i_j) = δ_ij extended multiplicatively.
pub fn counit(p: &NCPoly) -> ScalarQ {
    let mut acc = ScalarQ::zero();
    for (w, c) in p.terms() {
        if w.iter().all(|l| l.kind == Kind::T && l.i == l.j) {
            acc = &acc + c;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_has_no_t_rules() {
        let s = RewriteSystem::derive(1, Mode::TOnly).unwrap();
        assert!(s.rules.is_empty());
    }

    #[test]
    fn n1_differential_rule() {
        let s = RewriteSystem::derive(1, Mode::WithDifferentials).unwrap();
        let rhs = &s.rules[&(Letter::dt(0, 0), Letter::t(0, 0))];
        // T dT = q² dT T, so dT T = q⁻² T dT
        assert_eq!(rhs, &NCPoly::monomial(vec![Letter::t(0, 0), Letter::dt(0, 0)], ScalarQ::q_pow(-2)));
    }

    #[test]
    fn n2_six_exchange_rules() {
        let s = RewriteSystem::derive(2, Mode::TOnly).unwrap();
        assert_eq!(s.rules.len(), 6);
        // b a = q⁻¹... the (1,2)-(1,1) exchange: T12 T11 = q⁻¹ T11 T12
        let (a, b, c, d) = (Letter::t(0, 0), Letter::t(0, 1), Letter::t(1, 0), Letter::t(1, 1));
        let ba = &s.rules[&(b, a)];
        assert_eq!(ba.len(), 1);
        let da = &s.rules[&(d, a)];
        assert_eq!(da.len(), 2, "da = ad + λ-correction");
        assert!(da.terms().any(|(w, _)| w == &vec![b, c]) || da.terms().any(|(w, _)| w == &vec![c, b]));
    }

    #[test]
    fn ordered_words_are_fixed_points() {
        let s = RewriteSystem::derive(2, Mode::TOnly).unwrap();
        let w = NCPoly::monomial(vec![Letter::t(0, 0), Letter::t(0, 1), Letter::t(1, 1)], ScalarQ::from_int(3));
        assert_eq!(s.normal_order(&w).unwrap(), w);
    }

    #[test]
    fn relations_reduce_to_zero() {
        for n in 2..=3 {
            let s = RewriteSystem::derive(n, Mode::WithDifferentials).unwrap();
            for r in rtt_relations(n).iter().chain(differential_relations(n).iter()) {
                assert!(s.normal_order(r).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let s = RewriteSystem::derive(2, Mode::TOnly).unwrap();
        let w = NCPoly::monomial(vec![Letter::t(1, 1), Letter::t(1, 0), Letter::t(0, 1), Letter::t(0, 0)], ScalarQ::one());
        assert_eq!(s.normal_order_with(&w, Strategy::Leftmost, 1), Err(NcError::NonTermination(1)));
    }

    #[test]
    fn qdet_n2_form_and_centrality() {
        let c = qdet(2);
        let mut want = NCPoly::monomial(vec![Letter::t(0, 0), Letter::t(1, 1)], ScalarQ::one());
        want.add_term(vec![Letter::t(0, 1), Letter::t(1, 0)], &-ScalarQ::q());
        assert_eq!(c, want);
        let s = RewriteSystem::derive(2, Mode::TOnly).unwrap();
        assert!(qdet_commutators(&s).unwrap().iter().all(NCPoly::is_zero));
    }

    #[test]
    fn counit_kills_relations() {
        assert!(rtt_relations(2).iter().all(|r| counit(r).is_zero()));
    }

    #[test]
    fn overlaps_resolve() {
        for n in 2..=3 {
            let s = RewriteSystem::derive(n, Mode::TOnly).unwrap();
            assert!(s.overlap_failures().unwrap().is_empty());
            assert_eq!(s.degree2_normal_count(), n * n * (n * n + 1) / 2);
        }
    }

    #[test]
    fn coproduct_respects_relations() {
        let s = RewriteSystem::derive(2, Mode::TOnly).unwrap();
        for r in rtt_relations(2) {
            assert!(coproduct(2, &r).normal_order(&s).unwrap().is_zero());
        }
        let c = qdet(2);
        let diff = coproduct(2, &c).normal_order(&s).unwrap().sub(&TensorPoly::tensor(&c, &c).normal_order(&s).unwrap());
        assert!(diff.is_zero());
        assert!(counit(&c).is_one());
    }
}
