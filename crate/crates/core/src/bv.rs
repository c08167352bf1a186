//! Graded polynomials in ghosts, fields and antifields, the antibracket, the
//! induced action and its master-equation residual.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::backends::CochainComplex;
use crate::error::{Error, Result};
use crate::funcalg::{Scalar, ScalarKind};
use crate::liealg::{structure_constants, window_closed, GeneratorBasis, StructureConstants};
use crate::transfer::{differential_matrix, transfer_tensors, DifferentialMatrix, TransferTensors};

/// A graded variable. Ghosts `c^a` are odd and their antifields `c*_a` even;
/// the field of a `p`-cochain has parity `p` and its antifield `p + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GVar {
    Ghost(usize),
    GhostStar(usize),
    Field { idx: usize, deg: u8 },
    Antifield { idx: usize, deg: u8 },
}

impl GVar {
    pub fn is_odd(self) -> bool {
        match self {
            GVar::Ghost(_) => true,
            GVar::GhostStar(_) => false,
            GVar::Field { deg, .. } => deg % 2 == 1,
            GVar::Antifield { deg, .. } => deg % 2 == 0,
        }
    }

    /// The dual partner in the odd symplectic pairing.
    pub fn partner(self) -> GVar {
        match self {
            GVar::Ghost(a) => GVar::GhostStar(a),
            GVar::GhostStar(a) => GVar::Ghost(a),
            GVar::Field { idx, deg } => GVar::Antifield { idx, deg },
            GVar::Antifield { idx, deg } => GVar::Field { idx, deg },
        }
    }

    fn is_coordinate(self) -> bool {
        matches!(self, GVar::Ghost(_) | GVar::Field { .. })
    }
}

impl fmt::Display for GVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GVar::Ghost(a) => write!(f, "c^{a}"),
            GVar::GhostStar(a) => write!(f, "c*_{a}"),
            GVar::Field { idx, .. } => write!(f, "η^{idx}"),
            GVar::Antifield { idx, .. } => write!(f, "η*_{idx}"),
        }
    }
}

/// Variables in ascending order; no odd variable repeats.
pub type Monomial = Vec<GVar>;

/// Sort `vars` into normal order. Returns the Koszul sign (`true` for minus)
/// or `None` when an odd variable repeats.
pub fn normalize(mut vars: Vec<GVar>) -> Option<(bool, Monomial)> {
    let mut neg = false;
    for i in 1..vars.len() {
        let mut j = i;
        while j > 0 && vars[j - 1] > vars[j] {
            if vars[j - 1].is_odd() && vars[j].is_odd() {
                neg = !neg;
            }
            vars.swap(j - 1, j);
            j -= 1;
        }
    }
    if vars.windows(2).any(|w| w[0] == w[1] && w[0].is_odd()) {
        return None;
    }
    Some((neg, vars))
}

/// Product of two normal monomials.
fn merge(a: &[GVar], b: &[GVar]) -> Option<(bool, Monomial)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut odd_left = a.iter().filter(|v| v.is_odd()).count();
    let mut neg = false;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] <= b[j]) {
            if a[i].is_odd() {
                odd_left -= 1;
            }
            out.push(a[i]);
            i += 1;
        } else {
            if b[j].is_odd() && odd_left % 2 == 1 {
                neg = !neg;
            }
            out.push(b[j]);
            j += 1;
        }
    }
    if out.windows(2).any(|w| w[0] == w[1] && w[0].is_odd()) {
        return None;
    }
    Some((neg, out))
}

fn monomial_is_odd(m: &[GVar]) -> bool {
    m.iter().filter(|v| v.is_odd()).count() % 2 == 1
}

type Raw = BTreeMap<Monomial, Scalar>;

fn add_raw(acc: &mut Raw, m: Monomial, c: Scalar) -> Result<()> {
    match acc.get_mut(&m) {
        Some(existing) => *existing = existing.checked_add(&c)?,
        None => {
            acc.insert(m, c);
        }
    }
    Ok(())
}

/// A polynomial in graded variables with monomials kept in normal order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GPoly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl GPoly {
    pub fn zero() -> GPoly {
        GPoly::default()
    }

    fn from_raw(raw: Raw) -> GPoly {
        GPoly {
            terms: raw.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn monomial(vars: Vec<GVar>, c: Scalar) -> GPoly {
        match normalize(vars) {
            Some((neg, m)) if !c.is_zero() => GPoly {
                terms: BTreeMap::from([(m, if neg { -c } else { c })]),
            },
            _ => GPoly::zero(),
        }
    }

    pub fn var(v: GVar, kind: ScalarKind) -> GPoly {
        GPoly::monomial(vec![v], Scalar::one(kind))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the monomial `vars`, in the order given.
    pub fn coefficient(&self, vars: Vec<GVar>) -> Option<Scalar> {
        let (neg, m) = normalize(vars)?;
        let c = self.terms.get(&m)?;
        Some(if neg { -c } else { c.clone() })
    }

    pub fn variables(&self) -> BTreeSet<GVar> {
        self.terms.keys().flatten().copied().collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::abs_f64).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &GPoly) -> Result<GPoly> {
        let mut raw = self.terms.clone();
        for (m, c) in &other.terms {
            add_raw(&mut raw, m.clone(), c.clone())?;
        }
        Ok(GPoly::from_raw(raw))
    }

    pub fn sub(&self, other: &GPoly) -> Result<GPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GPoly {
        GPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Result<GPoly> {
        let mut raw = Raw::new();
        for (m, c) in &self.terms {
            raw.insert(m.clone(), c.checked_mul(s)?);
        }
        Ok(GPoly::from_raw(raw))
    }

    fn mul_into(&self, other: &GPoly, acc: &mut Raw) -> Result<()> {
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((neg, m)) = merge(ma, mb) {
                    let c = ca.checked_mul(cb)?;
                    add_raw(acc, m, if neg { -c } else { c })?;
                }
            }
        }
        Ok(())
    }

    pub fn mul(&self, other: &GPoly) -> Result<GPoly> {
        let mut raw = Raw::new();
        self.mul_into(other, &mut raw)?;
        Ok(GPoly::from_raw(raw))
    }

    /// Parity of every monomial, or `None` for an inhomogeneous polynomial.
    pub fn parity(&self) -> Option<bool> {
        let mut parities = self.terms.keys().map(|m| monomial_is_odd(m));
        let first = parities.next().unwrap_or(false);
        parities.all(|p| p == first).then_some(first)
    }

    /// Fails naming the first odd monomial.
    pub fn check_even(&self) -> Result<()> {
        match self.terms.keys().find(|m| monomial_is_odd(m)) {
            Some(m) => Err(Error::Parity(format!("odd term {}", fmt_monomial(m)))),
            None => Ok(()),
        }
    }

    /// Graded left derivative `∂/∂x`.
    pub fn derivative(&self, x: GVar) -> Result<GPoly> {
        let mut raw = Raw::new();
        for (m, c) in &self.terms {
            let Some(pos) = m.iter().position(|v| *v == x) else {
                continue;
            };
            let mut rest = m.clone();
            rest.remove(pos);
            if x.is_odd() {
                let before = m[..pos].iter().filter(|v| v.is_odd()).count();
                add_raw(&mut raw, rest, if before % 2 == 1 { -c } else { c.clone() })?;
            } else {
                let mult = m.iter().filter(|v| **v == x).count() as i64;
                add_raw(&mut raw, rest, c.scale_int(mult))?;
            }
        }
        Ok(GPoly::from_raw(raw))
    }
}

fn fmt_monomial(m: &[GVar]) -> String {
    if m.is_empty() {
        return "1".into();
    }
    m.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for GPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c}) {}", fmt_monomial(m)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The antibracket with every field paired to its own antifield.
pub fn antibracket(s: &GPoly, t: &GPoly) -> Result<GPoly> {
    Ok(GPoly::from_raw(antibracket_raw(s, t, &implied_pairs(s, t))?))
}

/// The antibracket over an explicit list of `(coordinate, antifield)` pairs.
pub fn antibracket_with_pairs(s: &GPoly, t: &GPoly, pairs: &[(GVar, GVar)]) -> Result<GPoly> {
    let covered: BTreeSet<GVar> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    if let Some(v) = s.variables().union(&t.variables()).find(|v| !covered.contains(v)) {
        return Err(Error::UnpairedVariable(v.to_string()));
    }
    for &(x, xs) in pairs {
        if x.is_odd() == xs.is_odd() {
            return Err(Error::Parity(format!("{x} and {xs} have equal parity")));
        }
    }
    Ok(GPoly::from_raw(antibracket_raw(s, t, pairs)?))
}

fn implied_pairs(s: &GPoly, t: &GPoly) -> Vec<(GVar, GVar)> {
    let coords: BTreeSet<GVar> = s
        .variables()
        .union(&t.variables())
        .map(|&v| if v.is_coordinate() { v } else { v.partner() })
        .collect();
    coords.into_iter().map(|v| (v, v.partner())).collect()
}

/// `Σ (−1)^{|η|}(∂S/∂η ∂T/∂η* + ∂S/∂η* ∂T/∂η)`, keeping every monomial
/// touched even when it cancels.
fn antibracket_raw(s: &GPoly, t: &GPoly, pairs: &[(GVar, GVar)]) -> Result<Raw> {
    let parts: Vec<Raw> = pairs
        .par_iter()
        .map(|&(x, xs)| -> Result<Raw> {
            let mut raw = Raw::new();
            let sign = if x.is_odd() { -1 } else { 1 };
            let sx = s.derivative(x)?;
            let sxs = s.derivative(xs)?;
            let tx = t.derivative(x)?;
            let txs = t.derivative(xs)?;
            let mut local = Raw::new();
            sx.mul_into(&txs, &mut local)?;
            sxs.mul_into(&tx, &mut local)?;
            for (m, c) in local {
                add_raw(&mut raw, m, c.scale_int(sign))?;
            }
            Ok(raw)
        })
        .collect::<Result<_>>()?;
    let mut total = Raw::new();
    for part in parts {
        for (m, c) in part {
            add_raw(&mut total, m, c)?;
        }
    }
    Ok(total)
}

/// Where the ghost monomial sits relative to the antifield.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WordOrdering {
    /// `c^{a_1} … c^{a_p} η*_i η^j`
    GhostsFirst,
    /// `η*_i c^{a_1} … c^{a_p} η^j`
    AntifieldFirst,
}

/// Weight of an ordered word of length `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Each ordered word once.
    OrderedWords,
    /// Each ordered word with `1/p!`.
    Factorial,
}

/// Signs and ordering used to assemble the action: `signs[0]` multiplies the
/// differential term and `signs[p]` the words of length `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SignConvention {
    pub ordering: WordOrdering,
    pub normalization: Normalization,
    pub signs: [i8; 4],
}

/// The unique convention under which the master equation holds on every
/// instance of [`reference_instances`].
pub const RESOLVED: SignConvention = SignConvention {
    ordering: WordOrdering::GhostsFirst,
    normalization: Normalization::OrderedWords,
    signs: [1, 1, 1, -1],
};

impl SignConvention {
    /// All conventions with `signs[0] = +1`. Flipping `signs[0]` and
    /// `signs[2]` together is a field rescaling, so it stays fixed.
    pub fn candidates() -> Vec<SignConvention> {
        let mut out = Vec::new();
        for ordering in [WordOrdering::GhostsFirst, WordOrdering::AntifieldFirst] {
            for normalization in [Normalization::OrderedWords, Normalization::Factorial] {
                for bits in 0..8u8 {
                    let s = |k: u8| if bits >> k & 1 == 1 { -1 } else { 1 };
                    out.push(SignConvention {
                        ordering,
                        normalization,
                        signs: [1, s(0), s(1), s(2)],
                    });
                }
            }
        }
        out
    }

    fn block_weight(&self, p: usize, kind: ScalarKind) -> Scalar {
        let fact: i64 = match self.normalization {
            Normalization::OrderedWords => 1,
            Normalization::Factorial => (1..=p as i64).product(),
        };
        Scalar::ratio(kind, self.signs[p] as i64, fact)
    }
}

impl fmt::Display for SignConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ordering = match self.ordering {
            WordOrdering::GhostsFirst => "ghosts-first",
            WordOrdering::AntifieldFirst => "antifield-first",
        };
        let norm = match self.normalization {
            Normalization::OrderedWords => "ordered words",
            Normalization::Factorial => "1/p! on ordered words",
        };
        let signs: Vec<&str> = self.signs.iter().map(|&s| if s > 0 { "+" } else { "-" }).collect();
        write!(f, "{ordering}, {norm}, signs ({})", signs.join(","))
    }
}

/// The pieces of the action before any sign is applied: the differential
/// term, one polynomial per word length, and `½ f c c c*`.
#[derive(Clone, Debug)]
pub struct ActionBlocks {
    pub differential: GPoly,
    pub words: Vec<GPoly>,
    pub structure: GPoly,
}

fn field(q: &DifferentialMatrix, j: usize) -> GVar {
    GVar::Field { idx: j, deg: q.degrees[j] }
}

fn antifield(q: &DifferentialMatrix, i: usize) -> GVar {
    GVar::Antifield { idx: i, deg: q.degrees[i] }
}

pub fn action_blocks(
    q: &DifferentialMatrix,
    tensors: &TransferTensors,
    sc: &StructureConstants,
    ordering: WordOrdering,
) -> Result<ActionBlocks> {
    let n = q.len();
    if tensors.window.as_slice() != sc.window() {
        return Err(Error::Generators("tensors and structure constants use different windows".into()));
    }
    let mut raw = Raw::new();
    for i in 0..n {
        for j in 0..n {
            let c = q.get(i, j);
            if !c.is_zero() {
                let (neg, m) = normalize(vec![antifield(q, i), field(q, j)]).expect("distinct");
                add_raw(&mut raw, m, if neg { -c } else { c.clone() })?;
            }
        }
    }
    let differential = GPoly::from_raw(raw);

    let mut words = vec![Raw::new(); tensors.max_len];
    for (word, t) in &tensors.words {
        let ghosts = word.iter().map(|&a| GVar::Ghost(a));
        for (i, row) in t.matrix.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let vars: Vec<GVar> = match ordering {
                    WordOrdering::GhostsFirst => ghosts.clone().chain([antifield(q, i), field(q, j)]).collect(),
                    WordOrdering::AntifieldFirst => std::iter::once(antifield(q, i))
                        .chain(ghosts.clone())
                        .chain([field(q, j)])
                        .collect(),
                };
                if let Some((neg, m)) = normalize(vars) {
                    add_raw(&mut words[word.len() - 1], m, if neg { -c } else { c.clone() })?;
                }
            }
        }
    }
    let words: Vec<GPoly> = words.into_iter().map(GPoly::from_raw).collect();

    let half = Scalar::ratio(sc.kind(), 1, 2);
    let mut raw = Raw::new();
    for a in 0..sc.len() {
        for b in 0..sc.len() {
            for (d, f) in &sc.get(a, b).inside {
                if let Some((neg, m)) = normalize(vec![GVar::Ghost(a), GVar::Ghost(b), GVar::GhostStar(*d)]) {
                    let c = f.checked_mul(&half)?;
                    add_raw(&mut raw, m, if neg { -c } else { c })?;
                }
            }
        }
    }
    let structure = GPoly::from_raw(raw);

    for (label, block) in [("differential", &differential), ("structure", &structure)]
        .into_iter()
        .chain(words.iter().map(|w| ("word", w)))
    {
        block
            .check_even()
            .map_err(|e| Error::Parity(format!("{label} term: {e}")))?;
    }
    Ok(ActionBlocks {
        differential,
        words,
        structure,
    })
}

impl ActionBlocks {
    fn weighted(&self, conv: &SignConvention, kind: ScalarKind) -> Result<Vec<(GPoly, Scalar)>> {
        let mut out = vec![(self.differential.clone(), Scalar::from_int(kind, conv.signs[0] as i64))];
        for (k, w) in self.words.iter().enumerate() {
            if k + 1 >= conv.signs.len() {
                return Err(Error::Unsupported(format!("words of length {}", k + 1)));
            }
            out.push((w.clone(), conv.block_weight(k + 1, kind)));
        }
        out.push((self.structure.clone(), Scalar::one(kind)));
        Ok(out)
    }

    pub fn assemble(&self, conv: &SignConvention, kind: ScalarKind) -> Result<GPoly> {
        let mut s = GPoly::zero();
        for (block, w) in self.weighted(conv, kind)? {
            s = s.add(&block.scale(&w)?)?;
        }
        s.check_even()?;
        Ok(s)
    }
}

/// `S = ⟨w*, Q w⟩ + Σ_words c…c ⟨w*, T_word w⟩ + ½ f c c c*` under `conv`.
pub fn assemble_action(
    q: &DifferentialMatrix,
    tensors: &TransferTensors,
    sc: &StructureConstants,
    conv: &SignConvention,
) -> Result<GPoly> {
    action_blocks(q, tensors, sc, conv.ordering)?.assemble(conv, sc.kind())
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualTerm {
    pub monomial: String,
    pub value: Scalar,
}

/// `(S, S)` restricted to monomials whose ghosts form a window-closed word.
#[derive(Clone, Debug, Serialize)]
pub struct CmeReport {
    /// Window-closed monomials produced by the bracket, cancelled ones included.
    pub closed_monomials: usize,
    /// Monomials set aside because their ghost content is not window-closed.
    pub dropped: usize,
    pub max_abs_residual: f64,
    pub nonzero_count: usize,
    /// The largest surviving terms, at most [`CmeReport::SHOWN`].
    pub nonzero_terms: Vec<ResidualTerm>,
}

impl CmeReport {
    pub const SHOWN: usize = 20;

    pub fn passes(&self, tol: f64) -> bool {
        self.max_abs_residual <= tol
    }
}

fn ghost_word(m: &[GVar]) -> Vec<usize> {
    m.iter()
        .filter_map(|v| match v {
            GVar::Ghost(a) => Some(*a),
            _ => None,
        })
        .collect()
}

fn significant(c: &Scalar) -> bool {
    if c.is_exact() {
        !c.is_zero()
    } else {
        c.abs_f64() > 1e-12
    }
}

fn report_from_raw(raw: Raw, sc: &StructureConstants) -> CmeReport {
    let mut closed = 0;
    let mut dropped = 0;
    let mut max_abs: f64 = 0.0;
    let mut nonzero: Vec<(Monomial, Scalar)> = Vec::new();
    let mut verdicts: BTreeMap<Vec<usize>, bool> = BTreeMap::new();
    for (m, c) in raw {
        let word = ghost_word(&m);
        let ok = *verdicts.entry(word.clone()).or_insert_with(|| window_closed(&word, sc));
        if !ok {
            dropped += 1;
            continue;
        }
        closed += 1;
        max_abs = max_abs.max(c.abs_f64());
        if significant(&c) {
            nonzero.push((m, c));
        }
    }
    let nonzero_count = nonzero.len();
    nonzero.sort_by(|a, b| b.1.abs_f64().total_cmp(&a.1.abs_f64()).then_with(|| a.0.cmp(&b.0)));
    CmeReport {
        closed_monomials: closed,
        dropped,
        max_abs_residual: max_abs,
        nonzero_count,
        nonzero_terms: nonzero
            .into_iter()
            .take(CmeReport::SHOWN)
            .map(|(m, value)| ResidualTerm {
                monomial: fmt_monomial(&m),
                value,
            })
            .collect(),
    }
}

pub fn cme_residual(s: &GPoly, sc: &StructureConstants) -> Result<CmeReport> {
    let raw = antibracket_raw(s, s, &implied_pairs(s, s))?;
    Ok(report_from_raw(raw, sc))
}

/// Everything needed to test conventions on one geometry and window.
pub struct SignInstance {
    pub label: String,
    pub kind: ScalarKind,
    pub sc: StructureConstants,
    blocks: BTreeMap<WordOrdering, ActionBlocks>,
}

impl SignInstance {
    pub fn new(label: impl Into<String>, cx: &CochainComplex, basis: &GeneratorBasis) -> Result<SignInstance> {
        let q = differential_matrix(cx)?;
        let tensors = transfer_tensors(cx, basis, cx.dim() as usize + 1)?;
        let sc = structure_constants(basis)?;
        let mut blocks = BTreeMap::new();
        for ordering in [WordOrdering::GhostsFirst, WordOrdering::AntifieldFirst] {
            blocks.insert(ordering, action_blocks(&q, &tensors, &sc, ordering)?);
        }
        Ok(SignInstance {
            label: label.into(),
            kind: cx.kind(),
            sc,
            blocks,
        })
    }

    /// Residual of every candidate. `(S, S)` is quadratic in the blocks, so
    /// the pairwise brackets are computed once per ordering.
    pub fn residuals(&self, candidates: &[SignConvention]) -> Result<Vec<CmeReport>> {
        let mut pairwise: BTreeMap<WordOrdering, Vec<Vec<Raw>>> = BTreeMap::new();
        for (&ordering, blocks) in &self.blocks {
            let list: Vec<&GPoly> = std::iter::once(&blocks.differential)
                .chain(&blocks.words)
                .chain([&blocks.structure])
                .collect();
            let mut table = vec![vec![Raw::new(); list.len()]; list.len()];
            for a in 0..list.len() {
                for b in a..list.len() {
                    let pairs = implied_pairs(list[a], list[b]);
                    table[a][b] = antibracket_raw(list[a], list[b], &pairs)?;
                }
            }
            pairwise.insert(ordering, table);
        }
        candidates
            .iter()
            .map(|conv| {
                let blocks = &self.blocks[&conv.ordering];
                let weights: Vec<Scalar> = blocks.weighted(conv, self.kind)?.into_iter().map(|(_, w)| w).collect();
                let table = &pairwise[&conv.ordering];
                let mut raw = Raw::new();
                for a in 0..weights.len() {
                    for b in a..weights.len() {
                        let mult = if a == b { 1 } else { 2 };
                        let w = weights[a].checked_mul(&weights[b])?.scale_int(mult);
                        for (m, c) in &table[a][b] {
                            add_raw(&mut raw, m.clone(), c.checked_mul(&w)?)?;
                        }
                    }
                }
                Ok(report_from_raw(raw, &self.sc))
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateOutcome {
    pub convention: SignConvention,
    /// Largest residual on each instance, in instance order.
    pub residuals: Vec<f64>,
    pub survives: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SignSearch {
    pub instances: Vec<String>,
    pub outcomes: Vec<CandidateOutcome>,
}

impl SignSearch {
    pub fn survivors(&self) -> Vec<SignConvention> {
        self.outcomes.iter().filter(|o| o.survives).map(|o| o.convention).collect()
    }
}

/// The smallest interval fixes the ordering and `signs[1]`, three interval
/// nodes fix `signs[2]`. Affine fields on the square have no nonzero words of
/// length 3, so `signs[3]` needs the quadratic window, checked on its
/// window-closed monomials.
pub fn reference_instances() -> Result<Vec<SignInstance>> {
    use crate::backends::{build_interval, build_square, BasisKind};
    use crate::funcalg::BreakConvention;
    let conv = BreakConvention::default();
    let two = build_interval(vec![Scalar::int(0), Scalar::int(1)], BasisKind::Lagrange, conv)?;
    let three = build_interval(vec![Scalar::int(0), Scalar::rat(1, 2), Scalar::int(1)], BasisKind::Lagrange, conv)?;
    let square = build_square();
    Ok(vec![
        SignInstance::new("interval nodes (0,1), K=1", &two, &GeneratorBasis::interval(1))?,
        SignInstance::new("interval nodes (0,1/2,1), K=2", &three, &GeneratorBasis::interval(2))?,
        SignInstance::new("square, D=2", &square, &GeneratorBasis::square(2))?,
    ])
}

/// Test every candidate convention on every instance. A candidate survives
/// when its residual is at most `tol` everywhere.
pub fn search_sign_conventions(instances: &[SignInstance], tol: f64) -> Result<SignSearch> {
    let candidates = SignConvention::candidates();
    let per_instance = instances
        .iter()
        .map(|inst| inst.residuals(&candidates))
        .collect::<Result<Vec<_>>>()?;
    let outcomes = candidates
        .iter()
        .enumerate()
        .map(|(k, &convention)| {
            let residuals: Vec<f64> = per_instance.iter().map(|r| r[k].max_abs_residual).collect();
            let survives = residuals.iter().all(|&r| r <= tol);
            CandidateOutcome {
                convention,
                residuals,
                survives,
            }
        })
        .collect();
    Ok(SignSearch {
        instances: instances.iter().map(|i| i.label.clone()).collect(),
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{build_interval, BasisKind};
    use crate::funcalg::BreakConvention;
    use proptest::prelude::*;

    const K: ScalarKind = ScalarKind::Rational;

    fn v(x: GVar) -> GPoly {
        GPoly::var(x, K)
    }

    fn phi(i: usize) -> GVar {
        GVar::Field { idx: i, deg: 0 }
    }

    fn phi_star(i: usize) -> GVar {
        GVar::Antifield { idx: i, deg: 0 }
    }

    #[test]
    fn koszul_products() {
        let c1 = v(GVar::Ghost(1));
        let c2 = v(GVar::Ghost(2));
        assert_eq!(c1.mul(&c2).unwrap(), c2.mul(&c1).unwrap().neg());
        assert!(c1.mul(&c1).unwrap().is_zero());
        let s1 = v(GVar::GhostStar(1));
        let s2 = v(GVar::GhostStar(2));
        assert_eq!(s1.mul(&s2).unwrap(), s2.mul(&s1).unwrap());
        assert_eq!(s1.mul(&s1).unwrap().len(), 1);
    }

    #[test]
    fn derivative_signs() {
        // ∂/∂c^2 (c^1 c^2) = −c^1
        let p = GPoly::monomial(vec![GVar::Ghost(1), GVar::Ghost(2)], Scalar::int(1));
        assert_eq!(p.derivative(GVar::Ghost(2)).unwrap(), v(GVar::Ghost(1)).neg());
        let sq = GPoly::monomial(vec![phi(0), phi(0)], Scalar::int(1));
        assert_eq!(sq.derivative(phi(0)).unwrap(), v(phi(0)).scale(&Scalar::int(2)).unwrap());
    }

    #[test]
    fn differential_action_is_closed() {
        let cx = build_interval(
            vec![Scalar::int(0), Scalar::rat(1, 3), Scalar::int(1)],
            BasisKind::Lagrange,
            BreakConvention::default(),
        )
        .unwrap();
        let q = differential_matrix(&cx).unwrap();
        let basis = GeneratorBasis::interval(0);
        let empty = GeneratorBasis::from_indices(basis.geometry(), vec![]).unwrap();
        let tensors = transfer_tensors(&cx, &empty, 2).unwrap();
        let sc = structure_constants(&empty).unwrap();
        let s = assemble_action(&q, &tensors, &sc, &RESOLVED).unwrap();
        assert!(s.terms().all(|(m, _)| m.len() == 2));
        assert!(antibracket(&s, &s).unwrap().is_zero());
    }

    #[test]
    fn jacobi_action_is_closed() {
        let sc = structure_constants(&GeneratorBasis::interval(2)).unwrap();
        let mut s = GPoly::zero();
        for a in 0..3 {
            for b in 0..3 {
                for d in 0..3 {
                    let f = sc.coefficient(a, b, d).scale_ratio(1, 2);
                    s = s
                        .add(&GPoly::monomial(vec![GVar::Ghost(a), GVar::Ghost(b), GVar::GhostStar(d)], f))
                        .unwrap();
                }
            }
        }
        assert!(!s.is_zero());
        assert!(antibracket(&s, &s).unwrap().is_zero());
    }

    #[test]
    fn single_ghost_squares_away() {
        let s = GPoly::monomial(vec![GVar::Ghost(1), phi_star(1), phi(1)], Scalar::int(1));
        assert!(antibracket(&s, &s).unwrap().is_zero());
    }

    #[test]
    fn unpaired_variable() {
        let s = GPoly::monomial(vec![GVar::Ghost(0), phi_star(1), phi(1)], Scalar::int(1));
        let pairs = [(GVar::Ghost(0), GVar::GhostStar(0))];
        assert!(matches!(
            antibracket_with_pairs(&s, &s, &pairs),
            Err(Error::UnpairedVariable(_))
        ));
        let full = [pairs[0], (phi(1), phi_star(1))];
        assert!(antibracket_with_pairs(&s, &s, &full).unwrap().is_zero());
    }

    #[test]
    fn resolved_convention_is_the_unique_survivor() {
        let search = search_sign_conventions(&reference_instances().unwrap(), 0.0).unwrap();
        assert_eq!(search.survivors(), vec![RESOLVED]);
        // the first instance alone already pins the ordering
        let first = &search.outcomes.iter().filter(|o| o.residuals[0] == 0.0).collect::<Vec<_>>();
        assert!(first.iter().all(|o| o.convention.ordering == WordOrdering::GhostsFirst));
    }

    fn arb_var() -> impl Strategy<Value = GVar> {
        prop_oneof![
            (0..3usize).prop_map(GVar::Ghost),
            (0..3usize).prop_map(GVar::GhostStar),
            (0..3usize, 0..3u8).prop_map(|(idx, deg)| GVar::Field { idx, deg }),
            (0..3usize, 0..3u8).prop_map(|(idx, deg)| GVar::Antifield { idx, deg }),
        ]
    }

    fn arb_poly() -> impl Strategy<Value = GPoly> {
        prop::collection::vec((prop::collection::vec(arb_var(), 0..4), -3i64..=3), 0..5).prop_map(|terms| {
            terms.into_iter().fold(GPoly::zero(), |acc, (vars, c)| {
                acc.add(&GPoly::monomial(vars, Scalar::int(c))).unwrap()
            })
        })
    }

    fn homogeneous_part(p: &GPoly, odd: bool) -> GPoly {
        GPoly::from_raw(p.terms().filter(|(m, _)| monomial_is_odd(m) == odd).map(|(m, c)| (m.clone(), c.clone())).collect())
    }

    proptest! {
        #[test]
        fn normalization_is_involutive(vars in prop::collection::vec(arb_var(), 0..6)) {
            if let Some((_, m)) = normalize(vars) {
                prop_assert_eq!(normalize(m.clone()), Some((false, m)));
            }
        }

        #[test]
        fn graded_leibniz(p in arb_poly(), q in arb_poly(), x in arb_var(), odd in any::<bool>()) {
            let p = homogeneous_part(&p, odd);
            let lhs = p.mul(&q).unwrap().derivative(x).unwrap();
            let first = p.derivative(x).unwrap().mul(&q).unwrap();
            let second = p.mul(&q.derivative(x).unwrap()).unwrap();
            let sign = if odd && x.is_odd() { second.neg() } else { second };
            prop_assert_eq!(lhs, first.add(&sign).unwrap());
        }

        #[test]
        fn associative(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            prop_assert_eq!(p.mul(&q).unwrap().mul(&r).unwrap(), p.mul(&q.mul(&r).unwrap()).unwrap());
        }

        #[test]
        fn even_bracket_is_symmetric(p in arb_poly(), q in arb_poly()) {
            let p = homogeneous_part(&p, false);
            let q = homogeneous_part(&q, false);
            prop_assert_eq!(antibracket(&p, &q).unwrap(), antibracket(&q, &p).unwrap());
        }
    }
}
