//! The induced action: the differential matrix `Q` and the word tensors
//! `⟨chain_i, L_{a_1} h L_{a_2} … h L_{a_p} cochain_j⟩`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::backends::{CochainComplex, Geometry};
use crate::error::{Error, Result};
use crate::forms::{exterior_derivative, lie_derivative, Form, VectorField};
use crate::funcalg::{BreakConvention, Func1D, Scalar};
use crate::liealg::{GenIndex, GeneratorBasis};
use crate::linalg::{self, Matrix};

/// `Q_ij = ⟨chain_i, d cochain_j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialMatrix {
    pub entries: Matrix,
    /// Form degree of each basis element.
    pub degrees: Vec<u8>,
}

impl DifferentialMatrix {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i][j]
    }

    /// Largest entry of `Q²`.
    pub fn square_defect(&self) -> Result<f64> {
        let q2 = linalg::mat_mul(&self.entries, &self.entries)?;
        Ok(q2.iter().flatten().map(Scalar::abs_f64).fold(0.0, f64::max))
    }
}

pub fn differential_matrix(cx: &CochainComplex) -> Result<DifferentialMatrix> {
    let mut entries = linalg::zeros(cx.len(), cx.len(), cx.kind());
    for j in 0..cx.len() {
        let dc = exterior_derivative(cx.cochain(j))?;
        if dc.is_top_zero() {
            continue;
        }
        for i in cx.degree_range(dc.degree()) {
            entries[i][j] = cx.pair(i, &dc)?;
        }
    }
    let degrees = (0..cx.len()).map(|i| cx.degree(i)).collect();
    Ok(DifferentialMatrix { entries, degrees })
}

/// One word's matrix, indexed (output chain, input cochain).
#[derive(Clone, Debug, PartialEq)]
pub struct WordTensor {
    pub matrix: Matrix,
    /// Set when degree counting alone showed the word vanishes.
    pub pruned: bool,
}

impl WordTensor {
    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(Scalar::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().flatten().map(Scalar::abs_f64).fold(0.0, f64::max)
    }
}

fn check_compatible(cx: &CochainComplex, basis: &GeneratorBasis) -> Result<()> {
    if cx.geometry() != basis.geometry() {
        return Err(Error::Generators(format!(
            "{} generators on the {}",
            basis.geometry(),
            cx.geometry()
        )));
    }
    Ok(())
}

/// Apply `L_{a_1} h L_{a_2} … h L_{a_p}` to `omega`, innermost letter first.
pub fn apply_word(cx: &CochainComplex, basis: &GeneratorBasis, word: &[usize], omega: &Form) -> Result<Form> {
    let mut form = omega.clone();
    for (pos, &a) in word.iter().enumerate().rev() {
        form = lie_derivative(basis.field(a), &form)?;
        if pos > 0 {
            form = cx.homotopy(&form)?;
        }
    }
    Ok(form)
}

/// Word tensor for a single word. Words longer than `dim + 1` are returned as
/// the zero matrix with `pruned` set unless `force` asks for the symbolic
/// computation anyway.
pub fn word_operator(cx: &CochainComplex, basis: &GeneratorBasis, word: &[usize], force: bool) -> Result<WordTensor> {
    check_compatible(cx, basis)?;
    if word.is_empty() {
        return Err(Error::Generators("empty word".into()));
    }
    let p = word.len();
    let mut matrix = linalg::zeros(cx.len(), cx.len(), cx.kind());
    if p > cx.dim() as usize + 1 && !force {
        return Ok(WordTensor { matrix, pruned: true });
    }
    for j in 0..cx.len() {
        if (cx.degree(j) as usize) + 1 < p && !force {
            continue;
        }
        let out = apply_word(cx, basis, word, cx.cochain(j))?;
        if out.is_top_zero() {
            continue;
        }
        for i in cx.degree_range(out.degree()) {
            matrix[i][j] = cx.pair(i, &out)?;
        }
    }
    Ok(WordTensor { matrix, pruned: false })
}

/// All word tensors up to a maximal length.
#[derive(Clone, Debug)]
pub struct TransferTensors {
    pub geometry: Geometry,
    pub window: Vec<GenIndex>,
    pub max_len: usize,
    pub words: BTreeMap<Vec<usize>, WordTensor>,
}

/// Every word over `0..n` of length `1..=max_len`, shortest first, each
/// length in lexicographic order.
pub fn enumerate_words(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..n).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
        all.extend(layer.iter().cloned());
    }
    all
}

pub fn transfer_tensors(cx: &CochainComplex, basis: &GeneratorBasis, max_len: usize) -> Result<TransferTensors> {
    check_compatible(cx, basis)?;
    let limit = cx.dim() as usize + 1;
    if max_len > limit {
        return Err(Error::Config(format!(
            "max word length {max_len} exceeds dimension + 1 = {limit}"
        )));
    }
    let words = enumerate_words(basis.len(), max_len);

    // One worker per input cochain; intermediate forms are keyed by the word
    // suffix already applied, so words sharing a suffix share the work.
    let columns: Vec<BTreeMap<Vec<usize>, Vec<(usize, Scalar)>>> = (0..cx.len())
        .into_par_iter()
        .map(|j| -> Result<_> {
            let mut cache: HashMap<Vec<usize>, Form> = HashMap::new();
            let mut column = BTreeMap::new();
            for word in &words {
                if (cx.degree(j) as usize) + 1 < word.len() {
                    continue;
                }
                let form = match word.split_first() {
                    Some((&a, [])) => lie_derivative(basis.field(a), cx.cochain(j))?,
                    Some((&a, rest)) => {
                        let inner = cache.get(rest).expect("suffixes are computed first");
                        lie_derivative(basis.field(a), &cx.homotopy(inner)?)?
                    }
                    None => unreachable!(),
                };
                let mut entries = Vec::new();
                if !form.is_top_zero() {
                    for i in cx.degree_range(form.degree()) {
                        let v = cx.pair(i, &form)?;
                        if !v.is_zero() {
                            entries.push((i, v));
                        }
                    }
                }
                column.insert(word.clone(), entries);
                cache.insert(word.clone(), form);
            }
            Ok(column)
        })
        .collect::<Result<_>>()?;

    let mut out = BTreeMap::new();
    for word in words {
        let mut matrix = linalg::zeros(cx.len(), cx.len(), cx.kind());
        for (j, column) in columns.iter().enumerate() {
            if let Some(entries) = column.get(&word) {
                for (i, v) in entries {
                    matrix[*i][j] = v.clone();
                }
            }
        }
        out.insert(word, WordTensor { matrix, pruned: false });
    }
    Ok(TransferTensors {
        geometry: cx.geometry(),
        window: basis.indices().to_vec(),
        max_len,
        words: out,
    })
}

/// `T_{ab} − T_{ba}`: the coefficient of `c^a c^b` once ghosts anticommute.
pub fn antisymmetrized(a_b: &Matrix, b_a: &Matrix) -> Result<Matrix> {
    a_b.iter()
        .zip(b_a)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.checked_sub(y)).collect())
        .collect()
}

#[derive(Serialize)]
struct RowRepr<'a> {
    chain: usize,
    cochain: usize,
    value: &'a Scalar,
}

#[derive(Serialize)]
struct WordRepr<'a> {
    word: Vec<GenIndex>,
    rows: Vec<RowRepr<'a>>,
}

#[derive(Serialize)]
struct TensorsRepr<'a> {
    geometry: Geometry,
    window: &'a [GenIndex],
    words: Vec<WordRepr<'a>>,
}

impl TransferTensors {
    pub fn get(&self, word: &[usize]) -> Option<&WordTensor> {
        self.words.get(word)
    }

    pub fn stored_lengths(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.words.keys().map(Vec::len).collect();
        lens.sort_unstable();
        lens.dedup();
        lens
    }

    /// Export with nonzero entries only; deterministic.
    pub fn to_json(&self) -> serde_json::Value {
        let words = self
            .words
            .iter()
            .map(|(w, t)| WordRepr {
                word: w.iter().map(|&a| self.window[a]).collect(),
                rows: t
                    .matrix
                    .iter()
                    .enumerate()
                    .flat_map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .filter(|(_, v)| !v.is_zero())
                            .map(move |(j, v)| RowRepr { chain: i, cochain: j, value: v })
                    })
                    .collect(),
            })
            .collect();
        serde_json::to_value(TensorsRepr {
            geometry: self.geometry,
            window: &self.window,
            words,
        })
        .expect("tensors serialize")
    }
}

/// `ξ = L_a h L_b γ` on the square.
pub fn square_xi(cx: &CochainComplex, basis: &GeneratorBasis, a: usize, b: usize) -> Result<Form> {
    if cx.geometry() != Geometry::Square {
        return Err(Error::Unsupported("ξ is defined for the square only".into()));
    }
    let gamma = cx.cochain(cx.degree_range(2).start);
    let xi = apply_word(cx, basis, &[a, b], gamma)?;
    log::debug!("ξ[{}, {}] = {xi}", basis.index(a), basis.index(b));
    Ok(xi)
}

/// The printed 1D formulas evaluated from node tables.
#[derive(Clone, Debug)]
pub struct ClosedFormTables {
    /// `ν_a^i = ν_a(t_i)`, indexed `[a][i]`.
    pub nu: Matrix,
    /// `ν′_a^i`, indexed `[a][i]`.
    pub dnu: Matrix,
    /// `β_j^i`, indexed `[i][j]`.
    pub beta: Matrix,
    /// Length-1 tensor for each generator, shaped like the engine's matrices.
    pub length1: Vec<Matrix>,
    /// Length-2 tensor (α ← β block) for each ordered pair `(a, b)`.
    pub length2: BTreeMap<(usize, usize), Matrix>,
}

fn node_values(f: &Func1D, nodes: &[Scalar], conv: BreakConvention) -> Result<Vec<Scalar>> {
    nodes.iter().map(|t| f.evaluate(t, conv)).collect()
}

pub fn closed_form_tables(cx: &CochainComplex, basis: &GeneratorBasis) -> Result<ClosedFormTables> {
    check_compatible(cx, basis)?;
    let geometry = cx.geometry();
    if geometry == Geometry::Square {
        return Err(Error::Unsupported("no closed-form tables for the square".into()));
    }
    let conv = cx.convention();
    let kind = cx.kind();
    let nodes = cx.nodes();
    let node_count = nodes.len();
    let alphas = cx.degree_range(0);
    let betas = cx.degree_range(1);
    let edges = betas.len();
    let zero = || Scalar::zero(kind);

    let mut nu = Vec::new();
    let mut dnu = Vec::new();
    for a in 0..basis.len() {
        let VectorField::Line(f) = basis.field(a) else {
            unreachable!("1D generators")
        };
        nu.push(node_values(f, nodes, conv)?);
        dnu.push(node_values(&f.derivative(), nodes, conv)?);
    }

    // β_j^i; the interval goes through Σ_{k>j} α'_k(t_i), the circle reads ϑ_j(t_i)
    let beta = match geometry {
        Geometry::Interval => {
            let dalpha = alphas
                .clone()
                .map(|k| match cx.cochain(k) {
                    Form::Line { coeff, .. } => node_values(&coeff.derivative(), nodes, conv),
                    _ => unreachable!(),
                })
                .collect::<Result<Vec<_>>>()?;
            (0..node_count)
                .map(|i| {
                    (0..edges)
                        .map(|j| {
                            let mut acc = zero();
                            for d in &dalpha[j + 1..] {
                                acc = acc.checked_add(&d[i])?;
                            }
                            Ok(acc)
                        })
                        .collect()
                })
                .collect::<Result<Matrix>>()?
        }
        _ => cx.beta_table()?,
    };

    // β_{j}^{i} with the boundary conventions: interval β_{-1} = β_n = 0,
    // circle indices mod n
    let beta_at = |i: usize, j: isize| -> Scalar {
        match geometry {
            Geometry::Circle => beta[i % node_count][j.rem_euclid(edges as isize) as usize].clone(),
            _ if j < 0 || j as usize >= edges => zero(),
            _ => beta[i][j as usize].clone(),
        }
    };
    let next_node = |i: usize| match geometry {
        Geometry::Circle => (i + 1) % node_count,
        _ => i + 1,
    };

    let mut length1 = Vec::new();
    for a in 0..basis.len() {
        let mut m = linalg::zeros(cx.len(), cx.len(), kind);
        for (li, i) in alphas.clone().enumerate() {
            for (lj, j) in alphas.clone().enumerate() {
                let diff = beta_at(li, lj as isize - 1).checked_sub(&beta_at(li, lj as isize))?;
                m[i][j] = nu[a][li].checked_mul(&diff)?;
            }
        }
        for (li, i) in betas.clone().enumerate() {
            let ip = next_node(li);
            for (lj, j) in betas.clone().enumerate() {
                let up = nu[a][ip].checked_mul(&beta_at(ip, lj as isize))?;
                let down = nu[a][li].checked_mul(&beta_at(li, lj as isize))?;
                m[i][j] = up.checked_sub(&down)?;
            }
        }
        length1.push(m);
    }

    let mut length2 = BTreeMap::new();
    for a in 0..basis.len() {
        for b in 0..basis.len() {
            let mut m = linalg::zeros(cx.len(), cx.len(), kind);
            for (li, i) in alphas.clone().enumerate() {
                for (lj, j) in betas.clone().enumerate() {
                    let first = nu[a][li].checked_mul(&dnu[b][li])?.checked_mul(&beta_at(li, lj as isize))?;
                    let mut sum = zero();
                    for mm in 0..node_count {
                        let da = beta_at(li, mm as isize - 1).checked_sub(&beta_at(li, mm as isize))?;
                        let term = nu[b][mm].checked_mul(&beta_at(mm, lj as isize))?.checked_mul(&da)?;
                        sum = sum.checked_add(&term)?;
                    }
                    m[i][j] = first.checked_sub(&nu[a][li].checked_mul(&sum)?)?;
                }
            }
            length2.insert((a, b), m);
        }
    }

    Ok(ClosedFormTables {
        nu,
        dnu,
        beta,
        length1,
        length2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{build_interval, build_square, BasisKind};

    fn q(p: i64, r: i64) -> Scalar {
        Scalar::rat(p, r)
    }

    #[test]
    fn interval_differential() {
        let cx = build_interval(vec![q(0, 1), q(1, 2), q(1, 1)], BasisKind::Lagrange, BreakConvention::default())
            .unwrap();
        let dq = differential_matrix(&cx).unwrap();
        // chains 3, 4 are β^0, β^1; cochain 1 is α_1
        assert_eq!(dq.get(3, 1), &q(1, 1));
        assert_eq!(dq.get(4, 1), &q(-1, 1));
        assert_eq!(dq.square_defect().unwrap(), 0.0);
    }

    #[test]
    fn square_differential_hits_gamma() {
        let cx = build_square();
        let dq = differential_matrix(&cx).unwrap();
        for j in 4..8 {
            assert_eq!(dq.get(8, j), &q(1, 1));
        }
    }

    #[test]
    fn two_node_words() {
        let cx = build_interval(vec![q(0, 1), q(1, 1)], BasisKind::Lagrange, BreakConvention::default()).unwrap();
        let basis = GeneratorBasis::interval(1);
        let t1 = word_operator(&cx, &basis, &[1], false).unwrap();
        assert_eq!(t1.matrix[1][1], q(1, 1));
        let t11 = word_operator(&cx, &basis, &[1, 1], false).unwrap();
        assert!(t11.is_zero() && !t11.pruned);
        let long = word_operator(&cx, &basis, &[1, 1, 0], false).unwrap();
        assert!(long.pruned && long.is_zero());
    }

    #[test]
    fn stored_lengths() {
        let cx = build_interval(vec![q(0, 1), q(1, 1)], BasisKind::Lagrange, BreakConvention::default()).unwrap();
        let tensors = transfer_tensors(&cx, &GeneratorBasis::interval(1), 2).unwrap();
        assert_eq!(tensors.stored_lengths(), vec![1, 2]);
        assert!(transfer_tensors(&cx, &GeneratorBasis::interval(1), 3).is_err());
    }

    #[test]
    fn cached_equals_direct() {
        let cx = build_interval(vec![q(0, 1), q(1, 3), q(1, 1)], BasisKind::Lagrange, BreakConvention::default())
            .unwrap();
        let basis = GeneratorBasis::interval(2);
        let tensors = transfer_tensors(&cx, &basis, 2).unwrap();
        for (word, t) in &tensors.words {
            assert_eq!(&word_operator(&cx, &basis, word, false).unwrap(), t, "{word:?}");
        }
    }

    #[test]
    fn closed_form_two_nodes() {
        let cx = build_interval(vec![q(0, 1), q(1, 1)], BasisKind::Lagrange, BreakConvention::default()).unwrap();
        let tables = closed_form_tables(&cx, &GeneratorBasis::interval(1)).unwrap();
        assert_eq!(tables.length1[1][1][1], q(1, 1));
        assert_eq!(tables.length2[&(1, 1)][1][2], q(0, 1));
    }

    fn assert_closed_forms_match(cx: &CochainComplex, basis: &GeneratorBasis, tol: f64) {
        let tensors = transfer_tensors(cx, basis, 2).unwrap();
        let tables = closed_form_tables(cx, basis).unwrap();
        for a in 0..basis.len() {
            let diff = linalg::max_abs_diff(&tensors.get(&[a]).unwrap().matrix, &tables.length1[a]).unwrap();
            assert!(diff <= tol, "length 1, a={a}: {diff}");
            for b in 0..basis.len() {
                let engine = antisymmetrized(&tensors.get(&[a, b]).unwrap().matrix, &tensors.get(&[b, a]).unwrap().matrix)
                    .unwrap();
                let closed = antisymmetrized(&tables.length2[&(a, b)], &tables.length2[&(b, a)]).unwrap();
                let beta_cols = cx.degree_range(1);
                let diff = cx
                    .degree_range(0)
                    .flat_map(|i| beta_cols.clone().map(move |j| (i, j)))
                    .map(|(i, j)| engine[i][j].checked_sub(&closed[i][j]).unwrap().abs_f64())
                    .fold(0.0, f64::max);
                assert!(diff <= tol, "length 2, ({a}, {b}): {diff}");
            }
        }
    }

    #[test]
    fn closed_forms_interval() {
        let cx = build_interval(vec![q(0, 1), q(1, 2), q(1, 1)], BasisKind::Lagrange, BreakConvention::default())
            .unwrap();
        assert_closed_forms_match(&cx, &GeneratorBasis::interval(2), 0.0);
    }

    #[test]
    fn closed_forms_circle() {
        let cx = crate::backends::build_circle(4, BasisKind::TrigDual, BreakConvention::default()).unwrap();
        assert_closed_forms_match(&cx, &GeneratorBasis::circle(1), 1e-10);
    }
}
