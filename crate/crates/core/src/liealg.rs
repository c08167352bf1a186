//! Generator bases of vector-field Lie algebras, their structure constants,
//! and the window-closure predicate used to filter the master equation.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::backends::Geometry;
use crate::error::{Error, Result};
use crate::forms::VectorField;
use crate::funcalg::{Axis, Func1D, Func2D, Scalar, ScalarKind};

/// Name of a generator in the ambient family, whether or not it is in the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenIndex {
    /// `t^k d/dt`
    Interval(u32),
    /// `e^{ikt} d/dt`
    Circle(i64),
    /// `x^n y^m ∂_axis`
    Square { axis: Axis, n: u32, m: u32 },
}

impl fmt::Display for GenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenIndex::Interval(k) => write!(f, "t^{k}∂t"),
            GenIndex::Circle(k) => write!(f, "e^{{{k}it}}∂t"),
            GenIndex::Square { axis, n, m } => {
                let a = if *axis == Axis::X { "x" } else { "y" };
                write!(f, "x^{n}y^{m}∂{a}")
            }
        }
    }
}

impl Serialize for GenIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct SquareRepr {
            axis: Axis,
            n: u32,
            m: u32,
        }
        match *self {
            GenIndex::Interval(k) => serializer.serialize_u32(k),
            GenIndex::Circle(k) => serializer.serialize_i64(k),
            GenIndex::Square { axis, n, m } => SquareRepr { axis, n, m }.serialize(serializer),
        }
    }
}

/// A finite window of generators, realized as vector fields.
#[derive(Clone, Debug)]
pub struct GeneratorBasis {
    geometry: Geometry,
    indices: Vec<GenIndex>,
    fields: Vec<VectorField>,
}

impl GeneratorBasis {
    /// `t^k d/dt` for `0 ≤ k ≤ K` on `[0, 1]`.
    pub fn interval(k_max: u32) -> GeneratorBasis {
        let indices: Vec<_> = (0..=k_max).map(GenIndex::Interval).collect();
        GeneratorBasis::from_indices(Geometry::Interval, indices).expect("interval generators")
    }

    /// `e^{ikt} d/dt` for `|k| ≤ K` on `[0, 2π]`, complex floats.
    pub fn circle(k_max: u32) -> GeneratorBasis {
        let k = k_max as i64;
        let indices: Vec<_> = (-k..=k).map(GenIndex::Circle).collect();
        GeneratorBasis::from_indices(Geometry::Circle, indices).expect("circle generators")
    }

    /// `x^n y^m ∂_x` and `x^n y^m ∂_y` with `n + m ≤ D`.
    pub fn square(d_max: u32) -> GeneratorBasis {
        let mut indices = Vec::new();
        for axis in [Axis::X, Axis::Y] {
            for total in 0..=d_max {
                for m in 0..=total {
                    indices.push(GenIndex::Square { axis, n: total - m, m });
                }
            }
        }
        GeneratorBasis::from_indices(Geometry::Square, indices).expect("square generators")
    }

    /// A window given by an explicit list of generators.
    pub fn from_indices(geometry: Geometry, indices: Vec<GenIndex>) -> Result<GeneratorBasis> {
        let fields = indices
            .iter()
            .map(|g| realize(geometry, g))
            .collect::<Result<Vec<_>>>()?;
        Ok(GeneratorBasis {
            geometry,
            indices,
            fields,
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn kind(&self) -> ScalarKind {
        match self.geometry {
            Geometry::Circle => ScalarKind::Float,
            _ => ScalarKind::Rational,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[GenIndex] {
        &self.indices
    }

    pub fn index(&self, a: usize) -> GenIndex {
        self.indices[a]
    }

    pub fn field(&self, a: usize) -> &VectorField {
        &self.fields[a]
    }

    pub fn position(&self, g: &GenIndex) -> Option<usize> {
        self.indices.iter().position(|h| h == g)
    }

    /// Expand a field in the ambient monomial family of this geometry.
    pub fn expand(&self, v: &VectorField) -> Result<Vec<(GenIndex, Scalar)>> {
        let not_expressible = || Error::Generators(format!("{v:?} is not a combination of {} generators", self.geometry));
        match (self.geometry, v) {
            (Geometry::Interval | Geometry::Circle, VectorField::Line(f)) => {
                if f.pieces().len() != 1 {
                    return Err(not_expressible());
                }
                f.pieces()[0]
                    .terms()
                    .map(|(n, k, c)| match (self.geometry, n, k) {
                        (Geometry::Interval, n, 0) => Ok((GenIndex::Interval(n), c.clone())),
                        (Geometry::Circle, 0, k) => Ok((GenIndex::Circle(k), c.clone())),
                        _ => Err(not_expressible()),
                    })
                    .collect()
            }
            (Geometry::Square, VectorField::Plane { x, y }) => Ok(x
                .terms()
                .map(|(n, m, c)| (GenIndex::Square { axis: Axis::X, n, m }, c.clone()))
                .chain(y.terms().map(|(n, m, c)| (GenIndex::Square { axis: Axis::Y, n, m }, c.clone())))
                .collect()),
            _ => Err(not_expressible()),
        }
    }
}

fn realize(geometry: Geometry, g: &GenIndex) -> Result<VectorField> {
    let one = Scalar::int(1);
    match (geometry, *g) {
        (Geometry::Interval, GenIndex::Interval(k)) => Ok(VectorField::Line(Func1D::monomial(
            Scalar::int(0),
            Scalar::int(1),
            one,
            k,
            0,
        )?)),
        (Geometry::Circle, GenIndex::Circle(k)) => Ok(VectorField::Line(Func1D::monomial(
            Scalar::float(0.0, 0.0),
            Scalar::float(TAU, 0.0),
            Scalar::one(ScalarKind::Float),
            0,
            k,
        )?)),
        (Geometry::Square, GenIndex::Square { axis, n, m }) => {
            let mono = Func2D::monomial(one, n, m);
            Ok(match axis {
                Axis::X => VectorField::Plane {
                    x: mono,
                    y: Func2D::zero(),
                },
                _ => VectorField::Plane {
                    x: Func2D::zero(),
                    y: mono,
                },
            })
        }
        _ => Err(Error::Generators(format!("{g} does not live on the {geometry}"))),
    }
}

/// `[v, w]` for vector fields on the same domain.
pub fn bracket(v: &VectorField, w: &VectorField) -> Result<VectorField> {
    v.bracket(w)
}

/// Expansion of one bracket `[v_a, v_b]`.
#[derive(Clone, Debug, Default)]
pub struct BracketExpansion {
    /// `(d, f_ab^d)` for `d` in the window.
    pub inside: Vec<(usize, Scalar)>,
    /// Components that leave the window.
    pub outside: Vec<(GenIndex, Scalar)>,
}

impl BracketExpansion {
    pub fn leaves_window(&self) -> bool {
        self.outside.iter().any(|(_, c)| !negligible(c))
    }
}

/// Zero test used by the window logic: exact zero, or below 1e-12 for floats.
fn negligible(c: &Scalar) -> bool {
    c.is_zero() || (!c.is_exact() && c.abs_f64() <= 1e-12)
}

/// `f_ab^d` for every ordered pair of window generators.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    kind: ScalarKind,
    window: Vec<GenIndex>,
    table: Vec<Vec<BracketExpansion>>,
}

pub fn structure_constants(basis: &GeneratorBasis) -> Result<StructureConstants> {
    let n = basis.len();
    let mut table = vec![vec![BracketExpansion::default(); n]; n];
    for (a, row) in table.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            let br = bracket(basis.field(a), basis.field(b))?;
            for (g, c) in basis.expand(&br)? {
                match basis.position(&g) {
                    Some(d) => slot.inside.push((d, c)),
                    None => slot.outside.push((g, c)),
                }
            }
            slot.inside.sort_by_key(|(d, _)| *d);
        }
    }
    Ok(StructureConstants {
        kind: basis.kind(),
        window: basis.indices().to_vec(),
        table,
    })
}

#[derive(Serialize)]
struct TripleRepr<'a> {
    a: GenIndex,
    b: GenIndex,
    d: GenIndex,
    value: &'a Scalar,
    in_window: bool,
}

impl StructureConstants {
    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn window(&self) -> &[GenIndex] {
        &self.window
    }

    pub fn get(&self, a: usize, b: usize) -> &BracketExpansion {
        &self.table[a][b]
    }

    /// `f_ab^d` for a window index `d`.
    pub fn coefficient(&self, a: usize, b: usize, d: usize) -> Scalar {
        self.table[a][b]
            .inside
            .iter()
            .find(|(e, _)| *e == d)
            .map_or_else(|| Scalar::zero(self.kind), |(_, c)| c.clone())
    }

    /// No bracket of two window generators leaves the window.
    pub fn window_is_subalgebra(&self) -> bool {
        self.table.iter().flatten().all(|e| !e.leaves_window())
    }

    /// Largest `|f_ab^d + f_ba^d|` including out-of-window components.
    pub fn antisymmetry_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for a in 0..self.len() {
            for b in 0..self.len() {
                let (ab, ba) = (self.bracket_vector(a, b), self.bracket_vector(b, a));
                for key in ab.keys().chain(ba.keys()) {
                    let zero = Scalar::zero(self.kind);
                    let s = ab.get(key).unwrap_or(&zero).checked_add(ba.get(key).unwrap_or(&zero))?;
                    worst = worst.max(s.abs_f64());
                }
            }
        }
        Ok(worst)
    }

    /// Largest Jacobiator component over window-closed triples.
    pub fn jacobi_defect(&self) -> Result<f64> {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if !window_closed(&[a, b, c], self) {
                        continue;
                    }
                    let mut total = Vector::new();
                    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                        let inner = self.bracket_vector(x, y);
                        let mut e_z = Vector::new();
                        e_z.insert(Slot::In(z), Scalar::one(self.kind));
                        let outer = self.bracket_of(&inner, &e_z)?;
                        add_into(&mut total, &outer)?;
                    }
                    for v in total.values() {
                        worst = worst.max(v.abs_f64());
                    }
                }
            }
        }
        Ok(worst)
    }

    fn bracket_vector(&self, a: usize, b: usize) -> Vector {
        let e = &self.table[a][b];
        e.inside
            .iter()
            .map(|(d, c)| (Slot::In(*d), c.clone()))
            .chain(e.outside.iter().map(|(g, c)| (Slot::Out(*g), c.clone())))
            .collect()
    }

    /// Bilinear bracket of two vectors supported in the window. Returns the
    /// result including any out-of-window components.
    fn bracket_of(&self, u: &Vector, v: &Vector) -> Result<Vector> {
        let mut out = Vector::new();
        for (su, cu) in u {
            let Slot::In(a) = su else { continue };
            for (sv, cv) in v {
                let Slot::In(b) = sv else { continue };
                let coeff = cu.checked_mul(cv)?;
                for (slot, f) in self.bracket_vector(*a, *b) {
                    let term = coeff.checked_mul(&f)?;
                    match out.get_mut(&slot) {
                        Some(existing) => *existing = existing.checked_add(&term)?,
                        None => {
                            out.insert(slot, term);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Sparse triples, in window order, for export.
    pub fn to_json(&self) -> serde_json::Value {
        let mut triples = Vec::new();
        for (a, row) in self.table.iter().enumerate() {
            for (b, e) in row.iter().enumerate() {
                for (d, c) in &e.inside {
                    triples.push(TripleRepr {
                        a: self.window[a],
                        b: self.window[b],
                        d: self.window[*d],
                        value: c,
                        in_window: true,
                    });
                }
                for (g, c) in &e.outside {
                    triples.push(TripleRepr {
                        a: self.window[a],
                        b: self.window[b],
                        d: *g,
                        value: c,
                        in_window: false,
                    });
                }
            }
        }
        serde_json::to_value(triples).expect("structure constants serialize")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    In(usize),
    Out(GenIndex),
}

type Vector = BTreeMap<Slot, Scalar>;

fn add_into(acc: &mut Vector, v: &Vector) -> Result<()> {
    for (k, c) in v {
        match acc.get_mut(k) {
            Some(existing) => *existing = existing.checked_add(c)?,
            None => {
                acc.insert(*k, c.clone());
            }
        }
    }
    Ok(())
}

/// True iff every iterated bracket of every sub-multiset of `word` has all
/// of its nonzero components inside the window.
pub fn window_closed(word: &[usize], sc: &StructureConstants) -> bool {
    let full = (1u32 << word.len()) - 1;
    let mut memo: HashMap<u32, Option<Vec<Vector>>> = HashMap::new();
    trees(full, word, sc, &mut memo).is_some()
}

/// All nonzero iterated brackets over the positions in `mask`, or `None` as
/// soon as one of them (or one over a subset) leaves the window.
fn trees(mask: u32, word: &[usize], sc: &StructureConstants, memo: &mut HashMap<u32, Option<Vec<Vector>>>) -> Option<Vec<Vector>> {
    if let Some(hit) = memo.get(&mask) {
        return hit.clone();
    }
    let result = if mask.count_ones() == 1 {
        let a = word[mask.trailing_zeros() as usize];
        let mut e = Vector::new();
        e.insert(Slot::In(a), Scalar::one(sc.kind));
        Some(vec![e])
    } else {
        build_trees(mask, word, sc, memo)
    };
    memo.insert(mask, result.clone());
    result
}

fn build_trees(mask: u32, word: &[usize], sc: &StructureConstants, memo: &mut HashMap<u32, Option<Vec<Vector>>>) -> Option<Vec<Vector>> {
    let low = mask & mask.wrapping_neg();
    let rest = mask & !low;
    let mut out = Vec::new();
    // left part always holds the lowest position; `sub` runs over subsets of the rest
    let mut sub = rest;
    loop {
        let left = low | sub;
        let right = mask & !left;
        if right != 0 {
            let lefts = trees(left, word, sc, memo)?;
            let rights = trees(right, word, sc, memo)?;
            for u in &lefts {
                for v in &rights {
                    let r = sc.bracket_of(u, v).ok()?;
                    let mut kept = Vector::new();
                    for (slot, c) in r {
                        if negligible(&c) {
                            continue;
                        }
                        if matches!(slot, Slot::Out(_)) {
                            return None;
                        }
                        kept.insert(slot, c);
                    }
                    if !kept.is_empty() {
                        out.push(kept);
                    }
                }
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_brackets() {
        let basis = GeneratorBasis::interval(2);
        let v01 = bracket(basis.field(0), basis.field(1)).unwrap();
        assert_eq!(&v01, basis.field(0));
        let sc = structure_constants(&basis).unwrap();
        assert_eq!(sc.coefficient(1, 2, 2), Scalar::int(1));
        assert_eq!(sc.coefficient(1, 2, 1), Scalar::int(0));
        assert!(sc.window_is_subalgebra());
    }

    #[test]
    fn circle_bracket_with_i() {
        let basis = GeneratorBasis::circle(3);
        let (v1, v2, v3) = (basis.position(&GenIndex::Circle(1)).unwrap(), 5, 6);
        assert_eq!(basis.index(v2), GenIndex::Circle(2));
        let sc = structure_constants(&basis).unwrap();
        assert!(sc.coefficient(v1, v2, v3).approx_eq(&Scalar::float(0.0, 1.0), 1e-15));
    }

    #[test]
    fn square_commuting_fields() {
        let basis = GeneratorBasis::square(1);
        assert_eq!(basis.len(), 6);
        let x_dx = basis.position(&GenIndex::Square { axis: Axis::X, n: 1, m: 0 }).unwrap();
        let y_dy = basis.position(&GenIndex::Square { axis: Axis::Y, n: 0, m: 1 }).unwrap();
        assert!(bracket(basis.field(x_dx), basis.field(y_dy)).unwrap().is_zero());
        assert!(structure_constants(&basis).unwrap().window_is_subalgebra());
    }

    #[test]
    fn closure_examples() {
        let sc = structure_constants(&GeneratorBasis::interval(2)).unwrap();
        assert!(window_closed(&[1, 2], &sc));
        let i3 = structure_constants(&GeneratorBasis::interval(3)).unwrap();
        assert!(!window_closed(&[2, 3], &i3));
        assert!(!window_closed(&[0, 2, 3], &i3));
        assert!(window_closed(&[3, 3], &i3));

        let c1 = structure_constants(&GeneratorBasis::circle(1)).unwrap();
        // positions: -1 -> 0, 0 -> 1, 1 -> 2
        assert!(window_closed(&[2, 2], &c1));
        assert!(window_closed(&[2, 2, 0], &c1));
        assert!(window_closed(&[0, 2, 2], &c1));

        let c2 = structure_constants(&GeneratorBasis::circle(2)).unwrap();
        // positions: 1 -> 3, 2 -> 4; [v_1, v_2] = i v_3 leaves |k| <= 2
        assert!(!window_closed(&[3, 4], &c2));
        assert!(window_closed(&[3], &c2));
    }

    #[test]
    fn antisymmetry_and_jacobi() {
        for sc in [
            structure_constants(&GeneratorBasis::interval(4)).unwrap(),
            structure_constants(&GeneratorBasis::circle(2)).unwrap(),
            structure_constants(&GeneratorBasis::square(2)).unwrap(),
        ] {
            assert!(sc.antisymmetry_defect().unwrap() <= 1e-12);
            assert!(sc.jacobi_defect().unwrap() <= 1e-12);
        }
    }
}
