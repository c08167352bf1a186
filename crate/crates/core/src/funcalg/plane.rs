//! Bivariate polynomials on the unit square.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::line::{ExpPoly, Func1D};
use super::scalar::{Scalar, ScalarKind};
use super::Axis;
use crate::error::Result;

/// `Σ a_{nm} x^n y^m` on `[0,1]²`, zero coefficients pruned.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Func2D {
    terms: BTreeMap<(u32, u32), Scalar>,
}

impl Func2D {
    pub fn zero() -> Func2D {
        Func2D::default()
    }

    pub fn monomial(coeff: Scalar, n: u32, m: u32) -> Func2D {
        let mut f = Func2D::zero();
        f.add_term(n, m, coeff);
        f
    }

    pub fn constant(c: Scalar) -> Func2D {
        Func2D::monomial(c, 0, 0)
    }

    /// Build from `(n, m, coeff)` triples.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, Scalar)>) -> Result<Func2D> {
        let mut f = Func2D::zero();
        for (n, m, c) in terms {
            ScalarKind::unify_opt(f.kind(), Some(c.kind()))?;
            f.add_term(n, m, c);
        }
        Ok(f)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &Scalar)> {
        self.terms.iter().map(|(&(n, m), c)| (n, m, c))
    }

    pub fn coeff(&self, n: u32, m: u32) -> Option<&Scalar> {
        self.terms.get(&(n, m))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn kind(&self) -> Option<ScalarKind> {
        let mut kind = None;
        for c in self.terms.values() {
            kind = ScalarKind::unify_opt(kind, Some(c.kind())).ok()?;
        }
        kind
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(n, m)| n + m).max().unwrap_or(0)
    }

    fn add_term(&mut self, n: u32, m: u32, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&(n, m)) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert((n, m), s);
                }
            }
            None => {
                self.terms.insert((n, m), c);
            }
        }
    }

    pub fn add(&self, other: &Func2D) -> Result<Func2D> {
        ScalarKind::unify_opt(self.kind(), other.kind())?;
        let mut out = self.clone();
        for (&(n, m), c) in &other.terms {
            out.add_term(n, m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Func2D) -> Result<Func2D> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Func2D {
        Func2D {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Func2D) -> Result<Func2D> {
        ScalarKind::unify_opt(self.kind(), other.kind())?;
        let mut out = Func2D::zero();
        for (&(n1, m1), a) in &self.terms {
            for (&(n2, m2), b) in &other.terms {
                out.add_term(n1 + n2, m1 + m2, a * b);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> Result<Func2D> {
        ScalarKind::unify_opt(self.kind(), Some(s.kind()))?;
        let mut out = Func2D::zero();
        for (&(n, m), c) in &self.terms {
            out.add_term(n, m, c * s);
        }
        Ok(out)
    }

    pub fn partial(&self, axis: Axis) -> Func2D {
        let mut out = Func2D::zero();
        for (&(n, m), c) in &self.terms {
            match axis {
                Axis::X if n > 0 => out.add_term(n - 1, m, c.scale_int(n as i64)),
                Axis::Y if m > 0 => out.add_term(n, m - 1, c.scale_int(m as i64)),
                _ => {}
            }
        }
        out
    }

    /// `∫_0^x f(x̃, y) dx̃` (or the analogous integral in `y`).
    pub fn antiderivative(&self, axis: Axis) -> Func2D {
        let mut out = Func2D::zero();
        for (&(n, m), c) in &self.terms {
            match axis {
                Axis::X => out.add_term(n + 1, m, c.scale_ratio(1, n as i64 + 1)),
                Axis::Y => out.add_term(n, m + 1, c.scale_ratio(1, m as i64 + 1)),
                Axis::T => unreachable!("no t axis on the square"),
            }
        }
        out
    }

    /// Fix one coordinate: `f(value, y)` for `axis == X`, returned as a
    /// bivariate polynomial independent of that coordinate.
    pub fn restrict(&self, axis: Axis, value: &Scalar) -> Result<Func2D> {
        let mut out = Func2D::zero();
        for (&(n, m), c) in &self.terms {
            match axis {
                Axis::X => out.add_term(0, m, c.checked_mul(&value.pow(n))?),
                Axis::Y => out.add_term(n, 0, c.checked_mul(&value.pow(m))?),
                Axis::T => unreachable!("no t axis on the square"),
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, x: &Scalar, y: &Scalar) -> Result<Scalar> {
        let kind = ScalarKind::unify_opt(self.kind(), Some(x.kind().unify(y.kind())?))?.unwrap();
        let mut acc = Scalar::zero(kind);
        for (&(n, m), c) in &self.terms {
            acc = acc.checked_add(&c.checked_mul(&x.pow(n))?.checked_mul(&y.pow(m))?)?;
        }
        Ok(acc)
    }

    /// `∫∫_{[0,1]²} f dx dy`.
    pub fn integrate_unit_square(&self, kind: ScalarKind) -> Scalar {
        let mut acc = Scalar::zero(kind);
        for (&(n, m), c) in &self.terms {
            acc = acc + c.scale_ratio(1, (n as i64 + 1) * (m as i64 + 1));
        }
        acc
    }

    /// Pull back along the straight segment `p + r (q - p)`, `r ∈ [0, 1]`,
    /// giving a polynomial in `r` on `[0, 1]`.
    pub fn along_segment(&self, p: (&Scalar, &Scalar), q: (&Scalar, &Scalar)) -> Result<Func1D> {
        let kind = p.0.kind();
        let dx = q.0.checked_sub(p.0)?;
        let dy = q.1.checked_sub(p.1)?;
        let x_lin = [p.0.clone(), dx];
        let y_lin = [p.1.clone(), dy];
        let mut out = ExpPoly::zero();
        for (&(n, m), c) in &self.terms {
            let xs = poly_pow(&x_lin, n, kind);
            let ys = poly_pow(&y_lin, m, kind);
            for (i, a) in xs.iter().enumerate() {
                for (j, b) in ys.iter().enumerate() {
                    out.add_term((i + j) as u32, 0, c.checked_mul(a)?.checked_mul(b)?);
                }
            }
        }
        Func1D::from_piece(Scalar::zero(kind), Scalar::one(kind), out)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(Scalar::abs_f64).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Func2D, tol: f64) -> bool {
        match self.sub(other) {
            Ok(d) => d.terms.values().all(|c| c.approx_eq(&Scalar::zero(c.kind()), tol)),
            Err(_) => false,
        }
    }
}

/// Dense univariate power of a linear polynomial `a + b r`.
fn poly_pow(lin: &[Scalar; 2], n: u32, kind: ScalarKind) -> Vec<Scalar> {
    let mut acc = vec![Scalar::one(kind)];
    for _ in 0..n {
        let mut next = vec![Scalar::zero(kind); acc.len() + 1];
        for (i, c) in acc.iter().enumerate() {
            next[i] = &next[i] + &(c * &lin[0]);
            next[i + 1] = &next[i + 1] + &(c * &lin[1]);
        }
        acc = next;
    }
    acc
}

impl fmt::Display for Func2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (&(n, m), c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            match n {
                0 => {}
                1 => write!(f, "·x")?,
                _ => write!(f, "·x^{n}")?,
            }
            match m {
                0 => {}
                1 => write!(f, "·y")?,
                _ => write!(f, "·y^{m}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    n: u32,
    m: u32,
    coeff: Scalar,
}

#[derive(Serialize, Deserialize)]
struct Func2DRepr {
    terms: Vec<TermRepr>,
}

impl Serialize for Func2D {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        Func2DRepr {
            terms: self
                .terms()
                .map(|(n, m, c)| TermRepr { n, m, coeff: c.clone() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Func2D {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Func2D, D::Error> {
        use serde::de::Error as _;
        let repr = Func2DRepr::deserialize(deserializer)?;
        Func2D::from_terms(repr.terms.into_iter().map(|t| (t.n, t.m, t.coeff))).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> Scalar {
        Scalar::rat(p, r)
    }

    fn poly(terms: &[(u32, u32, i64)]) -> Func2D {
        Func2D::from_terms(terms.iter().map(|&(n, m, c)| (n, m, Scalar::int(c)))).unwrap()
    }

    #[test]
    fn bilinear_partition_of_unity() {
        let one_minus_x = poly(&[(0, 0, 1), (1, 0, -1)]);
        let one_minus_y = poly(&[(0, 0, 1), (0, 1, -1)]);
        let x = poly(&[(1, 0, 1)]);
        let y = poly(&[(0, 1, 1)]);
        let sum = one_minus_x
            .mul(&one_minus_y)
            .unwrap()
            .add(&x.mul(&one_minus_y).unwrap())
            .unwrap()
            .add(&x.mul(&y).unwrap())
            .unwrap()
            .add(&y.mul(&one_minus_x).unwrap())
            .unwrap();
        assert_eq!(sum, Func2D::constant(q(1, 1)));
    }

    #[test]
    fn partial_of_xy() {
        assert_eq!(poly(&[(1, 1, 1)]).partial(Axis::X), poly(&[(0, 1, 1)]));
    }

    #[test]
    fn unit_square_integrals() {
        assert_eq!(Func2D::constant(q(1, 1)).integrate_unit_square(ScalarKind::Rational), q(1, 1));
        assert_eq!(poly(&[(1, 0, 1), (0, 1, 1)]).integrate_unit_square(ScalarKind::Rational), q(1, 1));
    }

    #[test]
    fn segment_pullback() {
        // x restricted to the edge (1,0) -> (1,1) is identically 1
        let x = poly(&[(1, 0, 1)]);
        let r = x.along_segment((&q(1, 1), &q(0, 1)), (&q(1, 1), &q(1, 1))).unwrap();
        assert_eq!(r, Func1D::constant(q(0, 1), q(1, 1), q(1, 1)).unwrap());
        // xy along (0,0) -> (1,1) is r^2
        let xy = poly(&[(1, 1, 1)]);
        let r = xy.along_segment((&q(0, 1), &q(0, 1)), (&q(1, 1), &q(1, 1))).unwrap();
        assert_eq!(r, Func1D::monomial(q(0, 1), q(1, 1), q(1, 1), 2, 0).unwrap());
    }
}
