//! Piecewise exponential polynomials on a real interval.
//!
//! Each piece is a finite sum `a_{n,k} t^n e^{ikt}`. The class is closed under
//! sums, products, `d/dt` and antiderivatives, which is all the 1D backends
//! need.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::scalar::{Scalar, ScalarKind};
use super::BreakConvention;
use crate::error::{Error, Result};

/// One smooth piece: `(n, k) -> a` encodes `a t^n e^{ikt}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpPoly {
    terms: BTreeMap<(u32, i64), Scalar>,
}

impl ExpPoly {
    pub fn zero() -> ExpPoly {
        ExpPoly::default()
    }

    pub fn term(coeff: Scalar, n: u32, k: i64) -> ExpPoly {
        let mut p = ExpPoly::zero();
        p.add_term(n, k, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, i64, &Scalar)> {
        self.terms.iter().map(|(&(n, k), c)| (n, k, c))
    }

    pub fn kind(&self) -> Option<ScalarKind> {
        self.terms
            .values()
            .try_fold(None, |acc, c| ScalarKind::unify_opt(acc, Some(c.kind())))
            .unwrap_or(Some(ScalarKind::Float))
    }

    pub fn add_term(&mut self, n: u32, k: i64, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&(n, k)) {
            Some(old) => {
                let s = old + coeff;
                if !s.is_zero() {
                    self.terms.insert((n, k), s);
                }
            }
            None => {
                self.terms.insert((n, k), coeff);
            }
        }
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (&(n, k), c) in &other.terms {
            out.add_term(n, k, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (&(n, k), c) in &self.terms {
            out.add_term(n, k, c * s);
        }
        out
    }

    pub fn neg(&self) -> ExpPoly {
        ExpPoly {
            terms: self.terms.iter().map(|(key, c)| (*key, -c)).collect(),
        }
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (&(n1, k1), a) in &self.terms {
            for (&(n2, k2), b) in &other.terms {
                out.add_term(n1 + n2, k1 + k2, a * b);
            }
        }
        out
    }

    pub fn derivative(&self) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (&(n, k), a) in &self.terms {
            if n > 0 {
                out.add_term(n - 1, k, a.scale_int(n as i64));
            }
            if k != 0 {
                out.add_term(n, k, a.scale_int(k).mul_i());
            }
        }
        out
    }

    /// An antiderivative with no constant term added.
    ///
    /// For `k != 0` this unrolls `∫ t^n e^{ikt} = t^n e^{ikt}/(ik) - n/(ik) ∫ t^{n-1} e^{ikt}`.
    pub fn primitive(&self) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (&(n, k), a) in &self.terms {
            if k == 0 {
                out.add_term(n + 1, 0, a.scale_ratio(1, n as i64 + 1));
                continue;
            }
            // 1/(ik) = -i/k
            let mut coeff = a.mul_i().scale_ratio(-1, k);
            let mut m = n;
            loop {
                out.add_term(m, k, coeff.clone());
                if m == 0 {
                    break;
                }
                // next coefficient picks up -m/(ik) = i m / k
                coeff = coeff.mul_i().scale_ratio(m as i64, k);
                m -= 1;
            }
        }
        out
    }

    pub fn eval(&self, t: &Scalar) -> Result<Scalar> {
        let kind = ScalarKind::unify_opt(self.kind(), Some(t.kind()))?.unwrap();
        let mut acc = Scalar::zero(kind);
        for (&(n, k), a) in &self.terms {
            let v = a.checked_mul(&t.pow(n))?.checked_mul(&Scalar::exp_i(k, t)?)?;
            acc = acc.checked_add(&v)?;
        }
        Ok(acc)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(Scalar::abs_f64).fold(0.0, f64::max)
    }

    fn approx_eq(&self, other: &ExpPoly, tol: f64) -> bool {
        self.add(&other.neg()).max_abs_coeff() <= tol
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (&(n, k), a)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{a}")?;
            match n {
                0 => {}
                1 => write!(f, "·t")?,
                _ => write!(f, "·t^{n}")?,
            }
            if k != 0 {
                write!(f, "·e^({k}it)")?;
            }
        }
        Ok(())
    }
}

/// Piecewise function on `[breaks[0], breaks[last]]`.
///
/// Invariant: breakpoints strictly increase, `pieces.len() + 1 == breaks.len()`,
/// and no two adjacent pieces are equal (they are merged on construction).
#[derive(Clone, Debug, PartialEq)]
pub struct Func1D {
    breaks: Vec<Scalar>,
    pieces: Vec<ExpPoly>,
}

impl Func1D {
    pub fn new(breaks: Vec<Scalar>, pieces: Vec<ExpPoly>) -> Result<Func1D> {
        if breaks.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(Error::DomainMismatch(format!(
                "{} breakpoints for {} pieces",
                breaks.len(),
                pieces.len()
            )));
        }
        let mut kind = None;
        for b in &breaks {
            if !b.is_real() {
                return Err(Error::NotReal);
            }
            kind = ScalarKind::unify_opt(kind, Some(b.kind()))?;
        }
        for w in breaks.windows(2) {
            if w[0].real_cmp(&w[1])? != Ordering::Less {
                return Err(Error::DomainMismatch(format!(
                    "breakpoints not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        for p in &pieces {
            ScalarKind::unify_opt(kind, p.kind())?;
        }
        Ok(Func1D { breaks, pieces }.merged())
    }

    pub fn from_piece(lo: Scalar, hi: Scalar, piece: ExpPoly) -> Result<Func1D> {
        Func1D::new(vec![lo, hi], vec![piece])
    }

    pub fn zero(lo: Scalar, hi: Scalar) -> Func1D {
        Func1D {
            breaks: vec![lo, hi],
            pieces: vec![ExpPoly::zero()],
        }
    }

    pub fn constant(lo: Scalar, hi: Scalar, c: Scalar) -> Result<Func1D> {
        Func1D::from_piece(lo, hi, ExpPoly::term(c, 0, 0))
    }

    /// `coeff · t^n e^{ikt}` on a single piece.
    pub fn monomial(lo: Scalar, hi: Scalar, coeff: Scalar, n: u32, k: i64) -> Result<Func1D> {
        Func1D::from_piece(lo, hi, ExpPoly::term(coeff, n, k))
    }

    /// Ordinary polynomial `Σ c_n t^n` on a single piece.
    pub fn polynomial(lo: Scalar, hi: Scalar, coeffs: &[Scalar]) -> Result<Func1D> {
        let mut p = ExpPoly::zero();
        for (n, c) in coeffs.iter().enumerate() {
            p.add_term(n as u32, 0, c.clone());
        }
        Func1D::from_piece(lo, hi, p)
    }

    pub fn breaks(&self) -> &[Scalar] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[ExpPoly] {
        &self.pieces
    }

    pub fn lo(&self) -> &Scalar {
        &self.breaks[0]
    }

    pub fn hi(&self) -> &Scalar {
        self.breaks.last().unwrap()
    }

    /// Kind of the breakpoints joined with every coefficient.
    pub fn kind(&self) -> ScalarKind {
        let mut kind = Some(self.breaks[0].kind());
        for p in &self.pieces {
            kind = ScalarKind::unify_opt(kind, p.kind()).unwrap_or(kind);
        }
        kind.unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(ExpPoly::is_zero)
    }

    pub fn zero_like(&self) -> Func1D {
        Func1D::zero(self.lo().clone(), self.hi().clone())
    }

    fn merged(mut self) -> Func1D {
        let mut breaks = vec![self.breaks[0].clone()];
        let mut pieces: Vec<ExpPoly> = Vec::with_capacity(self.pieces.len());
        for (i, p) in self.pieces.drain(..).enumerate() {
            if pieces.last() == Some(&p) {
                *breaks.last_mut().unwrap() = self.breaks[i + 1].clone();
            } else {
                pieces.push(p);
                breaks.push(self.breaks[i + 1].clone());
            }
        }
        Func1D { breaks, pieces }
    }

    fn check_compatible(&self, other: &Func1D) -> Result<()> {
        if self.lo() != other.lo() || self.hi() != other.hi() {
            return Err(Error::DomainMismatch(format!(
                "[{}, {}] vs [{}, {}]",
                self.lo(),
                self.hi(),
                other.lo(),
                other.hi()
            )));
        }
        self.kind().unify(other.kind())?;
        Ok(())
    }

    /// Apply `op` piecewise over the common refinement of both partitions.
    fn zip_with(&self, other: &Func1D, op: impl Fn(&ExpPoly, &ExpPoly) -> ExpPoly) -> Result<Func1D> {
        self.check_compatible(other)?;
        let mut breaks = vec![self.lo().clone()];
        let mut pieces = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.pieces.len() && j < other.pieces.len() {
            let a_hi = &self.breaks[i + 1];
            let b_hi = &other.breaks[j + 1];
            pieces.push(op(&self.pieces[i], &other.pieces[j]));
            match a_hi.real_cmp(b_hi)? {
                Ordering::Less => {
                    breaks.push(a_hi.clone());
                    i += 1;
                }
                Ordering::Greater => {
                    breaks.push(b_hi.clone());
                    j += 1;
                }
                Ordering::Equal => {
                    breaks.push(a_hi.clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(Func1D { breaks, pieces }.merged())
    }

    pub fn add(&self, other: &Func1D) -> Result<Func1D> {
        self.zip_with(other, ExpPoly::add)
    }

    pub fn sub(&self, other: &Func1D) -> Result<Func1D> {
        self.zip_with(other, |a, b| a.add(&b.neg()))
    }

    pub fn mul(&self, other: &Func1D) -> Result<Func1D> {
        self.zip_with(other, ExpPoly::mul)
    }

    pub fn scale(&self, s: &Scalar) -> Result<Func1D> {
        self.kind().unify(s.kind())?;
        Ok(Func1D {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(|p| p.scale(s)).collect(),
        }
        .merged())
    }

    pub fn neg(&self) -> Func1D {
        Func1D {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(ExpPoly::neg).collect(),
        }
    }

    pub fn derivative(&self) -> Func1D {
        Func1D {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(ExpPoly::derivative).collect(),
        }
        .merged()
    }

    fn locate(&self, t: &Scalar) -> Result<Location> {
        if t.real_cmp(self.lo())? == Ordering::Less || t.real_cmp(self.hi())? == Ordering::Greater {
            return Err(Error::OutOfDomain(t.to_string()));
        }
        for (p, b) in self.breaks.iter().enumerate().skip(1) {
            match t.real_cmp(b)? {
                Ordering::Less => return Ok(Location::Inside(p - 1)),
                Ordering::Equal if p == self.pieces.len() => return Ok(Location::Inside(p - 1)),
                Ordering::Equal => return Ok(Location::Break(p)),
                Ordering::Greater => {}
            }
        }
        unreachable!("point within domain must be located")
    }

    /// Evaluate at `t`; at interior breakpoints the convention decides.
    pub fn evaluate(&self, t: &Scalar, conv: BreakConvention) -> Result<Scalar> {
        match self.locate(t)? {
            Location::Inside(p) => self.pieces[p].eval(t),
            Location::Break(b) => {
                let left = self.pieces[b - 1].eval(t)?;
                let right = self.pieces[b].eval(t)?;
                match conv {
                    BreakConvention::Left => Ok(left),
                    BreakConvention::Right => Ok(right),
                    BreakConvention::Average => Ok((left + right).scale_ratio(1, 2)),
                    BreakConvention::RequireContinuous => {
                        let tol = 1e-10 * left.abs_f64().max(right.abs_f64()).max(1.0);
                        if left.approx_eq(&right, tol) {
                            Ok(left)
                        } else {
                            Err(Error::Discontinuous(t.to_string()))
                        }
                    }
                }
            }
        }
    }

    /// Continuous antiderivative `F` with `F' = f` and `F(base) = 0`.
    pub fn antiderivative(&self, base: &Scalar) -> Result<Func1D> {
        let prims: Vec<ExpPoly> = self.pieces.iter().map(ExpPoly::primitive).collect();
        let kind = self.kind().unify(base.kind())?;
        let start = match self.locate(base)? {
            Location::Inside(p) => p,
            Location::Break(b) => b,
        };
        let mut consts = vec![Scalar::zero(kind); prims.len()];
        consts[start] = -prims[start].eval(base)?;
        for p in start + 1..prims.len() {
            let b = &self.breaks[p];
            consts[p] = prims[p - 1].eval(b)? + &consts[p - 1] - prims[p].eval(b)?;
        }
        for p in (0..start).rev() {
            let b = &self.breaks[p + 1];
            consts[p] = prims[p + 1].eval(b)? + &consts[p + 1] - prims[p].eval(b)?;
        }
        let pieces = prims
            .into_iter()
            .zip(consts)
            .map(|(mut q, c)| {
                q.add_term(0, 0, c);
                q
            })
            .collect();
        Ok(Func1D {
            breaks: self.breaks.clone(),
            pieces,
        }
        .merged())
    }

    /// Oriented integral `∫_a^b f dt`. A zero-length region gives zero.
    pub fn integrate(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        let kind = self.kind().unify(a.kind())?.unify(b.kind())?;
        let (lo, hi, sign) = match a.real_cmp(b)? {
            Ordering::Equal => {
                log::debug!("degenerate integration region [{a}, {b}]");
                return Ok(Scalar::zero(kind));
            }
            Ordering::Less => (a, b, 1),
            Ordering::Greater => (b, a, -1),
        };
        if lo.real_cmp(self.lo())? == Ordering::Less || hi.real_cmp(self.hi())? == Ordering::Greater {
            return Err(Error::OutOfDomain(format!("[{lo}, {hi}]")));
        }
        let mut acc = Scalar::zero(kind);
        for (p, piece) in self.pieces.iter().enumerate() {
            let (pl, ph) = (&self.breaks[p], &self.breaks[p + 1]);
            let from = if pl.real_cmp(lo)? == Ordering::Less { lo } else { pl };
            let to = if ph.real_cmp(hi)? == Ordering::Greater { hi } else { ph };
            if from.real_cmp(to)? != Ordering::Less {
                continue;
            }
            let prim = piece.primitive();
            acc = acc + prim.eval(to)? - prim.eval(from)?;
        }
        Ok(acc.scale_int(sign))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.pieces.iter().map(ExpPoly::max_abs_coeff).fold(0.0, f64::max)
    }

    /// Equality up to `tol` in the coefficient sup-norm (exact for exact kinds
    /// when `tol == 0`).
    pub fn approx_eq(&self, other: &Func1D, tol: f64) -> bool {
        match self.sub(other) {
            Ok(d) => d.pieces.iter().all(|p| p.approx_eq(&ExpPoly::zero(), tol)),
            Err(_) => false,
        }
    }
}

enum Location {
    Inside(usize),
    Break(usize),
}

impl fmt::Display for Func1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.len() == 1 {
            return write!(f, "{}", self.pieces[0]);
        }
        write!(f, "{{")?;
        for (p, piece) in self.pieces.iter().enumerate() {
            if p > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} on [{}, {}]", piece, self.breaks[p], self.breaks[p + 1])?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    n: u32,
    k: i64,
    coeff: Scalar,
}

#[derive(Serialize, Deserialize)]
struct PieceRepr {
    lo: Scalar,
    hi: Scalar,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct Func1DRepr {
    pieces: Vec<PieceRepr>,
}

impl Serialize for Func1D {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(p, piece)| PieceRepr {
                lo: self.breaks[p].clone(),
                hi: self.breaks[p + 1].clone(),
                terms: piece
                    .terms()
                    .map(|(n, k, c)| TermRepr { n, k, coeff: c.clone() })
                    .collect(),
            })
            .collect();
        Func1DRepr { pieces }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Func1D {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Func1D, D::Error> {
        use serde::de::Error as _;
        let repr = Func1DRepr::deserialize(deserializer)?;
        let mut breaks = Vec::new();
        let mut pieces = Vec::new();
        for (p, piece) in repr.pieces.into_iter().enumerate() {
            if p == 0 {
                breaks.push(piece.lo);
            } else if breaks.last() != Some(&piece.lo) {
                return Err(D::Error::custom("pieces are not contiguous"));
            }
            breaks.push(piece.hi);
            let mut q = ExpPoly::zero();
            for t in piece.terms {
                q.add_term(t.n, t.k, t.coeff);
            }
            pieces.push(q);
        }
        Func1D::new(breaks, pieces).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> Scalar {
        Scalar::rat(p, r)
    }

    fn unit_poly(coeffs: &[Scalar]) -> Func1D {
        Func1D::polynomial(q(0, 1), q(1, 1), coeffs).unwrap()
    }

    #[test]
    fn t_times_t() {
        let t = Func1D::monomial(q(0, 1), q(1, 1), q(1, 1), 1, 0).unwrap();
        let t2 = Func1D::monomial(q(0, 1), q(1, 1), q(1, 1), 2, 0).unwrap();
        assert_eq!(t.mul(&t).unwrap(), t2);
    }

    #[test]
    fn exponentials_multiply() {
        let two_pi = Scalar::float(2.0 * std::f64::consts::PI, 0.0);
        let zero = Scalar::float(0.0, 0.0);
        let one = Scalar::float(1.0, 0.0);
        let e1 = Func1D::monomial(zero.clone(), two_pi.clone(), one.clone(), 0, 1).unwrap();
        let e2 = Func1D::monomial(zero.clone(), two_pi.clone(), one.clone(), 0, 2).unwrap();
        let e3 = Func1D::monomial(zero, two_pi, one, 0, 3).unwrap();
        assert_eq!(e1.mul(&e2).unwrap(), e3);
    }

    #[test]
    fn product_rule_with_exponential() {
        // d/dt t^2 e^{it} = (2t + i t^2) e^{it}
        let f = Func1D::monomial(q(0, 1), q(1, 1), q(1, 1), 2, 1).unwrap();
        let mut expect = ExpPoly::term(q(2, 1), 1, 1);
        expect.add_term(2, 1, Scalar::i(ScalarKind::Rational));
        assert_eq!(f.derivative().pieces()[0], expect);
    }

    #[test]
    fn piecewise_derivative_keeps_breakpoints() {
        let half = q(1, 2);
        let f = Func1D::new(
            vec![q(0, 1), half.clone(), q(1, 1)],
            vec![ExpPoly::term(q(1, 1), 1, 0), {
                let mut p = ExpPoly::term(q(1, 1), 0, 0);
                p.add_term(1, 0, q(-1, 1));
                p
            }],
        )
        .unwrap();
        let d = f.derivative();
        assert_eq!(d.breaks(), &[q(0, 1), half, q(1, 1)]);
        assert_eq!(d.pieces()[0], ExpPoly::term(q(1, 1), 0, 0));
        assert_eq!(d.pieces()[1], ExpPoly::term(q(-1, 1), 0, 0));
    }

    #[test]
    fn antiderivative_examples() {
        let t = unit_poly(&[q(0, 1), q(1, 1)]);
        assert_eq!(t.antiderivative(&q(0, 1)).unwrap(), unit_poly(&[q(0, 1), q(0, 1), q(1, 2)]));

        // step {1 on [0,1/2], 0 on [1/2,1]} integrates to {t, 1/2}
        let step = Func1D::new(
            vec![q(0, 1), q(1, 2), q(1, 1)],
            vec![ExpPoly::term(q(1, 1), 0, 0), ExpPoly::zero()],
        )
        .unwrap();
        let f = step.antiderivative(&q(0, 1)).unwrap();
        assert_eq!(f.pieces()[0], ExpPoly::term(q(1, 1), 1, 0));
        assert_eq!(f.pieces()[1], ExpPoly::term(q(1, 2), 0, 0));
    }

    #[test]
    fn antiderivative_of_exponential() {
        // e^{3it} with base 0 -> (e^{3it} - 1)/(3i)
        let k = 3;
        let f = Func1D::monomial(Scalar::float(0.0, 0.0), Scalar::float(6.3, 0.0), Scalar::float(1.0, 0.0), 0, k)
            .unwrap();
        let big_f = f.antiderivative(&Scalar::float(0.0, 0.0)).unwrap();
        let inv_ik = Scalar::float(0.0, -1.0 / k as f64);
        let mut expect = ExpPoly::term(inv_ik.clone(), 0, k);
        expect.add_term(0, 0, -inv_ik);
        assert!(big_f.pieces()[0].approx_eq(&expect, 1e-15));
    }

    #[test]
    fn breakpoint_conventions() {
        let f = Func1D::new(
            vec![q(0, 1), q(1, 2), q(1, 1)],
            vec![ExpPoly::term(q(1, 1), 0, 0), ExpPoly::term(q(-1, 1), 0, 0)],
        )
        .unwrap();
        let h = q(1, 2);
        assert_eq!(f.evaluate(&h, BreakConvention::Left).unwrap(), q(1, 1));
        assert_eq!(f.evaluate(&h, BreakConvention::Right).unwrap(), q(-1, 1));
        assert_eq!(f.evaluate(&h, BreakConvention::Average).unwrap(), q(0, 1));
        assert!(matches!(
            f.evaluate(&h, BreakConvention::RequireContinuous),
            Err(Error::Discontinuous(_))
        ));
        assert_eq!(f.evaluate(&q(1, 1), BreakConvention::RequireContinuous).unwrap(), q(-1, 1));
    }

    #[test]
    fn mixed_kinds_rejected() {
        let a = unit_poly(&[q(1, 1)]);
        let b = Func1D::constant(Scalar::float(0.0, 0.0), Scalar::float(1.0, 0.0), Scalar::float(1.0, 0.0)).unwrap();
        assert!(a.add(&b).is_err());
        let c = Func1D::polynomial(q(0, 1), q(2, 1), &[q(1, 1)]).unwrap();
        assert!(matches!(a.add(&c), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn periodic_integrals() {
        let tau = 2.0 * std::f64::consts::PI;
        let lo = Scalar::float(0.0, 0.0);
        let hi = Scalar::float(tau, 0.0);
        for k in -3..=3 {
            let f = Func1D::monomial(lo.clone(), hi.clone(), Scalar::float(1.0, 0.0), 0, k).unwrap();
            let v = f.integrate(&lo, &hi).unwrap();
            let expect = if k == 0 { tau } else { 0.0 };
            assert!(v.approx_eq(&Scalar::float(expect, 0.0), 1e-12), "k={k}: {v}");
        }
    }
}
