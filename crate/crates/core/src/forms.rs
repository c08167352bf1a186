//! Differential forms, chains, vector fields, and the Cartan calculus on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcalg::{Axis, BreakConvention, Func1D, Func2D, FuncExpr, Point, Scalar, ScalarKind};

/// A differential form on the interval/circle (`Line`) or on the square.
#[derive(Clone, Debug, PartialEq)]
pub enum Form {
    /// Degree 0 (`coeff`) or degree 1 (`coeff dt`).
    Line { degree: u8, coeff: Func1D },
    Plane0(Func2D),
    /// `dx · dx-coefficient + dy · dy-coefficient`.
    Plane1 { dx: Func2D, dy: Func2D },
    /// Coefficient of `dx∧dy`.
    Plane2(Func2D),
    /// Canonical zero one degree above the top, from `d` of a top form.
    TopZero { dim: u8 },
}

impl Form {
    pub fn line0(f: Func1D) -> Form {
        Form::Line { degree: 0, coeff: f }
    }

    pub fn line1(f: Func1D) -> Form {
        Form::Line { degree: 1, coeff: f }
    }

    pub fn degree(&self) -> u8 {
        match self {
            Form::Line { degree, .. } => *degree,
            Form::Plane0(_) => 0,
            Form::Plane1 { .. } => 1,
            Form::Plane2(_) => 2,
            Form::TopZero { dim } => dim + 1,
        }
    }

    pub fn dim(&self) -> u8 {
        match self {
            Form::Line { .. } => 1,
            Form::TopZero { dim } => *dim,
            _ => 2,
        }
    }

    pub fn is_top_zero(&self) -> bool {
        matches!(self, Form::TopZero { .. })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Form::Line { coeff, .. } => coeff.is_zero(),
            Form::Plane0(f) | Form::Plane2(f) => f.is_zero(),
            Form::Plane1 { dx, dy } => dx.is_zero() && dy.is_zero(),
            Form::TopZero { .. } => true,
        }
    }

    /// Coefficient functions in a fixed order (`dt`; or `dx`, `dy`).
    pub fn components(&self) -> Vec<FuncExpr> {
        match self {
            Form::Line { coeff, .. } => vec![FuncExpr::Line(coeff.clone())],
            Form::Plane0(f) | Form::Plane2(f) => vec![FuncExpr::Plane(f.clone())],
            Form::Plane1 { dx, dy } => vec![FuncExpr::Plane(dx.clone()), FuncExpr::Plane(dy.clone())],
            Form::TopZero { .. } => vec![],
        }
    }

    /// The zero form of the same degree and domain.
    pub fn zero_like(&self) -> Form {
        self.zero_of_degree(self.degree())
    }

    /// The zero form of `degree` on the same domain.
    pub fn zero_of_degree(&self, degree: u8) -> Form {
        match self {
            Form::Line { coeff, .. } if degree <= 1 => Form::Line {
                degree,
                coeff: coeff.zero_like(),
            },
            Form::Line { .. } => Form::TopZero { dim: 1 },
            _ => match degree {
                0 => Form::Plane0(Func2D::zero()),
                1 => Form::Plane1 {
                    dx: Func2D::zero(),
                    dy: Func2D::zero(),
                },
                2 => Form::Plane2(Func2D::zero()),
                _ => Form::TopZero { dim: 2 },
            },
        }
    }

    fn check_same_degree(&self, other: &Form) -> Result<()> {
        if self.degree() != other.degree() || self.dim() != other.dim() {
            return Err(Error::DegreeMismatch(format!(
                "{}-form on {}D vs {}-form on {}D",
                self.degree(),
                self.dim(),
                other.degree(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.check_same_degree(other)?;
        Ok(match (self, other) {
            (Form::Line { degree, coeff: a }, Form::Line { coeff: b, .. }) => Form::Line {
                degree: *degree,
                coeff: a.add(b)?,
            },
            (Form::Plane0(a), Form::Plane0(b)) => Form::Plane0(a.add(b)?),
            (Form::Plane1 { dx: a, dy: b }, Form::Plane1 { dx: c, dy: d }) => Form::Plane1 {
                dx: a.add(c)?,
                dy: b.add(d)?,
            },
            (Form::Plane2(a), Form::Plane2(b)) => Form::Plane2(a.add(b)?),
            (Form::TopZero { dim }, Form::TopZero { .. }) => Form::TopZero { dim: *dim },
            _ => unreachable!("degrees checked"),
        })
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        match self {
            Form::Line { degree, coeff } => Form::Line {
                degree: *degree,
                coeff: coeff.neg(),
            },
            Form::Plane0(f) => Form::Plane0(f.neg()),
            Form::Plane1 { dx, dy } => Form::Plane1 {
                dx: dx.neg(),
                dy: dy.neg(),
            },
            Form::Plane2(f) => Form::Plane2(f.neg()),
            Form::TopZero { dim } => Form::TopZero { dim: *dim },
        }
    }

    pub fn scale(&self, s: &Scalar) -> Result<Form> {
        Ok(match self {
            Form::Line { degree, coeff } => Form::Line {
                degree: *degree,
                coeff: coeff.scale(s)?,
            },
            Form::Plane0(f) => Form::Plane0(f.scale(s)?),
            Form::Plane1 { dx, dy } => Form::Plane1 {
                dx: dx.scale(s)?,
                dy: dy.scale(s)?,
            },
            Form::Plane2(f) => Form::Plane2(f.scale(s)?),
            Form::TopZero { dim } => Form::TopZero { dim: *dim },
        })
    }

    /// Multiply every coefficient by a function of the same domain.
    pub fn mul_func(&self, g: &FuncExpr) -> Result<Form> {
        Ok(match (self, g) {
            (Form::Line { degree, coeff }, FuncExpr::Line(g)) => Form::Line {
                degree: *degree,
                coeff: coeff.mul(g)?,
            },
            (Form::Plane0(f), FuncExpr::Plane(g)) => Form::Plane0(f.mul(g)?),
            (Form::Plane1 { dx, dy }, FuncExpr::Plane(g)) => Form::Plane1 {
                dx: dx.mul(g)?,
                dy: dy.mul(g)?,
            },
            (Form::Plane2(f), FuncExpr::Plane(g)) => Form::Plane2(f.mul(g)?),
            (Form::TopZero { dim }, _) => Form::TopZero { dim: *dim },
            _ => return Err(Error::DomainMismatch("form and function live on different domains".into())),
        })
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.components().iter().map(FuncExpr::max_abs_coeff).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Form, tol: f64) -> bool {
        self.degree() == other.degree()
            && self.dim() == other.dim()
            && self
                .components()
                .iter()
                .zip(other.components().iter())
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Line { degree: 0, coeff } => write!(f, "{coeff}"),
            Form::Line { coeff, .. } => write!(f, "({coeff}) dt"),
            Form::Plane0(g) => write!(f, "{g}"),
            Form::Plane1 { dx, dy } => write!(f, "({dx}) dx + ({dy}) dy"),
            Form::Plane2(g) => write!(f, "({g}) dx∧dy"),
            Form::TopZero { dim } => write!(f, "0 [degree {}]", dim + 1),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    degree: u8,
    components: Vec<FuncExpr>,
}

impl Serialize for Form {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FormRepr {
            degree: self.degree(),
            components: self.components(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Form {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Form, D::Error> {
        use serde::de::Error as _;
        let repr = FormRepr::deserialize(deserializer)?;
        let mut comps = repr.components.into_iter();
        let form = match (repr.degree, comps.next(), comps.next()) {
            (d @ (0 | 1), Some(FuncExpr::Line(f)), None) => Form::Line { degree: d, coeff: f },
            (0, Some(FuncExpr::Plane(f)), None) => Form::Plane0(f),
            (1, Some(FuncExpr::Plane(dx)), Some(FuncExpr::Plane(dy))) => Form::Plane1 { dx, dy },
            (2, Some(FuncExpr::Plane(f)), None) => Form::Plane2(f),
            (d @ (2 | 3), None, None) => Form::TopZero { dim: d - 1 },
            _ => return Err(D::Error::custom("inconsistent form degree and components")),
        };
        Ok(form)
    }
}

/// Chains of the triangulations: vertices, straight oriented edges, the unit face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Chain {
    Point(Point),
    Edge { from: Point, to: Point },
    /// `[0,1]²` with the standard orientation.
    Face,
}

impl Chain {
    pub fn dimension(&self) -> u8 {
        match self {
            Chain::Point(_) => 0,
            Chain::Edge { .. } => 1,
            Chain::Face => 2,
        }
    }

    /// Signed boundary. Points have empty boundary.
    pub(crate) fn boundary(&self) -> Vec<(i64, Chain)> {
        match self {
            Chain::Point(_) => vec![],
            Chain::Edge { from, to } => vec![(1, Chain::Point(to.clone())), (-1, Chain::Point(from.clone()))],
            Chain::Face => {
                let p = |x: i64, y: i64| Point::Plane(Scalar::int(x), Scalar::int(y));
                let corners = [p(0, 0), p(1, 0), p(1, 1), p(0, 1)];
                (0..4)
                    .map(|i| {
                        (
                            1,
                            Chain::Edge {
                                from: corners[i].clone(),
                                to: corners[(i + 1) % 4].clone(),
                            },
                        )
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chain::Point(p) => write!(f, "[{p}]"),
            Chain::Edge { from, to } => write!(f, "[{from} -> {to}]"),
            Chain::Face => write!(f, "[0,1]²"),
        }
    }
}

/// `ν(t) d/dt` on a line or `ν^x ∂_x + ν^y ∂_y` on the square.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum VectorField {
    Line(Func1D),
    Plane { x: Func2D, y: Func2D },
}

impl VectorField {
    /// Directional derivative `v(f)`.
    pub fn apply(&self, f: &FuncExpr) -> Result<FuncExpr> {
        match (self, f) {
            (VectorField::Line(nu), FuncExpr::Line(g)) => Ok(FuncExpr::Line(nu.mul(&g.derivative())?)),
            (VectorField::Plane { x, y }, FuncExpr::Plane(g)) => {
                Ok(FuncExpr::Plane(x.mul(&g.partial(Axis::X))?.add(&y.mul(&g.partial(Axis::Y))?)?))
            }
            _ => Err(Error::DomainMismatch("vector field and function on different domains".into())),
        }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        match (self, other) {
            (VectorField::Line(a), VectorField::Line(b)) => Ok(VectorField::Line(a.add(b)?)),
            (VectorField::Plane { x: a, y: b }, VectorField::Plane { x: c, y: d }) => Ok(VectorField::Plane {
                x: a.add(c)?,
                y: b.add(d)?,
            }),
            _ => Err(Error::DomainMismatch("vector fields on different domains".into())),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Result<VectorField> {
        match self {
            VectorField::Line(a) => Ok(VectorField::Line(a.scale(s)?)),
            VectorField::Plane { x, y } => Ok(VectorField::Plane {
                x: x.scale(s)?,
                y: y.scale(s)?,
            }),
        }
    }

    /// Multiply by a function: `(f v)`.
    pub fn mul_func(&self, f: &FuncExpr) -> Result<VectorField> {
        match (self, f) {
            (VectorField::Line(a), FuncExpr::Line(g)) => Ok(VectorField::Line(a.mul(g)?)),
            (VectorField::Plane { x, y }, FuncExpr::Plane(g)) => Ok(VectorField::Plane {
                x: x.mul(g)?,
                y: y.mul(g)?,
            }),
            _ => Err(Error::DomainMismatch("vector field and function on different domains".into())),
        }
    }

    pub fn components(&self) -> Vec<FuncExpr> {
        match self {
            VectorField::Line(a) => vec![FuncExpr::Line(a.clone())],
            VectorField::Plane { x, y } => vec![FuncExpr::Plane(x.clone()), FuncExpr::Plane(y.clone())],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(FuncExpr::is_zero)
    }

    /// Lie bracket `[v, w] = v(w^i) - w(v^i)` componentwise.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        match (self, other) {
            (VectorField::Line(v), VectorField::Line(w)) => {
                Ok(VectorField::Line(v.mul(&w.derivative())?.sub(&w.mul(&v.derivative())?)?))
            }
            (VectorField::Plane { .. }, VectorField::Plane { .. }) => {
                let comp = |a: &FuncExpr, b: &FuncExpr| -> Result<Func2D> {
                    match self.apply(b)?.sub(&other.apply(a)?)? {
                        FuncExpr::Plane(f) => Ok(f),
                        FuncExpr::Line(_) => unreachable!(),
                    }
                };
                let (vc, wc) = (self.components(), other.components());
                Ok(VectorField::Plane {
                    x: comp(&vc[0], &wc[0])?,
                    y: comp(&vc[1], &wc[1])?,
                })
            }
            _ => Err(Error::DomainMismatch("vector fields on different domains".into())),
        }
    }
}

fn func_of(form: &Form, f: FuncExpr) -> Form {
    match (form, f) {
        (Form::Line { .. }, FuncExpr::Line(g)) => Form::line0(g),
        (_, FuncExpr::Plane(g)) => Form::Plane0(g),
        _ => unreachable!(),
    }
}

/// `d`: raises degree by one; top-degree input gives the canonical `TopZero`.
pub fn exterior_derivative(omega: &Form) -> Result<Form> {
    Ok(match omega {
        Form::Line { degree: 0, coeff } => Form::line1(coeff.derivative()),
        Form::Line { .. } => Form::TopZero { dim: 1 },
        Form::Plane0(g) => Form::Plane1 {
            dx: g.partial(Axis::X),
            dy: g.partial(Axis::Y),
        },
        Form::Plane1 { dx, dy } => Form::Plane2(dy.partial(Axis::X).sub(&dx.partial(Axis::Y))?),
        Form::Plane2(_) | Form::TopZero { .. } => Form::TopZero { dim: omega.dim() },
    })
}

/// Contraction `i_v ω`; lowers degree by one. `i_v(dx∧dy) = ν^x dy - ν^y dx`.
pub fn interior_product(v: &VectorField, omega: &Form) -> Result<Form> {
    match (v, omega) {
        (_, f) if f.degree() == 0 => Err(Error::DegreeMismatch("interior product of a 0-form".into())),
        (VectorField::Line(nu), Form::Line { coeff, .. }) => Ok(Form::line0(nu.mul(coeff)?)),
        (VectorField::Plane { x, y }, Form::Plane1 { dx, dy }) => Ok(Form::Plane0(x.mul(dx)?.add(&y.mul(dy)?)?)),
        (VectorField::Plane { x, y }, Form::Plane2(e)) => Ok(Form::Plane1 {
            dx: y.mul(e)?.neg(),
            dy: x.mul(e)?,
        }),
        (VectorField::Line(_), Form::TopZero { dim: 1 }) => {
            Err(Error::DegreeMismatch("interior product of the top-degree zero marker".into()))
        }
        (VectorField::Plane { .. }, Form::TopZero { dim: 2 }) => Ok(Form::Plane2(Func2D::zero())),
        _ => Err(Error::DomainMismatch("vector field and form on different domains".into())),
    }
}

/// Lie derivative via Cartan's formula `L_v = d i_v + i_v d`.
pub fn lie_derivative(v: &VectorField, omega: &Form) -> Result<Form> {
    if omega.is_top_zero() {
        return Ok(omega.clone());
    }
    if omega.degree() == 0 {
        let f = &omega.components()[0];
        return Ok(func_of(omega, v.apply(f)?));
    }
    let d_i = exterior_derivative(&interior_product(v, omega)?)?;
    let d_omega = exterior_derivative(omega)?;
    if d_omega.is_top_zero() {
        return Ok(d_i);
    }
    d_i.add(&interior_product(v, &d_omega)?)
}

/// Integration pairing `⟨z, ω⟩`; requires `deg ω = dim z`.
pub fn pair(z: &Chain, omega: &Form, conv: BreakConvention) -> Result<Scalar> {
    if z.dimension() != omega.degree() {
        return Err(Error::DegreeMismatch(format!(
            "{}-chain paired with a {}-form",
            z.dimension(),
            omega.degree()
        )));
    }
    match (z, omega) {
        (Chain::Point(p), _) => omega.components()[0].evaluate(p, conv),
        (Chain::Edge { from: Point::Line(a), to: Point::Line(b) }, Form::Line { coeff, .. }) => coeff.integrate(a, b),
        (Chain::Edge { from: Point::Plane(x0, y0), to: Point::Plane(x1, y1) }, Form::Plane1 { dx, dy }) => {
            let from = (x0, y0);
            let to = (x1, y1);
            let jx = x1.checked_sub(x0)?;
            let jy = y1.checked_sub(y0)?;
            let pulled = dx
                .along_segment(from, to)?
                .scale(&jx)?
                .add(&dy.along_segment(from, to)?.scale(&jy)?)?;
            let kind = jx.kind();
            pulled.integrate(&Scalar::zero(kind), &Scalar::one(kind))
        }
        (Chain::Face, Form::Plane2(e)) => Ok(e.integrate_unit_square(e.kind().unwrap_or(ScalarKind::Rational))),
        _ => Err(Error::DomainMismatch(format!("cannot pair {z} with {omega}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[(u32, u32, i64)]) -> Func2D {
        Func2D::from_terms(terms.iter().map(|&(n, m, c)| (n, m, Scalar::int(c)))).unwrap()
    }

    fn unit_line(coeffs: &[i64]) -> Func1D {
        let cs: Vec<Scalar> = coeffs.iter().map(|&c| Scalar::int(c)).collect();
        Func1D::polynomial(Scalar::int(0), Scalar::int(1), &cs).unwrap()
    }

    fn q2(x: i64, y: i64) -> Point {
        Point::Plane(Scalar::int(x), Scalar::int(y))
    }

    #[test]
    fn d_of_xy() {
        let d = exterior_derivative(&Form::Plane0(poly(&[(1, 1, 1)]))).unwrap();
        assert_eq!(
            d,
            Form::Plane1 {
                dx: poly(&[(0, 1, 1)]),
                dy: poly(&[(1, 0, 1)])
            }
        );
    }

    #[test]
    fn d_of_beta0_is_area_form() {
        let beta0 = Form::Plane1 {
            dx: poly(&[(0, 0, 1), (0, 1, -1)]),
            dy: Func2D::zero(),
        };
        assert_eq!(exterior_derivative(&beta0).unwrap(), Form::Plane2(poly(&[(0, 0, 1)])));
    }

    #[test]
    fn d_of_top_is_marker() {
        let g = Form::Plane2(poly(&[(0, 0, 1)]));
        assert!(exterior_derivative(&g).unwrap().is_top_zero());
        assert_eq!(exterior_derivative(&g).unwrap().degree(), 3);
    }

    #[test]
    fn contractions() {
        let dx_field = VectorField::Plane {
            x: poly(&[(0, 0, 1)]),
            y: Func2D::zero(),
        };
        let area = Form::Plane2(poly(&[(0, 0, 1)]));
        assert_eq!(
            interior_product(&dx_field, &area).unwrap(),
            Form::Plane1 {
                dx: Func2D::zero(),
                dy: poly(&[(0, 0, 1)])
            }
        );
        let t_ddt = VectorField::Line(unit_line(&[0, 1]));
        let dt = Form::line1(unit_line(&[1]));
        assert_eq!(interior_product(&t_ddt, &dt).unwrap(), Form::line0(unit_line(&[0, 1])));
        assert!(interior_product(&t_ddt, &Form::line0(unit_line(&[1]))).is_err());
    }

    #[test]
    fn lie_derivative_examples() {
        let t_ddt = VectorField::Line(unit_line(&[0, 1]));
        let t = Form::line0(unit_line(&[0, 1]));
        assert_eq!(lie_derivative(&t_ddt, &t).unwrap(), t);

        // L_v(dx∧dy) = div(v) dx∧dy
        let v = VectorField::Plane {
            x: poly(&[(2, 0, 1), (0, 1, 3)]),
            y: poly(&[(1, 1, 1)]),
        };
        let area = Form::Plane2(poly(&[(0, 0, 1)]));
        assert_eq!(lie_derivative(&v, &area).unwrap(), Form::Plane2(poly(&[(1, 0, 3)])));
    }

    #[test]
    fn pairings() {
        let area = Form::Plane2(poly(&[(0, 0, 1)]));
        assert_eq!(pair(&Chain::Face, &area, BreakConvention::default()).unwrap(), Scalar::int(1));
        let x_dy = Form::Plane1 {
            dx: Func2D::zero(),
            dy: poly(&[(1, 0, 1)]),
        };
        let edge = Chain::Edge { from: q2(1, 0), to: q2(1, 1) };
        assert_eq!(pair(&edge, &x_dy, BreakConvention::default()).unwrap(), Scalar::int(1));
        let reversed = Chain::Edge { from: q2(1, 1), to: q2(1, 0) };
        assert_eq!(pair(&reversed, &x_dy, BreakConvention::default()).unwrap(), Scalar::int(-1));
        assert!(pair(&Chain::Face, &x_dy, BreakConvention::default()).is_err());
    }

    #[test]
    fn bracket_of_commuting_fields() {
        let x_dx = VectorField::Plane {
            x: poly(&[(1, 0, 1)]),
            y: Func2D::zero(),
        };
        let y_dy = VectorField::Plane {
            x: Func2D::zero(),
            y: poly(&[(0, 1, 1)]),
        };
        assert!(x_dx.bracket(&y_dy).unwrap().is_zero());
    }

    #[test]
    fn stokes_on_the_face() {
        let omega = Form::Plane1 {
            dx: poly(&[(1, 2, 3), (0, 1, -1)]),
            dy: poly(&[(3, 0, 2), (1, 1, 5)]),
        };
        let conv = BreakConvention::default();
        let lhs: Scalar = Chain::Face
            .boundary()
            .iter()
            .map(|(s, e)| pair(e, &omega, conv).unwrap().scale_int(*s))
            .fold(Scalar::int(0), |a, b| a + b);
        let rhs = pair(&Chain::Face, &exterior_derivative(&omega).unwrap(), conv).unwrap();
        assert_eq!(lhs, rhs);
    }
}
