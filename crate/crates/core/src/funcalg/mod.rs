//! Scalars and the closed function class that every form coefficient lives in.

pub mod line;
pub mod plane;
pub mod scalar;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use line::{ExpPoly, Func1D};
pub use plane::Func2D;
pub use scalar::{Scalar, ScalarKind};

use crate::error::{Error, Result};

/// Coordinate direction. `T` is the 1D coordinate; `X`, `Y` live on the square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    T,
    X,
    Y,
}

/// What to return when evaluating exactly at an interior breakpoint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BreakConvention {
    Left,
    Right,
    Average,
    #[default]
    RequireContinuous,
}

/// A point of the 1D or 2D domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Line(Scalar),
    Plane(Scalar, Scalar),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Line(t) => write!(f, "{t}"),
            Point::Plane(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

/// Integration regions.
#[derive(Clone, Debug)]
pub enum Region {
    /// Oriented `[from, to]` on the line.
    Interval(Scalar, Scalar),
    /// `[x0, x1] × [y0, y1]` in the plane.
    Rectangle { x: (Scalar, Scalar), y: (Scalar, Scalar) },
    /// `∫ f d(axis)` along the straight oriented segment `from -> to`.
    Edge { from: (Scalar, Scalar), to: (Scalar, Scalar), along: Axis },
}

/// A function of the closed class: 1D piecewise exp-polynomial or 2D polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FuncExpr {
    Line(Func1D),
    Plane(Func2D),
}

fn dim_mismatch() -> Error {
    Error::DomainMismatch("1D and 2D functions cannot be combined".into())
}

impl FuncExpr {
    pub fn add(&self, other: &FuncExpr) -> Result<FuncExpr> {
        match (self, other) {
            (FuncExpr::Line(a), FuncExpr::Line(b)) => a.add(b).map(FuncExpr::Line),
            (FuncExpr::Plane(a), FuncExpr::Plane(b)) => a.add(b).map(FuncExpr::Plane),
            _ => Err(dim_mismatch()),
        }
    }

    pub fn sub(&self, other: &FuncExpr) -> Result<FuncExpr> {
        match (self, other) {
            (FuncExpr::Line(a), FuncExpr::Line(b)) => a.sub(b).map(FuncExpr::Line),
            (FuncExpr::Plane(a), FuncExpr::Plane(b)) => a.sub(b).map(FuncExpr::Plane),
            _ => Err(dim_mismatch()),
        }
    }

    pub fn mul(&self, other: &FuncExpr) -> Result<FuncExpr> {
        match (self, other) {
            (FuncExpr::Line(a), FuncExpr::Line(b)) => a.mul(b).map(FuncExpr::Line),
            (FuncExpr::Plane(a), FuncExpr::Plane(b)) => a.mul(b).map(FuncExpr::Plane),
            _ => Err(dim_mismatch()),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Result<FuncExpr> {
        match self {
            FuncExpr::Line(a) => a.scale(s).map(FuncExpr::Line),
            FuncExpr::Plane(a) => a.scale(s).map(FuncExpr::Plane),
        }
    }

    pub fn neg(&self) -> FuncExpr {
        match self {
            FuncExpr::Line(a) => FuncExpr::Line(a.neg()),
            FuncExpr::Plane(a) => FuncExpr::Plane(a.neg()),
        }
    }

    pub fn zero_like(&self) -> FuncExpr {
        match self {
            FuncExpr::Line(a) => FuncExpr::Line(a.zero_like()),
            FuncExpr::Plane(_) => FuncExpr::Plane(Func2D::zero()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FuncExpr::Line(a) => a.is_zero(),
            FuncExpr::Plane(a) => a.is_zero(),
        }
    }

    pub fn differentiate(&self, axis: Axis) -> Result<FuncExpr> {
        match (self, axis) {
            (FuncExpr::Line(a), Axis::T) => Ok(FuncExpr::Line(a.derivative())),
            (FuncExpr::Plane(a), Axis::X | Axis::Y) => Ok(FuncExpr::Plane(a.partial(axis))),
            _ => Err(Error::DomainMismatch(format!("no {axis:?} axis on this domain"))),
        }
    }

    pub fn evaluate(&self, point: &Point, conv: BreakConvention) -> Result<Scalar> {
        match (self, point) {
            (FuncExpr::Line(f), Point::Line(t)) => f.evaluate(t, conv),
            (FuncExpr::Plane(f), Point::Plane(x, y)) => {
                for c in [x, y] {
                    let inside = c.real_cmp(&Scalar::zero(c.kind()))?.is_ge()
                        && c.real_cmp(&Scalar::one(c.kind()))?.is_le();
                    if !inside {
                        return Err(Error::OutOfDomain(point.to_string()));
                    }
                }
                f.evaluate(x, y)
            }
            _ => Err(dim_mismatch()),
        }
    }

    pub fn definite_integral(&self, region: &Region) -> Result<Scalar> {
        match (self, region) {
            (FuncExpr::Line(f), Region::Interval(a, b)) => f.integrate(a, b),
            (FuncExpr::Plane(f), Region::Rectangle { x, y }) => {
                let inner = f.antiderivative(Axis::X);
                let strip = inner.restrict(Axis::X, &x.1)?.sub(&inner.restrict(Axis::X, &x.0)?)?;
                let outer = strip.antiderivative(Axis::Y);
                let hi = outer.restrict(Axis::Y, &y.1)?;
                let lo = outer.restrict(Axis::Y, &y.0)?;
                let kind = x.0.kind();
                Ok(hi
                    .sub(&lo)?
                    .coeff(0, 0)
                    .cloned()
                    .unwrap_or_else(|| Scalar::zero(kind)))
            }
            (FuncExpr::Plane(f), Region::Edge { from, to, along }) => {
                let pulled = f.along_segment((&from.0, &from.1), (&to.0, &to.1))?;
                let jac = match along {
                    Axis::X => to.0.checked_sub(&from.0)?,
                    Axis::Y => to.1.checked_sub(&from.1)?,
                    Axis::T => return Err(dim_mismatch()),
                };
                let kind = jac.kind();
                pulled
                    .integrate(&Scalar::zero(kind), &Scalar::one(kind))?
                    .checked_mul(&jac)
            }
            _ => Err(dim_mismatch()),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        match self {
            FuncExpr::Line(a) => a.max_abs_coeff(),
            FuncExpr::Plane(a) => a.max_abs_coeff(),
        }
    }

    pub fn approx_eq(&self, other: &FuncExpr, tol: f64) -> bool {
        match (self, other) {
            (FuncExpr::Line(a), FuncExpr::Line(b)) => a.approx_eq(b, tol),
            (FuncExpr::Plane(a), FuncExpr::Plane(b)) => a.approx_eq(b, tol),
            _ => false,
        }
    }
}

impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuncExpr::Line(a) => write!(f, "{a}"),
            FuncExpr::Plane(a) => write!(f, "{a}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_integral_of_x_dy() {
        let x = FuncExpr::Plane(Func2D::monomial(Scalar::int(1), 1, 0));
        let region = Region::Edge {
            from: (Scalar::int(1), Scalar::int(0)),
            to: (Scalar::int(1), Scalar::int(1)),
            along: Axis::Y,
        };
        assert_eq!(x.definite_integral(&region).unwrap(), Scalar::int(1));
    }

    #[test]
    fn rectangle_integral() {
        let one = FuncExpr::Plane(Func2D::constant(Scalar::int(1)));
        let unit = Region::Rectangle {
            x: (Scalar::int(0), Scalar::int(1)),
            y: (Scalar::int(0), Scalar::int(1)),
        };
        assert_eq!(one.definite_integral(&unit).unwrap(), Scalar::int(1));
        let xy = FuncExpr::Plane(Func2D::monomial(Scalar::int(1), 1, 1));
        let quarter = Region::Rectangle {
            x: (Scalar::rat(1, 2), Scalar::int(1)),
            y: (Scalar::int(0), Scalar::rat(1, 2)),
        };
        // (3/8) * (1/8)
        assert_eq!(xy.definite_integral(&quarter).unwrap(), Scalar::rat(3, 64));
    }

    #[test]
    fn evaluate_points() {
        let xy = FuncExpr::Plane(Func2D::monomial(Scalar::int(1), 1, 1));
        let p = Point::Plane(Scalar::int(1), Scalar::int(1));
        assert_eq!(xy.evaluate(&p, BreakConvention::default()).unwrap(), Scalar::int(1));
        let outside = Point::Plane(Scalar::int(2), Scalar::int(0));
        assert!(xy.evaluate(&outside, BreakConvention::default()).is_err());
        let t = FuncExpr::Line(Func1D::monomial(Scalar::int(0), Scalar::int(1), Scalar::int(1), 1, 0).unwrap());
        let tj = Scalar::rat(2, 7);
        assert_eq!(t.evaluate(&Point::Line(tj.clone()), BreakConvention::default()).unwrap(), tj);
    }

    #[test]
    fn dimension_mismatch() {
        let a = FuncExpr::Plane(Func2D::constant(Scalar::int(1)));
        let b = FuncExpr::Line(Func1D::constant(Scalar::int(0), Scalar::int(1), Scalar::int(1)).unwrap());
        assert!(a.add(&b).is_err());
    }
}
