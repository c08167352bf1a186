use super::{BasisKind, CochainComplex, Geometry, HomotopyData};
use crate::error::Result;
use crate::forms::{Chain, Form};
use crate::funcalg::{Axis, BreakConvention, Func2D, Point, Scalar};

fn poly(terms: &[(u32, u32, i64)]) -> Func2D {
    let mut f = Func2D::zero();
    for &(n, m, c) in terms {
        f = f.add(&Func2D::monomial(Scalar::int(c), n, m)).expect("rational terms");
    }
    f
}

fn corner(x: i64, y: i64) -> Point {
    Point::Plane(Scalar::int(x), Scalar::int(y))
}

/// The unit square with its bilinear basis:
/// `α_0 = (1−x)(1−y)`, `α_1 = x(1−y)`, `α_2 = xy`, `α_3 = y(1−x)`;
/// `β_0 = (1−y)dx`, `β_1 = x dy`, `β_2 = −y dx`, `β_3 = −(1−x)dy`; `γ = dx∧dy`.
/// Edges run counterclockwise, so `β^2` and `β^3` are traversed in reverse.
pub fn build_square() -> CochainComplex {
    let zero = Func2D::zero;
    let alphas = [
        poly(&[(0, 0, 1), (1, 0, -1), (0, 1, -1), (1, 1, 1)]),
        poly(&[(1, 0, 1), (1, 1, -1)]),
        poly(&[(1, 1, 1)]),
        poly(&[(0, 1, 1), (1, 1, -1)]),
    ];
    let betas = [
        Form::Plane1 {
            dx: poly(&[(0, 0, 1), (0, 1, -1)]),
            dy: zero(),
        },
        Form::Plane1 {
            dx: zero(),
            dy: poly(&[(1, 0, 1)]),
        },
        Form::Plane1 {
            dx: poly(&[(0, 1, -1)]),
            dy: zero(),
        },
        Form::Plane1 {
            dx: zero(),
            dy: poly(&[(0, 0, -1), (1, 0, 1)]),
        },
    ];
    let corners = [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)];
    let mut chains: Vec<Chain> = corners.iter().cloned().map(Chain::Point).collect();
    chains.extend((0..4).map(|i| Chain::Edge {
        from: corners[i].clone(),
        to: corners[(i + 1) % 4].clone(),
    }));
    chains.push(Chain::Face);
    let cochains = alphas
        .into_iter()
        .map(Form::Plane0)
        .chain(betas)
        .chain([Form::Plane2(poly(&[(0, 0, 1)]))])
        .collect();
    CochainComplex::assemble(
        Geometry::Square,
        BasisKind::Bilinear,
        BreakConvention::default(),
        vec![],
        chains,
        cochains,
        HomotopyData::Square,
    )
    .expect("the square basis is dual and closed")
}

/// The operator `I` of the square.
///
/// On 2-forms `I(e dx∧dy) = ½(∫_0^x e) dy − ½(∫_0^y e) dx`. On 1-forms it is
/// the average of the integrals along the two axis-parallel staircase paths
/// from the origin to `(x, y)`. On 0-forms it is zero.
pub fn square_i(omega: &Form) -> Result<Form> {
    let half = Scalar::rat(1, 2);
    match omega {
        Form::Plane2(e) => Ok(Form::Plane1 {
            dx: e.antiderivative(Axis::Y).scale(&half)?.neg(),
            dy: e.antiderivative(Axis::X).scale(&half)?,
        }),
        Form::Plane1 { dx, dy } => {
            let zero = Scalar::int(0);
            let bottom = dx.restrict(Axis::Y, &zero)?.antiderivative(Axis::X);
            let up = dy.antiderivative(Axis::Y);
            let left = dy.restrict(Axis::X, &zero)?.antiderivative(Axis::Y);
            let across = dx.antiderivative(Axis::X);
            Ok(Form::Plane0(bottom.add(&up)?.add(&left)?.add(&across)?.scale(&half)?))
        }
        Form::Plane0(_) => Ok(Form::Plane0(Func2D::zero())),
        Form::TopZero { dim: 2 } => Ok(Form::Plane2(Func2D::zero())),
        other => Err(crate::error::Error::DomainMismatch(format!("I is defined on the square, got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::exterior_derivative;

    #[test]
    fn basis_facts() {
        let sq = build_square();
        assert_eq!(sq.cochain(2), &Form::Plane0(poly(&[(1, 1, 1)])));
        let gamma = sq.cochain(8).clone();
        for j in 4..8 {
            assert_eq!(exterior_derivative(sq.cochain(j)).unwrap(), gamma);
        }
        assert_eq!(sq.pair(6, sq.cochain(6)).unwrap(), Scalar::int(1));
    }

    #[test]
    fn operator_i() {
        let gamma = Form::Plane2(poly(&[(0, 0, 1)]));
        let half = Scalar::rat(1, 2);
        assert_eq!(
            square_i(&gamma).unwrap(),
            Form::Plane1 {
                dx: poly(&[(0, 1, -1)]).scale(&half).unwrap(),
                dy: poly(&[(1, 0, 1)]).scale(&half).unwrap(),
            }
        );
        let x_dy = Form::Plane1 {
            dx: Func2D::zero(),
            dy: poly(&[(1, 0, 1)]),
        };
        assert_eq!(
            square_i(&x_dy).unwrap(),
            Form::Plane0(poly(&[(1, 1, 1)]).scale(&half).unwrap())
        );
        assert!(square_i(&Form::Plane0(poly(&[(1, 0, 1)]))).unwrap().is_zero());
    }

    #[test]
    fn homotopy_kills_gamma_and_projects_area() {
        let sq = build_square();
        assert!(sq.homotopy(sq.cochain(8)).unwrap().is_zero());
        let e = Form::Plane2(poly(&[(1, 0, 1), (0, 1, 1)]));
        assert_eq!(sq.project(&e).unwrap(), sq.cochain(8).clone());
    }
}
