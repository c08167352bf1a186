use super::{BasisKind, CochainComplex, Geometry, HomotopyData};
use crate::error::{Error, Result};
use crate::forms::{exterior_derivative, Chain, Form};
use crate::funcalg::{BreakConvention, ExpPoly, Func1D, Point, Scalar, ScalarKind};

/// Interval `[0, 1]` with nodes `0 = t_0 < … < t_n = 1`.
///
/// `α_j` is the Lagrange interpolation polynomial (or the piecewise linear hat
/// for [`BasisKind::Pwlinear`]) and `β_j = d(Σ_{k>j} α_k)`.
pub fn build_interval(nodes: Vec<Scalar>, basis: BasisKind, convention: BreakConvention) -> Result<CochainComplex> {
    validate_nodes(&nodes)?;
    let lo = nodes[0].clone();
    let hi = nodes.last().unwrap().clone();
    let alphas = match basis {
        BasisKind::Lagrange => lagrange_basis(&nodes)?,
        BasisKind::Pwlinear => hat_basis(&nodes)?,
        other => return Err(Error::Config(format!("basis {other} is not available on the interval"))),
    };

    let mut betas = Vec::with_capacity(nodes.len() - 1);
    let mut tail = Func1D::zero(lo.clone(), hi.clone());
    for j in (0..nodes.len() - 1).rev() {
        tail = tail.add(&alphas[j + 1])?;
        betas.push(exterior_derivative(&Form::line0(tail.clone()))?);
    }
    betas.reverse();

    let zero = Scalar::zero(ScalarKind::Rational);
    let primitives = betas
        .iter()
        .map(|b| match b {
            Form::Line { coeff, .. } => coeff.antiderivative(&zero),
            _ => unreachable!(),
        })
        .collect::<Result<Vec<_>>>()?;

    let mut chains: Vec<Chain> = nodes.iter().map(|t| Chain::Point(Point::Line(t.clone()))).collect();
    chains.extend(nodes.windows(2).map(|w| Chain::Edge {
        from: Point::Line(w[0].clone()),
        to: Point::Line(w[1].clone()),
    }));
    let cochains = alphas.into_iter().map(Form::line0).chain(betas).collect();

    CochainComplex::assemble(
        Geometry::Interval,
        basis,
        convention,
        nodes,
        chains,
        cochains,
        HomotopyData::Line { primitives },
    )
}

fn validate_nodes(nodes: &[Scalar]) -> Result<()> {
    if nodes.len() < 2 {
        return Err(Error::InvalidNodes(format!("need at least 2 nodes, got {}", nodes.len())));
    }
    if let Some(bad) = nodes.iter().find(|t| !matches!(t, Scalar::Rat(_))) {
        return Err(Error::InvalidNodes(format!("node {bad} is not an exact rational")));
    }
    if !nodes[0].is_zero() || !nodes.last().unwrap().is_one() {
        return Err(Error::InvalidNodes("nodes must start at 0 and end at 1".into()));
    }
    for w in nodes.windows(2) {
        if w[0].real_cmp(&w[1])?.is_ge() {
            return Err(Error::InvalidNodes(format!("nodes not strictly increasing at {}", w[1])));
        }
    }
    Ok(())
}

/// `Π_{m≠j} (t − t_m)/(t_j − t_m)`.
fn lagrange_basis(nodes: &[Scalar]) -> Result<Vec<Func1D>> {
    let (lo, hi) = (nodes[0].clone(), nodes.last().unwrap().clone());
    let one = Scalar::int(1);
    nodes
        .iter()
        .enumerate()
        .map(|(j, tj)| {
            let mut p = Func1D::constant(lo.clone(), hi.clone(), one.clone())?;
            for (m, tm) in nodes.iter().enumerate() {
                if m == j {
                    continue;
                }
                let denom = tj.checked_sub(tm)?;
                let factor = Func1D::polynomial(lo.clone(), hi.clone(), &[-tm, one.clone()])?.scale(&denom.inv()?)?;
                p = p.mul(&factor)?;
            }
            Ok(p)
        })
        .collect()
}

/// Piecewise linear Whitney hats on the node partition.
fn hat_basis(nodes: &[Scalar]) -> Result<Vec<Func1D>> {
    let pieces = nodes.len() - 1;
    (0..nodes.len())
        .map(|j| {
            let polys = (0..pieces)
                .map(|p| {
                    let (a, b) = (&nodes[p], &nodes[p + 1]);
                    let inv = b.checked_sub(a)?.inv()?;
                    let mut poly = ExpPoly::zero();
                    if p + 1 == j {
                        // rising edge (t - a)/(b - a)
                        poly.add_term(1, 0, inv.clone());
                        poly.add_term(0, 0, -(a * &inv));
                    } else if p == j {
                        // falling edge (b - t)/(b - a)
                        poly.add_term(1, 0, -&inv);
                        poly.add_term(0, 0, b * &inv);
                    }
                    Ok(poly)
                })
                .collect::<Result<Vec<_>>>()?;
            Func1D::new(nodes.to_vec(), polys)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::FuncExpr;

    fn q(p: i64, r: i64) -> Scalar {
        Scalar::rat(p, r)
    }

    fn unit_poly(coeffs: &[Scalar]) -> Func1D {
        Func1D::polynomial(q(0, 1), q(1, 1), coeffs).unwrap()
    }

    #[test]
    fn two_nodes() {
        let cx = build_interval(vec![q(0, 1), q(1, 1)], BasisKind::Lagrange, BreakConvention::default()).unwrap();
        assert_eq!(cx.cochain(0), &Form::line0(unit_poly(&[q(1, 1), q(-1, 1)])));
        assert_eq!(cx.cochain(1), &Form::line0(unit_poly(&[q(0, 1), q(1, 1)])));
        assert_eq!(cx.cochain(2), &Form::line1(unit_poly(&[q(1, 1)])));
        let pw = build_interval(vec![q(0, 1), q(1, 1)], BasisKind::Pwlinear, BreakConvention::Left).unwrap();
        assert_eq!(pw.cochains(), cx.cochains());
    }

    #[test]
    fn three_node_lagrange() {
        let cx = build_interval(vec![q(0, 1), q(1, 2), q(1, 1)], BasisKind::Lagrange, BreakConvention::default())
            .unwrap();
        assert_eq!(cx.cochain(2), &Form::line0(unit_poly(&[q(0, 1), q(-1, 1), q(2, 1)])));
    }

    #[test]
    fn homotopy_of_t_dt() {
        let cx = build_interval(vec![q(0, 1), q(1, 1)], BasisKind::Lagrange, BreakConvention::default()).unwrap();
        let h = cx.homotopy(&Form::line1(unit_poly(&[q(0, 1), q(1, 1)]))).unwrap();
        assert_eq!(h, Form::line0(unit_poly(&[q(0, 1), q(-1, 2), q(1, 2)])));
    }

    #[test]
    fn projection_of_t_squared() {
        let cx = build_interval(vec![q(0, 1), q(1, 2), q(1, 1)], BasisKind::Lagrange, BreakConvention::default())
            .unwrap();
        let g = Form::line0(unit_poly(&[q(0, 1), q(0, 1), q(1, 1)]));
        let expected = cx.cochain(1).scale(&q(1, 4)).unwrap().add(cx.cochain(2)).unwrap();
        assert_eq!(cx.project(&g).unwrap(), expected);
    }

    #[test]
    fn bad_nodes() {
        let conv = BreakConvention::default();
        assert!(build_interval(vec![q(0, 1)], BasisKind::Lagrange, conv).is_err());
        assert!(build_interval(vec![q(0, 1), q(1, 2)], BasisKind::Lagrange, conv).is_err());
        assert!(build_interval(vec![q(0, 1), q(2, 3), q(1, 3), q(1, 1)], BasisKind::Lagrange, conv).is_err());
        let float_nodes = vec![Scalar::float(0.0, 0.0), Scalar::float(1.0, 0.0)];
        assert!(matches!(
            build_interval(float_nodes, BasisKind::Lagrange, conv),
            Err(Error::InvalidNodes(_))
        ));
    }

    #[test]
    fn pwlinear_beta_is_piecewise_constant() {
        let nodes = vec![q(0, 1), q(1, 4), q(1, 1)];
        let cx = build_interval(nodes, BasisKind::Pwlinear, BreakConvention::Left).unwrap();
        let Form::Line { coeff, .. } = cx.cochain(3) else { panic!() };
        let v = FuncExpr::Line(coeff.clone());
        let conv = BreakConvention::default();
        assert_eq!(v.evaluate(&Point::Line(q(1, 8)), conv).unwrap(), q(4, 1));
        assert_eq!(v.evaluate(&Point::Line(q(1, 2)), conv).unwrap(), q(0, 1));
    }
}
