use std::f64::consts::TAU;

use super::{BasisKind, CochainComplex, Geometry, HomotopyData};
use crate::error::{Error, Result};
use crate::forms::{Chain, Form};
use crate::funcalg::{BreakConvention, ExpPoly, Func1D, Point, Scalar, ScalarKind};
use crate::linalg;

fn real(x: f64) -> Scalar {
    Scalar::float(x, 0.0)
}

/// Frequencies of the trigonometric dual basis for `n` nodes.
pub(crate) fn trig_window(n: usize) -> Vec<i64> {
    let n = n as i64;
    (-((n - 1) / 2)..=n / 2).collect()
}

/// Circle `[0, 2π)` with equispaced nodes `t_j = 2πj/n`, in complex floats.
///
/// `β_j = ϑ_j dt` with `∫_{t_i}^{t_{i+1}} ϑ_j = δ_ij`, and
/// `α_0 = 1 + ∫_0^t (β_{n-1} − β_0)`, `α_j = ∫_0^t (β_{j-1} − β_j)`.
pub fn build_circle(n: usize, basis: BasisKind, convention: BreakConvention) -> Result<CochainComplex> {
    if n < 2 {
        return Err(Error::InvalidNodes(format!("the circle needs n >= 2 nodes, got {n}")));
    }
    let lo = real(0.0);
    let hi = real(TAU);
    let mut ends: Vec<Scalar> = (0..n).map(|j| real(TAU * j as f64 / n as f64)).collect();
    ends.push(hi.clone());

    let thetas = match basis {
        BasisKind::TrigDual => trig_dual(&ends)?,
        BasisKind::MidpointHat => midpoint_hats(&ends)?,
        other => return Err(Error::Config(format!("basis {other} is not available on the circle"))),
    };

    let zero = lo.clone();
    let primitives = thetas
        .iter()
        .map(|th| th.antiderivative(&zero))
        .collect::<Result<Vec<_>>>()?;
    let one = Func1D::constant(lo.clone(), hi.clone(), Scalar::one(ScalarKind::Float))?;
    let alphas = (0..n)
        .map(|j| {
            let prev = (j + n - 1) % n;
            let diff = primitives[prev].sub(&primitives[j])?;
            if j == 0 {
                one.add(&diff)
            } else {
                Ok(diff)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut chains: Vec<Chain> = ends[..n].iter().map(|t| Chain::Point(Point::Line(t.clone()))).collect();
    chains.extend(ends.windows(2).map(|w| Chain::Edge {
        from: Point::Line(w[0].clone()),
        to: Point::Line(w[1].clone()),
    }));
    let cochains = alphas
        .into_iter()
        .map(Form::line0)
        .chain(thetas.into_iter().map(Form::line1))
        .collect();

    ends.pop();
    CochainComplex::assemble(
        Geometry::Circle,
        basis,
        convention,
        ends,
        chains,
        cochains,
        HomotopyData::Line { primitives },
    )
}

/// One linear solve against the arc-integral conditions.
fn trig_dual(ends: &[Scalar]) -> Result<Vec<Func1D>> {
    let n = ends.len() - 1;
    let (lo, hi) = (ends[0].clone(), ends[n].clone());
    let window = trig_window(n);
    let exps = window
        .iter()
        .map(|&k| Func1D::monomial(lo.clone(), hi.clone(), Scalar::one(ScalarKind::Float), 0, k))
        .collect::<Result<Vec<_>>>()?;
    let m = (0..n)
        .map(|i| exps.iter().map(|e| e.integrate(&ends[i], &ends[i + 1])).collect())
        .collect::<Result<Vec<Vec<Scalar>>>>()?;
    let coeffs = linalg::solve(&m, &linalg::identity(n, ScalarKind::Float)).map_err(|e| match e {
        Error::Singular(why) => Error::Singular(format!("trig-dual window k ∈ {window:?}: {why}")),
        other => other,
    })?;
    let residual = linalg::max_abs_diff(&linalg::mat_mul(&m, &coeffs)?, &linalg::identity(n, ScalarKind::Float))?;
    log::debug!("circle n={n}: trig-dual solve residual {residual:e}");
    (0..n)
        .map(|j| {
            let mut p = ExpPoly::zero();
            for (row, &k) in coeffs.iter().zip(&window) {
                p.add_term(0, k, row[j].clone());
            }
            Func1D::from_piece(lo.clone(), hi.clone(), p)
        })
        .collect()
}

/// Piecewise linear bumps on each arc, peaked at the midpoint, vanishing at
/// every node.
fn midpoint_hats(ends: &[Scalar]) -> Result<Vec<Func1D>> {
    let n = ends.len() - 1;
    let mut breaks = Vec::with_capacity(2 * n + 1);
    for w in ends.windows(2) {
        breaks.push(w[0].clone());
        breaks.push(w[0].checked_add(&w[1])?.scale_ratio(1, 2));
    }
    breaks.push(ends[n].clone());
    let height = real(2.0 * n as f64 / TAU);
    (0..n)
        .map(|j| {
            let pieces = (0..2 * n)
                .map(|p| {
                    let (a, b) = (&breaks[p], &breaks[p + 1]);
                    let slope = height.checked_div(&b.checked_sub(a)?)?;
                    let mut poly = ExpPoly::zero();
                    if p == 2 * j {
                        poly.add_term(1, 0, slope.clone());
                        poly.add_term(0, 0, -(a * &slope));
                    } else if p == 2 * j + 1 {
                        poly.add_term(1, 0, -&slope);
                        poly.add_term(0, 0, b * &slope);
                    }
                    Ok(poly)
                })
                .collect::<Result<Vec<_>>>()?;
            Func1D::new(breaks.clone(), pieces)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows() {
        assert_eq!(trig_window(2), vec![0, 1]);
        assert_eq!(trig_window(3), vec![-1, 0, 1]);
        assert_eq!(trig_window(4), vec![-1, 0, 1, 2]);
    }

    #[test]
    fn arc_duality_and_node_values() {
        for n in [2, 3, 4, 8] {
            let cx = build_circle(n, BasisKind::TrigDual, BreakConvention::default()).unwrap();
            assert!(cx.dual_residual() <= 1e-12, "n={n}: {}", cx.dual_residual());
            for i in 0..n {
                let row_sum = cx
                    .degree_range(1)
                    .map(|j| cx.pair(n + i, cx.cochain(j)).unwrap())
                    .fold(Scalar::zero(ScalarKind::Float), |a, b| a + b);
                assert!(row_sum.approx_eq(&real(1.0), 1e-12));
            }
        }
    }

    #[test]
    fn midpoint_hat_vanishes_at_nodes() {
        let cx = build_circle(4, BasisKind::MidpointHat, BreakConvention::default()).unwrap();
        let table = cx.beta_table().unwrap();
        assert!(table.iter().flatten().all(|b| b.abs_f64() < 1e-12));
    }

    #[test]
    fn rejects_interval_bases() {
        assert!(build_circle(4, BasisKind::Lagrange, BreakConvention::default()).is_err());
        assert!(build_circle(1, BasisKind::TrigDual, BreakConvention::default()).is_err());
    }
}
