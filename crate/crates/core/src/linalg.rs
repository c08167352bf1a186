//! Small dense linear algebra over [`Scalar`].

use crate::error::{Error, Result};
use crate::funcalg::{Scalar, ScalarKind};

pub type Matrix = Vec<Vec<Scalar>>;

pub fn zeros(rows: usize, cols: usize, kind: ScalarKind) -> Matrix {
    vec![vec![Scalar::zero(kind); cols]; rows]
}

pub fn identity(n: usize, kind: ScalarKind) -> Matrix {
    let mut m = zeros(n, n, kind);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Scalar::one(kind);
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    let mut out = Vec::with_capacity(a.len());
    for row in a {
        if row.len() != inner {
            return Err(Error::DomainMismatch("matrix shapes do not compose".into()));
        }
        let mut out_row = Vec::with_capacity(cols);
        for j in 0..cols {
            let mut acc = Scalar::zero(row.first().map_or(ScalarKind::Rational, Scalar::kind));
            for (k, a_ik) in row.iter().enumerate() {
                if !a_ik.is_zero() && !b[k][j].is_zero() {
                    acc = acc.checked_add(&a_ik.checked_mul(&b[k][j])?)?;
                }
            }
            out_row.push(acc);
        }
        out.push(out_row);
    }
    Ok(out)
}

/// Largest entry magnitude of `a - b`.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            worst = worst.max(x.checked_sub(y)?.abs_f64());
        }
    }
    Ok(worst)
}

/// Solve `A X = B` by Gaussian elimination. Exact scalars pivot on the first
/// nonzero entry; floats use partial pivoting on magnitude.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) || b.len() != n {
        return Err(Error::DomainMismatch("solve needs a square system".into()));
    }
    let m = b.first().map_or(0, Vec::len);
    let mut aug: Matrix = a.iter().zip(b).map(|(ra, rb)| ra.iter().chain(rb).cloned().collect()).collect();

    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !aug[r][col].is_zero())
            .max_by(|&r, &s| {
                if aug[r][col].is_exact() {
                    // keep the first nonzero row
                    s.cmp(&r)
                } else {
                    aug[r][col].abs_f64().total_cmp(&aug[s][col].abs_f64())
                }
            })
            .ok_or_else(|| Error::Singular(format!("no pivot in column {col}")))?;
        if !aug[pivot][col].is_exact() && aug[pivot][col].abs_f64() < 1e-14 {
            return Err(Error::Singular(format!("pivot {:e} in column {col}", aug[pivot][col].abs_f64())));
        }
        aug.swap(col, pivot);
        let inv = aug[col][col].inv()?;
        for x in aug[col].iter_mut() {
            *x = x.checked_mul(&inv)?;
        }
        for r in 0..n {
            if r == col || aug[r][col].is_zero() {
                continue;
            }
            let factor = aug[r][col].clone();
            for c in col..n + m {
                let delta = factor.checked_mul(&aug[col][c])?;
                aug[r][c] = aug[r][c].checked_sub(&delta)?;
            }
        }
    }
    Ok(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> Scalar {
        Scalar::rat(p, r)
    }

    #[test]
    fn vandermonde_three_nodes() {
        // columns 1, t, t^2 at t = 0, 1/2, 1
        let a = vec![
            vec![q(1, 1), q(0, 1), q(0, 1)],
            vec![q(1, 1), q(1, 2), q(1, 4)],
            vec![q(1, 1), q(1, 1), q(1, 1)],
        ];
        let x = solve(&a, &identity(3, ScalarKind::Rational)).unwrap();
        // third column: coefficients of the Lagrange polynomial for t = 1, i.e. 2t^2 - t
        assert_eq!(x[0][2], q(0, 1));
        assert_eq!(x[1][2], q(-1, 1));
        assert_eq!(x[2][2], q(2, 1));
        let back = mat_mul(&a, &x).unwrap();
        assert_eq!(back, identity(3, ScalarKind::Rational));
    }

    #[test]
    fn singular_system() {
        let a = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert!(matches!(solve(&a, &identity(2, ScalarKind::Rational)), Err(Error::Singular(_))));
    }

    #[test]
    fn complex_float_solve() {
        let a = vec![
            vec![Scalar::float(0.0, 1.0), Scalar::float(1.0, 0.0)],
            vec![Scalar::float(2.0, 0.0), Scalar::float(0.0, -1.0)],
        ];
        let x = solve(&a, &identity(2, ScalarKind::Float)).unwrap();
        let back = mat_mul(&a, &x).unwrap();
        assert!(max_abs_diff(&back, &identity(2, ScalarKind::Float)).unwrap() < 1e-14);
    }
}
