//! The three retracts: interval, circle and square. Each provides a chain
//! basis, a dual cochain basis, the projector `P_Z` and the homotopy `h`.

mod circle;
mod interval;
mod square;

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

pub use circle::build_circle;
pub use interval::build_interval;
pub use square::{build_square, square_i};

use crate::error::{Error, Result};
use crate::forms::{exterior_derivative, pair, Chain, Form};
use crate::funcalg::{BreakConvention, Func1D, Scalar, ScalarKind};
use crate::linalg::{self, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Interval,
    Circle,
    Square,
}

impl Geometry {
    pub fn dim(self) -> u8 {
        match self {
            Geometry::Interval | Geometry::Circle => 1,
            Geometry::Square => 2,
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Interval => "interval",
            Geometry::Circle => "circle",
            Geometry::Square => "square",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    Lagrange,
    Pwlinear,
    TrigDual,
    MidpointHat,
    /// The fixed bilinear basis of the square.
    Bilinear,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisKind::Lagrange => "lagrange",
            BasisKind::Pwlinear => "pwlinear",
            BasisKind::TrigDual => "trig-dual",
            BasisKind::MidpointHat => "midpoint-hat",
            BasisKind::Bilinear => "bilinear",
        })
    }
}

#[derive(Clone, Debug)]
enum HomotopyData {
    /// `∫_0^t β_j` for every 1-form basis element.
    Line { primitives: Vec<Func1D> },
    Square,
}

/// A built retract. Basis elements are ordered by degree: the 0-cochains
/// `α_i`, then the 1-cochains `β_j`, then `γ` on the square. Chain `i` is dual
/// to cochain `i`.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    geometry: Geometry,
    basis: BasisKind,
    convention: BreakConvention,
    nodes: Vec<Scalar>,
    chains: Vec<Chain>,
    cochains: Vec<Form>,
    degrees: Vec<u8>,
    homotopy: HomotopyData,
    dual_residual: f64,
}

impl CochainComplex {
    fn assemble(
        geometry: Geometry,
        basis: BasisKind,
        convention: BreakConvention,
        nodes: Vec<Scalar>,
        chains: Vec<Chain>,
        cochains: Vec<Form>,
        homotopy: HomotopyData,
    ) -> Result<CochainComplex> {
        let degrees = cochains.iter().map(Form::degree).collect();
        let mut cx = CochainComplex {
            geometry,
            basis,
            convention,
            nodes,
            chains,
            cochains,
            degrees,
            homotopy,
            dual_residual: 0.0,
        };
        cx.dual_residual = cx.duality_residual()?;
        let tol = cx.tolerance();
        if cx.dual_residual > tol {
            return Err(Error::BasisCheck(format!(
                "{geometry} {basis}: duality residual {:e}",
                cx.dual_residual
            )));
        }
        if let Some(bad) = cx.closure_defects()?.into_iter().next() {
            return Err(Error::BasisCheck(format!("{geometry} {basis}: d({bad}) leaves the cochain span")));
        }
        let unity = cx.partition_of_unity_defect()?;
        if unity > tol {
            return Err(Error::BasisCheck(format!("{geometry} {basis}: Σα_i - 1 has size {unity:e}")));
        }
        Ok(cx)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn basis_kind(&self) -> BasisKind {
        self.basis
    }

    pub fn convention(&self) -> BreakConvention {
        self.convention
    }

    pub fn dim(&self) -> u8 {
        self.geometry.dim()
    }

    pub fn kind(&self) -> ScalarKind {
        match self.geometry {
            Geometry::Circle => ScalarKind::Float,
            _ => ScalarKind::Rational,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.kind().is_exact()
    }

    /// Zero threshold for checks: 0 in exact mode.
    pub fn tolerance(&self) -> f64 {
        if self.is_exact() {
            0.0
        } else {
            1e-12
        }
    }

    /// Interval: `t_0..t_n`; circle: `t_0..t_{n-1}`; square: empty.
    pub fn nodes(&self) -> &[Scalar] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.cochains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cochains.is_empty()
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn cochains(&self) -> &[Form] {
        &self.cochains
    }

    pub fn chain(&self, i: usize) -> &Chain {
        &self.chains[i]
    }

    pub fn cochain(&self, i: usize) -> &Form {
        &self.cochains[i]
    }

    pub fn degree(&self, i: usize) -> u8 {
        self.degrees[i]
    }

    pub fn degree_range(&self, degree: u8) -> Range<usize> {
        let start = self.degrees.iter().position(|&d| d >= degree).unwrap_or(self.len());
        let end = self.degrees.iter().position(|&d| d > degree).unwrap_or(self.len());
        start..end
    }

    /// `α_0`, `β_2`, `γ`, ...
    pub fn cochain_label(&self, i: usize) -> String {
        let local = i - self.degree_range(self.degree(i)).start;
        match self.degree(i) {
            0 => format!("α_{local}"),
            1 => format!("β_{local}"),
            _ => "γ".into(),
        }
    }

    pub fn chain_label(&self, i: usize) -> String {
        let local = i - self.degree_range(self.degree(i)).start;
        match self.degree(i) {
            0 => format!("α^{local}"),
            1 => format!("β^{local}"),
            _ => "γ*".into(),
        }
    }

    pub fn dual_residual(&self) -> f64 {
        self.dual_residual
    }

    pub fn pair(&self, i: usize, omega: &Form) -> Result<Scalar> {
        pair(&self.chains[i], omega, self.convention)
    }

    /// The duality matrix `⟨chain_i, cochain_j⟩` over same-degree pairs
    /// (other entries are zero by degree).
    pub fn duality_matrix(&self) -> Result<Matrix> {
        let mut m = linalg::zeros(self.len(), self.len(), self.kind());
        for (i, row) in m.iter_mut().enumerate() {
            for j in self.degree_range(self.degree(i)) {
                row[j] = self.pair(i, &self.cochains[j])?;
            }
        }
        Ok(m)
    }

    fn duality_residual(&self) -> Result<f64> {
        linalg::max_abs_diff(&self.duality_matrix()?, &linalg::identity(self.len(), self.kind()))
    }

    /// Basis cochains whose differential is not reproduced by `P_Z`.
    pub fn closure_defects(&self) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for (j, c) in self.cochains.iter().enumerate() {
            let dc = exterior_derivative(c)?;
            if dc.is_top_zero() {
                continue;
            }
            let defect = dc.sub(&self.project(&dc)?)?;
            let leaks = if self.is_exact() {
                !defect.is_zero()
            } else {
                defect.max_abs_coeff() > 1e-9
            };
            if leaks {
                bad.push(self.cochain_label(j));
            }
        }
        Ok(bad)
    }

    /// Coefficient size of `Σ α_i - 1`.
    pub fn partition_of_unity_defect(&self) -> Result<f64> {
        let zeros = self.degree_range(0);
        let mut sum = self.cochains[zeros.start].zero_like();
        for c in &self.cochains[zeros] {
            sum = sum.add(c)?;
        }
        let one = match &sum {
            Form::Line { coeff, .. } => Form::line0(Func1D::constant(
                coeff.lo().clone(),
                coeff.hi().clone(),
                Scalar::one(self.kind()),
            )?),
            _ => Form::Plane0(crate::funcalg::Func2D::constant(Scalar::one(self.kind()))),
        };
        Ok(sum.sub(&one)?.max_abs_coeff())
    }

    /// `β_j^i`: the coefficient of `β_j` evaluated at node `i`, using the
    /// complex's breakpoint convention. 1D only.
    pub fn beta_table(&self) -> Result<Matrix> {
        if self.dim() != 1 {
            return Err(Error::Unsupported("β_j^i tables exist only in 1D".into()));
        }
        let betas = self.degree_range(1);
        self.nodes
            .iter()
            .map(|t| {
                betas
                    .clone()
                    .map(|j| match &self.cochains[j] {
                        Form::Line { coeff, .. } => coeff.evaluate(t, self.convention),
                        _ => unreachable!("1D cochains are line forms"),
                    })
                    .collect()
            })
            .collect()
    }

    /// `P_Z ω = Σ_j ⟨chain_j, ω⟩ cochain_j` over the matching degree.
    pub fn project(&self, omega: &Form) -> Result<Form> {
        if omega.is_top_zero() {
            return Ok(omega.clone());
        }
        let mut out = omega.zero_like();
        for j in self.degree_range(omega.degree()) {
            let c = self.pair(j, omega)?;
            if !c.is_zero() {
                out = out.add(&self.cochains[j].scale(&c)?)?;
            }
        }
        Ok(out)
    }

    /// The contracting homotopy `h`, lowering degree by one.
    pub fn homotopy(&self, omega: &Form) -> Result<Form> {
        let template = &self.cochains[0];
        if omega.degree() == 0 || omega.is_top_zero() {
            return Ok(template.zero_of_degree(omega.degree().saturating_sub(1).min(self.dim())));
        }
        match (&self.homotopy, omega) {
            (HomotopyData::Line { primitives }, Form::Line { coeff, .. }) => {
                let base = Scalar::zero(self.kind());
                let mut out = coeff.antiderivative(&base)?;
                for (b, j) in primitives.iter().zip(self.degree_range(1)) {
                    let c = self.pair(j, omega)?;
                    if !c.is_zero() {
                        out = out.sub(&b.scale(&c)?)?;
                    }
                }
                Ok(Form::line0(out))
            }
            (HomotopyData::Square, Form::Plane2(_)) => {
                let ie = square_i(omega)?;
                let mut out = ie.clone();
                for j in self.degree_range(1) {
                    let c = self.pair(j, &ie)?;
                    if !c.is_zero() {
                        out = out.sub(&self.cochains[j].scale(&c)?)?;
                    }
                }
                Ok(out)
            }
            (HomotopyData::Square, Form::Plane1 { .. }) => square_i(&omega.sub(&self.project(omega)?)?),
            _ => Err(Error::DomainMismatch(format!("form of dimension {} on the {}", omega.dim(), self.geometry))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_ranges() {
        let sq = build_square();
        assert_eq!(sq.degree_range(0), 0..4);
        assert_eq!(sq.degree_range(1), 4..8);
        assert_eq!(sq.degree_range(2), 8..9);
        assert_eq!(sq.cochain_label(5), "β_1");
        assert_eq!(sq.chain_label(8), "γ*");
    }
}
