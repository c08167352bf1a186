//! Batch runs: a JSON config names a backend and a generator window, [`run`]
//! builds both, runs the selected suites and writes the exports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::backends::{build_circle, build_interval, build_square, BasisKind, CochainComplex, Geometry};
use crate::bv::{CmeReport, SignConvention, RESOLVED};
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::funcalg::{BreakConvention, Scalar};
use crate::liealg::{structure_constants, GenIndex, GeneratorBasis};
use crate::transfer::{square_xi, transfer_tensors};
use crate::verify::{verify_with_tensors, Check, GoldenTables, Suite, Tolerances, VerifyOptions};

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum NodeValue {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowSpec {
    #[serde(rename = "K")]
    k: Option<u32>,
    #[serde(rename = "D")]
    d: Option<u32>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum SuiteSelection {
    One(String),
    Many(Vec<String>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    geometry: String,
    nodes: Option<Vec<NodeValue>>,
    n: Option<usize>,
    basis: Option<BasisKind>,
    convention: Option<BreakConvention>,
    window: Option<WindowSpec>,
    #[serde(rename = "K_or_D")]
    k_or_d: Option<u32>,
    suites: Option<SuiteSelection>,
    out: Option<PathBuf>,
    golden: Option<PathBuf>,
    tol: Option<f64>,
    seed: Option<u64>,
    family_degree: Option<u32>,
    sign_search: Option<bool>,
}

/// A validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub geometry: Geometry,
    /// Interval nodes; empty otherwise.
    pub nodes: Vec<Scalar>,
    /// Circle node count.
    pub n: Option<usize>,
    pub basis: BasisKind,
    pub convention: BreakConvention,
    /// `K` on the interval and circle, `D` on the square.
    pub window: u32,
    pub suites: BTreeSet<Suite>,
    pub out: Option<PathBuf>,
    pub golden: Option<PathBuf>,
    /// Float tolerance override.
    pub tol: Option<f64>,
    pub seed: u64,
    pub family_degree: u32,
    pub sign_search: bool,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        RunConfig::validate(raw)
    }

    /// Reads a config file; a relative `golden` path is taken relative to it.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let mut cfg = RunConfig::from_json(&text)?;
        if let (Some(g), Some(dir)) = (&cfg.golden, path.parent()) {
            if g.is_relative() {
                cfg.golden = Some(dir.join(g));
            }
        }
        Ok(cfg)
    }

    fn validate(raw: RawConfig) -> Result<RunConfig> {
        let geometry = match raw.geometry.as_str() {
            "interval" => Geometry::Interval,
            "circle" => Geometry::Circle,
            "square" => Geometry::Square,
            other => return Err(config_err(format!("unknown geometry {other:?}"))),
        };
        if raw.nodes.is_some() && geometry != Geometry::Interval {
            return Err(config_err("\"nodes\" applies to the interval only"));
        }
        if raw.n.is_some() && geometry != Geometry::Circle {
            return Err(config_err("\"n\" applies to the circle only"));
        }
        let nodes = match raw.nodes {
            Some(list) => list
                .into_iter()
                .map(|v| match v {
                    NodeValue::Int(i) => Ok(Scalar::int(i)),
                    NodeValue::Text(s) => s.parse::<Scalar>().map_err(|e| config_err(format!("node {s:?}: {e}"))),
                })
                .collect::<Result<Vec<_>>>()?,
            None if geometry == Geometry::Interval => vec![Scalar::int(0), Scalar::int(1)],
            None => Vec::new(),
        };
        let n = match geometry {
            Geometry::Circle => Some(raw.n.unwrap_or(4)),
            _ => None,
        };
        let basis = raw.basis.unwrap_or(match geometry {
            Geometry::Interval => BasisKind::Lagrange,
            Geometry::Circle => BasisKind::TrigDual,
            Geometry::Square => BasisKind::Bilinear,
        });
        let from_window = match (raw.window.unwrap_or_default(), geometry) {
            (WindowSpec { k: Some(_), d: Some(_) }, _) => return Err(config_err("window takes K or D, not both")),
            (WindowSpec { d: Some(_), .. }, Geometry::Interval | Geometry::Circle) => {
                return Err(config_err("1D windows are given by K"))
            }
            (WindowSpec { k: Some(_), .. }, Geometry::Square) => return Err(config_err("square windows are given by D")),
            (WindowSpec { k, d }, _) => k.or(d),
        };
        let window = match (from_window, raw.k_or_d) {
            (Some(_), Some(_)) => return Err(config_err("give either \"window\" or \"K_or_D\"")),
            (w, k) => w.or(k).unwrap_or(1),
        };
        let suites = match raw.suites {
            None => Suite::ALL.into_iter().collect(),
            Some(SuiteSelection::One(s)) if s == "all" => Suite::ALL.into_iter().collect(),
            Some(SuiteSelection::One(s)) => [s.parse()?].into_iter().collect(),
            Some(SuiteSelection::Many(v)) => v.iter().map(|s| s.parse()).collect::<Result<_>>()?,
        };
        if let Some(t) = raw.tol {
            check_tolerance(t)?;
        }
        Ok(RunConfig {
            geometry,
            nodes,
            n,
            basis,
            convention: raw.convention.unwrap_or_default(),
            window,
            suites,
            out: raw.out,
            golden: raw.golden,
            tol: raw.tol,
            seed: raw.seed.unwrap_or(0x5eed),
            family_degree: raw.family_degree.unwrap_or(8),
            sign_search: raw.sign_search.unwrap_or(false),
        })
    }

    pub fn build(&self) -> Result<(CochainComplex, GeneratorBasis)> {
        let cx = match self.geometry {
            Geometry::Interval => build_interval(self.nodes.clone(), self.basis, self.convention)?,
            Geometry::Circle => build_circle(self.n.unwrap_or(4), self.basis, self.convention)?,
            Geometry::Square => {
                if self.basis != BasisKind::Bilinear {
                    return Err(config_err(format!("basis {} is not available on the square", self.basis)));
                }
                build_square()
            }
        };
        let basis = match self.geometry {
            Geometry::Interval => GeneratorBasis::interval(self.window),
            Geometry::Circle => GeneratorBasis::circle(self.window),
            Geometry::Square => GeneratorBasis::square(self.window),
        };
        Ok((cx, basis))
    }

    fn verify_options(&self) -> Result<VerifyOptions> {
        let golden = match &self.golden {
            Some(p) => Some(GoldenTables::load(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?),
            None => None,
        };
        Ok(VerifyOptions {
            suites: self.suites.clone(),
            tolerances: self.tol.map(Tolerances::uniform).unwrap_or_default(),
            family_degree: self.family_degree,
            seed: self.seed,
            golden,
            sign_search: self.sign_search,
            ..VerifyOptions::default()
        })
    }
}

pub fn check_tolerance(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(config_err(format!("tolerance must be positive, got {t}")))
    }
}

/// Files a run may write into the output directory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Export {
    Tensors,
    StructureConstants,
    /// `ξ = L_a h L_b γ` for every ordered pair; square only.
    Xi,
    Cme,
    Report,
}

impl Export {
    pub const ALL: [Export; 5] = [
        Export::Tensors,
        Export::StructureConstants,
        Export::Xi,
        Export::Cme,
        Export::Report,
    ];

    fn file(self) -> &'static str {
        match self {
            Export::Tensors => "tensors.json",
            Export::StructureConstants => "structure_constants.json",
            Export::Xi => "xi.json",
            Export::Cme => "cme.json",
            Export::Report => "report.json",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub passed: bool,
    pub checks: usize,
    pub failed: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Measured {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub geometry: Geometry,
    pub basis: BasisKind,
    pub convention: BreakConvention,
    pub window: Vec<GenIndex>,
    pub passed: bool,
    pub suites: Vec<SuiteSummary>,
    pub checks: Vec<Check>,
    pub sign_convention: SignConvention,
    pub sign_convention_label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cme: Option<CmeReport>,
    /// `max |h∘h ω|` over the monomial family on the square.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub square_h2: Option<Measured>,
    pub files: BTreeMap<String, PathBuf>,
    pub timing_ms: BTreeMap<String, f64>,
}

impl Report {
    /// Plain-text summary: one line per check, failures with their witness.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let window: Vec<String> = self.window.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "{} ({}), window [{}]", self.geometry, self.basis, window.join(", "));
        for c in &self.checks {
            let tag = match (c.informational, c.passed) {
                (true, _) => "INFO",
                (false, true) => "PASS",
                (false, false) => "FAIL",
            };
            let _ = write!(s, "{tag} [{}] {}: {:.3e} (tol {:.0e})", c.suite, c.name, c.measured, c.tolerance);
            if let Some(note) = &c.note {
                let _ = write!(s, "; {note}");
            }
            if !c.passed || c.informational {
                if let Some(w) = &c.witness {
                    let _ = write!(s, "; witness {w}");
                }
            }
            s.push('\n');
        }
        let _ = writeln!(s, "sign convention: {}", self.sign_convention_label);
        for (name, path) in &self.files {
            let _ = writeln!(s, "wrote {name}: {}", path.display());
        }
        let total: f64 = self.timing_ms.values().sum();
        let _ = writeln!(s, "{} in {:.0} ms", if self.passed { "ok" } else { "FAILED" }, total);
        s
    }
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}

#[derive(Serialize)]
struct XiEntry {
    a: GenIndex,
    b: GenIndex,
    form: Form,
}

/// Runs the configured suites and writes every export.
pub fn run(config: &RunConfig) -> Result<Report> {
    run_with(config, &Export::ALL)
}

/// Runs the configured suites and writes the requested exports into
/// `config.out` (nothing is written without an output directory).
pub fn run_with(config: &RunConfig, exports: &[Export]) -> Result<Report> {
    let mut timing = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timing: &mut BTreeMap<String, f64>| {
        timing.insert(name.to_string(), clock.elapsed().as_secs_f64() * 1e3);
        clock = Instant::now();
    };

    let opts = config.verify_options()?;
    let (cx, basis) = config.build()?;
    lap("build", &mut timing);

    let wants = |e: Export| exports.contains(&e) && config.out.is_some();
    let needs_tensors = opts.suites.contains(&Suite::Transfer)
        || opts.suites.contains(&Suite::Cme)
        || wants(Export::Tensors);
    let tensors = if needs_tensors {
        transfer_tensors(&cx, &basis, cx.dim() as usize + 1)?
    } else {
        transfer_tensors(&cx, &basis, 0)?
    };
    lap("transfer", &mut timing);

    let verification = verify_with_tensors(&cx, &basis, tensors, &opts)?;
    lap("suites", &mut timing);

    let mut files = BTreeMap::new();
    if let Some(dir) = &config.out {
        std::fs::create_dir_all(dir)?;
        if wants(Export::Tensors) {
            files.insert("tensors".into(), write_json(dir, Export::Tensors.file(), &verification.tensors.to_json())?);
        }
        if wants(Export::StructureConstants) {
            let sc = structure_constants(&basis)?;
            files.insert(
                "structure_constants".into(),
                write_json(dir, Export::StructureConstants.file(), &sc.to_json())?,
            );
        }
        if wants(Export::Xi) && cx.geometry() == Geometry::Square {
            let mut xi = Vec::new();
            for a in 0..basis.len() {
                for b in 0..basis.len() {
                    xi.push(XiEntry {
                        a: basis.index(a),
                        b: basis.index(b),
                        form: square_xi(&cx, &basis, a, b)?,
                    });
                }
            }
            files.insert("xi".into(), write_json(dir, Export::Xi.file(), &xi)?);
        }
        if wants(Export::Cme) {
            if let Some(cme) = &verification.cme {
                files.insert("cme".into(), write_json(dir, Export::Cme.file(), cme)?);
            }
        }
        lap("export", &mut timing);
    }

    let suites = opts
        .suites
        .iter()
        .map(|&suite| {
            let mine: Vec<&Check> = verification.checks.iter().filter(|c| c.suite == suite).collect();
            let failed: Vec<String> = mine.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
            SuiteSummary {
                suite,
                passed: failed.is_empty(),
                checks: mine.len(),
                failed,
            }
        })
        .collect::<Vec<_>>();
    let square_h2 = verification
        .checks
        .iter()
        .find(|c| cx.geometry() == Geometry::Square && c.suite == Suite::Homotopy && c.name.starts_with("h∘h"))
        .map(|c| Measured {
            value: c.measured,
            witness: c.witness.clone(),
        });

    let mut report = Report {
        geometry: cx.geometry(),
        basis: cx.basis_kind(),
        convention: cx.convention(),
        window: basis.indices().to_vec(),
        passed: suites.iter().all(|s| s.passed),
        suites,
        checks: verification.checks,
        sign_convention: RESOLVED,
        sign_convention_label: RESOLVED.to_string(),
        cme: verification.cme,
        square_h2,
        files,
        timing_ms: timing,
    };
    if let (Some(dir), true) = (&config.out, exports.contains(&Export::Report)) {
        let path = dir.join(Export::Report.file());
        report.files.insert("report".into(), path);
        report.files.insert("summary".into(), dir.join("report.txt"));
        write_json(dir, Export::Report.file(), &report)?;
        std::fs::write(dir.join("report.txt"), report.summary())?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_interval_config() {
        let cfg = RunConfig::from_json(r#"{"geometry":"interval","nodes":[0,1],"window":{"K":1}}"#).unwrap();
        assert_eq!(cfg.nodes, vec![Scalar::int(0), Scalar::int(1)]);
        assert_eq!(cfg.window, 1);
        let report = run(&cfg).unwrap();
        assert!(report.passed, "{}", report.summary());
        assert_eq!(report.cme.unwrap().max_abs_residual, 0.0);
    }

    #[test]
    fn square_config_shape() {
        let cfg = RunConfig::from_json(r#"{"geometry":"square","K_or_D":1,"suites":"all"}"#).unwrap();
        assert_eq!(cfg.geometry, Geometry::Square);
        assert_eq!(cfg.suites.len(), Suite::ALL.len());
    }

    #[test]
    fn rational_node_strings() {
        let cfg = RunConfig::from_json(r#"{"geometry":"interval","nodes":["0","1/2",1]}"#).unwrap();
        assert_eq!(cfg.nodes[1], Scalar::rat(1, 2));
    }

    #[test]
    fn config_errors() {
        for bad in [
            r#"{"geometry":"torus"}"#,
            r#"{"geometry":"circle","nodes":[0,1]}"#,
            r#"{"geometry":"interval","n":3}"#,
            r#"{"geometry":"square","window":{"K":1}}"#,
            r#"{"geometry":"interval","window":{"K":1},"K_or_D":2}"#,
            r#"{"geometry":"interval","tol":-1}"#,
            r#"{"geometry":"interval","suites":["build","bogus"]}"#,
            r#"{"geometry":"interval","colour":"red"}"#,
            r#"{"geometry":"interval","nodes":[0.5,1]}"#,
            r#"not json"#,
        ] {
            assert!(matches!(RunConfig::from_json(bad), Err(Error::Config(_))), "{bad}");
        }
    }
}
