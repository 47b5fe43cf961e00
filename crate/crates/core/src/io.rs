//! JSON file formats. Every file names its scenario, so it can be read
//! back without side information; rationals are written as `"p/q"`.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{Basis, BasisKind, CorrelatorTerm};
use crate::error::{Error, Result};
use crate::optimize::{SeesawResult, Strategy};
use crate::polytope::{AffineHull, CausalModel, Equality, FacetList, Inequality, VertexSet};
use crate::quantum::{CommProtocol, Observable, QState};
use crate::rational::{format_rational, parse_rational};
use crate::scenario::{Behavior, NumberMode, Scenario, Values};

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// A scenario given inline or as a path to a scenario file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioRef {
    Inline(Scenario),
    Path(String),
}

impl ScenarioRef {
    /// Relative paths are taken from `base`, the directory of the referring file.
    pub fn resolve(&self, base: Option<&Path>) -> Result<Scenario> {
        match self {
            ScenarioRef::Inline(s) => Ok(s.clone()),
            ScenarioRef::Path(p) => {
                let p = PathBuf::from(p);
                let full = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p,
                };
                read_json(&full)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberList {
    Strings(Vec<String>),
    Floats(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehaviorFile {
    pub scenario: ScenarioRef,
    pub mode: NumberMode,
    pub values: NumberList,
}

impl BehaviorFile {
    pub fn from_behavior(b: &Behavior) -> Self {
        let values = match b.values() {
            Values::Exact(v) => NumberList::Strings(v.iter().map(format_rational).collect()),
            Values::Float(v) => NumberList::Floats(v.clone()),
        };
        BehaviorFile {
            scenario: ScenarioRef::Inline(b.scenario().clone()),
            mode: b.mode(),
            values,
        }
    }

    pub fn to_behavior(&self, base: Option<&Path>) -> Result<Behavior> {
        let sc = self.scenario.resolve(base)?;
        let values = match (self.mode, &self.values) {
            (NumberMode::Rational, NumberList::Strings(v)) => {
                Values::Exact(v.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?)
            }
            (NumberMode::Float, NumberList::Floats(v)) => Values::Float(v.clone()),
            (NumberMode::Float, NumberList::Strings(v)) => Values::Float(
                v.iter()
                    .map(|s| s.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad number {s:?}"))))
                    .collect::<Result<_>>()?,
            ),
            (NumberMode::Rational, NumberList::Floats(_)) => {
                return Err(Error::invalid("rational behaviors list values as \"p/q\" strings"))
            }
        };
        Behavior::new(sc, values)
    }
}

pub fn read_behavior(path: &Path) -> Result<Behavior> {
    let f: BehaviorFile = read_json(path)?;
    f.to_behavior(path.parent())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlators: Option<Vec<CorrelatorTerm>>,
}

impl BasisFile {
    pub fn from_basis(b: &Basis) -> Self {
        BasisFile {
            scenario: b.scenario.clone(),
            correlators: match &b.kind {
                BasisKind::Probability => None,
                BasisKind::Correlator(t) => Some(t.clone()),
            },
        }
    }

    pub fn to_basis(&self) -> Result<Basis> {
        match &self.correlators {
            None => Ok(Basis::probability(self.scenario.clone())),
            Some(t) => Basis::correlator(self.scenario.clone(), t.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerticesFile {
    pub model: CausalModel,
    pub basis: BasisFile,
    pub points: Vec<Vec<String>>,
}

impl VerticesFile {
    pub fn from_vertices(vs: &VertexSet) -> Self {
        VerticesFile {
            model: vs.model.clone(),
            basis: BasisFile::from_basis(&vs.basis),
            points: vs
                .points
                .iter()
                .map(|p| p.iter().map(format_rational).collect())
                .collect(),
        }
    }

    pub fn to_vertices(&self) -> Result<VertexSet> {
        let basis = self.basis.to_basis()?;
        if !basis.scenario.same_layout(self.model.scenario()) {
            return Err(Error::invalid("vertex basis and model disagree on the scenario"));
        }
        let mut points = Vec::with_capacity(self.points.len());
        for p in &self.points {
            if p.len() != basis.dim() {
                return Err(Error::LengthMismatch {
                    expected: basis.dim(),
                    got: p.len(),
                });
            }
            points.push(p.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?);
        }
        if points.is_empty() {
            return Err(Error::invalid("vertex file lists no points"));
        }
        points.sort();
        points.dedup();
        Ok(VertexSet {
            model: self.model.clone(),
            basis,
            points,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityRow {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
    pub pivot: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityRow {
    pub coeffs: Vec<i64>,
    pub bound: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetsFile {
    pub basis: BasisFile,
    pub equalities: Vec<EqualityRow>,
    pub inequalities: Vec<InequalityRow>,
}

impl FacetsFile {
    pub fn from_facets(f: &FacetList) -> Self {
        FacetsFile {
            basis: BasisFile::from_basis(&f.basis),
            equalities: f
                .equalities
                .iter()
                .map(|e| EqualityRow {
                    coeffs: e.coeffs.clone(),
                    rhs: e.rhs,
                    pivot: e.pivot,
                })
                .collect(),
            inequalities: f
                .inequalities
                .iter()
                .map(|i| InequalityRow {
                    coeffs: i.coeffs.clone(),
                    bound: i.bound,
                })
                .collect(),
        }
    }

    pub fn to_facets(&self) -> Result<FacetList> {
        let basis = self.basis.to_basis()?;
        let equalities: Vec<Equality> = self
            .equalities
            .iter()
            .map(|e| Equality {
                coeffs: e.coeffs.clone(),
                rhs: e.rhs,
                pivot: e.pivot,
            })
            .collect();
        let hull = AffineHull::from_equalities(basis.dim(), &equalities)?;
        let mut inequalities = Vec::with_capacity(self.inequalities.len());
        for row in &self.inequalities {
            let q = Inequality::new(basis.clone(), row.coeffs.clone(), row.bound)?;
            inequalities.push(hull.reduce(&q)?);
        }
        inequalities.sort_by_key(|q| q.key());
        inequalities.dedup();
        Ok(FacetList {
            basis,
            hull,
            equalities,
            inequalities,
        })
    }
}

/// A single inequality with its basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityFile {
    pub basis: BasisFile,
    pub coeffs: Vec<i64>,
    pub bound: i64,
}

impl InequalityFile {
    pub fn from_inequality(q: &Inequality) -> Self {
        InequalityFile {
            basis: BasisFile::from_basis(&q.basis),
            coeffs: q.coeffs.clone(),
            bound: q.bound,
        }
    }

    pub fn to_inequality(&self) -> Result<Inequality> {
        Inequality::new(self.basis.to_basis()?, self.coeffs.clone(), self.bound)
    }
}

/// Density matrix split into real and imaginary parts, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum StateFile {
    Density { re: Vec<Vec<f64>>, im: Vec<Vec<f64>> },
    Bloch { r: [f64; 3] },
    Pure { re: Vec<f64>, im: Vec<f64> },
}

impl StateFile {
    pub fn from_state(s: &QState) -> Self {
        let m = s.matrix();
        let part = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        StateFile::Density {
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }

    pub fn to_state(&self) -> Result<QState> {
        match self {
            StateFile::Bloch { r } => QState::from_bloch(*r),
            StateFile::Pure { re, im } => {
                if re.len() != im.len() {
                    return Err(Error::invalid("amplitude parts differ in length"));
                }
                QState::pure(&re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect::<Vec<_>>())
            }
            StateFile::Density { re, im } => {
                let d = re.len();
                if im.len() != d || re.iter().chain(im).any(|r| r.len() != d) {
                    return Err(Error::invalid("density matrix parts must be square and equal-sized"));
                }
                QState::new(DMatrix::from_fn(d, d, |i, j| Complex64::new(re[i][j], im[i][j])))
            }
        }
    }
}

/// Quantum strategy: observables per setting, plus the message table for
/// communication protocols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ProtocolFile {
    Sequential {
        initial: StateFile,
        settings: Vec<Vec<Observable>>,
    },
    Bipartite {
        state: StateFile,
        alice: Vec<Observable>,
        /// `message[x][a]`.
        message: Vec<Vec<usize>>,
        message_dim: usize,
        /// `bob[m][y]`.
        bob: Vec<Vec<Observable>>,
    },
}

impl ProtocolFile {
    pub fn from_strategy(s: &Strategy) -> Self {
        match s {
            Strategy::Sequential { initial, settings } => ProtocolFile::Sequential {
                initial: StateFile::from_state(initial),
                settings: settings.clone(),
            },
            Strategy::Bipartite { state, protocol } => ProtocolFile::Bipartite {
                state: StateFile::from_state(state),
                alice: protocol.alice.clone(),
                message: protocol.message.clone(),
                message_dim: protocol.message_dim,
                bob: protocol.bob.clone(),
            },
        }
    }

    pub fn to_strategy(&self) -> Result<Strategy> {
        Ok(match self {
            ProtocolFile::Sequential { initial, settings } => Strategy::Sequential {
                initial: initial.to_state()?,
                settings: settings.clone(),
            },
            ProtocolFile::Bipartite {
                state,
                alice,
                message,
                message_dim,
                bob,
            } => {
                let protocol = CommProtocol {
                    alice: alice.clone(),
                    message: message.clone(),
                    message_dim: *message_dim,
                    bob: bob.clone(),
                };
                protocol.validate()?;
                Strategy::Bipartite {
                    state: state.to_state()?,
                    protocol,
                }
            }
        })
    }
}

/// Outcome of one see-saw run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub bound: i64,
    pub best_value: f64,
    pub excess: f64,
    pub reevaluated: f64,
    pub best_restart: usize,
    pub restarts_used: usize,
    pub seed: u64,
    pub trace: Vec<f64>,
    pub protocol: ProtocolFile,
}

impl OptimizeReport {
    pub fn new(ineq: &Inequality, r: &SeesawResult, seed: u64) -> Self {
        OptimizeReport {
            bound: ineq.bound,
            best_value: r.best_value,
            excess: r.best_value - ineq.bound as f64,
            reevaluated: r.reevaluated,
            best_restart: r.best_restart,
            restarts_used: r.restart_values.len(),
            seed,
            trace: r.trace.clone(),
            protocol: ProtocolFile::from_strategy(&r.strategy),
        }
    }
}
