//! See-saw maximization of linear functionals over quantum strategies.
//!
//! Each observable slot enters the objective as a polynomial of degree at
//! most two in its Bloch vector (degree one except for the middle steps of
//! a measurement sequence), so every slot update is an exact maximization
//! over the sphere. State parameters use golden-section search and message
//! tables an exhaustive per-entry search. Updates are only accepted when
//! they do not lower the objective, which keeps each restart monotone.

mod bloch;
mod sphere;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::Inequality;
use crate::quantum::{bipartite_behavior, comm_augmented_behavior, sequential_behavior, CommProtocol, Observable, QState};
use crate::scenario::{Behavior, Scenario};

use bloch::{bipartite_value, schmidt_state, sequential_value, terms, Correlations, Term, V3};
use sphere::{fit_quadratic, maximize_on_sphere};

/// Excess over the bound that counts as a violation in scans.
pub const VIOLATION_TOL: f64 = 1e-6;
/// Allowed gap between the optimizer's internal value and the value
/// recomputed from density matrices.
pub const DRIFT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    Fixed(QState),
    /// Optimized over all pure qubit states.
    Free,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SharedState {
    Fixed(QState),
    /// `cos t|00⟩ + sin t|11⟩`, t ∈ [0, π/4]: every pure two-qubit state up
    /// to local unitaries, which the observables absorb.
    Schmidt,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StrategyClass {
    /// Successive measurements on one qubit.
    SequentialQubit { initial: InitialState },
    /// Two parties on a shared two-qubit state.
    BipartiteNoComm { state: SharedState },
    /// As above, plus a message `m(x, a)` that selects Bob's observables.
    BipartitePlusMessage { state: SharedState, message_dim: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub seed: u64,
    pub convergence_tol: f64,
    pub max_sweeps: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 100,
            seed: 0,
            convergence_tol: 1e-12,
            max_sweeps: 10_000,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_sweeps == 0 || !(self.convergence_tol > 0.0) {
            return Err(Error::invalid("optimizer needs positive restarts, sweeps and tolerance"));
        }
        Ok(())
    }
}

/// Optimized strategy, ready to be rebuilt with the quantum module.
#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    Sequential {
        initial: QState,
        settings: Vec<Vec<Observable>>,
    },
    Bipartite {
        state: QState,
        protocol: CommProtocol,
    },
}

impl Strategy {
    /// Behavior recomputed from density matrices.
    pub fn behavior(&self) -> Result<Behavior> {
        match self {
            Strategy::Sequential { initial, settings } => sequential_behavior(initial, settings),
            Strategy::Bipartite { state, protocol } if protocol.message_dim == 1 => {
                bipartite_behavior(state, &protocol.alice, &protocol.bob[0])
            }
            Strategy::Bipartite { state, protocol } => comm_augmented_behavior(state, protocol),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub best_value: f64,
    pub strategy: Strategy,
    /// Restart that produced the optimum.
    pub best_restart: usize,
    /// Objective after each sweep of the best restart (nondecreasing).
    pub trace: Vec<f64>,
    /// Final value of every restart, by index.
    pub restart_values: Vec<f64>,
    /// `best_value` recomputed through [`Strategy::behavior`].
    pub reevaluated: f64,
}

/// Internal parameter point.
#[derive(Clone, Debug)]
struct Point {
    vecs: Vec<V3>,
    angle: f64,
    message: Vec<usize>,
}

enum Layout {
    Sequential { offsets: Vec<usize>, free_initial: bool },
    Bipartite { nx: usize, ny: usize, dim: usize, fixed: Option<Correlations> },
}

struct Problem {
    terms: Vec<Term>,
    layout: Layout,
    n_vecs: usize,
}

const MAX_ANGLE: f64 = std::f64::consts::FRAC_PI_4;

impl Problem {
    fn new(sc: &Scenario, weights: Vec<f64>, class: &StrategyClass) -> Result<Self> {
        if sc.steps().iter().any(|s| s.outputs != 2) {
            return Err(Error::invalid("quantum strategies here have binary outcomes"));
        }
        let steps = sc.steps();
        let (layout, n_vecs) = match class {
            StrategyClass::SequentialQubit { initial } => {
                let mut offsets = Vec::new();
                let mut n = 1;
                for s in steps {
                    offsets.push(n);
                    n += s.inputs;
                }
                if let InitialState::Fixed(st) = initial {
                    if st.dim() != 2 {
                        return Err(Error::invalid("sequential strategies start from a qubit state"));
                    }
                }
                let free_initial = matches!(initial, InitialState::Free);
                (Layout::Sequential { offsets, free_initial }, n)
            }
            StrategyClass::BipartiteNoComm { state } | StrategyClass::BipartitePlusMessage { state, .. } => {
                if steps.len() != 2 {
                    return Err(Error::invalid("bipartite strategies need a two-step scenario"));
                }
                let dim = match class {
                    StrategyClass::BipartitePlusMessage { message_dim, .. } => *message_dim,
                    _ => 1,
                };
                if dim == 0 {
                    return Err(Error::invalid("message dimension must be positive"));
                }
                let fixed = match state {
                    SharedState::Fixed(st) if st.dim() == 4 => Some(Correlations::of_state(st)),
                    SharedState::Fixed(_) => return Err(Error::invalid("bipartite strategies need a two-qubit state")),
                    SharedState::Schmidt => None,
                };
                let (nx, ny) = (steps[0].inputs, steps[1].inputs);
                (Layout::Bipartite { nx, ny, dim, fixed }, nx + dim * ny)
            }
        };
        Ok(Problem {
            terms: terms(sc, &weights),
            layout,
            n_vecs,
        })
    }

    fn value(&self, p: &Point) -> f64 {
        match &self.layout {
            Layout::Sequential { offsets, .. } => sequential_value(&self.terms, offsets, &p.vecs),
            Layout::Bipartite { nx, ny, fixed, .. } => {
                let corr = match fixed {
                    Some(c) => c.clone(),
                    None => Correlations::schmidt(p.angle),
                };
                bipartite_value(&self.terms, &corr, *nx, *ny, &p.message, &p.vecs)
            }
        }
    }

    fn random_point(&self, rng: &mut ChaCha8Rng, fixed_initial: Option<V3>) -> Point {
        let mut vecs: Vec<V3> = (0..self.n_vecs).map(|_| random_unit(rng)).collect();
        let mut message = Vec::new();
        match &self.layout {
            Layout::Sequential { .. } => {
                if let Some(r) = fixed_initial {
                    vecs[0] = r;
                }
            }
            Layout::Bipartite { nx, dim, .. } => {
                message = (0..2 * nx).map(|_| rng.random_range(0..*dim)).collect();
            }
        }
        Point {
            vecs,
            angle: rng.random::<f64>() * MAX_ANGLE,
            message,
        }
    }

    fn vector_slots(&self) -> Vec<usize> {
        match &self.layout {
            Layout::Sequential { free_initial, .. } => {
                let start = if *free_initial { 0 } else { 1 };
                (start..self.n_vecs).collect()
            }
            Layout::Bipartite { .. } => (0..self.n_vecs).collect(),
        }
    }

    /// One pass over every parameter; returns the new value.
    fn sweep(&self, p: &mut Point, mut cur: f64) -> f64 {
        for slot in self.vector_slots() {
            let old = p.vecs[slot];
            let (m, g, _) = fit_quadratic(|v| {
                p.vecs[slot] = v;
                self.value(p)
            });
            p.vecs[slot] = maximize_on_sphere(&m, &g);
            let new = self.value(p);
            if new >= cur {
                cur = new;
            } else {
                p.vecs[slot] = old;
            }
        }
        if let Layout::Bipartite { dim, fixed, .. } = &self.layout {
            if *dim > 1 {
                for e in 0..p.message.len() {
                    let keep = p.message[e];
                    let mut best = (cur, keep);
                    for m in 0..*dim {
                        p.message[e] = m;
                        let v = self.value(p);
                        if v > best.0 {
                            best = (v, m);
                        }
                    }
                    p.message[e] = best.1;
                    cur = best.0;
                }
            }
            if fixed.is_none() {
                let old = p.angle;
                let t = golden_section(0.0, MAX_ANGLE, |t| {
                    p.angle = t;
                    self.value(p)
                });
                let mut best = (cur, old);
                for cand in [t, 0.0, MAX_ANGLE] {
                    p.angle = cand;
                    let v = self.value(p);
                    if v > best.0 {
                        best = (v, cand);
                    }
                }
                p.angle = best.1;
                cur = best.0;
            }
        }
        cur
    }

    fn strategy(&self, p: &Point, class: &StrategyClass) -> Result<Strategy> {
        let obs = |v: &V3| Observable::from_bloch([v.x, v.y, v.z]);
        match (&self.layout, class) {
            (Layout::Sequential { offsets, .. }, StrategyClass::SequentialQubit { initial }) => {
                let init = match initial {
                    InitialState::Fixed(s) => s.clone(),
                    InitialState::Free => {
                        let r = p.vecs[0];
                        QState::from_bloch([r.x, r.y, r.z])?
                    }
                };
                let mut settings = Vec::new();
                for k in 0..offsets.len() {
                    let end = offsets.get(k + 1).copied().unwrap_or(self.n_vecs);
                    settings.push(p.vecs[offsets[k]..end].iter().map(obs).collect::<Result<Vec<_>>>()?);
                }
                Ok(Strategy::Sequential { initial: init, settings })
            }
            (Layout::Bipartite { nx, ny, dim, .. }, _) => {
                let state = match class {
                    StrategyClass::BipartiteNoComm { state: SharedState::Fixed(s) }
                    | StrategyClass::BipartitePlusMessage {
                        state: SharedState::Fixed(s),
                        ..
                    } => s.clone(),
                    _ => schmidt_state(p.angle),
                };
                let alice = p.vecs[..*nx].iter().map(obs).collect::<Result<Vec<_>>>()?;
                let bob = (0..*dim)
                    .map(|m| p.vecs[nx + m * ny..nx + (m + 1) * ny].iter().map(obs).collect())
                    .collect::<Result<Vec<_>>>()?;
                let message = if p.message.is_empty() {
                    vec![vec![0, 0]; *nx]
                } else {
                    p.message.chunks(2).map(|c| c.to_vec()).collect()
                };
                Ok(Strategy::Bipartite {
                    state,
                    protocol: CommProtocol {
                        alice,
                        message,
                        message_dim: *dim,
                        bob,
                    },
                })
            }
            _ => Err(Error::invalid("strategy class does not match the layout")),
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> V3 {
    let z: f64 = rng.random::<f64>() * 2.0 - 1.0;
    let phi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    let r = (1.0 - z * z).max(0.0).sqrt();
    V3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Maximizer of a one-dimensional function on `[lo, hi]` (local for
/// non-unimodal functions).
fn golden_section(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..80 {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    if fa >= fb {
        a
    } else {
        b
    }
}

fn check_shape(ineq: &Inequality, class: &StrategyClass) -> Result<Vec<f64>> {
    let sc = &ineq.basis.scenario;
    let needs_two = !matches!(class, StrategyClass::SequentialQubit { .. });
    if needs_two && sc.num_steps() != 2 {
        return Err(Error::invalid("inequality scenario does not match the strategy class"));
    }
    let coeffs: Vec<f64> = ineq.coeffs.iter().map(|&c| c as f64).collect();
    ineq.basis.pullback_f64(&coeffs)
}

struct RestartOutcome {
    value: f64,
    point: Point,
    trace: Vec<f64>,
}

fn run_restart(problem: &Problem, class: &StrategyClass, config: &OptimizerConfig, index: usize) -> RestartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let fixed_initial = match class {
        StrategyClass::SequentialQubit {
            initial: InitialState::Fixed(s),
        } => s.bloch().ok().map(|b| V3::new(b[0], b[1], b[2])),
        _ => None,
    };
    let mut point = problem.random_point(&mut rng, fixed_initial);
    let mut value = problem.value(&point);
    let mut trace = vec![value];
    for _ in 0..config.max_sweeps {
        let next = problem.sweep(&mut point, value);
        assert!(next >= value, "see-saw sweep decreased the objective");
        trace.push(next);
        let done = next - value <= config.convergence_tol;
        value = next;
        if done {
            break;
        }
    }
    RestartOutcome { value, point, trace }
}

/// Maximizes the left-hand side of `ineq` over `class`.
pub fn seesaw_maximize(ineq: &Inequality, class: &StrategyClass, config: &OptimizerConfig) -> Result<SeesawResult> {
    config.validate()?;
    let weights = check_shape(ineq, class)?;
    let problem = Problem::new(&ineq.basis.scenario, weights.clone(), class)?;
    let outcomes: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|i| run_restart(&problem, class, config, i))
        .collect();
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = i;
        }
    }
    let o = &outcomes[best];
    let strategy = problem.strategy(&o.point, class)?;
    let behavior = strategy.behavior()?;
    let reevaluated: f64 = weights.iter().zip(behavior.to_f64()).map(|(w, p)| w * p).sum();
    if (reevaluated - o.value).abs() > DRIFT_TOL {
        return Err(Error::Numerical(format!(
            "optimizer value {} drifts from recomputed value {reevaluated}",
            o.value
        )));
    }
    Ok(SeesawResult {
        best_value: o.value,
        strategy,
        best_restart: best,
        trace: o.trace.clone(),
        restart_values: outcomes.iter().map(|o| o.value).collect(),
        reevaluated,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub index: usize,
    pub bound: i64,
    pub best_value: f64,
    pub excess: f64,
    pub flagged: bool,
    pub restarts_used: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub entries: Vec<ScanEntry>,
    pub flagged: usize,
    pub max_excess: f64,
}

/// Runs the see-saw on every inequality and flags excesses above
/// [`VIOLATION_TOL`].
pub fn scan_no_violation(ineqs: &[Inequality], class: &StrategyClass, config: &OptimizerConfig) -> Result<ScanReport> {
    let mut entries = Vec::with_capacity(ineqs.len());
    for (index, q) in ineqs.iter().enumerate() {
        let r = seesaw_maximize(q, class, config)?;
        let excess = r.best_value - q.bound as f64;
        entries.push(ScanEntry {
            index,
            bound: q.bound,
            best_value: r.best_value,
            excess,
            flagged: excess > VIOLATION_TOL,
            restarts_used: config.restarts,
            seed: config.seed,
        });
    }
    let flagged = entries.iter().filter(|e| e.flagged).count();
    let max_excess = entries.iter().map(|e| e.excess).fold(f64::NEG_INFINITY, f64::max);
    Ok(ScanReport {
        entries,
        flagged,
        max_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{ab_terms, Basis};
    use crate::quantum::phi_plus;
    use std::f64::consts::SQRT_2;

    fn chsh() -> Inequality {
        let sc = Scenario::from_shape(&[(2, 2), (2, 2)], &[]).unwrap();
        Inequality::new(Basis::correlator(sc.clone(), ab_terms(&sc)).unwrap(), vec![1, 1, 1, -1], 2).unwrap()
    }

    fn small() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 8,
            seed: 7,
            ..Default::default()
        }
    }

    #[test]
    fn chsh_on_phi_plus() {
        let class = StrategyClass::BipartiteNoComm {
            state: SharedState::Fixed(phi_plus()),
        };
        let r = seesaw_maximize(&chsh(), &class, &small()).unwrap();
        assert!((r.best_value - 2.0 * SQRT_2).abs() < 1e-9);
        assert!(r.trace.windows(2).all(|w| w[1] >= w[0]));
        assert!((r.reevaluated - r.best_value).abs() < DRIFT_TOL);
    }

    #[test]
    fn chsh_with_free_state_finds_maximal_entanglement() {
        let r = seesaw_maximize(&chsh(), &StrategyClass::BipartiteNoComm { state: SharedState::Schmidt }, &small())
            .unwrap();
        assert!((r.best_value - 2.0 * SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn identical_seeds_reproduce() {
        let class = StrategyClass::BipartiteNoComm { state: SharedState::Schmidt };
        let a = seesaw_maximize(&chsh(), &class, &small()).unwrap();
        let b = seesaw_maximize(&chsh(), &class, &small()).unwrap();
        assert_eq!(a.restart_values, b.restart_values);
        assert_eq!(a.strategy, b.strategy);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let sc = Scenario::from_shape(&[(2, 2), (2, 2), (2, 2)], &[]).unwrap();
        let b = Basis::correlator(sc.clone(), crate::basis::ab_bc_terms(&sc)).unwrap();
        let q = Inequality::new(b, vec![1; 12], 12).unwrap();
        let class = StrategyClass::BipartiteNoComm { state: SharedState::Schmidt };
        assert!(seesaw_maximize(&q, &class, &small()).is_err());
    }

    #[test]
    fn golden_section_finds_interior_max() {
        let t = golden_section(0.0, 1.0, |x| -(x - 0.3) * (x - 0.3));
        assert!((t - 0.3).abs() < 1e-7);
    }
}
