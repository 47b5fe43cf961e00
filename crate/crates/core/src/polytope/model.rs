//! Classical causal models as generators of deterministic response
//! functions. Shared randomness is the convex hull of these vertices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::scenario::{Scenario, Values};

use super::VertexSet;

pub const DEFAULT_STRATEGY_CAP: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ModelKind {
    /// Every outcome a function of its own setting and the shared variable.
    #[serde(rename = "LHV")]
    Lhv,
    /// LHV plus a message `m = μ(x_from)` read by the receiving step.
    OneWayMessage { message_dim: usize },
    /// Each outcome may depend on the previous setting and outcome.
    TemporalFull,
    /// As `TemporalFull`, but from the third step on only the previous
    /// setting is passed forward.
    TemporalWeak,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct CausalModel {
    kind: ModelKind,
    scenario: Scenario,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    #[serde(flatten)]
    kind: ModelKind,
    scenario: Scenario,
}

impl TryFrom<ModelRepr> for CausalModel {
    type Error = Error;
    fn try_from(r: ModelRepr) -> Result<Self> {
        CausalModel::new(r.kind, r.scenario)
    }
}

impl From<CausalModel> for ModelRepr {
    fn from(m: CausalModel) -> Self {
        ModelRepr {
            kind: m.kind,
            scenario: m.scenario,
        }
    }
}

/// Source of one parent value of a response function.
#[derive(Clone, Copy, Debug)]
enum Parent {
    Input(usize),
    Output(usize),
    Message,
}

/// A deterministic table from parent values into `0..range`.
#[derive(Clone, Debug)]
struct Component {
    target: Target,
    parents: Vec<Parent>,
    parent_cards: Vec<usize>,
    range: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Target {
    Output(usize),
    Message,
}

impl Component {
    fn domain(&self) -> usize {
        self.parent_cards.iter().product()
    }
}

impl CausalModel {
    pub fn new(kind: ModelKind, scenario: Scenario) -> Result<Self> {
        match kind {
            ModelKind::Lhv => {}
            ModelKind::OneWayMessage { message_dim } => {
                if message_dim == 0 {
                    return Err(Error::invalid("message dimension must be positive"));
                }
                match scenario.messages() {
                    [edge] if edge.dim == message_dim => {}
                    [edge] => {
                        return Err(Error::invalid(format!(
                            "message channel has dimension {} but the model asks for {message_dim}",
                            edge.dim
                        )))
                    }
                    _ => {
                        return Err(Error::invalid(
                            "one-way message model needs exactly one message edge",
                        ))
                    }
                }
            }
            ModelKind::TemporalFull | ModelKind::TemporalWeak => {
                if scenario.num_steps() < 3 {
                    return Err(Error::invalid("temporal models need at least three steps"));
                }
                if !scenario.messages().is_empty() {
                    return Err(Error::invalid("temporal models take no message edges"));
                }
            }
        }
        Ok(CausalModel { kind, scenario })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    fn components(&self) -> Vec<Component> {
        let s = self.scenario.steps();
        let own = |k: usize| Component {
            target: Target::Output(k),
            parents: vec![Parent::Input(k)],
            parent_cards: vec![s[k].inputs],
            range: s[k].outputs,
        };
        let chained = |k: usize| Component {
            target: Target::Output(k),
            parents: vec![Parent::Output(k - 1), Parent::Input(k - 1), Parent::Input(k)],
            parent_cards: vec![s[k - 1].outputs, s[k - 1].inputs, s[k].inputs],
            range: s[k].outputs,
        };
        let setting_only = |k: usize| Component {
            target: Target::Output(k),
            parents: vec![Parent::Input(k - 1), Parent::Input(k)],
            parent_cards: vec![s[k - 1].inputs, s[k].inputs],
            range: s[k].outputs,
        };
        let n = s.len();
        match self.kind {
            ModelKind::Lhv => (0..n).map(own).collect(),
            ModelKind::OneWayMessage { message_dim } => {
                let edge = self.scenario.messages()[0];
                let mut out = vec![Component {
                    target: Target::Message,
                    parents: vec![Parent::Input(edge.from)],
                    parent_cards: vec![s[edge.from].inputs],
                    range: message_dim,
                }];
                for k in 0..n {
                    if k == edge.to {
                        out.push(Component {
                            target: Target::Output(k),
                            parents: vec![Parent::Input(k), Parent::Message],
                            parent_cards: vec![s[k].inputs, message_dim],
                            range: s[k].outputs,
                        });
                    } else {
                        out.push(own(k));
                    }
                }
                out
            }
            ModelKind::TemporalFull => {
                std::iter::once(own(0)).chain((1..n).map(chained)).collect()
            }
            ModelKind::TemporalWeak => std::iter::once(own(0))
                .chain(std::iter::once(chained(1)))
                .chain((2..n).map(setting_only))
                .collect(),
        }
    }

    /// Number of raw deterministic strategies before deduplication, or
    /// `None` if it does not fit in 128 bits.
    pub fn raw_strategy_count(&self) -> Option<u128> {
        self.components().iter().try_fold(1u128, |acc, c| {
            let per = (c.range as u128).checked_pow(c.domain() as u32)?;
            acc.checked_mul(per)
        })
    }
}

/// Evaluates one raw strategy to the output-tuple index of every context.
fn evaluate_strategy(
    sc: &Scenario,
    comps: &[Component],
    mut index: u128,
    inputs: &[Vec<usize>],
    out: &mut Vec<u32>,
) {
    // decode tables: component-major, entries in domain order
    let tables: Vec<Vec<usize>> = comps
        .iter()
        .map(|c| {
            (0..c.domain())
                .map(|_| {
                    let d = (index % c.range as u128) as usize;
                    index /= c.range as u128;
                    d
                })
                .collect()
        })
        .collect();
    let n = sc.num_steps();
    let out_cards = sc.output_cards();
    out.clear();
    let mut outputs = vec![0usize; n];
    for x in inputs {
        let mut message = 0usize;
        for (c, table) in comps.iter().zip(&tables) {
            let mut key = 0usize;
            for (p, &card) in c.parents.iter().zip(&c.parent_cards) {
                let v = match *p {
                    Parent::Input(k) => x[k],
                    Parent::Output(k) => outputs[k],
                    Parent::Message => message,
                };
                key = key * card + v;
            }
            match c.target {
                Target::Output(k) => outputs[k] = table[key],
                Target::Message => message = table[key],
            }
        }
        let mut oi = 0usize;
        for (k, &card) in out_cards.iter().enumerate() {
            oi = oi * card + outputs[k];
        }
        out.push(oi as u32);
    }
}

/// All deterministic vertices of `model` in the probability basis,
/// deduplicated and sorted lexicographically.
pub fn enumerate_vertices(model: &CausalModel) -> Result<VertexSet> {
    enumerate_vertices_with_cap(model, DEFAULT_STRATEGY_CAP)
}

pub fn enumerate_vertices_with_cap(model: &CausalModel, cap: u128) -> Result<VertexSet> {
    let sc = model.scenario();
    let raw = model
        .raw_strategy_count()
        .filter(|&r| r <= cap)
        .ok_or_else(|| {
            Error::CapExceeded(format!(
                "model has more than {cap} raw deterministic strategies"
            ))
        })?;
    let comps = model.components();
    // message components come first so the receiver can read them
    debug_assert!(comps
        .iter()
        .position(|c| c.target == Target::Message)
        .is_none_or(|p| p == 0));
    let inputs: Vec<Vec<usize>> = sc.input_tuples().collect();

    const CHUNK: u128 = 1 << 14;
    let chunks = raw.div_ceil(CHUNK);
    let mut keys: Vec<Vec<u32>> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(raw);
            let mut local: Vec<Vec<u32>> = Vec::new();
            let mut buf = Vec::with_capacity(inputs.len());
            for i in lo..hi {
                evaluate_strategy(sc, &comps, i, &inputs, &mut buf);
                local.push(buf.clone());
            }
            local.sort_unstable();
            local.dedup();
            local
        })
        .collect();
    keys.par_sort_unstable();
    keys.dedup();

    let n_out = sc.num_output_tuples();
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    let mut points: Vec<Vec<Rational>> = keys
        .into_par_iter()
        .map(|k| {
            let mut p = vec![zero; sc.behavior_len()];
            for (ctx, &o) in k.iter().enumerate() {
                p[ctx * n_out + o as usize] = one;
            }
            p
        })
        .collect();
    points.par_sort_unstable();
    Ok(VertexSet {
        model: model.clone(),
        basis: Basis::probability(sc.clone()),
        points,
    })
}

impl VertexSet {
    /// Vertex `i` as an exact behavior (probability basis only).
    pub fn vertex_behavior(&self, i: usize) -> Result<crate::scenario::Behavior> {
        if !self.basis.is_probability() {
            return Err(Error::invalid("vertex behaviors need the probability basis"));
        }
        crate::scenario::Behavior::new(
            self.basis.scenario.clone(),
            Values::Exact(self.points[i].clone()),
        )
    }
}
