//! Measurement scenarios, canonically indexed behaviors and the diagnostics
//! that read conditional independences and signaling off a behavior.
//!
//! Behaviors are flat vectors over `(inputs, outputs)` tuples. The index is
//! mixed-radix with every input coordinate more significant than every
//! output coordinate, and earlier steps more significant than later ones.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

pub const DEFAULT_VALIDITY_TOL: f64 = 1e-9;
pub const DEFAULT_INDEPENDENCE_TOL: f64 = 1e-10;

/// Conditioning events lighter than this are treated as impossible.
const ZERO_EVENT: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub inputs: usize,
    pub outputs: usize,
}

impl Step {
    pub fn new(inputs: usize, outputs: usize) -> Self {
        Step { inputs, outputs }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MessageEdge {
    pub from: usize,
    pub to: usize,
    pub dim: usize,
}

#[derive(Serialize, Deserialize)]
struct ScenarioRepr {
    steps: Vec<Step>,
    #[serde(default)]
    messages: Vec<MessageEdge>,
}

/// Time-ordered steps, each with an input (setting) and output (outcome)
/// alphabet, plus bounded forward message channels between steps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRepr", into = "ScenarioRepr")]
pub struct Scenario {
    steps: Vec<Step>,
    messages: Vec<MessageEdge>,
}

impl TryFrom<ScenarioRepr> for Scenario {
    type Error = Error;
    fn try_from(r: ScenarioRepr) -> Result<Self> {
        Scenario::new(r.steps, r.messages)
    }
}

impl From<Scenario> for ScenarioRepr {
    fn from(s: Scenario) -> Self {
        ScenarioRepr {
            steps: s.steps,
            messages: s.messages,
        }
    }
}

impl Scenario {
    pub fn new(steps: Vec<Step>, messages: Vec<MessageEdge>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::invalid("scenario needs at least one step"));
        }
        for (i, s) in steps.iter().enumerate() {
            if s.inputs == 0 || s.outputs == 0 {
                return Err(Error::invalid(format!("step {i} has a zero cardinality")));
            }
        }
        for m in &messages {
            if m.from >= m.to {
                return Err(Error::invalid(format!(
                    "message edge {} -> {} does not point forward in time",
                    m.from, m.to
                )));
            }
            if m.to >= steps.len() {
                return Err(Error::invalid(format!("message edge targets missing step {}", m.to)));
            }
            if m.dim == 0 {
                return Err(Error::invalid("message dimension must be positive"));
            }
        }
        for (i, a) in messages.iter().enumerate() {
            if messages[..i].iter().any(|b| b.from == a.from && b.to == a.to) {
                return Err(Error::invalid("more than one message channel per ordered pair"));
            }
        }
        let s = Scenario { steps, messages };
        s.behavior_len_checked()?;
        Ok(s)
    }

    /// Shorthand for `new` from `(inputs, outputs)` and `(from, to, dim)` triples.
    pub fn from_shape(steps: &[(usize, usize)], messages: &[(usize, usize, usize)]) -> Result<Self> {
        Scenario::new(
            steps.iter().map(|&(i, o)| Step::new(i, o)).collect(),
            messages
                .iter()
                .map(|&(from, to, dim)| MessageEdge { from, to, dim })
                .collect(),
        )
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn messages(&self) -> &[MessageEdge] {
        &self.messages
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    fn behavior_len_checked(&self) -> Result<usize> {
        self.steps
            .iter()
            .try_fold(1usize, |acc, s| acc.checked_mul(s.inputs)?.checked_mul(s.outputs))
            .ok_or_else(|| Error::CapExceeded("behavior length overflows".into()))
    }

    pub fn num_input_tuples(&self) -> usize {
        self.steps.iter().map(|s| s.inputs).product()
    }

    pub fn num_output_tuples(&self) -> usize {
        self.steps.iter().map(|s| s.outputs).product()
    }

    pub fn behavior_len(&self) -> usize {
        self.num_input_tuples() * self.num_output_tuples()
    }

    /// Same steps, ignoring message channels.
    pub fn same_layout(&self, other: &Scenario) -> bool {
        self.steps == other.steps
    }

    pub fn input_cards(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.inputs).collect()
    }

    pub fn output_cards(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.outputs).collect()
    }

    pub fn input_index(&self, inputs: &[usize]) -> Result<usize> {
        mixed_radix_index(inputs, &self.input_cards(), "input")
    }

    pub fn output_index(&self, outputs: &[usize]) -> Result<usize> {
        mixed_radix_index(outputs, &self.output_cards(), "output")
    }

    pub fn behavior_index(&self, inputs: &[usize], outputs: &[usize]) -> Result<usize> {
        Ok(self.input_index(inputs)? * self.num_output_tuples() + self.output_index(outputs)?)
    }

    /// Inverse of `behavior_index`.
    pub fn decode_index(&self, index: usize) -> (Vec<usize>, Vec<usize>) {
        let n_out = self.num_output_tuples();
        (
            mixed_radix_digits(index / n_out, &self.input_cards()),
            mixed_radix_digits(index % n_out, &self.output_cards()),
        )
    }

    pub fn input_tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let cards = self.input_cards();
        (0..self.num_input_tuples()).map(move |i| mixed_radix_digits(i, &cards))
    }

    pub fn output_tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let cards = self.output_cards();
        (0..self.num_output_tuples()).map(move |i| mixed_radix_digits(i, &cards))
    }
}

pub(crate) fn mixed_radix_index(digits: &[usize], cards: &[usize], what: &str) -> Result<usize> {
    if digits.len() != cards.len() {
        return Err(Error::LengthMismatch {
            expected: cards.len(),
            got: digits.len(),
        });
    }
    let mut idx = 0usize;
    for (k, (&d, &c)) in digits.iter().zip(cards).enumerate() {
        if d >= c {
            return Err(Error::OutOfRange(format!(
                "{what} {d} at step {k} exceeds cardinality {c}"
            )));
        }
        idx = idx * c + d;
    }
    Ok(idx)
}

pub(crate) fn mixed_radix_digits(mut index: usize, cards: &[usize]) -> Vec<usize> {
    let mut out = vec![0; cards.len()];
    for k in (0..cards.len()).rev() {
        out[k] = index % cards[k];
        index /= cards[k];
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumberMode {
    Rational,
    Float,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Exact(v) => v.len(),
            Values::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> NumberMode {
        match self {
            Values::Exact(_) => NumberMode::Rational,
            Values::Float(_) => NumberMode::Float,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Values::Exact(v) => v.iter().map(to_f64).collect(),
            Values::Float(v) => v.clone(),
        }
    }
}

/// Conditional distribution `p(outputs | inputs)` over a scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior {
    scenario: Scenario,
    values: Values,
}

impl Behavior {
    pub fn new(scenario: Scenario, values: Values) -> Result<Self> {
        if values.len() != scenario.behavior_len() {
            return Err(Error::LengthMismatch {
                expected: scenario.behavior_len(),
                got: values.len(),
            });
        }
        Ok(Behavior { scenario, values })
    }

    pub fn from_f64(scenario: Scenario, values: Vec<f64>) -> Result<Self> {
        Behavior::new(scenario, Values::Float(values))
    }

    /// Every context uniform over its output tuples.
    pub fn uniform(scenario: &Scenario) -> Self {
        let n_out = scenario.num_output_tuples() as i64;
        Behavior {
            scenario: scenario.clone(),
            values: Values::Exact(vec![Rational::new(1, n_out); scenario.behavior_len()]),
        }
    }

    /// Builds a float behavior from `p(outputs | inputs)`.
    pub fn from_fn(scenario: &Scenario, mut f: impl FnMut(&[usize], &[usize]) -> f64) -> Self {
        let values = (0..scenario.behavior_len())
            .map(|i| {
                let (x, a) = scenario.decode_index(i);
                f(&x, &a)
            })
            .collect();
        Behavior {
            scenario: scenario.clone(),
            values: Values::Float(values),
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn mode(&self) -> NumberMode {
        self.values.mode()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.to_f64()
    }

    pub fn as_float(&self) -> Behavior {
        Behavior {
            scenario: self.scenario.clone(),
            values: Values::Float(self.to_f64()),
        }
    }

    pub fn prob(&self, inputs: &[usize], outputs: &[usize]) -> Result<f64> {
        let i = self.scenario.behavior_index(inputs, outputs)?;
        Ok(match &self.values {
            Values::Exact(v) => to_f64(&v[i]),
            Values::Float(v) => v[i],
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidityReport {
    pub nonnegative: bool,
    pub normalized: bool,
    /// Smallest entry and its index.
    pub min_entry: (f64, usize),
    /// Largest |sum - 1| over contexts and the offending input tuple.
    pub worst_normalization: (f64, Vec<usize>),
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.nonnegative && self.normalized
    }
}

/// Checks nonnegativity and per-context normalization. Exact behaviors are
/// checked exactly; `tol` applies to float behaviors only.
pub fn validate_behavior(behavior: &Behavior, tol: f64) -> ValidityReport {
    let sc = &behavior.scenario;
    let n_out = sc.num_output_tuples();
    let mut min_entry = (f64::INFINITY, 0);
    let mut worst = (0.0f64, vec![0; sc.num_steps()]);
    let (nonnegative, normalized) = match &behavior.values {
        Values::Exact(v) => {
            let mut nonneg = true;
            let mut norm = true;
            for (i, x) in v.iter().enumerate() {
                let xf = to_f64(x);
                if xf < min_entry.0 {
                    min_entry = (xf, i);
                }
                if *x < Rational::from_integer(0) {
                    nonneg = false;
                }
            }
            for (c, chunk) in v.chunks(n_out).enumerate() {
                let s: Rational = chunk.iter().sum();
                let off = (to_f64(&s) - 1.0).abs();
                if s != Rational::from_integer(1) {
                    norm = false;
                }
                if off > worst.0 {
                    worst = (off, mixed_radix_digits(c, &sc.input_cards()));
                }
            }
            (nonneg, norm)
        }
        Values::Float(v) => {
            for (i, &x) in v.iter().enumerate() {
                if x < min_entry.0 || x.is_nan() {
                    min_entry = (x, i);
                }
            }
            for (c, chunk) in v.chunks(n_out).enumerate() {
                let off = (chunk.iter().sum::<f64>() - 1.0).abs();
                if off > worst.0 || off.is_nan() {
                    worst = (off, mixed_radix_digits(c, &sc.input_cards()));
                }
            }
            (min_entry.0 >= -tol, worst.0 <= tol)
        }
    };
    ValidityReport {
        nonnegative,
        normalized,
        min_entry,
        worst_normalization: worst,
    }
}

/// A setting or outcome variable of a scenario step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    Setting(usize),
    Outcome(usize),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IndependenceQuery {
    pub left: Vec<Var>,
    pub right: Vec<Var>,
    pub conditioning: Vec<Var>,
    /// Distribution over input tuples in canonical order; uniform when `None`.
    pub input_distribution: Option<Vec<f64>>,
}

impl IndependenceQuery {
    pub fn new(left: Vec<Var>, right: Vec<Var>) -> Self {
        IndependenceQuery {
            left,
            right,
            ..Default::default()
        }
    }

    pub fn given(mut self, conditioning: Vec<Var>) -> Self {
        self.conditioning = conditioning;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceResult {
    pub holds: bool,
    pub max_deviation: f64,
    /// Conditioning values with zero probability, skipped.
    pub skipped_conditions: usize,
}

/// Joint distribution over all settings and outcomes, marginalized onto a
/// list of variables. Returned as a dense table indexed mixed-radix.
fn marginal_table(
    sc: &Scenario,
    joint: &[f64],
    vars: &[Var],
) -> (Vec<f64>, Vec<usize>) {
    let cards: Vec<usize> = vars
        .iter()
        .map(|v| match *v {
            Var::Setting(k) => sc.steps()[k].inputs,
            Var::Outcome(k) => sc.steps()[k].outputs,
        })
        .collect();
    let size: usize = cards.iter().product();
    let mut table = vec![0.0; size];
    for (i, &w) in joint.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let (x, a) = sc.decode_index(i);
        let mut idx = 0;
        for (v, &c) in vars.iter().zip(&cards) {
            let d = match *v {
                Var::Setting(k) => x[k],
                Var::Outcome(k) => a[k],
            };
            idx = idx * c + d;
        }
        table[idx] += w;
    }
    (table, cards)
}

fn check_vars(sc: &Scenario, vars: &[Var]) -> Result<()> {
    for v in vars {
        let k = match *v {
            Var::Setting(k) | Var::Outcome(k) => k,
        };
        if k >= sc.num_steps() {
            return Err(Error::OutOfRange(format!("variable {v:?} names a missing step")));
        }
    }
    Ok(())
}

/// Tests `left ⫫ right | conditioning` on the joint distribution obtained by
/// weighting each context with the query's input distribution.
pub fn check_independence(
    behavior: &Behavior,
    query: &IndependenceQuery,
    tol: f64,
) -> Result<IndependenceResult> {
    let sc = behavior.scenario();
    check_vars(sc, &query.left)?;
    check_vars(sc, &query.right)?;
    check_vars(sc, &query.conditioning)?;
    let mut seen = std::collections::HashSet::new();
    for v in query.left.iter().chain(&query.right).chain(&query.conditioning) {
        if !seen.insert(*v) {
            return Err(Error::invalid(format!("variable {v:?} appears in more than one set")));
        }
    }
    if query.left.is_empty() || query.right.is_empty() {
        return Err(Error::invalid("independence query needs nonempty left and right sets"));
    }
    let n_in = sc.num_input_tuples();
    let q: Vec<f64> = match &query.input_distribution {
        Some(d) => {
            if d.len() != n_in {
                return Err(Error::LengthMismatch {
                    expected: n_in,
                    got: d.len(),
                });
            }
            d.clone()
        }
        None => vec![1.0 / n_in as f64; n_in],
    };
    let n_out = sc.num_output_tuples();
    let p = behavior.to_f64();
    let joint: Vec<f64> = p
        .iter()
        .enumerate()
        .map(|(i, &v)| v * q[i / n_out])
        .collect();

    let all: Vec<Var> = query
        .conditioning
        .iter()
        .chain(&query.left)
        .chain(&query.right)
        .copied()
        .collect();
    let (lrc, _) = marginal_table(sc, &joint, &all);
    let cond_l: Vec<Var> = query.conditioning.iter().chain(&query.left).copied().collect();
    let cond_r: Vec<Var> = query.conditioning.iter().chain(&query.right).copied().collect();
    let (lc, _) = marginal_table(sc, &joint, &cond_l);
    let (rc, _) = marginal_table(sc, &joint, &cond_r);
    let (c, _) = marginal_table(sc, &joint, &query.conditioning);
    let n_l = lc.len() / c.len();
    let n_r = rc.len() / c.len();

    let mut max_dev = 0.0f64;
    let mut skipped = 0;
    for ci in 0..c.len() {
        let pc = c[ci];
        if pc <= ZERO_EVENT {
            skipped += 1;
            continue;
        }
        for li in 0..n_l {
            let pl = lc[ci * n_l + li] / pc;
            for ri in 0..n_r {
                let pr = rc[ci * n_r + ri] / pc;
                let plr = lrc[(ci * n_l + li) * n_r + ri] / pc;
                max_dev = max_dev.max((plr - pl * pr).abs());
            }
        }
    }
    Ok(IndependenceResult {
        holds: max_dev <= tol,
        max_deviation: max_dev,
        skipped_conditions: skipped,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignalingDirection {
    /// Outcomes at steps `0..=through_step` depending on later inputs.
    ArrowOfTime { through_step: usize },
    /// Outcome at step `to` depending on the input at earlier step `from`.
    Forward { from: usize, to: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalingEntry {
    pub direction: SignalingDirection,
    pub violated: bool,
    /// Largest total-variation distance between the compared marginals.
    pub magnitude: f64,
}

fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Per context, the marginal over outcomes of the listed steps.
fn outcome_marginals(sc: &Scenario, p: &[f64], keep: &[usize]) -> HashMap<Vec<usize>, Vec<f64>> {
    let out_cards: Vec<usize> = keep.iter().map(|&k| sc.steps()[k].outputs).collect();
    let size: usize = out_cards.iter().product();
    let mut map: HashMap<Vec<usize>, Vec<f64>> = HashMap::new();
    for (i, &v) in p.iter().enumerate() {
        let (x, a) = sc.decode_index(i);
        let mut idx = 0;
        for (&k, &c) in keep.iter().zip(&out_cards) {
            idx = idx * c + a[k];
        }
        map.entry(x).or_insert_with(|| vec![0.0; size])[idx] += v;
    }
    map
}

pub fn signaling_profile(behavior: &Behavior, tol: f64) -> Vec<SignalingEntry> {
    let sc = behavior.scenario();
    let p = behavior.to_f64();
    let n = sc.num_steps();
    let inputs: Vec<Vec<usize>> = sc.input_tuples().collect();
    let mut out = Vec::new();

    for i in 0..n.saturating_sub(1) {
        let keep: Vec<usize> = (0..=i).collect();
        let m = outcome_marginals(sc, &p, &keep);
        let mut mag = 0.0f64;
        for (ai, xa) in inputs.iter().enumerate() {
            for xb in &inputs[ai + 1..] {
                if xa[..=i] == xb[..=i] {
                    mag = mag.max(total_variation(&m[xa], &m[xb]));
                }
            }
        }
        out.push(SignalingEntry {
            direction: SignalingDirection::ArrowOfTime { through_step: i },
            violated: mag > tol,
            magnitude: mag,
        });
    }

    for to in 1..n {
        let m = outcome_marginals(sc, &p, &[to]);
        for from in 0..to {
            let mut mag = 0.0f64;
            for x in &inputs {
                for alt in (x[from] + 1)..sc.steps()[from].inputs {
                    let mut y = x.clone();
                    y[from] = alt;
                    mag = mag.max(total_variation(&m[x], &m[&y]));
                }
            }
            out.push(SignalingEntry {
                direction: SignalingDirection::Forward { from, to },
                violated: mag > tol,
                magnitude: mag,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bip(nx: usize, ny: usize) -> Scenario {
        Scenario::from_shape(&[(nx, 2), (ny, 2)], &[]).unwrap()
    }

    #[test]
    fn paper_scenarios_have_expected_lengths() {
        let s = Scenario::from_shape(&[(3, 2), (3, 2)], &[(0, 1, 2)]).unwrap();
        assert_eq!(s.behavior_len(), 36);
        let s = Scenario::from_shape(&[(2, 2), (2, 2), (2, 2)], &[]).unwrap();
        assert_eq!(s.behavior_len(), 64);
        let s = Scenario::from_shape(&[(3, 2), (2, 2)], &[(0, 1, 2)]).unwrap();
        assert_eq!(s.behavior_len(), 24);
    }

    #[test]
    fn rejects_bad_scenarios() {
        assert!(Scenario::from_shape(&[(0, 2)], &[]).is_err());
        assert!(Scenario::from_shape(&[(2, 0)], &[]).is_err());
        assert!(Scenario::from_shape(&[(2, 2), (2, 2)], &[(1, 0, 2)]).is_err());
        assert!(Scenario::from_shape(&[(2, 2), (2, 2)], &[(1, 1, 2)]).is_err());
        assert!(Scenario::from_shape(&[(2, 2), (2, 2)], &[(0, 2, 2)]).is_err());
    }

    #[test]
    fn index_examples() {
        let s = bip(3, 3);
        assert_eq!(s.behavior_index(&[0, 0], &[0, 0]).unwrap(), 0);
        assert_eq!(s.behavior_index(&[1, 2], &[1, 0]).unwrap(), 22);
        let t = Scenario::from_shape(&[(2, 2), (2, 2), (2, 2)], &[]).unwrap();
        assert_eq!(t.behavior_index(&[1, 1, 1], &[1, 1, 1]).unwrap(), 63);
        assert!(s.behavior_index(&[3, 0], &[0, 0]).is_err());
        assert!(s.behavior_index(&[0, 0], &[0, 2]).is_err());
    }

    #[test]
    fn validity_examples() {
        let s = bip(2, 2);
        let u = Behavior::uniform(&s);
        assert!(validate_behavior(&u, 1e-9).is_valid());

        let mut v = vec![0.25; 16];
        v[0] = -0.1;
        v[1] = 0.6;
        let r = validate_behavior(&Behavior::from_f64(s.clone(), v).unwrap(), 1e-9);
        assert!(!r.nonnegative);
        assert_eq!(r.min_entry.1, 0);

        let mut v = vec![0.25; 16];
        v[0] = 0.249;
        let r = validate_behavior(&Behavior::from_f64(s.clone(), v).unwrap(), 1e-6);
        assert!(r.nonnegative && !r.normalized);
        assert!((r.worst_normalization.0 - 0.001).abs() < 1e-12);

        assert!(Behavior::from_f64(s, vec![0.0; 3]).is_err());
    }

    #[test]
    fn copy_of_setting_is_dependent() {
        // one binary step after another: c = x copies the first setting
        let s = bip(2, 2);
        let b = Behavior::from_fn(&s, |x, a| if a[1] == x[0] && a[0] == 0 { 1.0 } else { 0.0 });
        let r = check_independence(
            &b,
            &IndependenceQuery::new(vec![Var::Setting(0)], vec![Var::Outcome(1)]),
            1e-10,
        )
        .unwrap();
        assert!(!r.holds);
        assert!((r.max_deviation - 0.25).abs() < 1e-12);
    }

    #[test]
    fn product_behavior_is_independent() {
        let s = bip(3, 2);
        let pa = [0.3, 0.7];
        let pb = [[0.1, 0.9], [0.6, 0.4]];
        let b = Behavior::from_fn(&s, |x, a| pa[a[0]] * pb[x[1]][a[1]]);
        let r = check_independence(
            &b,
            &IndependenceQuery::new(vec![Var::Outcome(0)], vec![Var::Outcome(1)]),
            1e-10,
        )
        .unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn zero_probability_conditions_are_skipped() {
        let s = bip(2, 2);
        let b = Behavior::from_fn(&s, |_, a| if a == [0, 0] { 1.0 } else { 0.0 });
        let r = check_independence(
            &b,
            &IndependenceQuery::new(vec![Var::Setting(0)], vec![Var::Outcome(1)])
                .given(vec![Var::Outcome(0)]),
            1e-10,
        )
        .unwrap();
        assert!(r.holds);
        assert_eq!(r.skipped_conditions, 1);
    }

    #[test]
    fn query_errors() {
        let s = bip(2, 2);
        let b = Behavior::uniform(&s);
        let q = IndependenceQuery::new(vec![Var::Setting(0)], vec![Var::Setting(0)]);
        assert!(check_independence(&b, &q, 1e-10).is_err());
        let q = IndependenceQuery::new(vec![Var::Setting(5)], vec![Var::Outcome(0)]);
        assert!(check_independence(&b, &q, 1e-10).is_err());
    }

    #[test]
    fn signaling_detects_forward_dependence() {
        let s = bip(2, 2);
        // b copies x: forward signaling 0 -> 1, none backwards
        let b = Behavior::from_fn(&s, |x, a| if a[0] == 0 && a[1] == x[0] { 1.0 } else { 0.0 });
        let prof = signaling_profile(&b, 1e-12);
        assert_eq!(prof.len(), 2);
        assert_eq!(prof[0].direction, SignalingDirection::ArrowOfTime { through_step: 0 });
        assert!(!prof[0].violated);
        assert_eq!(prof[1].direction, SignalingDirection::Forward { from: 0, to: 1 });
        assert!(prof[1].violated);
        assert!((prof[1].magnitude - 1.0).abs() < 1e-12);
    }

    #[test]
    fn signaling_detects_retrocausal_dependence() {
        let s = bip(2, 2);
        let b = Behavior::from_fn(&s, |x, a| if a[0] == x[1] && a[1] == 0 { 1.0 } else { 0.0 });
        let prof = signaling_profile(&b, 1e-12);
        assert!(prof[0].violated);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn behavior_index_is_a_bijection(cards in proptest::collection::vec((1usize..4, 1usize..4), 1..4)) {
                let s = Scenario::from_shape(&cards, &[]).unwrap();
                let mut seen = vec![false; s.behavior_len()];
                for x in s.input_tuples() {
                    for a in s.output_tuples() {
                        let i = s.behavior_index(&x, &a).unwrap();
                        prop_assert!(!seen[i]);
                        seen[i] = true;
                        prop_assert_eq!(s.decode_index(i), (x.clone(), a.clone()));
                    }
                }
                prop_assert!(seen.into_iter().all(|b| b));
            }

            #[test]
            fn uniform_is_valid(cards in proptest::collection::vec((1usize..4, 1usize..4), 1..4)) {
                let s = Scenario::from_shape(&cards, &[]).unwrap();
                prop_assert!(validate_behavior(&Behavior::uniform(&s), 0.0).is_valid());
            }
        }
    }
}
