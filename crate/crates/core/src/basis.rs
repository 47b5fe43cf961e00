//! Coordinate systems for behaviors: the raw probability basis and
//! subspaces spanned by signed correlators `Σ (-1)^{outcome sum} p(·|·)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};
use crate::scenario::{Behavior, Scenario, Values};

/// `⟨Π_{k ∈ parties} (-1)^{o_k}⟩` at the given inputs. A `None` input is
/// averaged uniformly over that step's settings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CorrelatorTerm {
    pub name: String,
    pub parties: Vec<usize>,
    pub inputs: Vec<Option<usize>>,
}

fn party_letter(k: usize) -> char {
    (b'A' + (k % 26) as u8) as char
}

impl CorrelatorTerm {
    pub fn new(parties: Vec<usize>, inputs: Vec<Option<usize>>) -> Self {
        let letters: String = parties.iter().map(|&k| party_letter(k)).collect();
        let digits: String = inputs
            .iter()
            .map(|i| match i {
                Some(v) => v.to_string(),
                None => "*".into(),
            })
            .collect();
        CorrelatorTerm {
            name: format!("{letters}_{digits}"),
            parties,
            inputs,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn check(&self, sc: &Scenario) -> Result<()> {
        if self.inputs.len() != sc.num_steps() {
            return Err(Error::LengthMismatch {
                expected: sc.num_steps(),
                got: self.inputs.len(),
            });
        }
        for (k, i) in self.inputs.iter().enumerate() {
            if let Some(v) = i {
                if *v >= sc.steps()[k].inputs {
                    return Err(Error::OutOfRange(format!(
                        "term {} fixes input {v} at step {k}",
                        self.name
                    )));
                }
            }
        }
        for &k in &self.parties {
            if k >= sc.num_steps() {
                return Err(Error::OutOfRange(format!("term {} names step {k}", self.name)));
            }
            if sc.steps()[k].outputs != 2 {
                return Err(Error::invalid(format!(
                    "correlator {} needs binary outcomes at step {k}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Dense row over the probability basis.
    pub fn functional(&self, sc: &Scenario) -> Result<Vec<Rational>> {
        self.check(sc)?;
        let free: i64 = self
            .inputs
            .iter()
            .zip(sc.steps())
            .filter(|(i, _)| i.is_none())
            .map(|(_, s)| s.inputs as i64)
            .product();
        let w = Rational::new(1, free);
        let mut row = vec![Rational::from_integer(0); sc.behavior_len()];
        for (i, r) in row.iter_mut().enumerate() {
            let (x, a) = sc.decode_index(i);
            if self
                .inputs
                .iter()
                .zip(&x)
                .any(|(fixed, xi)| fixed.is_some_and(|f| f != *xi))
            {
                continue;
            }
            let parity: usize = self.parties.iter().map(|&k| a[k]).sum();
            *r = if parity % 2 == 0 { w } else { -w };
        }
        Ok(row)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Probability,
    Correlator(Vec<CorrelatorTerm>),
}

/// Coordinates in which points, vertices and inequalities are expressed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Basis {
    pub scenario: Scenario,
    pub kind: BasisKind,
}

impl Basis {
    pub fn probability(scenario: Scenario) -> Self {
        Basis {
            scenario,
            kind: BasisKind::Probability,
        }
    }

    pub fn correlator(scenario: Scenario, terms: Vec<CorrelatorTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("correlator basis needs at least one term"));
        }
        for t in &terms {
            t.check(&scenario)?;
        }
        Ok(Basis {
            scenario,
            kind: BasisKind::Correlator(terms),
        })
    }

    pub fn is_probability(&self) -> bool {
        matches!(self.kind, BasisKind::Probability)
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            BasisKind::Probability => self.scenario.behavior_len(),
            BasisKind::Correlator(t) => t.len(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        match &self.kind {
            BasisKind::Probability => (0..self.scenario.behavior_len())
                .map(|i| {
                    let (x, a) = self.scenario.decode_index(i);
                    let f = |v: &[usize]| v.iter().map(|d| d.to_string()).collect::<String>();
                    format!("p({}|{})", f(&a), f(&x))
                })
                .collect(),
            BasisKind::Correlator(t) => t.iter().map(|t| t.name.clone()).collect(),
        }
    }

    /// Rows of the linear map from the probability basis; `None` for the identity.
    pub fn functional_matrix(&self) -> Result<Option<Vec<Vec<Rational>>>> {
        match &self.kind {
            BasisKind::Probability => Ok(None),
            BasisKind::Correlator(t) => t
                .iter()
                .map(|t| t.functional(&self.scenario))
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    fn check_len(&self, got: usize) -> Result<()> {
        let expected = self.scenario.behavior_len();
        if got != expected {
            return Err(Error::LengthMismatch { expected, got });
        }
        Ok(())
    }

    pub fn project_exact(&self, p: &[Rational]) -> Result<Vec<Rational>> {
        self.check_len(p.len())?;
        Ok(match self.functional_matrix()? {
            None => p.to_vec(),
            Some(m) => m
                .iter()
                .map(|row| row.iter().zip(p).map(|(a, b)| a * b).sum())
                .collect(),
        })
    }

    pub fn project_f64(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_len(p.len())?;
        Ok(match self.functional_matrix()? {
            None => p.to_vec(),
            Some(m) => m
                .iter()
                .map(|row| row.iter().zip(p).map(|(a, b)| to_f64(a) * b).sum())
                .collect(),
        })
    }

    /// Pulls a functional on this basis back to the probability basis.
    pub fn pullback_f64(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                got: coeffs.len(),
            });
        }
        Ok(match self.functional_matrix()? {
            None => coeffs.to_vec(),
            Some(m) => {
                let mut out = vec![0.0; self.scenario.behavior_len()];
                for (c, row) in coeffs.iter().zip(&m) {
                    for (o, r) in out.iter_mut().zip(row) {
                        *o += c * to_f64(r);
                    }
                }
                out
            }
        })
    }
}

/// Applies the basis map to a behavior, keeping exact values exact.
pub fn project_behavior(behavior: &Behavior, basis: &Basis) -> Result<Values> {
    if !behavior.scenario().same_layout(&basis.scenario) {
        return Err(Error::invalid("behavior and basis scenarios differ"));
    }
    Ok(match behavior.values() {
        Values::Exact(v) => Values::Exact(basis.project_exact(v)?),
        Values::Float(v) => Values::Float(basis.project_f64(v)?),
    })
}

/// ⟨A_x B_y⟩ for every setting pair of a bipartite binary scenario, x-major.
pub fn ab_terms(sc: &Scenario) -> Vec<CorrelatorTerm> {
    let mut out = Vec::new();
    for x in 0..sc.steps()[0].inputs {
        for y in 0..sc.steps()[1].inputs {
            let mut inputs = vec![None; sc.num_steps()];
            inputs[0] = Some(x);
            inputs[1] = Some(y);
            out.push(CorrelatorTerm::new(vec![0, 1], inputs).named(format!("A{x}B{y}")));
        }
    }
    out
}

/// ⟨B_{xy}⟩ = Σ (-1)^b p(a,b|x,y) for a two-step scenario, x-major.
pub fn second_party_terms(sc: &Scenario) -> Vec<CorrelatorTerm> {
    let mut out = Vec::new();
    for x in 0..sc.steps()[0].inputs {
        for y in 0..sc.steps()[1].inputs {
            out.push(
                CorrelatorTerm::new(vec![1], vec![Some(x), Some(y)]).named(format!("B{x}{y}")),
            );
        }
    }
    out
}

/// The 12-dimensional ⟨AB_{x,y}⟩, ⟨BC_{x,y,z}⟩ subspace of a binary
/// three-step scenario. ⟨AB⟩ averages over the third setting.
pub fn ab_bc_terms(sc: &Scenario) -> Vec<CorrelatorTerm> {
    let s = sc.steps();
    let mut out = Vec::new();
    for x in 0..s[0].inputs {
        for y in 0..s[1].inputs {
            out.push(
                CorrelatorTerm::new(vec![0, 1], vec![Some(x), Some(y), None])
                    .named(format!("AB_{x}{y}")),
            );
        }
    }
    for x in 0..s[0].inputs {
        for y in 0..s[1].inputs {
            for z in 0..s[2].inputs {
                out.push(
                    CorrelatorTerm::new(vec![1, 2], vec![Some(x), Some(y), Some(z)])
                        .named(format!("BC_{x}{y}{z}")),
                );
            }
        }
    }
    out
}

/// Every nonempty party subset at every full input tuple.
pub fn full_correlator_terms(sc: &Scenario) -> Vec<CorrelatorTerm> {
    let n = sc.num_steps();
    let mut out = Vec::new();
    for mask in 1usize..(1 << n) {
        let parties: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
        for x in sc.input_tuples() {
            out.push(CorrelatorTerm::new(
                parties.clone(),
                x.iter().map(|&v| Some(v)).collect(),
            ));
        }
    }
    out
}

/// Named correlator values of a behavior.
pub fn correlators(behavior: &Behavior, terms: &[CorrelatorTerm]) -> Result<Vec<(String, f64)>> {
    let p = behavior.to_f64();
    terms
        .iter()
        .map(|t| {
            let row = t.functional(behavior.scenario())?;
            Ok((
                t.name.clone(),
                row.iter().zip(&p).map(|(r, v)| to_f64(r) * v).sum(),
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> Scenario {
        Scenario::from_shape(&[(2, 2), (2, 2), (2, 2)], &[]).unwrap()
    }

    #[test]
    fn deterministic_zero_strategy_has_unit_correlators() {
        let sc = tri();
        let b = Behavior::from_fn(&sc, |_, a| if a == [0, 0, 0] { 1.0 } else { 0.0 });
        let basis = Basis::correlator(sc.clone(), ab_bc_terms(&sc)).unwrap();
        let v = project_behavior(&b, &basis).unwrap().to_f64();
        assert_eq!(v.len(), 12);
        assert!(v.iter().all(|&c| c == 1.0));
    }

    #[test]
    fn uniform_behavior_has_zero_correlators() {
        let sc = tri();
        let basis = Basis::correlator(sc.clone(), ab_bc_terms(&sc)).unwrap();
        let v = project_behavior(&Behavior::uniform(&sc), &basis).unwrap();
        match v {
            Values::Exact(v) => assert!(v.iter().all(|c| *c == Rational::from_integer(0))),
            _ => panic!("exact input should stay exact"),
        }
    }

    #[test]
    fn rejects_non_binary_and_bad_terms() {
        let sc = Scenario::from_shape(&[(2, 3), (2, 2)], &[]).unwrap();
        assert!(Basis::correlator(sc.clone(), ab_terms(&sc)).is_err());
        let sc = tri();
        let t = CorrelatorTerm::new(vec![0], vec![Some(2), None, None]);
        assert!(Basis::correlator(sc.clone(), vec![t]).is_err());
        let basis = Basis::correlator(sc.clone(), ab_bc_terms(&sc)).unwrap();
        assert!(basis.project_f64(&[0.0; 10]).is_err());
    }

    #[test]
    fn pullback_matches_projection() {
        let sc = tri();
        let basis = Basis::correlator(sc.clone(), ab_bc_terms(&sc)).unwrap();
        let b = Behavior::from_fn(&sc, |x, a| {
            let w = [0.1, 0.2, 0.3, 0.4, 0.15, 0.25, 0.35, 0.25];
            let i = a[0] * 4 + a[1] * 2 + a[2];
            w[i] / w.iter().sum::<f64>() * if x[0] == 1 { 1.0 } else { 1.0 }
        });
        let c: Vec<f64> = (0..12).map(|i| i as f64 - 5.5).collect();
        let proj = basis.project_f64(&b.to_f64()).unwrap();
        let direct: f64 = c.iter().zip(&proj).map(|(a, b)| a * b).sum();
        let pulled = basis.pullback_f64(&c).unwrap();
        let via: f64 = pulled.iter().zip(b.to_f64()).map(|(a, b)| a * b).sum();
        assert!((direct - via).abs() < 1e-12);
    }
}
