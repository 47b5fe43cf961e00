//! The paper's named inequalities and quantum protocols.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::{ab_bc_terms, ab_terms, correlators, second_party_terms, Basis};
use crate::error::{Error, Result};
use crate::polytope::Inequality;
use crate::quantum::{comm_augmented_behavior, family_state, sequential_behavior, CommProtocol, Observable, QState};
use crate::scenario::{Behavior, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InequalityId {
    S1bit,
    Stau3,
    DimWitness,
    #[serde(rename = "CHSH_sub")]
    ChshSub,
}

impl InequalityId {
    pub const ALL: [InequalityId; 4] = [
        InequalityId::S1bit,
        InequalityId::Stau3,
        InequalityId::DimWitness,
        InequalityId::ChshSub,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            InequalityId::S1bit => "S1bit",
            InequalityId::Stau3 => "Stau3",
            InequalityId::DimWitness => "DimWitness",
            InequalityId::ChshSub => "CHSH_sub",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InequalityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        InequalityId::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown inequality {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedInequality {
    pub id: InequalityId,
    pub inequality: Inequality,
}

impl NamedInequality {
    pub fn scenario(&self) -> &Scenario {
        &self.inequality.basis.scenario
    }
}

/// Two steps with three and three settings, binary outcomes and a one-bit
/// channel from the first to the second.
pub fn s1bit_scenario() -> Scenario {
    Scenario::from_shape(&[(3, 2), (3, 2)], &[(0, 1, 2)]).expect("valid shape")
}

/// Three binary steps without channels.
pub fn tau3_scenario() -> Scenario {
    Scenario::from_shape(&[(2, 2), (2, 2), (2, 2)], &[]).expect("valid shape")
}

/// Three settings then two, binary outcomes, one-bit channel.
pub fn a1_scenario() -> Scenario {
    Scenario::from_shape(&[(3, 2), (2, 2)], &[(0, 1, 2)]).expect("valid shape")
}

pub fn build_inequality(id: InequalityId) -> NamedInequality {
    let (basis, coeffs, bound) = match id {
        InequalityId::S1bit => {
            let sc = s1bit_scenario();
            // A0B0 A0B1 A0B2 A1B0 A1B1 A1B2 A2B0 A2B1 A2B2
            (Basis::correlator(sc.clone(), ab_terms(&sc)), vec![1, 1, 1, 1, 1, -1, 1, -1, 0], 6)
        }
        InequalityId::ChshSub => {
            let sc = s1bit_scenario();
            (Basis::correlator(sc.clone(), ab_terms(&sc)), vec![0, 0, 0, 1, 1, 0, 1, -1, 0], 2)
        }
        InequalityId::Stau3 => {
            let sc = tau3_scenario();
            // AB_00 AB_01 AB_10 AB_11, then BC_xyz
            (
                Basis::correlator(sc.clone(), ab_bc_terms(&sc)),
                vec![1, 1, 1, -1, 0, -1, -1, 0, 0, -1, -1, 0],
                6,
            )
        }
        InequalityId::DimWitness => {
            let sc = a1_scenario();
            // B00 B01 B10 B11 B20 B21
            (Basis::correlator(sc.clone(), second_party_terms(&sc)), vec![1, 1, 1, -1, -1, 0], 3)
        }
    };
    let inequality = Inequality::new(basis.expect("builtin basis"), coeffs, bound).expect("builtin inequality");
    NamedInequality { id, inequality }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProtocolId {
    /// Main-text settings on the κ family.
    OneBitFixed(f64),
    /// Bob's settings adapted to κ.
    OneBitOptimized(f64),
    /// Standard sequential settings on the given initial qubit state.
    Tau3(QState),
}

#[derive(Clone, Debug)]
pub enum NamedProtocol {
    Comm { state: QState, protocol: CommProtocol },
    Sequential { initial: QState, settings: Vec<Vec<Observable>> },
}

impl NamedProtocol {
    pub fn behavior(&self) -> Result<Behavior> {
        match self {
            NamedProtocol::Comm { state, protocol } => comm_augmented_behavior(state, protocol),
            NamedProtocol::Sequential { initial, settings } => sequential_behavior(initial, settings),
        }
    }
}

fn check_kappa(k: f64) -> Result<()> {
    if (0.0..=1.0).contains(&k) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("kappa = {k} outside [0, 1]")))
    }
}

/// Alice measures X, X, Z and signals whether x = 0.
fn one_bit(bob_m1: Vec<Observable>) -> CommProtocol {
    CommProtocol {
        alice: vec![Observable::x(), Observable::x(), Observable::z()],
        message: vec![vec![0, 0], vec![1, 1], vec![1, 1]],
        message_dim: 2,
        bob: vec![vec![Observable::x(); 3], bob_m1],
    }
}

/// Settings of the τ₃ violation: A = (Z, X), B = ((Z±X)/√2), C0 = −B1, C1 = −B0.
pub fn tau3_settings() -> Vec<Vec<Observable>> {
    let b0 = Observable::from_bloch([1.0, 0.0, 1.0]).expect("nonzero");
    let b1 = Observable::from_bloch([-1.0, 0.0, 1.0]).expect("nonzero");
    vec![
        vec![Observable::z(), Observable::x()],
        vec![b0, b1],
        vec![b1.negated(), b0.negated()],
    ]
}

pub fn build_protocol(id: &ProtocolId) -> Result<NamedProtocol> {
    Ok(match id {
        ProtocolId::OneBitFixed(k) => {
            check_kappa(*k)?;
            let bob = vec![
                Observable::new(FRAC_PI_4, 0.0),
                Observable::new(3.0 * FRAC_PI_4, 0.0),
                Observable::new(FRAC_PI_2, PI),
            ];
            NamedProtocol::Comm {
                state: family_state(*k)?,
                protocol: one_bit(bob),
            }
        }
        ProtocolId::OneBitOptimized(k) => {
            check_kappa(*k)?;
            let bob = vec![
                Observable::from_bloch([1.0, 0.0, *k])?,
                Observable::from_bloch([1.0, 0.0, -*k])?,
                Observable::new(FRAC_PI_2, PI),
            ];
            NamedProtocol::Comm {
                state: family_state(*k)?,
                protocol: one_bit(bob),
            }
        }
        ProtocolId::Tau3(initial) => {
            if initial.dim() != 2 {
                return Err(Error::invalid("the sequential protocol needs a qubit state"));
            }
            NamedProtocol::Sequential {
                initial: initial.clone(),
                settings: tau3_settings(),
            }
        }
    })
}

/// Value of a named inequality's left-hand side on a behavior.
pub fn evaluate(id: InequalityId, behavior: &Behavior) -> Result<f64> {
    let n = build_inequality(id);
    if !behavior.scenario().same_layout(n.scenario()) {
        return Err(Error::invalid(format!("behavior does not live in the {id} scenario")));
    }
    n.inequality.evaluate(behavior)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChshDecomposition {
    pub s_1bit: f64,
    pub s_chsh: f64,
    /// `s_1bit − 4 − s_chsh`.
    pub residual: f64,
}

pub fn chsh_decomposition(behavior: &Behavior) -> Result<ChshDecomposition> {
    let s_1bit = evaluate(InequalityId::S1bit, behavior)?;
    let s_chsh = evaluate(InequalityId::ChshSub, behavior)?;
    Ok(ChshDecomposition {
        s_1bit,
        s_chsh,
        residual: s_1bit - 4.0 - s_chsh,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kappa: f64,
    pub concurrence: f64,
    #[serde(rename = "S_fixed")]
    pub s_fixed: f64,
    #[serde(rename = "S_optimized")]
    pub s_optimized: f64,
}

/// `n` equally spaced points covering [0, 1].
pub fn default_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn kappa_sweep(grid: &[f64]) -> Result<Vec<SweepRow>> {
    grid.iter()
        .map(|&k| {
            let fixed = build_protocol(&ProtocolId::OneBitFixed(k))?.behavior()?;
            let opt = build_protocol(&ProtocolId::OneBitOptimized(k))?.behavior()?;
            Ok(SweepRow {
                kappa: k,
                concurrence: crate::quantum::concurrence_pure(&family_state(k)?)?,
                s_fixed: evaluate(InequalityId::S1bit, &fixed)?,
                s_optimized: evaluate(InequalityId::S1bit, &opt)?,
            })
        })
        .collect()
}

/// Named correlators of a τ₃-scenario behavior, for reports.
pub fn tau3_correlators(behavior: &Behavior) -> Result<Vec<(String, f64)>> {
    correlators(behavior, &ab_bc_terms(behavior.scenario()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::CorrelatorTerm;
    use std::f64::consts::SQRT_2;

    #[test]
    fn published_coefficients() {
        let s = build_inequality(InequalityId::S1bit);
        let nz: Vec<i64> = s.inequality.coeffs.iter().copied().filter(|&c| c != 0).collect();
        assert_eq!(nz, vec![1, 1, 1, 1, 1, -1, 1, -1]);
        assert_eq!(s.inequality.bound, 6);
        let t = build_inequality(InequalityId::Stau3);
        assert_eq!(t.inequality.bound, 6);
        assert_eq!(t.inequality.coeffs.iter().filter(|&&c| c != 0).count(), 8);
        let labels = t.inequality.basis.labels();
        let neg: Vec<&str> = labels
            .iter()
            .zip(&t.inequality.coeffs)
            .filter(|(_, &c)| c < 0)
            .map(|(l, _)| l.as_str())
            .collect();
        assert_eq!(neg, vec!["AB_11", "BC_001", "BC_010", "BC_101", "BC_110"]);
        assert_eq!(build_inequality(InequalityId::DimWitness).inequality.bound, 3);
        assert_eq!("CHSH_sub".parse::<InequalityId>().unwrap(), InequalityId::ChshSub);
        assert!("nope".parse::<InequalityId>().is_err());
    }

    #[test]
    fn fixed_protocol_at_full_entanglement() {
        let b = build_protocol(&ProtocolId::OneBitFixed(1.0)).unwrap().behavior().unwrap();
        let d = chsh_decomposition(&b).unwrap();
        assert!((d.s_1bit - (4.0 + 2.0 * SQRT_2)).abs() < 1e-12);
        assert!((d.s_chsh - 2.0 * SQRT_2).abs() < 1e-12);
        assert!(d.residual.abs() < 1e-12);
    }

    #[test]
    fn optimized_protocol_boundary() {
        let b = build_protocol(&ProtocolId::OneBitOptimized(0.0)).unwrap().behavior().unwrap();
        assert!((evaluate(InequalityId::S1bit, &b).unwrap() - 6.0).abs() < 1e-12);
        assert!(build_protocol(&ProtocolId::OneBitOptimized(-0.1)).is_err());
    }

    #[test]
    fn uniform_decomposition() {
        let d = chsh_decomposition(&Behavior::uniform(&s1bit_scenario())).unwrap();
        assert_eq!((d.s_1bit, d.s_chsh, d.residual), (0.0, 0.0, -4.0));
    }

    #[test]
    fn tau3_on_mixed_and_pure() {
        for st in [QState::maximally_mixed(2).unwrap(), QState::pure_real(&[1.0, 0.0]).unwrap()] {
            let b = build_protocol(&ProtocolId::Tau3(st)).unwrap().behavior().unwrap();
            assert!((evaluate(InequalityId::Stau3, &b).unwrap() - (4.0 + 2.0 * SQRT_2)).abs() < 1e-12);
        }
    }

    #[test]
    fn tau3_ab_correlators() {
        let b = build_protocol(&ProtocolId::Tau3(QState::maximally_mixed(2).unwrap()))
            .unwrap()
            .behavior()
            .unwrap();
        let c = tau3_correlators(&b).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (got, want) in c[..4].iter().zip([h, h, h, -h]) {
            assert!((got.1 - want).abs() < 1e-12);
        }
        // a single-party mean for completeness
        let a = correlators(&b, &[CorrelatorTerm::new(vec![0], vec![Some(0), None, None])]).unwrap();
        assert!(a[0].1.abs() < 1e-12);
    }

    #[test]
    fn sweep_closed_forms() {
        let rows = kappa_sweep(&default_grid(5)).unwrap();
        assert_eq!(rows.len(), 5);
        for r in rows {
            assert!((r.s_fixed - (4.0 + (1.0 + r.kappa) * SQRT_2)).abs() < 1e-10);
            assert!((r.s_optimized - (4.0 + 2.0 * (1.0 + r.kappa * r.kappa).sqrt())).abs() < 1e-10);
            assert!((r.concurrence - r.kappa).abs() < 1e-10);
        }
    }
}
