//! Behaviors as polynomials in Bloch vectors, evaluated only on the
//! contexts an objective actually weighs.

use nalgebra::{Matrix3, Vector3};

use crate::quantum::{pauli_x, pauli_y, pauli_z, kron, identity, QState};
use crate::scenario::Scenario;

pub(crate) type V3 = Vector3<f64>;

/// Local Bloch vectors and correlation matrix of a two-qubit state:
/// `ρ = ¼(I + rA·σ⊗I + I⊗rB·σ + Σ T_ij σ_i⊗σ_j)`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Correlations {
    pub ra: V3,
    pub rb: V3,
    pub t: Matrix3<f64>,
}

impl Correlations {
    pub fn of_state(state: &QState) -> Self {
        let p = [pauli_x(), pauli_y(), pauli_z()];
        let id = identity(2);
        let ra = V3::from_fn(|i, _| state.expectation(&kron(&p[i], &id)));
        let rb = V3::from_fn(|i, _| state.expectation(&kron(&id, &p[i])));
        let t = Matrix3::from_fn(|i, j| state.expectation(&kron(&p[i], &p[j])));
        Correlations { ra, rb, t }
    }

    /// `cos t|00⟩ + sin t|11⟩`.
    pub fn schmidt(angle: f64) -> Self {
        let (s2, c2) = (2.0 * angle).sin_cos();
        Correlations {
            ra: V3::new(0.0, 0.0, c2),
            rb: V3::new(0.0, 0.0, c2),
            t: Matrix3::from_diagonal(&V3::new(s2, -s2, 1.0)),
        }
    }
}

pub(crate) fn schmidt_state(angle: f64) -> QState {
    QState::pure_real(&[angle.cos(), 0.0, 0.0, angle.sin()]).expect("normalized")
}

/// One weighted behavior entry.
#[derive(Clone, Debug)]
pub(crate) struct Term {
    pub w: f64,
    pub x: Vec<usize>,
    pub s: Vec<f64>,
    pub a0: usize,
}

pub(crate) fn terms(sc: &Scenario, weights: &[f64]) -> Vec<Term> {
    weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != 0.0)
        .map(|(i, &w)| {
            let (x, a) = sc.decode_index(i);
            Term {
                w,
                s: a.iter().map(|&o| if o == 0 { 1.0 } else { -1.0 }).collect(),
                a0: a[0],
                x,
            }
        })
        .collect()
}

/// Σ w p for successive measurements; `vecs[0]` is the initial Bloch
/// vector, `vecs[offsets[k] + x]` the observable of step k, setting x.
pub(crate) fn sequential_value(terms: &[Term], offsets: &[usize], vecs: &[V3]) -> f64 {
    terms
        .iter()
        .map(|t| {
            let mut prev = &vecs[offsets[0] + t.x[0]];
            let mut p = 0.5 * (1.0 + t.s[0] * vecs[0].dot(prev));
            for k in 1..t.x.len() {
                let cur = &vecs[offsets[k] + t.x[k]];
                p *= 0.5 * (1.0 + t.s[k - 1] * t.s[k] * prev.dot(cur));
                prev = cur;
            }
            t.w * p
        })
        .sum()
}

/// Σ w p for Alice measuring `vecs[x]`, sending `message[2x + a]` and Bob
/// measuring `vecs[nx + m·ny + y]`.
pub(crate) fn bipartite_value(
    terms: &[Term],
    corr: &Correlations,
    nx: usize,
    ny: usize,
    message: &[usize],
    vecs: &[V3],
) -> f64 {
    terms
        .iter()
        .map(|t| {
            let m = message[2 * t.x[0] + t.a0];
            let a = &vecs[t.x[0]];
            let b = &vecs[nx + m * ny + t.x[1]];
            let (sa, sb) = (t.s[0], t.s[1]);
            let p = 0.25 * (1.0 + sa * a.dot(&corr.ra) + sb * b.dot(&corr.rb) + sa * sb * a.dot(&(corr.t * b)));
            t.w * p
        })
        .sum()
}
