//! Qubit and two-qubit states under dichotomic projective measurements.
//!
//! Outcome 0 is the +1 eigenvalue, so `(-1)^a` is the measured value and
//! correlators follow the usual sign convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{Behavior, Scenario};

type CMat = DMatrix<Complex64>;

/// Branches lighter than this carry a placeholder post-state.
pub const DEGENERATE_PROB: f64 = 1e-14;
const STATE_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub fn pauli_y() -> CMat {
    let i = Complex64::i();
    CMat::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `cosφ sinθ X + sinφ sinθ Y + cosθ Z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub theta: f64,
    pub phi: f64,
}

impl Observable {
    pub fn new(theta: f64, phi: f64) -> Self {
        Observable { theta, phi }
    }

    pub fn x() -> Self {
        Observable::new(std::f64::consts::FRAC_PI_2, 0.0)
    }

    pub fn z() -> Self {
        Observable::new(0.0, 0.0)
    }

    /// Observable along a (not necessarily normalized) Bloch direction.
    pub fn from_bloch(n: [f64; 3]) -> Result<Self> {
        let r = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::invalid("observable direction must be nonzero"));
        }
        Ok(Observable::new((n[2] / r).clamp(-1.0, 1.0).acos(), n[1].atan2(n[0])))
    }

    pub fn bloch(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [cp * st, sp * st, ct]
    }

    pub fn matrix(&self) -> CMat {
        let n = self.bloch();
        pauli_x() * c(n[0]) + pauli_y() * c(n[1]) + pauli_z() * c(n[2])
    }

    /// `(I ± O)/2`, with `+` for outcome 0.
    pub fn projector(&self, outcome: usize) -> CMat {
        let s = if outcome == 0 { 1.0 } else { -1.0 };
        (identity(2) + self.matrix() * c(s)) * c(0.5)
    }

    /// Direction drawn uniformly from the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = rng.random_range(-1.0..=1.0);
        Observable::new(z.acos(), rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
    }

    pub fn negated(&self) -> Self {
        let n = self.bloch();
        Observable::from_bloch([-n[0], -n[1], -n[2]]).expect("unit vector")
    }
}

/// Density matrix of one or two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    matrix: CMat,
}

impl QState {
    pub fn new(matrix: CMat) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d || !(d == 2 || d == 4) {
            return Err(Error::invalid("states are 2x2 or 4x4 matrices"));
        }
        let herm = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(Error::invalid("density matrix is not Hermitian"));
        }
        if (matrix.trace().re - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("density matrix must have unit trace"));
        }
        let eig = matrix.clone().symmetric_eigenvalues();
        if eig.iter().any(|&e| e < -STATE_TOL) {
            return Err(Error::invalid("density matrix has a negative eigenvalue"));
        }
        Ok(QState { matrix })
    }

    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(amplitudes);
        let n = v.norm();
        if !(n > 0.0) {
            return Err(Error::invalid("zero state vector"));
        }
        let v = v / c(n);
        QState::new(&v * v.adjoint())
    }

    pub fn pure_real(amplitudes: &[f64]) -> Result<Self> {
        QState::pure(&amplitudes.iter().map(|&a| c(a)).collect::<Vec<_>>())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        QState::new(identity(dim) * c(1.0 / dim as f64))
    }

    /// Qubit state `(I + r·σ)/2` with `|r| ≤ 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        if r.iter().map(|v| v * v).sum::<f64>() > 1.0 + 1e-12 {
            return Err(Error::invalid("Bloch vector longer than 1"));
        }
        QState::new((identity(2) + pauli_x() * c(r[0]) + pauli_y() * c(r[1]) + pauli_z() * c(r[2])) * c(0.5))
    }

    /// Qubit state with Bloch vector uniform in the ball.
    pub fn random_qubit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let n = Observable::random(rng).bloch();
        let r = rng.random::<f64>().cbrt();
        QState::from_bloch([r * n[0], r * n[1], r * n[2]]).expect("inside the Bloch ball")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Bloch vector of a qubit state.
    pub fn bloch(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::invalid("Bloch vector needs a qubit state"));
        }
        let e = |p: CMat| (&self.matrix * p).trace().re;
        Ok([e(pauli_x()), e(pauli_y()), e(pauli_z())])
    }

    pub fn expectation(&self, op: &CMat) -> f64 {
        (&self.matrix * op).trace().re
    }

    /// State vector of a pure state, up to a global phase.
    pub fn amplitudes(&self) -> Result<Vec<Complex64>> {
        if self.purity() < 1.0 - STATE_TOL {
            return Err(Error::invalid("state is not pure"));
        }
        let eig = self.matrix.clone().symmetric_eigen();
        let k = eig.eigenvalues.imax();
        Ok(eig.eigenvectors.column(k).iter().copied().collect())
    }
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub probability: f64,
    pub post_state: QState,
    /// Probability below [`DEGENERATE_PROB`]; `post_state` is a placeholder.
    pub degenerate: bool,
}

/// Both outcome branches of a qubit measurement.
pub fn measure_projective(state: &QState, obs: &Observable) -> Result<[Branch; 2]> {
    if state.dim() != 2 {
        return Err(Error::invalid("projective measurements act on qubit states"));
    }
    let branch = |a: usize| -> Result<Branch> {
        let p = obs.projector(a);
        let prob = (&p * state.matrix()).trace().re.max(0.0);
        if prob < DEGENERATE_PROB {
            return Ok(Branch {
                probability: prob,
                post_state: QState::maximally_mixed(2)?,
                degenerate: true,
            });
        }
        // rank-1 projector: the post-state is the projector itself
        Ok(Branch {
            probability: prob,
            post_state: QState { matrix: p },
            degenerate: false,
        })
    };
    Ok([branch(0)?, branch(1)?])
}

/// `p(a_1 … a_n | x_1 … x_n)` of successive measurements on one qubit;
/// `settings[k][x]` is the observable for setting `x` at step `k`.
pub fn sequential_behavior(initial: &QState, settings: &[Vec<Observable>]) -> Result<Behavior> {
    if initial.dim() != 2 {
        return Err(Error::invalid("sequential measurements need a qubit state"));
    }
    if settings.is_empty() || settings.iter().any(|s| s.is_empty()) {
        return Err(Error::invalid("every step needs at least one setting"));
    }
    let shape: Vec<(usize, usize)> = settings.iter().map(|s| (s.len(), 2)).collect();
    let sc = Scenario::from_shape(&shape, &[])?;
    // only the first measurement sees the initial state; afterwards the
    // state is the last projector
    let first: Vec<[Branch; 2]> = settings[0]
        .iter()
        .map(|o| measure_projective(initial, o))
        .collect::<Result<_>>()?;
    let bloch: Vec<Vec<[f64; 3]>> = settings.iter().map(|s| s.iter().map(|o| o.bloch()).collect()).collect();
    Ok(Behavior::from_fn(&sc, |x, a| {
        let mut p = first[x[0]][a[0]].probability;
        for k in 1..x.len() {
            let prev = bloch[k - 1][x[k - 1]];
            let cur = bloch[k][x[k]];
            let s = sign(a[k - 1]) * sign(a[k]);
            p *= 0.5 * (1.0 + s * dot(&prev, &cur));
        }
        p
    }))
}

fn sign(a: usize) -> f64 {
    if a == 0 {
        1.0
    } else {
        -1.0
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn two_qubit(state: &QState) -> Result<()> {
    if state.dim() != 4 {
        return Err(Error::invalid("bipartite behaviors need a two-qubit state"));
    }
    Ok(())
}

/// `p(a,b|x,y) = tr[(P^x_a ⊗ P^y_b) ρ]`.
pub fn bipartite_behavior(state: &QState, alice: &[Observable], bob: &[Observable]) -> Result<Behavior> {
    two_qubit(state)?;
    if alice.is_empty() || bob.is_empty() {
        return Err(Error::invalid("each party needs at least one setting"));
    }
    let sc = Scenario::from_shape(&[(alice.len(), 2), (bob.len(), 2)], &[])?;
    Ok(Behavior::from_fn(&sc, |x, a| {
        let op = kron(&alice[x[0]].projector(a[0]), &bob[x[1]].projector(a[1]));
        state.expectation(&op).max(0.0)
    }))
}

/// One-way protocol: Alice measures, sends `m = message[x][a]`, Bob
/// measures `bob[m][y]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommProtocol {
    pub alice: Vec<Observable>,
    pub message: Vec<Vec<usize>>,
    pub message_dim: usize,
    pub bob: Vec<Vec<Observable>>,
}

impl CommProtocol {
    pub fn validate(&self) -> Result<()> {
        let nx = self.alice.len();
        if nx == 0 || self.message.len() != nx || self.message.iter().any(|r| r.len() != 2) {
            return Err(Error::invalid("message table must cover every (x, a)"));
        }
        if self.message_dim == 0 || self.bob.len() != self.message_dim {
            return Err(Error::invalid("Bob needs one settings list per message"));
        }
        if self.message.iter().flatten().any(|&m| m >= self.message_dim) {
            return Err(Error::invalid("message value out of range"));
        }
        let ny = self.bob[0].len();
        if ny == 0 || self.bob.iter().any(|b| b.len() != ny) {
            return Err(Error::invalid("Bob's settings lists must have equal length"));
        }
        let finite = |o: &Observable| o.theta.is_finite() && o.phi.is_finite();
        if !self.alice.iter().all(finite) || !self.bob.iter().flatten().all(finite) {
            return Err(Error::invalid("observable angles must be finite"));
        }
        Ok(())
    }

    pub fn scenario(&self) -> Result<Scenario> {
        self.validate()?;
        Scenario::from_shape(
            &[(self.alice.len(), 2), (self.bob[0].len(), 2)],
            &[(0, 1, self.message_dim)],
        )
    }

    pub fn message_depends_on_outcome(&self) -> bool {
        self.message.iter().any(|r| r[0] != r[1])
    }
}

/// `p(a,b|x,y) = tr[(P^x_a ⊗ P^{y, m(x,a)}_b) ρ]`.
pub fn comm_augmented_behavior(state: &QState, protocol: &CommProtocol) -> Result<Behavior> {
    two_qubit(state)?;
    let sc = protocol.scenario()?;
    Ok(Behavior::from_fn(&sc, |x, a| {
        let m = protocol.message[x[0]][a[0]];
        let op = kron(&protocol.alice[x[0]].projector(a[0]), &protocol.bob[m][x[1]].projector(a[1]));
        state.expectation(&op).max(0.0)
    }))
}

/// `½(√(1+κ)(|00⟩+|11⟩) + √(1−κ)(|01⟩+|10⟩))`: the CNOT image of
/// `|D⟩ ⊗ (√(1+κ)|0⟩ + √(1−κ)|1⟩)/√2`, with concurrence κ.
pub fn family_state(kappa: f64) -> Result<QState> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::OutOfRange(format!("kappa = {kappa} outside [0, 1]")));
    }
    let p = (1.0 + kappa).sqrt() / 2.0;
    let q = (1.0 - kappa).sqrt() / 2.0;
    QState::pure_real(&[p, q, q, p])
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn phi_plus() -> QState {
    family_state(1.0).expect("kappa in range")
}

/// `2|α₀₀α₁₁ − α₀₁α₁₀|` of a pure two-qubit state.
pub fn concurrence_pure(state: &QState) -> Result<f64> {
    two_qubit(state)?;
    let a = state
        .amplitudes()
        .map_err(|_| Error::invalid("concurrence is only defined here for pure states"))?;
    Ok(2.0 * (a[0] * a[3] - a[1] * a[2]).norm())
}

/// Shannon entropy in bits; zero entries contribute nothing.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum()
}

/// Entropy of the message. `input_distribution` over x defaults to uniform;
/// `outcome_distribution[x][a]` is only needed when the message reads `a`.
pub fn message_entropy(
    protocol: &CommProtocol,
    input_distribution: Option<&[f64]>,
    outcome_distribution: Option<&[Vec<f64>]>,
) -> Result<f64> {
    protocol.validate()?;
    let nx = protocol.alice.len();
    let px: Vec<f64> = match input_distribution {
        Some(d) if d.len() == nx => d.to_vec(),
        Some(d) => {
            return Err(Error::LengthMismatch {
                expected: nx,
                got: d.len(),
            })
        }
        None => vec![1.0 / nx as f64; nx],
    };
    if protocol.message_depends_on_outcome() && outcome_distribution.is_none() {
        return Err(Error::invalid("message depends on Alice's outcome; supply p(a|x)"));
    }
    let mut pm = vec![0.0; protocol.message_dim];
    for x in 0..nx {
        for a in 0..2 {
            let pa = match outcome_distribution {
                Some(d) => *d
                    .get(x)
                    .and_then(|r| r.get(a))
                    .ok_or_else(|| Error::invalid("outcome distribution has the wrong shape"))?,
                None => 0.5,
            };
            pm[protocol.message[x][a]] += px[x] * pa;
        }
    }
    Ok(shannon_entropy(&pm))
}

/// `v·p + (1−v)·uniform` in every context.
pub fn mix_white_noise(behavior: &Behavior, visibility: f64) -> Result<Behavior> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::OutOfRange(format!("visibility {visibility} outside [0, 1]")));
    }
    let sc = behavior.scenario();
    let u = 1.0 / sc.num_output_tuples() as f64;
    let v = behavior
        .to_f64()
        .into_iter()
        .map(|p| visibility * p + (1.0 - visibility) * u)
        .collect();
    Behavior::from_f64(sc.clone(), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{ab_terms, correlators};
    use crate::scenario::validate_behavior;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

    fn ket0() -> QState {
        QState::pure_real(&[1.0, 0.0]).unwrap()
    }

    #[test]
    fn observable_is_a_reflection() {
        for (t, p) in [(0.3, 1.1), (2.0, -0.4), (FRAC_PI_4, 3.0)] {
            let o = Observable::new(t, p).matrix();
            assert!((&o - o.adjoint()).norm() < 1e-12);
            assert!(o.trace().norm() < 1e-12);
            assert!((&o * &o - identity(2)).norm() < 1e-12);
        }
        let o = Observable::from_bloch([1.0, 1.0, 0.0]).unwrap();
        let n = o.bloch();
        assert!((n[0] - FRAC_1_SQRT_2).abs() < 1e-12 && n[2].abs() < 1e-12);
    }

    #[test]
    fn z_on_ket0() {
        let [b0, b1] = measure_projective(&ket0(), &Observable::z()).unwrap();
        assert!((b0.probability - 1.0).abs() < 1e-15 && !b0.degenerate);
        assert!(b1.degenerate && b1.probability.abs() < 1e-15);
        assert!((b0.post_state.matrix() - ket0().matrix()).norm() < 1e-12);
    }

    #[test]
    fn x_on_ket0() {
        let [b0, b1] = measure_projective(&ket0(), &Observable::x()).unwrap();
        assert!((b0.probability - 0.5).abs() < 1e-15 && (b1.probability - 0.5).abs() < 1e-15);
        let plus = QState::pure_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let minus = QState::pure_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap();
        assert!((b0.post_state.matrix() - plus.matrix()).norm() < 1e-12);
        assert!((b1.post_state.matrix() - minus.matrix()).norm() < 1e-12);
    }

    #[test]
    fn maximally_mixed_gives_eigenprojectors() {
        let o = Observable::new(1.2, 0.7);
        let [b0, b1] = measure_projective(&QState::maximally_mixed(2).unwrap(), &o).unwrap();
        assert!((b0.probability - 0.5).abs() < 1e-15 && (b1.probability - 0.5).abs() < 1e-15);
        assert!((b0.post_state.matrix() - o.projector(0)).norm() < 1e-15);
        assert!((b1.post_state.matrix() - o.projector(1)).norm() < 1e-15);
    }

    #[test]
    fn repeated_z_is_deterministic() {
        let s = vec![vec![Observable::z()]; 3];
        let b = sequential_behavior(&ket0(), &s).unwrap();
        assert!((b.prob(&[0, 0, 0], &[0, 0, 0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(validate_behavior(&b, 1e-12).is_valid());
    }

    #[test]
    fn sequential_matches_explicit_state_update() {
        // chain of measure_projective calls against the closed-form product
        let init = QState::from_bloch([0.3, -0.2, 0.5]).unwrap();
        let s = vec![
            vec![Observable::new(0.4, 0.1), Observable::new(1.9, 2.2)],
            vec![Observable::new(2.5, -1.0), Observable::new(0.7, 0.3)],
            vec![Observable::new(1.1, 0.9), Observable::new(3.0, -2.0)],
        ];
        let b = sequential_behavior(&init, &s).unwrap();
        for i in 0..64 {
            let (x, a) = b.scenario().decode_index(i);
            let mut st = init.clone();
            let mut p = 1.0;
            for k in 0..3 {
                let br = measure_projective(&st, &s[k][x[k]]).unwrap();
                p *= br[a[k]].probability;
                st = br[a[k]].post_state.clone();
            }
            assert!((b.prob(&x, &a).unwrap() - p).abs() < 1e-14);
        }
    }

    #[test]
    fn phi_plus_zz_is_perfectly_correlated() {
        let b = bipartite_behavior(&phi_plus(), &[Observable::z()], &[Observable::z()]).unwrap();
        assert!((b.prob(&[0, 0], &[0, 0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((b.prob(&[0, 0], &[1, 1]).unwrap() - 0.5).abs() < 1e-15);
        assert!(b.prob(&[0, 0], &[0, 1]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn product_state_factorizes() {
        let st = QState::pure_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let al = [Observable::new(0.3, 0.2), Observable::new(1.3, -0.2)];
        let bo = [Observable::new(2.1, 0.9), Observable::new(0.5, 1.5)];
        let b = bipartite_behavior(&st, &al, &bo).unwrap();
        for i in 0..16 {
            let (x, a) = b.scenario().decode_index(i);
            let pa = measure_projective(&ket0(), &al[x[0]]).unwrap()[a[0]].probability;
            let pb = measure_projective(&ket0(), &bo[x[1]]).unwrap()[a[1]].probability;
            assert!((b.prob(&x, &a).unwrap() - pa * pb).abs() < 1e-14);
        }
    }

    #[test]
    fn chsh_optimal_settings() {
        let al = [Observable::z(), Observable::x()];
        let bo = [Observable::new(FRAC_PI_4, 0.0), Observable::new(-FRAC_PI_4, 0.0)];
        let b = bipartite_behavior(&phi_plus(), &al, &bo).unwrap();
        let c = correlators(&b, &ab_terms(b.scenario())).unwrap();
        let s = c[0].1 + c[1].1 + c[2].1 - c[3].1;
        assert!((s - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn constant_message_reduces_to_bipartite() {
        let al = vec![Observable::new(0.3, 0.2), Observable::new(1.3, -0.2)];
        let bo = vec![Observable::new(2.1, 0.9), Observable::new(0.5, 1.5)];
        let st = family_state(0.4).unwrap();
        let prot = CommProtocol {
            alice: al.clone(),
            message: vec![vec![0, 0]; 2],
            message_dim: 1,
            bob: vec![bo.clone()],
        };
        let p = comm_augmented_behavior(&st, &prot).unwrap().to_f64();
        let q = bipartite_behavior(&st, &al, &bo).unwrap().to_f64();
        assert!(p.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn family_state_endpoints_and_concurrence() {
        let bell = QState::pure_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        assert!((family_state(1.0).unwrap().matrix() - bell.matrix()).norm() < 1e-15);
        let d = QState::pure_real(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!((family_state(0.0).unwrap().matrix() - d.matrix()).norm() < 1e-15);
        for i in 0..=100 {
            let k = i as f64 / 100.0;
            let s = family_state(k).unwrap();
            assert!((s.matrix().trace().re - 1.0).abs() < 1e-12);
            assert!((concurrence_pure(&s).unwrap() - k).abs() < 1e-12);
        }
        assert!(family_state(1.5).is_err());
        assert!(concurrence_pure(&QState::maximally_mixed(4).unwrap()).is_err());
    }

    #[test]
    fn entropies() {
        let main = CommProtocol {
            alice: vec![Observable::x(), Observable::x(), Observable::z()],
            message: vec![vec![0, 0], vec![1, 1], vec![1, 1]],
            message_dim: 2,
            bob: vec![vec![Observable::x(); 3]; 2],
        };
        let h = message_entropy(&main, None, None).unwrap();
        let expected = -(1.0 / 3.0f64) * (1.0 / 3.0f64).log2() - (2.0 / 3.0f64) * (2.0 / 3.0f64).log2();
        assert!((h - expected).abs() < 1e-15);
        let mut constant = main.clone();
        constant.message = vec![vec![0, 0]; 3];
        assert!(message_entropy(&constant, None, None).unwrap().abs() < 1e-15);
        let copy = CommProtocol {
            alice: vec![Observable::x(); 2],
            message: vec![vec![0, 0], vec![1, 1]],
            message_dim: 2,
            bob: vec![vec![Observable::x()]; 2],
        };
        assert!((message_entropy(&copy, None, None).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn white_noise_endpoints() {
        let b = bipartite_behavior(&phi_plus(), &[Observable::z()], &[Observable::x()]).unwrap();
        let same = mix_white_noise(&b, 1.0).unwrap().to_f64();
        assert_eq!(same, b.to_f64());
        let u = mix_white_noise(&b, 0.0).unwrap().to_f64();
        assert!(u.iter().all(|&v| (v - 0.25).abs() < 1e-15));
        assert!(mix_white_noise(&b, 1.2).is_err());
    }
}
