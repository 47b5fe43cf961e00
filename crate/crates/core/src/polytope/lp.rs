//! Phase-one simplex for `A w = b, w >= 0`.
//!
//! Dense tableau, artificial starting basis. Pivots follow Dantzig's rule
//! until the objective stalls, then switch to Bland's rule for good, which
//! rules out cycling. The same code runs on exact rationals and on floats
//! with tolerances.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub(crate) trait Scalar: Clone + std::fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_zero_tol(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn lt(&self, o: &Self) -> bool;
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn is_zero_tol(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

const FLOAT_EPS: f64 = 1e-11;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_EPS
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_EPS
    }
    fn is_zero_tol(&self) -> bool {
        self.abs() <= FLOAT_EPS
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

pub(crate) struct PhaseOne<T> {
    /// Phase-one optimum: sum of artificial values.
    pub objective: T,
    /// Structural variable values.
    pub x: Vec<T>,
    /// Dual vector `y` with `y·A_j <= 0` for every column and `y·b = objective`.
    pub dual: Vec<T>,
}

const STALL_LIMIT: usize = 50;

/// Solves min Σ artificials for `A w = b`, `w >= 0`. `cols[j]` is column j
/// of A (length m).
pub(crate) fn phase_one<T: Scalar>(cols: &[Vec<T>], b: &[T], max_pivots: usize) -> Result<PhaseOne<T>> {
    let m = b.len();
    let n = cols.len();
    if cols.iter().any(|c| c.len() != m) {
        return Err(Error::invalid("simplex column length mismatch"));
    }
    // flip rows so that b >= 0
    let flip: Vec<bool> = b.iter().map(|v| v.is_neg()).collect();
    let width = n + m + 1;
    let mut t: Vec<Vec<T>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(width);
            for c in cols {
                row.push(if flip[i] { c[i].neg() } else { c[i].clone() });
            }
            for k in 0..m {
                row.push(if k == i { T::one() } else { T::zero() });
            }
            row.push(if flip[i] { b[i].neg() } else { b[i].clone() });
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // reduced costs: c_j - Σ_i c_B(i) t[i][j], with c = 1 on artificials
    let mut cost: Vec<T> = (0..width)
        .map(|j| {
            if j >= n && j < n + m {
                T::zero()
            } else {
                let s = t.iter().fold(T::zero(), |acc, row| acc.add(&row[j]));
                s.neg()
            }
        })
        .collect();

    let mut bland = false;
    let mut stall = 0usize;
    let mut pivots = 0usize;
    loop {
        let entering = if bland {
            (0..n + m).find(|&j| cost[j].is_neg())
        } else {
            let mut best: Option<usize> = None;
            for j in 0..n + m {
                if cost[j].is_neg() && best.is_none_or(|b| cost[j].lt(&cost[b])) {
                    best = Some(j);
                }
            }
            best
        };
        let Some(e) = entering else { break };
        // ratio test, ties broken by smallest basic variable index
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            if t[i][e].is_pos() {
                let r = t[i][width - 1].div(&t[i][e]);
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => r.lt(lr) || (!lr.lt(&r) && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, r));
                }
            }
        }
        let Some((l, ratio)) = leave else {
            return Err(Error::Numerical("phase-one simplex reported unboundedness".into()));
        };
        if ratio.is_zero_tol() {
            stall += 1;
            if stall >= STALL_LIMIT {
                bland = true;
            }
        } else {
            stall = 0;
        }
        pivot(&mut t, &mut cost, l, e);
        basis[l] = e;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Numerical(format!("simplex exceeded {max_pivots} pivots")));
        }
    }

    let objective = cost[width - 1].neg();
    let mut x = vec![T::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].clone();
        }
    }
    // reduced cost of artificial k is 1 - π_k
    let dual = (0..m)
        .map(|k| {
            let pi = T::one().sub(&cost[n + k]);
            if flip[k] {
                pi.neg()
            } else {
                pi
            }
        })
        .collect();
    Ok(PhaseOne { objective, x, dual })
}

fn pivot<T: Scalar>(t: &mut [Vec<T>], cost: &mut [T], l: usize, e: usize) {
    let inv = T::one().div(&t[l][e]);
    for v in t[l].iter_mut() {
        *v = v.mul(&inv);
    }
    let prow = t[l].clone();
    let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero_tol() || j == e).collect();
    for (i, row) in t.iter_mut().enumerate() {
        if i == l {
            continue;
        }
        let f = row[e].clone();
        if f.is_zero_tol() {
            row[e] = T::zero();
            continue;
        }
        for &j in &nz {
            row[j] = row[j].sub(&f.mul(&prow[j]));
        }
        row[e] = T::zero();
    }
    let f = cost[e].clone();
    if !f.is_zero_tol() {
        for &j in &nz {
            cost[j] = cost[j].sub(&f.mul(&prow[j]));
        }
    }
    cost[e] = T::zero();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn feasible_system() {
        // w0 + w1 = 1, w0 - w1 = 0
        let cols = vec![vec![q(1), q(1)], vec![q(1), q(-1)]];
        let r = phase_one(&cols, &[q(1), q(0)], 100).unwrap();
        assert!(r.objective.is_zero());
        assert_eq!(r.x, vec![BigRational::new(1.into(), 2.into()); 2]);
    }

    #[test]
    fn infeasible_system_gives_farkas_vector() {
        // w0 + w1 = 1, w0 + w1 = 2
        let cols = vec![vec![q(1), q(1)], vec![q(1), q(1)]];
        let b = [q(1), q(2)];
        let r = phase_one(&cols, &b, 100).unwrap();
        assert!(r.objective.is_positive());
        for c in &cols {
            let s: BigRational = c.iter().zip(&r.dual).map(|(a, y)| a * y).sum();
            assert!(!s.is_positive());
        }
        let yb: BigRational = b.iter().zip(&r.dual).map(|(a, y)| a * y).sum();
        assert_eq!(yb, r.objective);
    }

    #[test]
    fn float_version_agrees() {
        let cols = vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]];
        let r = phase_one(&cols, &[0.3, 0.2, 1.0], 100);
        // 0.3 + 0.2 != 1 and w2 counts in both: w0 + w2 = .3, w1 + w2 = .2, sum = 1 -> infeasible
        let r = r.unwrap();
        assert!(r.objective > 1e-9);
        let r = phase_one(&cols, &[0.6, 0.5, 1.0], 100).unwrap();
        assert!(r.objective.abs() < 1e-12);
        let s: f64 = r.x.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
