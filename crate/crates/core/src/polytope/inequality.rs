use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::rational::{big_abs_gcd, big_lcm_of_denominators, to_big, Rational};
use crate::scenario::Behavior;

use super::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `coeffs · x <= bound`
    Le,
    /// `coeffs · x >= bound`
    Ge,
}

/// `coeffs · x <= bound` with integer data in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub basis: Basis,
    pub coeffs: Vec<i64>,
    pub bound: i64,
}

/// Integer data of an inequality, for ordering and orbit bookkeeping.
pub type InequalityKey = (Vec<i64>, i64);

impl Inequality {
    /// Canonical form of integer data given as `coeffs · x <= bound`.
    pub fn new(basis: Basis, coeffs: Vec<i64>, bound: i64) -> Result<Self> {
        let c: Vec<BigRational> = coeffs.iter().map(|&v| BigRational::from_integer(v.into())).collect();
        canonicalize(basis, &c, &BigRational::from_integer(bound.into()), Orientation::Le)
    }

    pub fn key(&self) -> InequalityKey {
        (self.coeffs.clone(), self.bound)
    }

    pub fn lhs_exact(&self, x: &[Rational]) -> BigRational {
        self.coeffs
            .iter()
            .zip(x)
            .filter(|(c, _)| **c != 0)
            .map(|(c, v)| BigRational::from_integer((*c).into()) * to_big(v))
            .sum()
    }

    pub fn lhs_big(&self, x: &[BigRational]) -> BigRational {
        self.coeffs
            .iter()
            .zip(x)
            .filter(|(c, _)| **c != 0)
            .map(|(c, v)| BigRational::from_integer((*c).into()) * v)
            .sum()
    }

    pub fn lhs_f64(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(c, v)| *c as f64 * v).sum()
    }

    /// Value of the left-hand side on a behavior.
    pub fn evaluate(&self, behavior: &Behavior) -> Result<f64> {
        let p = crate::basis::project_behavior(behavior, &self.basis)?;
        Ok(self.lhs_f64(&p.to_f64()))
    }

    pub fn is_satisfied_exact(&self, x: &[Rational]) -> bool {
        self.lhs_exact(x) <= BigRational::from_integer(self.bound.into())
    }

    /// Sum of absolute coefficients, the largest value any point with
    /// coordinates in [-1, 1] can reach.
    pub fn algebraic_bound(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

/// Clears denominators, divides by the gcd and turns `>=` into `<=`.
pub fn canonicalize(
    basis: Basis,
    coeffs: &[BigRational],
    bound: &BigRational,
    orientation: Orientation,
) -> Result<Inequality> {
    if coeffs.len() != basis.dim() {
        return Err(Error::LengthMismatch {
            expected: basis.dim(),
            got: coeffs.len(),
        });
    }
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(Error::invalid("inequality has an all-zero functional"));
    }
    let lcm = big_lcm_of_denominators(coeffs.iter().chain(std::iter::once(bound)));
    let sign = match orientation {
        Orientation::Le => BigInt::from(1),
        Orientation::Ge => BigInt::from(-1),
    };
    let scale = BigRational::from_integer(lcm * sign);
    let ints: Vec<BigInt> = coeffs
        .iter()
        .chain(std::iter::once(bound))
        .map(|c| (c * &scale).to_integer())
        .collect();
    let g = big_abs_gcd(&ints);
    let to_i64 = |v: &BigInt| {
        (v / &g)
            .to_i64()
            .ok_or_else(|| Error::Numerical("inequality coefficient exceeds 64 bits".into()))
    };
    let mut out = ints.iter().map(to_i64).collect::<Result<Vec<i64>>>()?;
    let bound = out.pop().expect("bound present");
    Ok(Inequality {
        basis,
        coeffs: out,
        bound,
    })
}

/// Canonical form of an existing inequality (idempotent).
pub fn canonicalize_inequality(ineq: &Inequality) -> Result<Inequality> {
    Inequality::new(ineq.basis.clone(), ineq.coeffs.clone(), ineq.bound)
}

/// Exact maximum of the left-hand side over the vertices, with the first
/// maximizing vertex.
pub fn maximize_over_vertices(ineq: &Inequality, vs: &VertexSet) -> Result<(BigRational, usize)> {
    if ineq.basis != vs.basis {
        return Err(Error::invalid("inequality and vertex set use different bases"));
    }
    let mut best: Option<(BigRational, usize)> = None;
    for (i, p) in vs.points.iter().enumerate() {
        let v = ineq.lhs_exact(p);
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, i));
        }
    }
    best.ok_or_else(|| Error::invalid("empty vertex set"))
}

/// Largest violation `lhs - bound` of a float point, normalized by nothing.
pub fn violation(ineq: &Inequality, point: &[f64]) -> f64 {
    ineq.lhs_f64(point) - ineq.bound as f64
}

pub(crate) fn max_abs_f64(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
