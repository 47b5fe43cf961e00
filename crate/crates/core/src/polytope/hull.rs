//! Affine hull of a point set in exact arithmetic.
//!
//! The hull is described by the pivot ("free") coordinates of the reduced
//! row echelon form of the difference vectors. Every other ("dependent")
//! coordinate is an affine function of the free ones, which gives one
//! equality per dependent coordinate and a unique normal form for
//! inequalities modulo the hull: zero coefficients on dependent coordinates.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::rational::{to_big, Rational};

use super::inequality::{canonicalize, Inequality, Orientation};

/// `coeffs · x = rhs` with a designated pivot coordinate that no other
/// equality of the same hull touches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equality {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
    pub pivot: usize,
}

#[derive(Clone, Debug)]
pub struct AffineHull {
    pub ambient: usize,
    pub free: Vec<usize>,
    pub dependent: Vec<usize>,
    /// One row per dependent coordinate, in the order of `dependent`.
    rows: Vec<(Vec<BigRational>, BigRational)>,
}

impl AffineHull {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn compute(points: &[Vec<Rational>]) -> Result<Self> {
        let first = points.first().ok_or_else(|| Error::invalid("empty point set"))?;
        let d = first.len();
        let origin: Vec<BigRational> = first.iter().map(to_big).collect();
        // rref rows with their pivot columns, kept sorted by pivot
        let mut basis: Vec<(usize, Vec<BigRational>)> = Vec::new();
        for p in &points[1..] {
            if basis.len() == d {
                break;
            }
            if p.len() != d {
                return Err(Error::LengthMismatch {
                    expected: d,
                    got: p.len(),
                });
            }
            let mut v: Vec<BigRational> = p.iter().zip(&origin).map(|(a, o)| to_big(a) - o).collect();
            for (piv, row) in &basis {
                if !v[*piv].is_zero() {
                    let f = v[*piv].clone();
                    for (x, r) in v.iter_mut().zip(row) {
                        if !r.is_zero() {
                            *x -= &f * r;
                        }
                    }
                }
            }
            let Some(piv) = v.iter().position(|x| !x.is_zero()) else {
                continue;
            };
            let inv = v[piv].recip();
            for x in v.iter_mut() {
                *x *= &inv;
            }
            for (_, row) in basis.iter_mut() {
                if !row[piv].is_zero() {
                    let f = row[piv].clone();
                    for (r, x) in row.iter_mut().zip(&v) {
                        if !x.is_zero() {
                            *r -= &f * x;
                        }
                    }
                }
            }
            let at = basis.partition_point(|(p, _)| *p < piv);
            basis.insert(at, (piv, v));
        }
        let free: Vec<usize> = basis.iter().map(|(p, _)| *p).collect();
        let dependent: Vec<usize> = (0..d).filter(|j| !free.contains(j)).collect();
        let rows = dependent
            .iter()
            .map(|&j| {
                let mut c = vec![BigRational::zero(); d];
                c[j] = BigRational::one();
                for (p, row) in &basis {
                    c[*p] = -row[j].clone();
                }
                let rhs = c.iter().zip(&origin).map(|(a, b)| a * b).sum();
                (c, rhs)
            })
            .collect();
        Ok(AffineHull {
            ambient: d,
            free,
            dependent,
            rows,
        })
    }

    /// Integer equalities, one per dependent coordinate.
    pub fn equalities(&self, basis: &Basis) -> Result<Vec<Equality>> {
        self.dependent
            .iter()
            .zip(&self.rows)
            .map(|(&pivot, (c, rhs))| {
                let i = canonicalize(basis.clone(), c, rhs, Orientation::Le)?;
                Ok(Equality {
                    coeffs: i.coeffs,
                    rhs: i.bound,
                    pivot,
                })
            })
            .collect()
    }

    /// Rebuilds the hull rows from serialized equalities.
    pub fn from_equalities(ambient: usize, eqs: &[Equality]) -> Result<Self> {
        let mut dependent = Vec::new();
        let mut rows = Vec::new();
        for e in eqs {
            if e.coeffs.len() != ambient || e.pivot >= ambient || e.coeffs[e.pivot] == 0 {
                return Err(Error::invalid("malformed equality"));
            }
            if eqs.iter().any(|o| !std::ptr::eq(o, e) && o.coeffs[e.pivot] != 0) {
                return Err(Error::invalid("equality pivots must be exclusive"));
            }
            let s = BigRational::from_integer(e.coeffs[e.pivot].into());
            rows.push((
                e.coeffs
                    .iter()
                    .map(|&v| BigRational::from_integer(v.into()) / &s)
                    .collect(),
                BigRational::from_integer(e.rhs.into()) / &s,
            ));
            dependent.push(e.pivot);
        }
        let free = (0..ambient).filter(|j| !dependent.contains(j)).collect();
        Ok(AffineHull {
            ambient,
            free,
            dependent,
            rows,
        })
    }

    /// The point of the hull with the given free coordinates.
    pub(crate) fn complete(&self, free_vals: &[BigRational]) -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); self.ambient];
        for (&j, v) in self.free.iter().zip(free_vals) {
            x[j] = v.clone();
        }
        for (&j, (row, rhs)) in self.dependent.iter().zip(&self.rows) {
            let s: BigRational = self.free.iter().map(|&p| &row[p] * &x[p]).sum();
            x[j] = rhs - s;
        }
        x
    }

    pub fn contains_exact(&self, x: &[Rational]) -> bool {
        self.rows.iter().all(|(c, rhs)| {
            let lhs: BigRational = c.iter().zip(x).map(|(a, v)| a * to_big(v)).sum();
            lhs == *rhs
        })
    }

    /// Normal form of an inequality modulo the hull.
    pub fn reduce(&self, ineq: &Inequality) -> Result<Inequality> {
        let mut c: Vec<BigRational> = ineq
            .coeffs
            .iter()
            .map(|&v| BigRational::from_integer(v.into()))
            .collect();
        let mut b = BigRational::from_integer(ineq.bound.into());
        for (&j, (row, rhs)) in self.dependent.iter().zip(&self.rows) {
            if c[j].is_zero() {
                continue;
            }
            let f = c[j].clone();
            for (x, r) in c.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
            b -= &f * rhs;
        }
        if c.iter().all(|v| v.is_zero()) {
            return Err(Error::invalid(
                "inequality is constant on the affine hull",
            ));
        }
        canonicalize(ineq.basis.clone(), &c, &b, Orientation::Le)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    fn r(v: i64) -> Rational {
        Rational::from_integer(v)
    }

    #[test]
    fn hull_of_segment_in_plane() {
        // points on x + y = 1
        let pts = vec![vec![r(0), r(1)], vec![r(1), r(0)], vec![Rational::new(1, 2), Rational::new(1, 2)]];
        let h = AffineHull::compute(&pts).unwrap();
        assert_eq!(h.dim(), 1);
        assert_eq!(h.free, vec![0]);
        assert_eq!(h.dependent, vec![1]);
        let basis = Basis::probability(Scenario::from_shape(&[(1, 2)], &[]).unwrap());
        let eq = h.equalities(&basis).unwrap();
        assert_eq!(eq, vec![Equality { coeffs: vec![1, 1], rhs: 1, pivot: 1 }]);
        // y <= 1 is x >= 0 on the hull
        let i = Inequality::new(basis.clone(), vec![0, 1], 1).unwrap();
        let red = h.reduce(&i).unwrap();
        assert_eq!((red.coeffs, red.bound), (vec![-1, 0], 0));
        let back = AffineHull::from_equalities(2, &eq).unwrap();
        assert_eq!(back.reduce(&i).unwrap(), h.reduce(&i).unwrap());
        assert!(h.contains_exact(&[r(3), r(-2)]));
        assert!(!h.contains_exact(&[r(3), r(-1)]));
    }

    #[test]
    fn full_dimensional_hull_has_no_equalities() {
        let pts = vec![vec![r(0), r(0)], vec![r(1), r(0)], vec![r(0), r(1)]];
        let h = AffineHull::compute(&pts).unwrap();
        assert_eq!(h.dim(), 2);
        assert!(h.dependent.is_empty());
    }
}
