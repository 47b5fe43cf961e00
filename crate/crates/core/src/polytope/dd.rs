//! Facet enumeration by the double description method.
//!
//! The polytope is first restricted to its affine hull (free coordinates
//! only), which makes it full-dimensional of dimension `k`. Each vertex `v`
//! becomes the homogeneous constraint `z0 + v·z >= 0` on `z ∈ Z^{k+1}`; the
//! extreme rays of that cone are exactly the facets `-z·x <= z0`.
//!
//! Rays are primitive integer vectors (exact), adjacency uses the
//! combinatorial test on zero sets, and constraints are inserted in
//! lexicographic vertex order so the output does not depend on the order
//! the caller supplied.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::rational::{lcm_of_denominators, primitive_i128, to_big, Rational};

use super::hull::{AffineHull, Equality};
use super::inequality::Inequality;
use super::VertexSet;

pub const DEFAULT_MAX_FACET_DIM: usize = 30;

/// H-description of a vertex set: hull equalities plus facet inequalities,
/// the latter in normal form modulo the hull and sorted.
#[derive(Clone, Debug)]
pub struct FacetList {
    pub basis: Basis,
    pub hull: AffineHull,
    pub equalities: Vec<Equality>,
    pub inequalities: Vec<Inequality>,
}

impl FacetList {
    pub fn dim(&self) -> usize {
        self.hull.dim()
    }

    /// Normal form of an arbitrary inequality modulo this hull, for
    /// comparison with the facet list.
    pub fn reduce(&self, ineq: &Inequality) -> Result<Inequality> {
        self.hull.reduce(ineq)
    }

    pub fn contains(&self, ineq: &Inequality) -> Result<bool> {
        let r = self.reduce(ineq)?;
        Ok(self.inequalities.binary_search_by(|f| f.key().cmp(&r.key())).is_ok())
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    z: Vec<i128>,
    zeros: Bits,
}

fn overflow() -> Error {
    Error::Numerical("integer overflow in double description".into())
}

fn dot(a: &[i128], z: &[i128]) -> Result<i128> {
    a.iter().zip(z).try_fold(0i128, |acc, (x, y)| {
        x.checked_mul(*y)
            .and_then(|p| acc.checked_add(p))
            .ok_or_else(overflow)
    })
}

fn combine(ap: i128, zn: &[i128], an: i128, zp: &[i128]) -> Result<Vec<i128>> {
    // ap > 0 > an: ap·zn - an·zp is a positive combination with a·z = 0
    let mut z = zn
        .iter()
        .zip(zp)
        .map(|(n, p)| {
            ap.checked_mul(*n)
                .and_then(|x| an.checked_mul(*p).and_then(|y| x.checked_sub(y)))
                .ok_or_else(overflow)
        })
        .collect::<Result<Vec<i128>>>()?;
    primitive_i128(&mut z);
    Ok(z)
}

/// Picks `rank` linearly independent rows in order and returns their
/// positions together with the inverse of the square system they form.
fn initial_basis(rows: &[Vec<i128>], rank: usize) -> Result<(Vec<usize>, Vec<Vec<i128>>)> {
    let width = rows[0].len();
    let mut chosen: Vec<usize> = Vec::new();
    let mut echelon: Vec<(usize, Vec<BigRational>)> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if chosen.len() == rank {
            break;
        }
        let mut v: Vec<BigRational> = r.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        for (p, e) in &echelon {
            if !v[*p].is_zero() {
                let f = v[*p].clone() / &e[*p];
                for (x, y) in v.iter_mut().zip(e) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            echelon.push((p, v));
            chosen.push(i);
        }
    }
    if chosen.len() != rank || rank != width {
        return Err(Error::Numerical("could not find an initial simplex".into()));
    }
    // Gauss-Jordan inverse of the chosen rows
    let n = rank;
    let mut m: Vec<Vec<BigRational>> = chosen
        .iter()
        .map(|&i| {
            let mut row: Vec<BigRational> = rows[i].iter().map(|&x| BigRational::from_integer(x.into())).collect();
            row.extend((0..n).map(|_| BigRational::zero()));
            row
        })
        .collect();
    for (i, row) in m.iter_mut().enumerate() {
        row[n + i] = BigRational::from_integer(1.into());
    }
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::Numerical("singular initial system".into()))?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    // column j of the inverse is the ray tight on every chosen row but j
    let rays = (0..n)
        .map(|j| {
            let col: Vec<BigRational> = (0..n).map(|i| m[i][n + j].clone()).collect();
            let l = crate::rational::big_lcm_of_denominators(&col);
            let mut z = col
                .iter()
                .map(|c| {
                    (c * BigRational::from_integer(l.clone()))
                        .to_integer()
                        .to_i128()
                        .ok_or_else(overflow)
                })
                .collect::<Result<Vec<i128>>>()?;
            primitive_i128(&mut z);
            Ok(z)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((chosen, rays))
}

/// Extreme rays of `{z : a·z >= 0 for every row a}` for a set of rows
/// spanning the whole space.
fn extreme_rays(rows: &[Vec<i128>]) -> Result<Vec<Vec<i128>>> {
    let width = rows[0].len();
    let n = rows.len();
    let (init, init_rays) = initial_basis(rows, width)?;
    let mut rays: Vec<Ray> = init_rays
        .into_iter()
        .enumerate()
        .map(|(j, z)| {
            let mut zeros = Bits::new(n);
            for (i, &r) in init.iter().enumerate() {
                if i != j {
                    zeros.set(r);
                }
            }
            Ray { z, zeros }
        })
        .collect();
    let needed = width.saturating_sub(2) as u32;

    for (ri, a) in rows.iter().enumerate() {
        if init.contains(&ri) {
            continue;
        }
        let vals = rays
            .iter()
            .map(|r| dot(a, &r.z))
            .collect::<Result<Vec<i128>>>()?;
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < 0).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if *v == 0 {
                    r.zeros.set(ri);
                }
            }
            continue;
        }
        let rays_ref = &rays;
        let created: Vec<Ray> = pos
            .par_iter()
            .map(|&p| -> Result<Vec<Ray>> {
                let mut out = Vec::new();
                for &q in &neg {
                    let common = rays_ref[p].zeros.and(&rays_ref[q].zeros);
                    if common.count() < needed {
                        continue;
                    }
                    let blocked = rays_ref.iter().enumerate().any(|(o, r)| {
                        o != p && o != q && common.subset_of(&r.zeros)
                    });
                    if blocked {
                        continue;
                    }
                    let z = combine(vals[p], &rays_ref[q].z, vals[q], &rays_ref[p].z)?;
                    let mut zeros = common;
                    zeros.set(ri);
                    out.push(Ray { z, zeros });
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let old = std::mem::take(&mut rays);
        for (i, mut r) in old.into_iter().enumerate() {
            if vals[i] > 0 {
                rays.push(r);
            } else if vals[i] == 0 {
                r.zeros.set(ri);
                rays.push(r);
            }
        }
        rays.extend(created);
    }
    Ok(rays.into_iter().map(|r| r.z).collect())
}

/// Facets of the convex hull of a vertex set.
pub fn facets(vs: &VertexSet) -> Result<FacetList> {
    facets_with_limit(vs, DEFAULT_MAX_FACET_DIM)
}

pub fn facets_with_limit(vs: &VertexSet, max_dim: usize) -> Result<FacetList> {
    if vs.points.is_empty() {
        return Err(Error::invalid("cannot compute facets of an empty vertex set"));
    }
    let mut points = vs.points.clone();
    points.sort();
    points.dedup();
    let hull = AffineHull::compute(&points)?;
    let k = hull.dim();
    if k > max_dim {
        return Err(Error::CapExceeded(format!(
            "affine dimension {k} exceeds the facet-dimension cap {max_dim}"
        )));
    }
    let equalities = hull.equalities(&vs.basis)?;
    if k == 0 {
        return Ok(FacetList {
            basis: vs.basis.clone(),
            hull,
            equalities,
            inequalities: Vec::new(),
        });
    }
    let rows = points
        .iter()
        .map(|p| {
            let free: Vec<Rational> = hull.free.iter().map(|&j| p[j]).collect();
            let l = lcm_of_denominators(&free) as i128;
            let mut row = vec![l];
            row.extend(free.iter().map(|v| *v.numer() as i128 * (l / *v.denom() as i128)));
            row
        })
        .collect::<Vec<_>>();
    let rays = extreme_rays(&rows)?;

    let mut inequalities = rays
        .into_iter()
        .map(|z| {
            let mut c = vec![0i64; hull.ambient];
            for (i, &j) in hull.free.iter().enumerate() {
                c[j] = (-z[i + 1]).to_i64().ok_or_else(overflow)?;
            }
            Inequality::new(vs.basis.clone(), c, z[0].to_i64().ok_or_else(overflow)?)
        })
        .collect::<Result<Vec<_>>>()?;
    inequalities.sort_by_key(|a| a.key());
    inequalities.dedup();

    for f in &inequalities {
        if let Some(p) = points.iter().find(|p| !f.is_satisfied_exact(p)) {
            return Err(Error::Numerical(format!(
                "facet {:?} <= {} cuts off vertex {:?}",
                f.coeffs,
                f.bound,
                p.iter().map(to_big).collect::<Vec<_>>()
            )));
        }
    }
    Ok(FacetList {
        basis: vs.basis.clone(),
        hull,
        equalities,
        inequalities,
    })
}
