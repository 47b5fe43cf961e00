//! Membership of a point in the convex hull of a vertex set.
//!
//! Queries run in the free coordinates of the vertices' affine hull, where
//! the polytope is full-dimensional: the equality rows that would otherwise
//! make the simplex degenerate are checked separately, and float points are
//! rounded onto the hull exactly before any exact fallback.

use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{big_to_f64, rationalize, to_big, to_f64};
use crate::scenario::Values;

use super::hull::{AffineHull, Equality};
use super::inequality::{canonicalize, max_abs_f64, Inequality, Orientation};
use super::lp::phase_one;
use super::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpMode {
    Exact,
    Float,
}

/// Continued-fraction precision used to bring float points into exact mode.
pub const RATIONALIZE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Weights {
    Exact(Vec<(usize, BigRational)>),
    Float(Vec<(usize, f64)>),
}

#[derive(Clone, Debug)]
pub struct Certificate {
    /// Valid for every vertex and tight on at least one.
    pub inequality: Inequality,
    /// `lhs(point) - bound` in the inequality's integer normalization.
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct MembershipResult {
    pub inside: bool,
    pub weights: Option<Weights>,
    pub certificate: Option<Certificate>,
    /// Arithmetic that produced the answer (float runs may escalate).
    pub mode_used: LpMode,
}

fn max_pivots(n: usize, m: usize) -> usize {
    50 * (n + m) + 10_000
}

/// A vertex set prepared for repeated membership queries.
pub struct MembershipOracle<'a> {
    vs: &'a VertexSet,
    hull: AffineHull,
    equalities: Vec<Equality>,
    /// Free coordinates of each vertex, with a trailing 1.
    cols: Vec<Vec<f64>>,
    exact_cols: OnceLock<Vec<Vec<BigRational>>>,
}

impl<'a> MembershipOracle<'a> {
    pub fn new(vs: &'a VertexSet) -> Result<Self> {
        if vs.points.is_empty() {
            return Err(Error::invalid("empty vertex set"));
        }
        let hull = AffineHull::compute(&vs.points)?;
        let equalities = hull.equalities(&vs.basis)?;
        let cols = vs
            .points
            .iter()
            .map(|p| {
                let mut c: Vec<f64> = hull.free.iter().map(|&j| to_f64(&p[j])).collect();
                c.push(1.0);
                c
            })
            .collect();
        Ok(MembershipOracle {
            vs,
            hull,
            equalities,
            cols,
            exact_cols: OnceLock::new(),
        })
    }

    fn exact_cols(&self) -> &[Vec<BigRational>] {
        self.exact_cols.get_or_init(|| {
            self.vs
                .points
                .iter()
                .map(|p| {
                    let mut c: Vec<BigRational> = self.hull.free.iter().map(|&j| to_big(&p[j])).collect();
                    c.push(BigRational::from_integer(1.into()));
                    c
                })
                .collect()
        })
    }

    /// Decides whether `point` (in the vertex set's basis) is a convex
    /// combination of the vertices. Float runs that fail validation are
    /// retried in exact arithmetic.
    pub fn query(&self, point: &Values, mode: LpMode, tol: f64) -> Result<MembershipResult> {
        let d = self.vs.basis.dim();
        if point.len() != d {
            return Err(Error::LengthMismatch {
                expected: d,
                got: point.len(),
            });
        }
        let pf = point.to_f64();
        if pf.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("point has non-finite coordinates"));
        }
        // off the hull: the violated equality separates
        let slack = |e: &Equality| e.coeffs.iter().zip(&pf).map(|(c, v)| *c as f64 * v).sum::<f64>() - e.rhs as f64;
        let exact_off = match point {
            Values::Exact(v) => !self.hull.contains_exact(v),
            Values::Float(_) => false,
        };
        let worst = self
            .equalities
            .iter()
            .map(|e| (slack(e), e))
            .max_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
        if let Some((s, e)) = worst {
            let off = match point {
                Values::Exact(_) => exact_off,
                Values::Float(_) => s.abs() > tol,
            };
            if off {
                return self.equality_certificate(e, s, &pf, mode);
            }
        }
        let free: Vec<f64> = self.hull.free.iter().map(|&j| pf[j]).collect();
        if mode == LpMode::Float {
            if let Some(r) = self.float_query(&free, &pf, tol)? {
                return Ok(r);
            }
        }
        let exact_free: Vec<BigRational> = match point {
            Values::Exact(v) => self.hull.free.iter().map(|&j| to_big(&v[j])).collect(),
            Values::Float(_) => free
                .iter()
                .map(|x| rationalize(*x, RATIONALIZE_TOL))
                .collect::<Result<_>>()?,
        };
        self.exact_query(&exact_free, &pf)
    }

    fn equality_certificate(&self, e: &Equality, slack: f64, point: &[f64], mode: LpMode) -> Result<MembershipResult> {
        let sign = if slack > 0.0 { 1 } else { -1 };
        let coeffs: Vec<i64> = e.coeffs.iter().map(|c| sign * c).collect();
        let inequality = Inequality::new(self.vs.basis.clone(), coeffs, sign * e.rhs)?;
        let margin = inequality.lhs_f64(point) - inequality.bound as f64;
        Ok(MembershipResult {
            inside: false,
            weights: None,
            certificate: Some(Certificate { inequality, margin }),
            mode_used: mode,
        })
    }

    fn float_query(&self, free: &[f64], point: &[f64], tol: f64) -> Result<Option<MembershipResult>> {
        let m = free.len() + 1;
        let mut b = free.to_vec();
        b.push(1.0);
        let r = match phase_one(&self.cols, &b, max_pivots(self.cols.len(), m)) {
            Ok(r) => r,
            Err(Error::Numerical(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        if r.objective <= tol {
            // validate: nonnegative weights that rebuild the point
            let mut recon = vec![0.0; m];
            let mut weights = Vec::new();
            for (j, &w) in r.x.iter().enumerate() {
                if w < -tol {
                    return Ok(None);
                }
                if w > 0.0 {
                    weights.push((j, w));
                    for (acc, c) in recon.iter_mut().zip(&self.cols[j]) {
                        *acc += w * c;
                    }
                }
            }
            let err = recon
                .iter()
                .zip(&b)
                .map(|(a, c)| (a - c).abs())
                .fold(0.0f64, f64::max);
            if err > tol.max(1e-12) * 10.0 {
                return Ok(None);
            }
            return Ok(Some(MembershipResult {
                inside: true,
                weights: Some(Weights::Float(weights)),
                certificate: None,
                mode_used: LpMode::Float,
            }));
        }
        // rationalize the dual direction, then let the vertices fix the bound
        let y = &r.dual[..free.len()];
        let scale = max_abs_f64(y);
        if scale == 0.0 {
            return Ok(None);
        }
        let coeffs = y
            .iter()
            .map(|v| rationalize(v / scale, 1e-9))
            .collect::<Result<Vec<_>>>()?;
        match self.tighten(&coeffs, point)? {
            Some(cert) if cert.margin > tol => Ok(Some(MembershipResult {
                inside: false,
                weights: None,
                certificate: Some(cert),
                mode_used: LpMode::Float,
            })),
            _ => Ok(None),
        }
    }

    fn exact_query(&self, free: &[BigRational], point_f64: &[f64]) -> Result<MembershipResult> {
        let cols = self.exact_cols();
        let m = free.len() + 1;
        let mut b = free.to_vec();
        b.push(BigRational::from_integer(1.into()));
        let r = phase_one(cols, &b, max_pivots(cols.len(), m))?;
        if r.objective.is_zero() {
            let weights = r
                .x
                .into_iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .collect::<Vec<_>>();
            return Ok(MembershipResult {
                inside: true,
                weights: Some(Weights::Exact(weights)),
                certificate: None,
                mode_used: LpMode::Exact,
            });
        }
        // y·(v,1) <= 0 < y·(p,1): separator y[..k]·x <= -y[k]
        let cert = self
            .tighten(&r.dual[..free.len()], point_f64)?
            .ok_or_else(|| Error::Numerical("degenerate Farkas certificate".into()))?;
        let point = self.hull.complete(free);
        if !(cert.inequality.lhs_big(&point) > BigRational::from_integer(cert.inequality.bound.into())) {
            return Err(Error::Numerical("certificate does not separate the point".into()));
        }
        Ok(MembershipResult {
            inside: false,
            weights: None,
            certificate: Some(cert),
            mode_used: LpMode::Exact,
        })
    }

    /// Tightest bound of a free-coordinate direction over the vertices,
    /// turned into a certificate.
    fn tighten(&self, free_coeffs: &[BigRational], point: &[f64]) -> Result<Option<Certificate>> {
        if free_coeffs.iter().all(|c| c.is_zero()) {
            return Ok(None);
        }
        let mut coeffs = vec![BigRational::zero(); self.hull.ambient];
        for (&j, c) in self.hull.free.iter().zip(free_coeffs) {
            coeffs[j] = c.clone();
        }
        let draft = canonicalize(self.vs.basis.clone(), &coeffs, &BigRational::zero(), Orientation::Le)?;
        let bound = self
            .vs
            .points
            .iter()
            .map(|p| draft.lhs_exact(p))
            .max()
            .expect("nonempty vertex set");
        let c: Vec<BigRational> = draft.coeffs.iter().map(|&v| BigRational::from_integer(v.into())).collect();
        let inequality = canonicalize(self.vs.basis.clone(), &c, &bound, Orientation::Le)?;
        let margin = inequality.lhs_f64(point) - inequality.bound as f64;
        Ok(Some(Certificate { inequality, margin }))
    }
}

/// One-shot form of [`MembershipOracle::query`]; prepare an oracle when
/// testing many points against the same vertices.
pub fn membership(point: &Values, vs: &VertexSet, mode: LpMode, tol: f64) -> Result<MembershipResult> {
    MembershipOracle::new(vs)?.query(point, mode, tol)
}

impl Weights {
    /// Rebuilds the point from the weights, in floating point.
    pub fn reconstruct(&self, vs: &VertexSet) -> Vec<f64> {
        let mut out = vec![0.0; vs.basis.dim()];
        let terms: Vec<(usize, f64)> = match self {
            Weights::Exact(w) => w.iter().map(|(i, v)| (*i, big_to_f64(v))).collect(),
            Weights::Float(w) => w.clone(),
        };
        for (i, w) in terms {
            for (o, c) in out.iter_mut().zip(&vs.points[i]) {
                *o += w * to_f64(c);
            }
        }
        out
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Weights::Exact(w) => w.iter().all(|(_, v)| !v.is_negative()),
            Weights::Float(w) => w.iter().all(|(_, v)| *v >= 0.0),
        }
    }
}
