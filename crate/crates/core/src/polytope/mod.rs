//! Classical causal polytopes: vertices, facets, membership and symmetry.

mod dd;
mod hull;
mod inequality;
mod lp;
mod membership;
mod model;
mod symmetry;

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::rational::Rational;

pub use dd::{facets, facets_with_limit, FacetList, DEFAULT_MAX_FACET_DIM};
pub use hull::{AffineHull, Equality};
pub use inequality::{
    canonicalize, canonicalize_inequality, maximize_over_vertices, violation, Inequality, InequalityKey,
    Orientation,
};
pub use membership::{membership, Certificate, LpMode, MembershipOracle, MembershipResult, Weights, RATIONALIZE_TOL};
pub use model::{enumerate_vertices, enumerate_vertices_with_cap, CausalModel, ModelKind, DEFAULT_STRATEGY_CAP};
pub use symmetry::{
    candidate_relabelings, class_representative, induce, orbit, symmetry_classes, symmetry_generators, Relabeling,
    SignedPermutation, SymmetryClass,
};

/// Deterministic vertices of a model in some basis, deduplicated and sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexSet {
    pub model: CausalModel,
    pub basis: Basis,
    pub points: Vec<Vec<Rational>>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Images of the vertices under a basis map; requires probability-basis input.
    pub fn project(&self, basis: &Basis) -> Result<VertexSet> {
        if !self.basis.is_probability() {
            return Err(Error::invalid("projection starts from the probability basis"));
        }
        if !basis.scenario.same_layout(&self.basis.scenario) {
            return Err(Error::invalid("basis belongs to a different scenario"));
        }
        let mut points = self
            .points
            .iter()
            .map(|p| basis.project_exact(p))
            .collect::<Result<Vec<_>>>()?;
        points.sort();
        points.dedup();
        Ok(VertexSet {
            model: self.model.clone(),
            basis: basis.clone(),
            points,
        })
    }
}
