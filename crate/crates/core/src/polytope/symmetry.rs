//! Relabeling symmetries and orbits of inequalities.
//!
//! A relabeling of inputs, outputs or parties permutes the probability
//! coordinates. On a correlator basis it must map every term onto ± another
//! term, which makes it a signed coordinate permutation. Candidates are
//! only kept as generators when they map the vertex set onto itself, so the
//! generated group is always a subgroup of the polytope's symmetries.

use std::collections::{BTreeMap, HashSet, VecDeque};

use crate::basis::{Basis, BasisKind};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::scenario::{Scenario, Var};

use super::hull::AffineHull;
use super::inequality::{Inequality, InequalityKey};
use super::VertexSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relabeling {
    /// Exchanges settings `a` and `b` of one step.
    InputSwap { step: usize, a: usize, b: usize },
    /// Exchanges outcomes `a` and `b` of one step whenever every
    /// `(variable, value)` condition holds.
    OutputSwap {
        step: usize,
        a: usize,
        b: usize,
        when: Vec<(Var, usize)>,
    },
    /// Exchanges two steps of identical shape.
    PartyExchange { first: usize, second: usize },
}

impl Relabeling {
    fn check(&self, sc: &Scenario) -> Result<()> {
        let n = sc.num_steps();
        let steps = sc.steps();
        let ok = match self {
            Relabeling::InputSwap { step, a, b } => *step < n && *a < steps[*step].inputs && *b < steps[*step].inputs,
            Relabeling::OutputSwap { step, a, b, when } => {
                *step < n
                    && *a < steps[*step].outputs
                    && *b < steps[*step].outputs
                    && when.iter().all(|(v, val)| match v {
                        Var::Setting(k) => *k < n && *val < steps[*k].inputs,
                        Var::Outcome(k) => *k < n && *k != *step && *val < steps[*k].outputs,
                    })
            }
            Relabeling::PartyExchange { first, second } => {
                *first < n && *second < n && steps[*first] == steps[*second]
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("relabeling {self:?} does not fit the scenario")))
        }
    }

    /// `π` on probability indices: the relabeled behavior `q` has
    /// `q[π(i)] = p[i]`.
    pub fn index_map(&self, sc: &Scenario) -> Result<Vec<usize>> {
        self.check(sc)?;
        (0..sc.behavior_len())
            .map(|i| {
                let (mut x, mut o) = sc.decode_index(i);
                match self {
                    Relabeling::InputSwap { step, a, b } => swap_value(&mut x[*step], *a, *b),
                    Relabeling::OutputSwap { step, a, b, when } => {
                        let holds = when.iter().all(|(v, val)| match v {
                            Var::Setting(k) => x[*k] == *val,
                            Var::Outcome(k) => o[*k] == *val,
                        });
                        if holds {
                            swap_value(&mut o[*step], *a, *b);
                        }
                    }
                    Relabeling::PartyExchange { first, second } => {
                        x.swap(*first, *second);
                        o.swap(*first, *second);
                    }
                }
                sc.behavior_index(&x, &o)
            })
            .collect()
    }
}

fn swap_value(v: &mut usize, a: usize, b: usize) {
    if *v == a {
        *v = b;
    } else if *v == b {
        *v = a;
    }
}

/// Linear map `y[perm[i]] = signs[i] · x[i]`. Being orthogonal, it acts on
/// inequality coefficients by the same formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let n = perm.len();
        if signs.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: signs.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::invalid("not a permutation"));
            }
        }
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::invalid("signs must be ±1"));
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.signs.iter().all(|&s| s == 1)
    }

    pub fn apply_point(&self, x: &[Rational]) -> Vec<Rational> {
        let mut y = vec![Rational::from_integer(0); x.len()];
        for i in 0..x.len() {
            y[self.perm[i]] = x[i] * Rational::from_integer(self.signs[i] as i64);
        }
        y
    }

    pub fn apply_coeffs(&self, c: &[i64]) -> Vec<i64> {
        let mut y = vec![0; c.len()];
        for i in 0..c.len() {
            y[self.perm[i]] = c[i] * self.signs[i] as i64;
        }
        y
    }

    pub fn apply(&self, ineq: &Inequality) -> Result<Inequality> {
        if ineq.coeffs.len() != self.len() {
            return Err(Error::invalid("generator size does not match the basis"));
        }
        Inequality::new(ineq.basis.clone(), self.apply_coeffs(&ineq.coeffs), ineq.bound)
    }
}

/// Signed permutation induced on `basis` by a relabeling, or `None` when
/// some correlator term is not mapped onto ± another term.
pub fn induce(relabeling: &Relabeling, basis: &Basis) -> Result<Option<SignedPermutation>> {
    let sc = &basis.scenario;
    let pi = relabeling.index_map(sc)?;
    match &basis.kind {
        BasisKind::Probability => Ok(Some(SignedPermutation::new(pi, vec![1; sc.behavior_len()])?)),
        BasisKind::Correlator(terms) => {
            let funcs: Vec<Vec<Rational>> = terms.iter().map(|t| t.functional(sc)).collect::<Result<_>>()?;
            let mut lookup: BTreeMap<&[Rational], usize> = BTreeMap::new();
            for (i, f) in funcs.iter().enumerate() {
                lookup.insert(f.as_slice(), i);
            }
            let mut perm = vec![0; terms.len()];
            let mut signs = vec![1i8; terms.len()];
            for (t, f) in funcs.iter().enumerate() {
                // term t of the relabeled point is (f∘π)·p
                let g: Vec<Rational> = pi.iter().map(|&j| f[j]).collect();
                let neg: Vec<Rational> = g.iter().map(|v| -*v).collect();
                let (src, s) = if let Some(&k) = lookup.get(g.as_slice()) {
                    (k, 1)
                } else if let Some(&k) = lookup.get(neg.as_slice()) {
                    (k, -1)
                } else {
                    return Ok(None);
                };
                perm[src] = t;
                signs[src] = s;
            }
            Ok(SignedPermutation::new(perm, signs).ok())
        }
    }
}

fn subsets<T: Clone>(items: &[T], max: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for it in items {
        let grown: Vec<Vec<T>> = out
            .iter()
            .filter(|s| s.len() < max)
            .map(|s| {
                let mut s = s.clone();
                s.push(it.clone());
                s
            })
            .collect();
        out.extend(grown);
    }
    out
}

fn card(sc: &Scenario, v: Var) -> usize {
    match v {
        Var::Setting(k) => sc.steps()[k].inputs,
        Var::Outcome(k) => sc.steps()[k].outputs,
    }
}

/// Candidate relabelings: adjacent input and output transpositions, the
/// latter conditioned on up to three earlier variables, and exchanges of
/// identically shaped steps.
pub fn candidate_relabelings(sc: &Scenario) -> Vec<Relabeling> {
    let steps = sc.steps();
    let mut out = Vec::new();
    for (k, st) in steps.iter().enumerate() {
        for a in 0..st.inputs.saturating_sub(1) {
            out.push(Relabeling::InputSwap { step: k, a, b: a + 1 });
        }
    }
    for (k, st) in steps.iter().enumerate() {
        let mut context: Vec<Var> = (0..=k).map(Var::Setting).collect();
        context.extend((0..k).map(Var::Outcome));
        for vars in subsets(&context, 3) {
            let cards: Vec<usize> = vars.iter().map(|&v| card(sc, v)).collect();
            let total: usize = cards.iter().product();
            for code in 0..total {
                let mut rest = code;
                let mut when = Vec::with_capacity(vars.len());
                for (v, c) in vars.iter().zip(&cards).rev() {
                    when.push((*v, rest % c));
                    rest /= c;
                }
                when.reverse();
                for a in 0..st.outputs.saturating_sub(1) {
                    out.push(Relabeling::OutputSwap {
                        step: k,
                        a,
                        b: a + 1,
                        when: when.clone(),
                    });
                }
            }
        }
    }
    for i in 0..steps.len() {
        for j in i + 1..steps.len() {
            if steps[i] == steps[j] {
                out.push(Relabeling::PartyExchange { first: i, second: j });
            }
        }
    }
    out
}

/// Relabelings (with their induced maps) that preserve the vertex set.
pub fn symmetry_generators(vs: &VertexSet) -> Result<Vec<(Relabeling, SignedPermutation)>> {
    let points: HashSet<&Vec<Rational>> = vs.points.iter().collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in candidate_relabelings(&vs.basis.scenario) {
        let Some(g) = induce(&r, &vs.basis)? else { continue };
        if g.is_identity() || seen.contains(&g) {
            continue;
        }
        if vs.points.iter().all(|p| points.contains(&g.apply_point(p))) {
            seen.insert(g.clone());
            out.push((r, g));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SymmetryClass {
    /// Lexicographically smallest orbit member.
    pub representative: Inequality,
    /// Indices into the classified list.
    pub members: Vec<usize>,
}

fn normalize(ineq: Inequality, hull: Option<&AffineHull>) -> Result<Inequality> {
    match hull {
        Some(h) => h.reduce(&ineq),
        None => Ok(ineq),
    }
}

fn check_generators(basis: &Basis, gens: &[SignedPermutation]) -> Result<()> {
    for g in gens {
        SignedPermutation::new(g.perm.clone(), g.signs.clone())?;
        if g.len() != basis.dim() {
            return Err(Error::LengthMismatch {
                expected: basis.dim(),
                got: g.len(),
            });
        }
    }
    Ok(())
}

/// Full orbit of an inequality, sorted. With a hull, members are kept in
/// normal form modulo it (the hull must be invariant under `gens`).
pub fn orbit(ineq: &Inequality, gens: &[SignedPermutation], hull: Option<&AffineHull>) -> Result<Vec<Inequality>> {
    check_generators(&ineq.basis, gens)?;
    let start = normalize(ineq.clone(), hull)?;
    let mut seen: BTreeMap<InequalityKey, Inequality> = BTreeMap::new();
    let mut queue = VecDeque::new();
    seen.insert(start.key(), start.clone());
    queue.push_back(start);
    while let Some(cur) = queue.pop_front() {
        for g in gens {
            let img = normalize(g.apply(&cur)?, hull)?;
            if !seen.contains_key(&img.key()) {
                seen.insert(img.key(), img.clone());
                queue.push_back(img);
            }
        }
    }
    Ok(seen.into_values().collect())
}

/// Orbit representative (lexicographically smallest member).
pub fn class_representative(
    ineq: &Inequality,
    gens: &[SignedPermutation],
    hull: Option<&AffineHull>,
) -> Result<Inequality> {
    Ok(orbit(ineq, gens, hull)?.swap_remove(0))
}

/// Partitions `ineqs` into orbits under the group generated by `gens`.
/// Classes are sorted by representative.
pub fn symmetry_classes(
    ineqs: &[Inequality],
    gens: &[SignedPermutation],
    hull: Option<&AffineHull>,
) -> Result<Vec<SymmetryClass>> {
    let normal = ineqs
        .iter()
        .map(|q| normalize(q.clone(), hull))
        .collect::<Result<Vec<_>>>()?;
    let mut assigned = vec![false; ineqs.len()];
    let mut classes = Vec::new();
    for i in 0..ineqs.len() {
        if assigned[i] {
            continue;
        }
        let orb = orbit(&normal[i], gens, hull)?;
        let mut members = Vec::new();
        for j in i..ineqs.len() {
            if !assigned[j] && orb.binary_search_by(|o| o.key().cmp(&normal[j].key())).is_ok() {
                assigned[j] = true;
                members.push(j);
            }
        }
        classes.push(SymmetryClass {
            representative: orb[0].clone(),
            members,
        });
    }
    classes.sort_by(|a, b| a.representative.key().cmp(&b.representative.key()));
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{ab_bc_terms, ab_terms};
    use crate::polytope::{enumerate_vertices, facets, CausalModel, ModelKind};

    fn square_basis() -> Basis {
        Basis::probability(Scenario::from_shape(&[(1, 2)], &[]).unwrap())
    }

    #[test]
    fn square_facets_form_one_class_under_rotation() {
        let b = square_basis();
        // (u, v) -> (-v, u)
        let rot = SignedPermutation::new(vec![1, 0], vec![1, -1]).unwrap();
        let f: Vec<Inequality> = [(vec![1, 0], 1), (vec![-1, 0], 1), (vec![0, 1], 1), (vec![0, -1], 1)]
            .into_iter()
            .map(|(c, d)| Inequality::new(b.clone(), c, d).unwrap())
            .collect();
        let classes = symmetry_classes(&f, &[rot], None).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].members, vec![0, 1, 2, 3]);
        assert_eq!(classes[0].representative.coeffs, vec![-1, 0]);
    }

    #[test]
    fn malformed_generator_is_rejected() {
        assert!(SignedPermutation::new(vec![0, 0], vec![1, 1]).is_err());
        assert!(SignedPermutation::new(vec![1, 0], vec![1, 2]).is_err());
        let b = square_basis();
        let i = Inequality::new(b, vec![1, 0], 1).unwrap();
        let g = SignedPermutation::new(vec![0, 1, 2], vec![1, 1, 1]).unwrap();
        assert!(orbit(&i, &[g], None).is_err());
    }

    #[test]
    fn output_flip_on_correlators_is_a_sign_change() {
        let sc = Scenario::from_shape(&[(2, 2), (2, 2)], &[]).unwrap();
        let b = Basis::correlator(sc.clone(), ab_terms(&sc)).unwrap();
        let r = Relabeling::OutputSwap {
            step: 0,
            a: 0,
            b: 1,
            when: vec![(Var::Setting(0), 1)],
        };
        let g = induce(&r, &b).unwrap().unwrap();
        assert_eq!(g.perm, vec![0, 1, 2, 3]);
        assert_eq!(g.signs, vec![1, 1, -1, -1]);
        // flipping A in a single context only negates one correlator, but
        // it is not a symmetry of the local polytope
        let r = Relabeling::OutputSwap {
            step: 0,
            a: 0,
            b: 1,
            when: vec![(Var::Setting(0), 1), (Var::Setting(1), 0)],
        };
        let g = induce(&r, &b).unwrap().unwrap();
        assert_eq!(g.signs, vec![1, 1, -1, 1]);
        let vs = enumerate_vertices(&CausalModel::new(ModelKind::Lhv, sc).unwrap())
            .unwrap()
            .project(&b)
            .unwrap();
        assert!(symmetry_generators(&vs).unwrap().iter().all(|(_, h)| *h != g));
    }

    #[test]
    fn generators_preserve_lhv_and_chsh_forms_one_class() {
        let sc = Scenario::from_shape(&[(2, 2), (2, 2)], &[]).unwrap();
        let vs = enumerate_vertices(&CausalModel::new(ModelKind::Lhv, sc.clone()).unwrap()).unwrap();
        let gens = symmetry_generators(&vs).unwrap();
        assert!(!gens.is_empty());
        let f = facets(&vs).unwrap();
        let g: Vec<SignedPermutation> = gens.into_iter().map(|(_, g)| g).collect();
        let classes = symmetry_classes(&f.inequalities, &g, Some(&f.hull)).unwrap();
        // positivity and CHSH
        assert_eq!(classes.len(), 2);
        let sizes: Vec<usize> = classes.iter().map(|c| c.members.len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 24);
        assert!(sizes.contains(&16) && sizes.contains(&8));
    }

    #[test]
    fn party_exchange_only_for_symmetric_models() {
        let sc = Scenario::from_shape(&[(2, 2), (2, 2), (2, 2)], &[]).unwrap();
        let vs = enumerate_vertices(&CausalModel::new(ModelKind::TemporalWeak, sc.clone()).unwrap()).unwrap();
        let vs = vs.project(&Basis::correlator(sc.clone(), ab_bc_terms(&sc)).unwrap()).unwrap();
        let gens = symmetry_generators(&vs).unwrap();
        assert!(gens
            .iter()
            .all(|(r, _)| !matches!(r, Relabeling::PartyExchange { .. })));
        // swapping y labels is a symmetry of the projected polytope
        assert!(gens
            .iter()
            .any(|(r, _)| *r == Relabeling::InputSwap { step: 1, a: 0, b: 1 }));
    }
}
