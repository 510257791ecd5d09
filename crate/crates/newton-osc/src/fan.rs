//! Fans in the nonnegative orthant: normal fans of Newton polyhedra, common
//! refinements, unimodular subdivisions, and the monomial chart attached to a
//! unimodular cone.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::geom::dd::extreme_rays;
use crate::geom::feas::{feasible, Constraint, Rel};
use crate::geom::{linalg, Face, NewtonPolyhedron};
use crate::rat::{dot_ii, dot_iq, primitive, IVec, QVec, Rat};

/// Default cap on the number of cones created while unimodularizing.
pub const SUBDIVISION_BUDGET: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum FanError {
    #[error("cone is not a unimodular cone of full dimension")]
    NotUnimodular,
    #[error("cone is not contained in a single dual cone of the polyhedron")]
    ConeNotCompatible,
    #[error("unimodular subdivision exceeded the budget of {budget} new cones")]
    UnimodularizationBudgetExceeded { budget: usize, partial: Fan },
}

/// A strongly convex rational polyhedral cone in the nonnegative orthant,
/// stored by its extreme rays as primitive integer vectors in lexicographic
/// order. Callers must supply an irredundant generator set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cone {
    n: usize,
    skeleton: Vec<IVec>,
}

impl Cone {
    pub fn new(n: usize, skeleton: Vec<IVec>) -> Self {
        let mut rays: Vec<IVec> = skeleton
            .iter()
            .map(|r| {
                assert_eq!(r.len(), n, "skeleton vector of wrong dimension");
                assert!(r.iter().any(|x| !x.is_zero()), "zero vector in skeleton");
                assert!(
                    r.iter().all(|x| !x.is_negative()),
                    "skeleton ray outside the nonnegative orthant"
                );
                primitive(r)
            })
            .collect();
        rays.sort();
        rays.dedup();
        Cone { n, skeleton: rays }
    }

    pub fn zero(n: usize) -> Self {
        Cone { n, skeleton: Vec::new() }
    }

    pub fn orthant(n: usize) -> Self {
        let mut rays = Vec::new();
        for j in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            rays.push(e);
        }
        Cone::new(n, rays)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn skeleton(&self) -> &[IVec] {
        &self.skeleton
    }

    pub fn dim(&self) -> usize {
        let rows: Vec<QVec> = self
            .skeleton
            .iter()
            .map(|r| r.iter().map(|x| Rat::from(x.clone())).collect())
            .collect();
        linalg::rank(&rows)
    }

    pub fn is_simplicial(&self) -> bool {
        self.dim() == self.skeleton.len()
    }

    /// Absolute lattice determinant; `None` unless the cone is simplicial of
    /// full dimension.
    pub fn lattice_det(&self) -> Option<BigInt> {
        if self.skeleton.len() != self.n || !self.is_simplicial() {
            return None;
        }
        Some(linalg::int_det(&self.skeleton).abs())
    }

    pub fn is_unimodular(&self) -> bool {
        self.lattice_det().is_some_and(|d| d.is_one())
    }

    /// Facet inequalities `⟨h, x⟩ ≥ 0`; only defined for full-dimensional
    /// cones, where the dual cone is pointed.
    pub fn hrep(&self) -> Vec<IVec> {
        assert_eq!(self.dim(), self.n, "hrep needs a full-dimensional cone");
        extreme_rays(&self.skeleton, self.n)
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        assert_eq!(x.len(), self.n);
        if self.skeleton.is_empty() {
            return x.iter().all(|c| c.is_zero());
        }
        if self.dim() == self.n {
            return self.hrep().iter().all(|h| !dot_iq(h, x).is_negative());
        }
        // Membership as feasibility of x = Σ λ_i r_i with λ ≥ 0.
        let k = self.skeleton.len();
        let mut cons = Vec::new();
        for j in 0..self.n {
            let coeffs: QVec = self
                .skeleton
                .iter()
                .map(|r| Rat::from(r[j].clone()))
                .collect();
            cons.push(Constraint::new(coeffs, Rel::Eq, x[j].clone()));
        }
        for i in 0..k {
            let mut coeffs = vec![Rat::zero(); k];
            coeffs[i] = Rat::one();
            cons.push(Constraint::new(coeffs, Rel::Ge, Rat::zero()));
        }
        feasible(&cons, k)
    }

    pub fn contains_int(&self, x: &[BigInt]) -> bool {
        let q: QVec = x.iter().map(|c| Rat::from(c.clone())).collect();
        self.contains(&q)
    }

    pub fn is_subset_of(&self, other: &Cone) -> bool {
        self.skeleton.iter().all(|r| other.contains_int(r))
    }

    /// All faces, including the cone itself and the zero cone. Requires a
    /// full-dimensional cone.
    pub fn faces(&self) -> Vec<Cone> {
        let h = self.hrep();
        assert!(h.len() <= 128, "too many facets for mask arithmetic");
        let ray_masks: Vec<u128> = self
            .skeleton
            .iter()
            .map(|r| {
                let mut m = 0u128;
                for (i, hi) in h.iter().enumerate() {
                    if dot_ii(hi, r).is_zero() {
                        m |= 1 << i;
                    }
                }
                m
            })
            .collect();
        let mut masks: BTreeSet<u128> = ray_masks.iter().copied().collect();
        masks.insert(0);
        loop {
            let snapshot: Vec<u128> = masks.iter().copied().collect();
            let before = masks.len();
            for (i, a) in snapshot.iter().enumerate() {
                for b in &snapshot[i + 1..] {
                    masks.insert(a & b);
                }
            }
            if masks.len() == before {
                break;
            }
        }
        let mut seen = BTreeSet::new();
        let mut out = vec![Cone::zero(self.n)];
        for m in masks {
            let rays: Vec<IVec> = self
                .skeleton
                .iter()
                .zip(&ray_masks)
                .filter(|(_, rm)| *rm & m == m)
                .map(|(r, _)| r.clone())
                .collect();
            if !rays.is_empty() && seen.insert(rays.clone()) {
                out.push(Cone::new(self.n, rays));
            }
        }
        out.sort_by_key(|c| (c.skeleton.len(), c.skeleton.clone()));
        out
    }

    /// Barycentric coordinates of `x` in a full-dimensional simplicial cone;
    /// `None` when `x` lies outside.
    pub fn simplicial_coords(&self, x: &[BigInt]) -> Option<QVec> {
        assert_eq!(self.skeleton.len(), self.n, "needs a simplicial n-cone");
        let rows: Vec<QVec> = (0..self.n)
            .map(|j| {
                self.skeleton
                    .iter()
                    .map(|r| Rat::from(r[j].clone()))
                    .collect()
            })
            .collect();
        let b: QVec = x.iter().map(|c| Rat::from(c.clone())).collect();
        let lambda = linalg::solve_square(&rows, &b).expect("simplicial cone is nonsingular");
        if lambda.iter().any(|c| c.is_negative()) {
            None
        } else {
            Some(lambda)
        }
    }
}

/// A finite collection of cones closed under taking faces, canonically
/// ordered. Maximal cones are those of full dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    n: usize,
    cones: Vec<Cone>,
}

impl Fan {
    /// Face closure of a set of full-dimensional cones.
    pub fn from_max_cones(n: usize, max: Vec<Cone>) -> Self {
        assert!(!max.is_empty(), "a fan needs at least one cone");
        let mut seen: BTreeSet<Vec<IVec>> = BTreeSet::new();
        let mut cones: Vec<Cone> = Vec::new();
        for c in &max {
            assert_eq!(c.ambient_dim(), n);
            assert_eq!(c.dim(), n, "maximal cones must be full-dimensional");
            for f in c.faces() {
                if seen.insert(f.skeleton.clone()) {
                    cones.push(f);
                }
            }
        }
        cones.sort_by_key(|c| (c.dim(), c.skeleton.clone()));
        let fan = Fan { n, cones };
        #[cfg(debug_assertions)]
        fan.validate();
        fan
    }

    /// Checks that pairwise intersections of maximal cones are common faces.
    #[cfg(debug_assertions)]
    fn validate(&self) {
        let max: Vec<&Cone> = self.max_cones();
        if max.len() > 64 {
            return;
        }
        let face_sets: Vec<BTreeSet<Vec<IVec>>> = max
            .iter()
            .map(|c| c.faces().into_iter().map(|f| f.skeleton).collect())
            .collect();
        for i in 0..max.len() {
            for j in i + 1..max.len() {
                let mut rows = max[i].hrep();
                rows.extend(max[j].hrep());
                let meet = Cone::new(self.n, extreme_rays(&rows, self.n));
                assert!(
                    face_sets[i].contains(&meet.skeleton) && face_sets[j].contains(&meet.skeleton),
                    "cone intersection is not a common face"
                );
            }
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cones_of_dim(&self, k: usize) -> Vec<&Cone> {
        self.cones.iter().filter(|c| c.dim() == k).collect()
    }

    pub fn max_cones(&self) -> Vec<&Cone> {
        self.cones_of_dim(self.n)
    }

    /// Primitive generators of the one-dimensional cones.
    pub fn rays(&self) -> Vec<&IVec> {
        self.cones_of_dim(1)
            .into_iter()
            .map(|c| &c.skeleton[0])
            .collect()
    }

    pub fn is_simplicial(&self) -> bool {
        self.max_cones().iter().all(|c| c.is_simplicial())
    }

    pub fn is_unimodular(&self) -> bool {
        self.max_cones().iter().all(|c| c.is_unimodular())
    }

    pub fn contains_cone(&self, c: &Cone) -> bool {
        self.cones.iter().any(|d| d == c)
    }

    /// Every maximal cone of `self` lies inside some maximal cone of `other`.
    pub fn refines(&self, other: &Fan) -> bool {
        let coarse: Vec<(&Cone, Vec<IVec>)> = other
            .max_cones()
            .into_iter()
            .map(|c| (c, c.hrep()))
            .collect();
        self.max_cones().iter().all(|c| {
            coarse.iter().any(|(_, h)| {
                c.skeleton
                    .iter()
                    .all(|r| h.iter().all(|hi| !dot_ii(hi, r).is_negative()))
            })
        })
    }

    /// Precomputes facet data of the maximal cones for repeated point location.
    pub fn locator(&self) -> FanLocator<'_> {
        let max: Vec<(&Cone, Vec<IVec>)> = self
            .max_cones()
            .into_iter()
            .map(|c| (c, c.hrep()))
            .collect();
        FanLocator { max }
    }
}

pub struct FanLocator<'a> {
    max: Vec<(&'a Cone, Vec<IVec>)>,
}

impl<'a> FanLocator<'a> {
    /// Indices of the maximal cones containing `x`, and of those containing
    /// it in their interior.
    pub fn locate(&self, x: &[Rat]) -> (Vec<usize>, Vec<usize>) {
        let mut on = Vec::new();
        let mut interior = Vec::new();
        for (i, (_, h)) in self.max.iter().enumerate() {
            let mut inside = true;
            let mut strict = true;
            for hi in h {
                let v = dot_iq(hi, x);
                if v.is_negative() {
                    inside = false;
                    break;
                }
                if v.is_zero() {
                    strict = false;
                }
            }
            if inside {
                on.push(i);
                if strict {
                    interior.push(i);
                }
            }
        }
        (on, interior)
    }

    pub fn cone(&self, i: usize) -> &'a Cone {
        self.max[i].0
    }
}

/// The dual fan: for each vertex `v` the cone of weights minimized at `v`,
/// supported on the whole nonnegative orthant.
pub fn normal_fan(p: &NewtonPolyhedron) -> Fan {
    let n = p.ambient_dim();
    let mut max = Vec::new();
    for v in &p.vertices {
        let mut rows: Vec<IVec> = Vec::new();
        for j in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            rows.push(e);
        }
        for g in &p.generators {
            let diff: QVec = g.iter().zip(v).map(|(a, b)| a - b).collect();
            if diff.iter().any(|c| !c.is_zero()) {
                rows.push(crate::rat::clear_denominators(&diff));
            }
        }
        max.push(Cone::new(n, extreme_rays(&rows, n)));
    }
    Fan::from_max_cones(n, max)
}

/// Coarsest fan refining all of the given fans: maximal cones are the
/// full-dimensional pairwise intersections of maximal cones.
pub fn common_refinement(fans: &[&Fan]) -> Fan {
    assert!(!fans.is_empty());
    let n = fans[0].ambient_dim();
    assert!(fans.iter().all(|f| f.ambient_dim() == n));
    let mut acc: Vec<Cone> = fans[0].max_cones().into_iter().cloned().collect();
    for f in &fans[1..] {
        let mut next = Vec::new();
        for a in &acc {
            let ha = a.hrep();
            for b in f.max_cones() {
                let mut rows = ha.clone();
                rows.extend(b.hrep());
                let c = Cone::new(n, extreme_rays(&rows, n));
                if c.dim() == n {
                    next.push(c);
                }
            }
        }
        next.sort();
        next.dedup();
        acc = next;
    }
    Fan::from_max_cones(n, acc)
}

/// Pulling triangulation of one full-dimensional cone: recursively cones the
/// lexicographically smallest ray of each face over the triangulated facets
/// that avoid it. Global ray order makes the result agree across shared faces.
fn pulling_triangulation(cone: &Cone) -> Vec<Cone> {
    if cone.is_simplicial() {
        return vec![cone.clone()];
    }
    let n = cone.ambient_dim();
    let faces = cone.faces();
    let dims: Vec<usize> = faces.iter().map(|f| f.dim()).collect();
    let mut memo: BTreeMap<Vec<IVec>, Vec<Vec<IVec>>> = BTreeMap::new();
    let mut order: Vec<usize> = (0..faces.len()).collect();
    order.sort_by_key(|&i| dims[i]);
    for &i in &order {
        let f = &faces[i];
        if f.skeleton.len() == dims[i] {
            memo.insert(f.skeleton.clone(), vec![f.skeleton.clone()]);
            continue;
        }
        let r0 = &f.skeleton[0];
        let mut simplices = Vec::new();
        for (j, g) in faces.iter().enumerate() {
            if dims[j] + 1 != dims[i]
                || g.skeleton.contains(r0)
                || !g.skeleton.iter().all(|r| f.skeleton.contains(r))
            {
                continue;
            }
            for s in &memo[&g.skeleton] {
                let mut t = s.clone();
                t.push(r0.clone());
                t.sort();
                simplices.push(t);
            }
        }
        memo.insert(f.skeleton.clone(), simplices);
    }
    memo[&cone.skeleton]
        .iter()
        .map(|s| Cone::new(n, s.clone()))
        .collect()
}

/// Splits every simplicial maximal cone containing `w` along `w`; returns the
/// number of new cones created.
fn stellar_split(max: &mut Vec<Cone>, w: &IVec) -> usize {
    let n = w.len();
    let mut next = Vec::new();
    let mut created = 0usize;
    for c in max.iter() {
        match c.simplicial_coords(w) {
            None => next.push(c.clone()),
            Some(lambda) => {
                for (i, li) in lambda.iter().enumerate() {
                    if li.is_zero() {
                        continue;
                    }
                    let mut rays: Vec<IVec> =
                        c.skeleton.iter().cloned().collect();
                    rays[i] = w.clone();
                    next.push(Cone::new(n, rays));
                    created += 1;
                }
            }
        }
    }
    next.sort();
    next.dedup();
    *max = next;
    created
}

/// Nonzero lattice point of the half-open fundamental parallelepiped with the
/// smallest coordinate sum (lexicographic tie-break). Exists whenever the
/// lattice determinant exceeds one.
fn min_parallelepiped_point(c: &Cone) -> IVec {
    let n = c.ambient_dim();
    let hi: Vec<BigInt> = (0..n)
        .map(|j| c.skeleton.iter().map(|r| r[j].clone()).sum())
        .collect();
    let bounds: Vec<u64> = hi
        .iter()
        .map(|b| u64::try_from(b).expect("parallelepiped bound overflows u64"))
        .collect();
    let one = Rat::one();
    let mut best: Option<(BigInt, IVec)> = None;
    let mut counter = vec![0u64; n];
    loop {
        if counter.iter().any(|&x| x > 0) {
            let x: IVec = counter.iter().map(|&v| BigInt::from(v)).collect();
            if let Some(lambda) = c.simplicial_coords(&x) {
                if lambda.iter().all(|l| *l < one) {
                    let s: BigInt = x.iter().sum();
                    let cand = (s, x);
                    if best.as_ref().is_none_or(|b| cand < *b) {
                        best = Some(cand);
                    }
                }
            }
        }
        // Odometer increment over the box [0, hi].
        let mut k = 0;
        loop {
            if k == n {
                let (_, w) = best.expect("determinant > 1 guarantees a lattice point");
                debug_assert_eq!(primitive(&w), w);
                return w;
            }
            if counter[k] < bounds[k] {
                counter[k] += 1;
                break;
            }
            counter[k] = 0;
            k += 1;
        }
    }
}

/// Resolves a two-dimensional cone into unimodular pieces by repeatedly
/// inserting the unique primitive ray at lattice distance one.
fn resolve_2d(c: &Cone, created: &mut usize) -> Vec<Cone> {
    let det2 = |a: &IVec, b: &IVec| -> BigInt { &a[0] * &b[1] - &a[1] * &b[0] };
    let (mut u, mut v) = (c.skeleton[0].clone(), c.skeleton[1].clone());
    if det2(&u, &v).is_negative() {
        std::mem::swap(&mut u, &mut v);
    }
    let mut out = Vec::new();
    loop {
        let d = det2(&u, &v);
        assert!(d.is_positive());
        if d.is_one() {
            out.push(Cone::new(2, vec![u, v]));
            return out;
        }
        // x0 solves det(u, x0) = 1; sliding by u lands the chain inside.
        let e = u[0].extended_gcd(&u[1]);
        assert!(e.gcd.is_one());
        let x0 = vec![-e.y.clone(), e.x.clone()];
        debug_assert!(det2(&u, &x0).is_one());
        let t = Rat::new(-det2(&x0, &v), d.clone()).floor().to_integer() + 1;
        let w: IVec = vec![&x0[0] + &t * &u[0], &x0[1] + &t * &u[1]];
        debug_assert!(det2(&u, &w).is_one());
        debug_assert!(det2(&w, &v).is_positive());
        debug_assert!(w.iter().all(|c| !c.is_negative()));
        out.push(Cone::new(2, vec![u, w.clone()]));
        *created += 1;
        u = w;
    }
}

/// Subdivides into a unimodular simplicial fan with the default budget.
pub fn simplicialize_unimodular(fan: &Fan) -> Result<Fan, FanError> {
    simplicialize_unimodular_with_budget(fan, SUBDIVISION_BUDGET)
}

/// In two dimensions each cone is resolved minimally; in higher dimensions
/// the cones are first triangulated by pulling, then refined by stellar
/// subdivisions at the smallest lattice point of the offending cone.
pub fn simplicialize_unimodular_with_budget(
    fan: &Fan,
    budget: usize,
) -> Result<Fan, FanError> {
    let n = fan.ambient_dim();
    let mut created = 0usize;
    let mut max: Vec<Cone> = Vec::new();
    for c in fan.max_cones() {
        max.extend(pulling_triangulation(c));
    }
    max.sort();
    max.dedup();
    if n == 2 {
        let mut out = Vec::new();
        for c in &max {
            out.extend(resolve_2d(c, &mut created));
            if created > budget {
                return Err(FanError::UnimodularizationBudgetExceeded {
                    budget,
                    partial: Fan::from_max_cones(n, out),
                });
            }
        }
        return Ok(Fan::from_max_cones(n, out));
    }
    loop {
        let Some(pos) = max.iter().position(|c| {
            c.lattice_det().expect("maximal cones are simplicial") > BigInt::one()
        }) else {
            break;
        };
        if created >= budget {
            return Err(FanError::UnimodularizationBudgetExceeded {
                budget,
                partial: Fan::from_max_cones(n, max),
            });
        }
        let w = min_parallelepiped_point(&max[pos]);
        created += stellar_split(&mut max, &w);
    }
    Ok(Fan::from_max_cones(n, max))
}

/// A second, strictly finer unimodular subdivision: the first one with every
/// maximal cone split at the sum of its skeleton. Used to check that results
/// do not depend on the choice of subdivision.
pub fn simplicialize_unimodular_alt(fan: &Fan) -> Result<Fan, FanError> {
    let base = simplicialize_unimodular(fan)?;
    let n = base.ambient_dim();
    let mut out = Vec::new();
    for c in base.max_cones() {
        let w: IVec = (0..n)
            .map(|j| c.skeleton.iter().map(|r| r[j].clone()).sum())
            .collect();
        let mut piece = vec![c.clone()];
        stellar_split(&mut piece, &w);
        out.extend(piece);
    }
    Ok(Fan::from_max_cones(n, out))
}

/// The vertex of `p` whose dual cone contains `sigma`, if any.
fn compatible_vertex<'a>(p: &'a NewtonPolyhedron, sigma: &Cone) -> Option<&'a QVec> {
    p.vertices.iter().find(|v| {
        sigma
            .skeleton()
            .iter()
            .all(|a| dot_iq(a, v) == p.support_value(a))
    })
}

pub fn is_compatible(p: &NewtonPolyhedron, sigma: &Cone) -> bool {
    compatible_vertex(p, sigma).is_some()
}

/// The face of `p` cut out by the supporting hyperplanes of the skeleton rays
/// indexed by `subset`; the whole polyhedron for the empty subset.
pub fn face_of_ray_set(
    p: &NewtonPolyhedron,
    sigma: &Cone,
    subset: &[usize],
) -> Result<Face, FanError> {
    if compatible_vertex(p, sigma).is_none() {
        return Err(FanError::ConeNotCompatible);
    }
    let mut active: BTreeSet<usize> = BTreeSet::new();
    for &j in subset {
        assert!(j < sigma.skeleton().len(), "ray index out of range");
        let f = p.supporting_face(&sigma.skeleton()[j]);
        active.extend(f.active.iter().copied());
    }
    // Close the facet set over the points of the intersection face.
    let act: Vec<usize> = active.iter().copied().collect();
    let verts: Vec<&QVec> = p
        .vertices
        .iter()
        .filter(|v| act.iter().all(|&i| dot_iq(&p.facets[i].normal, v) == p.facets[i].offset))
        .collect();
    assert!(!verts.is_empty(), "compatible cone forces a common vertex");
    let rays: Vec<usize> = (0..p.ambient_dim())
        .filter(|&r| act.iter().all(|&i| p.facets[i].normal[r].is_zero()))
        .collect();
    let closed: Vec<usize> = (0..p.facets.len())
        .filter(|&i| {
            verts
                .iter()
                .all(|v| dot_iq(&p.facets[i].normal, v) == p.facets[i].offset)
                && rays.iter().all(|&r| p.facets[i].normal[r].is_zero())
        })
        .collect();
    Ok(p.face_by_active(&closed)
        .expect("closed facet set indexes a face")
        .clone())
}

/// Indices of the skeleton rays whose supporting hyperplane contains `gamma`.
pub fn ray_set_of_face(
    p: &NewtonPolyhedron,
    sigma: &Cone,
    gamma: &Face,
) -> Result<Vec<usize>, FanError> {
    if compatible_vertex(p, sigma).is_none() {
        return Err(FanError::ConeNotCompatible);
    }
    assert!(p.owns_face(gamma), "face must belong to the polyhedron");
    Ok((0..sigma.skeleton().len())
        .filter(|&j| {
            let a = &sigma.skeleton()[j];
            let l = p.support_value(a);
            gamma.vertices.iter().all(|v| dot_iq(a, v) == l)
                && gamma.rays.iter().all(|&r| a[r].is_zero())
        })
        .collect())
}

/// Whether the face attached to `subset` is compact, established two ways:
/// by the face's recession data and by the chart exponents (every coordinate
/// must pick up a positive exponent from some selected ray).
pub fn compactness_criterion(
    p: &NewtonPolyhedron,
    sigma: &Cone,
    subset: &[usize],
) -> Result<bool, FanError> {
    let gamma = face_of_ray_set(p, sigma, subset)?;
    let via_chart = (0..p.ambient_dim())
        .all(|i| subset.iter().any(|&j| sigma.skeleton()[j][i].is_positive()));
    assert_eq!(
        gamma.compact, via_chart,
        "recession and chart compactness tests disagree"
    );
    Ok(gamma.compact)
}

/// Monomial coordinate change attached to a unimodular cone: with skeleton
/// `a¹ … aⁿ`, the chart is `x_j = Π_k y_k^{a^k_j}`, with Jacobian exponents
/// `⟨a^k⟩ − 1`.
#[derive(Debug, Clone)]
pub struct ChartMap {
    pub cone: Cone,
    /// `exponent_matrix[j][k]` is the exponent of `y_k` in `x_j`.
    pub exponent_matrix: Vec<IVec>,
    /// Exponent of `y_k` in the Jacobian monomial.
    pub jacobian_exponents: IVec,
}

impl ChartMap {
    /// Exponent vector of the pullback of the monomial `x^alpha`.
    pub fn pullback_exponent(&self, alpha: &[Rat]) -> QVec {
        self.cone
            .skeleton()
            .iter()
            .map(|a| dot_iq(a, alpha))
            .collect()
    }

    pub fn apply_f64(&self, y: &[f64]) -> Vec<f64> {
        self.exponent_matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(y)
                    .map(|(e, yi)| {
                        let e = i32::try_from(e).expect("chart exponent fits i32");
                        yi.powi(e)
                    })
                    .product()
            })
            .collect()
    }
}

pub fn chart(sigma: &Cone) -> Result<ChartMap, FanError> {
    if !sigma.is_unimodular() {
        return Err(FanError::NotUnimodular);
    }
    let n = sigma.ambient_dim();
    let exponent_matrix: Vec<IVec> = (0..n)
        .map(|j| sigma.skeleton().iter().map(|a| a[j].clone()).collect())
        .collect();
    let jacobian_exponents: IVec = sigma
        .skeleton()
        .iter()
        .map(|a| a.iter().sum::<BigInt>() - 1)
        .collect();
    Ok(ChartMap {
        cone: sigma.clone(),
        exponent_matrix,
        jacobian_exponents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::NewtonPolyhedron;
    use crate::rat::{ivec, qvec, rat, rint};
    use rand::{Rng, SeedableRng};

    fn poly(points: &[&[i64]]) -> NewtonPolyhedron {
        let gens: Vec<QVec> = points.iter().map(|p| qvec(p)).collect();
        NewtonPolyhedron::build(&gens).unwrap()
    }

    #[test]
    fn orthant_fan_of_a_monomial() {
        let p = poly(&[&[2, 3]]);
        let fan = normal_fan(&p);
        assert_eq!(fan.max_cones().len(), 1);
        assert_eq!(fan.cones().len(), 4);
        assert_eq!(fan.rays().len(), 2);
        assert!(fan.is_unimodular());
        assert!(fan.contains_cone(&Cone::orthant(2)));
    }

    #[test]
    fn normal_fan_of_a_diagram_with_two_vertices() {
        let p = poly(&[&[4, 0], &[0, 4]]);
        let fan = normal_fan(&p);
        assert_eq!(fan.max_cones().len(), 2);
        let rays: Vec<&IVec> = fan.rays();
        assert_eq!(rays.len(), 3);
        assert!(rays.contains(&&ivec(&[1, 1])));
        assert!(fan.is_unimodular());
        let again = simplicialize_unimodular(&fan).unwrap();
        assert_eq!(again, fan);
    }

    #[test]
    fn cone_membership_and_faces() {
        let c = Cone::new(2, vec![ivec(&[1, 0]), ivec(&[1, 2])]);
        assert!(c.contains(&qvec(&[1, 1])));
        assert!(!c.contains(&qvec(&[0, 1])));
        assert!(c.contains(&qvec(&[0, 0])));
        let faces = c.faces();
        assert_eq!(faces.len(), 4);
        assert_eq!(faces.iter().filter(|f| f.dim() == 1).count(), 2);
        let edge = Cone::new(2, vec![ivec(&[1, 2])]);
        assert!(edge.is_subset_of(&c));
        assert!(!c.is_subset_of(&edge));
    }

    #[test]
    fn hirzebruch_jung_chain() {
        let fan = Fan::from_max_cones(2, vec![Cone::new(2, vec![ivec(&[1, 0]), ivec(&[1, 5])])]);
        let res = simplicialize_unimodular(&fan).unwrap();
        assert!(res.is_unimodular());
        assert!(res.refines(&fan));
        let mut rays: Vec<IVec> = res.rays().into_iter().cloned().collect();
        rays.sort();
        let expected: Vec<IVec> = (0..=5).map(|k| ivec(&[1, k])).collect();
        assert_eq!(rays, expected);
    }

    #[test]
    fn hirzebruch_jung_resolves_det_two() {
        let fan = Fan::from_max_cones(2, vec![Cone::new(2, vec![ivec(&[1, 0]), ivec(&[1, 2])])]);
        let res = simplicialize_unimodular(&fan).unwrap();
        assert!(res.is_unimodular());
        assert_eq!(res.max_cones().len(), 2);
        assert!(res.rays().contains(&&ivec(&[1, 1])));
    }

    #[test]
    fn pulling_splits_a_cone_over_a_square() {
        let c = Cone::new(
            3,
            vec![ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[1, 0, 1]), ivec(&[0, 1, 1])],
        );
        assert!(!c.is_simplicial());
        let pieces = pulling_triangulation(&c);
        assert_eq!(pieces.len(), 2);
        assert!(pieces.iter().all(|p| p.is_unimodular()));
        for p in &pieces {
            assert!(p.is_subset_of(&c));
        }
    }

    #[test]
    fn stellar_resolution_in_three_dimensions() {
        let c = Cone::new(3, vec![ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[1, 1, 2])]);
        let fan = Fan::from_max_cones(3, vec![c]);
        let res = simplicialize_unimodular(&fan).unwrap();
        assert!(res.is_unimodular());
        assert!(res.refines(&fan));
        assert_eq!(res.max_cones().len(), 3);
        assert!(res.rays().contains(&&ivec(&[1, 1, 1])));
    }

    #[test]
    fn stellar_resolution_in_four_dimensions() {
        let c = Cone::new(
            4,
            vec![
                ivec(&[1, 0, 0, 0]),
                ivec(&[0, 1, 0, 0]),
                ivec(&[0, 0, 1, 0]),
                ivec(&[1, 1, 1, 3]),
            ],
        );
        let fan = Fan::from_max_cones(4, vec![c]);
        let res = simplicialize_unimodular(&fan).unwrap();
        assert!(res.is_unimodular());
        assert!(res.refines(&fan));
    }

    #[test]
    fn budget_exhaustion_reports_partial_fan() {
        let c = Cone::new(3, vec![ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[1, 1, 2])]);
        let fan = Fan::from_max_cones(3, vec![c]);
        match simplicialize_unimodular_with_budget(&fan, 0) {
            Err(FanError::UnimodularizationBudgetExceeded { budget: 0, partial }) => {
                assert!(!partial.is_unimodular());
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn alternative_subdivision_is_finer_and_unimodular() {
        let p = poly(&[&[4, 0], &[0, 4]]);
        let fan = normal_fan(&p);
        let a = simplicialize_unimodular(&fan).unwrap();
        let b = simplicialize_unimodular_alt(&fan).unwrap();
        assert_ne!(a, b);
        assert!(b.is_unimodular());
        assert!(b.refines(&a));
        assert!(a.refines(&fan));
    }

    #[test]
    fn refinement_of_two_normal_fans() {
        let pf = poly(&[&[4, 0], &[0, 4]]);
        let pg = poly(&[&[1, 0]]);
        let ff = normal_fan(&pf);
        let fg = normal_fan(&pg);
        let joint = common_refinement(&[&ff, &fg]);
        assert!(joint.refines(&ff));
        assert!(joint.refines(&fg));
        assert_eq!(joint.max_cones().len(), 2);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let loc = joint.locator();
        for _ in 0..200 {
            let x = vec![
                rat(rng.gen_range(0..100), rng.gen_range(1..20)),
                rat(rng.gen_range(0..100), rng.gen_range(1..20)),
            ];
            let (on, interior) = loc.locate(&x);
            assert!(!on.is_empty(), "ray not covered by the fan");
            assert!(interior.len() <= 1, "interiors overlap");
        }
    }

    #[test]
    fn face_and_ray_set_maps_invert_each_other() {
        let p = poly(&[&[4, 0], &[0, 4]]);
        let sigma = Cone::new(2, vec![ivec(&[1, 0]), ivec(&[1, 1])]);
        let edge = face_of_ray_set(&p, &sigma, &[1]).unwrap();
        assert!(edge.compact);
        assert_eq!(edge.dim, 1);
        let vertical = face_of_ray_set(&p, &sigma, &[0]).unwrap();
        assert!(!vertical.compact);
        let vertex = face_of_ray_set(&p, &sigma, &[0, 1]).unwrap();
        assert_eq!(vertex.dim, 0);
        assert_eq!(vertex.vertices, vec![qvec(&[0, 4])]);
        let whole = face_of_ray_set(&p, &sigma, &[]).unwrap();
        assert_eq!(whole.dim, 2);

        assert_eq!(ray_set_of_face(&p, &sigma, &edge).unwrap(), vec![1]);
        assert_eq!(ray_set_of_face(&p, &sigma, &vertex).unwrap(), vec![0, 1]);
        assert_eq!(ray_set_of_face(&p, &sigma, &whole).unwrap(), Vec::<usize>::new());

        let bad = Cone::new(2, vec![ivec(&[2, 1]), ivec(&[1, 2])]);
        assert!(matches!(
            face_of_ray_set(&p, &bad, &[0]),
            Err(FanError::ConeNotCompatible)
        ));
    }

    #[test]
    fn compactness_routes_agree() {
        let p = poly(&[&[4, 0], &[0, 4]]);
        let sigma = Cone::new(2, vec![ivec(&[1, 0]), ivec(&[1, 1])]);
        assert!(compactness_criterion(&p, &sigma, &[1]).unwrap());
        assert!(!compactness_criterion(&p, &sigma, &[0]).unwrap());
        assert!(compactness_criterion(&p, &sigma, &[0, 1]).unwrap());
    }

    #[test]
    fn chart_of_a_unimodular_cone() {
        let sigma = Cone::new(2, vec![ivec(&[1, 0]), ivec(&[1, 1])]);
        let m = chart(&sigma).unwrap();
        assert_eq!(m.exponent_matrix, vec![ivec(&[1, 1]), ivec(&[0, 1])]);
        assert_eq!(m.jacobian_exponents, ivec(&[0, 1]));
        let e = m.pullback_exponent(&qvec(&[4, 0]));
        assert_eq!(e, vec![rint(4), rint(4)]);
        let x = m.apply_f64(&[2.0, 3.0]);
        assert!((x[0] - 6.0).abs() < 1e-12 && (x[1] - 3.0).abs() < 1e-12);

        let bad = Cone::new(2, vec![ivec(&[1, 0]), ivec(&[1, 2])]);
        assert!(matches!(chart(&bad), Err(FanError::NotUnimodular)));
    }

    #[test]
    fn unimodular_subdivision_covers_the_support() {
        let pf = poly(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]]);
        let fan = normal_fan(&pf);
        let res = simplicialize_unimodular(&fan).unwrap();
        assert!(res.is_unimodular());
        assert!(res.refines(&fan));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let loc = res.locator();
        for _ in 0..200 {
            let x = vec![
                rat(rng.gen_range(0..50), rng.gen_range(1..9)),
                rat(rng.gen_range(0..50), rng.gen_range(1..9)),
                rat(rng.gen_range(0..50), rng.gen_range(1..9)),
            ];
            let (on, interior) = loc.locate(&x);
            assert!(!on.is_empty());
            assert!(interior.len() <= 1);
        }
    }
}
