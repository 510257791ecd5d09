//! Exact rational polyhedra of Newton type: `P = conv(points) + R₊ⁿ`.
//!
//! Every polyhedron here is full-dimensional (its recession cone is the
//! whole positive orthant), pointed, and carries an irredundant facet
//! description plus the complete lattice of nonempty faces. All data is
//! exact; facet normals are primitive nonnegative integer vectors.

pub mod dd;
pub mod feas;
pub mod linalg;

use crate::rat::{dot_iq, is_nonneg_vec, primitive, IVec, QVec, Rat};
use feas::{Constraint, Rel};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("no generating points supplied")]
    EmptyInput,
    #[error("ambient dimension {0} unsupported (need 1..=4)")]
    UnsupportedDimension(usize),
    #[error("point lies outside the polyhedron")]
    PointOutsidePolyhedron,
    #[error("point lies in the interior, not on the boundary")]
    PointNotOnBoundary,
}

/// A valid pair `(a, l)`: the inequality `⟨a, x⟩ ≥ l` holds on the
/// polyhedron, `a` is a primitive nonnegative integer vector. For polyhedra
/// generated by integer points the offset is an integer; images under
/// rational scaling carry rational offsets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ValidPair {
    pub normal: IVec,
    pub offset: Rat,
}

impl ValidPair {
    pub fn weight_sum(&self) -> BigInt {
        self.normal.iter().sum()
    }
}

/// A nonempty face, identified by the full set of facets containing it.
///
/// `rays` lists the coordinate axes along which the face is unbounded; it
/// coincides with `zero_weight`, the set `V(γ)` of coordinates on which
/// every defining pair vanishes. `compact` iff both are empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub active: Vec<usize>,
    pub vertices: Vec<QVec>,
    pub rays: Vec<usize>,
    pub dim: usize,
    pub compact: bool,
    pub zero_weight: Vec<usize>,
}

impl Face {
    /// A single valid pair defining this face: the sum of its active
    /// facets' pairs (the zero pair for the whole polyhedron).
    pub fn defining_pair(&self, poly: &NewtonPolyhedron) -> ValidPair {
        let n = poly.ambient_dim();
        let mut normal = vec![BigInt::zero(); n];
        let mut offset = Rat::zero();
        for &i in &self.active {
            for (k, c) in poly.facets[i].normal.iter().enumerate() {
                normal[k] += c;
            }
            offset += &poly.facets[i].offset;
        }
        ValidPair { normal, offset }
    }

    pub fn contains_point(&self, poly: &NewtonPolyhedron, x: &[Rat]) -> bool {
        if poly.membership(x) == Membership::Outside {
            return false;
        }
        self.active
            .iter()
            .all(|&i| dot_iq(&poly.facets[i].normal, x) == poly.facets[i].offset)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Interior,
    Boundary,
    Outside,
}

#[derive(Clone, Debug)]
pub struct NewtonPolyhedron {
    n: usize,
    pub generators: Vec<QVec>,
    pub facets: Vec<ValidPair>,
    pub vertices: Vec<QVec>,
    pub faces: Vec<Face>,
    mask_index: BTreeMap<u128, usize>,
}

impl NewtonPolyhedron {
    /// Builds the polyhedron spanned by `points` together with the positive
    /// orthant as recession cone.
    pub fn build(points: &[QVec]) -> Result<Self, GeomError> {
        if points.is_empty() {
            return Err(GeomError::EmptyInput);
        }
        let n = points[0].len();
        if n == 0 || n > 4 {
            return Err(GeomError::UnsupportedDimension(n));
        }
        assert!(points.iter().all(|p| p.len() == n), "mixed dimensions");
        let mut generators: Vec<QVec> = points.to_vec();
        generators.sort();
        generators.dedup();
        Ok(Self::from_generators(n, generators))
    }

    fn from_generators(n: usize, generators: Vec<QVec>) -> Self {
        // Facets arise as extreme rays of the dual cone of the
        // homogenization: rows (v, 1) per generator and (e_j, 0) per axis.
        let mut rows: Vec<IVec> = Vec::new();
        for v in &generators {
            let mut row: QVec = v.clone();
            row.push(Rat::one());
            rows.push(clear_denominators_keep_sign(&row));
        }
        for j in 0..n {
            let mut e = vec![BigInt::zero(); n + 1];
            e[j] = BigInt::one();
            rows.push(e);
        }
        let dual_rays = dd::extreme_rays(&rows, n + 1);

        let mut facets: Vec<ValidPair> = Vec::new();
        for ray in dual_rays {
            let (a, a0) = ray.split_at(n);
            if a.iter().all(Zero::is_zero) {
                continue;
            }
            let mut g = BigInt::zero();
            for x in a {
                g = g.gcd(x);
            }
            let normal: IVec = a.iter().map(|x| x / &g).collect();
            let offset = -Rat::new(a0[0].clone(), g);
            debug_assert!(is_nonneg_vec(&normal));
            facets.push(ValidPair { normal, offset });
        }
        facets.sort();
        assert!(
            facets.len() <= 128,
            "face lattice bitmasks support at most 128 facets"
        );

        // Incidence atoms: vertices (generators with n independent active
        // facets) and the recession axes.
        let gen_masks: Vec<u128> = generators
            .iter()
            .map(|v| active_mask(&facets, v))
            .collect();
        let mut vertices = Vec::new();
        let mut vertex_masks = Vec::new();
        for (v, &mask) in generators.iter().zip(&gen_masks) {
            let normals: Vec<QVec> = facets
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, f)| {
                    f.normal
                        .iter()
                        .map(|x| Rat::from_integer(x.clone()))
                        .collect()
                })
                .collect();
            if linalg::rank(&normals) == n {
                vertices.push(v.clone());
                vertex_masks.push(mask);
            }
        }
        let ray_masks: Vec<u128> = (0..n)
            .map(|j| {
                let mut m = 0u128;
                for (i, f) in facets.iter().enumerate() {
                    if f.normal[j].is_zero() {
                        m |= 1 << i;
                    }
                }
                m
            })
            .collect();

        // Closure of atom masks under intersection = the face lattice.
        let canon = |mask: u128| -> Option<u128> {
            let mut out = u128::MAX;
            let mut has_vertex = false;
            for &vm in &vertex_masks {
                if vm & mask == mask {
                    out &= vm;
                    has_vertex = true;
                }
            }
            if !has_vertex {
                return None;
            }
            for (j, &rm) in ray_masks.iter().enumerate() {
                let _ = j;
                if rm & mask == mask {
                    out &= rm;
                }
            }
            Some(out)
        };
        let mut masks: Vec<u128> = Vec::new();
        for &m in vertex_masks.iter().chain(ray_masks.iter()) {
            if let Some(c) = canon(m) {
                if !masks.contains(&c) {
                    masks.push(c);
                }
            }
        }
        loop {
            let mut added = false;
            let snapshot = masks.clone();
            for i in 0..snapshot.len() {
                for j in (i + 1)..snapshot.len() {
                    if let Some(c) = canon(snapshot[i] & snapshot[j]) {
                        if !masks.contains(&c) {
                            masks.push(c);
                            added = true;
                        }
                    }
                }
            }
            if !added {
                break;
            }
        }

        let mut faces: Vec<Face> = masks
            .into_iter()
            .map(|mask| Self::make_face(n, &facets, &vertices, &vertex_masks, &ray_masks, mask))
            .collect();
        faces.sort_by(|a, b| (a.dim, &a.active).cmp(&(b.dim, &b.active)));

        let mask_index = faces
            .iter()
            .enumerate()
            .map(|(i, f)| (mask_of_active(&f.active), i))
            .collect();

        NewtonPolyhedron {
            n,
            generators,
            facets,
            vertices,
            faces,
            mask_index,
        }
    }

    fn make_face(
        n: usize,
        facets: &[ValidPair],
        vertices: &[QVec],
        vertex_masks: &[u128],
        ray_masks: &[u128],
        mask: u128,
    ) -> Face {
        let active: Vec<usize> = (0..facets.len()).filter(|i| mask & (1 << i) != 0).collect();
        let verts: Vec<QVec> = vertices
            .iter()
            .zip(vertex_masks)
            .filter(|(_, &vm)| vm & mask == mask)
            .map(|(v, _)| v.clone())
            .collect();
        let rays: Vec<usize> = (0..n)
            .filter(|&j| ray_masks[j] & mask == mask)
            .collect();

        let normal_rows: Vec<QVec> = active
            .iter()
            .map(|&i| {
                facets[i]
                    .normal
                    .iter()
                    .map(|x| Rat::from_integer(x.clone()))
                    .collect()
            })
            .collect();
        let dim = n - linalg::rank(&normal_rows);
        #[cfg(debug_assertions)]
        {
            let mut span: Vec<QVec> = verts
                .iter()
                .skip(1)
                .map(|v| {
                    v.iter()
                        .zip(&verts[0])
                        .map(|(a, b)| a - b)
                        .collect::<QVec>()
                })
                .collect();
            for &j in &rays {
                let mut e = vec![Rat::zero(); n];
                e[j] = Rat::one();
                span.push(e);
            }
            debug_assert_eq!(linalg::rank(&span), dim, "affine hull mismatch");
        }

        let mut weight_sum = vec![BigInt::zero(); n];
        for &i in &active {
            for (k, c) in facets[i].normal.iter().enumerate() {
                weight_sum[k] += c;
            }
        }
        let zero_weight: Vec<usize> = (0..n).filter(|&j| weight_sum[j].is_zero()).collect();
        debug_assert_eq!(zero_weight, rays, "V(γ) must equal the recession axes");

        Face {
            active,
            compact: rays.is_empty(),
            vertices: verts,
            rays,
            dim,
            zero_weight,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// The improper face `P` itself (always last in dimension order).
    pub fn top_face(&self) -> &Face {
        let i = self.mask_index[&0u128];
        &self.faces[i]
    }

    pub fn proper_faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| !f.active.is_empty() || f.dim < self.n)
    }

    pub fn faces_of_dim(&self, d: usize) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(move |f| f.dim == d)
    }

    pub fn face_by_active(&self, active: &[usize]) -> Option<&Face> {
        let mask = mask_of_active(active);
        self.mask_index.get(&mask).map(|&i| &self.faces[i])
    }

    /// Checks that `face` is literally a face of this polyhedron.
    pub fn owns_face(&self, face: &Face) -> bool {
        self.face_by_active(&face.active)
            .map(|f| f == face)
            .unwrap_or(false)
    }

    pub fn membership(&self, x: &[Rat]) -> Membership {
        assert_eq!(x.len(), self.n);
        let mut boundary = false;
        for f in &self.facets {
            let v = dot_iq(&f.normal, x);
            if v < f.offset {
                return Membership::Outside;
            }
            if v == f.offset {
                boundary = true;
            }
        }
        if boundary {
            Membership::Boundary
        } else {
            Membership::Interior
        }
    }

    /// The unique face whose relative interior contains `x` (the smallest
    /// face containing it). Interior and outside points are errors.
    pub fn smallest_face(&self, x: &[Rat]) -> Result<&Face, GeomError> {
        match self.membership(x) {
            Membership::Outside => Err(GeomError::PointOutsidePolyhedron),
            Membership::Interior => Err(GeomError::PointNotOnBoundary),
            Membership::Boundary => {
                let mask = active_mask(&self.facets, x);
                let idx = self
                    .mask_index
                    .get(&mask)
                    .copied()
                    .expect("active set of a boundary point must be a lattice face");
                Ok(&self.faces[idx])
            }
        }
    }

    /// Smallest face containing `x`, counting the polyhedron itself for
    /// interior points.
    pub fn smallest_face_or_top(&self, x: &[Rat]) -> Result<&Face, GeomError> {
        match self.smallest_face(x) {
            Ok(f) => Ok(f),
            Err(GeomError::PointNotOnBoundary) => Ok(self.top_face()),
            Err(e) => Err(e),
        }
    }

    /// The image `d·(P + b)` for rational `d > 0`. Facet pairs transform as
    /// `(a, l) ↦ (a, d(l + ⟨a, b⟩))`; the face lattice is carried over.
    pub fn scale_translate(&self, d: &Rat, b: &[Rat]) -> Self {
        assert!(d.is_positive(), "scale factor must be positive");
        assert_eq!(b.len(), self.n);
        let map_pt = |v: &QVec| -> QVec { v.iter().zip(b).map(|(x, s)| d * (x + s)).collect() };
        let facets: Vec<ValidPair> = self
            .facets
            .iter()
            .map(|f| ValidPair {
                normal: f.normal.clone(),
                offset: d * (&f.offset + dot_iq(&f.normal, b)),
            })
            .collect();
        let faces: Vec<Face> = self
            .faces
            .iter()
            .map(|f| Face {
                active: f.active.clone(),
                vertices: f.vertices.iter().map(map_pt).collect(),
                rays: f.rays.clone(),
                dim: f.dim,
                compact: f.compact,
                zero_weight: f.zero_weight.clone(),
            })
            .collect();
        NewtonPolyhedron {
            n: self.n,
            generators: self.generators.iter().map(map_pt).collect(),
            facets,
            vertices: self.vertices.iter().map(map_pt).collect(),
            faces,
            mask_index: self.mask_index.clone(),
        }
    }

    /// Support value `l_P(a) = min{⟨a, x⟩ : x ∈ P}` for a nonnegative
    /// integer weight vector.
    pub fn support_value(&self, a: &[BigInt]) -> Rat {
        assert!(is_nonneg_vec(a), "support values need nonnegative weights");
        self.vertices
            .iter()
            .map(|v| dot_iq(a, v))
            .min()
            .expect("polyhedron has at least one vertex")
    }

    /// The face on which a nonnegative weight vector attains its minimum.
    pub fn supporting_face(&self, a: &[BigInt]) -> &Face {
        let l = self.support_value(a);
        let mask = {
            let mut m = 0u128;
            for (i, f) in self.facets.iter().enumerate() {
                let mut tight = true;
                for v in &self.vertices {
                    if dot_iq(a, v) == l && dot_iq(&f.normal, v) != f.offset {
                        tight = false;
                        break;
                    }
                }
                // f contains the whole supporting face iff it is tight on
                // all minimizing vertices and on all rays j with a_j = 0.
                if tight {
                    for (j, aj) in a.iter().enumerate() {
                        if aj.is_zero() && !f.normal[j].is_zero() {
                            tight = false;
                            break;
                        }
                    }
                }
                if tight {
                    m |= 1 << i;
                }
            }
            m
        };
        let idx = self
            .mask_index
            .get(&mask)
            .copied()
            .expect("supporting face must be in the lattice");
        &self.faces[idx]
    }

    /// Weak facet inequalities of this polyhedron as a constraint system.
    pub fn constraints(&self) -> Vec<Constraint> {
        self.facets
            .iter()
            .map(|f| {
                Constraint::new(
                    f.normal
                        .iter()
                        .map(|x| Rat::from_integer(x.clone()))
                        .collect(),
                    Rel::Ge,
                    f.offset.clone(),
                )
            })
            .collect()
    }

    /// Equalities on the active facets, strict inequalities on the rest:
    /// exactly the relative interior of `face`.
    pub fn face_relint_constraints(&self, face: &Face) -> Vec<Constraint> {
        debug_assert!(self.owns_face(face));
        let mask = mask_of_active(&face.active);
        self.facets
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let coeffs: QVec = f
                    .normal
                    .iter()
                    .map(|x| Rat::from_integer(x.clone()))
                    .collect();
                let rel = if mask & (1 << i) != 0 { Rel::Eq } else { Rel::Gt };
                Constraint::new(coeffs, rel, f.offset.clone())
            })
            .collect()
    }

    /// Exact test: does the relative interior of `face` meet `other`?
    pub fn relint_intersects(&self, face: &Face, other: &NewtonPolyhedron) -> bool {
        assert_eq!(self.n, other.n);
        let mut sys = self.face_relint_constraints(face);
        sys.extend(other.constraints());
        feas::feasible(&sys, self.n)
    }

    /// `self ⊆ other` (both have recession cone R₊ⁿ, so vertex containment
    /// suffices).
    pub fn is_subset_of(&self, other: &NewtonPolyhedron) -> bool {
        self.vertices
            .iter()
            .all(|v| other.membership(v) != Membership::Outside)
    }

    pub fn same_set_as(&self, other: &NewtonPolyhedron) -> bool {
        self.facets == other.facets
    }

    /// True iff the polyhedron meets every coordinate axis, i.e. every
    /// facet missing weight on an axis has offset zero.
    pub fn meets_every_axis(&self) -> bool {
        (0..self.n).all(|j| {
            self.facets
                .iter()
                .all(|f| !f.normal[j].is_zero() || !f.offset.is_positive())
        })
    }
}

fn active_mask(facets: &[ValidPair], x: &[Rat]) -> u128 {
    let mut m = 0u128;
    for (i, f) in facets.iter().enumerate() {
        if dot_iq(&f.normal, x) == f.offset {
            m |= 1 << i;
        }
    }
    m
}

fn mask_of_active(active: &[usize]) -> u128 {
    active.iter().fold(0u128, |m, &i| m | (1 << i))
}

/// Clears denominators without normalizing to a primitive vector (the last
/// homogenizing coordinate must keep its meaning).
fn clear_denominators_keep_sign(v: &[Rat]) -> IVec {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: IVec = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    primitive(&ints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{ivec, qvec, rat, rint};

    fn poly(points: &[&[i64]]) -> NewtonPolyhedron {
        NewtonPolyhedron::build(&points.iter().map(|p| qvec(p)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn quartic_monomial_halfline() {
        // Single generator (4,0): facets x1 >= 4 and x2 >= 0.
        let p = poly(&[&[4, 0]]);
        assert_eq!(
            p.facets,
            vec![
                ValidPair { normal: ivec(&[0, 1]), offset: rint(0) },
                ValidPair { normal: ivec(&[1, 0]), offset: rint(4) },
            ]
        );
        assert_eq!(p.vertices, vec![qvec(&[4, 0])]);
        // Faces: vertex, two edges, P. The vertex face is compact.
        assert_eq!(p.faces.len(), 4);
        let vertex = p.smallest_face(&qvec(&[4, 0])).unwrap();
        assert_eq!(vertex.dim, 0);
        assert!(vertex.compact);
        let edge = p.smallest_face(&qvec(&[4, 7])).unwrap();
        assert_eq!(edge.dim, 1);
        assert!(!edge.compact);
        assert_eq!(edge.rays, vec![1]);
        assert_eq!(edge.zero_weight, vec![1]);
    }

    #[test]
    fn two_term_diagram() {
        // Generators (2,0) and (0,3): one compact edge plus two axis edges.
        let p = poly(&[&[2, 0], &[0, 3]]);
        assert_eq!(p.vertices.len(), 2);
        let compact_edges: Vec<&Face> = p
            .faces
            .iter()
            .filter(|f| f.dim == 1 && f.compact)
            .collect();
        assert_eq!(compact_edges.len(), 1);
        assert_eq!(compact_edges[0].vertices.len(), 2);
        // Edge normal is (3,2) with offset 6.
        let pair = compact_edges[0].defining_pair(&p);
        assert_eq!(pair.normal, ivec(&[3, 2]));
        assert_eq!(pair.offset, rint(6));
        // Membership checks.
        assert_eq!(p.membership(&qvec(&[1, 2])), Membership::Interior);
        assert_eq!(p.membership(&[rat(1, 1), rat(3, 2)]), Membership::Boundary);
        assert_eq!(p.membership(&qvec(&[0, 0])), Membership::Outside);
    }

    #[test]
    fn smallest_face_errors() {
        let p = poly(&[&[2, 0], &[0, 3]]);
        assert_eq!(
            p.smallest_face(&qvec(&[0, 0])).unwrap_err(),
            GeomError::PointOutsidePolyhedron
        );
        assert_eq!(
            p.smallest_face(&qvec(&[5, 5])).unwrap_err(),
            GeomError::PointNotOnBoundary
        );
    }

    #[test]
    fn scale_translate_matches_rebuild() {
        let p = poly(&[&[2, 0], &[0, 3], &[1, 1]]);
        let d = rat(3, 2);
        let b = qvec(&[1, 1]);
        let img = p.scale_translate(&d, &b);
        let rebuilt = NewtonPolyhedron::build(
            &p.generators
                .iter()
                .map(|v| v.iter().zip(&b).map(|(x, s)| &d * (x + s)).collect::<QVec>())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(img.same_set_as(&rebuilt));
        // Composition: scaling twice equals scaling by the product.
        let twice = img.scale_translate(&rat(2, 3), &qvec(&[0, 0]));
        let direct = p.scale_translate(&rint(1), &b);
        assert!(twice.same_set_as(&direct));
    }

    #[test]
    fn support_values() {
        let p = poly(&[&[2, 0], &[0, 3]]);
        assert_eq!(p.support_value(&ivec(&[1, 1])), rint(2));
        assert_eq!(p.support_value(&ivec(&[3, 2])), rint(6));
        assert_eq!(p.support_value(&ivec(&[0, 1])), rint(0));
        let f = p.supporting_face(&ivec(&[3, 2]));
        assert_eq!(f.dim, 1);
        assert!(f.compact);
    }

    #[test]
    fn relint_queries() {
        let p = poly(&[&[4, 0]]);
        // The translate 2*(P + (1,1)) sits strictly inside the x1 >= 4
        // halfplane, so it meets the interior but not the vertical edge.
        let q = p.scale_translate(&rint(2), &qvec(&[1, 1]));
        let edge = p
            .faces
            .iter()
            .find(|f| f.dim == 1 && f.rays == vec![1])
            .unwrap();
        assert!(!p.relint_intersects(edge, &q));
        let vertex = p.smallest_face(&qvec(&[4, 0])).unwrap();
        assert!(!p.relint_intersects(vertex, &q));
        assert!(p.relint_intersects(p.top_face(), &q));
        // An untranslated copy does meet the vertical edge's interior.
        assert!(p.relint_intersects(edge, &p));
    }

    #[test]
    fn three_dimensional_simplex_slab() {
        // x1 + x2 + x3 >= 4 portion of the orthant: 3 vertices, full lattice.
        let p = poly(&[&[4, 0, 0], &[0, 4, 0], &[0, 0, 4]]);
        assert_eq!(p.vertices.len(), 3);
        let compact_2faces: Vec<&Face> =
            p.faces.iter().filter(|f| f.dim == 2 && f.compact).collect();
        assert_eq!(compact_2faces.len(), 1);
        assert_eq!(compact_2faces[0].vertices.len(), 3);
        assert!(p.meets_every_axis());
        let q = poly(&[&[1, 0, 0], &[0, 1, 0]]);
        assert!(!q.meets_every_axis());
    }

    #[test]
    fn fractional_generators() {
        // Generators with denominators: (3/2, 0), (0, 5/3).
        let p = NewtonPolyhedron::build(&[
            vec![rat(3, 2), rint(0)],
            vec![rint(0), rat(5, 3)],
        ])
        .unwrap();
        // Edge: 10 x1 + 9 x2 >= 15.
        assert!(p
            .facets
            .iter()
            .any(|f| f.normal == ivec(&[10, 9]) && f.offset == rint(15)));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            NewtonPolyhedron::build(&[]).unwrap_err(),
            GeomError::EmptyInput
        );
        let five = vec![qvec(&[1, 1, 1, 1, 1])];
        assert_eq!(
            NewtonPolyhedron::build(&five).unwrap_err(),
            GeomError::UnsupportedDimension(5)
        );
    }
}
