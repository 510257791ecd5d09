//! Invariants of a phase/weight pair: the Newton distance, the contact
//! sets carved out of both polyhedra by the scaling `Φ(β) = d(β + 𝟙)`,
//! the Newton multiplicity with its principal faces and their pairing,
//! the unweighted specialization, the symmetry inequality, and the
//! reduction of fractional-exponent data to the integer lattice.

use crate::geom::feas::{self, Constraint, Rel};
use crate::geom::{Face, NewtonPolyhedron};
use crate::power::{PowerData, PowerError};
use crate::rat::{IVec, QVec, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PairError {
    #[error("every facet of the phase polyhedron has offset zero (f(0) ≠ 0)")]
    PhaseWithoutFiniteDistance,
    #[error(transparent)]
    Power(#[from] PowerError),
}

/// Contact data of a pair: distance, multiplicity, the contact face sets
/// on both polyhedra, and the paired principal faces (`principal_g[i]` is
/// the partner of `principal_f[i]`).
#[derive(Clone, Debug)]
pub struct PairReport {
    pub d: Rat,
    pub m: usize,
    pub gamma_zero_f: Vec<Face>,
    pub gamma_zero_g: Vec<Face>,
    pub principal_f: Vec<Face>,
    pub principal_g: Vec<Face>,
}

#[derive(Clone, Debug)]
pub struct UnweightedReport {
    pub d: Rat,
    pub m: usize,
    pub principal: Face,
}

#[derive(Clone, Debug)]
pub struct SymmetryReport {
    pub dfg: Rat,
    pub dgf: Rat,
    pub product: Rat,
    pub equality_case: bool,
}

#[derive(Clone, Debug)]
pub struct PuiseuxReduction {
    pub cleared: PowerData,
    pub weight_exponent: IVec,
    pub jacobian_factor: BigInt,
}

/// `d(f,g) = max { l_f(a) / (l_g(a) + ⟨a⟩) }` over facets of `Γ₊(f)` with
/// nonzero offset; the denominator shift `⟨a⟩` absorbs the measure.
pub fn newton_distance(f: &PowerData, g: &PowerData) -> Result<Rat, PairError> {
    let pf = f.newton_polyhedron()?;
    if g.is_flat() {
        return Err(PowerError::FlatFunction.into());
    }
    distance_against(&pf, g)
}

fn distance_against(pf: &NewtonPolyhedron, g: &PowerData) -> Result<Rat, PairError> {
    let mut best: Option<Rat> = None;
    for facet in &pf.facets {
        if facet.offset.is_zero() {
            continue;
        }
        let denom = g.support_value(&facet.normal)
            + Rat::from_integer(facet.weight_sum());
        let ratio = &facet.offset / denom;
        best = Some(match best {
            Some(b) if b >= ratio => b,
            _ => ratio,
        });
    }
    best.ok_or(PairError::PhaseWithoutFiniteDistance)
}

fn ones(n: usize) -> QVec {
    vec![Rat::one(); n]
}

/// Faces of `Γ₊(f)` whose relative interior meets `Φ(Γ₊(g))`; their union
/// with the scaled polyhedron is the contact set on the boundary.
fn contact_faces_f(
    pf: &NewtonPolyhedron,
    phi_g: &NewtonPolyhedron,
) -> Vec<Face> {
    pf.faces
        .iter()
        .filter(|t| !t.active.is_empty())
        .filter(|t| pf.relint_intersects(t, phi_g))
        .cloned()
        .collect()
}

/// Both contact face sets. The `g`-side set pulls the contact back through
/// `Φ⁻¹` and may include the whole polyhedron (the contact can pass
/// through the interior of `Γ₊(g)`).
pub fn contact_sets(f: &PowerData, g: &PowerData) -> Result<(Vec<Face>, Vec<Face>), PairError> {
    let pf = f.newton_polyhedron()?;
    let pg = g.newton_polyhedron()?;
    let d = distance_against(&pf, g)?;
    let n = pf.ambient_dim();
    let phi_g = pg.scale_translate(&d, &ones(n));
    let f_side = contact_faces_f(&pf, &phi_g);
    let mut g_side: Vec<Face> = Vec::new();
    for gamma in &pg.faces {
        let g_relint = pg.face_relint_constraints(gamma);
        let hit = f_side.iter().any(|tau| {
            let mut sys = g_relint.clone();
            sys.extend(feas::transformed(
                &pf.face_relint_constraints(tau),
                &d,
                &ones(n),
            ));
            feas::feasible(&sys, n)
        });
        if hit {
            g_side.push(gamma.clone());
        }
    }
    Ok((f_side, g_side))
}

/// Full contact report: multiplicity `m = max(n − dim τ)` over the contact
/// faces, the faces achieving it, and their partners
/// `γ* = Φ⁻¹(τ*) ∩ Γ₊(g)` (each itself a face of `Γ₊(g)`).
pub fn newton_multiplicity(f: &PowerData, g: &PowerData) -> Result<PairReport, PairError> {
    let pf = f.newton_polyhedron()?;
    let pg = g.newton_polyhedron()?;
    let d = distance_against(&pf, g)?;
    let n = pf.ambient_dim();
    let phi_g = pg.scale_translate(&d, &ones(n));
    let (gamma_zero_f, gamma_zero_g) = contact_sets(f, g)?;
    assert!(
        !gamma_zero_f.is_empty(),
        "the scaled weight polyhedron must touch the boundary at the Newton distance"
    );
    debug_assert!(phi_g.is_subset_of(&pf));
    let m = gamma_zero_f.iter().map(|t| n - t.dim).max().unwrap();
    let principal_f: Vec<Face> = gamma_zero_f
        .iter()
        .filter(|t| n - t.dim == m)
        .cloned()
        .collect();
    let principal_g: Vec<Face> = principal_f
        .iter()
        .map(|tau| partner_face(&pf, &pg, &d, tau))
        .collect();
    for (tau, gamma) in principal_f.iter().zip(&principal_g) {
        assert_eq!(tau.dim, n - m);
        assert!(gamma.dim <= tau.dim, "partner dimension may not exceed the face's");
        assert_eq!(gamma.compact, tau.compact, "compactness must transfer");
    }
    for i in 0..principal_g.len() {
        for j in (i + 1)..principal_g.len() {
            assert_ne!(
                principal_g[i].active, principal_g[j].active,
                "principal pairing must be injective"
            );
        }
    }
    Ok(PairReport {
        d,
        m,
        gamma_zero_f,
        gamma_zero_g,
        principal_f,
        principal_g,
    })
}

/// The face of `Γ₊(g)` equal to `Φ⁻¹(τ) ∩ Γ₊(g)`, identified by the exact
/// set of facets containing that intersection.
fn partner_face(
    pf: &NewtonPolyhedron,
    pg: &NewtonPolyhedron,
    d: &Rat,
    tau: &Face,
) -> Face {
    let n = pf.ambient_dim();
    let shift = ones(n);
    let mut base: Vec<Constraint> = pg.constraints();
    let pulled: Vec<Constraint> = pf
        .facets
        .iter()
        .enumerate()
        .map(|(i, fc)| {
            let rel = if tau.active.contains(&i) { Rel::Eq } else { Rel::Ge };
            Constraint::new(
                fc.normal
                    .iter()
                    .map(|x| Rat::from_integer(x.clone()))
                    .collect(),
                rel,
                fc.offset.clone(),
            )
        })
        .collect();
    base.extend(feas::transformed(&pulled, d, &shift));
    let active: Vec<usize> = (0..pg.facets.len())
        .filter(|&j| {
            let mut sys = base.clone();
            sys.push(Constraint::new(
                pg.facets[j]
                    .normal
                    .iter()
                    .map(|x| Rat::from_integer(x.clone()))
                    .collect(),
                Rel::Gt,
                pg.facets[j].offset.clone(),
            ));
            !feas::feasible(&sys, n)
        })
        .collect();
    pg.face_by_active(&active)
        .expect("the pulled-back principal face must be a face of the weight polyhedron")
        .clone()
}

/// Unit-weight specialization: the diagonal point `q* = d·𝟙` lies on the
/// boundary; its smallest face is the principal face.
pub fn unweighted_metrics(f: &PowerData) -> Result<UnweightedReport, PairError> {
    let pf = f.newton_polyhedron()?;
    let n = pf.ambient_dim();
    let d = distance_against(&pf, &PowerData::one(n))?;
    let q: QVec = vec![d.clone(); n];
    let principal = pf
        .smallest_face(&q)
        .expect("the diagonal contact point lies on the boundary")
        .clone();
    let m = n - principal.dim;
    Ok(UnweightedReport { d, m, principal })
}

/// Distances of the measure-shifted pair in both orders. The product is
/// at least 1; equality holds exactly when one shifted polyhedron is a
/// rational multiple of the other.
pub fn symmetry_check(f: &PowerData, g: &PowerData) -> Result<SymmetryReport, PairError> {
    let n = f.dim();
    let unit_shift = PowerData::monomial(n, f.denom_vector().to_vec());
    let xf = PowerData::product_support(&[unit_shift.clone(), f.clone()]);
    let unit_shift_g = PowerData::monomial(n, g.denom_vector().to_vec());
    let xg = PowerData::product_support(&[unit_shift_g, g.clone()]);
    let dfg = newton_distance(&xf, g)?;
    let dgf = newton_distance(&xg, f)?;
    let product = &dfg * &dgf;
    assert!(product >= Rat::one(), "distance product below one");

    let pf = xf.newton_polyhedron()?;
    let pg = xg.newton_polyhedron()?;
    let mut candidates: Vec<Rat> = pf
        .facets
        .iter()
        .map(|fc| {
            let denom = pg.support_value(&fc.normal);
            assert!(denom.is_positive(), "shifted offsets are strictly positive");
            &fc.offset / denom
        })
        .collect();
    candidates.sort();
    candidates.dedup();
    let zero = vec![Rat::zero(); n];
    let equality_case = candidates
        .iter()
        .any(|c| pg.scale_translate(c, &zero).same_set_as(&pf));
    Ok(SymmetryReport {
        dfg,
        dgf,
        product,
        equality_case,
    })
}

/// Rereads fractional exponents on the integer lattice (`x_j ↦ y_j^{p_j}`),
/// returning the cleared series, the measure-correction exponent `p − 𝟙`,
/// and the substitution's Jacobian factor `Π p_j`.
pub fn puiseux_reduce(f: &PowerData) -> PuiseuxReduction {
    let weight_exponent: IVec = f
        .denom_vector()
        .iter()
        .map(|p| p - BigInt::one())
        .collect();
    let jacobian_factor = f.denom_vector().iter().product();
    PuiseuxReduction {
        cleared: f.cleared(),
        weight_exponent,
        jacobian_factor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{ivec, rat, rint};

    fn pd(n: usize, terms: &[(&[i64], i64)]) -> PowerData {
        PowerData::new(
            n,
            terms.iter().map(|(e, c)| (ivec(e), rint(*c))).collect(),
        )
    }

    #[test]
    fn distance_examples() {
        // Quartic phase against x1^(2p) x2^(2p) weights.
        for p in 1..=3i64 {
            let f = pd(2, &[(&[4, 0], 1)]);
            let g = pd(2, &[(&[2 * p, 2 * p], 1)]);
            assert_eq!(newton_distance(&f, &g).unwrap(), rat(4, 2 * p + 1));
        }
        let f = pd(3, &[(&[4, 4, 4], 1)]);
        let g = pd(3, &[(&[4, 4, 2], 1)]);
        assert_eq!(newton_distance(&f, &g).unwrap(), rat(4, 3));
        let f = pd(2, &[(&[1, 1], 1)]);
        let g = pd(2, &[(&[0, 2], 1)]);
        assert_eq!(newton_distance(&f, &g).unwrap(), rint(1));
    }

    #[test]
    fn distance_error_on_nonvanishing_phase() {
        let f = pd(2, &[(&[0, 0], 1), (&[2, 0], 1)]);
        assert_eq!(
            newton_distance(&f, &PowerData::one(2)).unwrap_err(),
            PairError::PhaseWithoutFiniteDistance
        );
        let flat = PowerData::new(2, vec![]);
        assert!(matches!(
            newton_distance(&flat, &PowerData::one(2)).unwrap_err(),
            PairError::Power(PowerError::FlatFunction)
        ));
    }

    #[test]
    fn unweighted_values() {
        let f = pd(2, &[(&[4, 0], 1), (&[0, 4], 1)]);
        let r = unweighted_metrics(&f).unwrap();
        assert_eq!(r.d, rint(2));
        assert_eq!(r.m, 1);
        assert!(r.principal.compact);
        let f = pd(2, &[(&[2, 2], 1)]);
        let r = unweighted_metrics(&f).unwrap();
        assert_eq!(r.d, rint(2));
        assert_eq!(r.m, 2);
        assert_eq!(r.principal.dim, 0);
    }

    #[test]
    fn multiplicity_report_on_quartic_pair() {
        // f = x1^4, g = x1^2 x2^2: contact on the vertical facet.
        let f = pd(2, &[(&[4, 0], 1)]);
        let g = pd(2, &[(&[2, 2], 1)]);
        let rep = newton_multiplicity(&f, &g).unwrap();
        assert_eq!(rep.d, rat(4, 3));
        assert_eq!(rep.m, 1);
        assert_eq!(rep.principal_f.len(), 1);
        let tau = &rep.principal_f[0];
        assert_eq!(tau.dim, 1);
        assert!(!tau.compact);
        // Partner face: the contact slab passes through the interior
        // column above (2,2), hitting the vertical edge of Γ₊(g).
        let gamma = &rep.principal_g[0];
        assert_eq!(gamma.dim, 1);
        assert!(!gamma.compact);
    }

    #[test]
    fn unit_weight_contact_contains_origin_vertex() {
        let f = pd(2, &[(&[2, 2], 1)]);
        let g = PowerData::one(2);
        let (f_side, g_side) = contact_sets(&f, &g).unwrap();
        // Vertex (2,2) is a contact face of Γ₊(f).
        assert!(f_side.iter().any(|t| t.dim == 0));
        // The origin vertex of Γ₊(g) = R₊² is in the pulled-back contact.
        assert!(g_side.iter().any(|t| t.dim == 0));
        let rep = newton_multiplicity(&f, &g).unwrap();
        assert_eq!(rep.m, 2);
        assert_eq!(rep.principal_g[0].dim, 0);
    }

    #[test]
    fn pairing_on_product_phase() {
        // Remark-4.6 shape: f = x1 x2, g = x2^2.
        let f = pd(2, &[(&[1, 1], 1)]);
        let g = pd(2, &[(&[0, 2], 1)]);
        let rep = newton_multiplicity(&f, &g).unwrap();
        assert_eq!(rep.d, rint(1));
        assert_eq!(rep.m, 1);
        assert_eq!(rep.principal_f.len(), 1);
        let tau = &rep.principal_f[0];
        // Principal face: the vertical edge above (1,1).
        assert_eq!(tau.dim, 1);
        assert_eq!(tau.rays, vec![1]);
        let gamma = &rep.principal_g[0];
        assert_eq!(gamma.rays, vec![1]);
    }

    #[test]
    fn symmetry_equality_detection() {
        let f = pd(2, &[(&[2, 1], 1)]);
        let r = symmetry_check(&f, &f).unwrap();
        assert_eq!(r.product, rint(1));
        assert!(r.equality_case);
        // Scaled copy after the shift: Γ₊(x^𝟙·(x^𝟙 f²)) = 2·Γ₊(x^𝟙 f).
        let f2 = PowerData::product_support(&[
            PowerData::monomial(2, ivec(&[1, 1])),
            f.clone(),
            f.clone(),
        ]);
        let r = symmetry_check(&f2, &f).unwrap();
        assert!(r.equality_case);
        assert_eq!(r.product, rint(1));
        // Genuinely asymmetric pair.
        let f = pd(2, &[(&[4, 0], 1), (&[0, 4], 1)]);
        let g = pd(2, &[(&[2, 0], 1), (&[0, 2], 1)]);
        let r = symmetry_check(&f, &g).unwrap();
        assert!(r.product >= rint(1));
        assert!(!r.equality_case);
    }

    #[test]
    fn equality_case_forces_full_multiplicity() {
        // Γ₊(x^𝟙 f) = 2·Γ₊(x^𝟙 g) for f = x^𝟙 g², so the shifted pair has
        // a vertex principal face.
        let g = pd(2, &[(&[2, 0], 1), (&[0, 2], 1)]);
        let gg = PowerData::product_support(&[g.clone(), g.clone()]);
        let f = PowerData::product_support(&[PowerData::monomial(2, ivec(&[1, 1])), gg]);
        let r = symmetry_check(&f, &g).unwrap();
        assert!(r.equality_case);
        let shifted = PowerData::product_support(&[PowerData::monomial(2, ivec(&[1, 1])), f]);
        let rep = newton_multiplicity(&shifted, &g).unwrap();
        assert_eq!(rep.m, 2);
    }

    #[test]
    fn puiseux_reduction_preserves_distance() {
        // f = x1^(1/2) + x2 on p = (2,1).
        let f = PowerData::with_denom(
            2,
            vec![BigInt::from(2), BigInt::from(1)],
            vec![(ivec(&[1, 0]), rint(1)), (ivec(&[0, 1]), rint(1))],
        );
        let red = puiseux_reduce(&f);
        assert_eq!(red.weight_exponent, ivec(&[1, 0]));
        assert_eq!(red.jacobian_factor, BigInt::from(2));
        let d_direct = unweighted_metrics(&f).unwrap().d;
        let weight = PowerData::monomial(2, red.weight_exponent.clone());
        let d_reduced = newton_distance(&red.cleared, &weight).unwrap();
        assert_eq!(d_direct, d_reduced);
        assert_eq!(d_direct, rat(1, 3));
    }

    #[test]
    fn distance_via_weight_vertices() {
        // d(f,g) equals the max of d(f, x^β) over vertices β of Γ₊(g).
        let f = pd(2, &[(&[3, 0], 1), (&[0, 5], 1)]);
        let g = pd(2, &[(&[2, 0], 1), (&[0, 1], 1), (&[1, 1], 1)]);
        let d = newton_distance(&f, &g).unwrap();
        let pg = g.newton_polyhedron().unwrap();
        let best = pg
            .vertices
            .iter()
            .map(|v| {
                let beta: IVec = v.iter().map(|c| c.numer().clone()).collect();
                newton_distance(&f, &PowerData::monomial(2, beta)).unwrap()
            })
            .max()
            .unwrap();
        assert_eq!(d, best);
    }
}
