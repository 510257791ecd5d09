//! Sparse power data for phases and weights: polynomial/Puiseux terms plus
//! flat markers `c · x^m · exp(−1/x_j²)`. Supplies Newton polyhedra,
//! face parts, convenience and flatness tests, formal products, and the
//! nondegeneracy certificate (exact in one and two variables, a sampling
//! heuristic in three and four).

use crate::geom::{Face, GeomError, NewtonPolyhedron};
use crate::rat::{dot_iq, rat_to_f64, IVec, QVec, Rat};
use crate::upoly::UPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PowerError {
    #[error("function is flat: no non-flat terms, Newton polyhedron empty")]
    FlatFunction,
    #[error("face does not belong to this function's Newton polyhedron")]
    FaceNotOfThisPolyhedron,
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// One term `scale · x^exp · exp(−1/x_axis²)`; invisible to the Newton
/// polyhedron, active in numeric evaluation. `axis` is zero-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatMarker {
    pub exp: IVec,
    pub axis: usize,
    pub scale: Rat,
}

/// Sparse series `Σ c_α x^(α/p) + Σ flat markers`, with `p` the per-axis
/// denominator vector (all ones for ordinary polynomial input).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerData {
    n: usize,
    denom: Vec<BigInt>,
    terms: BTreeMap<IVec, Rat>,
    flat_markers: Vec<FlatMarker>,
}

impl PowerData {
    pub fn new(n: usize, terms: Vec<(IVec, Rat)>) -> Self {
        Self::with_denom(n, vec![BigInt::one(); n], terms)
    }

    pub fn with_denom(n: usize, denom: Vec<BigInt>, terms: Vec<(IVec, Rat)>) -> Self {
        assert_eq!(denom.len(), n);
        assert!(denom.iter().all(Signed::is_positive), "denominators must be >= 1");
        let mut map: BTreeMap<IVec, Rat> = BTreeMap::new();
        for (exp, c) in terms {
            assert_eq!(exp.len(), n);
            assert!(
                exp.iter().all(|e| !e.is_negative()),
                "exponents must be nonnegative"
            );
            let entry = map.entry(exp).or_insert_with(Rat::zero);
            *entry += c;
        }
        map.retain(|_, c| !c.is_zero());
        PowerData {
            n,
            denom,
            terms: map,
            flat_markers: vec![],
        }
    }

    pub fn monomial(n: usize, exp: IVec) -> Self {
        Self::new(n, vec![(exp, Rat::one())])
    }

    /// The unit weight `g ≡ 1`: a single constant term, `Γ₊ = R₊ⁿ`.
    pub fn one(n: usize) -> Self {
        Self::monomial(n, vec![BigInt::zero(); n])
    }

    pub fn with_flat_marker(mut self, exp: IVec, axis: usize, scale: Rat) -> Self {
        assert_eq!(exp.len(), self.n);
        assert!(axis < self.n);
        if !scale.is_zero() {
            self.flat_markers.push(FlatMarker { exp, axis, scale });
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn denom_vector(&self) -> &[BigInt] {
        &self.denom
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IVec, &Rat)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn flat_markers(&self) -> &[FlatMarker] {
        &self.flat_markers
    }

    pub fn is_flat(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_fractional_exponents(&self) -> bool {
        self.denom.iter().any(|d| !d.is_one())
    }

    pub fn coefficient(&self, exp: &IVec) -> Rat {
        self.terms.get(exp).cloned().unwrap_or_else(Rat::zero)
    }

    /// Exponent vectors as rational points `α/p`.
    pub fn support_points(&self) -> Vec<QVec> {
        self.terms
            .keys()
            .map(|e| {
                e.iter()
                    .zip(&self.denom)
                    .map(|(a, p)| Rat::new(a.clone(), p.clone()))
                    .collect()
            })
            .collect()
    }

    pub fn newton_polyhedron(&self) -> Result<NewtonPolyhedron, PowerError> {
        if self.is_flat() {
            return Err(PowerError::FlatFunction);
        }
        Ok(NewtonPolyhedron::build(&self.support_points())?)
    }

    /// Support value `l(a) = min{⟨a, α/p⟩ : c_α ≠ 0}` for `a ∈ Z₊ⁿ`.
    pub fn support_value(&self, a: &[BigInt]) -> Rat {
        assert!(!self.is_flat(), "support value of a flat function");
        assert!(a.iter().all(|x| !x.is_negative()));
        self.support_points()
            .iter()
            .map(|alpha| dot_iq(a, alpha))
            .min()
            .unwrap()
    }

    /// True iff the Newton polyhedron meets every coordinate axis (false
    /// for flat input, whose polyhedron is empty).
    pub fn is_convenient(&self) -> bool {
        match self.newton_polyhedron() {
            Ok(p) => p.meets_every_axis(),
            Err(_) => false,
        }
    }

    /// Restriction of the term map to a face of the Newton polyhedron.
    pub fn gamma_part(
        &self,
        poly: &NewtonPolyhedron,
        face: &Face,
    ) -> Result<GammaPart, PowerError> {
        if !poly.owns_face(face) {
            return Err(PowerError::FaceNotOfThisPolyhedron);
        }
        let mut kept: Vec<(IVec, Rat)> = Vec::new();
        for (exp, c) in &self.terms {
            let point: QVec = exp
                .iter()
                .zip(&self.denom)
                .map(|(a, p)| Rat::new(a.clone(), p.clone()))
                .collect();
            let on_face = face
                .active
                .iter()
                .all(|&i| dot_iq(&poly.facets[i].normal, &point) == poly.facets[i].offset);
            if on_face {
                kept.push((exp.clone(), c.clone()));
            }
        }
        let data = PowerData::with_denom(self.n, self.denom.clone(), kept);
        #[cfg(debug_assertions)]
        {
            let pair = face.defining_pair(poly);
            for pt in data.support_points() {
                debug_assert_eq!(
                    dot_iq(&pair.normal, &pt),
                    pair.offset,
                    "face part must be quasihomogeneous"
                );
            }
        }
        Ok(GammaPart {
            face: face.clone(),
            data,
        })
    }

    /// Same exponents on the integer lattice (denominators dropped).
    pub fn cleared(&self) -> PowerData {
        let mut out = PowerData::with_denom(
            self.n,
            vec![BigInt::one(); self.n],
            self.terms
                .iter()
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        );
        out.flat_markers = self.flat_markers.clone();
        out
    }

    /// Whether every face of the Newton polyhedron has a well-defined part
    /// of the series attached to it. Polynomial and Puiseux data qualify
    /// outright; data with flat markers qualifies only when each marker's
    /// monomial can be pushed into the polyhedron of the non-flat part
    /// along its flat axis, i.e. `m/p + t·e_axis ∈ Γ₊` for some `t ≥ 0`.
    pub fn admits_gamma_parts(&self) -> bool {
        if self.is_flat() {
            return false;
        }
        if self.flat_markers.is_empty() {
            return true;
        }
        let poly = self.newton_polyhedron().expect("non-flat");
        self.flat_markers.iter().all(|mk| {
            let pt: QVec = mk
                .exp
                .iter()
                .zip(&self.denom)
                .map(|(a, p)| Rat::new(a.clone(), p.clone()))
                .collect();
            // Pushing along e_axis relaxes exactly the facets whose normal
            // has positive weight there; the rest must already hold.
            poly.facets.iter().all(|f| {
                !f.normal[mk.axis].is_zero() || dot_iq(&f.normal, &pt) >= f.offset
            })
        })
    }

    /// Formal product of the factors' series. At most one factor may carry
    /// flat markers (markers multiply through the other factors' terms).
    pub fn product_support(factors: &[PowerData]) -> PowerData {
        assert!(!factors.is_empty());
        let first = &factors[0];
        assert!(
            factors.iter().all(|f| !f.is_flat()),
            "product of flat factors unsupported"
        );
        assert!(
            factors.iter().all(|f| f.denom == first.denom),
            "mixed denominator vectors"
        );
        assert!(
            factors.iter().filter(|f| !f.flat_markers.is_empty()).count() <= 1,
            "product of two marker-carrying series unsupported"
        );
        factors
            .iter()
            .skip(1)
            .fold(first.clone(), |acc, f| acc.mul(f))
    }

    fn mul(&self, other: &PowerData) -> PowerData {
        let mut terms: Vec<(IVec, Rat)> = Vec::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let exp: IVec = a.iter().zip(b).map(|(x, y)| x + y).collect();
                terms.push((exp, ca * cb));
            }
        }
        let mut out = PowerData::with_denom(self.n, self.denom.clone(), terms);
        let mut markers: Vec<FlatMarker> = Vec::new();
        for (mine, their_terms) in [
            (&self.flat_markers, &other.terms),
            (&other.flat_markers, &self.terms),
        ] {
            for mk in mine.iter() {
                for (b, cb) in their_terms.iter() {
                    markers.push(FlatMarker {
                        exp: mk.exp.iter().zip(b).map(|(x, y)| x + y).collect(),
                        axis: mk.axis,
                        scale: &mk.scale * cb,
                    });
                }
            }
        }
        markers.sort_by(|a, b| (&a.exp, a.axis).cmp(&(&b.exp, b.axis)));
        markers.dedup_by(|second, first| {
            if first.exp == second.exp && first.axis == second.axis {
                first.scale += second.scale.clone();
                true
            } else {
                false
            }
        });
        markers.retain(|m| !m.scale.is_zero());
        out.flat_markers = markers;
        out
    }

    /// Exact value of the polynomial part at a rational point (integer
    /// exponents only).
    pub fn eval_rat(&self, x: &[Rat]) -> Rat {
        assert!(!self.has_fractional_exponents());
        assert_eq!(x.len(), self.n);
        let mut acc = Rat::zero();
        for (exp, c) in &self.terms {
            let mut t = c.clone();
            for (e, xi) in exp.iter().zip(x) {
                t *= pow_rat(xi, e);
            }
            acc += t;
        }
        acc
    }

    /// Exact gradient of the polynomial part.
    pub fn grad_rat(&self, x: &[Rat]) -> QVec {
        assert!(!self.has_fractional_exponents());
        let mut g = vec![Rat::zero(); self.n];
        for (exp, c) in &self.terms {
            for j in 0..self.n {
                if exp[j].is_zero() {
                    continue;
                }
                let mut t = c * Rat::from_integer(exp[j].clone());
                for (k, (e, xi)) in exp.iter().zip(x).enumerate() {
                    let e = if k == j { e - BigInt::one() } else { e.clone() };
                    t *= pow_rat(xi, &e);
                }
                g[j] += t;
            }
        }
        g
    }

    /// Float value including flat markers (integer exponents only).
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert!(!self.has_fractional_exponents());
        let mut acc = 0.0;
        for (exp, c) in &self.terms {
            let mut t = rat_to_f64(c);
            for (e, xi) in exp.iter().zip(x) {
                t *= xi.powi(e.to_i32().expect("exponent fits i32"));
            }
            acc += t;
        }
        for mk in &self.flat_markers {
            let xa = x[mk.axis];
            if xa == 0.0 {
                continue;
            }
            let mut t = rat_to_f64(&mk.scale) * (-1.0 / (xa * xa)).exp();
            for (e, xi) in mk.exp.iter().zip(x) {
                t *= xi.powi(e.to_i32().expect("exponent fits i32"));
            }
            acc += t;
        }
        acc
    }

    pub fn grad_f64(&self, x: &[f64]) -> Vec<f64> {
        assert!(!self.has_fractional_exponents());
        assert!(self.flat_markers.is_empty());
        let mut g = vec![0.0; self.n];
        for (exp, c) in &self.terms {
            for j in 0..self.n {
                if exp[j].is_zero() {
                    continue;
                }
                let mut t = rat_to_f64(c) * exp[j].to_f64().unwrap();
                for (k, (e, xi)) in exp.iter().zip(x).enumerate() {
                    let e = if k == j {
                        e.to_i32().unwrap() - 1
                    } else {
                        e.to_i32().unwrap()
                    };
                    t *= xi.powi(e);
                }
                g[j] += t;
            }
        }
        g
    }

    fn hess_f64(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = self.n;
        let mut h = vec![vec![0.0; n]; n];
        for (exp, c) in &self.terms {
            for j in 0..n {
                for k in 0..n {
                    let ej = exp[j].to_i32().unwrap();
                    let ek = exp[k].to_i32().unwrap();
                    let factor = if j == k {
                        (ej * (ej - 1)) as f64
                    } else {
                        (ej * ek) as f64
                    };
                    if factor == 0.0 {
                        continue;
                    }
                    let mut t = rat_to_f64(c) * factor;
                    for (i, (e, xi)) in exp.iter().zip(x).enumerate() {
                        let mut e = e.to_i32().unwrap();
                        if i == j {
                            e -= 1;
                        }
                        if i == k {
                            e -= 1;
                        }
                        t *= xi.powi(e);
                    }
                    h[j][k] += t;
                }
            }
        }
        h
    }

    /// Decides nondegeneracy of all compact face parts. Exact for one and
    /// two variables (Sturm-based); sampling heuristic otherwise.
    /// Fractional-exponent input is assessed through its cleared form.
    pub fn nondegeneracy_certificate(&self) -> NondegCertificate {
        assert!(!self.is_flat(), "nondegeneracy of a flat function");
        let base = if self.has_fractional_exponents() {
            self.cleared()
        } else {
            let mut b = self.clone();
            b.flat_markers.clear();
            b
        };
        let poly = base.newton_polyhedron().expect("non-flat");
        if self.n <= 2 {
            certify_exact_2d(&base, &poly)
        } else {
            certify_by_sampling(&base, &poly)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaPart {
    pub face: Face,
    pub data: PowerData,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Nondegenerate,
    Degenerate,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertMethod {
    Exact2D,
    Sampling,
}

/// A critical point of some compact face part, exact when available.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Exact(QVec),
    Approx(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NondegCertificate {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub method: CertMethod,
}

fn pow_rat(x: &Rat, e: &BigInt) -> Rat {
    assert!(!e.is_negative());
    let mut acc = Rat::one();
    let mut k = e.to_u64().expect("exponent fits u64");
    let mut base = x.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    acc
}

/// Exact certificate in <= 2 variables. A vertex part is a monomial,
/// critical off the axes only when constant. An edge part factors as
/// `x^α⁰ · q(u)` with `u = x₁^{a₂} x₂^{−a₁}`; its gradient vanishes off
/// the axes iff `q` has a repeated real root `u₀ ≠ 0` (the 2×2 system in
/// `(q, u q')` has determinant `−l ≠ 0`).
fn certify_exact_2d(f: &PowerData, poly: &NewtonPolyhedron) -> NondegCertificate {
    let n = f.dim();
    for face in poly.faces.iter().filter(|fc| fc.compact) {
        let part = f.gamma_part(poly, face).expect("face of own polyhedron");
        if face.dim == 0 {
            let (exp, _) = part.data.terms().next().expect("vertex carries a term");
            if exp.iter().all(Zero::is_zero) {
                return NondegCertificate {
                    verdict: Verdict::Degenerate,
                    witness: Some(Witness::Exact(vec![Rat::one(); n])),
                    method: CertMethod::Exact2D,
                };
            }
            continue;
        }
        // Compact edge, n = 2. Primitive normal (a1, a2), both positive.
        let pair = face.defining_pair(poly);
        let a = crate::rat::primitive(&pair.normal);
        let (a1, a2) = (a[0].clone(), a[1].clone());
        debug_assert!(a1.is_positive() && a2.is_positive());
        let alpha0 = part
            .data
            .terms()
            .map(|(e, _)| e.clone())
            .min_by_key(|e| e[0].clone())
            .unwrap();
        let mut coeffs: Vec<Rat> = vec![];
        for (e, c) in part.data.terms() {
            let k = (&e[0] - &alpha0[0]).div_rem(&a2);
            debug_assert!(k.1.is_zero(), "edge exponents step by the direction");
            let k = k.0.to_usize().unwrap();
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rat::zero());
            }
            coeffs[k] = c.clone();
        }
        let q = UPoly::new(coeffs);
        let h = q.gcd(&q.derivative());
        if h.is_zero() || h.degree() == 0 {
            continue;
        }
        // Strip the root at u = 0.
        let mut hc = h.coeffs.clone();
        let shift = hc.iter().position(|c| !c.is_zero()).unwrap();
        hc.drain(..shift);
        let h = UPoly::new(hc);
        if h.degree() == 0 || h.count_real_roots() == 0 {
            continue;
        }
        let u0 = h
            .rational_roots()
            .into_iter()
            .find(|r| !r.is_zero())
            .map(RootValue::Exact)
            .unwrap_or_else(|| RootValue::Approx(refine_nonzero_root(&h)));
        let witness = edge_witness(&a1, &a2, &u0);
        if let Witness::Exact(ref pt) = witness {
            debug_assert!(part.data.grad_rat(pt).iter().all(Zero::is_zero));
        }
        return NondegCertificate {
            verdict: Verdict::Degenerate,
            witness: Some(witness),
            method: CertMethod::Exact2D,
        };
    }
    NondegCertificate {
        verdict: Verdict::Nondegenerate,
        witness: None,
        method: CertMethod::Exact2D,
    }
}

enum RootValue {
    Exact(Rat),
    Approx(f64),
}

fn refine_nonzero_root(h: &UPoly) -> f64 {
    let width = Rat::new(BigInt::one(), BigInt::from(1u64 << 40));
    for (lo, hi) in h.isolate_real_roots(&width) {
        let mid = rat_to_f64(&lo) * 0.5 + rat_to_f64(&hi) * 0.5;
        if mid != 0.0 {
            return mid;
        }
    }
    unreachable!("a nonzero real root was certified");
}

/// Lifts a repeated root `u₀` of `q` to a critical point via exponents
/// `(r, s)` with `a₂ r − a₁ s = 1`; signs fixed by parity when `u₀ < 0`.
fn edge_witness(a1: &BigInt, a2: &BigInt, u0: &RootValue) -> Witness {
    let gcd = a2.extended_gcd(a1);
    debug_assert!(gcd.gcd.is_one());
    let (r, s) = (gcd.x, -gcd.y);
    let negative = match u0 {
        RootValue::Exact(v) => v.is_negative(),
        RootValue::Approx(v) => *v < 0.0,
    };
    let (s1, s2) = if !negative {
        (1i32, 1i32)
    } else if a2.is_odd() {
        (-1, 1)
    } else {
        (1, -1)
    };
    match u0 {
        RootValue::Exact(v) => {
            let m = v.abs();
            let x1 = signed_pow(&m, &r, s1);
            let x2 = signed_pow(&m, &s, s2);
            Witness::Exact(vec![x1, x2])
        }
        RootValue::Approx(v) => {
            let m = v.abs();
            let x1 = s1 as f64 * m.powi(r.to_i32().unwrap());
            let x2 = s2 as f64 * m.powi(s.to_i32().unwrap());
            Witness::Approx(vec![x1, x2])
        }
    }
}

fn signed_pow(m: &Rat, e: &BigInt, sign: i32) -> Rat {
    let p = if e.is_negative() {
        pow_rat(&(Rat::one() / m), &(-e))
    } else {
        pow_rat(m, e)
    };
    if sign < 0 {
        -p
    } else {
        p
    }
}

/// Heuristic for 3 and 4 variables: per compact face, scan sign patterns ×
/// log-spaced magnitudes, then polish the best starting points with damped
/// Newton steps on |∇f_γ|²; report Degenerate on a sub-threshold gradient,
/// otherwise Unknown.
fn certify_by_sampling(f: &PowerData, poly: &NewtonPolyhedron) -> NondegCertificate {
    let n = f.dim();
    let mags_per_axis = if n == 3 { 41 } else { 11 };
    for face in poly.faces.iter().filter(|fc| fc.compact) {
        let part = f.gamma_part(poly, face).expect("face of own polyhedron");
        if part.data.term_count() == 1 {
            // Monomial part: gradient vanishes off the axes iff constant.
            let (exp, _) = part.data.terms().next().unwrap();
            if exp.iter().all(Zero::is_zero) {
                return NondegCertificate {
                    verdict: Verdict::Degenerate,
                    witness: Some(Witness::Approx(vec![1.0; n])),
                    method: CertMethod::Sampling,
                };
            }
            continue;
        }
        if let Some(witness) = sample_critical_point(&part.data, mags_per_axis) {
            return NondegCertificate {
                verdict: Verdict::Degenerate,
                witness: Some(Witness::Approx(witness)),
                method: CertMethod::Sampling,
            };
        }
    }
    NondegCertificate {
        verdict: Verdict::Unknown,
        witness: None,
        method: CertMethod::Sampling,
    }
}

fn sample_critical_point(part: &PowerData, mags_per_axis: usize) -> Option<Vec<f64>> {
    let n = part.dim();
    let mags: Vec<f64> = (0..mags_per_axis)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (mags_per_axis - 1) as f64))
        .collect();
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    let per_axis = 2 * mags_per_axis;
    let total = per_axis.pow(n as u32);
    for idx in 0..total {
        let mut rem = idx;
        let mut x = vec![0.0; n];
        for xj in x.iter_mut() {
            let choice = rem % per_axis;
            rem /= per_axis;
            let sign = if choice < mags_per_axis { 1.0 } else { -1.0 };
            *xj = sign * mags[choice % mags_per_axis];
        }
        let g = part.grad_f64(&x);
        let s: f64 = g.iter().map(|v| v * v).sum();
        if best.len() < 32 {
            best.push((s, x));
            best.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        } else if s < best[31].0 {
            best[31] = (s, x);
            best.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        }
    }
    for (_, start) in best {
        if let Some(x) = newton_polish(part, start) {
            return Some(x);
        }
    }
    None
}

fn newton_polish(part: &PowerData, mut x: Vec<f64>) -> Option<Vec<f64>> {
    let n = part.dim();
    for _ in 0..20 {
        let g = part.grad_f64(&x);
        let gnorm: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm < 1e-13 {
            break;
        }
        let h = part.hess_f64(&x);
        let step = solve_f64(&h, &g).unwrap_or_else(|| {
            let scale = 1e-2 / (gnorm + 1e-30);
            g.iter().map(|v| v * scale).collect()
        });
        let mut improved = false;
        let mut damp = 1.0;
        for _ in 0..8 {
            let cand: Vec<f64> = x
                .iter()
                .zip(&step)
                .map(|(xi, s)| (xi - damp * s).clamp(-1e6, 1e6))
                .collect();
            if cand.iter().any(|&c| c.abs() < 1e-9) {
                damp *= 0.5;
                continue;
            }
            let cg = part.grad_f64(&cand);
            let cn: f64 = cg.iter().map(|v| v * v).sum::<f64>().sqrt();
            if cn < gnorm {
                x = cand;
                improved = true;
                break;
            }
            damp *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let g = part.grad_f64(&x);
    let gnorm: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let off_axes = x.iter().all(|&c| c.abs() > 1e-8);
    if gnorm < 1e-10 && off_axes && x.len() == n {
        Some(x)
    } else {
        None
    }
}

fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..=n {
                    let delta = f * m[col][k];
                    m[row][k] -= delta;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}
