//! Exact univariate polynomials over the rationals: arithmetic, gcd,
//! square-free parts, Sturm sequences, rational root extraction, and
//! certified real-root isolation. Used to decide whether a Laurent-reduced
//! face polynomial has a critical zero off the coordinate axes.

use crate::rat::{rat_to_f64, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense coefficients, `coeffs[k]` multiplying `u^k`; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    pub coeffs: Vec<Rat>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, Zero::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        assert!(!self.is_zero(), "degree of the zero polynomial");
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &Rat {
        self.coeffs.last().expect("zero polynomial")
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rat::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rat::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            out[k] += c;
        }
        Self::new(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Remainder of `self` divided by `other`.
    pub fn rem(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero polynomial");
        let mut r = self.clone();
        let d = other.degree();
        let lead = other.leading().clone();
        while !r.is_zero() && r.degree() >= d {
            let k = r.degree() - d;
            let q = r.leading() / &lead;
            for (j, c) in other.coeffs.iter().enumerate() {
                let sub = c * &q;
                r.coeffs[j + k] -= sub;
            }
            r = Self::new(r.coeffs);
        }
        r
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let inv = Rat::one() / a.leading();
        a.scale(&inv)
    }

    /// Square-free part `self / gcd(self, self')`, made monic.
    pub fn square_free(&self) -> Self {
        assert!(!self.is_zero());
        let g = self.gcd(&self.derivative());
        if g.is_zero() || g.degree() == 0 {
            let inv = Rat::one() / self.leading();
            return self.scale(&inv);
        }
        let q = self.div_exact(&g);
        let inv = Rat::one() / q.leading();
        q.scale(&inv)
    }

    fn div_exact(&self, other: &Self) -> Self {
        let mut r = self.clone();
        let d = other.degree();
        let lead = other.leading().clone();
        let mut q = vec![Rat::zero(); self.coeffs.len().saturating_sub(d)];
        while !r.is_zero() && r.degree() >= d {
            let k = r.degree() - d;
            let c = r.leading() / &lead;
            q[k] = c.clone();
            for (j, oc) in other.coeffs.iter().enumerate() {
                let sub = oc * &c;
                r.coeffs[j + k] -= sub;
            }
            r = Self::new(r.coeffs);
        }
        assert!(r.is_zero(), "inexact polynomial division");
        Self::new(q)
    }

    /// Sturm chain of the square-free part.
    fn sturm_chain(&self) -> Vec<UPoly> {
        let p = self.square_free();
        let mut chain = vec![p.clone()];
        if p.degree() >= 1 {
            chain.push(p.derivative());
            loop {
                let k = chain.len();
                let r = chain[k - 2].rem(&chain[k - 1]);
                if r.is_zero() {
                    break;
                }
                chain.push(r.scale(&-Rat::one()));
            }
        }
        chain
    }

    fn sign_changes_at(chain: &[UPoly], x: &Rat) -> usize {
        let signs: Vec<i32> = chain
            .iter()
            .map(|p| {
                let v = p.eval(x);
                if v.is_zero() {
                    0
                } else if v.is_positive() {
                    1
                } else {
                    -1
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    fn sign_changes_at_inf(chain: &[UPoly], positive: bool) -> usize {
        let signs: Vec<i32> = chain
            .iter()
            .map(|p| {
                if p.is_zero() {
                    return 0;
                }
                let s = if p.leading().is_positive() { 1 } else { -1 };
                if positive || p.degree() % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in the open interval `(lo, hi)`.
    pub fn count_roots_between(&self, lo: &Rat, hi: &Rat) -> usize {
        assert!(lo < hi);
        let chain = self.sturm_chain();
        let mut count =
            Self::sign_changes_at(&chain, lo) - Self::sign_changes_at(&chain, hi);
        // Sturm counts roots in (lo, hi]; correct for a root at hi.
        if self.eval(hi).is_zero() {
            count -= 1;
        }
        count
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        if self.is_zero() || self.degree() == 0 {
            return 0;
        }
        let chain = self.sturm_chain();
        Self::sign_changes_at_inf(&chain, false) - Self::sign_changes_at_inf(&chain, true)
    }

    /// Cauchy bound: all real roots lie in `(-B, B)`.
    pub fn root_bound(&self) -> Rat {
        assert!(!self.is_zero());
        if self.degree() == 0 {
            return Rat::one();
        }
        let lead = self.leading().abs();
        let max = self
            .coeffs
            .iter()
            .take(self.degree())
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Rat::zero);
        max + Rat::one()
    }

    /// All rational roots, found exactly from the integer-cleared
    /// coefficients by the usual divisor test.
    pub fn rational_roots(&self) -> Vec<Rat> {
        if self.is_zero() || self.degree() == 0 {
            return vec![];
        }
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            lcm = lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let lead = ints.last().unwrap().clone();
        // Strip the zero root first.
        let mut roots = Vec::new();
        let low = ints.iter().position(|c| !c.is_zero()).unwrap();
        if low > 0 {
            roots.push(Rat::zero());
        }
        let tail = &ints[low..];
        let c0 = tail[0].abs();
        for p in divisors(&c0) {
            for q in divisors(&lead.abs()) {
                for sign in [1i32, -1] {
                    let cand = Rat::new(BigInt::from(sign) * &p, q.clone());
                    if self.eval(&cand).is_zero() && !roots.contains(&cand) {
                        roots.push(cand);
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    /// Isolates every real root of the square-free part into disjoint
    /// rational intervals `(lo, hi)` with `hi - lo <= width`, via Sturm
    /// bisection.
    pub fn isolate_real_roots(&self, width: &Rat) -> Vec<(Rat, Rat)> {
        let p = self.square_free();
        if p.degree() == 0 {
            return vec![];
        }
        let b = p.root_bound();
        let mut stack = vec![(-b.clone(), b)];
        let mut out = Vec::new();
        while let Some((lo, hi)) = stack.pop() {
            let k = p.count_roots_between(&lo, &hi);
            if k == 0 {
                continue;
            }
            if k == 1 && (&hi - &lo) <= *width {
                out.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / Rat::from_integer(BigInt::from(2));
            // Splitting into open halves would lose a root sitting exactly
            // at the midpoint, so emit it as a degenerate interval.
            if p.eval(&mid).is_zero() {
                out.push((mid.clone(), mid.clone()));
            }
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

fn divisors(c: &BigInt) -> Vec<BigInt> {
    assert!(!c.is_negative());
    if c.is_zero() {
        return vec![BigInt::one()];
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    // Fine for the small constant terms that arise from face polynomials.
    while &d * &d <= *c {
        if c.is_multiple_of(&d) {
            out.push(d.clone());
            out.push(c / &d);
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rint};

    fn p(coeffs: &[i64]) -> UPoly {
        UPoly::new(coeffs.iter().map(|&c| rint(c)).collect())
    }

    #[test]
    fn arithmetic_and_eval() {
        let f = p(&[1, -2, 1]); // (u-1)^2
        assert_eq!(f.eval(&rint(1)), rint(0));
        assert_eq!(f.eval(&rint(3)), rint(4));
        assert_eq!(f.derivative(), p(&[-2, 2]));
        assert_eq!(p(&[1, 1]).mul(&p(&[-1, 1])), p(&[-1, 0, 1]));
    }

    #[test]
    fn gcd_and_square_free() {
        let f = p(&[1, -2, 1]); // (u-1)^2
        let g = p(&[-1, 1]);
        assert_eq!(f.gcd(&f.derivative()), g);
        assert_eq!(f.square_free(), g);
        // Already square-free stays put (monic).
        assert_eq!(p(&[-2, 0, 2]).square_free(), p(&[-1, 0, 1]));
    }

    #[test]
    fn sturm_counts() {
        // u^2 - 2: two real roots, one in (1, 2).
        let f = p(&[-2, 0, 1]);
        assert_eq!(f.count_real_roots(), 2);
        assert_eq!(f.count_roots_between(&rint(1), &rint(2)), 1);
        assert_eq!(f.count_roots_between(&rint(2), &rint(3)), 0);
        // u^2 + 1: none.
        assert_eq!(p(&[1, 0, 1]).count_real_roots(), 0);
        // Multiple root counted once.
        assert_eq!(p(&[1, -2, 1]).count_real_roots(), 1);
    }

    #[test]
    fn rational_root_extraction() {
        // 6u^3 - u^2 - u = u(3u - ... ): roots 0, 1/2, -1/3.
        let f = UPoly::new(vec![rint(0), rint(-1), rint(-1), rint(6)]);
        let roots = f.rational_roots();
        assert_eq!(roots, vec![rat(-1, 3), rint(0), rat(1, 2)]);
        // Irrational roots yield nothing.
        assert!(p(&[-2, 0, 1]).rational_roots().is_empty());
    }

    #[test]
    fn isolation_brackets_sqrt2() {
        let f = p(&[-2, 0, 1]);
        let boxes = f.isolate_real_roots(&rat(1, 1024));
        assert_eq!(boxes.len(), 2);
        let (lo, hi) = &boxes[1];
        assert!(f.eval(lo) * f.eval(hi) <= rint(0));
        assert!(rat_to_f64(lo) < 1.4142135624 && 1.4142135624 < rat_to_f64(hi) + 1e-3);
    }
}
