//! Exact feasibility of linear systems with mixed equalities, weak and
//! strict inequalities, via Fourier–Motzkin elimination.
//!
//! Equalities are removed first by substitution; eliminating a variable
//! from inequalities combines every lower bound with every upper bound,
//! and a combination is strict when either side is strict.

use crate::rat::{QVec, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rel {
    /// coeffs · x = rhs
    Eq,
    /// coeffs · x ≥ rhs
    Ge,
    /// coeffs · x > rhs
    Gt,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: QVec,
    pub rhs: Rat,
    pub rel: Rel,
}

impl Constraint {
    pub fn new(coeffs: QVec, rel: Rel, rhs: Rat) -> Self {
        Constraint { coeffs, rhs, rel }
    }

    /// Canonical integer form used for deduplication.
    fn key(&self) -> (Vec<BigInt>, BigInt, bool) {
        let mut lcm = BigInt::from(1);
        for c in self.coeffs.iter().chain(std::iter::once(&self.rhs)) {
            lcm = lcm.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let mut rhs = self.rhs.numer() * (&lcm / self.rhs.denom());
        let mut g = rhs.abs();
        for x in &ints {
            g = g.gcd(x);
        }
        if !g.is_zero() && g != BigInt::from(1) {
            for x in ints.iter_mut() {
                *x = &*x / &g;
            }
            rhs = &rhs / &g;
        }
        (ints, rhs, self.rel == Rel::Gt)
    }
}

/// Decides whether the system has a rational solution.
pub fn feasible(constraints: &[Constraint], nvars: usize) -> bool {
    debug_assert!(constraints.iter().all(|c| c.coeffs.len() == nvars));
    let mut sys: Vec<Constraint> = constraints.to_vec();
    let mut active_vars: Vec<usize> = (0..nvars).collect();

    // Substitute out equalities.
    loop {
        let Some(pos) = sys.iter().position(|c| {
            c.rel == Rel::Eq && c.coeffs.iter().any(|x| !x.is_zero())
        }) else {
            break;
        };
        let eq = sys.swap_remove(pos);
        let var = eq
            .coeffs
            .iter()
            .position(|x| !x.is_zero())
            .expect("nonzero coefficient exists");
        let pivot = eq.coeffs[var].clone();
        for c in sys.iter_mut() {
            if c.coeffs[var].is_zero() {
                continue;
            }
            let factor = &c.coeffs[var] / &pivot;
            for j in 0..c.coeffs.len() {
                let t = &eq.coeffs[j] * &factor;
                c.coeffs[j] = &c.coeffs[j] - t;
            }
            let t = &eq.rhs * &factor;
            c.rhs = &c.rhs - t;
        }
        active_vars.retain(|&v| v != var);
    }

    // Degenerate equalities left behind reduce to constant checks below.
    for var in active_vars {
        let (mut lowers, mut uppers, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for c in sys {
            if c.coeffs[var].is_zero() {
                rest.push(c);
            } else if c.coeffs[var].is_positive() {
                lowers.push(c);
            } else {
                uppers.push(c);
            }
        }
        for lo in &lowers {
            for up in &uppers {
                // lo: a x_var >= L (a>0), up: -b x_var >= U (b>0)
                // combine: b*lo + a*up eliminates x_var.
                let a = lo.coeffs[var].clone();
                let b = -up.coeffs[var].clone();
                let coeffs: QVec = lo
                    .coeffs
                    .iter()
                    .zip(&up.coeffs)
                    .map(|(lc, uc)| &b * lc + &a * uc)
                    .collect();
                let rhs = &b * &lo.rhs + &a * &up.rhs;
                let rel = if lo.rel == Rel::Gt || up.rel == Rel::Gt {
                    Rel::Gt
                } else {
                    Rel::Ge
                };
                rest.push(Constraint::new(coeffs, rel, rhs));
            }
        }
        rest.sort_by_cached_key(|c| c.key());
        rest.dedup_by_key(|c| c.key());
        sys = rest;
    }

    sys.iter().all(|c| {
        debug_assert!(c.coeffs.iter().all(Zero::is_zero));
        match c.rel {
            Rel::Eq => c.rhs.is_zero(),
            Rel::Ge => !c.rhs.is_positive(),
            Rel::Gt => c.rhs.is_negative(),
        }
    })
}

/// Rewrites constraints on `y` as constraints on `x` under `y = scale·(x + shift)`.
pub fn transformed(cons: &[Constraint], scale: &Rat, shift: &[Rat]) -> Vec<Constraint> {
    cons.iter()
        .map(|c| {
            let dot: Rat = c
                .coeffs
                .iter()
                .zip(shift)
                .map(|(a, s)| a * s)
                .fold(Rat::zero(), |acc, t| acc + t);
            Constraint::new(
                c.coeffs.iter().map(|a| a * scale).collect(),
                c.rel,
                &c.rhs - scale * dot,
            )
        })
        .collect()
}
