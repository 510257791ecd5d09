//! High-precision real arithmetic on exact rationals.
//!
//! Every function returns a rational approximation of its mathematical value
//! accurate to at least 60 significant decimal digits. Intermediate results
//! are rounded to a fixed number of bits so numerators and denominators stay
//! bounded across long computations.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rat::{rat_to_f64, Rat};

/// Working precision in bits (about 126 decimal digits). The headroom over
/// the 60-digit target absorbs the cancellation among the large alternating
/// Spouge terms in `gamma_r`.
const PREC_BITS: u32 = 420;

fn eps() -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << 405)
}

/// Rounds to `PREC_BITS` fractional bits.
pub fn round_prec(x: &Rat) -> Rat {
    let scale = BigInt::one() << PREC_BITS;
    let scaled = x * Rat::from(scale.clone());
    Rat::new(scaled.round().to_integer(), scale)
}

/// Parses a plain decimal literal such as "-3.14159" exactly.
pub fn rat_from_decimal(s: &str) -> Rat {
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    let digits: String = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().expect("decimal digits");
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    Rat::new(BigInt::from(sign) * num, den)
}

fn atan_inv(k: i64) -> Rat {
    // arctan(1/k) = Σ (−1)^i / ((2i+1) k^{2i+1})
    let kk = Rat::from(BigInt::from(k * k));
    let mut term = Rat::new(BigInt::one(), BigInt::from(k));
    let mut sum = term.clone();
    let mut i: i64 = 1;
    let e = eps();
    loop {
        term /= &kk;
        let contrib = &term / Rat::from(BigInt::from(2 * i + 1));
        if contrib.abs() < e {
            break;
        }
        if i % 2 == 1 {
            sum -= contrib;
        } else {
            sum += contrib;
        }
        i += 1;
    }
    sum
}

/// π by Machin's formula.
pub fn pi() -> Rat {
    static CACHE: OnceLock<Rat> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let v = Rat::from(BigInt::from(16)) * atan_inv(5)
                - Rat::from(BigInt::from(4)) * atan_inv(239);
            round_prec(&v)
        })
        .clone()
}

/// ln 2 = 2 artanh(1/3).
pub fn ln2() -> Rat {
    static CACHE: OnceLock<Rat> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let third = Rat::new(BigInt::one(), BigInt::from(3));
            let sq = &third * &third;
            let mut term = third.clone();
            let mut sum = term.clone();
            let mut i = 1i64;
            let e = eps();
            loop {
                term *= &sq;
                let contrib = &term / Rat::from(BigInt::from(2 * i + 1));
                if contrib < e {
                    break;
                }
                sum += contrib;
                i += 1;
            }
            round_prec(&(sum * Rat::from(BigInt::from(2))))
        })
        .clone()
}

/// e^x for any rational x.
pub fn exp_r(x: &Rat) -> Rat {
    // Halve the argument until |y| ≤ 1/2, then square back.
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let mut k = 0u32;
    let mut y = x.clone();
    while y.abs() > half {
        y /= Rat::from(BigInt::from(2));
        k += 1;
        assert!(k < 64, "exponent too large for exp");
    }
    let e = eps();
    let mut term = Rat::one();
    let mut sum = Rat::one();
    let mut i = 1u32;
    loop {
        term = round_prec(&(&term * &y / Rat::from(BigInt::from(i))));
        if term.abs() < e {
            break;
        }
        sum += &term;
        i += 1;
    }
    for _ in 0..k {
        sum = round_prec(&(&sum * &sum));
    }
    sum
}

/// Natural logarithm for x > 0.
pub fn ln_r(x: &Rat) -> Rat {
    assert!(x.is_positive(), "ln needs a positive argument");
    // Normalize x = m · 2^e with m in [3/4, 3/2).
    let mut e2: i64 = 0;
    let mut m = x.clone();
    let lo = Rat::new(BigInt::from(3), BigInt::from(4));
    let hi = Rat::new(BigInt::from(3), BigInt::from(2));
    while m >= hi {
        m /= Rat::from(BigInt::from(2));
        e2 += 1;
    }
    while m < lo {
        m *= Rat::from(BigInt::from(2));
        e2 -= 1;
    }
    // ln m = 2 artanh((m−1)/(m+1)), |y| ≤ 1/5.
    let y = (&m - Rat::one()) / (&m + Rat::one());
    let sq = round_prec(&(&y * &y));
    let mut term = y.clone();
    let mut sum = y;
    let mut i = 1i64;
    let e = eps();
    loop {
        term = round_prec(&(&term * &sq));
        let contrib = &term / Rat::from(BigInt::from(2 * i + 1));
        if contrib.abs() < e {
            break;
        }
        sum += contrib;
        i += 1;
    }
    round_prec(&(sum * Rat::from(BigInt::from(2)) + Rat::from(BigInt::from(e2)) * ln2()))
}

/// Square root by Newton iteration for x ≥ 0.
pub fn sqrt_r(x: &Rat) -> Rat {
    assert!(!x.is_negative(), "sqrt needs a nonnegative argument");
    if x.is_zero() {
        return Rat::zero();
    }
    let guess = rat_to_f64(x).sqrt();
    let mut y = if guess.is_finite() && guess > 0.0 {
        Rat::from_float(guess).expect("finite sqrt seed")
    } else {
        Rat::one()
    };
    for _ in 0..8 {
        y = round_prec(&((&y + x / &y) / Rat::from(BigInt::from(2))));
    }
    y
}

fn sin_cos_reduced(x: &Rat) -> (Rat, Rat) {
    // Taylor series; callers reduce |x| ≤ π first.
    let e = eps();
    let sq = round_prec(&(x * x));
    let mut term = x.clone();
    let mut sin = x.clone();
    let mut i = 1u32;
    loop {
        term = round_prec(&(&term * &sq / Rat::from(BigInt::from((2 * i) * (2 * i + 1)))));
        if term.abs() < e {
            break;
        }
        if i % 2 == 1 {
            sin -= &term;
        } else {
            sin += &term;
        }
        i += 1;
    }
    let mut term = Rat::one();
    let mut cos = Rat::one();
    let mut i = 1u32;
    loop {
        term = round_prec(&(&term * &sq / Rat::from(BigInt::from((2 * i - 1) * (2 * i)))));
        if term.abs() < e {
            break;
        }
        if i % 2 == 1 {
            cos -= &term;
        } else {
            cos += &term;
        }
        i += 1;
    }
    (sin, cos)
}

fn reduce_mod_2pi(x: &Rat) -> Rat {
    let two_pi = pi() * Rat::from(BigInt::from(2));
    let q = (x / &two_pi).round();
    round_prec(&(x - q * two_pi))
}

pub fn sin_r(x: &Rat) -> Rat {
    sin_cos_reduced(&reduce_mod_2pi(x)).0
}

pub fn cos_r(x: &Rat) -> Rat {
    sin_cos_reduced(&reduce_mod_2pi(x)).1
}

/// x^y for x > 0.
pub fn powf_r(x: &Rat, y: &Rat) -> Rat {
    if y.is_zero() {
        return Rat::one();
    }
    if x.is_one() {
        return Rat::one();
    }
    exp_r(&round_prec(&(ln_r(x) * y)))
}

/// Γ(x) for x > 0 by the Spouge approximation (a = 85, relative error well
/// below 10⁻⁶⁰).
pub fn gamma_r(x: &Rat) -> Rat {
    assert!(x.is_positive(), "gamma needs a positive argument");
    const A: i64 = 85;
    let z = x - Rat::one();
    let two_pi = pi() * Rat::from(BigInt::from(2));
    let mut acc = sqrt_r(&two_pi);
    let mut factorial = BigInt::one();
    for k in 1..A {
        if k > 1 {
            factorial *= BigInt::from(k - 1);
        }
        let amk = A - k;
        // c_k = (−1)^{k−1} (a−k)^{k−1/2} e^{a−k} / (k−1)!
        let power = Rat::from(BigInt::from(amk).pow(k as u32)) / sqrt_r(&Rat::from(BigInt::from(amk)));
        let ck = power * exp_r(&Rat::from(BigInt::from(amk))) / Rat::from(factorial.clone());
        let signed = if k % 2 == 1 { ck } else { -ck };
        acc += round_prec(&(signed / (&z + Rat::from(BigInt::from(k)))));
    }
    let za = &z + Rat::from(BigInt::from(A));
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let log_front = round_prec(&((&z + half) * ln_r(&za) - za));
    round_prec(&(exp_r(&log_front) * acc))
}
