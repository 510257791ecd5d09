//! Exact rational scalars and small vector helpers.
//!
//! All symbolic geometry in this crate runs on arbitrary-precision
//! rationals; floating point only appears in the numeric harness.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar. Always stored reduced with a positive denominator
/// (maintained by `BigRational` itself).
pub type Rat = BigRational;

/// Integer vector in ambient exponent space.
pub type IVec = Vec<BigInt>;

/// Rational point in ambient exponent space.
pub type QVec = Vec<Rat>;

pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "rational with zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn qvec(coords: &[i64]) -> QVec {
    coords.iter().map(|&c| rint(c)).collect()
}

pub fn ivec(coords: &[i64]) -> IVec {
    coords.iter().map(|&c| BigInt::from(c)).collect()
}

/// Parses `"p/q"` or `"p"` into a rational; used by the JSON interfaces.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| format!("invalid rational numerator in {s:?}"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| format!("invalid rational denominator in {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rat::new(num, den))
}

/// Renders a rational as `"p"` or `"p/q"`.
pub fn rat_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn dot_ii(a: &[BigInt], b: &[BigInt]) -> BigInt {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_iq(a: &[BigInt], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| Rat::from_integer(x.clone()) * y)
        .sum()
}

pub fn dot_qq(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sum of the entries of an integer vector (`⟨a⟩` for a weight vector).
pub fn coord_sum(a: &[BigInt]) -> BigInt {
    a.iter().sum()
}

/// Divides an integer vector by the gcd of its entries. The zero vector is
/// returned unchanged.
pub fn primitive(v: &[BigInt]) -> IVec {
    let mut g = BigInt::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Clears denominators of a rational vector: returns the primitive integer
/// vector pointing the same way. Zero stays zero.
pub fn clear_denominators(v: &[Rat]) -> IVec {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: IVec = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    primitive(&ints)
}

pub fn is_nonneg_vec(v: &[BigInt]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // Good enough for harness-side conversions: the values that reach the
    // numeric layer have modest magnitude.
    let num = r.numer();
    let den = r.denom();
    match (num.to_string().parse::<f64>(), den.to_string().parse::<f64>()) {
        (Ok(n), Ok(d)) if d != 0.0 && n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Fall back through a scaled quotient for extreme magnitudes.
            let (q, r2) = num.div_rem(den);
            let qf = q.to_string().parse::<f64>().unwrap_or(f64::MAX);
            let rf = r2.to_string().parse::<f64>().unwrap_or(0.0);
            let df = den.to_string().parse::<f64>().unwrap_or(f64::MAX);
            qf + rf / df
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_roundtrip() {
        for s in ["3/4", "-7/2", "5", "0", "-12"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(rat_string(&r), s);
        }
        assert_eq!(rat_string(&parse_rat("6/4").unwrap()), "3/2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitive(&ivec(&[4, 6])), ivec(&[2, 3]));
        assert_eq!(primitive(&ivec(&[0, 0])), ivec(&[0, 0]));
        assert_eq!(clear_denominators(&[rat(1, 2), rat(1, 3)]), ivec(&[3, 2]));
    }

    #[test]
    fn f64_conversion() {
        assert_eq!(rat_to_f64(&rat(1, 2)), 0.5);
        assert!((rat_to_f64(&rat(-22, 7)) + 3.142857142857143).abs() < 1e-12);
    }
}
