//! Scalars, coordinate vectors and exact rationals.
//!
//! Float coordinates are stored as complex numbers for both fields; a real
//! space simply keeps every imaginary part at zero. Pairings are bilinear:
//! `f(x) = sum f_i x_i` with no conjugation.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Rat = BigRational;
pub type CVec = Vec<C64>;
pub type RatVec = Vec<Rat>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Field::Real => write!(f, "real"),
            Field::Complex => write!(f, "complex"),
        }
    }
}

pub fn real_vec(xs: &[f64]) -> CVec {
    xs.iter().map(|&x| C64::new(x, 0.0)).collect()
}

/// Bilinear pairing `sum f_i x_i`.
pub fn pair(f: &[C64], x: &[C64]) -> C64 {
    f.iter().zip(x).map(|(a, b)| a * b).sum()
}

pub fn scale(x: &[C64], s: C64) -> CVec {
    x.iter().map(|v| v * s).collect()
}

pub fn scale_re(x: &[C64], s: f64) -> CVec {
    x.iter().map(|v| v * s).collect()
}

pub fn add(x: &[C64], y: &[C64]) -> CVec {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn sub(x: &[C64], y: &[C64]) -> CVec {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn conj(x: &[C64]) -> CVec {
    x.iter().map(|v| v.conj()).collect()
}

pub fn euclid(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn is_real(x: &[C64]) -> bool {
    x.iter().all(|v| v.im == 0.0)
}

/// Unit-modulus phase of `z` (1 for zero).
pub fn phase(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        ONE
    } else {
        z / r
    }
}

/// Kronecker product of two vectors, left index major.
pub fn kron(x: &[C64], y: &[C64]) -> CVec {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            out.push(a * b);
        }
    }
    out
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // very large numerators/denominators
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn ratvec_to_c(v: &[Rat]) -> CVec {
    v.iter().map(|r| C64::new(rat_to_f64(r), 0.0)).collect()
}

pub fn rat_dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn rat_abs_max<'a>(it: impl IntoIterator<Item = &'a Rat>) -> Rat {
    it.into_iter()
        .map(|r| r.abs())
        .fold(Rat::zero(), |m, r| if r > m { r } else { m })
}

/// Parse `"p/q"`, an integer, or a finite decimal such as `"-0.125"` exactly.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit()) || fp.is_empty() && ip.is_empty() {
            return Err(bad());
        }
        let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = Rat::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

/// Canonical `"p/q"` (or `"p"` for integers) form of a rational.
pub fn format_rational(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Closest "nice" rational to a float: exact when `x` is a dyadic with a
/// short expansion, which covers every literal typed into a catalog.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

pub fn rat_is_one(r: &Rat) -> bool {
    r.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("-2/4").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
        assert_eq!(parse_rational("-0.125").unwrap(), rat(-1, 8));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn rational_strings_round_trip() {
        for s in ["1/3", "-5/7", "0", "12", "-1"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn pairing_is_bilinear_not_sesquilinear() {
        let i = C64::new(0.0, 1.0);
        let f = vec![i, ONE];
        let x = vec![i, ONE];
        // i*i + 1 = 0; a sesquilinear pairing would give 2.
        assert!(pair(&f, &x).norm() < 1e-15);
    }
}
