//! Lattice vectors of `M` (exponents) and `N` (covectors), rational points of
//! `N_R`, and the exact rational scalar type used throughout the crate.

use alloc::string::String;
use core::fmt;
use core::ops::{Add, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Builds the rational `num / den`.
///
/// Panics if `den` is zero.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Embeds an integer as a rational.
pub fn int(value: impl Into<BigInt>) -> Rational {
    Rational::from_integer(value.into())
}

macro_rules! lattice_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
        pub struct $name {
            pub x: BigInt,
            pub y: BigInt,
        }

        impl $name {
            pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
                Self { x: x.into(), y: y.into() }
            }

            pub fn zero() -> Self {
                Self::default()
            }

            pub fn is_zero(&self) -> bool {
                self.x.is_zero() && self.y.is_zero()
            }

            /// Scales by an integer.
            pub fn scale(&self, k: &BigInt) -> Self {
                Self { x: &self.x * k, y: &self.y * k }
            }

            /// The vector divided by the gcd of its coordinates. Zero stays zero.
            pub fn primitive(&self) -> Self {
                let g = self.x.gcd(&self.y);
                if g.is_zero() {
                    return self.clone();
                }
                Self { x: &self.x / &g, y: &self.y / &g }
            }

            /// Lattice length: gcd of the coordinates.
            pub fn lattice_length(&self) -> BigInt {
                self.x.gcd(&self.y)
            }

            /// Sup norm `max(|x|, |y|)`.
            pub fn sup_norm(&self) -> BigInt {
                let (ax, ay) = (self.x.abs(), self.y.abs());
                if ax > ay { ax } else { ay }
            }

            pub fn to_rational(&self) -> RationalPoint {
                RationalPoint::new(int(self.x.clone()), int(self.y.clone()))
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, rhs: Self) -> $name {
                $name { x: &self.x + &rhs.x, y: &self.y + &rhs.y }
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: Self) -> $name {
                $name { x: &self.x - &rhs.x, y: &self.y - &rhs.y }
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                $name { x: -&self.x, y: -&self.y }
            }
        }

        impl Add for $name {
            type Output = $name;
            fn add(self, rhs: Self) -> $name {
                &self + &rhs
            }
        }

        impl Sub for $name {
            type Output = $name;
            fn sub(self, rhs: Self) -> $name {
                &self - &rhs
            }
        }

        impl Neg for $name {
            type Output = $name;
            fn neg(self) -> $name {
                -&self
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "({}, {})", self.x, self.y)
            }
        }
    };
}

lattice_vector!(
    /// An element of `M = Hom(N, Z)`: exponents of monomials, points of the polygon.
    LatticePoint
);

lattice_vector!(
    /// An element of `N`: directions in the tropical plane, homotopy classes of chords.
    Covector
);

impl LatticePoint {
    /// The global perpendicular convention `(a, b)^perp = (-b, a)`.
    pub fn perp(&self) -> LatticePoint {
        LatticePoint { x: -&self.y, y: self.x.clone() }
    }

    /// Euclidean dot product in `M`, used for the leg constants.
    pub fn dot(&self, other: &LatticePoint) -> BigInt {
        &self.x * &other.x + &self.y * &other.y
    }

    /// `det(self, other)`.
    pub fn cross(&self, other: &LatticePoint) -> BigInt {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn norm_squared(&self) -> BigInt {
        self.dot(self)
    }

    /// Reinterprets the coordinates as a covector through the standard bases.
    pub fn as_covector(&self) -> Covector {
        Covector { x: self.x.clone(), y: self.y.clone() }
    }
}

impl Covector {
    /// The pairing `<n, m> = n1 m1 + n2 m2`.
    pub fn pair(&self, m: &LatticePoint) -> BigInt {
        &self.x * &m.x + &self.y * &m.y
    }
}

/// A point of `N_R` with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalPoint {
    pub x: Rational,
    pub y: Rational,
}

impl RationalPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self { x: Rational::zero(), y: Rational::zero() }
    }

    /// `<self, m>` for `m` in `M`.
    pub fn pair(&self, m: &LatticePoint) -> Rational {
        &self.x * int(m.x.clone()) + &self.y * int(m.y.clone())
    }

    /// `self + t * direction`.
    pub fn offset(&self, direction: &Covector, t: &Rational) -> RationalPoint {
        RationalPoint {
            x: &self.x + t * int(direction.x.clone()),
            y: &self.y + t * int(direction.y.clone()),
        }
    }

    pub fn sub(&self, other: &RationalPoint) -> RationalPoint {
        RationalPoint { x: &self.x - &other.x, y: &self.y - &other.y }
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [rational_to_f64(&self.x), rational_to_f64(&self.y)]
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Nearest-ish `f64` of an exact rational, robust to huge numerators and denominators.
pub fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both down to 64 significant bits.
    let bits = q.numer().bits().max(q.denom().bits());
    let shift = bits.saturating_sub(64) as usize;
    let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Error from [`parse_rational`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as a rational (expected \"p/q\", an integer or a decimal)")]
pub struct ParseRationalError {
    pub input: String,
}

/// Parses `"p/q"`, `"-7"`, or a plain decimal such as `"-0.25"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError { input: String::from(text) };
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || (digits.is_empty() && frac.is_empty()) {
            return Err(err());
        }
        let whole_int = if digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(digits).map_err(|_| err())?
        };
        let frac_int = if frac.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(frac).map_err(|_| err())?
        };
        let scale = num_traits::pow(BigInt::from(10u8), frac.len());
        let magnitude = Rational::new(whole_int * &scale + frac_int, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| err())
}

/// Canonical text form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_rational(q: &Rational) -> String {
    alloc::format!("{}", q)
}

pub(crate) fn is_unit_abs(v: &BigInt) -> bool {
    v.abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perp_convention() {
        let v = LatticePoint::new(3, -2);
        assert_eq!(v.perp(), LatticePoint::new(2, 3));
        assert!(v.dot(&v.perp()).is_zero());
        assert_eq!(v.cross(&v.perp()), v.norm_squared());
    }

    #[test]
    fn primitive_and_length() {
        let v = LatticePoint::new(-4, 6);
        assert_eq!(v.primitive(), LatticePoint::new(-2, 3));
        assert_eq!(v.lattice_length(), BigInt::from(2));
        assert_eq!(LatticePoint::zero().primitive(), LatticePoint::zero());
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("-1/4").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("3/-6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("12").unwrap(), rat(12, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert_eq!(format_rational(&rat(6, -8)), "-3/4");
        assert_eq!(format_rational(&rat(4, 2)), "2");
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let q = Rational::new(big.clone() * 3, big);
        assert!((rational_to_f64(&q) - 3.0).abs() < 1e-12);
    }
}
