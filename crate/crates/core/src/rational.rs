//! Arbitrary-precision rational points and small numeric helpers.
//!
//! Every predicate downstream (sidedness, rank, containment) is evaluated on
//! these exact values; floating point appears only at output boundaries.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A point with arbitrary-precision rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pub coords: Vec<BigRational>,
}

impl RationalPoint {
    pub fn new(coords: Vec<BigRational>) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            coords: vec![BigRational::zero(); dim],
        }
    }

    /// Build from integer numerators over a common denominator.
    pub fn from_numerators(numers: &[i64], denom: u64) -> Self {
        let d = BigInt::from(denom);
        Self {
            coords: numers
                .iter()
                .map(|&m| BigRational::new(BigInt::from(m), d.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Vec<BigRational> {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect()
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coords.iter().map(rational_to_f64).collect()
    }

    /// Decimal-free exact serialization, one "num/den" string per coordinate.
    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.to_string()).collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|t| parse_rational(t.trim()))
            .collect::<Result<Vec<_>>>()?;
        if coords.is_empty() {
            return Err(Error::Parse("empty point".into()));
        }
        Ok(Self { coords })
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let numer: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator {n:?}")))?;
        let denom: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator {d:?}")))?;
        if denom.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(BigRational::new(numer, denom))
    } else if let Ok(n) = s.parse::<BigInt>() {
        Ok(BigRational::from_integer(n))
    } else {
        Err(Error::Parse(format!("bad rational {s:?}")))
    }
}

/// Lossy conversion that stays finite for numerators/denominators of any size.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let numer = r.numer();
    let denom = r.denom();
    if numer.is_zero() {
        return 0.0;
    }
    // Shift both sides into f64 range, then divide.
    let nb = numer.bits() as i64;
    let db = denom.bits() as i64;
    let shift = (nb.max(db) - 800).max(0) as u64;
    let n = (numer >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (denom >> shift).to_f64().unwrap_or(f64::NAN);
    if d.is_finite() && n.is_finite() && d != 0.0 {
        n / d
    } else {
        // Fall back to an exponent-based estimate.
        let sign = if numer.sign() == Sign::Minus { -1.0 } else { 1.0 };
        sign * 2f64.powi((nb - db) as i32)
    }
}

/// ln of a positive rational, computed stably from its integer parts.
pub fn rational_ln(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "rational_ln needs a positive value");
    big_ln(r.numer()) - big_ln(r.denom())
}

fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 52 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 52;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Exact dyadic uniform in [0, 1) with 64 random bits.
pub fn dyadic_uniform<R: rand::Rng + ?Sized>(rng: &mut R) -> BigRational {
    let bits: u64 = rng.gen();
    BigRational::new(BigInt::from(bits), BigInt::one() << 64u32)
}

/// Exact dyadic uniform in [0, 1) with 128 random bits, for weight selection.
pub fn dyadic_uniform_wide<R: rand::Rng + ?Sized>(rng: &mut R) -> BigRational {
    let hi: u64 = rng.gen();
    let lo: u64 = rng.gen();
    let v = (BigInt::from(hi) << 64u32) + BigInt::from(lo);
    BigRational::new(v, BigInt::one() << 128u32)
}
