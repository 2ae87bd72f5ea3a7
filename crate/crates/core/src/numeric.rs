//! Rational lower approximations of the exponential function.
//!
//! The mechanism weights e^(eps l/2) are replaced by powers of a fixed
//! rational e_hat <= e^(eps/2) accurate to ~2^-120. Every downstream
//! identity (normalization, the telescoping level sums, neighbor density
//! ratios) then holds exactly in rational arithmetic, and rounding down
//! keeps the realized privacy parameter at most the configured one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

const PRECISION_BITS: u32 = 128;

/// Rational lower bound on e^x for x >= 0, relative error below 2^-120,
/// truncated to a dyadic rational so later powers stay small.
pub fn exp_lower(x: &BigRational) -> BigRational {
    assert!(!x.is_negative(), "exp_lower expects x >= 0");
    if x.is_zero() {
        return BigRational::one();
    }
    // Taylor partial sums increase toward e^x, so truncation rounds down.
    let mut sum = BigRational::one();
    let mut term = BigRational::one();
    let mut k = BigInt::one();
    loop {
        term = term * x / BigRational::from_integer(k.clone());
        sum += &term;
        k += 1;
        // Once k > 2x the tail is dominated by a geometric series with
        // ratio < 1/2, so remainder < 2 * term.
        let kq = BigRational::from_integer(k.clone());
        if &kq > &(x * BigRational::from_integer(BigInt::from(2)))
            && &term * BigRational::from_integer(BigInt::from(2))
                < &sum / BigRational::from_integer(BigInt::one() << (PRECISION_BITS + 8))
        {
            break;
        }
    }
    // Floor to denominator 2^PRECISION_BITS (sum > 1, so this stays >= 1).
    let scale = BigInt::one() << PRECISION_BITS;
    let floored = (sum.numer() * &scale) / sum.denom();
    BigRational::new(floored, scale)
}

/// Exact nonnegative integer power.
pub fn pow(base: &BigRational, exp: usize) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rational_to_f64;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn matches_f64_exp() {
        for (n, d) in [(1i64, 2i64), (1, 4), (1, 1), (3, 2), (20, 1)] {
            let x = q(n, d);
            let e = exp_lower(&x);
            let truth = (n as f64 / d as f64).exp();
            let approx = rational_to_f64(&e);
            assert!(
                (approx - truth).abs() / truth < 1e-12,
                "exp({n}/{d}): {approx} vs {truth}"
            );
        }
    }

    #[test]
    fn strictly_below_e_to_x() {
        // e^1 = 2.718281828...; the lower bound must stay below it.
        let e = exp_lower(&q(1, 1));
        assert!(e < q(27182818284590453, 10000000000000000));
        assert!(e > q(27182818284590449, 10000000000000000));
    }

    #[test]
    fn power_is_exact() {
        let b = q(3, 2);
        assert_eq!(pow(&b, 5), q(243, 32));
        assert_eq!(pow(&b, 0), q(1, 1));
    }
}
