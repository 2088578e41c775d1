//! Exact arithmetic: rationals, univariate polynomials over Z and Q,
//! resultants, prime fields, and certified complex balls.

pub mod fp;
pub mod numeric;
pub mod poly;
pub mod resultant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub use num_rational::BigRational;
pub use fp::{fq_rank, FpPoly, FqMatrix};
pub use poly::{IntPolynomial, RatPolynomial};
pub use resultant::{discriminant, resultant, resultant_int};

use crate::error::{Error, Result};

/// Exponent of `p` in a nonzero integer.
pub fn ord_p_int(x: &BigInt, p: u64) -> u64 {
    debug_assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        x = q;
        k += 1;
    }
}

/// Exact p-adic order of a nonzero rational.
pub fn ord_p(x: &BigRational, p: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::InfiniteValuation);
    }
    if !fp::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    Ok(ord_p_int(x.numer(), p) as i64 - ord_p_int(x.denom(), p) as i64)
}

/// Distinct prime factors of a nonzero integer by trial division.
/// Desk-scale inputs only; gives up above `limit` with a resource error.
pub fn prime_factors(x: &BigInt, limit: u64) -> Result<Vec<u64>> {
    let mut x = x.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= x {
        if d > limit {
            return Err(Error::Resource(format!(
                "trial division beyond {limit} while factoring {x}"
            )));
        }
        let bd = BigInt::from(d);
        if (&x % &bd).is_zero() {
            out.push(d);
            while (&x % &bd).is_zero() {
                x /= &bd;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if x > BigInt::from(1) {
        let last: u64 = num_traits::ToPrimitive::to_u64(&x).ok_or_else(|| {
            Error::Resource(format!("prime factor {x} exceeds 64 bits"))
        })?;
        out.push(last);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Parses `"a"` or `"a/b"` into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}
