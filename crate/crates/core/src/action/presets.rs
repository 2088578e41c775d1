//! Reference actions used throughout the tests and by the command line.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{ActionSpec, LaurentPolynomial, PrimeComponent};
use crate::algebra::{parse_rational, IntPolynomial};
use crate::error::Result;
use crate::field::{build_field, FieldDatum};

/// Action on a solenoid dual to `Z[S^-1]` by multiplication by the given
/// rationals, e.g. `["2", "3"]` for `×2,×3`.
pub fn rational_action(xi: &[&str]) -> Result<ActionSpec> {
    let k = FieldDatum::rationals();
    let xs = xi
        .iter()
        .map(|s| Ok(k.from_rational(parse_rational(s)?)))
        .collect::<Result<Vec<_>>>()?;
    ActionSpec::single(PrimeComponent::char0(k, xs)?)
}

/// `×2,×3` on the 6-adic solenoid.
pub fn times_two_three() -> ActionSpec {
    rational_action(&["2", "3"]).expect("valid preset")
}

/// `×2` on the 2-adic solenoid, d = 1.
pub fn times_two() -> ActionSpec {
    rational_action(&["2"]).expect("valid preset")
}

/// `K = Q(θ)`, `θ^2 = θ + 1`, `ξ = (θ, 2)`.
pub fn golden_two() -> ActionSpec {
    let k = build_field(&IntPolynomial::from_i64(&[-1, -1, 1])).expect("irreducible");
    let xi = vec![k.theta(), k.from_int(2)];
    ActionSpec::single(PrimeComponent::char0(k, xi).expect("nonzero")).expect("valid preset")
}

/// The module `R_2 / <u_1 - 2, u_1^k u_2 - 3>`, i.e. `ξ = (2, 3 / 2^k)`.
pub fn sheared_two_three(k: u32) -> ActionSpec {
    let second = BigRational::new(BigInt::from(3), BigInt::from(2).pow(k));
    let kq = FieldDatum::rationals();
    let xi = vec![kq.from_int(2), kq.from_rational(second)];
    ActionSpec::single(PrimeComponent::char0(kq, xi).expect("nonzero")).expect("valid preset")
}

/// Ledrappier's example: `F_2[u_1^±, u_2^±] / <1 + u_1 + u_2>`.
pub fn ledrappier() -> ActionSpec {
    let g = LaurentPolynomial::new(2, 2, [(vec![0, 0], 1), (vec![1, 0], 1), (vec![0, 1], 1)]).expect("valid");
    ActionSpec::single(PrimeComponent::charp(2, 2, vec![g]).expect("valid")).expect("valid preset")
}
