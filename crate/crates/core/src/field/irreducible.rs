//! Irreducibility over Q for monic integer polynomials of small degree.
//!
//! Factor-degree patterns modulo a few good primes often prove irreducibility
//! outright. Otherwise every candidate monic factor is the product of some
//! subset of the complex roots, so rounding the coefficients of each subset
//! product and trial-dividing decides the question.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use crate::algebra::fp::{is_prime, FpPoly};
use crate::algebra::numeric::{certified_roots, DEFAULT_PREC};
use crate::algebra::IntPolynomial;
use crate::error::{Error, Result};

const PATTERN_PRIMES: usize = 5;

pub(super) fn check_irreducible(f: &IntPolynomial) -> Result<()> {
    let n = f.degree().unwrap_or(0);
    if n <= 1 {
        return Ok(());
    }
    let rf = f.to_rational();
    let g = rf.gcd(&rf.derivative());
    if g.degree().unwrap_or(0) > 0 {
        return Err(Error::Reducible { witness: g.to_primitive_int().to_string() });
    }
    if f.coeff(0).is_zero() {
        return Err(Error::Reducible { witness: "t".into() });
    }

    // possible degrees of a proper rational factor
    let mut allowed: Vec<bool> = (0..=n).map(|d| d > 0 && d < n).collect();
    let disc = crate::algebra::discriminant(f)?;
    let mut used = 0;
    let mut p = 2u64;
    while used < PATTERN_PRIMES && allowed.iter().any(|&a| a) {
        if is_prime(p) && !(&disc % BigInt::from(p)).is_zero() {
            let degrees: Vec<usize> = FpPoly::from_int(f, p)
                .factor()
                .iter()
                .flat_map(|(g, m)| std::iter::repeat_n(g.degree().unwrap(), *m))
                .collect();
            let mut sums = vec![false; n + 1];
            sums[0] = true;
            for d in degrees {
                for s in (d..=n).rev() {
                    if sums[s - d] {
                        sums[s] = true;
                    }
                }
            }
            for (a, s) in allowed.iter_mut().zip(&sums) {
                *a &= *s;
            }
            used += 1;
        }
        p += 1;
    }
    if !allowed.iter().any(|&a| a) {
        return Ok(());
    }

    let roots: Vec<Complex64> = certified_roots(f, DEFAULT_PREC)?
        .iter()
        .map(|r| r.ball.to_c64())
        .collect();
    for k in 1..=n / 2 {
        if !allowed[k] && !allowed[n - k] {
            continue;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            if let Some(g) = rounded_product(&idx.iter().map(|&i| roots[i]).collect::<Vec<_>>()) {
                if f.div_exact(&g).is_some() {
                    return Err(Error::Reducible { witness: g.to_string() });
                }
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    Ok(())
}

fn rounded_product(roots: &[Complex64]) -> Option<IntPolynomial> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        c = next;
    }
    let mut out = Vec::with_capacity(c.len());
    for z in c {
        let tol = 1e-6 * z.norm().max(1.0);
        let k = z.re.round();
        if z.im.abs() > tol || (z.re - k).abs() > tol || k.abs() > 1e15 {
            return None;
        }
        out.push(BigInt::from(k as i64));
    }
    Some(IntPolynomial::new(out))
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn irreducible_examples() {
        for c in [
            &[-1, -1, 1][..],
            &[-2, 0, 0, 1],
            &[1, 1, 1, 1, 1],
            // x^4 + 1 is reducible mod every prime but irreducible over Q
            &[1, 0, 0, 0, 1],
            // Lehmer's polynomial
            &[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1],
        ] {
            assert!(check_irreducible(&ip(c)).is_ok(), "{c:?}");
        }
    }

    #[test]
    fn reducible_examples() {
        for c in [
            &[-1, 0, 1][..],
            // (t^2 + 1)(t^2 - 2)
            &[-2, 0, -1, 0, 1],
            // (t^2 + t + 1)(t^2 - t - 1)
            &[-1, -2, -1, 0, 1],
            &[0, 3, 1],
        ] {
            assert!(matches!(check_irreducible(&ip(c)), Err(Error::Reducible { .. })), "{c:?}");
        }
    }

    #[test]
    fn repeated_factor() {
        assert!(matches!(check_irreducible(&ip(&[1, 2, 1])), Err(Error::Reducible { .. })));
    }
}
