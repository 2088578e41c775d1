//! Resultants by the subresultant pseudo-remainder sequence.
//!
//! All arithmetic stays in Z[x]; every division in the sequence is exact, so
//! coefficients grow only polynomially.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{IntPolynomial, RatPolynomial};
use crate::error::{Error, Result};

/// `Res(a, b)` for integer polynomials.
pub fn resultant_int(a: &IntPolynomial, b: &IntPolynomial) -> Result<BigInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::InvalidInput(
            "resultant of two zero polynomials".into(),
        ));
    }
    if a.is_zero() || b.is_zero() {
        // Res(0, c) = 1 when c is a nonzero constant, 0 otherwise.
        let other = if a.is_zero() { b } else { a };
        return Ok(if other.degree() == Some(0) {
            BigInt::one()
        } else {
            BigInt::zero()
        });
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut sign = BigInt::one();
    let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
    if da < db {
        std::mem::swap(&mut a, &mut b);
        if da % 2 == 1 && db % 2 == 1 {
            sign = -sign;
        }
    }
    let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
    if db == 0 {
        return Ok(sign * num_traits::pow(b.leading_coeff(), da));
    }

    let ca = a.content();
    let cb = b.content();
    a = IntPolynomial::new(a.coeffs().iter().map(|c| c / &ca).collect());
    b = IntPolynomial::new(b.coeffs().iter().map(|c| c / &cb).collect());
    let t = num_traits::pow(ca, db) * num_traits::pow(cb, da);

    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            sign = -sign;
        }
        let r = a.pseudo_rem(&b);
        if r.is_zero() {
            return Ok(BigInt::zero());
        }
        a = b;
        let divisor = &g * num_traits::pow(h.clone(), delta);
        b = IntPolynomial::new(r.coeffs().iter().map(|c| c / &divisor).collect());
        g = a.leading_coeff();
        // h <- h^(1 - delta) * g^delta, an exact quotient
        h = if delta == 0 {
            h
        } else {
            num_traits::pow(g.clone(), delta) / num_traits::pow(h, delta - 1)
        };
        if b.degree() == Some(0) {
            let da = a.degree().unwrap();
            let lb = b.leading_coeff();
            let hh = num_traits::pow(lb, da) / num_traits::pow(h, da - 1);
            return Ok(sign * t * hh);
        }
    }
}

/// `Res(f, g)` for rational polynomials, reduced to the integer case by
/// clearing denominators: `Res(f/c, g/d) = Res(f, g) / (c^deg g * d^deg f)`.
pub fn resultant(f: &RatPolynomial, g: &RatPolynomial) -> Result<BigRational> {
    let (fi, fd) = f.to_integer_parts();
    let (gi, gd) = g.to_integer_parts();
    let r = resultant_int(&fi, &gi)?;
    let df = fi.degree().unwrap_or(0);
    let dg = gi.degree().unwrap_or(0);
    let den = num_traits::pow(fd, dg) * num_traits::pow(gd, df);
    Ok(BigRational::new(r, den))
}

/// Discriminant of a monic (or general) integer polynomial,
/// `(-1)^(n(n-1)/2) Res(f, f') / lc(f)`.
pub fn discriminant(f: &IntPolynomial) -> Result<BigInt> {
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return Ok(BigInt::one());
    }
    let r = resultant_int(f, &f.derivative())?;
    let s = if (n * (n - 1) / 2).is_multiple_of(2) { r } else { -r };
    Ok(s / f.leading_coeff())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn rp(c: &[(i64, i64)]) -> RatPolynomial {
        RatPolynomial::new(
            c.iter()
                .map(|&(n, d)| BigRational::new(n.into(), d.into()))
                .collect(),
        )
    }

    fn ip(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    /// Independent oracle: Sylvester determinant by rational Gaussian elimination.
    fn sylvester(a: &IntPolynomial, b: &IntPolynomial) -> BigInt {
        let m = a.degree().unwrap();
        let n = b.degree().unwrap();
        let size = m + n;
        if size == 0 {
            return BigInt::one();
        }
        let mut mat = vec![vec![BigRational::zero(); size]; size];
        for row in 0..n {
            for (i, c) in a.coeffs().iter().rev().enumerate() {
                mat[row][row + i] = BigRational::from_integer(c.clone());
            }
        }
        for row in 0..m {
            for (i, c) in b.coeffs().iter().rev().enumerate() {
                mat[n + row][row + i] = BigRational::from_integer(c.clone());
            }
        }
        let mut det = BigRational::one();
        for col in 0..size {
            let Some(piv) = (col..size).find(|&r| !mat[r][col].is_zero()) else {
                return BigInt::zero();
            };
            if piv != col {
                mat.swap(piv, col);
                det = -det;
            }
            let p = mat[col][col].clone();
            det *= &p;
            for r in col + 1..size {
                let factor = &mat[r][col] / &p;
                if factor.is_zero() {
                    continue;
                }
                for c in col..size {
                    let v = &mat[col][c] * &factor;
                    mat[r][c] -= v;
                }
            }
        }
        det.to_integer()
    }

    #[test]
    fn linear_factors() {
        let r = resultant(&rp(&[(-2, 1), (1, 1)]), &rp(&[(-3, 1), (1, 1)])).unwrap();
        assert_eq!(r, BigRational::from_integer((-1).into()));
    }

    #[test]
    fn golden_and_linear() {
        let r = resultant(&rp(&[(-1, 1), (-1, 1), (1, 1)]), &rp(&[(-1, 1), (2, 1)])).unwrap();
        assert_eq!(r, BigRational::from_integer((-5).into()));
    }

    #[test]
    fn constant_term() {
        let r = resultant(&rp(&[(1, 1), (0, 1), (1, 1)]), &rp(&[(0, 1), (1, 1)])).unwrap();
        assert_eq!(r, BigRational::from_integer(1.into()));
    }

    #[test]
    fn both_zero_is_error() {
        assert!(resultant(&RatPolynomial::zero(), &RatPolynomial::zero()).is_err());
    }

    #[test]
    fn rational_coefficients() {
        // Res(t^2 - 1/4, t - 1/2) = (1/2)^2 - 1/4 = 0
        let r = resultant(&rp(&[(-1, 4), (0, 1), (1, 1)]), &rp(&[(-1, 2), (1, 1)])).unwrap();
        assert!(r.is_zero());
        // Res(t - 1/3, 2t - 1) = -(2*(1/3) - 1)·(-1)... direct: lc(f)^1 * g(1/3) = 2/3 - 1
        let r = resultant(&rp(&[(-1, 3), (1, 1)]), &rp(&[(-1, 1), (2, 1)])).unwrap();
        assert_eq!(r, BigRational::new((-1).into(), 3.into()));
    }

    #[test]
    fn discriminants() {
        assert_eq!(discriminant(&ip(&[-1, -1, 1])).unwrap(), BigInt::from(5));
        assert_eq!(discriminant(&ip(&[1, 0, 1])).unwrap(), BigInt::from(-4));
        // x^3 - 2: -27 * 4 = -108
        assert_eq!(discriminant(&ip(&[-2, 0, 0, 1])).unwrap(), BigInt::from(-108));
    }

    fn small_poly() -> impl Strategy<Value = IntPolynomial> {
        (prop::collection::vec(-6i64..=6, 1..6), 1i64..=4).prop_map(|(mut c, lc)| {
            c.push(lc);
            ip(&c)
        })
    }

    proptest! {
        #[test]
        fn matches_sylvester_determinant(a in small_poly(), b in small_poly()) {
            prop_assert_eq!(resultant_int(&a, &b).unwrap(), sylvester(&a, &b));
        }

        #[test]
        fn swap_sign(a in small_poly(), b in small_poly()) {
            let da = a.degree().unwrap();
            let db = b.degree().unwrap();
            let ab = resultant_int(&a, &b).unwrap();
            let ba = resultant_int(&b, &a).unwrap();
            if (da * db) % 2 == 0 {
                prop_assert_eq!(ab, ba);
            } else {
                prop_assert_eq!(ab, -ba);
            }
        }
    }
}
