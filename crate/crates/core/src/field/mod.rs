//! Number fields `K = Q(θ)` given by a monic irreducible integer polynomial,
//! with exact element arithmetic, norms, places and normalized absolute values.
//!
//! Absolute values use the normalization under which the product formula
//! `prod_v |x|_v = 1` holds: `|σx|` at a real embedding, `|σx|^2` at a complex
//! one, and `N(P)^(-ord_P x)` at a prime ideal `P`.

mod element;
mod irreducible;
mod place;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::numeric::{self, Ball, RootBall, DEFAULT_PREC};
use crate::algebra::{discriminant, resultant, IntPolynomial};
use crate::error::{Error, Result};

pub use element::FieldElement;
pub use place::{finite_places_above, AbsValue, LogAbsValue, Place, PlaceKind};

/// Fields above this degree are rejected unless the caller raises the cap.
pub const DEFAULT_MAX_DEGREE: usize = 8;

#[derive(Clone, Debug)]
pub struct FieldOptions {
    pub max_degree: usize,
    pub prec: u32,
}

impl Default for FieldOptions {
    fn default() -> Self {
        Self { max_degree: DEFAULT_MAX_DEGREE, prec: DEFAULT_PREC }
    }
}

/// One embedding `K -> C`; complex embeddings are listed once per conjugate pair.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub root: Ball,
    pub is_real: bool,
    /// Position of this root in the full certified root list.
    root_index: usize,
}

/// A number field `Q(θ)` with `θ` a root of `min_poly`.
#[derive(Clone, Debug)]
pub struct FieldDatum {
    min_poly: IntPolynomial,
    disc: BigInt,
    embeddings: Vec<Embedding>,
    all_roots: Vec<Ball>,
    refined: Arc<Mutex<HashMap<u32, Arc<Vec<Ball>>>>>,
}

impl PartialEq for FieldDatum {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly
    }
}

/// Validates `min_poly` and builds the field with default options.
pub fn build_field(min_poly: &IntPolynomial) -> Result<FieldDatum> {
    FieldDatum::new(min_poly, &FieldOptions::default())
}

impl FieldDatum {
    pub fn new(min_poly: &IntPolynomial, opts: &FieldOptions) -> Result<Self> {
        let n = min_poly
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::InvalidInput("minimal polynomial must have degree >= 1".into()))?;
        if !min_poly.is_monic() {
            return Err(Error::NotMonic(min_poly.to_string()));
        }
        if n > opts.max_degree {
            return Err(Error::InvalidInput(format!(
                "field degree {n} exceeds the cap of {}",
                opts.max_degree
            )));
        }
        irreducible::check_irreducible(min_poly)?;
        let disc = discriminant(min_poly)?;
        let roots = numeric::certified_roots(min_poly, opts.prec)?;
        let indexed = |keep: &dyn Fn(&RootBall) -> bool| -> Vec<(usize, RootBall)> {
            let mut v: Vec<(usize, RootBall)> =
                roots.iter().cloned().enumerate().filter(|(_, r)| keep(r)).collect();
            v.sort_by(|a, b| numeric::cmp_c64(a.1.ball.to_c64(), b.1.ball.to_c64()));
            v
        };
        let real = indexed(&|r| r.is_real);
        let cplx = indexed(&|r| !r.is_real && r.ball.im_f64() > 0.0);
        if real.len() + 2 * cplx.len() != n {
            return Err(Error::Internal(format!(
                "signature mismatch for {min_poly}: {} real, {} complex pairs",
                real.len(),
                cplx.len()
            )));
        }
        let embeddings = real
            .into_iter()
            .chain(cplx)
            .map(|(i, r)| Embedding { root: r.ball, is_real: r.is_real, root_index: i })
            .collect();
        Ok(Self {
            min_poly: min_poly.clone(),
            disc,
            embeddings,
            all_roots: roots.into_iter().map(|r| r.ball).collect(),
            refined: Arc::default(),
        })
    }

    /// `Q` presented as `Q(θ)` with `θ = 0`.
    pub fn rationals() -> Self {
        build_field(&IntPolynomial::from_i64(&[0, 1])).expect("t is irreducible")
    }

    pub fn min_poly(&self) -> &IntPolynomial {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.min_poly.degree().unwrap()
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    pub fn embeddings(&self) -> &[Embedding] {
        &self.embeddings
    }

    /// Number of real embeddings and of conjugate pairs.
    pub fn signature(&self) -> (usize, usize) {
        let r = self.embeddings.iter().filter(|e| e.is_real).count();
        (r, self.embeddings.len() - r)
    }

    /// Root enclosure for embedding `idx` at (at least) `prec` bits.
    pub fn embedding_root(&self, idx: usize, prec: u32) -> Result<Ball> {
        let e = &self.embeddings[idx];
        if prec <= e.root.prec() {
            return Ok(e.root.clone());
        }
        // cache by 64-bit steps
        let prec = prec.div_ceil(64) * 64;
        let roots = {
            let mut cache = self.refined.lock().unwrap();
            match cache.get(&prec) {
                Some(r) => r.clone(),
                None => {
                    let r = Arc::new(numeric::refine_roots(&self.min_poly, &self.all_roots, prec)?);
                    cache.insert(prec, r.clone());
                    r
                }
            }
        };
        let b = &roots[e.root_index];
        Ok(if e.is_real { b.realify() } else { b.clone() })
    }

    // ----- elements -----

    pub fn zero(&self) -> FieldElement {
        FieldElement::from_coords(vec![BigRational::zero(); self.degree()])
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, q: BigRational) -> FieldElement {
        let mut c = vec![BigRational::zero(); self.degree()];
        c[0] = q;
        FieldElement::from_coords(c)
    }

    pub fn from_int(&self, k: i64) -> FieldElement {
        self.from_rational(BigRational::from_integer(k.into()))
    }

    /// The generator `θ`.
    pub fn theta(&self) -> FieldElement {
        if self.degree() == 1 {
            return self.from_rational(BigRational::from_integer(-self.min_poly.coeff(0)));
        }
        let mut c = vec![BigRational::zero(); self.degree()];
        c[1] = BigRational::one();
        FieldElement::from_coords(c)
    }

    /// Checks the coordinate count.
    pub fn element(&self, coords: Vec<BigRational>) -> Result<FieldElement> {
        if coords.len() != self.degree() {
            return Err(Error::InvalidInput(format!(
                "expected {} power-basis coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        Ok(FieldElement::from_coords(coords))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement::from_coords(
            a.coords().iter().zip(b.coords()).map(|(x, y)| x + y).collect(),
        )
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement::from_coords(
            a.coords().iter().zip(b.coords()).map(|(x, y)| x - y).collect(),
        )
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let n = self.degree();
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (i, x) in a.coords().iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords().iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        // reduce with θ^n = -sum_{k<n} m_k θ^k
        let m: Vec<BigRational> = self
            .min_poly
            .coeffs()
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        for k in (n..2 * n - 1).rev() {
            let top = std::mem::replace(&mut prod[k], BigRational::zero());
            if top.is_zero() {
                continue;
            }
            for j in 0..n {
                prod[k - n + j] -= &top * &m[j];
            }
        }
        prod.truncate(n);
        FieldElement::from_coords(prod)
    }

    /// Exact inverse by solving `M_x y = 1`, where `M_x` is the matrix of
    /// multiplication by `x` (its determinant is `N(x)`).
    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::InvalidInput("inverse of zero".into()));
        }
        let n = self.degree();
        if n == 1 {
            return Ok(self.from_rational(BigRational::one() / &x.coords()[0]));
        }
        // columns: x * θ^j
        let mut cols = Vec::with_capacity(n);
        let mut basis = self.one();
        let theta = self.theta();
        for _ in 0..n {
            cols.push(self.mul(x, &basis));
            basis = self.mul(&basis, &theta);
        }
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                let mut row: Vec<BigRational> = (0..n).map(|c| cols[c].coords()[r].clone()).collect();
                row.push(if r == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        for c in 0..n {
            let piv = (c..n)
                .find(|&r| !a[r][c].is_zero())
                .ok_or_else(|| Error::Internal("singular multiplication matrix".into()))?;
            a.swap(c, piv);
            let p = a[c][c].clone();
            for k in c..=n {
                a[c][k] = &a[c][k] / &p;
            }
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for k in c..=n {
                        let v = &a[c][k] * &f;
                        a[r][k] -= v;
                    }
                }
            }
        }
        Ok(FieldElement::from_coords(a.into_iter().map(|row| row[n].clone()).collect()))
    }

    pub fn pow(&self, x: &FieldElement, e: i64) -> Result<FieldElement> {
        let base = if e < 0 { self.inv(x)? } else { x.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        Ok(acc)
    }

    /// `prod_i xs[i]^n[i]`.
    pub fn multi_pow(&self, xs: &[FieldElement], n: &[i64]) -> Result<FieldElement> {
        let mut acc = self.one();
        for (x, &k) in xs.iter().zip(n) {
            if k != 0 {
                acc = self.mul(&acc, &self.pow(x, k)?);
            }
        }
        Ok(acc)
    }

    /// `N_{K/Q}(x)` as the resultant of the minimal polynomial and the
    /// coordinate polynomial of `x`.
    pub fn norm(&self, x: &FieldElement) -> Result<BigRational> {
        if x.is_zero() {
            return Err(Error::InvalidInput("norm of zero".into()));
        }
        resultant(&self.min_poly.to_rational(), &x.as_polynomial())
    }

    /// `σ_idx(x)` as a ball at `prec` bits.
    pub fn embed(&self, x: &FieldElement, idx: usize, prec: u32) -> Result<Ball> {
        let root = self.embedding_root(idx, prec)?;
        Ok(numeric::eval_rat_coeffs(x.coords(), &root.set_prec(prec.max(root.prec()))))
    }
}

impl fmt::Display for FieldDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "Q")
        } else {
            write!(f, "Q(t)/({})", self.min_poly)
        }
    }
}

/// Norm of an element (free-function form).
pub fn norm(k: &FieldDatum, x: &FieldElement) -> Result<BigRational> {
    k.norm(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn golden() -> FieldDatum {
        build_field(&IntPolynomial::from_i64(&[-1, -1, 1])).unwrap()
    }

    #[test]
    fn build_examples() {
        let k = build_field(&IntPolynomial::from_i64(&[0, 1])).unwrap();
        assert_eq!(k.degree(), 1);
        assert!(k.is_rational());

        let g = golden();
        assert_eq!(g.signature(), (2, 0));
        let r: Vec<f64> = g.embeddings().iter().map(|e| e.root.re_f64()).collect();
        assert!((r[0] + 0.6180339887498949).abs() < 1e-15);
        assert!((r[1] - 1.618033988749895).abs() < 1e-15);

        match build_field(&IntPolynomial::from_i64(&[-1, 0, 1])) {
            Err(Error::Reducible { .. }) => {}
            other => panic!("expected reducible, got {other:?}"),
        }
        assert!(matches!(
            build_field(&IntPolynomial::from_i64(&[1, 2])),
            Err(Error::NotMonic(_))
        ));
    }

    #[test]
    fn complex_signature() {
        let k = build_field(&IntPolynomial::from_i64(&[-2, 0, 0, 1])).unwrap();
        assert_eq!(k.signature(), (1, 1));
        let k = build_field(&IntPolynomial::from_i64(&[1, 1, 1, 1, 1])).unwrap();
        assert_eq!(k.signature(), (0, 2));
    }

    #[test]
    fn norms() {
        let k = FieldDatum::rationals();
        assert_eq!(k.norm(&k.from_rational(q(5, 32))).unwrap(), q(5, 32));

        let g = golden();
        let x = g.element(vec![q(-1, 1), q(2, 1)]).unwrap();
        assert_eq!(g.norm(&x).unwrap(), q(-5, 1));
        assert_eq!(g.norm(&g.theta()).unwrap(), q(-1, 1));
        assert!(g.norm(&g.zero()).is_err());
    }

    #[test]
    fn arithmetic_in_golden_field() {
        let g = golden();
        let t = g.theta();
        // θ^2 = θ + 1
        assert_eq!(g.mul(&t, &t), g.add(&t, &g.one()));
        // θ^-1 = θ - 1
        assert_eq!(g.inv(&t).unwrap(), g.sub(&t, &g.one()));
        let x = g.element(vec![q(3, 7), q(-2, 5)]).unwrap();
        let y = g.inv(&x).unwrap();
        assert_eq!(g.mul(&x, &y), g.one());
        assert_eq!(g.pow(&t, -3).unwrap(), g.inv(&g.pow(&t, 3).unwrap()).unwrap());
    }

    #[test]
    fn embedding_of_theta() {
        let g = golden();
        let b = g.embed(&g.theta(), 1, 128).unwrap();
        assert!((b.re_f64() - 1.6180339887).abs() < 1e-9);
        let b = g.embed(&g.theta(), 1, 512).unwrap();
        assert!(b.radius() < 1e-140);
    }
}
