use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{FieldDatum, FieldElement};
use crate::algebra::fp::{is_prime, FpPoly};
use crate::algebra::numeric::{ln_abs_rational, DEFAULT_PREC, MAX_PREC};
use crate::algebra::{ord_p, IntPolynomial};
use crate::error::{Error, Result};

/// Relative accuracy demanded of archimedean logarithms before precision stops
/// being raised.
const LOG_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub enum PlaceKind {
    Archimedean {
        embedding: usize,
        real: bool,
    },
    Finite {
        p: u64,
        residue_degree: u32,
        ramification: u32,
        /// `g` in the two-element form `(p, g(θ))` of the prime ideal.
        generator: IntPolynomial,
        /// Whether this is the only prime above `p`.
        unique: bool,
        /// An element of valuation -1 here and >= 0 at the other primes above `p`.
        anti_uniformizer: Option<FieldElement>,
    },
}

/// A place of a number field.
#[derive(Clone, Debug, PartialEq)]
pub struct Place {
    kind: PlaceKind,
}

impl Place {
    pub fn archimedean(embedding: usize, real: bool) -> Self {
        Self { kind: PlaceKind::Archimedean { embedding, real } }
    }

    pub fn kind(&self) -> &PlaceKind {
        &self.kind
    }

    pub fn is_archimedean(&self) -> bool {
        matches!(self.kind, PlaceKind::Archimedean { .. })
    }

    /// Local degree weight: 1 for real, 2 for complex, `e*f` for finite places.
    pub fn local_degree(&self) -> u32 {
        match &self.kind {
            PlaceKind::Archimedean { real, .. } => {
                if *real {
                    1
                } else {
                    2
                }
            }
            PlaceKind::Finite { residue_degree, ramification, .. } => residue_degree * ramification,
        }
    }

    /// Residue characteristic for finite places.
    pub fn prime(&self) -> Option<u64> {
        match &self.kind {
            PlaceKind::Finite { p, .. } => Some(*p),
            _ => None,
        }
    }

    pub fn residue_degree(&self) -> Option<u32> {
        match &self.kind {
            PlaceKind::Finite { residue_degree, .. } => Some(*residue_degree),
            _ => None,
        }
    }

    pub fn ramification(&self) -> Option<u32> {
        match &self.kind {
            PlaceKind::Finite { ramification, .. } => Some(*ramification),
            _ => None,
        }
    }

    /// Short stable label, e.g. `inf0`, `cinf2`, `v2`, `v7[t + 3]`.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PlaceKind::Archimedean { embedding, real: true } => write!(f, "inf{embedding}"),
            PlaceKind::Archimedean { embedding, real: false } => write!(f, "cinf{embedding}"),
            PlaceKind::Finite { p, unique: true, .. } => write!(f, "v{p}"),
            PlaceKind::Finite { p, generator, .. } => write!(f, "v{p}[{generator}]"),
        }
    }
}

/// `|x|_v`. Finite places carry the exact rational value.
#[derive(Clone, Debug, PartialEq)]
pub struct AbsValue {
    pub value: f64,
    pub error: f64,
    pub exact: Option<BigRational>,
}

/// `log |x|_v`. At a finite place this is exactly `log_p_coeff * ln p`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogAbsValue {
    pub value: f64,
    pub error: f64,
    pub log_p_coeff: Option<(u64, i64)>,
}

/// Places above `p` by Dedekind factorization of the minimal polynomial.
///
/// Only primes at which `Z[θ]` is p-maximal are supported: when `p^2` divides
/// the polynomial discriminant, Dedekind's criterion must confirm maximality,
/// otherwise the prime is rejected.
pub fn finite_places_above(k: &FieldDatum, p: u64) -> Result<Vec<Place>> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let f = k.min_poly();
    if k.is_rational() {
        return Ok(vec![Place {
            kind: PlaceKind::Finite {
                p,
                residue_degree: 1,
                ramification: 1,
                generator: IntPolynomial::from_i64(&[0, 1]),
                unique: true,
                anti_uniformizer: None,
            },
        }]);
    }
    let fbar = FpPoly::from_int(f, p);
    let factors = fbar.factor();
    let p2 = BigInt::from(p) * BigInt::from(p);
    if (k.discriminant() % &p2).is_zero() {
        check_p_maximal(f, &fbar, &factors, p)?;
    }
    let unique = factors.len() == 1;
    let pq = BigRational::from_integer(BigInt::from(p));
    factors
        .iter()
        .map(|(g, e)| {
            let anti = if unique {
                None
            } else {
                let h = fbar.div_rem(g).0.lift();
                let coords: Vec<BigRational> = (0..k.degree())
                    .map(|i| BigRational::from_integer(h.coeff(i)) / &pq)
                    .collect();
                Some(k.element(coords)?)
            };
            Ok(Place {
                kind: PlaceKind::Finite {
                    p,
                    residue_degree: g.degree().unwrap() as u32,
                    ramification: *e as u32,
                    generator: g.lift(),
                    unique,
                    anti_uniformizer: anti,
                },
            })
        })
        .collect()
}

fn check_p_maximal(f: &IntPolynomial, fbar: &FpPoly, factors: &[(FpPoly, usize)], p: u64) -> Result<()> {
    let radical = factors
        .iter()
        .fold(FpPoly::one(p), |acc, (g, _)| acc.mul(g));
    let cofactor = fbar.div_rem(&radical).0;
    let g = radical.lift();
    let h = cofactor.lift();
    let diff = f - &(&g * &h);
    let big_f = diff
        .div_exact(&IntPolynomial::constant(BigInt::from(p)))
        .ok_or_else(|| Error::Internal("Dedekind lift is not divisible by p".into()))?;
    let z = FpPoly::from_int(&big_f, p).gcd(&radical).gcd(&cofactor);
    if z.degree().unwrap_or(0) > 0 {
        return Err(Error::UnsupportedPrime {
            p,
            reason: "Z[θ] is not p-maximal (Dedekind criterion fails)".into(),
        });
    }
    Ok(())
}

fn is_p_integral(x: &FieldElement, p: u64) -> bool {
    let bp = BigInt::from(p);
    x.coords().iter().all(|c| !(c.denom() % &bp).is_zero())
}

impl FieldDatum {
    /// Exact valuation of `x` at a finite place, normalized so that a
    /// uniformizer has valuation 1.
    pub fn ord_v(&self, place: &Place, x: &FieldElement) -> Result<i64> {
        if x.is_zero() {
            return Err(Error::InfiniteValuation);
        }
        let PlaceKind::Finite { p, residue_degree, ramification, unique, anti_uniformizer, .. } =
            &place.kind
        else {
            return Err(Error::InvalidInput("ord_v needs a finite place".into()));
        };
        let p = *p;
        if self.is_rational() {
            return ord_p(&x.coords()[0], p);
        }
        if *unique {
            let v = ord_p(&self.norm(x)?, p)?;
            let f = *residue_degree as i64;
            if v % f != 0 {
                return Err(Error::Internal(format!(
                    "ord_p(N(x)) = {v} not divisible by residue degree {f}"
                )));
            }
            return Ok(v / f);
        }
        let gamma = anti_uniformizer
            .as_ref()
            .ok_or_else(|| Error::Internal("missing anti-uniformizer".into()))?;
        // scale into the local ring: y = p^s x has p-integral coordinates
        let s = x
            .coords()
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| -ord_p(c, p).unwrap())
            .max()
            .unwrap_or(0)
            .max(0);
        let scale = BigRational::from_integer(num_traits::pow(BigInt::from(p), s as usize));
        let y = self.mul(x, &self.from_rational(scale));
        let bound = ord_p(&self.norm(&y)?, p)? / *residue_degree as i64;
        let mut k = 0;
        let mut z = y;
        while k < bound {
            z = self.mul(&z, gamma);
            if !is_p_integral(&z, p) {
                break;
            }
            k += 1;
        }
        Ok(k - s * *ramification as i64)
    }

    /// Normalized absolute value `|x|_v`.
    pub fn abs_v(&self, place: &Place, x: &FieldElement) -> Result<AbsValue> {
        match &place.kind {
            PlaceKind::Finite { p, residue_degree, .. } => {
                let ord = self.ord_v(place, x)?;
                let e = -ord * *residue_degree as i64;
                let base = BigRational::from_integer(BigInt::from(*p));
                let exact = if e >= 0 {
                    num_traits::pow(base, e as usize)
                } else {
                    BigRational::one() / num_traits::pow(base, (-e) as usize)
                };
                let value = (e as f64 * (*p as f64).ln()).exp();
                Ok(AbsValue { value, error: value * 1e-15, exact: Some(exact) })
            }
            PlaceKind::Archimedean { .. } => {
                let l = self.log_abs_v(place, x)?;
                let value = l.value.exp();
                Ok(AbsValue { value, error: value * (l.error.exp() - 1.0), exact: None })
            }
        }
    }

    /// `log |x|_v` with a certified error bound at archimedean places.
    pub fn log_abs_v(&self, place: &Place, x: &FieldElement) -> Result<LogAbsValue> {
        if x.is_zero() {
            return Err(Error::InvalidInput("absolute value of zero has no logarithm".into()));
        }
        match &place.kind {
            PlaceKind::Finite { p, residue_degree, .. } => {
                let c = -self.ord_v(place, x)? * *residue_degree as i64;
                Ok(LogAbsValue {
                    value: c as f64 * (*p as f64).ln(),
                    error: 0.0,
                    log_p_coeff: Some((*p, c)),
                })
            }
            PlaceKind::Archimedean { embedding, real } => {
                let w = if *real { 1.0 } else { 2.0 };
                if let Some(q) = x.as_rational() {
                    let v = ln_abs_rational(q);
                    return Ok(LogAbsValue { value: w * v, error: w * 1e-15 * v.abs().max(1.0), log_p_coeff: None });
                }
                let mut prec = DEFAULT_PREC;
                loop {
                    let b = self.embed(x, *embedding, prec)?;
                    if let Some((v, e)) = b.ln_abs() {
                        if e <= LOG_TOL * v.abs().max(1.0) || prec >= MAX_PREC {
                            return Ok(LogAbsValue { value: w * v, error: w * e, log_p_coeff: None });
                        }
                    } else if prec >= MAX_PREC {
                        return Err(Error::Internal(format!(
                            "cannot separate σ_{embedding}(x) from zero at {MAX_PREC} bits"
                        )));
                    }
                    prec = (prec * 2).min(MAX_PREC);
                }
            }
        }
    }

    /// Archimedean places, one per real embedding and conjugate pair, in
    /// embedding order.
    pub fn archimedean_places(&self) -> Vec<Place> {
        self.embeddings()
            .iter()
            .enumerate()
            .map(|(i, e)| Place::archimedean(i, e.is_real))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn golden() -> FieldDatum {
        build_field(&IntPolynomial::from_i64(&[-1, -1, 1])).unwrap()
    }

    #[test]
    fn places_over_rationals() {
        let k = FieldDatum::rationals();
        let v = finite_places_above(&k, 2).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].residue_degree(), v[0].ramification()), (Some(1), Some(1)));
        let x = k.from_rational(q(5, 32));
        assert_eq!(k.ord_v(&v[0], &x).unwrap(), -5);
        assert_eq!(k.abs_v(&v[0], &x).unwrap().exact, Some(q(32, 1)));
        let inf = &k.archimedean_places()[0];
        let a = k.abs_v(inf, &k.from_rational(q(-5, 32))).unwrap();
        assert!((a.value - 5.0 / 32.0).abs() < 1e-15);

        let two = k.from_int(2);
        assert!((k.log_abs_v(inf, &two).unwrap().value - 2f64.ln()).abs() < 1e-15);
        assert_eq!(k.log_abs_v(&v[0], &two).unwrap().log_p_coeff, Some((2, -1)));
        let v3 = &finite_places_above(&k, 3).unwrap()[0];
        assert_eq!(k.log_abs_v(v3, &two).unwrap().value, 0.0);
    }

    #[test]
    fn golden_field_places() {
        let g = golden();
        let v2 = finite_places_above(&g, 2).unwrap();
        assert_eq!(v2.len(), 1);
        assert_eq!(v2[0].residue_degree(), Some(2));
        let v5 = finite_places_above(&g, 5).unwrap();
        assert_eq!(v5.len(), 1);
        assert_eq!((v5[0].residue_degree(), v5[0].ramification()), (Some(1), Some(2)));
        let x = g.element(vec![q(-1, 1), q(2, 1)]).unwrap();
        assert_eq!(g.ord_v(&v2[0], &x).unwrap(), 0);
        assert_eq!(g.ord_v(&v2[0], &g.from_int(2)).unwrap(), 1);
        // 2θ - 1 = √5 generates the ramified prime above 5
        assert_eq!(g.ord_v(&v5[0], &x).unwrap(), 1);
        assert_eq!(g.ord_v(&v5[0], &g.from_int(5)).unwrap(), 2);

        let inf = g.archimedean_places();
        let a = g.abs_v(&inf[1], &g.theta()).unwrap();
        assert!((a.value - 1.618_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn split_prime_valuations() {
        // 11 splits in Q(√5): t^2 - t - 1 = (t - 4)(t + 3) mod 11
        let g = golden();
        let v11 = finite_places_above(&g, 11).unwrap();
        assert_eq!(v11.len(), 2);
        // θ - 4 has norm 16 - 4 - 1 = 11
        let x = g.element(vec![q(-4, 1), q(1, 1)]).unwrap();
        let ords: Vec<i64> = v11.iter().map(|v| g.ord_v(v, &x).unwrap()).collect();
        assert_eq!(ords.iter().sum::<i64>(), 1);
        let y = g.mul(&x, &x);
        let y = g.inv(&y).unwrap();
        let ords2: Vec<i64> = v11.iter().map(|v| g.ord_v(v, &y).unwrap()).collect();
        assert_eq!(ords2, ords.iter().map(|o| -2 * o).collect::<Vec<_>>());
        assert_eq!(g.ord_v(&v11[0], &g.from_int(11)).unwrap(), 1);
    }

    #[test]
    fn non_maximal_prime_rejected() {
        // Z[√-3] has index 2 in the maximal order of Q(√-3)
        let k = build_field(&IntPolynomial::from_i64(&[3, 0, 1])).unwrap();
        assert!(matches!(finite_places_above(&k, 2), Err(Error::UnsupportedPrime { p: 2, .. })));
        // x^2 + 1: 2 ramifies but Z[i] is maximal
        let gi = build_field(&IntPolynomial::from_i64(&[1, 0, 1])).unwrap();
        let v = finite_places_above(&gi, 2).unwrap();
        assert_eq!(v[0].ramification(), Some(2));
    }

    fn small_fields() -> Vec<FieldDatum> {
        [&[-1, -1, 1][..], &[1, 0, 1], &[-2, 0, 0, 1], &[1, 1, 1, 1, 1], &[-3, 1, 0, 1]]
            .iter()
            .map(|c| build_field(&IntPolynomial::from_i64(c)).unwrap())
            .collect()
    }

    fn element_strategy() -> impl Strategy<Value = (usize, Vec<(i64, i64)>)> {
        (0usize..5, prop::collection::vec((-9i64..=9, 1i64..=6), 4))
    }

    fn make(k: &FieldDatum, c: &[(i64, i64)]) -> FieldElement {
        k.element(c[..k.degree()].iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
    }

    fn support(k: &FieldDatum, x: &FieldElement) -> Vec<Place> {
        let n = k.norm(x).unwrap();
        let mut primes = crate::algebra::prime_factors(n.numer(), 1 << 20).unwrap();
        primes.extend(crate::algebra::prime_factors(n.denom(), 1 << 20).unwrap());
        // coordinate denominators can hide primes with norm-cancelling valuations
        for c in x.coords() {
            primes.extend(crate::algebra::prime_factors(c.denom(), 1 << 20).unwrap());
        }
        primes.sort_unstable();
        primes.dedup();
        let mut places = k.archimedean_places();
        for p in primes {
            places.extend(finite_places_above(k, p).unwrap());
        }
        places
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn product_formula((fi, c) in element_strategy()) {
            let fields = small_fields();
            let k = &fields[fi];
            let x = make(k, &c);
            prop_assume!(!x.is_zero());
            let places = support(k, &x);
            let total: f64 = places.iter().map(|v| k.log_abs_v(v, &x).unwrap().value).sum();
            prop_assert!(total.abs() < 1e-9, "sum = {total}");
        }

        #[test]
        fn norm_is_archimedean_product((fi, c) in element_strategy()) {
            let fields = small_fields();
            let k = &fields[fi];
            let x = make(k, &c);
            prop_assume!(!x.is_zero());
            let n = k.norm(&x).unwrap();
            let lhs = ln_abs_rational(&n);
            let rhs: f64 = k.archimedean_places().iter().map(|v| k.log_abs_v(v, &x).unwrap().value).sum();
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }

        #[test]
        fn ord_is_additive((fi, c) in element_strategy(), (_, c2) in element_strategy()) {
            let fields = small_fields();
            let k = &fields[fi];
            let x = make(k, &c);
            let y = make(k, &c2);
            prop_assume!(!x.is_zero() && !y.is_zero());
            for p in [2u64, 3, 5, 7, 11] {
                let Ok(places) = finite_places_above(k, p) else { continue };
                for v in &places {
                    prop_assert_eq!(
                        k.ord_v(v, &k.mul(&x, &y)).unwrap(),
                        k.ord_v(v, &x).unwrap() + k.ord_v(v, &y).unwrap()
                    );
                }
            }
        }

        #[test]
        fn local_degrees_sum_to_field_degree(fi in 0usize..5, p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 29, 31])) {
            let fields = small_fields();
            let k = &fields[fi];
            if let Ok(places) = finite_places_above(k, p) {
                let s: u32 = places.iter().map(|v| v.local_degree()).sum();
                prop_assert_eq!(s as usize, k.degree());
            }
        }
    }
}
