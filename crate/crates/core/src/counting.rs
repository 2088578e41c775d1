//! Exact periodic point counts `|F(α^n)|`.
//!
//! Characteristic-zero components use the place product, evaluated without
//! floating point as `|N(ξ^n - 1)| * prod_{finite v in S} |ξ^n - 1|_v`.
//! Characteristic-p components count `F_q`-points of the finite ring
//! `R / (I + <u^n - 1>)` through a Gröbner basis.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::action::{charp_ideal_generators, PlacedComponent, PreparedSpec, PrimeComponent};
use crate::algebra::FqMatrix;
use crate::error::{Error, Result};
use crate::field::PlaceKind;
use crate::groebner::{GroebnerBasis, GroebnerLimits, MPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentCount {
    pub component: usize,
    pub value: BigUint,
    pub multiplicity: u32,
    /// `(q, e)` with `value = q^e` for characteristic-p components.
    pub factored: Option<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub value: BigUint,
    pub factored: Option<(u64, u64)>,
    pub per_component: Vec<ComponentCount>,
    /// Set for non-Noetherian specs, where the product only bounds the count.
    pub upper_bound: bool,
}

impl CountResult {
    fn single(component: usize, value: BigUint, factored: Option<(u64, u64)>) -> Self {
        Self {
            value: value.clone(),
            factored,
            per_component: vec![ComponentCount { component, value, multiplicity: 1, factored }],
            upper_bound: false,
        }
    }

    fn prime_power(component: usize, q: u64, e: u64) -> Self {
        let value = num_traits::pow(BigUint::from(q), e as usize);
        Self::single(component, value, Some((q, e)))
    }
}

fn check_n(n: &[i64], d: usize) -> Result<()> {
    if n.len() != d {
        return Err(Error::InvalidInput(format!("n has {} coordinates, expected d = {d}", n.len())));
    }
    if n.iter().all(|&x| x == 0) {
        return Err(Error::identity_direction());
    }
    Ok(())
}

/// Count for a characteristic-zero component.
pub fn count_prime_char0(pc: &PlacedComponent, n: &[i64]) -> Result<CountResult> {
    check_n(n, pc.d())?;
    let k = pc.field();
    let x = k.sub(&pc.xi_pow(n)?, &k.one());
    if x.is_zero() {
        return Err(Error::Domain(format!("xi^n = 1 at n = {n:?}: the action is not mixing")));
    }
    let mut value: BigRational = k.norm(&x)?.abs();
    for v in pc.places() {
        if let PlaceKind::Finite { p, residue_degree, .. } = v.kind() {
            let e = -k.ord_v(v, &x)? * *residue_degree as i64;
            let pe = BigRational::from_integer(num_traits::pow(BigInt::from(*p), e.unsigned_abs() as usize));
            if e >= 0 {
                value *= pe;
            } else {
                value /= pe;
            }
        }
    }
    if !value.denom().is_one() {
        return Err(Error::Internal(format!("place product {value} at n = {n:?} is not an integer")));
    }
    let v = value.numer().to_biguint().ok_or_else(|| Error::Internal("negative place product".into()))?;
    Ok(CountResult::single(0, v, None))
}

/// `dim_{F_q} R / (I + <u^n - 1>)`.
pub fn charp_dimension(component: &PrimeComponent, n: &[i64]) -> Result<u64> {
    let PrimeComponent::CharP { q, d, generators } = component else {
        return Err(Error::InvalidInput("expected a characteristic-p component".into()));
    };
    check_n(n, *d)?;
    let mut gens = charp_ideal_generators(*q, *d, generators);
    let nvars = 2 * d;
    let mut plus = vec![0u32; nvars];
    let mut minus = vec![0u32; nvars];
    for (i, &k) in n.iter().enumerate() {
        if k > 0 {
            plus[i] = k as u32;
        } else {
            minus[i] = (-k) as u32;
        }
    }
    gens.push(MPoly::from_terms(*q, [(plus, 1), (minus, q - 1)]));
    let basis = GroebnerBasis::compute(*q, nvars, &gens, &GroebnerLimits::default())?;
    basis.quotient_dimension().ok_or_else(|| Error::InfiniteCount { n: n.to_vec() })
}

/// Count for a characteristic-p component, reported as `q^dim`.
pub fn count_prime_charp(component: &PrimeComponent, n: &[i64]) -> Result<CountResult> {
    let dim = charp_dimension(component, n)?;
    Ok(CountResult::prime_power(0, component.characteristic(), dim))
}

/// `2^(n - 2^ord_2(n))`, the Ledrappier count along the first axis.
pub fn ledrappier_axis_closed_form(n: i64) -> Result<CountResult> {
    if n <= 0 {
        return Err(Error::InvalidInput(format!("n must be positive, got {n}")));
    }
    let e = n - (1i64 << n.trailing_zeros());
    Ok(CountResult::prime_power(0, 2, e as u64))
}

/// `prod_p count_p(n)^m(p)`, tagged as an upper bound for non-Noetherian specs.
pub fn count_composite(spec: &PreparedSpec, n: &[i64]) -> Result<CountResult> {
    check_n(n, spec.d())?;
    let mut value = BigUint::one();
    let mut per_component = Vec::new();
    for (i, (comp, placed)) in spec.spec().components().iter().zip(spec.placed()).enumerate() {
        let c = match placed {
            Some(pc) => count_prime_char0(pc, n)?,
            None => count_prime_charp(&comp.prime, n)?,
        };
        value *= num_traits::pow(c.value.clone(), comp.multiplicity as usize);
        per_component.push(ComponentCount {
            component: i,
            value: c.value,
            multiplicity: comp.multiplicity,
            factored: c.factored,
        });
    }
    let factored = combined_prime_power(&per_component);
    Ok(CountResult { value, factored, per_component, upper_bound: !spec.spec().noetherian() })
}

fn combined_prime_power(parts: &[ComponentCount]) -> Option<(u64, u64)> {
    let mut q = None;
    let mut e = 0u64;
    for c in parts {
        if c.value.is_one() {
            continue;
        }
        let (cq, ce) = c.factored?;
        if *q.get_or_insert(cq) != cq {
            return None;
        }
        e += ce * c.multiplicity as u64;
    }
    Some((q.unwrap_or(parts.first()?.factored?.0), e))
}

/// Dimensions found by the window oracle at three consecutive window sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowOracle {
    pub dims: Vec<(u32, u64)>,
    /// Present when all three dimensions agree.
    pub stabilized: Option<CountResult>,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Independent count for `d = 2` characteristic-p components by linear
/// algebra in a finite window.
///
/// A unimodular change of variables turns `u^n` into `w_1^g` with
/// `g = gcd(n)`, so the quotient is a module over `A = F_q[w_1]/(w_1^g - 1)`
/// in the single Laurent variable `w_2`. Monomials with `w_2`-degree in
/// `[-T, T]` are mapped into the space of degrees `[-2T, 2T]` modulo every
/// shifted generator fitting there, and the dimension of the image is
/// reported for `T = window, window + 1, window + 2`.
pub fn charp_window_oracle(component: &PrimeComponent, n: &[i64], window: u32) -> Result<WindowOracle> {
    let PrimeComponent::CharP { q, d, generators } = component else {
        return Err(Error::InvalidInput("expected a characteristic-p component".into()));
    };
    if *d != 2 {
        return Err(Error::InvalidInput("the window oracle needs d = 2".into()));
    }
    check_n(n, 2)?;
    let (g, x, y) = ext_gcd(n[0], n[1]);
    let (a, b) = (n[0] / g, n[1] / g);
    // rows of the unimodular matrix sending n to (g, 0)
    let map = |e: &[i64]| (x * e[0] + y * e[1], -b * e[0] + a * e[1]);
    let gu = g as usize;
    let gens: Vec<Vec<(usize, i64, u64)>> = generators
        .iter()
        .map(|p| {
            p.terms()
                .map(|(e, c)| {
                    let (e1, e2) = map(e);
                    (e1.rem_euclid(g) as usize, e2, c)
                })
                .collect()
        })
        .collect();

    let mut dims = Vec::new();
    for t in window..=window + 2 {
        let t = t as i64;
        let big = 2 * t;
        let cols = gu * (2 * big as usize + 1);
        let col = |a1: usize, e2: i64| (e2 + big) as usize * gu + a1;
        let mut relations: Vec<Vec<u64>> = Vec::new();
        for gen in &gens {
            let lo = gen.iter().map(|t| t.1).min().unwrap_or(0);
            let hi = gen.iter().map(|t| t.1).max().unwrap_or(0);
            for shift in (-big - lo)..=(big - hi) {
                for s1 in 0..gu {
                    let mut row = vec![0u64; cols];
                    for &(a1, e2, c) in gen {
                        let k = col((a1 + s1) % gu, e2 + shift);
                        row[k] = (row[k] + c) % q;
                    }
                    relations.push(row);
                }
            }
        }
        let rank_j = rank(*q, &relations, cols)?;
        let mut with_window = relations;
        for e2 in -t..=t {
            for a1 in 0..gu {
                let mut row = vec![0u64; cols];
                row[col(a1, e2)] = 1;
                with_window.push(row);
            }
        }
        let rank_all = rank(*q, &with_window, cols)?;
        dims.push((t as u32, (rank_all - rank_j) as u64));
    }
    let stable = dims.windows(2).all(|w| w[0].1 == w[1].1);
    let stabilized = stable.then(|| CountResult::prime_power(0, *q, dims[0].1));
    Ok(WindowOracle { dims, stabilized })
}

fn rank(q: u64, rows: &[Vec<u64>], cols: usize) -> Result<usize> {
    if rows.is_empty() {
        return Ok(0);
    }
    let m = FqMatrix::from_rows(q, rows)?;
    debug_assert_eq!(m.cols(), cols);
    Ok(m.rank())
}

/// Elementary count for a rational action `ξ = (a_1/b_1, ..., a_d/b_d)`:
/// the numerator of `|ξ^n - 1|` after removing every prime of `S`.
pub fn rational_strip_oracle(xi: &[BigRational], n: &[i64]) -> Result<BigUint> {
    let mut primes: Vec<BigInt> = Vec::new();
    for q in xi {
        for part in [q.numer(), q.denom()] {
            for p in crate::algebra::prime_factors(part, 1 << 26)? {
                primes.push(BigInt::from(p));
            }
        }
    }
    let mut x = BigRational::one();
    for (q, &k) in xi.iter().zip(n) {
        let base = if k < 0 { q.recip() } else { q.clone() };
        x *= num_traits::pow(base, k.unsigned_abs() as usize);
    }
    x -= BigRational::one();
    if x.is_zero() {
        return Err(Error::Domain("xi^n = 1".into()));
    }
    let mut num = x.numer().abs();
    for p in &primes {
        while (&num % p).is_zero() {
            num /= p;
        }
    }
    Ok(num.to_biguint().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::presets;
    use crate::action::{ActionSpec, Component};
    use proptest::prelude::*;

    fn count(spec: &ActionSpec, n: &[i64]) -> u64 {
        let p = spec.prepare().unwrap();
        count_composite(&p, n).unwrap().value.try_into().unwrap()
    }

    #[test]
    fn times_two_three_examples() {
        let s = presets::times_two_three();
        assert_eq!(count(&s, &[1, 1]), 5);
        assert_eq!(count(&s, &[-5, 3]), 5);
        assert_eq!(count(&s, &[3, 0]), 7);
        assert_eq!(count(&s, &[4, 0]), 5);
        assert_eq!(count(&s, &[5, 0]), 31);
        for (k, want) in [(1, 5u64), (2, 35), (3, 215), (4, 1295), (5, 7775)] {
            assert_eq!(count(&s, &[k, k]), want);
        }
        assert_eq!(count(&presets::times_two(), &[10]), 1023);
    }

    #[test]
    fn identity_and_non_mixing() {
        let p = presets::times_two_three().prepare().unwrap();
        let e = count_composite(&p, &[0, 0]).unwrap_err();
        assert_eq!(e.to_string(), "identity direction: infinitely many fixed points");
        let m = presets::rational_action(&["-1"]).unwrap().prepare().unwrap();
        assert!(matches!(count_composite(&m, &[2]), Err(Error::Domain(_))));
        assert!(count_composite(&p, &[1]).is_err());
    }

    #[test]
    fn ledrappier_examples() {
        let c = &presets::ledrappier().components()[0].prime.clone();
        for (n, want) in [(3, 2), (4, 0), (6, 4)] {
            assert_eq!(count_prime_charp(c, &[n, 0]).unwrap().factored, Some((2, want)));
        }
        assert_eq!(ledrappier_axis_closed_form(1).unwrap().value, 1u32.into());
        assert_eq!(ledrappier_axis_closed_form(2).unwrap().value, 1u32.into());
        assert_eq!(ledrappier_axis_closed_form(12).unwrap().value, 256u32.into());
        assert!(ledrappier_axis_closed_form(0).is_err());
    }

    #[test]
    fn ledrappier_axis_matches_closed_form() {
        let c = &presets::ledrappier().components()[0].prime.clone();
        for n in 1..=16 {
            assert_eq!(count_prime_charp(c, &[n, 0]).unwrap(), ledrappier_axis_closed_form(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn window_oracle_examples() {
        let c = &presets::ledrappier().components()[0].prime.clone();
        let w = charp_window_oracle(c, &[3, 0], 8).unwrap();
        assert_eq!(w.stabilized.unwrap().value, 4u32.into());
        let w = charp_window_oracle(c, &[5, 0], 8).unwrap();
        assert_eq!(w.stabilized.unwrap().value, 16u32.into());
        for n in [[2, 2], [1, 1], [-3, 2], [4, -1]] {
            let w = charp_window_oracle(c, &n, 8).unwrap();
            assert_eq!(w.stabilized.unwrap(), count_prime_charp(c, &n).unwrap(), "n = {n:?}");
        }
    }

    #[test]
    fn composite_examples() {
        let base = presets::times_two_three();
        let twice = ActionSpec::new(2, true, vec![Component { multiplicity: 2, ..base.components()[0].clone() }]).unwrap();
        assert_eq!(count(&twice, &[1, 1]), 25);

        let mixed = ActionSpec::new(
            2,
            true,
            vec![base.components()[0].clone(), presets::ledrappier().components()[0].clone()],
        )
        .unwrap();
        let r = count_composite(&mixed.prepare().unwrap(), &[3, 0]).unwrap();
        assert_eq!(r.value, 28u32.into());
        assert!(!r.upper_bound);
        let r2 = count_composite(&mixed.with_noetherian(false).prepare().unwrap(), &[3, 0]).unwrap();
        assert_eq!(r2.value, 28u32.into());
        assert!(r2.upper_bound);
    }

    #[test]
    fn golden_component_counts() {
        // ξ = (θ, 2): along (1, 0) the count is |N(θ - 1)| = 1
        let s = presets::golden_two();
        assert_eq!(count(&s, &[1, 0]), 1);
        // θ^2 - 1 = θ has norm -1
        assert_eq!(count(&s, &[2, 0]), 1);
        // θ^3 - 1 = 2θ, norm -4, and |2θ|_{v2} = 1/4
        assert_eq!(count(&s, &[3, 0]), 1);
        // (0, 1): |N(1)| = 1
        assert_eq!(count(&s, &[0, 1]), 1);
        // (1, 1): 2θ - 1 has norm -5, a 2-adic unit
        assert_eq!(count(&s, &[1, 1]), 5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn symmetric_in_n(n1 in -8i64..=8, n2 in -8i64..=8) {
            prop_assume!(n1 != 0 || n2 != 0);
            let p = presets::times_two_three().prepare().unwrap();
            prop_assert_eq!(count_composite(&p, &[n1, n2]).unwrap().value, count_composite(&p, &[-n1, -n2]).unwrap().value);
            let g = presets::golden_two().prepare().unwrap();
            prop_assert_eq!(count_composite(&g, &[n1, n2]).unwrap().value, count_composite(&g, &[-n1, -n2]).unwrap().value);
        }

        #[test]
        fn charp_symmetric(n1 in -5i64..=5, n2 in -5i64..=5) {
            prop_assume!(n1 != 0 || n2 != 0);
            let c = &presets::ledrappier().components()[0].prime.clone();
            prop_assert_eq!(count_prime_charp(c, &[n1, n2]).unwrap(), count_prime_charp(c, &[-n1, -n2]).unwrap());
        }
    }

    #[test]
    fn strip_oracle_agrees_on_box() {
        let p = presets::times_two_three().prepare().unwrap();
        let xi = [BigRational::from_integer(2.into()), BigRational::from_integer(3.into())];
        for n in crate::lattice::box_points(2, 8) {
            assert_eq!(count_composite(&p, &n).unwrap().value, rational_strip_oracle(&xi, &n).unwrap(), "n = {n:?}");
        }
    }

    #[test]
    fn log_growth_approaches_entropy() {
        let p = presets::times_two_three().prepare().unwrap();
        let c = count_composite(&p, &[20, 20]).unwrap().value;
        let lg = crate::algebra::numeric::ln_biguint(&c) / 20.0;
        assert!((lg - 6f64.ln()).abs() < 0.01);
    }
}
