//! Entropy-rank-one actions: prime components with multiplicities, the
//! place sets `S(p)` and Lyapunov vectors of characteristic-zero components,
//! and bounded mixing / finiteness diagnostics.

mod json;
mod laurent;
pub mod presets;

use std::fmt;

use num_traits::Zero;

use crate::algebra::prime_factors;
use crate::counting;
use crate::error::{Error, Result};
use crate::field::{finite_places_above, FieldDatum, FieldElement, Place};
use crate::groebner::{GroebnerBasis, GroebnerLimits, MPoly};
use crate::lattice::half_box_points;

pub use json::{parse_spec, to_json};
pub use laurent::LaurentPolynomial;

/// Trial division cap used when factoring norms of `ξ_i`.
const FACTOR_LIMIT: u64 = 1 << 26;

/// One associated-prime datum.
#[derive(Clone, Debug, PartialEq)]
pub enum PrimeComponent {
    Char0 { field: FieldDatum, xi: Vec<FieldElement> },
    CharP { q: u64, d: usize, generators: Vec<LaurentPolynomial> },
}

impl PrimeComponent {
    pub fn char0(field: FieldDatum, xi: Vec<FieldElement>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::InvalidInput("xi must have at least one coordinate".into()));
        }
        if let Some(i) = xi.iter().position(|x| x.is_zero()) {
            return Err(Error::InvalidInput(format!("xi[{i}] is zero")));
        }
        if xi.iter().any(|x| x.coords().len() != field.degree()) {
            return Err(Error::InvalidInput("xi coordinate length differs from field degree".into()));
        }
        Ok(Self::Char0 { field, xi })
    }

    pub fn charp(q: u64, d: usize, generators: Vec<LaurentPolynomial>) -> Result<Self> {
        if !crate::algebra::fp::is_prime(q) {
            return Err(Error::InvalidInput(format!("characteristic {q} is not prime")));
        }
        if d == 0 {
            return Err(Error::InvalidInput("d must be at least 1".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.is_zero() {
                return Err(Error::InvalidInput(format!("generator {i} is zero mod {q}")));
            }
            if g.q() != q || g.d() != d {
                return Err(Error::InvalidInput(format!("generator {i} has mismatched q or d")));
            }
        }
        Ok(Self::CharP { q, d, generators })
    }

    pub fn d(&self) -> usize {
        match self {
            Self::Char0 { xi, .. } => xi.len(),
            Self::CharP { d, .. } => *d,
        }
    }

    /// 0 or the prime `q`.
    pub fn characteristic(&self) -> u64 {
        match self {
            Self::Char0 { .. } => 0,
            Self::CharP { q, .. } => *q,
        }
    }
}

impl fmt::Display for PrimeComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Char0 { field, xi } => {
                let xs: Vec<String> = xi.iter().map(|x| x.to_string()).collect();
                write!(f, "char 0, K = {field}, xi = ({})", xs.join(", "))
            }
            Self::CharP { q, generators, .. } => {
                let gs: Vec<String> = generators.iter().map(|g| g.to_string()).collect();
                write!(f, "char {q}, <{}>", gs.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub prime: PrimeComponent,
    pub multiplicity: u32,
}

/// A validated action: components sharing one rank `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionSpec {
    d: usize,
    noetherian: bool,
    components: Vec<Component>,
}

impl ActionSpec {
    pub fn new(d: usize, noetherian: bool, components: Vec<Component>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("d must be at least 1".into()));
        }
        if components.is_empty() {
            return Err(Error::InvalidInput("at least one component is required".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if c.multiplicity == 0 {
                return Err(Error::InvalidInput(format!("component {i} has multiplicity 0")));
            }
            if c.prime.d() != d {
                return Err(Error::InvalidInput(format!(
                    "component {i} has d = {}, spec has d = {d}",
                    c.prime.d()
                )));
            }
        }
        Ok(Self { d, noetherian, components })
    }

    /// Single component of multiplicity one.
    pub fn single(prime: PrimeComponent) -> Result<Self> {
        Self::new(prime.d(), true, vec![Component { prime, multiplicity: 1 }])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn noetherian(&self) -> bool {
        self.noetherian
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn with_noetherian(mut self, flag: bool) -> Self {
        self.noetherian = flag;
        self
    }

    pub fn has_charp(&self) -> bool {
        self.components.iter().any(|c| c.prime.characteristic() != 0)
    }

    /// Computes `S(p)` and Lyapunov data for every characteristic-zero component.
    pub fn prepare(&self) -> Result<PreparedSpec> {
        let placed = self
            .components
            .iter()
            .map(|c| match &c.prime {
                PrimeComponent::Char0 { .. } => compute_places(&c.prime).map(Some),
                PrimeComponent::CharP { .. } => Ok(None),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PreparedSpec { spec: self.clone(), placed })
    }
}

/// A characteristic-zero component with its place set and Lyapunov vectors.
#[derive(Clone, Debug)]
pub struct PlacedComponent {
    field: FieldDatum,
    xi: Vec<FieldElement>,
    places: Vec<Place>,
    lyapunov: Vec<Vec<f64>>,
    lyapunov_err: Vec<Vec<f64>>,
}

impl PlacedComponent {
    pub fn field(&self) -> &FieldDatum {
        &self.field
    }

    pub fn xi(&self) -> &[FieldElement] {
        &self.xi
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    /// `lyapunov()[v][i] = log |ξ_i|_v`.
    pub fn lyapunov(&self) -> &[Vec<f64>] {
        &self.lyapunov
    }

    /// Certified error bounds matching [`Self::lyapunov`].
    pub fn lyapunov_errors(&self) -> &[Vec<f64>] {
        &self.lyapunov_err
    }

    pub fn d(&self) -> usize {
        self.xi.len()
    }

    /// `ξ^n` by exact field arithmetic.
    pub fn xi_pow(&self, n: &[i64]) -> Result<FieldElement> {
        if n.len() != self.d() {
            return Err(Error::InvalidInput(format!("n has length {}, expected {}", n.len(), self.d())));
        }
        self.field.multi_pow(&self.xi, n)
    }
}

/// A spec with place data attached to its characteristic-zero components.
#[derive(Clone, Debug)]
pub struct PreparedSpec {
    spec: ActionSpec,
    placed: Vec<Option<PlacedComponent>>,
}

impl PreparedSpec {
    pub fn spec(&self) -> &ActionSpec {
        &self.spec
    }

    pub fn d(&self) -> usize {
        self.spec.d
    }

    /// Entry `i` is `Some` exactly when component `i` has characteristic 0.
    pub fn placed(&self) -> &[Option<PlacedComponent>] {
        &self.placed
    }

    pub fn placed_components(&self) -> impl Iterator<Item = (&PlacedComponent, u32)> {
        self.placed
            .iter()
            .zip(&self.spec.components)
            .filter_map(|(p, c)| p.as_ref().map(|p| (p, c.multiplicity)))
    }
}

/// `S(p)`: every archimedean place, then the finite places where some `ξ_i`
/// is not a unit, ordered by rational prime and factor.
pub fn compute_places(component: &PrimeComponent) -> Result<PlacedComponent> {
    let PrimeComponent::Char0 { field, xi } = component else {
        return Err(Error::NotAvailable("places are defined for characteristic-zero components only".into()));
    };
    let mut primes: Vec<u64> = Vec::new();
    for x in xi {
        let n = field.norm(x)?;
        primes.extend(prime_factors(n.numer(), FACTOR_LIMIT)?);
        primes.extend(prime_factors(n.denom(), FACTOR_LIMIT)?);
        // a prime can appear with opposite signs at two places above it and
        // cancel in the norm, but then it divides a coordinate denominator
        for c in x.coords() {
            if !c.is_zero() {
                primes.extend(prime_factors(c.denom(), FACTOR_LIMIT)?);
            }
        }
    }
    primes.sort_unstable();
    primes.dedup();

    let mut places = field.archimedean_places();
    for p in primes {
        for v in finite_places_above(field, p)? {
            let mut nonunit = false;
            for x in xi {
                if field.ord_v(&v, x)? != 0 {
                    nonunit = true;
                    break;
                }
            }
            if nonunit {
                places.push(v);
            }
        }
    }
    let mut lyapunov = Vec::with_capacity(places.len());
    let mut lyapunov_err = Vec::with_capacity(places.len());
    for v in &places {
        let mut row = Vec::with_capacity(xi.len());
        let mut err = Vec::with_capacity(xi.len());
        for x in xi {
            let l = field.log_abs_v(v, x)?;
            row.push(l.value);
            err.push(l.error);
        }
        lyapunov.push(row);
        lyapunov_err.push(err);
    }
    Ok(PlacedComponent { field: field.clone(), xi: xi.clone(), places, lyapunov, lyapunov_err })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixingViolation {
    pub component: usize,
    pub n: Vec<i64>,
    pub reason: String,
}

/// Outcome of a bounded mixing check. Absence of violations is evidence up to
/// the radius, not a proof.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingReport {
    pub verified_up_to_radius: u32,
    pub violations: Vec<MixingViolation>,
}

impl MixingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Largest `m` with `phi(m) <= 8`.
const ROOT_OF_UNITY_ORDER_CAP: u64 = 30;

fn euler_phi(mut m: u64) -> u64 {
    let mut out = m;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

/// Order of `x` as a root of unity, if it is one.
pub fn root_of_unity_order(field: &FieldDatum, x: &FieldElement) -> Result<Option<u64>> {
    let mut acc = field.one();
    for m in 1..=ROOT_OF_UNITY_ORDER_CAP {
        acc = field.mul(&acc, x);
        if euler_phi(m) as usize <= field.degree() && acc.is_one() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Laurent ideal of a characteristic-`p` component as an ideal in
/// `F_q[u_1..u_d, t_1..t_d]` with `u_i t_i = 1`.
pub(crate) fn charp_ideal_generators(q: u64, d: usize, generators: &[LaurentPolynomial]) -> Vec<MPoly> {
    let nvars = 2 * d;
    let mut gens: Vec<MPoly> = generators.iter().map(|g| g.to_shifted_mpoly(nvars)).collect();
    for i in 0..d {
        let mut m = vec![0; nvars];
        m[i] = 1;
        m[d + i] = 1;
        gens.push(MPoly::from_terms(q, [(m, 1), (vec![0; nvars], q - 1)]));
    }
    gens
}

/// `u^n - 1` written as `u^(n+) t^(n-) - 1`.
pub(crate) fn charp_unit_minus_one(q: u64, n: &[i64]) -> MPoly {
    let d = n.len();
    let mut m = vec![0u32; 2 * d];
    for (i, &k) in n.iter().enumerate() {
        if k >= 0 {
            m[i] = k as u32;
        } else {
            m[d + i] = (-k) as u32;
        }
    }
    MPoly::from_terms(q, [(m, 1), (vec![0; 2 * d], q - 1)])
}

/// Checks `ξ^n != 1` (characteristic 0) or `u^n - 1 ∉ I` (characteristic p)
/// for every `0 < |n|_inf <= radius`, plus an exact root-of-unity test on each
/// `ξ_i`.
pub fn mixing_check(spec: &ActionSpec, radius: u32) -> Result<MixingReport> {
    let points = half_box_points(spec.d, radius as i64);
    let mut violations = Vec::new();
    for (ci, c) in spec.components.iter().enumerate() {
        match &c.prime {
            PrimeComponent::Char0 { field, xi } => {
                for (i, x) in xi.iter().enumerate() {
                    if let Some(m) = root_of_unity_order(field, x)? {
                        let mut n = vec![0; spec.d];
                        n[i] = m as i64;
                        violations.push(MixingViolation {
                            component: ci,
                            n,
                            reason: format!("xi[{i}] is a root of unity of order {m}"),
                        });
                    }
                }
                for n in &points {
                    if field.multi_pow(xi, n)?.is_one() {
                        violations.push(MixingViolation { component: ci, n: n.clone(), reason: "xi^n = 1".into() });
                    }
                }
            }
            PrimeComponent::CharP { q, d, generators } => {
                let gens = charp_ideal_generators(*q, *d, generators);
                let basis = GroebnerBasis::compute(*q, 2 * d, &gens, &GroebnerLimits::default())?;
                for n in &points {
                    if basis.contains(&charp_unit_minus_one(*q, n))? {
                        violations.push(MixingViolation {
                            component: ci,
                            n: n.clone(),
                            reason: "u^n - 1 lies in the ideal".into(),
                        });
                    }
                }
            }
        }
    }
    violations.sort_by(|a, b| (a.component, &a.n).cmp(&(b.component, &b.n)));
    violations.dedup();
    Ok(MixingReport { verified_up_to_radius: radius, violations })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentCheck {
    pub component: usize,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankOneReport {
    pub components: Vec<ComponentCheck>,
}

impl RankOneReport {
    pub fn passed(&self) -> bool {
        self.components.iter().all(|c| c.passed)
    }
}

/// Probe radius for the characteristic-p finiteness test.
const RANK_ONE_PROBE_RADIUS: i64 = 2;

/// Characteristic-zero components pass by construction. Characteristic-p
/// components must give finite counts on a small probe set, a necessary
/// condition only.
pub fn entropy_rank_one_check(spec: &ActionSpec) -> Result<RankOneReport> {
    let probes = half_box_points(spec.d, RANK_ONE_PROBE_RADIUS);
    let mut out = Vec::new();
    for (ci, c) in spec.components.iter().enumerate() {
        let check = match &c.prime {
            PrimeComponent::Char0 { field, .. } => ComponentCheck {
                component: ci,
                passed: true,
                detail: format!("number field of degree {}", field.degree()),
            },
            PrimeComponent::CharP { .. } => {
                let mut failure = None;
                for n in &probes {
                    match counting::count_prime_charp(&c.prime, n) {
                        Ok(_) => {}
                        Err(Error::InfiniteCount { .. }) => {
                            failure = Some(n.clone());
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
                match failure {
                    None => ComponentCheck {
                        component: ci,
                        passed: true,
                        detail: format!("finite counts at {} probe directions", probes.len()),
                    },
                    Some(n) => ComponentCheck {
                        component: ci,
                        passed: false,
                        detail: format!("infinitely many fixed points at n = {n:?}"),
                    },
                }
            }
        };
        out.push(check);
    }
    Ok(RankOneReport { components: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::presets;

    fn sum_columns(pc: &PlacedComponent) -> Vec<f64> {
        (0..pc.d()).map(|i| pc.lyapunov().iter().map(|row| row[i]).sum()).collect()
    }

    #[test]
    fn places_times_two_three() {
        let pc = compute_places(&presets::times_two_three().components()[0].prime).unwrap();
        let labels: Vec<String> = pc.places().iter().map(|p| p.label()).collect();
        assert_eq!(labels, ["inf0", "v2", "v3"]);
        let (l2, l3) = (2f64.ln(), 3f64.ln());
        let want = [[l2, l3], [-l2, 0.0], [0.0, -l3]];
        for (row, w) in pc.lyapunov().iter().zip(want) {
            assert!((row[0] - w[0]).abs() < 1e-14 && (row[1] - w[1]).abs() < 1e-14, "{row:?}");
        }
        assert!(sum_columns(&pc).iter().all(|s| s.abs() < 1e-12));
    }

    #[test]
    fn places_times_two() {
        let pc = compute_places(&presets::times_two().components()[0].prime).unwrap();
        assert_eq!(pc.places().len(), 2);
        assert!((pc.lyapunov()[0][0] - 2f64.ln()).abs() < 1e-14);
        assert!((pc.lyapunov()[1][0] + 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn places_golden() {
        let pc = compute_places(&presets::golden_two().components()[0].prime).unwrap();
        let labels: Vec<String> = pc.places().iter().map(|p| p.label()).collect();
        assert_eq!(labels, ["inf0", "inf1", "v2"]);
        let l = &pc.lyapunov()[2];
        assert_eq!(l[0], 0.0);
        assert!((l[1] + 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!(sum_columns(&pc).iter().all(|s| s.abs() < 1e-12));
    }

    #[test]
    fn places_are_deterministic() {
        let c = &presets::golden_two().components()[0].prime.clone();
        let a = compute_places(c).unwrap();
        let b = compute_places(c).unwrap();
        assert_eq!(a.places(), b.places());
        assert_eq!(a.lyapunov(), b.lyapunov());
    }

    #[test]
    fn mixing_examples() {
        assert!(mixing_check(&presets::times_two_three(), 10).unwrap().passed());
        let minus_one = presets::rational_action(&["-1"]).unwrap();
        let r = mixing_check(&minus_one, 3).unwrap();
        assert!(r.violations.iter().any(|v| v.n == vec![2]));
        assert!(mixing_check(&presets::ledrappier(), 6).unwrap().passed());
    }

    #[test]
    fn rank_one_examples() {
        assert!(entropy_rank_one_check(&presets::times_two_three()).unwrap().passed());
        assert!(entropy_rank_one_check(&presets::ledrappier()).unwrap().passed());
        let full_shift = ActionSpec::single(PrimeComponent::charp(2, 2, vec![]).unwrap()).unwrap();
        assert!(!entropy_rank_one_check(&full_shift).unwrap().passed());
    }

    #[test]
    fn rejects_bad_components() {
        let k = FieldDatum::rationals();
        assert!(PrimeComponent::char0(k.clone(), vec![k.zero(), k.from_int(3)]).is_err());
        let g = LaurentPolynomial::new(2, 2, [(vec![0, 0], 1)]).unwrap();
        assert!(PrimeComponent::charp(4, 2, vec![g]).is_err());
        let c1 = presets::times_two().components()[0].clone();
        let c2 = presets::times_two_three().components()[0].clone();
        assert!(ActionSpec::new(1, true, vec![c1, c2]).is_err());
    }

    #[test]
    fn euler_phi_values() {
        assert_eq!([1, 2, 6, 12, 30].map(euler_phi), [1, 1, 2, 4, 8]);
    }
}
