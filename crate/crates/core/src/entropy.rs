//! Directional entropy `h(x) = sum m * max(l_v . x, 0)`, its extrema on the
//! unit sphere, breakpoint hyperplanes, and Mahler measures.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::PreparedSpec;
use crate::algebra::numeric::{certified_roots, DEFAULT_PREC, MAX_PREC};
use crate::algebra::IntPolynomial;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyTerm {
    pub weight: u32,
    pub lyapunov: Vec<f64>,
    /// Certified bound on each coordinate of `lyapunov`.
    pub error: Vec<f64>,
    pub label: String,
}

/// Piecewise-linear convex function on `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyFunction {
    d: usize,
    terms: Vec<EntropyTerm>,
}

impl EntropyFunction {
    /// Terms with exact data and unit weights, mostly for tests.
    pub fn from_vectors(d: usize, vectors: &[(u32, Vec<f64>)]) -> Result<Self> {
        let terms = vectors
            .iter()
            .enumerate()
            .map(|(i, (w, l))| {
                if l.len() != d {
                    return Err(Error::InvalidInput(format!("vector {i} has length {}, expected {d}", l.len())));
                }
                Ok(EntropyTerm { weight: *w, lyapunov: l.clone(), error: vec![0.0; d], label: format!("t{i}") })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { d, terms })
    }

    /// Flattens every place of every characteristic-zero component. Specs
    /// with characteristic-p components have no place data here.
    pub fn from_spec(spec: &PreparedSpec) -> Result<Self> {
        if spec.spec().has_charp() {
            return Err(Error::NotAvailable(
                "directional entropy needs place data, which characteristic-p components do not carry".into(),
            ));
        }
        let mut terms = Vec::new();
        for (ci, (pc, m)) in spec.placed_components().enumerate() {
            for (v, (l, e)) in pc.places().iter().zip(pc.lyapunov().iter().zip(pc.lyapunov_errors())) {
                terms.push(EntropyTerm {
                    weight: m,
                    lyapunov: l.clone(),
                    error: e.clone(),
                    label: if spec.placed().len() > 1 { format!("c{ci}:{v}") } else { v.to_string() },
                });
            }
        }
        Ok(Self { d: spec.d(), terms })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[EntropyTerm] {
        &self.terms
    }

    /// Value at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.weight as f64 * dot(&t.lyapunov, x).max(0.0)).sum()
    }

    /// Bound on the error of [`Self::eval`] inherited from the Lyapunov data.
    pub fn eval_error(&self, x: &[f64]) -> f64 {
        let xs: f64 = x.iter().map(|v| v.abs()).sum();
        self.terms
            .iter()
            .map(|t| t.weight as f64 * t.error.iter().cloned().fold(0.0, f64::max) * xs)
            .sum::<f64>()
            + 1e-15 * self.eval(x).abs()
    }

    /// Sum of `m * l_v` over the terms with `l_v . x > 0`.
    fn gradient_at(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.d];
        for t in &self.terms {
            if dot(&t.lyapunov, x) > 0.0 {
                for (gi, li) in g.iter_mut().zip(&t.lyapunov) {
                    *gi += t.weight as f64 * li;
                }
            }
        }
        g
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `h(x)`.
pub fn directional_entropy(ef: &EntropyFunction, x: &[f64]) -> f64 {
    ef.eval(x)
}

/// `sum m * |l_v|_inf`, a Lipschitz constant for `h` with respect to the
/// 1-norm (it dominates every cone gradient coordinate).
pub fn lipschitz_constant(ef: &EntropyFunction) -> f64 {
    ef.terms
        .iter()
        .map(|t| t.weight as f64 * t.lyapunov.iter().map(|v| v.abs()).fold(0.0, f64::max))
        .sum()
}

/// `sum m * |l_v|_2`, a Lipschitz constant for the Euclidean norm.
pub fn lipschitz_constant_euclidean(ef: &EntropyFunction) -> f64 {
    ef.terms.iter().map(|t| t.weight as f64 * norm2(&t.lyapunov)).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExtremaMethod {
    /// `d = 1`: both unit vectors.
    Endpoints,
    /// `d = 2`: arcs between breakpoint angles.
    Arcs { arcs: usize },
    /// `d >= 3`: stationary points on every flat of the arrangement.
    Flats { candidates: usize, sampled: usize, sampled_min: f64, sampled_max: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereExtrema {
    pub max_value: f64,
    pub min_value: f64,
    pub argmax: Vec<f64>,
    pub argmin: Vec<f64>,
    pub method: ExtremaMethod,
}

struct Best {
    min: (f64, Vec<f64>),
    max: (f64, Vec<f64>),
}

impl Best {
    fn new(d: usize) -> Self {
        Self { min: (f64::INFINITY, vec![0.0; d]), max: (f64::NEG_INFINITY, vec![0.0; d]) }
    }

    fn offer(&mut self, ef: &EntropyFunction, u: Vec<f64>) {
        let n = norm2(&u);
        if n.is_nan() || n <= 0.0 || !n.is_finite() {
            return;
        }
        let u: Vec<f64> = u.iter().map(|x| x / n).collect();
        let h = ef.eval(&u);
        if h < self.min.0 {
            self.min = (h, u.clone());
        }
        if h > self.max.0 {
            self.max = (h, u);
        }
    }
}

/// Maximum and minimum of `h` on the unit sphere.
pub fn sphere_extrema(ef: &EntropyFunction) -> Result<SphereExtrema> {
    if ef.terms.is_empty() {
        return Err(Error::InvalidInput("entropy function has no terms".into()));
    }
    let d = ef.d;
    let mut best = Best::new(d);
    let method = match d {
        0 => return Err(Error::InvalidInput("d must be at least 1".into())),
        1 => {
            best.offer(ef, vec![1.0]);
            best.offer(ef, vec![-1.0]);
            ExtremaMethod::Endpoints
        }
        2 => ExtremaMethod::Arcs { arcs: extrema_on_circle(ef, &mut best) },
        _ => extrema_on_flats(ef, &mut best)?,
    };
    Ok(SphereExtrema { max_value: best.max.0, min_value: best.min.0, argmax: best.max.1, argmin: best.min.1, method })
}

fn unit(theta: f64) -> Vec<f64> {
    vec![theta.cos(), theta.sin()]
}

/// On each arc between consecutive breakpoint angles `h` equals
/// `a . (cos θ, sin θ)`, whose extrema lie at the endpoints or at
/// `atan2(a)` and its antipode.
fn extrema_on_circle(ef: &EntropyFunction, best: &mut Best) -> usize {
    let mut angles: Vec<f64> = Vec::new();
    for t in &ef.terms {
        if norm2(&t.lyapunov) > 0.0 {
            let base = t.lyapunov[1].atan2(t.lyapunov[0]);
            for s in [PI / 2.0, -PI / 2.0] {
                angles.push((base + s).rem_euclid(2.0 * PI));
            }
        }
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    if angles.is_empty() {
        best.offer(ef, vec![1.0, 0.0]);
        return 0;
    }
    let k = angles.len();
    for i in 0..k {
        let lo = angles[i];
        let hi = if i + 1 < k { angles[i + 1] } else { angles[0] + 2.0 * PI };
        best.offer(ef, unit(lo));
        let mid = 0.5 * (lo + hi);
        let a = ef.gradient_at(&unit(mid));
        if norm2(&a) == 0.0 {
            continue;
        }
        let star = a[1].atan2(a[0]);
        for c in [star, star + PI] {
            // shift c into [lo, lo + 2π)
            let c = lo + (c - lo).rem_euclid(2.0 * PI);
            if c > lo && c < hi {
                best.offer(ef, unit(c));
            }
        }
    }
    k
}

/// Cap on `2^terms` gradient subsets for `d >= 3`.
const MAX_SUBSET_TERMS: usize = 16;
/// Sampling cross-check size for `d >= 3`.
const SPHERE_SAMPLES: usize = 200_000;

fn extrema_on_flats(ef: &EntropyFunction, best: &mut Best) -> Result<ExtremaMethod> {
    let d = ef.d;
    let normals: Vec<Vec<f64>> = distinct_directions(ef).into_iter().map(|(l, _)| l).collect();
    let weighted: Vec<Vec<f64>> = ef
        .terms
        .iter()
        .filter(|t| norm2(&t.lyapunov) > 0.0)
        .map(|t| t.lyapunov.iter().map(|x| x * t.weight as f64).collect())
        .collect();
    if weighted.len() > MAX_SUBSET_TERMS {
        return Err(Error::Resource(format!(
            "sphere extrema for d >= 3 enumerate 2^{} gradients; cap is 2^{MAX_SUBSET_TERMS}",
            weighted.len()
        )));
    }
    let mut gradients: Vec<Vec<f64>> = Vec::with_capacity(1 << weighted.len());
    for mask in 0u32..(1 << weighted.len()) {
        let mut g = vec![0.0; d];
        for (i, w) in weighted.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (gi, wi) in g.iter_mut().zip(w) {
                    *gi += wi;
                }
            }
        }
        gradients.push(g);
    }
    let mut candidates = 0;
    // flats: intersections of up to d - 1 hyperplanes
    let mut subset: Vec<usize> = Vec::new();
    let mut flats: Vec<Vec<Vec<f64>>> = Vec::new();
    collect_flats(&normals, d, 0, &mut subset, &mut flats);
    for basis in flats {
        for b in &basis {
            best.offer(ef, b.clone());
            best.offer(ef, b.iter().map(|x| -x).collect());
            candidates += 2;
        }
        for g in &gradients {
            let p = project(g, &basis);
            best.offer(ef, p.clone());
            best.offer(ef, p.iter().map(|x| -x).collect());
            candidates += 2;
        }
    }
    // deterministic sampling cross-check
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut smin = f64::INFINITY;
    let mut smax = f64::NEG_INFINITY;
    for _ in 0..SPHERE_SAMPLES {
        let v: Vec<f64> = (0..d).map(|_| gaussian(&mut rng)).collect();
        let n = norm2(&v);
        let u: Vec<f64> = v.iter().map(|x| x / n).collect();
        let h = ef.eval(&u);
        smin = smin.min(h);
        smax = smax.max(h);
    }
    if smin < best.min.0 - 1e-9 || smax > best.max.0 + 1e-9 {
        return Err(Error::Internal(format!(
            "sampling found values outside [{}, {}]: [{smin}, {smax}]",
            best.min.0, best.max.0
        )));
    }
    Ok(ExtremaMethod::Flats { candidates, sampled: SPHERE_SAMPLES, sampled_min: smin, sampled_max: smax })
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Orthonormal bases of the orthogonal complements of spans of at most
/// `d - 1` normals, deduplicated by dimension of the resulting flat.
fn collect_flats(normals: &[Vec<f64>], d: usize, start: usize, subset: &mut Vec<usize>, out: &mut Vec<Vec<Vec<f64>>>) {
    let rows: Vec<Vec<f64>> = subset.iter().map(|&i| normals[i].clone()).collect();
    let basis = orthogonal_complement(&rows, d);
    if basis.is_empty() {
        return;
    }
    out.push(basis);
    if subset.len() + 1 >= d {
        return;
    }
    for i in start..normals.len() {
        subset.push(i);
        collect_flats(normals, d, i + 1, subset, out);
        subset.pop();
    }
}

fn gram_schmidt(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &out {
                let c = dot(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let n = norm2(&w);
        if n > 1e-10 * norm2(v).max(1e-300) {
            out.push(w.iter().map(|x| x / n).collect());
        }
    }
    out
}

fn orthogonal_complement(rows: &[Vec<f64>], d: usize) -> Vec<Vec<f64>> {
    let span = gram_schmidt(rows);
    let mut all = span.clone();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        all.push(e);
    }
    gram_schmidt(&all)[span.len()..].to_vec()
}

fn project(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for b in basis {
        let c = dot(v, b);
        for (o, bi) in out.iter_mut().zip(b) {
            *o += c * bi;
        }
    }
    out
}

/// Distinct lines `R l_v`, each with the labels of the terms on it. The
/// representative is the first term's vector.
fn distinct_directions(ef: &EntropyFunction) -> Vec<(Vec<f64>, Vec<String>)> {
    let mut out: Vec<(Vec<f64>, Vec<f64>, Vec<String>)> = Vec::new();
    for t in &ef.terms {
        let n = norm2(&t.lyapunov);
        if n == 0.0 {
            continue;
        }
        let mut u: Vec<f64> = t.lyapunov.iter().map(|x| x / n).collect();
        if u.iter().find(|x| x.abs() > 1e-12).is_some_and(|&x| x < 0.0) {
            u.iter_mut().for_each(|x| *x = -*x);
        }
        match out.iter_mut().find(|(_, w, _)| w.iter().zip(&u).all(|(a, b)| (a - b).abs() < 1e-9)) {
            Some(entry) => entry.2.push(t.label.clone()),
            None => out.push((t.lyapunov.clone(), u, vec![t.label.clone()])),
        }
    }
    out.into_iter().map(|(l, _, labels)| (l, labels)).collect()
}

/// A breakpoint hyperplane `normal . x = 0` of `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub places: Vec<String>,
}

impl Hyperplane {
    /// Whether the hyperplane is a coordinate hyperplane.
    pub fn is_axis(&self) -> bool {
        self.normal.iter().filter(|x| x.abs() > 1e-12 * norm2(&self.normal)).count() == 1
    }
}

impl std::fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .normal
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| format!("{c:.12}*x{}", i + 1))
            .collect();
        write!(f, "{} = 0", parts.join(" + ").replace("+ -", "- "))
    }
}

/// Breakpoint hyperplanes of `h`, one per distinct line `R l_v`. These are
/// candidates for non-expansive directions; no classification is attempted.
pub fn nonexpansive_candidates(ef: &EntropyFunction) -> Vec<Hyperplane> {
    if ef.d < 2 {
        return Vec::new();
    }
    distinct_directions(ef).into_iter().map(|(normal, places)| Hyperplane { normal, places }).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MahlerMeasure {
    pub value: f64,
    pub error: f64,
}

/// Target accuracy for root contributions.
const MAHLER_TOL: f64 = 1e-12;

/// `m(P) = log|lc(P)| + sum log max(1, |ρ|)` from certified roots of the
/// square-free parts of `P`.
pub fn mahler_measure(p: &IntPolynomial) -> Result<MahlerMeasure> {
    if p.is_zero() {
        return Err(Error::InvalidInput("Mahler measure of the zero polynomial".into()));
    }
    let mut value = crate::algebra::numeric::ln_abs_rational(&num_rational::BigRational::from_integer(
        p.leading_coeff(),
    ));
    let mut error = 1e-16 * value.abs();
    for (g, mult) in p.square_free_decomposition() {
        let (v, e) = mahler_square_free(&g)?;
        // g is primitive, so lc(g) enters through the leading coefficients of the factors
        value += mult as f64 * (v - ln_abs_int(&g.leading_coeff()));
        error += mult as f64 * e;
    }
    Ok(MahlerMeasure { value, error })
}

fn ln_abs_int(k: &BigInt) -> f64 {
    crate::algebra::numeric::ln_abs_rational(&num_rational::BigRational::from_integer(k.abs()))
}

/// `m(g)` including `log |lc(g)|`, for square-free `g`.
fn mahler_square_free(g: &IntPolynomial) -> Result<(f64, f64)> {
    if g.degree().unwrap_or(0) == 0 {
        return Ok((ln_abs_int(&g.leading_coeff()), 0.0));
    }
    let mut prec = DEFAULT_PREC;
    loop {
        let roots = certified_roots(g, prec)?;
        let mut value = ln_abs_int(&g.leading_coeff());
        let mut error = 0.0;
        let mut unresolved = false;
        for r in &roots {
            let (lo, hi) = r.ball.abs_bounds();
            if hi <= 1.0 {
                continue;
            }
            if lo > 1.0 {
                match r.ball.ln_abs() {
                    Some((v, e)) if e <= MAHLER_TOL => {
                        value += v;
                        error += e;
                    }
                    _ => unresolved = true,
                }
            } else {
                // |ρ| within the ball's width of 1: contribution in [0, ln hi]
                let half = 0.5 * hi.ln();
                value += half;
                error += half;
                if hi.ln() > MAHLER_TOL && r.ball.radius() > 0.0 && r.ball.radius() > 1e-14 {
                    unresolved = true;
                }
            }
        }
        if !unresolved || prec >= MAX_PREC {
            return Ok((value, error));
        }
        prec = (prec * 2).min(MAX_PREC);
    }
}

/// `d = 1` entropy of the action defined by `P`, equal to its Mahler measure.
pub fn entropy_d1_yuzvinskii(p: &IntPolynomial) -> Result<MahlerMeasure> {
    mahler_measure(p)
}
