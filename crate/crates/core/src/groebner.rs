//! Buchberger's algorithm over a prime field in graded reverse lexicographic
//! order, with the standard-monomial count of a zero-dimensional quotient.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::algebra::fp::{inv_mod, is_prime, mul_mod};
use crate::error::{Error, Result};

pub type Monomial = Vec<u32>;

/// Resource caps for one basis computation.
#[derive(Clone, Debug)]
pub struct GroebnerLimits {
    pub max_basis: usize,
    pub max_pairs: usize,
    pub max_terms: usize,
}

impl Default for GroebnerLimits {
    fn default() -> Self {
        Self { max_basis: 4_000, max_pairs: 400_000, max_terms: 200_000 }
    }
}

pub fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&x| x as u64).sum();
    let db: u64 = b.iter().map(|&x| x as u64).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn mono_mul(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn mono_div(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn degree(a: &[u32]) -> u64 {
    a.iter().map(|&x| x as u64).sum()
}

/// Polynomial over `F_q` with terms sorted by decreasing grevlex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    terms: Vec<(Monomial, u64)>,
}

impl MPoly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// Builds from arbitrary terms: coefficients reduced mod `q`, like terms
    /// merged, zeros dropped.
    pub fn from_terms(q: u64, terms: impl IntoIterator<Item = (Monomial, u64)>) -> Self {
        let mut t: Vec<(Monomial, u64)> = terms.into_iter().map(|(m, c)| (m, c % q)).collect();
        t.sort_by(|a, b| grevlex(&b.0, &a.0));
        let mut out: Vec<(Monomial, u64)> = Vec::with_capacity(t.len());
        for (m, c) in t {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = (last.1 + c) % q,
                _ => out.push((m, c)),
            }
            if out.last().is_some_and(|l| l.1 == 0) {
                out.pop();
            }
        }
        Self { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Monomial, u64)] {
        &self.terms
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    fn monic(mut self, q: u64) -> Self {
        if let Some(&(_, c)) = self.terms.first() {
            if c != 1 {
                let inv = inv_mod(c, q);
                for t in &mut self.terms {
                    t.1 = mul_mod(t.1, inv, q);
                }
            }
        }
        self
    }

    /// `self - c * m * g`.
    fn sub_scaled(&self, c: u64, m: &[u32], g: &MPoly, q: u64) -> MPoly {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut i = 0;
        let mut gi = g.terms.iter().map(|(gm, gc)| (mono_mul(gm, m), (q - mul_mod(*gc, c, q)) % q)).peekable();
        while i < self.terms.len() || gi.peek().is_some() {
            let ord = match (self.terms.get(i), gi.peek()) {
                (Some(a), Some(b)) => grevlex(&a.0, &b.0),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => out.push(gi.next().unwrap()),
                Ordering::Equal => {
                    let (mm, b) = gi.next().unwrap();
                    let s = (self.terms[i].1 + b) % q;
                    if s != 0 {
                        out.push((mm, s));
                    }
                    i += 1;
                }
            }
        }
        MPoly { terms: out }
    }
}

/// A reduced Gröbner basis in `nvars` variables over `F_q`.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    q: u64,
    nvars: usize,
    polys: Vec<MPoly>,
}

fn reduce_full(f: &MPoly, basis: &[MPoly], q: u64, limits: &GroebnerLimits) -> Result<MPoly> {
    let mut rest = f.clone();
    let mut done: Vec<(Monomial, u64)> = Vec::new();
    while let Some((m, c)) = rest.terms.first().cloned() {
        match basis.iter().find(|g| divides(g.leading_monomial().unwrap(), &m)) {
            Some(g) => {
                let shift = mono_div(&m, g.leading_monomial().unwrap());
                rest = rest.sub_scaled(c, &shift, g, q);
                if rest.terms.len() > limits.max_terms {
                    return Err(Error::Resource(format!(
                        "polynomial with more than {} terms during reduction",
                        limits.max_terms
                    )));
                }
            }
            None => {
                done.push((m, c));
                rest.terms.remove(0);
            }
        }
    }
    Ok(MPoly { terms: done })
}

fn spoly(f: &MPoly, g: &MPoly, q: u64) -> MPoly {
    let (lf, lg) = (f.leading_monomial().unwrap(), g.leading_monomial().unwrap());
    let l = lcm(lf, lg);
    let a = MPoly { terms: f.terms.iter().map(|(m, c)| (mono_mul(m, &mono_div(&l, lf)), *c)).collect() };
    a.sub_scaled(1, &mono_div(&l, lg), g, q)
}

impl GroebnerBasis {
    /// Computes the reduced basis of the ideal generated by `gens`.
    pub fn compute(q: u64, nvars: usize, gens: &[MPoly], limits: &GroebnerLimits) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::InvalidInput(format!("{q} is not prime")));
        }
        let mut g: Vec<MPoly> = Vec::new();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut pending: HashSet<(usize, usize)> = HashSet::new();
        let mut processed = 0usize;

        let add = |p: MPoly, g: &mut Vec<MPoly>, pairs: &mut Vec<(usize, usize)>, pending: &mut HashSet<(usize, usize)>| -> Result<()> {
            let k = g.len();
            g.push(p);
            if g.len() > limits.max_basis {
                return Err(Error::Resource(format!("Gröbner basis exceeds {} elements", limits.max_basis)));
            }
            for i in 0..k {
                pairs.push((i, k));
                pending.insert((i, k));
            }
            Ok(())
        };

        let mut inputs: Vec<MPoly> = gens.iter().filter(|p| !p.is_zero()).cloned().collect();
        inputs.sort_by(|a, b| grevlex(a.leading_monomial().unwrap(), b.leading_monomial().unwrap()));
        for f in inputs {
            let r = reduce_full(&f, &g, q, limits)?;
            if !r.is_zero() {
                add(r.monic(q), &mut g, &mut pairs, &mut pending)?;
            }
        }

        while !pairs.is_empty() {
            // normal strategy: smallest lcm first
            let (idx, _) = pairs
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    let la = lcm(g[a.0].leading_monomial().unwrap(), g[a.1].leading_monomial().unwrap());
                    let lb = lcm(g[b.0].leading_monomial().unwrap(), g[b.1].leading_monomial().unwrap());
                    grevlex(&la, &lb)
                })
                .unwrap();
            let (i, j) = pairs.swap_remove(idx);
            pending.remove(&(i, j));
            processed += 1;
            if processed > limits.max_pairs {
                return Err(Error::Resource(format!("more than {} critical pairs", limits.max_pairs)));
            }
            let (li, lj) = (g[i].leading_monomial().unwrap(), g[j].leading_monomial().unwrap());
            if li.iter().zip(lj.iter()).all(|(a, b)| *a == 0 || *b == 0) {
                continue;
            }
            let l = lcm(li, lj);
            let key = |a: usize, b: usize| (a.min(b), a.max(b));
            let chain = (0..g.len()).any(|k| {
                k != i
                    && k != j
                    && divides(g[k].leading_monomial().unwrap(), &l)
                    && !pending.contains(&key(i, k))
                    && !pending.contains(&key(j, k))
            });
            if chain {
                continue;
            }
            let r = reduce_full(&spoly(&g[i], &g[j], q), &g, q, limits)?;
            if !r.is_zero() {
                add(r.monic(q), &mut g, &mut pairs, &mut pending)?;
            }
        }
        Ok(Self { q, nvars, polys: interreduce(g, q, limits)? })
    }

    pub fn polys(&self) -> &[MPoly] {
        &self.polys
    }

    pub fn reduce(&self, f: &MPoly) -> Result<MPoly> {
        reduce_full(f, &self.polys, self.q, &GroebnerLimits::default())
    }

    pub fn contains(&self, f: &MPoly) -> Result<bool> {
        Ok(self.reduce(f)?.is_zero())
    }

    /// True when every variable has a pure power among the leading monomials.
    pub fn is_zero_dimensional(&self) -> bool {
        self.pure_power_bounds().is_some()
    }

    fn pure_power_bounds(&self) -> Option<Vec<u32>> {
        (0..self.nvars)
            .map(|v| {
                self.polys
                    .iter()
                    .filter_map(|p| {
                        let m = p.leading_monomial().unwrap();
                        let pure = m.iter().enumerate().all(|(k, &e)| k == v || e == 0);
                        (pure && m[v] > 0).then_some(m[v])
                    })
                    .min()
            })
            .collect()
    }

    /// `dim_{F_q}` of the quotient ring, or `None` when it is infinite.
    pub fn quotient_dimension(&self) -> Option<u64> {
        if self.polys.iter().any(|p| degree(p.leading_monomial().unwrap()) == 0) {
            return Some(0);
        }
        let bounds = self.pure_power_bounds()?;
        let leads: Vec<&Monomial> = self.polys.iter().map(|p| p.leading_monomial().unwrap()).collect();
        let mut m = vec![0u32; self.nvars];
        Some(count_standard(&leads, &bounds, &mut m, 0))
    }
}

fn count_standard(leads: &[&Monomial], bounds: &[u32], m: &mut Vec<u32>, var: usize) -> u64 {
    if var == m.len() {
        return 1;
    }
    let mut total = 0;
    for e in 0..bounds[var] {
        m[var] = e;
        // divisibility is monotone in each exponent, so the first hit ends the row
        let rest_zero: Vec<u32> = m.iter().enumerate().map(|(k, &x)| if k > var { 0 } else { x }).collect();
        if leads.iter().any(|l| divides(l, &rest_zero)) {
            break;
        }
        total += count_standard(leads, bounds, m, var + 1);
    }
    m[var] = 0;
    total
}

fn interreduce(g: Vec<MPoly>, q: u64, limits: &GroebnerLimits) -> Result<Vec<MPoly>> {
    let mut minimal: Vec<MPoly> = Vec::new();
    for (i, p) in g.iter().enumerate() {
        let lp = p.leading_monomial().unwrap();
        let redundant = g.iter().enumerate().any(|(j, other)| {
            let lo = other.leading_monomial().unwrap();
            j != i && divides(lo, lp) && (lo != lp || j < i)
        });
        if !redundant {
            minimal.push(p.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<MPoly> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
        let head = MPoly { terms: vec![minimal[i].terms[0].clone()] };
        let tail = MPoly { terms: minimal[i].terms[1..].to_vec() };
        let r = reduce_full(&tail, &others, q, limits)?;
        let mut terms = head.terms;
        terms.extend(r.terms);
        out.push(MPoly { terms });
    }
    out.sort_by(|a, b| grevlex(a.leading_monomial().unwrap(), b.leading_monomial().unwrap()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(q: u64, terms: &[(&[u32], u64)]) -> MPoly {
        MPoly::from_terms(q, terms.iter().map(|(m, c)| (m.to_vec(), *c)))
    }

    #[test]
    fn ordering() {
        assert_eq!(grevlex(&[1, 1], &[2, 0]), Ordering::Less);
        assert_eq!(grevlex(&[0, 2], &[1, 1]), Ordering::Less);
        assert_eq!(grevlex(&[1, 0, 0], &[0, 0, 1]), Ordering::Greater);
    }

    #[test]
    fn univariate_dimension() {
        // x^5 - 1, x^3 - 1 over F_7: gcd is x - 1
        let b = GroebnerBasis::compute(
            7,
            1,
            &[p(7, &[(&[5], 1), (&[0], 6)]), p(7, &[(&[3], 1), (&[0], 6)])],
            &GroebnerLimits::default(),
        )
        .unwrap();
        assert_eq!(b.quotient_dimension(), Some(1));
    }

    #[test]
    fn two_variable_points() {
        // x^2 - 1, y^2 - 1, x y - 1 over F_3: points (1,1), (-1,-1)
        let g = [
            p(3, &[(&[2, 0], 1), (&[0, 0], 2)]),
            p(3, &[(&[0, 2], 1), (&[0, 0], 2)]),
            p(3, &[(&[1, 1], 1), (&[0, 0], 2)]),
        ];
        let b = GroebnerBasis::compute(3, 2, &g, &GroebnerLimits::default()).unwrap();
        assert_eq!(b.quotient_dimension(), Some(2));
        assert!(b.contains(&p(3, &[(&[1, 0], 1), (&[0, 1], 2)])).unwrap());
    }

    #[test]
    fn positive_dimensional_and_unit_ideals() {
        let b = GroebnerBasis::compute(2, 2, &[p(2, &[(&[1, 0], 1), (&[0, 1], 1)])], &GroebnerLimits::default()).unwrap();
        assert!(!b.is_zero_dimensional());
        assert_eq!(b.quotient_dimension(), None);
        let u = GroebnerBasis::compute(
            2,
            2,
            &[p(2, &[(&[1, 0], 1)]), p(2, &[(&[1, 0], 1), (&[0, 0], 1)])],
            &GroebnerLimits::default(),
        )
        .unwrap();
        assert_eq!(u.quotient_dimension(), Some(0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        // Quotient of F_q[x,y] by (f(x), g(y)) has dimension deg f * deg g, and a
        // third generator from the ideal leaves it unchanged.
        #[test]
        fn product_of_univariates(a in 1u32..5, b in 1u32..5, c0 in 0u64..5, c1 in 0u64..5, mix in 0u64..5) {
            let q = 5;
            let f = p(q, &[(&[a, 0], 1), (&[0, 0], c0)]);
            let g = p(q, &[(&[0, b], 1), (&[0, 0], c1)]);
            let h = f.sub_scaled(mix, &[0, 1], &g, q).sub_scaled(1, &[0, 0], &g, q);
            let basis = GroebnerBasis::compute(q, 2, &[f, g, h], &GroebnerLimits::default()).unwrap();
            prop_assert_eq!(basis.quotient_dimension(), Some((a * b) as u64));
        }
    }
}
