//! Arithmetic over prime fields F_p: dense univariate polynomials with
//! factorization (square-free, distinct-degree, equal-degree), and matrices
//! with exact Gaussian elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::IntPolynomial;
use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Reduces a signed integer into `[0, p)`.
pub fn reduce_i64(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

pub fn reduce_bigint(a: &BigInt, p: u64) -> u64 {
    a.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Deterministic Miller–Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Dense polynomial over F_p, ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { p, coeffs }
    }

    pub fn from_int(f: &IntPolynomial, p: u64) -> Self {
        Self::new(p, f.coeffs().iter().map(|c| reduce_bigint(c, p)).collect())
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    /// `x`
    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lc(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    /// Lift to Z[x] with coefficients in `[0, p)`.
    pub fn lift(&self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lc(), self.p);
        Self::new(self.p, self.coeffs.iter().map(|&c| mul_mod(c, inv, self.p)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(
            self.p,
            (0..n)
                .map(|i| {
                    (self.coeffs.get(i).copied().unwrap_or(0) + o.coeffs.get(i).copied().unwrap_or(0))
                        % self.p
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(
            self.p,
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).copied().unwrap_or(0);
                    let b = o.coeffs.get(i).copied().unwrap_or(0);
                    (a + self.p - b) % self.p
                })
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(self.p, vec![]);
        }
        let mut out = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        Self::new(self.p, out)
    }

    pub fn div_rem(&self, b: &Self) -> (Self, Self) {
        let db = b.degree().expect("division by zero polynomial");
        let p = self.p;
        let inv = inv_mod(b.lc(), p);
        let mut r = self.coeffs.clone();
        if r.len() <= db {
            return (Self::new(p, vec![]), self.clone());
        }
        let mut q = vec![0u64; r.len() - db];
        for k in (0..q.len()).rev() {
            let c = mul_mod(r[k + db], inv, p);
            q[k] = c;
            if c != 0 {
                for (i, &bc) in b.coeffs.iter().enumerate() {
                    r[k + i] = (r[k + i] + p - mul_mod(c, bc, p)) % p;
                }
            }
        }
        r.truncate(db);
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, b: &Self) -> Self {
        self.div_rem(b).1
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mul_mod(c, i as u64 % self.p, self.p))
                .collect(),
        )
    }

    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut r = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        r
    }

    /// Inverse of the Frobenius on a polynomial whose derivative vanishes:
    /// `sum a_{ip} x^{ip} -> sum a_{ip} x^i` (coefficients are fixed by Frobenius in F_p).
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        Self::new(self.p, self.coeffs.iter().step_by(p).copied().collect())
    }

    /// Complete factorization into monic irreducibles with multiplicities,
    /// sorted by (degree, coefficients). The input must be nonzero.
    pub fn factor(&self) -> Vec<(FpPoly, usize)> {
        let mut out: Vec<(FpPoly, usize)> = Vec::new();
        for (sf, mult) in self.monic().square_free() {
            for (g, d) in sf.distinct_degree() {
                for h in g.equal_degree(d) {
                    out.push((h, mult));
                }
            }
        }
        out.sort_by(|a, b| {
            (a.0.degree(), &a.0.coeffs, a.1).cmp(&(b.0.degree(), &b.0.coeffs, b.1))
        });
        out
    }

    fn square_free(&self) -> Vec<(FpPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let p = self.p as usize;
        let df = self.derivative();
        if df.is_zero() {
            for (g, m) in self.pth_root().square_free() {
                out.push((g, m * p));
            }
            return out;
        }
        let mut c = self.gcd(&df);
        let mut w = self.div_rem(&c).0;
        let mut i = 1;
        while !w.is_one() {
            let y = w.gcd(&c);
            let z = w.div_rem(&y).0;
            if z.degree().unwrap_or(0) > 0 {
                out.push((z.monic(), i));
            }
            i += 1;
            w = y;
            c = c.div_rem(&w).0;
        }
        if c.degree().unwrap_or(0) > 0 {
            for (g, m) in c.pth_root().square_free() {
                out.push((g, m * p));
            }
        }
        out
    }

    /// Splits a monic square-free polynomial into products of irreducibles of
    /// equal degree: `(product, degree)`.
    fn distinct_degree(&self) -> Vec<(FpPoly, usize)> {
        let mut out = Vec::new();
        let mut f = self.clone();
        let x = Self::x(self.p);
        let mut h = x.rem(&f);
        let mut d = 0;
        while let Some(df) = f.degree() {
            if df < 2 * (d + 1) {
                break;
            }
            d += 1;
            h = h.pow_mod(self.p as u128, &f);
            let g = h.sub(&x).gcd(&f);
            if !g.is_one() {
                f = f.div_rem(&g).0;
                h = h.rem(&f);
                out.push((g, d));
            }
        }
        if f.degree().unwrap_or(0) > 0 {
            let deg = f.degree().unwrap();
            out.push((f, deg));
        }
        out
    }

    /// Cantor–Zassenhaus equal-degree splitting with a fixed-seed generator.
    fn equal_degree(&self, d: usize) -> Vec<FpPoly> {
        let n = self.degree().unwrap_or(0);
        if n == d {
            return vec![self.monic()];
        }
        let p = self.p;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p ^ (n as u64) << 8);
        loop {
            let a = Self::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let b = if p == 2 {
                // trace map a + a^2 + ... + a^(2^(d-1))
                let mut t = a.rem(self);
                let mut acc = t.clone();
                for _ in 1..d {
                    t = t.mul(&t).rem(self);
                    acc = acc.add(&t);
                }
                acc
            } else {
                // a^((p^d - 1)/2) = (a^(1 + p + ... + p^(d-1)))^((p - 1)/2)
                let mut t = a.rem(self);
                let mut s = t.clone();
                for _ in 1..d {
                    t = t.pow_mod(p as u128, self);
                    s = s.mul(&t).rem(self);
                }
                s.pow_mod(((p - 1) / 2) as u128, self).sub(&Self::one(p))
            };
            let g = b.gcd(self);
            let dg = g.degree().unwrap_or(0);
            if dg > 0 && dg < n {
                let mut out = g.equal_degree(d);
                out.extend(self.div_rem(&g).0.monic().equal_degree(d));
                return out;
            }
        }
    }
}

/// Dense matrix over F_q, q prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqMatrix {
    q: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FqMatrix {
    pub fn zeros(q: u64, rows: usize, cols: usize) -> Self {
        Self { q, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(q: u64, n: usize) -> Self {
        let mut m = Self::zeros(q, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows of residues; checks the prime and shape.
    pub fn from_rows(q: u64, rows: &[Vec<u64>]) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::InvalidInput(format!("{q} is not prime")));
        }
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        if rows.iter().flatten().any(|&x| x >= q) {
            return Err(Error::InvalidInput(format!("matrix entry outside [0, {q})")));
        }
        Ok(Self { q, rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.q;
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let q = self.q;
        let mut m = self.data.clone();
        let cols = self.cols;
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..self.rows).find(|&r| m[r * cols + c] != 0) else {
                continue;
            };
            if piv != rank {
                for k in 0..cols {
                    m.swap(piv * cols + k, rank * cols + k);
                }
            }
            let inv = inv_mod(m[rank * cols + c], q);
            for k in c..cols {
                m[rank * cols + k] = mul_mod(m[rank * cols + k], inv, q);
            }
            for r in 0..self.rows {
                if r == rank {
                    continue;
                }
                let f = m[r * cols + c];
                if f == 0 {
                    continue;
                }
                for k in c..cols {
                    let sub = mul_mod(f, m[rank * cols + k], q);
                    m[r * cols + k] = (m[r * cols + k] + q - sub) % q;
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

/// Rank of a matrix over F_q (`fq_rank`).
pub fn fq_rank(a: &FqMatrix) -> usize {
    a.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        assert_eq!(fq_rank(&FqMatrix::identity(2, 3)), 3);
        assert_eq!(fq_rank(&FqMatrix::zeros(3, 4, 4)), 0);
        let m = FqMatrix::from_rows(2, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(fq_rank(&m), 1);
    }

    #[test]
    fn malformed_matrices() {
        assert!(FqMatrix::from_rows(4, &[vec![1]]).is_err());
        assert!(FqMatrix::from_rows(5, &[vec![1, 2], vec![1]]).is_err());
        assert!(FqMatrix::from_rows(5, &[vec![7]]).is_err());
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
    }

    fn fp(p: u64, c: &[u64]) -> FpPoly {
        FpPoly::new(p, c.to_vec())
    }

    #[test]
    fn golden_polynomial_mod_small_primes() {
        // t^2 - t - 1 is irreducible mod 2 and (t + 2)^2 mod 5
        let f = IntPolynomial::from_i64(&[-1, -1, 1]);
        let f2 = FpPoly::from_int(&f, 2).factor();
        assert_eq!(f2, vec![(fp(2, &[1, 1, 1]), 1)]);
        let f5 = FpPoly::from_int(&f, 5).factor();
        assert_eq!(f5, vec![(fp(5, &[2, 1]), 2)]);
        let f11 = FpPoly::from_int(&f, 11).factor();
        assert_eq!(f11.len(), 2);
    }

    #[test]
    fn inseparable_input() {
        // (x^2 + 1)^2 = x^4 + 1 over F_2, and x^4 + x^2 + 1 = (x^2 + x + 1)^2
        let f = fp(2, &[1, 0, 0, 0, 1]);
        assert_eq!(f.factor(), vec![(fp(2, &[1, 1]), 4)]);
        let g = fp(2, &[1, 0, 1, 0, 1]);
        assert_eq!(g.factor(), vec![(fp(2, &[1, 1, 1]), 2)]);
        // x^3 - 1 over F_3 = (x - 1)^3
        let h = fp(3, &[2, 0, 0, 1]);
        assert_eq!(h.factor(), vec![(fp(3, &[2, 1]), 3)]);
    }

    fn naive_rank(m: &FqMatrix) -> usize {
        // largest k with a nonzero k x k minor; determinants by permutation expansion
        fn det(m: &FqMatrix, rows: &[usize], cols: &[usize]) -> u64 {
            let q = m.q();
            if rows.is_empty() {
                return 1;
            }
            let mut total = 0u64;
            for (j, &c) in cols.iter().enumerate() {
                let a = m.get(rows[0], c);
                if a == 0 {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &c)| c).collect();
                let sub = mul_mod(a, det(m, &rows[1..], &rest), q);
                total = if j % 2 == 0 { (total + sub) % q } else { (total + q - sub) % q };
            }
            total
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        let kmax = m.rows().min(m.cols());
        for k in (1..=kmax).rev() {
            for rs in subsets(m.rows(), k) {
                for cs in subsets(m.cols(), k) {
                    if det(m, &rs, &cs) != 0 {
                        return k;
                    }
                }
            }
        }
        0
    }

    fn any_matrix() -> impl Strategy<Value = FqMatrix> {
        (prop::sample::select(vec![2u64, 3, 5]), 1usize..=6, 1usize..=6).prop_flat_map(|(q, r, c)| {
            prop::collection::vec(0..q, r * c).prop_map(move |d| {
                let rows: Vec<Vec<u64>> = d.chunks(c).map(|x| x.to_vec()).collect();
                FqMatrix::from_rows(q, &rows).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn rank_matches_minors(m in any_matrix()) {
            prop_assert_eq!(fq_rank(&m), naive_rank(&m));
        }

        #[test]
        fn factorization_multiplies_back(
            p in prop::sample::select(vec![2u64, 3, 5, 7, 13]),
            c in prop::collection::vec(0u64..13, 2..9),
        ) {
            let mut c = c;
            c.push(1);
            let f = FpPoly::new(p, c);
            prop_assume!(f.degree().unwrap_or(0) > 0);
            let mut prod = FpPoly::one(p);
            for (g, m) in f.factor() {
                // every factor is irreducible: no roots over F_p for degree 2-3,
                // and no smaller-degree common factor with x^(p^k) - x
                let dg = g.degree().unwrap();
                for k in 1..dg {
                    if dg % k == 0 || 2 * k <= dg {
                        let mut xp = FpPoly::x(p);
                for _ in 0..k {
                    xp = xp.pow_mod(p as u128, &g);
                }
                let xp = xp.sub(&FpPoly::x(p));
                        prop_assert!(xp.gcd(&g).is_one());
                    }
                }
                for _ in 0..m {
                    prod = prod.mul(&g);
                }
            }
            prop_assert_eq!(prod, f.monic());
        }
    }
}
