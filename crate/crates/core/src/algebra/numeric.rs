//! Certified complex arithmetic at a chosen binary precision.
//!
//! A [`Ball`] is a fixed-point complex midpoint `(re + i im) * 2^-prec` with an
//! absolute error radius. Every operation widens the radius to cover both the
//! input radii and its own rounding, so the true value always lies in the ball.
//! Roots of integer polynomials are found in `f64` (Aberth–Ehrlich), polished by
//! Newton steps at full precision and certified with the inclusion radius
//! `deg * |f(z)| / |f'(z)|`.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::poly::IntPolynomial;
use crate::error::{Error, Result};

/// Largest working precision; keeps every radius representable as an `f64`.
pub const MAX_PREC: u32 = 960;
pub const DEFAULT_PREC: u32 = 128;

const LN2: f64 = std::f64::consts::LN_2;

/// Natural logarithm of a positive big integer without overflow.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "log of zero");
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap().ln() + shift as f64 * LN2
    }
}

/// `ln |x|` for a nonzero rational.
pub fn ln_abs_rational(x: &BigRational) -> f64 {
    let (num, den) = (x.numer().magnitude().clone(), x.denom().magnitude());
    let diff = BigInt::from(num.clone()) - BigInt::from(den.clone());
    // near 1 the two logs cancel, so go through ln_1p instead
    if (&diff << 1usize).magnitude() < den {
        return BigRational::new(diff, den.clone().into()).to_f64().unwrap().ln_1p();
    }
    ln_biguint(&num) - ln_biguint(den)
}

/// `x * 2^shift` as an `f64`, saturating only when the result itself is out of range.
fn scaled_f64(x: &BigInt, shift: i64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits() as i64;
    let drop = (bits - 60).max(0);
    let top = (x >> drop as usize).to_f64().unwrap();
    let total = (shift + drop).clamp(-4000, 4000) as i32;
    top * 2f64.powi(total / 2) * 2f64.powi(total - total / 2)
}

fn ulp(prec: u32) -> f64 {
    2f64.powi(-(prec as i32))
}

/// Complex ball with a fixed-point midpoint.
#[derive(Clone, Debug)]
pub struct Ball {
    re: BigInt,
    im: BigInt,
    prec: u32,
    rad: f64,
}

impl Ball {
    pub fn zero(prec: u32) -> Self {
        Self { re: BigInt::zero(), im: BigInt::zero(), prec, rad: 0.0 }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn radius(&self) -> f64 {
        self.rad
    }

    /// Rounds a rational to the nearest grid point.
    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let scaled = q.numer() << prec as usize;
        let den = q.denom();
        let (quot, rem) = num_integer::Integer::div_rem(&scaled, den);
        let exact = rem.is_zero();
        Self {
            re: quot,
            im: BigInt::zero(),
            prec,
            rad: if exact { 0.0 } else { ulp(prec) },
        }
    }

    pub fn from_int(k: &BigInt, prec: u32) -> Self {
        Self { re: k << prec as usize, im: BigInt::zero(), prec, rad: 0.0 }
    }

    pub fn from_c64(z: Complex64, prec: u32) -> Self {
        let conv = |v: f64| -> BigInt {
            let (m, e) = frexp(v);
            let mant = BigInt::from((m * 2f64.powi(53)) as i64);
            let sh = e - 53 + prec as i64;
            if sh >= 0 {
                mant << sh as usize
            } else {
                mant >> (-sh) as usize
            }
        };
        Self { re: conv(z.re), im: conv(z.im), prec, rad: 0.0 }
    }

    pub fn with_radius(mut self, rad: f64) -> Self {
        self.rad = rad;
        self
    }

    pub fn to_c64(&self) -> Complex64 {
        let sh = -(self.prec as i64);
        Complex64::new(scaled_f64(&self.re, sh), scaled_f64(&self.im, sh))
    }

    pub fn re_f64(&self) -> f64 {
        scaled_f64(&self.re, -(self.prec as i64))
    }

    pub fn im_f64(&self) -> f64 {
        scaled_f64(&self.im, -(self.prec as i64))
    }

    /// Drops the imaginary part, widening the radius to keep the enclosure.
    pub fn realify(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: BigInt::zero(),
            prec: self.prec,
            rad: self.rad + self.im_f64().abs() * (1.0 + 1e-12),
        }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im, prec: self.prec, rad: self.rad }
    }

    /// Changes the grid; lowering the precision widens the radius.
    pub fn set_prec(&self, prec: u32) -> Self {
        if prec >= self.prec {
            let sh = (prec - self.prec) as usize;
            Self { re: &self.re << sh, im: &self.im << sh, prec, rad: self.rad }
        } else {
            let sh = (self.prec - prec) as usize;
            Self {
                re: &self.re >> sh,
                im: &self.im >> sh,
                prec,
                rad: self.rad + 2.0 * ulp(prec),
            }
        }
    }

    /// Upper bound on `|mid|`.
    pub fn mid_abs(&self) -> f64 {
        let z = self.to_c64();
        z.norm() * (1.0 + 1e-12) + 1e-300
    }

    /// `ln |mid|`, valid far outside the `f64` range.
    pub fn ln_mid_abs(&self) -> f64 {
        let n2 = (&self.re * &self.re + &self.im * &self.im).to_biguint().unwrap();
        if n2.is_zero() {
            return f64::NEG_INFINITY;
        }
        0.5 * ln_biguint(&n2) - self.prec as f64 * LN2
    }

    /// Lower and upper bounds on the modulus of every point in the ball.
    pub fn abs_bounds(&self) -> (f64, f64) {
        let m = self.to_c64().norm();
        ((m * (1.0 - 1e-12) - self.rad).max(0.0), m * (1.0 + 1e-12) + self.rad)
    }

    /// `true` when zero is provably outside the ball.
    pub fn is_nonzero(&self) -> bool {
        self.abs_bounds().0 > 0.0
    }

    /// `(ln |z|, error bound)`; `None` when the ball is too wide relative to its
    /// midpoint for a useful logarithm.
    pub fn ln_abs(&self) -> Option<(f64, f64)> {
        let lm = self.ln_mid_abs();
        if !lm.is_finite() {
            return None;
        }
        if self.rad == 0.0 {
            return Some((lm, 1e-15 * lm.abs().max(1.0)));
        }
        let rel = (self.rad.ln() - lm).exp() + 1e-15;
        if rel >= 0.5 {
            return None;
        }
        let err = -(1.0 - rel).ln() + 1e-15 * lm.abs().max(1.0);
        Some((lm, err))
    }

    fn align(&self, o: &Self) -> (Self, Self) {
        let p = self.prec.max(o.prec);
        (self.set_prec(p), o.set_prec(p))
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        Self { re: a.re + b.re, im: a.im + b.im, prec: a.prec, rad: (a.rad + b.rad) * (1.0 + 1e-15) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        Self { re: a.re - b.re, im: a.im - b.im, prec: a.prec, rad: (a.rad + b.rad) * (1.0 + 1e-15) }
    }

    pub fn neg(&self) -> Self {
        Self { re: -&self.re, im: -&self.im, prec: self.prec, rad: self.rad }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        let p = a.prec as usize;
        let re = (&a.re * &b.re - &a.im * &b.im) >> p;
        let im = (&a.re * &b.im + &a.im * &b.re) >> p;
        let (ma, mb) = (a.mid_abs(), b.mid_abs());
        let rad = (ma * b.rad + mb * a.rad + a.rad * b.rad) * (1.0 + 1e-12) + 2.0 * ulp(a.prec);
        Self { re, im, prec: a.prec, rad }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let kf = k.to_f64().unwrap_or(f64::INFINITY).abs();
        Self { re: &self.re * k, im: &self.im * k, prec: self.prec, rad: self.rad * kf * (1.0 + 1e-12) }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_int(&BigInt::from(1), self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Shifts the midpoint by an `f64` offset (used by Newton polishing).
    fn sub_c64(&self, d: Complex64) -> Self {
        let db = Self::from_c64(d, self.prec);
        Self { re: &self.re - db.re, im: &self.im - db.im, prec: self.prec, rad: self.rad }
    }
}

fn frexp(v: f64) -> (f64, i64) {
    if v == 0.0 || !v.is_finite() {
        return (0.0, 0);
    }
    let e = v.abs().log2().floor() as i64 + 1;
    let m = v / 2f64.powi(e as i32);
    // renormalize against log2 rounding
    if m.abs() >= 1.0 {
        (m / 2.0, e + 1)
    } else if m.abs() < 0.5 {
        (m * 2.0, e - 1)
    } else {
        (m, e)
    }
}

/// Evaluates an integer polynomial at a ball (Horner).
pub fn eval_int_poly(f: &IntPolynomial, z: &Ball) -> Ball {
    let mut acc = Ball::zero(z.prec);
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(z).add(&Ball::from_int(c, z.prec));
    }
    acc
}

/// Evaluates a polynomial with rational coefficients at a ball (Horner).
pub fn eval_rat_coeffs(coeffs: &[BigRational], z: &Ball) -> Ball {
    let mut acc = Ball::zero(z.prec);
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(&Ball::from_rational(c, z.prec));
    }
    acc
}

/// A certified root of a square-free integer polynomial.
#[derive(Clone, Debug)]
pub struct RootBall {
    pub ball: Ball,
    pub is_real: bool,
}

fn aberth(f: &IntPolynomial) -> Vec<Complex64> {
    let n = f.degree().unwrap_or(0);
    let coeffs: Vec<f64> = f.coeffs().iter().map(|c| c.to_f64().unwrap()).collect();
    let lc = coeffs[n];
    let bound = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| (c / lc).abs())
            .fold(0.0f64, f64::max);
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    let r0 = bound.clamp(1e-3, 1e6) * 0.9;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn newton_polish(f: &IntPolynomial, df: &IntPolynomial, z: &Ball) -> Ball {
    let mut z = z.clone();
    let target = ulp(z.prec) * 4.0;
    for _ in 0..80 {
        let fz = eval_int_poly(f, &z);
        let dfz = eval_int_poly(df, &z);
        // f64 conversion of a tiny value could underflow; log-domain guard
        let lf = fz.ln_mid_abs();
        let ld = dfz.ln_mid_abs();
        if !lf.is_finite() {
            break;
        }
        let scale = ((lf - ld) / LN2).floor() as i64;
        let num = fz.to_c64_scaled(-scale);
        let den = dfz.to_c64_scaled(0);
        let delta_scaled = num / den;
        let delta = delta_scaled * 2f64.powi(scale.clamp(-1070, 1000) as i32);
        if !delta.is_finite() {
            break;
        }
        z = z.sub_c64(delta);
        if delta.norm() < target {
            break;
        }
    }
    z
}

impl Ball {
    fn to_c64_scaled(&self, extra: i64) -> Complex64 {
        let sh = extra - self.prec as i64;
        Complex64::new(scaled_f64(&self.re, sh), scaled_f64(&self.im, sh))
    }
}

/// Certified complex roots of a square-free integer polynomial of positive
/// degree, at the requested precision. Real roots come back with a zero
/// imaginary part and `is_real = true`.
pub fn certified_roots(f: &IntPolynomial, prec: u32) -> Result<Vec<RootBall>> {
    f.degree().filter(|&d| d > 0).ok_or_else(|| {
        Error::InvalidInput("root finding needs a polynomial of positive degree".into())
    })?;
    let prec = prec.min(MAX_PREC);
    let starts: Vec<Ball> = aberth(f).iter().map(|&z| Ball::from_c64(z, prec)).collect();
    Ok(classify(polish_and_certify(f, starts, prec)?))
}

/// Re-certifies a full set of root enclosures at a higher precision. The
/// output keeps the input order: entry `k` is the root enclosed by `roots[k]`.
pub fn refine_roots(f: &IntPolynomial, roots: &[Ball], prec: u32) -> Result<Vec<Ball>> {
    let prec = prec.min(MAX_PREC);
    let starts: Vec<Ball> = roots.iter().map(|z| z.set_prec(prec).with_radius(0.0)).collect();
    let fresh = polish_and_certify(f, starts, prec)?;
    for (k, b) in fresh.iter().enumerate() {
        let hits: Vec<usize> = roots
            .iter()
            .enumerate()
            .filter(|(_, old)| b.sub(old).mid_abs() <= (b.rad + old.rad) * (1.0 + 1e-9) + 1e-300)
            .map(|(j, _)| j)
            .collect();
        if hits != [k] {
            return Err(Error::Internal(format!(
                "root refinement of {f} lost track of root {k}"
            )));
        }
    }
    Ok(fresh)
}

fn polish_and_certify(f: &IntPolynomial, mut starts: Vec<Ball>, mut prec: u32) -> Result<Vec<Ball>> {
    let n = f.degree().unwrap();
    let df = f.derivative();
    loop {
        let polished: Vec<Ball> = starts.iter().map(|z| newton_polish(f, &df, z)).collect();
        let mut balls = Vec::with_capacity(n);
        let mut ok = true;
        for z in &polished {
            let fz = eval_int_poly(f, z);
            let dfz = eval_int_poly(&df, z);
            let (_, fhi) = fz.abs_bounds();
            let (dlo, _) = dfz.abs_bounds();
            if dlo <= 0.0 {
                ok = false;
                break;
            }
            let r = (n as f64) * fhi / dlo * (1.0 + 1e-9) + 2.0 * ulp(prec);
            balls.push(z.clone().with_radius(r));
        }
        if ok && pairwise_disjoint(&balls) {
            return Ok(balls);
        }
        if prec >= MAX_PREC {
            return Err(Error::Internal(format!(
                "could not certify the roots of {f} at {MAX_PREC} bits"
            )));
        }
        prec = (prec * 2).min(MAX_PREC);
        starts = polished.iter().map(|z| z.set_prec(prec).with_radius(0.0)).collect();
    }
}

fn pairwise_disjoint(balls: &[Ball]) -> bool {
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            let d = balls[i].sub(&balls[j]).to_c64().norm();
            if d * (1.0 - 1e-12) <= balls[i].rad + balls[j].rad {
                return false;
            }
        }
    }
    true
}

/// Marks roots real when the smallest real-centred disc covering the ball
/// meets no other ball: the conjugate of the enclosed root then has nowhere
/// else to go.
fn classify(balls: Vec<Ball>) -> Vec<RootBall> {
    let widened: Vec<Ball> = balls.iter().map(|b| b.realify()).collect();
    balls
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let w = &widened[i];
            let touches_axis = b.im_f64().abs() <= b.rad;
            let isolated = balls.iter().enumerate().all(|(j, o)| {
                j == i || w.sub(o).to_c64().norm() * (1.0 - 1e-12) > w.rad + o.rad
            });
            if touches_axis && isolated {
                RootBall { ball: w.clone(), is_real: true }
            } else {
                RootBall { ball: b.clone(), is_real: false }
            }
        })
        .collect()
}

/// Sign of the real part of the midpoint, used for deterministic ordering.
pub fn cmp_c64(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_roots() {
        let f = IntPolynomial::from_i64(&[-1, -1, 1]);
        let mut roots = certified_roots(&f, 128).unwrap();
        roots.sort_by(|a, b| cmp_c64(a.ball.to_c64(), b.ball.to_c64()));
        assert!(roots.iter().all(|r| r.is_real));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((roots[1].ball.re_f64() - phi).abs() < 1e-15);
        assert!((roots[0].ball.re_f64() - (1.0 - phi)).abs() < 1e-15);
        assert!(roots[0].ball.radius() < 1e-30);
    }

    #[test]
    fn complex_pair_detected() {
        let f = IntPolynomial::from_i64(&[1, 0, 1]);
        let roots = certified_roots(&f, 128).unwrap();
        assert!(roots.iter().all(|r| !r.is_real));
        for r in &roots {
            assert!((r.ball.im_f64().abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cube_root_of_two_high_precision() {
        let f = IntPolynomial::from_i64(&[-2, 0, 0, 1]);
        let roots = certified_roots(&f, 512).unwrap();
        let real: Vec<_> = roots.iter().filter(|r| r.is_real).collect();
        assert_eq!(real.len(), 1);
        assert!(real[0].ball.radius() < 1e-140);
        // cube it back: 2 within the propagated radius
        let c = real[0].ball.pow(3);
        let d = c.sub(&Ball::from_int(&BigInt::from(2), 512));
        assert!(d.abs_bounds().0 == 0.0 && d.abs_bounds().1 < 1e-140);
    }

    #[test]
    fn ball_log_is_certified() {
        let third = BigRational::new(1.into(), 3.into());
        let b = Ball::from_rational(&third, 128);
        let (v, e) = b.ln_abs().unwrap();
        assert!((v - (1.0f64 / 3.0).ln()).abs() <= e + 1e-15);
        assert!(e < 1e-14);
    }

    #[test]
    fn huge_integer_logs() {
        let x = BigUint::from(6u32).pow(500);
        assert!((ln_biguint(&x) - 500.0 * 6f64.ln()).abs() < 1e-9);
    }
}
