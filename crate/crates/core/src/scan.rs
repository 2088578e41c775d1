//! Growth rates `f(n) = log|F(α^n)| / |n|`, the split `f = g + h(n/|n|)`,
//! shell scans, and lattice points along non-expansive lines.

use std::io::Write;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::action::{PlacedComponent, PreparedSpec};
use crate::algebra::numeric::ln_biguint;
use crate::counting::count_composite;
use crate::entropy::{nonexpansive_candidates, EntropyFunction};
use crate::error::{Error, Result};
use crate::field::{FieldElement, Place, PlaceKind};
use crate::lattice::{euclidean_norm, is_half_representative, sup_norm};

/// Allowed disagreement between the two routes to `g`.
pub const DECOMPOSITION_TOL: f64 = 1e-8;
/// Default cap on lattice points per scan.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// `ξ^-n` when `|ξ^n|_v > 1`, otherwise `ξ^n`.
pub fn phi_v(pc: &PlacedComponent, v: &Place, n: &[i64]) -> Result<FieldElement> {
    if n.iter().all(|&x| x == 0) {
        return Err(Error::identity_direction());
    }
    let x = pc.xi_pow(n)?;
    let k = pc.field();
    let expanding = match v.kind() {
        PlaceKind::Finite { .. } => k.ord_v(v, &x)? < 0,
        PlaceKind::Archimedean { .. } => {
            let l = k.log_abs_v(v, &x)?;
            // an undecidable tie means |ξ^n|_v = 1 to working precision, where
            // both branches give the same |1 - φ|_v
            l.value > l.error
        }
    };
    if expanding {
        k.inv(&x)
    } else {
        Ok(x)
    }
}

fn g_direct_component(pc: &PlacedComponent, n: &[i64]) -> Result<f64> {
    let k = pc.field();
    let mut total = 0.0;
    for v in pc.places() {
        let one_minus = k.sub(&k.one(), &phi_v(pc, v, n)?);
        if one_minus.is_zero() {
            return Err(Error::Domain(format!("xi^n = 1 at n = {n:?}: the action is not mixing")));
        }
        total += k.log_abs_v(v, &one_minus)?.value;
    }
    Ok(total)
}

/// `log(count(n)) / |n|_2`.
pub fn f_value(spec: &PreparedSpec, n: &[i64]) -> Result<f64> {
    let c = count_composite(spec, n)?;
    Ok(ln_biguint(&c.value) / euclidean_norm(n))
}

/// `g(n) = (1/|n|) sum_p m(p) sum_v log|1 - φ_v(n)|_v`, checked against
/// `f(n) - h(n/|n|)`.
pub fn g_value(spec: &PreparedSpec, n: &[i64]) -> Result<f64> {
    let ef = EntropyFunction::from_spec(spec)?;
    let rec = point_record(spec, Some(&ef), n)?;
    Ok(rec.g.expect("entropy data present"))
}

/// One evaluated lattice point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointRecord {
    pub n: Vec<i64>,
    pub count: BigUint,
    pub f: f64,
    /// `h(n/|n|)`; absent for actions with characteristic-p components.
    pub h_hat: Option<f64>,
    pub g: Option<f64>,
    /// `f - h_hat`, the indirect route to `g`.
    pub g_indirect: Option<f64>,
}

impl PointRecord {
    pub fn norm(&self) -> f64 {
        euclidean_norm(&self.n)
    }
}

/// Evaluates count, `f`, `h(n/|n|)` and both routes to `g` at `n`.
pub fn point_record(spec: &PreparedSpec, ef: Option<&EntropyFunction>, n: &[i64]) -> Result<PointRecord> {
    let count = count_composite(spec, n)?.value;
    let r = euclidean_norm(n);
    let f = ln_biguint(&count) / r;
    let (h_hat, g, g_indirect) = match ef {
        Some(ef) => {
            let unit: Vec<f64> = n.iter().map(|&x| x as f64 / r).collect();
            let h = ef.eval(&unit);
            let mut direct = 0.0;
            for (pc, m) in spec.placed_components() {
                direct += m as f64 * g_direct_component(pc, n)?;
            }
            direct /= r;
            let indirect = f - h;
            let tol = DECOMPOSITION_TOL.max(1e-12 * f.abs().max(h.abs()));
            if (direct - indirect).abs() > tol {
                return Err(Error::Internal(format!(
                    "g at n = {n:?}: direct {direct} vs f - h = {indirect}"
                )));
            }
            (Some(h), Some(direct), Some(indirect))
        }
        None => (None, None, None),
    };
    Ok(PointRecord { n: n.to_vec(), count, f, h_hat, g, g_indirect })
}

/// Norm used to select points into `[r_min, r_max]`. `f` always divides by
/// the Euclidean norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionNorm {
    Euclidean,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// One representative of each `±n` pair (first nonzero coordinate positive).
    HalfPairs,
    /// Every `n` with last coordinate `>= 0`, both signs on that hyperplane.
    UpperHalf,
    /// Every `n`.
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanOptions {
    pub norm: SelectionNorm,
    pub region: Region,
    pub budget: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { norm: SelectionNorm::Euclidean, region: Region::HalfPairs, budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShellStats {
    pub r_lo: f64,
    pub r_hi: f64,
    pub points: usize,
    pub f_min: f64,
    pub f_max: f64,
    pub g_abs_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub r_min: f64,
    pub r_max: f64,
    pub options: ScanOptions,
    pub records: Vec<PointRecord>,
    /// Points where the count is undefined (non-mixing or infinite), with the reason.
    pub skipped: Vec<(Vec<i64>, String)>,
    pub shells: Vec<ShellStats>,
    /// Number of outer shells used for the estimates.
    pub outer_shells: usize,
    pub c1_estimate: f64,
    pub c2_estimate: f64,
    /// Estimates after dropping the single most extreme point.
    pub c1_trimmed: f64,
    pub c2_trimmed: f64,
    pub argmax: Vec<i64>,
    pub argmin: Vec<i64>,
    /// Set when the budget cut the scan short.
    pub partial: bool,
}

fn selection_norm(n: &[i64], norm: SelectionNorm) -> f64 {
    match norm {
        SelectionNorm::Euclidean => euclidean_norm(n),
        SelectionNorm::Max => sup_norm(n) as f64,
    }
}

fn in_region(n: &[i64], region: Region) -> bool {
    match region {
        Region::HalfPairs => is_half_representative(n),
        Region::UpperHalf => *n.last().unwrap() >= 0,
        Region::Full => true,
    }
}

/// Lattice points selected by a scan, ordered by shell and then
/// lexicographically. Returns the points and whether the budget was hit.
pub fn scan_points(d: usize, r_min: f64, r_max: f64, opts: &ScanOptions) -> (Vec<Vec<i64>>, bool) {
    let r = r_max.floor() as i64;
    let mut pts: Vec<(usize, Vec<i64>)> = Vec::new();
    let mut n = vec![-r; d];
    loop {
        if n.iter().any(|&x| x != 0) && in_region(&n, opts.region) {
            let s = selection_norm(&n, opts.norm);
            if s >= r_min && s <= r_max {
                pts.push((((s - r_min).floor() as usize), n.clone()));
            }
        }
        let mut i = d;
        let done = loop {
            if i == 0 {
                break true;
            }
            i -= 1;
            if n[i] < r {
                n[i] += 1;
                break false;
            }
            n[i] = -r;
        };
        if done {
            break;
        }
    }
    pts.sort();
    let partial = pts.len() > opts.budget;
    pts.truncate(opts.budget);
    (pts.into_iter().map(|(_, n)| n).collect(), partial)
}

/// Evaluates every selected lattice point with `r_min <= |n| <= r_max` and
/// summarizes unit-width shells. `C1`/`C2` estimates come from the outermost
/// 20% of shells.
pub fn shell_scan(spec: &PreparedSpec, r_min: f64, r_max: f64, opts: &ScanOptions) -> Result<ScanReport> {
    if !(r_min > 0.0 && r_min < r_max) {
        return Err(Error::InvalidInput(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
    }
    let ef = match EntropyFunction::from_spec(spec) {
        Ok(e) => Some(e),
        Err(Error::NotAvailable(_)) => None,
        Err(e) => return Err(e),
    };
    let (points, partial) = scan_points(spec.d(), r_min, r_max, opts);
    let results: Vec<Result<PointRecord>> =
        points.par_iter().map(|n| point_record(spec, ef.as_ref(), n)).collect();
    let mut records = Vec::with_capacity(results.len());
    let mut skipped = Vec::new();
    for (n, r) in points.iter().zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(e @ (Error::Domain(_) | Error::InfiniteCount { .. })) => skipped.push((n.clone(), e.to_string())),
            Err(e) => return Err(e),
        }
    }
    if records.is_empty() {
        return Err(Error::InvalidInput(format!("no lattice points with norm in [{r_min}, {r_max}]")));
    }

    let nshells = ((r_max - r_min).ceil() as usize).max(1);
    let shell_of = |rec: &PointRecord| {
        let s = selection_norm(&rec.n, opts.norm);
        (((s - r_min).floor()) as usize).min(nshells - 1)
    };
    let mut shells: Vec<ShellStats> = (0..nshells)
        .map(|k| ShellStats {
            r_lo: r_min + k as f64,
            r_hi: (r_min + k as f64 + 1.0).min(r_max),
            points: 0,
            f_min: f64::INFINITY,
            f_max: f64::NEG_INFINITY,
            g_abs_max: None,
        })
        .collect();
    for rec in &records {
        let s = &mut shells[shell_of(rec)];
        s.points += 1;
        s.f_min = s.f_min.min(rec.f);
        s.f_max = s.f_max.max(rec.f);
        if let Some(g) = rec.g {
            s.g_abs_max = Some(s.g_abs_max.map_or(g.abs(), |m: f64| m.max(g.abs())));
        }
    }
    let outer = ((nshells as f64 * 0.2).ceil() as usize).max(1);
    let mut outer_recs: Vec<&PointRecord> = records.iter().filter(|r| shell_of(r) >= nshells - outer).collect();
    if outer_recs.is_empty() {
        outer_recs = records.iter().collect();
    }
    let argmax = outer_recs.iter().max_by(|a, b| a.f.total_cmp(&b.f)).unwrap();
    let argmin = outer_recs.iter().min_by(|a, b| a.f.total_cmp(&b.f)).unwrap();
    let mut fs: Vec<f64> = outer_recs.iter().map(|r| r.f).collect();
    fs.sort_by(f64::total_cmp);
    let (c2_trimmed, c1_trimmed) = if fs.len() > 2 { (fs[1], fs[fs.len() - 2]) } else { (fs[0], fs[fs.len() - 1]) };
    Ok(ScanReport {
        r_min,
        r_max,
        options: opts.clone(),
        c1_estimate: argmax.f,
        c2_estimate: argmin.f,
        argmax: argmax.n.clone(),
        argmin: argmin.n.clone(),
        c1_trimmed,
        c2_trimmed,
        outer_shells: outer,
        records,
        skipped,
        shells,
        partial,
    })
}

/// Continued fraction convergents `p_k / q_k` of `x > 0`.
pub fn convergents(x: f64, k: usize) -> Vec<(i64, i64)> {
    let mut out = Vec::with_capacity(k);
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, 0i64, 1i64);
    let mut y = x;
    for _ in 0..k {
        let a = y.floor();
        let (p, q) = (a as i64 * p0 + p1, a as i64 * q0 + q1);
        // p_{-1}/q_{-1} = 1/0 and p_{-2}/q_{-2} = 0/1 seed the recursion
        out.push((p, q));
        p1 = p0;
        q1 = q0;
        p0 = p;
        q0 = q;
        let frac = y - a;
        if frac < 1e-12 {
            break;
        }
        y = 1.0 / frac;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergentPoint {
    pub index: usize,
    pub n: Vec<i64>,
    pub record: PointRecord,
}

/// Lattice points closest to the line `normal . x = 0` of a `d = 2` spec:
/// the continued-fraction convergents of its slope, starting from index 0.
/// Axis lines give the multiples of the axis vector.
pub fn convergent_sequence(spec: &PreparedSpec, hyperplane: usize, k: usize) -> Result<Vec<ConvergentPoint>> {
    if spec.d() != 2 {
        return Err(Error::InvalidInput("convergent sequences need d = 2".into()));
    }
    let ef = EntropyFunction::from_spec(spec)?;
    let planes = nonexpansive_candidates(&ef);
    let plane = planes
        .get(hyperplane)
        .ok_or_else(|| Error::InvalidInput(format!("hyperplane index {hyperplane} out of range (have {})", planes.len())))?;
    // direction of the line
    let (wx, wy) = (-plane.normal[1], plane.normal[0]);
    let pts: Vec<Vec<i64>> = if plane.is_axis() {
        let (ux, uy) = ((wx.abs() > 0.0) as i64, (wy.abs() > 0.0) as i64);
        (1..=k as i64).map(|j| vec![j * ux, j * uy]).collect()
    } else {
        let (sx, sy) = (wx.signum() as i64, wy.signum() as i64);
        convergents((wy / wx).abs(), k).into_iter().map(|(p, q)| vec![sx * q, sy * p]).collect()
    };
    pts.into_iter()
        .enumerate()
        .map(|(index, n)| Ok(ConvergentPoint { index, record: point_record(spec, Some(&ef), &n)?, n }))
        .collect()
}

/// `x` with 12 significant digits, fixed notation for moderate exponents.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        let s = format!("{:.*}", (11 - e).max(0) as usize, x);
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

/// CSV with columns `n1..nd,count,f,h_hat,g`; missing entropy data is left blank.
pub fn write_csv<W: Write>(records: &[PointRecord], d: usize, mut w: W) -> std::io::Result<()> {
    let mut header: Vec<String> = (1..=d).map(|i| format!("n{i}")).collect();
    header.extend(["count", "f", "h_hat", "g"].map(String::from));
    writeln!(w, "{}", header.join(","))?;
    for r in records {
        let mut row: Vec<String> = r.n.iter().map(|x| x.to_string()).collect();
        row.push(r.count.to_string());
        row.push(format_sig(r.f));
        row.push(r.h_hat.map(format_sig).unwrap_or_default());
        row.push(r.g.map(format_sig).unwrap_or_default());
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
