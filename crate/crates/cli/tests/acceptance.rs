//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use entrank::action::presets;
use entrank::algebra::{BigRational, IntPolynomial};
use entrank::counting::{charp_window_oracle, count_composite, count_prime_charp, rational_strip_oracle};
use entrank::entropy::{directional_entropy, mahler_measure, nonexpansive_candidates, sphere_extrema, EntropyFunction};
use entrank::scan::{convergent_sequence, f_value, shell_scan, Region, ScanOptions};
use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut argv = vec!["entrank".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = entrank_cli::run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let dt = t.elapsed();
    o.detail = format!("{} [{:.2?}, limit {:?}]", o.detail, dt, limit);
    o.passed &= dt < limit;
    o
}

fn reference_grid() -> Outcome {
    const CELLS: [[&str; 11]; 6] = [
        ["211", "227", "235", "239", "241", "121", "485", "971", "1943", "3887", "7775"],
        ["49", "65", "73", "77", "79", "5", "161", "323", "647", "1295", "2591"],
        ["5", "11", "19", "23", "25", "13", "53", "107", "215", "431", "863"],
        ["23", "7", "1", "5", "7", "1", "17", "35", "71", "143", "287"],
        ["29", "13", "5", "1", "1", "1", "5", "11", "23", "47", "95"],
        ["31", "5", "7", "1", "1", "∞", "1", "1", "7", "5", "31"],
    ];
    let spec = root().join("specs/times_2_3.json");
    let (code, text) = run_cli(&["table", "--spec", spec.to_str().unwrap(), "--range", "-5:5,0:5"]);
    let golden = std::fs::read_to_string(root().join("crates/cli/tests/golden/grid_times_2_3.txt")).unwrap();
    let grid: Vec<Vec<&str>> = text.lines().map(|l| l.split_whitespace().collect()).collect();
    let matching = grid
        .iter()
        .zip(CELLS.iter())
        .map(|(r, want)| r.iter().zip(want.iter()).filter(|(a, b)| a == b).count())
        .sum::<usize>();
    let ok = code == 0 && text == golden && grid.len() == 6 && grid.iter().all(|r| r.len() == 11) && matching == 66;
    outcome(ok, format!("{matching}/66 cells match, golden file {}", if text == golden { "identical" } else { "differs" }))
}

fn spot_values() -> Outcome {
    let p = presets::times_two_three().prepare().unwrap();
    let c = count_composite(&p, &[-5, 3]).unwrap().value;
    let mut bad = Vec::new();
    for n in 1..=20u32 {
        let want = BigUint::from(6u32).pow(n) - 1u32;
        if count_composite(&p, &[n as i64, n as i64]).unwrap().value != want {
            bad.push(n);
        }
    }
    outcome(c == 5u32.into() && bad.is_empty(), format!("count(-5,3) = {c}, diagonal mismatches {bad:?}"))
}

fn ledrappier_counts() -> Outcome {
    let spec = presets::ledrappier();
    let comp = &spec.components()[0].prime;
    let mut axis_bad = Vec::new();
    for n in 1..=32i64 {
        let two_adic = 1i64 << n.trailing_zeros();
        let want = BigUint::from(2u32).pow((n - two_adic) as u32);
        if count_prime_charp(comp, &[n, 0]).unwrap().value != want {
            axis_bad.push(n);
        }
    }
    let points = [[1, 1], [2, 1], [3, 2], [-3, 2], [4, -1], [2, 2], [-1, 3], [5, 3], [-6, 5], [7, 4]];
    let mut window_bad = Vec::new();
    for n in points {
        let direct = count_prime_charp(comp, &n).unwrap().value;
        let w = charp_window_oracle(comp, &n, 8).unwrap();
        if w.stabilized.as_ref().map(|r| &r.value) != Some(&direct) {
            window_bad.push((n, direct.to_string(), w.dims.clone()));
        }
    }
    outcome(
        axis_bad.is_empty() && window_bad.is_empty(),
        format!("axis n = 1..32 mismatches {axis_bad:?}, window oracle mismatches {window_bad:?} over 10 points"),
    )
}

fn ledrappier_zero_limit() -> Outcome {
    let p = presets::ledrappier().prepare().unwrap();
    let fs: Vec<f64> = (0..=5).map(|k| f_value(&p, &[1 << k, 0]).unwrap()).collect();
    let monotone = fs.windows(2).all(|w| w[1] <= w[0]);
    outcome(monotone && fs[5] < 0.2, format!("f((2^k,0)), k = 0..5: {fs:?}"))
}

fn mahler() -> Outcome {
    let lehmer = mahler_measure(&IntPolynomial::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1])).unwrap().value;
    let lin = mahler_measure(&IntPolynomial::from_i64(&[-2, 1])).unwrap().value;
    let ok = (lehmer - 0.162357).abs() < 1e-4 && (lin - 2f64.ln()).abs() < 1e-10;
    outcome(ok, format!("Lehmer {lehmer:.9}, m(x - 2) - log 2 = {:.1e}", lin - 2f64.ln()))
}

fn sheared_family() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for k in [1u32, 2, 5] {
        let p = presets::sheared_two_three(k).prepare().unwrap();
        let ef = EntropyFunction::from_spec(&p).unwrap();
        let h = directional_entropy(&ef, &[k as f64, 1.0]);
        let min = sphere_extrema(&ef).unwrap().min_value;
        let bound = 3f64.ln() / (1.0 + (k * k) as f64).sqrt();
        ok &= (h - 3f64.ln()).abs() < 1e-9 && min <= bound + 1e-9;
        detail.push(format!("k={k}: h(k,1)-log3 = {:.1e}, min {min:.6} <= {bound:.6}", h - 3f64.ln()));
    }
    outcome(ok, detail.join("; "))
}

fn sphere_extrema_times_two_three() -> Outcome {
    let p = presets::times_two_three().prepare().unwrap();
    let ef = EntropyFunction::from_spec(&p).unwrap();
    let e = sphere_extrema(&ef).unwrap();
    let (l2, l3) = (2f64.ln(), 3f64.ln());
    let max_want = (l2 * l2 + l3 * l3).sqrt();
    let min_want = l2 * l3 / max_want;
    // sampling oracle written against the Lyapunov vectors directly
    let h = |x: f64, y: f64| (l2 * x + l3 * y).max(0.0) + (-l2 * x).max(0.0) + (-l3 * y).max(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut smin, mut smax) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..1_000_000 {
        let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let v = h(t.cos(), t.sin());
        smin = smin.min(v);
        smax = smax.max(v);
    }
    let ok = (e.max_value - max_want).abs() < 1e-9
        && (e.min_value - min_want).abs() < 1e-9
        && smax <= e.max_value + 1e-12
        && smin >= e.min_value - 1e-12
        && e.max_value - smax < 1e-4
        && smin - e.min_value < 1e-4;
    outcome(
        ok,
        format!(
            "max {:.10} (want {max_want:.10}), min {:.10} (want {min_want:.10}), sampled [{smin:.8}, {smax:.8}]",
            e.max_value, e.min_value
        ),
    )
}

fn outer_shell_growth() -> Outcome {
    let p = presets::times_two_three().prepare().unwrap();
    let opts = ScanOptions::default();
    let outer = shell_scan(&p, 40.0, 50.0, &opts).unwrap();
    let fmin = outer.records.iter().map(|r| r.f).fold(f64::INFINITY, f64::min);
    let all_positive = outer.records.iter().all(|r| r.f > 0.0);
    let g10 = shell_scan(&p, 10.0, 11.0, &opts).unwrap().shells[0].g_abs_max.unwrap();
    let g40 = outer.shells[0].g_abs_max.unwrap();
    let brackets = (1.20..=1.30).contains(&outer.c1_estimate) && (0.30..=0.59).contains(&outer.c2_estimate);
    let ok = all_positive && fmin > 0.30 && g40 < g10 && brackets && outer.skipped.is_empty() && !outer.partial;
    outcome(
        ok,
        format!(
            "{} points, min f {fmin:.6}, C1 {:.6}, C2 {:.6}, max|g| R=10 {g10:.6} R=40 {g40:.6}",
            outer.records.len(),
            outer.c1_estimate,
            outer.c2_estimate
        ),
    )
}

fn integral_count(pc: &entrank::action::PlacedComponent, n: &[i64]) -> BigRational {
    let k = pc.field();
    let x = k.sub(&pc.xi_pow(n).unwrap(), &k.one());
    let mut value = k.norm(&x).unwrap();
    if value < BigRational::from_integer(0.into()) {
        value = -value;
    }
    for v in pc.places().iter().filter(|v| !v.is_archimedean()) {
        let base = BigInt::from(v.prime().unwrap()).pow(v.residue_degree().unwrap());
        let e = -k.ord_v(v, &x).unwrap();
        let factor = if e >= 0 {
            BigRational::from_integer(base.pow(e as u32))
        } else {
            BigRational::new(1.into(), base.pow((-e) as u32))
        };
        value *= factor;
    }
    value
}

fn internal_identities() -> Outcome {
    let mut checked = 0usize;
    let mut failures = Vec::new();
    let mut worst_gap = 0f64;
    for (name, spec, r) in [
        ("x2x3", presets::times_two_three(), 12.0),
        ("golden", presets::golden_two(), 8.0),
        ("sheared", presets::sheared_two_three(2), 8.0),
    ] {
        let p = spec.prepare().unwrap();
        for (pc, _) in p.placed_components() {
            for j in 0..p.d() {
                let s: f64 = pc.lyapunov().iter().map(|l| l[j]).sum();
                if s.abs() > 1e-9 {
                    failures.push(format!("{name}: sum of Lyapunov coordinate {j} = {s:e}"));
                }
            }
        }
        let rep = shell_scan(&p, 1.0, r, &ScanOptions { region: Region::Full, ..Default::default() }).unwrap();
        for rec in &rep.records {
            checked += 1;
            let gap = (rec.g.unwrap() - (rec.f - rec.h_hat.unwrap())).abs();
            worst_gap = worst_gap.max(gap);
            let neg: Vec<i64> = rec.n.iter().map(|x| -x).collect();
            if count_composite(&p, &neg).unwrap().value != rec.count {
                failures.push(format!("{name}: count(-n) != count(n) at {:?}", rec.n));
            }
            let (pc, _) = p.placed_components().next().unwrap();
            let exact = integral_count(pc, &rec.n);
            if !exact.is_integer() || exact.to_integer() != BigInt::from(rec.count.clone()) {
                failures.push(format!("{name}: place product {exact} vs count {} at {:?}", rec.count, rec.n));
            }
        }
    }
    outcome(
        failures.is_empty() && worst_gap < 1e-8,
        format!("{checked} points, worst |g - (f - h)| {worst_gap:.1e}, failures {failures:?}"),
    )
}

fn convergents() -> Outcome {
    let p = presets::times_two_three().prepare().unwrap();
    let ef = EntropyFunction::from_spec(&p).unwrap();
    let idx = nonexpansive_candidates(&ef).iter().position(|h| !h.is_axis()).unwrap();
    let seq = convergent_sequence(&p, idx, 8).unwrap();
    let xi = [BigRational::from_integer(2.into()), BigRational::from_integer(3.into())];
    let mismatches: Vec<Vec<i64>> = seq
        .iter()
        .filter(|c| rational_strip_oracle(&xi, &c.n).unwrap() != c.record.count)
        .map(|c| c.n.clone())
        .collect();
    let (f4, f6) = (seq[4].record.f, seq[6].record.f);
    let pts: Vec<String> = seq.iter().map(|c| format!("{:?}:{}", c.n, c.record.count)).collect();
    outcome(
        mismatches.is_empty() && f6 > f4,
        format!("{}; strip oracle mismatches {mismatches:?}; f[4] {f4:.6} < f[6] {f6:.6}", pts.join(" ")),
    )
}

#[test]
fn acceptance_criteria() {
    let s = Duration::from_secs;
    let results = [
        ("1 reference table", timed(s(1), reference_grid)),
        ("2 spot values", timed(s(1), spot_values)),
        ("3 ledrappier counts", timed(s(60), ledrappier_counts)),
        ("4 zero-limit display", timed(s(60), ledrappier_zero_limit)),
        ("5 mahler measures", timed(s(60), mahler)),
        ("6 sheared family", timed(s(60), sheared_family)),
        ("7 sphere extrema", timed(s(60), sphere_extrema_times_two_three)),
        ("8 outer-shell growth", timed(s(300), outer_shell_growth)),
        ("9 internal identities", timed(s(300), internal_identities)),
        ("10 convergent sequence", timed(s(60), convergents)),
    ];
    // written to the raw stream so the lines show up without --nocapture
    let mut stderr = std::io::stderr();
    for (name, o) in &results {
        let _ = writeln!(stderr, "criterion {name}: {} - {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<&str> = results.iter().filter(|(_, o)| !o.passed).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
