//! Command-line front end for `entrank`.
//!
//! [`run`] parses arguments, executes one subcommand and returns the exit
//! code, writing to the given streams so it can be driven in-process.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use entrank::action::{entropy_rank_one_check, mixing_check, parse_spec, ActionSpec, PrimeComponent};
use entrank::algebra::IntPolynomial;
use entrank::counting::{
    charp_window_oracle, count_composite, ledrappier_axis_closed_form, rational_strip_oracle, CountResult,
};
use entrank::entropy::{
    lipschitz_constant, lipschitz_constant_euclidean, mahler_measure, nonexpansive_candidates, sphere_extrema,
    EntropyFunction, ExtremaMethod,
};
use entrank::error::ErrorClass;
use entrank::scan::{convergent_sequence, format_sig, shell_scan, write_csv, Region, ScanOptions, SelectionNorm};
use entrank::{Error, Result};
use num_bigint::BigInt;

/// Environment variable capping the worker threads used by scans.
pub const THREADS_ENV: &str = "ENTRANK_THREADS";
/// Largest grid `table` will render.
pub const MAX_TABLE_CELLS: u64 = 250_000;

#[derive(Parser, Debug)]
#[command(name = "entrank", version, about = "Periodic point counts and directional entropy for algebraic Z^d-actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact number of points fixed by α^n.
    Count {
        #[arg(long)]
        spec: PathBuf,
        /// Lattice vector, e.g. "1,1" or "-5,3".
        #[arg(long, allow_hyphen_values = true)]
        n: String,
    },
    /// Grid of counts over a box in d = 2.
    Table {
        #[arg(long)]
        spec: PathBuf,
        /// "a:b,c:d" for n1 in a..=b and n2 in c..=d.
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long, value_enum, default_value_t = TableFormat::Ascii)]
        format: TableFormat,
    },
    /// Growth rates on lattice shells r_min <= |n| <= r_max.
    Scan {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        rmin: f64,
        #[arg(long)]
        rmax: f64,
        /// Write every point record as CSV here ("-" for stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = NormArg::Euclidean)]
        norm: NormArg,
        #[arg(long, value_enum, default_value_t = RegionArg::Half)]
        region: RegionArg,
        #[arg(long, default_value_t = entrank::scan::DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Extrema of the directional entropy on the unit sphere.
    Extrema {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Breakpoint hyperplanes of the directional entropy.
    Nonexpansive {
        #[arg(long)]
        spec: PathBuf,
        /// Also list this many lattice points approaching each line (d = 2).
        #[arg(long)]
        convergents: Option<usize>,
    },
    /// Logarithmic Mahler measure of an integer polynomial.
    Mahler {
        /// Coefficients c0,c1,... in ascending degree.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Independent cross-checks for counts.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        #[arg(long, allow_hyphen_values = true)]
        n: String,
        /// Required for `window` and `strip`.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Starting window size for `window`.
        #[arg(long, default_value_t = 8)]
        window: u32,
    },
    /// Parse a spec, list its places and run the mixing and rank-one checks.
    Validate {
        #[arg(long)]
        spec: PathBuf,
        /// Radius of the lattice ball searched for mixing violations.
        #[arg(long, default_value_t = 12)]
        radius: u32,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Ascii,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormArg {
    Euclidean,
    Max,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RegionArg {
    /// One point of each ±n pair.
    Half,
    /// Last coordinate >= 0.
    Upper,
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleKind {
    /// Closed form 2^(n - 2^ord2(n)) on the axis of the Ledrappier example.
    Ledrappier,
    /// Finite-window linear algebra for a d = 2 characteristic-p spec.
    Window,
    /// Strip the primes of S from |ξ^n - 1| for a rational spec.
    Strip,
}

/// Exit code for an error class.
pub fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Usage => 1,
        ErrorClass::Domain => 2,
        ErrorClass::Resource => 3,
        ErrorClass::Internal => 4,
    }
}

/// Runs the command line `args` (including the program name).
pub fn run<O: Write, E: Write>(args: &[String], out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(Output { text, code }) => {
            if out.write_all(text.as_bytes()).is_err() {
                return 4;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(e.class())
        }
    }
}

struct Output {
    text: String,
    code: i32,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn load_spec(path: &Path) -> Result<ActionSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text)
}

/// Parses "a,b,..." into integers.
pub fn parse_vector(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| {
            t.trim().parse::<i64>().map_err(|_| Error::InvalidInput(format!("bad integer {t:?} in {s:?}")))
        })
        .collect()
}

fn parse_span(s: &str) -> Result<(i64, i64)> {
    let (a, b) = s.split_once(':').ok_or_else(|| Error::InvalidInput(format!("expected a:b, got {s:?}")))?;
    let p = |t: &str| t.trim().parse::<i64>().map_err(|_| Error::InvalidInput(format!("bad bound {t:?}")));
    let (a, b) = (p(a)?, p(b)?);
    if a > b {
        return Err(Error::InvalidInput(format!("empty range {s:?}")));
    }
    Ok((a, b))
}

fn with_threads<T: Send>(f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("{THREADS_ENV} must be a thread count, got {v:?}")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
            pool.install(f)
        }
        Err(_) => f(),
    }
}

fn execute(cmd: Command) -> Result<Output> {
    match cmd {
        Command::Count { spec, n } => cmd_count(&load_spec(&spec)?, &parse_vector(&n)?).map(Into::into),
        Command::Table { spec, range, format } => cmd_table(&load_spec(&spec)?, &range, format).map(Into::into),
        Command::Scan { spec, rmin, rmax, out, norm, region, budget } => {
            let opts = ScanOptions {
                norm: match norm {
                    NormArg::Euclidean => SelectionNorm::Euclidean,
                    NormArg::Max => SelectionNorm::Max,
                },
                region: match region {
                    RegionArg::Half => Region::HalfPairs,
                    RegionArg::Upper => Region::UpperHalf,
                    RegionArg::Full => Region::Full,
                },
                budget,
            };
            cmd_scan(&load_spec(&spec)?, rmin, rmax, out.as_deref(), &opts)
        }
        Command::Extrema { spec } => cmd_extrema(&load_spec(&spec)?).map(Into::into),
        Command::Nonexpansive { spec, convergents } => cmd_nonexpansive(&load_spec(&spec)?, convergents).map(Into::into),
        Command::Mahler { poly } => cmd_mahler(&poly).map(Into::into),
        Command::Oracle { kind, n, spec, window } => {
            let spec = spec.map(|p| load_spec(&p)).transpose()?;
            cmd_oracle(kind, &parse_vector(&n)?, spec.as_ref(), window).map(Into::into)
        }
        Command::Validate { spec, radius } => cmd_validate(&load_spec(&spec)?, radius),
    }
}

fn render_count(c: &CountResult) -> String {
    let mut s = format!("{}\n", c.value);
    for pc in &c.per_component {
        let _ = write!(s, "component {} (multiplicity {}): {}", pc.component, pc.multiplicity, pc.value);
        if let Some((q, e)) = pc.factored {
            let _ = write!(s, " = {q}^{e}");
        }
        s.push('\n');
    }
    s.push_str(if c.upper_bound { "upper bound (non-Noetherian)\n" } else { "exact (Noetherian)\n" });
    s
}

fn cmd_count(spec: &ActionSpec, n: &[i64]) -> Result<String> {
    let prepared = spec.prepare()?;
    Ok(render_count(&count_composite(&prepared, n)?))
}

fn cmd_table(spec: &ActionSpec, range: &str, format: TableFormat) -> Result<String> {
    if spec.d() != 2 {
        return Err(Error::InvalidInput(format!("table needs d = 2, spec has d = {}", spec.d())));
    }
    let (x, y) = range.split_once(',').ok_or_else(|| Error::InvalidInput(format!("expected a:b,c:d, got {range:?}")))?;
    let ((a, b), (c, d)) = (parse_span(x)?, parse_span(y)?);
    let cells = (b - a + 1) as u64 * (d - c + 1) as u64;
    if cells > MAX_TABLE_CELLS {
        return Err(Error::Resource(format!("{cells} cells exceeds the table limit of {MAX_TABLE_CELLS}")));
    }
    let prepared = spec.prepare()?;
    let mut rows: Vec<(i64, Vec<(i64, Option<String>)>)> = Vec::new();
    for n2 in (c..=d).rev() {
        let mut row = Vec::new();
        for n1 in a..=b {
            let cell = if n1 == 0 && n2 == 0 {
                None
            } else {
                match count_composite(&prepared, &[n1, n2]) {
                    Ok(r) => Some(r.value.to_string()),
                    Err(Error::InfiniteCount { .. }) => None,
                    Err(e) => return Err(e),
                }
            };
            row.push((n1, cell));
        }
        rows.push((n2, row));
    }
    let mut s = String::new();
    match format {
        TableFormat::Ascii => {
            let width = rows
                .iter()
                .flat_map(|(_, r)| r.iter().map(|(_, c)| c.as_ref().map_or(1, |t| t.len())))
                .max()
                .unwrap_or(1);
            for (_, row) in &rows {
                let cells: Vec<String> = row
                    .iter()
                    .map(|(_, c)| format!("{:>width$}", c.as_deref().unwrap_or("∞")))
                    .collect();
                let _ = writeln!(s, "{}", cells.join(" "));
            }
        }
        TableFormat::Csv => {
            s.push_str("n1,n2,count\n");
            for (n2, row) in &rows {
                for (n1, c) in row {
                    let _ = writeln!(s, "{n1},{n2},{}", c.as_deref().unwrap_or("inf"));
                }
            }
        }
    }
    Ok(s)
}

fn fmt_point(n: &[i64]) -> String {
    format!("({})", n.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn fmt_vec(x: &[f64]) -> String {
    format!("({})", x.iter().map(|v| format_sig(*v)).collect::<Vec<_>>().join(", "))
}

fn cmd_scan(spec: &ActionSpec, rmin: f64, rmax: f64, out: Option<&Path>, opts: &ScanOptions) -> Result<Output> {
    let prepared = spec.prepare()?;
    let rep = with_threads(|| shell_scan(&prepared, rmin, rmax, opts))?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "points {} skipped {} partial {}",
        rep.records.len(),
        rep.skipped.len(),
        if rep.partial { "yes" } else { "no" }
    );
    for sh in &rep.shells {
        if sh.points == 0 {
            continue;
        }
        let _ = write!(
            s,
            "shell [{}, {}] points {} f_min {} f_max {}",
            format_sig(sh.r_lo),
            format_sig(sh.r_hi),
            sh.points,
            format_sig(sh.f_min),
            format_sig(sh.f_max)
        );
        if let Some(g) = sh.g_abs_max {
            let _ = write!(s, " max|g| {}", format_sig(g));
        }
        s.push('\n');
    }
    let _ = writeln!(
        s,
        "C1_estimate {} at {} (trimmed {})",
        format_sig(rep.c1_estimate),
        fmt_point(&rep.argmax),
        format_sig(rep.c1_trimmed)
    );
    let _ = writeln!(
        s,
        "C2_estimate {} at {} (trimmed {})",
        format_sig(rep.c2_estimate),
        fmt_point(&rep.argmin),
        format_sig(rep.c2_trimmed)
    );
    // points on coordinate axes with a power-of-two coordinate show the slowest growth in
    // characteristic 2
    let mut axis: Vec<_> = rep
        .records
        .iter()
        .filter(|r| r.n.iter().filter(|&&x| x != 0).count() == 1)
        .filter(|r| r.n.iter().any(|&x| x > 0 && (x as u64).is_power_of_two()))
        .collect();
    if spec.has_charp() && !axis.is_empty() {
        axis.sort_by_key(|r| r.n.iter().map(|x| x.abs()).sum::<i64>());
        let pts: Vec<String> = axis.iter().map(|r| format!("{}:{}", fmt_point(&r.n), format_sig(r.f))).collect();
        let _ = writeln!(s, "f on power-of-two axis points {}", pts.join(" "));
    }
    for (n, why) in &rep.skipped {
        let _ = writeln!(s, "skipped {}: {why}", fmt_point(n));
    }
    if let Some(path) = out {
        let mut buf = Vec::new();
        write_csv(&rep.records, spec.d(), &mut buf).map_err(|e| Error::Internal(e.to_string()))?;
        if path == Path::new("-") {
            s.push_str(&String::from_utf8(buf).expect("ascii csv"));
        } else {
            std::fs::write(path, buf)
                .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    let code = if rep.partial { 3 } else { 0 };
    Ok(Output { text: s, code })
}

fn cmd_extrema(spec: &ActionSpec) -> Result<String> {
    let ef = EntropyFunction::from_spec(&spec.prepare()?)?;
    let e = sphere_extrema(&ef)?;
    let mut s = String::new();
    let _ = writeln!(s, "max {} at {}", format_sig(e.max_value), fmt_vec(&e.argmax));
    let _ = writeln!(s, "min {} at {}", format_sig(e.min_value), fmt_vec(&e.argmin));
    let method = match e.method {
        ExtremaMethod::Endpoints => "endpoints".to_string(),
        ExtremaMethod::Arcs { arcs } => format!("arcs {arcs}"),
        ExtremaMethod::Flats { candidates, sampled, sampled_min, sampled_max } => format!(
            "flats {candidates} candidates, {sampled} samples in [{}, {}]",
            format_sig(sampled_min),
            format_sig(sampled_max)
        ),
    };
    let _ = writeln!(s, "method {method}");
    let _ = writeln!(
        s,
        "lipschitz l1 {} l2 {}",
        format_sig(lipschitz_constant(&ef)),
        format_sig(lipschitz_constant_euclidean(&ef))
    );
    Ok(s)
}

fn cmd_nonexpansive(spec: &ActionSpec, convergents: Option<usize>) -> Result<String> {
    let prepared = spec.prepare()?;
    let ef = EntropyFunction::from_spec(&prepared)?;
    let mut s = String::new();
    for (i, h) in nonexpansive_candidates(&ef).iter().enumerate() {
        let _ = writeln!(s, "[{i}] {h}  places {}", h.places.join(" "));
        if let Some(k) = convergents.filter(|_| spec.d() == 2) {
            for c in convergent_sequence(&prepared, i, k)? {
                let _ = writeln!(
                    s,
                    "    {} count {} f {}",
                    fmt_point(&c.n),
                    c.record.count,
                    format_sig(c.record.f)
                );
            }
        }
    }
    Ok(s)
}

fn cmd_mahler(poly: &str) -> Result<String> {
    let coeffs = poly
        .split(',')
        .map(|t| t.trim().parse::<BigInt>().map_err(|_| Error::InvalidInput(format!("bad coefficient {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let m = mahler_measure(&IntPolynomial::new(coeffs))?;
    Ok(format!("{}\nerror {}\n", format_sig(m.value), format_sig(m.error)))
}

fn cmd_oracle(kind: OracleKind, n: &[i64], spec: Option<&ActionSpec>, window: u32) -> Result<String> {
    let need_spec = || spec.ok_or_else(|| Error::InvalidInput("this oracle needs --spec".into()));
    match kind {
        OracleKind::Ledrappier => {
            let [k] = n else {
                return Err(Error::InvalidInput("the closed form takes a single integer --n".into()));
            };
            Ok(render_count(&ledrappier_axis_closed_form(*k)?))
        }
        OracleKind::Window => {
            let spec = need_spec()?;
            let mut s = String::new();
            for (i, c) in spec.components().iter().enumerate() {
                let w = charp_window_oracle(&c.prime, n, window)?;
                let dims: Vec<String> = w.dims.iter().map(|(t, d)| format!("T={t}:{d}")).collect();
                let _ = write!(s, "component {i} dims {}", dims.join(" "));
                match &w.stabilized {
                    Some(r) => {
                        let _ = writeln!(s, " count {}", r.value);
                    }
                    None => s.push_str(" not stabilized\n"),
                }
            }
            Ok(s)
        }
        OracleKind::Strip => {
            let spec = need_spec()?;
            let mut s = String::new();
            for (i, c) in spec.components().iter().enumerate() {
                let PrimeComponent::Char0 { field, xi } = &c.prime else {
                    return Err(Error::InvalidInput("the strip oracle needs rational components".into()));
                };
                let xi = xi
                    .iter()
                    .map(|x| {
                        x.as_rational().cloned().ok_or_else(|| {
                            Error::InvalidInput(format!("the strip oracle needs K = Q, got degree {}", field.degree()))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let _ = writeln!(s, "component {i}: {}", rational_strip_oracle(&xi, n)?);
            }
            Ok(s)
        }
    }
}

fn cmd_validate(spec: &ActionSpec, radius: u32) -> Result<Output> {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "d {} components {} {}",
        spec.d(),
        spec.components().len(),
        if spec.noetherian() { "noetherian" } else { "non-noetherian" }
    );
    let prepared = spec.prepare()?;
    for (i, (c, placed)) in spec.components().iter().zip(prepared.placed()).enumerate() {
        let _ = writeln!(s, "component {i} (multiplicity {}): {}", c.multiplicity, c.prime);
        if let Some(pc) = placed {
            for (v, l) in pc.places().iter().zip(pc.lyapunov()) {
                let _ = writeln!(s, "    {v} l = {}", fmt_vec(l));
            }
        }
    }
    let rank_one = entropy_rank_one_check(spec)?;
    for c in &rank_one.components {
        let _ = writeln!(
            s,
            "rank one, component {}: {} {}",
            c.component,
            if c.passed { "ok" } else { "FAILED" },
            c.detail
        );
    }
    let mixing = mixing_check(spec, radius)?;
    if mixing.passed() {
        let _ = writeln!(s, "mixing: no violations for |n|_inf <= {}", mixing.verified_up_to_radius);
    } else {
        for v in &mixing.violations {
            let _ = writeln!(s, "mixing FAILED, component {} at {}: {}", v.component, fmt_point(&v.n), v.reason);
        }
    }
    let code = if mixing.passed() && rank_one.passed() { 0 } else { 2 };
    Ok(Output { text: s, code })
}
