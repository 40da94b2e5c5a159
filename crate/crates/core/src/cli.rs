//! The `mmekit` command line.
//!
//! Every subcommand writes one JSON document to stdout (pretty by default,
//! a single line with `--json`) that records the seed and precision used.
//! Exit codes: 0 success or true, 1 checked false, 2 usage or input error,
//! 3 numeric failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::ops::Pow;
use serde_json::{json, Value};

use crate::algebra::mapfile::{read_map, MapFile};
use crate::algebra::{CycElement, RationalMap};
use crate::curve::{self, components_from, galois_genus_from, monodromy};
use crate::error::{Error, Result};
use crate::families::{self, chebyshev_polynomial, GroupSpec, MapKind};
use crate::funceq::{self, common_power_exponents, verify_equal_chain, verify_mme_system, EqualChain};
use crate::measure::{self, EmpiricalMeasure, ExportFormat};
use crate::spectrum::{self, multiplier_spectrum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "mmekit", version, about = "Rational maps sharing a measure of maximal entropy")]
pub struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 256)]
    pub precision: u32,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Compact single-line JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check functional equations exactly.
    Verify(VerifyArgs),
    /// Generate maps from the classical families.
    Families {
        #[command(subcommand)]
        family: FamilyCommand,
    },
    /// Fixed points and multipliers of an iterate.
    Spectrum(SpectrumArgs),
    /// Components and genera of the curve A(x) = A(y).
    Curve(CurveArgs),
    /// Sample and compare measures of maximal entropy.
    Measure(MeasureArgs),
    /// Minimal exponents with d₁^l₁ = … = dₙ^lₙ.
    Exponents {
        #[arg(required = true, num_args = 1..)]
        degrees: Vec<u64>,
    },
    /// Run the built-in identity suite.
    Selftest,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum VerifyMode {
    Chain,
    System,
    Lemma01,
    Exponents,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub mode: VerifyMode,
    /// Map files (chain: A X1 X2 …; system: F1 F2 …; lemma01: A B), or
    /// degrees for the exponents mode.
    #[arg(required = true, num_args = 1..)]
    pub inputs: Vec<String>,
    /// Largest iterate order for lemma01.
    #[arg(long, default_value_t = 3)]
    pub lmax: usize,
}

#[derive(Subcommand, Debug)]
pub enum FamilyCommand {
    /// z^n, T_n, ½(z+1/z) or ½(z^n+1/z^n).
    Map {
        #[arg(value_parser = parse_kind)]
        kind: MapKind,
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The triple (T_n, ½(z+1/z), ½(εz+1/(εz))).
    Ritt {
        n: usize,
        /// Directory receiving a.json, x.json and y.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariant function of C<n> or D<2n>.
    Invariant {
        #[arg(value_parser = parse_group)]
        group: GroupSpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ψ with θ_G = ψ∘θ_H.
    Quotient {
        #[arg(value_parser = parse_group)]
        group: GroupSpec,
        #[arg(value_parser = parse_group)]
        subgroup: GroupSpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    pub map: PathBuf,
    /// Iterate order.
    #[arg(long, default_value_t = 1)]
    pub s: usize,
    /// Compare with a second map for s = 1..smax; exits 0 if isospectral.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub smax: usize,
    #[arg(long, default_value_t = spectrum::DEFAULT_TOL)]
    pub tol: f64,
    /// Significant digits printed per coordinate.
    #[arg(long, default_value_t = 30)]
    pub digits: usize,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    pub map: PathBuf,
    /// Include the monodromy permutations.
    #[arg(long)]
    pub monodromy: bool,
    /// Include the genus of the Galois closure.
    #[arg(long)]
    pub galois: bool,
    /// Largest monodromy group enumerated for --galois.
    #[arg(long, default_value_t = curve::DEFAULT_GROUP_BOUND)]
    pub bound: usize,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
    Png,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("task").args(["map", "compare", "calibrate"]).required(true))]
pub struct MeasureArgs {
    /// Map to sample.
    pub map: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = measure::DEFAULT_BURN_IN)]
    pub burnin: usize,
    /// Grid as BANDSxSECTORS.
    #[arg(long, default_value = "64x128", value_parser = parse_grid)]
    pub grid: (usize, usize),
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutFormat,
    /// Two measure files written by this command.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub compare: Option<Vec<PathBuf>>,
    /// Largest distance accepted by --compare.
    #[arg(long, default_value_t = 0.15)]
    pub threshold: f64,
    /// Measure noise floors of the reference maps.
    #[arg(long)]
    pub calibrate: bool,
}

fn parse_kind(s: &str) -> std::result::Result<MapKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_group(s: &str) -> std::result::Result<GroupSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (b, l) = s.split_once('x').ok_or_else(|| format!("`{s}` is not of the form BxL"))?;
    let b: usize = b.parse().map_err(|_| format!("bad band count in `{s}`"))?;
    let l: usize = l.parse().map_err(|_| format!("bad sector count in `{s}`"))?;
    if b == 0 || l == 0 {
        return Err("grid dimensions must be positive".into());
    }
    Ok((b, l))
}

/// Reads and normalizes a map file.
pub fn parse_map_file(path: impl AsRef<Path>) -> Result<RationalMap> {
    read_map(path)
}

/// Result of a subcommand: the JSON document and the exit code.
struct Outcome {
    doc: Value,
    code: i32,
}

impl Outcome {
    fn ok(doc: Value) -> Self {
        Outcome { doc, code: EXIT_OK }
    }

    fn verdict(doc: Value, pass: bool) -> Self {
        Outcome {
            doc,
            code: if pass { EXIT_OK } else { EXIT_FALSE },
        }
    }
}

fn map_json(map: &RationalMap) -> Value {
    serde_json::to_value(MapFile::from_map(map)).expect("map serializes")
}

fn write_map_file(map: &RationalMap, path: &Path) -> Result<()> {
    crate::algebra::mapfile::write_map(map, path)
}

fn parse_degrees(inputs: &[String]) -> Result<Vec<u64>> {
    inputs
        .iter()
        .map(|s| {
            s.parse::<u64>()
                .map_err(|_| Error::Domain(format!("`{s}` is not a degree")))
        })
        .collect()
}

fn exponents_doc(degrees: &[u64]) -> Result<Outcome> {
    let result = common_power_exponents(degrees)?;
    let common = result.as_ref().map(|ls| {
        let v = rug::Integer::from(degrees[0]).pow(ls[0] as u32);
        v.to_string()
    });
    let found = result.is_some();
    Ok(Outcome::verdict(
        json!({
            "degrees": degrees,
            "exponents": result.map(|ls| ls.iter().map(|l| l.to_string()).collect::<Vec<_>>()),
            "common_value": common,
        }),
        found,
    ))
}

fn run_verify(args: &VerifyArgs) -> Result<Outcome> {
    let maps = || args.inputs.iter().map(parse_map_file).collect::<Result<Vec<_>>>();
    match args.mode {
        VerifyMode::Chain => {
            let maps = maps()?;
            let (a, xs) = maps
                .split_first()
                .filter(|(_, xs)| !xs.is_empty())
                .ok_or_else(|| Error::Domain("chain mode needs A and at least one X".into()))?;
            let holds = verify_equal_chain(a, xs)?;
            let distinct = (0..xs.len()).all(|i| !xs[..i].contains(&xs[i]));
            let mut doc = json!({"mode": "chain", "members": xs.len(), "distinct": distinct, "holds": holds});
            if holds && distinct && xs.len() >= 2 {
                EqualChain::new(a.clone(), xs.to_vec())?;
                doc["degree_bound_ok"] = json!(xs.len() <= a.degree());
            }
            Ok(Outcome::verdict(doc, holds))
        }
        VerifyMode::System => {
            let report = verify_mme_system(&maps()?)?;
            let pass = report.pass;
            let mut doc = serde_json::to_value(&report).expect("report serializes");
            doc["mode"] = json!("system");
            Ok(Outcome::verdict(doc, pass))
        }
        VerifyMode::Lemma01 => {
            let maps = maps()?;
            let [a, b] = maps.as_slice() else {
                return Err(Error::Domain("lemma01 mode needs exactly two maps A B".into()));
            };
            let holds = funceq::iterate_equalization(a, b, args.lmax)?;
            Ok(Outcome::verdict(json!({"mode": "lemma01", "lmax": args.lmax, "holds": holds}), holds))
        }
        VerifyMode::Exponents => {
            let mut out = exponents_doc(&parse_degrees(&args.inputs)?)?;
            out.doc["mode"] = json!("exponents");
            Ok(out)
        }
    }
}

fn emit_map(map: &RationalMap, out: &Option<PathBuf>) -> Result<Outcome> {
    if let Some(path) = out {
        write_map_file(map, path)?;
    }
    Ok(Outcome::ok(json!({"map": map_json(map), "display": map.to_string()})))
}

fn run_families(cmd: &FamilyCommand) -> Result<Outcome> {
    match cmd {
        FamilyCommand::Map { kind, n, out } => emit_map(&families::make_map(*kind, *n)?, out),
        FamilyCommand::Invariant { group, out } => emit_map(&families::invariant_function(*group)?, out),
        FamilyCommand::Quotient { group, subgroup, out } => {
            emit_map(&families::invariant_quotient(*group, *subgroup)?, out)
        }
        FamilyCommand::Ritt { n, out } => {
            let p = families::ritt_pair(*n)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(dir)?;
                write_map_file(&p.a, &dir.join("a.json"))?;
                write_map_file(&p.x, &dir.join("x.json"))?;
                write_map_file(&p.y, &dir.join("y.json"))?;
            }
            Ok(Outcome::ok(json!({
                "n": n,
                "a": map_json(&p.a),
                "x": map_json(&p.x),
                "y": map_json(&p.y),
            })))
        }
    }
}

fn run_spectrum(args: &SpectrumArgs, prec: u32) -> Result<Outcome> {
    let f = parse_map_file(&args.map)?;
    match &args.compare {
        None => Ok(Outcome::ok(multiplier_spectrum(&f, args.s, prec)?.to_json(args.digits))),
        Some(other) => {
            let g = parse_map_file(other)?;
            let same = spectrum::isospectral(&f, &g, args.smax, args.tol, prec)?;
            Ok(Outcome::verdict(
                json!({"smax": args.smax, "tol": args.tol, "isospectral": same}),
                same,
            ))
        }
    }
}

fn run_curve(args: &CurveArgs, prec: u32, seed: u64) -> Result<Outcome> {
    let a = parse_map_file(&args.map)?;
    let data = monodromy(&a, prec, seed)?;
    let report = components_from(&data)?;
    let mut doc = json!({
        "component_count": report.component_count(),
        "report": report,
    });
    if args.monodromy {
        doc["monodromy"] = data.to_json();
    }
    if args.galois {
        doc["galois_closure_genus"] = json!(galois_genus_from(&data, args.bound)?);
    }
    Ok(Outcome::ok(doc))
}

fn read_measure(path: &Path) -> Result<EmpiricalMeasure> {
    EmpiricalMeasure::from_json_str(&std::fs::read_to_string(path)?)
}

fn run_measure(args: &MeasureArgs, seed: u64) -> Result<Outcome> {
    if let Some(files) = &args.compare {
        let a = read_measure(&files[0])?;
        let b = read_measure(&files[1])?;
        let d = measure::measure_distance(&a, &b)?;
        return Ok(Outcome::verdict(
            json!({"distance": d, "threshold": args.threshold, "within": d <= args.threshold}),
            d <= args.threshold,
        ));
    }
    if args.calibrate {
        let c = measure::calibrate(args.samples, args.burnin, args.grid)?;
        let doc = serde_json::to_value(&c).expect("calibration serializes");
        if let Some(path) = &args.out {
            let mut text = serde_json::to_string_pretty(&c).expect("calibration serializes");
            text.push('\n');
            std::fs::write(path, text)?;
        }
        return Ok(Outcome::ok(doc));
    }
    let path = args.map.as_ref().expect("clap requires a task");
    let f = parse_map_file(path)?;
    let m = measure::sample_backward(&f, args.samples, args.burnin, seed, args.grid)?;
    let doc = m.to_json();
    match (&args.out, args.format) {
        (Some(out), OutFormat::Json) => {
            let mut text = serde_json::to_string(&doc).expect("measure serializes");
            text.push('\n');
            std::fs::write(out, text)?;
        }
        (Some(out), OutFormat::Csv) => measure::export_histogram(&m, ExportFormat::Csv, out)?,
        (Some(out), OutFormat::Png) => measure::export_histogram(&m, ExportFormat::Png, out)?,
        (None, OutFormat::Json) => {}
        (None, _) => return Err(Error::Domain("--format csv|png needs --out".into())),
    }
    if args.out.is_some() {
        return Ok(Outcome::ok(json!({
            "degree": m.degree,
            "samples": m.samples,
            "burn_in": m.burn_in,
            "failures": m.failures,
            "written": args.out,
        })));
    }
    Ok(Outcome::ok(doc))
}

/// One named check of the self-test suite.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SelftestReport {
    pub pass: bool,
    pub first_failure: Option<&'static str>,
    pub checks: Vec<CheckResult>,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match f() {
        Ok((pass, detail)) => CheckResult { name, pass, detail },
        Err(e) => CheckResult {
            name,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

/// The self-test suite with a caller-supplied Chebyshev generator.
pub fn run_selftest_with(chebyshev: &dyn Fn(usize) -> RationalMap, prec: u32, seed: u64) -> SelftestReport {
    let power = |d: usize| RationalMap::monomial(CycElement::one(1), d);
    let power_chain = |d: u32| -> Vec<RationalMap> {
        (0..d as i64).map(|k| RationalMap::monomial(CycElement::zeta_pow(d, k), 1)).collect()
    };
    let mut checks = Vec::new();

    checks.push(check("ritt-identity", || {
        for n in 2..=6 {
            let p = families::ritt_pair_with(n, chebyshev)?;
            if !verify_equal_chain(&p.a, &[p.x, p.y])? {
                return Ok((false, format!("T_{n}∘½(z+1/z) ≠ T_{n}∘½(εz+1/(εz))")));
            }
        }
        Ok((true, "n = 2..6".into()))
    }));

    checks.push(check("dihedral-quotient", || {
        for n in 2..=6u32 {
            let psi = families::invariant_quotient(GroupSpec::Dihedral(n), GroupSpec::Dihedral(1))?;
            if psi != chebyshev(n as usize) {
                return Ok((false, format!("quotient of D{} by D2 is not T_{n}", 2 * n)));
            }
        }
        Ok((true, "n = 2..6".into()))
    }));

    checks.push(check("forward-construction", || {
        let mut count = 0;
        for n in 2..=6 {
            let p = families::ritt_pair_with(n, chebyshev)?;
            let fs = funceq::build_from_decomposition(&p.a, &[p.x, p.y])?;
            if !verify_mme_system(&fs)?.pass {
                return Ok((false, format!("system fails for the Ritt pair n = {n}")));
            }
            count += 1;
        }
        for d in 2..=4u32 {
            let fs = funceq::build_from_decomposition(&power(d as usize), &power_chain(d))?;
            if !verify_mme_system(&fs)?.pass {
                return Ok((false, format!("system fails for z^{d}")));
            }
            count += 1;
        }
        Ok((true, format!("{count} systems")))
    }));

    checks.push(check("iterate-equalization", || {
        for n in 2..=3 {
            let p = families::ritt_pair_with(n, chebyshev)?;
            let fs = funceq::build_from_decomposition(&p.a, &[p.x, p.y])?;
            if !funceq::iterate_equalization(&fs[0], &fs[1], 3)? {
                return Ok((false, format!("Ritt pair n = {n}")));
            }
        }
        let fs = funceq::build_from_decomposition(&power(2), &power_chain(2))?;
        if !funceq::iterate_equalization(&fs[0], &fs[1], 3)? {
            return Ok((false, "z^2 with -z".into()));
        }
        Ok((true, "l = 1..3".into()))
    }));

    checks.push(check("common-exponents", || {
        let cases: [(&[u64], Option<&[u128]>); 4] = [
            (&[4, 8], Some(&[3, 2])),
            (&[2, 2, 2], Some(&[1, 1, 1])),
            (&[2, 3], None),
            (&[4, 2, 16], Some(&[2, 4, 1])),
        ];
        for (degrees, expected) in cases {
            let got = common_power_exponents(degrees)?;
            if got.as_deref() != expected {
                return Ok((false, format!("{degrees:?} gave {got:?}")));
            }
        }
        Ok((true, "4 cases".into()))
    }));

    checks.push(check("isospectral-swap", || {
        let u = power(2);
        let v = RationalMap::polynomial(crate::algebra::Polynomial::from_ints(1, &[1, 1]));
        let w = RationalMap::new(
            crate::algebra::Polynomial::from_ints(1, &[1, 0, 0, 1]),
            crate::algebra::Polynomial::from_ints(1, &[0, 2]),
        )?;
        for (a, b) in [(&u, &v), (&u, &w)] {
            let (ab, ba) = (a.compose(b)?, b.compose(a)?);
            if !spectrum::isospectral(&ab, &ba, 2, spectrum::DEFAULT_TOL, prec)? {
                return Ok((false, format!("{a} and {b}")));
            }
        }
        Ok((true, "s = 1, 2".into()))
    }));

    checks.push(check("curve-components", || {
        let r = curve::curve_components(&power(3), prec, seed)?;
        if r.component_count() != 2 || r.components.iter().any(|c| c.genus != 0) {
            return Ok((false, format!("z^3 gave {r:?}")));
        }
        let r = curve::curve_components(&RationalMap::polynomial(chebyshev_polynomial(4)), prec, seed)?;
        let mut sizes: Vec<_> = r.components.iter().map(|c| (c.orbit_size, c.genus)).collect();
        sizes.sort();
        if sizes != [(1, 0), (2, 0)] {
            return Ok((false, format!("T_4 gave {r:?}")));
        }
        Ok((true, "z^3 and T_4".into()))
    }));

    checks.push(check("galois-genus", || {
        for n in 2..=5 {
            for (name, a) in [("z", power(n)), ("T", RationalMap::polynomial(chebyshev_polynomial(n)))] {
                let g = curve::galois_closure_genus(&a, prec, seed)?;
                if g != 0 {
                    return Ok((false, format!("{name}^{n} has genus {g}")));
                }
            }
        }
        Ok((true, "z^n and T_n, n = 2..5".into()))
    }));

    let first_failure = checks.iter().find(|c| !c.pass).map(|c| c.name);
    SelftestReport {
        pass: first_failure.is_none(),
        first_failure,
        checks,
    }
}

pub fn run_selftest(prec: u32, seed: u64) -> SelftestReport {
    run_selftest_with(&|n| RationalMap::polynomial(chebyshev_polynomial(n)), prec, seed)
}

fn with_run_info(mut doc: Value, cli: &Cli) -> Value {
    if let Value::Object(map) = &mut doc {
        map.insert("seed".into(), json!(cli.seed));
        map.insert("precision".into(), json!(cli.precision));
    }
    doc
}

fn render(doc: &Value, compact: bool) -> String {
    let mut s = if compact {
        serde_json::to_string(doc)
    } else {
        serde_json::to_string_pretty(doc)
    }
    .expect("JSON values serialize");
    s.push('\n');
    s
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    if cli.precision < 64 {
        return Err(Error::Domain("precision must be at least 64 bits".into()));
    }
    match &cli.command {
        Command::Verify(args) => run_verify(args),
        Command::Families { family } => run_families(family),
        Command::Spectrum(args) => run_spectrum(args, cli.precision),
        Command::Curve(args) => run_curve(args, cli.precision, cli.seed),
        Command::Measure(args) => run_measure(args, cli.seed),
        Command::Exponents { degrees } => exponents_doc(degrees),
        Command::Selftest => {
            let report = run_selftest(cli.precision, cli.seed);
            let pass = report.pass;
            Ok(Outcome::verdict(serde_json::to_value(report).expect("report serializes"), pass))
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. The JSON result goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            let _ = out.write_all(render(&with_run_info(outcome.doc, &cli), cli.json).as_bytes());
            outcome.code
        }
        Err(e) => {
            let code = if e.is_numeric() { EXIT_NUMERIC } else { EXIT_USAGE };
            let doc = with_run_info(json!({"error": e.to_string()}), &cli);
            let _ = err.write_all(render(&doc, cli.json).as_bytes());
            code
        }
    }
}
