//! `toprec`: command-line front end for the recursion engine.

mod suites;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};
use toprec::algebra::{FieldSpec, Scalar};
use toprec::curve::{parse_expr, DeckMap, Rf, SpectralCurve};
use toprec::identities::{free_energy, sample_points, CheckReport};
use toprec::recursion::{CorrelatorKey, Engine, EngineConfig, Slot};
use toprec::Error;

#[derive(Parser)]
#[command(name = "toprec", version, about = "Exact topological recursion on genus-0 spectral curves")]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Add decimal approximations (not authoritative).
    #[arg(long, global = true)]
    float: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List branch points with their deck maps.
    BranchPoints { file: PathBuf },
    /// Compute w_k^(h) with the first slot symbolic.
    Correlator {
        file: PathBuf,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        k: usize,
        /// Comma-separated spectator points p2,...,pk (defaults to sampled points).
        #[arg(long, value_delimiter = ',')]
        at: Vec<String>,
        /// Initial truncation order.
        #[arg(long)]
        order: Option<i64>,
    },
    /// Compute the free energy F^(h), h >= 2.
    FreeEnergy {
        file: PathBuf,
        #[arg(long)]
        h: usize,
    },
    /// Run identity suites.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 2)]
        hmax: usize,
        /// Random evaluation tuples per sampled check.
        #[arg(long, default_value_t = 3)]
        tuples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    SheetSum,
    Symmetry,
    Dilaton,
    Commutation,
    Loop,
    ThetaFree,
    Hequiv,
    DoubleBp,
    Rauch,
    Robustness,
    Lemma,
}

#[derive(Serialize)]
struct CurveInfo {
    path: String,
    field: String,
    fingerprint: String,
}

#[derive(Serialize)]
struct Report {
    command: Vec<String>,
    curve: Option<CurveInfo>,
    results: Vec<serde_json::Value>,
    checks: Vec<CheckReport>,
    orders: BTreeMap<String, i64>,
    version: &'static str,
    elapsed_ms: u128,
}

/// A failure that ends the command with a given exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            e if e.is_resource() => 3,
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::UnsupportedBranching { .. }
            | Error::Basepoint(_)
            | Error::Field(_)
            | Error::Usage(_)
            | Error::UnsupportedCurve(_)
            | Error::LogarithmicPrimitive(..)
            | Error::Regularization(_) => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn fingerprint(curve: &SpectralCurve) -> String {
    Sha256::digest(curve.spec().canonical().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn load(file: &PathBuf) -> Result<(SpectralCurve, CurveInfo), Failure> {
    let curve = SpectralCurve::from_path(file).map_err(|e| Failure {
        message: format!("{}: {e}", file.display()),
        ..Failure::from(e)
    })?;
    let info = CurveInfo {
        path: file.display().to_string(),
        field: curve.field().canonical().to_string(),
        fingerprint: fingerprint(&curve),
    };
    Ok((curve, info))
}

fn float_text(s: &Scalar) -> String {
    let (re, im) = s.to_complex_f64();
    if im == 0.0 {
        format!("{re:.12e}")
    } else {
        format!("{re:.12e}{im:+.12e}i")
    }
}

struct Ctx {
    json: bool,
    float: bool,
    text: Vec<String>,
}

impl Ctx {
    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }
}

fn rational_result(ctx: &mut Ctx, field: FieldSpec, label: &str, f: &Rf, var: &str, dvar: &str) -> serde_json::Value {
    let (num, den) = f.monomial_lists_with(var, |c| c.render(field));
    let mut v = serde_json::json!({
        "name": label,
        "value": f.render(var),
        "num": num,
        "den": den,
        "differential": dvar,
    });
    let (tnum, tden) = f.monomial_lists(var);
    ctx.line(format!("{label} = {} {dvar}", f.render(var)));
    ctx.line(format!("  num: [{}], den: [{}]", tnum.join(", "), tden.join(", ")));
    if ctx.float {
        let (fnum, fden) = f.monomial_lists_with(var, float_text);
        ctx.line(format!("  approx (non-authoritative) num: [{}], den: [{}]", fnum.join(", "), fden.join(", ")));
        v["approx"] = serde_json::json!({ "authoritative": false, "num": fnum, "den": fden });
    }
    v
}

fn parse_point(s: &str) -> Result<Scalar, Failure> {
    let usage = |m: String| Failure { code: 2, message: m };
    let f = parse_expr(s).map_err(|e| usage(format!("cannot parse point `{s}`: {}", e.message)))?;
    f.as_constant().ok_or_else(|| usage(format!("point `{s}` is not a constant")))
}

fn branch_points(ctx: &mut Ctx, curve: &SpectralCurve) -> Vec<serde_json::Value> {
    let field = curve.field();
    let mut out = Vec::new();
    if curve.branch_points().is_empty() {
        ctx.line("no finite branch points");
    }
    for (i, b) in curve.branch_points().iter().enumerate() {
        let deck: Vec<String> = b
            .deck
            .iter()
            .enumerate()
            .map(|(j, d)| match d {
                DeckMap::Exact(s) => s.render("z"),
                DeckMap::Germ => match curve.deck_germ(i, j + 1, 6) {
                    // ϑ(α + s) − α as a series in s
                    Ok(g) => format!("germ {:?}", g.series),
                    Err(e) => format!("germ unavailable: {e}"),
                },
            })
            .collect();
        let y2 = b.y_minus2.as_ref().map(|c| c.render(field));
        ctx.line(format!(
            "z = {}  n_b = {}  x = {}  deck: [{}]{}",
            b.location,
            b.nb,
            b.x_value,
            deck.join(", "),
            b.y_minus2.as_ref().map(|c| format!("  y_-2 = {c}")).unwrap_or_default()
        ));
        out.push(serde_json::json!({
            "location": b.location.render(field),
            "nb": b.nb,
            "x": b.x_value.render(field),
            "deck": deck,
            "y_minus2": y2,
        }));
    }
    out
}

fn run(cli: &Cli, ctx: &mut Ctx) -> Result<(Report, bool), Failure> {
    let start = Instant::now();
    let command: Vec<String> = std::env::args().skip(1).collect();
    let config = EngineConfig::from_env()?;
    let mut report = Report {
        command,
        curve: None,
        results: Vec::new(),
        checks: Vec::new(),
        orders: BTreeMap::new(),
        version: env!("CARGO_PKG_VERSION"),
        elapsed_ms: 0,
    };
    let mut ok = true;
    match &cli.command {
        Command::BranchPoints { file } => {
            let (curve, info) = load(file)?;
            report.curve = Some(info);
            report.results = branch_points(ctx, &curve);
        }
        Command::Correlator { file, h, k, at, order } => {
            let (curve, info) = load(file)?;
            report.curve = Some(info);
            if *k == 0 {
                return Err(Failure { code: 2, message: "--k must be at least 1".into() });
            }
            let points: Vec<Scalar> = if at.is_empty() {
                sample_points(&curve, 1, k - 1)
            } else {
                at.iter().map(|s| parse_point(s)).collect::<Result<_, _>>()?
            };
            if points.len() != k - 1 {
                return Err(Failure { code: 2, message: format!("--at needs {} points for k = {k}, got {}", k - 1, points.len()) });
            }
            let mut config = config;
            if let Some(n) = order {
                config.initial_order = Some(*n);
                config.max_order = config.max_order.max(*n);
            }
            let field = curve.field();
            let engine = Engine::new(curve, config);
            let key = CorrelatorKey::new(*h, std::iter::once(Slot::Sym).chain(points.iter().cloned().map(Slot::At)).collect());
            let value = engine.correlator(&key)?;
            let f = value.rational()?;
            let label = key.describe().replace("p0", "q");
            let mut v = rational_result(ctx, field, &label, &f, "q", "dq");
            v["at"] = serde_json::json!(points.iter().map(|p| p.render(field)).collect::<Vec<_>>());
            if !points.is_empty() {
                let dp: Vec<String> = (2..=*k).map(|i| format!("dp{i}")).collect();
                ctx.line(format!("  spectators: [{}] with {}", v["at"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect::<Vec<_>>().join(", "), dp.join(" ")));
            }
            report.results.push(v);
            report.orders = engine.orders();
        }
        Command::FreeEnergy { file, h } => {
            let (curve, info) = load(file)?;
            report.curve = Some(info);
            let field = curve.field();
            let engine = Engine::new(curve, config);
            let f = free_energy(&engine, *h)?;
            ctx.line(format!("F^({h}) = {}", f.value));
            for (i, c) in f.contributions.iter().enumerate() {
                ctx.line(format!("  branch point #{i}: {c}"));
            }
            let mut v = serde_json::json!({
                "name": format!("F^({h})"),
                "value": f.value.render(field),
                "contributions": f.contributions.iter().map(|c| c.render(field)).collect::<Vec<_>>(),
            });
            if ctx.float {
                ctx.line(format!("  approx (non-authoritative): {}", float_text(&f.value)));
                v["approx"] = serde_json::json!({ "authoritative": false, "value": float_text(&f.value) });
            }
            report.results.push(v);
            report.orders = engine.orders();
        }
        Command::Check { file, suite, hmax, tuples, seed } => {
            let (curve, info) = load(file)?;
            report.curve = Some(info);
            let engine = Engine::new(curve, config);
            let checks = suites::run(&engine, *suite, *hmax, *tuples, *seed)?;
            for c in &checks {
                let tag = if c.skipped {
                    "SKIP"
                } else if c.passed {
                    "PASS"
                } else {
                    "FAIL"
                };
                let detail = if c.detail.chars().count() > 160 && !ctx.json {
                    format!("{}...", c.detail.chars().take(157).collect::<String>())
                } else {
                    c.detail.clone()
                };
                ctx.line(format!("{tag}  [{}] {}  ({detail})", c.suite, c.name));
                if let Some(m) = &c.mismatch {
                    ctx.line(format!("      mismatch (lhs - rhs): {m}"));
                }
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            let skipped = checks.iter().filter(|c| c.skipped).count();
            ctx.line(format!("{} passed, {failed} failed, {skipped} skipped", checks.len() - failed - skipped));
            ok = failed == 0;
            report.checks = checks;
            report.orders = engine.orders();
        }
    }
    report.elapsed_ms = start.elapsed().as_millis();
    Ok((report, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut ctx = Ctx { json: cli.json, float: cli.float, text: Vec::new() };
    match run(&cli, &mut ctx) {
        Ok((report, ok)) => {
            if ctx.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                if let Some(c) = &report.curve {
                    println!("curve: {} ({}, sha256 {})", c.path, c.field, &c.fingerprint[..16]);
                }
                for l in &ctx.text {
                    println!("{l}");
                }
                if report.orders.len() > 8 {
                    let max = report.orders.values().max().copied().unwrap_or(0);
                    println!("orders: {} correlators, highest truncation order {max} (see --json)", report.orders.len());
                } else if !report.orders.is_empty() {
                    let orders: Vec<String> = report.orders.iter().map(|(k, v)| format!("{k}: {v}")).collect();
                    println!("orders: {}", orders.join(", "));
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            if ctx.json {
                let v = serde_json::json!({ "error": f.message, "exit_code": f.code, "version": env!("CARGO_PKG_VERSION") });
                println!("{}", serde_json::to_string_pretty(&v).expect("error serializes"));
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
