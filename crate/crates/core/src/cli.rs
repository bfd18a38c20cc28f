//! Command line front end shared by the `strange-qmf` binary and its tests.

use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Rational;
use serde_json::{json, Value};

use crate::cyclotomic::{gcd, Cyclotomic};
use crate::eichler::{self, FStarPoint, KernelBranch, Path, QuadratureConfig, RowStatus};
use crate::error::{Error, Result};
use crate::hpc::HpComplex;
use crate::lfunctions::{self, FitMode, HForm, HKind};
use crate::modularforms::{self, UHPoint};
use crate::qseries::{self, EtaQuotientSpec, QSeries, RationalQSeries};
use crate::strange::{self, Component, GSeries, RationalPoint};

#[derive(Parser, Debug)]
#[command(
    name = "strange-qmf",
    version,
    about = "Strange q-series at roots of unity, eta quotients and their period integrals"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the defaults of [`RunConfig`].
#[derive(Args, Debug, Default, Clone)]
pub struct GlobalArgs {
    /// Working precision in bits [default: 128].
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Lower cutoff height of the period integrals [default: 1e-9].
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Upper height of the period integrals [default: 1e9].
    #[arg(long, global = true)]
    pub upper: Option<f64>,
    /// Relative quadrature tolerance [default: 1e-10].
    #[arg(long = "rel-tol", global = true)]
    pub rel_tol: Option<f64>,
    /// Maximum bisection depth per panel [default: 20].
    #[arg(long = "max-depth", global = true)]
    pub max_depth: Option<u32>,
    /// Branch of the Eichler kernel: principal or second-sheet [default: second-sheet].
    #[arg(long, global = true)]
    pub branch: Option<String>,
    /// Truncation exponent for q-series [default: 30].
    #[arg(long, global = true)]
    pub trunc: Option<i64>,
    /// Output format [default: text].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core [default: 0].
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Flat `key = value` file with defaults for the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        <Format as ValueEnum>::from_str(s.trim(), true)
            .map_err(|_| Error::invalid(format!("unknown format {s:?}")))
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact value of a strange series at a rational point.
    Strange {
        /// 1, 2, 3 or F.
        #[arg(long)]
        component: Component,
        #[arg(long, allow_hyphen_values = true)]
        x: RationalPoint,
    },
    /// Exact values against the numerical period integral at 1/k.
    Table {
        /// Odd k as a list `3,5,7` or range `3..9`.
        #[arg(long, default_value = "3,5,7,9")]
        k: String,
    },
    /// Reproduction checks with a pass/fail report.
    Verify(VerifyArgs),
    /// Numerical period integrals.
    Integral {
        #[arg(long, value_enum, default_value_t = IntegralKind::Omega)]
        kind: IntegralKind,
        /// Theta component for f* and g.
        #[arg(long, default_value_t = 1)]
        component: u8,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<RationalPoint>,
        /// Lower half-plane point for f*, such as `0.2-0.5i`.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        /// `vertical` or `ray:<angle in radians>` for g.
        #[arg(long, default_value = "vertical")]
        path: String,
    },
    /// Exact values L(-n, chi) of the characters attached to a root of unity.
    Lvalue {
        /// 1 for the odd-order character, 2 for the even-order one.
        #[arg(long = "L")]
        l: u8,
        #[arg(long, allow_hyphen_values = true)]
        x: RationalPoint,
        /// Comma separated orders n.
        #[arg(long, default_value = "1,3,5")]
        n: String,
    },
    /// Exact generalized quadratic Gauss sum G(a, b, c).
    Gauss {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        b: i64,
        #[arg(long)]
        c: u64,
    },
    /// Exact q-expansions.
    Series {
        #[arg(long, value_enum)]
        name: SeriesName,
        /// Apply the half-derivative sum a(n) q^n -> sum sqrt(n) a(n) q^n.
        #[arg(long)]
        half_derivative: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IntegralKind {
    Omega,
    Fstar,
    G,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeriesName {
    Theta1,
    Theta2,
    Theta3,
    Theta3Alt,
    F10,
    EtaHalf,
    EtaHalfProduct,
    G1,
    G1Fine,
    Kernel,
    FineDefect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    #[value(name = "eta-id")]
    EtaId,
    #[value(name = "H-transform", alias = "h-transform")]
    HTransform,
    Quantum,
    Inversion,
    Asymptotics,
    Gauss,
    Meanzero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Parity {
    Odd,
    Even,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: Check,
    /// Keep only odd or even k.
    #[arg(value_enum)]
    pub parity: Option<Parity>,
    /// k as a list `3,5,7` or range `3..15`.
    #[arg(long)]
    pub k: Option<String>,
    /// Single upper half-plane point such as `0.3+0.7i`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Comma separated rational points.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Character family: 1 (odd order, H9) or 2 (even order, H10).
    #[arg(long = "L")]
    pub l: Option<u8>,
    /// Number of random points when --z is absent.
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Largest modulus for the Gauss sum facts.
    #[arg(long = "c-max", default_value_t = 64)]
    pub c_max: u64,
    /// First radial parameter of the asymptotic check.
    #[arg(long, default_value_t = 0.1)]
    pub t0: f64,
    /// Number of halvings plus one.
    #[arg(long, default_value_t = 8)]
    pub levels: u32,
    /// Summation form of the radial sums: regularized, literal or as-printed.
    #[arg(long, default_value = "regularized")]
    pub form: String,
}

/// Resolved settings of one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub precision: u32,
    pub quadrature: QuadratureConfig,
    pub trunc: i64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: 128,
            quadrature: QuadratureConfig::default(),
            trunc: 30,
            format: Format::Text,
            out: None,
            jobs: 0,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad value {v:?} for {key}")))
}

impl RunConfig {
    /// Defaults, then the config file, then explicit flags.
    pub fn resolve(g: &GlobalArgs) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(p) = &g.config {
            cfg.apply_file(p)?;
        }
        if let Some(v) = g.precision {
            cfg.set_precision(v);
        }
        if let Some(v) = g.eps {
            cfg.quadrature.eps = v;
        }
        if let Some(v) = g.upper {
            cfg.quadrature.upper = v;
        }
        if let Some(v) = g.rel_tol {
            cfg.quadrature.rel_tol = v;
        }
        if let Some(v) = g.max_depth {
            cfg.quadrature.max_depth = v;
        }
        if let Some(v) = &g.branch {
            cfg.quadrature.branch = v.parse()?;
        }
        if let Some(v) = g.trunc {
            cfg.trunc = v;
        }
        if let Some(v) = g.format {
            cfg.format = v;
        }
        if let Some(v) = &g.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = g.jobs {
            cfg.jobs = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set_precision(&mut self, bits: u32) {
        self.precision = bits;
        self.quadrature.precision = bits;
    }

    fn validate(&self) -> Result<()> {
        if self.precision < 24 {
            return Err(Error::invalid("precision must be at least 24 bits"));
        }
        if self.trunc < 1 {
            return Err(Error::invalid("trunc must be positive"));
        }
        self.quadrature.validate()
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, path: &FsPath) -> Result<()> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::invalid(format!("{}:{}: expected key = value", path.display(), lineno + 1))
            })?;
            self.apply_pair(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn apply_pair(&mut self, key: &str, v: &str) -> Result<()> {
        match key.replace('_', "-").as_str() {
            "precision" => self.set_precision(parse_value(key, v)?),
            "eps" => self.quadrature.eps = parse_value(key, v)?,
            "upper" => self.quadrature.upper = parse_value(key, v)?,
            "rel-tol" => self.quadrature.rel_tol = parse_value(key, v)?,
            "max-depth" => self.quadrature.max_depth = parse_value(key, v)?,
            "branch" => self.quadrature.branch = v.parse::<KernelBranch>()?,
            "trunc" => self.trunc = parse_value(key, v)?,
            "format" => self.format = v.parse()?,
            "out" => self.out = Some(PathBuf::from(v)),
            "jobs" => self.jobs = parse_value(key, v)?,
            other => return Err(Error::invalid(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }
}

/// Output of one command in all three renderings.
#[derive(Clone, Debug)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub code: i32,
}

impl Report {
    fn new(text: String, json: Value, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Report {
            text,
            json,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
            code: 0,
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Text => Ok(self.text.clone()),
            Format::Json => serde_json::to_string_pretty(&self.json)
                .map(|s| s + "\n")
                .map_err(|e| Error::invalid(format!("json output failed: {e}"))),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::invalid(format!("csv output failed: {e}"));
                w.write_record(&self.header).map_err(io)?;
                for r in &self.rows {
                    w.write_record(r).map_err(io)?;
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| Error::invalid(format!("csv output failed: {e}")))?;
                String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
            }
        }
    }
}

/// Parses `3,5,7`, `3..15` (inclusive) or a mixture such as `3..7,11`.
pub fn parse_k_list(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let hi = hi.trim_start_matches('=');
            let lo: u64 = parse_value("k", lo)?;
            let hi: u64 = parse_value("k", hi)?;
            if lo > hi {
                return Err(Error::invalid(format!("empty range {part}")));
            }
            out.extend(lo..=hi);
        } else {
            out.push(parse_value("k", part)?);
        }
    }
    if out.is_empty() || out.contains(&0) {
        return Err(Error::invalid(format!("bad k list {s:?}")));
    }
    Ok(out)
}

fn parse_points(s: &str) -> Result<Vec<RationalPoint>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(RationalPoint::from_str)
        .collect()
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| parse_value("n", p))
        .collect()
}

fn parse_complex(s: &str, prec: u32) -> Result<HpComplex> {
    HpComplex::parse(s, prec).ok_or_else(|| Error::invalid(format!("bad complex number {s:?}")))
}

fn parse_path(s: &str) -> Result<Path> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("vertical") {
        return Ok(Path::Vertical);
    }
    if let Some(a) = s.strip_prefix("ray:") {
        let angle: f64 = parse_value("path", a)?;
        return Ok(Path::Ray { angle });
    }
    Err(Error::invalid(format!("bad path {s:?}; use vertical or ray:<angle>")))
}

fn parse_form(s: &str) -> Result<HForm> {
    match s.trim().to_ascii_lowercase().as_str() {
        "regularized" => Ok(HForm::Regularized),
        "literal" => Ok(HForm::Literal),
        "as-printed" | "asprinted" => Ok(HForm::AsPrinted),
        other => Err(Error::invalid(format!("unknown form {other:?}"))),
    }
}

fn pair(c: &HpComplex) -> [f64; 2] {
    [c.re_f64(), c.im_f64()]
}

fn decimal(c: &Cyclotomic) -> String {
    c.embed(64).to_decimal(4)
}

fn coprime_residues(k: u64) -> impl Iterator<Item = i64> {
    (1..=k).filter(move |a| gcd(*a, k) == 1 || k == 1).map(|a| a as i64)
}

/// Absolute residual accepted by the modularity checks at `prec` bits.
pub fn numeric_tolerance(prec: u32) -> f64 {
    2f64.powf(-0.8 * prec as f64)
}

fn cmd_strange(c: Component, x: &RationalPoint) -> Result<Report> {
    let v = strange::strange_eval(c, x)?;
    let j = v.to_json(x);
    let text = format!("{}\n{}\n", v.exact, decimal(&v.exact));
    let row = vec![
        c.label().to_string(),
        x.to_string(),
        v.exact.to_string(),
        j.decimal[0].to_string(),
        j.decimal[1].to_string(),
        v.terms_used.to_string(),
    ];
    let json = serde_json::to_value(&j).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(Report::new(
        text,
        json,
        &["component", "x", "exact", "re", "im", "terms_used"],
        vec![row],
    ))
}

/// Largest `|Omega(1/k) - pi i (1+i) theta_1^S(zeta_k)|` accepted per row.
pub const TABLE_TOLERANCE: f64 = 5e-3;

fn cmd_table(ks: &[u64], cfg: &RunConfig) -> Result<Report> {
    if let Some(k) = ks.iter().find(|k| *k % 2 == 0) {
        return Err(Error::OutsideDomain {
            component: "1".into(),
            point: format!("1/{k}"),
            rule: "the table needs odd k".into(),
        });
    }
    let rows: Vec<eichler::TableRow> = ks
        .par_iter()
        .map(|k| eichler::table_row(*k, &cfg.quadrature))
        .collect::<Result<_>>()?;
    let mut text = format!(
        "{:>3}  {:<40}  {:>26}  {:>26}  {:>10}  {:>8}\n",
        "k", "exact", "pi i (1+i) value", "Omega(1/k)", "abs diff", "seconds"
    );
    let fmt = |p: &[f64; 2]| HpComplex::from_f64(p[0], p[1], 53).to_decimal(4);
    for r in &rows {
        text.push_str(&format!(
            "{:>3}  {:<40}  {:>26}  {:>26}  {:>10.3e}  {:>8.2}\n",
            r.k,
            r.exact,
            fmt(&r.expected),
            fmt(&r.integral),
            r.abs_error,
            r.seconds
        ));
    }
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                r.exact.clone(),
                r.expected[0].to_string(),
                r.expected[1].to_string(),
                r.integral[0].to_string(),
                r.integral[1].to_string(),
                r.abs_error.to_string(),
                r.error_estimate.to_string(),
                r.nodes_used.to_string(),
                r.seconds.to_string(),
            ]
        })
        .collect();
    let json = json!({ "tolerance": TABLE_TOLERANCE, "rows": rows });
    let mut rep = Report::new(
        text,
        json,
        &[
            "k",
            "exact",
            "expected_re",
            "expected_im",
            "integral_re",
            "integral_im",
            "abs_error",
            "error_estimate",
            "nodes_used",
            "seconds",
        ],
        csv_rows,
    );
    if rows.iter().any(|r| !(r.abs_error < TABLE_TOLERANCE)) {
        rep.code = 4;
    }
    Ok(rep)
}

/// One line of a verification report.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CheckItem {
    pub check: String,
    pub item: String,
    pub passed: bool,
    /// Exact identity rather than a numeric tolerance.
    pub exact: bool,
    pub detail: String,
    /// Exit code contributed when the item fails.
    pub code: i32,
    pub data: Value,
}

impl CheckItem {
    fn ok(check: &str, item: String, passed: bool, exact: bool, detail: String, data: Value) -> Self {
        CheckItem {
            check: check.into(),
            item,
            passed,
            exact,
            detail,
            code: if passed {
                0
            } else if exact {
                1
            } else {
                4
            },
            data,
        }
    }

    fn from_error(check: &str, item: String, exact: bool, e: &Error) -> Self {
        CheckItem {
            check: check.into(),
            item,
            passed: false,
            exact,
            detail: e.to_string(),
            code: e.exit_code(),
            data: json!({ "error": e.kind(), "message": e.to_string() }),
        }
    }
}

fn wrap_item(check: &str, item: String, exact: bool, r: Result<CheckItem>) -> CheckItem {
    r.unwrap_or_else(|e| CheckItem::from_error(check, item, exact, &e))
}

fn random_points(n: usize, seed: u64, prec: u32) -> Vec<HpComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im = 10f64.powf(rng.gen_range(-1.0..0.5));
            HpComplex::from_f64(re, im, prec)
        })
        .collect()
}

fn sample_points(args: &VerifyArgs, prec: u32) -> Result<Vec<HpComplex>> {
    match &args.z {
        Some(z) => Ok(vec![parse_complex(z, prec)?]),
        None => Ok(random_points(args.points, args.seed, prec)),
    }
}

fn z_label(z: &HpComplex) -> String {
    let (re, im) = z.to_f64_pair();
    format!("z={}", HpComplex::from_f64(re, im, 53).to_decimal(6).replace(' ', ""))
}

fn verify_eta_id(args: &VerifyArgs, cfg: &RunConfig) -> Result<Vec<CheckItem>> {
    let prec = cfg.precision;
    let tol = numeric_tolerance(prec);
    let pts = sample_points(args, prec)?;
    let mut items: Vec<CheckItem> = pts
        .par_iter()
        .map(|z| {
            let label = z_label(z);
            wrap_item(
                "eta-id",
                label.clone(),
                false,
                (|| {
                    let r = modularforms::eta_identity_residual(&UHPoint::new(z.clone())?, prec)?;
                    Ok(CheckItem::ok(
                        "eta-id",
                        label.clone(),
                        r < tol,
                        false,
                        format!("residual {r:.3e} (tolerance {tol:.1e})"),
                        json!({ "residual": r, "tolerance": tol }),
                    ))
                })(),
            )
        })
        .collect();
    let t = Rational::from(cfg.trunc.clamp(1, 10));
    let symbolic = (|| {
        let lhs = qseries::eta_expansion(&EtaQuotientSpec::eta_half_shift(), &t)?;
        let rhs = qseries::eta_expansion(&EtaQuotientSpec::eta_half_shift_product(), &t)?;
        let ok = qseries::series_equal(&lhs, &rhs, &t)?;
        Ok(CheckItem::ok(
            "eta-id",
            format!("series below q^{t}"),
            ok,
            true,
            format!("eta(z+1/2) = zeta48 eta(2z)^3/(eta(z) eta(4z)): {lhs}"),
            json!({ "trunc": t.to_string(), "equal": ok }),
        ))
    })();
    items.push(wrap_item("eta-id", format!("series below q^{t}"), true, symbolic));
    Ok(items)
}

fn verify_h_transform(args: &VerifyArgs, cfg: &RunConfig) -> Result<Vec<CheckItem>> {
    let prec = cfg.precision;
    let tol = numeric_tolerance(prec);
    let pts = sample_points(args, prec)?;
    Ok(pts
        .par_iter()
        .map(|z| {
            let label = z_label(z);
            wrap_item(
                "H-transform",
                label.clone(),
                false,
                (|| {
                    let r = modularforms::verify_transformations(&UHPoint::new(z.clone())?, prec)?;
                    let ok = r.translation < tol && r.inversion < tol;
                    Ok(CheckItem::ok(
                        "H-transform",
                        label.clone(),
                        ok,
                        false,
                        format!(
                            "T residual {:.3e}, S residual {:.3e} (tolerance {tol:.1e})",
                            r.translation, r.inversion
                        ),
                        json!({ "residuals": r, "tolerance": tol }),
                    ))
                })(),
            )
        })
        .collect())
}

fn verify_quantum(args: &VerifyArgs, cfg: &RunConfig) -> Result<Vec<CheckItem>> {
    let xs = parse_points(args.x.as_deref().unwrap_or("1/3,1/5,1/7"))?;
    let reports: Vec<_> = xs
        .par_iter()
        .map(|x| eichler::verify_quantum_transform(x, &cfg.quadrature))
        .collect();
    let mut items = Vec::new();
    for rep in reports {
        for row in &rep.rows {
            let item = format!("x={} {}{}", rep.x, row.law, row.row);
            let detail = match row.status {
                RowStatus::Skipped => format!("skipped: {}", row.reason.clone().unwrap_or_default()),
                _ => {
                    let mut d = match row.residual {
                        Some(r) if !row.exact => {
                            format!("residual {r:.3e} (tolerance {:.0e})", rep.tolerance)
                        }
                        _ => format!(
                            "{} = {}",
                            row.lhs.clone().unwrap_or_default(),
                            row.rhs.clone().unwrap_or_default()
                        ),
                    };
                    if let Some(l) = row.lambda {
                        d.push_str(&format!(", lambda {:.4} {:+.4}i", l[0], l[1]));
                    }
                    if let Some(r) = &row.reason {
                        d.push_str(&format!(" ({r})"));
                    }
                    d
                }
            };
            let data = serde_json::to_value(row).map_err(|e| Error::invalid(e.to_string()))?;
            items.push(CheckItem::ok(
                "quantum",
                item,
                row.status != RowStatus::Fail,
                row.exact,
                detail,
                data,
            ));
        }
    }
    Ok(items)
}

fn k_values(args: &VerifyArgs, default: &str, default_parity: Parity) -> Result<Vec<u64>> {
    let ks = parse_k_list(args.k.as_deref().unwrap_or(default))?;
    let parity = args.parity.unwrap_or(if args.k.is_some() { Parity::All } else { default_parity });
    Ok(ks
        .into_iter()
        .filter(|k| match parity {
            Parity::Odd => k % 2 == 1,
            Parity::Even => k % 2 == 0,
            Parity::All => true,
        })
        .collect())
}

fn verify_inversion(args: &VerifyArgs, cfg: &RunConfig) -> Result<Vec<CheckItem>> {
    let ks = k_values(args, "3..15", Parity::Odd)?;
    let points: Vec<RationalPoint> = ks
        .iter()
        .flat_map(|&k| coprime_residues(k).map(move |a| (a, k)))
        .map(|(a, k)| RationalPoint::new(a, k as i64))
        .collect::<Result<_>>()?;
    let mut items: Vec<CheckItem> = points
        .par_iter()
        .map(|x| {
            let label = format!("x={x}");
            wrap_item(
                "inversion",
                label.clone(),
                true,
                (|| {
                    let lhs = strange::phi(1, &x.neg())?;
                    let g1 = strange::g1_eval(x)?;
                    let fine = strange::g1_fine_eval(x)?;
                    let ok = lhs == g1 && g1 == fine;
                    Ok(CheckItem::ok(
                        "inversion",
                        label.clone(),
                        ok,
                        true,
                        format!("theta1^S(-x) = {lhs}; G1(x) = {g1}; Fine form = {fine}"),
                        json!({ "phi": lhs.to_json(), "g1": g1.to_json(), "fine": fine.to_json() }),
                    ))
                })(),
            )
        })
        .collect();
    let t = Rational::from(cfg.trunc);
    let series = (|| {
        let g1 = strange::inverse_series(GSeries::G1, &t)?;
        let fine = strange::inverse_series(GSeries::G1Fine, &t)?;
        let equal = qseries::series_equal(&g1, &fine, &t)?;
        let defect: QSeries = strange::fine_defect(&t)?.map_coeffs(|c| Cyclotomic::from_rational(c.clone()));
        let half = Cyclotomic::from_rational(Rational::from((1, 2)));
        let half_theta = qseries::theta_series(1, &t)?.scale(&half);
        let ok = qseries::series_equal(&defect, &half_theta, &t)?;
        Ok(CheckItem::ok(
            "inversion",
            format!("series below q^{t}"),
            ok,
            true,
            format!(
                "Fine form - G1 = theta1/2 as q-series: {ok}; G1 = Fine form as q-series: {equal} \
                 (the two agree at roots of unity, where theta1 vanishes radially)"
            ),
            json!({ "trunc": t.to_string(), "defect_is_half_theta1": ok, "series_equal": equal }),
        ))
    })();
    items.push(wrap_item("inversion", format!("series below q^{t}"), true, series));
    let laws: Vec<(Rational, Rational, u32)> = [(1, 3), (2, 1), (-5, 2)]
        .iter()
        .flat_map(|&a| {
            [(1, 1), (2, 1), (1, 2)]
                .into_iter()
                .flat_map(move |al| (0..=12u32).map(move |n| (Rational::from(a), Rational::from(al), n)))
        })
        .collect();
    let law_items: Vec<CheckItem> = laws
        .par_iter()
        .map(|(a, alpha, n)| {
            let label = format!("pochhammer a=q^{a} alpha={alpha} n={n}");
            wrap_item(
                "inversion",
                label.clone(),
                true,
                strange::invert_pochhammer(a, alpha, *n).map(|r| {
                    CheckItem::ok(
                        "inversion",
                        label.clone(),
                        r.holds,
                        true,
                        format!("holds: {}, printed sign convention holds: {}", r.holds, r.printed_form_holds),
                        serde_json::to_value(&r).unwrap_or(Value::Null),
                    )
                }),
            )
        })
        .collect();
    items.extend(law_items);
    Ok(items)
}

fn verify_asymptotics(args: &VerifyArgs, cfg: &RunConfig) -> Result<Vec<CheckItem>> {
    let l = args.l.unwrap_or(1);
    let (which, default_x) = match l {
        1 => (HKind::H9, "1/3"),
        2 => (HKind::H10, "1/2"),
        _ => return Err(Error::invalid("--L must be 1 or 2")),
    };
    let form = parse_form(&args.form)?;
    let xs = parse_points(args.x.as_deref().unwrap_or(default_x))?;
    let mut items = Vec::new();
    for x in xs {
        let label = format!("{which:?} x={x}");
        let rows = lfunctions::h_residuals(which, &x, args.t0, args.levels, 3, cfg.precision, form);
        items.push(wrap_item(
            "asymptotics",
            format!("{label} residual ratio"),
            false,
            rows.map(|rows| {
                let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
                let tail = &ratios[ratios.len().saturating_sub(2)..];
                let ok = !tail.is_empty() && tail.iter().all(|r| (r - 16.0).abs() <= 3.2);
                CheckItem::ok(
                    "asymptotics",
                    format!("{label} residual ratio"),
                    ok,
                    false,
                    format!(
                        "ratios under halving {:?} (expected 16 +- 20% on the last two)",
                        ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
                    ),
                    json!({ "rows": rows }),
                )
            }),
        ));
        let chi = lfunctions::character_for(which, &x);
        items.push(wrap_item(
            "asymptotics",
            format!("{label} heat-sum fit"),
            false,
            chi.and_then(|chi| {
                let rep = lfunctions::asymptotic_check(&chi, &lfunctions::default_t_grid(), 2, FitMode::Pure)?;
                let worst = rep.orders.iter().map(|o| o.relative_error).fold(0.0, f64::max);
                let ok = worst < 1e-6;
                Ok(CheckItem::ok(
                    "asymptotics",
                    format!("{label} heat-sum fit"),
                    ok,
                    false,
                    format!("orders 0..2, worst relative error {worst:.3e} (tolerance 1e-6)"),
                    serde_json::to_value(&rep).unwrap_or(Value::Null),
                ))
            }),
        ));
    }
    Ok(items)
}

fn verify_gauss(args: &VerifyArgs) -> Result<Vec<CheckItem>> {
    let cases: Vec<u64> = (1..=args.c_max).collect();
    Ok(cases
        .par_iter()
        .map(|&c| {
            let label = format!("c={c}");
            wrap_item(
                "gauss",
                label.clone(),
                true,
                (|| {
                    let mut checked = 0usize;
                    let mut failures = Vec::new();
                    for a in coprime_residues(c) {
                        if c % 4 == 2 {
                            checked += 1;
                            if !lfunctions::gauss_sum(a, 0, c)?.is_zero() {
                                failures.push(format!("G({a},0,{c})"));
                            }
                        }
                        if c % 4 == 0 {
                            for b in (1..c as i64).step_by(2) {
                                checked += 1;
                                if !lfunctions::gauss_sum(a, b, c)?.is_zero() {
                                    failures.push(format!("G({a},{b},{c})"));
                                }
                            }
                        }
                    }
                    let ok = failures.is_empty();
                    let detail = if checked == 0 {
                        "no vanishing rule applies".to_string()
                    } else if ok {
                        format!("{checked} sums vanish")
                    } else {
                        format!("nonzero: {}", failures.join(", "))
                    };
                    Ok(CheckItem::ok(
                        "gauss",
                        label.clone(),
                        ok,
                        true,
                        detail,
                        json!({ "checked": checked, "failures": failures }),
                    ))
                })(),
            )
        })
        .collect())
}

fn verify_meanzero(args: &VerifyArgs) -> Result<Vec<CheckItem>> {
    let l = args.l.unwrap_or(1);
    let ks = match l {
        1 => k_values(args, "1..15", Parity::Odd)?,
        2 => k_values(args, "2..14", Parity::Even)?,
        _ => return Err(Error::invalid("--L must be 1 or 2")),
    };
    let points: Vec<RationalPoint> = ks
        .iter()
        .flat_map(|&k| coprime_residues(k).map(move |a| (a % k as i64, k)))
        .map(|(a, k)| RationalPoint::new(a, k as i64))
        .collect::<Result<_>>()?;
    Ok(points
        .par_iter()
        .map(|x| {
            let label = format!("L{l} x={x}");
            wrap_item(
                "meanzero",
                label.clone(),
                true,
                (|| {
                    let chi = if l == 1 { lfunctions::chi_l1(x)? } else { lfunctions::chi_l2(x)? };
                    let sum = chi.values().iter().fold(Cyclotomic::zero(), |acc, v| &acc + v);
                    let ok = chi.mean_value_zero();
                    Ok(CheckItem::ok(
                        "meanzero",
                        label.clone(),
                        ok,
                        true,
                        format!("period {}, sum over one period = {}", chi.period(), sum.minimal()),
                        json!({ "period": chi.period(), "sum": sum.minimal().to_json() }),
                    ))
                })(),
            )
        })
        .collect())
}

fn cmd_verify(args: &VerifyArgs, cfg: &RunConfig) -> Result<Report> {
    let started = Instant::now();
    let items = match args.check {
        Check::EtaId => verify_eta_id(args, cfg)?,
        Check::HTransform => verify_h_transform(args, cfg)?,
        Check::Quantum => verify_quantum(args, cfg)?,
        Check::Inversion => verify_inversion(args, cfg)?,
        Check::Asymptotics => verify_asymptotics(args, cfg)?,
        Check::Gauss => verify_gauss(args)?,
        Check::Meanzero => verify_meanzero(args)?,
    };
    if items.is_empty() {
        return Err(Error::invalid("no items selected"));
    }
    let passed = items.iter().filter(|i| i.passed).count();
    let code = items.iter().find(|i| !i.passed).map_or(0, |i| i.code);
    let mut text = String::new();
    for i in &items {
        text.push_str(&format!(
            "{} {} {}: {}\n",
            if i.passed { "PASS" } else { "FAIL" },
            i.check,
            i.item,
            i.detail
        ));
    }
    text.push_str(&format!("{passed}/{} passed\n", items.len()));
    let rows = items
        .iter()
        .map(|i| {
            vec![
                i.check.clone(),
                i.item.clone(),
                i.passed.to_string(),
                i.exact.to_string(),
                i.detail.clone(),
            ]
        })
        .collect();
    let json = json!({
        "check": format!("{:?}", args.check),
        "passed": passed,
        "total": items.len(),
        "all_passed": passed == items.len(),
        "seconds": started.elapsed().as_secs_f64(),
        "items": items,
    });
    let mut rep = Report::new(text, json, &["check", "item", "passed", "exact", "detail"], rows);
    rep.code = code;
    Ok(rep)
}

fn cmd_integral(
    kind: IntegralKind,
    component: u8,
    x: Option<RationalPoint>,
    z: Option<&str>,
    path: &str,
    cfg: &RunConfig,
) -> Result<Report> {
    let q = &cfg.quadrature;
    let need_x = || x.ok_or_else(|| Error::invalid("--x is required"));
    let (label, res) = match kind {
        IntegralKind::Omega => {
            let x = need_x()?;
            (format!("Omega({x})"), eichler::omega(&x, q)?)
        }
        IntegralKind::Fstar => {
            let p = match (x, z) {
                (Some(x), None) => FStarPoint::Rational(x),
                (None, Some(z)) => FStarPoint::Lower(parse_complex(z, cfg.precision)?),
                _ => return Err(Error::invalid("f* needs exactly one of --x or --z")),
            };
            let l = match &p {
                FStarPoint::Rational(x) => x.to_string(),
                FStarPoint::Lower(z) => z.to_decimal(6),
            };
            (format!("f*_{component}({l})"), eichler::f_star(component, &p, q)?)
        }
        IntegralKind::G => {
            let x = need_x()?;
            (format!("g_{component}({x})"), eichler::g_period(component, &x, parse_path(path)?, q)?)
        }
    };
    let v = pair(&res.value);
    let text = format!(
        "{label} = {}\nerror estimate {:.3e}, {} nodes\n",
        res.value.to_decimal(10),
        res.error_estimate,
        res.nodes_used
    );
    let json = json!({
        "integral": label,
        "value": v,
        "decimal": res.value.to_decimal(30),
        "error_estimate": res.error_estimate,
        "nodes_used": res.nodes_used,
        "config": q,
    });
    Ok(Report::new(
        text,
        json,
        &["integral", "re", "im", "error_estimate", "nodes_used"],
        vec![vec![
            label,
            v[0].to_string(),
            v[1].to_string(),
            res.error_estimate.to_string(),
            res.nodes_used.to_string(),
        ]],
    ))
}

fn cmd_lvalue(l: u8, x: &RationalPoint, ns: &[u32]) -> Result<Report> {
    let chi = match l {
        1 => lfunctions::chi_l1(x)?,
        2 => lfunctions::chi_l2(x)?,
        _ => return Err(Error::invalid("--L must be 1 or 2")),
    };
    let vals: Vec<(u32, Cyclotomic)> = ns
        .iter()
        .map(|&n| lfunctions::l_value(&chi, n).map(|v| (n, v)))
        .collect::<Result<_>>()?;
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut js = Vec::new();
    for (n, v) in &vals {
        let e = v.embed(64);
        text.push_str(&format!("L(-{n}) = {v}\n        = {}\n", e.to_decimal(10)));
        rows.push(vec![n.to_string(), v.to_string(), e.re_f64().to_string(), e.im_f64().to_string()]);
        js.push(json!({ "n": n, "exact": v.to_string(), "value": v.to_json(), "decimal": pair(&e) }));
    }
    let json = json!({ "L": l, "x": x, "period": chi.period(), "values": js });
    Ok(Report::new(text, json, &["n", "exact", "re", "im"], rows))
}

fn cmd_gauss(a: i64, b: i64, c: u64) -> Result<Report> {
    let v = lfunctions::gauss_sum(a, b, c)?;
    let e = v.embed(64);
    let text = format!("{v}\n{}\n", e.to_decimal(4));
    let json = json!({ "a": a, "b": b, "c": c, "exact": v.to_string(), "value": v.to_json(), "decimal": pair(&e) });
    Ok(Report::new(
        text,
        json,
        &["a", "b", "c", "exact", "re", "im"],
        vec![vec![
            a.to_string(),
            b.to_string(),
            c.to_string(),
            v.to_string(),
            e.re_f64().to_string(),
            e.im_f64().to_string(),
        ]],
    ))
}

fn rational_series(name: SeriesName, t: &Rational) -> Result<RationalQSeries> {
    match name {
        SeriesName::G1 => strange::inverse_series(GSeries::G1, t),
        SeriesName::G1Fine => strange::inverse_series(GSeries::G1Fine, t),
        SeriesName::Kernel => strange::inverse_series(GSeries::Kernel, t),
        SeriesName::FineDefect => strange::fine_defect(t),
        _ => unreachable!("not a rational series"),
    }
}

fn cyclotomic_series(name: SeriesName, t: &Rational) -> Result<QSeries> {
    let spec = match name {
        SeriesName::Theta1 => EtaQuotientSpec::theta1(),
        SeriesName::Theta2 => EtaQuotientSpec::theta2(),
        SeriesName::Theta3 => EtaQuotientSpec::theta3(),
        SeriesName::Theta3Alt => EtaQuotientSpec::theta3_alt(),
        SeriesName::F10 => EtaQuotientSpec::f10(),
        SeriesName::EtaHalf => EtaQuotientSpec::eta_half_shift(),
        SeriesName::EtaHalfProduct => EtaQuotientSpec::eta_half_shift_product(),
        other => {
            return Ok(rational_series(other, t)?.map_coeffs(|c| Cyclotomic::from_rational(c.clone())))
        }
    };
    qseries::eta_expansion(&spec, t)
}

fn cmd_series(name: SeriesName, half: bool, cfg: &RunConfig) -> Result<Report> {
    let t = Rational::from(cfg.trunc);
    let f = cyclotomic_series(name, &t)?;
    let label = format!("{name:?}").to_ascii_lowercase();
    if half {
        let h = qseries::half_derivative(&f)?;
        let rows: Vec<Vec<String>> = h
            .terms()
            .map(|(e, c, r)| vec![e.to_string(), c.to_string(), r.to_string()])
            .collect();
        let terms: Vec<Value> = h
            .terms()
            .map(|(e, c, r)| json!({ "exponent": e.to_string(), "coeff": c.to_string(), "sqrt_of": r }))
            .collect();
        let json = json!({ "name": label, "half_derivative": true, "trunc": t.to_string(), "terms": terms });
        return Ok(Report::new(format!("{h}\n"), json, &["exponent", "coeff", "sqrt_of"], rows));
    }
    let rows = f.terms().map(|(e, c)| vec![e.to_string(), c.to_string()]).collect();
    let json = json!({ "name": label, "half_derivative": false, "series": f.to_json() });
    Ok(Report::new(format!("{f}\n"), json, &["exponent", "coeff"], rows))
}

fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Report> {
    match cmd {
        Command::Strange { component, x } => cmd_strange(*component, x),
        Command::Table { k } => cmd_table(&parse_k_list(k)?, cfg),
        Command::Verify(args) => cmd_verify(args, cfg),
        Command::Integral { kind, component, x, z, path } => {
            cmd_integral(*kind, *component, *x, z.as_deref(), path, cfg)
        }
        Command::Lvalue { l, x, n } => cmd_lvalue(*l, x, &parse_u32_list(n)?),
        Command::Gauss { a, b, c } => cmd_gauss(*a, *b, *c),
        Command::Series { name, half_derivative } => cmd_series(*name, *half_derivative, cfg),
    }
}

/// Runs a parsed command in a pool of `cfg.jobs` threads.
pub fn run_command(cmd: &Command, cfg: &RunConfig) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    pool.install(|| execute(cmd, cfg))
}

fn emit(text: &str, out: Option<&FsPath>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())
                .and_then(|_| so.flush())
                .map_err(|e| Error::invalid(format!("stdout: {e}")))
        }
    }
}

fn error_report(e: &Error, format: Format) -> String {
    match format {
        Format::Json => {
            let v = json!({ "error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() });
            serde_json::to_string_pretty(&v).unwrap_or_default() + "\n"
        }
        Format::Csv => format!("error,message,exit_code\n{},\"{}\",{}\n", e.kind(), e.to_string().replace('"', "\"\""), e.exit_code()),
        Format::Text => String::new(),
    }
}

/// Entry point: parses `args`, writes output and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let format = cli.global.format.unwrap_or_default();
    let outcome = RunConfig::resolve(&cli.global).and_then(|cfg| {
        let rep = run_command(&cli.command, &cfg)?;
        emit(&rep.render(cfg.format)?, cfg.out.as_deref())?;
        Ok(rep.code)
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            let machine = error_report(&e, format);
            if !machine.is_empty() {
                let _ = emit(&machine, None);
            }
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_lists() {
        assert_eq!(parse_k_list("3..7").unwrap(), vec![3, 4, 5, 6, 7]);
        assert_eq!(parse_k_list("3,5, 9").unwrap(), vec![3, 5, 9]);
        assert_eq!(parse_k_list("1..3,7").unwrap(), vec![1, 2, 3, 7]);
        assert!(parse_k_list("5..3").is_err());
        assert!(parse_k_list("0").is_err());
    }

    #[test]
    fn config_file_then_flags() {
        let dir = std::env::temp_dir().join(format!("qmf-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("run.conf");
        fs::write(&p, "# defaults\nprecision = 96\nrel_tol = 1e-8\nformat = json\njobs=2\n").unwrap();
        let g = GlobalArgs {
            config: Some(p.clone()),
            precision: Some(160),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&g).unwrap();
        assert_eq!(cfg.precision, 160);
        assert_eq!(cfg.quadrature.precision, 160);
        assert_eq!(cfg.quadrature.rel_tol, 1e-8);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.jobs, 2);
        fs::write(&p, "colour = blue\n").unwrap();
        assert!(RunConfig::resolve(&g).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn csv_quotes_fields() {
        let r = Report::new(String::new(), Value::Null, &["a", "b"], vec![vec!["1, 2".into(), "x\"y".into()]]);
        assert_eq!(r.render(Format::Csv).unwrap(), "a,b\n\"1, 2\",\"x\"\"y\"\n");
    }
}
