//! The `eichler` command-line front end.
//!
//! Exit codes: 0 success or decided, 1 inconclusive or failed check, 2 usage or
//! parse error.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::automorphy::MultiplierSystem;
use crate::cohomology::{
    coboundary_from, coboundary_test, cocycle_consistency_check, parabolic_test, period_cocycle, CertificateRecord,
    Cocycle, CocycleRecord, Verdict,
};
use crate::eichler::{
    eichler_integral, period_direct, period_integral, relative_coefficient_gap, PeriodElement,
};
use crate::error::{Error, Result};
use crate::forms::{delta_expansion, eisenstein_qexp, gmf_example, level11_coefficients, FourierExpansion};
use crate::modgroup::{GroupElement, GroupKind, SubgroupDescriptor};
use crate::poincare::{
    construct_automorphic_integral, poincare_and_eisenstein, select_kprime, threshold, transformation_residual,
    SeriesConfig, SeriesReportRecord,
};
use crate::serial::{Complex, ComplexList, Real};

/// Relative cocycle-law residual accepted by `cocycle verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-7;
/// Residuals must stay below this multiple of the propagated error estimate.
pub const ESTIMATE_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Settings shared by all commands. Command-line flags override the file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub group: String,
    /// Weight of the form; named forms supply their own.
    pub weight: Option<f64>,
    pub multiplier: String,
    /// `delta`, `eisenstein(k)`, `level11`, or a path to an expansion JSON file.
    pub form: String,
    pub n_terms: usize,
    #[serde(rename = "B")]
    pub bound: u64,
    pub out: Option<String>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            group: "SL2Z".into(),
            weight: None,
            multiplier: "trivial".into(),
            form: "delta".into(),
            n_terms: 120,
            bound: 100_000,
            out: None,
            format: Format::Json,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "eichler", version, about = "Eichler cohomology of modular and generalized modular forms")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON RunConfig file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// SL2Z or Gamma0(N).
    #[arg(long, global = true)]
    group: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    weight: Option<f64>,
    /// trivial, eta_power(s), gmf_example(re[,im]) or a JSON object of generator values.
    #[arg(long, global = true)]
    multiplier: Option<String>,
    /// delta, eisenstein(k), level11 or an expansion file.
    #[arg(long, global = true)]
    form: Option<String>,
    #[arg(long, global = true)]
    terms: Option<usize>,
    /// Coset bound B on c^2 + d^2.
    #[arg(long, global = true)]
    bound: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inequivalent cusps with widths, scaling matrices and parabolic generators.
    Cusps,
    /// Fourier expansion of the configured form, optionally evaluated.
    Form {
        /// Evaluation point "x,y" for z = x + iy; repeatable.
        #[arg(long = "at", allow_hyphen_values = true)]
        at: Vec<String>,
    },
    /// Period polynomial of the configured cusp form.
    PeriodPoly {
        /// Word over S, T, I, Q0..Qt, g0..gn, or a matrix "a,b,c,d".
        #[arg(long, default_value = "T", allow_hyphen_values = true)]
        word: String,
        #[arg(long, value_enum, default_value = "both")]
        route: Route,
    },
    /// Build or test cocycle files.
    Cocycle {
        #[command(subcommand)]
        action: CocycleAction,
    },
    /// Convergence threshold e, η, ψ and the default k'.
    #[command(allow_negative_numbers = true)]
    Threshold { rho: f64, sigma: f64, k: f64, alpha: f64 },
    /// Generalized Poincaré series and automorphic integrals.
    Poincare {
        #[command(subcommand)]
        action: PoincareAction,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Route {
    Direct,
    Integral,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MakeKind {
    Period,
    Zero,
    Coboundary,
}

#[derive(Subcommand, Debug)]
enum CocycleAction {
    /// Write a cocycle file: the period cocycle of the form, zero, or a coboundary.
    Make {
        #[arg(long, value_enum, default_value = "period")]
        kind: MakeKind,
        /// Coefficients of ρ as a JSON list of [re, im], for `--kind coboundary`.
        #[arg(long)]
        rho: Option<String>,
    },
    /// Check the cocycle law on random word pairs.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Decide whether the cocycle is a coboundary.
    Coboundary { file: PathBuf },
    /// Test parabolicity at every cusp.
    Parabolic { file: PathBuf },
}

#[derive(Args, Debug)]
struct SeriesArgs {
    /// Cocycle file.
    file: PathBuf,
    /// Evaluation point "x,y"; repeatable. Defaults to five points on Im z = 2.
    #[arg(long = "at", allow_hyphen_values = true)]
    at: Vec<String>,
    #[arg(long)]
    kprime: Option<i32>,
    /// Growth exponent ρ of the cocycle; defaults to k.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
}

#[derive(Subcommand, Debug)]
enum PoincareAction {
    /// Ψ and g at the points.
    Eval(SeriesArgs),
    /// Residual of the transformation law of Ψ under a matrix.
    Transform {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, default_value = "T", allow_hyphen_values = true)]
        word: String,
    },
    /// F = -Ψ/g + φ_0 and its defining residuals.
    Construct {
        #[command(flatten)]
        series: SeriesArgs,
        /// Witness φ_0 as a JSON list of [re, im] coefficients; defaults to 0.
        #[arg(long)]
        phi0: Option<String>,
        /// Matrices to check; defaults to S and T.
        #[arg(long = "check", allow_hyphen_values = true)]
        check: Vec<String>,
    },
}

/// Result of a command: its output text and exit code.
struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn json<T: Serialize>(value: &T, code: i32) -> Result<Self> {
        Ok(Outcome { text: crate::serial::to_json(value)? + "\n", code })
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::InvalidArgument(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::NotInGroup { .. }
        | Error::Determinant { .. }
        | Error::NotCuspForm { .. } => 2,
        _ => 1,
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let cfg = resolve_config(&cli.global)?;
    let outcome = match cli.command {
        Command::Cusps => cmd_cusps(&cfg)?,
        Command::Form { at } => cmd_form(&cfg, &at)?,
        Command::PeriodPoly { word, route } => cmd_period_poly(&cfg, &word, route)?,
        Command::Cocycle { action } => {
            json_only(&cfg)?;
            cmd_cocycle(&cfg, action)?
        }
        Command::Threshold { rho, sigma, k, alpha } => {
            json_only(&cfg)?;
            let t = threshold(rho, sigma, k, alpha);
            Outcome::json(
                &ThresholdRecord { e: Real(t.e), eta: Real(t.eta), psi: Real(t.psi), kprime: select_kprime(t.psi) },
                0,
            )?
        }
        Command::Poincare { action } => {
            json_only(&cfg)?;
            cmd_poincare(&cfg, action)?
        }
    };
    match &cfg.out {
        Some(path) => fs::write(path, &outcome.text)?,
        None => print!("{}", outcome.text),
    }
    Ok(outcome.code)
}

fn resolve_config(g: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &g.group {
        cfg.group = v.clone();
    }
    if let Some(v) = g.weight {
        cfg.weight = Some(v);
    }
    if let Some(v) = &g.multiplier {
        cfg.multiplier = v.clone();
    }
    if let Some(v) = &g.form {
        cfg.form = v.clone();
    }
    if let Some(v) = g.terms {
        cfg.n_terms = v;
    }
    if let Some(v) = g.bound {
        cfg.bound = v;
    }
    if let Some(v) = &g.out {
        cfg.out = Some(v.display().to_string());
    }
    if let Some(v) = g.format {
        cfg.format = v;
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn json_only(cfg: &RunConfig) -> Result<()> {
    if cfg.format == Format::Csv {
        return Err(Error::InvalidArgument("CSV output is only available for coefficient tables".into()));
    }
    Ok(())
}

pub fn parse_group(text: &str) -> Result<Arc<SubgroupDescriptor>> {
    let kind: GroupKind = text.parse()?;
    Ok(Arc::new(SubgroupDescriptor::from_kind(kind)?))
}

fn parse_call<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    text.trim().strip_prefix(name)?.trim().strip_prefix('(')?.strip_suffix(')')
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("invalid number `{s}`")))
}

/// The named form or expansion file with its weight.
pub fn resolve_form(cfg: &RunConfig) -> Result<(FourierExpansion, f64)> {
    let (expansion, weight) = if cfg.form == "delta" {
        (delta_expansion(cfg.n_terms), 12.0)
    } else if let Some(k) = parse_call(&cfg.form, "eisenstein") {
        let k: i32 = k.trim().parse().map_err(|_| Error::Parse(format!("invalid Eisenstein weight `{k}`")))?;
        (eisenstein_qexp(k, cfg.n_terms)?, k as f64)
    } else if cfg.form == "level11" {
        let a = level11_coefficients(cfg.n_terms + 1);
        let coeffs = a[1..].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        (FourierExpansion::new(0.0, 1.0, 1, coeffs)?, 2.0)
    } else {
        let text = fs::read_to_string(&cfg.form)?;
        let e: FourierExpansion =
            serde_json::from_str(&text).map_err(|err| Error::Parse(format!("{}: {err}", cfg.form)))?;
        let e = FourierExpansion::new(e.kappa, e.lambda, e.start, e.coeffs.0)?;
        let w = cfg
            .weight
            .ok_or_else(|| Error::InvalidArgument("an expansion file needs --weight".into()))?;
        return Ok((e, w));
    };
    if let Some(w) = cfg.weight {
        if w != weight {
            return Err(Error::InvalidArgument(format!("form `{}` has weight {weight}, not {w}", cfg.form)));
        }
    }
    Ok((expansion, weight))
}

pub fn parse_multiplier(text: &str, group: &Arc<SubgroupDescriptor>, weight: f64, n_terms: usize) -> Result<MultiplierSystem> {
    let text = text.trim();
    if text == "trivial" {
        return Ok(MultiplierSystem::trivial(group.clone(), weight));
    }
    if let Some(s) = parse_call(text, "eta_power") {
        let eta = MultiplierSystem::eta_power(parse_number(s)?);
        let m = if group.kind() == GroupKind::Full { eta } else { eta.restrict(group.clone())? };
        return rebase(&m, weight);
    }
    if let Some(args) = parse_call(text, "gmf_example") {
        let parts: Vec<&str> = args.split(',').collect();
        let c = match parts.as_slice() {
            [re] => Complex64::new(parse_number(re)?, 0.0),
            [re, im] => Complex64::new(parse_number(re)?, parse_number(im)?),
            _ => return Err(Error::Parse(format!("invalid gmf_example arguments `{args}`"))),
        };
        if group.kind() != GroupKind::Gamma0(11) {
            return Err(Error::InvalidArgument("gmf_example lives on Gamma0(11)".into()));
        }
        return rebase(&gmf_example(c, n_terms.max(10))?.multiplier, weight);
    }
    if text.starts_with('{') {
        let table: std::collections::BTreeMap<String, Complex> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("multiplier table: {e}")))?;
        let values = group
            .generator_names()
            .iter()
            .map(|n| {
                table
                    .get(n)
                    .map(|c| c.0)
                    .ok_or_else(|| Error::Parse(format!("multiplier table lacks generator `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) = table.keys().find(|k| group.generator_index(k).is_none()) {
            return Err(Error::Parse(format!("unknown generator `{extra}` in multiplier table")));
        }
        return MultiplierSystem::from_generator_values(group.clone(), weight, values, "table");
    }
    Err(Error::Parse(format!("unknown multiplier `{text}`")))
}

fn rebase(m: &MultiplierSystem, weight: f64) -> Result<MultiplierSystem> {
    MultiplierSystem::from_generator_values(m.group().clone(), weight, m.generator_values().to_vec(), m.label())
}

/// A matrix `"a,b,c,d"` or a word such as `"T S^-1 Q0^2"`; letters S, T, I, Qj
/// (cusp generators) and gj (group generators), each optionally `^n`.
pub fn parse_word(input: &str, group: &SubgroupDescriptor) -> Result<GroupElement> {
    let input = input.trim();
    if input.contains(',') {
        let e: Vec<i64> = input
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| Error::Parse(format!("invalid matrix entry `{x}`"))))
            .collect::<Result<_>>()?;
        if e.len() != 4 {
            return Err(Error::Parse(format!("a matrix needs four entries, got `{input}`")));
        }
        return GroupElement::new(e[0], e[1], e[2], e[3]);
    }
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    let mut m = GroupElement::IDENTITY;
    let cusps = group.cusp_classes();
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() || ch == '*' {
            i += 1;
            continue;
        }
        i += 1;
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let index: Option<usize> = if i > start { chars[start..i].iter().collect::<String>().parse().ok() } else { None };
        let letter = match (ch, index) {
            ('S', None) => GroupElement::S,
            ('T', None) => GroupElement::T,
            ('I', None) => GroupElement::IDENTITY,
            ('Q', Some(j)) => cusps
                .get(j)
                .map(|c| c.generator)
                .ok_or_else(|| Error::Parse(format!("no cusp generator Q{j}: {} cusps", cusps.len())))?,
            ('g', Some(j)) => *group
                .generators()
                .get(j)
                .ok_or_else(|| Error::Parse(format!("no generator g{j}")))?,
            _ => return Err(Error::Parse(format!("unknown letter `{ch}` in word `{input}`"))),
        };
        let mut exponent = 1i64;
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let start = i;
            if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            exponent = text.parse().map_err(|_| Error::Parse(format!("invalid exponent `{text}` in `{input}`")))?;
        }
        m = m * letter.pow(exponent);
    }
    Ok(m)
}

pub fn parse_point(input: &str) -> Result<Complex64> {
    let parts: Vec<&str> = input.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!("a point is \"x,y\", got `{input}`")));
    }
    let z = Complex64::new(parse_number(parts[0])?, parse_number(parts[1])?);
    if !(z.im > 0.0) {
        return Err(Error::InvalidArgument(format!("point {z} is not in the upper half-plane")));
    }
    Ok(z)
}

fn parse_points(specs: &[String]) -> Result<Vec<Complex64>> {
    if specs.is_empty() {
        return Ok((0..5).map(|i| Complex64::new(-0.4 + 0.2 * i as f64, 2.0)).collect());
    }
    specs.iter().map(|s| parse_point(s)).collect()
}

fn parse_coeffs(input: &str, k: usize) -> Result<Vec<Complex64>> {
    let list: ComplexList = serde_json::from_str(input).map_err(|e| Error::Parse(format!("coefficient list: {e}")))?;
    if list.0.len() > k + 1 {
        return Err(Error::InvalidArgument(format!("{} coefficients exceed degree {k}", list.0.len())));
    }
    let mut c = list.0;
    c.resize(k + 1, Complex64::new(0.0, 0.0));
    Ok(c)
}

fn integer_k(weight: f64) -> Result<u32> {
    let k = weight - 2.0;
    if k < 0.0 || k.fract() != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "weight {weight} gives non-integer k = {k}: period elements are then sampled functions, not polynomials"
        )));
    }
    Ok(k as u32)
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct CuspRow {
    cusp: String,
    width: i64,
    scaling: [i64; 4],
    generator: [i64; 4],
}

#[derive(Serialize)]
struct CuspReport {
    group: String,
    index: usize,
    cusps: Vec<CuspRow>,
}

fn cmd_cusps(cfg: &RunConfig) -> Result<Outcome> {
    let group = parse_group(&cfg.group)?;
    let rows: Vec<CuspRow> = group
        .cusp_classes()
        .iter()
        .map(|c| CuspRow {
            cusp: c.cusp.to_string(),
            width: c.width,
            scaling: c.scaling.entries(),
            generator: c.generator.entries(),
        })
        .collect();
    if cfg.format == Format::Csv {
        let mut text = String::from("cusp,width,scaling,generator\n");
        for r in &rows {
            let mat = |m: [i64; 4]| m.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            text += &format!("{},{},{},{}\n", csv_escape(&r.cusp), r.width, mat(r.scaling), mat(r.generator));
        }
        return Ok(Outcome { text, code: 0 });
    }
    Outcome::json(&CuspReport { group: group.kind().to_string(), index: group.index(), cusps: rows }, 0)
}

#[derive(Serialize)]
struct PointValue {
    z: Complex,
    value: Complex,
    tail_estimate: Real,
}

#[derive(Serialize)]
struct FormReport {
    weight: Real,
    expansion: FourierExpansion,
    values: Vec<PointValue>,
}

fn coefficient_csv(rows: &[(String, i64, Complex64)], label: &str) -> String {
    let mut text = format!("{label},m,re,im\n");
    for (tag, m, c) in rows {
        text += &format!(
            "{},{m},{},{}\n",
            csv_escape(tag),
            crate::serial::format_f64(c.re),
            crate::serial::format_f64(c.im)
        );
    }
    text
}

fn cmd_form(cfg: &RunConfig, at: &[String]) -> Result<Outcome> {
    let (e, weight) = resolve_form(cfg)?;
    if cfg.format == Format::Csv {
        let rows: Vec<_> =
            e.coeffs().iter().enumerate().map(|(i, c)| (cfg.form.clone(), e.start + i as i64, *c)).collect();
        return Ok(Outcome { text: coefficient_csv(&rows, "form"), code: 0 });
    }
    let values = at
        .iter()
        .map(|s| {
            let z = parse_point(s)?;
            let v = e.eval_with_tail(z);
            Ok(PointValue { z: Complex(z), value: Complex(v.value), tail_estimate: Real(v.tail_estimate) })
        })
        .collect::<Result<Vec<_>>>()?;
    Outcome::json(&FormReport { weight: Real(weight), expansion: e, values }, 0)
}

#[derive(Serialize)]
struct DirectRecord {
    coeffs: ComplexList,
    validation_residual: Real,
    degree_excess: Real,
}

#[derive(Serialize)]
struct IntegralRecord {
    coeffs: ComplexList,
}

#[derive(Serialize)]
struct PeriodReport {
    word: String,
    matrix: [i64; 4],
    weight: Real,
    #[serde(skip_serializing_if = "Option::is_none")]
    direct: Option<DirectRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    integral: Option<IntegralRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_residual: Option<Real>,
}

fn cmd_period_poly(cfg: &RunConfig, word: &str, route: Route) -> Result<Outcome> {
    let group = parse_group(&cfg.group)?;
    let (g, weight) = resolve_form(cfg)?;
    let k = integer_k(weight)?;
    let v = parse_multiplier(&cfg.multiplier, &group, weight, cfg.n_terms)?;
    let m = parse_word(word, &group)?;
    if !group.contains(&m) {
        return Err(Error::NotInGroup { element: m, group: group.kind().to_string() });
    }
    let direct = if route != Route::Integral {
        let f = eichler_integral(&g, k)?;
        Some(period_direct(&f, &m, &v)?)
    } else {
        None
    };
    let integral = if route != Route::Direct { Some(period_integral(&g, &m, &v, k as f64)?) } else { None };
    let coeffs = |p: &PeriodElement| p.coeffs().map(|c| c.to_vec()).unwrap_or_default();
    if cfg.format == Format::Csv {
        let mut rows = Vec::new();
        for (tag, p) in [("direct", direct.as_ref().map(|d| &d.element)), ("integral", integral.as_ref())] {
            if let Some(p) = p {
                rows.extend(coeffs(p).into_iter().enumerate().map(|(i, c)| (tag.to_string(), i as i64, c)));
            }
        }
        return Ok(Outcome { text: coefficient_csv(&rows, "route"), code: 0 });
    }
    let cross = match (&direct, &integral) {
        (Some(d), Some(i)) => Some(Real(relative_coefficient_gap(&coeffs(&d.element), &coeffs(i)))),
        _ => None,
    };
    let report = PeriodReport {
        word: word.to_string(),
        matrix: m.entries(),
        weight: Real(-(k as f64)),
        direct: direct.map(|d| DirectRecord {
            coeffs: ComplexList(coeffs(&d.element)),
            validation_residual: Real(d.validation_residual),
            degree_excess: Real(d.degree_excess),
        }),
        integral: integral.map(|i| IntegralRecord { coeffs: ComplexList(coeffs(&i)) }),
        cross_residual: cross,
    };
    Outcome::json(&report, 0)
}

pub fn load_cocycle(path: &Path) -> Result<Cocycle> {
    let text = fs::read_to_string(path)?;
    let record: CocycleRecord =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    record.to_cocycle()
}

#[derive(Serialize)]
struct VerifyReport {
    trials: usize,
    absolute: Real,
    relative: Real,
    tolerance: Real,
    pass: bool,
}

#[derive(Serialize)]
struct CertificateReport {
    #[serde(flatten)]
    certificate: CertificateRecord,
    restricted_trial_space: bool,
}

#[derive(Serialize)]
struct CuspCertificate {
    cusp: String,
    generator: [i64; 4],
    #[serde(flatten)]
    certificate: CertificateRecord,
}

#[derive(Serialize)]
struct ParabolicReport {
    parabolic: bool,
    cusps: Vec<CuspCertificate>,
}

fn cmd_cocycle(cfg: &RunConfig, action: CocycleAction) -> Result<Outcome> {
    match action {
        CocycleAction::Make { kind, rho } => {
            let group = parse_group(&cfg.group)?;
            let (g, weight) = resolve_form(cfg)?;
            let k = integer_k(weight)?;
            let v = parse_multiplier(&cfg.multiplier, &group, -(k as f64), cfg.n_terms)?;
            let c = match kind {
                MakeKind::Period => period_cocycle(&g, v, k as f64)?,
                MakeKind::Zero => Cocycle::zero(v, k),
                MakeKind::Coboundary => {
                    let rho_text = rho.ok_or_else(|| Error::InvalidArgument("--kind coboundary needs --rho".into()))?;
                    coboundary_from(&PeriodElement::Polynomial(parse_coeffs(&rho_text, k as usize)?), v, -(k as f64))?
                }
            };
            Outcome::json(&CocycleRecord::from_cocycle(&c)?, 0)
        }
        CocycleAction::Verify { file, trials, seed } => {
            let c = load_cocycle(&file)?;
            let r = cocycle_consistency_check(&c, trials, seed)?;
            let pass = r.relative < VERIFY_TOLERANCE;
            let report = VerifyReport {
                trials,
                absolute: Real(r.absolute),
                relative: Real(r.relative),
                tolerance: Real(VERIFY_TOLERANCE),
                pass,
            };
            Outcome::json(&report, if pass { 0 } else { 1 })
        }
        CocycleAction::Coboundary { file } => {
            let c = load_cocycle(&file)?;
            let cert = coboundary_test(&c)?;
            let code = if cert.verdict == Verdict::Inconclusive { 1 } else { 0 };
            let report = CertificateReport { certificate: (&cert).into(), restricted_trial_space: cert.restricted_trial_space };
            Outcome::json(&report, code)
        }
        CocycleAction::Parabolic { file } => {
            let c = load_cocycle(&file)?;
            let cusps = c.group().cusp_classes();
            let certs = parabolic_test(&c, &cusps)?;
            let code = if certs.iter().any(|x| x.verdict == Verdict::Inconclusive) { 1 } else { 0 };
            let report = ParabolicReport {
                parabolic: certs.iter().all(|x| x.verdict == Verdict::Coboundary),
                cusps: cusps
                    .iter()
                    .zip(&certs)
                    .map(|(cd, cert)| CuspCertificate {
                        cusp: cd.cusp.to_string(),
                        generator: cd.generator.entries(),
                        certificate: cert.into(),
                    })
                    .collect(),
            };
            Outcome::json(&report, code)
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub e: Real,
    pub eta: Real,
    pub psi: Real,
    pub kprime: i32,
}

fn series_config(cfg: &RunConfig, c: &Cocycle, args: &SeriesArgs) -> Result<SeriesConfig> {
    let k = -c.weight();
    let t = threshold(args.rho.unwrap_or(k), args.sigma, k, args.alpha);
    let sc = SeriesConfig::trivial_for(c.group().clone(), t, cfg.bound, args.kprime)?;
    for w in &sc.warnings {
        eprintln!("warning: {w}");
    }
    Ok(sc)
}

#[derive(Serialize)]
struct SeriesPoint {
    z: Complex,
    series: SeriesReportRecord,
    eisenstein: SeriesReportRecord,
}

#[derive(Serialize)]
struct EvalReport {
    warnings: Vec<String>,
    points: Vec<SeriesPoint>,
}

#[derive(Serialize)]
struct CheckRecord {
    word: String,
    matrix: [i64; 4],
    residual: Real,
    error_estimate: Real,
    pass: bool,
}

#[derive(Serialize)]
struct TransformReport {
    kprime: i32,
    psi: Real,
    #[serde(rename = "B")]
    bound: u64,
    warnings: Vec<String>,
    check: CheckRecord,
}

#[derive(Serialize)]
struct IntegralPoint {
    z: Complex,
    value: Complex,
    tail_estimate: Real,
}

#[derive(Serialize)]
struct ConstructReport {
    kprime: i32,
    psi: Real,
    #[serde(rename = "B")]
    bound: u64,
    warnings: Vec<String>,
    values: Vec<IntegralPoint>,
    checks: Vec<CheckRecord>,
}

fn check_record(word: &str, m: &GroupElement, residual: f64, estimate: f64) -> CheckRecord {
    CheckRecord {
        word: word.to_string(),
        matrix: m.entries(),
        residual: Real(residual),
        error_estimate: Real(estimate),
        pass: residual <= ESTIMATE_FACTOR * estimate,
    }
}

fn cmd_poincare(cfg: &RunConfig, action: PoincareAction) -> Result<Outcome> {
    match action {
        PoincareAction::Eval(args) => {
            let c = load_cocycle(&args.file)?;
            let sc = series_config(cfg, &c, &args)?;
            let points = parse_points(&args.at)?;
            let (psi, g) = poincare_and_eisenstein(&c, &sc, &points)?;
            let report = EvalReport {
                warnings: sc.warnings.clone(),
                points: points
                    .iter()
                    .zip(psi.iter().zip(&g))
                    .map(|(z, (p, e))| SeriesPoint {
                        z: Complex(*z),
                        series: SeriesReportRecord::new(p, &sc),
                        eisenstein: SeriesReportRecord::new(e, &sc),
                    })
                    .collect(),
            };
            Outcome::json(&report, 0)
        }
        PoincareAction::Transform { series, word } => {
            let c = load_cocycle(&series.file)?;
            let sc = series_config(cfg, &c, &series)?;
            let m = parse_word(&word, c.group())?;
            let r = transformation_residual(&c, &sc, &m, &parse_points(&series.at)?)?;
            let check = check_record(&word, &m, r.residual, r.error_estimate);
            let code = if check.pass { 0 } else { 1 };
            let report = TransformReport {
                kprime: sc.kprime,
                psi: Real(sc.threshold.psi),
                bound: sc.bound,
                warnings: sc.warnings.clone(),
                check,
            };
            Outcome::json(&report, code)
        }
        PoincareAction::Construct { series, phi0, check } => {
            let c = load_cocycle(&series.file)?;
            let sc = series_config(cfg, &c, &series)?;
            let k = (-c.weight()) as usize;
            let phi0 = match phi0 {
                Some(s) => PeriodElement::Polynomial(parse_coeffs(&s, k)?),
                None => PeriodElement::zero_polynomial(k as u32),
            };
            let points = parse_points(&series.at)?;
            let (kprime, psi, bound, warnings) = (sc.kprime, sc.threshold.psi, sc.bound, sc.warnings.clone());
            let f = construct_automorphic_integral(&c, &phi0, sc)?;
            let values = f
                .eval_many(&points)?
                .into_iter()
                .zip(&points)
                .map(|(v, z)| {
                    v.map(|v| IntegralPoint { z: Complex(*z), value: Complex(v.value), tail_estimate: Real(v.error_estimate) })
                })
                .collect::<Result<Vec<_>>>()?;
            let words = if check.is_empty() { vec!["S".to_string(), "T".to_string()] } else { check };
            let checks = words
                .iter()
                .map(|w| {
                    let m = parse_word(w, c.group())?;
                    let r = f.defining_residual(&m, &points)?;
                    Ok(check_record(w, &m, r.residual, r.error_estimate))
                })
                .collect::<Result<Vec<_>>>()?;
            let code = if checks.iter().all(|x| x.pass) { 0 } else { 1 };
            Outcome::json(&ConstructReport { kprime, psi: Real(psi), bound, warnings, values, checks }, code)
        }
    }
}
