//! The `kw4` command-line front end.
//!
//! Exit codes: 0 success, 2 input error, 3 domain-precondition error,
//! 4 verification failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::engine::{check_suite, VerificationReport};
use crate::error::Error;
use crate::exterior::{index_key, monomials, subscript, superscript, Frame, KForm};
use crate::io::{parse_algebra, parse_target, read_argument, to_pretty};
use crate::model::{ModelKind, ModelSpace, OrbitInvariants};
use crate::realization::{solve, PARAM_NAMES, verify_roundtrip, HermitianMode, RealizationResult};
use crate::scalar::{FloatComplex, GaussianRational, Scalar};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "kw4", version, about = "Left-invariant Kähler–Weyl geometry on 4-dimensional Lie algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Arithmetic backend.
    #[arg(long, global = true, value_enum, env = "KW4_BACKEND", default_value = "exact")]
    pub backend: BackendArg,
    /// Tolerance for floating residuals.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Output format (default: json for realize/verify, table otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Hermitian,
    Para,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Hermitian => ModelKind::Hermitian,
            ModelArg::Para => ModelKind::Para,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    ExactAlign,
    Orbit,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a Lie algebra whose alternating Ricci tensor is the target.
    Realize {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Target 2-form: inline JSON, `@file`, or `zero`.
        #[arg(long)]
        target: String,
        /// Hermitian only: realize the target itself or just its orbit.
        #[arg(long, value_enum, default_value = "exact-align")]
        mode: ModeArg,
    },
    /// Run the Kähler–Weyl pipeline and every residual check on an algebra.
    Verify {
        /// Algebra JSON, inline or `@file`.
        #[arg(long)]
        algebra: String,
        /// Expected model; must agree with the algebra's basis.
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
    },
    /// Print the Hodge star of every basis form of degree 1 to 3.
    StarTable {
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
    },
    /// Split a 2-form into its χ, Λ²₀ and Λ²± components.
    Decompose {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// 2-form: inline JSON, `@file`, or `zero`.
        #[arg(long)]
        target: String,
    },
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

/// Exit code for an error: malformed input is 2, unmet mathematical
/// preconditions are 3.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::DegreeMismatch(..)
        | Error::DegreeOverflow(_)
        | Error::NotAntisymmetric(..)
        | Error::UnboundIndeterminate(_)
        | Error::ModelMismatch(_) => EXIT_INPUT,
        _ => EXIT_DOMAIN,
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok((text, code)) => match write_output(cli.global.out.as_ref(), &text) {
            Ok(()) => code,
            Err(f) => report(f),
        },
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> i32 {
    eprintln!("kw4: error: {}", f.message);
    f.code
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<(String, i32), Failure> {
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(input_error(format!("--tol must be a positive number, got {}", g.tol)));
    }
    match &cli.command {
        Command::Realize { model, target, mode } => {
            let text = read_argument(target)?;
            let mode = match mode {
                ModeArg::ExactAlign => HermitianMode::ExactAlign,
                ModeArg::Orbit => HermitianMode::Orbit,
            };
            let fmt = g.format.unwrap_or(Format::Json);
            match g.backend {
                BackendArg::Exact => realize::<GaussianRational>((*model).into(), &text, mode, g.tol, fmt),
                BackendArg::Float => realize::<FloatComplex>((*model).into(), &text, mode, g.tol, fmt),
            }
        }
        Command::Verify { algebra, model } => {
            let text = read_argument(algebra)?;
            let fmt = g.format.unwrap_or(Format::Json);
            let model = model.map(ModelKind::from);
            match g.backend {
                BackendArg::Exact => verify::<GaussianRational>(&text, model, g.tol, fmt),
                BackendArg::Float => verify::<FloatComplex>(&text, model, g.tol, fmt),
            }
        }
        Command::StarTable { model } => {
            let kind = model.map_or(ModelKind::Para, ModelKind::from);
            Ok((star_table(kind, g.format.unwrap_or(Format::Table)), EXIT_OK))
        }
        Command::Decompose { model, target } => {
            let text = read_argument(target)?;
            let fmt = g.format.unwrap_or(Format::Table);
            let out = match g.backend {
                BackendArg::Exact => decompose::<GaussianRational>((*model).into(), &text, fmt)?,
                BackendArg::Float => decompose::<FloatComplex>((*model).into(), &text, fmt)?,
            };
            Ok((out, EXIT_OK))
        }
    }
}

fn realize<S>(kind: ModelKind, text: &str, mode: HermitianMode, tol: f64, fmt: Format) -> Result<(String, i32), Failure>
where
    S: Scalar + Serialize + DeserializeOwned,
{
    let model = ModelSpace::<S>::build(kind);
    let target = parse_target(text, &model)?;
    let result = solve(&model, &target, mode, tol)?;
    let roundtrip = verify_roundtrip(&result, tol);
    let code = if roundtrip.pass && result.report.pass { EXIT_OK } else { EXIT_VERIFY };
    let text = match fmt {
        Format::Json => to_pretty(&result) + "\n",
        Format::Table => realization_table(&result, roundtrip.pass),
    };
    Ok((text, code))
}

/// JSON document written by `kw4 verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar + DeserializeOwned"))]
pub struct VerifyOutput<S: Scalar + Serialize> {
    pub report: VerificationReport,
    pub lee_form: KForm<S>,
    pub phi: KForm<S>,
    pub rho_a: KForm<S>,
}

fn verify<S>(text: &str, expected: Option<ModelKind>, tol: f64, fmt: Format) -> Result<(String, i32), Failure>
where
    S: Scalar + Serialize + DeserializeOwned,
{
    let algebra = parse_algebra::<S>(text)?;
    if let Some(kind) = expected {
        if kind != algebra.basis() {
            return Err(input_error(format!("--model {} does not match the algebra basis ({})", kind.name(), algebra.basis().name())));
        }
    }
    let model = ModelSpace::<S>::build(algebra.basis());
    let suite = check_suite(&algebra, &model, tol);
    let c = suite.pipeline.curvature;
    let out = VerifyOutput { report: suite.report, lee_form: suite.pipeline.lee, phi: suite.pipeline.phi, rho_a: c.rho_a_form };
    let code = if out.report.pass { EXIT_OK } else { EXIT_VERIFY };
    let text = match fmt {
        Format::Json => to_pretty(&out) + "\n",
        Format::Table => {
            let mut s = String::new();
            s += &format!("model: {}\n", out.report.model.name());
            s += &format!("δΩ = {}\n", notation(&out.lee_form));
            s += &format!("φ = {}\n", notation(&out.phi));
            s += &format!("ρ_a = {}\n", notation(&out.rho_a));
            s += &report_table(&out.report);
            s
        }
    };
    Ok((text, code))
}

/// JSON document written by `kw4 decompose`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar + DeserializeOwned"))]
pub struct DecomposeOutput<S: Scalar + Serialize> {
    pub model: ModelKind,
    pub input: KForm<S>,
    /// `θ₁ … θ₅` coordinates.
    pub theta: [S; 5],
    /// Coefficient of `Ω`.
    pub omega: S,
    pub chi_part: KForm<S>,
    pub zero_part: KForm<S>,
    pub pm_part: KForm<S>,
    /// Squared norms `‖χ‖², ‖Λ²₀‖², ‖Λ²±‖²`.
    pub norms: BTreeMap<String, S>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_invariants: Option<OrbitInvariants<S>>,
    /// Hermitian only: coefficients in the real frame `e¹ … e⁴`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_frame: Option<KForm<S>>,
}

fn decompose<S>(kind: ModelKind, text: &str, fmt: Format) -> Result<String, Failure>
where
    S: Scalar + Serialize + DeserializeOwned,
{
    let model = ModelSpace::<S>::build(kind);
    let xi = parse_target(text, &model)?;
    let split = model.split_two_form(&xi)?;
    let (chi, zero, pm) = (split.chi_part(&model), split.zero_part(&model), split.pm_part(&model));
    let frame = model.frame();
    let mut norms = BTreeMap::new();
    norms.insert("chi".to_string(), frame.form_inner(&chi, &chi)?);
    norms.insert("zero".to_string(), frame.form_inner(&zero, &zero)?);
    norms.insert("pm".to_string(), frame.form_inner(&pm, &pm)?);
    let orbit_invariants = match kind {
        ModelKind::Hermitian => Some(model.orbit_invariants(&xi)?),
        ModelKind::Para => None,
    };
    let out = DecomposeOutput {
        model: kind,
        real_frame: model.to_real_basis(&xi),
        input: xi,
        theta: split.theta.clone(),
        omega: split.omega.clone(),
        chi_part: chi,
        zero_part: zero,
        pm_part: pm,
        norms,
        orbit_invariants,
    };
    Ok(match fmt {
        Format::Json => to_pretty(&out) + "\n",
        Format::Table => decompose_table(&out),
    })
}

fn decompose_table<S: Scalar + Serialize>(d: &DecomposeOutput<S>) -> String {
    let mut s = format!("model: {}\n", d.model.name());
    s += &format!("ξ = {}\n", notation(&d.input));
    if let Some(e) = &d.real_frame {
        s += &format!("ξ (real frame) = {}\n", notation_with(e, "e"));
    }
    for (k, c) in d.theta.iter().enumerate() {
        s += &format!("c{} = {c}\n", subscript(k + 1));
    }
    s += &format!("Ω coefficient = {}\n", d.omega);
    s += &format!("χ part = {}\n", notation(&d.chi_part));
    s += &format!("Λ²₀ part = {}\n", notation(&d.zero_part));
    s += &format!("Λ²± part = {}\n", notation(&d.pm_part));
    for (key, label) in [("chi", "χ"), ("zero", "Λ²₀"), ("pm", "Λ²±")] {
        s += &format!("‖{label} part‖² = {}\n", d.norms[key]);
    }
    if let Some(o) = &d.orbit_invariants {
        s += &format!("orbit invariants: x = {}, y = {}\n", o.x, o.y);
    }
    s
}

fn realization_table<S: Scalar + Serialize>(r: &RealizationResult<S>, roundtrip: bool) -> String {
    let mut s = format!("model: {}\n", r.model.name());
    s += &format!("target = {}\n", notation(&r.target));
    s += "parameters:\n";
    for (name, v) in PARAM_NAMES.iter().zip(r.params.values()) {
        s += &format!("  {name} = {v}\n");
    }
    s += "brackets:\n";
    let c = r.algebra.constants();
    for i in 0..4 {
        for j in (i + 1)..4 {
            if c[i][j].iter().any(|x| !x.within(r.report.tolerance)) {
                s += &format!("  [Ψ{},Ψ{}] = {}\n", subscript(i + 1), subscript(j + 1), notation_vector(&c[i][j]));
            }
        }
    }
    s += &format!("predicted ρ_a = {}\n", notation(&r.predicted_rho_a));
    if let Some(note) = &r.orbit_note {
        s += &format!("note: {note}\n");
    }
    if r.float_fallback {
        s += "note: computed in floating point\n";
    }
    s += &format!("label: {}\n", r.label);
    s += &report_table(&r.report);
    s += &format!("round trip: {}\n", if roundtrip { "PASS" } else { "FAIL" });
    s
}

fn report_table(r: &VerificationReport) -> String {
    let mut s = format!("backend: {:?}, tolerance: {:e}\n", r.backend, r.tolerance).to_lowercase();
    for (name, res) in &r.residuals {
        let status = if res.pass { "ok" } else { "FAIL" };
        let detail = match (&res.exact_zero, &res.witness) {
            (Some(true), _) => "exact zero".to_string(),
            (_, Some(w)) => format!("max {:e}, witness {w}", res.max_abs),
            _ => format!("max {:e}", res.max_abs),
        };
        s += &format!("  {name:<26} {status:<4} {detail}\n");
    }
    for note in &r.notes {
        s += &format!("note: {note}\n");
    }
    s += &format!("verdict: {}\n", if r.pass { "PASS" } else { "FAIL" });
    s
}

/// The star table of the Ψ frame; identical for both models since they
/// share the metric `g₁₃ = g₂₄ = 1` and volume form.
fn star_table(kind: ModelKind, fmt: Format) -> String {
    let frame = Frame::<GaussianRational>::hyperbolic();
    let entries: Vec<(&'static [usize], KForm<GaussianRational>)> =
        (1..=3).flat_map(|k| monomials(k).iter().map(|&m| (m, frame.hodge_star(&KForm::monomial(m))))).collect();
    match fmt {
        Format::Table => entries
            .iter()
            .map(|(m, star)| format!("⋆{}={}\n", wedge("Ψ", m), notation(star)))
            .collect(),
        Format::Json => {
            let map: BTreeMap<String, &KForm<GaussianRational>> =
                entries.iter().map(|(m, star)| (index_key(m), star)).collect();
            to_pretty(&serde_json::json!({ "model": kind, "frame": "Ψ", "star": map })) + "\n"
        }
    }
}

fn wedge(symbol: &str, m: &[usize]) -> String {
    m.iter().map(|&i| format!("{symbol}{}", superscript(i + 1))).collect::<Vec<_>>().join("∧")
}

fn notation<S: Scalar>(w: &KForm<S>) -> String {
    notation_with(w, "Ψ")
}

/// Renders a form as `−Ψ²∧Ψ⁴ + 2Ψ¹∧Ψ³`, omitting unit coefficients.
fn notation_with<S: Scalar>(w: &KForm<S>, symbol: &str) -> String {
    signed_sum(w.iter().map(|(m, c)| (c.clone(), wedge(symbol, m))))
}

fn notation_vector<S: Scalar>(v: &[S; 4]) -> String {
    signed_sum(v.iter().enumerate().map(|(i, c)| (c.clone(), format!("Ψ{}", subscript(i + 1)))))
}

fn signed_sum<S: Scalar>(terms: impl Iterator<Item = (S, String)>) -> String {
    let mut out = String::new();
    for (c, mono) in terms {
        if c.is_zero() {
            continue;
        }
        let text = c.to_string();
        let (negative, magnitude) = match text.strip_prefix('-') {
            Some(rest) if !rest.contains(['+', '-']) => (true, rest.to_string()),
            _ => (false, text),
        };
        let coeff = if magnitude == "1" { String::new() } else { magnitude };
        match (out.is_empty(), negative) {
            (true, true) => out += "−",
            (true, false) => {}
            (false, true) => out += " − ",
            (false, false) => out += " + ",
        }
        out += &coeff;
        out += &mono;
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}
