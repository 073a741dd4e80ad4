//! Command-line front end. Every command prints a JSON envelope
//! `{"command", "config", "result", "status"}`; the exit code is 0 on
//! success, 1 on invalid input and 2 when a mathematical check fails.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::determinant::{conjecture_scan, det_closed_form, tensor_det_oracle, DetReport, DetScheme};
use crate::error::{usage, Error, Result};
use crate::gcdtensor::{
    build_gcd_tensor, factorize, fractional_power, max_relative_error, multiplicative_transform,
    scp_decompose, FactorScheme, MultiplicativeFn, WeightScheme,
};
use crate::json::{
    decomposition_to_json, det_report_to_json, float_value, incidence_to_json, lattice_from_json,
    lattice_to_json, tensor_from_json, tensor_to_json, LatticeSpec,
};
use crate::numtheory::{divisors, IntegerSet};
use crate::poset::{
    build_meet_tensor, cardinality_valuation, det_closed_form_meet, meet_decompose_factorize,
    numeric_valuation, MeetSemilattice,
};
use crate::positivity::{extreme_form_on_sphere, psd_sample_check, ExtremeOptions, Extremum};
use crate::scalar::format_rational;
use crate::tensor::Tensor;
use crate::AnyTensor;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Relative tolerance for float reconstructions.
const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser, Serialize)]
#[command(name = "gcdtensor", version, about = "GCD tensors, meet tensors and their exact determinants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct SetArgs {
    /// Comma-separated distinct positive integers, e.g. 4,6.
    #[arg(long)]
    pub set: String,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct TensorSource {
    /// Comma-separated distinct positive integers; builds their GCD tensor.
    #[arg(long, conflicts_with = "tensor")]
    pub set: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Tensor JSON file.
    #[arg(long)]
    pub tensor: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeArg {
    Phi,
    Psi,
    Mult,
    Fractional,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorArg {
    Phi,
    Psi,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosedFormArg {
    Phi,
    Psi,
    Mult,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Min,
    Max,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct LatticeSource {
    /// Lattice JSON file: {"elements", "pairs", "g"}.
    #[arg(long, conflicts_with_all = ["divisors", "subsets"])]
    pub lattice: Option<PathBuf>,
    /// Divisor lattice of N with g the identity.
    #[arg(long, conflicts_with = "subsets")]
    pub divisors: Option<u64>,
    /// Subset lattice of comma-separated atoms with g the cardinality.
    #[arg(long)]
    pub subsets: Option<String>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// GCD tensor of a set, or g applied to it entrywise.
    Build {
        #[command(flatten)]
        set: SetArgs,
        /// power:K, sigma, phi or mobius.
        #[arg(long)]
        g: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Strongly CP decomposition with its reconstruction check.
    Decompose {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, value_enum, default_value_t = SchemeArg::Phi)]
        scheme: SchemeArg,
        /// Multiplicative function for --scheme mult.
        #[arg(long)]
        g: Option<String>,
        /// Exponent for --scheme fractional.
        #[arg(long)]
        r: Option<f64>,
        /// Tensor JSON file the reconstruction must equal.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Diagonal-times-incidence factorization.
    Factorize {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, value_enum, default_value_t = FactorArg::Phi)]
        scheme: FactorArg,
        #[command(flatten)]
        common: Common,
    },
    /// Exact determinant by closed form and/or resultant oracle.
    Det {
        #[command(flatten)]
        source: TensorSource,
        #[arg(long = "closed-form", value_enum)]
        closed_form: Option<ClosedFormArg>,
        /// Multiplicative function for --closed-form mult.
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        oracle: bool,
        /// Compute both and fail with exit code 2 if they differ.
        #[arg(long = "verify-oracle")]
        verify_oracle: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Entrywise power of a GCD tensor (with its decomposition) or of a tensor file.
    HadamardPower {
        #[command(flatten)]
        source: TensorSource,
        #[arg(long)]
        r: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Search for x with A x^m < 0.
    PsdCheck {
        #[command(flatten)]
        source: TensorSource,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Extreme value of A x^m on the m-norm sphere.
    ExtremeForm {
        #[command(flatten)]
        source: TensorSource,
        #[arg(long, value_enum, default_value_t = ModeArg::Min)]
        mode: ModeArg,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        iterations: usize,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive determinant-versus-totient scan over n-subsets of 1..=max.
    ScanConjecture {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long)]
        max: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Validate a lattice and print its closed order and meets.
    LatticeBuild {
        #[command(flatten)]
        source: LatticeSource,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form meet-tensor determinant, optionally checked by the oracle.
    LatticeDet {
        #[command(flatten)]
        source: LatticeSource,
        /// Members of S (default: every element).
        #[arg(long, num_args = 1..)]
        subset: Vec<String>,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long = "verify-oracle")]
        verify_oracle: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Meet-tensor decomposition and factorization over a meet-closed F.
    LatticeDecompose {
        #[command(flatten)]
        source: LatticeSource,
        #[arg(long, num_args = 1..)]
        subset: Vec<String>,
        /// Members of F (default: meet closure of S).
        #[arg(long, num_args = 1..)]
        closure: Vec<String>,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Build { .. } => "build",
            Command::Decompose { .. } => "decompose",
            Command::Factorize { .. } => "factorize",
            Command::Det { .. } => "det",
            Command::HadamardPower { .. } => "hadamard-power",
            Command::PsdCheck { .. } => "psd-check",
            Command::ExtremeForm { .. } => "extreme-form",
            Command::ScanConjecture { .. } => "scan-conjecture",
            Command::LatticeBuild { .. } => "lattice-build",
            Command::LatticeDet { .. } => "lattice-det",
            Command::LatticeDecompose { .. } => "lattice-decompose",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Build { common, .. }
            | Command::Decompose { common, .. }
            | Command::Factorize { common, .. }
            | Command::Det { common, .. }
            | Command::HadamardPower { common, .. }
            | Command::PsdCheck { common, .. }
            | Command::ExtremeForm { common, .. }
            | Command::ScanConjecture { common, .. }
            | Command::LatticeBuild { common, .. }
            | Command::LatticeDet { common, .. }
            | Command::LatticeDecompose { common, .. } => common,
        }
    }
}

/// A command's result and whether it detected a violation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub result: Value,
    pub violation: bool,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome {
            result,
            violation: false,
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// writes its output. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command).and_then(|outcome| emit(&cli.command, outcome)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// The full output document for a command.
pub fn envelope(cmd: &Command, outcome: &Outcome) -> Value {
    let mut config = serde_json::to_value(cmd).unwrap_or(Value::Null);
    // externally tagged: {"build": {...}}
    if let Value::Object(mut map) = config {
        config = map.remove(cmd.name()).unwrap_or(Value::Null);
    }
    json!({
        "command": cmd.name(),
        "config": flatten_config(config),
        "result": outcome.result,
        "status": if outcome.violation { "violation" } else { "ok" },
    })
}

/// Merges flattened argument groups into one flat object.
fn flatten_config(v: Value) -> Value {
    let Value::Object(map) = v else { return v };
    let mut out = serde_json::Map::new();
    for (k, v) in map {
        match v {
            Value::Object(inner) if matches!(k.as_str(), "common" | "set" | "source") => {
                for (ik, iv) in inner {
                    out.insert(ik, iv);
                }
            }
            other => {
                out.insert(k, other);
            }
        }
    }
    Value::Object(out)
}

fn emit(cmd: &Command, outcome: Outcome) -> Result<i32> {
    let doc = envelope(cmd, &outcome);
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    match &cmd.common().out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(if outcome.violation { EXIT_VIOLATION } else { EXIT_OK })
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn parse_set(s: &str) -> Result<IntegerSet> {
    s.parse()
}

fn load_tensor(source: &TensorSource) -> Result<(AnyTensor, Option<IntegerSet>)> {
    match (&source.set, &source.tensor) {
        (Some(s), None) => {
            let set = parse_set(s)?;
            Ok((AnyTensor::Int(build_gcd_tensor(&set, source.order)?), Some(set)))
        }
        (None, Some(path)) => Ok((tensor_from_json(&read_json(path)?)?, None)),
        _ => Err(usage("give exactly one of --set or --tensor")),
    }
}

fn load_lattice(source: &LatticeSource) -> Result<LatticeSpec> {
    match (&source.lattice, source.divisors, &source.subsets) {
        (Some(path), None, None) => lattice_from_json(&read_json(path)?),
        (None, Some(n), None) => {
            let lattice = MeetSemilattice::divisibility(&divisors(n)?)?;
            let valuation = Some(numeric_valuation(&lattice)?);
            Ok(LatticeSpec { lattice, valuation })
        }
        (None, None, Some(atoms)) => {
            let atoms: Vec<&str> = atoms.split(',').map(str::trim).filter(|a| !a.is_empty()).collect();
            let lattice = MeetSemilattice::subsets(&atoms)?;
            let valuation = Some(cardinality_valuation(&lattice));
            Ok(LatticeSpec { lattice, valuation })
        }
        _ => Err(usage("give exactly one of --lattice, --divisors or --subsets")),
    }
}

fn exact_rational(t: &AnyTensor) -> Result<Tensor<BigRational>> {
    t.to_rational()
        .ok_or_else(|| Error::Unsupported("exact determinants need an int or rational tensor".into()))
}

fn multiplicative(g: &Option<String>) -> Result<MultiplicativeFn> {
    MultiplicativeFn::parse(g.as_deref().ok_or_else(|| usage("this scheme needs --g"))?)
}

/// Equality for exact kinds, relative tolerance once floats are involved.
fn tensors_match(a: &AnyTensor, b: &AnyTensor) -> Result<bool> {
    if a.shape() != b.shape() {
        return Ok(false);
    }
    match (a.to_rational(), b.to_rational()) {
        (Some(x), Some(y)) => Ok(x == y),
        _ => Ok(max_relative_error(&a.to_f64(), &b.to_f64())? <= FLOAT_TOLERANCE),
    }
}

/// Runs a parsed command without writing anything.
pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Build { set, g, .. } => {
            let s = parse_set(&set.set)?;
            let t = match g {
                None => AnyTensor::Int(build_gcd_tensor(&s, set.order)?),
                Some(spec) => {
                    let g = MultiplicativeFn::parse(spec)?;
                    AnyTensor::Rational(multiplicative_transform(&s, set.order, |p| Ok(g.eval(p)))?)
                }
            };
            Ok(Outcome::ok(tensor_to_json(&t)))
        }
        Command::Decompose {
            set,
            scheme,
            g,
            r,
            compare,
            ..
        } => {
            let s = parse_set(&set.set)?;
            let (scheme, target) = match scheme {
                SchemeArg::Phi => (WeightScheme::Phi, AnyTensor::Int(build_gcd_tensor(&s, set.order)?)),
                SchemeArg::Psi => (WeightScheme::Psi, AnyTensor::Int(build_gcd_tensor(&s, set.order)?)),
                SchemeArg::Mult => {
                    let g = multiplicative(g)?;
                    let t = multiplicative_transform(&s, set.order, |p| Ok(g.eval(p)))?;
                    (WeightScheme::Multiplicative(g), AnyTensor::Rational(t))
                }
                SchemeArg::Fractional => {
                    let r = r.ok_or_else(|| usage("--scheme fractional needs --r"))?;
                    (WeightScheme::Fractional(r), AnyTensor::Float(fractional_power(&s, set.order, r)?))
                }
            };
            let d = scp_decompose(&s, set.order, &scheme)?;
            let rebuilt = d.reconstruct()?;
            let matches = tensors_match(&rebuilt, &target)?;
            let mut result = decomposition_to_json(&d);
            result["reconstruction_matches"] = json!(matches);
            let mut violation = !matches;
            if let Some(path) = compare {
                let other = tensor_from_json(&read_json(path)?)?;
                let same = tensors_match(&rebuilt, &other)?;
                result["compare_matches"] = json!(same);
                violation |= !same;
            }
            Ok(Outcome { result, violation })
        }
        Command::Factorize { set, scheme, .. } => {
            let s = parse_set(&set.set)?;
            let scheme = match scheme {
                FactorArg::Phi => FactorScheme::Phi,
                FactorArg::Psi => FactorScheme::Psi,
            };
            let f = factorize(&s, set.order, scheme)?;
            let matches = f.product()? == build_gcd_tensor(&s, set.order)?;
            Ok(Outcome {
                result: json!({
                    "order": set.order,
                    "diagonal": f.diagonal_entries().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "incidence": incidence_to_json(&f.incidence),
                    "product_matches": matches,
                }),
                violation: !matches,
            })
        }
        Command::Det {
            source,
            closed_form,
            g,
            oracle,
            verify_oracle,
            ..
        } => det_command(source, *closed_form, g, *oracle, *verify_oracle),
        Command::HadamardPower { source, r, .. } => hadamard_command(source, *r),
        Command::PsdCheck { source, trials, common } => {
            let (t, set) = load_tensor(source)?;
            let report = match &t {
                AnyTensor::Int(t) => psd_sample_check(t, *trials, common.seed)?,
                AnyTensor::Rational(t) => psd_sample_check(t, *trials, common.seed)?,
                AnyTensor::Float(t) => psd_sample_check(t, *trials, common.seed)?,
            };
            let mut result = serde_json::to_value(&report)?;
            result["witness_value_exact"] = json!(report.witness_value_exact.as_ref().map(format_rational));
            // a witness against a GCD tensor contradicts positive definiteness
            let violation = set.is_some() && report.witness_found();
            Ok(Outcome { result, violation })
        }
        Command::ExtremeForm {
            source,
            mode,
            restarts,
            iterations,
            step,
            common,
        } => {
            let (t, _) = load_tensor(source)?;
            let mode = match mode {
                ModeArg::Min => Extremum::Min,
                ModeArg::Max => Extremum::Max,
            };
            let opts = ExtremeOptions {
                restarts: *restarts,
                iterations: *iterations,
                seed: common.seed,
                step: *step,
            };
            let res = extreme_form_on_sphere(&t.to_f64(), mode, &opts)?;
            Ok(Outcome::ok(serde_json::to_value(&res)?))
        }
        Command::ScanConjecture { n, order, max, .. } => {
            let report = conjecture_scan(*n, *order, *max)?;
            Ok(Outcome {
                violation: report.violation_found(),
                result: serde_json::to_value(&report)?,
            })
        }
        Command::LatticeBuild { source, .. } => {
            let spec = load_lattice(source)?;
            let l = &spec.lattice;
            let mut meets = serde_json::Map::new();
            for a in l.labels() {
                let row: serde_json::Map<String, Value> = l
                    .labels()
                    .iter()
                    .map(|b| Ok((b.clone(), json!(l.meet(a, b)?))))
                    .collect::<Result<_>>()?;
                meets.insert(a.clone(), Value::Object(row));
            }
            let mut result = lattice_to_json(l, spec.valuation.as_ref());
            result["meets"] = Value::Object(meets);
            Ok(Outcome::ok(result))
        }
        Command::LatticeDet {
            source,
            subset,
            order,
            verify_oracle,
            ..
        } => {
            let spec = load_lattice(source)?;
            let l = &spec.lattice;
            let g = spec.valuation.as_ref().ok_or_else(|| usage("the lattice has no valuation \"g\""))?;
            let s = if subset.is_empty() { l.labels().to_vec() } else { subset.clone() };
            let closed = det_closed_form_meet(l, &s, g, *order)?;
            let mut result = json!({"subset": s, "closed_form": det_report_to_json(&closed)});
            let mut violation = false;
            if *verify_oracle {
                let t = build_meet_tensor(l, &s, g, *order)?;
                let oracle = tensor_det_oracle(&t)?;
                let agree = closed.agrees_with(&oracle);
                result["oracle"] = det_report_to_json(&oracle);
                result["agreement"] = json!(agree);
                violation = agree == Some(false);
            }
            Ok(Outcome { result, violation })
        }
        Command::LatticeDecompose {
            source,
            subset,
            closure,
            order,
            ..
        } => {
            let spec = load_lattice(source)?;
            let l = &spec.lattice;
            let g = spec.valuation.as_ref().ok_or_else(|| usage("the lattice has no valuation \"g\""))?;
            let s = if subset.is_empty() { l.labels().to_vec() } else { subset.clone() };
            let f = if closure.is_empty() { l.meet_closure(&s)? } else { closure.clone() };
            let d = meet_decompose_factorize(l, &s, g, *order, &f)?;
            let target = build_meet_tensor(l, &s, g, *order)?;
            let rebuilt = d.reconstruct()?;
            let product = d.factor_product()?;
            let rebuilt_ok = rebuilt == target;
            let ok = rebuilt_ok && product == target;
            Ok(Outcome {
                result: json!({
                    "order": order,
                    "subset": s,
                    "closure": f,
                    "weights": d.weights.iter().map(format_rational).collect::<Vec<_>>(),
                    "incidence": incidence_to_json(&d.incidence),
                    "tensor": tensor_to_json(&AnyTensor::Rational(target)),
                    "reconstruction_matches": rebuilt_ok,
                    "factorization_matches": ok,
                }),
                violation: !ok,
            })
        }
    }
}

fn det_command(
    source: &TensorSource,
    closed_form: Option<ClosedFormArg>,
    g: &Option<String>,
    oracle: bool,
    verify: bool,
) -> Result<Outcome> {
    let (tensor, set) = load_tensor(source)?;
    let want_closed = closed_form.is_some() || verify;
    let want_oracle = oracle || verify || closed_form.is_none();
    let mut result = serde_json::Map::new();

    let closed = if want_closed {
        let s = set
            .as_ref()
            .ok_or_else(|| usage("closed forms need --set"))?;
        let scheme = match closed_form.unwrap_or(ClosedFormArg::Phi) {
            ClosedFormArg::Phi => DetScheme::Phi,
            ClosedFormArg::Psi => DetScheme::Psi,
            ClosedFormArg::Mult => DetScheme::Multiplicative(multiplicative(g)?),
        };
        let r = det_closed_form(s, source.order, &scheme)?;
        result.insert("closed_form".into(), det_report_to_json(&r));
        Some((r, scheme))
    } else {
        None
    };

    let oracle_report: Option<DetReport> = if want_oracle {
        let target = match (&closed, &set) {
            (Some((_, DetScheme::Multiplicative(g))), Some(s)) => {
                multiplicative_transform(s, source.order, |p| Ok(g.eval(p)))?
            }
            _ => exact_rational(&tensor)?,
        };
        let r = tensor_det_oracle(&target)?;
        result.insert("oracle".into(), det_report_to_json(&r));
        Some(r)
    } else {
        None
    };

    let mut violation = false;
    if let (Some((c, _)), Some(o)) = (&closed, &oracle_report) {
        let agree = c.agrees_with(o);
        result.insert("agreement".into(), json!(agree));
        violation = agree == Some(false);
    }
    Ok(Outcome {
        result: Value::Object(result),
        violation,
    })
}

fn hadamard_command(source: &TensorSource, r: f64) -> Result<Outcome> {
    let (tensor, set) = load_tensor(source)?;
    if let Some(s) = set {
        let target = fractional_power(&s, source.order, r)?;
        let d = scp_decompose(&s, source.order, &WeightScheme::Fractional(r))?;
        let err = max_relative_error(&d.reconstruct()?.to_f64(), &target)?;
        return Ok(Outcome {
            result: json!({
                "tensor": tensor_to_json(&AnyTensor::Float(target)),
                "decomposition": decomposition_to_json(&d),
                "max_relative_error": float_value(err),
            }),
            violation: err > FLOAT_TOLERANCE,
        });
    }
    let powered = entrywise_power(&tensor, r)?;
    Ok(Outcome::ok(json!({ "tensor": tensor_to_json(&powered) })))
}

/// Exact when `r` is a nonnegative integer and the tensor is exact.
fn entrywise_power(t: &AnyTensor, r: f64) -> Result<AnyTensor> {
    if r >= 0.0 && r.fract() == 0.0 && r <= u32::MAX as f64 {
        let k = r as usize;
        match t {
            AnyTensor::Int(t) => return Ok(AnyTensor::Int(t.map(|x| num_traits::pow(x.clone(), k)))),
            AnyTensor::Rational(t) => return Ok(AnyTensor::Rational(t.map(|x| num_traits::pow(x.clone(), k)))),
            AnyTensor::Float(_) => {}
        }
    }
    if !r.is_finite() {
        return Err(usage(format!("exponent must be finite, got {r}")));
    }
    let f = t.to_f64();
    Ok(AnyTensor::Float(f.try_map(|&x| {
        let y = x.powf(r);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Domain(format!("{x}^{r} is undefined")))
        }
    })?))
}
