//! Scenario configuration: a flat TOML table validated against per-scenario key lists.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use toml::{Table, Value};

use crate::catcode::LogicalQubit;
use crate::fock::Parity;
use crate::wigner::GridSpec;

/// Configuration problems, split by exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed configuration: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Wigner,
    CatPrepare,
    ParityDecay,
    Spectroscopy,
    Qec,
    OracleCheck,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Wigner,
        Scenario::CatPrepare,
        Scenario::ParityDecay,
        Scenario::Spectroscopy,
        Scenario::Qec,
        Scenario::OracleCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Wigner => "wigner",
            Scenario::CatPrepare => "cat-prepare",
            Scenario::ParityDecay => "parity-decay",
            Scenario::Spectroscopy => "spectroscopy",
            Scenario::Qec => "qec",
            Scenario::OracleCheck => "oracle-check",
        }
    }

    pub fn from_name(name: &str) -> Option<Scenario> {
        Scenario::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn keys(self) -> &'static [KeySpec] {
        match self {
            Scenario::Wigner => WIGNER_KEYS,
            Scenario::CatPrepare => CAT_PREPARE_KEYS,
            Scenario::ParityDecay => PARITY_DECAY_KEYS,
            Scenario::Spectroscopy => SPECTROSCOPY_KEYS,
            Scenario::Qec => QEC_KEYS,
            Scenario::OracleCheck => ORACLE_KEYS,
        }
    }

    fn summary(self) -> &'static str {
        match self {
            Scenario::Wigner => "Wigner function on a grid (CSV header beta_re,beta_im,w)",
            Scenario::CatPrepare => "cat preparation by recipe or by parity measurement (CSV header n,re,im)",
            Scenario::ParityDecay => "parity under photon loss (CSV header t,parity)",
            Scenario::Spectroscopy => "photon-number-resolved qubit spectrum (CSV header n,offset,weight)",
            Scenario::Qec => "cat-code lifetime experiment (CSV header t,fid_monitored,fid_unmonitored)",
            Scenario::OracleCheck => "cross-oracle self test (CSV header check,passed,value,tolerance)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Int,
    Bool,
    Str(&'static [&'static str]),
    Sign,
    FloatList,
    IntList,
}

impl Kind {
    fn describe(self) -> String {
        match self {
            Kind::Float => "float".into(),
            Kind::Int => "integer".into(),
            Kind::Bool => "bool".into(),
            Kind::Str(&[]) => "string".into(),
            Kind::Str(choices) => choices.join("|"),
            Kind::Sign => "+1|-1|even|odd".into(),
            Kind::FloatList => "list of floats".into(),
            Kind::IntList => "list of integers".into(),
        }
    }
}

/// One accepted configuration key.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(name: &'static str, kind: Kind, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind,
        default,
        help,
    }
}

const FORMATS: &[&str] = &["csv", "json"];
const WIGNER_STATES: &[&str] = &["cat", "coherent", "vacuum", "fock", "cat-mixture"];
const DECAY_STATES: &[&str] = &["cat", "coherent", "fock"];
const CAT_METHODS: &[&str] = &["deterministic", "measurement", "schrodinger"];
const LOGICAL_STATES: &[&str] = &["plus", "zero", "one", "plus-i"];

pub const COMMON_KEYS: &[KeySpec] = &[
    key("scenario", Kind::Str(&[]), "(required in files)", "scenario name"),
    key("seed", Kind::Int, "0", "random seed"),
    key("dim", Kind::Int, "auto", "Fock truncation; auto picks the smallest adequate value"),
    key("format", Kind::Str(FORMATS), "csv", "primary output format"),
    key("out", Kind::Str(&[]), "stdout", "primary output path; the sidecar is <stem>.meta.json"),
    key("tail_tol", Kind::Float, "1e-12", "largest mass allowed in the top 10% of Fock levels"),
    key("timestamp", Kind::Bool, "true", "record the generation time in the sidecar"),
];

const WIGNER_KEYS: &[KeySpec] = &[
    key("state", Kind::Str(WIGNER_STATES), "cat", "state to image"),
    key("alpha", Kind::Float, "2.0", "real amplitude of the cat or coherent state"),
    key("sign", Kind::Sign, "+1", "relative sign of the cat"),
    key("fock_n", Kind::Int, "1", "photon number for state = fock"),
    key("kappa_t", Kind::Float, "0.0", "photon loss κt applied before imaging"),
    key("re_min", Kind::Float, "-4.0", "grid lower bound along Re β"),
    key("re_max", Kind::Float, "4.0", "grid upper bound along Re β"),
    key("im_min", Kind::Float, "-4.0", "grid lower bound along Im β"),
    key("im_max", Kind::Float, "4.0", "grid upper bound along Im β"),
    key("n_re", Kind::Int, "81", "grid points along Re β"),
    key("n_im", Kind::Int, "81", "grid points along Im β"),
];

const CAT_PREPARE_KEYS: &[KeySpec] = &[
    key("method", Kind::Str(CAT_METHODS), "deterministic", "preparation recipe"),
    key("alpha", Kind::Float, "2.0", "cat amplitude"),
    key("sign", Kind::Sign, "+1", "relative sign (ignored by method = measurement)"),
    key("shots", Kind::Int, "1000", "repetitions for method = measurement"),
];

const PARITY_DECAY_KEYS: &[KeySpec] = &[
    key("state", Kind::Str(DECAY_STATES), "cat", "initial state"),
    key("alpha", Kind::Float, "2.0", "amplitude of the cat or coherent state"),
    key("sign", Kind::Sign, "-1", "relative sign of the cat"),
    key("fock_n", Kind::Int, "1", "photon number for state = fock"),
    key("kappa", Kind::Float, "1.0", "photon loss rate"),
    key("t_max", Kind::Float, "3.0", "last time of the curve"),
    key("n_times", Kind::Int, "31", "number of equally spaced times from 0 to t_max"),
    key("trajectories", Kind::Int, "0", "jump trajectories per time for a Monte Carlo cross-check"),
];

const SPECTROSCOPY_KEYS: &[KeySpec] = &[
    key("nbar", Kind::Float, "4.0", "mean photon number of the coherent drive"),
    key("chi", Kind::Float, "1.0", "dispersive shift"),
    key("n_peaks", Kind::Int, "12", "number of photon-number peaks"),
];

const QEC_KEYS: &[KeySpec] = &[
    key("alpha", Kind::Float, "2.0", "initial codeword amplitude α₀"),
    key("kappa", Kind::Float, "1.0", "photon loss rate"),
    key("delta_t", Kind::Float, "0.02/(κα₀²)", "parity measurement interval"),
    key("t_final", Kind::Float, "2/(κα₀²)", "experiment duration"),
    key("readout_flip_p", Kind::Float, "0.0", "probability that a parity readout is flipped"),
    key("shots", Kind::Int, "10000", "Monte Carlo shots"),
    key("logical", Kind::Str(LOGICAL_STATES), "plus", "encoded logical state"),
    key("sweep", Kind::Bool, "true", "run the Δt and Γ scaling sweeps"),
    key("sweep_steps", Kind::IntList, "[200, 100, 50, 40, 20]", "interval counts in [0, t_final] for the Δt sweep"),
    key("gamma_t", Kind::FloatList, "[0.01, 0.02, 0.05, 0.1]", "values of Γ₀·t_final for the unmonitored sweep"),
];

const ORACLE_KEYS: &[KeySpec] = &[
    key("alpha", Kind::Float, "2.0", "cat amplitude used by the state checks"),
    key("shots", Kind::Int, "20000", "Monte Carlo shots for the statistical checks"),
];

/// Human-readable list of every scenario and key with its default.
pub fn config_reference() -> String {
    let mut s = String::from("CONFIGURATION KEYS\n\nCommon to every scenario:\n");
    write_keys(&mut s, COMMON_KEYS);
    for sc in Scenario::ALL {
        let _ = write!(s, "\nscenario = \"{}\": {}\n", sc.name(), sc.summary());
        write_keys(&mut s, sc.keys());
    }
    s
}

fn write_keys(s: &mut String, keys: &[KeySpec]) {
    for k in keys {
        let _ = writeln!(
            s,
            "  {:<15} {:<32} default {:<24} {}",
            k.name,
            k.kind.describe(),
            k.default,
            k.help
        );
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Common {
    pub seed: u64,
    pub dim: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub tail_tol: f64,
    pub timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WignerState {
    Cat,
    Coherent,
    Vacuum,
    Fock,
    CatMixture,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerParams {
    pub state: WignerState,
    pub alpha: f64,
    pub sign: Parity,
    pub fock_n: usize,
    pub kappa_t: f64,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CatMethod {
    Deterministic,
    Measurement,
    Schrodinger,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatPrepareParams {
    pub method: CatMethod,
    pub alpha: f64,
    pub sign: Parity,
    pub shots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayState {
    Cat,
    Coherent,
    Fock,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityDecayParams {
    pub state: DecayState,
    pub alpha: f64,
    pub sign: Parity,
    pub fock_n: usize,
    pub kappa: f64,
    pub t_max: f64,
    pub n_times: usize,
    pub trajectories: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectroscopyParams {
    pub nbar: f64,
    pub chi: f64,
    pub n_peaks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogicalState {
    Plus,
    Zero,
    One,
    PlusI,
}

impl LogicalState {
    pub fn qubit(self) -> LogicalQubit {
        match self {
            LogicalState::Plus => LogicalQubit::plus(),
            LogicalState::Zero => LogicalQubit::zero(),
            LogicalState::One => LogicalQubit::one(),
            LogicalState::PlusI => LogicalQubit::plus_i(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QecParams {
    pub alpha: f64,
    pub kappa: f64,
    pub delta_t: f64,
    pub t_final: f64,
    pub readout_flip_p: f64,
    pub shots: usize,
    pub logical: LogicalState,
    pub sweep: bool,
    pub sweep_steps: Vec<usize>,
    pub gamma_t: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleParams {
    pub alpha: f64,
    pub shots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Wigner(WignerParams),
    CatPrepare(CatPrepareParams),
    ParityDecay(ParityDecayParams),
    Spectroscopy(SpectroscopyParams),
    Qec(QecParams),
    OracleCheck(OracleParams),
}

/// A fully validated scenario configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub common: Common,
    pub params: Params,
}

/// Parses and validates a TOML document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let table: Table = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string().trim().to_string()))?;
    config_from_table(&table)
}

/// Validates an already parsed table.
pub fn config_from_table(table: &Table) -> Result<ScenarioConfig, ConfigError> {
    let name = match table.get("scenario") {
        Some(Value::String(s)) => s.as_str(),
        Some(_) => return Err(invalid("key `scenario` must be a string")),
        None => return Err(invalid("missing key `scenario`")),
    };
    let scenario = Scenario::from_name(name).ok_or_else(|| {
        let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
        invalid(format!("unknown scenario `{name}`; expected one of {}", names.join(", ")))
    })?;
    let keys = Keys::new(table, scenario)?;
    if matches!(scenario, Scenario::Qec | Scenario::OracleCheck) && table.contains_key("dim") {
        return Err(invalid(format!(
            "key `dim` is not accepted for scenario `{}`; the truncation is chosen from alpha",
            scenario.name()
        )));
    }
    let common = parse_common(&keys)?;
    let params = match scenario {
        Scenario::Wigner => Params::Wigner(parse_wigner(&keys)?),
        Scenario::CatPrepare => Params::CatPrepare(parse_cat_prepare(&keys)?),
        Scenario::ParityDecay => Params::ParityDecay(parse_parity_decay(&keys)?),
        Scenario::Spectroscopy => Params::Spectroscopy(parse_spectroscopy(&keys)?),
        Scenario::Qec => Params::Qec(parse_qec(&keys)?),
        Scenario::OracleCheck => Params::OracleCheck(parse_oracle(&keys)?),
    };
    Ok(ScenarioConfig {
        scenario,
        common,
        params,
    })
}

/// Typed access to a table whose key set has been checked.
struct Keys<'a> {
    table: &'a Table,
}

impl<'a> Keys<'a> {
    fn new(table: &'a Table, scenario: Scenario) -> Result<Self, ConfigError> {
        let accepted: Vec<&KeySpec> = COMMON_KEYS.iter().chain(scenario.keys()).collect();
        for (k, v) in table {
            let Some(spec) = accepted.iter().find(|s| s.name == k) else {
                let names: Vec<&str> = accepted.iter().map(|s| s.name).collect();
                return Err(invalid(format!(
                    "unknown key `{k}` for scenario `{}`; accepted keys: {}",
                    scenario.name(),
                    names.join(", ")
                )));
            };
            check_kind(spec, v)?;
        }
        Ok(Keys { table })
    }

    fn float(&self, name: &'static str) -> Option<f64> {
        match self.table.get(name)? {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn float_or(&self, name: &'static str, default: f64) -> f64 {
        self.float(name).unwrap_or(default)
    }

    fn int(&self, name: &'static str) -> Option<i64> {
        match self.table.get(name)? {
            Value::Integer(i) => Some(*i),
            _ => None,
        }
    }

    fn count_or(&self, name: &'static str, default: usize, min: usize) -> Result<usize, ConfigError> {
        let Some(v) = self.int(name) else {
            return Ok(default);
        };
        if v < min as i64 {
            return Err(invalid(format!("key `{name}` must be at least {min}, got {v}")));
        }
        usize::try_from(v).map_err(|_| invalid(format!("key `{name}` is out of range")))
    }

    fn boolean_or(&self, name: &'static str, default: bool) -> bool {
        match self.table.get(name) {
            Some(Value::Boolean(b)) => *b,
            _ => default,
        }
    }

    fn string(&self, name: &'static str) -> Option<&'a str> {
        match self.table.get(name)? {
            Value::String(s) => Some(s.as_str()),
            _ => None,
        }
    }

    fn sign_or(&self, name: &'static str, default: Parity) -> Result<Parity, ConfigError> {
        match self.table.get(name) {
            None => Ok(default),
            Some(Value::Integer(1)) => Ok(Parity::Even),
            Some(Value::Integer(-1)) => Ok(Parity::Odd),
            Some(Value::String(s)) if s == "even" || s == "+" || s == "+1" => Ok(Parity::Even),
            Some(Value::String(s)) if s == "odd" || s == "-" || s == "-1" => Ok(Parity::Odd),
            Some(v) => Err(invalid(format!("key `{name}` must be +1, -1, \"even\" or \"odd\", got {v}"))),
        }
    }

    fn float_list(&self, name: &'static str) -> Option<Vec<f64>> {
        match self.table.get(name)? {
            Value::Array(a) => a
                .iter()
                .map(|v| match v {
                    Value::Float(f) => Some(*f),
                    Value::Integer(i) => Some(*i as f64),
                    _ => None,
                })
                .collect(),
            _ => None,
        }
    }

    fn int_list(&self, name: &'static str) -> Option<Vec<i64>> {
        match self.table.get(name)? {
            Value::Array(a) => a.iter().map(|v| v.as_integer()).collect(),
            _ => None,
        }
    }
}

fn check_kind(spec: &KeySpec, v: &Value) -> Result<(), ConfigError> {
    let ok = match spec.kind {
        Kind::Float => matches!(v, Value::Float(_) | Value::Integer(_)),
        Kind::Int => matches!(v, Value::Integer(_)),
        Kind::Bool => matches!(v, Value::Boolean(_)),
        Kind::Sign => matches!(v, Value::Integer(_) | Value::String(_)),
        Kind::Str(choices) => match v {
            Value::String(s) => choices.is_empty() || choices.contains(&s.as_str()),
            _ => false,
        },
        Kind::FloatList => match v {
            Value::Array(a) => a.iter().all(|x| matches!(x, Value::Float(_) | Value::Integer(_))),
            _ => false,
        },
        Kind::IntList => match v {
            Value::Array(a) => a.iter().all(|x| matches!(x, Value::Integer(_))),
            _ => false,
        },
    };
    if ok {
        Ok(())
    } else {
        Err(invalid(format!(
            "key `{}` expects {}, got {v}",
            spec.name,
            spec.kind.describe()
        )))
    }
}

fn require(cond: bool, name: &str, constraint: &str, value: impl std::fmt::Display) -> Result<(), ConfigError> {
    if cond {
        Ok(())
    } else {
        Err(invalid(format!("key `{name}` {constraint}, got {value}")))
    }
}

fn finite_nonneg(name: &str, v: f64) -> Result<(), ConfigError> {
    require(v.is_finite() && v >= 0.0, name, "must be finite and non-negative", v)
}

fn finite_pos(name: &str, v: f64) -> Result<(), ConfigError> {
    require(v.is_finite() && v > 0.0, name, "must be finite and positive", v)
}

fn parse_common(k: &Keys<'_>) -> Result<Common, ConfigError> {
    let seed = match k.int("seed") {
        None => 0,
        Some(s) => u64::try_from(s).map_err(|_| invalid(format!("key `seed` must be non-negative, got {s}")))?,
    };
    let dim = match k.int("dim") {
        None => None,
        Some(d) => {
            require((2..=4096).contains(&d), "dim", "must lie in 2..=4096", d)?;
            Some(d as usize)
        }
    };
    let format = match k.string("format") {
        Some("json") => Format::Json,
        _ => Format::Csv,
    };
    let out = match k.string("out") {
        Some("") => return Err(invalid("key `out` must not be empty")),
        Some(p) => Some(PathBuf::from(p)),
        None => None,
    };
    let tail_tol = k.float_or("tail_tol", 1e-12);
    require(tail_tol.is_finite() && tail_tol > 0.0 && tail_tol < 1.0, "tail_tol", "must lie in (0, 1)", tail_tol)?;
    Ok(Common {
        seed,
        dim,
        format,
        out,
        tail_tol,
        timestamp: k.boolean_or("timestamp", true),
    })
}

fn parse_wigner(k: &Keys<'_>) -> Result<WignerParams, ConfigError> {
    let state = match k.string("state").unwrap_or("cat") {
        "coherent" => WignerState::Coherent,
        "vacuum" => WignerState::Vacuum,
        "fock" => WignerState::Fock,
        "cat-mixture" => WignerState::CatMixture,
        _ => WignerState::Cat,
    };
    let alpha = k.float_or("alpha", 2.0);
    finite_nonneg("alpha", alpha)?;
    let kappa_t = k.float_or("kappa_t", 0.0);
    finite_nonneg("kappa_t", kappa_t)?;
    let grid = GridSpec {
        beta_re_min: k.float_or("re_min", -4.0),
        beta_re_max: k.float_or("re_max", 4.0),
        beta_im_min: k.float_or("im_min", -4.0),
        beta_im_max: k.float_or("im_max", 4.0),
        n_re: k.count_or("n_re", 81, 2)?,
        n_im: k.count_or("n_im", 81, 2)?,
    };
    grid.validate().map_err(|e| invalid(e.to_string()))?;
    require(grid.n_re * grid.n_im <= 4_000_000, "n_re", "times n_im must not exceed 4000000", grid.n_re * grid.n_im)?;
    Ok(WignerParams {
        state,
        alpha,
        sign: k.sign_or("sign", Parity::Even)?,
        fock_n: k.count_or("fock_n", 1, 0)?,
        kappa_t,
        grid,
    })
}

fn parse_cat_prepare(k: &Keys<'_>) -> Result<CatPrepareParams, ConfigError> {
    let method = match k.string("method").unwrap_or("deterministic") {
        "measurement" => CatMethod::Measurement,
        "schrodinger" => CatMethod::Schrodinger,
        _ => CatMethod::Deterministic,
    };
    let alpha = k.float_or("alpha", 2.0);
    finite_nonneg("alpha", alpha)?;
    let shots = k.count_or("shots", 1000, 1)?;
    require(shots <= 10_000_000, "shots", "must not exceed 10000000", shots)?;
    Ok(CatPrepareParams {
        method,
        alpha,
        sign: k.sign_or("sign", Parity::Even)?,
        shots,
    })
}

fn parse_parity_decay(k: &Keys<'_>) -> Result<ParityDecayParams, ConfigError> {
    let state = match k.string("state").unwrap_or("cat") {
        "coherent" => DecayState::Coherent,
        "fock" => DecayState::Fock,
        _ => DecayState::Cat,
    };
    let alpha = k.float_or("alpha", 2.0);
    finite_nonneg("alpha", alpha)?;
    let kappa = k.float_or("kappa", 1.0);
    finite_nonneg("kappa", kappa)?;
    let t_max = k.float_or("t_max", 3.0);
    finite_nonneg("t_max", t_max)?;
    let n_times = k.count_or("n_times", 31, 1)?;
    require(n_times <= 100_000, "n_times", "must not exceed 100000", n_times)?;
    let trajectories = k.count_or("trajectories", 0, 0)?;
    require(trajectories <= 10_000_000, "trajectories", "must not exceed 10000000", trajectories)?;
    Ok(ParityDecayParams {
        state,
        alpha,
        sign: k.sign_or("sign", Parity::Odd)?,
        fock_n: k.count_or("fock_n", 1, 0)?,
        kappa,
        t_max,
        n_times,
        trajectories,
    })
}

fn parse_spectroscopy(k: &Keys<'_>) -> Result<SpectroscopyParams, ConfigError> {
    let nbar = k.float_or("nbar", 4.0);
    finite_nonneg("nbar", nbar)?;
    let chi = k.float_or("chi", 1.0);
    finite_pos("chi", chi)?;
    let n_peaks = k.count_or("n_peaks", 12, 1)?;
    Ok(SpectroscopyParams { nbar, chi, n_peaks })
}

fn parse_qec(k: &Keys<'_>) -> Result<QecParams, ConfigError> {
    let alpha = k.float_or("alpha", 2.0);
    finite_pos("alpha", alpha)?;
    let kappa = k.float_or("kappa", 1.0);
    finite_nonneg("kappa", kappa)?;
    // with no loss the default time scale falls back to κ = 1
    let rate = if kappa > 0.0 { kappa * alpha * alpha } else { alpha * alpha };
    let t_final = k.float_or("t_final", 2.0 / rate);
    finite_pos("t_final", t_final)?;
    let delta_t = k.float_or("delta_t", 0.02 / rate);
    finite_pos("delta_t", delta_t)?;
    require(delta_t < t_final, "delta_t", "must be smaller than t_final", delta_t)?;
    require(t_final / delta_t <= 1e6, "delta_t", "must leave at most 1000000 intervals", delta_t)?;
    let readout_flip_p = k.float_or("readout_flip_p", 0.0);
    require((0.0..1.0).contains(&readout_flip_p), "readout_flip_p", "must lie in [0, 1)", readout_flip_p)?;
    let shots = k.count_or("shots", 10_000, 1)?;
    require(shots <= 10_000_000, "shots", "must not exceed 10000000", shots)?;
    let logical = match k.string("logical").unwrap_or("plus") {
        "zero" => LogicalState::Zero,
        "one" => LogicalState::One,
        "plus-i" => LogicalState::PlusI,
        _ => LogicalState::Plus,
    };
    let sweep_steps = match k.int_list("sweep_steps") {
        None => vec![200, 100, 50, 40, 20],
        Some(v) => {
            require(
                v.len() >= 2 && v.iter().all(|s| (1..=1_000_000).contains(s)),
                "sweep_steps",
                "must list at least two counts in 1..=1000000",
                format!("{v:?}"),
            )?;
            v.into_iter().map(|s| s as usize).collect()
        }
    };
    let gamma_t = match k.float_list("gamma_t") {
        None => vec![0.01, 0.02, 0.05, 0.1],
        Some(v) => {
            require(
                v.len() >= 2 && v.iter().all(|g| g.is_finite() && *g > 0.0),
                "gamma_t",
                "must list at least two positive values",
                format!("{v:?}"),
            )?;
            v
        }
    };
    let sweep = k.boolean_or("sweep", true);
    if sweep {
        require(
            !matches!(logical, LogicalState::Zero | LogicalState::One),
            "logical",
            "must be plus or plus-i when sweep = true (phase flips are invisible otherwise)",
            format!("{logical:?}").to_lowercase(),
        )?;
    }
    Ok(QecParams {
        alpha,
        kappa,
        delta_t,
        t_final,
        readout_flip_p,
        shots,
        logical,
        sweep,
        sweep_steps,
        gamma_t,
    })
}

fn parse_oracle(k: &Keys<'_>) -> Result<OracleParams, ConfigError> {
    let alpha = k.float_or("alpha", 2.0);
    finite_pos("alpha", alpha)?;
    let shots = k.count_or("shots", 20_000, 10)?;
    require(shots <= 10_000_000, "shots", "must not exceed 10000000", shots)?;
    Ok(OracleParams { alpha, shots })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_wigner_fills_defaults() {
        let cfg = parse_config("scenario = \"wigner\"\nalpha = 2\nsign = 1\n").unwrap();
        assert_eq!(cfg.common.seed, 0);
        assert_eq!(cfg.common.format, Format::Csv);
        let Params::Wigner(w) = cfg.params else { panic!() };
        assert_eq!(w.grid, GridSpec::default());
        assert_eq!(w.sign, Parity::Even);
        assert_eq!(w.alpha, 2.0);
    }

    #[test]
    fn negative_kappa_names_the_key() {
        let err = parse_config("scenario = \"qec\"\nkappa = -1.0\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(ref m) if m.contains("`kappa`")), "{err}");
    }

    #[test]
    fn unknown_key_lists_accepted_keys() {
        let err = parse_config("scenario = \"wigner\"\nkerr = 0.1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("`kerr`"));
        assert!(msg.contains("accepted keys"));
        assert!(msg.contains("alpha"));
    }

    #[test]
    fn malformed_documents_are_parse_errors() {
        assert!(matches!(parse_config("scenario = "), Err(ConfigError::Parse(_))));
        assert!(matches!(parse_config("[[["), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn type_mismatch_is_invalid() {
        let err = parse_config("scenario = \"spectroscopy\"\nn_peaks = 2.5\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)));
        let err = parse_config("scenario = \"wigner\"\nstate = \"squeezed\"\n").unwrap_err();
        assert!(err.to_string().contains("cat|coherent"));
    }

    #[test]
    fn qec_defaults_follow_rate() {
        let cfg = parse_config("scenario = \"qec\"\nalpha = 2.0\nkappa = 1.0\n").unwrap();
        let Params::Qec(q) = cfg.params else { panic!() };
        assert!((q.delta_t - 0.005).abs() < 1e-15);
        assert!((q.t_final - 0.5).abs() < 1e-15);
        assert_eq!(q.sweep_steps, vec![200, 100, 50, 40, 20]);
    }

    #[test]
    fn reference_lists_every_key() {
        let text = config_reference();
        for sc in Scenario::ALL {
            assert!(text.contains(sc.name()));
            for k in sc.keys() {
                assert!(text.contains(k.name), "{}", k.name);
            }
        }
    }
}
