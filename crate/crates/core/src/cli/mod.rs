//! Command-line front end: flags and config files resolve to one [`ScenarioConfig`].

pub mod config;
pub mod output;
pub mod scenarios;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use toml::{Table, Value};

use crate::error::Error;
pub use config::{config_from_table, config_reference, parse_config, ConfigError, Scenario, ScenarioConfig};
pub use scenarios::{run_scenario, Outcome};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_TRUNCATION: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;
pub const EXIT_MALFORMED: u8 = 5;

/// An error with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        let code = match e {
            ConfigError::Parse(_) => EXIT_MALFORMED,
            ConfigError::Invalid(_) => EXIT_CONFIG,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidDimension { .. } | Error::InvalidParameter { .. } | Error::DegenerateState(_) => {
                EXIT_CONFIG
            }
            Error::Truncation { .. } => EXIT_TRUNCATION,
            Error::DimensionMismatch { .. }
            | Error::CodeCollapse { .. }
            | Error::QuadratureNonConvergence { .. }
            | Error::InvariantViolation(_) => EXIT_NUMERICAL,
        };
        CliError::new(code, e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cqed",
    version,
    about = "Dispersive cavity-QED simulations: Wigner imaging, cat preparation, photon loss, cat-code QEC"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wigner function of a cavity state on a β grid.
    Wigner(WignerArgs),
    /// Prepare a cat state by a recipe or by parity measurement.
    CatPrepare(CatPrepareArgs),
    /// Parity of a cavity state under photon loss.
    ParityDecay(ParityDecayArgs),
    /// Photon-number-resolved qubit spectrum of a coherent state.
    Spectroscopy(SpectroscopyArgs),
    /// Cat-code lifetime with and without parity monitoring.
    Qec(QecArgs),
    /// Cross-check independent constructions against each other.
    OracleCheck(OracleArgs),
    /// Run whatever scenario the config file names.
    Run(RunArgs),
    /// Print every configuration key with its default.
    ConfigReference,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, short = 'c')]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Primary output path (default stdout). A sidecar <stem>.meta.json is written next to it.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    pub format: Option<String>,
    /// Fock truncation (default: smallest adequate).
    #[arg(long)]
    pub dim: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tail_tol: Option<f64>,
    /// Omit the generation time from the sidecar.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct WignerArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_parser = ["cat", "coherent", "vacuum", "fock", "cat-mixture"])]
    pub state: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// +1, -1, even or odd.
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<String>,
    #[arg(long)]
    pub fock_n: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa_t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub re_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub re_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub im_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub im_max: Option<f64>,
    #[arg(long)]
    pub n_re: Option<i64>,
    #[arg(long)]
    pub n_im: Option<i64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CatPrepareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_parser = ["deterministic", "measurement", "schrodinger"])]
    pub method: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<String>,
    #[arg(long)]
    pub shots: Option<i64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParityDecayArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_parser = ["cat", "coherent", "fock"])]
    pub state: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<String>,
    #[arg(long)]
    pub fock_n: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub n_times: Option<i64>,
    #[arg(long)]
    pub trajectories: Option<i64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpectroscopyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub nbar: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Option<f64>,
    #[arg(long)]
    pub n_peaks: Option<i64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct QecArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_final: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub readout_flip_p: Option<f64>,
    #[arg(long)]
    pub shots: Option<i64>,
    #[arg(long, value_parser = ["plus", "zero", "one", "plus-i"])]
    pub logical: Option<String>,
    /// Skip the Δt and Γ scaling sweeps.
    #[arg(long)]
    pub no_sweep: bool,
    /// Comma-separated interval counts for the Δt sweep.
    #[arg(long, value_delimiter = ',')]
    pub sweep_steps: Option<Vec<i64>>,
    /// Comma-separated Γ₀·t_final values for the unmonitored sweep.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub gamma_t: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub shots: Option<i64>,
}

struct Overlay<'a>(&'a mut Table);

impl Overlay<'_> {
    fn float(&mut self, key: &str, v: Option<f64>) {
        if let Some(v) = v {
            self.0.insert(key.into(), Value::Float(v));
        }
    }

    fn int(&mut self, key: &str, v: Option<i64>) {
        if let Some(v) = v {
            self.0.insert(key.into(), Value::Integer(v));
        }
    }

    fn string(&mut self, key: &str, v: &Option<String>) {
        if let Some(v) = v {
            self.0.insert(key.into(), Value::String(v.clone()));
        }
    }

    fn sign(&mut self, v: &Option<String>) {
        if let Some(s) = v {
            let value = match s.as_str() {
                "1" | "+1" => Value::Integer(1),
                "-1" => Value::Integer(-1),
                other => Value::String(other.into()),
            };
            self.0.insert("sign".into(), value);
        }
    }

    fn common(&mut self, c: &CommonArgs) {
        if let Some(seed) = c.seed {
            // TOML integers are signed; larger seeds are rejected by validation
            self.0.insert("seed".into(), Value::Integer(i64::try_from(seed).unwrap_or(-1)));
        }
        if let Some(out) = &c.out {
            self.0.insert("out".into(), Value::String(out.to_string_lossy().into_owned()));
        }
        self.string("format", &c.format);
        self.int("dim", c.dim);
        self.float("tail_tol", c.tail_tol);
        if c.no_timestamp {
            self.0.insert("timestamp".into(), Value::Boolean(false));
        }
    }
}

impl Command {
    fn common(&self) -> Option<&CommonArgs> {
        match self {
            Command::Wigner(a) => Some(&a.common),
            Command::CatPrepare(a) => Some(&a.common),
            Command::ParityDecay(a) => Some(&a.common),
            Command::Spectroscopy(a) => Some(&a.common),
            Command::Qec(a) => Some(&a.common),
            Command::OracleCheck(a) => Some(&a.common),
            Command::Run(a) => Some(&a.common),
            Command::ConfigReference => None,
        }
    }

    fn scenario(&self) -> Option<Scenario> {
        Some(match self {
            Command::Wigner(_) => Scenario::Wigner,
            Command::CatPrepare(_) => Scenario::CatPrepare,
            Command::ParityDecay(_) => Scenario::ParityDecay,
            Command::Spectroscopy(_) => Scenario::Spectroscopy,
            Command::Qec(_) => Scenario::Qec,
            Command::OracleCheck(_) => Scenario::OracleCheck,
            Command::Run(_) | Command::ConfigReference => return None,
        })
    }

    fn overlay(&self, table: &mut Table) {
        let mut o = Overlay(table);
        if let Some(c) = self.common() {
            o.common(c);
        }
        match self {
            Command::Wigner(a) => {
                o.string("state", &a.state);
                o.float("alpha", a.alpha);
                o.sign(&a.sign);
                o.int("fock_n", a.fock_n);
                o.float("kappa_t", a.kappa_t);
                o.float("re_min", a.re_min);
                o.float("re_max", a.re_max);
                o.float("im_min", a.im_min);
                o.float("im_max", a.im_max);
                o.int("n_re", a.n_re);
                o.int("n_im", a.n_im);
            }
            Command::CatPrepare(a) => {
                o.string("method", &a.method);
                o.float("alpha", a.alpha);
                o.sign(&a.sign);
                o.int("shots", a.shots);
            }
            Command::ParityDecay(a) => {
                o.string("state", &a.state);
                o.float("alpha", a.alpha);
                o.sign(&a.sign);
                o.int("fock_n", a.fock_n);
                o.float("kappa", a.kappa);
                o.float("t_max", a.t_max);
                o.int("n_times", a.n_times);
                o.int("trajectories", a.trajectories);
            }
            Command::Spectroscopy(a) => {
                o.float("nbar", a.nbar);
                o.float("chi", a.chi);
                o.int("n_peaks", a.n_peaks);
            }
            Command::Qec(a) => {
                o.float("alpha", a.alpha);
                o.float("kappa", a.kappa);
                o.float("delta_t", a.delta_t);
                o.float("t_final", a.t_final);
                o.float("readout_flip_p", a.readout_flip_p);
                o.int("shots", a.shots);
                o.string("logical", &a.logical);
                if a.no_sweep {
                    o.0.insert("sweep".into(), Value::Boolean(false));
                }
                if let Some(v) = &a.sweep_steps {
                    o.0.insert("sweep_steps".into(), Value::Array(v.iter().map(|s| Value::Integer(*s)).collect()));
                }
                if let Some(v) = &a.gamma_t {
                    o.0.insert("gamma_t".into(), Value::Array(v.iter().map(|g| Value::Float(*g)).collect()));
                }
            }
            Command::OracleCheck(a) => {
                o.float("alpha", a.alpha);
                o.int("shots", a.shots);
            }
            Command::Run(_) | Command::ConfigReference => {}
        }
    }
}

/// Reads a config file from disk.
pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))
}

/// Resolves flags and the optional config file into a validated configuration.
/// Returns `None` for commands that do not run a scenario.
pub fn resolve(cli: &Cli) -> Result<Option<ScenarioConfig>, CliError> {
    resolve_with_loader(cli, read_file)
}

/// [`resolve`] with a custom file loader.
pub fn resolve_with_loader(
    cli: &Cli,
    load: impl Fn(&Path) -> Result<String, CliError>,
) -> Result<Option<ScenarioConfig>, CliError> {
    let Some(common) = cli.command.common() else {
        return Ok(None);
    };
    let mut table = match &common.config {
        Some(path) => {
            let text = load(path)?;
            toml::from_str::<Table>(&text).map_err(|e| ConfigError::Parse(e.to_string().trim().to_string()))?
        }
        None => Table::new(),
    };
    match (cli.command.scenario(), table.get("scenario")) {
        (Some(sc), Some(Value::String(named))) if named != sc.name() => {
            return Err(CliError::new(
                EXIT_CONFIG,
                format!(
                    "config file names scenario `{named}` but the subcommand is `{}`",
                    sc.name()
                ),
            ));
        }
        (Some(sc), _) => {
            table.insert("scenario".into(), Value::String(sc.name().into()));
        }
        (None, _) if common.config.is_none() => {
            return Err(CliError::new(EXIT_CONFIG, "`run` needs --config"));
        }
        (None, _) => {}
    }
    cli.command.overlay(&mut table);
    Ok(Some(config_from_table(&table)?))
}

/// Runs a resolved configuration and writes its outputs.
pub fn execute(cfg: &ScenarioConfig, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> Result<(), CliError> {
    let outcome = run_scenario(cfg)?;
    let payload = output::render_payload(cfg, &outcome).map_err(|e| CliError::new(EXIT_IO, e))?;
    let io = |e: std::io::Error| CliError::new(EXIT_IO, e.to_string());
    match &cfg.common.out {
        Some(path) => {
            std::fs::write(path, payload).map_err(|e| CliError::new(EXIT_IO, format!("cannot write {}: {e}", path.display())))?;
            let meta = output::render_sidecar(cfg, &outcome).map_err(|e| CliError::new(EXIT_IO, e))?;
            let meta_path = output::sidecar_path(path);
            std::fs::write(&meta_path, meta)
                .map_err(|e| CliError::new(EXIT_IO, format!("cannot write {}: {e}", meta_path.display())))?;
        }
        None => stdout.write_all(payload.as_bytes()).map_err(io)?,
    }
    if !outcome.checks.is_empty() {
        for c in &outcome.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(stderr, "{tag} {:<28} value {:.3e}  tolerance {:.1e}", c.name, c.value, c.tolerance).map_err(io)?;
        }
        let failed: Vec<&str> = outcome.failed_checks().map(|c| c.name).collect();
        if !failed.is_empty() {
            return Err(CliError::new(EXIT_NUMERICAL, format!("oracle checks failed: {}", failed.join(", "))));
        }
    }
    Ok(())
}

/// The clap command with the configuration reference appended to `--help`.
pub fn command() -> clap::Command {
    Cli::command().after_long_help(config_reference()).after_help(
        "Every scenario and key with its default is listed by `--help` and by `cqed config-reference`.",
    )
}

/// Parses arguments the way the binary does.
pub fn parse_args<I, T>(args: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = command().try_get_matches_from(args)?;
    Cli::from_arg_matches(&matches)
}

/// Entry point of the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match parse_args(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return u8::try_from(code).unwrap_or(EXIT_CONFIG);
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    if let Command::ConfigReference = cli.command {
        let _ = stdout.lock().write_all(config_reference().as_bytes());
        return EXIT_OK;
    }
    let result = resolve(&cli).and_then(|cfg| match cfg {
        Some(cfg) => execute(&cfg, &mut stdout.lock(), &mut stderr.lock()),
        None => Ok(()),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr.lock(), "error: {}", e.message);
            e.code
        }
    }
}
