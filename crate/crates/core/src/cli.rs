//! Command-line front end: flag and config-file parsing, presets, and table output.
//!
//! Every command produces a [`Table`]; CSV output is the header plus rows, JSON output
//! adds a `meta` object with the structured reports.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::error::Error;
use crate::oracle::fd::{fd_residual_with_step, Convention};
use crate::params::{classify, CoordinateMap, HeunSixParams};
use crate::potential::{critical_points, v1_zeroing, v2_zeroing, v4_zeroing, v_eff, PotentialFamily};
use crate::qes::{build_polynomial, determinant_condition, energy_eigenvalue, qes_constraint};
use crate::recurrence::{casoratian_closed_form, limit_check, propagate_from, ratio_plateau, BirkhoffExpansion};
use crate::series::{wronskian, CanonicalParams, SeriesSolution};
use crate::special::{zero_energy_state, KappaConvention, ReducedV4};
use crate::susy::{ground_state_energy_check, Superpotential, NODE_EXCLUSION};
use crate::validation::{default_suite, map_r_grid};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Classify,
    Map,
    Potential,
    Series,
    Spectrum,
    Asym,
    Susy,
    Special,
    Validate,
}

impl CommandKind {
    fn name(self) -> &'static str {
        match self {
            CommandKind::Classify => "classify",
            CommandKind::Map => "map",
            CommandKind::Potential => "potential",
            CommandKind::Series => "series",
            CommandKind::Spectrum => "spectrum",
            CommandKind::Asym => "asym",
            CommandKind::Susy => "susy",
            CommandKind::Special => "special",
            CommandKind::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionArg {
    Sh1,
    H0,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Sh1 => Convention::Sh1,
            ConventionArg::H0 => Convention::H0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaArg {
    SqrtV5,
    SqrtFive,
}

impl From<KappaArg> for KappaConvention {
    fn from(k: KappaArg) -> Self {
        match k {
            KappaArg::SqrtV5 => KappaConvention::SqrtV5,
            KappaArg::SqrtFive => KappaConvention::SqrtFive,
        }
    }
}

/// Which closed-form state `special` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    /// `E = 0` state of the pure `b2` potential.
    ZeroEnergy,
    /// Reduced `b2 = 0` potential: Whittaker form, Bessel at `E = v0`.
    Reduced,
}

#[derive(Debug, Parser)]
#[command(
    name = "triheun",
    version,
    about = "Potentials reducible to the triconfluent Heun equation"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Option<CommandKind>,
    /// Six parameters `a0,a1,a2,b0,b1,b2`.
    #[arg(long, value_name = "a0,a1,a2,b0,b1,b2", allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Canonical `alpha,beta,gamma`, for `series`, `asym` and `susy`.
    #[arg(long, value_name = "alpha,beta,gamma", allow_hyphen_values = true)]
    pub canonical: Option<String>,
    /// `min:max:count`, with an optional `:log` suffix.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    #[arg(long, value_enum)]
    pub kappa: Option<KappaArg>,
    /// Named parameter set; config file and flags override its fields
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
    pub preset: Option<String>,
    /// JSON file with any of the flag fields; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub energy: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
}

/// Config file contents; the same fields as the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<CommandKind>,
    pub params: Option<Vec<f64>>,
    pub canonical: Option<Vec<f64>>,
    pub grid: Option<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub convention: Option<ConventionArg>,
    pub kappa: Option<KappaArg>,
    pub preset: Option<String>,
    pub energy: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub n_max: Option<usize>,
    pub terms: Option<usize>,
    pub state: Option<StateKind>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Math(#[from] Error),
    #[error("{0}")]
    Validation(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Math(_) => 3,
            CliError::Validation(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Math(_) => "math",
            CliError::Validation(_) => "validation",
        }
    }

    /// One-line JSON record for stderr.
    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() }).to_string()
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Sampling grid from `min:max:count[:log]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl Grid {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || config_err(format!("grid '{s}': expected min:max:count[:log]"));
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let log = match parts.get(3).map(|p| p.trim()) {
            None => false,
            Some("log") => true,
            Some(_) => return Err(bad()),
        };
        if !(min.is_finite() && max.is_finite()) || count == 0 || (count > 1 && max <= min) {
            return Err(config_err(format!("grid '{s}': need finite min < max and count > 0")));
        }
        if log && min <= 0.0 {
            return Err(config_err(format!("grid '{s}': log spacing needs min > 0")));
        }
        Ok(Self { min, max, count, log })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = |i: usize| i as f64 / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if self.log {
                    (self.min.ln() + (self.max.ln() - self.min.ln()) * step(i)).exp()
                } else {
                    self.min + (self.max - self.min) * step(i)
                }
            })
            .collect()
    }

    fn linear(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            log: false,
        }
    }
}

/// Fully resolved run settings after merging preset, config file and flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: Option<HeunSixParams>,
    pub canonical: Option<CanonicalParams>,
    pub grid: Option<Grid>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub convention: Option<Convention>,
    pub kappa: KappaConvention,
    pub energy: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub n_max: Option<usize>,
    pub terms: Option<usize>,
    pub state: Option<StateKind>,
    pub preset: Option<String>,
}

/// Values a preset fills in before the config file and flags are applied.
#[derive(Debug, Clone, Default)]
pub struct Preset {
    pub params: Option<[f64; 6]>,
    pub canonical: Option<[f64; 3]>,
    pub c1: Option<f64>,
    pub energy: Option<f64>,
    pub state: Option<StateKind>,
}

pub const PRESET_NAMES: &[&str] = &[
    "v1-zero",
    "v2-zero",
    "v3-zero",
    "v4-zero",
    "v4-reduced",
    "qes",
    "quartic",
    "figW",
    "figW-dash",
    "figW2",
    "DeltaNeg_b2Pos",
    "DeltaZero_b1Pos",
    "DeltaZero_b1Neg",
    "DeltaZero_b0b1Zero",
    "DeltaPos_b2Pos",
    "DeltaPos_b2Neg",
    "Linear_b2Zero",
    "Linear_b0b2Zero",
    "Constant_b1b2Zero",
];

fn six(a: [f64; 3], b: [f64; 3]) -> [f64; 6] {
    [a[0], a[1], a[2], b[0], b[1], b[2]]
}

pub fn preset(name: &str) -> Option<Preset> {
    let params = |a, b| Preset {
        params: Some(six(a, b)),
        ..Preset::default()
    };
    let canonical = |c: [f64; 3], c1: f64| Preset {
        canonical: Some(c),
        c1: Some(c1),
        ..Preset::default()
    };
    Some(match name {
        "v1-zero" => params(v1_zeroing(1.0, 1.0), [1.0, 2.0, 1.0]),
        "v2-zero" => params(v2_zeroing(1.0, 1.0), [1.0, -2.0, 1.0]),
        "v3-zero" => Preset {
            state: Some(StateKind::ZeroEnergy),
            energy: Some(0.0),
            ..params([0.0; 3], [0.0, 0.0, 1.0])
        },
        "v4-zero" => params(v4_zeroing(1.0, 1.0), [1.0, 1.0, 0.0]),
        "v4-reduced" => Preset {
            state: Some(StateKind::Reduced),
            energy: Some(3.1),
            ..params([0.0, -0.35, 0.0], [0.0, 0.5, 0.0])
        },
        "qes" => params([0.0; 3], [0.0, 3.0, 0.0]),
        "quartic" => canonical([0.0, 0.0, 0.0], 0.0),
        "figW" | "figW2" => canonical([0.0, -1.0, -2.0], 0.0),
        "figW-dash" => canonical([0.0, 0.0, -2.0], 0.0),
        _ => {
            let (_, p) = crate::validation::case_presets()
                .into_iter()
                .find(|(tag, _)| tag.name() == name)?;
            params(p.a(), p.b())
        }
    })
}

fn parse_list<const N: usize>(what: &str, s: &str) -> Result<[f64; N], CliError> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| config_err(format!("--{what} '{s}': {e}")))?;
    to_array(what, &vals)
}

fn to_array<const N: usize>(what: &str, vals: &[f64]) -> Result<[f64; N], CliError> {
    vals.try_into()
        .map_err(|_| config_err(format!("{what}: expected {N} values, got {}", vals.len())))
}

fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        context: format!("reading {}", path.display()),
        source,
    })?;
    // serde_json reports the line and column of the offending token
    serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

impl RunConfig {
    /// Merges preset < config file < flags.
    pub fn resolve(cli: Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(p) => read_config(p)?,
            None => FileConfig::default(),
        };
        let preset_name = cli.preset.clone().or(file.preset.clone());
        let base = match &preset_name {
            Some(n) => preset(n)
                .ok_or_else(|| config_err(format!("unknown preset '{n}' (known: {})", PRESET_NAMES.join(", "))))?,
            None => Preset::default(),
        };

        let params6 = match (&cli.params, &file.params) {
            (Some(s), _) => Some(parse_list::<6>("params", s)?),
            (None, Some(v)) => Some(to_array::<6>("params", v)?),
            (None, None) => base.params,
        };
        let canonical3 = match (&cli.canonical, &file.canonical) {
            (Some(s), _) => Some(parse_list::<3>("canonical", s)?),
            (None, Some(v)) => Some(to_array::<3>("canonical", v)?),
            (None, None) => base.canonical,
        };
        let grid = cli
            .grid
            .as_ref()
            .or(file.grid.as_ref())
            .map(|g| Grid::parse(g))
            .transpose()?;
        let command = cli
            .command
            .or(file.command)
            .ok_or_else(|| config_err("no command given (try --help)"))?;

        Ok(Self {
            command,
            params: params6.map(|p| HeunSixParams::from_slice(&p)).transpose()?,
            canonical: canonical3.map(|c| CanonicalParams::new(c[0], c[1], c[2])),
            grid,
            format: cli.format.or(file.format).unwrap_or_default(),
            out: cli.out.or(file.out),
            convention: cli.convention.or(file.convention).map(Into::into),
            kappa: cli.kappa.or(file.kappa).map(Into::into).unwrap_or_default(),
            energy: cli.energy.or(file.energy).or(base.energy),
            c1: cli.c1.or(file.c1).or(base.c1),
            c2: cli.c2.or(file.c2),
            n_max: cli.n_max.or(file.n_max),
            terms: cli.terms.or(file.terms),
            state: cli.state.or(file.state).or(base.state),
            preset: preset_name,
        })
    }

    fn need_params(&self) -> Result<HeunSixParams, CliError> {
        self.params
            .ok_or_else(|| config_err(format!("'{}' needs --params or a preset", self.command.name())))
    }

    /// Canonical parameters from `--canonical`, or from `--params` at `--energy` (default 0).
    fn need_canonical(&self) -> Result<CanonicalParams, CliError> {
        if let Some(c) = self.canonical {
            return Ok(c);
        }
        match self.params {
            Some(p) => Ok(CanonicalParams::from_energy(&p, self.energy.unwrap_or(0.0))),
            None => Err(config_err(format!(
                "'{}' needs --canonical, or --params with --energy",
                self.command.name()
            ))),
        }
    }

    fn grid_or(&self, default: Grid) -> Vec<f64> {
        self.grid.clone().unwrap_or(default).points()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json_number(*x),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// Finite numbers as JSON numbers (shortest round-trip form), non-finite ones as `null`.
fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Value,
}

impl Table {
    fn new(command: CommandKind, columns: &[&'static str]) -> Self {
        Self {
            command: command.name(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            meta: json!({}),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "columns": self.columns,
            "rows": rows,
            "meta": self.meta,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Serializes a report; non-finite floats become `null`.
fn to_meta<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// The table of a command plus whether it counts as a validation failure.
pub struct Outcome {
    pub table: Table,
    pub failed: Option<String>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self { table, failed: None }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        CommandKind::Classify => classify_cmd(cfg).map(Outcome::ok),
        CommandKind::Map => map_cmd(cfg).map(Outcome::ok),
        CommandKind::Potential => potential_cmd(cfg).map(Outcome::ok),
        CommandKind::Series => series_cmd(cfg).map(Outcome::ok),
        CommandKind::Spectrum => spectrum_cmd(cfg).map(Outcome::ok),
        CommandKind::Asym => asym_cmd(cfg).map(Outcome::ok),
        CommandKind::Susy => susy_cmd(cfg).map(Outcome::ok),
        CommandKind::Special => special_cmd(cfg).map(Outcome::ok),
        CommandKind::Validate => Ok(validate_cmd(cfg)),
    }
}

fn classify_cmd(cfg: &RunConfig) -> Result<Table, CliError> {
    let params = cfg.need_params()?;
    let tag = classify(&params)?;
    let map = CoordinateMap::new(params)?;
    let (rho_lo, rho_hi) = map.rho_domain();
    let (r_lo, r_hi) = map.r_domain();
    let family = PotentialFamily::for_params(&params)
        .map(|f| format!("{:?}", f.kind))
        .unwrap_or_else(|_| "none".into());
    let mut t = Table::new(
        cfg.command,
        &[
            "case",
            "delta",
            "rho_min",
            "rho_max",
            "r_min",
            "r_max",
            "inversion",
            "anchor",
            "half_line",
            "family",
        ],
    );
    t.push(vec![
        tag.name().into(),
        params.delta().into(),
        rho_lo.into(),
        rho_hi.into(),
        r_lo.into(),
        r_hi.into(),
        format!("{:?}", map.inversion_mode()).into(),
        map.anchor().into(),
        map.covers_half_line().into(),
        family.into(),
    ]);
    t.meta = json!({ "params": params.as_array().map(json_number) });
    Ok(t)
}

fn default_r_grid(map: &CoordinateMap) -> Vec<f64> {
    map_r_grid(map, 41)
}

fn map_cmd(cfg: &RunConfig) -> Result<Table, CliError> {
    let params = cfg.need_params()?;
    let map = CoordinateMap::new(params)?;
    let grid = cfg
        .grid
        .as_ref()
        .map(Grid::points)
        .unwrap_or_else(|| default_r_grid(&map));
    let mut t = Table::new(
        cfg.command,
        &["r", "rho", "r_roundtrip", "rho_asymptotic", "ode_defect"],
    );
    for r in grid {
        let rho = map.inverse(r)?;
        let back = map.forward(rho)?;
        let defect = crate::oracle::fd::map_ode_defect(&map, r).unwrap_or(f64::NAN);
        t.push(vec![
            r.into(),
            rho.into(),
            back.into(),
            map.asymptotic(r).into(),
            defect.into(),
        ]);
    }
    t.meta =
        json!({ "case": map.tag().name(), "r_domain": [json_number(map.r_domain().0), json_number(map.r_domain().1)] });
    Ok(t)
}

fn potential_cmd(cfg: &RunConfig) -> Result<Table, CliError> {
    let params = cfg.need_params()?;
    let map = CoordinateMap::new(params)?;
    let grid = cfg
        .grid
        .as_ref()
        .map(Grid::points)
        .unwrap_or_else(|| default_r_grid(&map));
    let family = PotentialFamily::for_params(&params).ok();
    let mut t = Table::new(cfg.command, &["r", "rho", "v_eff", "v_family"]);
    for r in grid {
        let rho = map.inverse(r)?;
        let v = v_eff(&map, r)?;
        let vf = family.as_ref().and_then(|f| f.eval(r).ok()).unwrap_or(f64::NAN);
        t.push(vec![r.into(), rho.into(), v.into(), vf.into()]);
    }
    let mut meta = json!({ "case": map.tag().name() });
    if let Some(f) = &family {
        let named: serde_json::Map<String, Value> = f.named().map(|(k, v)| (k, json_number(v))).collect();
        meta["family"] = json!({ "kind": format!("{:?}", f.kind), "coefficients": named });
        if let Ok(cp) = critical_points(f) {
            meta["critical_points"] = to_meta(&cp);
        }
    }
    t.meta = meta;
    Ok(t)
}

fn series_cmd(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = cfg.need_canonical()?;
    let t1 = SeriesSolution::t1(&p);
    let t2 = SeriesSolution::t2(&p);
    let mut t = Table::new(
        cfg.command,
        &[
            "rho",
            "t1",
            "t1_prime",
            "t2",
            "t2_prime",
            "t1_residual",
            "t2_residual",
            "wronskian",
        ],
    );
    for rho in cfg.grid_or(Grid::linear(-1.5, 1.5, 31)) {
        let j1 = t1.eval_jet(rho)?;
        let j2 = t2.eval_jet(rho)?;
        t.push(vec![
            rho.into(),
            j1.value.into(),
            j1.d1.into(),
            j2.value.into(),
            j2.d1.into(),
            t1.ode_residual(rho)?.into(),
            t2.ode_residual(rho)?.into(),
            wronskian(&p, rho)?.into(),
        ]);
    }
    t.meta = json!({
        "alpha": json_number(p.alpha()),
        "beta": json_number(p.beta()),
        "gamma": json_number(p.gamma()),
        "t1_terms": t1.order(),
        "t2_terms": t2.order(),
    });
    Ok(t)
}

fn spectrum_cmd(cfg: &RunConfig) -> Result<Table, CliError> {
    let params = cfg.need_params()?;
    let [_, a1, _] = params.a();
    let [_, b1, _] = params.b();
    let n_max = cfg.n_max.unwrap_or(4);
    let mut t = Table::new(
        cfg.command,
        &[
            "n",
            "energy",
            "alpha",
            "beta",
            "gamma",
            "determinant",
            "on_curve",
            "constraint",
        ],
    );
    let mut polys = serde_json::Map::new();
    for n in 0..=n_max {
        let e = energy_eigenvalue(a1, b1, n)?;
        let cp = CanonicalParams::from_energy(&params, e);
        let det = determinant_condition(&cp, n)?;
        let poly = build_polynomial(&cp, n);
        if let Ok(p) = &poly {
            polys.insert(
                n.to_string(),
                Value::Array(p.coeffs.iter().map(|&c| json_number(c)).collect()),
            );
        }
        t.push(vec![
            n.into(),
            e.into(),
            cp.alpha().into(),
            cp.beta().into(),
            cp.gamma().into(),
            det.into(),
            poly.is_ok().into(),
            qes_constraint(n).constraint.to_string().into(),
        ]);
    }
    t.meta = json!({ "polynomials": polys });
    Ok(t)
}

fn asym_cmd(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = cfg.need_canonical()?;
    let n_max = cfg.n_max.unwrap_or(60);
    let terms = cfg.terms.unwrap_or(3).min(3);
    let fundamentals = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]].map(|z| propagate_from(&p, z, n_max));
    let seq = crate::recurrence::propagate(&p, n_max);
    let birk = BirkhoffExpansion::new(&p, 0);
    let mut t = Table::new(
        cfg.command,
        &[
            "n",
            "w",
            "birkhoff_ln_abs",
            "birkhoff_phase",
            "casoratian",
            "casoratian_closed_form",
        ],
    );
    for n in 0..=n_max {
        let m = [0, 1, 2].map(|i| fundamentals[i][n].z);
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        let (ln_mod, rest) = if n > 0 {
            birk.log_eval(n, terms)
        } else {
            (f64::NAN, f64::NAN.into())
        };
        t.push(vec![
            n.into(),
            seq[n].z[0].into(),
            (ln_mod + rest.norm().ln()).into(),
            rest.arg().into(),
            det.into(),
            casoratian_closed_form(p.beta(), n, 1.0).into(),
        ]);
    }
    let mut meta = json!({
        "alpha": json_number(p.alpha()),
        "beta": json_number(p.beta()),
        "gamma": json_number(p.gamma()),
        "birkhoff": to_meta(&birk),
        "limit_max_tail": json_number(limit_check(&p, n_max)),
    });
    if let Ok(rep) = ratio_plateau(&p, (100, 300), terms) {
        meta["plateau"] = to_meta(&rep);
    }
    t.meta = meta;
    Ok(t)
}

fn susy_cmd(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = cfg.need_canonical()?;
    let w = Superpotential::new(p, cfg.c1.unwrap_or(0.0));
    let grid = cfg.grid_or(Grid::linear(-1.5, 1.5, 61));
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let nodes = w.nodes(lo.min(hi), hi.max(lo), 400)?;
    let mut t = Table::new(
        cfg.command,
        &["rho", "w", "w_prime", "v_minus", "v_plus", "omega", "riccati_residual"],
    );
    for rho in grid {
        if nodes.iter().any(|n| (rho - n).abs() < NODE_EXCLUSION) {
            let nan = f64::NAN;
            t.push(vec![
                rho.into(),
                nan.into(),
                nan.into(),
                nan.into(),
                nan.into(),
                w.omega(rho).into(),
                nan.into(),
            ]);
            continue;
        }
        let (vm, vp) = w.partner_potentials(rho)?;
        t.push(vec![
            rho.into(),
            w.w(rho)?.into(),
            w.w_prime(rho)?.into(),
            vm.into(),
            vp.into(),
            w.omega(rho).into(),
            w.riccati_residual(rho)?.into(),
        ]);
    }
    let mut meta =
        json!({ "c1": json_number(w.c1()), "nodes": nodes.iter().map(|&x| json_number(x)).collect::<Vec<_>>() });
    if let Ok(gs) = ground_state_energy_check(&w, (-3.5, 3.5)) {
        meta["ground_state"] = to_meta(&gs);
    }
    t.meta = meta;
    Ok(t)
}

fn special_cmd(cfg: &RunConfig) -> Result<Table, CliError> {
    let params = cfg.need_params()?;
    let [a0, a1, a2] = params.a();
    let [b0, b1, b2] = params.b();
    let state = cfg.state.unwrap_or(if b2 == 0.0 {
        StateKind::Reduced
    } else {
        StateKind::ZeroEnergy
    });
    let convention = cfg.convention.unwrap_or(Convention::H0);
    let (c1, c2) = (cfg.c1.unwrap_or(1.0), cfg.c2.unwrap_or(0.5));
    let grid = cfg.grid_or(Grid::linear(0.3, 1.3, 41));
    let step = |x: f64| 2e-4 * (1.0 + x.abs());
    match state {
        StateKind::ZeroEnergy => {
            if [a0, a1, a2, b0, b1] != [0.0; 5] || b2 <= 0.0 {
                return Err(config_err("zero-energy state needs a = 0, b0 = b1 = 0 and b2 > 0"));
            }
            let map = CoordinateMap::new(params)?;
            let mut t = Table::new(cfg.command, &["r", "psi", "v_eff"]);
            for &r in &grid {
                t.push(vec![
                    r.into(),
                    zero_energy_state(&params, c1, c2, r)?.into(),
                    v_eff(&map, r)?.into(),
                ]);
            }
            let rep = fd_residual_with_step(
                |r| zero_energy_state(&params, c1, c2, r),
                |r| v_eff(&map, r),
                0.0,
                &grid,
                convention,
                step,
            )?;
            t.meta = json!({ "state": "zero-energy", "energy": 0.0, "residual": to_meta(&rep) });
            Ok(t)
        }
        StateKind::Reduced => {
            if b0 != 0.0 || b2 != 0.0 || b1 <= 0.0 {
                return Err(config_err("reduced state needs b0 = b2 = 0 and b1 > 0"));
            }
            let sys = ReducedV4::new(b1, -a1 / b1)?.with_kappa_convention(cfg.kappa);
            let energy = cfg.energy.unwrap_or(sys.v0);
            let mut t = Table::new(cfg.command, &["r", "psi_re", "psi_im", "potential"]);
            for &r in &grid {
                let z = sys.state(energy, c1, c2, r)?;
                t.push(vec![r.into(), z.re.into(), z.im.into(), sys.potential(r).into()]);
            }
            let part = |im: bool| {
                fd_residual_with_step(
                    |r| sys.state(energy, c1, c2, r).map(|z| if im { z.im } else { z.re }),
                    |r| Ok(sys.potential(r)),
                    energy,
                    &grid,
                    convention,
                    step,
                )
            };
            let re = part(false)?;
            let im = part(true)?;
            t.meta = json!({
                "state": if energy == sys.v0 { "bessel" } else { "whittaker" },
                "energy": json_number(energy),
                "v0": json_number(sys.v0),
                "v5": json_number(sys.v5()),
                "kappa": to_meta(&sys.kappa(energy)),
                "residual_re": to_meta(&re),
                "residual_im": to_meta(&im),
            });
            Ok(t)
        }
    }
}

fn validate_cmd(cfg: &RunConfig) -> Outcome {
    let entries = default_suite();
    let mut t = Table::new(cfg.command, &["check", "residual", "threshold", "passed", "grid"]);
    let mut failed = Vec::new();
    for e in &entries {
        if !e.passed {
            failed.push(e.report.name.clone());
        }
        t.push(vec![
            e.report.name.clone().into(),
            e.report.residual_max.into(),
            e.threshold.into(),
            e.passed.into(),
            e.report.grid.clone().into(),
        ]);
    }
    t.meta = json!({ "checks": entries.len(), "failed": failed });
    let failed = (!failed.is_empty()).then(|| format!("{} check(s) failed: {}", failed.len(), failed.join(", ")));
    Outcome { table: t, failed }
}

/// Writes through a temporary file in the target directory, then renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io_err = |source: io::Error| CliError::Io {
        context: format!("writing {}", path.display()),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Runs a parsed command line; returns the process exit code.
pub fn execute(cli: Cli) -> Result<u8, CliError> {
    let cfg = RunConfig::resolve(cli)?;
    let outcome = run(&cfg)?;
    let text = outcome.table.render(cfg.format);
    match &cfg.out {
        Some(p) => write_atomic(p, &text)?,
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                context: "writing stdout".into(),
                source,
            })?,
    }
    match outcome.failed {
        Some(msg) => Err(CliError::Validation(msg)),
        None => Ok(0),
    }
}
