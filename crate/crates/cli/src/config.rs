//! Flat `key = value` experiment configuration.
//!
//! Values are numbers, `pi` expressions (`2pi/3`, `pi/2`, `0.5*pi`), inclusive
//! ranges `start:stop[:step]`, or comma-separated lists of either.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use ness_core::entanglement::Order;
use ness_core::numerics::QuadratureSpec;
use ness_core::scattering::{BiasState, ScatteringModel};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Scenario {
    SweepLength,
    SweepPosition,
    SweepBias,
    SweepDistance,
    EvalAsymptotics,
    Selftest,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::SweepLength => "sweep-length",
            Scenario::SweepPosition => "sweep-position",
            Scenario::SweepBias => "sweep-bias",
            Scenario::SweepDistance => "sweep-distance",
            Scenario::EvalAsymptotics => "eval-asymptotics",
            Scenario::Selftest => "selftest",
        }
    }

    fn parse(s: &str) -> Option<Scenario> {
        Scenario::value_variants().iter().copied().find(|v| v.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Mi,
    Ci,
    Negativity,
    Entropy,
}

impl Measure {
    fn parse(s: &str) -> Option<Measure> {
        match s {
            "mi" => Some(Measure::Mi),
            "ci" => Some(Measure::Ci),
            "negativity" => Some(Measure::Negativity),
            "entropy" => Some(Measure::Entropy),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub models: Vec<ScatteringModel>,
    pub k_fl: f64,
    pub k_fr: f64,
    pub delta_k: Vec<f64>,
    pub ell: Vec<i64>,
    pub ell_l: i64,
    pub ell_r: i64,
    pub delta_d: Vec<i64>,
    /// Distance of the right interval in far-limit sweeps.
    pub d: i64,
    pub d_over_ell: (f64, f64),
    pub centers: usize,
    /// Moving-average window for sweep-distance; derived from the bias when unset.
    pub window: Option<usize>,
    pub measures: Vec<Measure>,
    pub orders: Vec<Order>,
    pub t_grid: Vec<f64>,
    pub output: Option<PathBuf>,
    pub quadrature: QuadratureSpec,
}

impl ExperimentConfig {
    pub fn bias(&self) -> Result<BiasState> {
        Ok(BiasState::new(self.k_fl, self.k_fr)?)
    }
}

const KEYS: &[&str] = &[
    "scenario",
    "model",
    "epsilon0",
    "eta",
    "transmission",
    "k_fl",
    "k_fr",
    "delta_k",
    "ell",
    "ell_l",
    "ell_r",
    "delta_d",
    "d",
    "d_over_ell_min",
    "d_over_ell_max",
    "centers",
    "window",
    "measures",
    "orders",
    "t",
    "output",
    "abs_tol",
    "rel_tol",
    "max_panels",
    "nodes_per_panel",
];

/// Raw key-value pairs with the line each came from.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::Parse { line: line_no, msg: format!("expected `key = value`, found `{content}`") })?;
            let key = key.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Parse { line: line_no, msg: format!("unknown key `{key}`") });
            }
            let value = value.trim();
            if value.is_empty() {
                return Err(CliError::Parse { line: line_no, msg: format!("empty value for `{key}`") });
            }
            if entries.insert(key.clone(), (line_no, value.to_string())).is_some() {
                return Err(CliError::Parse { line: line_no, msg: format!("duplicate key `{key}`") });
            }
        }
        Ok(RawConfig { entries })
    }

    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn required(&self, key: &str) -> Result<(usize, &str)> {
        self.get(key).ok_or_else(|| CliError::MissingKey(key.to_string()))
    }

    fn reals(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key).map(|(line, v)| parse_list(v).map_err(|msg| CliError::Parse { line, msg: format!("{key}: {msg}") })).transpose()
    }

    fn required_reals(&self, key: &str) -> Result<Vec<f64>> {
        self.reals(key)?.ok_or_else(|| CliError::MissingKey(key.to_string()))
    }

    fn real(&self, key: &str) -> Result<Option<f64>> {
        match self.reals(key)? {
            None => Ok(None),
            Some(v) if v.len() == 1 => Ok(Some(v[0])),
            Some(_) => Err(CliError::invalid(key, "expected a single value")),
        }
    }

    fn required_real(&self, key: &str) -> Result<f64> {
        self.real(key)?.ok_or_else(|| CliError::MissingKey(key.to_string()))
    }

    fn integers(&self, key: &str) -> Result<Option<Vec<i64>>> {
        match self.reals(key)? {
            None => Ok(None),
            Some(v) => v
                .into_iter()
                .map(|x| {
                    if x.fract() == 0.0 && x.abs() < 1e15 {
                        Ok(x as i64)
                    } else {
                        Err(CliError::invalid(key, format!("{x} is not an integer")))
                    }
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    fn integer(&self, key: &str) -> Result<Option<i64>> {
        match self.integers(key)? {
            None => Ok(None),
            Some(v) if v.len() == 1 => Ok(Some(v[0])),
            Some(_) => Err(CliError::invalid(key, "expected a single value")),
        }
    }

    fn words(&self, key: &str) -> Option<Vec<String>> {
        self.get(key).map(|(_, v)| v.split(',').map(|w| w.trim().to_lowercase()).collect())
    }
}

/// Reads and validates a configuration file; the file must name its scenario.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    load_config(path, None)
}

/// Like [`parse_config`], with the scenario supplied by the caller when the
/// file does not name one.
pub fn load_config(path: &Path, scenario: Option<Scenario>) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_str(&text, scenario)
}

pub fn parse_config_str(text: &str, scenario: Option<Scenario>) -> Result<ExperimentConfig> {
    let raw = RawConfig::parse(text)?;
    let from_file = match raw.get("scenario") {
        Some((line, v)) => {
            Some(Scenario::parse(v).ok_or_else(|| CliError::Parse { line, msg: format!("unknown scenario `{v}`") })?)
        }
        None => None,
    };
    let scenario = match (from_file, scenario) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::invalid("scenario", format!("file declares {} but {} was requested", a.name(), b.name())))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(CliError::MissingKey("scenario".into())),
    };
    build(&raw, scenario)
}

fn build(raw: &RawConfig, scenario: Scenario) -> Result<ExperimentConfig> {
    use Scenario::*;
    let needs_model = !matches!(scenario, EvalAsymptotics | Selftest);
    let models = if needs_model { parse_models(raw)? } else { Vec::new() };

    let k_fr = match scenario {
        SweepLength | SweepPosition | SweepDistance | SweepBias => raw.required_real("k_fr")?,
        _ => raw.real("k_fr")?.unwrap_or(PI / 2.0),
    };
    let k_fl = match scenario {
        SweepLength | SweepPosition | SweepDistance => raw.required_real("k_fl")?,
        _ => raw.real("k_fl")?.unwrap_or(2.0 * PI / 3.0),
    };
    for (key, k) in [("k_fl", k_fl), ("k_fr", k_fr)] {
        if !(k > 0.0 && k < PI) {
            return Err(CliError::invalid(key, format!("momentum {k} outside (0, pi)")));
        }
    }
    let delta_k = if scenario == SweepBias { raw.required_reals("delta_k")? } else { raw.reals("delta_k")?.unwrap_or_default() };
    for &dk in &delta_k {
        let k = k_fr + dk;
        if !(k > 0.0 && k < PI) {
            return Err(CliError::invalid("delta_k", format!("k_fr + {dk} = {k} outside (0, pi)")));
        }
    }

    let ell = match scenario {
        SweepLength | SweepBias | SweepDistance => raw.integers("ell")?.ok_or_else(|| CliError::MissingKey("ell".into()))?,
        _ => raw.integers("ell")?.unwrap_or_default(),
    };
    if scenario == SweepDistance && ell.len() != 1 {
        return Err(CliError::invalid("ell", "sweep-distance takes a single interval length"));
    }
    if ell.iter().any(|&l| l < 1) {
        return Err(CliError::invalid("ell", "interval lengths must be >= 1"));
    }
    let (ell_l, ell_r, delta_d) = if scenario == SweepPosition {
        let l = raw.integer("ell_l")?.ok_or_else(|| CliError::MissingKey("ell_l".into()))?;
        let r = raw.integer("ell_r")?.ok_or_else(|| CliError::MissingKey("ell_r".into()))?;
        let dd = raw.integers("delta_d")?.ok_or_else(|| CliError::MissingKey("delta_d".into()))?;
        if l < 1 || r < 1 {
            return Err(CliError::invalid("ell_l", "interval lengths must be >= 1"));
        }
        (l, r, dd)
    } else {
        (0, 0, Vec::new())
    };
    let d = raw.integer("d")?.unwrap_or(10_000);
    if d < 0 {
        return Err(CliError::invalid("d", "distance must be non-negative"));
    }
    if delta_d.iter().any(|&x| d + x < 0) {
        return Err(CliError::invalid("delta_d", format!("d + delta_d must be non-negative (d = {d})")));
    }
    let d_over_ell = (raw.real("d_over_ell_min")?.unwrap_or(2.0), raw.real("d_over_ell_max")?.unwrap_or(40.0));
    if !(d_over_ell.0 > 0.0 && d_over_ell.1 > d_over_ell.0) {
        return Err(CliError::invalid("d_over_ell_max", "need 0 < d_over_ell_min < d_over_ell_max"));
    }
    let centers = raw.integer("centers")?.unwrap_or(8);
    if centers < 3 {
        return Err(CliError::invalid("centers", "need at least 3 centers"));
    }
    let window = positive(raw.integer("window")?, "window")?;
    if window == Some(1) {
        return Err(CliError::invalid("window", "need at least 2 sites"));
    }

    let measures = match raw.words("measures") {
        Some(words) => {
            let mut m = words
                .iter()
                .map(|w| Measure::parse(w).ok_or_else(|| CliError::invalid("measures", format!("unknown measure `{w}`"))))
                .collect::<Result<Vec<_>>>()?;
            m.sort();
            m.dedup();
            m
        }
        None => match scenario {
            SweepPosition => vec![Measure::Mi],
            SweepDistance => vec![Measure::Mi, Measure::Negativity],
            _ => vec![Measure::Mi, Measure::Ci, Measure::Negativity],
        },
    };
    let orders = match raw.words("orders") {
        Some(words) => words.iter().map(|w| parse_order(w)).collect::<Result<Vec<_>>>()?,
        None => vec![Order::VonNeumann],
    };
    let t_grid = if scenario == EvalAsymptotics { raw.required_reals("t")? } else { raw.reals("t")?.unwrap_or_default() };
    if t_grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(CliError::invalid("t", "transmission values must lie in [0, 1]"));
    }

    let defaults = QuadratureSpec::default();
    let quadrature = QuadratureSpec {
        abs_tol: raw.real("abs_tol")?.unwrap_or(defaults.abs_tol),
        rel_tol: raw.real("rel_tol")?.unwrap_or(defaults.rel_tol),
        max_panels: positive(raw.integer("max_panels")?, "max_panels")?.unwrap_or(defaults.max_panels),
        nodes_per_panel: positive(raw.integer("nodes_per_panel")?, "nodes_per_panel")?.unwrap_or(defaults.nodes_per_panel),
    };
    quadrature.validate()?;

    Ok(ExperimentConfig {
        scenario,
        models,
        k_fl,
        k_fr,
        delta_k,
        ell,
        ell_l,
        ell_r,
        delta_d,
        d,
        d_over_ell,
        centers: centers as usize,
        window,
        measures,
        orders,
        t_grid,
        output: raw.get("output").map(|(_, v)| PathBuf::from(v)),
        quadrature,
    })
}

fn positive(v: Option<i64>, key: &str) -> Result<Option<usize>> {
    match v {
        Some(x) if x < 1 => Err(CliError::invalid(key, "must be positive")),
        Some(x) => Ok(Some(x as usize)),
        None => Ok(None),
    }
}

fn parse_order(word: &str) -> Result<Order> {
    if word == "vn" || word == "1" {
        return Ok(Order::VonNeumann);
    }
    let n = eval_expr(word).map_err(|msg| CliError::invalid("orders", msg))?;
    Order::Renyi(n).validated().map_err(|e| CliError::invalid("orders", e.to_string()))
}

fn parse_models(raw: &RawConfig) -> Result<Vec<ScatteringModel>> {
    let (_, kind) = raw.required("model")?;
    let models = match kind {
        "single-impurity" => {
            let eta = raw.real("eta")?.unwrap_or(1.0);
            raw.required_reals("epsilon0")?
                .into_iter()
                .map(|e| ScatteringModel::single_impurity(e, eta))
                .collect::<std::result::Result<Vec<_>, _>>()
        }
        "constant-t" => raw
            .required_reals("transmission")?
            .into_iter()
            .map(ScatteringModel::constant_t)
            .collect::<std::result::Result<Vec<_>, _>>(),
        "trivial" => Ok(vec![ScatteringModel::Trivial]),
        other => return Err(CliError::invalid("model", format!("unknown model `{other}`"))),
    };
    models.map_err(|e| CliError::invalid("model", e.to_string()))
}

/// Expands a comma-separated list of expressions and ranges.
pub fn parse_list(value: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in value.split(',') {
        let item = item.trim();
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(eval_expr(x)?),
            [a, b] | [a, b, _] => {
                let (a, b) = (eval_expr(a)?, eval_expr(b)?);
                let step = if parts.len() == 3 { eval_expr(parts[2])? } else { 1.0 };
                if !(step > 0.0) {
                    return Err(format!("range step must be positive in `{item}`"));
                }
                if b < a {
                    return Err(format!("empty range `{item}`"));
                }
                let count = ((b - a) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|i| a + i as f64 * step));
            }
            _ => return Err(format!("malformed range `{item}`")),
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

/// Evaluates products and quotients of numbers and `pi`.
pub fn eval_expr(text: &str) -> std::result::Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse `{text}` as a number");
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(&s)),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let bytes = body.as_bytes();
    let mut value = 1.0;
    let mut op = b'*';
    let mut i = 0;
    let mut expect_factor = true;
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'*' || c == b'/' {
            if expect_factor {
                return Err(bad());
            }
            op = c;
            expect_factor = true;
            i += 1;
            continue;
        }
        let factor = if body[i..].starts_with("pi") {
            i += 2;
            PI
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < bytes.len() {
                let ch = bytes[i];
                let exp_sign = (ch == b'-' || ch == b'+') && i > start && matches!(bytes[i - 1], b'e' | b'E');
                if ch.is_ascii_digit() || ch == b'.' || ch == b'e' || ch == b'E' || exp_sign {
                    i += 1;
                } else {
                    break;
                }
            }
            body[start..i].parse::<f64>().map_err(|_| bad())?
        } else {
            return Err(bad());
        };
        value = if op == b'/' { value / factor } else { value * factor };
        op = b'*';
        expect_factor = false;
    }
    if expect_factor || !value.is_finite() {
        return Err(bad());
    }
    Ok(sign * value)
}
