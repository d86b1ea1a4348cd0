//! Far-limit sweeps over interval length, bias and relative position.

use std::collections::BTreeMap;

use ness_core::asymptotics::{
    ci_prediction, contiguous_entropy_prediction, disjoint_symmetric_entropy_prediction, mi_prediction,
    negativity_prediction, AsymptoticPrediction, Side,
};
use ness_core::correlation::{correlation_matrix_far, Subsystem, SubsystemGeometry};
use ness_core::entanglement::{fermionic_negativity_detailed, measures_multi, Diagnostics, Order};
use ness_core::numerics::QuadratureSpec;
use ness_core::scattering::{BiasState, ScatteringModel};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Measure, Scenario};
use crate::error::{CliError, Result};
use crate::fit::{fit_constant, half_offset_difference, FitResult};
use crate::output::{Field, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    Mi,
    Ci,
    Negativity,
    SAl,
    SAr,
    SA,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Mi => "mi",
            Quantity::Ci => "ci",
            Quantity::Negativity => "negativity",
            Quantity::SAl => "s_al",
            Quantity::SAr => "s_ar",
            Quantity::SA => "s_a",
        }
    }

    /// Geometric quantity multiplying the volume-law coefficient.
    fn driver(self, g: &SubsystemGeometry) -> f64 {
        (match self {
            Quantity::Mi | Quantity::Negativity => g.ell_mirror(),
            Quantity::Ci => g.ell_mirror() - g.delta_ell_l(),
            Quantity::SAl => g.ell_l,
            Quantity::SAr => g.ell_r,
            Quantity::SA => g.delta_ell_l() + g.delta_ell_r(),
        }) as f64
    }
}

/// How the two intervals' mirror images overlap.
pub fn overlap_regime(g: &SubsystemGeometry) -> &'static str {
    let m = g.ell_mirror();
    if m == 0 {
        "disjoint"
    } else if m == g.ell_l.min(g.ell_r) {
        "contained"
    } else {
        "partial"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub model: usize,
    pub bias: usize,
    pub geom: SubsystemGeometry,
    /// None for the negativity, which has no Rényi index.
    pub order: Option<Order>,
    pub quantity: Quantity,
    pub numeric: f64,
    pub linear: f64,
    pub log: f64,
    pub fitted: f64,
    pub residual: f64,
}

impl SweepRow {
    pub fn analytic(&self) -> f64 {
        self.linear + self.log
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFit {
    pub model: usize,
    pub bias: usize,
    pub order: Option<Order>,
    pub quantity: Quantity,
    pub points: usize,
    pub fit: FitResult,
    pub half_offset_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub models: Vec<ScatteringModel>,
    pub biases: Vec<BiasState>,
    pub rows: Vec<SweepRow>,
    pub fits: Vec<SeriesFit>,
    pub diagnostics: Diagnostics,
}

fn order_label(order: Option<Order>) -> String {
    order.map_or(String::new(), |o| o.label())
}

struct Job {
    model: usize,
    bias: usize,
    geom: SubsystemGeometry,
}

fn prediction(
    q: Quantity,
    model: &ScatteringModel,
    bias: &BiasState,
    geom: &SubsystemGeometry,
    order: Order,
    spec: &QuadratureSpec,
) -> Result<AsymptoticPrediction> {
    Ok(match q {
        Quantity::Mi => mi_prediction(model, bias, geom, order, spec)?,
        Quantity::Ci => ci_prediction(model, bias, geom, spec)?,
        Quantity::Negativity => negativity_prediction(model, bias, geom, spec)?,
        Quantity::SAl => contiguous_entropy_prediction(model, bias, geom.ell_l, Side::Left, order, spec)?,
        Quantity::SAr => contiguous_entropy_prediction(model, bias, geom.ell_r, Side::Right, order, spec)?,
        Quantity::SA => disjoint_symmetric_entropy_prediction(geom, order)?,
    })
}

fn evaluate(
    job: &Job,
    models: &[ScatteringModel],
    biases: &[BiasState],
    measures: &[Measure],
    orders: &[Order],
    spec: &QuadratureSpec,
) -> Result<(Vec<SweepRow>, Diagnostics)> {
    let model = &models[job.model];
    let bias = &biases[job.bias];
    let c = correlation_matrix_far(model, bias, &job.geom, Subsystem::Both, spec)?;
    let reports = measures_multi(&c, orders)?;
    let mut rows = Vec::new();
    let mut diagnostics = Diagnostics::default();
    let mut push = |order: Option<Order>, q: Quantity, numeric: f64, p: AsymptoticPrediction| {
        rows.push(SweepRow {
            model: job.model,
            bias: job.bias,
            geom: job.geom,
            order,
            quantity: q,
            numeric,
            linear: p.linear_term,
            log: p.log_term,
            fitted: f64::NAN,
            residual: f64::NAN,
        })
    };
    for report in &reports {
        diagnostics.merge(&report.diagnostics);
        let order = report.order;
        if measures.contains(&Measure::Mi) {
            push(Some(order), Quantity::Mi, report.mutual_info, prediction(Quantity::Mi, model, bias, &job.geom, order, spec)?);
        }
        if measures.contains(&Measure::Ci) && order == Order::VonNeumann {
            push(Some(order), Quantity::Ci, report.coherent_info, prediction(Quantity::Ci, model, bias, &job.geom, order, spec)?);
        }
        if measures.contains(&Measure::Entropy) {
            for (q, v) in [(Quantity::SAl, report.s_al), (Quantity::SAr, report.s_ar), (Quantity::SA, report.s_a)] {
                if q == Quantity::SA && !job.geom.is_symmetric() {
                    continue;
                }
                push(Some(order), q, v, prediction(q, model, bias, &job.geom, order, spec)?);
            }
        }
    }
    if measures.contains(&Measure::Negativity) {
        let neg = fermionic_negativity_detailed(&c, 1)?;
        diagnostics.merge(&neg.diagnostics);
        let p = prediction(Quantity::Negativity, model, bias, &job.geom, Order::VonNeumann, spec)?;
        push(None, Quantity::Negativity, neg.value, p);
    }
    Ok((rows, diagnostics))
}

fn run_jobs(
    jobs: Vec<Job>,
    models: Vec<ScatteringModel>,
    biases: Vec<BiasState>,
    config: &ExperimentConfig,
) -> Result<SweepResult> {
    let results: Vec<(Vec<SweepRow>, Diagnostics)> = jobs
        .par_iter()
        .map(|job| evaluate(job, &models, &biases, &config.measures, &config.orders, &config.quadrature))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut diagnostics = Diagnostics::default();
    for (r, d) in results {
        rows.extend(r);
        diagnostics.merge(&d);
    }
    let fits = fit_series(&mut rows, &config.orders)?;
    Ok(SweepResult { models, biases, rows, fits, diagnostics })
}

fn fit_series(rows: &mut [SweepRow], orders: &[Order]) -> Result<Vec<SeriesFit>> {
    let order_rank = |o: Option<Order>| o.map_or(usize::MAX, |o| orders.iter().position(|x| *x == o).unwrap_or(0));
    let mut groups: BTreeMap<(usize, usize, Quantity, usize), Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        groups.entry((r.model, r.bias, r.quantity, order_rank(r.order))).or_default().push(i);
    }
    let mut fits = Vec::new();
    for ((model, bias, quantity, _), idx) in groups {
        let numeric: Vec<f64> = idx.iter().map(|&i| rows[i].numeric).collect();
        let analytic: Vec<f64> = idx.iter().map(|&i| rows[i].analytic()).collect();
        let mut fit = fit_constant(&numeric, &analytic)?;
        let drivers: Vec<f64> = idx.iter().map(|&i| quantity.driver(&rows[i].geom)).collect();
        let varies = drivers.iter().any(|&d| d != drivers[0]);
        if let Some(k) = idx.iter().position(|&i| quantity.driver(&rows[i].geom) != 0.0).filter(|_| varies) {
            let predicted = rows[idx[k]].linear / drivers[k];
            let response: Vec<f64> = idx.iter().map(|&i| rows[i].numeric - rows[i].log).collect();
            fit = fit.with_slope_check(&drivers, &response, predicted)?;
        }
        for &i in &idx {
            rows[i].fitted = rows[i].analytic() + fit.offset;
            rows[i].residual = rows[i].numeric - rows[i].fitted;
        }
        let half_offset_diff = half_offset_difference(&numeric, &analytic)?;
        fits.push(SeriesFit { model, bias, order: rows[idx[0]].order, quantity, points: idx.len(), fit, half_offset_diff });
    }
    Ok(fits)
}

fn require_points(n: usize, key: &str) -> Result<()> {
    if n < 3 {
        return Err(CliError::invalid(key, format!("a sweep needs at least 3 points, got {n}")));
    }
    Ok(())
}

/// Symmetric intervals (ℓ_L = ℓ_R = ℓ, d_L = d_R) for every ℓ in the config.
pub fn run_sweep_length(config: &ExperimentConfig) -> Result<SweepResult> {
    require_points(config.ell.len(), "ell")?;
    let bias = config.bias()?;
    let jobs = length_jobs(config, 1)?;
    run_jobs(jobs, config.models.clone(), vec![bias], config)
}

fn length_jobs(config: &ExperimentConfig, biases: usize) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for model in 0..config.models.len() {
        for bias in 0..biases {
            for &ell in &config.ell {
                jobs.push(Job { model, bias, geom: SubsystemGeometry::symmetric(config.d, ell)? });
            }
        }
    }
    Ok(jobs)
}

/// The length sweep repeated for k_FL = k_FR + Δk over the configured Δk.
pub fn run_sweep_bias(config: &ExperimentConfig) -> Result<SweepResult> {
    require_points(config.ell.len(), "ell")?;
    let biases =
        config.delta_k.iter().map(|dk| BiasState::new(config.k_fr + dk, config.k_fr)).collect::<ness_core::Result<Vec<_>>>()?;
    let jobs = length_jobs(config, biases.len())?;
    run_jobs(jobs, config.models.clone(), biases, config)
}

/// Fixed ℓ_L, ℓ_R with d_R = d and d_L = d + δ for each configured δ.
pub fn run_sweep_position(config: &ExperimentConfig) -> Result<SweepResult> {
    require_points(config.delta_d.len(), "delta_d")?;
    if config.ell_l != config.ell_r && config.measures.iter().any(|m| matches!(m, Measure::Negativity)) {
        return Err(CliError::invalid("measures", "the negativity prediction needs ell_l = ell_r"));
    }
    let bias = config.bias()?;
    let mut jobs = Vec::new();
    for model in 0..config.models.len() {
        for &delta in &config.delta_d {
            let geom = SubsystemGeometry::new(0, config.d + delta, config.ell_l, config.d, config.ell_r)?;
            jobs.push(Job { model, bias: 0, geom });
        }
    }
    run_jobs(jobs, config.models.clone(), vec![bias], config)
}

pub fn run(config: &ExperimentConfig) -> Result<SweepResult> {
    match config.scenario {
        Scenario::SweepLength => run_sweep_length(config),
        Scenario::SweepBias => run_sweep_bias(config),
        Scenario::SweepPosition => run_sweep_position(config),
        other => Err(CliError::invalid("scenario", format!("{} is not a far-limit sweep", other.name()))),
    }
}

pub const ROW_COLUMNS: &[&str] = &[
    "model", "k_fl", "k_fr", "d_l", "ell_l", "d_r", "ell_r", "ell_mirror", "regime", "order", "measure", "numeric",
    "linear", "log", "analytic", "fitted", "residual",
];

pub const FIT_COLUMNS: &[&str] = &[
    "model",
    "k_fl",
    "k_fr",
    "order",
    "measure",
    "points",
    "offset",
    "residual_max",
    "residual_rms",
    "half_offset_diff",
    "fitted_slope",
    "predicted_slope",
    "slope_rel_error",
];

impl SweepResult {
    pub fn rows_table(&self) -> Table {
        let mut t = Table::new(ROW_COLUMNS);
        for r in &self.rows {
            let b = &self.biases[r.bias];
            let g = &r.geom;
            t.push(vec![
                self.models[r.model].label().into(),
                b.k_fl.into(),
                b.k_fr.into(),
                g.d_l.into(),
                g.ell_l.into(),
                g.d_r.into(),
                g.ell_r.into(),
                g.ell_mirror().into(),
                overlap_regime(g).into(),
                order_label(r.order).into(),
                r.quantity.name().into(),
                r.numeric.into(),
                r.linear.into(),
                r.log.into(),
                r.analytic().into(),
                r.fitted.into(),
                r.residual.into(),
            ]);
        }
        t
    }

    pub fn fit_table(&self) -> Table {
        let mut t = Table::new(FIT_COLUMNS);
        for f in &self.fits {
            let b = &self.biases[f.bias];
            let s = f.fit.slope_check;
            t.push(vec![
                self.models[f.model].label().into(),
                b.k_fl.into(),
                b.k_fr.into(),
                order_label(f.order).into(),
                f.quantity.name().into(),
                Field::Int(f.points as i64),
                f.fit.offset.into(),
                f.fit.residual_max.into(),
                f.fit.residual_rms.into(),
                f.half_offset_diff.into(),
                s.map(|s| s.fitted).into(),
                s.map(|s| s.predicted).into(),
                s.map(|s| s.rel_error).into(),
            ]);
        }
        t
    }

    /// Rows of one series in sweep order.
    pub fn series(&self, model: usize, bias: usize, order: Option<Order>, quantity: Quantity) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.model == model && r.bias == bias && r.order == order && r.quantity == quantity).collect()
    }

    pub fn fit_for(&self, model: usize, bias: usize, order: Option<Order>, quantity: Quantity) -> Option<&SeriesFit> {
        self.fits.iter().find(|f| f.model == model && f.bias == bias && f.order == order && f.quantity == quantity)
    }
}
