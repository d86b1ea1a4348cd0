//! Finite-distance sweep: approach to the far limit and its Friedel oscillations.

use std::f64::consts::PI;

use ness_core::correlation::{correlation_matrix_far, correlation_matrix_finite, CorrelationMatrix, Subsystem, SubsystemGeometry};
use ness_core::entanglement::{fermionic_negativity_detailed, measures, Diagnostics, Order};
use ness_core::numerics::QuadratureSpec;
use ness_core::scattering::{BiasState, ScatteringModel};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Measure};
use crate::error::{CliError, Result};
use crate::fit::linear_fit;
use crate::output::{Field, Table};
use crate::sweeps::Quantity;

/// Smallest L for which L·2k_FL and L·2k_FR are both multiples of 2π, so a
/// window of L sites averages every 2k_F harmonic away.
pub fn friedel_window(bias: &BiasState) -> usize {
    let commensurate = |l: usize| {
        [bias.k_fl, bias.k_fr].iter().all(|k| {
            let turns = l as f64 * k / PI;
            (turns - turns.round()).abs() < 1e-9
        })
    };
    (2..=64).find(|&l| commensurate(l)).unwrap_or_else(|| ((2.0 * PI / (bias.k_fl + bias.k_fr)).round() as usize).max(2))
}

/// Offsets and weights of the centered moving average over one window.
pub fn window_weights(l: usize) -> Vec<(i64, f64)> {
    let h = (l / 2) as i64;
    if l.is_multiple_of(2) {
        (-h..=h).map(|o| (o, if o.abs() == h { 0.5 } else { 1.0 } / l as f64)).collect()
    } else {
        (-h..=h).map(|o| (o, 1.0 / l as f64)).collect()
    }
}

/// Integer centers spaced evenly in ln d.
pub fn log_centers(lo: f64, hi: f64, count: usize) -> Vec<i64> {
    let mut c: Vec<i64> = (0..count)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp().round() as i64)
        .collect();
    c.dedup();
    c
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSample {
    pub model: usize,
    pub d: i64,
    pub quantity: Quantity,
    pub numeric: f64,
    pub far: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceCenter {
    pub model: usize,
    pub quantity: Quantity,
    pub d: i64,
    /// Window-averaged value minus the far limit, averaged over one window of centers.
    pub avg_deviation: f64,
    /// Largest |value − window average| over one window of centers.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceFit {
    pub model: usize,
    pub quantity: Quantity,
    pub exponent_avg_deviation: f64,
    pub exponent_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceResult {
    pub models: Vec<ScatteringModel>,
    pub ell: i64,
    pub window: usize,
    pub samples: Vec<DistanceSample>,
    pub centers: Vec<DistanceCenter>,
    pub fits: Vec<DistanceFit>,
    pub diagnostics: Diagnostics,
}

fn quantities(measures: &[Measure]) -> Result<Vec<Quantity>> {
    measures
        .iter()
        .map(|m| match m {
            Measure::Mi => Ok(Quantity::Mi),
            Measure::Ci => Ok(Quantity::Ci),
            Measure::Negativity => Ok(Quantity::Negativity),
            Measure::Entropy => Err(CliError::invalid("measures", "sweep-distance supports mi, ci and negativity")),
        })
        .collect()
}

fn values(c: &CorrelationMatrix, qs: &[Quantity]) -> Result<(Vec<f64>, Diagnostics)> {
    let report = measures(c, Order::VonNeumann)?;
    let mut diagnostics = report.diagnostics;
    let mut out = Vec::with_capacity(qs.len());
    for q in qs {
        out.push(match q {
            Quantity::Mi => report.mutual_info,
            Quantity::Ci => report.coherent_info,
            _ => {
                let neg = fermionic_negativity_detailed(c, 1)?;
                diagnostics.merge(&neg.diagnostics);
                neg.value
            }
        });
    }
    Ok((out, diagnostics))
}

/// Von Neumann measures of two mirrored intervals of length ℓ at distances
/// around log-spaced centers in [ratio_min·ℓ, ratio_max·ℓ].
pub fn run_sweep_distance(config: &ExperimentConfig) -> Result<DistanceResult> {
    let ell = *config.ell.first().ok_or_else(|| CliError::MissingKey("ell".into()))?;
    let bias = config.bias()?;
    let qs = quantities(&config.measures)?;
    let spec = &config.quadrature;
    let window = config.window.unwrap_or_else(|| friedel_window(&bias));
    let weights = window_weights(window);
    let h = (window / 2) as i64;
    let (lo, hi) = config.d_over_ell;
    let centers = log_centers(lo * ell as f64, hi * ell as f64, config.centers);
    if centers.len() < 3 || centers[0] < h {
        return Err(CliError::invalid("d_over_ell_min", "centers must be distinct and leave room for the averaging window"));
    }
    let mut ds: Vec<i64> = centers.iter().flat_map(|&c| (c - h)..(c + window as i64 + h)).collect();
    ds.sort_unstable();
    ds.dedup();

    let far = config
        .models
        .par_iter()
        .map(|m| far_values(m, &bias, ell, &qs, spec))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, i64)> = (0..config.models.len()).flat_map(|m| ds.iter().map(move |&d| (m, d))).collect();
    let computed = jobs
        .par_iter()
        .map(|&(m, d)| {
            let geom = SubsystemGeometry::symmetric(d, ell)?;
            let c = correlation_matrix_finite(&config.models[m], &bias, &geom, Subsystem::Both, spec)?;
            values(&c, &qs)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut diagnostics = Diagnostics::default();
    let mut samples = Vec::new();
    for (&(m, d), (vals, diag)) in jobs.iter().zip(&computed) {
        diagnostics.merge(diag);
        for (qi, &q) in qs.iter().enumerate() {
            samples.push(DistanceSample { model: m, d, quantity: q, numeric: vals[qi], far: far[m].0[qi] });
        }
    }
    for (_, d) in &far {
        diagnostics.merge(d);
    }

    let mut center_rows = Vec::new();
    let mut fits = Vec::new();
    for m in 0..config.models.len() {
        for &q in &qs {
            let value = |d: i64| {
                samples.iter().find(|s| s.model == m && s.quantity == q && s.d == d).map(|s| s.numeric).expect("sampled distance")
            };
            let far_value = far[m].0[qs.iter().position(|x| *x == q).unwrap()];
            let mut rows = Vec::new();
            for &c in &centers {
                let mut dev_sum = 0.0;
                let mut amplitude = 0.0f64;
                for s in 0..window as i64 {
                    let at = c + s;
                    let avg: f64 = weights.iter().map(|(o, w)| w * value(at + o)).sum();
                    dev_sum += avg - far_value;
                    amplitude = amplitude.max((value(at) - avg).abs());
                }
                rows.push(DistanceCenter { model: m, quantity: q, d: c, avg_deviation: dev_sum / window as f64, amplitude });
            }
            let ln_d: Vec<f64> = rows.iter().map(|r| (r.d as f64).ln()).collect();
            let ln_dev: Vec<f64> = rows.iter().map(|r| r.avg_deviation.abs().ln()).collect();
            let ln_amp: Vec<f64> = rows.iter().map(|r| r.amplitude.ln()).collect();
            let finite = ln_dev.iter().chain(&ln_amp).all(|x| x.is_finite());
            let (e_dev, e_amp) = if finite {
                (linear_fit(&ln_d, &ln_dev)?.0, linear_fit(&ln_d, &ln_amp)?.0)
            } else {
                (f64::NAN, f64::NAN)
            };
            fits.push(DistanceFit { model: m, quantity: q, exponent_avg_deviation: e_dev, exponent_amplitude: e_amp });
            center_rows.extend(rows);
        }
    }
    Ok(DistanceResult { models: config.models.clone(), ell, window, samples, centers: center_rows, fits, diagnostics })
}

fn far_values(
    model: &ScatteringModel,
    bias: &BiasState,
    ell: i64,
    qs: &[Quantity],
    spec: &QuadratureSpec,
) -> Result<(Vec<f64>, Diagnostics)> {
    let geom = SubsystemGeometry::symmetric(10 * ell, ell)?;
    let c = correlation_matrix_far(model, bias, &geom, Subsystem::Both, spec)?;
    values(&c, qs)
}

pub const SAMPLE_COLUMNS: &[&str] = &["model", "ell", "d", "measure", "numeric", "far_limit", "deviation"];
pub const SUMMARY_COLUMNS: &[&str] = &["model", "ell", "measure", "quantity", "d", "value"];

impl DistanceResult {
    pub fn samples_table(&self) -> Table {
        let mut t = Table::new(SAMPLE_COLUMNS);
        for s in &self.samples {
            t.push(vec![
                self.models[s.model].label().into(),
                self.ell.into(),
                s.d.into(),
                s.quantity.name().into(),
                s.numeric.into(),
                s.far.into(),
                (s.numeric - s.far).into(),
            ]);
        }
        t
    }

    pub fn summary_table(&self) -> Table {
        let mut t = Table::new(SUMMARY_COLUMNS);
        let label = |m: usize| Field::from(self.models[m].label());
        for c in &self.centers {
            for (name, v) in [("avg_deviation", c.avg_deviation), ("amplitude", c.amplitude)] {
                t.push(vec![label(c.model), self.ell.into(), c.quantity.name().into(), name.into(), c.d.into(), v.into()]);
            }
        }
        for f in &self.fits {
            for (name, v) in [("exponent_avg_deviation", f.exponent_avg_deviation), ("exponent_amplitude", f.exponent_amplitude)] {
                t.push(vec![label(f.model), self.ell.into(), f.quantity.name().into(), name.into(), Field::Empty, v.into()]);
            }
        }
        t
    }

    pub fn fit_for(&self, model: usize, quantity: Quantity) -> Option<&DistanceFit> {
        self.fits.iter().find(|f| f.model == model && f.quantity == quantity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_cancels_both_harmonics() {
        let b = BiasState::new(2.0 * PI / 3.0, PI / 2.0).unwrap();
        let l = friedel_window(&b);
        assert_eq!(l, 6);
        let w = window_weights(l);
        assert!((w.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() < 1e-15);
        for k in [b.k_fl, b.k_fr] {
            for phase in [0.0, 0.3, 1.7] {
                let avg: f64 = w.iter().map(|(o, wt)| wt * (2.0 * k * (100 + o) as f64 + phase).cos()).sum();
                assert!(avg.abs() < 1e-12);
            }
        }
        let odd = window_weights(3);
        assert_eq!(odd.len(), 3);
        let irrational = BiasState::new(1.0, 0.9).unwrap();
        assert_eq!(friedel_window(&irrational), 3);
    }

    #[test]
    fn centers_are_log_spaced() {
        let c = log_centers(100.0, 2000.0, 8);
        assert_eq!(c.len(), 8);
        assert_eq!((c[0], c[7]), (100, 2000));
        let ratios: Vec<f64> = c.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
        assert!(ratios.iter().all(|r| (r - ratios[0]).abs() < 0.02));
    }
}
