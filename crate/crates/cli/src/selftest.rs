//! Quick invariant suite behind the `selftest` scenario.

use std::f64::consts::{LN_2, PI};

use ness_core::asymptotics::{mi_prediction, q_vn, volume_coefficient_mi, Q_n, Q_tilde_n};
use ness_core::correlation::{
    correlation_entry_finite, correlation_matrix_far, correlation_matrix_finite, CorrelationMatrix, Regime, Subsystem,
    SubsystemGeometry,
};
use ness_core::entanglement::{gamma_pm, measures, renyi_entropy, report, Order};
use ness_core::numerics::{determinant, mat_mul, ComplexMatrix, QuadratureSpec};
use ness_core::scattering::{s_matrix, BiasState, ScatteringModel};
use ness_core::Complex64;

use crate::output::Table;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = ness_core::Result<(bool, String)>;

fn models() -> Vec<ScatteringModel> {
    vec![
        ScatteringModel::SingleImpurity { epsilon0: 1.0, eta: 1.0 },
        ScatteringModel::SingleImpurity { epsilon0: 0.3, eta: 2.0 },
        ScatteringModel::ConstantT { transmission: 0.37 },
        ScatteringModel::Trivial,
    ]
}

fn bias() -> BiasState {
    BiasState { k_fl: 2.0 * PI / 3.0, k_fr: PI / 2.0 }
}

fn within(value: f64, tol: f64) -> (bool, String) {
    (value < tol, format!("{value:.3e} (tol {tol:.0e})"))
}

fn unitarity() -> Outcome {
    let mut worst = 0.0f64;
    for m in models() {
        for i in 1..1000 {
            let k = PI * i as f64 / 1000.0;
            let s = s_matrix(&m, k)?;
            worst = worst.max(s.unitarity_defect());
            worst = worst.max((s.t_l * s.r_l.conj() + s.t_r.conj() * s.r_r).norm());
        }
    }
    Ok(within(worst, 1e-12))
}

fn kernel_identities() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..=10 {
        let p = i as f64 / 10.0;
        worst = worst.max(Q_n(1.0, p)?.abs());
        for n in [0.5, 2.0, 3.0] {
            worst = worst.max((Q_tilde_n(n, p)? - Q_tilde_n(n, 1.0 - p)?).abs());
        }
    }
    for n in [2.0, 3.0] {
        worst = worst.max(Q_n(n, 1.0)?.abs());
    }
    Ok(within(worst, 1e-9))
}

fn vn_limit() -> Outcome {
    let mut worst = 0.0f64;
    let h = 1e-4;
    for t in [0.2, 0.5, 0.8] {
        let f = |n: f64| -> ness_core::Result<f64> { Ok((Q_n(n, t)? + Q_n(n, 1.0 - t)? - (1.0 / n - n) / 12.0) / (1.0 - n)) };
        let lim = 0.5 * (f(1.0 + h)? + f(1.0 - h)?);
        let q = q_vn(t)?;
        worst = worst.max(((lim - q) / q).abs());
    }
    Ok(within(worst, 1e-3))
}

fn bell_pair() -> Outcome {
    let half = Complex64::new(0.5, 0.0);
    let m = ComplexMatrix::from_fn(2, |_, _| half).with_hermitian_hint(true);
    let c = CorrelationMatrix::from_blocks(m, 1, Regime::FarLimit)?;
    let r = report(&c, Order::VonNeumann, true)?;
    let err = (r.mutual_info - 2.0 * LN_2)
        .abs()
        .max((r.coherent_info - LN_2).abs())
        .max((r.negativity.unwrap_or(f64::NAN) - LN_2).abs());
    Ok(within(err, 1e-10))
}

fn far_matrix_structure() -> Outcome {
    let spec = QuadratureSpec::default();
    let geom = SubsystemGeometry::new(0, 40, 7, 35, 9)?;
    let mut toeplitz = 0.0f64;
    for m in models() {
        let c = correlation_matrix_far(&m, &bias(), &geom, Subsystem::Both, &spec)?;
        c.check_invariants()?;
        let nl = c.n_left();
        for a in 1..c.dim() {
            for b in 1..c.dim() {
                if (a < nl) == (a - 1 < nl) && (b < nl) == (b - 1 < nl) {
                    toeplitz = toeplitz.max((c.matrix[(a, b)] - c.matrix[(a - 1, b - 1)]).norm());
                }
            }
        }
    }
    Ok(within(toeplitz, 1e-12))
}

fn zero_window() -> Outcome {
    let spec = QuadratureSpec::default();
    let geom = SubsystemGeometry::new(0, 12, 5, 10, 6)?;
    let b = BiasState::new(1.1, 1.1)?;
    let c = correlation_matrix_far(&models()[0], &b, &geom, Subsystem::Both, &spec)?;
    let nl = c.n_left();
    let mut worst = 0.0f64;
    for a in 0..nl {
        for j in nl..c.dim() {
            worst = worst.max(c.matrix[(a, j)].norm());
        }
    }
    Ok((worst == 0.0, format!("{worst:.3e}")))
}

fn gamma_and_moments() -> Outcome {
    let spec = QuadratureSpec::default();
    let geom = SubsystemGeometry::symmetric(20, 6)?;
    let c = correlation_matrix_far(&models()[0], &bias(), &geom, Subsystem::Both, &spec)?;
    let (gp, gm) = gamma_pm(&c);
    let adj = gp.adjoint().sub(&gm).max_abs();
    let n = c.dim();
    let rest = ComplexMatrix::identity(n).sub(&c.matrix);
    let sum = mat_mul(&c.matrix, &c.matrix).add(&mat_mul(&rest, &rest));
    let moment = (renyi_entropy(&c.matrix, 2.0)? + determinant(&sum).ln().re).abs();
    Ok((adj < 1e-12 && moment < 1e-9, format!("adjoint {adj:.3e}, moment {moment:.3e}")))
}

fn finite_entries() -> Outcome {
    let spec = QuadratureSpec::default();
    let geom = SubsystemGeometry::new(0, 15, 3, 12, 4)?;
    let model = models()[0];
    let c = correlation_matrix_finite(&model, &bias(), &geom, Subsystem::Both, &spec)?;
    let sites: Vec<i64> = c.left_sites.iter().chain(&c.right_sites).copied().collect();
    let mut worst = 0.0f64;
    for (a, &j) in sites.iter().enumerate() {
        for (b, &m) in sites.iter().enumerate() {
            worst = worst.max((c.matrix[(a, b)] - correlation_entry_finite(&model, &bias(), j, m, &spec)?).norm());
        }
    }
    Ok(within(worst, 1e-11))
}

fn relabeling() -> Outcome {
    let spec = QuadratureSpec::default();
    let model = models()[0];
    let g = SubsystemGeometry::new(0, 520, 60, 480, 110)?;
    let h = SubsystemGeometry::new(0, 480, 110, 520, 60)?;
    let swapped = BiasState::new(bias().k_fr, bias().k_fl)?;
    let a = mi_prediction(&model, &bias(), &g, Order::Renyi(2.0), &spec)?;
    let b = mi_prediction(&model, &swapped, &h, Order::Renyi(2.0), &spec)?;
    Ok(within((a.log_term - b.log_term).abs(), 1e-10))
}

fn renyi_continuity() -> Outcome {
    let spec = QuadratureSpec::default();
    let geom = SubsystemGeometry::symmetric(100, 12)?;
    let c = correlation_matrix_far(&models()[1], &bias(), &geom, Subsystem::Both, &spec)?;
    let vn = measures(&c, Order::VonNeumann)?.mutual_info;
    let mut worst = 0.0f64;
    for n in [1.0 + 1e-4, 1.0 - 1e-4] {
        worst = worst.max((measures(&c, Order::Renyi(n))?.mutual_info - vn).abs() / (1.0 + vn.abs()));
    }
    Ok(within(worst, 1e-3))
}

fn volume_closed_form() -> Outcome {
    let spec = QuadratureSpec::default();
    let v = volume_coefficient_mi(&ScatteringModel::ConstantT { transmission: 0.5 }, &bias(), Order::VonNeumann, &spec)?;
    Ok(within((v - LN_2 / 6.0).abs(), 1e-12))
}

type Named = (&'static str, fn() -> Outcome);

pub fn run_selftest() -> Vec<Check> {
    let checks: [Named; 11] = [
        ("scattering_unitarity", unitarity),
        ("kernel_identities", kernel_identities),
        ("von_neumann_kernel_limit", vn_limit),
        ("bell_pair_measures", bell_pair),
        ("far_limit_structure", far_matrix_structure),
        ("zero_window_cross_block", zero_window),
        ("gamma_adjoint_and_moments", gamma_and_moments),
        ("finite_grid_vs_entries", finite_entries),
        ("prediction_relabeling", relabeling),
        ("renyi_continuity", renyi_continuity),
        ("volume_coefficient_closed_form", volume_closed_form),
    ];
    checks
        .iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => Check { name, passed, detail },
            Err(e) => Check { name, passed: false, detail: format!("{}: {e}", e.kind()) },
        })
        .collect()
}

pub fn checks_table(checks: &[Check]) -> Table {
    let mut t = Table::new(&["property", "status", "detail"]);
    for c in checks {
        t.push(vec![c.name.into(), if c.passed { "PASS" } else { "FAIL" }.into(), c.detail.clone().into()]);
    }
    t
}
