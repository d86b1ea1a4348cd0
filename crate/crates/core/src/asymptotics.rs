//! Closed-form large-interval asymptotics of the entanglement measures.
//!
//! Kernels are evaluated from integral representations that are regular in
//! the interior of [0, 1], and memoized per (n, p).

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use crate::correlation::SubsystemGeometry;
use crate::entanglement::Order;
use crate::numerics::{integrate_real, xlogx, QuadratureSpec};
use crate::scattering::{reflection_unchecked, transmission_unchecked, BiasState, ScatteringModel};
use crate::{Error, Result};

const PI2: f64 = PI * PI;

fn kernel_spec() -> QuadratureSpec {
    QuadratureSpec { abs_tol: 1e-14, rel_tol: 1e-13, max_panels: 50_000, nodes_per_panel: 16 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kernel {
    Q,
    QTilde,
    QVn,
    QTildeVn,
    Q1,
}

type CacheKey = (Kernel, u64, u64);

fn cache() -> &'static RwLock<HashMap<CacheKey, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn memoized<F: FnOnce() -> Result<f64>>(kind: Kernel, n: f64, p: f64, compute: F) -> Result<f64> {
    let key = (kind, n.to_bits(), p.to_bits());
    if let Some(v) = cache().read().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(*v);
    }
    let v = compute()?;
    cache().write().unwrap_or_else(|e| e.into_inner()).insert(key, v);
    Ok(v)
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("probability {p} outside [0, 1]")))
    }
}

fn check_index(n: f64) -> Result<()> {
    if n > 0.0 && n.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("index n must be positive (got {n})")))
    }
}

/// Logarithmic kernel Q_n(p) for a shared Fermi-momentum discontinuity.
#[allow(non_snake_case)]
pub fn Q_n(n: f64, p: f64) -> Result<f64> {
    check_index(n)?;
    check_probability(p)?;
    memoized(Kernel::Q, n, p, || {
        let r = 1.0 - p;
        let norm = p.powf(n) + r.powf(n);
        let f = |x: f64| {
            let a = ((1.0 + p * x).powf(n) + (r * x).powf(n)).ln();
            let b = (((x + p).powf(n) + r.powf(n)) / norm).ln();
            (a + b) / (2.0 * PI2 * x)
        };
        Ok(-n / 12.0 + integrate_real(f, 0.0, 1.0, &kernel_spec())?)
    })
}

/// Logarithmic kernel Q̃_n(T, 1 - T) for separated discontinuities.
#[allow(non_snake_case)]
pub fn Q_tilde_n(n: f64, t: f64) -> Result<f64> {
    check_index(n)?;
    check_probability(t)?;
    memoized(Kernel::QTilde, n, t, || {
        let r = 1.0 - t;
        let f = |x: f64| {
            let d = (t + r * x).powf(n) + (r + t * x).powf(n);
            let a = ((1.0 + t * x).powf(n) + (r * x).powf(n)).ln() + ((1.0 + r * x).powf(n) + (t * x).powf(n)).ln();
            let b = (((x + t).powf(n) + r.powf(n)) / d).ln() + (((x + r).powf(n) + t.powf(n)) / d).ln();
            (a + b) / (2.0 * PI2 * x)
        };
        Ok(-n / 12.0 + integrate_real(f, 0.0, 1.0, &kernel_spec())?)
    })
}

/// Von Neumann kernel q(T) multiplying the mirror-overlap logarithm.
pub fn q_vn(t: f64) -> Result<f64> {
    check_probability(t)?;
    memoized(Kernel::QVn, 1.0, t, || {
        let r = 1.0 - t;
        let f1 = |x: f64| ((1.0 + r * x) * (r * x).ln_1p() + (1.0 + t * x) * (t * x).ln_1p()) / ((1.0 + x) * 2.0 * PI2 * x);
        let f2 = |x: f64| (xlogx(t) + xlogx(r) - (xlogx(r + x) + xlogx(t + x)) / (1.0 + x)) / (2.0 * PI2 * x);
        let s = kernel_spec();
        Ok(1.0 / 24.0 - integrate_real(f1, 0.0, 1.0, &s)? + integrate_real(f2, 0.0, 1.0, &s)?)
    })
}

/// Von Neumann kernel q̃(T) multiplying the separated-endpoint logarithm.
pub fn q_tilde_vn(t: f64) -> Result<f64> {
    check_probability(t)?;
    let base = q_vn(t)?;
    memoized(Kernel::QTildeVn, 1.0, t, || {
        let r = 1.0 - t;
        let f = |x: f64| ((xlogx(r + t * x) + xlogx(t + r * x)) / (1.0 + x) - xlogx(t) - xlogx(r)) / (PI2 * x);
        Ok(base + 1.0 / 12.0 + integrate_real(f, 0.0, 1.0, &kernel_spec())?)
    })
}

/// lim_{n→1} Q_n(p) / (1 - n), the per-discontinuity von Neumann kernel.
pub fn q1_vn(p: f64) -> Result<f64> {
    check_probability(p)?;
    if p == 1.0 {
        return Ok(0.0);
    }
    memoized(Kernel::Q1, 1.0, p, || {
        let f = |x: f64| ((1.0 - x) / x).ln() * ((1.0 - x) / (x - p)).ln() / (2.0 * PI2);
        integrate_real(f, p, 1.0, &kernel_spec())
    })
}

/// Leading coefficient of S_A^{(n)} ~ c ln ℓ for two mirrored intervals.
pub fn disjoint_symmetric_log(n: f64) -> Result<f64> {
    check_index(n)?;
    Ok((1.0 + n) / (3.0 * n))
}

/// Linear term, logarithmic term and the kernel values that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticPrediction {
    pub linear_term: f64,
    pub log_term: f64,
    pub total_minus_constant: f64,
    pub kernel_values: BTreeMap<String, f64>,
}

impl AsymptoticPrediction {
    fn new(linear_term: f64, log_term: f64, kernel_values: BTreeMap<String, f64>) -> AsymptoticPrediction {
        AsymptoticPrediction { linear_term, log_term, total_minus_constant: linear_term + log_term, kernel_values }
    }
}

// Per-momentum density ln(T^n + R^n)/(1-n), or the binary entropy for vN.
fn entropy_density(order: Order, t: f64, r: f64) -> f64 {
    match order {
        Order::Renyi(n) => (t.powf(n) + r.powf(n)).ln() / (1.0 - n),
        Order::VonNeumann => -xlogx(t) - xlogx(r),
    }
}

fn window_integral<F: Fn(f64, f64) -> f64>(
    model: &ScatteringModel,
    bias: &BiasState,
    spec: &QuadratureSpec,
    density: F,
) -> Result<f64> {
    let f = |k: f64| density(transmission_unchecked(model, k), reflection_unchecked(model, k));
    integrate_real(f, bias.k_minus(), bias.k_plus(), spec)
}

/// MI volume-law coefficient per mirror pair: ∫ dk/π over the window.
pub fn volume_coefficient_mi(model: &ScatteringModel, bias: &BiasState, order: Order, spec: &QuadratureSpec) -> Result<f64> {
    let order = order.validated()?;
    Ok(window_integral(model, bias, spec, |t, r| entropy_density(order, t, r))? / PI)
}

/// Entropy volume-law coefficient per site: ∫ dk/2π over the window.
///
/// Multiplies ℓ_i for a single interval and Δℓ_L + Δℓ_R for their union.
pub fn volume_coefficient_entropy(
    model: &ScatteringModel,
    bias: &BiasState,
    order: Order,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(0.5 * volume_coefficient_mi(model, bias, order, spec)?)
}

/// Negativity volume-law coefficient per mirror pair.
pub fn volume_coefficient_negativity(model: &ScatteringModel, bias: &BiasState, spec: &QuadratureSpec) -> Result<f64> {
    Ok(window_integral(model, bias, spec, |t, r| (t.sqrt() + r.sqrt()).ln())? / PI)
}

// ln|num / den| with vanishing denominator factors left out.
fn log_ratio(num: i64, dens: [i64; 2]) -> f64 {
    let mut v = (num as f64).abs().ln();
    for d in dens {
        if d != 0 {
            v -= (d as f64).abs().ln();
        }
    }
    v
}

/// The two geometric logarithms multiplying Q̃ and Q in the MI asymptotics.
pub fn geometric_logs(geom: &SubsystemGeometry) -> (f64, f64) {
    let [m1, m2, m3, m4] = geom.sorted_ends();
    let num = (m3 - m1) * (m4 - m2);
    let SubsystemGeometry { d_l, ell_l, d_r, ell_r, .. } = *geom;
    let separated = log_ratio(num, [ell_r + d_r - d_l, ell_l + d_l - d_r]);
    let shared = log_ratio(num, [ell_l + d_l - ell_r - d_r, d_l - d_r]);
    (separated, shared)
}

fn check_geometry(geom: &SubsystemGeometry) -> Result<()> {
    if geom.ell_l < 1 || geom.ell_r < 1 {
        return Err(Error::Geometry(format!("interval lengths must be >= 1 (got {}, {})", geom.ell_l, geom.ell_r)));
    }
    Ok(())
}

fn fermi_points(model: &ScatteringModel, bias: &BiasState) -> [(&'static str, f64, f64); 2] {
    // Coincident jumps fill both channels, so the scatterer drops out.
    if bias.k_fl == bias.k_fr {
        return [("k_FL", 1.0, 0.0), ("k_FR", 1.0, 0.0)];
    }
    [
        ("k_FL", transmission_unchecked(model, bias.k_fl), reflection_unchecked(model, bias.k_fl)),
        ("k_FR", transmission_unchecked(model, bias.k_fr), reflection_unchecked(model, bias.k_fr)),
    ]
}

/// Mutual information asymptotics for d_i ≫ ℓ_i with d_L − d_R fixed.
pub fn mi_prediction(
    model: &ScatteringModel,
    bias: &BiasState,
    geom: &SubsystemGeometry,
    order: Order,
    spec: &QuadratureSpec,
) -> Result<AsymptoticPrediction> {
    check_geometry(geom)?;
    let order = order.validated()?;
    let linear = volume_coefficient_mi(model, bias, order, spec)? * geom.ell_mirror() as f64;
    let (sep, shared) = geometric_logs(geom);
    let mut kernels = BTreeMap::new();
    let mut sum = 0.0;
    for (tag, t, r) in fermi_points(model, bias) {
        match order {
            Order::Renyi(n) => {
                let qt = Q_tilde_n(n, t)?;
                let qs = Q_n(n, t)? + Q_n(n, r)? - (1.0 / n - n) / 12.0;
                kernels.insert(format!("Q_tilde({tag})"), qt);
                kernels.insert(format!("Q_sum({tag})"), qs);
                sum += qt * sep + qs * shared;
            }
            Order::VonNeumann => {
                let qt = q_tilde_vn(t)?;
                let qs = q_vn(t)?;
                kernels.insert(format!("q_tilde({tag})"), qt);
                kernels.insert(format!("q({tag})"), qs);
                sum += qt * sep + qs * shared;
            }
        }
    }
    let log = match order {
        Order::Renyi(n) => sum / (2.0 * (1.0 - n)),
        Order::VonNeumann => 0.5 * sum,
    };
    Ok(AsymptoticPrediction::new(linear, log, kernels))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Entropy asymptotics of a single interval of length `ell` on one side.
pub fn contiguous_entropy_prediction(
    model: &ScatteringModel,
    bias: &BiasState,
    ell: i64,
    side: Side,
    order: Order,
    spec: &QuadratureSpec,
) -> Result<AsymptoticPrediction> {
    if ell < 1 {
        return Err(Error::Geometry(format!("interval length must be >= 1 (got {ell})")));
    }
    let order = order.validated()?;
    let linear = volume_coefficient_entropy(model, bias, order, spec)? * ell as f64;
    let [(_, t_l, r_l), (_, t_r, r_r)] = fermi_points(model, bias);
    let (t_own, r_other) = match side {
        Side::Left => (t_l, r_r),
        Side::Right => (t_r, r_l),
    };
    let ln_ell = (ell as f64).ln();
    let mut kernels = BTreeMap::new();
    let log = match order {
        Order::Renyi(n) => {
            let a = Q_n(n, t_own)?;
            let b = Q_n(n, r_other)?;
            kernels.insert("Q(T_own)".to_string(), a);
            kernels.insert("Q(R_other)".to_string(), b);
            (1.0 + n) / (12.0 * n) * ln_ell + ln_ell * (a + b) / (1.0 - n)
        }
        Order::VonNeumann => {
            let a = q1_vn(t_own)?;
            let b = q1_vn(r_other)?;
            kernels.insert("q1(T_own)".to_string(), a);
            kernels.insert("q1(R_other)".to_string(), b);
            ln_ell / 6.0 + ln_ell * (a + b)
        }
    };
    Ok(AsymptoticPrediction::new(linear, log, kernels))
}

/// S_A asymptotics for two mirrored intervals (d_L = d_R, ℓ_L = ℓ_R).
pub fn disjoint_symmetric_entropy_prediction(geom: &SubsystemGeometry, order: Order) -> Result<AsymptoticPrediction> {
    if !geom.is_symmetric() {
        return Err(Error::Geometry("S_A asymptotics require d_L = d_R and ell_L = ell_R".into()));
    }
    let order = order.validated()?;
    let c = disjoint_symmetric_log(order.index())?;
    let mut kernels = BTreeMap::new();
    kernels.insert("log_coefficient".to_string(), c);
    Ok(AsymptoticPrediction::new(0.0, c * (geom.ell_l as f64).ln(), kernels))
}

/// Coherent information I(A_L⟩A_R) = S_AR − S_A, von Neumann.
pub fn ci_prediction(
    model: &ScatteringModel,
    bias: &BiasState,
    geom: &SubsystemGeometry,
    spec: &QuadratureSpec,
) -> Result<AsymptoticPrediction> {
    check_geometry(geom)?;
    let density = volume_coefficient_entropy(model, bias, Order::VonNeumann, spec)?;
    let linear = (geom.ell_mirror() - geom.delta_ell_l()) as f64 * density;
    let mi = mi_prediction(model, bias, geom, Order::VonNeumann, spec)?;
    let sl = contiguous_entropy_prediction(model, bias, geom.ell_l, Side::Left, Order::VonNeumann, spec)?;
    let mut kernels = mi.kernel_values.clone();
    kernels.extend(sl.kernel_values.iter().map(|(k, v)| (format!("S_AL:{k}"), *v)));
    Ok(AsymptoticPrediction::new(linear, mi.log_term - sl.log_term, kernels))
}

/// Negativity asymptotics; the log term is available for mirrored intervals.
pub fn negativity_prediction(
    model: &ScatteringModel,
    bias: &BiasState,
    geom: &SubsystemGeometry,
    spec: &QuadratureSpec,
) -> Result<AsymptoticPrediction> {
    check_geometry(geom)?;
    if !geom.is_symmetric() {
        return Err(Error::Geometry("negativity log term is only known for d_L = d_R and ell_L = ell_R".into()));
    }
    let linear = volume_coefficient_negativity(model, bias, spec)? * geom.ell_mirror() as f64;
    let mut kernels = BTreeMap::new();
    let mut sum = 0.0;
    for (tag, t, r) in fermi_points(model, bias) {
        let v = Q_n(0.5, t)? + Q_n(0.5, r)?;
        kernels.insert(format!("Q_half_sum({tag})"), v);
        sum += v;
    }
    let log = (sum - 0.25) * (geom.ell_l as f64).ln();
    Ok(AsymptoticPrediction::new(linear, log, kernels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    // First representation of Q_n, singular at both endpoints.
    fn q_first(n: f64, p: f64) -> f64 {
        if p >= 1.0 {
            return 0.0;
        }
        // x and y = 1 - x as independent coordinates on each half of the interval
        let g = |x: f64, y: f64| (x.powf(n - 1.0) - y.powf(n - 1.0)) / (x.powf(n) + y.powf(n)) * (y / (x - p)).ln();
        let mid = 0.5 * (1.0 + p);
        let lower = integrate_real(|x| g(x, 1.0 - x), p, mid, &kernel_spec()).unwrap();
        let upper = integrate_real(|y| g(1.0 - y, y), 0.0, 1.0 - mid, &kernel_spec()).unwrap();
        n / (2.0 * PI2) * (lower + upper)
    }

    #[test]
    fn q_dual_representation() {
        for n in [0.5, 2.0, 3.0] {
            for p in [0.0, 0.25, 0.5, 0.9] {
                let a = Q_n(n, p).unwrap();
                let b = q_first(n, p);
                assert!((a - b).abs() < 1e-8, "n={n} p={p}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn q_special_values() {
        for p in [0.0, 0.3, 0.7, 1.0] {
            assert!(Q_n(1.0, p).unwrap().abs() < 1e-10);
        }
        for n in [2.0, 3.0] {
            assert!(Q_n(n, 1.0).unwrap().abs() < 1e-9);
        }
        for n in [0.5, 2.0, 3.0] {
            assert!((Q_n(n, 0.0).unwrap() - (1.0 / n - n) / 12.0).abs() < 1e-9);
        }
        assert!(Q_n(2.0, 1.5).is_err());
        assert!(Q_n(-1.0, 0.5).is_err());
    }

    #[test]
    fn q_tilde_symmetry() {
        for n in [0.5, 2.0] {
            for i in 1..10 {
                let t = i as f64 / 10.0;
                assert!((Q_tilde_n(n, t).unwrap() - Q_tilde_n(n, 1.0 - t).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn vn_kernels_are_limits() {
        let h = 1e-4;
        for t in [0.0, 0.2, 0.5, 0.8] {
            let r = 1.0 - t;
            let f = |n: f64| (Q_n(n, t).unwrap() + Q_n(n, r).unwrap() - (1.0 / n - n) / 12.0) / (1.0 - n);
            let lim = 0.5 * (f(1.0 + h) + f(1.0 - h));
            let q = q_vn(t).unwrap();
            assert!((lim - q).abs() < 1e-3 * q.abs().max(1e-2), "q({t}): {q} vs {lim}");
            let g = |n: f64| Q_tilde_n(n, t).unwrap() / (1.0 - n);
            let lim = 0.5 * (g(1.0 + h) + g(1.0 - h));
            let qt = q_tilde_vn(t).unwrap();
            assert!((lim - qt).abs() < 1e-3 * qt.abs().max(1e-2), "q~({t}): {qt} vs {lim}");
            let single = |n: f64| Q_n(n, t).unwrap() / (1.0 - n);
            let lim = 0.5 * (single(1.0 + h) + single(1.0 - h));
            assert!((lim - q1_vn(t).unwrap()).abs() < 1e-6);
            assert!((q - (q1_vn(t).unwrap() + q1_vn(r).unwrap() - 1.0 / 6.0)).abs() < 1e-10);
        }
        assert!((q1_vn(0.0).unwrap() - 1.0 / 6.0).abs() < 1e-10);
        for t in [0.1, 0.35] {
            assert!((q_vn(t).unwrap() - q_vn(1.0 - t).unwrap()).abs() < 1e-10);
            assert!((q_tilde_vn(t).unwrap() - q_tilde_vn(1.0 - t).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn symmetric_log_coefficients() {
        assert!((disjoint_symmetric_log(1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((disjoint_symmetric_log(2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((disjoint_symmetric_log(3.0).unwrap() - 4.0 / 9.0).abs() < 1e-15);
    }

    fn pi_bias() -> BiasState {
        BiasState::new(2.0 * PI / 3.0, PI / 2.0).unwrap()
    }

    #[test]
    fn volume_coefficients_closed_forms() {
        let half = ScatteringModel::constant_t(0.5).unwrap();
        let b = pi_bias();
        let vn = volume_coefficient_mi(&half, &b, Order::VonNeumann, &spec()).unwrap();
        assert!((vn - LN_2 / 6.0).abs() < 1e-13);
        let r_half = volume_coefficient_mi(&half, &b, Order::Renyi(0.5), &spec()).unwrap();
        assert!((r_half - LN_2 / 6.0).abs() < 1e-13);
        let neg = volume_coefficient_negativity(&half, &b, &spec()).unwrap();
        assert!((2.0 * neg - r_half).abs() < 1e-13);
        let s2 = volume_coefficient_entropy(&half, &b, Order::Renyi(2.0), &spec()).unwrap();
        assert!((s2 - (PI / 6.0) / (2.0 * PI) * LN_2).abs() < 1e-13);
        for o in [Order::VonNeumann, Order::Renyi(2.0)] {
            assert_eq!(volume_coefficient_mi(&ScatteringModel::Trivial, &b, o, &spec()).unwrap(), 0.0);
        }
    }

    #[test]
    fn symmetric_mi_two_paths() {
        let model = ScatteringModel::single_impurity(1.0, 1.0).unwrap();
        let b = pi_bias();
        for n in [0.5, 2.0, 3.0] {
            for ell in [20i64, 137] {
                let g = SubsystemGeometry::symmetric(10_000, ell).unwrap();
                let p = mi_prediction(&model, &b, &g, Order::Renyi(n), &spec()).unwrap();
                let mut total = 0.0;
                for k in [b.k_fl, b.k_fr] {
                    let t = transmission_unchecked(&model, k);
                    total += Q_n(n, t).unwrap() + Q_n(n, 1.0 - t).unwrap();
                }
                let coeff = total / (1.0 - n) - (1.0 + n) / (6.0 * n);
                assert!((p.log_term - coeff * (ell as f64).ln()).abs() < 1e-10);
                let sl = contiguous_entropy_prediction(&model, &b, ell, Side::Left, Order::Renyi(n), &spec()).unwrap();
                let sr = contiguous_entropy_prediction(&model, &b, ell, Side::Right, Order::Renyi(n), &spec()).unwrap();
                let sa = disjoint_symmetric_entropy_prediction(&g, Order::Renyi(n)).unwrap();
                let assembled = sl.total_minus_constant + sr.total_minus_constant - sa.total_minus_constant;
                assert!((assembled - p.total_minus_constant).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn touching_intervals() {
        let model = ScatteringModel::single_impurity(2.0, 1.0).unwrap();
        let b = pi_bias();
        let (ell_l, ell_r) = (30i64, 70i64);
        let g = SubsystemGeometry::new(0, 1000 + ell_r, ell_l, 1000, ell_r).unwrap();
        let p = mi_prediction(&model, &b, &g, Order::Renyi(2.0), &spec()).unwrap();
        assert_eq!(p.linear_term, 0.0);
        let mut qt = 0.0;
        for k in [b.k_fl, b.k_fr] {
            qt += Q_tilde_n(2.0, transmission_unchecked(&model, k)).unwrap();
        }
        let want = qt / (2.0 * (1.0 - 2.0)) * ((ell_l * ell_r) as f64 / (ell_l + ell_r) as f64).ln();
        assert!((p.log_term - want).abs() < 1e-12);
    }

    #[test]
    fn relabeling_invariance() {
        let model = ScatteringModel::single_impurity(0.8, 1.0).unwrap();
        let b = pi_bias();
        let swapped = BiasState::new(b.k_fr, b.k_fl).unwrap();
        for (dl, ll, dr, lr) in [(500, 40, 470, 90), (500, 100, 520, 30), (600, 20, 500, 50)] {
            let g = SubsystemGeometry::new(0, dl, ll, dr, lr).unwrap();
            let h = SubsystemGeometry::new(0, dr, lr, dl, ll).unwrap();
            for o in [Order::VonNeumann, Order::Renyi(2.0)] {
                let a = mi_prediction(&model, &b, &g, o, &spec()).unwrap();
                let c = mi_prediction(&model, &swapped, &h, o, &spec()).unwrap();
                assert!((a.log_term - c.log_term).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn renyi_predictions_bracket_vn() {
        let model = ScatteringModel::single_impurity(1.0, 1.0).unwrap();
        let b = pi_bias();
        let g = SubsystemGeometry::new(0, 500, 60, 480, 90).unwrap();
        let vn = mi_prediction(&model, &b, &g, Order::VonNeumann, &spec()).unwrap().total_minus_constant;
        for n in [1.0 + 1e-4, 1.0 - 1e-4] {
            let r = mi_prediction(&model, &b, &g, Order::Renyi(n), &spec()).unwrap().total_minus_constant;
            assert!((r - vn).abs() < 1e-3 * vn.abs());
        }
        for side in [Side::Left, Side::Right] {
            let vn = contiguous_entropy_prediction(&model, &b, 80, side, Order::VonNeumann, &spec()).unwrap();
            let r = contiguous_entropy_prediction(&model, &b, 80, side, Order::Renyi(1.0 + 1e-4), &spec()).unwrap();
            assert!((r.total_minus_constant - vn.total_minus_constant).abs() < 1e-3 * vn.total_minus_constant.abs());
        }
    }

    #[test]
    fn trivial_model_predictions() {
        let b = pi_bias();
        let triv = ScatteringModel::Trivial;
        let g = SubsystemGeometry::symmetric(1000, 50).unwrap();
        let ci = ci_prediction(&triv, &b, &g, &spec()).unwrap();
        assert_eq!(ci.linear_term, 0.0);
        assert!((ci.log_term + 50f64.ln() / 3.0).abs() < 1e-9);
        let neg = negativity_prediction(&triv, &b, &g, &spec()).unwrap();
        assert!(neg.total_minus_constant.abs() < 1e-10);
        let mi = mi_prediction(&triv, &b, &g, Order::VonNeumann, &spec()).unwrap();
        assert!(mi.total_minus_constant.abs() < 1e-10);
        let s = contiguous_entropy_prediction(&triv, &b, 50, Side::Left, Order::Renyi(2.0), &spec()).unwrap();
        assert_eq!(s.linear_term, 0.0);
        assert!((s.log_term - 2.0 * 3.0 / 24.0 * 50f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn ci_and_negativity_assembly() {
        let model = ScatteringModel::single_impurity(1.0, 1.0).unwrap();
        let b = pi_bias();
        let g = SubsystemGeometry::symmetric(5000, 80).unwrap();
        let ci = ci_prediction(&model, &b, &g, &spec()).unwrap();
        let mi = mi_prediction(&model, &b, &g, Order::VonNeumann, &spec()).unwrap();
        let sl = contiguous_entropy_prediction(&model, &b, 80, Side::Left, Order::VonNeumann, &spec()).unwrap();
        assert!((ci.total_minus_constant - (mi.total_minus_constant - sl.total_minus_constant)).abs() < 1e-10);
        let neg = negativity_prediction(&model, &b, &g, &spec()).unwrap();
        let half = mi_prediction(&model, &b, &g, Order::Renyi(0.5), &spec()).unwrap();
        assert!((neg.linear_term - 0.5 * half.linear_term).abs() < 1e-12);
        let asym = SubsystemGeometry::new(0, 5000, 80, 4990, 80).unwrap();
        assert!(matches!(negativity_prediction(&model, &b, &asym, &spec()), Err(Error::Geometry(_))));
        let ct = ScatteringModel::constant_t(0.5).unwrap();
        let ci = ci_prediction(&ct, &b, &g, &spec()).unwrap();
        assert!((ci.linear_term / 80.0 - LN_2 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn zero_window_has_no_volume_term() {
        let model = ScatteringModel::single_impurity(1.0, 1.0).unwrap();
        let b = BiasState::new(1.2, 1.2).unwrap();
        let g = SubsystemGeometry::new(0, 300, 50, 310, 60).unwrap();
        assert_eq!(mi_prediction(&model, &b, &g, Order::VonNeumann, &spec()).unwrap().linear_term, 0.0);
    }

    #[test]
    fn zero_window_matches_transparent_chain() {
        let model = ScatteringModel::single_impurity(1.0, 1.0).unwrap();
        let b = BiasState::new(1.2, 1.2).unwrap();
        let g = SubsystemGeometry::new(0, 5000, 40, 5000, 40).unwrap();
        let mi = mi_prediction(&model, &b, &g, Order::Renyi(2.0), &spec()).unwrap();
        assert!(mi.total_minus_constant.abs() < 1e-12);
        let ci = ci_prediction(&model, &b, &g, &spec()).unwrap();
        assert!((ci.log_term + 40f64.ln() / 3.0).abs() < 1e-9);
        let neg = negativity_prediction(&model, &b, &g, &spec()).unwrap();
        assert!(neg.total_minus_constant.abs() < 1e-12);
    }
}
