//! Kernels from their endpoint-singular representations.

use ness_core::numerics::{integrate_real, QuadratureSpec};
use std::f64::consts::PI;

fn spec() -> QuadratureSpec {
    QuadratureSpec { abs_tol: 1e-14, rel_tol: 1e-13, max_panels: 50_000, nodes_per_panel: 16 }
}

fn weight(n: f64, x: f64, y: f64) -> f64 {
    (x.powf(n - 1.0) - y.powf(n - 1.0)) / (x.powf(n) + y.powf(n))
}

// ∫_a^b g(x, 1 - x, x - a, b - x) dx, with each half parametrized by its
// distance to the nearer endpoint so the singular factors stay exact.
fn integrate_unit<G: Fn(f64, f64, f64, f64) -> f64>(g: G, a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let h = 0.5 * (b - a);
    let lower = integrate_real(|u| g(a + u, 1.0 - a - u, u, (b - a) - u), 0.0, h, &spec()).unwrap();
    let upper = integrate_real(|v| g(b - v, (1.0 - b) + v, (b - a) - v, v), 0.0, h, &spec()).unwrap();
    lower + upper
}

pub fn q_first(n: f64, p: f64) -> f64 {
    let f = |x: f64, y: f64, from_p: f64, _: f64| weight(n, x, y) * (y / from_p).ln();
    n / (2.0 * PI * PI) * integrate_unit(f, p, 1.0)
}

pub fn q_tilde_first(n: f64, t: f64) -> f64 {
    let r = 1.0 - t;
    let f = |x: f64, y: f64, lo: f64, hi: f64| weight(n, x, y) * (lo / hi).ln();
    // ln|(R - x)/(T - x)| is ln(lo/hi) on [R, T] and ln(hi/lo) on [T, R]
    let cross = if t >= r { integrate_unit(f, r, t) } else { integrate_unit(f, t, r) };
    q_first(n, t) + q_first(n, r) + n / (2.0 * PI * PI) * cross
}
