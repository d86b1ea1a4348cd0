use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerances and budget for adaptive panel quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
    pub nodes_per_panel: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-13, rel_tol: 1e-12, max_panels: 20_000, nodes_per_panel: 16 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol >= 0.0) {
            return Err(Error::Domain(format!(
                "tolerances must satisfy abs_tol > 0, rel_tol >= 0 (got {}, {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.nodes_per_panel < 4 || self.max_panels < 1 {
            return Err(Error::Domain(format!(
                "need nodes_per_panel >= 4 and max_panels >= 1 (got {}, {})",
                self.nodes_per_panel, self.max_panels
            )));
        }
        Ok(())
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_n starting from the Chebyshev-like guess.
    pub fn compute(n: usize) -> GaussLegendre {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared rule of order `n`, computed once per process.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static TABLE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let table = TABLE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = table.lock().unwrap_or_else(|e| e.into_inner());
        guard.entry(n).or_insert_with(|| Arc::new(GaussLegendre::compute(n))).clone()
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn apply<F: Fn(f64) -> Complex64>(&self, f: &F, a: f64, b: f64) -> Complex64 {
        self.mapped(a, b).map(|(x, w)| f(x) * w).sum()
    }
}

// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    left: Complex64,
    right: Complex64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn make_panel<F: Fn(f64) -> Complex64>(
    rule: &GaussLegendre,
    f: &F,
    a: f64,
    b: f64,
    coarse: Complex64,
) -> Panel {
    let mid = 0.5 * (a + b);
    let left = rule.apply(f, a, mid);
    let right = rule.apply(f, mid, b);
    let value = left + right;
    Panel { a, b, value, error: (value - coarse).norm(), left, right }
}

fn adaptive<F: Fn(f64) -> Complex64>(f: &F, breaks: &[f64], spec: &QuadratureSpec) -> Result<Complex64> {
    spec.validate()?;
    let rule = GaussLegendre::cached(spec.nodes_per_panel);
    let mut heap = BinaryHeap::with_capacity(2 * breaks.len());
    for w in breaks.windows(2) {
        let coarse = rule.apply(f, w[0], w[1]);
        heap.push(make_panel(&rule, f, w[0], w[1], coarse));
    }
    let mut count = heap.len();
    let mut value: Complex64 = heap.iter().map(|p| p.value).sum();
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    loop {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Domain("integrand is not finite on the interval".into()));
        }
        if error <= spec.target(value) {
            // Sum in position order so the result does not depend on heap layout.
            let mut panels = heap.into_vec();
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if count + 1 > spec.max_panels || !(worst.a < mid && mid < worst.b) {
            return Err(Error::NonConvergence {
                a: breaks[0],
                b: breaks[breaks.len() - 1],
                estimate: error,
                panels: count,
            });
        }
        let left = make_panel(&rule, f, worst.a, mid, worst.left);
        let right = make_panel(&rule, f, mid, worst.b, worst.right);
        value += left.value + right.value - worst.value;
        error = (error + left.error + right.error - worst.error).max(0.0);
        heap.push(left);
        heap.push(right);
        count += 1;
        if count % 256 == 0 {
            error = heap.iter().map(|p| p.error).sum();
        }
    }
}

/// Adaptive Gauss-Legendre quadrature of a complex-valued integrand.
///
/// The initial mesh is graded geometrically toward both endpoints so that
/// integrable logarithmic and power-law endpoint singularities converge.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    if !(a <= b) {
        return Err(Error::Domain(format!("integration bounds must satisfy a <= b (got {a}, {b})")));
    }
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    const GRADING: i32 = 6;
    let h = b - a;
    let mut breaks = Vec::with_capacity(2 * GRADING as usize + 2);
    breaks.push(a);
    for j in (2..=GRADING).rev() {
        breaks.push(a + h * 0.5f64.powi(j));
    }
    breaks.push(a + 0.5 * h);
    for j in 2..=GRADING {
        breaks.push(b - h * 0.5f64.powi(j));
    }
    breaks.push(b);
    adaptive(&f, &breaks, spec)
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, spec).map(|z| z.re)
}

/// Integrates `f_smooth(k) * exp(i * phase_rate * k)` over [a, b].
///
/// The starting mesh has at least one panel per oscillation period.
pub fn integrate_oscillatory<F: Fn(f64) -> Complex64>(
    f_smooth: F,
    phase_rate: f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if !(a <= b) {
        return Err(Error::Domain(format!("integration bounds must satisfy a <= b (got {a}, {b})")));
    }
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let periods = (phase_rate.abs() * (b - a) / (2.0 * PI)).ceil() as usize;
    let panels = periods.max(2);
    if panels > spec.max_panels {
        return Err(Error::NonConvergence { a, b, estimate: f64::INFINITY, panels });
    }
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| if i == panels { b } else { a + (b - a) * i as f64 / panels as f64 })
        .collect();
    let g = |k: f64| f_smooth(k) * Complex64::from_polar(1.0, phase_rate * k);
    adaptive(&g, &breaks, spec)
}
