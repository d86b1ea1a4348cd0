//! Subsystem geometry and restricted two-point correlation matrices.
//!
//! Sites inside each interval are indexed outward from the scatterer:
//! the j-th site of A_R is `m0 + d_R + j` and the j-th site of A_L is
//! `-(m0 + d_L + j)`, for j = 1, 2, ...  Combined matrices are ordered
//! [A_L; A_R].

use std::f64::consts::PI;
use std::io::{self, Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::numerics::{eig_hermitian, integrate_oscillatory, ComplexMatrix, GaussLegendre, QuadratureSpec};
use crate::scattering::{reflection_unchecked, s_matrix_unchecked, transmission_unchecked, BiasState, SMatrix, ScatteringModel};
use crate::{Error, Result};

/// Two intervals A_L and A_R at distances d_L, d_R from the scattering region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsystemGeometry {
    pub m0: i64,
    pub d_l: i64,
    pub ell_l: i64,
    pub d_r: i64,
    pub ell_r: i64,
}

impl SubsystemGeometry {
    pub fn new(m0: i64, d_l: i64, ell_l: i64, d_r: i64, ell_r: i64) -> Result<SubsystemGeometry> {
        if m0 < 0 || d_l < 0 || d_r < 0 {
            return Err(Error::Geometry(format!("offsets must be non-negative (m0={m0}, d_L={d_l}, d_R={d_r})")));
        }
        if ell_l < 1 || ell_r < 1 {
            return Err(Error::Geometry(format!("interval lengths must be >= 1 (ell_L={ell_l}, ell_R={ell_r})")));
        }
        Ok(SubsystemGeometry { m0, d_l, ell_l, d_r, ell_r })
    }

    pub fn symmetric(d: i64, ell: i64) -> Result<SubsystemGeometry> {
        SubsystemGeometry::new(0, d, ell, d, ell)
    }

    pub fn ell_mirror(&self) -> i64 {
        ((self.d_l + self.ell_l).min(self.d_r + self.ell_r) - self.d_l.max(self.d_r)).max(0)
    }

    pub fn delta_ell_l(&self) -> i64 {
        self.ell_l - self.ell_mirror()
    }

    pub fn delta_ell_r(&self) -> i64 {
        self.ell_r - self.ell_mirror()
    }

    /// d_L, d_L + ell_L, d_R, d_R + ell_R in ascending order.
    pub fn sorted_ends(&self) -> [i64; 4] {
        let mut m = [self.d_l, self.d_l + self.ell_l, self.d_r, self.d_r + self.ell_r];
        m.sort_unstable();
        m
    }

    pub fn is_symmetric(&self) -> bool {
        self.d_l == self.d_r && self.ell_l == self.ell_r
    }

    pub fn left_sites(&self) -> Vec<i64> {
        (1..=self.ell_l).map(|j| -(self.m0 + self.d_l + j)).collect()
    }

    pub fn right_sites(&self) -> Vec<i64> {
        (1..=self.ell_r).map(|j| self.m0 + self.d_r + j).collect()
    }
}

/// (ell_mirror, delta_ell_L, delta_ell_R).
pub fn mirror_overlap(geom: &SubsystemGeometry) -> (i64, i64, i64) {
    (geom.ell_mirror(), geom.delta_ell_l(), geom.delta_ell_r())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    Left,
    Right,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    FiniteDistance,
    FarLimit,
}

/// Restricted correlation matrix (C)_{jm} = <c_j† c_m> with its site lists.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub matrix: ComplexMatrix,
    pub left_sites: Vec<i64>,
    pub right_sites: Vec<i64>,
    pub regime: Regime,
}

impl CorrelationMatrix {
    /// Wraps a Hermitian matrix whose first `n_left` rows belong to A_L.
    pub fn from_blocks(matrix: ComplexMatrix, n_left: usize, regime: Regime) -> Result<CorrelationMatrix> {
        let n = matrix.dim();
        if n_left > n {
            return Err(Error::Domain(format!("left block {n_left} exceeds dimension {n}")));
        }
        let left_sites = (1..=n_left as i64).map(|j| -j).collect();
        let right_sites = (1..=(n - n_left) as i64).collect();
        Ok(CorrelationMatrix { matrix: matrix.with_hermitian_hint(true), left_sites, right_sites, regime })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn n_left(&self) -> usize {
        self.left_sites.len()
    }

    pub fn n_right(&self) -> usize {
        self.right_sites.len()
    }

    pub fn left_block(&self) -> ComplexMatrix {
        self.matrix.principal_block(0..self.n_left())
    }

    pub fn right_block(&self) -> ComplexMatrix {
        self.matrix.principal_block(self.n_left()..self.dim())
    }

    /// Hermiticity within 1e-10 and spectrum inside [-1e-8, 1 + 1e-8].
    pub fn check_invariants(&self) -> Result<()> {
        let defect = self.matrix.hermiticity_defect();
        if defect > 1e-10 {
            return Err(Error::NotHermitian(defect));
        }
        for v in eig_hermitian(&self.matrix)? {
            if !(-1e-8..=1.0 + 1e-8).contains(&v) {
                return Err(Error::Spectrum(v));
            }
        }
        Ok(())
    }

    /// Writes dim (u64) then row-major (re, im) pairs, all little-endian.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(&(self.dim() as u64).to_le_bytes())?;
        for z in self.matrix.as_slice() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the format produced by [`CorrelationMatrix::write_binary`].
    pub fn read_binary_matrix<R: Read>(mut r: R) -> io::Result<ComplexMatrix> {
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf)?;
        let dim = u64::from_le_bytes(buf) as usize;
        let mut entries = Vec::with_capacity(dim * dim);
        for _ in 0..dim * dim {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf);
            r.read_exact(&mut buf)?;
            let im = f64::from_le_bytes(buf);
            entries.push(Complex64::new(re, im));
        }
        ComplexMatrix::from_row_major(dim, entries).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))
    }
}

#[derive(Debug, Clone, Copy)]
enum Amp {
    One,
    TL,
    TR,
    RL,
    RR,
}

impl Amp {
    #[inline]
    fn eval(self, s: &SMatrix) -> Complex64 {
        match self {
            Amp::One => Complex64::new(1.0, 0.0),
            Amp::TL => s.t_l,
            Amp::TR => s.t_r,
            Amp::RL => s.r_l,
            Amp::RR => s.r_r,
        }
    }
}

// u_x(k) = sum of amp(|k|) * exp(i * rate * |k|) for the sector of k.
fn wave_terms(from_left: bool, x: i64) -> Vec<(Amp, f64)> {
    let xf = x as f64;
    match (from_left, x > 0) {
        (false, true) => vec![(Amp::One, -xf), (Amp::RR, xf)],
        (false, false) => vec![(Amp::TR, -xf)],
        (true, true) => vec![(Amp::TL, xf)],
        (true, false) => vec![(Amp::One, xf), (Amp::RL, -xf)],
    }
}

/// <c_j† c_m> in the steady state, integrated term by term.
pub fn correlation_entry_finite(
    model: &ScatteringModel,
    bias: &BiasState,
    j: i64,
    m: i64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let m0 = model.m0();
    if j.abs() <= m0 || m.abs() <= m0 {
        return Err(Error::Domain(format!("sites ({j}, {m}) must lie outside the scattering region")));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (from_left, kf) in [(false, bias.k_fr), (true, bias.k_fl)] {
        for (a, ra) in wave_terms(from_left, j) {
            for (b, rb) in wave_terms(from_left, m) {
                let f = |q: f64| {
                    let s = s_matrix_unchecked(model, q);
                    a.eval(&s).conj() * b.eval(&s) / (2.0 * PI)
                };
                total += integrate_oscillatory(f, rb - ra, 0.0, kf, spec)?;
            }
        }
    }
    Ok(total)
}

// Composite Gauss-Legendre grid on (0, kf) resolving phases up to `rate`.
fn sector_grid(kf: f64, rate: f64, nodes_per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::cached(nodes_per_panel);
    let panels = ((rate * kf / (2.0 * PI)).ceil() as usize + 2).max((8.0 * kf).ceil() as usize);
    let mut q = Vec::with_capacity(panels * nodes_per_panel);
    let mut w = Vec::with_capacity(panels * nodes_per_panel);
    for p in 0..panels {
        let a = kf * p as f64 / panels as f64;
        let b = kf * (p + 1) as f64 / panels as f64;
        for (x, wx) in rule.mapped(a, b) {
            q.push(x);
            w.push(wx);
        }
    }
    (q, w)
}

fn selected_sites(geom: &SubsystemGeometry, which: Subsystem) -> (Vec<i64>, Vec<i64>) {
    match which {
        Subsystem::Left => (geom.left_sites(), Vec::new()),
        Subsystem::Right => (Vec::new(), geom.right_sites()),
        Subsystem::Both => (geom.left_sites(), geom.right_sites()),
    }
}

/// Correlation matrix at finite distance from the scatterer.
///
/// All entries share one composite Gauss-Legendre grid per reservoir sector
/// that resolves the fastest phase `2 max|site|`.
pub fn correlation_matrix_finite(
    model: &ScatteringModel,
    bias: &BiasState,
    geom: &SubsystemGeometry,
    which: Subsystem,
    spec: &QuadratureSpec,
) -> Result<CorrelationMatrix> {
    spec.validate()?;
    if geom.m0 != model.m0() {
        return Err(Error::Geometry(format!("geometry m0={} does not match model m0={}", geom.m0, model.m0())));
    }
    let (left, right) = selected_sites(geom, which);
    let sites: Vec<i64> = left.iter().chain(&right).copied().collect();
    let n = sites.len();
    let max_site = sites.iter().map(|s| s.abs()).max().unwrap_or(1) as f64;
    let mut acc = vec![Complex64::new(0.0, 0.0); n * n];
    for (from_left, kf) in [(false, bias.k_fr), (true, bias.k_fl)] {
        let (q, w) = sector_grid(kf, 2.0 * max_site, spec.nodes_per_panel);
        let smat: Vec<SMatrix> = q.iter().map(|&x| s_matrix_unchecked(model, x)).collect();
        let u: Vec<Vec<Complex64>> = sites
            .par_iter()
            .map(|&x| {
                let terms = wave_terms(from_left, x);
                q.iter()
                    .zip(&smat)
                    .map(|(&k, s)| terms.iter().map(|&(a, r)| a.eval(s) * Complex64::from_polar(1.0, r * k)).sum())
                    .collect()
            })
            .collect();
        let weighted: Vec<Vec<Complex64>> =
            u.par_iter().map(|row| row.iter().zip(&w).map(|(z, &wk)| z.conj() * (wk / (2.0 * PI))).collect()).collect();
        let rows: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map(|a| (a..n).map(|b| weighted[a].iter().zip(&u[b]).map(|(x, y)| x * y).sum()).collect())
            .collect();
        for (a, row) in rows.into_iter().enumerate() {
            for (off, z) in row.into_iter().enumerate() {
                acc[a * n + a + off] += z;
            }
        }
    }
    let matrix = ComplexMatrix::from_fn(n, |a, b| {
        if a <= b {
            acc[a * n + b]
        } else {
            acc[b * n + a].conj()
        }
    })
    .with_hermitian_hint(true);
    Ok(CorrelationMatrix { matrix, left_sites: left, right_sites: right, regime: Regime::FiniteDistance })
}

/// sin(k x) / (pi x), the filled-sea kernel up to Fermi momentum k.
pub fn sea_kernel(k: f64, x: i64) -> f64 {
    if x == 0 {
        k / PI
    } else {
        let xf = x as f64;
        (k * xf).sin() / (PI * xf)
    }
}

// Integral of exp(i q x) dq / 2pi over (k1, k2).
fn plane_window(k1: f64, k2: f64, x: i64) -> Complex64 {
    if x == 0 {
        return Complex64::new((k2 - k1) / (2.0 * PI), 0.0);
    }
    let xf = x as f64;
    (Complex64::from_polar(1.0, k2 * xf) - Complex64::from_polar(1.0, k1 * xf)) / Complex64::new(0.0, 2.0 * PI * xf)
}

// Table of W(x) = integral over the window of f(q) exp(-i q x) dq / 2pi for
// 0 <= x < len; negative x follow from W(-x) = conj(W(x)) for real f.
fn toeplitz_table<F: Fn(f64) -> f64 + Sync>(
    f: F,
    k1: f64,
    k2: f64,
    len: i64,
    spec: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    (0..len)
        .into_par_iter()
        .map(|x| integrate_oscillatory(|q| Complex64::new(f(q) / (2.0 * PI), 0.0), -(x as f64), k1, k2, spec))
        .collect()
}

fn toeplitz_lookup(table: &[Complex64], x: i64) -> Complex64 {
    if x >= 0 {
        table[x as usize]
    } else {
        table[(-x) as usize].conj()
    }
}

// Within-block kernel for the interval on the side of the lower reservoir
// (transmitted window states) or of the higher one (reflected window states).
fn block_kernel(
    model: &ScatteringModel,
    bias: &BiasState,
    len: i64,
    higher_side: bool,
    spec: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    let (k1, k2) = (bias.k_minus(), bias.k_plus());
    if higher_side {
        let refl = toeplitz_table(|q| reflection_unchecked(model, q), k1, k2, len, spec)?;
        Ok((0..len)
            .map(|x| sea_kernel(k1, x) + plane_window(k1, k2, x) + refl[x as usize])
            .collect())
    } else {
        let trans = toeplitz_table(|q| transmission_unchecked(model, q), k1, k2, len, spec)?;
        Ok((0..len).map(|x| sea_kernel(k1, x) + trans[x as usize]).collect())
    }
}

/// Correlation matrix in the limit d_L, d_R → ∞ with d_L − d_R fixed.
///
/// Terms whose phase grows with the distances average out; what remains is
/// block-Toeplitz, and only the voltage window feeds the cross block.
pub fn correlation_matrix_far(
    model: &ScatteringModel,
    bias: &BiasState,
    geom: &SubsystemGeometry,
    which: Subsystem,
    spec: &QuadratureSpec,
) -> Result<CorrelationMatrix> {
    spec.validate()?;
    let (left, right) = selected_sites(geom, which);
    let (nl, nr) = (left.len(), right.len());
    let n = nl + nr;
    let left_higher = bias.left_higher();
    let kl = if nl > 0 { block_kernel(model, bias, nl as i64, left_higher, spec)? } else { Vec::new() };
    let kr = if nr > 0 { block_kernel(model, bias, nr as i64, !left_higher, spec)? } else { Vec::new() };

    // phi[j][m] = <c†_{R,j} c_{L,m}> depends on x = j - m in (-(nl-1), nr-1).
    let cross: Vec<Complex64> = if nl > 0 && nr > 0 {
        let shift = (geom.d_l - geom.d_r) as f64;
        let (k1, k2) = (bias.k_minus(), bias.k_plus());
        let lo = -(nl as i64 - 1);
        (lo..nr as i64)
            .into_par_iter()
            .map(|x| {
                let f = |q: f64| {
                    let s = s_matrix_unchecked(model, q);
                    let amp = if left_higher { s.t_l.conj() * s.r_l } else { s.r_r.conj() * s.t_r };
                    amp / (2.0 * PI)
                };
                integrate_oscillatory(f, shift - x as f64, k1, k2, spec)
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let cross_at = |j: usize, m: usize| cross[(j as i64 - m as i64 + nl as i64 - 1) as usize];

    let matrix = ComplexMatrix::from_fn(n, |a, b| match (a < nl, b < nl) {
        (true, true) => toeplitz_lookup(&kl, a as i64 - b as i64),
        (false, false) => toeplitz_lookup(&kr, (a - nl) as i64 - (b - nl) as i64),
        // <c†_{L,a} c_{R,b}> = conj(phi[b][a])
        (true, false) => cross_at(b - nl, a).conj(),
        (false, true) => cross_at(a - nl, b),
    })
    .with_hermitian_hint(true);
    Ok(CorrelationMatrix { matrix, left_sites: left, right_sites: right, regime: Regime::FarLimit })
}
