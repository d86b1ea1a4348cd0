//! Entropies, mutual and coherent information, and fermionic negativity of
//! Gaussian states from their correlation matrices.

use num_complex::Complex64;

use crate::correlation::CorrelationMatrix;
use crate::numerics::{eig_general, eig_hermitian, mat_inverse, mat_mul, xlogx, ComplexMatrix};
use crate::{Error, Result};

/// Slack allowed outside [0, 1] before a spectrum is rejected.
pub const SPECTRUM_SLACK: f64 = 1e-8;
/// Largest imaginary residue accepted in the negativity.
pub const IMAG_TOL: f64 = 1e-7;

/// Rényi index, with the von Neumann case kept separate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Renyi(f64),
    VonNeumann,
}

impl Order {
    pub fn validated(self) -> Result<Order> {
        match self {
            Order::Renyi(n) if !(n > 0.0) || n == 1.0 || !n.is_finite() => {
                Err(Error::Domain(format!("Renyi index must be positive and != 1 (got {n})")))
            }
            o => Ok(o),
        }
    }

    /// Numeric index, with 1 standing for von Neumann.
    pub fn index(&self) -> f64 {
        match self {
            Order::Renyi(n) => *n,
            Order::VonNeumann => 1.0,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Order::Renyi(n) => format!("{n}"),
            Order::VonNeumann => "vN".to_string(),
        }
    }
}

/// Spectrum of a correlation matrix clamped to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub clamped: usize,
}

/// Eigenvalues of `c`, clamped into [0, 1] if within [`SPECTRUM_SLACK`].
pub fn clamped_spectrum(c: &ComplexMatrix) -> Result<Spectrum> {
    let raw = eig_hermitian(c)?;
    clamp_values(raw)
}

fn clamp_values(raw: Vec<f64>) -> Result<Spectrum> {
    let mut clamped = 0;
    let mut values = Vec::with_capacity(raw.len());
    for v in raw {
        if !(-SPECTRUM_SLACK..=1.0 + SPECTRUM_SLACK).contains(&v) {
            return Err(Error::Spectrum(v));
        }
        let w = v.clamp(0.0, 1.0);
        if w != v {
            clamped += 1;
        }
        values.push(w);
    }
    Ok(Spectrum { values, clamped })
}

pub fn renyi_from_spectrum(nu: &[f64], n: f64) -> f64 {
    nu.iter()
        .filter(|&&v| v > 0.0 && v < 1.0)
        .map(|&v| (v.powf(n) + (1.0 - v).powf(n)).ln())
        .sum::<f64>()
        / (1.0 - n)
}

pub fn von_neumann_from_spectrum(nu: &[f64]) -> f64 {
    -nu.iter().map(|&v| xlogx(v) + xlogx(1.0 - v)).sum::<f64>()
}

pub fn entropy_from_spectrum(nu: &[f64], order: Order) -> f64 {
    match order {
        Order::Renyi(n) => renyi_from_spectrum(nu, n),
        Order::VonNeumann => von_neumann_from_spectrum(nu),
    }
}

/// Rényi entropy (1/(1-n)) Σ ln[ν^n + (1-ν)^n].
pub fn renyi_entropy(c: &ComplexMatrix, n: f64) -> Result<f64> {
    Order::Renyi(n).validated()?;
    Ok(renyi_from_spectrum(&clamped_spectrum(c)?.values, n))
}

/// Von Neumann entropy -Σ [ν ln ν + (1-ν) ln(1-ν)].
pub fn von_neumann_entropy(c: &ComplexMatrix) -> Result<f64> {
    Ok(von_neumann_from_spectrum(&clamped_spectrum(c)?.values))
}

pub fn entropy(c: &ComplexMatrix, order: Order) -> Result<f64> {
    match order.validated()? {
        Order::Renyi(n) => renyi_entropy(c, n),
        Order::VonNeumann => von_neumann_entropy(c),
    }
}

/// Tr[C^p] by repeated multiplication.
pub fn correlation_moments(c: &ComplexMatrix, p: u32) -> Result<f64> {
    if p == 0 {
        return Err(Error::Domain("moment order must be >= 1".into()));
    }
    let mut acc = c.clone();
    for _ in 1..p {
        acc = mat_mul(&acc, c);
    }
    Ok(acc.trace().re)
}

/// Numeric measures for one correlation matrix and one order.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    pub order: Order,
    pub s_al: f64,
    pub s_ar: f64,
    pub s_a: f64,
    pub mutual_info: f64,
    pub coherent_info: f64,
    pub negativity: Option<f64>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Diagnostics {
    /// Largest |Im ξ| among the eigenvalues of C_Ξ.
    pub max_imag_eigenvalue: f64,
    /// |Im| of the negativity before taking the real part.
    pub imag_residue: f64,
    /// Eigenvalues moved onto [0, 1] by clamping.
    pub clamped: usize,
}

impl Diagnostics {
    pub fn merge(&mut self, other: &Diagnostics) {
        self.max_imag_eigenvalue = self.max_imag_eigenvalue.max(other.max_imag_eigenvalue);
        self.imag_residue = self.imag_residue.max(other.imag_residue);
        self.clamped += other.clamped;
    }
}

fn require_blocks(c: &CorrelationMatrix) -> Result<()> {
    if c.n_left() == 0 || c.n_right() == 0 {
        return Err(Error::Domain("both A_L and A_R blocks must be non-empty".into()));
    }
    Ok(())
}

/// Entropies of A_L, A_R and A = A_L ∪ A_R, with MI and CI = S_AR - S_A.
pub fn measures(c: &CorrelationMatrix, order: Order) -> Result<EntanglementReport> {
    let order = order.validated()?;
    require_blocks(c)?;
    let mut clamped = 0;
    let mut s = |m: &ComplexMatrix| -> Result<f64> {
        let spec = clamped_spectrum(m)?;
        clamped += spec.clamped;
        Ok(entropy_from_spectrum(&spec.values, order))
    };
    let s_al = s(&c.left_block())?;
    let s_ar = s(&c.right_block())?;
    let s_a = s(&c.matrix)?;
    Ok(EntanglementReport {
        order,
        s_al,
        s_ar,
        s_a,
        mutual_info: s_al + s_ar - s_a,
        coherent_info: s_ar - s_a,
        negativity: None,
        diagnostics: Diagnostics { clamped, ..Diagnostics::default() },
    })
}

/// Reports for several orders sharing the three eigendecompositions.
pub fn measures_multi(c: &CorrelationMatrix, orders: &[Order]) -> Result<Vec<EntanglementReport>> {
    require_blocks(c)?;
    let sl = clamped_spectrum(&c.left_block())?;
    let sr = clamped_spectrum(&c.right_block())?;
    let sa = clamped_spectrum(&c.matrix)?;
    let clamped = sl.clamped + sr.clamped + sa.clamped;
    orders
        .iter()
        .map(|&o| {
            let order = o.validated()?;
            let s_al = entropy_from_spectrum(&sl.values, order);
            let s_ar = entropy_from_spectrum(&sr.values, order);
            let s_a = entropy_from_spectrum(&sa.values, order);
            Ok(EntanglementReport {
                order,
                s_al,
                s_ar,
                s_a,
                mutual_info: s_al + s_ar - s_a,
                coherent_info: s_ar - s_a,
                negativity: None,
                diagnostics: Diagnostics { clamped, ..Diagnostics::default() },
            })
        })
        .collect()
}

/// Negativity value with its reality diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Negativity {
    pub value: f64,
    pub diagnostics: Diagnostics,
}

/// Γ± = [[2C_L - I, ∓2i C_LR], [∓2i C_RL, I - 2C_R]].
pub fn gamma_pm(c: &CorrelationMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let nl = c.n_left();
    let n = c.dim();
    let i2 = Complex64::new(0.0, 2.0);
    let build = |sign: f64| {
        ComplexMatrix::from_fn(n, |a, b| {
            let delta = if a == b { 1.0 } else { 0.0 };
            let x = c.matrix[(a, b)];
            match (a < nl, b < nl) {
                (true, true) => 2.0 * x - delta,
                (false, false) => delta - 2.0 * x,
                _ => -sign * i2 * x,
            }
        })
    };
    (build(1.0), build(-1.0))
}

/// C_Ξ = ½[I - (I + Γ₊Γ₋)⁻¹(Γ₊ + Γ₋)].
pub fn c_xi(c: &CorrelationMatrix) -> Result<ComplexMatrix> {
    let n = c.dim();
    let (gp, gm) = gamma_pm(c);
    let id = ComplexMatrix::identity(n);
    let resolvent = mat_inverse(&id.add(&mat_mul(&gp, &gm))).map_err(|e| match e {
        Error::Singular => Error::SingularResolvent,
        other => other,
    })?;
    let prod = mat_mul(&resolvent, &gp.add(&gm));
    Ok(id.sub(&prod).scale(Complex64::new(0.5, 0.0)))
}

fn is_even_positive(n: u32) -> bool {
    n > 0 && n.is_multiple_of(2)
}

/// Rényi negativity ℰ_n (n even) or the negativity ℰ (n = 1).
pub fn fermionic_negativity(c: &CorrelationMatrix, n: u32) -> Result<f64> {
    fermionic_negativity_detailed(c, n).map(|r| r.value)
}

pub fn fermionic_negativity_detailed(c: &CorrelationMatrix, n: u32) -> Result<Negativity> {
    if !(n == 1 || is_even_positive(n)) {
        return Err(Error::Domain(format!("negativity index must be 1 or even (got {n})")));
    }
    require_blocks(c)?;
    let spectrum = clamped_spectrum(&c.matrix)?;
    if n == 1 && cross_block_vanishes(c) {
        // ρ = ρ_L ⊗ ρ_R, whose partial time-reversal has unit trace norm
        return Ok(Negativity { value: 0.0, diagnostics: Diagnostics { clamped: spectrum.clamped, ..Diagnostics::default() } });
    }
    let xi = eig_general(&c_xi(c)?)?;
    let half = n as f64 / 2.0;
    let mut max_imag = 0.0f64;
    let mut total = Complex64::new(0.0, 0.0);
    for z in xi {
        max_imag = max_imag.max(z.im.abs());
        let z = snap_to_unit_interval(z);
        let term = principal_pow(z, half) + principal_pow(Complex64::new(1.0, 0.0) - z, half);
        total += term.ln();
    }
    let moments: f64 = spectrum.values.iter().map(|&v| (v * v + (1.0 - v) * (1.0 - v)).ln()).sum();
    total += half * moments;
    let diagnostics = Diagnostics { max_imag_eigenvalue: max_imag, imag_residue: total.im.abs(), clamped: spectrum.clamped };
    if !(total.im.abs() < IMAG_TOL) || !total.re.is_finite() {
        return Err(Error::ImaginaryResidue(total.im.abs()));
    }
    Ok(Negativity { value: total.re, diagnostics })
}

fn cross_block_vanishes(c: &CorrelationMatrix) -> bool {
    let nl = c.n_left();
    (0..nl).all(|a| c.matrix.row(a)[nl..].iter().all(|z| *z == Complex64::new(0.0, 0.0)))
}

// Eigenvalues of C_Ξ that are real to rounding and sit just outside [0, 1]
// are moved onto the interval before taking fractional powers.
fn snap_to_unit_interval(z: Complex64) -> Complex64 {
    let mut z = z;
    if z.im.abs() < 1e-10 {
        z.im = 0.0;
        if z.re < 0.0 && z.re > -SPECTRUM_SLACK {
            z.re = 0.0;
        } else if z.re > 1.0 && z.re < 1.0 + SPECTRUM_SLACK {
            z.re = 1.0;
        }
    }
    z
}

fn principal_pow(z: Complex64, p: f64) -> Complex64 {
    if z.im == 0.0 && z.re >= 0.0 {
        Complex64::new(z.re.powf(p), 0.0)
    } else if z == Complex64::new(0.0, 0.0) {
        z
    } else {
        z.powf(p)
    }
}

/// Full report: entropies, MI, CI and (optionally) the negativity ℰ.
pub fn report(c: &CorrelationMatrix, order: Order, with_negativity: bool) -> Result<EntanglementReport> {
    let mut r = measures(c, order)?;
    if with_negativity {
        let neg = fermionic_negativity_detailed(c, 1)?;
        r.negativity = Some(neg.value);
        r.diagnostics.merge(&neg.diagnostics);
    }
    Ok(r)
}
