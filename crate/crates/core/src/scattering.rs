//! Scattering models on the tight-binding chain.
//!
//! Momenta are in units of the inverse lattice spacing, energies in units of
//! the hopping `eta`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Entries of the 2x2 scattering matrix [[r_L, t_R], [t_L, r_R]] at fixed |k|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrix {
    pub r_l: Complex64,
    pub t_r: Complex64,
    pub t_l: Complex64,
    pub r_r: Complex64,
}

impl SMatrix {
    /// Largest entry of |S† S - I|.
    pub fn unitarity_defect(&self) -> f64 {
        let s = [[self.r_l, self.t_r], [self.t_l, self.r_r]];
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    acc += s[k][i].conj() * s[k][j];
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScatteringModel {
    /// On-site energy `epsilon0` at site 0.
    SingleImpurity { epsilon0: f64, eta: f64 },
    /// Momentum-independent transmission probability.
    ConstantT { transmission: f64 },
    Trivial,
}

impl ScatteringModel {
    pub fn single_impurity(epsilon0: f64, eta: f64) -> Result<ScatteringModel> {
        ScatteringModel::SingleImpurity { epsilon0, eta }.validated()
    }

    pub fn constant_t(transmission: f64) -> Result<ScatteringModel> {
        ScatteringModel::ConstantT { transmission }.validated()
    }

    pub fn validated(self) -> Result<ScatteringModel> {
        match self {
            ScatteringModel::SingleImpurity { epsilon0, eta } => {
                if !(eta > 0.0) || !epsilon0.is_finite() {
                    return Err(Error::Domain(format!("need eta > 0 and finite epsilon0 (got {eta}, {epsilon0})")));
                }
            }
            ScatteringModel::ConstantT { transmission } => {
                if !(0.0..=1.0).contains(&transmission) {
                    return Err(Error::Domain(format!("transmission {transmission} outside [0, 1]")));
                }
            }
            ScatteringModel::Trivial => {}
        }
        Ok(self)
    }

    /// Half-width of the scattering region; sites with |m| > m0 are free.
    pub fn m0(&self) -> i64 {
        0
    }

    pub fn label(&self) -> String {
        match self {
            ScatteringModel::SingleImpurity { epsilon0, eta } => format!("single-impurity(eps0/eta={})", epsilon0 / eta),
            ScatteringModel::ConstantT { transmission } => format!("constant-t(T={transmission})"),
            ScatteringModel::Trivial => "trivial".to_string(),
        }
    }
}

fn check_momentum(k: f64) -> Result<()> {
    if k > 0.0 && k < PI {
        Ok(())
    } else {
        Err(Error::Domain(format!("momentum {k} outside (0, pi)")))
    }
}

/// Scattering matrix at momentum 0 < k < pi.
pub fn s_matrix(model: &ScatteringModel, k: f64) -> Result<SMatrix> {
    check_momentum(k)?;
    Ok(s_matrix_unchecked(model, k))
}

#[inline]
pub(crate) fn s_matrix_unchecked(model: &ScatteringModel, k: f64) -> SMatrix {
    match *model {
        ScatteringModel::SingleImpurity { epsilon0, eta } => {
            let t = 1.0 / Complex64::new(1.0, epsilon0 / (2.0 * eta * k.sin()));
            let r = t - 1.0;
            SMatrix { r_l: r, t_r: t, t_l: t, r_r: r }
        }
        ScatteringModel::ConstantT { transmission } => {
            let t = Complex64::new(transmission.sqrt(), 0.0);
            let r = Complex64::new(0.0, (1.0 - transmission).sqrt());
            SMatrix { r_l: r, t_r: t, t_l: t, r_r: r }
        }
        ScatteringModel::Trivial => {
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            SMatrix { r_l: zero, t_r: one, t_l: one, r_r: zero }
        }
    }
}

#[inline]
pub(crate) fn transmission_unchecked(model: &ScatteringModel, k: f64) -> f64 {
    match *model {
        ScatteringModel::SingleImpurity { epsilon0, eta } => {
            let s2 = k.sin().powi(2);
            let a = epsilon0 / (2.0 * eta);
            s2 / (s2 + a * a)
        }
        ScatteringModel::ConstantT { transmission } => transmission,
        ScatteringModel::Trivial => 1.0,
    }
}

// R(k) without the cancellation in 1 - T when T is close to 1.
#[inline]
pub(crate) fn reflection_unchecked(model: &ScatteringModel, k: f64) -> f64 {
    match *model {
        ScatteringModel::SingleImpurity { epsilon0, eta } => {
            let s2 = k.sin().powi(2);
            let a = epsilon0 / (2.0 * eta);
            a * a / (s2 + a * a)
        }
        ScatteringModel::ConstantT { transmission } => 1.0 - transmission,
        ScatteringModel::Trivial => 0.0,
    }
}

/// Transmission probability T(k) = |t_L(k)|^2.
pub fn transmission(model: &ScatteringModel, k: f64) -> Result<f64> {
    check_momentum(k)?;
    Ok(transmission_unchecked(model, k))
}

/// Reflection probability R(k) = 1 - T(k).
pub fn reflection(model: &ScatteringModel, k: f64) -> Result<f64> {
    check_momentum(k)?;
    Ok(reflection_unchecked(model, k))
}

/// Amplitude of the scattering state with signed momentum `k` at site `m`.
///
/// Negative `k` labels states incoming from the right reservoir.
pub fn wavefunction(model: &ScatteringModel, k: f64, m: i64) -> Result<Complex64> {
    if m.abs() <= model.m0() {
        return Err(Error::Domain(format!("site {m} lies inside the scattering region")));
    }
    check_momentum(k.abs())?;
    let s = s_matrix_unchecked(model, k.abs());
    let phase = |x: f64| Complex64::from_polar(1.0, x);
    let km = k * m as f64;
    Ok(match (m > 0, k > 0.0) {
        (true, false) => phase(km) + s.r_r * phase(-km),
        (true, true) => s.t_l * phase(km),
        (false, false) => s.t_r * phase(km),
        (false, true) => phase(km) + s.r_l * phase(-km),
    })
}

/// Fermi momenta of the left and right reservoirs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasState {
    pub k_fl: f64,
    pub k_fr: f64,
}

impl BiasState {
    pub fn new(k_fl: f64, k_fr: f64) -> Result<BiasState> {
        check_momentum(k_fl)?;
        check_momentum(k_fr)?;
        Ok(BiasState { k_fl, k_fr })
    }

    pub fn k_minus(&self) -> f64 {
        self.k_fl.min(self.k_fr)
    }

    pub fn k_plus(&self) -> f64 {
        self.k_fl.max(self.k_fr)
    }

    /// Width of the voltage window.
    pub fn delta_k(&self) -> f64 {
        self.k_plus() - self.k_minus()
    }

    /// True when the left reservoir has the higher Fermi momentum.
    pub fn left_higher(&self) -> bool {
        self.k_fl >= self.k_fr
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models() -> Vec<ScatteringModel> {
        vec![
            ScatteringModel::single_impurity(0.0, 1.0).unwrap(),
            ScatteringModel::single_impurity(1.0, 1.0).unwrap(),
            ScatteringModel::single_impurity(-2.5, 0.7).unwrap(),
            ScatteringModel::constant_t(0.3).unwrap(),
            ScatteringModel::constant_t(1.0).unwrap(),
            ScatteringModel::constant_t(0.0).unwrap(),
            ScatteringModel::Trivial,
        ]
    }

    #[test]
    fn clean_impurity_is_transparent() {
        let m = ScatteringModel::single_impurity(0.0, 1.0).unwrap();
        for k in [0.1, 1.0, 3.0] {
            let s = s_matrix(&m, k).unwrap();
            assert_eq!(s.t_l, Complex64::new(1.0, 0.0));
            assert_eq!(s.r_l, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn impurity_transmission_values() {
        let m = ScatteringModel::single_impurity(2.0, 1.0).unwrap();
        assert!((transmission(&m, PI / 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((s_matrix(&m, PI / 2.0).unwrap().t_l.norm_sqr() - 0.5).abs() < 1e-15);
        let m = ScatteringModel::single_impurity(1.0, 1.0).unwrap();
        assert!((transmission(&m, PI / 2.0).unwrap() - 0.8).abs() < 1e-15);
        let m = ScatteringModel::constant_t(0.3).unwrap();
        assert_eq!(transmission(&m, 1.3).unwrap(), 0.3);
        assert!((reflection(&m, 1.3).unwrap() - 0.7).abs() < 1e-16);
    }

    #[test]
    fn unitarity_on_grid() {
        for model in models() {
            for i in 1..1000 {
                let k = PI * i as f64 / 1000.0;
                let s = s_matrix(&model, k).unwrap();
                assert!(s.unitarity_defect() < 1e-12, "{model:?} at {k}");
                assert!((s.t_l.norm_sqr() + s.r_l.norm_sqr() - 1.0).abs() < 1e-12);
                assert_eq!(s.t_l, s.t_r);
                let cross = s.t_l * s.r_l.conj() + s.t_r.conj() * s.r_r;
                assert!(cross.norm() < 1e-12);
                let t = transmission(&model, k).unwrap();
                assert!((t - s.t_l.norm_sqr()).abs() < 1e-14);
                assert!((t + reflection(&model, k).unwrap() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn transmission_is_continuous() {
        let model = ScatteringModel::single_impurity(1.0, 1.0).unwrap();
        for i in 1..100 {
            let k = PI * i as f64 / 100.0;
            let d = (transmission(&model, k + 1e-6).unwrap() - transmission(&model, k).unwrap()).abs();
            assert!(d < 10.0 * 1e-6);
        }
    }

    #[test]
    fn wavefunction_cases() {
        let triv = ScatteringModel::Trivial;
        let u = wavefunction(&triv, 0.7, 4).unwrap();
        assert!((u - Complex64::from_polar(1.0, 2.8)).norm() < 1e-15);
        let m = ScatteringModel::single_impurity(2.0, 1.0).unwrap();
        let t = 1.0 / Complex64::new(1.0, 1.0);
        let want = t * Complex64::from_polar(1.0, 5.0 * PI / 2.0);
        assert!((wavefunction(&m, PI / 2.0, 5).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn wavefunction_mirror_identity() {
        for model in models() {
            for (k, m) in [(0.4, 3i64), (-1.2, 7), (2.9, 12), (-0.05, 2)] {
                let s = s_matrix(&model, f64::abs(k)).unwrap();
                let a = wavefunction(&model, k, m).unwrap().norm_sqr() + wavefunction(&model, k, -m).unwrap().norm_sqr();
                let (r, t) = if k < 0.0 { (s.r_r, s.t_r) } else { (s.r_l, s.t_l) };
                let arg = 2.0 * k.abs() * m as f64;
                let b = (1.0 + r * Complex64::from_polar(1.0, arg)).norm_sqr() + t.norm_sqr();
                assert!((a - b).abs() < 1e-12, "{model:?} {k} {m}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        let m = ScatteringModel::Trivial;
        assert!(s_matrix(&m, 0.0).is_err());
        assert!(s_matrix(&m, PI).is_err());
        assert!(transmission(&m, -0.1).is_err());
        assert!(wavefunction(&m, 0.5, 0).is_err());
        assert!(wavefunction(&m, 0.0, 3).is_err());
        assert!(ScatteringModel::constant_t(1.5).is_err());
        assert!(ScatteringModel::single_impurity(1.0, 0.0).is_err());
        assert!(BiasState::new(3.5, 1.0).is_err());
    }
}
