//! Dense Fock-space construction of a Gaussian state from its correlation
//! matrix, used to check the correlation-matrix formulas directly.

use nalgebra::DMatrix;
use ness_core::numerics::ComplexMatrix;
use ness_core::Complex64;
use rand::Rng;

pub type Dense = DMatrix<Complex64>;

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Jordan-Wigner annihilators; bit j of a basis index is the occupation of mode j.
pub fn annihilators(modes: usize) -> Vec<Dense> {
    let dim = 1usize << modes;
    (0..modes)
        .map(|j| {
            let mut m = Dense::from_element(dim, dim, c0());
            for s in 0..dim {
                if s & (1 << j) != 0 {
                    let sign = if (s & ((1 << j) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    m[(s ^ (1 << j), s)] = Complex64::new(sign, 0.0);
                }
            }
            m
        })
        .collect()
}

/// Random Hermitian C = V diag(ν) V† with ν uniform in [0, 1].
pub fn random_correlation<R: Rng>(rng: &mut R, dim: usize) -> (Dense, Vec<f64>) {
    let g = Dense::from_fn(dim, dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let v = g.qr().q();
    let nu: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
    let d = Dense::from_fn(dim, dim, |i, j| if i == j { Complex64::new(nu[i], 0.0) } else { c0() });
    let c = &v * d * v.adjoint();
    (c.clone(), nu)
}

pub fn to_matrix(c: &Dense) -> ComplexMatrix {
    let n = c.nrows();
    ComplexMatrix::from_fn(n, |i, j| c[(i, j)]).symmetrized().with_hermitian_hint(true)
}

/// ρ with ⟨c_i† c_j⟩ = C_ij, built as a product over the normal modes of C.
pub fn density_matrix(c: &Dense) -> Dense {
    let n = c.nrows();
    let ops = annihilators(n);
    let dim = 1usize << n;
    let eig = c.clone().symmetric_eigen();
    let mut rho = Dense::identity(dim, dim);
    for k in 0..n {
        let mut d = Dense::from_element(dim, dim, c0());
        for j in 0..n {
            d += &ops[j] * eig.eigenvectors[(j, k)];
        }
        let num = d.adjoint() * &d;
        let nu = eig.eigenvalues[k].clamp(0.0, 1.0);
        let factor = &num * Complex64::new(nu, 0.0) + (Dense::identity(dim, dim) - &num) * Complex64::new(1.0 - nu, 0.0);
        rho *= factor;
    }
    rho
}

/// ⟨c_i† c_j⟩ evaluated in ρ.
pub fn two_point(rho: &Dense, modes: usize) -> Dense {
    let ops = annihilators(modes);
    Dense::from_fn(modes, modes, |i, j| (rho * ops[i].adjoint() * &ops[j]).trace())
}

/// Reduced state of the lowest `keep` modes.
pub fn trace_out_high(rho: &Dense, modes: usize, keep: usize) -> Dense {
    let low = 1usize << keep;
    let high = 1usize << (modes - keep);
    Dense::from_fn(low, low, |a, b| (0..high).map(|h| rho[(a + low * h, b + low * h)]).sum())
}

/// Reduced state of the highest `modes - drop` modes.
pub fn trace_out_low(rho: &Dense, modes: usize, drop: usize) -> Dense {
    let low = 1usize << drop;
    let high = 1usize << (modes - drop);
    Dense::from_fn(high, high, |a, b| (0..low).map(|l| rho[(l + low * a, l + low * b)]).sum())
}

fn hermitian_eigenvalues(m: &Dense) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().collect()
}

/// Rényi entropy, or von Neumann when `n` is None.
pub fn entropy(rho: &Dense, n: Option<f64>) -> f64 {
    let lam = hermitian_eigenvalues(rho);
    match n {
        None => lam.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum(),
        Some(n) => lam.iter().map(|&l| l.max(0.0).powf(n)).sum::<f64>().ln() / (1.0 - n),
    }
}

/// Partial time-reversal on the lowest `part` modes.
pub fn partial_time_reversal(rho: &Dense, modes: usize, part: usize) -> Dense {
    let dim = 1usize << modes;
    let mask = (1usize << part) - 1;
    let mut out = Dense::from_element(dim, dim, c0());
    for s in 0..dim {
        for t in 0..dim {
            let v = rho[(s, t)];
            if v == c0() {
                continue;
            }
            let (na, nb) = (s & mask, s & !mask);
            let (ma, mb) = (t & mask, t & !mask);
            let ta = (na.count_ones() + ma.count_ones()) as usize;
            let tb = (nb.count_ones() + mb.count_ones()) as usize;
            let quarter = 2 * ((ta * tb) % 2) + ta % 2;
            let phase = [1.0, 0.0, -1.0, 0.0];
            let ph = Complex64::new(phase[quarter % 4], phase[(quarter + 3) % 4]);
            out[(ma | nb, na | mb)] += ph * v;
        }
    }
    out
}

/// ln Tr[(ρ^R ρ^R†)^{n/2}]; n = 1 gives the negativity.
pub fn negativity(rho: &Dense, modes: usize, part: usize, n: f64) -> f64 {
    let r = partial_time_reversal(rho, modes, part);
    let m = &r * r.adjoint();
    hermitian_eigenvalues(&m).iter().map(|&l| l.max(0.0).powf(0.5 * n)).sum::<f64>().ln()
}
