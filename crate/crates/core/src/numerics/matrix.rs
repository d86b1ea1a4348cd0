use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Dense square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
    pub hermitian_hint: bool,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> ComplexMatrix {
        ComplexMatrix { dim, entries: vec![ZERO; dim * dim], hermitian_hint: false }
    }

    pub fn identity(dim: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m.hermitian_hint = true;
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(dim: usize, mut f: F) -> ComplexMatrix {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        ComplexMatrix { dim, entries, hermitian_hint: false }
    }

    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<ComplexMatrix> {
        if entries.len() != dim * dim {
            return Err(Error::Domain(format!("expected {} entries, got {}", dim * dim, entries.len())));
        }
        Ok(ComplexMatrix { dim, entries, hermitian_hint: false })
    }

    pub fn from_real_diagonal(values: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m.hermitian_hint = true;
        m
    }

    pub fn with_hermitian_hint(mut self, hint: bool) -> ComplexMatrix {
        self.hermitian_hint = hint;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::from_fn(self.dim, |i, j| self[(j, i)].conj());
        out.hermitian_hint = self.hermitian_hint;
        out
    }

    /// Largest entry of |M - M^dagger|.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// (M + M^dagger) / 2.
    pub fn symmetrized(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::from_fn(self.dim, |i, j| 0.5 * (self[(i, j)] + self[(j, i)].conj()));
        out.hermitian_hint = true;
        out
    }

    /// Square principal block on indices `range`.
    pub fn principal_block(&self, range: std::ops::Range<usize>) -> ComplexMatrix {
        let off = range.start;
        let mut out = ComplexMatrix::from_fn(range.len(), |i, j| self[(off + i, off + j)]);
        out.hermitian_hint = self.hermitian_hint;
        out
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix { dim: self.dim, entries: self.entries.iter().map(|z| z * s).collect(), hermitian_hint: false }
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        ComplexMatrix { dim: self.dim, entries, hermitian_hint: self.hermitian_hint && other.hermitian_hint }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        ComplexMatrix { dim: self.dim, entries, hermitian_hint: self.hermitian_hint && other.hermitian_hint }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Matrix product `a * b`.
pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.dim, b.dim, "dimension mismatch");
    let n = a.dim;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        let row = &mut out.entries[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a.entries[i * n + k];
            if aik == ZERO {
                continue;
            }
            for (o, bkj) in row.iter_mut().zip(&b.entries[k * n..(k + 1) * n]) {
                *o += aik * bkj;
            }
        }
    }
    out
}

/// LU factorization with partial pivoting, packed in one matrix.
struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

fn lu_decompose(m: &ComplexMatrix) -> Result<Lu> {
    let n = m.dim;
    let scale = m.max_abs();
    if scale == 0.0 {
        return Err(Error::Singular);
    }
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| lu[(x, k)].norm().total_cmp(&lu[(y, k)].norm()))
            .expect("non-empty column");
        if lu[(p, k)].norm() <= 1e-13 * scale {
            return Err(Error::Singular);
        }
        if p != k {
            for j in 0..n {
                lu.entries.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            if factor == ZERO {
                continue;
            }
            for j in k + 1..n {
                let ukj = lu[(k, j)];
                lu[(i, j)] -= factor * ukj;
            }
        }
    }
    Ok(Lu { lu, perm })
}

/// Inverse via LU with partial pivoting.
pub fn mat_inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.dim;
    let Lu { lu, perm } = lu_decompose(m)?;
    let mut inv = ComplexMatrix::zeros(n);
    let mut col = vec![ZERO; n];
    for c in 0..n {
        for (i, x) in col.iter_mut().enumerate() {
            *x = if perm[i] == c { ONE } else { ZERO };
        }
        for i in 0..n {
            let mut s = col[i];
            for j in 0..i {
                s -= lu[(i, j)] * col[j];
            }
            col[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = col[i];
            for j in i + 1..n {
                s -= lu[(i, j)] * col[j];
            }
            col[i] = s / lu[(i, i)];
        }
        for i in 0..n {
            inv[(i, c)] = col[i];
        }
    }
    let residual = mat_mul(m, &inv).sub(&ComplexMatrix::identity(n)).max_abs();
    if !residual.is_finite() || residual > 1e-6 {
        return Err(Error::Singular);
    }
    Ok(inv)
}

/// Determinant via LU; zero for numerically singular input.
pub fn determinant(m: &ComplexMatrix) -> Complex64 {
    match lu_decompose(m) {
        Err(_) => ZERO,
        Ok(Lu { lu, perm }) => {
            let mut det = ONE;
            for i in 0..m.dim {
                det *= lu[(i, i)];
            }
            let mut visited = vec![false; perm.len()];
            for start in 0..perm.len() {
                if visited[start] {
                    continue;
                }
                let mut len = 0;
                let mut i = start;
                while !visited[i] {
                    visited[i] = true;
                    i = perm[i];
                    len += 1;
                }
                if len % 2 == 0 {
                    det = -det;
                }
            }
            det
        }
    }
}
