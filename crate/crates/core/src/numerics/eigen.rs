use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative tolerance on ‖M - M†‖_max for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Householder reduction to real tridiagonal form followed by implicit QL.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let defect = m.hermiticity_defect();
    if !m.hermitian_hint || defect > HERMITIAN_TOL * m.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian(defect));
    }
    let mut a = m.symmetrized();
    let (mut d, mut e) = tridiagonalize(&mut a);
    tql(&mut d, &mut e)?;
    d.sort_by(|x, y| x.total_cmp(y));
    Ok(d)
}

// Returns the real diagonal and the moduli of the off-diagonal.
fn tridiagonalize(a: &mut ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.dim();
    let mut off = vec![0.0; n];
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let x0 = a[(k + 1, k)];
        let tail: f64 = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            off[k] = x0.norm();
            continue;
        }
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        let tau = 2.0 / vnorm2;
        // p = tau * B v on the trailing block B = a[k+1.., k+1..]
        for i in k + 1..n {
            let row = a.row(i);
            let mut s = ZERO;
            for j in k + 1..n {
                s += row[j] * v[j];
            }
            p[i] = s * tau;
        }
        let vp: Complex64 = (k + 1..n).map(|i| v[i].conj() * p[i]).sum();
        let kk = 0.5 * tau * vp.re;
        for i in k + 1..n {
            p[i] -= v[i] * kk;
        }
        for i in k + 1..n {
            let (vi, wi) = (v[i], p[i]);
            for j in k + 1..n {
                let delta = vi * p[j].conj() + wi * v[j].conj();
                a[(i, j)] -= delta;
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = ZERO;
            a[(k, i)] = ZERO;
        }
        off[k] = alpha.norm();
    }
    if n >= 2 {
        off[n - 2] = a[(n - 1, n - 2)].norm();
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    (diag, off)
}

// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix.
// e[i] couples d[i] and d[i + 1].
fn tql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n < 2 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigenNonConvergence(iter));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues of a general complex matrix.
///
/// Householder reduction to Hessenberg form followed by single-shift QR.
pub fn eig_general(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = m.clone();
    hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

fn hessenberg(h: &mut ComplexMatrix) {
    let n = h.dim();
    let mut v = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let tail: f64 = (k + 2..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let norm = (tail + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        for i in k + 1..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] -= alpha;
        let tau = 2.0 / (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>();
        // Left: rows k+1.., columns k..
        for j in k..n {
            let s: Complex64 = (k + 1..n).map(|i| v[i].conj() * h[(i, j)]).sum::<Complex64>() * tau;
            for i in k + 1..n {
                let vi = v[i];
                h[(i, j)] -= vi * s;
            }
        }
        // Right: all rows, columns k+1..
        for i in 0..n {
            let row = h.row(i);
            let s: Complex64 = (k + 1..n).map(|j| row[j] * v[j]).sum::<Complex64>() * tau;
            for j in k + 1..n {
                let vj = v[j].conj();
                h[(i, j)] -= s * vj;
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

// Rotation G = [[c, s], [-s*, c]] with G (a, b)^T = (r, 0)^T.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

fn hessenberg_qr(h: &mut ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.dim();
    let mut eig = vec![ZERO; n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let mut rot = Vec::with_capacity(n);
    let floor = f64::EPSILON * h.max_abs();
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            if h[(l, l - 1)].norm() <= floor || negligible_subdiagonal(h, l, hi) {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > 30 * n.max(10) {
            return Err(Error::EigenNonConvergence(total));
        }
        let mu = if iter.is_multiple_of(11) {
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * 1.5
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        rot.clear();
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rot.push((c, s));
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = l + idx;
            let top = (k + 2).min(hi);
            for i in l..=top {
                let p = h[(i, k)];
                let q = h[(i, k + 1)];
                h[(i, k)] = p * c + s.conj() * q;
                h[(i, k + 1)] = -s * p + q * c;
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    eig[0] = h[(0, 0)];
    Ok(eig)
}

fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

// Local small-subdiagonal test of LAPACK's zlahqr (with the Ahues-Tisseur
// refinement). The caller also deflates below eps·max|H|, which the local
// test never reaches inside clusters of eigenvalues at rounding level.
fn negligible_subdiagonal(h: &ComplexMatrix, k: usize, hi: usize) -> bool {
    let sub = cabs1(h[(k, k - 1)]);
    if sub <= f64::MIN_POSITIVE {
        return true;
    }
    let mut tst = cabs1(h[(k - 1, k - 1)]) + cabs1(h[(k, k)]);
    if tst == 0.0 {
        if k >= 2 {
            tst += h[(k - 1, k - 2)].re.abs();
        }
        if k < hi {
            tst += h[(k + 1, k)].re.abs();
        }
    }
    if sub.abs() > f64::EPSILON * tst {
        return false;
    }
    let sup = cabs1(h[(k - 1, k)]);
    let ab = sub.max(sup);
    let ba = sub.min(sup);
    let diff = cabs1(h[(k - 1, k - 1)] - h[(k, k)]);
    let aa = cabs1(h[(k, k)]).max(diff);
    let bb = cabs1(h[(k, k)]).min(diff);
    let s = aa + ab;
    ba * (ab / s) <= f64::MIN_POSITIVE.max(f64::EPSILON * (bb * (aa / s)))
}

// Eigenvalue of [[a, b], [c, d]] closest to d.
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = 0.5 * (a - d);
    let disc = (half * half + b * c).sqrt();
    let m1 = 0.5 * (a + d) + disc;
    let m2 = 0.5 * (a + d) - disc;
    if (m1 - d).norm() < (m2 - d).norm() { m1 } else { m2 }
}
