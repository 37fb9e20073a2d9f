//! Dense complex linear algebra for small unitary matrices: Householder QR,
//! Hessenberg reduction and a shifted QR eigensolver.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

type C = Complex64;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Matrix {
    pub n: usize,
    pub data: Vec<C>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![C::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C::new(1.0, 0.0);
        }
        m
    }

    /// Entries (x + iy)/√2 with x, y independent standard normals.
    pub fn ginibre(n: usize, rng: &mut impl Rng) -> Self {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let data = (0..n * n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C::new(re * scale, im * scale)
            })
            .collect();
        Matrix { n, data }
    }

    #[cfg(test)]
    pub fn trace(&self) -> C {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// max |(A*A − I)_ij|.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s: C = (0..n).map(|k| self[(k, i)].conj() * self[(k, j)]).sum();
                if i == j {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.n + j]
    }
}

/// Unit v with (I − 2vv*)x = βe₁, |β| = ‖x‖; None when x = 0.
fn householder(x: &[C]) -> Option<(Vec<C>, C)> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C::new(1.0, 0.0) };
    let beta = -phase * norm;
    let mut v = x.to_vec();
    v[0] -= beta;
    let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if vn == 0.0 {
        return None;
    }
    for z in v.iter_mut() {
        *z /= vn;
    }
    Some((v, beta))
}

/// A ← (I − 2vv*)A on rows `off..off+len(v)`, columns `cols`.
fn reflect_rows(a: &mut Matrix, v: &[C], off: usize, cols: std::ops::Range<usize>) {
    for j in cols {
        let dot: C = v.iter().enumerate().map(|(i, vi)| vi.conj() * a[(off + i, j)]).sum();
        for (i, vi) in v.iter().enumerate() {
            a[(off + i, j)] -= 2.0 * vi * dot;
        }
    }
}

/// A ← A(I − 2vv*) on columns `off..off+len(v)`, rows `rows`.
fn reflect_cols(a: &mut Matrix, v: &[C], off: usize, rows: std::ops::Range<usize>) {
    for i in rows {
        let dot: C = v.iter().enumerate().map(|(j, vj)| a[(i, off + j)] * vj).sum();
        for (j, vj) in v.iter().enumerate() {
            a[(i, off + j)] -= 2.0 * dot * vj.conj();
        }
    }
}

/// Q·diag(r_kk/|r_kk|) from the QR factorization of `a`; Haar distributed
/// when `a` is Ginibre.
pub(crate) fn haar_from_qr(mut a: Matrix) -> Matrix {
    let n = a.n;
    let mut q = Matrix::identity(n);
    for k in 0..n {
        let x: Vec<C> = (k..n).map(|i| a[(i, k)]).collect();
        let Some((v, _)) = householder(&x) else { continue };
        reflect_rows(&mut a, &v, k, k..n);
        reflect_cols(&mut q, &v, k, 0..n);
    }
    for k in 0..n {
        let r = a[(k, k)];
        let phase = if r.norm() > 0.0 { r / r.norm() } else { C::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Similarity reduction to upper Hessenberg form.
pub(crate) fn hessenberg(mut a: Matrix) -> Matrix {
    let n = a.n;
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let Some((v, _)) = householder(&x) else { continue };
        reflect_rows(&mut a, &v, k + 1, k..n);
        reflect_cols(&mut a, &v, k + 1, 0..n);
        for i in k + 2..n {
            a[(i, k)] = C::new(0.0, 0.0);
        }
    }
    a
}

/// Eigenvalue of [[a, b], [c, d]] nearer to d.
fn wilkinson_shift(a: C, b: C, c: C, d: C) -> C {
    let half = 0.5 * (a - d);
    let root = (half * half + b * c).sqrt();
    let mid = 0.5 * (a + d);
    let (e1, e2) = (mid + root, mid - root);
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Eigenvalues of an upper Hessenberg matrix by explicitly shifted QR with
/// Givens rotations and deflation.
pub(crate) fn hessenberg_eigenvalues(mut h: Matrix) -> Result<Vec<C>> {
    let n = h.n;
    let mut eig = Vec::with_capacity(n);
    if n == 0 {
        return Ok(eig);
    }
    let budget = 60 * n + 100;
    let mut spent = 0;
    let mut stalled = 0;
    let mut hi = n - 1;
    let mut rot: Vec<(f64, C)> = Vec::with_capacity(n);
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let scale = if scale == 0.0 { 1.0 } else { scale };
            if h[(l, l - 1)].norm() <= f64::EPSILON * scale {
                h[(l, l - 1)] = C::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig.push(h[(hi, hi)]);
            hi -= 1;
            stalled = 0;
            continue;
        }
        spent += 1;
        stalled += 1;
        if spent > budget {
            return Err(Error::LinearAlgebra { dimension: n });
        }
        let mu = if stalled % 11 == 10 {
            h[(hi, hi)] + C::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for i in l..=hi {
            h[(i, i)] -= mu;
        }
        rot.clear();
        for k in l..hi {
            let (a, b) = (h[(k, k)], h[(k + 1, k)]);
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (1.0, C::new(0.0, 0.0))
            } else if a.norm() == 0.0 {
                (0.0, b.conj() / b.norm())
            } else {
                (a.norm() / r, (a / a.norm()) * b.conj() / r)
            };
            for j in k..=hi {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = c * x + s * y;
                h[(k + 1, j)] = -s.conj() * x + c * y;
            }
            rot.push((c, s));
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = l + idx;
            for i in l..=(k + 1).min(hi) {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = c * x + s.conj() * y;
                h[(i, k + 1)] = -s * x + c * y;
            }
        }
        for i in l..=hi {
            h[(i, i)] += mu;
        }
    }
    eig.push(h[(0, 0)]);
    Ok(eig)
}
