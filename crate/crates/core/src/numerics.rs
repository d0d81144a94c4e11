//! Dense real linear algebra: symmetric eigensolvers and determinants.
//!
//! Two symmetric eigensolvers are provided. [`symm_eigen`] is a cyclic
//! Jacobi method returning the full decomposition; it is used for the
//! N×N fermion problems (N ≤ a few hundred). [`symm_ground_state`] reduces
//! to tridiagonal form with Householder reflections, runs implicit QL for
//! the spectrum and recovers only the lowest eigenvector by inverse
//! iteration, which is what the exact-diagonalization blocks (dimension up
//! to 2^13) need.

use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;
const QL_MAX_ITER: usize = 60;

/// Square real symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Validates shape and exact symmetry of `data`.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("matrix dimension must be at least 1".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::Input(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        for i in 0..dim {
            for j in 0..i {
                if data[i * dim + j] != data[j * dim + i] {
                    return Err(Error::Input(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from the lower triangle produced by `f(i, j)` with
    /// `j <= i`, mirroring it into the upper triangle.
    pub fn from_lower_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let v = f(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Self { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_lower_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|x| !x.is_finite()) {
            Some(k) => Err(Error::Input(format!(
                "non-finite matrix entry at ({}, {})",
                k / self.dim,
                k % self.dim
            ))),
            None => Ok(()),
        }
    }
}

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Eigenvector `k` occupies `vectors[k*dim..(k+1)*dim]`.
    vectors: Vec<f64>,
    dim: usize,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenvector belonging to `eigenvalues[k]`.
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    /// Component `i` of eigenvector `k`, i.e. entry `(i, k)` of the matrix
    /// whose columns are the eigenvectors.
    pub fn component(&self, i: usize, k: usize) -> f64 {
        self.vectors[k * self.dim + i]
    }
}

/// Cyclic Jacobi diagonalization of a real symmetric matrix.
///
/// Output is deterministic: rotations sweep in fixed (p, q) order, pairs are
/// sorted ascending with index tie-break, and each eigenvector is signed so
/// its first non-negligible component is positive.
pub fn symm_eigen(m: &SymMatrix) -> Result<EigenDecomposition> {
    m.check_finite()?;
    let n = m.dim;
    let mut a = m.data.clone();
    // rows of `v` are the eigenvectors, so rotations touch contiguous memory
    let mut v = SymMatrix::identity(n).data;

    let total: f64 = a.iter().map(|x| x * x).sum();
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..i {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        s
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= (f64::EPSILON * f64::EPSILON) * total || off == 0.0 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Convergence {
                sweeps,
                residual: off.sqrt(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // skip rotations that can no longer change the diagonal
                let g = 100.0 * apq.abs();
                if sweeps > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate_rows(&mut a, n, p, q, c, s);
                for k in 0..n {
                    if k != p && k != q {
                        a[k * n + p] = a[p * n + k];
                        a[k * n + q] = a[q * n + k];
                    }
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                rotate_rows(&mut v, n, p, q, c, s);
            }
        }
    }

    let eigenvalues: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    Ok(sorted_decomposition(n, eigenvalues, v))
}

fn rotate_rows(a: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = a.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for (x, y) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

fn sorted_decomposition(n: usize, eigenvalues: Vec<f64>, rows: Vec<f64>) -> EigenDecomposition {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]).then(i.cmp(&j)));
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        let mut vec = rows[k * n..(k + 1) * n].to_vec();
        fix_sign(&mut vec);
        vectors.extend_from_slice(&vec);
    }
    EigenDecomposition {
        eigenvalues: order.iter().map(|&k| eigenvalues[k]).collect(),
        vectors,
        dim: n,
    }
}

/// Flips `v` so that its first component above 1e-12 in magnitude is positive.
pub fn fix_sign(v: &mut [f64]) {
    if let Some(&x) = v.iter().find(|x| x.abs() > 1e-12) {
        if x < 0.0 {
            v.iter_mut().for_each(|y| *y = -*y);
        }
    }
}

/// Full spectrum (ascending) plus the normalized eigenvector of the lowest
/// eigenvalue, via Householder tridiagonalization and implicit QL.
///
/// The eigenvector obeys the same sign convention as [`symm_eigen`].
pub fn symm_ground_state(m: &SymMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    m.check_finite()?;
    let n = m.dim;
    if n == 1 {
        return Ok((vec![m.data[0]], vec![1.0]));
    }
    let tri = tridiagonalize(m);
    let mut eigenvalues = tri.diag.clone();
    let mut off = tri.sub[1..].to_vec();
    off.push(0.0);
    tridiagonal_ql(&mut eigenvalues, &mut off)?;
    eigenvalues.sort_by(f64::total_cmp);

    let mut y = tridiagonal_inverse_iteration(&tri.diag, &tri.sub, eigenvalues[0]);
    // back-transform: apply the reflector with the smallest support first
    for (u, h) in tri.reflectors.iter() {
        if *h == 0.0 {
            continue;
        }
        let k = u.len();
        let dot: f64 = u.iter().zip(&y[..k]).map(|(a, b)| a * b).sum::<f64>() / h;
        for (yi, ui) in y[..k].iter_mut().zip(u) {
            *yi -= dot * ui;
        }
    }
    let norm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
    y.iter_mut().for_each(|x| *x /= norm);
    fix_sign(&mut y);
    Ok((eigenvalues, y))
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `sub[i]` couples rows `i` and `i - 1`; `sub[0]` is unused.
    sub: Vec<f64>,
    /// Reflector for row `i` is stored at position `i - 2` as (u, h) with
    /// P = I - u u^T / h acting on the first `i` coordinates.
    reflectors: Vec<(Vec<f64>, f64)>,
}

fn tridiagonalize(m: &SymMatrix) -> Tridiagonal {
    let n = m.dim;
    let mut a = m.data.clone();
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![0.0; n];

    for i in (1..n).rev() {
        let l = i - 1;
        diag[i] = a[i * n + i];
        let row = &a[i * n..i * n + i];
        let scale: f64 = row.iter().map(|x| x.abs()).sum();
        if l == 0 || scale == 0.0 {
            sub[i] = a[i * n + l];
            if l > 0 {
                reflectors.push((vec![0.0; i], 0.0));
            }
            continue;
        }
        let mut u: Vec<f64> = row.iter().map(|x| x / scale).collect();
        let sigma: f64 = u.iter().map(|x| x * x).sum();
        let f = u[l];
        let g = if f >= 0.0 {
            -sigma.sqrt()
        } else {
            sigma.sqrt()
        };
        let h = sigma - f * g;
        u[l] = f - g;
        sub[i] = scale * g;

        // p = A u / h over the leading i×i block, lower triangle only
        let p = &mut p[..i];
        p.iter_mut().for_each(|x| *x = 0.0);
        for j in 0..i {
            let rj = &a[j * n..j * n + j];
            let mut acc = a[j * n + j] * u[j];
            let uj = u[j];
            for (k, (&ajk, &uk)) in rj.iter().zip(&u[..j]).enumerate() {
                acc += ajk * uk;
                p[k] += ajk * uj;
            }
            p[j] += acc;
        }
        p.iter_mut().for_each(|x| *x /= h);
        let kk = u.iter().zip(p.iter()).map(|(a, b)| a * b).sum::<f64>() / (2.0 * h);
        for (pj, uj) in p.iter_mut().zip(&u) {
            *pj -= kk * uj;
        }
        // rank-2 update A -= q u^T + u q^T on the lower triangle
        for j in 0..i {
            let (qj, uj) = (p[j], u[j]);
            let rj = &mut a[j * n..j * n + j + 1];
            for (k, ajk) in rj.iter_mut().enumerate() {
                *ajk -= qj * u[k] + uj * p[k];
            }
        }
        reflectors.push((u, h));
    }
    diag[0] = a[0];
    // pushed for i = n-1 down to 2; reverse so index i-2 holds row i
    reflectors.reverse();
    Tridiagonal {
        diag,
        sub,
        reflectors,
    }
}

/// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix.
/// `d` holds the diagonal, `e[i]` couples `i` and `i + 1`. Eigenvalues are
/// left in `d` (unsorted).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == QL_MAX_ITER {
                return Err(Error::Convergence {
                    sweeps: iter,
                    residual: e[l].abs(),
                });
            }
            iter += 1;
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

/// Eigenvector of the tridiagonal matrix for eigenvalue estimate `mu`.
fn tridiagonal_inverse_iteration(diag: &[f64], sub: &[f64], mu: f64) -> Vec<f64> {
    let n = diag.len();
    let scale = diag
        .iter()
        .chain(sub.iter())
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let shift = mu - 1e-10 * scale;
    let mut x = vec![1.0; n];
    for _ in 0..3 {
        x = solve_shifted_tridiagonal(diag, sub, shift, &x, scale);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    x
}

/// Solves (T - shift) x = b by Gaussian elimination with partial pivoting.
fn solve_shifted_tridiagonal(
    diag: &[f64],
    sub: &[f64],
    shift: f64,
    b: &[f64],
    scale: f64,
) -> Vec<f64> {
    let n = diag.len();
    // row i of the upper factor: u0[i] on the diagonal, u1[i], u2[i] to the right
    let mut u0 = vec![0.0; n];
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    let mut rhs = b.to_vec();

    // current working row i: (cur_d, cur_e) at columns i, i+1
    let mut cur_d = diag[0] - shift;
    let mut cur_e = if n > 1 { sub[1] } else { 0.0 };
    let mut cur_f = 0.0;
    for i in 0..n {
        if i + 1 == n {
            u0[i] = if cur_d.abs() < f64::EPSILON * scale {
                f64::EPSILON * scale
            } else {
                cur_d
            };
            break;
        }
        // next row i+1 has entries sub[i+1] at column i, diag-shift at i+1, sub[i+2] at i+2
        let nl = sub[i + 1];
        let nd = diag[i + 1] - shift;
        let ne = if i + 2 < n { sub[i + 2] } else { 0.0 };
        if nl.abs() > cur_d.abs() {
            // swap rows i and i+1
            u0[i] = nl;
            u1[i] = nd;
            u2[i] = ne;
            rhs.swap(i, i + 1);
            let factor = cur_d / nl;
            cur_d = cur_e - factor * nd;
            cur_e = cur_f - factor * ne;
            rhs[i + 1] -= factor * rhs[i];
        } else {
            let piv = if cur_d.abs() < f64::EPSILON * scale {
                f64::EPSILON * scale
            } else {
                cur_d
            };
            u0[i] = piv;
            u1[i] = cur_e;
            u2[i] = cur_f;
            let factor = nl / piv;
            cur_d = nd - factor * cur_e;
            cur_e = ne - factor * cur_f;
            rhs[i + 1] -= factor * rhs[i];
        }
        cur_f = 0.0;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = rhs[i];
        if i + 1 < n {
            v -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            v -= u2[i] * x[i + 2];
        }
        x[i] = v / u0[i];
    }
    x
}

/// General square real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Input(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
}

/// Determinant by LU elimination with partial pivoting. Row swaps flip the
/// sign exactly; an empty matrix has determinant 1.
pub fn determinant(m: &Matrix) -> Result<f64> {
    if m.rows != m.cols {
        return Err(Error::Input(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    if let Some(k) = m.data.iter().position(|x| !x.is_finite()) {
        return Err(Error::Input(format!(
            "non-finite matrix entry at index {k}"
        )));
    }
    let n = m.rows;
    let mut a = m.data.clone();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i * n + col]
                    .abs()
                    .total_cmp(&a[j * n + col].abs())
                    .then(j.cmp(&i))
            })
            .expect("non-empty pivot range");
        if a[pivot * n + col] == 0.0 {
            return Ok(0.0);
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            if factor == 0.0 {
                continue;
            }
            for k in col + 1..n {
                a[r * n + k] -= factor * a[col * n + k];
            }
        }
    }
    Ok(det)
}
