//! Compressed sparse rows, sparse products, and the direct/iterative solvers
//! behind every linear system in the crate.

use crate::error::{FsiError, Result};
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};

/// Triplet accumulator; duplicate entries are summed on conversion.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, val: f64) {
        debug_assert!(row < self.nrows && col < self.ncols, "({row},{col}) out of range");
        if val != 0.0 {
            self.entries.push((row, col, val));
        }
    }

    /// Adds every entry of `m` shifted by (`r0`, `c0`), scaled by `s`.
    pub fn push_block(&mut self, r0: usize, c0: usize, m: &Csr, s: f64) {
        for r in 0..m.nrows {
            for k in m.indptr[r]..m.indptr[r + 1] {
                self.push(r0 + r, c0 + m.indices[k], s * m.data[k]);
            }
        }
    }

    pub fn build(self) -> Csr {
        Csr::from_triplets(self.nrows, self.ncols, self.entries)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<f64>,
}

impl Csr {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: d.to_vec(),
        }
    }

    pub fn from_triplets(nrows: usize, ncols: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut data: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                data.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Self {
            nrows,
            ncols,
            indptr,
            indices,
            data,
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.indices[k], self.data[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).filter(|&(j, _)| j == c).map(|(_, v)| v).sum()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.indptr[r]..self.indptr[r + 1] {
                s += self.data[k] * x[self.indices[k]];
            }
            *yr = s;
        }
    }

    /// `y += s * A x`
    pub fn matvec_add(&self, x: &[f64], s: f64, y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[k] * x[self.indices[k]];
            }
            *yr += s * acc;
        }
    }

    pub fn transpose(&self) -> Csr {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                t.push((c, r, v));
            }
        }
        Csr::from_triplets(self.ncols, self.nrows, t)
    }

    pub fn matmul(&self, b: &Csr) -> Csr {
        assert_eq!(self.ncols, b.nrows, "matmul shape");
        let mut acc = vec![0.0; b.ncols];
        let mut mark = vec![usize::MAX; b.ncols];
        let mut cols: Vec<usize> = Vec::new();
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for r in 0..self.nrows {
            cols.clear();
            for (k, av) in self.row(r) {
                for (c, bv) in b.row(k) {
                    if mark[c] != r {
                        mark[c] = r;
                        acc[c] = 0.0;
                        cols.push(c);
                    }
                    acc[c] += av * bv;
                }
            }
            cols.sort_unstable();
            for &c in &cols {
                if acc[c] != 0.0 {
                    indices.push(c);
                    data.push(acc[c]);
                }
            }
            indptr[r + 1] = indices.len();
        }
        Csr {
            nrows: self.nrows,
            ncols: b.ncols,
            indptr,
            indices,
            data,
        }
    }

    /// `a*self + b*other`
    pub fn add(&self, a: f64, other: &Csr, b: f64) -> Csr {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                t.push((r, c, a * v));
            }
            for (c, v) in other.row(r) {
                t.push((r, c, b * v));
            }
        }
        Csr::from_triplets(self.nrows, self.ncols, t)
    }

    pub fn scale(&self, s: f64) -> Csr {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|v| *v *= s);
        m
    }

    /// Rows listed in `rows` (in that order), all columns.
    pub fn select_rows(&self, rows: &[usize]) -> Csr {
        let mut t = Vec::new();
        for (ri, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                t.push((ri, c, v));
            }
        }
        Csr::from_triplets(rows.len(), self.ncols, t)
    }

    /// Restriction to the given row and column index sets.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Csr {
        let mut map = vec![usize::MAX; self.ncols];
        for (ci, &c) in cols.iter().enumerate() {
            map[c] = ci;
        }
        let mut t = Vec::new();
        for (ri, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                if map[c] != usize::MAX {
                    t.push((ri, map[c], v));
                }
            }
        }
        Csr::from_triplets(rows.len(), cols.len(), t)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// Max |A - A^T| relative to max |A|.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        let d = self.add(1.0, &t, -1.0);
        let num = d.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let den = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, row) in d.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] += v;
            }
        }
        d
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                t.push(Triplet::new(r, c, v));
            }
        }
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &t).map_err(|e| {
            FsiError::Solver {
                context: format!("sparse conversion: {e:?}"),
                residual: f64::NAN,
                iterations: 0,
            }
        })
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub trait Preconditioner: Send + Sync {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

pub struct IdentityPrecond;

impl Preconditioner for IdentityPrecond {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

pub struct Jacobi {
    inv_diag: Vec<f64>,
}

impl Jacobi {
    pub fn new(a: &Csr) -> Self {
        let inv_diag = a
            .diagonal()
            .into_iter()
            .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
            .collect();
        Self { inv_diag }
    }
}

impl Preconditioner for Jacobi {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * di;
        }
    }
}

/// Zero-fill incomplete LU on the sparsity pattern of the matrix.
pub struct Ilu0 {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    lu: Vec<f64>,
    diag_pos: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &Csr) -> Result<Self> {
        let n = a.nrows;
        let indptr = a.indptr.clone();
        let indices = a.indices.clone();
        let mut lu = a.data.clone();
        let mut diag_pos = vec![usize::MAX; n];
        for r in 0..n {
            for k in indptr[r]..indptr[r + 1] {
                if indices[k] == r {
                    diag_pos[r] = k;
                }
            }
            if diag_pos[r] == usize::MAX {
                return Err(FsiError::Solver {
                    context: format!("ILU(0): missing diagonal in row {r}"),
                    residual: f64::NAN,
                    iterations: 0,
                });
            }
        }
        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            for k in indptr[i]..indptr[i + 1] {
                pos[indices[k]] = k;
            }
            for k in indptr[i]..indptr[i + 1] {
                let j = indices[k];
                if j >= i {
                    break;
                }
                let piv = lu[diag_pos[j]];
                if piv == 0.0 {
                    continue;
                }
                lu[k] /= piv;
                let lij = lu[k];
                for kk in (diag_pos[j] + 1)..indptr[j + 1] {
                    let c = indices[kk];
                    let p = pos[c];
                    if p != usize::MAX {
                        lu[p] -= lij * lu[kk];
                    }
                }
            }
            for k in indptr[i]..indptr[i + 1] {
                pos[indices[k]] = usize::MAX;
            }
            if lu[diag_pos[i]] == 0.0 {
                lu[diag_pos[i]] = 1e-12;
            }
        }
        Ok(Self {
            n,
            indptr,
            indices,
            lu,
            diag_pos,
        })
    }
}

impl Preconditioner for Ilu0 {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
        for i in 0..self.n {
            let mut s = z[i];
            for k in self.indptr[i]..self.diag_pos[i] {
                s -= self.lu[k] * z[self.indices[k]];
            }
            z[i] = s;
        }
        for i in (0..self.n).rev() {
            let mut s = z[i];
            for k in (self.diag_pos[i] + 1)..self.indptr[i + 1] {
                s -= self.lu[k] * z[self.indices[k]];
            }
            z[i] = s / self.lu[self.diag_pos[i]];
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IterStats {
    pub iterations: usize,
    pub residual: f64,
}

fn fail(context: &str, residual: f64, iterations: usize) -> FsiError {
    FsiError::Solver {
        context: context.to_string(),
        residual,
        iterations,
    }
}

/// Preconditioned conjugate gradients; `tol` is relative to ||b||.
pub fn pcg(
    a: &Csr,
    b: &[f64],
    x: &mut [f64],
    m: &dyn Preconditioner,
    tol: f64,
    max_iter: usize,
) -> Result<IterStats> {
    let n = b.len();
    let bnorm = norm2(b).max(f64::MIN_POSITIVE);
    let mut r = b.to_vec();
    a.matvec_add(x, -1.0, &mut r);
    let mut z = vec![0.0; n];
    m.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        let res = norm2(&r) / bnorm;
        if res <= tol {
            return Ok(IterStats {
                iterations: it,
                residual: res,
            });
        }
        a.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(fail("pcg: matrix not positive definite", res, it));
        }
        let alpha = rz / pap;
        axpy(alpha, &p, x);
        axpy(-alpha, &ap, &mut r);
        m.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    let res = norm2(&r) / bnorm;
    if res <= tol {
        Ok(IterStats {
            iterations: max_iter,
            residual: res,
        })
    } else {
        Err(fail("pcg", res, max_iter))
    }
}

/// Right-preconditioned BiCGSTAB.
pub fn bicgstab(
    a: &Csr,
    b: &[f64],
    x: &mut [f64],
    m: &dyn Preconditioner,
    tol: f64,
    max_iter: usize,
) -> Result<IterStats> {
    let n = b.len();
    let bnorm = norm2(b).max(f64::MIN_POSITIVE);
    let mut r = b.to_vec();
    a.matvec_add(x, -1.0, &mut r);
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut phat = vec![0.0; n];
    let mut shat = vec![0.0; n];
    let mut t = vec![0.0; n];
    for it in 0..max_iter {
        let res = norm2(&r) / bnorm;
        if res <= tol {
            return Ok(IterStats {
                iterations: it,
                residual: res,
            });
        }
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 {
            return Err(fail("bicgstab breakdown", res, it));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        m.apply(&p, &mut phat);
        a.matvec_into(&phat, &mut v);
        alpha = rho / dot(&r0, &v);
        let mut s = r.clone();
        axpy(-alpha, &v, &mut s);
        if norm2(&s) / bnorm <= tol {
            axpy(alpha, &phat, x);
            return Ok(IterStats {
                iterations: it + 1,
                residual: norm2(&s) / bnorm,
            });
        }
        m.apply(&s, &mut shat);
        a.matvec_into(&shat, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        axpy(alpha, &phat, x);
        axpy(omega, &shat, x);
        r = s;
        axpy(-omega, &t, &mut r);
        if omega == 0.0 {
            return Err(fail("bicgstab stagnation", norm2(&r) / bnorm, it));
        }
    }
    let res = norm2(&r) / bnorm;
    if res <= tol {
        Ok(IterStats {
            iterations: max_iter,
            residual: res,
        })
    } else {
        Err(fail("bicgstab", res, max_iter))
    }
}

/// Restarted, right-preconditioned GMRES(m).
pub fn gmres(
    a: &Csr,
    b: &[f64],
    x: &mut [f64],
    m: &dyn Preconditioner,
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> Result<IterStats> {
    let n = b.len();
    let bnorm = norm2(b).max(f64::MIN_POSITIVE);
    let mut total = 0usize;
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n];
    loop {
        let mut r = b.to_vec();
        a.matvec_add(x, -1.0, &mut r);
        let beta = norm2(&r);
        if beta / bnorm <= tol {
            return Ok(IterStats {
                iterations: total,
                residual: beta / bnorm,
            });
        }
        if total >= max_iter {
            return Err(fail("gmres", beta / bnorm, total));
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut zs: Vec<Vec<f64>> = Vec::new();
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let (mut cs, mut sn) = (vec![0.0; restart], vec![0.0; restart]);
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..restart {
            m.apply(&basis[k], &mut z);
            zs.push(z.clone());
            a.matvec_into(&z, &mut w);
            for (i, q) in basis.iter().enumerate() {
                h[i][k] = dot(&w, q);
                axpy(-h[i][k], q, &mut w);
            }
            h[k + 1][k] = norm2(&w);
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let den = (h[k][k] * h[k][k] + h[k + 1][k] * h[k + 1][k]).sqrt();
            if den == 0.0 {
                k_used = k;
                break;
            }
            cs[k] = h[k][k] / den;
            sn[k] = h[k + 1][k] / den;
            let hk1 = h[k + 1][k];
            h[k][k] = cs[k] * h[k][k] + sn[k] * hk1;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k_used = k + 1;
            let next: Vec<f64> = w.iter().map(|v| v / hk1.max(f64::MIN_POSITIVE)).collect();
            basis.push(next);
            if g[k + 1].abs() / bnorm <= tol || total >= max_iter {
                break;
            }
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in (i + 1)..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (yi, zi) in y.iter().zip(&zs) {
            axpy(*yi, zi, x);
        }
        if k_used == 0 {
            return Err(fail("gmres breakdown", beta / bnorm, total));
        }
    }
}

/// Sparse LU factorization (fill-reducing ordering chosen by faer).
pub struct DirectSolver {
    lu: Lu<usize, f64>,
    n: usize,
}

impl DirectSolver {
    pub fn new(a: &Csr) -> Result<Self> {
        if a.nrows != a.ncols {
            return Err(FsiError::Dimension {
                what: "square system",
                expected: a.nrows,
                got: a.ncols,
            });
        }
        let m = a.to_faer()?;
        let lu = m.sp_lu().map_err(|e| FsiError::Solver {
            context: format!("sparse LU: {e:?}"),
            residual: f64::NAN,
            iterations: 0,
        })?;
        Ok(Self { lu, n: a.nrows })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        use faer::prelude::Solve;
        let mut rhs = faer::Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_in_place(rhs.as_mut());
        (0..self.n).map(|i| rhs[(i, 0)]).collect()
    }
}

/// Which Krylov method the iterative branch uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Krylov {
    Cg,
    BiCgStab,
    Gmres,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Grids with at most this many cells use sparse LU.
    pub direct_max_cells: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            direct_max_cells: 128 * 128,
            tol: 1e-10,
            max_iter: 20_000,
        }
    }
}

enum Backend {
    Direct(DirectSolver),
    Iterative {
        method: Krylov,
        precond: Box<dyn Preconditioner>,
    },
}

/// A factorized or preconditioned operator ready for repeated solves.
pub struct LinearSolver {
    a: Csr,
    backend: Backend,
    opts: SolverOptions,
    context: &'static str,
}

impl LinearSolver {
    /// Chooses the direct path when `cells <= opts.direct_max_cells`.
    pub fn new(
        a: Csr,
        cells: usize,
        method: Krylov,
        precond: Option<Box<dyn Preconditioner>>,
        opts: SolverOptions,
        context: &'static str,
    ) -> Result<Self> {
        let backend = if cells <= opts.direct_max_cells {
            Backend::Direct(DirectSolver::new(&a)?)
        } else {
            let precond = match precond {
                Some(p) => p,
                None => Box::new(Ilu0::new(&a)?) as Box<dyn Preconditioner>,
            };
            Backend::Iterative { method, precond }
        };
        Ok(Self {
            a,
            backend,
            opts,
            context,
        })
    }

    pub fn matrix(&self) -> &Csr {
        &self.a
    }

    pub fn is_direct(&self) -> bool {
        matches!(self.backend, Backend::Direct(_))
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match &self.backend {
            Backend::Direct(d) => {
                let x = d.solve(b);
                if x.iter().all(|v| v.is_finite()) {
                    Ok(x)
                } else {
                    Err(FsiError::Solver {
                        context: self.context.to_string(),
                        residual: f64::NAN,
                        iterations: 0,
                    })
                }
            }
            Backend::Iterative { method, precond } => {
                let mut x = vec![0.0; b.len()];
                if norm2(b) == 0.0 {
                    return Ok(x);
                }
                let r = match method {
                    Krylov::Cg => pcg(&self.a, b, &mut x, precond.as_ref(), self.opts.tol, self.opts.max_iter),
                    Krylov::BiCgStab => bicgstab(&self.a, b, &mut x, precond.as_ref(), self.opts.tol, self.opts.max_iter),
                    Krylov::Gmres => gmres(&self.a, b, &mut x, precond.as_ref(), self.opts.tol, 60, self.opts.max_iter),
                };
                r.map_err(|e| match e {
                    FsiError::Solver { residual, iterations, .. } => FsiError::Solver {
                        context: self.context.to_string(),
                        residual,
                        iterations,
                    },
                    other => other,
                })?;
                Ok(x)
            }
        }
    }

    /// Relative residual ||b - A x|| / ||b||.
    pub fn residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let mut r = b.to_vec();
        self.a.matvec_add(x, -1.0, &mut r);
        norm2(&r) / norm2(b).max(f64::MIN_POSITIVE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lap1d(n: usize) -> Csr {
        let mut t = TripletBuilder::new(n, n);
        for i in 0..n {
            t.push(i, i, 2.0);
            if i > 0 {
                t.push(i, i - 1, -1.0);
            }
            if i + 1 < n {
                t.push(i, i + 1, -1.0);
            }
        }
        t.build()
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = Csr::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 0, 2.0), (1, 0, 1.0)]);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn matmul_and_transpose() {
        let a = lap1d(5);
        let i = Csr::identity(5);
        assert_eq!(a.matmul(&i), a);
        assert_eq!(a.transpose(), a);
        assert_eq!(a.asymmetry(), 0.0);
    }

    #[test]
    fn solvers_agree() {
        let n = 40;
        let a = lap1d(n);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let x_direct = DirectSolver::new(&a).unwrap().solve(&b);
        let mut x_cg = vec![0.0; n];
        pcg(&a, &b, &mut x_cg, &Jacobi::new(&a), 1e-13, 1000).unwrap();
        let mut x_bi = vec![0.0; n];
        bicgstab(&a, &b, &mut x_bi, &Ilu0::new(&a).unwrap(), 1e-13, 1000).unwrap();
        let mut x_gm = vec![0.0; n];
        gmres(&a, &b, &mut x_gm, &IdentityPrecond, 1e-13, 15, 5000).unwrap();
        for i in 0..n {
            assert!((x_direct[i] - x_cg[i]).abs() < 1e-9);
            assert!((x_direct[i] - x_bi[i]).abs() < 1e-9);
            assert!((x_direct[i] - x_gm[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn ilu0_exact_on_tridiagonal() {
        let a = lap1d(10);
        let p = Ilu0::new(&a).unwrap();
        let b = vec![1.0; 10];
        let mut z = vec![0.0; 10];
        p.apply(&b, &mut z);
        let r = sub(&a.matvec(&z), &b);
        assert!(norm_inf(&r) < 1e-12);
    }
}
