//! Sparse storage and the preconditioned Krylov solver used by every
//! linear solve in the crate.

use crate::error::{Error, Result};
use faer::prelude::*;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use rayon::prelude::*;

/// Compressed sparse rows. Entries within a row keep insertion order so
/// that row sums are evaluated in a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).filter(|&(c, _)| c == j).map(|(_, v)| v).sum()
    }

    /// `out = self * x`, parallel over rows and bitwise independent of the
    /// number of workers.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        out.par_iter_mut().with_min_len(4096).enumerate().for_each(|(i, o)| {
            let mut s = 0.0;
            for (c, v) in self.row(i) {
                s += v * x[c];
            }
            *o = s;
        });
    }

    /// Copy of the matrix with `shift[i]` added to each diagonal entry.
    pub fn with_diagonal_shift(&self, shift: &[f64]) -> CsrMatrix {
        let mut m = self.clone();
        for (i, &s) in shift.iter().enumerate() {
            let r = m.row_ptr[i]..m.row_ptr[i + 1];
            if let Some(k) = r.clone().find(|&k| m.cols[k] == i) {
                m.vals[k] += s;
            }
        }
        m
    }

    pub fn scaled(&self, s: f64) -> CsrMatrix {
        let mut m = self.clone();
        m.vals.iter_mut().for_each(|v| *v *= s);
        m
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Fixed-size blocks keep the summation order independent of threads.
    a.chunks(1024).zip(b.chunks(1024)).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>()).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Sparse Cholesky factor of the symmetric diagonally dominant companion of
/// an M-matrix `A`: same diagonal, off-diagonals `-min(|a_ij|, |a_ji|)`.
pub struct Preconditioner {
    symbolic: SymbolicLlt<usize>,
    llt: Llt<usize, f64>,
    n: usize,
}

fn companion_triplets(a: &CsrMatrix) -> Vec<Triplet<usize, usize, f64>> {
    let mut t = Vec::with_capacity(a.vals.len() / 2 + a.n);
    for i in 0..a.n {
        for (j, v) in a.row(i) {
            if j == i {
                t.push(Triplet::new(i, i, v));
            } else if j < i {
                let w = a.get(j, i);
                t.push(Triplet::new(i, j, -v.abs().min(w.abs())));
            }
        }
    }
    t
}

impl Preconditioner {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        faer::set_global_parallelism(faer::Par::Seq);
        let p = SparseColMat::<usize, f64>::try_new_from_triplets(a.n, a.n, &companion_triplets(a))
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        let symbolic =
            SymbolicLlt::try_new(p.symbolic(), Side::Lower).map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        let llt = Llt::try_new_with_symbolic(symbolic.clone(), p.as_ref(), Side::Lower)
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        Ok(Preconditioner { symbolic, llt, n: a.n })
    }

    /// Refactor for a matrix with the same sparsity pattern.
    pub fn refactor(&mut self, a: &CsrMatrix) -> Result<()> {
        faer::set_global_parallelism(faer::Par::Seq);
        let p = SparseColMat::<usize, f64>::try_new_from_triplets(a.n, a.n, &companion_triplets(a))
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        self.llt = Llt::try_new_with_symbolic(self.symbolic.clone(), p.as_ref(), Side::Lower)
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        Ok(())
    }

    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        let mut m = Mat::<f64>::from_fn(self.n, 1, |i, _| r[i]);
        self.llt.solve_in_place(m.as_mut());
        for (i, zi) in z.iter_mut().enumerate() {
            *zi = m[(i, 0)];
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KrylovStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Right-preconditioned BiCGSTAB for `A x = b`; `x` holds the initial guess.
pub fn bicgstab(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    m: &Preconditioner,
    rel_tol: f64,
    max_iter: usize,
) -> Result<KrylovStats> {
    let n = a.n;
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(KrylovStats { iterations: 0, relative_residual: 0.0 });
    }
    let mut r = vec![0.0; n];
    a.matvec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut phat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut shat = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut rel = norm(&r) / bnorm;
    for it in 0..max_iter {
        if rel <= rel_tol {
            return Ok(KrylovStats { iterations: it, relative_residual: rel });
        }
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        m.apply(&p, &mut phat);
        a.matvec(&phat, &mut v);
        alpha = rho / dot(&r0, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) / bnorm <= rel_tol {
            for i in 0..n {
                x[i] += alpha * phat[i];
            }
            return Ok(KrylovStats { iterations: it + 1, relative_residual: norm(&s) / bnorm });
        }
        m.apply(&s, &mut shat);
        a.matvec(&shat, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
        rel = norm(&r) / bnorm;
        if omega == 0.0 || !rel.is_finite() {
            break;
        }
    }
    // Recompute the true residual before giving up.
    a.matvec(x, &mut r);
    let true_rel = norm(&b.iter().zip(&r).map(|(p, q)| p - q).collect::<Vec<_>>()) / bnorm;
    if true_rel <= rel_tol {
        return Ok(KrylovStats { iterations: max_iter, relative_residual: true_rel });
    }
    Err(Error::LinearSolve(format!("BiCGSTAB stalled at relative residual {true_rel:e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize, shift: f64, skew: f64) -> CsrMatrix {
        let mut row_ptr = vec![0];
        let (mut cols, mut vals) = (vec![], vec![]);
        for i in 0..n {
            cols.push(i);
            vals.push(2.0 + shift);
            if i > 0 {
                cols.push(i - 1);
                vals.push(-1.0 - skew);
            }
            if i + 1 < n {
                cols.push(i + 1);
                vals.push(-1.0 + skew);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { n, row_ptr, cols, vals }
    }

    #[test]
    fn bicgstab_solves_nonsymmetric_m_matrix() {
        let a = laplacian_1d(200, 0.01, 0.3);
        let xs: Vec<f64> = (0..200).map(|i| (i as f64 * 0.1).sin()).collect();
        let mut b = vec![0.0; 200];
        a.matvec(&xs, &mut b);
        let pc = Preconditioner::new(&a).unwrap();
        let mut x = vec![0.0; 200];
        bicgstab(&a, &b, &mut x, &pc, 1e-13, 500).unwrap();
        let err = x.iter().zip(&xs).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "err {err}");
    }
}
