//! Solvers for the reduced symmetric positive definite system.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::sparse::SparseSymmetric;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Cholesky,
    Cg,
}

/// Systems larger than this use conjugate gradients when no solver is chosen.
pub const DIRECT_SOLVER_LIMIT: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// `None` picks Cholesky up to [`DIRECT_SOLVER_LIMIT`] unknowns, CG beyond.
    pub kind: Option<SolverKind>,
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { kind: None, tol: 1e-12, max_iterations: 100_000 }
    }
}

impl SolverOptions {
    pub fn resolve(&self, n: usize) -> SolverKind {
        self.kind.unwrap_or(if n <= DIRECT_SOLVER_LIMIT { SolverKind::Cholesky } else { SolverKind::Cg })
    }
}

pub fn solve(a: &SparseSymmetric, b: &[f64], opts: &SolverOptions) -> Result<Vec<f64>> {
    match opts.resolve(a.dim()) {
        SolverKind::Cholesky => solve_cholesky(a, b),
        SolverKind::Cg => solve_pcg(a, b, opts.tol, opts.max_iterations).map(|(x, _)| x),
    }
}

/// Sparse Cholesky factorisation (fill-reducing ordering, supernodal) and solve.
pub fn solve_cholesky(a: &SparseSymmetric, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    assert_eq!(b.len(), n, "right-hand side length mismatch");
    if n == 0 {
        return Ok(Vec::new());
    }
    let triplets: Vec<Triplet<usize, usize, f64>> = a.lower_triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|_| Error::InvalidArgument("could not build sparse matrix".into()))?;
    let llt = mat.sp_cholesky(Side::Lower).map_err(|_| Error::NotPositiveDefinite)?;
    let rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
    let x = llt.solve(&rhs);
    let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(out)
}

/// Jacobi-preconditioned conjugate gradients. Stops when
/// `||b - A x|| <= tol ||b||`; returns the iterate and iteration count.
pub fn solve_pcg(a: &SparseSymmetric, b: &[f64], tol: f64, max_iterations: usize) -> Result<(Vec<f64>, usize)> {
    let n = a.dim();
    assert_eq!(b.len(), n, "right-hand side length mismatch");
    let diag = a.diagonal();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::NotPositiveDefinite);
    }
    let inv_diag: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();

    let b_norm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut residual = 1.0;
    for it in 1..=max_iterations {
        let ap = a.mul_vec(&p);
        let pap = dot(&p, &ap);
        if pap == 0.0 {
            // the search direction underflowed: no further progress is possible
            return Err(Error::Stagnated { iterations: it, residual });
        }
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        residual = dot(&r, &r).sqrt() / b_norm;
        if residual <= tol {
            return Ok((x, it));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::MaxIterations { iterations: max_iterations, residual })
}
