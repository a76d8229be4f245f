//! Small dense helpers for element-level linear algebra (row-major storage).

use crate::error::{Error, Result};

/// In-place Cholesky factorisation of a symmetric positive definite `n x n`
/// matrix; the lower triangle receives `L` with `A = L L^T`.
pub fn cholesky_in_place(a: &mut [f64], n: usize) -> Result<()> {
    debug_assert_eq!(a.len(), n * n);
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    Ok(())
}

/// Solves `L L^T x = b` in place given the factor from [`cholesky_in_place`].
pub fn cholesky_solve_in_place(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Solves the SPD system `a x = b`, returning `x`.
pub fn spd_solve(a: &[f64], n: usize, b: &[f64], what: &'static str) -> Result<Vec<f64>> {
    let mut l = a.to_vec();
    cholesky_in_place(&mut l, n).map_err(|_| Error::SingularMatrix { what })?;
    let mut x = b.to_vec();
    cholesky_solve_in_place(&l, n, &mut x);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_2x2() {
        let x = spd_solve(&[2.0, 1.0, 1.0, 2.0], 2, &[3.0, 3.0], "test").unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_indefinite() {
        assert!(spd_solve(&[1.0, 2.0, 2.0, 1.0], 2, &[1.0, 1.0], "test").is_err());
    }
}
