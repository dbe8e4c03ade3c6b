//! Small dense Hermitian helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// `(A + Aᴴ) / 2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(a).symmetric_eigen();
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `f(A)` for Hermitian `A` via its eigen-decomposition.
pub fn hermitian_fn(a: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, q) = hermitian_eig(a);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|&v| Complex64::new(f(v), 0.0))));
    &q * d * q.adjoint()
}

/// Generalized Hermitian eigenproblem `A v = λ B v` with `B` positive
/// definite. Returns ascending eigenvalues and `V` with `Vᴴ B V = I`.
pub fn generalized_eig(a: &CMatrix, b: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let (bvals, _) = hermitian_eig(b);
    if bvals.first().map_or(true, |&v| !(v > 0.0)) {
        return Err(Error::SingularGram(format!(
            "matrix is not positive definite (smallest eigenvalue {:e})",
            bvals.first().copied().unwrap_or(f64::NAN)
        )));
    }
    let b_inv_half = hermitian_fn(b, |v| 1.0 / v.sqrt());
    let c = &b_inv_half * a * &b_inv_half;
    let (vals, u) = hermitian_eig(&c);
    Ok((vals, b_inv_half * u))
}

/// 2-norm condition number from singular values.
pub fn condition_number(a: &CMatrix) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    let s = a.clone().singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    a.clone().try_inverse().ok_or_else(|| Error::SingularGram("matrix is not invertible".into()))
}

/// Solves `A X = B`.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    a.clone().lu().solve(b).ok_or_else(|| Error::SingularGram("linear system is singular".into()))
}

/// Frobenius norm of `a` relative to that of `reference` (absolute when
/// the reference vanishes).
pub fn relative_diff(a: &CMatrix, reference: &CMatrix) -> f64 {
    let r = reference.norm();
    let d = (a - reference).norm();
    if r > 0.0 {
        d / r
    } else {
        d
    }
}

/// Builds a Hermitian matrix from its packed upper triangle
/// (row-major, `i <= j`).
pub fn unpack_hermitian(n: usize, packed: &[Complex64]) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = packed[k];
            m[(j, i)] = packed[k].conj();
            k += 1;
        }
    }
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn generalized_eig_normalizes_against_b() {
        let a = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.5, 0.5), c(0.5, -0.5), c(3.0, 0.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.1, -0.2), c(0.1, 0.2), c(2.0, 0.0)]);
        let (vals, v) = generalized_eig(&a, &b).unwrap();
        let id = v.adjoint() * &b * &v;
        assert!(relative_diff(&id, &CMatrix::identity(2, 2)) < 1e-13);
        for (k, lam) in vals.iter().enumerate() {
            let col = v.column(k);
            let r = &a * col - (&b * col) * c(*lam, 0.0);
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn square_root_squares_back() {
        let a = CMatrix::from_row_slice(2, 2, &[c(4.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(3.0, 0.0)]);
        let s = hermitian_fn(&a, f64::sqrt);
        assert!(relative_diff(&(&s * &s), &a) < 1e-14);
    }

    #[test]
    fn rejects_indefinite_b() {
        let a = CMatrix::identity(2, 2);
        let b = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!(matches!(generalized_eig(&a, &b), Err(Error::SingularGram(_))));
    }

    #[test]
    fn packed_round_trip() {
        let m = unpack_hermitian(2, &[c(1.0, 0.0), c(2.0, 3.0), c(4.0, 0.0)]);
        assert_eq!(m[(1, 0)], c(2.0, -3.0));
        assert!((condition_number(&CMatrix::identity(3, 3)) - 1.0).abs() < 1e-15);
    }
}
