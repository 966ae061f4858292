//! Dense complex matrix helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `exp(2 pi i k / d)`.
pub fn root_of_unity(d: u32, k: u64) -> Complex64 {
    let k = k % d as u64;
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff on different shapes");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `<u|v>` with the first argument conjugated.
pub fn inner(u: &CVector, v: &CVector) -> Complex64 {
    u.dotc(v)
}

/// `<u|m|v>`.
pub fn sandwich(u: &CVector, m: &CMatrix, v: &CVector) -> Complex64 {
    u.dotc(&(m * v))
}

/// Eigen-decomposition of a Hermitian matrix. The input is symmetrized first.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (m + m.adjoint()) * c(0.5);
    let eig = herm.symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// Applies `op` to the last tensor factor of `m`: returns `(I ⊗ op) m (I ⊗ op)^†`.
///
/// `m` has dimension `outer * inner` with `inner = op.nrows()`.
pub fn conjugate_last_factor(m: &CMatrix, op: &CMatrix) -> Result<CMatrix> {
    let inner = op.nrows();
    if !op.is_square() || inner == 0 || m.nrows() % inner != 0 || !m.is_square() {
        return Err(Error::Dimension(format!(
            "cannot apply a {}x{} operator to the last factor of a {}x{} matrix",
            op.nrows(),
            op.ncols(),
            m.nrows(),
            m.ncols()
        )));
    }
    let outer = m.nrows() / inner;
    let op_adj = op.adjoint();
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..outer {
        for j in 0..outer {
            let block = m.view((i * inner, j * inner), (inner, inner));
            let res = op * block * &op_adj;
            out.view_mut((i * inner, j * inner), (inner, inner)).copy_from(&res);
        }
    }
    Ok(out)
}

/// Applies `op` to the last tensor factor of a vector.
pub fn apply_last_factor(v: &CVector, op: &CMatrix) -> Result<CVector> {
    let inner = op.ncols();
    if inner == 0 || v.len() % inner != 0 {
        return Err(Error::Dimension(format!(
            "cannot apply a {}x{} operator to the last factor of a length {} vector",
            op.nrows(),
            op.ncols(),
            v.len()
        )));
    }
    let outer = v.len() / inner;
    let mut out = CVector::zeros(outer * op.nrows());
    for i in 0..outer {
        let seg = v.rows(i * inner, inner);
        let res = op * seg;
        out.rows_mut(i * op.nrows(), op.nrows()).copy_from(&res);
    }
    Ok(out)
}

/// Orthonormal basis of the column space of `m`, by Gram–Schmidt over the columns in order.
pub fn column_space_basis(m: &CMatrix, tol: f64) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::new();
    for col in m.column_iter() {
        let mut v: CVector = col.into_owned();
        // twice for stability
        for _ in 0..2 {
            for b in &basis {
                let p = b.dotc(&v);
                v -= b * p;
            }
        }
        let norm = v.norm();
        if norm > tol {
            basis.push(v / c(norm));
        }
    }
    basis
}

/// Digit expansion of `idx` in the mixed radix `dims` (first factor most significant).
pub(crate) fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (o, &dim) in out.iter_mut().zip(dims).rev() {
        *o = idx % dim;
        idx /= dim;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_last_factor_matches_kron() {
        let a = CMatrix::from_fn(6, 6, |i, j| Complex64::new(i as f64 + 0.5 * j as f64, (i * j) as f64 * 0.1));
        let op = CMatrix::from_fn(3, 3, |i, j| Complex64::new((i + 2 * j) as f64, -(i as f64)));
        let full = kron(&identity(2), &op);
        let expected = &full * &a * full.adjoint();
        assert!(max_abs_diff(&conjugate_last_factor(&a, &op).unwrap(), &expected) < 1e-10);
        let v = CVector::from_fn(6, |i, _| Complex64::new(i as f64, 1.0));
        assert!((apply_last_factor(&v, &op).unwrap() - &full * &v).norm() < 1e-10);
    }

    #[test]
    fn gram_schmidt_drops_dependent_columns() {
        let m = CMatrix::from_row_slice(3, 3, &[c(1.0), c(2.0), c(0.0), c(0.0), c(0.0), c(0.0), c(1.0), c(2.0), c(1.0)]);
        let basis = column_space_basis(&m, 1e-10);
        assert_eq!(basis.len(), 2);
        assert!(inner(&basis[0], &basis[1]).norm() < 1e-12);
    }

    #[test]
    fn digits_are_most_significant_first() {
        assert_eq!(digits(5, &[2, 3]), vec![1, 2]);
    }
}
