//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{GeomError, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

pub fn vector(values: &[f64]) -> Vector {
    DVector::from_column_slice(values)
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let m = rows.len();
    let n = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.iter().any(|r| r.len() != n) {
        return Err(GeomError::MalformedBody("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(a: &Matrix) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect()
}

/// Symmetric square root and inverse square root of an SPD matrix.
pub fn spd_sqrt_pair(m: &Matrix) -> Result<(Matrix, Matrix)> {
    let eig = SymmetricEigen::new(m.clone());
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(GeomError::MalformedBody(
            "ellipsoid shape matrix is not positive definite".into(),
        ));
    }
    let q = &eig.eigenvectors;
    let sqrt = q * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * q.transpose();
    let inv_sqrt =
        q * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt())) * q.transpose();
    Ok((sqrt, inv_sqrt))
}

pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Orthonormal basis of the orthogonal complement of a unit vector, as the
/// columns of an `n × (n-1)` matrix.
pub fn complement_basis(u: &Vector) -> Matrix {
    let n = u.len();
    // Householder reflection mapping e_k to ±u; its other columns span u^⊥.
    let k = u.iamax();
    let sign = if u[k] >= 0.0 { 1.0 } else { -1.0 };
    let mut w = u.clone();
    w[k] += sign;
    let wn2 = w.norm_squared();
    let h = DMatrix::identity(n, n) - (&w * w.transpose()) * (2.0 / wn2);
    let cols: Vec<Vector> = (0..n).filter(|&j| j != k).map(|j| h.column(j).into_owned()).collect();
    DMatrix::from_columns(&cols)
}

/// Determinant of the `n × n` matrix whose rows are given.
pub fn det_rows(rows: &[&Vector]) -> f64 {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j]).determinant()
}

/// Solve a square system, returning `None` when it is numerically singular.
pub fn solve(a: Matrix, b: &Vector) -> Option<Vector> {
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
    let lu = a.lu();
    let d = lu.determinant();
    if d.abs() <= 1e-12 * scale.powi(b.len() as i32) {
        return None;
    }
    lu.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let u = vector(&[0.3, -0.4, 0.5, 0.1]).normalize();
        let b = complement_basis(&u);
        assert_eq!(b.ncols(), 3);
        let g = b.transpose() * &b;
        assert!((g - DMatrix::identity(3, 3)).norm() < 1e-13);
        assert!((b.transpose() * &u).norm() < 1e-13);
    }

    #[test]
    fn spd_roots() {
        let m = matrix_from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let (s, is) = spd_sqrt_pair(&m).unwrap();
        assert!((&s * &s - &m).norm() < 1e-13);
        assert!((&s * &is - DMatrix::identity(2, 2)).norm() < 1e-13);
        let bad = matrix_from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(spd_sqrt_pair(&bad).is_err());
    }
}
