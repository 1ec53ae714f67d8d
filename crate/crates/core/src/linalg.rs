//! Dense Hermitian eigendecompositions with ascending eigenvalues.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::C64;

/// Eigenvalues (ascending) and the matching orthonormal eigenvectors as columns.
pub fn eigh(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let e = SymmetricEigen::new(m.clone());
    sort_pairs(e.eigenvalues.as_slice(), &e.eigenvectors)
}

/// Real symmetric variant of [`eigh`].
pub fn eigh_real(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = SymmetricEigen::new(m.clone());
    sort_pairs(e.eigenvalues.as_slice(), &e.eigenvectors)
}

fn sort_pairs<T: nalgebra::Scalar + Copy>(values: &[f64], vectors: &DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted = order.iter().map(|&i| values[i]).collect();
    let columns: Vec<_> = order.iter().map(|&i| vectors.column(i).into_owned()).collect();
    let v = if columns.is_empty() { vectors.clone() } else { DMatrix::from_columns(&columns) };
    (sorted, v)
}
