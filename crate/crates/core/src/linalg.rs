//! Rank-revealing factorizations and orthogonal maps.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::sampling::random_unit_vector;

/// Singular values below `RANK_CUTOFF * sigma_max` count as zero.
pub const RANK_CUTOFF: f64 = 1e-9;

/// Orthonormal basis of the row space of `rows` (each row a vector of
/// length `dim`), found from the SVD with a relative singular-value cutoff.
pub fn row_space_basis(rows: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return Vec::new();
    }
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > RANK_CUTOFF * sigma_max)
        .map(|(k, _)| v_t.row(k).iter().cloned().collect())
        .collect()
}

pub fn rank(rows: &[Vec<f64>], dim: usize) -> usize {
    row_space_basis(rows, dim).len()
}

/// Orthonormal basis of the orthogonal complement of the row space.
pub fn null_space_basis(rows: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let span = row_space_basis(rows, dim);
    // Complete the span basis with Gram-Schmidt over the standard basis.
    let mut basis = span.clone();
    let mut extra = Vec::new();
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = e.iter().zip(b).map(|(x, y)| x * y).sum();
                e.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let n = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            e.iter_mut().for_each(|x| *x /= n);
            basis.push(e.clone());
            extra.push(e);
        }
        if basis.len() == dim {
            break;
        }
    }
    extra
}

/// Householder reflection `Q` with `Q * from = e_1` for a unit vector `from`.
/// Returns the identity when `from` already equals `e_1`.
pub fn householder_to_e1(from: &[f64]) -> DMatrix<f64> {
    let n = from.len();
    let mut u = DVector::from_column_slice(from);
    u[0] -= 1.0;
    let uu = u.norm_squared();
    if uu < 1e-30 {
        return DMatrix::identity(n, n);
    }
    DMatrix::identity(n, n) - (&u * u.transpose()) * (2.0 / uu)
}

/// Haar-distributed orthogonal matrix from the QR factorization of a
/// Gaussian matrix with sign-corrected diagonal.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = (0..n)
        .map(|_| DVector::from_vec(random_unit_vector(rng, n)))
        .collect();
    let g = DMatrix::from_columns(&cols);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn apply(q: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (q * DVector::from_column_slice(v)).iter().cloned().collect()
}

/// Largest entry of `|Q^T Q - I|`.
pub fn orthogonality_defect(q: &DMatrix<f64>) -> f64 {
    let n = q.ncols();
    (q.transpose() * q - DMatrix::identity(n, n)).amax()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::seeded_rng;

    #[test]
    fn rank_of_antipodal_pair_is_one() {
        let rows = vec![vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]];
        assert_eq!(rank(&rows, 3), 1);
        let null = null_space_basis(&rows, 3);
        assert_eq!(null.len(), 2);
        for v in &null {
            assert!(v[0].abs() < 1e-12);
        }
    }

    #[test]
    fn rank_cutoff_is_relative() {
        let rows = vec![vec![1e6, 0.0], vec![0.0, 1e-4]];
        assert_eq!(rank(&rows, 2), 1);
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1e-8]];
        assert_eq!(rank(&rows, 2), 2);
    }

    #[test]
    fn householder_maps_to_e1() {
        let s = [0.0, -1.0, 0.0];
        let q = householder_to_e1(&s);
        let image = apply(&q, &s);
        assert!((image[0] - 1.0).abs() < 1e-15);
        assert!(image[1].abs() < 1e-15 && image[2].abs() < 1e-15);
        assert!(orthogonality_defect(&q) < 1e-12);
        assert_eq!(householder_to_e1(&[1.0, 0.0]), DMatrix::identity(2, 2));
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = seeded_rng(5);
        for n in 1..6 {
            let q = random_orthogonal(&mut rng, n);
            assert!(orthogonality_defect(&q) < 1e-12);
        }
    }
}
