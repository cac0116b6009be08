//! Small fixed-size linear algebra shared by the equations and fluxes.

use nalgebra::{DMatrix, SMatrix, SVector};

use crate::error::{Error, Result};

pub type Vector<const M: usize> = SVector<f64, M>;
pub type Matrix<const M: usize> = SMatrix<f64, M, M>;

/// Real eigendecomposition `A = Q Λ Q⁻¹` with eigenvalues sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition<const M: usize> {
    pub q: Matrix<M>,
    pub lambda: Vector<M>,
    pub q_inv: Matrix<M>,
}

impl<const M: usize> EigenDecomposition<M> {
    pub fn reconstruct(&self) -> Matrix<M> {
        self.q * Matrix::<M>::from_diagonal(&self.lambda) * self.q_inv
    }

    /// `Q diag(φ(λ)) Q⁻¹` for an arbitrary map on the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix<M> {
        let d = self.lambda.map(f);
        self.q * Matrix::<M>::from_diagonal(&d) * self.q_inv
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.lambda.iter().fold(0.0_f64, |m, l| m.max(l.abs()))
    }
}

/// Eigendecomposition of a general real matrix with real spectrum.
///
/// Complex eigenvalues and defective eigenvalues both yield a hyperbolicity error.
pub fn real_eigen_decomposition<const M: usize>(a: &Matrix<M>) -> Result<EigenDecomposition<M>> {
    let scale = a.amax().max(f64::MIN_POSITIVE);
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Hyperbolicity("matrix has non-finite entries".into()));
    }

    let is_diagonal = (0..M).all(|i| (0..M).all(|j| i == j || a[(i, j)] == 0.0));
    if is_diagonal {
        let mut order: Vec<usize> = (0..M).collect();
        order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
        let mut q = Matrix::<M>::zeros();
        let mut lambda = Vector::<M>::zeros();
        for (col, &i) in order.iter().enumerate() {
            q[(i, col)] = 1.0;
            lambda[col] = a[(i, i)];
        }
        return Ok(EigenDecomposition {
            q,
            lambda,
            q_inv: q.transpose(),
        });
    }

    let dyn_a = DMatrix::from_fn(M, M, |i, j| a[(i, j)]);
    let schur = nalgebra::Schur::try_new(dyn_a.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Hyperbolicity("Schur iteration did not converge".into()))?;
    let eig = schur.complex_eigenvalues();
    let mut values = Vec::with_capacity(M);
    for z in eig.iter() {
        if z.im.abs() > 1e-9 * scale {
            return Err(Error::Hyperbolicity(format!(
                "complex eigenvalue {} + {}i",
                z.re, z.im
            )));
        }
        values.push(z.re);
    }
    values.sort_by(f64::total_cmp);

    // group numerically repeated eigenvalues
    let cluster_tol = 1e-8 * scale;
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for &v in &values {
        match clusters.last_mut() {
            Some((c, n)) if (v - *c / *n as f64).abs() <= cluster_tol => {
                *c += v;
                *n += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }

    let mut q = Matrix::<M>::zeros();
    let mut lambda = Vector::<M>::zeros();
    let mut col = 0;
    for (sum, mult) in clusters {
        let lam = sum / mult as f64;
        let shifted = &dyn_a - DMatrix::<f64>::identity(M, M) * lam;
        let svd = shifted.svd(false, true);
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::Hyperbolicity("SVD failed".into()))?;
        let mut idx: Vec<usize> = (0..M).collect();
        idx.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
        for &k in idx.iter().take(mult) {
            if svd.singular_values[k] > 1e-7 * scale {
                return Err(Error::Hyperbolicity(format!(
                    "eigenvalue {lam} is defective"
                )));
            }
            let mut v = Vector::<M>::from_fn(|i, _| v_t[(k, i)]);
            let (imax, _) = v.iamax_full();
            if v[imax] < 0.0 {
                v = -v;
            }
            q.set_column(col, &v);
            lambda[col] = lam;
            col += 1;
        }
    }

    let q_inv = q
        .try_inverse()
        .ok_or_else(|| Error::Hyperbolicity("eigenvector matrix is singular".into()))?;
    let out = EigenDecomposition { q, lambda, q_inv };
    let err = (out.reconstruct() - a).amax();
    if err > 1e-10 * scale.max(1.0) {
        return Err(Error::Hyperbolicity(format!(
            "eigendecomposition reconstruction error {err:e}"
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::matrix;

    #[test]
    fn identity_gives_identity_basis() {
        let e = real_eigen_decomposition(&Matrix::<2>::identity()).unwrap();
        assert_eq!(e.lambda, Vector::<2>::new(1.0, 1.0));
        assert_eq!(e.q, Matrix::<2>::identity());
    }

    #[test]
    fn diagonal_sorted_ascending() {
        let a = matrix![3.0, 0.0; 0.0, -1.0];
        let e = real_eigen_decomposition(&a).unwrap();
        assert_eq!(e.lambda, Vector::<2>::new(-1.0, 3.0));
        assert!((e.reconstruct() - a).amax() < 1e-14);
    }

    #[test]
    fn rotation_is_not_hyperbolic() {
        let a = matrix![0.0, -1.0; 1.0, 0.0];
        assert!(matches!(
            real_eigen_decomposition(&a),
            Err(Error::Hyperbolicity(_))
        ));
    }

    #[test]
    fn jordan_block_is_defective() {
        let a = matrix![1.0, 1.0; 0.0, 1.0];
        assert!(matches!(
            real_eigen_decomposition(&a),
            Err(Error::Hyperbolicity(_))
        ));
    }
}
