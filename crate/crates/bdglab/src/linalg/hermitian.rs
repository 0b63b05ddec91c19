//! Complex Hermitian problems via the real embedding
//! `A = X + iY  ->  [[X, -Y], [Y, X]]`, which is a *-homomorphism, so any
//! spectral function of `A` can be read off the embedded real matrix.

use super::eigen::sym_eigen;
use crate::{CMatrix, RMatrix, Result, C64};

/// Real symmetric embedding of a Hermitian matrix.
pub fn embed(a: &CMatrix) -> RMatrix {
    let n = a.nrows();
    let mut m = RMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            m[(i, j)] = z.re;
            m[(i + n, j + n)] = z.re;
            m[(i, j + n)] = -z.im;
            m[(i + n, j)] = z.im;
        }
    }
    m
}

/// Inverse of [`embed`], reading the left column of blocks.
pub fn extract(m: &RMatrix) -> CMatrix {
    let n = m.nrows() / 2;
    CMatrix::from_fn(n, n, |i, j| C64::new(m[(i, j)], m[(i + n, j)]))
}

/// Spectral data of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEigen {
    /// Ascending eigenvalues, each listed once per complex dimension.
    pub values: Vec<f64>,
    /// Orthonormal complex eigenvectors as columns.
    pub vectors: CMatrix,
    /// Eigen-decomposition of the real embedding (values doubled).
    pub embedded_values: Vec<f64>,
    pub embedded_vectors: RMatrix,
}

/// Diagonalise a Hermitian matrix (Hermitian part is used).
pub fn herm_eigen(a: &CMatrix) -> Result<HermEigen> {
    let n = a.nrows();
    let h = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let se = sym_eigen(&embed(&h))?;
    let mut values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    let mut found = 0;
    for j in 0..2 * n {
        if found == n {
            break;
        }
        let mut x: Vec<C64> =
            (0..n).map(|i| C64::new(se.vectors[(i, j)], se.vectors[(i + n, j)])).collect();
        for c in 0..found {
            let mut ov = C64::new(0.0, 0.0);
            for i in 0..n {
                ov += vectors[(i, c)].conj() * x[i];
            }
            for (i, xi) in x.iter_mut().enumerate() {
                *xi -= vectors[(i, c)] * ov;
            }
        }
        let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 0.5 {
            for (i, xi) in x.iter().enumerate() {
                vectors[(i, found)] = xi / nrm;
            }
            values.push(se.values[j]);
            found += 1;
        }
    }
    Ok(HermEigen { values, vectors, embedded_values: se.values, embedded_vectors: se.vectors })
}

/// `f(A)` for Hermitian `A`.
pub fn herm_apply(a: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let h = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let se = sym_eigen(&embed(&h))?;
    let n2 = se.values.len();
    let mut scaled = se.vectors.clone();
    for j in 0..n2 {
        let fj = f(se.values[j]);
        for i in 0..n2 {
            scaled[(i, j)] *= fj;
        }
    }
    let fm = &scaled * se.vectors.transpose();
    Ok(extract(&fm))
}
