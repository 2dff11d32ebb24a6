//! Eigendecomposition of Hermitian matrices.
//!
//! Every matrix function in the crate (rotations, thermal weights, time
//! evolution, Fisher information) goes through [`SpectralDecomp`] instead of
//! a truncated series.

use nalgebra::{Complex, DVector};

use crate::error::{CatError, Result};
use crate::scalar::{cr, hermitian_residual, max_abs, CMatrix, Real};

/// `A = V diag(λ) V†` with eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct SpectralDecomp<T: Real> {
    eigenvalues: Vec<T>,
    eigenvectors: CMatrix<T>,
}

impl<T: Real> SpectralDecomp<T> {
    /// Decomposes a Hermitian matrix. Fails if `m` is not square or not
    /// Hermitian within `1e-10 · max|m|`.
    pub fn new(m: &CMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(CatError::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let scale = max_abs(m).max(T::one());
        let residual = hermitian_residual(m);
        let allowed = T::tol(1e-10) * scale;
        if residual > allowed {
            return Err(CatError::NotHermitian {
                residual: residual.as_f64(),
                allowed: allowed.as_f64(),
            });
        }
        Ok(Self::new_unchecked(m))
    }

    pub(crate) fn new_unchecked(m: &CMatrix<T>) -> Self {
        let n = m.nrows();
        let eig = m.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Columns are the eigenvectors, matching [`eigenvalues`](Self::eigenvalues).
    pub fn eigenvectors(&self) -> &CMatrix<T> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> DVector<Complex<T>> {
        self.eigenvectors.column(k).into_owned()
    }

    /// `V diag(f(λ)) V†`
    pub fn map<F>(&self, f: F) -> CMatrix<T>
    where
        F: Fn(T) -> Complex<T>,
    {
        let weights: Vec<Complex<T>> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.with_weights(&weights)
    }

    pub(crate) fn with_weights(&self, weights: &[Complex<T>]) -> CMatrix<T> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &w) in weights.iter().enumerate() {
            for z in scaled.column_mut(k).iter_mut() {
                *z *= w;
            }
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.map(cr)
    }

    /// `V† m V`: `m` expressed in the eigenbasis.
    pub fn to_eigenbasis(&self, m: &CMatrix<T>) -> CMatrix<T> {
        self.eigenvectors.adjoint() * m * &self.eigenvectors
    }

    /// `V m V†`: inverse of [`to_eigenbasis`](Self::to_eigenbasis).
    pub fn from_eigenbasis(&self, m: &CMatrix<T>) -> CMatrix<T> {
        &self.eigenvectors * m * self.eigenvectors.adjoint()
    }
}
