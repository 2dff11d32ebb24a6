//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::{Complex, ComplexField, DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point type the simulator can run on (`f32` or `f64`).
///
/// Tolerances throughout the crate are written for `f64`. `TOL_SCALE` widens
/// them for lower-precision types so the same invariant checks apply.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + Default + 'static
{
    const TOL_SCALE: f64;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("representable literal")
    }

    /// An `f64`-calibrated tolerance mapped onto this type.
    #[inline]
    fn tol(base: f64) -> Self {
        Self::lit(base * Self::TOL_SCALE)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const TOL_SCALE: f64 = 1.0;
}

impl Real for f32 {
    const TOL_SCALE: f64 = 1.0e5;
}

pub type C<T> = Complex<T>;
pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `e^{iθ}`
#[inline]
pub(crate) fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Largest entry modulus.
pub(crate) fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

/// Largest entry modulus of `m - m†`.
pub(crate) fn hermitian_residual<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).modulus();
            worst = worst.max(d);
        }
    }
    worst
}

/// `(m + m†) / 2`
pub(crate) fn hermitize<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let half = T::lit(0.5);
    let mut out = m.clone();
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (m[(i, j)] + m[(j, i)].conj()).scale(half);
        }
    }
    out
}

pub(crate) fn trace<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    (0..m.nrows()).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + m[(i, i)])
}

/// Real part of `Tr[a b]` without forming the product.
pub(crate) fn trace_product_re<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let n = a.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}
