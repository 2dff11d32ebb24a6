//! Collective-spin Hilbert space of `N` bosons in two modes.
//!
//! The Dicke basis `|m⟩`, `m = -j..=j` with `j = N/2`, is stored in ascending
//! order: index `k` holds `m = k - j`. The Fock state `|m₁, m₂⟩` maps to
//! `m = (m₁ - m₂)/2`.

use nalgebra::{Complex, ComplexField, DVector};

use crate::error::{CatError, Result};
use crate::scalar::{
    cis, cr, hermitian_residual, hermitize, max_abs, trace, trace_product_re, CMatrix, CVector,
    Real,
};
use crate::spectral::SpectralDecomp;

/// Fixed-`N` two-mode sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpinSpace {
    n_particles: usize,
}

impl SpinSpace {
    /// Builds the space for `n_particles` bosons. `N` must be even and at
    /// least 2 so that `j` is an integer.
    pub fn new(n_particles: usize) -> Result<Self> {
        if n_particles < 2 || !n_particles.is_multiple_of(2) {
            return Err(CatError::InvalidParticleNumber(n_particles));
        }
        Ok(Self { n_particles })
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn dim(&self) -> usize {
        self.n_particles + 1
    }

    /// Integer spin length `j = N/2`.
    pub fn j_int(&self) -> i64 {
        (self.n_particles / 2) as i64
    }

    pub fn j<T: Real>(&self) -> T {
        T::lit(self.j_int() as f64)
    }

    /// Magnetic quantum number stored at basis index `k`.
    pub fn m_int(&self, k: usize) -> i64 {
        k as i64 - self.j_int()
    }

    pub fn m<T: Real>(&self, k: usize) -> T {
        T::lit(self.m_int(k) as f64)
    }

    /// Basis index of magnetic quantum number `m`, if it lies in range.
    pub fn index_of(&self, m: i64) -> Option<usize> {
        let k = m + self.j_int();
        (0..self.dim() as i64).contains(&k).then_some(k as usize)
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(CatError::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// Direction on the unit sphere, `θ ∈ [0, π]`, `φ ∈ [-π, π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinAxis<T: Real> {
    theta: T,
    phi: T,
}

impl<T: Real> SpinAxis<T> {
    /// Canonicalises arbitrary angles onto `θ ∈ [0, π]`, `φ ∈ [-π, π)`.
    pub fn new(theta: T, phi: T) -> Self {
        let two_pi = T::two_pi();
        let mut theta = theta % two_pi;
        if theta < T::zero() {
            theta += two_pi;
        }
        let mut phi = phi;
        if theta > T::pi() {
            theta = two_pi - theta;
            phi += T::pi();
        }
        Self {
            theta,
            phi: wrap_phase(phi),
        }
    }

    /// Axis through the phase-space point `(z, φ)` with `z = cos θ`.
    pub fn from_imbalance(z: T, phi: T) -> Result<Self> {
        if !(z.abs() <= T::one()) {
            return Err(CatError::param("z", format!("|z| must be <= 1, got {}", z.as_f64())));
        }
        Ok(Self::new(z.acos(), phi))
    }

    pub fn x() -> Self {
        Self::new(T::frac_pi_2(), T::zero())
    }

    pub fn y() -> Self {
        Self::new(T::frac_pi_2(), T::frac_pi_2())
    }

    pub fn z() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    /// Cartesian components `(x, y, z)`.
    pub fn unit_vector(&self) -> [T; 3] {
        let s = self.theta.sin();
        [s * self.phi.cos(), s * self.phi.sin(), self.theta.cos()]
    }
}

/// Maps a phase onto `[-π, π)`.
pub fn wrap_phase<T: Real>(phi: T) -> T {
    let two_pi = T::two_pi();
    let mut p = (phi + T::pi()) % two_pi;
    if p < T::zero() {
        p += two_pi;
    }
    let out = p - T::pi();
    if out >= T::pi() {
        out - two_pi
    } else {
        out
    }
}

/// Hermitian operator on a [`SpinSpace`].
#[derive(Clone, Debug)]
pub struct HermitianOp<T: Real> {
    space: SpinSpace,
    entries: CMatrix<T>,
}

impl<T: Real> HermitianOp<T> {
    /// Wraps `entries`, checking shape and `max|A - A†| <= 1e-10 · max|A|`.
    pub fn new(space: SpinSpace, entries: CMatrix<T>) -> Result<Self> {
        space.check_dim(entries.nrows())?;
        space.check_dim(entries.ncols())?;
        let scale = max_abs(&entries);
        let residual = hermitian_residual(&entries);
        let allowed = T::tol(1e-10) * scale;
        if residual > allowed {
            return Err(CatError::NotHermitian {
                residual: residual.as_f64(),
                allowed: allowed.as_f64(),
            });
        }
        Ok(Self { space, entries })
    }

    pub(crate) fn new_unchecked(space: SpinSpace, entries: CMatrix<T>) -> Self {
        Self { space, entries }
    }

    pub fn space(&self) -> SpinSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.entries
    }

    pub fn spectral(&self) -> SpectralDecomp<T> {
        SpectralDecomp::new_unchecked(&self.entries)
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self::new_unchecked(self.space, self.entries.map(|z| z.scale(factor)))
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.space.check_dim(other.space.dim())?;
        Ok(Self::new_unchecked(self.space, &self.entries + &other.entries))
    }

    /// `A²`
    pub fn squared(&self) -> Self {
        Self::new_unchecked(self.space, hermitize(&(&self.entries * &self.entries)))
    }

    /// `[A, B]`, anti-Hermitian.
    pub fn commutator(&self, other: &Self) -> CMatrix<T> {
        &self.entries * &other.entries - &other.entries * &self.entries
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        max_abs(&self.entries)
    }
}

/// The Cartesian generators `J_x`, `J_y`, `J_z`.
#[derive(Clone, Debug)]
pub struct CartesianOps<T: Real> {
    pub jx: HermitianOp<T>,
    pub jy: HermitianOp<T>,
    pub jz: HermitianOp<T>,
}

impl<T: Real> CartesianOps<T> {
    /// `J(θ,φ) = J_z cos θ + J_x sin θ cos φ + J_y sin θ sin φ`.
    pub fn along(&self, axis: &SpinAxis<T>) -> HermitianOp<T> {
        let [nx, ny, nz] = axis.unit_vector();
        let m = self.jx.matrix().map(|z| z.scale(nx))
            + self.jy.matrix().map(|z| z.scale(ny))
            + self.jz.matrix().map(|z| z.scale(nz));
        HermitianOp::new_unchecked(self.jz.space(), m)
    }

    pub fn as_array(&self) -> [&HermitianOp<T>; 3] {
        [&self.jx, &self.jy, &self.jz]
    }
}

/// Raising operator, `⟨m+1|J₊|m⟩ = √(j(j+1) − m(m+1))`.
pub fn raising<T: Real>(space: SpinSpace) -> CMatrix<T> {
    let n = space.dim();
    let j = space.j::<T>();
    let mut jp = CMatrix::<T>::zeros(n, n);
    for k in 0..n - 1 {
        let m = space.m::<T>(k);
        jp[(k + 1, k)] = cr((j * (j + T::one()) - m * (m + T::one())).sqrt());
    }
    jp
}

pub fn cartesian_ops<T: Real>(space: SpinSpace) -> CartesianOps<T> {
    let n = space.dim();
    let half = T::lit(0.5);
    let jp = raising::<T>(space);
    let jm = jp.adjoint();
    let jx = (&jp + &jm).map(|z| z.scale(half));
    // (J₊ − J₋)/(2i) = −i(J₊ − J₋)/2
    let jy = (&jp - &jm).map(|z| Complex::new(z.im, -z.re).scale(half));
    let jz = CMatrix::from_fn(n, n, |i, k| if i == k { cr(space.m::<T>(i)) } else { cr(T::zero()) });
    CartesianOps {
        jx: HermitianOp::new_unchecked(space, jx),
        jy: HermitianOp::new_unchecked(space, jy),
        jz: HermitianOp::new_unchecked(space, jz),
    }
}

pub fn axis_op<T: Real>(space: SpinSpace, axis: &SpinAxis<T>) -> HermitianOp<T> {
    cartesian_ops(space).along(axis)
}

/// Unitary operator on a [`SpinSpace`].
#[derive(Clone, Debug)]
pub struct UnitaryOp<T: Real> {
    space: SpinSpace,
    entries: CMatrix<T>,
}

impl<T: Real> UnitaryOp<T> {
    pub fn identity(space: SpinSpace) -> Self {
        Self {
            space,
            entries: CMatrix::identity(space.dim(), space.dim()),
        }
    }

    /// `e^{-iαA}` for a Hermitian generator.
    pub fn exp_i(generator: &HermitianOp<T>, alpha: T) -> Self {
        let decomp = generator.spectral();
        Self {
            space: generator.space(),
            entries: decomp.map(|l| cis(-alpha * l)),
        }
    }

    pub fn space(&self) -> SpinSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            entries: self.entries.adjoint(),
        }
    }

    /// `self · other`
    pub fn then_apply(&self, other: &Self) -> Self {
        Self {
            space: self.space,
            entries: &self.entries * &other.entries,
        }
    }

    /// `U† A U`
    pub fn heisenberg(&self, op: &HermitianOp<T>) -> HermitianOp<T> {
        let m = self.entries.adjoint() * op.matrix() * &self.entries;
        HermitianOp::new_unchecked(self.space, hermitize(&m))
    }

    /// `max |U†U − I|`
    pub fn unitarity_defect(&self) -> T {
        let n = self.space.dim();
        max_abs(&(self.entries.adjoint() * &self.entries - CMatrix::<T>::identity(n, n)))
    }
}

/// `U(α, θ, φ) = exp(−iα J(θ,φ))`.
pub fn rotation<T: Real>(space: SpinSpace, alpha: T, axis: &SpinAxis<T>) -> UnitaryOp<T> {
    UnitaryOp::exp_i(&axis_op(space, axis), alpha)
}

/// Rotation taking `ẑ` to `axis`: `e^{−iφJ_z} e^{−iθJ_y}`. Its columns are the
/// eigenvectors of `J(θ,φ)` ordered by eigenvalue `m = −j..=j`.
pub fn rotation_to_axis<T: Real>(space: SpinSpace, axis: &SpinAxis<T>) -> UnitaryOp<T> {
    let about_z = rotation(space, axis.phi(), &SpinAxis::z());
    let about_y = rotation(space, axis.theta(), &SpinAxis::y());
    about_z.then_apply(&about_y)
}

/// Mixed state of the collective spin.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T: Real> {
    space: SpinSpace,
    entries: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity (1e-10 relative), unit trace (1e-10) and
    /// positivity (eigenvalues >= -1e-10).
    pub fn new(space: SpinSpace, entries: CMatrix<T>) -> Result<Self> {
        let rho = Self::new_unchecked(space, entries);
        space.check_dim(rho.entries.nrows())?;
        space.check_dim(rho.entries.ncols())?;
        rho.check_invariants()?;
        Ok(rho)
    }

    pub(crate) fn new_unchecked(space: SpinSpace, entries: CMatrix<T>) -> Self {
        Self { space, entries }
    }

    pub fn check_invariants(&self) -> Result<()> {
        let scale = max_abs(&self.entries);
        let residual = hermitian_residual(&self.entries);
        if residual > T::tol(1e-10) * scale {
            return Err(CatError::InvalidDensity(format!(
                "Hermiticity residual {:e}",
                residual.as_f64()
            )));
        }
        let tr = trace(&self.entries);
        if (tr.re - T::one()).abs() > T::tol(1e-10) || tr.im.abs() > T::tol(1e-10) {
            return Err(CatError::InvalidDensity(format!(
                "trace {} + {}i",
                tr.re.as_f64(),
                tr.im.as_f64()
            )));
        }
        let lowest = self.spectral().eigenvalues()[0];
        if lowest < -T::tol(1e-10) {
            return Err(CatError::InvalidDensity(format!(
                "negative eigenvalue {:e}",
                lowest.as_f64()
            )));
        }
        Ok(())
    }

    /// `I / (N+1)`
    pub fn maximally_mixed(space: SpinSpace) -> Self {
        let n = space.dim();
        let w = cr(T::one() / T::lit(n as f64));
        Self::new_unchecked(space, CMatrix::from_diagonal_element(n, n, w))
    }

    /// `|ψ⟩⟨ψ|` for a normalised copy of `psi`.
    pub fn pure(space: SpinSpace, psi: &CVector<T>) -> Result<Self> {
        space.check_dim(psi.len())?;
        let norm = psi.norm();
        if !(norm > T::zero()) {
            return Err(CatError::param("psi", "zero vector"));
        }
        let v = psi.unscale(norm);
        Ok(Self::new_unchecked(space, &v * v.adjoint()))
    }

    /// Diagonal state with the given populations on `|m⟩`.
    pub fn diagonal(space: SpinSpace, populations: &[T]) -> Result<Self> {
        space.check_dim(populations.len())?;
        let total = populations.iter().fold(T::zero(), |a, &p| a + p);
        if populations.iter().any(|&p| p < T::zero()) || !(total > T::zero()) {
            return Err(CatError::param("populations", "must be non-negative with positive sum"));
        }
        let d = DVector::from_iterator(space.dim(), populations.iter().map(|&p| cr(p / total)));
        Ok(Self::new_unchecked(space, CMatrix::from_diagonal(&d)))
    }

    pub fn space(&self) -> SpinSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.entries
    }

    /// Populations `⟨m|ρ|m⟩`, clamped at zero.
    pub fn populations(&self) -> Vec<T> {
        (0..self.space.dim())
            .map(|k| self.entries[(k, k)].re.max(T::zero()))
            .collect()
    }

    /// Eigendecomposition with round-off negative eigenvalues clamped to 0.
    pub fn spectral(&self) -> SpectralDecomp<T> {
        SpectralDecomp::new_unchecked(&hermitize(&self.entries))
    }

    pub fn clamped_eigenvalues(&self) -> Vec<T> {
        self.spectral()
            .eigenvalues()
            .iter()
            .map(|&p| p.max(T::zero()))
            .collect()
    }

    /// `Tr[ρ²]`
    pub fn purity(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, z| acc + z.modulus_squared())
    }

    /// `U ρ U†`
    pub fn transformed(&self, u: &UnitaryOp<T>) -> Self {
        let m = u.matrix() * &self.entries * u.matrix().adjoint();
        Self::new_unchecked(self.space, hermitize(&m))
    }

    /// `⟨ψ|ρ|ψ⟩` for normalised `psi`.
    pub fn fidelity_with_pure(&self, psi: &CVector<T>) -> T {
        let v = psi.unscale(psi.norm());
        (v.adjoint() * &self.entries * &v)[(0, 0)].re
    }

    /// Entry-wise largest deviation from another state.
    pub fn distance_max(&self, other: &Self) -> T {
        max_abs(&(&self.entries - &other.entries))
    }

    /// `Tr[Aρ]`.
    pub fn expectation(&self, op: &HermitianOp<T>) -> Result<T> {
        self.space.check_dim(op.space().dim())?;
        Ok(trace_product_re(op.matrix(), &self.entries))
    }

    /// `Tr[A²ρ] − Tr[Aρ]²`, clamped at 0.
    pub fn variance(&self, op: &HermitianOp<T>) -> Result<T> {
        let mean = self.expectation(op)?;
        let a_rho = op.matrix() * &self.entries;
        let second = trace_product_re(op.matrix(), &a_rho);
        Ok((second - mean * mean).max(T::zero()))
    }
}

/// Free-function form of [`DensityMatrix::expectation`].
pub fn expectation<T: Real>(rho: &DensityMatrix<T>, op: &HermitianOp<T>) -> Result<T> {
    rho.expectation(op)
}

/// Free-function form of [`DensityMatrix::variance`].
pub fn variance<T: Real>(rho: &DensityMatrix<T>, op: &HermitianOp<T>) -> Result<T> {
    rho.variance(op)
}

/// Normalised `exp(β̃ · J(acos z, φ))`.
///
/// The exponent is positive: as `β̃ → ∞` the state condenses onto the
/// *maximal* eigenvector of the axis operator, the spin coherent state
/// pointing at `(z, φ)`.
pub fn thermal_state<T: Real>(
    space: SpinSpace,
    beta_scaled: T,
    z: T,
    phi: T,
) -> Result<DensityMatrix<T>> {
    if !(beta_scaled >= T::zero()) {
        return Err(CatError::param(
            "beta_scaled",
            format!("must be >= 0, got {}", beta_scaled.as_f64()),
        ));
    }
    let axis = SpinAxis::from_imbalance(z, phi)?;
    let decomp = axis_op(space, &axis).spectral();
    let top = *decomp.eigenvalues().last().expect("non-empty spectrum");
    let raw: Vec<T> = decomp
        .eigenvalues()
        .iter()
        .map(|&l| (beta_scaled * (l - top)).exp())
        .collect();
    let total = raw.iter().fold(T::zero(), |a, &w| a + w);
    let weights: Vec<Complex<T>> = raw.iter().map(|&w| cr(w / total)).collect();
    let m = hermitize(&decomp.with_weights(&weights));
    Ok(DensityMatrix::new_unchecked(space, m))
}

/// Spin coherent state along `axis`: the top eigenvector of `J(θ,φ)`.
pub fn coherent_vector<T: Real>(space: SpinSpace, axis: &SpinAxis<T>) -> CVector<T> {
    let decomp = axis_op(space, axis).spectral();
    decomp.eigenvector(space.dim() - 1)
}

pub fn coherent_state<T: Real>(space: SpinSpace, axis: &SpinAxis<T>) -> DensityMatrix<T> {
    let v = coherent_vector(space, axis);
    DensityMatrix::new_unchecked(space, &v * v.adjoint())
}
