//! A cat entangled with an auxiliary qubit,
//! `|a⟩|↑⟩ + |d⟩(cos η |↑⟩ + sin η |↓⟩)`, traced down to the spin.

use crate::error::{CatError, Result};
use crate::scalar::{cr, CVector, Real};
use crate::spin::{DensityMatrix, SpinSpace};

/// Closed-form cat parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatQubitModel<T: Real> {
    pub lambda: T,
    pub peak_width: T,
    pub eta: T,
}

impl<T: Real> CatQubitModel<T> {
    pub fn new(lambda: T, peak_width: T, eta: T) -> Result<Self> {
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(CatError::param("lambda", format!("must be >= 0, got {}", lambda.as_f64())));
        }
        if !(peak_width > T::zero()) || !peak_width.is_finite() {
            return Err(CatError::param(
                "peak_width",
                format!("must be > 0, got {}", peak_width.as_f64()),
            ));
        }
        if !(eta >= T::zero() && eta <= T::frac_pi_2()) {
            return Err(CatError::param("eta", format!("must lie in [0, π/2], got {}", eta.as_f64())));
        }
        Ok(Self {
            lambda,
            peak_width,
            eta,
        })
    }

    /// `α = Λ/PW`
    pub fn alpha(&self) -> T {
        self.lambda / self.peak_width
    }

    /// Peaks resolved (`α > 1`).
    pub fn well_separated(&self) -> bool {
        self.alpha() > T::one()
    }

    /// Reduced extensive difference exceeds the peak width.
    pub fn indefinite(&self) -> bool {
        reduced_extdiff(self) > self.peak_width
    }
}

/// `F_q = Λ² cos²η + PW²`
pub fn analytic_qfi<T: Real>(m: &CatQubitModel<T>) -> T {
    let c = m.eta.cos();
    m.lambda * m.lambda * c * c + m.peak_width * m.peak_width
}

/// `r_q = √((Λ² cos²η + PW²)/(PW² + Λ²))`
pub fn analytic_rq<T: Real>(m: &CatQubitModel<T>) -> T {
    (analytic_qfi(m) / (m.peak_width * m.peak_width + m.lambda * m.lambda)).sqrt()
}

/// `Λ·r_q = Λ √((1 + α² cos²η)/(1 + α²))`
pub fn reduced_extdiff<T: Real>(m: &CatQubitModel<T>) -> T {
    let a2 = m.alpha() * m.alpha();
    let c = m.eta.cos();
    m.lambda * ((T::one() + a2 * c * c) / (T::one() + a2)).sqrt()
}

/// `η_c = arccos(α⁻²)`, the largest angle with `Λ·r_q ≥ PW`.
pub fn eta_critical<T: Real>(alpha: T) -> Result<T> {
    if !(alpha >= T::one()) || !alpha.is_finite() {
        return Err(CatError::param(
            "alpha",
            format!("needs α >= 1, got {}", alpha.as_f64()),
        ));
    }
    Ok((T::one() / (alpha * alpha)).acos())
}

/// `1 − (3/2) cos η`; negative means the Leggett-Garg inequality is violated.
pub fn lg_violation<T: Real>(eta: T) -> T {
    T::one() - T::lit(1.5) * eta.cos()
}

/// Mirror-symmetric pair of Gaussian peaks on disjoint halves of the ladder.
#[derive(Clone, Debug)]
pub struct SyntheticCat<T: Real> {
    pub space: SpinSpace,
    /// Supported on `m < 0`.
    pub alive: CVector<T>,
    /// `⟨m|d⟩ = ⟨−m|a⟩`
    pub dead: CVector<T>,
}

/// Amplitudes `∝ exp(−(m + m₀)²/(4σ²))` on `m < 0` for `|a⟩`, mirrored for
/// `|d⟩`. Requires `m₀ − 3σ > 0`.
pub fn make_synthetic_cat<T: Real>(space: SpinSpace, center: T, width: T) -> Result<SyntheticCat<T>> {
    if !(width > T::zero()) || !width.is_finite() || !center.is_finite() {
        return Err(CatError::param("width", format!("must be > 0, got {}", width.as_f64())));
    }
    if !(center - T::lit(3.0) * width > T::zero()) {
        return Err(CatError::PeaksOverlap {
            center: center.as_f64(),
            width: width.as_f64(),
        });
    }
    let dim = space.dim();
    let four_var = T::lit(4.0) * width * width;
    let mut alive = CVector::<T>::zeros(dim);
    for k in 0..dim {
        let m = space.m::<T>(k);
        if m < T::zero() {
            let d = m + center;
            alive[k] = cr((-(d * d) / four_var).exp());
        }
    }
    let norm = alive.norm();
    let alive = alive.unscale(norm);
    let dead = CVector::from_fn(dim, |k, _| alive[dim - 1 - k]);
    Ok(SyntheticCat { space, alive, dead })
}

impl<T: Real> SyntheticCat<T> {
    fn jz_moments(v: &CVector<T>, space: SpinSpace) -> (T, T) {
        let mut m1 = T::zero();
        let mut m2 = T::zero();
        for (k, z) in v.iter().enumerate() {
            let p = z.re * z.re + z.im * z.im;
            let m = space.m::<T>(k);
            m1 += m * p;
            m2 += m * m * p;
        }
        (m1, m2)
    }

    /// `Λ = ⟨J_z⟩_d − ⟨J_z⟩_a`
    pub fn lambda(&self) -> T {
        let (a, _) = Self::jz_moments(&self.alive, self.space);
        let (d, _) = Self::jz_moments(&self.dead, self.space);
        (d - a).abs()
    }

    /// Twice the standard deviation of one peak.
    pub fn peak_width(&self) -> T {
        let (m1, m2) = Self::jz_moments(&self.alive, self.space);
        T::lit(2.0) * (m2 - m1 * m1).max(T::zero()).sqrt()
    }

    pub fn model(&self, eta: T) -> Result<CatQubitModel<T>> {
        CatQubitModel::new(self.lambda(), self.peak_width(), eta)
    }

    /// `(|a⟩ ± |d⟩)/√2`
    pub fn cat(&self, plus: bool) -> CVector<T> {
        let s = if plus { T::one() } else { -T::one() };
        (&self.alive + self.dead.map(|z| z.scale(s))).unscale(T::lit(2.0).sqrt())
    }
}

/// `ρ = ½[|a⟩⟨a| + |d⟩⟨d| + cos η (|a⟩⟨d| + |d⟩⟨a|)]`
pub fn reduced_density<T: Real>(cat: &SyntheticCat<T>, eta: T) -> DensityMatrix<T> {
    let half = T::lit(0.5);
    let c = eta.cos();
    let a = &cat.alive;
    let d = &cat.dead;
    let aa = a * a.adjoint();
    let dd = d * d.adjoint();
    let ad = a * d.adjoint();
    let da = d * a.adjoint();
    let m = (aa + dd).map(|z| z.scale(half)) + (ad + da).map(|z| z.scale(half * c));
    DensityMatrix::new_unchecked(cat.space, m)
}
