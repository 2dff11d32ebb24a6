//! Mean-field limit of the twist-and-turn model on the `(z, φ)` cylinder.
//!
//! `H_cl(z, φ) = (Λ/2) z² − √(1−z²) cos φ` with canonical flow
//! `ż = −∂H/∂φ`, `φ̇ = ∂H/∂z`.

use nalgebra::Complex;

use crate::error::{CatError, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint<T: Real> {
    pub z: T,
    pub phi: T,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(z: T, phi: T) -> Self {
        Self { z, phi }
    }
}

/// Dimensionless coupling `Λ_cl` of the mean-field Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanFieldParams<T: Real> {
    coupling: T,
}

impl<T: Real> MeanFieldParams<T> {
    pub fn new(coupling: T) -> Result<Self> {
        if !(coupling >= T::zero()) || !coupling.is_finite() {
            return Err(CatError::param(
                "coupling",
                format!("must be finite and >= 0, got {}", coupling.as_f64()),
            ));
        }
        Ok(Self { coupling })
    }

    pub fn coupling(&self) -> T {
        self.coupling
    }
}

pub fn classical_energy<T: Real>(p: PhasePoint<T>, params: &MeanFieldParams<T>) -> T {
    let half = T::lit(0.5);
    let root = (T::one() - p.z * p.z).max(T::zero()).sqrt();
    half * params.coupling * p.z * p.z - root * p.phi.cos()
}

/// `(ż, φ̇)`; `None` at or beyond the poles.
pub fn flow<T: Real>(p: PhasePoint<T>, params: &MeanFieldParams<T>) -> Option<(T, T)> {
    let root = (T::one() - p.z * p.z).sqrt();
    if !(root > T::zero()) {
        return None;
    }
    let (s, c) = p.phi.sin_cos();
    Some((-root * s, params.coupling * p.z + p.z * c / root))
}

/// Jacobian of [`flow`] as `[[∂ż/∂z, ∂ż/∂φ], [∂φ̇/∂z, ∂φ̇/∂φ]]`.
pub fn jacobian<T: Real>(p: PhasePoint<T>, params: &MeanFieldParams<T>) -> [[T; 2]; 2] {
    let w = T::one() - p.z * p.z;
    let root = w.sqrt();
    let (s, c) = p.phi.sin_cos();
    [
        [p.z * s / root, -root * c],
        [params.coupling + c / (w * root), -p.z * s / root],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stability {
    Center,
    Saddle,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPoint<T: Real> {
    pub point: PhasePoint<T>,
    pub stability: Stability,
    pub jacobian_eigenvalues: [Complex<T>; 2],
}

fn classify<T: Real>(point: PhasePoint<T>, params: &MeanFieldParams<T>) -> FixedPoint<T> {
    let [[a, b], [c, d]] = jacobian(point, params);
    let half_tr = (a + d) * T::lit(0.5);
    let det = a * d - b * c;
    let disc = half_tr * half_tr - det;
    let jacobian_eigenvalues = if disc >= T::zero() {
        let r = disc.sqrt();
        [Complex::new(half_tr - r, T::zero()), Complex::new(half_tr + r, T::zero())]
    } else {
        let r = (-disc).sqrt();
        [Complex::new(half_tr, -r), Complex::new(half_tr, r)]
    };
    let stability = if det < T::zero() {
        Stability::Saddle
    } else {
        Stability::Center
    };
    FixedPoint {
        point,
        stability,
        jacobian_eigenvalues,
    }
}

/// All stationary points, classified from the Jacobian.
pub fn fixed_points<T: Real>(params: &MeanFieldParams<T>) -> Vec<FixedPoint<T>> {
    let pi = T::pi();
    let mut out = vec![
        classify(PhasePoint::new(T::zero(), T::zero()), params),
        classify(PhasePoint::new(T::zero(), pi), params),
    ];
    let lambda = params.coupling;
    if lambda > T::one() {
        let z = (T::one() - T::one() / (lambda * lambda)).sqrt();
        out.push(classify(PhasePoint::new(z, pi), params));
        out.push(classify(PhasePoint::new(-z, pi), params));
    }
    out
}

/// Energy of the saddle at `(0, π)`.
pub fn separatrix_energy<T: Real>() -> T {
    T::one()
}

const SCAN_POINTS: usize = 4096;

/// Smallest `z_c ≥ 0` with `H_cl(z_c, φ) = 1`.
///
/// Errors with [`CatError::SeparatrixAbsent`] for `Λ ≤ 1`, and with
/// [`CatError::NoSeparatrixCrossing`] where the level set does not reach the
/// given phase (only possible for `Λ < 2`).
pub fn separatrix<T: Real>(phi: T, params: &MeanFieldParams<T>) -> Result<T> {
    let lambda = params.coupling;
    if lambda <= T::one() {
        return Err(CatError::SeparatrixAbsent {
            coupling: lambda.as_f64(),
        });
    }
    let g = |z: T| classical_energy(PhasePoint::new(z, phi), params) - separatrix_energy::<T>();
    let g0 = g(T::zero());
    if g0 >= T::zero() {
        return Ok(T::zero());
    }
    let step = T::one() / T::lit(SCAN_POINTS as f64);
    let mut lo = T::zero();
    let mut hi = None;
    for k in 1..=SCAN_POINTS {
        let z = T::lit(k as f64) * step;
        if g(z) >= T::zero() {
            hi = Some(z);
            break;
        }
        lo = z;
    }
    let Some(mut hi) = hi else {
        return Err(CatError::NoSeparatrixCrossing {
            phi: phi.as_f64(),
            coupling: lambda.as_f64(),
        });
    };
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Motion {
    FreeOscillation,
    SelfTrapping,
}

impl Motion {
    pub fn label(&self) -> &'static str {
        match self {
            Motion::FreeOscillation => "free",
            Motion::SelfTrapping => "trapped",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    /// `(t, point)` samples at the requested cadence; `φ` is not wrapped.
    pub samples: Vec<(T, PhasePoint<T>)>,
    pub motion: Motion,
    pub energy_drift: T,
    /// Internal step actually used.
    pub dt_used: T,
}

pub const DEFAULT_DT: f64 = 1e-3;
const MAX_REFINEMENTS: u32 = 10;
const ENERGY_TOL: f64 = 1e-6;

fn rk4_step<T: Real>(p: PhasePoint<T>, h: T, params: &MeanFieldParams<T>) -> Option<PhasePoint<T>> {
    let half = T::lit(0.5);
    let at = |z: T, phi: T| flow(PhasePoint::new(z, phi), params);
    let (k1z, k1p) = at(p.z, p.phi)?;
    let (k2z, k2p) = at(p.z + half * h * k1z, p.phi + half * h * k1p)?;
    let (k3z, k3p) = at(p.z + half * h * k2z, p.phi + half * h * k2p)?;
    let (k4z, k4p) = at(p.z + h * k3z, p.phi + h * k3p)?;
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    let z = p.z + sixth * (k1z + two * k2z + two * k3z + k4z);
    let phi = p.phi + sixth * (k1p + two * k2p + two * k3p + k4p);
    (z.is_finite() && phi.is_finite() && z.abs() < T::one()).then_some(PhasePoint::new(z, phi))
}

/// `(t, point)` pairs.
type Samples<T> = Vec<(T, PhasePoint<T>)>;

fn run<T: Real>(
    p0: PhasePoint<T>,
    params: &MeanFieldParams<T>,
    steps: usize,
    dt: T,
    substeps: usize,
) -> std::result::Result<(Samples<T>, T), (T, &'static str)> {
    let e0 = classical_energy(p0, params);
    let h = dt / T::lit(substeps as f64);
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push((T::zero(), p0));
    let mut p = p0;
    let mut drift = T::zero();
    for k in 1..=steps {
        for _ in 0..substeps {
            p = rk4_step(p, h, params).ok_or((T::lit(k as f64) * dt, "left the open cylinder"))?;
        }
        drift = drift.max((classical_energy(p, params) - e0).abs());
        if drift > T::tol(ENERGY_TOL) {
            return Err((T::lit(k as f64) * dt, "energy drift"));
        }
        samples.push((T::lit(k as f64) * dt, p));
    }
    Ok((samples, drift))
}

/// Fixed-step RK4 from `p0` to `t_final`, sampled every `dt`.
///
/// A failed run (pole hit, non-finite state or energy drift above `1e-6`) is
/// repeated with the internal step halved, up to `2¹⁰` times.
pub fn integrate_trajectory<T: Real>(
    p0: PhasePoint<T>,
    params: &MeanFieldParams<T>,
    t_final: T,
    dt: T,
) -> Result<Trajectory<T>> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(CatError::param("dt", format!("must be > 0, got {}", dt.as_f64())));
    }
    if !(t_final >= T::zero()) || !t_final.is_finite() {
        return Err(CatError::param(
            "t_final",
            format!("must be finite and >= 0, got {}", t_final.as_f64()),
        ));
    }
    if !(p0.z.abs() < T::one()) {
        return Err(CatError::param("z", "start must satisfy |z| < 1"));
    }
    let steps = (t_final / dt).round().to_usize().unwrap_or(0);
    let mut last = (T::zero(), "");
    for level in 0..=MAX_REFINEMENTS {
        let substeps = 1usize << level;
        match run(p0, params, steps, dt, substeps) {
            Ok((samples, drift)) => {
                let motion = classify_motion(&samples);
                return Ok(Trajectory {
                    samples,
                    motion,
                    energy_drift: drift,
                    dt_used: dt / T::lit(substeps as f64),
                });
            }
            Err(e) => last = e,
        }
    }
    Err(CatError::IntegrationFailed {
        time: last.0.as_f64(),
        reason: last.1.to_string(),
    })
}

/// Trapped iff `z` keeps one strict sign along the whole path.
fn classify_motion<T: Real>(samples: &[(T, PhasePoint<T>)]) -> Motion {
    let all_pos = samples.iter().all(|(_, p)| p.z > T::zero());
    let all_neg = samples.iter().all(|(_, p)| p.z < T::zero());
    if all_pos || all_neg {
        Motion::SelfTrapping
    } else {
        Motion::FreeOscillation
    }
}

#[derive(Clone, Debug)]
pub struct PhasePortrait<T: Real> {
    pub fixed_points: Vec<FixedPoint<T>>,
    /// `(φ, z_c(φ))` wherever the separatrix reaches the phase.
    pub separatrix: Vec<(T, T)>,
    pub trajectories: Vec<Trajectory<T>>,
}

pub fn phase_portrait<T: Real>(
    params: &MeanFieldParams<T>,
    starts: &[PhasePoint<T>],
    t_final: T,
    dt: T,
    separatrix_samples: usize,
) -> Result<PhasePortrait<T>> {
    let mut curve = Vec::new();
    if params.coupling > T::one() && separatrix_samples > 1 {
        let last = T::lit((separatrix_samples - 1) as f64);
        for k in 0..separatrix_samples {
            let phi = -T::pi() + T::two_pi() * T::lit(k as f64) / last;
            match separatrix(phi, params) {
                Ok(z) => curve.push((phi, z)),
                Err(CatError::NoSeparatrixCrossing { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let trajectories = starts
        .iter()
        .map(|&p| integrate_trajectory(p, params, t_final, dt))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhasePortrait {
        fixed_points: fixed_points(params),
        separatrix: curve,
        trajectories,
    })
}
