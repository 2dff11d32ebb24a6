//! Twist-and-turn evolution and the cat-creation schedule.

use nalgebra::Complex;

use crate::classical::{separatrix, MeanFieldParams};
use crate::error::{CatError, Result};
use crate::scalar::{hermitize, CMatrix, Real};
use crate::spectral::SpectralDecomp;
use crate::spin::{cartesian_ops, thermal_state, DensityMatrix, HermitianOp, SpinSpace};

/// `β̃` used as the zero-temperature stand-in.
pub const PURE_STATE_BETA: f64 = 50.0;

/// Sign of the hopping term.
///
/// `Negative` puts the mean-field saddle at `φ = π`; `Positive` moves it to
/// `φ = 0`. The two are related by conjugation with `e^{iπJ_z}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum HoppingSign {
    #[default]
    Negative,
    Positive,
}

impl HoppingSign {
    pub fn sigma<T: Real>(&self) -> T {
        match self {
            HoppingSign::Negative => -T::one(),
            HoppingSign::Positive => T::one(),
        }
    }

    /// Phase shift that maps a point placed in the `Negative` frame onto the
    /// same physical state in this frame.
    pub fn phase_offset<T: Real>(&self) -> T {
        match self {
            HoppingSign::Negative => T::zero(),
            HoppingSign::Positive => T::pi(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            HoppingSign::Negative => "negative",
            HoppingSign::Positive => "positive",
        }
    }
}

/// Normalisation of the collective operators in the Hamiltonian.
///
/// * `Pauli`: `H = σ·2t·J_x + 2U·J_z²` (sums of Pauli matrices, `S = 2J`),
///   mean-field coupling `Λ_cl = UN/t`.
/// * `Spin`: `H = σ·t·J_x + (U/2)·J_z²`, `Λ_cl = UN/(2t)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum GeneratorScale {
    #[default]
    Pauli,
    Spin,
}

impl GeneratorScale {
    pub fn label(&self) -> &'static str {
        match self {
            GeneratorScale::Pauli => "pauli",
            GeneratorScale::Spin => "spin",
        }
    }

    /// `(a, b)` in `H = a·σ·t·J_x + b·U·J_z²`.
    fn factors<T: Real>(&self) -> (T, T) {
        match self {
            GeneratorScale::Pauli => (T::lit(2.0), T::lit(2.0)),
            GeneratorScale::Spin => (T::one(), T::lit(0.5)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistTurnParams<T: Real> {
    pub space: SpinSpace,
    pub t_hop: T,
    pub u_int: T,
    pub sign: HoppingSign,
    pub scale: GeneratorScale,
}

impl<T: Real> TwistTurnParams<T> {
    pub fn new(space: SpinSpace, t_hop: T, u_int: T) -> Result<Self> {
        if !(t_hop > T::zero()) || !t_hop.is_finite() {
            return Err(CatError::param("t_hop", format!("must be > 0, got {}", t_hop.as_f64())));
        }
        if !(u_int >= T::zero()) || !u_int.is_finite() {
            return Err(CatError::param("u_int", format!("must be >= 0, got {}", u_int.as_f64())));
        }
        Ok(Self {
            space,
            t_hop,
            u_int,
            sign: HoppingSign::default(),
            scale: GeneratorScale::default(),
        })
    }

    pub fn with_sign(mut self, sign: HoppingSign) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_scale(mut self, scale: GeneratorScale) -> Self {
        self.scale = scale;
        self
    }

    /// Mean-field coupling `Λ_cl`.
    pub fn coupling(&self) -> T {
        let (a, b) = self.scale.factors::<T>();
        let n = T::lit(self.space.n_particles() as f64);
        b * self.u_int * n / (a * self.t_hop)
    }

    pub fn mean_field(&self) -> Result<MeanFieldParams<T>> {
        MeanFieldParams::new(self.coupling())
    }

    /// Imbalance `z_c(0)` on the separatrix at zero phase (in the
    /// `Negative` frame).
    pub fn critical_imbalance(&self) -> Result<T> {
        separatrix(T::zero(), &self.mean_field()?)
    }

    pub fn hamiltonian(&self) -> HermitianOp<T> {
        build_hamiltonian(self)
    }
}

pub fn build_hamiltonian<T: Real>(params: &TwistTurnParams<T>) -> HermitianOp<T> {
    let ops = cartesian_ops::<T>(params.space);
    let (a, b) = params.scale.factors::<T>();
    let hop = params.sign.sigma::<T>() * a * params.t_hop;
    let twist = b * params.u_int;
    let n = params.space.dim();
    let mut h = ops.jx.matrix().map(|z| z.scale(hop));
    for k in 0..n {
        let m = params.space.m::<T>(k);
        h[(k, k)] += Complex::new(twist * m * m, T::zero());
    }
    HermitianOp::new(params.space, h).expect("twist-and-turn matrix is Hermitian")
}

/// `T_π = ln(8N)/(N·U)`.
pub fn t_pi<T: Real>(space: SpinSpace, u_int: T) -> Result<T> {
    if !(u_int > T::zero()) || !u_int.is_finite() {
        return Err(CatError::param(
            "u_int",
            format!("T_pi needs U > 0, got {}", u_int.as_f64()),
        ));
    }
    let n = T::lit(space.n_particles() as f64);
    Ok((T::lit(8.0) * n).ln() / (n * u_int))
}

/// Cached eigensystem of `H` for repeated evolution.
#[derive(Clone, Debug)]
pub struct Propagator<T: Real> {
    space: SpinSpace,
    decomp: SpectralDecomp<T>,
}

impl<T: Real> Propagator<T> {
    pub fn new(h: &HermitianOp<T>) -> Self {
        Self {
            space: h.space(),
            decomp: h.spectral(),
        }
    }

    pub fn energies(&self) -> &[T] {
        self.decomp.eigenvalues()
    }

    /// `e^{−iHτ} ρ e^{+iHτ}`.
    pub fn evolve(&self, rho: &DensityMatrix<T>, duration: T) -> Result<DensityMatrix<T>> {
        self.space.check_dim(rho.space().dim())?;
        if !(duration >= T::zero()) || !duration.is_finite() {
            return Err(CatError::param(
                "duration",
                format!("must be finite and >= 0, got {}", duration.as_f64()),
            ));
        }
        if duration == T::zero() {
            return Ok(rho.clone());
        }
        let e = self.decomp.eigenvalues();
        let phases: Vec<Complex<T>> = e
            .iter()
            .map(|&l| {
                let a = -l * duration;
                Complex::new(a.cos(), a.sin())
            })
            .collect();
        let mut inner: CMatrix<T> = self.decomp.to_eigenbasis(rho.matrix());
        let n = inner.nrows();
        for c in 0..n {
            let right = phases[c].conj();
            for r in 0..n {
                inner[(r, c)] *= phases[r] * right;
            }
        }
        let out = hermitize(&self.decomp.from_eigenbasis(&inner));
        Ok(DensityMatrix::new_unchecked(self.space, out))
    }
}

pub fn evolve<T: Real>(
    rho: &DensityMatrix<T>,
    h: &HermitianOp<T>,
    duration: T,
) -> Result<DensityMatrix<T>> {
    Propagator::new(h).evolve(rho, duration)
}

/// Starting point of the cat protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InitialState {
    /// Centred on the saddle, `(z, φ) = (0, π)`.
    Pi,
    /// On the separatrix at zero phase, `(z_c(0), 0)`.
    Zero,
}

impl InitialState {
    pub fn label(&self) -> &'static str {
        match self {
            InitialState::Pi => "pi",
            InitialState::Zero => "zero",
        }
    }
}

/// `(β̃, z, φ)` of a prepared thermal state, in the frame of the chosen sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Preparation<T: Real> {
    pub label: InitialState,
    pub beta_scaled: T,
    pub z: T,
    pub phi: T,
}

impl<T: Real> Preparation<T> {
    pub fn new(label: InitialState, beta_scaled: T, params: &TwistTurnParams<T>) -> Result<Self> {
        let (z, phi) = match label {
            InitialState::Pi => (T::zero(), T::pi()),
            InitialState::Zero => (params.critical_imbalance()?, T::zero()),
        };
        Ok(Self {
            label,
            beta_scaled,
            z,
            phi: crate::spin::wrap_phase(phi + params.sign.phase_offset::<T>()),
        })
    }

    pub fn state(&self, space: SpinSpace) -> Result<DensityMatrix<T>> {
        thermal_state(space, self.beta_scaled, self.z, self.phi)
    }
}

/// `β̃` from an inverse temperature `β⁻¹/ε_τ`; zero maps to [`PURE_STATE_BETA`].
pub fn beta_from_inverse<T: Real>(beta_inv: T) -> Result<T> {
    if !(beta_inv >= T::zero()) || !beta_inv.is_finite() {
        return Err(CatError::param(
            "beta_inv",
            format!("must be finite and >= 0, got {}", beta_inv.as_f64()),
        ));
    }
    Ok(if beta_inv == T::zero() {
        T::lit(PURE_STATE_BETA)
    } else {
        T::one() / beta_inv
    })
}

#[derive(Clone, Debug)]
pub struct EvolvedState<T: Real> {
    pub rho: DensityMatrix<T>,
    pub elapsed: T,
    pub params: TwistTurnParams<T>,
    pub preparation: Preparation<T>,
}

/// Prepares the labelled thermal state and evolves it for
/// `time_factor · T_π`.
pub fn prepare_and_evolve<T: Real>(
    label: InitialState,
    beta_scaled: T,
    time_factor: T,
    params: &TwistTurnParams<T>,
) -> Result<EvolvedState<T>> {
    let prop = Propagator::new(&params.hamiltonian());
    prepare_and_evolve_with(&prop, label, beta_scaled, time_factor, params)
}

/// As [`prepare_and_evolve`], reusing a cached propagator for `params`.
pub fn prepare_and_evolve_with<T: Real>(
    prop: &Propagator<T>,
    label: InitialState,
    beta_scaled: T,
    time_factor: T,
    params: &TwistTurnParams<T>,
) -> Result<EvolvedState<T>> {
    if !(time_factor >= T::zero()) || !time_factor.is_finite() {
        return Err(CatError::param(
            "time_factor",
            format!("must be finite and >= 0, got {}", time_factor.as_f64()),
        ));
    }
    let preparation = Preparation::new(label, beta_scaled, params)?;
    let rho0 = preparation.state(params.space)?;
    let elapsed = time_factor * t_pi(params.space, params.u_int)?;
    let rho = prop.evolve(&rho0, elapsed)?;
    Ok(EvolvedState {
        rho,
        elapsed,
        params: *params,
        preparation,
    })
}
