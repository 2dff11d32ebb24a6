//! Counting statistics, extensive difference and Fisher information.
//!
//! The interferometric protocol: encode a phase `ψ` about `J_Ω`
//! (`ρ_ψ = e^{iψJ_Ω} ρ e^{−iψJ_Ω}`), rotate with the read-out `U_r` and count
//! `J_z`, giving `p(r) = ⟨m|U_r† ρ_ψ U_r|m⟩`.

use nalgebra::{Complex, ComplexField};

use crate::error::{CatError, Result};
use crate::scalar::{hermitize, CMatrix, Real};
use crate::spectral::SpectralDecomp;
use crate::spin::{cartesian_ops, DensityMatrix, HermitianOp, SpinAxis, SpinSpace, UnitaryOp};

/// Eigenvalue-pair cutoff in the QFI sum.
pub const QFI_PAIR_CUTOFF: f64 = 1e-12;
/// Probability cutoff in CFI sums.
pub const CFI_BIN_CUTOFF: f64 = 1e-12;
pub const DEFAULT_FD_DELTA: f64 = 1e-4;
/// Largest phase step accepted by [`cfi_finite_difference`].
pub const MAX_FD_DELTA: f64 = 0.1;
/// Relative slack in `F_c ≤ F_q`.
pub const CHAIN_SLACK: f64 = 1e-6;
/// Absolute slack in `r_c ≤ r_q ≤ 1`.
pub const RATIO_SLACK: f64 = 1e-9;
pub const SIGNIFICANT_RQ: f64 = 0.1;
pub const STRONG_RQ: f64 = 2.0 / 3.0;

/// Probabilities over `m = −j..=j`.
#[derive(Clone, Debug, PartialEq)]
pub struct JzDistribution<T: Real> {
    space: SpinSpace,
    probs: Vec<T>,
}

impl<T: Real> JzDistribution<T> {
    /// Clamps entries above `−1e-12` to zero and requires unit sum within
    /// `1e-9`.
    pub fn new(space: SpinSpace, probs: Vec<T>) -> Result<Self> {
        space.check_dim(probs.len())?;
        let floor = -T::tol(1e-12);
        let mut out = probs;
        for p in out.iter_mut() {
            if !p.is_finite() || *p < floor {
                return Err(CatError::param("probs", format!("invalid entry {}", p.as_f64())));
            }
            *p = p.max(T::zero());
        }
        let total = out.iter().fold(T::zero(), |a, &p| a + p);
        if (total - T::one()).abs() > T::tol(1e-9) {
            return Err(CatError::param("probs", format!("sum is {}", total.as_f64())));
        }
        Ok(Self { space, probs: out })
    }

    pub fn space(&self) -> SpinSpace {
        self.space
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// `(m, p)` pairs in ascending `m`.
    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(k, &p)| (self.space.m::<T>(k), p))
    }

    pub fn mean(&self) -> T {
        self.iter().fold(T::zero(), |a, (m, p)| a + m * p)
    }

    pub fn variance(&self) -> T {
        let mu = self.mean();
        self.iter()
            .fold(T::zero(), |a, (m, p)| a + (m - mu) * (m - mu) * p)
            .max(T::zero())
    }
}

pub fn jz_distribution<T: Real>(rho: &DensityMatrix<T>) -> JzDistribution<T> {
    let mut probs = rho.populations();
    let total = probs.iter().fold(T::zero(), |a, &p| a + p);
    for p in probs.iter_mut() {
        *p /= total;
    }
    JzDistribution {
        space: rho.space(),
        probs,
    }
}

/// `Δ_s = √(⟨m²⟩ − ⟨m⟩²)`.
pub fn statistical_uncertainty<T: Real>(dist: &JzDistribution<T>) -> T {
    dist.variance().sqrt()
}

/// Dead/alive decomposition of a counting distribution about its mean.
#[derive(Clone, Debug, PartialEq)]
pub struct CatSplit<T: Real> {
    pub mean: T,
    /// Renormalised weights strictly below the mean (zero elsewhere).
    pub p_left: Vec<T>,
    /// Renormalised weights strictly above the mean (zero elsewhere).
    pub p_right: Vec<T>,
    pub n_left: T,
    pub n_right: T,
    /// `|⟨J_z⟩_R − ⟨J_z⟩_L|`
    pub extensive_difference: T,
    pub peak_width_left: T,
    pub peak_width_right: T,
    /// One side carries no weight; `Λ` is then reported as 0.
    pub degenerate: bool,
}

fn side_moments<T: Real>(space: SpinSpace, p: &[T]) -> (T, T) {
    let mean = p
        .iter()
        .enumerate()
        .fold(T::zero(), |a, (k, &w)| a + space.m::<T>(k) * w);
    let var = p.iter().enumerate().fold(T::zero(), |a, (k, &w)| {
        let d = space.m::<T>(k) - mean;
        a + d * d * w
    });
    (mean, var.max(T::zero()).sqrt())
}

/// Splits at `⟨J_z⟩`; a bin lying exactly on the mean belongs to neither side.
pub fn cat_split<T: Real>(dist: &JzDistribution<T>) -> CatSplit<T> {
    let space = dist.space;
    let mean = dist.mean();
    let n = space.dim();
    let mut left = vec![T::zero(); n];
    let mut right = vec![T::zero(); n];
    for (k, &p) in dist.probs.iter().enumerate() {
        let m = space.m::<T>(k);
        if m < mean {
            left[k] = p;
        } else if m > mean {
            right[k] = p;
        }
    }
    let n_left = left.iter().fold(T::zero(), |a, &p| a + p);
    let n_right = right.iter().fold(T::zero(), |a, &p| a + p);
    let degenerate = !(n_left > T::zero()) || !(n_right > T::zero());
    if !degenerate {
        left.iter_mut().for_each(|p| *p /= n_left);
        right.iter_mut().for_each(|p| *p /= n_right);
    }
    let (mean_l, width_l) = if n_left > T::zero() {
        side_moments(space, &left)
    } else {
        (T::zero(), T::zero())
    };
    let (mean_r, width_r) = if n_right > T::zero() {
        side_moments(space, &right)
    } else {
        (T::zero(), T::zero())
    };
    CatSplit {
        mean,
        extensive_difference: if degenerate { T::zero() } else { (mean_r - mean_l).abs() },
        p_left: left,
        p_right: right,
        n_left,
        n_right,
        peak_width_left: width_l,
        peak_width_right: width_r,
        degenerate,
    }
}

/// Read-out rotation `U_r = e^{−i·angle·J(axis)}` applied before counting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadoutSpec<T: Real> {
    pub axis: SpinAxis<T>,
    pub angle: T,
}

impl<T: Real> Default for ReadoutSpec<T> {
    /// Quarter turn about `x`: counts `−J_y`.
    fn default() -> Self {
        Self {
            axis: SpinAxis::x(),
            angle: T::frac_pi_2(),
        }
    }
}

impl<T: Real> ReadoutSpec<T> {
    /// No rotation: counts `J_z`.
    pub fn direct() -> Self {
        Self {
            axis: SpinAxis::z(),
            angle: T::zero(),
        }
    }

    pub fn unitary(&self, space: SpinSpace) -> UnitaryOp<T> {
        if self.angle == T::zero() {
            UnitaryOp::identity(space)
        } else {
            crate::spin::rotation(space, self.angle, &self.axis)
        }
    }
}

/// Diagonal of `U† A U`, real parts.
fn rotated_diagonal<T: Real>(u: &UnitaryOp<T>, a: &CMatrix<T>) -> Vec<T> {
    let au = a * u.matrix();
    let um = u.matrix();
    (0..um.ncols())
        .map(|c| {
            um.column(c)
                .iter()
                .zip(au.column(c).iter())
                .fold(T::zero(), |acc, (x, y)| acc + (x.conj() * y).re)
        })
        .collect()
}

fn encoded<T: Real>(rho: &DensityMatrix<T>, decomp: &SpectralDecomp<T>, psi: T) -> CMatrix<T> {
    // e^{iψG} ρ e^{−iψG}
    let u = decomp.map(|l| Complex::new((psi * l).cos(), (psi * l).sin()));
    hermitize(&(&u * rho.matrix() * u.adjoint()))
}

/// Counting distribution after encoding `ψ` about `encoding_axis` and
/// rotating with `readout`.
pub fn protocol_distribution<T: Real>(
    rho: &DensityMatrix<T>,
    psi: T,
    encoding_axis: &SpinAxis<T>,
    readout: &ReadoutSpec<T>,
) -> Result<JzDistribution<T>> {
    let space = rho.space();
    let decomp = crate::spin::axis_op(space, encoding_axis).spectral();
    let ur = readout.unitary(space);
    Ok(distribution_from(space, &ur, &encoded(rho, &decomp, psi)))
}

fn distribution_from<T: Real>(space: SpinSpace, ur: &UnitaryOp<T>, m: &CMatrix<T>) -> JzDistribution<T> {
    let mut probs = rotated_diagonal(ur, m);
    for p in probs.iter_mut() {
        *p = p.max(T::zero());
    }
    JzDistribution { space, probs }
}

/// Eigensystem of `ρ` with clamped weights, reusable across generators.
#[derive(Clone, Debug)]
pub struct QfiKernel<T: Real> {
    space: SpinSpace,
    decomp: SpectralDecomp<T>,
    weights: Vec<T>,
}

impl<T: Real> QfiKernel<T> {
    pub fn new(rho: &DensityMatrix<T>) -> Self {
        let decomp = rho.spectral();
        let n = decomp.dim();
        let p: Vec<T> = decomp.eigenvalues().iter().map(|&x| x.max(T::zero())).collect();
        let cutoff = T::lit(QFI_PAIR_CUTOFF);
        let mut weights = vec![T::zero(); n * n];
        for a in 0..n {
            for b in 0..n {
                let s = p[a] + p[b];
                if s >= cutoff {
                    let d = p[a] - p[b];
                    weights[a * n + b] = T::lit(2.0) * d * d / s;
                }
            }
        }
        Self {
            space: rho.space(),
            decomp,
            weights,
        }
    }

    /// `2 Σ (p_l − p_l′)²/(p_l + p_l′) |⟨l|G|l′⟩|²`
    pub fn qfi(&self, generator: &HermitianOp<T>) -> Result<T> {
        self.space.check_dim(generator.space().dim())?;
        let g = self.decomp.to_eigenbasis(generator.matrix());
        let n = self.decomp.dim();
        let mut f = T::zero();
        for a in 0..n {
            for b in 0..n {
                let w = self.weights[a * n + b];
                if w > T::zero() {
                    f += w * g[(a, b)].modulus_squared();
                }
            }
        }
        Ok(f.max(T::zero()))
    }

    /// `Q_ab` with `F_q(J(n)) = nᵀ Q n` for `J(n) = n·(J_x, J_y, J_z)`.
    pub fn qfi_matrix(&self) -> [[T; 3]; 3] {
        let ops = cartesian_ops::<T>(self.space);
        let rot: Vec<CMatrix<T>> = ops
            .as_array()
            .iter()
            .map(|op| self.decomp.to_eigenbasis(op.matrix()))
            .collect();
        let n = self.decomp.dim();
        let mut q = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for k in i..3 {
                let mut acc = T::zero();
                for a in 0..n {
                    for b in 0..n {
                        let w = self.weights[a * n + b];
                        if w > T::zero() {
                            acc += w * (rot[i][(a, b)] * rot[k][(a, b)].conj()).re;
                        }
                    }
                }
                q[i][k] = acc;
                q[k][i] = acc;
            }
        }
        q
    }
}

pub fn qfi<T: Real>(rho: &DensityMatrix<T>, generator: &HermitianOp<T>) -> Result<T> {
    QfiKernel::new(rho).qfi(generator)
}

/// Classical Fisher information with the exact derivative
/// `∂_ψ p_r = ⟨r| i[G, ρ] |r⟩`.
pub fn cfi_commutator<T: Real>(
    rho: &DensityMatrix<T>,
    generator: &HermitianOp<T>,
    readout: &ReadoutSpec<T>,
) -> Result<T> {
    let space = rho.space();
    space.check_dim(generator.space().dim())?;
    let g = generator.matrix();
    let comm = g * rho.matrix() - rho.matrix() * g;
    let c = comm.map(|z| Complex::new(-z.im, z.re));
    let ur = readout.unitary(space);
    let p = rotated_diagonal(&ur, rho.matrix());
    let dp = rotated_diagonal(&ur, &c);
    Ok(fisher_sum(&p, &dp))
}

fn fisher_sum<T: Real>(p: &[T], dp: &[T]) -> T {
    let cutoff = T::lit(CFI_BIN_CUTOFF);
    p.iter()
        .zip(dp)
        .filter(|(p, _)| **p >= cutoff)
        .fold(T::zero(), |a, (&p, &d)| a + d * d / p)
}

/// Central-difference estimate with its `δ/2` companion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteDifferenceCfi<T: Real> {
    /// Richardson-combined `(4·F(δ/2) − F(δ))/3` derivative estimate.
    pub value: T,
    pub at_delta: T,
    pub at_half_delta: T,
}

/// What an experiment would measure: `p(±δ)` from the protocol and a
/// central difference. `δ` must lie in `(0, 0.1)`.
pub fn cfi_finite_difference<T: Real>(
    rho: &DensityMatrix<T>,
    encoding_axis: &SpinAxis<T>,
    readout: &ReadoutSpec<T>,
    delta: T,
) -> Result<FiniteDifferenceCfi<T>> {
    if !(delta > T::zero()) || !delta.is_finite() {
        return Err(CatError::param("delta", format!("must be > 0, got {}", delta.as_f64())));
    }
    if delta >= T::lit(MAX_FD_DELTA) {
        return Err(CatError::param(
            "delta",
            format!(
                "{} is outside the local regime, use < {MAX_FD_DELTA}",
                delta.as_f64()
            ),
        ));
    }
    let space = rho.space();
    let decomp = crate::spin::axis_op(space, encoding_axis).spectral();
    let ur = readout.unitary(space);
    let at = |psi: T| distribution_from(space, &ur, &encoded(rho, &decomp, psi)).probs;
    let p0 = at(T::zero());
    let half = delta * T::lit(0.5);
    let deriv = |h: T| -> Vec<T> {
        let (a, b) = (at(h), at(-h));
        a.iter().zip(&b).map(|(x, y)| (*x - *y) / (h + h)).collect()
    };
    let d_full = deriv(delta);
    let d_half = deriv(half);
    let d_rich: Vec<T> = d_full
        .iter()
        .zip(&d_half)
        .map(|(f, h)| (T::lit(4.0) * *h - *f) / T::lit(3.0))
        .collect();
    Ok(FiniteDifferenceCfi {
        value: fisher_sum(&p0, &d_rich),
        at_delta: fisher_sum(&p0, &d_full),
        at_half_delta: fisher_sum(&p0, &d_half),
    })
}

/// Everything quoted for one prepared state.
#[derive(Clone, Debug, PartialEq)]
pub struct MetrologyReport<T: Real> {
    pub delta_s: T,
    pub f_q: T,
    pub delta_q: T,
    pub f_c: T,
    /// `Δ_q/Δ_s`; `None` when `Δ_s = 0`.
    pub r_q: Option<T>,
    /// `½√F_c/Δ_s`; `None` when `Δ_s = 0`.
    pub r_c: Option<T>,
    pub lambda: T,
    pub reduced_lambda_q: Option<T>,
    pub reduced_lambda_c: Option<T>,
    pub n_eff_bound: T,
    pub split: CatSplit<T>,
}

impl<T: Real> MetrologyReport<T> {
    pub fn degenerate(&self) -> bool {
        self.r_q.is_none()
    }

    /// `r_q > 0.1`
    pub fn significant(&self) -> bool {
        self.r_q.is_some_and(|r| r > T::lit(SIGNIFICANT_RQ))
    }

    /// `r_q > 2/3`
    pub fn strong(&self) -> bool {
        self.r_q.is_some_and(|r| r > T::lit(STRONG_RQ))
    }
}

/// Assembles the report for `generator` (usually `J_z`) and `readout`,
/// enforcing `F_c ≤ F_q` and `r_c ≤ r_q ≤ 1`.
pub fn metrology_report<T: Real>(
    rho: &DensityMatrix<T>,
    generator: &HermitianOp<T>,
    readout: &ReadoutSpec<T>,
) -> Result<MetrologyReport<T>> {
    metrology_report_with(&QfiKernel::new(rho), rho, generator, readout)
}

pub fn metrology_report_with<T: Real>(
    kernel: &QfiKernel<T>,
    rho: &DensityMatrix<T>,
    generator: &HermitianOp<T>,
    readout: &ReadoutSpec<T>,
) -> Result<MetrologyReport<T>> {
    let space = rho.space();
    let split = cat_split(&jz_distribution(rho));
    let delta_s = rho.variance(generator)?.sqrt();
    let f_q = kernel.qfi(generator)?;
    let f_c = cfi_commutator(rho, generator, readout)?;
    let half = T::lit(0.5);
    let delta_q = half * f_q.sqrt();
    let (r_q, r_c) = if delta_s > T::zero() {
        (Some(delta_q / delta_s), Some(half * f_c.sqrt() / delta_s))
    } else {
        (None, None)
    };
    let lambda = split.extensive_difference;
    let report = MetrologyReport {
        delta_s,
        f_q,
        delta_q,
        f_c,
        r_q,
        r_c,
        lambda,
        reduced_lambda_q: r_q.map(|r| r * lambda),
        reduced_lambda_c: r_c.map(|r| r * lambda),
        n_eff_bound: f_q / (T::lit(4.0) * T::lit(space.n_particles() as f64)),
        split,
    };
    check_chain(&report)?;
    Ok(report)
}

fn check_chain<T: Real>(r: &MetrologyReport<T>) -> Result<()> {
    let chain = T::tol(CHAIN_SLACK);
    let slack = T::tol(RATIO_SLACK);
    if r.f_c > r.f_q * (T::one() + chain) + slack {
        return Err(CatError::InvariantViolation(format!(
            "F_c = {} exceeds F_q = {}",
            r.f_c.as_f64(),
            r.f_q.as_f64()
        )));
    }
    if let (Some(rq), Some(rc)) = (r.r_q, r.r_c) {
        if rq > T::one() + slack || rc > rq + slack + chain * rq {
            return Err(CatError::InvariantViolation(format!(
                "ratios out of order: r_c = {}, r_q = {}",
                rc.as_f64(),
                rq.as_f64()
            )));
        }
    }
    Ok(())
}

/// `F_q(J(θ,φ))/(4N)` over an axis grid.
#[derive(Clone, Debug, PartialEq)]
pub struct QfiAxisMap<T: Real> {
    pub thetas: Vec<T>,
    pub phis: Vec<T>,
    /// `values[i][k]` at `(thetas[i], phis[k])`.
    pub values: Vec<Vec<T>>,
    pub max: T,
    pub argmax: (usize, usize),
}

impl<T: Real> QfiAxisMap<T> {
    pub fn argmax_axis(&self) -> SpinAxis<T> {
        SpinAxis::new(self.thetas[self.argmax.0], self.phis[self.argmax.1])
    }
}

/// `n` points spanning `[0, π]` inclusive.
pub fn theta_grid<T: Real>(n: usize) -> Vec<T> {
    match n {
        0 => vec![],
        1 => vec![T::frac_pi_2()],
        _ => (0..n)
            .map(|k| T::pi() * T::lit(k as f64) / T::lit((n - 1) as f64))
            .collect(),
    }
}

/// `n` points on `[−π, π)`.
pub fn phi_grid<T: Real>(n: usize) -> Vec<T> {
    (0..n)
        .map(|k| -T::pi() + T::two_pi() * T::lit(k as f64) / T::lit(n as f64))
        .collect()
}

pub fn qfi_axis_map<T: Real>(
    rho: &DensityMatrix<T>,
    thetas: &[T],
    phis: &[T],
) -> Result<QfiAxisMap<T>> {
    if thetas.is_empty() || phis.is_empty() {
        return Err(CatError::param("grid", "axis grids must be non-empty"));
    }
    let q = QfiKernel::new(rho).qfi_matrix();
    let scale = T::one() / (T::lit(4.0) * T::lit(rho.space().n_particles() as f64));
    let mut values = Vec::with_capacity(thetas.len());
    let mut max = -T::one();
    let mut argmax = (0, 0);
    for (i, &theta) in thetas.iter().enumerate() {
        let mut row = Vec::with_capacity(phis.len());
        for (k, &phi) in phis.iter().enumerate() {
            let n = SpinAxis::new(theta, phi).unit_vector();
            let mut f = T::zero();
            for a in 0..3 {
                for b in 0..3 {
                    f += n[a] * q[a][b] * n[b];
                }
            }
            let v = f.max(T::zero()) * scale;
            if v > max {
                max = v;
                argmax = (i, k);
            }
            row.push(v);
        }
        values.push(row);
    }
    Ok(QfiAxisMap {
        thetas: thetas.to_vec(),
        phis: phis.to_vec(),
        values,
        max,
        argmax,
    })
}

/// `N_eff = max_Ω F_q/(4N)` over the grid, with its axis.
pub fn n_eff<T: Real>(rho: &DensityMatrix<T>, thetas: &[T], phis: &[T]) -> Result<(T, SpinAxis<T>)> {
    let map = qfi_axis_map(rho, thetas, phis)?;
    Ok((map.max, map.argmax_axis()))
}

/// Pure-state shortcut `4·Var(G)`.
pub fn pure_state_qfi<T: Real>(rho: &DensityMatrix<T>, generator: &HermitianOp<T>) -> Result<T> {
    Ok(T::lit(4.0) * rho.variance(generator)?)
}
