//! Wigner-type quasi-probability on the `(z, φ)` cylinder,
//! `W(z_m, φ) = Σ_n e^{i2nφ} ⟨m+n|ρ|m−n⟩`.
//!
//! The kernel has period `π` in `φ`. Its `φ`-average returns `⟨m|ρ|m⟩`
//! exactly on a uniform grid of more than `N` points; coarser grids alias
//! the `|n| > P/2` harmonics back onto the average.

use nalgebra::Complex;

use crate::error::{CatError, Result};
use crate::metrology::phi_grid;
use crate::scalar::Real;
use crate::spin::DensityMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid<T: Real> {
    /// `z_m = 2m/N` ascending.
    pub z_values: Vec<T>,
    /// Uniform on `[−π, π)`.
    pub phi_values: Vec<T>,
    /// `values[m][k]` at `(z_values[m], phi_values[k])`.
    pub values: Vec<Vec<T>>,
    /// Largest discarded imaginary part.
    pub imaginary_residue: T,
}

impl<T: Real> WignerGrid<T> {
    /// Grid average over `φ` for each `z_m`.
    pub fn phi_average(&self) -> Vec<T> {
        let n = T::lit(self.phi_values.len() as f64);
        self.values
            .iter()
            .map(|row| row.iter().fold(T::zero(), |a, &w| a + w) / n)
            .collect()
    }

    /// `(row, column)` of the largest value.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut top = T::min_value().unwrap_or(-T::one());
        for (i, row) in self.values.iter().enumerate() {
            for (k, &w) in row.iter().enumerate() {
                if w > top {
                    top = w;
                    best = (i, k);
                }
            }
        }
        best
    }
}

/// Smallest grid for which the `φ`-average is exact.
pub fn min_exact_phi_points(n_particles: usize) -> usize {
    n_particles + 1
}

pub fn wigner<T: Real>(rho: &DensityMatrix<T>, phi_points: usize) -> Result<WignerGrid<T>> {
    if phi_points < 4 {
        return Err(CatError::param(
            "phi_points",
            format!("need at least 4, got {phi_points}"),
        ));
    }
    let space = rho.space();
    let dim = space.dim();
    let j = space.j::<T>();
    let phis: Vec<T> = phi_grid(phi_points);
    let a = rho.matrix();
    let mut values = Vec::with_capacity(dim);
    let mut residue = T::zero();
    for k in 0..dim {
        let reach = k.min(dim - 1 - k);
        let mut row = Vec::with_capacity(phi_points);
        for &phi in &phis {
            let mut w = a[(k, k)];
            for n in 1..=reach {
                let angle = T::lit(2.0 * n as f64) * phi;
                let e = Complex::new(angle.cos(), angle.sin());
                w += e * a[(k + n, k - n)] + e.conj() * a[(k - n, k + n)];
            }
            residue = residue.max(w.im.abs());
            row.push(w.re);
        }
        values.push(row);
    }
    Ok(WignerGrid {
        z_values: (0..dim).map(|k| space.m::<T>(k) / j).collect(),
        phi_values: phis,
        values,
        imaginary_residue: residue,
    })
}

/// Axial circular spread of `|W|` over `φ` for the `z < 0` and `z > 0`
/// halves, `√(−2 ln R)/2` with `R` the mean resultant of `e^{i2φ}`.
pub fn ridge_spread<T: Real>(grid: &WignerGrid<T>) -> (T, T) {
    let spread = |keep: &dyn Fn(T) -> bool| {
        let (mut c, mut s, mut total) = (T::zero(), T::zero(), T::zero());
        for (row, &z) in grid.values.iter().zip(&grid.z_values) {
            if !keep(z) {
                continue;
            }
            for (&w, &phi) in row.iter().zip(&grid.phi_values) {
                let a = w.abs();
                let two = phi + phi;
                c += a * two.cos();
                s += a * two.sin();
                total += a;
            }
        }
        if !(total > T::zero()) {
            return T::zero();
        }
        let r = ((c * c + s * s).sqrt() / total).min(T::one());
        if r <= T::zero() {
            return T::max_value().unwrap_or(T::one() / T::default_epsilon());
        }
        (-T::lit(2.0) * r.ln()).sqrt() * T::lit(0.5)
    };
    (spread(&|z| z < T::zero()), spread(&|z| z > T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{coherent_state, thermal_state, SpinAxis, SpinSpace};
    use crate::CMatrix;
    use std::f64::consts::PI;

    #[test]
    fn small_grid_rejected() {
        let rho = DensityMatrix::<f64>::maximally_mixed(SpinSpace::new(4).unwrap());
        assert!(wigner(&rho, 3).is_err());
    }

    #[test]
    fn marginal_and_realness() {
        let s = SpinSpace::new(12).unwrap();
        let rho = thermal_state(s, 1.3, 0.4, -2.0).unwrap();
        let g: WignerGrid<f64> = wigner(&rho, 13).unwrap();
        assert!(g.imaginary_residue < 1e-12);
        let avg = g.phi_average();
        for (k, p) in rho.populations().iter().enumerate() {
            assert!((avg[k] - p).abs() < 1e-12_f64);
        }
    }

    #[test]
    fn dephased_state_is_flat() {
        let s = SpinSpace::new(6).unwrap();
        let rho = DensityMatrix::diagonal(s, &[1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
        let g: WignerGrid<f64> = wigner(&rho, 8).unwrap();
        for row in &g.values {
            assert!(row.iter().all(|&w| (w - row[0]).abs() < 1e-15));
        }
    }

    #[test]
    fn coherent_peak_location() {
        let s = SpinSpace::new(40).unwrap();
        let (theta, phi) = (1.2, 0.9);
        let rho = coherent_state(s, &SpinAxis::new(theta, phi));
        let g = wigner(&rho, 96).unwrap();
        let (i, k) = g.argmax();
        let dz = 2.0 / 40.0;
        let dphi = 2.0 * PI / 96.0;
        assert!((g.z_values[i] - f64::cos(theta)).abs() <= dz);
        // period π in φ
        let off = (g.phi_values[k] - phi).rem_euclid(PI);
        assert!(off.min(PI - off) <= dphi);
    }

    #[test]
    fn ridge_spread_bounds() {
        let s = SpinSpace::new(20).unwrap();
        let rho = DensityMatrix::<f64>::maximally_mixed(s);
        let (l, r) = ridge_spread(&wigner(&rho, 32).unwrap());
        assert!(l > 3.0 && r > 3.0);
        let mut m = CMatrix::<f64>::zeros(21, 21);
        m[(15, 15)] = Complex::new(1.0, 0.0);
        let point = DensityMatrix::new(s, m).unwrap();
        let (_, r) = ridge_spread(&wigner(&point, 32).unwrap());
        assert!(r > 3.0);
        let north = coherent_state(s, &SpinAxis::new(1.0, 0.4));
        let (_, r) = ridge_spread(&wigner(&north, 32).unwrap());
        assert!(r < 1.0, "{r}");
    }
}
