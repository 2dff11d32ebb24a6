//! Two-mode bosonic interferometer toolkit: collective-spin states, the
//! twist-and-turn evolution that makes cat states out of them, and the
//! Fisher-information measures of how macroscopically indefinite they are.
//!
//! Everything is generic over [`Real`]; the `*64` aliases fix `f64`.

// `!(x > 0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cat_qubit;
pub mod classical;
pub mod dynamics;
pub mod error;
pub mod metrology;
pub mod scalar;
pub mod spectral;
pub mod spin;
pub mod wigner;

pub use error::{CatError, Result};
pub use scalar::{CMatrix, CVector, Real};
pub use spectral::SpectralDecomp;
pub use spin::{DensityMatrix, HermitianOp, SpinAxis, SpinSpace, UnitaryOp};

pub type DensityMatrix64 = DensityMatrix<f64>;
pub type HermitianOp64 = HermitianOp<f64>;
pub type UnitaryOp64 = UnitaryOp<f64>;
pub type SpinAxis64 = SpinAxis<f64>;
pub type SpectralDecomp64 = SpectralDecomp<f64>;
pub type TwistTurnParams64 = dynamics::TwistTurnParams<f64>;
pub type EvolvedState64 = dynamics::EvolvedState<f64>;
pub type MeanFieldParams64 = classical::MeanFieldParams<f64>;
pub type JzDistribution64 = metrology::JzDistribution<f64>;
pub type MetrologyReport64 = metrology::MetrologyReport<f64>;
pub type WignerGrid64 = wigner::WignerGrid<f64>;
pub type SyntheticCat64 = cat_qubit::SyntheticCat<f64>;
