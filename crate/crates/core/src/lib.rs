//! Variable-bandwidth Paley-Wiener toolkit.
//!
//! Numerical machinery for the spectral subspaces of the Sturm-Liouville
//! operator `f ↦ -(p f')'` on the line, where `p` is a positive step
//! function. The step profile assigns a local bandwidth `1/√p(x)` to each
//! interval between jumps, and the spectral projection onto `Λ ⊂ [0, ∞)`
//! carves out a reproducing kernel Hilbert space of functions whose local
//! frequency content follows that profile.
//!
//! The crate builds, from a profile and a spectral set:
//!
//! * the fundamental solutions glued across the jumps by transfer matrices
//!   ([`transfer`]), with their connection coefficients kept exactly as
//!   almost periodic trigonometric polynomials ([`appoly`]);
//! * the scalar spectral density `κ` and the oscillatory integral `J`
//!   through which every kernel value factors ([`spectral`]);
//! * the reproducing kernel itself, by the generic exponential-sum route
//!   and by the closed nine-block formula available for two jumps
//!   ([`kernel`]);
//! * Beurling-type densities of point sets against the measure `dx/√p`,
//!   and the averaged kernel trace that pins the critical sampling density
//!   ([`density`]);
//! * finite-window Gram-matrix probes of frame and interpolation bounds
//!   ([`sampling`]).
//!
//! Core numerics are generic over the scalar type through [`Scalar`]
//! (`f32` or `f64`); the aliases at the crate root fix `f64`, which is what
//! the command-line tool and the test suites use.

pub mod appoly;
pub mod density;
pub mod error;
pub mod kernel;
pub mod kernel_blocks;
pub mod linalg;
pub mod piecewise;
pub mod quad;
pub mod sampling;
pub mod scalar;
pub mod spectral;
pub mod testing;
pub mod transfer;

pub use appoly::{APPoly, CosineView};
pub use density::{DensityReport, PointSet, TraceReport};
pub use error::{Error, Result};
pub use kernel::{KernelEvaluator, KernelMode, ThetaDecomposition};
pub use piecewise::{BandwidthProfile, Interval};
pub use sampling::{FrameBounds, GramSystem, InterpolationReport, SweepRow};
pub use scalar::{lit, Scalar};
pub use spectral::{JEvaluator, JMode, Kappa, SpectralSet};
pub use transfer::{ConnectionTable, IdentityResiduals, TransferMatrix};

/// `f64` instantiations, the ones exercised by the CLI and the test suites.
pub type Profile64 = BandwidthProfile<f64>;
pub type APPoly64 = APPoly<f64>;
pub type Spectrum64 = SpectralSet<f64>;
pub type Kappa64 = Kappa<f64>;
pub type Table64 = ConnectionTable<f64>;
pub type JEvaluator64 = JEvaluator<f64>;
pub type Kernel64 = KernelEvaluator<f64>;
pub type PointSet64 = PointSet<f64>;
