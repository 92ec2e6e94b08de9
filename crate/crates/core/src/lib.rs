//! Fourier analysis on bounded Vilenkin groups.
//!
//! The crate works on truncated groups, where every function is constant on
//! cylinders of some finite depth. Integrals over the group become finite
//! sums, so Fourier coefficients, Dirichlet kernels, partial sums and strong
//! means are computed exactly up to floating point.
//!
//! * [`group`]: modulus sequences, the scale ladder, group points.
//! * [`basis`]: characters, Dirichlet kernels, the fast transform.
//! * [`summability`]: two-dimensional partial sums, gauges, strong means,
//!   block power means and the kernel integral of Glukhov's lemma.
//! * [`approximation`]: truncation surrogates for best approximation and the
//!   right-hand side of the strong approximation estimate.
//! * [`counterexample`]: the divergence construction for gauges growing
//!   faster than `sqrt(u)`.
//! * [`harness`]: the experiment runner behind the `vilenkin-harness` binary.

pub mod approximation;
pub mod basis;
pub mod counterexample;
pub mod error;
pub mod group;
pub mod harness;
pub mod random;
pub mod summability;

pub use basis::{CylinderGrid1D, Spectrum1D};
pub use error::{Error, Result};
pub use group::{GroupPoint, IndexDigits, ModulusSequence, NumberSystem, VilenkinGroup};
pub use summability::{CylinderGrid2D, Gauge, Spectrum2D};

pub use num_complex::Complex64;
