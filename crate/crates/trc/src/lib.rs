//! Completion of partially observed dense N-order tensors with a two-layer
//! low-rank model: a tensor-ring decomposition whose 3-order cores are
//! themselves regularized by the tubal nuclear norm (t-SVD layer), plus
//! weighted anisotropic total variation, solved by ADMM with automatic bond
//! rank pruning.
//!
//! Module map:
//! - [`tensor`]: the column-major dense tensor type, unfoldings, masks.
//! - [`rng`]: pinned SplitMix64 streams and mask sampling (reproducible
//!   across platforms by construction).
//! - [`tr`]: tensor-ring chains, reconstruction, subchain matrices.
//! - [`tsvd`]: Fourier-domain tubal SVD, nuclear norm, and its proximal map.
//! - [`tv`]: weighted circular differences and the FFT solve of the
//!   TV-regularized linear system.
//! - [`solver`]: the ADMM loop ([`solver::solve`] is the main entry point).
//! - [`metrics`]: PSNR / SSIM / RSE / SAM and per-band means.
//! - [`io`]: TNS1 tensor files, masks, PPM images, chain bundles.
//! - [`synth`]: deterministic synthetic problems for tests and experiments.

pub mod error;
mod fft;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod solver;
pub mod synth;
pub mod tensor;
pub mod tr;
pub mod tsvd;
pub mod tv;

pub use error::{Error, Result};
pub use tensor::{Mask, Tensor};
