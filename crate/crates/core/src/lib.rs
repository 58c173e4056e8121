//! Numerical laboratory for disk averages on foliations by hyperbolic surfaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`quad`]: adaptive 1D/polar quadrature, finite-difference Laplacians and
//!   uniform sampling of hyperbolic disks.
//! - [`hyp`]: half-plane and disk models, hyperbolic distance and area, and the
//!   geodesic/horocycle flows on `PSL(2, R)`.
//! - [`weights`]: the radial cut-off profiles `psi` and `phi` on the disk and the
//!   probability measures they define.
//! - [`harmonic`]: Green–Riesz checks, the boundary closed form of the
//!   `phi`-weighted Laplacian integral and harmonicity defects of measures.
//! - [`solv`]: the `Solv3` torus-bundle example where disk averages converge to a
//!   non-harmonic limit.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harmonic;
pub mod hyp;
pub mod measure;
pub mod quad;
pub mod rng;
pub mod solv;
pub mod weights;

pub use error::{Error, Result};
pub use measure::NodeMeasure;
