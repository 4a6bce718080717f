//! Eigenvalues of attractive Robin Laplacians and the boundary geometry that
//! governs them.
//!
//! For a bounded smooth domain `Ω ⊂ R^ν` and a large Robin parameter `α`,
//! the low eigenvalues behave like `−α² − (ν−1)·H_max·α + o(α)` where `H_max`
//! is the largest mean curvature of the boundary. This crate provides
//!
//! * [`geometry`]: domain descriptions, curvature, volume/area, `H_max`;
//! * [`model1d`]: the one-dimensional boundary-layer operators and their
//!   exact spectra from secular equations;
//! * [`radial`]: exact negative spectra of balls and spherical shells via
//!   scaled modified Bessel functions;
//! * [`fem2d`]: a P1 finite-element solver for star-shaped planar domains;
//! * [`asympt`]: extraction of the linear coefficient and remainder exponent
//!   from eigenvalue curves and domain comparisons;
//! * [`geominequal`]: the support-function identities, the `H_max` lower
//!   bound and a volume-preserving perturbation that lowers `H_max`.

pub mod asympt;
pub mod error;
pub mod fem2d;
pub mod geometry;
pub mod geominequal;
pub mod model1d;
pub mod quadrature;
pub mod radial;
pub mod roots;
pub mod spectral;

pub use error::{Error, Result};
pub use geometry::{DomainSpec, GeometrySummary};
pub use spectral::{Method, SpectralResult};
