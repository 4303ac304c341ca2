//! Vector Slepian functions on the unit sphere.
//!
//! Bandlimited vector fields that are optimally concentrated in a region
//! (and their spacelimited, spectrally concentrated counterparts) are
//! eigenvectors of a symmetric localization kernel built from the real
//! vector spherical harmonics `P_lm`, `B_lm` and `C_lm`. This crate builds
//! those kernels for arbitrary regions by quadrature and for polar caps
//! analytically, solves the eigenproblems, and uses the resulting bases for
//! regional approximation of vector fields.
//!
//! Angles are radians throughout the library; only the command-line front
//! end speaks degrees.

pub mod approx;
pub mod cli;
pub mod error;
pub mod io;
pub mod kernel;
mod quadrature;
pub mod region;
pub mod spectral;
pub mod specfun;
pub mod vsh;

pub use approx::{error_bias, project, reconstruct, sweep, ReconstructionReport, RegionEnergy};
pub use error::{Error, Result};
pub use kernel::{
    assemble_polarcap, assemble_quadrature, assemble_with_rule, KernelKind, KernelMatrix,
    PolarCapKernel,
};
pub use region::{
    region_quadrature, masked_quadrature, sphere_quadrature, QuadratureRule, Region,
    DEFAULT_OVERSAMPLE,
};
pub use spectral::{
    merge_fixed_order, mercer_sum, polar_cap_basis, shannon, solve, spacelimit,
    tangential_partner, weighted_energy, BasisKind, ShannonReport, SlepianBasis,
};
pub use vsh::{
    analyze, eval_b, eval_c, eval_p, synth, Block, CoeffVector, GridSpec, Part, SampledField,
    SpherePoint, TangentVector3, VectorGrid,
};
