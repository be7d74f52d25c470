//! Numerical laboratory for the defocusing semilinear wave equation
//! □φ = -∂ₜ²φ + Δφ = |φ|^{p-1}φ on ℝ^{1+2}.
//!
//! The crate simulates the Cauchy problem on a uniform Cartesian grid,
//! evaluates the weighted-energy functionals and pointwise profiles that
//! control the long-time behaviour of solutions (potential-energy decay,
//! conformal charge, null-hyperplane fluxes, ring suprema), and stress-tests
//! the functional inequalities those estimates rest on (logarithmic Sobolev
//! embeddings, the F(A) kernel bound, the log-integral bound).
//!
//! Everything is `f64`, deterministic, and data-parallel over grid rows when
//! the `parallel` feature (default) is enabled; reductions always use the
//! same fixed pairwise tree, so results are bit-identical across thread
//! counts and with the sequential fallback.

pub mod config;
pub mod data;
pub mod diagnostics;
pub mod energy;
pub mod error;
pub mod field;
pub mod grid;
pub mod inequalities;
pub mod kernel;
pub mod params;
pub mod presets;
pub mod quad;
pub mod rates;
pub mod report;
pub mod rings;
pub mod solver;
pub mod spectral;
pub mod trace;
pub mod util;

pub use error::{Error, Result};
pub use field::{Field, WaveState};
pub use grid::{Boundary, GridSpec};
pub use params::PParam;
