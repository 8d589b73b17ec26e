//! Reduction of integer binary forms to small-height equivalents.
//!
//! The crate implements two zero maps into the upper half-plane (the Julia
//! quadratic and the hyperbolic centroid of the roots), the centre-of-mass
//! proxy used in the n-gon experiments, integer shift descent and rational
//! scaling, together with the n-gon database generator used to compare the
//! methods at scale.
//!
//! Coefficients are always listed in descending powers of `x`:
//! `[c0, c1, ..., cn]` stands for `c0 x^n + c1 x^(n-1) y + ... + cn y^n`.

pub mod cli;
pub mod dbgen;
pub mod error;
pub mod forms;
pub mod hyper;
pub mod julia;
pub mod quad;
pub mod reduce;

pub use error::{Error, Result};
pub use forms::{BinaryForm, UnimodularMatrix, UpperRootSet};
pub use hyper::{CentroidResult, UhpPoint};
pub use julia::{JuliaResult, JuliaWeights};
pub use quad::{QuadraticForm, RealQuadratic};
pub use reduce::{Method, ReductionReport, TieRule};
