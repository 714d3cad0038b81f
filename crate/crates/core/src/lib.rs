//! Structure-preserving interpolatory model reduction for structured
//! bilinear control systems.
//!
//! A system is a quadruple of matrix functions `C(s)`, `K(s)`, `N_j(s)`,
//! `B(s)` (see [`system`]). [`transfer`] evaluates the regular subsystem
//! transfer functions, [`interpolation`] builds projection bases that force
//! a reduced model to match them, and [`reduction`] performs the projection
//! while keeping the template (second-order, time-delay, ...) intact.

pub mod benchmarks;
pub mod error;
pub mod interpolation;
pub mod linalg;
pub mod reduction;
pub mod simulation;
pub mod system;
pub mod transfer;

pub use error::{Error, Result};
pub use interpolation::{InterpolationSpec, PointTuple, Side};
pub use reduction::{reduce, ReducedModel};
pub use system::{StructuredBilinearSystem, Template};
