//! Entanglement detection for Bell-diagonal states of two qudits.
//!
//! A Bell-diagonal state is a probability distribution `c` over the `d^2` Bell
//! projectors generated by the Weyl-Heisenberg operators. This crate provides
//!
//! - [`linalg`]: the small dense complex linear-algebra layer used by the oracles,
//! - [`weyl`]: Weyl operators, Bell states and the dense density-matrix maps
//!   (partial transpose, realignment),
//! - [`phase_space`]: subgroups, cosets and striations of `Z_d x Z_d`,
//! - [`detection`]: the fast Bloch-matrix forms of the realignment and PPT
//!   criteria next to their brute-force dense counterparts,
//! - [`montecarlo`]: seeded uniform sampling of the simplex and detection shares,
//! - [`statefile`]: the JSON / CSV state-file formats used by the CLI.
//!
//! The fast paths never build a `d^2 x d^2` matrix. The oracle paths always do,
//! and exist to cross-check the fast paths.

pub mod detection;
pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod phase_space;
pub mod statefile;
pub mod weyl;

pub use detection::{classify, ClassificationRecord, Label};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use weyl::{CoefficientMatrix, PhaseIndex};

pub use num_complex::Complex64;
