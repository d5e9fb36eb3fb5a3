//! Wave-particle duality observables and entanglement criteria for small
//! bosonic and qubit systems.
//!
//! * [`fock`]: truncated two-mode Fock space, ladder operators, phase shift,
//!   beam splitter and normally ordered moments.
//! * [`duality`]: distinguishability, visibility, coincidence and pair
//!   coherence of any order, plus phase-grid reconstruction of visibility.
//! * [`qstate`]: multi-qudit density matrices, partial trace/transpose,
//!   Schmidt decomposition, Bloch directions, parity readout.
//! * [`criteria`]: CHSH, Pauli-sum witness, Cauchy-Schwarz type bounds,
//!   tripartite matrix-entry tests, the four-root criterion and PPT scans.
//! * [`eraser`]: delayed-choice eraser probabilities and sampling.
//! * [`collective`]: collective-spin variance bounds and gradient-field
//!   width bounds.
//! * [`reproduce`]: reference-value comparison for the worked tables.

pub mod collective;
pub mod criteria;
pub mod duality;
pub mod eraser;
pub mod expr;
pub mod fock;
pub mod linalg;
pub mod literal;
pub mod optim;
pub mod qstate;
pub mod random;
pub mod reproduce;
pub mod verdict;

pub use duality::{DualityError, DualityReport};
pub use fock::{FockKet, Mode, NormalMonomial, TwoModeState};
pub use qstate::DensityMatrix;
pub use verdict::{Classification, CriterionVerdict};

/// Absolute margin above which a criterion counts as violated.
pub const VIOLATION_TOL: f64 = 1e-10;
