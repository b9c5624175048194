//! Generalized supersymmetric coherent states of the supersymmetric harmonic
//! oscillator.
//!
//! The supersymmetric annihilation operator (SAO) considered here is
//!
//! ```text
//!     Â = | k1 a    k2   |
//!         | k3 a²   k4 a |
//! ```
//!
//! acting on superstates whose upper (bosonic) component is `Σ a_n |n⟩` and
//! whose lower (fermionic) component is `Σ c_n |n-1⟩`. Its eigenstates, the
//! supercoherent states, are built here in closed form for every region of
//! the `K = [[k1, k2], [k3, k4]]` parameter space, checked against a direct
//! Fock-space recursion, and analysed for position/momentum uncertainty.
//!
//! Modules:
//! - [`sao`]: the `K` matrix, its 2×2 spectrum and region classification.
//! - [`states`]: closed-form supercoherent states, the Fock recursion solver,
//!   Fock expansion and SAO application.
//! - [`observables`]: coherent-state braket kernels, expectation values,
//!   variances and the large-|z| asymptotic variances.
//! - [`analysis`]: θ-family sweeps, divergence fits, maximum search,
//!   canonical-state detection and parameter-space grids.
//! - [`cli`]: the `susyco` command-line front end.

pub mod analysis;
pub mod cli;
mod error;
pub mod observables;
pub mod sao;
mod serde_c64;
pub mod states;

pub use error::{Result, SusyError};
pub use num_complex::Complex64 as C64;
pub use sao::{
    classify, eigen_decompose, gauge_normalize, theta_operator, KMatrix, Region, RegionClass, Spectrum, TwoByTwo,
    DEFAULT_CLASSIFY_TOL,
};
pub use states::{
    apply_sao, degenerate_basis, degenerate_mus, fock_solve, generic_basis, generic_mus_basis, mixed_state,
    singular_state, to_fock, to_fock_fixed, to_fock_with_cap, CoherentTerm, FockExpansion, StateLabel, SuperState,
};
