//! Linear minimization oracles and Euclidean projections on classic compact
//! convex sets: the standard simplex, the ℓp-balls, the nuclear norm-ball,
//! flow polytopes of single-source single-sink DAGs, the Birkhoff polytope,
//! and permutahedra.
//!
//! Besides the closed-form oracles, the crate carries two iterative
//! projection solvers (a Haugazeau-style scheme for ℓp-balls with a
//! convergence-rate audit, and a Douglas-Rachford scheme for the Birkhoff
//! polytope built on a structured O(n²) affine projector), a Frank-Wolfe
//! driver that ties oracles and projections together, and brute-force
//! reference implementations used by the test suites.
//!
//! The crate is `no_std`-compatible (it needs `alloc`); disable the default
//! `std` feature for environments without the standard library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod combinatorial;
pub mod error;
pub mod frankwolfe;
pub mod lmo;
pub mod numerics;
pub mod oracle;
pub mod proj_direct;
pub mod proj_iterative;
pub mod sets;
pub mod svd;

pub use error::{Error, Result};
pub use numerics::{Matrix, Point, SeededRng};
pub use sets::SetSpec;
