//! Third-order WENO finite-volume solver for the two-dimensional Euler
//! equations with interchangeable characteristic-decomposition strategies.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerics:
//! state algebra ([`gas`]), mesh and boundary handling ([`grid`]),
//! reconstruction ([`weno`]), the semi-discrete scheme and time stepping
//! ([`solver`]) and the benchmark problems ([`cases`]). File formats, the
//! command line and wall-clock timing live in the `rcd` companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cases;
mod error;
pub mod gas;
pub mod grid;
pub mod solver;
pub mod weno;

pub use error::{Error, Result};
pub use gas::{Axis, Conserved, GasModel, Primitive};
pub use grid::{BoundaryCondition, BoundarySpec, CartesianGrid, CellField, GradientScalar};
pub use solver::{Solver, SolverConfig};
pub use weno::{DecompositionMode, ReconstructionSettings};
