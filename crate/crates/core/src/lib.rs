//! Numerical toolkit for a single trapped ion coupled to one motional mode:
//! Hamiltonian models and frame changes, unitary and dephasing dynamics, and
//! motional-state reconstruction from qubit populations.

pub mod bench;
pub mod error;
pub mod evolution;
pub mod hilbert;
pub mod linalg;
pub mod models;
pub mod tomography;

pub use error::{Error, Result};
pub use hilbert::{DensityMatrix, FockSpace, Operator, Space, StateVector};
pub use models::{Frame, HamiltonianKind, ModelParams};
