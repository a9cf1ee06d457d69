//! Dense exact state engine: statevectors, density matrices, strided gate
//! kernels, partial traces and Hermitian eigendecomposition.

mod gate;
mod linalg;
mod state;
mod subsystem;

pub use gate::{GateMatrix, UNITARY_TOL};
pub use linalg::{eigh, eigvalsh, max_hermitian_asymmetry, HERMITIAN_TOL};
pub use state::{
    trace_distance, DensityMatrix, QuantumState, StateVector, DENSITY_CAP, NORM_TOL, STATEVECTOR_CAP,
};
pub use subsystem::Subsystem;

pub use num_complex::Complex64 as C64;
