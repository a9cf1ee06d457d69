use thiserror::Error;

/// Errors raised by the simulator and the diagnostics built on top of it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid qubit targets {targets:?} for a {n_qubits}-qubit register")]
    InvalidTargets { targets: Vec<usize>, n_qubits: usize },

    #[error("gate is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NonHermitian { asymmetry: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("{kind} simulation limited to {cap} qubits, requested {requested}")]
    CapExceeded {
        kind: &'static str,
        cap: usize,
        requested: usize,
    },

    #[error("invalid subsystem: {0}")]
    InvalidSubsystem(String),

    #[error("negative eigenvalue {0:.3e} in density matrix")]
    NegativeEigenvalue(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("trace drifted to {trace} at step {step}")]
    TraceDrift { step: usize, trace: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
