//! Simulation kernels for a periodically driven two-site trion system:
//! Hamiltonian construction, time evolution, Floquet quasienergy analysis,
//! and electron-electron entanglement measures.

pub mod entangle;
pub mod error;
pub mod evolve;
pub mod floquet;
pub mod linalg;
pub mod model;

pub use entangle::{BellLabel, BellTarget, DensityMatrix4, FilterMode, FilterSpec};
pub use error::{Error, Result};
pub use evolve::{IntegratorConfig, StateVector, Trajectory};
pub use floquet::{CrossingEvent, CrossingKind, FloquetSpectrum, Parity, QuasienergySweep};
pub use linalg::{ComplexMatrix, EigenPairs};
pub use model::{MicroParams, ModelParams, TrionState};
