//! Entanglement negativity, teleportation capability and monogamy checks
//! for multi-qudit states.

pub mod emit;
pub mod error;
pub mod lab;
pub mod measures;
pub mod states;
pub mod tensor;
pub mod tolerance;

pub use error::{Error, Result};
pub use lab::{Family, MonogamyRecord, MonteCarloRun, RunSummary, Sampler, SweepRecord};
pub use measures::{MeasureResult, Method, OptimizerConfig};
pub use states::{Cut, DensityOperator, NamedState, StateVector};
pub use tensor::{ComplexMatrix, EigenDecomposition};
pub use tolerance::Tolerances;
