//! Matrix-Wigner time-frequency distributions, Cohen-class kernels and
//! matrix-parametrized pseudodifferential operators on uniform grids.

pub mod blockmat;
pub mod cli;
pub mod cohen;
pub mod config;
pub mod error;
pub mod fourier;
pub mod io;
pub mod mwd;
pub mod quantize;
pub mod signals;
pub mod verify;

pub use blockmat::{BlockMatrix, Classification, CohenMaps, Derived, Preset};
pub use error::{Error, Result};
pub use fourier::{Domain, Field2};
pub use mwd::{mwd, stft, PhaseSpaceField};
pub use num_complex::Complex64;
pub use quantize::{OperatorMatrix, SymbolField};
pub use signals::{Grid, Signal};
