//! Desk-scale 2D TM (Ex, Ey, Hz) finite-difference time-domain solver with
//! Drude metals, convolutional PML boundaries and the surface-wave
//! experiments built on it.

pub mod analysis;
pub mod config;
pub mod drude;
pub mod experiments;
pub mod grid;
pub mod pml;
pub mod sim;
pub mod snapshot;
pub mod source;

pub use grid::{Boundaries, Geometry, Grid2D, Medium, Rect};
pub use sim::{FieldState, Simulation};
pub use source::{Component, SourceKind, SourceSpec, Waveform};
pub use experiments::{Experiment, Report, RunOptions};
pub use config::RunConfig;
