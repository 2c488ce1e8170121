//! Exact dynamics of a Lambda-type three-level atom in a two-mode cavity
//! with a deformed cross-Kerr medium and intensity-dependent coupling, plus
//! the nonclassicality indicators computed from the state.
//!
//! The state lives in closed three-dimensional blocks
//! `{|1,n1,n2>, |2,n1+1,n2>, |3,n1,n2+1>}`; each block is solved through the
//! roots of a real cubic. [`oracle`] integrates the same Hamiltonian with
//! RK4 as an independent check.

pub mod error;
pub mod field;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod phase;
pub mod presets;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Evolution, JointState};
pub use model::{ModelConfig, Nonlinearity};
pub use sweep::{Column, ObservableRow, ObservableSeries, Settings, SweepSpec};
