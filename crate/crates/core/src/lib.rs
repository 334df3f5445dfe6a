//! Spin-dependent scattering of a single electron off a spin-1/2 magnetic
//! impurity embedded at site 0 of a one-dimensional tight-binding wire.
//!
//! The Hamiltonian conserves total `S_z`, so it splits into three sectors:
//! two fully polarized single chains with a delta defect ([`single_channel`])
//! and a mixed sector of two chains coupled by spin flips at the impurity
//! ([`two_channel`]). Every closed-form amplitude is cross-checked against a
//! finite-lattice solve with exact open boundaries ([`oracle`]).

pub mod consistency;
pub mod error;
pub mod figures;
pub mod model;
pub mod oracle;
pub mod single_channel;
pub mod sweep;
pub mod two_channel;

pub use error::{Error, Result};
pub use model::{DerivedPotentials, ModelParams, Sector, Wavenumber};
pub use num_complex::Complex64;
pub use single_channel::{BoundState, Chain, ScatterAmps1};
pub use two_channel::{Channel, Kinematics2, Regime, ScatterAmps2};
