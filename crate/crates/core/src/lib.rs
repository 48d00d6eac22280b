//! Holding-torque, tension-propagation, chain-geometry and design-exploration
//! models for tendon-driven jamming chains (bead, comb and radial-layer
//! joints).
//!
//! Sweeps, the disc quadrature and Pareto filtering run on rayon when the
//! `parallel` feature (default) is enabled; see [`par::Execution`].

pub mod config;
pub mod error;
pub mod experiments;
pub mod explorer;
pub mod geometry;
pub mod mechanism;
pub mod par;
pub mod tension;
pub mod torque;

pub use config::MechanismConfig;
pub use error::{Error, Result};
pub use mechanism::Mechanism;
pub use par::Execution;
pub use tension::{AttenuationModel, ChainConfig, TorqueProfile};
pub use torque::{Family, Material, MechanismParams};
