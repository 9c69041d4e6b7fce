//! Low-inertia stability metrics of linearized power-network swing dynamics.
//!
//! The crate computes poles, damping ratios, H2 and H-infinity norms of
//! `M theta'' + D theta' + L theta = w` in two independent ways: closed-form
//! expressions in terms of the Laplacian spectrum ([`closed_form`]) and
//! numerical oracles working on the dense realization or the decoupled modal
//! subsystems ([`oracles`]). [`sweeps`] runs parameter sweeps and shape checks
//! over inertia and damping; [`cli`] is the command-line front end.

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod network;
pub mod oracles;
pub mod sweeps;
pub mod system;
pub mod table;

pub use error::{Error, Result};
