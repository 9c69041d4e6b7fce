//! Numerical ground truth for the closed forms: Gramian and impulse-energy
//! H2 norms, H-infinity by frequency search, Bode tables and exact modal
//! time-domain simulation.

mod bode;
mod h2;
mod hinf;
mod propagate;
mod simulate;

pub use bode::{bode_table, bode_table_modal, BodeRow};
pub use h2::{h2_gramian, h2_impulse_energy, ImpulseSettings, GramianResult};
pub use hinf::{golden_section_max, hinf_dense, hinf_search, HinfSearchResult, DEFAULT_REL_TOL};
pub use propagate::transition_matrix;
pub use simulate::{simulate, sinusoid_gain, worst_direction, Disturbance, InputDirection, Trajectory};
