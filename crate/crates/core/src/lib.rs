//! Polaritons of a qubit chain with a regular spacing mismatch inside a
//! single-mode cavity, their selective coupling to an open waveguide, and the
//! resulting decay rates.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod oracle;
pub mod polariton;
pub mod radiation;

pub use algebra::{coupling_weights, deformation_factor, CavitySpec, CouplingProfileSpec, HalfInt, LatticeSpec};
pub use error::{Error, Result};
pub use polariton::{
    build_sector_hamiltonian, closed_form_coefficients, diagonalize_sector, ground_transition_element, transition_matrices, PolaritonSector,
    SectorBasis, TransitionMatrices,
};
pub use radiation::{chi, chi_closed_form, coupling_profile, decay_rate, quasi_period, s_factor, CouplingProfile, DecayResult, PrefactorInputs};
