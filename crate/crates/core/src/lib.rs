//! Exact dynamics of two non-interacting quantum dots embedded in the arms of
//! an Aharonov-Bohm interferometer and coupled to two wide-band leads.
//!
//! Units: `hbar = e = k_B = 1`; energies are usually quoted in units of the
//! total linewidth `Gamma = Gamma_L + Gamma_R`.

pub mod analytics;
pub mod error;
pub mod mat2;
pub mod oracle;
pub mod params;
pub mod propagator;
pub mod quadrature;
pub mod state;

pub use analytics::{
    large_bias_rho21, steady_current, steady_rho21_closed, steady_rho21_closed_for, transmission, SpectralScales,
};
pub use error::{Error, Result};
pub use mat2::ComplexMat2;
pub use oracle::{build_model, CorrelationMatrix, DiscretizedLeadModel};
pub use params::{validate, BathParams, DeviceParams, ValidationReport, Violation};
pub use propagator::{DecayConvention, OccupationMatrix, Propagator, SampleTime};
pub use quadrature::QuadratureSpec;
pub use state::{assemble_rho, bloch_vector, coherence_phase, fidelity_to_target, BlochState, ReducedDensityMatrix};
