use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "quadrature did not converge: estimated error {achieved:.3e} > tolerance {requested:.3e} after {panels} panels"
    )]
    QuadratureNotConverged {
        achieved: f64,
        requested: f64,
        panels: usize,
    },

    #[error("occupation matrix eigenvalues [{min:.3e}, {max:.3e}] leave [0, 1]")]
    InvalidOccupation { min: f64, max: f64 },

    #[error("occupation matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("coherence phase undefined: |rho21| = {magnitude:.3e} is below the floor")]
    PhaseUndefined { magnitude: f64 },

    #[error("large-bias formula requires degenerate dots, got E1 - E2 = {delta_e}")]
    NotDegenerate { delta_e: f64 },

    #[error("closed-form coherence requires centred levels (E1 + E2 = 0), got {sum}")]
    NotCentred { sum: f64 },

    #[error("closed-form coherence requires T = 0 and mu_L = -mu_R")]
    NotSymmetricBias,

    #[error("transmission {value} outside [0, 1] at omega = {omega}, phi = {phi}")]
    UnitarityViolation { omega: f64, phi: f64, value: f64 },

    #[error("oracle time {t} exceeds half the lead recurrence time {recurrence}")]
    RecurrenceExceeded { t: f64, recurrence: f64 },

    #[error("invalid lead discretisation: {0}")]
    InvalidModel(String),

    #[error("negative time {0}")]
    NegativeTime(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
