use thiserror::Error;

/// Errors raised by model construction and the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("excitation sector u = {u} is empty (u < -r = {min})")]
    EmptySector { u: f64, min: f64 },

    #[error("closed form undefined: denominator {denominator:e} vanishes at j = {j} (degenerate detuning)")]
    DegenerateDetuning { j: usize, denominator: f64 },

    #[error("closed form of chi is singular at this point (|denominator| = {denominator:e})")]
    NearSingular { denominator: f64 },

    #[error("quasi-period is infinite for zero relative spacing")]
    InfinitePeriod,

    #[error("eigen-solver produced a non-finite result in sector u = {u}")]
    EigenFailure { u: f64 },

    #[error("principal-value quadrature did not converge: relative change {residual:e} after {halvings} halvings")]
    NonConvergence { residual: f64, halvings: usize },

    #[error("step size too large: dt * max detuning = {product} (must be < 0.1)")]
    StepSize { product: f64 },

    #[error("recurrence time 2pi/dk = {recurrence} ns does not exceed t_final = {t_final} ns")]
    Recurrence { recurrence: f64, t_final: f64 },

    #[error("non-finite amplitude at t = {t} ns")]
    NonFinite { t: f64 },

    #[error("trajectory is not monotone in the fit window: ln|alpha|^2 rises by {rise} at t = {t} ns")]
    NonMonotone { t: f64, rise: f64 },

    #[error("fit window holds {points} samples; need at least 2")]
    FitWindow { points: usize },

    #[error("product space too large: N = {n_qubits} (max 8), n_max = {n_max} (max 12)")]
    DimensionGuard { n_qubits: usize, n_max: usize },

    #[error("sector u = {u} reaches the Fock cutoff n_max = {n_max}")]
    Truncation { u: f64, n_max: usize },

    #[error("operator identity violated: {what} (residual {residual:e})")]
    Identity { what: &'static str, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
