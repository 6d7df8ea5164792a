use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Density or pressure is not positive (or not finite).
    #[error("non-physical state: rho = {rho}, p = {p}")]
    NonPhysicalState { rho: f64, p: f64 },

    /// A non-physical state showed up while integrating.
    #[error("non-physical state in cell ({i}, {j}) at step {step}, t = {time}: rho = {rho}, p = {p}")]
    SolverBlowUp {
        i: isize,
        j: isize,
        step: usize,
        time: f64,
        rho: f64,
        p: f64,
    },

    #[error("invalid boundary specification: {0}")]
    InvalidSpec(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
