use thiserror::Error;

/// Everything that can go wrong in the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point outside the model domain: {0}")]
    OutOfDomain(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("path has no points")]
    EmptyPath,
    #[error("quadrature tolerance {abs_tol:e} not met within {max_panels} panels (estimated error {estimate:e})")]
    ToleranceNotMet {
        abs_tol: f64,
        max_panels: usize,
        estimate: f64,
    },
    #[error("perimeter audit failed on path {path_index}: edge sum {edge_sum} vs Cauchy integral {cauchy}")]
    AuditMismatch {
        path_index: u64,
        edge_sum: f64,
        cauchy: f64,
    },
    #[error("path {path_index}: hull perimeter {perimeter} below twice the final radius {bound}")]
    BoundViolated {
        path_index: u64,
        perimeter: f64,
        bound: f64,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
