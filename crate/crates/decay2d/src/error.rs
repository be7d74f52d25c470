//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("cone guard violation: {msg} (max admissible T_final = {max_t_final})")]
    ConeGuard { msg: String, max_t_final: f64 },

    #[error("CFL violation: cfl = {cfl} exceeds the 2D stability limit 1/sqrt(2) - margin")]
    Cfl { cfl: f64 },

    #[error("Newton iteration failed to converge at node ({i},{j}) after {iters} iterations")]
    NewtonDiverged { i: usize, j: usize, iters: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
