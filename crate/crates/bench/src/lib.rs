//! Convergence and parameter-robustness experiments for the 4D auxiliary-space
//! preconditioners.

pub mod emit;
pub mod experiment;
pub mod manufactured;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] whitney4::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
