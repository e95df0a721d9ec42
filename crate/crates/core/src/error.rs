use thiserror::Error;

use crate::algebraic::AlgebraicError;
use crate::ifs::IfsError;
use crate::measures::WeightsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Algebraic(#[from] AlgebraicError),
    #[error(transparent)]
    Ifs(#[from] IfsError),
    #[error(transparent)]
    Weights(#[from] WeightsError),
    #[error("node budget of {budget} exceeded ({needed} nodes required)")]
    Budget { budget: u64, needed: u128 },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("unsupported structure: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
