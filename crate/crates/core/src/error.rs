use thiserror::Error;

use crate::ee::EeError;
use crate::estimator::EstimateError;
use crate::library::LibraryError;
use crate::lte::DspError;
use crate::scenario::ScenarioError;
use crate::sim::SimError;

/// Any error raised by this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Library(#[from] LibraryError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Ee(#[from] EeError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
