use thiserror::Error;

use crate::bench::BenchError;
use crate::cio::CioError;
use crate::cv::CvError;
use crate::datagen::DataError;
use crate::losses::LossError;
use crate::metrics::MetricsError;
use crate::penalties::PenaltyError;
use crate::saddle::SaddleError;

/// Crate-wide error, wrapping each module's own error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Loss(#[from] LossError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Saddle(#[from] SaddleError),
    #[error(transparent)]
    Cio(#[from] CioError),
    #[error(transparent)]
    Penalty(#[from] PenaltyError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Cv(#[from] CvError),
    #[error(transparent)]
    Bench(#[from] BenchError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
