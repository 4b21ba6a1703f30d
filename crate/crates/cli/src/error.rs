use std::fmt;

use sphere_core::baselines::BaselineError;
use sphere_core::bench::BenchError;
use sphere_core::partition::PartitionError;
use sphere_core::router::RouterError;
use sphere_core::search::SearchError;

/// A failed command, carrying its exit code class.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or configuration values. Exit 1.
    Usage(String),
    /// Unreadable or invalid input data, or unwritable output. Exit 2.
    Data(anyhow::Error),
    /// A broken internal invariant. Exit 3.
    Internal(anyhow::Error),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Failure {
        Failure::Usage(msg.into())
    }

    pub fn data(msg: impl fmt::Display) -> Failure {
        Failure::Data(anyhow::anyhow!("{msg}"))
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Data(e) => write!(f, "{e}"),
            Failure::Internal(e) => write!(f, "internal error: {e}"),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::InvalidNode(_) => Failure::Usage(e.to_string()),
            SearchError::Disconnected { .. } => Failure::Data(e.into()),
        }
    }
}

impl From<PartitionError> for Failure {
    fn from(e: PartitionError) -> Self {
        match e {
            PartitionError::Search(s) => s.into(),
            PartitionError::InvalidConfig(_)
            | PartitionError::SameTerminals(_)
            | PartitionError::Graph(_) => Failure::Usage(e.to_string()),
            other => Failure::Internal(other.into()),
        }
    }
}

impl From<RouterError> for Failure {
    fn from(e: RouterError) -> Self {
        match e {
            RouterError::Partition(p) => p.into(),
            RouterError::UnknownSolver(_) | RouterError::NoWorkers => Failure::Usage(e.to_string()),
            other => Failure::Internal(other.into()),
        }
    }
}

impl From<BaselineError> for Failure {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::Search(s) => s.into(),
            BaselineError::CellCount { .. } => Failure::Usage(e.to_string()),
        }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::InvalidConfig(_) => Failure::Usage(e.to_string()),
            BenchError::NoPair => Failure::Data(e.into()),
            BenchError::Search(s) => s.into(),
            BenchError::Router(r) => r.into(),
            BenchError::Baseline(b) => b.into(),
            BenchError::Metric(m) => Failure::Internal(m.into()),
        }
    }
}
