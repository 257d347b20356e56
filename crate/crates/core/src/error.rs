use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("Fock basis for {modes} modes and {photons} photons has {dim} states, above the cap of {cap}")]
    BasisTooLarge {
        modes: usize,
        photons: usize,
        dim: u64,
        cap: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not unitary: max |U^dag U - I| = {deviation:e} exceeds {tolerance:e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("photon number mismatch: state carries {found}, basis expects {expected}")]
    PhotonMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("singular normal equations (rank-deficient features at alpha = {alpha}); use alpha > 0")]
    Singular { alpha: f64 },

    #[error("non-finite training loss at epoch {epoch}, batch {batch}: {loss}")]
    NonFiniteLoss { epoch: usize, batch: usize, loss: f64 },

    #[error("{path}: row {row}: {message}")]
    Csv { path: String, row: usize, message: String },

    #[error("config {path}:{line}: {message}")]
    Config { path: String, line: usize, message: String },

    #[error("bundle: {0}")]
    Bundle(String),

    #[error("leakage audit failed: {0}")]
    Leakage(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

/// Attaches a pipeline stage label to errors.
pub trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| Error::Stage {
            stage,
            source: Box::new(e),
        })
    }
}
