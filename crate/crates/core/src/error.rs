use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("stencil radius {rad} out of range (supported: 1..={max})")]
    RadiusOutOfRange { rad: usize, max: usize },

    #[error("hotspot stencils only support radius 1 (got {0})")]
    HotspotWithHighOrder(usize),

    #[error("missing stencil coefficient `{0}`")]
    MissingCoefficient(String),

    #[error("unknown stencil coefficient `{0}`")]
    UnknownCoefficient(String),

    #[error("coordinate {coord:?} outside grid {dims}")]
    CoordOutOfBounds { coord: [usize; 3], dims: String },

    #[error("grid dimensions mismatch: {0}")]
    DimsMismatch(String),

    #[error("block of {bsize} cells too small for halo of {halo} cells")]
    BlockTooSmallForHalo { bsize: usize, halo: usize },

    #[error("invalid accelerator configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid pipeline parameters: {0}")]
    InvalidPipeline(String),

    #[error("invalid device: {0}")]
    InvalidDevice(String),

    #[error("no feasible design point: {0}")]
    EmptyResult(String),

    #[error("infeasible projection: {0}")]
    InfeasibleProjection(String),

    #[error("unknown built-in `{0}`")]
    UnknownBuiltin(String),

    #[error("malformed grid file: {0}")]
    GridFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
