use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shear parameter a must be finite and >= 0, got {0}")]
    NegativeShear(f64),

    #[error("half-plane height must be finite and > 0, got {0}")]
    NonPositiveHeight(f64),

    #[error("coordinates must be finite")]
    NonFinite,

    #[error("radius {r} outside the eigenfunction domain [0, {r_max}]")]
    OutOfRange { r: f64, r_max: f64 },

    #[error("point at distance {r:e} from the base point; the radial chart is singular there")]
    NearBasePoint { r: f64 },

    #[error("the orbit mean-curvature claim holds for a = 0 only, got a = {0}")]
    ShearedModel(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("ODE integration failed: {0}")]
    Solver(String),
}
