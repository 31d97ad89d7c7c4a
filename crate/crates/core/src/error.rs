use thiserror::Error;

use crate::transforms::FlipPrecondition;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("triangle inequality violated: d({i},{k}) = {direct} > d({i},{j}) + d({j},{k}) = {via}")]
    TriangleInequality {
        i: usize,
        j: usize,
        k: usize,
        direct: f64,
        via: f64,
    },

    #[error("location {0} is not valid for this metric")]
    InvalidLocation(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("not an arborescence: {0}")]
    NotArborescence(String),

    #[error("vertex {0} does not exist")]
    InvalidVertex(usize),

    #[error("leafication precondition violated at vertex {vertex}: {reason}")]
    Leafication { vertex: usize, reason: String },

    #[error("flip precondition violated at vertex {vertex}: {reason}")]
    Flip {
        vertex: usize,
        reason: FlipPrecondition,
    },

    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    #[error("instance is infeasible: minimum delay {min_delay} exceeds deadline {deadline}")]
    Infeasible { min_delay: f64, deadline: f64 },

    #[error("instance has {n} items; this operation supports at most {max}")]
    TooLarge { n: usize, max: usize },

    #[error("unsupported metric: {0}")]
    UnsupportedMetric(&'static str),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("grouping does not match instance: {0}")]
    GroupingMismatch(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
