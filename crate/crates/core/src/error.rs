use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph has no edges")]
    EmptyGraph,

    #[error("edge list contains a cycle closed by edge ({0}, {1})")]
    CycleDetected(VertexId, VertexId),

    #[error("graph is disconnected: vertex {0} is unreachable")]
    Disconnected(VertexId),

    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),

    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(VertexId, VertexId),

    #[error("duplicate edge id {0}")]
    DuplicateEdgeId(EdgeId),

    #[error("edge id {id} outside the ambient range 1..={ambient}")]
    EdgeIdOutOfRange { id: EdgeId, ambient: usize },

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),

    #[error("boundary vertex {0} touches fewer than two kept edges")]
    EndpointRuleViolated(VertexId),

    #[error("edge set {0:?} is not a component of the graph after deletion")]
    InvalidComponent(Vec<EdgeId>),

    #[error("vertex {0} carries a Dirichlet condition and cannot be deleted")]
    DeletedDirichlet(VertexId),

    #[error("scattering determinant vanishes identically")]
    DegenerateSystem,

    #[error("point is off the torus: |z_{index}| = {modulus}")]
    OffTorus { index: usize, modulus: f64 },

    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eval expressions disagree at vertex {vertex} (spread {spread:e})")]
    ContinuityViolated { vertex: VertexId, spread: f64 },

    #[error("point is not on the secular manifold (sigma_min / sigma_max = {0:e})")]
    NotOnSecularManifold(f64),

    #[error("eigenspace vanishes at vertex {0}")]
    VanishingVertex(VertexId),

    #[error("no special vertex available to seed the propagation")]
    NoSpecialVertex,

    #[error("propagation requires a connected graph; vertex {0} is an interior Dirichlet vertex")]
    InteriorDirichlet(VertexId),

    #[error("stratum sampling failed after {0} attempts")]
    SamplingFailed(usize),

    #[error("exterior classes live in different rings (n = {0} vs n = {1})")]
    MismatchedRank(usize, usize),

    #[error("stratum components share variable z{0}")]
    OverlappingVariables(EdgeId),

    #[error("relation row {0} is zero")]
    ZeroRow(usize),

    #[error("edge length {index} is not positive: {value}")]
    NonPositiveLength { index: usize, value: f64 },

    #[error("refined roots {0} and {1} lie closer than the scan step; halve the step")]
    StepTooCoarse(f64, f64),

    #[error("window ({0}, {1}) holds fewer than two eigenvalues")]
    EmptyWindow(f64, f64),

    #[error("relations admit no positive length vector")]
    InfeasibleRelations,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
