use thiserror::Error;

/// Every failure mode of the toolkit.
///
/// `BoundViolated`, `EmptyAlphaInterval`, `UnboundedLine` and
/// `DisconnectedGraph` can only be produced by an implementation bug: the
/// statements they guard are theorems.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("basis update makes the basis matrix singular")]
    SingularUpdate,
    #[error("basis {0:?} is singular")]
    SingularBasis(Vec<usize>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("constraint matrix has rank {rank} < dimension {dim}; polyhedron is not pointed")]
    NotPointed { rank: usize, dim: usize },
    #[error("point violates constraint {row}")]
    InfeasiblePoint { row: usize },
    #[error("polyhedron is infeasible")]
    Infeasible,
    #[error("polyhedron contains a line")]
    UnboundedLine,
    #[error("point is not a vertex (tight rank {rank} < {dim})")]
    NotAVertex { rank: usize, dim: usize },
    #[error("tight rows have rank {rank} < {dim}")]
    RankDeficient { rank: usize, dim: usize },
    #[error("work estimate {needed} exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("bound check `{check}` violated: lhs {lhs} > rhs {rhs}")]
    BoundViolated {
        check: String,
        lhs: String,
        rhs: String,
    },
    #[error("empty admissible interval for the lifting factor of facet {facet}")]
    EmptyAlphaInterval { facet: usize },
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
