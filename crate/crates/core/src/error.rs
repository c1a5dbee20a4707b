use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("ambient mismatch: {0}")]
    Ambient(String),
    #[error("containment violated: {0}")]
    Containment(String),
    #[error("map is not well defined: {0}")]
    IllDefined(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("index set is not closed: {0}")]
    NotClosed(String),
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("complex is not acyclic: {0}")]
    NotAcyclic(String),
    #[error("projections are not complementary idempotents: {0}")]
    NotComplementary(String),
    #[error("iteration cap {cap} exceeded in {site}")]
    IterationCap { site: &'static str, cap: usize },
    // A failed certificate means the implementation broke one of its own
    // invariants, never that the input was defective.
    #[error("certificate failure (implementation bug): {0}")]
    Certificate(String),
}
