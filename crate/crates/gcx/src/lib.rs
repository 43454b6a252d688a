//! Directed and undirected graph complexes with exact signs.

pub mod biweight;
pub mod canon;
pub mod chainmaps;
pub mod exactla;
pub mod gcomplex;
pub mod graphcore;
pub mod grtwitness;
pub mod homology;
pub mod lincomb;

pub use lincomb::Lc;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty domain: a graph needs at least one vertex")]
    EmptyDomain,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("window too large: {0}")]
    Window(String),
}
