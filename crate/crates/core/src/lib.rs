//! Combinatorics of circuit algebras at finite scale: Feynman graphs and
//! their étale maps, graph substitution, Brauer and wiring diagrams,
//! graphical species, the free constructions `T`, `L`, `D` and their
//! distributive laws, and the nerve with its Segal condition.

pub mod brauer;
pub mod canon;
pub mod circuit;
pub mod error;
pub mod etale;
pub mod free;
pub mod graph;
pub mod io;
pub mod nerve;
pub mod perm;
pub mod pointed;
pub mod report;
pub mod species;
pub mod substitution;

pub use error::{Error, Result};
pub use graph::Graph;

/// Cap on exhaustive searches, read from `FEYNGRAPH_MAX_SEARCH`.
pub fn max_search() -> usize {
    std::env::var("FEYNGRAPH_MAX_SEARCH")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(10_000_000)
}
