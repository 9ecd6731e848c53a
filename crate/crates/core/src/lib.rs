//! Nodal domains of eigenvectors of random graphs.
//!
//! The crate is organised bottom-up:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`rng`] | Reproducible, order-independent random substreams |
//! | [`graph`] | Simple undirected graphs, `G(n,p)` and random `d`-regular samplers, edge-list I/O |
//! | [`matrix`] | Dense symmetric / rectangular matrices, adjacency and Laplacian extraction, centred Bernoulli ensembles |
//! | [`spectral`] | Householder + implicit-QL symmetric eigensolver with residual certificates |
//! | [`nodal`] | Weak and strong nodal domains, the largest-domain decomposition, a brute-force oracle |
//! | [`bounds`] | Explicit constants of the random-matrix small-ball argument and the exceptional-vertex bound search |
//! | [`experiments`] | Seeded Monte-Carlo harness producing CSV/JSON reports |

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod format;
pub mod graph;
pub mod matrix;
pub mod nodal;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::Graph;
pub use matrix::{RealMatrix, SymmetricMatrix};
pub use nodal::{DomainKind, DomainPartition, NodalSummary, Sign, SignedFunction};
pub use rng::RngStream;
pub use spectral::{SortOrder, Spectrum};

/// Crate version, echoed into every report header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
