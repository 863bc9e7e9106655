//! Positive-pair graphs, closed-form spectral contrastive representations,
//! preconditioned feature averaging for domain transfer, and exhaustive
//! numerical checks of the bounds that relate them.
//!
//! The usual pipeline: build or [generate](generators::generate_sbm) a
//! [`PositivePairGraph`] with a [`DomainSpec`], embed it with
//! [`spectral::minimize_loss`], fit [`pfa::fit_pfa`], then compare the
//! measured target error with the quantities from [`metrics`] and the
//! checkers in [`oracles::lemmas`].

pub mod error;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod oracles;
pub mod pfa;
pub mod spectral;
pub mod tol;

pub use error::{Error, Result};
pub use graph::{DomainSpec, Normalization, PositivePairGraph, RestrictedGraph, VertexSet};
pub use spectral::{Representation, SpectralDecomposition};
