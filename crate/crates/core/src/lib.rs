//! Planted (l,d)-motif discovery by random projection.
//!
//! Each trial projects every l-mer onto k randomly chosen columns, buckets
//! the l-mers by the integer code of the projected k-mer, and hands each
//! bucket holding at least s l-mers to EM refinement. Exhaustive solvers in
//! [`oracle`] provide ground truth on small inputs.

pub mod driver;
pub mod error;
pub mod oracle;
pub mod projection;
pub mod refine;
pub mod scoring;
pub mod seqcore;
mod ser;

pub use error::{Error, Result};
