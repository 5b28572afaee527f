//! Adversarial node embeddings for signed networks.
//!
//! A generator samples signed neighbors of a center node by walking a BFS
//! tree rooted at that node, composing edge signs with the structural
//! balance rule. A dot-product discriminator learns to tell those samples
//! apart from real signed edges. The learned tables feed a link-sign
//! prediction and balance-audit toolkit in [`evalkit`].

pub mod discriminator;
pub mod embedding;
mod error;
pub mod evalkit;
pub mod generator;
pub mod seeds;
pub mod sgraph;
pub mod trainer;
pub mod treewalk;

pub use embedding::EmbeddingMatrix;
pub use error::{Error, Result};
pub use sgraph::{Edge, Sign, SignedGraph};
