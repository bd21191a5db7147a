//! Long cycles in essentially 4-connected planar triangulations.
//!
//! Rotation-system embeddings, connectivity tests, triangulation
//! generators, exact longest (good) cycle search and an instance-level
//! verifier for the discharging argument behind the bound
//! `circ(G) >= 2/3 (n + 4)`.

pub mod cli;
pub mod connectivity;
pub mod cycles;
pub mod discharging;
pub mod embedding;
pub mod generators;

pub use embedding::{Embedding, Triangulation};
