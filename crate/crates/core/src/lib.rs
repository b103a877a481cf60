//! Builds a lightweight domain ontology from raw text: optional cleaning,
//! ternary-frame extraction from dependency parses, contrastive termhood
//! ranking, ant-inspired term clustering, and evaluation against a
//! benchmark concept set.

pub mod cleaning;
pub mod cluster;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod frames;
pub mod ontology;
pub mod pipeline;
pub mod termhood;

pub use error::{Error, Result};
