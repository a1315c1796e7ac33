//! Finite structural Ramsey theory over ordered relational structures.

pub mod amalgamation;
pub mod canonize;
pub mod combi;
pub mod degrees;
pub mod error;
pub mod fraisse;
pub mod genseq;
pub mod ramsey;
pub mod structures;

pub use error::{Error, Result};
pub use structures::{Embedding, OrderedStructure, Signature};
