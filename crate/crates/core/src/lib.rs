//! Noisy hyperlink detection through semantic and relatedness analysis.
//!
//! The crate is organised as a staged pipeline. Each stage reads the
//! artifact written by the previous one:
//!
//! ```text
//! crawl -> linkprep -> features -> topics -> matcher -> reasoner -> eval
//! ```
//!
//! A hyperlink is judged *useful* when the ontology class behind its
//! surrounding text and the class behind its target page are equivalent,
//! stand in a subclass/superclass relation, or are connected by an object
//! property. Otherwise it is *noisy*.

pub mod crawl;
pub mod dom;
pub mod error;
pub mod eval;
pub mod features;
pub mod io;
pub mod linkprep;
pub mod matcher;
pub mod ontology;
pub mod pipeline;
pub mod reasoner;
pub mod synth;
pub mod topics;
mod types;

pub use error::{Error, ErrorKind, Result};
pub use types::LinkLabel;
