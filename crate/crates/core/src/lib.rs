//! newsdesk-core: a multilingual media-monitoring engine.
//!
//! Articles in many languages are ingested from RSS/Atom feeds, categorized
//! with shared multilingual pattern definitions, clustered per language and
//! chained into stories, geo-tagged and name-tagged, linked across languages
//! through language-neutral cluster signatures, and monitored for
//! statistical alerts.

pub mod alerts;
pub mod catdsl;
pub mod cluster;
pub mod config;
pub mod error;
pub mod geotag;
pub mod ingest;
pub mod isocodes;
pub mod names;
pub mod pipeline;
pub mod quotes;
pub mod stats;
pub mod subject;
pub mod text;
pub mod xlink;

pub use config::Config;
pub use error::{Error, Result};
