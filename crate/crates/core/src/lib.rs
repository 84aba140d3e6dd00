//! Package-to-group analytics for RPM-style Linux distributions.
//!
//! The crate imports comps and primary repository metadata into a canonical
//! [`ingest::Snapshot`], scores group quality, diffs distribution versions,
//! tracks adoption trends and models the topics of group descriptions.

pub mod cli;
pub mod depgraph;
pub mod evolution;
pub mod gvalue;
pub mod ingest;
pub mod textvec;
pub mod topics;
pub mod trends;
