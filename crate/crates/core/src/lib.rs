//! Exact survivability analysis for networks of sources and sinks.
//!
//! The pipeline: a raw node/edge grid ([`raw`]) is validated, co-located
//! parallel lines are merged, and the grid is rewritten as links only
//! ([`link`]). Each sink link then gets its own small sub-topology
//! ([`reduction`]) whose every fault scenario is tabulated once
//! ([`scenario`]). Fault combinations in the full network are answered by
//! projecting them onto the right table instead of searching the graph.

pub mod dot;
pub mod error;
pub mod grouping;
pub mod link;
pub mod netfile;
pub mod random;
pub mod raw;
pub mod reduction;
pub mod scenario;

#[cfg(test)]
pub(crate) mod fixtures;

pub use error::{Error, Result};
pub use link::{to_link_network, Attach, LinkElement, LinkKind, LinkNetwork};
pub use raw::{NodeKind, RawEdge, RawNetwork, RawNode, ValidatedRawNetwork};
pub use reduction::{map_network, DedupMode, MapOptions, MappingResult, SubTopology};

/// Validate, merge parallel lines, and convert to links.
pub fn to_links(raw: RawNetwork) -> Result<LinkNetwork> {
    let net = ValidatedRawNetwork::validate(raw)?.merge_parallel();
    to_link_network(&net)
}
