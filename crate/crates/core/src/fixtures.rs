//! The bundled micro-grid, built in code for unit tests.

use crate::link::LinkNetwork;
use crate::raw::{RawEdge, RawNetwork, RawNode, ValidatedRawNetwork};

pub fn fig1_raw() -> RawNetwork {
    RawNetwork {
        name: "fig1".into(),
        nodes: vec![
            RawNode::interconnection_with_sink(20, 60.0),
            RawNode::interconnection_with_sink(27, 50.0),
            RawNode::interconnection_with_sink(28, 40.0),
            RawNode::sink(30, 30.0),
            RawNode::source(64, 100.0),
            RawNode::source(76, 150.0),
            RawNode::source(81, 100.0),
        ],
        edges: vec![
            RawEdge::new("1", 20, 27),
            RawEdge::new("2", 27, 28),
            RawEdge::new("3", 64, 20),
            RawEdge::new("4", 76, 27),
            RawEdge::new("5", 76, 28),
            RawEdge::new("6", 81, 28),
            RawEdge::new("7", 28, 30),
        ],
    }
}

pub fn fig1_validated() -> ValidatedRawNetwork {
    ValidatedRawNetwork::validate(fig1_raw()).unwrap().merge_parallel()
}

pub fn fig1() -> LinkNetwork {
    crate::to_links(fig1_raw()).unwrap()
}
