//! Random source/sink grids for property tests and `verify --random`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::raw::{RawEdge, RawNetwork, RawNode};

#[derive(Debug, Clone)]
pub struct RandomParams {
    pub junctions: (u32, u32),
    pub extra_h: (u32, u32),
    pub sources: (u32, u32),
    pub loads: (u32, u32),
    /// Largest number of links from one source or load.
    pub max_attach: u32,
    pub subload_probability: f64,
    pub parallel_probability: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            junctions: (2, 5),
            extra_h: (0, 3),
            sources: (1, 3),
            loads: (0, 2),
            max_attach: 2,
            subload_probability: 0.5,
            parallel_probability: 0.1,
        }
    }
}

pub fn random_network(rng: &mut impl Rng, params: &RandomParams) -> RawNetwork {
    let nj = rng.gen_range(params.junctions.0..=params.junctions.1).max(1);
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut next_edge = 1u32;
    let mut edge = |edges: &mut Vec<RawEdge>, a: u32, b: u32| {
        edges.push(RawEdge::new(next_edge.to_string(), a, b));
        next_edge += 1;
    };

    let mut has_sink = false;
    for j in 1..=nj {
        if rng.gen_bool(params.subload_probability) {
            nodes.push(RawNode::interconnection_with_sink(j, f64::from(rng.gen_range(1..=6u32) * 10)));
            has_sink = true;
        } else {
            nodes.push(RawNode::interconnection(j));
        }
    }
    for j in 2..=nj {
        let parent = rng.gen_range(1..j);
        edge(&mut edges, parent, j);
    }
    if nj > 1 {
        for _ in 0..rng.gen_range(params.extra_h.0..=params.extra_h.1) {
            let a = rng.gen_range(1..=nj);
            let b = rng.gen_range(1..=nj);
            if a != b {
                edge(&mut edges, a, b);
            }
        }
    }
    let junctions: Vec<u32> = (1..=nj).collect();
    let attach = |rng: &mut dyn rand::RngCore| -> Vec<u32> {
        let k = rng.gen_range(1..=params.max_attach.min(nj)) as usize;
        junctions.choose_multiple(rng, k).copied().collect()
    };
    for s in 0..rng.gen_range(params.sources.0..=params.sources.1).max(1) {
        let id = 100 + s;
        nodes.push(RawNode::source(id, f64::from(rng.gen_range(1..=5u32) * 25)));
        for j in attach(rng) {
            edge(&mut edges, id, j);
        }
    }
    let mut loads = rng.gen_range(params.loads.0..=params.loads.1);
    if !has_sink && loads == 0 {
        loads = 1;
    }
    for l in 0..loads {
        let id = 200 + l;
        nodes.push(RawNode::sink(id, f64::from(rng.gen_range(1..=6u32) * 10)));
        for j in attach(rng) {
            edge(&mut edges, id, j);
        }
    }
    let originals = edges.len();
    for k in 0..originals {
        if rng.gen_bool(params.parallel_probability) {
            let (a, b) = (edges[k].b, edges[k].a);
            edge(&mut edges, a, b);
        }
    }
    RawNetwork { name: "random".into(), nodes, edges }
}

/// Draws until the link network has between `min` and `max` elements.
pub fn random_network_sized(rng: &mut impl Rng, params: &RandomParams, min: usize, max: usize) -> RawNetwork {
    loop {
        let raw = random_network(rng, params);
        if let Ok(links) = crate::to_links(raw.clone()) {
            if (min..=max).contains(&links.len()) {
                return raw;
            }
        }
    }
}
