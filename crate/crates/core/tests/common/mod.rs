#![allow(dead_code)]

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use survnet_core::netfile::read_network;
use survnet_core::random::{random_network_sized, RandomParams};
use survnet_core::scenario::{build_database, BuildOptions, ScenarioDatabase};
use survnet_core::{map_network, to_links, LinkNetwork, MapOptions, MappingResult, ValidatedRawNetwork};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn load(name: &str) -> LinkNetwork {
    to_links(read_network(data(name)).unwrap()).unwrap()
}

pub fn load_raw(name: &str) -> ValidatedRawNetwork {
    ValidatedRawNetwork::validate(read_network(data(name)).unwrap()).unwrap().merge_parallel()
}

pub fn prepared(net: &LinkNetwork, opts: MapOptions) -> (MappingResult, Vec<ScenarioDatabase>) {
    let mapping = map_network(net, opts).unwrap();
    let dbs = mapping.subs.iter().map(|s| build_database(s, BuildOptions::default()).unwrap()).collect();
    (mapping, dbs)
}

/// `count` random link networks with between `min` and `max` elements.
pub fn random_nets(seed: u64, count: usize, min: usize, max: usize) -> Vec<LinkNetwork> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| to_links(random_network_sized(&mut rng, &RandomParams::default(), min, max)).unwrap())
        .collect()
}
