use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::link::LinkNetwork;
use crate::reduction::{Assignment, MappingResult};

use super::database::ScenarioDatabase;
use super::{FaultSet, Scenario};

/// Projects a full-network scenario onto a VB's sub-topology: a sub-topology
/// element is faulty iff any original element it stands for is faulty.
pub fn project_scenario(assignment: &Assignment, faults: &FaultSet) -> Scenario {
    let bits = assignment
        .extraction
        .provenance_map
        .iter()
        .enumerate()
        .filter(|(_, origin)| origin.iter().any(|&o| faults.is_faulty(o)))
        .fold(0u64, |acc, (i, _)| acc | 1 << i);
    Scenario(bits)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub sink: u32,
    pub connected: BTreeSet<u32>,
    pub delivered: f64,
    pub demand: f64,
    pub survives: bool,
}

fn sink_assignments<'m>(net: &LinkNetwork, mapping: &'m MappingResult, sink: u32) -> Result<Vec<&'m Assignment>> {
    let found: Vec<&Assignment> = mapping
        .assignment
        .iter()
        .filter(|a| net.element(a.vb).sink_id == Some(sink))
        .collect();
    if found.is_empty() {
        return Err(Error::NoVb(sink));
    }
    Ok(found)
}

fn lookup(assignment: &Assignment, dbs: &[ScenarioDatabase], faults: &FaultSet) -> Result<BTreeSet<u32>> {
    let db = dbs.get(assignment.sub).ok_or(Error::MissingDatabase(assignment.sub))?;
    if db.m != assignment.extraction.len() {
        return Err(Error::Format(format!(
            "database for sub-topology {} has m={}, expected {}",
            assignment.sub,
            db.m,
            assignment.extraction.len()
        )));
    }
    let record = db.lookup(project_scenario(assignment, faults));
    let classes = &assignment.extraction.classes;
    Ok((0..classes.len()).filter(|c| record >> c & 1 == 1).map(|c| classes[c]).collect())
}

/// Answers "does `sink` survive these faults" from the databases alone.
pub fn query_survivability(
    net: &LinkNetwork,
    mapping: &MappingResult,
    dbs: &[ScenarioDatabase],
    faults: &FaultSet,
    sink: u32,
) -> Result<Verdict> {
    faults.check_width(net)?;
    let mut connected = BTreeSet::new();
    for a in sink_assignments(net, mapping, sink)? {
        connected.extend(lookup(a, dbs, faults)?);
    }
    let caps = net.source_capacities();
    let delivered = connected.iter().map(|s| caps[s]).sum();
    let demand = net.sink_demand(sink).unwrap_or(0.0);
    Ok(Verdict { sink, connected, delivered, demand, survives: delivered >= demand })
}

/// Probability that `sink` survives when every original element is
/// available independently with the given probability.
pub fn survivability_measure(
    net: &LinkNetwork,
    mapping: &MappingResult,
    dbs: &[ScenarioDatabase],
    availability: &[f64],
    sink: u32,
) -> Result<f64> {
    if availability.len() != net.len() {
        return Err(Error::ScenarioWidth { got: availability.len(), expected: net.len() });
    }
    if let Some(&bad) = availability.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::BadProbability(bad));
    }
    let assignments = sink_assignments(net, mapping, sink)?;
    let demand = net.sink_demand(sink).unwrap_or(0.0);
    let caps = net.source_capacities();

    if let [a] = assignments.as_slice() {
        let db = dbs.get(a.sub).ok_or(Error::MissingDatabase(a.sub))?;
        let fault_p: Vec<f64> = a
            .extraction
            .provenance_map
            .iter()
            .map(|origin| 1.0 - origin.iter().map(|&o| availability[o]).product::<f64>())
            .collect();
        let classes = &a.extraction.classes;
        let class_caps: Vec<f64> = classes.iter().map(|s| caps[s]).collect();
        let mut total = 0.0;
        for (s, &record) in db.records.iter().enumerate() {
            let delivered: f64 = (0..classes.len()).filter(|c| record >> c & 1 == 1).map(|c| class_caps[c]).sum();
            if delivered < demand {
                continue;
            }
            let p: f64 = fault_p
                .iter()
                .enumerate()
                .map(|(i, &q)| if s >> i & 1 == 1 { q } else { 1.0 - q })
                .product();
            total += p;
        }
        return Ok(total);
    }

    // Several VB links share original elements, so enumerate the union of
    // the elements they depend on.
    let involved: BTreeSet<usize> = assignments
        .iter()
        .flat_map(|a| a.extraction.provenance_map.iter().flatten().copied())
        .collect();
    let involved: Vec<usize> = involved.into_iter().collect();
    if involved.len() > 30 {
        return Err(Error::TooLarge { m: involved.len(), limit: 30, bytes: 0 });
    }
    let mut total = 0.0;
    for mask in 0u64..1 << involved.len() {
        let mut faults = FaultSet::none(net.len());
        let mut p = 1.0;
        for (k, &o) in involved.iter().enumerate() {
            let faulty = mask >> k & 1 == 1;
            faults.set(o, faulty);
            p *= if faulty { 1.0 - availability[o] } else { availability[o] };
        }
        let mut connected = BTreeSet::new();
        for a in &assignments {
            connected.extend(lookup(a, dbs, &faults)?);
        }
        let delivered: f64 = connected.iter().map(|s| caps[s]).sum();
        if delivered >= demand {
            total += p;
        }
    }
    Ok(total)
}
