//! Exhaustive per-sub-topology scenario tables and their binary file form.
//!
//! File layout (little-endian): `SVDB`, version byte `1`, u16 m, u16 class
//! count, then per element a kind byte, f64 weight, u32 class index
//! (`0xFFFFFFFF` if none) and u32 provenance digest, then 2^m u64 records.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::link::LinkKind;
use crate::raw::RawId;
use crate::reduction::SubTopology;

use super::eval::Evaluator;
use super::Scenario;

pub const DEFAULT_MAX_M: usize = 30;
const MAGIC: &[u8; 4] = b"SVDB";
const VERSION: u8 = 1;
const NO_CLASS: u32 = 0xFFFF_FFFF;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub max_m: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { max_m: DEFAULT_MAX_M }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementDescriptor {
    pub kind: LinkKind,
    pub weight: f64,
    pub class: Option<u32>,
    pub digest: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDatabase {
    /// Canonical key of the sub-topology; not stored in the file.
    pub sub_key: Vec<u8>,
    pub m: usize,
    pub class_count: usize,
    pub elements: Vec<ElementDescriptor>,
    /// `records[s]` is the bitset of classes connected under scenario `s`.
    pub records: Vec<u64>,
}

/// FNV-1a over the sorted provenance ids.
fn provenance_digest(provenance: &BTreeSet<RawId>) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    for id in provenance {
        for b in id.to_string().bytes().chain(std::iter::once(b',')) {
            h ^= u32::from(b);
            h = h.wrapping_mul(0x0100_0193);
        }
    }
    h
}

pub fn describe_elements(sub: &SubTopology) -> Vec<ElementDescriptor> {
    sub.network
        .elements()
        .iter()
        .enumerate()
        .map(|(i, e)| ElementDescriptor {
            kind: e.kind,
            weight: e.weight.unwrap_or(0.0),
            class: sub.class_of(i).map(|c| c as u32),
            digest: provenance_digest(&e.provenance),
        })
        .collect()
}

/// Tabulates the connected classes for all 2^m scenarios of `sub`.
pub fn build_database(sub: &SubTopology, opts: BuildOptions) -> Result<ScenarioDatabase> {
    let m = sub.len();
    if m > opts.max_m.min(32) {
        return Err(Error::TooLarge { m, limit: opts.max_m.min(32), bytes: (1u128 << m) * 8 });
    }
    let evaluator = Evaluator::new(sub)?;
    let mut records = vec![0u64; 1usize << m];
    records.par_chunks_mut(CHUNK).enumerate().for_each(|(k, chunk)| {
        let base = (k * CHUNK) as u64;
        for (i, r) in chunk.iter_mut().enumerate() {
            *r = evaluator.connected(Scenario(base + i as u64));
        }
    });
    Ok(ScenarioDatabase {
        sub_key: sub.canonical_key.clone(),
        m,
        class_count: sub.classes.len(),
        elements: describe_elements(sub),
        records,
    })
}

impl ScenarioDatabase {
    pub fn lookup(&self, s: Scenario) -> u64 {
        self.records[s.0 as usize]
    }

    /// Capacity per class, read from the VT entries of the element table.
    pub fn class_capacities(&self) -> Vec<f64> {
        let mut caps = vec![0.0; self.class_count];
        for e in &self.elements {
            if let Some(c) = e.class {
                caps[c as usize] = e.weight.abs();
            }
        }
        caps
    }

    /// Whether this table was built for a sub-topology shaped like `sub`.
    pub fn fits(&self, sub: &SubTopology) -> bool {
        self.m == sub.len()
            && self.class_count == sub.classes.len()
            && self.elements.iter().zip(describe_elements(sub)).all(|(a, b)| a.kind == b.kind && a.class == b.class)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(10 + self.elements.len() * 17 + self.records.len() * 8);
        out.extend(MAGIC);
        out.push(VERSION);
        out.extend((self.m as u16).to_le_bytes());
        out.extend((self.class_count as u16).to_le_bytes());
        for e in &self.elements {
            out.push(e.kind.code());
            out.extend(e.weight.to_le_bytes());
            out.extend(e.class.unwrap_or(NO_CLASS).to_le_bytes());
            out.extend(e.digest.to_le_bytes());
        }
        for r in &self.records {
            out.extend(r.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::Format(msg.to_string());
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(bad("bad magic"));
        }
        if cur.take(1)?[0] != VERSION {
            return Err(bad("unsupported version"));
        }
        let m = usize::from(cur.u16()?);
        let class_count = usize::from(cur.u16()?);
        if m > 63 {
            return Err(bad("element count too large"));
        }
        let mut elements = Vec::with_capacity(m);
        for _ in 0..m {
            let kind = LinkKind::from_code(cur.take(1)?[0]).ok_or_else(|| bad("unknown element kind"))?;
            let weight = f64::from_le_bytes(cur.take(8)?.try_into().expect("8 bytes"));
            let class = match cur.u32()? {
                NO_CLASS => None,
                c if (c as usize) < class_count => Some(c),
                _ => return Err(bad("class index out of range")),
            };
            let digest = cur.u32()?;
            elements.push(ElementDescriptor { kind, weight, class, digest });
        }
        let n = 1usize << m;
        if bytes.len() - cur.pos != n * 8 {
            return Err(Error::Format(format!("expected {} record bytes, found {}", n * 8, bytes.len() - cur.pos)));
        }
        let records = (0..n).map(|_| cur.u64()).collect::<Result<Vec<_>>>()?;
        Ok(ScenarioDatabase { sub_key: Vec::new(), m, class_count, elements, records })
    }

    /// `scenario_bitmask,connected_classes,delivered_capacity`, classes as
    /// `;`-separated indices.
    pub fn to_csv(&self) -> String {
        let caps = self.class_capacities();
        let mut out = String::from("scenario_bitmask,connected_classes,delivered_capacity\n");
        for (s, &r) in self.records.iter().enumerate() {
            let classes: Vec<String> = (0..self.class_count).filter(|c| r >> c & 1 == 1).map(|c| c.to_string()).collect();
            let delivered: f64 = (0..self.class_count).filter(|c| r >> c & 1 == 1).map(|c| caps[c]).sum();
            let _ = writeln!(out, "{s},{},{delivered}", classes.join(";"));
        }
        out
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Format("truncated file".into()));
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig1;
    use crate::link::{LinkElement, LinkNetwork};
    use crate::reduction::{extract_sink_subtopology, MapOptions};

    #[test]
    fn record_counts_follow_m() {
        let net = fig1();
        for (name, m) in [("VB20", 7), ("VB27", 6)] {
            let sub = extract_sink_subtopology(&net, net.find(name).unwrap(), MapOptions::default()).unwrap();
            let db = build_database(&sub, BuildOptions::default()).unwrap();
            assert_eq!(db.records.len(), 1 << m);
            assert_eq!(db.records[0], (1 << sub.classes.len()) - 1);
            assert_eq!(*db.records.last().unwrap(), 0);
        }
    }

    #[test]
    fn lone_vb_gives_two_empty_records() {
        let net = LinkNetwork::from_elements(vec![LinkElement::vb("VB1".into(), 1, 5.0, 1, BTreeSet::new())]);
        let sub = extract_sink_subtopology(&net, 0, MapOptions::default()).unwrap();
        assert!(sub.dead);
        let db = build_database(&sub, BuildOptions::default()).unwrap();
        assert_eq!(db.records, [0, 0]);
    }

    #[test]
    fn oversize_is_refused_with_estimate() {
        let net = fig1();
        let sub = extract_sink_subtopology(&net, net.find("VB20").unwrap(), MapOptions::default()).unwrap();
        let err = build_database(&sub, BuildOptions { max_m: 5 }).unwrap_err();
        assert_eq!(err, Error::TooLarge { m: 7, limit: 5, bytes: 1024 });
    }

    #[test]
    fn bytes_round_trip_and_reject_garbage() {
        let net = fig1();
        let sub = extract_sink_subtopology(&net, net.find("VB27").unwrap(), MapOptions::default()).unwrap();
        let db = build_database(&sub, BuildOptions::default()).unwrap();
        let bytes = db.to_bytes();
        assert_eq!(&bytes[..5], b"SVDB\x01");
        assert_eq!(bytes.len(), 4 + 1 + 2 + 2 + 6 * 17 + 64 * 8);
        let back = ScenarioDatabase::from_bytes(&bytes).unwrap();
        assert_eq!(back.records, db.records);
        assert_eq!(back.elements, db.elements);
        assert!(back.fits(&sub));
        assert!(ScenarioDatabase::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut wrong = bytes.clone();
        wrong[0] = b'X';
        assert!(ScenarioDatabase::from_bytes(&wrong).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let net = fig1();
        let sub = extract_sink_subtopology(&net, net.find("VB27").unwrap(), MapOptions::default()).unwrap();
        let csv = build_database(&sub, BuildOptions::default()).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("scenario_bitmask,connected_classes,delivered_capacity"));
        assert_eq!(lines.next(), Some("0,0;1;2,350"));
        assert_eq!(csv.lines().count(), 65);
    }
}
