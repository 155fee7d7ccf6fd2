use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use rand::SeedableRng;
use survnet_core::dot::link_network_dot;
use survnet_core::grouping::{decompose_groups, render_machine, render_table};
use survnet_core::link::LinkKind;
use survnet_core::netfile::read_network;
use survnet_core::random::{random_network_sized, RandomParams};
use survnet_core::reduction::MappingResult;
use survnet_core::scenario::{
    build_database, complexity_report, oracle_sink, query_survivability, survivability_measure, BuildOptions,
    FaultSet, ScenarioDatabase,
};
use survnet_core::{map_network, to_link_network, LinkNetwork, RawNetwork, ValidatedRawNetwork};

use crate::{Failure, MapArgs};

type CmdResult = Result<(), Failure>;

const RANDOM_MAX_ELEMENTS: usize = 14;

fn load(input: &Path) -> anyhow::Result<(ValidatedRawNetwork, LinkNetwork)> {
    let raw = read_network(input)?;
    links_of(raw).with_context(|| input.display().to_string())
}

fn links_of(raw: RawNetwork) -> anyhow::Result<(ValidatedRawNetwork, LinkNetwork)> {
    let net = ValidatedRawNetwork::validate(raw)?.merge_parallel();
    let links = to_link_network(&net)?;
    Ok((net, links))
}

fn braces<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    let inner: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Short stable tag for a canonical key (FNV-1a, 64 bit).
fn key_tag(key: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in key {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn transform(input: &Path, dot: Option<&Path>, normalize: bool) -> CmdResult {
    let (raw, links) = load(input)?;
    println!(
        "net {}: M={} (VB={} VT={} H={}) junctions={}",
        raw.name(),
        links.len(),
        links.count(LinkKind::VB),
        links.count(LinkKind::VT),
        links.count(LinkKind::H),
        links.junctions().len()
    );
    for (i, e) in links.elements().iter().enumerate() {
        let ends: Vec<String> = e.junctions().map(|j| format!("J{j}")).collect();
        let weight = if normalize { links.normalized_weight(i) } else { e.weight };
        let weight = weight.map_or("-".to_string(), |w| format!("{w:+}"));
        println!(
            "{:>3} {:<8} {:<2} {:<9} w={:<8} prov={}",
            i,
            e.name,
            e.kind.to_string(),
            ends.join("-"),
            weight,
            braces(&e.provenance)
        );
    }
    if let Some(path) = dot {
        write_file(path, link_network_dot(&links, raw.name()))?;
    }
    Ok(())
}

pub fn groups(input: &Path, machine: bool, source_transit: bool) -> CmdResult {
    let (raw, _) = load(input)?;
    let groups = decompose_groups(&raw);
    let text = if machine {
        render_machine(&raw, &groups, source_transit)?
    } else {
        render_table(&raw, &groups, source_transit)?
    };
    print!("{text}");
    Ok(())
}

fn manifest(links: &LinkNetwork, mapping: &MappingResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mode {}", mapping.options.mode.as_str());
    let _ = writeln!(out, "source-transit {}", if mapping.options.source_transit { "on" } else { "off" });
    let _ = writeln!(out, "subs {}", mapping.subs.len());
    for (k, sub) in mapping.subs.iter().enumerate() {
        let _ = writeln!(
            out,
            "sub {k} m={} key={} rep={}{}",
            sub.len(),
            key_tag(&sub.canonical_key),
            links.element(sub.sink_vb).name,
            if sub.dead { " dead" } else { "" }
        );
    }
    for a in &mapping.assignment {
        let pairs: Vec<String> = mapping.bijection(a).into_iter().map(|(x, y)| format!("{x}>{y}")).collect();
        let _ = writeln!(
            out,
            "vb {} sub={} m={} sources={} map={}",
            links.element(a.vb).name,
            a.sub,
            a.extraction.len(),
            a.extraction.classes.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
            pairs.join(" ")
        );
    }
    out
}

pub fn map(input: &Path, args: &MapArgs, out: Option<&Path>) -> CmdResult {
    let (_, links) = load(input)?;
    let mapping = map_network(&links, args.options())?;
    let text = manifest(&links, &mapping);
    print!("{text}");
    println!("{}", complexity_report(&links, &mapping));
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
        write_file(&dir.join("manifest.txt"), &text)?;
        for (k, sub) in mapping.subs.iter().enumerate() {
            write_file(&dir.join(format!("sub{k}.dot")), link_network_dot(&sub.network, &format!("sub{k}")))?;
        }
    }
    Ok(())
}

fn build_all(mapping: &MappingResult, max_m: usize) -> anyhow::Result<Vec<ScenarioDatabase>> {
    mapping
        .subs
        .iter()
        .enumerate()
        .map(|(k, sub)| build_database(sub, BuildOptions { max_m }).with_context(|| format!("sub-topology {k}")))
        .collect()
}

fn databases(mapping: &MappingResult, dir: Option<&Path>) -> anyhow::Result<Vec<ScenarioDatabase>> {
    let Some(dir) = dir else { return build_all(mapping, survnet_core::scenario::DEFAULT_MAX_M) };
    mapping
        .subs
        .iter()
        .enumerate()
        .map(|(k, sub)| {
            let path = dir.join(format!("sub{k}.svdb"));
            let bytes = fs::read(&path).with_context(|| path.display().to_string())?;
            let db = ScenarioDatabase::from_bytes(&bytes).with_context(|| path.display().to_string())?;
            if !db.fits(sub) {
                bail!("{} was built for a different sub-topology", path.display());
            }
            Ok(db)
        })
        .collect()
}

pub fn builddb(input: &Path, args: &MapArgs, out: &Path, max_m: usize, csv: bool) -> CmdResult {
    let (_, links) = load(input)?;
    let mapping = map_network(&links, args.options())?;
    let dbs = build_all(&mapping, max_m)?;
    fs::create_dir_all(out).with_context(|| out.display().to_string())?;
    write_file(&out.join("manifest.txt"), manifest(&links, &mapping))?;
    for (k, db) in dbs.iter().enumerate() {
        write_file(&out.join(format!("sub{k}.svdb")), db.to_bytes())?;
        if csv {
            write_file(&out.join(format!("sub{k}.csv")), db.to_csv())?;
        }
        println!("sub{k}.svdb m={} records={}", db.m, db.records.len());
    }
    Ok(())
}

fn selected_sinks(links: &LinkNetwork, sinks: &[u32]) -> anyhow::Result<Vec<u32>> {
    let all = links.sink_ids();
    if sinks.is_empty() {
        return Ok(all.into_iter().collect());
    }
    for s in sinks {
        if !all.contains(s) {
            bail!("unknown sink {s}");
        }
    }
    Ok(sinks.to_vec())
}

pub fn query(input: &Path, args: &MapArgs, faults: &[String], sinks: &[u32], db: Option<&Path>) -> CmdResult {
    let (_, links) = load(input)?;
    let names: Vec<&String> = faults.iter().filter(|f| !f.is_empty()).collect();
    let faults = FaultSet::from_names(&links, &names).map_err(|e| Failure::Usage(e.to_string()))?;
    let mapping = map_network(&links, args.options())?;
    let dbs = databases(&mapping, db)?;
    for sink in selected_sinks(&links, sinks)? {
        let v = query_survivability(&links, &mapping, &dbs, &faults, sink)?;
        println!(
            "sink {}: connected={} delivered={} demand={} survives={}",
            v.sink,
            braces(&v.connected),
            v.delivered,
            v.demand,
            if v.survives { "yes" } else { "no" }
        );
    }
    Ok(())
}

fn read_availability(links: &LinkNetwork, uniform: Option<f64>, file: Option<&Path>) -> anyhow::Result<Vec<f64>> {
    let mut avail = vec![uniform.unwrap_or(1.0); links.len()];
    if let Some(path) = file {
        let text = fs::read_to_string(path).with_context(|| path.display().to_string())?;
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            let (Some(name), Some(p), None) = (toks.next(), toks.next(), toks.next()) else {
                bail!("{}:{}: expected '<element> <availability>'", path.display(), n + 1);
            };
            let i = links.find_or_err(name)?;
            avail[i] = p.parse().map_err(|_| anyhow!("{}:{}: bad probability '{p}'", path.display(), n + 1))?;
        }
    }
    Ok(avail)
}

pub fn analyze(
    input: &Path,
    args: &MapArgs,
    uniform: Option<f64>,
    file: Option<&Path>,
    sinks: &[u32],
    db: Option<&Path>,
) -> CmdResult {
    if uniform.is_none() && file.is_none() {
        return Err(Failure::Usage("give --availability or --availability-file".into()));
    }
    if let Some(p) = uniform.filter(|p| !(0.0..=1.0).contains(p)) {
        return Err(Failure::Usage(format!("availability {p} outside [0,1]")));
    }
    let (_, links) = load(input)?;
    let avail = read_availability(&links, uniform, file)?;
    let mapping = map_network(&links, args.options())?;
    let dbs = databases(&mapping, db)?;
    for sink in selected_sinks(&links, sinks)? {
        let p = survivability_measure(&links, &mapping, &dbs, &avail, sink)?;
        println!("sink {sink}: P(survive)={p:.12} demand={}", links.sink_demand(sink).unwrap_or(0.0));
    }
    Ok(())
}

pub fn report(input: &Path, args: &MapArgs) -> CmdResult {
    let (_, links) = load(input)?;
    let mapping = map_network(&links, args.options())?;
    println!("{}", complexity_report(&links, &mapping));
    Ok(())
}

/// Compares lookups with the direct search over every scenario and sink.
/// Returns (scenarios, sinks, mismatch descriptions).
pub fn cross_check(
    links: &LinkNetwork,
    mapping: &MappingResult,
    dbs: &[ScenarioDatabase],
    source_transit: bool,
) -> anyhow::Result<(u64, usize, Vec<String>)> {
    let m = links.len();
    let sinks: Vec<u32> = links.sink_ids().into_iter().collect();
    let mut mismatches = Vec::new();
    for mask in 0u64..1 << m {
        let faults = FaultSet::from_mask(m, mask);
        for &sink in &sinks {
            let got = query_survivability(links, mapping, dbs, &faults, sink)?.connected;
            let want = oracle_sink(links, &faults, sink, source_transit)?;
            if got != want {
                mismatches.push(format!("scenario {mask:#b} sink {sink}: lookup {} oracle {}", braces(&got), braces(&want)));
            }
        }
    }
    Ok((1 << m, sinks.len(), mismatches))
}

pub fn verify(
    input: Option<&Path>,
    args: &MapArgs,
    max_elements: usize,
    random: usize,
    seed: u64,
    db: Option<&Path>,
) -> CmdResult {
    if input.is_none() && random == 0 {
        return Err(Failure::Usage("give a network file or --random N".into()));
    }
    let opts = args.options();
    let mut mismatches = Vec::new();
    if let Some(input) = input {
        let (_, links) = load(input)?;
        if links.len() > max_elements {
            return Err(Failure::Data(anyhow!(
                "{} has {} elements, above the verification bound {max_elements}",
                input.display(),
                links.len()
            )));
        }
        let mapping = map_network(&links, opts)?;
        let dbs = databases(&mapping, db)?;
        let (scenarios, sinks, found) = cross_check(&links, &mapping, &dbs, opts.source_transit)?;
        if found.is_empty() {
            println!("{scenarios} scenarios x {sinks} sinks: all match");
        } else {
            println!("{scenarios} scenarios x {sinks} sinks: {} mismatches", found.len());
        }
        mismatches.extend(found);
    }
    if random > 0 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let bound = max_elements.min(RANDOM_MAX_ELEMENTS);
        let mut checks = 0u64;
        let mut bad = 0;
        for _ in 0..random {
            let raw = random_network_sized(&mut rng, &RandomParams::default(), 2, bound);
            let (_, links) = links_of(raw)?;
            let mapping = map_network(&links, opts)?;
            let dbs = build_all(&mapping, bound)?;
            let (scenarios, sinks, found) = cross_check(&links, &mapping, &dbs, opts.source_transit)?;
            checks += scenarios * sinks as u64;
            bad += found.len();
            mismatches.extend(found);
        }
        if bad == 0 {
            println!("{random} random networks (M <= {bound}), {checks} scenario checks: all match");
        } else {
            println!("{random} random networks (M <= {bound}), {checks} scenario checks: {bad} mismatches");
        }
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        let shown: Vec<&String> = mismatches.iter().take(20).collect();
        let mut msg = shown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("\n");
        if mismatches.len() > shown.len() {
            let _ = write!(msg, "\n... {} more", mismatches.len() - shown.len());
        }
        Err(Failure::Mismatch(msg))
    }
}
