//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use survnet_core::netfile::read_network;
use survnet_core::random::{random_network_sized, RandomParams};
use survnet_core::scenario::{
    build_database, oracle_sink, survivability_measure, BuildOptions, FaultSet, Scenario, ScenarioDatabase,
};
use survnet_core::{map_network, to_links, LinkNetwork, MapOptions, MappingResult};

const MEASURE_TOLERANCE: f64 = 1e-12;
const MONOTONE_PAIRS: usize = 10_000;
const RANDOM_NETWORKS: usize = 100;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).display().to_string()
}

fn survnet(args: &[&str], env: &[(&str, &str)]) -> (Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_survnet"))
        .args(args)
        .envs(env.iter().copied())
        .output()
        .expect("run survnet");
    (out, start.elapsed())
}

fn text(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn prepared(net: &LinkNetwork) -> (MappingResult, Vec<ScenarioDatabase>) {
    let mapping = map_network(net, MapOptions::default()).unwrap();
    let dbs = mapping.subs.iter().map(|s| build_database(s, BuildOptions::default()).unwrap()).collect();
    (mapping, dbs)
}

fn random_nets(seed: u64, count: usize, max: usize) -> Vec<LinkNetwork> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| to_links(random_network_sized(&mut rng, &RandomParams::default(), 2, max)).unwrap())
        .collect()
}

type Check = Result<String, String>;

fn transform_counts() -> Check {
    let (o, t) = survnet(&["transform", &data("fig1.net")], &[]);
    let out = text(&o);
    let head = out.lines().next().unwrap_or_default();
    let rows = out.lines().skip(1).count();
    if o.status.success() && head.contains("M=10 (VB=4 VT=4 H=2)") && rows == 10 && t < Duration::from_secs(1) {
        Ok(format!("{head} in {t:.2?}"))
    } else {
        Err(format!("got '{head}', {rows} rows, {t:.2?}"))
    }
}

fn map_counts() -> Check {
    let (o, t) = survnet(&["map", &data("fig1.net")], &[]);
    let out = text(&o);
    let sizes: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with("sub "))
        .filter_map(|l| l.split_whitespace().nth(2))
        .collect();
    let report = out.lines().find(|l| l.starts_with("M=")).unwrap_or_default().to_string();
    let ratio: f64 = report.rsplit("ratio=").next().and_then(|r| r.parse().ok()).unwrap_or(0.0);
    if sizes == ["m=7", "m=6"] && report.contains("sum=192") && ratio >= 5.0 && t < Duration::from_secs(1) {
        Ok(format!("{report} in {t:.2?}"))
    } else {
        Err(format!("sizes {sizes:?}, '{report}', {t:.2?}"))
    }
}

fn vt64_provenance() -> Check {
    let net = to_links(read_network(data("fig1.net")).unwrap()).unwrap();
    let mapping = map_network(&net, MapOptions::default()).unwrap();
    let vb = net.find("VB27").ok_or("no VB27")?;
    let a = mapping.assignment_for(vb).ok_or("VB27 unassigned")?;
    let vt64 = net.find("VT64").unwrap();
    let h1 = net.find("H1").unwrap();
    let want = BTreeSet::from([vt64, h1]);
    let hit = a.extraction.provenance_map.iter().find(|p| p.contains(&vt64)).ok_or("VT64 absent")?;
    let k = a.extraction.provenance_map.iter().position(|p| p == hit).unwrap();
    let kind = a.extraction.network.element(k).kind;
    if *hit == want && kind == survnet_core::LinkKind::VT {
        Ok("VB27 sub-topology VT stands for {VT64,H1}".into())
    } else {
        Err(format!("{kind} stands for {hit:?}"))
    }
}

fn fig1_groups() -> Check {
    let (o, _) = survnet(&["groups", &data("fig1.net"), "--machine"], &[]);
    let out = text(&o);
    let want = "group 1: sinks={20,27,28,30} gens={64,76,81}";
    let groups = out.lines().filter(|l| l.starts_with("group ")).count();
    let all = [20, 27, 28, 30].iter().all(|s| out.contains(&format!("sink {s}: {{64,76,81}}")));
    if out.contains(want) && groups == 1 && all {
        Ok("one group, every sink sees {64,76,81}".into())
    } else {
        Err(out)
    }
}

fn verify_all() -> Check {
    let start = Instant::now();
    let (o, _) = survnet(&["verify", &data("fig1.net"), "--random", &RANDOM_NETWORKS.to_string(), "--seed", "1"], &[]);
    let t = start.elapsed();
    let out = text(&o);
    if o.status.success() && out.contains("1024 scenarios x 4 sinks: all match") && out.contains("all match") && t < Duration::from_secs(60) {
        Ok(format!("{} in {t:.2?}", out.trim().replace('\n', "; ")))
    } else {
        Err(format!("exit {:?}: {out} {}", o.status.code(), String::from_utf8_lossy(&o.stderr)))
    }
}

fn monotone() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut dbs_checked = 0;
    for net in std::iter::once(to_links(read_network(data("fig1.net")).unwrap()).unwrap()).chain(random_nets(3, 30, 16)) {
        let (_, dbs) = prepared(&net);
        for db in dbs.iter().filter(|db| db.m <= 12 && db.m > 0) {
            let full = (1u64 << db.m) - 1;
            for _ in 0..MONOTONE_PAIRS {
                let s = rng.gen::<u64>() & full;
                let t = s | (rng.gen::<u64>() & full);
                if db.lookup(Scenario(t)) & !db.lookup(Scenario(s)) != 0 {
                    return Err(format!("scenario {t:#b} reaches a class that {s:#b} does not"));
                }
            }
            dbs_checked += 1;
        }
    }
    Ok(format!("{dbs_checked} databases x {MONOTONE_PAIRS} nested pairs"))
}

fn measure_matches() -> Check {
    let net = to_links(read_network(data("fig1.net")).unwrap()).unwrap();
    let (mapping, dbs) = prepared(&net);
    let m = net.len();
    let avail = vec![0.9; m];
    let caps = net.source_capacities();
    let mut worst: f64 = 0.0;
    for sink in net.sink_ids() {
        let got = survivability_measure(&net, &mapping, &dbs, &avail, sink).map_err(|e| e.to_string())?;
        let demand = net.sink_demand(sink).unwrap();
        let mut want = 0.0;
        for mask in 0u64..1 << m {
            let faults = FaultSet::from_mask(m, mask);
            let delivered: f64 = oracle_sink(&net, &faults, sink, false).unwrap().iter().map(|s| caps[s]).sum();
            if delivered >= demand {
                let faulty = mask.count_ones() as i32;
                want += 0.9f64.powi(m as i32 - faulty) * 0.1f64.powi(faulty);
            }
        }
        worst = worst.max((got - want).abs());
    }
    if worst <= MEASURE_TOLERANCE {
        Ok(format!("largest difference {worst:.1e}"))
    } else {
        Err(format!("difference {worst:e} above {MEASURE_TOLERANCE:e}"))
    }
}

fn thread_independence() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut hashes = Vec::new();
    for threads in ["1", "4"] {
        let mut hasher = Sha256::new();
        for net in ["fig1.net", "ship32.net"] {
            let out = dir.path().join(format!("{net}-{threads}"));
            let (o, _) = survnet(
                &["builddb", &data(net), "--out", out.to_str().unwrap()],
                &[("SURVNET_THREADS", threads)],
            );
            if !o.status.success() {
                return Err(String::from_utf8_lossy(&o.stderr).into_owned());
            }
            let mut files: Vec<PathBuf> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
            files.sort();
            for f in files {
                hasher.update(f.file_name().unwrap().to_string_lossy().as_bytes());
                hasher.update(fs::read(&f).unwrap());
            }
        }
        hashes.push(hasher.finalize());
    }
    if hashes[0] == hashes[1] {
        Ok(format!("sha256 {}", &format!("{:x}", hashes[0])[..16]))
    } else {
        Err("databases differ between 1 and 4 threads".into())
    }
}

fn ship32_report() -> Check {
    let (o, _) = survnet(&["report", &data("ship32.net")], &[]);
    let out = text(&o);
    if o.status.success() && out.contains("M=32") && out.contains("2^M=4294967296") && out.contains("sum=1024") {
        Ok(out.trim().to_string())
    } else {
        Err(out)
    }
}

fn main() {
    type Named = (&'static str, fn() -> Check);
    let checks: [Named; 9] = [
        ("fig1 transform yields 10 elements (4 VB, 4 VT, 2 H)", transform_counts),
        ("fig1 maps to 2 sub-topologies of 7 and 6 elements, 192 scenarios", map_counts),
        ("VB27 sub-topology VT has provenance {VT64,H1}", vt64_provenance),
        ("fig1 forms one group reaching {64,76,81}", fig1_groups),
        ("lookups agree with full search on fig1 and random networks", verify_all),
        ("connectivity is monotone in the fault set", monotone),
        ("survivability at availability 0.9 matches the oracle sum", measure_matches),
        ("databases are identical with 1 and 4 threads", thread_independence),
        ("ship32 reports 2^32 full scenarios against 1024", ship32_report),
    ];
    let mut failed = 0;
    for (k, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}: {name} ({detail})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}: {name} ({detail})", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
