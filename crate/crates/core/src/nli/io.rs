use std::fmt::Write as _;
use std::path::Path;

use super::NliError;
use crate::graph::{LinkState, NliSnapshot, NodeId, Topology};

pub const FORMAT_VERSION: &str = "v1";

/// Renders snapshots in the line-oriented file format.
pub fn write_snapshots(topo: &Topology, snaps: &[NliSnapshot]) -> String {
    let mut out = format!(
        "nli {FORMAT_VERSION} {} {}\n",
        topo.content_hash(),
        snaps.len()
    );
    for snap in snaps {
        for (edge, link) in topo.edges().iter().zip(snap.links()) {
            let _ = writeln!(
                out,
                "{} {} {} {:.6} {:.6} {:.6}",
                snap.id, edge.a, edge.b, link.bw, link.delay, link.loss
            );
        }
    }
    out
}

pub fn save_snapshots(path: &Path, topo: &Topology, snaps: &[NliSnapshot]) -> Result<(), NliError> {
    std::fs::write(path, write_snapshots(topo, snaps))
        .map_err(|e| NliError::Io(format!("{}: {e}", path.display())))
}

pub fn load_snapshots(path: &Path, topo: &Topology) -> Result<Vec<NliSnapshot>, NliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| NliError::Io(format!("{}: {e}", path.display())))?;
    parse_snapshots(&text, topo)
}

pub fn parse_snapshots(text: &str, topo: &Topology) -> Result<Vec<NliSnapshot>, NliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(NliError::Malformed {
        line: 1,
        msg: "empty file".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.first() != Some(&"nli") {
        return Err(NliError::Malformed {
            line: 1,
            msg: "missing `nli` header".into(),
        });
    }
    let version = fields.get(1).copied().unwrap_or("");
    if version != FORMAT_VERSION {
        return Err(NliError::UnsupportedVersion(version.to_string()));
    }
    let [_, _, hash, count] = fields[..] else {
        return Err(NliError::Malformed {
            line: 1,
            msg: "header needs `nli v1 <hash> <count>`".into(),
        });
    };
    let expected_hash = topo.content_hash();
    if hash != expected_hash {
        return Err(NliError::TopologyMismatch {
            expected: expected_hash,
            found: hash.to_string(),
        });
    }
    let count: usize = count.parse().map_err(|_| NliError::Malformed {
        line: 1,
        msg: format!("bad snapshot count `{count}`"),
    })?;

    let m = topo.edge_count();
    let expected = count * m;
    let mut snaps = Vec::with_capacity(count);
    let mut links = Vec::with_capacity(m);
    let mut current_id = None;
    let mut found = 0;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let bad = |msg: String| NliError::Malformed { line: lineno, msg };
        if found == expected {
            return Err(bad("records beyond declared count".into()));
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            return Err(bad(format!("expected 6 fields, got {}", f.len())));
        }
        let int = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| bad(format!("bad integer `{s}`")))
        };
        let real = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(format!("bad number `{s}`")))
        };
        let id = int(f[0])?;
        let edge = &topo.edges()[found % m];
        if (NodeId(int(f[1])?), NodeId(int(f[2])?)) != (edge.a, edge.b) {
            return Err(bad(format!("expected edge ({}, {})", edge.a, edge.b)));
        }
        match current_id {
            Some(cur) if cur != id => {
                return Err(bad(format!("snapshot {id} interleaves with {cur}")))
            }
            _ => current_id = Some(id),
        }
        links.push(LinkState {
            bw: real(f[3])?,
            delay: real(f[4])?,
            loss: real(f[5])?,
        });
        found += 1;
        if links.len() == m {
            let snap = NliSnapshot::new(topo, id, std::mem::take(&mut links))
                .map_err(|e| bad(e.to_string()))?;
            snaps.push(snap);
            current_id = None;
        }
    }
    if found != expected {
        return Err(NliError::Truncated { expected, found });
    }
    Ok(snaps)
}
