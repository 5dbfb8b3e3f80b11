//! JSON-lines event logs: one event per line.
//!
//! ```text
//! {"cluster":0,"copy":3,"actor":17,"day":42,"kind":"reshare","parent":9}
//! ```

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{CascadeCluster, CopyId, EventKind, ReshareEvent};
use crate::graph::NodeId;
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    cluster: u64,
    copy: CopyId,
    actor: NodeId,
    day: usize,
    kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parent: Option<NodeId>,
}

/// Groups events by cluster id; clusters come back in ascending id order.
pub fn read_events_jsonl<R: BufRead>(input: R) -> Result<Vec<CascadeCluster>> {
    let mut grouped: BTreeMap<u64, Vec<ReshareEvent>> = BTreeMap::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: Record =
            serde_json::from_str(&line).map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        grouped.entry(r.cluster).or_default().push(ReshareEvent {
            actor: r.actor,
            copy_id: r.copy,
            day: r.day,
            kind: r.kind,
            parent_actor: r.parent,
        });
    }
    grouped
        .into_iter()
        .map(|(id, events)| CascadeCluster::new(id, events))
        .collect()
}

pub fn write_cluster_jsonl<W: Write>(cluster: &CascadeCluster, out: &mut W) -> Result<()> {
    for e in cluster.events() {
        let r = Record {
            cluster: cluster.id(),
            copy: e.copy_id,
            actor: e.actor,
            day: e.day,
            kind: e.kind,
            parent: e.parent_actor,
        };
        serde_json::to_writer(&mut *out, &r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_events_jsonl<W: Write>(clusters: &[CascadeCluster], mut out: W) -> Result<()> {
    for c in clusters {
        write_cluster_jsonl(c, &mut out)?;
    }
    out.flush()?;
    Ok(())
}
