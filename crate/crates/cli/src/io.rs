use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use msvp::graph::{load_edge_list, Graph, IndexBase};
use msvp::Partition;
use tempfile::NamedTempFile;

use crate::error::CliError;

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a 0-based `i j [w]` edge list.
pub fn read_graph(path: &Path) -> Result<Graph, CliError> {
    let file = File::open(path).map_err(io_error(path))?;
    load_edge_list(BufReader::new(file), IndexBase::Zero).map_err(|source| CliError::Graph {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a partition file.
///
/// Two layouts are accepted: plain text with one `node_id group_id` pair per
/// line (0-based, every node in `0..n` exactly once, `#` comments and blank
/// lines ignored), or a JSON report written by `msvp partition`, whose single
/// record's partition is used.
pub fn read_partition(path: &Path) -> Result<Partition, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    if text.trim_start().starts_with('{') {
        return partition_from_report(path, &text);
    }
    let malformed = |line: usize, reason: String| CliError::PartitionLine {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut labels: Vec<Option<usize>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(malformed(
                line,
                format!("expected 2 fields, found {}", fields.len()),
            ));
        }
        let parse = |s: &str, what: &str| {
            s.parse::<usize>()
                .map_err(|_| malformed(line, format!("{what} {s:?} is not a non-negative integer")))
        };
        let node = parse(fields[0], "node id")?;
        let group = parse(fields[1], "group id")?;
        if node >= labels.len() {
            labels.resize(node + 1, None);
        }
        if labels[node].replace(group).is_some() {
            return Err(malformed(line, format!("node {node} listed twice")));
        }
    }
    if labels.is_empty() {
        return Err(malformed(0, "no entries".into()));
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(node, label)| {
            label.ok_or_else(|| CliError::PartitionGap {
                path: path.to_path_buf(),
                node,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Partition::from_labels(labels))
}

fn partition_from_report(path: &Path, text: &str) -> Result<Partition, CliError> {
    #[derive(serde::Deserialize)]
    struct Record {
        partition: Partition,
    }
    #[derive(serde::Deserialize)]
    struct Report {
        records: Vec<Record>,
    }
    let malformed = |reason: String| CliError::PartitionLine {
        path: path.to_path_buf(),
        line: 0,
        reason,
    };
    let report: Report =
        serde_json::from_str(text).map_err(|e| malformed(format!("not a run report: {e}")))?;
    match <[Record; 1]>::try_from(report.records) {
        Ok([record]) => Ok(record.partition),
        Err(records) => Err(malformed(format!(
            "report holds {} records; exactly one is needed",
            records.len()
        ))),
    }
}

/// Writes `bytes` to `path` via a temporary file in the same directory and an
/// atomic rename, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = NamedTempFile::new_in(&dir).map_err(io_error(path))?;
    tmp.write_all(bytes).map_err(io_error(path))?;
    tmp.as_file().sync_all().map_err(io_error(path))?;
    tmp.persist(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}
