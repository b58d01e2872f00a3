//! Weighted undirected graphs: construction, validation, file ingestion and
//! synthetic benchmark generation.
//!
//! A [`Graph`] is immutable once built and always satisfies:
//! symmetric positive weights, no self-loops, a single connected component,
//! and `Σ_i d_i = 2m` as summed in node order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::io::BufRead;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::partition::Partition;

/// Maximum number of samples drawn by [`planted_partition`] before giving up.
pub const PLANTED_MAX_ATTEMPTS: u64 = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: malformed input: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: non-positive or non-finite weight {weight} on edge ({i}, {j})")]
    NonPositiveWeight {
        line: usize,
        i: usize,
        j: usize,
        weight: f64,
    },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: usize },
    #[error(
        "line {line}: edge ({i}, {j}) repeated with weight {second} (first seen with {first})"
    )]
    ConflictingDuplicateEdge {
        line: usize,
        i: usize,
        j: usize,
        first: f64,
        second: f64,
    },
    #[error("graph is disconnected: node {node} is unreachable from node 0")]
    Disconnected { node: usize },
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("edge ({i}, {j}) is listed in one orientation only")]
    AsymmetricEdgeList { i: usize, j: usize },
    #[error("node {node} has no community label")]
    MissingCommunityLabel { node: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("no connected sample after {attempts} attempts; parameters too sparse")]
    GenerationFailed { attempts: u64 },
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for GraphError {
    fn from(e: std::io::Error) -> Self {
        GraphError::Io(e.to_string())
    }
}

/// Index base of node identifiers in an edge-list file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexBase {
    #[default]
    Zero,
    One,
}

impl IndexBase {
    fn offset(self) -> usize {
        match self {
            IndexBase::Zero => 0,
            IndexBase::One => 1,
        }
    }
}

/// Undirected weighted connected graph with dense 0-based node indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    /// Each undirected edge once, `i < j`, sorted.
    edges: Vec<(usize, usize, f64)>,
    /// Neighbour lists sorted by neighbour index.
    adjacency: Vec<Vec<(usize, f64)>>,
    degrees: Vec<f64>,
    total_weight: f64,
}

impl Graph {
    /// Builds a graph on nodes `0..n` from undirected weighted edges.
    ///
    /// Each edge may appear in either or both orientations; repeats must carry
    /// the same weight. Error line numbers refer to the 1-based position of
    /// the offending edge in `edges`.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut builder = EdgeSet::default();
        for (pos, (i, j, w)) in edges.into_iter().enumerate() {
            let line = pos + 1;
            if i >= n || j >= n {
                return Err(GraphError::MalformedLine {
                    line,
                    reason: format!("node index out of range for n = {n}"),
                });
            }
            builder.insert(line, i, j, w)?;
        }
        builder.build(n)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Undirected edges `(i, j, w)` with `i < j`, in sorted order.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbours(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// `m = Σ_ij A_ij / 2`.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Weight of edge `(i, j)`, zero when absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adjacency[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map(|pos| self.adjacency[i][pos].1)
            .unwrap_or(0.0)
    }

    /// Stationary distribution `π_i = d_i / 2m`.
    pub fn stationary(&self) -> Vec<f64> {
        let two_m = 2.0 * self.total_weight;
        self.degrees.iter().map(|d| d / two_m).collect()
    }

    pub fn dense_adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(i, j, w) in &self.edges {
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
        a
    }

    /// Canonical edge-list text: one `i j w` line per undirected edge, sorted,
    /// 0-based, with the weight always printed in round-trippable form.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(i, j, w) in &self.edges {
            writeln!(out, "{i} {j} {w:?}").expect("writing to a String");
        }
        out
    }
}

/// Collects undirected edges, deduplicating consistent repeats.
#[derive(Default)]
struct EdgeSet {
    edges: BTreeMap<(usize, usize), f64>,
}

impl EdgeSet {
    fn insert(&mut self, line: usize, i: usize, j: usize, w: f64) -> Result<(), GraphError> {
        if i == j {
            return Err(GraphError::SelfLoop { line, node: i });
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(GraphError::NonPositiveWeight {
                line,
                i,
                j,
                weight: w,
            });
        }
        let key = (i.min(j), i.max(j));
        match self.edges.get(&key) {
            Some(&first) if first != w => Err(GraphError::ConflictingDuplicateEdge {
                line,
                i,
                j,
                first,
                second: w,
            }),
            Some(_) => Ok(()),
            None => {
                self.edges.insert(key, w);
                Ok(())
            }
        }
    }

    fn build(self, n: usize) -> Result<Graph, GraphError> {
        if self.edges.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let edges: Vec<(usize, usize, f64)> = self
            .edges
            .into_iter()
            .map(|((i, j), w)| (i, j, w))
            .collect();

        let mut adjacency = vec![Vec::new(); n];
        for &(i, j, w) in &edges {
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(k, _)| k);
        }
        let degrees: Vec<f64> = adjacency
            .iter()
            .map(|list| list.iter().map(|&(_, w)| w).sum())
            .collect();
        let total_weight = degrees.iter().sum::<f64>() / 2.0;

        if let Some(node) = first_unreachable(&adjacency) {
            return Err(GraphError::Disconnected { node });
        }

        Ok(Graph {
            n,
            edges,
            adjacency,
            degrees,
            total_weight,
        })
    }
}

fn first_unreachable(adjacency: &[Vec<(usize, f64)>]) -> Option<usize> {
    let n = adjacency.len();
    if n == 0 {
        return None;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.iter().position(|&s| !s)
}

/// Iterates over `(line_number, tokens)` of non-empty, non-comment lines.
fn data_lines<R: BufRead>(
    reader: R,
) -> impl Iterator<Item = Result<(usize, Vec<String>), GraphError>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(idx, line)| match line {
            Err(e) => Some(Err(GraphError::from(e))),
            Ok(text) => {
                let trimmed = text.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    None
                } else {
                    let tokens = trimmed.split_whitespace().map(str::to_owned).collect();
                    Some(Ok((idx + 1, tokens)))
                }
            }
        })
}

fn parse_index(token: &str, line: usize, base: IndexBase) -> Result<usize, GraphError> {
    let raw: usize = token.parse().map_err(|_| GraphError::MalformedLine {
        line,
        reason: format!("invalid node index {token:?}"),
    })?;
    raw.checked_sub(base.offset())
        .ok_or_else(|| GraphError::MalformedLine {
            line,
            reason: format!("node index {raw} below base {}", base.offset()),
        })
}

/// Reads an `i j [w]` edge list. Node count is the largest index plus one.
pub fn load_edge_list<R: BufRead>(reader: R, base: IndexBase) -> Result<Graph, GraphError> {
    let mut set = EdgeSet::default();
    let mut max_index = None;
    for entry in data_lines(reader) {
        let (line, tokens) = entry?;
        if !(2..=3).contains(&tokens.len()) {
            return Err(GraphError::MalformedLine {
                line,
                reason: format!("expected \"i j [w]\", found {} fields", tokens.len()),
            });
        }
        let i = parse_index(&tokens[0], line, base)?;
        let j = parse_index(&tokens[1], line, base)?;
        let w = match tokens.get(2) {
            Some(tok) => tok.parse::<f64>().map_err(|_| GraphError::MalformedLine {
                line,
                reason: format!("invalid weight {tok:?}"),
            })?,
            None => 1.0,
        };
        set.insert(line, i, j, w)?;
        max_index = Some(max_index.unwrap_or(0).max(i).max(j));
    }
    let n = max_index.map_or(0, |m| m + 1);
    set.build(n)
}

/// Reference community labels carried alongside a benchmark graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    partition: Partition,
}

impl GroundTruth {
    pub fn new(partition: Partition) -> Self {
        Self { partition }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn k(&self) -> usize {
        self.partition.num_groups()
    }
}

/// Reads an LFR `network.dat` / `community.dat` pair (1-based, unit weight,
/// every edge listed in both orientations).
pub fn load_lfr<N: BufRead, C: BufRead>(
    network: N,
    communities: C,
) -> Result<(Graph, GroundTruth), GraphError> {
    let mut labels: BTreeMap<usize, usize> = BTreeMap::new();
    for entry in data_lines(communities) {
        let (line, tokens) = entry?;
        if tokens.len() != 2 {
            return Err(GraphError::MalformedLine {
                line,
                reason: "expected \"node label\"".into(),
            });
        }
        let node = parse_index(&tokens[0], line, IndexBase::One)?;
        let label: usize = tokens[1].parse().map_err(|_| GraphError::MalformedLine {
            line,
            reason: format!("invalid community label {:?}", tokens[1]),
        })?;
        if let Some(prev) = labels.insert(node, label) {
            if prev != label {
                return Err(GraphError::MalformedLine {
                    line,
                    reason: format!("node {} has conflicting labels", node + 1),
                });
            }
        }
    }
    let n = labels.keys().next_back().map_or(0, |&max| max + 1);
    let assignment = (0..n)
        .map(|node| {
            labels
                .get(&node)
                .copied()
                .ok_or(GraphError::MissingCommunityLabel { node: node + 1 })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut directed: BTreeSet<(usize, usize)> = BTreeSet::new();
    for entry in data_lines(network) {
        let (line, tokens) = entry?;
        if tokens.len() != 2 {
            return Err(GraphError::MalformedLine {
                line,
                reason: "expected \"i j\"".into(),
            });
        }
        let i = parse_index(&tokens[0], line, IndexBase::One)?;
        let j = parse_index(&tokens[1], line, IndexBase::One)?;
        if i == j {
            return Err(GraphError::SelfLoop { line, node: i + 1 });
        }
        if i >= n || j >= n {
            return Err(GraphError::MissingCommunityLabel { node: i.max(j) + 1 });
        }
        directed.insert((i, j));
    }
    for &(i, j) in &directed {
        if !directed.contains(&(j, i)) {
            return Err(GraphError::AsymmetricEdgeList { i: i + 1, j: j + 1 });
        }
    }
    let graph = Graph::from_edges(
        n,
        directed
            .iter()
            .filter(|(i, j)| i < j)
            .map(|&(i, j)| (i, j, 1.0)),
    )?;
    Ok((graph, GroundTruth::new(Partition::from_labels(assignment))))
}

/// Samples a connected unit-weight planted-partition graph with `k` groups
/// of `size` nodes; node `i` belongs to group `i / size`.
///
/// Pairs `i < j` are visited in lexicographic order, each drawing one
/// uniform `f64` from a ChaCha8 stream seeded with `seed`. Attempt `a`
/// (starting at 0) uses stream number `a`; the first connected sample wins.
pub fn planted_partition(
    k: usize,
    size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Graph, GroundTruth), GraphError> {
    if k < 1 || size < 2 {
        return Err(GraphError::InvalidParameters(format!(
            "need k >= 1 and size >= 2, got k = {k}, size = {size}"
        )));
    }
    if !(0.0..=1.0).contains(&p_out) || !(0.0..=1.0).contains(&p_in) || p_out > p_in {
        return Err(GraphError::InvalidParameters(format!(
            "need 0 <= p_out <= p_in <= 1, got p_in = {p_in}, p_out = {p_out}"
        )));
    }
    let n = k * size;
    let truth = GroundTruth::new(Partition::from_labels((0..n).map(|i| i / size)));
    for attempt in 0..PLANTED_MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let p = if i / size == j / size { p_in } else { p_out };
                if rng.random::<f64>() < p {
                    edges.push((i, j, 1.0));
                }
            }
        }
        match Graph::from_edges(n, edges) {
            Ok(g) => return Ok((g, truth)),
            Err(GraphError::Disconnected { .. } | GraphError::EmptyGraph) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GraphError::GenerationFailed {
        attempts: PLANTED_MAX_ATTEMPTS,
    })
}

/// The four-node two-pair network: two heavy edges (weight 10) joined by four
/// unit cross edges. Handy as a canonical small fixture.
pub fn pair_graph() -> Graph {
    Graph::from_edges(
        4,
        [
            (0, 1, 10.0),
            (2, 3, 10.0),
            (0, 2, 1.0),
            (0, 3, 1.0),
            (1, 2, 1.0),
            (1, 3, 1.0),
        ],
    )
    .expect("fixture is valid")
}
