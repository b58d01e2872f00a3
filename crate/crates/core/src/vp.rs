//! Max-sum vector partitioning with a Louvain-style agglomeration heuristic.
//!
//! Phase 1 starts from singletons and repeatedly sweeps the input vectors,
//! moving each to the group with the largest positive gain
//!
//! ```text
//! Δr(α → β) = ⟨x_i, y_β⟩_σ - ⟨x_i, y_α - x_i⟩_σ
//! ```
//!
//! until a sweep makes no move. Phase 2 replaces the inputs by the group sum
//! vectors and starts again; the run ends when phase 1 leaves every input in
//! its own group. The exact change of `Σ_s q(y_s)` caused by a move is `2Δr`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::objective::stability;
use crate::partition::Partition;
use crate::spectral::{signed_dot, Embedding};

/// Largest input accepted by [`exhaustive_partition`]; Bell(10) = 115975.
pub const EXHAUSTIVE_MAX_NODES: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VpError {
    #[error("item {item} is already in group {group}")]
    SameGroup { item: usize, group: usize },
    #[error("aggregation did not settle within {levels} levels")]
    LevelCapExceeded { levels: usize },
    #[error("exhaustive search limited to {max} vectors, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("no vectors to partition")]
    EmptyInput,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepOrder {
    Natural,
    /// A fresh permutation per sweep, drawn from a ChaCha8 stream.
    Shuffled(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VPConfig {
    pub sweep_order: SweepOrder,
    /// Permit moving a vector out into a new, empty group.
    pub allow_detach: bool,
    /// A move is accepted only if its gain exceeds
    /// `gain_tolerance · Σ_i ‖x_i‖²` (Euclidean norms of the input vectors).
    pub gain_tolerance: f64,
    pub max_levels: usize,
}

impl Default for VPConfig {
    fn default() -> Self {
        Self {
            sweep_order: SweepOrder::Natural,
            allow_detach: true,
            gain_tolerance: 1e-12,
            max_levels: 64,
        }
    }
}

impl VPConfig {
    fn validate(&self) -> Result<(), VpError> {
        if !(self.gain_tolerance > 0.0 && self.gain_tolerance.is_finite()) {
            return Err(VpError::InvalidConfig(format!(
                "gain_tolerance must be positive, got {}",
                self.gain_tolerance
            )));
        }
        if self.max_levels == 0 {
            return Err(VpError::InvalidConfig(
                "max_levels must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Destination of a candidate move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveTarget {
    Group(usize),
    /// A new group containing only the moved vector.
    Empty,
}

/// Working state of one optimisation run.
#[derive(Debug, Clone)]
pub struct VPState {
    dim: usize,
    signs: Vec<f64>,
    /// Current-level input vectors, row-major.
    items: Vec<f64>,
    assignment: Vec<usize>,
    /// Group sum vectors, row-major, one slot per group (possibly empty).
    sums: Vec<f64>,
    sizes: Vec<usize>,
    level: usize,
    /// Original node → current-level item.
    membership: Vec<usize>,
}

impl VPState {
    /// All-singletons state over the embedding's node vectors.
    pub fn new(emb: &Embedding) -> Self {
        let n = emb.node_count();
        Self {
            dim: emb.dim(),
            signs: emb.signature().to_vec(),
            items: emb.coords().to_vec(),
            assignment: (0..n).collect(),
            sums: emb.coords().to_vec(),
            sizes: vec![1; n],
            level: 0,
            membership: (0..n).collect(),
        }
    }

    pub fn item_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn group_of(&self, item: usize) -> usize {
        self.assignment[item]
    }

    /// Number of non-empty groups.
    pub fn num_groups(&self) -> usize {
        self.sizes.iter().filter(|&&s| s > 0).count()
    }

    fn item(&self, i: usize) -> &[f64] {
        &self.items[i * self.dim..(i + 1) * self.dim]
    }

    pub fn group_sum(&self, group: usize) -> &[f64] {
        &self.sums[group * self.dim..(group + 1) * self.dim]
    }

    /// `Σ_s q(y_s)` over the current groups (unscaled).
    pub fn objective(&self) -> f64 {
        (0..self.sizes.len())
            .filter(|&s| self.sizes[s] > 0)
            .map(|s| {
                let y = self.group_sum(s);
                signed_dot(&self.signs, y, y)
            })
            .sum()
    }

    /// `⟨x_i, y_α - x_i⟩_σ` for the item's own group `α`.
    fn own_term(&self, item: usize) -> f64 {
        let x = self.item(item);
        let y = self.group_sum(self.assignment[item]);
        self.signs
            .iter()
            .zip(x.iter().zip(y))
            .map(|(s, (xi, yi))| s * xi * (yi - xi))
            .sum()
    }

    /// Gain `Δr` of moving `item` to `target`; half the exact change of
    /// [`VPState::objective`].
    pub fn move_gain(&self, item: usize, target: MoveTarget) -> Result<f64, VpError> {
        let alpha = self.assignment[item];
        let into = match target {
            MoveTarget::Group(beta) if beta == alpha => {
                return Err(VpError::SameGroup { item, group: beta })
            }
            MoveTarget::Group(beta) => {
                signed_dot(&self.signs, self.item(item), self.group_sum(beta))
            }
            MoveTarget::Empty => 0.0,
        };
        Ok(into - self.own_term(item))
    }

    pub fn apply_move(&mut self, item: usize, target: MoveTarget) {
        let alpha = self.assignment[item];
        let beta = match target {
            MoveTarget::Group(beta) => beta,
            MoveTarget::Empty => {
                self.sums.extend(std::iter::repeat_n(0.0, self.dim));
                self.sizes.push(0);
                self.sizes.len() - 1
            }
        };
        if beta == alpha {
            return;
        }
        let dim = self.dim;
        for c in 0..dim {
            let x = self.items[item * dim + c];
            self.sums[alpha * dim + c] -= x;
            self.sums[beta * dim + c] += x;
        }
        self.sizes[alpha] -= 1;
        self.sizes[beta] += 1;
        self.assignment[item] = beta;
    }

    /// Best move for `item` under the tie-breaking contract: the lowest-index
    /// existing group among equal gains, with a detach ranked after them.
    fn best_move(&self, item: usize, allow_detach: bool) -> Option<(MoveTarget, f64)> {
        let alpha = self.assignment[item];
        let own = self.own_term(item);
        let x = self.item(item);
        let mut best: Option<(MoveTarget, f64)> = None;
        for beta in 0..self.sizes.len() {
            if beta == alpha || self.sizes[beta] == 0 {
                continue;
            }
            let gain = signed_dot(&self.signs, x, self.group_sum(beta)) - own;
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((MoveTarget::Group(beta), gain));
            }
        }
        if allow_detach && self.sizes[alpha] > 1 {
            let gain = -own;
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((MoveTarget::Empty, gain));
            }
        }
        best
    }

    /// Drops empty groups (keeping slot order) and recomputes the sums from
    /// the members, returning the largest drift seen.
    fn prune_and_revalidate(&mut self) -> f64 {
        let mut remap = vec![usize::MAX; self.sizes.len()];
        let mut next = 0;
        for (slot, &size) in self.sizes.iter().enumerate() {
            if size > 0 {
                remap[slot] = next;
                next += 1;
            }
        }
        for a in &mut self.assignment {
            *a = remap[*a];
        }
        let dim = self.dim;
        let mut fresh = vec![0.0; next * dim];
        let mut sizes = vec![0; next];
        for (i, &g) in self.assignment.iter().enumerate() {
            sizes[g] += 1;
            for c in 0..dim {
                fresh[g * dim + c] += self.items[i * dim + c];
            }
        }
        let mut drift = 0.0_f64;
        for (slot, &target) in remap.iter().enumerate() {
            if target != usize::MAX {
                for c in 0..dim {
                    drift = drift.max((self.sums[slot * dim + c] - fresh[target * dim + c]).abs());
                }
            }
        }
        self.sums = fresh;
        self.sizes = sizes;
        drift
    }

    /// Replaces the inputs by the group sum vectors (one item per group).
    fn aggregate(&mut self) {
        for m in &mut self.membership {
            *m = self.assignment[*m];
        }
        let groups = self.sizes.len();
        self.items = self.sums.clone();
        self.assignment = (0..groups).collect();
        self.sizes = vec![1; groups];
        self.level += 1;
    }

    /// Node-level partition implied by the current state.
    pub fn node_partition(&self) -> Partition {
        Partition::from_labels(self.membership.iter().map(|&item| self.assignment[item]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDiagnostics {
    pub level: usize,
    pub items: usize,
    pub sweeps: usize,
    pub moves: usize,
    /// Objective after each sweep (same scale as the returned objective).
    pub objective_trajectory: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub levels: Vec<LevelDiagnostics>,
    /// Whether the objective never decreased across sweeps and levels.
    pub monotone: bool,
    /// Largest discrepancy between tracked and recomputed group sums.
    pub max_sum_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VPOutcome {
    pub partition: Partition,
    pub objective: f64,
    pub diagnostics: Diagnostics,
}

fn squared_norm_total(emb: &Embedding) -> f64 {
    emb.coords().iter().map(|x| x * x).sum()
}

/// Runs the two-phase heuristic on `emb`.
pub fn partition_vectors(emb: &Embedding, cfg: &VPConfig) -> Result<VPOutcome, VpError> {
    cfg.validate()?;
    if emb.node_count() == 0 {
        return Err(VpError::EmptyInput);
    }
    let scale = squared_norm_total(emb);
    let threshold = cfg.gain_tolerance * scale;
    let report = emb.objective_scale();
    let mut rng = match cfg.sweep_order {
        SweepOrder::Natural => None,
        SweepOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };

    let mut state = VPState::new(emb);
    let mut levels = Vec::new();
    let mut monotone = true;
    let mut max_drift = 0.0_f64;
    let mut last = state.objective();

    loop {
        let items = state.item_count();
        let mut order: Vec<usize> = (0..items).collect();
        let mut diag = LevelDiagnostics {
            level: state.level(),
            items,
            sweeps: 0,
            moves: 0,
            objective_trajectory: Vec::new(),
        };
        loop {
            if let Some(rng) = rng.as_mut() {
                order.sort_unstable();
                order.shuffle(rng);
            }
            let mut moved = 0;
            for &i in &order {
                if let Some((target, gain)) = state.best_move(i, cfg.allow_detach) {
                    if gain > threshold {
                        state.apply_move(i, target);
                        moved += 1;
                    }
                }
            }
            max_drift = max_drift.max(state.prune_and_revalidate());
            let objective = state.objective();
            // round-off allowance well below the acceptance threshold
            if objective < last - 1e-13 * scale.max(f64::MIN_POSITIVE) {
                monotone = false;
            }
            last = objective;
            diag.sweeps += 1;
            diag.moves += moved;
            diag.objective_trajectory.push(objective * report);
            if moved == 0 {
                break;
            }
        }
        let merged = state.num_groups() < items;
        levels.push(diag);
        if !merged {
            break;
        }
        if state.level() + 1 >= cfg.max_levels {
            return Err(VpError::LevelCapExceeded {
                levels: cfg.max_levels,
            });
        }
        state.aggregate();
    }

    let partition = state.node_partition();
    let objective = stability(emb, &partition).expect("partition built from this embedding");
    Ok(VPOutcome {
        partition,
        objective,
        diagnostics: Diagnostics {
            levels,
            monotone,
            max_sum_drift: max_drift,
        },
    })
}

/// Global maximiser of `Σ_s q(y_s)` over all set partitions (n ≤ 10).
///
/// Near-ties (within `1e-12 · Σ_i ‖x_i‖²`) go to the partition with fewer
/// groups, then to the lexicographically smallest canonical labelling.
pub fn exhaustive_partition(emb: &Embedding) -> Result<(Partition, f64), VpError> {
    let n = emb.node_count();
    if n == 0 {
        return Err(VpError::EmptyInput);
    }
    if n > EXHAUSTIVE_MAX_NODES {
        return Err(VpError::TooLarge {
            n,
            max: EXHAUSTIVE_MAX_NODES,
        });
    }
    let mut search = Exhaustive {
        emb,
        tol: 1e-12 * squared_norm_total(emb),
        labels: vec![0; n],
        sums: vec![0.0; n * emb.dim()],
        best: None,
    };
    search.descend(0, 0);
    let (labels, _, value) = search.best.expect("at least one partition exists");
    Ok((
        Partition::from_labels(labels),
        value * emb.objective_scale(),
    ))
}

struct Exhaustive<'a> {
    emb: &'a Embedding,
    tol: f64,
    labels: Vec<usize>,
    sums: Vec<f64>,
    best: Option<(Vec<usize>, usize, f64)>,
}

impl Exhaustive<'_> {
    /// Restricted-growth enumeration: node `i` joins one of the `groups`
    /// open groups or opens a new one.
    fn descend(&mut self, i: usize, groups: usize) {
        let dim = self.emb.dim();
        if i == self.labels.len() {
            let value: f64 = self.sums[..groups * dim]
                .chunks_exact(dim)
                .map(|y| signed_dot(self.emb.signature(), y, y))
                .sum();
            let better = match &self.best {
                None => true,
                Some((_, best_groups, best_value)) => {
                    value > best_value + self.tol
                        || ((value - best_value).abs() <= self.tol && groups < *best_groups)
                }
            };
            if better {
                self.best = Some((self.labels.clone(), groups, value));
            }
            return;
        }
        for label in 0..=groups {
            self.labels[i] = label;
            for (acc, x) in self.sums[label * dim..(label + 1) * dim]
                .iter_mut()
                .zip(self.emb.vector(i))
            {
                *acc += x;
            }
            self.descend(i + 1, groups.max(label + 1));
            for (acc, x) in self.sums[label * dim..(label + 1) * dim]
                .iter_mut()
                .zip(self.emb.vector(i))
            {
                *acc -= x;
            }
        }
    }
}
