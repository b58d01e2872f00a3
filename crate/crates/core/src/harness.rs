//! Experiment orchestration: Markov-time scans, dimensionality sweeps and
//! transition-vs-modularity embedding comparisons.
//!
//! Every entry point decomposes the graph once and shares the basis across
//! work items. Work items run in parallel; results come back in input order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::graph::Graph;
use crate::metrics::{nmi, uncertainty_coefficient, variation_of_information};
use crate::objective::modularity_score;
use crate::partition::Partition;
use crate::spectral::{
    build_embedding, decompose_modularity_matrix, decompose_transition, Embedding, EmbeddingMode,
    SpectralBasis,
};
use crate::vp::{partition_vectors, SweepOrder, VPConfig, VPOutcome};

/// Log-spaced grid of Markov times (or resolutions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, n_points: usize) -> Result<Self, Error> {
        if !(t_min > 0.0 && t_min.is_finite() && t_max.is_finite() && t_min <= t_max) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < t_min <= t_max, got [{t_min}, {t_max}]"
            )));
        }
        if n_points == 0 {
            return Err(Error::InvalidGrid("need at least one grid point".into()));
        }
        Ok(Self {
            t_min,
            t_max,
            n_points,
        })
    }

    /// Grid values; a single point sits at `t_min`, endpoints are exact.
    pub fn points(&self) -> Vec<f64> {
        if self.n_points == 1 {
            return vec![self.t_min];
        }
        let (lo, hi) = (self.t_min.ln(), self.t_max.ln());
        let last = self.n_points - 1;
        (0..self.n_points)
            .map(|k| match k {
                0 => self.t_min,
                k if k == last => self.t_max,
                k => (lo + (hi - lo) * k as f64 / last as f64).exp(),
            })
            .collect()
    }
}

/// Restart budget: run 0 uses the configured sweep order, runs `1..count`
/// use shuffled orders seeded with `seed + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restarts {
    pub count: usize,
    pub seed: u64,
}

impl Default for Restarts {
    fn default() -> Self {
        Self { count: 5, seed: 0 }
    }
}

/// Best outcome over the restart budget; ties keep the earliest run.
pub fn best_of_restarts(
    emb: &Embedding,
    cfg: &VPConfig,
    restarts: Restarts,
) -> Result<VPOutcome, Error> {
    let mut best = partition_vectors(emb, cfg)?;
    for k in 1..restarts.count {
        let shuffled = VPConfig {
            sweep_order: SweepOrder::Shuffled(restarts.seed.wrapping_add(k as u64)),
            ..*cfg
        };
        let run = partition_vectors(emb, &shuffled)?;
        if run.objective > best.objective {
            best = run;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    /// Markov time or resolution; absent for modularity-matrix embeddings.
    pub time: Option<f64>,
    pub mode: EmbeddingMode,
    pub dim: usize,
    pub partition: Partition,
    pub objective: f64,
    pub num_communities: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nmi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vi_prev: Option<f64>,
}

fn record(
    emb: &Embedding,
    outcome: VPOutcome,
    truth: Option<&Partition>,
) -> Result<ScanRecord, Error> {
    let (nmi_value, uncertainty) = match truth {
        Some(truth) => (
            Some(nmi(truth, &outcome.partition)?),
            Some(uncertainty_coefficient(truth, &outcome.partition)?),
        ),
        None => (None, None),
    };
    Ok(ScanRecord {
        time: emb.time(),
        mode: emb.mode(),
        dim: emb.dim(),
        num_communities: outcome.partition.num_groups(),
        partition: outcome.partition,
        objective: outcome.objective,
        nmi: nmi_value,
        uncertainty,
        vi_prev: None,
    })
}

fn basis_for(g: &Graph, mode: EmbeddingMode) -> Result<SpectralBasis, Error> {
    Ok(match mode {
        EmbeddingMode::Modularity => decompose_modularity_matrix(g)?,
        _ => decompose_transition(g)?,
    })
}

/// Optimises the partition at every grid point (exponential or linearised).
///
/// `vi_prev` is the variation of information to the preceding grid point.
pub fn time_scan(
    g: &Graph,
    grid: &TimeGrid,
    mode: EmbeddingMode,
    dim: usize,
    cfg: &VPConfig,
    restarts: Restarts,
    truth: Option<&Partition>,
) -> Result<Vec<ScanRecord>, Error> {
    if !matches!(mode, EmbeddingMode::Exponential | EmbeddingMode::Linearised) {
        return Err(Error::InvalidGrid(format!(
            "time scans need an exponential or linearised mode, got {mode}"
        )));
    }
    let basis = decompose_transition(g)?;
    let mut records = grid
        .points()
        .into_par_iter()
        .map(|t| {
            let emb = build_embedding(&basis, mode, t, dim)?;
            let outcome = best_of_restarts(&emb, cfg, restarts)?;
            record(&emb, outcome, truth)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    for k in 1..records.len() {
        let vi = variation_of_information(&records[k - 1].partition, &records[k].partition)?;
        records[k].vi_prev = Some(vi);
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimSweepRow {
    pub dim: usize,
    pub nmi: f64,
    pub uncertainty: f64,
    pub num_communities: usize,
    pub objective: f64,
    pub partition: Partition,
}

/// Partition quality against `truth` as a function of embedding dimension.
pub fn dim_sweep(
    g: &Graph,
    truth: &Partition,
    t: f64,
    mode: EmbeddingMode,
    dims: &[usize],
    cfg: &VPConfig,
    restarts: Restarts,
) -> Result<Vec<DimSweepRow>, Error> {
    let basis = basis_for(g, mode)?;
    dims.par_iter()
        .map(|&dim| {
            let emb = build_embedding(&basis, mode, t, dim)?;
            let outcome = best_of_restarts(&emb, cfg, restarts)?;
            Ok(DimSweepRow {
                dim,
                nmi: nmi(truth, &outcome.partition)?,
                uncertainty: uncertainty_coefficient(truth, &outcome.partition)?,
                num_communities: outcome.partition.num_groups(),
                objective: outcome.objective,
                partition: outcome.partition,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceResult {
    pub modularity: f64,
    pub num_communities: usize,
    pub uncertainty: f64,
    pub partition: Partition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub dim: usize,
    /// Linearised transition-matrix embedding at resolution 1.
    pub transition: SourceResult,
    pub modularity_matrix: SourceResult,
}

/// Modularity maximisation from transition-matrix and modularity-matrix
/// embeddings of equal dimension, with the same optimiser.
pub fn embedding_comparison(
    g: &Graph,
    truth: &Partition,
    dims: &[usize],
    cfg: &VPConfig,
    restarts: Restarts,
) -> Result<Vec<ComparisonRow>, Error> {
    let transition = decompose_transition(g)?;
    let modularity = decompose_modularity_matrix(g)?;
    let evaluate = |emb: Embedding| -> Result<SourceResult, Error> {
        let outcome = best_of_restarts(&emb, cfg, restarts)?;
        Ok(SourceResult {
            modularity: modularity_score(g, &outcome.partition)?,
            num_communities: outcome.partition.num_groups(),
            uncertainty: uncertainty_coefficient(truth, &outcome.partition)?,
            partition: outcome.partition,
        })
    };
    dims.par_iter()
        .map(|&dim| {
            Ok(ComparisonRow {
                dim,
                transition: evaluate(build_embedding(
                    &transition,
                    EmbeddingMode::Linearised,
                    1.0,
                    dim,
                )?)?,
                modularity_matrix: evaluate(build_embedding(
                    &modularity,
                    EmbeddingMode::Modularity,
                    1.0,
                    dim,
                )?)?,
            })
        })
        .collect()
}
