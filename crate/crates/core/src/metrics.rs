//! Partition comparison: NMI, uncertainty coefficient, variation of
//! information and Sankey flows. All entropies use natural logarithms, so
//! VI is reported in nats.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::Partition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("partitions cover {left} and {right} nodes")]
    SizeMismatch { left: usize, right: usize },
}

/// Joint group counts of two partitions of the same node set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contingency {
    /// `counts[u * cols + v]`.
    counts: Vec<usize>,
    rows: usize,
    cols: usize,
    row_totals: Vec<usize>,
    col_totals: Vec<usize>,
    n: usize,
}

impl Contingency {
    pub fn new(left: &Partition, right: &Partition) -> Result<Self, MetricsError> {
        if left.len() != right.len() {
            return Err(MetricsError::SizeMismatch {
                left: left.len(),
                right: right.len(),
            });
        }
        let (rows, cols) = (left.num_groups(), right.num_groups());
        let mut counts = vec![0; rows * cols];
        for (&u, &v) in left.labels().iter().zip(right.labels()) {
            counts[u * cols + v] += 1;
        }
        Ok(Self {
            counts,
            rows,
            cols,
            row_totals: left.group_sizes(),
            col_totals: right.group_sizes(),
            n: left.len(),
        })
    }

    pub fn count(&self, u: usize, v: usize) -> usize {
        self.counts[u * self.cols + v]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row_totals(&self) -> &[usize] {
        &self.row_totals
    }

    pub fn col_totals(&self) -> &[usize] {
        &self.col_totals
    }

    pub fn total(&self) -> usize {
        self.n
    }

    fn entropy_of(&self, totals: &[usize]) -> f64 {
        let n = self.n as f64;
        totals
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    }

    pub fn row_entropy(&self) -> f64 {
        self.entropy_of(&self.row_totals)
    }

    pub fn col_entropy(&self) -> f64 {
        self.entropy_of(&self.col_totals)
    }

    pub fn joint_entropy(&self) -> f64 {
        self.entropy_of(&self.counts)
    }

    pub fn mutual_information(&self) -> f64 {
        let n = self.n as f64;
        let mut mi = 0.0;
        for u in 0..self.rows {
            for v in 0..self.cols {
                let c = self.count(u, v);
                if c > 0 {
                    let c = c as f64;
                    let expected = self.row_totals[u] as f64 * self.col_totals[v] as f64;
                    mi += c / n * (c * n / expected).ln();
                }
            }
        }
        // tiny negative values come from round-off only
        mi.max(0.0)
    }
}

/// `I(p1; p2) / √(H(p1) H(p2))`. Two single-group partitions score 1; if
/// exactly one side has zero entropy the score is 0.
pub fn nmi(p1: &Partition, p2: &Partition) -> Result<f64, MetricsError> {
    let table = Contingency::new(p1, p2)?;
    let (h1, h2) = (table.row_entropy(), table.col_entropy());
    Ok(match (h1 > 0.0, h2 > 0.0) {
        (false, false) => 1.0,
        (true, true) => (table.mutual_information() / (h1 * h2).sqrt()).clamp(0.0, 1.0),
        _ => 0.0,
    })
}

/// `I(truth; computed) / H(computed)`: the share of the computed partition's
/// information that is explained by the ground truth. Equals 1 when the
/// computed groups are unions of truth groups.
///
/// If `computed` has a single group the value is 1 when `truth` does too and
/// 0 otherwise.
pub fn uncertainty_coefficient(
    truth: &Partition,
    computed: &Partition,
) -> Result<f64, MetricsError> {
    let table = Contingency::new(truth, computed)?;
    let h_computed = table.col_entropy();
    if h_computed <= 0.0 {
        return Ok(if table.row_entropy() <= 0.0 { 1.0 } else { 0.0 });
    }
    Ok((table.mutual_information() / h_computed).clamp(0.0, 1.0))
}

/// `H(p1|p2) + H(p2|p1)` in nats.
pub fn variation_of_information(p1: &Partition, p2: &Partition) -> Result<f64, MetricsError> {
    let table = Contingency::new(p1, p2)?;
    let joint = table.joint_entropy();
    let vi = 2.0 * joint - table.row_entropy() - table.col_entropy();
    Ok(vi.max(0.0))
}

/// One flow of a Sankey diagram between two partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SankeyLink {
    pub from: usize,
    pub to: usize,
    pub count: usize,
}

/// Non-zero contingency cells, sorted by `(from, to)`.
pub fn sankey_links(p1: &Partition, p2: &Partition) -> Result<Vec<SankeyLink>, MetricsError> {
    let table = Contingency::new(p1, p2)?;
    let (rows, cols) = table.shape();
    Ok((0..rows)
        .flat_map(|u| (0..cols).map(move |v| (u, v)))
        .filter_map(|(u, v)| {
            let count = table.count(u, v);
            (count > 0).then_some(SankeyLink {
                from: u,
                to: v,
                count,
            })
        })
        .collect())
}
