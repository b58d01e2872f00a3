//! Spectral bases of the transition and modularity matrices, and the
//! time-dependent node-vector embeddings built from them.
//!
//! For the transition matrix `M = D⁻¹A` the eigenproblem is solved on the
//! similar symmetric matrix `S = D^{-1/2} A D^{-1/2}`; eigenvectors are mapped
//! back with `v = √(2m) D^{-1/2} u`, which makes them Π-orthonormal.
//!
//! An embedding places node `i` at
//!
//! ```text
//! x_i = ( √|w_2| π_i v_{2,i}, …, √|w_{d+1}| π_i v_{d+1,i} )
//! ```
//!
//! with `w_k = exp(-t(1-λ_k))` (exponential), `w_k = 1 - t(1-λ_k)`
//! (linearised) and a per-component sign `σ_k = sign(w_k)`. The signed Gram
//! matrix `Σ_k σ_k x_{i,k} x_{j,k}` then reproduces the autocovariance
//! `B(t)` (respectively its linearisation) when all `n-1` directions are kept.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

/// Weights with magnitude below this are treated as zero and given σ = +1.
pub const ZERO_WEIGHT_TOL: f64 = 1e-12;

const EIGEN_MAX_ITER: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("node {node} has zero degree")]
    ZeroDegree { node: usize },
    #[error("symmetric eigensolver did not converge")]
    EigensolverFailure,
    #[error("embedding dimension {dim} outside 1..={max}")]
    DimOutOfRange { dim: usize, max: usize },
    #[error("{mode} embedding cannot be built from a {basis} basis")]
    ModeBasisMismatch {
        mode: EmbeddingMode,
        basis: BasisSource,
    },
    #[error("invalid time {t} for {mode} embedding")]
    InvalidTime { t: f64, mode: EmbeddingMode },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisSource {
    Transition,
    Modularity,
}

impl fmt::Display for BasisSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisSource::Transition => "transition",
            BasisSource::Modularity => "modularity",
        })
    }
}

impl FromStr for BasisSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "transition" => Ok(BasisSource::Transition),
            "modularity" => Ok(BasisSource::Modularity),
            other => Err(format!("unknown basis source {other:?}")),
        }
    }
}

/// Full eigensystem of either the transition matrix or the modularity matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralBasis {
    source: BasisSource,
    /// Descending.
    eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` pairs with `eigenvalues[k]`.
    eigenvectors: Vec<Vec<f64>>,
    pi: Vec<f64>,
    total_weight: f64,
    /// Index of the stationary / all-ones mode.
    trivial: usize,
}

impl SpectralBasis {
    pub fn source(&self) -> BasisSource {
        self.source
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.eigenvectors[k]
    }

    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    pub fn stationary(&self) -> &[f64] {
        &self.pi
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn node_count(&self) -> usize {
        self.pi.len()
    }

    /// Position of the trivial mode (constant vector) in eigenvalue order.
    pub fn trivial_index(&self) -> usize {
        self.trivial
    }

    /// Basis indices of the non-trivial directions, in eigenvalue order.
    pub fn nontrivial_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.eigenvalues.len()).filter(move |&k| k != self.trivial)
    }
}

fn symmetric_eigen(m: DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>, SpectralError> {
    SymmetricEigen::try_new(m, f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(SpectralError::EigensolverFailure)
}

/// Flips `v` so that its largest-magnitude entry is positive. Near-ties are
/// resolved toward the lowest index.
fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if max == 0.0 {
        return;
    }
    let lead = v
        .iter()
        .position(|x| x.abs() >= max * (1.0 - 1e-9))
        .expect("max is attained");
    if v[lead] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn sorted_pairs(eig: &SymmetricEigen<f64, nalgebra::Dyn>) -> Vec<(f64, DVector<f64>)> {
    let mut pairs: Vec<(f64, DVector<f64>)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&val, col)| (val, col.into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

/// Eigendecomposition of `M = D⁻¹A` with Π-orthonormal eigenvectors.
pub fn decompose_transition(g: &Graph) -> Result<SpectralBasis, SpectralError> {
    let degrees = g.degrees();
    if let Some(node) = degrees.iter().position(|&d| d.is_nan() || d <= 0.0) {
        return Err(SpectralError::ZeroDegree { node });
    }
    let n = g.node_count();
    let inv_sqrt: Vec<f64> = degrees.iter().map(|d| d.sqrt().recip()).collect();
    let mut s = DMatrix::zeros(n, n);
    for &(i, j, w) in g.edges() {
        let value = w * inv_sqrt[i] * inv_sqrt[j];
        s[(i, j)] = value;
        s[(j, i)] = value;
    }
    let eig = symmetric_eigen(s)?;
    let scale = (2.0 * g.total_weight()).sqrt();

    let (eigenvalues, eigenvectors) = sorted_pairs(&eig)
        .into_iter()
        .map(|(val, u)| {
            let mut v: Vec<f64> = u
                .iter()
                .zip(&inv_sqrt)
                .map(|(ui, r)| scale * r * ui)
                .collect();
            fix_sign(&mut v);
            (val, v)
        })
        .unzip();

    Ok(SpectralBasis {
        source: BasisSource::Transition,
        eigenvalues,
        eigenvectors,
        pi: g.stationary(),
        total_weight: g.total_weight(),
        trivial: 0,
    })
}

/// Eigendecomposition of `B_Q = A - d dᵀ/2m` with orthonormal eigenvectors.
///
/// The all-ones direction is split off exactly (it is always an eigenvector
/// with eigenvalue 0); the remaining spectrum is computed on its orthogonal
/// complement so that degenerate zero eigenvalues cannot mix with it.
pub fn decompose_modularity_matrix(g: &Graph) -> Result<SpectralBasis, SpectralError> {
    let n = g.node_count();
    let two_m = 2.0 * g.total_weight();
    let d = DVector::from_column_slice(g.degrees());
    let b = g.dense_adjacency() - (&d * d.transpose()) / two_m;

    // Householder reflector H with H e₁ = 1/√n; its other columns span 1^⊥.
    let ones = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut h = ones.clone();
    h[0] -= 1.0;
    let h_norm2 = h.norm_squared();
    let reflector = if h_norm2 > 0.0 {
        DMatrix::identity(n, n) - (&h * h.transpose()) * (2.0 / h_norm2)
    } else {
        DMatrix::identity(n, n)
    };
    let complement = reflector.columns(1, n - 1).into_owned();
    let reduced = complement.transpose() * &b * &complement;
    let eig = symmetric_eigen(reduced)?;

    let mut pairs: Vec<(f64, Vec<f64>)> = sorted_pairs(&eig)
        .into_iter()
        .map(|(val, w)| {
            let mut u: Vec<f64> = (&complement * w).iter().copied().collect();
            fix_sign(&mut u);
            (val, u)
        })
        .collect();
    let trivial = pairs.iter().take_while(|(val, _)| *val > 0.0).count();
    pairs.insert(trivial, (0.0, ones.iter().copied().collect()));
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();

    Ok(SpectralBasis {
        source: BasisSource::Modularity,
        eigenvalues,
        eigenvectors,
        pi: g.stationary(),
        total_weight: g.total_weight(),
        trivial,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingMode {
    /// Markov Stability: weights `exp(-t(1-λ))`, always Euclidean.
    Exponential,
    /// Linearised stability (Potts): weights `1 - t(1-λ)`, pseudo-Euclidean.
    Linearised,
    /// Modularity-matrix eigenvectors weighted by `√|β|`.
    Modularity,
    /// Vectors supplied directly through [`Embedding::from_vectors`].
    Explicit,
}

impl fmt::Display for EmbeddingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmbeddingMode::Exponential => "exponential",
            EmbeddingMode::Linearised => "linearised",
            EmbeddingMode::Modularity => "modularity",
            EmbeddingMode::Explicit => "explicit",
        })
    }
}

impl FromStr for EmbeddingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exponential" => Ok(EmbeddingMode::Exponential),
            "linearised" | "linearized" => Ok(EmbeddingMode::Linearised),
            "modularity" => Ok(EmbeddingMode::Modularity),
            other => Err(format!("unknown embedding mode {other:?}")),
        }
    }
}

/// Per-direction weights `λ_k(t)` or `μ_k(t)` in basis order.
pub fn scaled_eigenvalues(
    basis: &SpectralBasis,
    mode: EmbeddingMode,
    t: f64,
) -> Result<Vec<f64>, SpectralError> {
    let scale: fn(f64, f64) -> f64 = match mode {
        EmbeddingMode::Exponential => |lambda, t| (-t * (1.0 - lambda)).exp(),
        EmbeddingMode::Linearised => |lambda, t| 1.0 - t * (1.0 - lambda),
        EmbeddingMode::Modularity | EmbeddingMode::Explicit => {
            return Err(SpectralError::ModeBasisMismatch {
                mode,
                basis: basis.source,
            })
        }
    };
    if basis.source != BasisSource::Transition {
        return Err(SpectralError::ModeBasisMismatch {
            mode,
            basis: basis.source,
        });
    }
    Ok(basis.eigenvalues.iter().map(|&l| scale(l, t)).collect())
}

/// A set of `n` node vectors of length `dim` with a diagonal metric signature.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    mode: EmbeddingMode,
    time: Option<f64>,
    n: usize,
    dim: usize,
    /// Row-major `n × dim`.
    coords: Vec<f64>,
    /// ±1 per component, all +1 entries first.
    signs: Vec<f64>,
    /// Signed weight of each component (`λ_k(t)`, `μ_k(t)` or `β_k`).
    weights: Vec<f64>,
    /// Basis index each component was taken from.
    directions: Vec<usize>,
    objective_scale: f64,
}

impl Embedding {
    /// Wraps explicit vectors with a signature (entries must be ±1).
    ///
    /// # Panics
    /// If rows have unequal lengths or the signature length differs.
    pub fn from_vectors(vectors: &[Vec<f64>], signature: &[f64]) -> Self {
        let dim = signature.len();
        assert!(
            vectors.iter().all(|v| v.len() == dim),
            "every vector must have length {dim}"
        );
        assert!(signature.iter().all(|&s| s == 1.0 || s == -1.0));
        Self {
            mode: EmbeddingMode::Explicit,
            time: None,
            n: vectors.len(),
            dim,
            coords: vectors.concat(),
            signs: signature.to_vec(),
            weights: signature.to_vec(),
            directions: (0..dim).collect(),
            objective_scale: 1.0,
        }
    }

    pub fn mode(&self) -> EmbeddingMode {
        self.mode
    }

    pub fn time(&self) -> Option<f64> {
        self.time
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn signature(&self) -> &[f64] {
        &self.signs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn directions(&self) -> &[usize] {
        &self.directions
    }

    /// Number of +1 components.
    pub fn index_of_inertia(&self) -> usize {
        self.signs.iter().filter(|&&s| s > 0.0).count()
    }

    pub fn is_euclidean(&self) -> bool {
        self.signs.iter().all(|&s| s > 0.0)
    }

    /// Factor applied to `Σ_s q(y_s)` when reporting objective values
    /// (`1/2m` for modularity-matrix embeddings, 1 otherwise).
    pub fn objective_scale(&self) -> f64 {
        self.objective_scale
    }

    /// Signed Gram entry `⟨x_i, x_j⟩_σ`.
    pub fn gram(&self, i: usize, j: usize) -> f64 {
        signed_dot(&self.signs, self.vector(i), self.vector(j))
    }
}

#[inline]
pub(crate) fn signed_dot(signs: &[f64], a: &[f64], b: &[f64]) -> f64 {
    signs
        .iter()
        .zip(a.iter().zip(b))
        .map(|(s, (x, y))| s * x * y)
        .sum()
}

/// Builds node vectors from the leading `dim` non-trivial directions of `basis`.
///
/// `t` is the Markov time (exponential, `t ≥ 0`) or resolution (linearised,
/// `t > 0`) and is ignored in modularity mode.
pub fn build_embedding(
    basis: &SpectralBasis,
    mode: EmbeddingMode,
    t: f64,
    dim: usize,
) -> Result<Embedding, SpectralError> {
    let compatible = matches!(
        (mode, basis.source),
        (
            EmbeddingMode::Exponential | EmbeddingMode::Linearised,
            BasisSource::Transition
        ) | (EmbeddingMode::Modularity, BasisSource::Modularity)
    );
    if !compatible {
        return Err(SpectralError::ModeBasisMismatch {
            mode,
            basis: basis.source,
        });
    }
    let n = basis.node_count();
    let max = n.saturating_sub(1);
    if dim < 1 || dim > max {
        return Err(SpectralError::DimOutOfRange { dim, max });
    }
    let time_ok = match mode {
        EmbeddingMode::Exponential => t.is_finite() && t >= 0.0,
        EmbeddingMode::Linearised => t.is_finite() && t > 0.0,
        _ => true,
    };
    if !time_ok {
        return Err(SpectralError::InvalidTime { t, mode });
    }

    let all_weights = match mode {
        EmbeddingMode::Modularity => basis.eigenvalues.clone(),
        _ => scaled_eigenvalues(basis, mode, t)?,
    };
    let sign_of = |w: f64| {
        if w.abs() < ZERO_WEIGHT_TOL || w > 0.0 {
            1.0
        } else {
            -1.0
        }
    };

    let retained: Vec<usize> = basis.nontrivial_indices().take(dim).collect();
    let (mut directions, negative): (Vec<usize>, Vec<usize>) = retained
        .into_iter()
        .partition(|&k| sign_of(all_weights[k]) > 0.0);
    directions.extend(negative);

    let weights: Vec<f64> = directions.iter().map(|&k| all_weights[k]).collect();
    let signs: Vec<f64> = weights.iter().map(|&w| sign_of(w)).collect();
    let amplitudes: Vec<f64> = weights.iter().map(|w| w.abs().sqrt()).collect();

    let mut coords = vec![0.0; n * dim];
    for i in 0..n {
        let node_factor = match mode {
            EmbeddingMode::Modularity => 1.0,
            _ => basis.pi[i],
        };
        for (c, (&k, amp)) in directions.iter().zip(&amplitudes).enumerate() {
            coords[i * dim + c] = amp * node_factor * basis.eigenvectors[k][i];
        }
    }

    Ok(Embedding {
        mode,
        time: (mode != EmbeddingMode::Modularity).then_some(t),
        n,
        dim,
        coords,
        signs,
        weights,
        directions,
        objective_scale: match mode {
            EmbeddingMode::Modularity => 1.0 / (2.0 * basis.total_weight),
            _ => 1.0,
        },
    })
}
