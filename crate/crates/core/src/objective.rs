//! Partition quality functions.
//!
//! Each objective has two independent routes: a direct matrix form computed
//! from the graph alone, and the vector form `Σ_s q(y_s)` evaluated on an
//! embedding. The direct forms serve as oracles for the vector forms.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::graph::Graph;
use crate::partition::Partition;
use crate::spectral::{signed_dot, Embedding};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObjectiveError {
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("k-means objective requires a Euclidean (all-positive signature) embedding")]
    NonEuclideanEmbedding,
}

fn check_len(expected: usize, found: usize) -> Result<(), ObjectiveError> {
    if expected == found {
        Ok(())
    } else {
        Err(ObjectiveError::SizeMismatch { expected, found })
    }
}

/// `exp(a)` by scaling and squaring with a truncated Taylor series.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2, where a
/// Taylor series converges to machine precision in under 20 terms.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = a
        .column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);

    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        result += &term;
        let term_norm = term.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if term_norm < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `B(t) = Π exp(-t(I - M)) - πᵀπ` by direct matrix exponential.
pub fn autocovariance_direct(g: &Graph, t: f64) -> DMatrix<f64> {
    let n = g.node_count();
    let pi = g.stationary();
    let mut generator = DMatrix::zeros(n, n);
    for i in 0..n {
        generator[(i, i)] = -t;
    }
    for &(i, j, w) in g.edges() {
        generator[(i, j)] += t * w / g.degrees()[i];
        generator[(j, i)] += t * w / g.degrees()[j];
    }
    let p = expm(&generator);
    DMatrix::from_fn(n, n, |i, j| pi[i] * p[(i, j)] - pi[i] * pi[j])
}

/// `Σ_s Σ_{i,j∈g_s} K_ij` for any square matrix `K`.
pub fn within_group_sum(kernel: &DMatrix<f64>, p: &Partition) -> Result<f64, ObjectiveError> {
    check_len(kernel.nrows(), p.len())?;
    let mut total = 0.0;
    for members in p.groups() {
        for &i in &members {
            for &j in &members {
                total += kernel[(i, j)];
            }
        }
    }
    Ok(total)
}

/// Per-group sum vectors `y_s`, row-major `c × dim`.
pub fn group_sums(emb: &Embedding, p: &Partition) -> Result<Vec<f64>, ObjectiveError> {
    check_len(emb.node_count(), p.len())?;
    let dim = emb.dim();
    let mut sums = vec![0.0; p.num_groups() * dim];
    for (i, &label) in p.labels().iter().enumerate() {
        let y = &mut sums[label * dim..(label + 1) * dim];
        for (acc, x) in y.iter_mut().zip(emb.vector(i)) {
            *acc += x;
        }
    }
    Ok(sums)
}

/// `Σ_s q(y_s)` with `q` the signature form, scaled by the embedding's
/// objective scale. For a full-dimension exponential embedding this is the
/// Markov Stability `r(t, g)`.
pub fn stability(emb: &Embedding, p: &Partition) -> Result<f64, ObjectiveError> {
    let sums = group_sums(emb, p)?;
    let dim = emb.dim();
    let total: f64 = sums
        .chunks_exact(dim.max(1))
        .map(|y| signed_dot(emb.signature(), y, y))
        .sum();
    Ok(total * emb.objective_scale())
}

/// Per-group `(Σ_{i,j∈g_s} A_ij, Σ_{i∈g_s} d_i)`.
fn internal_and_volume(g: &Graph, p: &Partition) -> (Vec<f64>, Vec<f64>) {
    let mut internal = vec![0.0; p.num_groups()];
    let mut volume = vec![0.0; p.num_groups()];
    for (i, &d) in g.degrees().iter().enumerate() {
        volume[p.label(i)] += d;
    }
    for &(i, j, w) in g.edges() {
        if p.label(i) == p.label(j) {
            internal[p.label(i)] += 2.0 * w;
        }
    }
    (internal, volume)
}

/// Newman–Girvan modularity, computed from `A`, `d` and `m` only.
pub fn modularity_score(g: &Graph, p: &Partition) -> Result<f64, ObjectiveError> {
    check_len(g.node_count(), p.len())?;
    let two_m = 2.0 * g.total_weight();
    let (internal, volume) = internal_and_volume(g, p);
    let total: f64 = internal
        .iter()
        .zip(&volume)
        .map(|(a, d)| a - d * d / two_m)
        .sum();
    Ok(total / two_m)
}

/// Linearised stability `Σ_s Σ_{i,j∈g_s} B_lin(t)_ij` with
/// `B_lin(t) = Π[(1-t)I + tM] - πᵀπ`, computed from `A`, `d` and `m` only.
pub fn linearised_stability(g: &Graph, p: &Partition, t: f64) -> Result<f64, ObjectiveError> {
    check_len(g.node_count(), p.len())?;
    let two_m = 2.0 * g.total_weight();
    let (internal, volume) = internal_and_volume(g, p);
    Ok(internal
        .iter()
        .zip(&volume)
        .map(|(a, d)| {
            let mass = d / two_m;
            (1.0 - t) * mass + t * a / two_m - mass * mass
        })
        .sum())
}

/// Both sides of the k-means identity for a partition of a Euclidean embedding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansScore {
    /// `Σ_s Σ_{i∈g_s} ‖x_i - x̄_s‖²`, what k-means minimises.
    pub distortion: f64,
    /// `F = Σ_s ‖y_s‖² / |g_s|`, the size-normalised max-sum objective.
    pub normalised: f64,
}

pub fn kmeans_objective(emb: &Embedding, p: &Partition) -> Result<KMeansScore, ObjectiveError> {
    if !emb.is_euclidean() {
        return Err(ObjectiveError::NonEuclideanEmbedding);
    }
    let sums = group_sums(emb, p)?;
    let sizes = p.group_sizes();
    let dim = emb.dim();

    let normalised = sums
        .chunks_exact(dim)
        .zip(&sizes)
        .map(|(y, &size)| y.iter().map(|v| v * v).sum::<f64>() / size as f64)
        .sum();

    let mut distortion = 0.0;
    for (i, &label) in p.labels().iter().enumerate() {
        let y = &sums[label * dim..(label + 1) * dim];
        let size = sizes[label] as f64;
        distortion += emb
            .vector(i)
            .iter()
            .zip(y)
            .map(|(x, s)| (x - s / size).powi(2))
            .sum::<f64>();
    }
    Ok(KMeansScore {
        distortion,
        normalised,
    })
}

/// `Σ_k σ_k a_k b_k` under the embedding's signature.
pub fn signed_inner(emb: &Embedding, a: &[f64], b: &[f64]) -> Result<f64, ObjectiveError> {
    check_len(emb.dim(), a.len())?;
    check_len(emb.dim(), b.len())?;
    Ok(signed_dot(emb.signature(), a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{load_edge_list, pair_graph, IndexBase};
    use crate::spectral::{build_embedding, decompose_transition, EmbeddingMode};

    fn parse(text: &str) -> Graph {
        load_edge_list(text.as_bytes(), IndexBase::Zero).unwrap()
    }

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    #[test]
    fn expm_of_diagonal_and_nilpotent() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-3.0, 0.5, 12.0]));
        let e = expm(&d);
        for (k, x) in [-3.0_f64, 0.5, 12.0].iter().enumerate() {
            assert!((e[(k, k)] - x.exp()).abs() <= 1e-12 * x.exp());
        }
        // exp([[0,1],[0,0]]) = [[1,1],[0,1]]
        let n = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let e = expm(&n);
        assert!(max_abs(&(e - DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]))) < 1e-15);
    }

    #[test]
    fn autocovariance_at_zero_and_row_sums() {
        let g = parse("0 1 2\n1 2 1\n2 3 3\n3 0 1\n0 2 0.5");
        let pi = g.stationary();
        let b0 = autocovariance_direct(&g, 0.0);
        let expect = DMatrix::from_fn(4, 4, |i, j| {
            let diag = if i == j { pi[i] } else { 0.0 };
            diag - pi[i] * pi[j]
        });
        assert!(max_abs(&(&b0 - expect)) < 1e-15);
        for t in [0.1, 1.0, 4.0, 30.0] {
            let b = autocovariance_direct(&g, t);
            for row in b.row_iter() {
                assert!(row.sum().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn autocovariance_matches_spectral_reconstruction_on_pair_graph() {
        let g = pair_graph();
        let basis = decompose_transition(&g).unwrap();
        let t = 1.0;
        let pi = basis.stationary();
        let mut recon = DMatrix::zeros(4, 4);
        for k in 1..4 {
            let w = (-t * (1.0 - basis.eigenvalues()[k])).exp();
            let v = basis.eigenvector(k);
            for i in 0..4 {
                for j in 0..4 {
                    recon[(i, j)] += w * pi[i] * v[i] * pi[j] * v[j];
                }
            }
        }
        assert!(max_abs(&(autocovariance_direct(&g, t) - recon)) < 1e-10);
    }

    #[test]
    fn stability_examples() {
        let g = pair_graph();
        let basis = decompose_transition(&g).unwrap();
        for mode in [EmbeddingMode::Exponential, EmbeddingMode::Linearised] {
            let emb = build_embedding(&basis, mode, 2.0, 3).unwrap();
            assert!(stability(&emb, &Partition::all_in_one(4)).unwrap().abs() < 1e-10);
        }
        let emb = build_embedding(&basis, EmbeddingMode::Exponential, 5.0, 3).unwrap();
        let pairs = Partition::from_labels([0, 0, 1, 1]);
        let r = stability(&emb, &pairs).unwrap();
        assert!((r - (-5.0_f64 / 3.0).exp() / 2.0).abs() < 1e-12);
        let direct = within_group_sum(&autocovariance_direct(&g, 5.0), &pairs).unwrap();
        assert!((r - direct).abs() < 1e-10);

        let singles = stability(&emb, &Partition::singletons(4)).unwrap();
        assert!((singles - autocovariance_direct(&g, 5.0).trace()).abs() < 1e-8);
    }

    #[test]
    fn modularity_examples() {
        let g = pair_graph();
        assert!(
            modularity_score(&g, &Partition::all_in_one(4))
                .unwrap()
                .abs()
                < 1e-15
        );
        let q = modularity_score(&g, &Partition::from_labels([0, 0, 1, 1])).unwrap();
        assert!((q - 1.0 / 3.0).abs() < 1e-15);

        let bridged = parse("0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n2 3");
        let p = Partition::from_labels([0, 0, 0, 1, 1, 1]);
        // Definition, term by term over all ordered pairs in each community.
        let two_m = 14.0;
        let d = bridged.degrees();
        let mut expect = 0.0;
        for s in p.groups() {
            for &i in &s {
                for &j in &s {
                    expect += bridged.weight(i, j) - d[i] * d[j] / two_m;
                }
            }
        }
        expect /= two_m;
        let q = modularity_score(&bridged, &p).unwrap();
        assert!((q - expect).abs() < 1e-14);
        assert!((q - 5.0 / 14.0).abs() < 1e-14);
    }

    #[test]
    fn linearised_stability_examples() {
        let g = pair_graph();
        let p = Partition::from_labels([0, 0, 1, 1]);
        let lin1 = linearised_stability(&g, &p, 1.0).unwrap();
        assert!((lin1 - modularity_score(&g, &p).unwrap()).abs() < 1e-12);
        for t in [0.2, 1.0, 3.0] {
            assert!(
                linearised_stability(&g, &Partition::all_in_one(4), t)
                    .unwrap()
                    .abs()
                    < 1e-14
            );
        }
        let basis = decompose_transition(&g).unwrap();
        let emb = build_embedding(&basis, EmbeddingMode::Linearised, 2.0, 3).unwrap();
        let via_vectors = stability(&emb, &p).unwrap();
        assert!((via_vectors - linearised_stability(&g, &p, 2.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn kmeans_examples() {
        let g = parse("0 1 2\n1 2 1\n2 3 3\n3 0 1\n0 2 0.5\n3 4 1");
        let basis = decompose_transition(&g).unwrap();
        let emb = build_embedding(&basis, EmbeddingMode::Exponential, 1.5, 4).unwrap();
        let norms: f64 = (0..5).map(|i| emb.gram(i, i)).sum();

        let s = kmeans_objective(&emb, &Partition::singletons(5)).unwrap();
        assert!(s.distortion.abs() < 1e-15);
        assert!((s.normalised - norms).abs() < 1e-12);

        let s = kmeans_objective(&emb, &Partition::all_in_one(5)).unwrap();
        assert!(s.normalised.abs() < 1e-12);
        assert!((s.distortion - norms).abs() < 1e-12);

        let lin = build_embedding(&basis, EmbeddingMode::Linearised, 1.0, 4).unwrap();
        assert_eq!(
            kmeans_objective(&lin, &Partition::singletons(5)),
            Err(ObjectiveError::NonEuclideanEmbedding)
        );
    }

    #[test]
    fn signed_inner_examples() {
        let e = Embedding::from_vectors(&[vec![1.0, 0.0]], &[1.0, 1.0]);
        assert_eq!(signed_inner(&e, &[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        let e = Embedding::from_vectors(&[vec![1.0, 0.0]], &[1.0, -1.0]);
        assert_eq!(signed_inner(&e, &[1.0, 1.0], &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(
            signed_inner(&e, &[1.0], &[1.0, 1.0]),
            Err(ObjectiveError::SizeMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn size_mismatch_reported() {
        let g = pair_graph();
        let p = Partition::singletons(3);
        assert!(matches!(
            modularity_score(&g, &p),
            Err(ObjectiveError::SizeMismatch { .. })
        ));
        assert!(matches!(
            linearised_stability(&g, &p, 1.0),
            Err(ObjectiveError::SizeMismatch { .. })
        ));
        let emb = build_embedding(
            &decompose_transition(&g).unwrap(),
            EmbeddingMode::Exponential,
            1.0,
            3,
        )
        .unwrap();
        assert!(matches!(
            stability(&emb, &p),
            Err(ObjectiveError::SizeMismatch { .. })
        ));
    }
}
