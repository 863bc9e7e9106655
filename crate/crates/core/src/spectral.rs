//! Normalized adjacency, Laplacian spectrum and the closed-form minimizer of
//! the generalized spectral contrastive loss.
//!
//! For a regularization strength `σ > 0` the loss
//!
//! ```text
//! L_σ(f) = E_{(x,x⁺)}‖f(x) − f(x⁺)‖² + σ‖E_x[f(x)f(x)ᵀ] − I‖²_F
//! ```
//!
//! equals `σ‖F̃F̃ᵀ − M‖²_F + const` with `F̃ = D^{1/2}F` and
//! `M = Ā/σ + (1 − 1/σ)I`, so a minimizer is read off the top of the spectrum
//! of `M`. Since `M = I − L/σ`, these are the bottom eigenvectors of `L`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{PositivePairGraph, RestrictedGraph};
use crate::tol::EIGEN_GAP_TOL;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// `Ā[x,x'] = w(x,x') / sqrt(w(x) w(x'))`.
pub fn normalized_adjacency(graph: &PositivePairGraph) -> DMatrix<f64> {
    normalize(graph.weights(), graph.marginals())
}

/// `L = I − Ā`.
pub fn laplacian(graph: &PositivePairGraph) -> DMatrix<f64> {
    let n = graph.n();
    DMatrix::identity(n, n) - normalized_adjacency(graph)
}

/// Normalized adjacency of a restricted graph, using the restricted marginals.
pub fn restricted_normalized_adjacency(graph: &RestrictedGraph) -> DMatrix<f64> {
    normalize(graph.weights(), graph.marginals())
}

fn normalize(weights: &DMatrix<f64>, marginals: &DVector<f64>) -> DMatrix<f64> {
    let n = weights.nrows();
    DMatrix::from_fn(n, n, |i, j| weights[(i, j)] / (marginals[i] * marginals[j]).sqrt())
}

/// Eigendecomposition of a symmetric matrix with eigenvalues ascending and a
/// deterministic sign: the largest-magnitude entry of every eigenvector is
/// positive (lowest index wins ties).
pub fn symmetric_eigen_ascending(mat: DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = mat.nrows();
    let eig = mat
        .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::EigensolverFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).clone_owned();
        let mut pivot = 0;
        for j in 1..n {
            if v[j].abs() > v[pivot].abs() {
                pivot = j;
            }
        }
        if v[pivot] < 0.0 {
            v.neg_mut();
        }
        vectors.set_column(col, &v);
    }
    Ok((values, vectors))
}

/// Best rank-`k` PSD approximation in Frobenius norm: keep the `k` largest
/// eigenvalues, clamped at zero.
pub fn best_rank_k_psd(mat: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    let n = mat.nrows();
    if k > n {
        return Err(Error::InvalidArgument(format!("rank {k} exceeds dimension {n}")));
    }
    let (values, vectors) = symmetric_eigen_ascending(mat.clone())?;
    let mut out = DMatrix::zeros(n, n);
    for j in (n - k)..n {
        let s = values[j].max(0.0);
        if s > 0.0 {
            let v = vectors.column(j);
            out += s * v * v.transpose();
        }
    }
    Ok(out)
}

/// Full eigendecomposition of the Laplacian `L = I − Ā`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    /// Eigenvalues `λ_1 ≤ … ≤ λ_N`, zero-based storage.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// `λ_j` with the one-based indexing used in the bounds (`lambda(1) ≈ 0`).
    pub fn lambda(&self, j: usize) -> f64 {
        assert!(j >= 1 && j <= self.eigenvalues.len(), "lambda index {j} out of range");
        self.eigenvalues[j - 1]
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// True when `λ_k` and `λ_{k+1}` coincide, so the rank-`k` cut is not unique.
    pub fn is_degenerate_cut(&self, k: usize) -> bool {
        k >= 1 && k < self.n() && (self.lambda(k + 1) - self.lambda(k)).abs() <= EIGEN_GAP_TOL
    }
}

pub fn decompose(graph: &PositivePairGraph) -> Result<SpectralDecomposition> {
    let (eigenvalues, eigenvectors) = symmetric_eigen_ascending(laplacian(graph))?;
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Second-smallest Laplacian eigenvalue of a restricted graph, normalized by
/// its restricted marginals. A single-vertex restriction has no second
/// eigenvalue and yields `None`.
pub fn restricted_spectral_gap(graph: &RestrictedGraph) -> Result<Option<f64>> {
    let m = graph.len();
    if m < 2 {
        return Ok(None);
    }
    let lap = DMatrix::identity(m, m) - restricted_normalized_adjacency(graph);
    let (values, _) = symmetric_eigen_ascending(lap)?;
    Ok(Some(values[1]))
}

/// An embedding `f` of every vertex into `ℝ^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    features: DMatrix<f64>,
    weighted: DMatrix<f64>,
    sigma: Option<f64>,
    degenerate_cut: bool,
}

impl Representation {
    /// Wraps an arbitrary feature matrix (row `x` is `f(x)`).
    pub fn from_features(graph: &PositivePairGraph, features: DMatrix<f64>) -> Result<Self> {
        if features.nrows() != graph.n() {
            return Err(Error::DimensionMismatch {
                expected: graph.n(),
                found: features.nrows(),
            });
        }
        let weighted = weight_rows(graph, &features);
        Ok(Representation {
            features,
            weighted,
            sigma: None,
            degenerate_cut: false,
        })
    }

    /// Exact minimizer of `L_σ` built from a precomputed decomposition:
    /// `F = D^{-1/2} V_k diag(max(1 − λ_i/σ, 0))^{1/2}`.
    pub fn from_decomposition(
        graph: &PositivePairGraph,
        decomposition: &SpectralDecomposition,
        k: usize,
        sigma: f64,
    ) -> Result<Self> {
        let n = graph.n();
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!("k must lie in [1, {n}], got {k}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
        }
        if decomposition.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: decomposition.n(),
            });
        }
        let mut weighted = DMatrix::zeros(n, k);
        for j in 0..k {
            let s = (1.0 - decomposition.eigenvalues[j] / sigma).max(0.0);
            let scaled = decomposition.eigenvectors.column(j) * s.sqrt();
            weighted.set_column(j, &scaled);
        }
        let features = DMatrix::from_fn(n, k, |x, j| weighted[(x, j)] / graph.marginal(x).sqrt());
        Ok(Representation {
            features,
            weighted,
            sigma: Some(sigma),
            degenerate_cut: decomposition.is_degenerate_cut(k),
        })
    }

    pub fn k(&self) -> usize {
        self.features.ncols()
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    /// `F`, row `x` equal to `f(x)`.
    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    /// `F̃ = D^{1/2} F`.
    pub fn weighted(&self) -> &DMatrix<f64> {
        &self.weighted
    }

    pub fn feature(&self, x: usize) -> DVector<f64> {
        self.features.row(x).transpose()
    }

    /// Regularization strength for closed-form minimizers; `None` for
    /// representations supplied from outside.
    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    /// Set when `λ_k ≈ λ_{k+1}`; the eigensolver order then picked the basis.
    pub fn degenerate_cut(&self) -> bool {
        self.degenerate_cut
    }

    /// `F·Q` for a `k×k` matrix `Q`.
    pub fn transformed(&self, graph: &PositivePairGraph, q: &DMatrix<f64>) -> Result<Self> {
        if q.nrows() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                found: q.nrows(),
            });
        }
        let mut out = Representation::from_features(graph, &self.features * q)?;
        out.sigma = self.sigma;
        out.degenerate_cut = self.degenerate_cut;
        Ok(out)
    }
}

fn weight_rows(graph: &PositivePairGraph, features: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(features.nrows(), features.ncols(), |x, j| {
        features[(x, j)] * graph.marginal(x).sqrt()
    })
}

/// Closed-form minimizer of `L_σ` in dimension `k`.
pub fn minimize_loss(graph: &PositivePairGraph, k: usize, sigma: f64) -> Result<Representation> {
    if k == 0 || k > graph.n() {
        return Err(Error::InvalidArgument(format!(
            "k must lie in [1, {}], got {k}",
            graph.n()
        )));
    }
    let decomposition = decompose(graph)?;
    Representation::from_decomposition(graph, &decomposition, k, sigma)
}

fn check_rows(graph: &PositivePairGraph, features: &DMatrix<f64>) -> Result<()> {
    if features.nrows() != graph.n() {
        return Err(Error::DimensionMismatch {
            expected: graph.n(),
            found: features.nrows(),
        });
    }
    Ok(())
}

/// `Σ = E_{x∼P_X}[f(x)f(x)ᵀ] = F̃ᵀF̃`.
pub fn feature_covariance(graph: &PositivePairGraph, features: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_rows(graph, features)?;
    let k = features.ncols();
    let mut cov = DMatrix::zeros(k, k);
    for x in 0..graph.n() {
        let f = features.row(x);
        cov += graph.marginal(x) * f.transpose() * f;
    }
    Ok(cov)
}

/// `L_σ(f)`, evaluated as exact finite sums over the graph.
pub fn generalized_loss(graph: &PositivePairGraph, features: &DMatrix<f64>, sigma: f64) -> Result<f64> {
    check_rows(graph, features)?;
    let n = graph.n();
    let mut alignment = 0.0;
    for x in 0..n {
        for y in 0..n {
            let w = graph.weight(x, y);
            if w != 0.0 {
                alignment += w * (features.row(x) - features.row(y)).norm_squared();
            }
        }
    }
    let k = features.ncols();
    let cov = feature_covariance(graph, features)?;
    let reg = (cov - DMatrix::<f64>::identity(k, k)).norm_squared();
    Ok(alignment + sigma * reg)
}

/// `L_scl(f) = −2·E_{(x,x⁺)}[f(x)ᵀf(x⁺)] + E_{x,x'∼P_X}[(f(x)ᵀf(x'))²]`.
pub fn spectral_contrastive_loss(graph: &PositivePairGraph, features: &DMatrix<f64>) -> Result<f64> {
    check_rows(graph, features)?;
    let n = graph.n();
    let gram = features * features.transpose();
    let mut positive = 0.0;
    let mut negative = 0.0;
    for x in 0..n {
        let wx = graph.marginal(x);
        for y in 0..n {
            let g = gram[(x, y)];
            positive += graph.weight(x, y) * g;
            negative += wx * graph.marginal(y) * g * g;
        }
    }
    Ok(-2.0 * positive + negative)
}
