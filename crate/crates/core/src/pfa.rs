//! Preconditioned feature averaging and the constructive linear probe.
//!
//! The head of power `t` predicts
//!
//! ```text
//! g_t(x) = argmax_i ⟨f(x), Σ^{t−1} b_i⟩
//! ```
//!
//! with `Σ = E_{x∼P_X}[f(x)f(x)ᵀ]` and `b_i = Σ_{x∈S_i} w(x) f(x) / w(S)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DomainSpec, PositivePairGraph, VertexSet};
use crate::spectral::{self, Representation};
use crate::tol::SCALAR_TOL;

/// Index of the largest entry; ties go to the smallest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct PfaClassifier {
    sigma_matrix: DMatrix<f64>,
    class_means: Vec<DVector<f64>>,
    sigma_values: DVector<f64>,
    sigma_vectors: DMatrix<f64>,
}

pub fn fit_pfa(rep: &Representation, graph: &PositivePairGraph, domain: &DomainSpec) -> Result<PfaClassifier> {
    if rep.n() != graph.n() {
        return Err(Error::DimensionMismatch {
            expected: graph.n(),
            found: rep.n(),
        });
    }
    if domain.n() != graph.n() {
        return Err(Error::DimensionMismatch {
            expected: graph.n(),
            found: domain.n(),
        });
    }
    if domain.r() == 0 {
        return Err(Error::InvalidArgument("domain has no classes (r = 0)".into()));
    }
    let sigma_matrix = spectral::feature_covariance(graph, rep.features())?;
    let source_mass = graph.set_weight(&domain.source_union())?;
    let k = rep.k();
    let mut class_means = Vec::with_capacity(domain.r());
    for i in 0..domain.r() {
        let s_i = domain.source(i);
        if s_i.is_empty() {
            return Err(Error::EmptySourceClass(i));
        }
        let mut b = DVector::zeros(k);
        for x in s_i.iter() {
            b += rep.feature(x) * (graph.marginal(x) / source_mass);
        }
        class_means.push(b);
    }
    let (sigma_values, sigma_vectors) = spectral::symmetric_eigen_ascending(sigma_matrix.clone())?;
    Ok(PfaClassifier {
        sigma_matrix,
        class_means,
        sigma_values,
        sigma_vectors,
    })
}

impl PfaClassifier {
    /// `Σ`.
    pub fn sigma_matrix(&self) -> &DMatrix<f64> {
        &self.sigma_matrix
    }

    /// `b_1, …, b_r`.
    pub fn class_means(&self) -> &[DVector<f64>] {
        &self.class_means
    }

    pub fn num_classes(&self) -> usize {
        self.class_means.len()
    }

    /// `Σ^p`, through the eigendecomposition of `Σ` with eigenvalues clamped at 0.
    pub fn sigma_power(&self, p: u32) -> DMatrix<f64> {
        let k = self.sigma_values.len();
        if p == 0 {
            return DMatrix::identity(k, k);
        }
        let scaled = DMatrix::from_fn(k, k, |row, col| {
            self.sigma_vectors[(row, col)] * self.sigma_values[col].max(0.0).powi(p as i32)
        });
        &scaled * self.sigma_vectors.transpose()
    }

    /// Preconditioned class means `Σ^{t−1} b_i`.
    pub fn directions(&self, t: u32) -> Result<Vec<DVector<f64>>> {
        if t == 0 {
            return Err(Error::InvalidArgument("t must be at least 1".into()));
        }
        let power = self.sigma_power(t - 1);
        Ok(self.class_means.iter().map(|b| &power * b).collect())
    }

    /// `⟨f(x), Σ^{t−1} b_i⟩` for every class.
    pub fn scores(&self, rep: &Representation, x: usize, t: u32) -> Result<Vec<f64>> {
        let dirs = self.directions(t)?;
        let f = rep.features().row(x);
        Ok(dirs.iter().map(|d| (f * d)[(0, 0)]).collect())
    }

    pub fn predict(&self, rep: &Representation, x: usize, t: u32) -> Result<usize> {
        Ok(argmax(&self.scores(rep, x, t)?))
    }

    /// Predictions for every vertex.
    pub fn predict_all(&self, rep: &Representation, t: u32) -> Result<Vec<usize>> {
        let dirs = self.directions(t)?;
        let k = rep.k();
        let d = DMatrix::from_fn(k, dirs.len(), |row, col| dirs[col][row]);
        let scores = rep.features() * d;
        Ok((0..rep.n())
            .map(|x| {
                let row: Vec<f64> = scores.row(x).iter().copied().collect();
                argmax(&row)
            })
            .collect())
    }

    pub fn target_error(
        &self,
        rep: &Representation,
        graph: &PositivePairGraph,
        domain: &DomainSpec,
        t: u32,
    ) -> Result<ErrorReport> {
        let predictions = self.predict_all(rep, t)?;
        target_error_of(&predictions, graph, domain)
    }
}

/// Population error of a labeling on the target domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub target_error: f64,
    /// Misclassified mass of each `T_i`, as a fraction of `P_X(T)`; these sum to `target_error`.
    pub per_class_errors: Vec<f64>,
    pub bound_value: Option<f64>,
    pub bound_satisfied: Option<bool>,
}

impl ErrorReport {
    /// Attaches a bound and records whether the measured error respects it.
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound_value = Some(bound);
        self.bound_satisfied = Some(self.target_error <= bound);
        self
    }
}

/// `E_T(g) = E_{x∼P_T}[1{x ∉ T_{g(x)}}]` for class predictions `predictions[x]`.
pub fn target_error_of(predictions: &[usize], graph: &PositivePairGraph, domain: &DomainSpec) -> Result<ErrorReport> {
    if predictions.len() != graph.n() {
        return Err(Error::DimensionMismatch {
            expected: graph.n(),
            found: predictions.len(),
        });
    }
    let target_mass = graph.set_weight(&domain.target_union())?;
    let per_class_errors: Vec<f64> = (0..domain.r())
        .map(|i| {
            domain
                .target(i)
                .iter()
                .filter(|&x| predictions[x] != i)
                .map(|x| graph.marginal(x))
                .fold(0.0, |acc, w| acc + w)
                / target_mass
        })
        .collect();
    Ok(ErrorReport {
        target_error: per_class_errors.iter().fold(0.0, |acc, e| acc + e),
        per_class_errors,
        bound_value: None,
        bound_satisfied: None,
    })
}

/// `ε_t = (1 − λ_{k+1}/2)^{2t}`.
pub fn epsilon_t(lambda_k1: f64, t: u32) -> f64 {
    (1.0 - lambda_k1 / 2.0).powi(2 * t as i32)
}

/// `128·ε_t·r·α² / (ρ²·λ_{k+1}²) · P_X(S)/P_X(T)`, valid for `1 ≤ t ≤ ρ/(8α²)`.
pub fn transfer_bound(alpha: f64, rho: f64, lambda_k1: f64, r: usize, mass_ratio: f64, t: u32) -> f64 {
    128.0 * epsilon_t(lambda_k1, t) * r as f64 * alpha * alpha / (rho * rho * lambda_k1 * lambda_k1) * mass_ratio
}

/// Largest `t` covered by [`transfer_bound`]: `⌊ρ/(8α²)⌋`, or `None` when
/// `α = 0` leaves the range unbounded. A ratio within `SCALAR_TOL` below an
/// integer counts as that integer.
pub fn transfer_t_max(alpha: f64, rho: f64) -> Option<u64> {
    if alpha > 0.0 {
        let ratio = rho / (8.0 * alpha * alpha);
        Some((ratio * (1.0 + SCALAR_TOL)).floor() as u64)
    } else {
        None
    }
}

/// Structural form `r·log²(1/α) / (τ·γ⁸)` of the conductance-based bound, constant 1.
pub fn multistep_structural_bound(r: usize, alpha: f64, tau: f64, gamma: f64) -> f64 {
    let l = (1.0 / alpha).ln();
    r as f64 * l * l / (tau * gamma.powi(8))
}

/// `⌈log(1/α)/γ²⌉`, the base power for the conductance-based bound.
pub fn multistep_base_t(alpha: f64, gamma: f64) -> Option<u32> {
    let t = ((1.0 / alpha).ln() / (gamma * gamma)).ceil();
    (t.is_finite() && t >= 1.0 && t <= u32::MAX as f64).then_some(t as u32)
}

/// Result of the constructive linear probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub error: f64,
    /// `4·m·α²/λ_{k+1}²`.
    pub bound: f64,
    /// `rank(F̃) < min(k, m)`.
    pub rank_deficient: bool,
    /// `k < m`.
    pub underdimensioned: bool,
    /// Squared residuals `‖F̃B_i − g_i‖²`.
    pub residuals: Vec<f64>,
}

/// Linear probe with `B_i` chosen so that `F̃B_i` is the orthogonal projection
/// of the cluster indicator `g_i` onto the column span of `F̃`. Its error
/// upper-bounds the best linear probe.
pub fn linear_probe_error(rep: &Representation, graph: &PositivePairGraph, clusters: &[VertexSet]) -> Result<ProbeReport> {
    if rep.n() != graph.n() {
        return Err(Error::DimensionMismatch {
            expected: graph.n(),
            found: rep.n(),
        });
    }
    let n = graph.n();
    let m = clusters.len();
    let k = rep.k();
    let ft = rep.weighted();
    let gram = ft.transpose() * ft;
    let (values, vectors) = spectral::symmetric_eigen_ascending(gram)?;
    let top = values.iter().copied().fold(0.0, f64::max);
    let cutoff = top * 1e-12 * k as f64;
    let rank = values.iter().filter(|&&v| v > cutoff).count();
    let pinv = DMatrix::from_fn(k, k, |a, b| {
        (0..k)
            .filter(|&j| values[j] > cutoff)
            .map(|j| vectors[(a, j)] * vectors[(b, j)] / values[j])
            .sum::<f64>()
    });
    let mut b = DMatrix::zeros(k, m);
    let mut residuals = Vec::with_capacity(m);
    let mut labels = vec![usize::MAX; n];
    for (c, cluster) in clusters.iter().enumerate() {
        for x in cluster.iter() {
            labels[x] = c;
        }
        let g = crate::oracles::indicator_vector(graph, cluster);
        let col = &pinv * (ft.transpose() * &g);
        residuals.push((ft * &col - &g).norm_squared());
        b.set_column(c, &col);
    }
    let scores = rep.features() * &b;
    let mut error = 0.0;
    for (x, &label) in labels.iter().enumerate() {
        let row: Vec<f64> = scores.row(x).iter().copied().collect();
        if argmax(&row) != label {
            error += graph.marginal(x);
        }
    }
    let alpha = crate::metrics::compute_alpha(graph, clusters)?;
    let lambda_k1 = if k < n {
        spectral::decompose(graph)?.lambda(k + 1)
    } else {
        f64::NAN
    };
    Ok(ProbeReport {
        error,
        bound: 4.0 * m as f64 * alpha * alpha / (lambda_k1 * lambda_k1),
        rank_deficient: rank < k.min(m),
        underdimensioned: k < m,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Normalization;

    fn two_pairs() -> (PositivePairGraph, DomainSpec) {
        // S_1 = {0}, S_2 = {1}, T_1 = {2}, T_2 = {3}; edges only within a class.
        let g = PositivePairGraph::from_edges(4, &[(0, 2, 0.25), (1, 3, 0.25)], Normalization::Strict).unwrap();
        let d = DomainSpec::new(
            4,
            vec![VertexSet::singleton(0), VertexSet::singleton(1), VertexSet::singleton(2), VertexSet::singleton(3)],
            2,
        )
        .unwrap();
        (g, d)
    }

    #[test]
    fn argmax_prefers_smallest_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax(&[0.0, 0.0]), 0);
    }

    #[test]
    fn separated_classes_transfer_perfectly() {
        let (g, d) = two_pairs();
        let rep = spectral::minimize_loss(&g, 2, 2.0).unwrap();
        let pfa = fit_pfa(&rep, &g, &d).unwrap();
        for t in 1..5 {
            assert_eq!(pfa.target_error(&rep, &g, &d, t).unwrap().target_error, 0.0);
        }
    }

    #[test]
    fn zero_features_give_zero_statistics() {
        let (g, d) = two_pairs();
        let rep = Representation::from_features(&g, DMatrix::zeros(4, 3)).unwrap();
        let pfa = fit_pfa(&rep, &g, &d).unwrap();
        assert_eq!(pfa.sigma_matrix().norm(), 0.0);
        assert!(pfa.class_means().iter().all(|b| b.norm() == 0.0));
        // Every vertex falls to class 0, so T_2 (half the target mass) is wrong.
        let report = pfa.target_error(&rep, &g, &d, 1).unwrap();
        assert!((report.target_error - 0.5).abs() < 1e-15);
        assert_eq!(report.per_class_errors, vec![0.0, 0.5]);
    }

    #[test]
    fn sigma_power_matches_repeated_product() {
        let (g, d) = two_pairs();
        let f = DMatrix::from_row_slice(4, 2, &[1.0, 0.5, -0.3, 2.0, 0.7, 0.1, 0.2, -1.0]);
        let rep = Representation::from_features(&g, f).unwrap();
        let pfa = fit_pfa(&rep, &g, &d).unwrap();
        let s = pfa.sigma_matrix();
        assert!((pfa.sigma_power(3) - s * s * s).norm() < 1e-12);
        assert_eq!(pfa.sigma_power(0), DMatrix::identity(2, 2));
    }

    #[test]
    fn power_zero_is_rejected() {
        let (g, d) = two_pairs();
        let rep = spectral::minimize_loss(&g, 2, 2.0).unwrap();
        let pfa = fit_pfa(&rep, &g, &d).unwrap();
        assert!(pfa.predict(&rep, 0, 0).is_err());
        assert!(pfa.predict(&rep, 0, 1).is_ok());
    }

    #[test]
    fn probe_on_disconnected_clusters() {
        let (g, d) = two_pairs();
        let pairs = vec![VertexSet::new([0, 2]), VertexSet::new([1, 3])];
        let rep = spectral::minimize_loss(&g, 2, 2.0).unwrap();
        let report = linear_probe_error(&rep, &g, &pairs).unwrap();
        assert_eq!(report.error, 0.0);
        assert!(!report.rank_deficient);
        assert_eq!(d.r(), 2);
    }

    #[test]
    fn probe_on_zero_features_picks_first_cluster() {
        let (g, _) = two_pairs();
        let pairs = vec![VertexSet::new([0, 2]), VertexSet::new([1, 3])];
        let rep = Representation::from_features(&g, DMatrix::zeros(4, 2)).unwrap();
        let report = linear_probe_error(&rep, &g, &pairs).unwrap();
        assert!((report.error - 0.5).abs() < 1e-15);
        assert!(report.rank_deficient);
    }

    #[test]
    fn transfer_t_range() {
        assert_eq!(transfer_t_max(0.1, 0.5), Some(6));
        assert_eq!(transfer_t_max(0.0, 0.5), None);
        assert_eq!(epsilon_t(1.0, 1), 0.25);
    }
}
