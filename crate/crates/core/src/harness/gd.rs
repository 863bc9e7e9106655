use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::PositivePairGraph;
use crate::spectral;

pub const MAX_GD_VERTICES: usize = 200;
const PATIENCE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GdConfig {
    pub k: usize,
    pub sigma: f64,
    pub steps: usize,
    pub lr: f64,
    pub seed: u64,
}

impl Default for GdConfig {
    fn default() -> Self {
        GdConfig {
            k: 4,
            sigma: 2.0,
            steps: 5000,
            lr: 0.05,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GdReport {
    pub config: GdConfig,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub closed_form_loss: f64,
    /// `final_loss − closed_form_loss`.
    pub loss_gap: f64,
    /// `‖F̃_gd F̃_gdᵀ − F̃_* F̃_*ᵀ‖_F`.
    pub product_gap: f64,
}

/// Loss in terms of `G = F̃`: `2·tr(Gᵀ L G) + σ‖GᵀG − I‖²_F`.
fn loss(lap: &DMatrix<f64>, g: &DMatrix<f64>, sigma: f64) -> f64 {
    let k = g.ncols();
    let align = 2.0 * (g.transpose() * lap * g).trace();
    let cov = g.transpose() * g - DMatrix::<f64>::identity(k, k);
    align + sigma * cov.norm_squared()
}

/// `4·L·G + 4σ·G(GᵀG − I)`.
fn gradient(lap: &DMatrix<f64>, g: &DMatrix<f64>, sigma: f64) -> DMatrix<f64> {
    let k = g.ncols();
    let cov = g.transpose() * g - DMatrix::<f64>::identity(k, k);
    lap * g * 4.0 + g * cov * (4.0 * sigma)
}

/// Full-batch gradient descent on the generalized loss from a seeded random
/// start, compared with the closed-form minimizer.
pub fn gd_crosscheck(graph: &PositivePairGraph, config: &GdConfig) -> Result<GdReport> {
    let n = graph.n();
    if n > MAX_GD_VERTICES {
        return Err(Error::InvalidArgument(format!(
            "gradient descent is limited to {MAX_GD_VERTICES} vertices, graph has {n}"
        )));
    }
    let k = config.k;
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k must lie in [1, {n}], got {k}")));
    }
    if !(config.lr >= 0.0 && config.lr.is_finite()) {
        return Err(Error::InvalidArgument(format!("learning rate must be nonnegative, got {}", config.lr)));
    }
    let lap = spectral::laplacian(graph);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let scale = 1.0 / (n as f64).sqrt();
    let mut g = DMatrix::from_fn(n, k, |_, _| scale * (2.0 * rng.random::<f64>() - 1.0));

    let initial_loss = loss(&lap, &g, config.sigma);
    let mut previous = initial_loss;
    let mut rising = 0;
    for step in 1..=config.steps {
        let grad = gradient(&lap, &g, config.sigma);
        g -= grad * config.lr;
        let current = loss(&lap, &g, config.sigma);
        if !current.is_finite() {
            return Err(Error::Divergence { step, loss: current });
        }
        rising = if current > previous { rising + 1 } else { 0 };
        if rising >= PATIENCE {
            return Err(Error::Divergence { step, loss: current });
        }
        previous = current;
    }

    let features = DMatrix::from_fn(n, k, |x, j| g[(x, j)] / graph.marginal(x).sqrt());
    let final_loss = spectral::generalized_loss(graph, &features, config.sigma)?;
    let best = spectral::minimize_loss(graph, k, config.sigma)?;
    let closed_form_loss = spectral::generalized_loss(graph, best.features(), config.sigma)?;
    let product_gap = (&g * g.transpose() - best.weighted() * best.weighted().transpose()).norm();
    Ok(GdReport {
        config: *config,
        initial_loss,
        final_loss,
        closed_form_loss,
        loss_gap: final_loss - closed_form_loss,
        product_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Normalization;

    fn path4() -> PositivePairGraph {
        PositivePairGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 0.2), (2, 3, 1.0), (0, 0, 0.3)], Normalization::Rescale)
            .unwrap()
    }

    #[test]
    fn loss_matches_direct_sum() {
        let g = path4();
        let lap = spectral::laplacian(&g);
        let f = DMatrix::from_row_slice(4, 2, &[0.3, -1.0, 0.2, 0.5, 1.1, 0.0, -0.4, 0.9]);
        let weighted = DMatrix::from_fn(4, 2, |x, j| f[(x, j)] * g.marginal(x).sqrt());
        let direct = spectral::generalized_loss(&g, &f, 2.0).unwrap();
        assert!((loss(&lap, &weighted, 2.0) - direct).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let g = path4();
        let lap = spectral::laplacian(&g);
        let p = DMatrix::from_row_slice(4, 2, &[0.3, -0.1, 0.2, 0.5, 0.1, 0.0, -0.4, 0.2]);
        let grad = gradient(&lap, &p, 1.5);
        let h = 1e-6;
        for idx in 0..8 {
            let mut plus = p.clone();
            let mut minus = p.clone();
            plus[idx] += h;
            minus[idx] -= h;
            let fd = (loss(&lap, &plus, 1.5) - loss(&lap, &minus, 1.5)) / (2.0 * h);
            assert!((fd - grad[idx]).abs() < 1e-6, "{idx}: {fd} vs {}", grad[idx]);
        }
    }

    #[test]
    fn zero_learning_rate_keeps_loss() {
        let g = path4();
        let report = gd_crosscheck(
            &g,
            &GdConfig {
                k: 2,
                lr: 0.0,
                steps: 20,
                ..GdConfig::default()
            },
        )
        .unwrap();
        assert!((report.final_loss - report.initial_loss).abs() < 1e-12);
    }

    #[test]
    fn huge_learning_rate_diverges() {
        let g = path4();
        let err = gd_crosscheck(
            &g,
            &GdConfig {
                k: 2,
                lr: 50.0,
                steps: 100,
                ..GdConfig::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }
}
