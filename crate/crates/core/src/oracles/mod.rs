//! Brute-force computations used as independent references: lazy random-walk
//! powers, low-rank powers, walk probabilities, and the inequality checkers in
//! [`lemmas`].

pub mod lemmas;

use nalgebra::{DMatrix, DVector};

use crate::graph::{PositivePairGraph, VertexSet};
use crate::spectral::{self, Representation};

pub use lemmas::{check_lemma, default_t_range, LemmaChecker, LemmaId, LemmaReport, LemmaVerdict, Witness};

/// `g_A` with entries `√w(x)·1{x∈A}`.
pub fn indicator_vector(graph: &PositivePairGraph, set: &VertexSet) -> DVector<f64> {
    let mut g = DVector::zeros(graph.n());
    for x in set.iter() {
        g[x] = graph.marginal(x).sqrt();
    }
    g
}

/// The lazy walk operator `(I + Ā)/2`.
#[derive(Debug, Clone)]
pub struct SmoothingOperator {
    matrix: DMatrix<f64>,
}

impl SmoothingOperator {
    pub fn new(graph: &PositivePairGraph) -> Self {
        let n = graph.n();
        let matrix = (DMatrix::identity(n, n) + spectral::normalized_adjacency(graph)) * 0.5;
        SmoothingOperator { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    /// `((I + Ā)/2)^t v` by `t` matrix-vector products.
    pub fn power(&self, v: &DVector<f64>, t: u32) -> DVector<f64> {
        let mut out = v.clone();
        for _ in 0..t {
            out = self.apply(&out);
        }
        out
    }

    /// `[v, Mv, M²v, …, M^{t_max}v]`.
    pub fn trajectory(&self, v: &DVector<f64>, t_max: u32) -> Vec<DVector<f64>> {
        let mut out = Vec::with_capacity(t_max as usize + 1);
        out.push(v.clone());
        for _ in 0..t_max {
            let next = self.apply(out.last().expect("nonempty"));
            out.push(next);
        }
        out
    }
}

pub fn smoothed_power(graph: &PositivePairGraph, v: &DVector<f64>, t: u32) -> DVector<f64> {
    SmoothingOperator::new(graph).power(v, t)
}

/// `(F̃F̃ᵀ)^t v`, evaluated as `F̃·(F̃ᵀF̃)^{t−1}·(F̃ᵀv)`. `t = 0` returns `v`.
pub fn low_rank_power(rep: &Representation, v: &DVector<f64>, t: u32) -> DVector<f64> {
    if t == 0 {
        return v.clone();
    }
    let ft = rep.weighted();
    let gram = ft.transpose() * ft;
    let mut y = ft.transpose() * v;
    for _ in 1..t {
        y = &gram * y;
    }
    ft * y
}

/// `(F̃F̃ᵀ)^t v` by repeated products with the `N×N` matrix.
pub fn low_rank_power_naive(rep: &Representation, v: &DVector<f64>, t: u32) -> DVector<f64> {
    let ft = rep.weighted();
    let full = ft * ft.transpose();
    let mut out = v.clone();
    for _ in 0..t {
        out = &full * out;
    }
    out
}

/// Transition matrix `P[x, x'] = w(x, x') / w(x)` of the random walk.
pub fn transition_matrix(graph: &PositivePairGraph) -> DMatrix<f64> {
    let n = graph.n();
    DMatrix::from_fn(n, n, |x, y| graph.weight(x, y) / graph.marginal(x))
}

/// Law of the walk after `t` steps from `x`, by dynamic programming.
pub fn walk_distribution(graph: &PositivePairGraph, x: usize, t: u32) -> DVector<f64> {
    let n = graph.n();
    let p = transition_matrix(graph);
    let mut dist = DVector::zeros(n);
    dist[x] = 1.0;
    for _ in 0..t {
        dist = p.tr_mul(&dist);
    }
    dist
}

/// `Pr[x_t ∈ A | x_0 = x]`.
pub fn random_walk_probability(graph: &PositivePairGraph, x: usize, set: &VertexSet, t: u32) -> f64 {
    let dist = walk_distribution(graph, x, t);
    set.iter().map(|y| dist[y]).sum()
}

/// `Ā^t` by repeated multiplication.
pub fn adjacency_power(graph: &PositivePairGraph, t: u32) -> DMatrix<f64> {
    let a = spectral::normalized_adjacency(graph);
    let n = graph.n();
    let mut out = DMatrix::identity(n, n);
    for _ in 0..t {
        out = &out * &a;
    }
    out
}

/// `D^{−1/2}(W D^{−1})^t D^{1/2}`, which equals `Ā^t`.
pub fn conjugated_walk_power(graph: &PositivePairGraph, t: u32) -> DMatrix<f64> {
    let n = graph.n();
    let w = graph.weights();
    let m = graph.marginals();
    let step = DMatrix::from_fn(n, n, |x, y| w[(x, y)] / m[y]);
    let mut power = DMatrix::identity(n, n);
    for _ in 0..t {
        power = &power * &step;
    }
    DMatrix::from_fn(n, n, |x, y| power[(x, y)] * (m[y] / m[x]).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Normalization;

    fn g4() -> PositivePairGraph {
        PositivePairGraph::from_edges(
            4,
            &[(0, 1, 0.2), (2, 3, 0.2), (1, 2, 0.05), (0, 0, 0.05), (3, 3, 0.05)],
            Normalization::Strict,
        )
        .unwrap()
    }

    #[test]
    fn g4_indicator() {
        let g = g4();
        let v = indicator_vector(&g, &VertexSet::new([0, 1]));
        assert_eq!(v.as_slice(), &[0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn g4_one_smoothing_step() {
        // Ā rows: [.2,.8,0,0], [.8,0,.2,0], [0,.2,0,.8], [0,0,.8,.2].
        let g = g4();
        let v = indicator_vector(&g, &VertexSet::new([0, 1]));
        let out = smoothed_power(&g, &v, 1);
        let expected = [0.5, 0.45, 0.05, 0.0];
        for (a, b) in out.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(smoothed_power(&g, &v, 0), v);
    }

    #[test]
    fn low_rank_forms_agree() {
        let g = g4();
        let rep = spectral::minimize_loss(&g, 2, 2.0).unwrap();
        let v = DVector::from_vec(vec![0.3, -0.2, 0.9, 0.1]);
        for t in 0..6 {
            assert!((low_rank_power(&rep, &v, t) - low_rank_power_naive(&rep, &v, t)).norm() < 1e-12);
        }
    }

    #[test]
    fn walk_starts_at_origin() {
        let g = g4();
        assert_eq!(random_walk_probability(&g, 1, &VertexSet::singleton(1), 0), 1.0);
        assert!((random_walk_probability(&g, 1, &VertexSet::new([2]), 1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn conjugation_matches_power() {
        let g = PositivePairGraph::from_edges(3, &[(0, 1, 0.3), (1, 2, 0.1), (0, 0, 0.2)], Normalization::Rescale).unwrap();
        for t in 0..5 {
            assert!((adjacency_power(&g, t) - conjugated_walk_power(&g, t)).norm() < 1e-12);
        }
    }
}
