//! Finite positive-pair graphs.
//!
//! A [`PositivePairGraph`] stores the joint distribution of positive pairs as a
//! dense symmetric matrix whose entries sum to one over ordered pairs. Vertex
//! marginals `w(x)` are row sums, so a self-loop contributes its weight once.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tol::MASS_TOL;

/// What to do when the supplied weights do not sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Reject any input whose ordered-pair mass differs from 1 by more than `1e-9`.
    #[default]
    Strict,
    /// Divide every weight by the total ordered-pair mass.
    Rescale,
}

/// A sorted, duplicate-free set of vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn full(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn singleton(x: usize) -> Self {
        VertexSet(vec![x])
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    /// Indicator mask of length `n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &x in &self.0 {
            m[x] = true;
        }
        m
    }

    pub fn complement(&self, n: usize) -> VertexSet {
        let m = self.mask(n);
        VertexSet((0..n).filter(|&x| !m[x]).collect())
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::new(self.iter().chain(other.iter()))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

impl From<Vec<usize>> for VertexSet {
    fn from(v: Vec<usize>) -> Self {
        VertexSet::new(v)
    }
}

/// Symmetric distribution over pairs of vertices, with its marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivePairGraph {
    weights: DMatrix<f64>,
    marginals: DVector<f64>,
}

impl PositivePairGraph {
    /// Builds a graph from unordered edges, mirroring every off-diagonal entry.
    ///
    /// An edge may be given in both orientations only if both carry the same
    /// weight; it is then stored once.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize, f64)],
        normalization: Normalization,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices(n));
        }
        let mut seen: HashMap<(usize, usize), (usize, usize, f64)> = HashMap::new();
        let mut weights = DMatrix::zeros(n, n);
        for &(x, y, w) in edges {
            for v in [x, y] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight(x, y, w));
            }
            let key = (x.min(y), x.max(y));
            if let Some(&(px, py, pw)) = seen.get(&key) {
                if x == y || (px, py) == (x, y) {
                    return Err(Error::DuplicateEdge(x, y));
                }
                if pw != w {
                    return Err(Error::AsymmetryConflict(x, y, pw, w));
                }
                // Same edge in the other orientation with the same weight.
                continue;
            }
            seen.insert(key, (x, y, w));
            weights[(x, y)] = w;
            weights[(y, x)] = w;
        }
        Self::from_symmetric_weights(weights, normalization)
    }

    /// Builds a graph from an edge list, taking `n` as one past the largest index.
    pub fn from_edge_list(edges: &[(usize, usize, f64)], normalization: Normalization) -> Result<Self> {
        let n = edges.iter().map(|&(x, y, _)| x.max(y) + 1).max().unwrap_or(0);
        Self::from_edges(n, edges, normalization)
    }

    /// Builds a graph from a full weight matrix, which must be exactly symmetric.
    pub fn from_weights(weights: DMatrix<f64>, normalization: Normalization) -> Result<Self> {
        if weights.nrows() != weights.ncols() {
            return Err(Error::DimensionMismatch {
                expected: weights.nrows(),
                found: weights.ncols(),
            });
        }
        let n = weights.nrows();
        if n < 2 {
            return Err(Error::TooFewVertices(n));
        }
        for x in 0..n {
            for y in x..n {
                let w = weights[(x, y)];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidWeight(x, y, w));
                }
                if w != weights[(y, x)] {
                    return Err(Error::AsymmetryConflict(x, y, w, weights[(y, x)]));
                }
            }
        }
        Self::from_symmetric_weights(weights, normalization)
    }

    fn from_symmetric_weights(mut weights: DMatrix<f64>, normalization: Normalization) -> Result<Self> {
        let mass = weights.sum();
        if (mass - 1.0).abs() > MASS_TOL {
            match normalization {
                Normalization::Strict => return Err(Error::NotNormalized(mass)),
                Normalization::Rescale => {
                    if mass <= 0.0 {
                        return Err(Error::NonPositiveMarginal(0));
                    }
                    weights /= mass;
                }
            }
        }
        let n = weights.nrows();
        let marginals = DVector::from_iterator(n, (0..n).map(|x| weights.row(x).sum()));
        if let Some(x) = (0..n).find(|&x| marginals[x] <= 0.0) {
            return Err(Error::NonPositiveMarginal(x));
        }
        Ok(PositivePairGraph { weights, marginals })
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.weights[(x, y)]
    }

    pub fn marginals(&self) -> &DVector<f64> {
        &self.marginals
    }

    pub fn marginal(&self, x: usize) -> f64 {
        self.marginals[x]
    }

    /// Sum over ordered pairs.
    pub fn total_mass(&self) -> f64 {
        self.weights.sum()
    }

    /// Unordered edges `(x, y, w)` with `x <= y` and `w > 0`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for x in 0..n {
            for y in x..n {
                let w = self.weights[(x, y)];
                if w > 0.0 {
                    out.push((x, y, w));
                }
            }
        }
        out
    }

    pub fn check_set(&self, set: &VertexSet) -> Result<()> {
        match set.max() {
            Some(v) if v >= self.n() => Err(Error::VertexOutOfRange { vertex: v, n: self.n() }),
            _ => Ok(()),
        }
    }

    /// `w(A)`: total marginal weight of the vertices in `set`.
    pub fn set_weight(&self, set: &VertexSet) -> Result<f64> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        self.check_set(set)?;
        Ok(set.iter().map(|x| self.marginals[x]).sum())
    }

    /// `w(A, B)`: double sum of pair weights. The sets may overlap.
    ///
    /// Panics if either set holds an index outside the graph.
    pub fn cut_weight(&self, a: &VertexSet, b: &VertexSet) -> f64 {
        a.iter().map(|x| self.vertex_to_set(x, b)).sum()
    }

    /// `w(x, B)`.
    pub fn vertex_to_set(&self, x: usize, b: &VertexSet) -> f64 {
        b.iter().map(|y| self.weights[(x, y)]).sum()
    }

    /// Subgraph on `set` keeping raw intra-set weights (no renormalization).
    pub fn restrict(&self, set: &VertexSet) -> Result<RestrictedGraph> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        self.check_set(set)?;
        let members = set.members().to_vec();
        let k = members.len();
        let weights = DMatrix::from_fn(k, k, |i, j| self.weights[(members[i], members[j])]);
        let marginals = DVector::from_iterator(k, (0..k).map(|i| weights.row(i).sum()));
        if let Some(i) = (0..k).find(|&i| marginals[i] <= 0.0) {
            return Err(Error::DisconnectedVertexInRestriction(members[i]));
        }
        Ok(RestrictedGraph {
            members,
            weights,
            marginals,
        })
    }
}

/// A graph restricted to a vertex subset. Local index `i` maps to global vertex
/// `members()[i]`; marginals are the restricted sums `ŵ(x) = Σ_{x'∈A} w(x,x')`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedGraph {
    members: Vec<usize>,
    weights: DMatrix<f64>,
    marginals: DVector<f64>,
}

impl RestrictedGraph {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn marginals(&self) -> &DVector<f64> {
        &self.marginals
    }
}

/// Partition of the vertices into clusters, with the first `r` clusters as
/// source classes and the next `r` as target classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainSpec {
    clusters: Vec<VertexSet>,
    r: usize,
    labels: Vec<usize>,
}

impl DomainSpec {
    pub fn new(n: usize, clusters: Vec<VertexSet>, r: usize) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (c, cluster) in clusters.iter().enumerate() {
            if cluster.is_empty() {
                return Err(Error::InvalidPartition(format!("cluster {c} is empty")));
            }
            for x in cluster.iter() {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
                if labels[x] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "vertex {x} belongs to clusters {} and {c}",
                        labels[x]
                    )));
                }
                labels[x] = c;
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!("vertex {x} is not in any cluster")));
        }
        if 2 * r > clusters.len() {
            return Err(Error::InvalidPartition(format!(
                "r = {r} needs {} clusters, found {}",
                2 * r,
                clusters.len()
            )));
        }
        Ok(DomainSpec { clusters, r, labels })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn clusters(&self) -> &[VertexSet] {
        &self.clusters
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Cluster index of every vertex.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Source class `S_i`, zero-based.
    pub fn source(&self, i: usize) -> &VertexSet {
        &self.clusters[i]
    }

    /// Target class `T_i`, zero-based.
    pub fn target(&self, i: usize) -> &VertexSet {
        &self.clusters[self.r + i]
    }

    pub fn source_union(&self) -> VertexSet {
        VertexSet::new((0..self.r).flat_map(|i| self.clusters[i].iter()))
    }

    pub fn target_union(&self) -> VertexSet {
        VertexSet::new((0..self.r).flat_map(|i| self.target(i).iter()))
    }

    /// Class index if `x` lies in the target domain.
    pub fn target_class_of(&self, x: usize) -> Option<usize> {
        let c = self.labels[x];
        (self.r..2 * self.r).contains(&c).then(|| c - self.r)
    }
}
