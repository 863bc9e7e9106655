//! Expansion, cross-cluster connectivity, intra-cluster conductance and the
//! assumption report built from them.
//!
//! Conventions for inputs the definitions leave open: expansion to an empty
//! set is 0, an empty maximum is 0, and a ratio with a zero denominator and a
//! positive numerator is `+∞` (a zero numerator always gives 0).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DomainSpec, PositivePairGraph, VertexSet};
use crate::spectral::{self, SpectralDecomposition};
use crate::tol::HALF_MASS_TOL;

pub const DEFAULT_C: f64 = 8.0;
pub const DEFAULT_EXACT_CAP: usize = 22;

fn check_pair(graph: &PositivePairGraph, a: &VertexSet, b: &VertexSet) -> Result<()> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    graph.check_set(a)?;
    graph.check_set(b)?;
    if !a.is_disjoint(b) {
        return Err(Error::OverlappingSets);
    }
    Ok(())
}

/// `φ(A, B) = w(A, B) / w(A)`.
pub fn expansion(graph: &PositivePairGraph, a: &VertexSet, b: &VertexSet) -> Result<f64> {
    check_pair(graph, a, b)?;
    Ok(graph.cut_weight(a, b) / graph.set_weight(a)?)
}

fn per_vertex_ratios<'a>(
    graph: &'a PositivePairGraph,
    a: &'a VertexSet,
    b: &'a VertexSet,
) -> impl Iterator<Item = f64> + 'a {
    a.iter().map(move |x| graph.vertex_to_set(x, b) / graph.marginal(x))
}

/// `φ̄(A, B) = max_{x∈A} w(x, B) / w(x)`.
pub fn max_expansion(graph: &PositivePairGraph, a: &VertexSet, b: &VertexSet) -> Result<f64> {
    check_pair(graph, a, b)?;
    Ok(per_vertex_ratios(graph, a, b).fold(0.0, f64::max))
}

/// `φ̲(A, B) = min_{x∈A} w(x, B) / w(x)`.
pub fn min_expansion(graph: &PositivePairGraph, a: &VertexSet, b: &VertexSet) -> Result<f64> {
    check_pair(graph, a, b)?;
    Ok(per_vertex_ratios(graph, a, b).fold(f64::INFINITY, f64::min))
}

/// Per-vertex mass into every cluster: `mass[x][c] = w(x, C_c)`.
pub(crate) struct ClusterMass {
    mass: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

impl ClusterMass {
    pub(crate) fn new(graph: &PositivePairGraph, labels: &[usize], m: usize) -> Self {
        let n = graph.n();
        let mass = (0..n)
            .map(|x| {
                let mut row = vec![0.0; m];
                for y in 0..n {
                    row[labels[y]] += graph.weight(x, y);
                }
                row
            })
            .collect();
        ClusterMass {
            mass,
            labels: labels.to_vec(),
        }
    }

    /// `w(x, C_c) / w(x)`.
    fn ratio(&self, graph: &PositivePairGraph, x: usize, c: usize) -> f64 {
        self.mass[x][c] / graph.marginal(x)
    }

    /// `w(x, X∖C(x)) / w(x)` where `C(x)` is the cluster of `x`.
    fn leak(&self, graph: &PositivePairGraph, x: usize) -> f64 {
        let own = self.mass[x][self.labels[x]];
        ((graph.marginal(x) - own) / graph.marginal(x)).max(0.0)
    }
}

fn partition_labels(n: usize, clusters: &[VertexSet]) -> Result<Vec<usize>> {
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
                return Err(Error::InvalidPartition(format!("vertex {x} is in two clusters")));
            }
            labels[x] = c;
        }
    }
    if let Some(x) = labels.iter().position(|&l| l == usize::MAX) {
        return Err(Error::InvalidPartition(format!("vertex {x} is not in any cluster")));
    }
    Ok(labels)
}

/// Per-cluster `φ̄(C_i, X∖C_i)`.
pub fn cluster_leakage(graph: &PositivePairGraph, clusters: &[VertexSet]) -> Result<Vec<f64>> {
    let labels = partition_labels(graph.n(), clusters)?;
    let cm = ClusterMass::new(graph, &labels, clusters.len());
    Ok(clusters
        .iter()
        .map(|c| c.iter().map(|x| cm.leak(graph, x)).fold(0.0, f64::max))
        .collect())
}

/// `α = max_i φ̄(C_i, X∖C_i)`. A single cluster covering everything gives 0.
pub fn compute_alpha(graph: &PositivePairGraph, clusters: &[VertexSet]) -> Result<f64> {
    Ok(cluster_leakage(graph, clusters)?.into_iter().fold(0.0, f64::max))
}

/// Pass/fail of an inequality together with its slack (`holds` iff `margin >= 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub margin: f64,
}

impl Verdict {
    pub fn from_margin(margin: f64) -> Self {
        Verdict {
            holds: margin >= 0.0,
            margin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeExpansion {
    /// `ρ = min_i φ̲(T_i, S_i)`.
    pub rho: f64,
    /// `max_{i≠j} φ̄(T_i, S_j)`, 0 when `r = 1`.
    pub beta_max: f64,
    pub alpha: f64,
    pub c: f64,
    /// `ρ ≥ c·α²` and `ρ ≥ c·β_max`.
    pub verdict: Verdict,
}

fn require_classes(domain: &DomainSpec) -> Result<()> {
    if domain.r() == 0 {
        return Err(Error::InvalidArgument("domain has no classes (r = 0)".into()));
    }
    Ok(())
}

pub fn compute_rho(graph: &PositivePairGraph, domain: &DomainSpec, c: f64) -> Result<RelativeExpansion> {
    require_classes(domain)?;
    let cm = ClusterMass::new(graph, domain.labels(), domain.num_clusters());
    let r = domain.r();
    let mut rho = f64::INFINITY;
    let mut beta_max: f64 = 0.0;
    for i in 0..r {
        for x in domain.target(i).iter() {
            rho = rho.min(cm.ratio(graph, x, i));
            for j in (0..r).filter(|&j| j != i) {
                beta_max = beta_max.max(cm.ratio(graph, x, j));
            }
        }
    }
    let alpha = domain
        .clusters()
        .iter()
        .flat_map(|cl| cl.iter())
        .map(|x| cm.leak(graph, x))
        .fold(0.0, f64::max);
    let margin = (rho - c * alpha * alpha).min(rho - c * beta_max);
    Ok(RelativeExpansion {
        rho,
        beta_max,
        alpha,
        c,
        verdict: Verdict::from_margin(margin),
    })
}

/// One of the ratios whose minimum is `τ`: `φ(T_i,S_i)/α²` when `j` is `None`,
/// otherwise `φ(T_i,S_i)/φ(T_i,S_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauCandidate {
    pub i: usize,
    pub j: Option<usize>,
    pub ratio: f64,
}

fn safe_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

pub fn tau_candidates(graph: &PositivePairGraph, domain: &DomainSpec) -> Result<Vec<TauCandidate>> {
    require_classes(domain)?;
    let alpha = compute_alpha(graph, domain.clusters())?;
    let r = domain.r();
    let mut out = Vec::new();
    for i in 0..r {
        let t_i = domain.target(i);
        let same = expansion(graph, t_i, domain.source(i))?;
        out.push(TauCandidate {
            i,
            j: None,
            ratio: safe_ratio(same, alpha * alpha),
        });
        for j in (0..r).filter(|&j| j != i) {
            let cross = expansion(graph, t_i, domain.source(j))?;
            out.push(TauCandidate {
                i,
                j: Some(j),
                ratio: safe_ratio(same, cross),
            });
        }
    }
    Ok(out)
}

/// `τ`: the largest value for which the average relative expansion holds.
pub fn compute_tau(graph: &PositivePairGraph, domain: &DomainSpec) -> Result<f64> {
    Ok(tau_candidates(graph, domain)?
        .into_iter()
        .map(|c| c.ratio)
        .fold(f64::INFINITY, f64::min))
}

/// Intra-cluster conductance, exact or bracketed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conductance {
    Exact(f64),
    Bracket { lower: f64, upper: f64 },
}

impl Conductance {
    pub fn lower(&self) -> f64 {
        match *self {
            Conductance::Exact(v) => v,
            Conductance::Bracket { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            Conductance::Exact(v) => v,
            Conductance::Bracket { upper, .. } => upper,
        }
    }

    pub fn exact(&self) -> Option<f64> {
        match *self {
            Conductance::Exact(v) => Some(v),
            Conductance::Bracket { .. } => None,
        }
    }

    fn min(self, other: Conductance) -> Conductance {
        match (self, other) {
            (Conductance::Exact(a), Conductance::Exact(b)) => Conductance::Exact(a.min(b)),
            (a, b) => Conductance::Bracket {
                lower: a.lower().min(b.lower()),
                upper: a.upper().min(b.upper()),
            },
        }
    }
}

/// `min φ(A, C∖A)` over nonempty `A ⊂ C` with `w(A) ≤ w(C)/2`, using global
/// marginals. Enumerates all `2^|C|` subsets in Gray-code order with
/// incremental cut updates. A cluster with fewer than two vertices has no
/// admissible subset and yields `+∞`.
pub fn exact_conductance(graph: &PositivePairGraph, cluster: &VertexSet) -> Result<f64> {
    graph.check_set(cluster)?;
    let members = cluster.members();
    let s = members.len();
    if s < 2 {
        return Ok(f64::INFINITY);
    }
    if s > 40 {
        return Err(Error::InvalidArgument(format!("cluster of size {s} is too large to enumerate")));
    }
    let w: Vec<f64> = members.iter().map(|&x| graph.marginal(x)).collect();
    let local: Vec<Vec<f64>> = members
        .iter()
        .map(|&x| members.iter().map(|&y| graph.weight(x, y)).collect())
        .collect();
    let inner: Vec<f64> = (0..s)
        .map(|v| (0..s).filter(|&u| u != v).map(|u| local[v][u]).sum())
        .collect();
    let half = w.iter().sum::<f64>() / 2.0 * (1.0 + HALF_MASS_TOL);

    let mut in_a = vec![false; s];
    let mut to_a = vec![0.0; s];
    let mut cut = 0.0;
    let mut mass = 0.0;
    let mut size = 0usize;
    let mut best = f64::INFINITY;
    for step in 1u64..(1u64 << s) {
        let v = step.trailing_zeros() as usize;
        let delta = inner[v] - 2.0 * to_a[v];
        let sign = if in_a[v] { -1.0 } else { 1.0 };
        cut += sign * delta;
        mass += sign * w[v];
        in_a[v] = !in_a[v];
        if in_a[v] {
            size += 1;
        } else {
            size -= 1;
        }
        for u in (0..s).filter(|&u| u != v) {
            to_a[u] += sign * local[u][v];
        }
        if size == 0 {
            mass = 0.0;
            cut = 0.0;
            continue;
        }
        if mass <= half {
            best = best.min(cut.max(0.0) / mass);
        }
    }
    Ok(best)
}

/// Bracket on the global-marginal conductance of `cluster` from its restricted
/// spectral gap `λ`: `[(1 − φ̄(C, X∖C))²·λ/2, min(1, √(2λ))]`.
///
/// The upper end is Cheeger's inequality applied to the restricted graph. The
/// lower end comes from `λ ≤ ŵ(A, C∖A)·ŵ(C) / (ŵ(A)·ŵ(C∖A))`, with each
/// restricted marginal at least `1 − φ̄` times the global one.
pub fn cheeger_bracket(graph: &PositivePairGraph, cluster: &VertexSet) -> Result<Conductance> {
    let leak = max_expansion(graph, cluster, &cluster.complement(graph.n()))?;
    match graph.restrict(cluster) {
        Ok(restricted) => match spectral::restricted_spectral_gap(&restricted)? {
            Some(gap) => Ok(Conductance::Bracket {
                lower: ((1.0 - leak).powi(2) * gap / 2.0).max(0.0),
                upper: (2.0 * gap.max(0.0)).sqrt().min(1.0),
            }),
            None => Ok(Conductance::Exact(f64::INFINITY)),
        },
        Err(Error::DisconnectedVertexInRestriction(v)) => {
            // {v} has no edge into the rest of the cluster.
            let total = graph.set_weight(cluster)?;
            if graph.marginal(v) <= total / 2.0 * (1.0 + HALF_MASS_TOL) {
                Ok(Conductance::Exact(0.0))
            } else {
                Ok(Conductance::Bracket { lower: 0.0, upper: 1.0 })
            }
        }
        Err(e) => Err(e),
    }
}

/// Conductance of one cluster: exact when `|C| ≤ exact_cap`, otherwise the
/// spectral bracket.
pub fn cluster_conductance(graph: &PositivePairGraph, cluster: &VertexSet, exact_cap: usize) -> Result<Conductance> {
    if cluster.len() <= exact_cap {
        Ok(Conductance::Exact(exact_conductance(graph, cluster)?))
    } else {
        cheeger_bracket(graph, cluster)
    }
}

/// Per-cluster conductances and their minimum `γ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaReport {
    pub gamma: Conductance,
    pub per_cluster: Vec<Conductance>,
}

pub fn conductance_gamma(graph: &PositivePairGraph, clusters: &[VertexSet], exact_cap: usize) -> Result<GammaReport> {
    partition_labels(graph.n(), clusters)?;
    let per_cluster = clusters
        .iter()
        .map(|c| cluster_conductance(graph, c, exact_cap))
        .collect::<Result<Vec<_>>>()?;
    let gamma = per_cluster
        .iter()
        .copied()
        .reduce(Conductance::min)
        .unwrap_or(Conductance::Exact(f64::INFINITY));
    Ok(GammaReport { gamma, per_cluster })
}

/// `λ_{C}`: second-smallest eigenvalue of the Laplacian of the graph restricted
/// to `cluster`, normalized by restricted marginals.
pub fn restricted_gap(graph: &PositivePairGraph, cluster: &VertexSet) -> Result<f64> {
    let restricted = graph.restrict(cluster)?;
    spectral::restricted_spectral_gap(&restricted)?
        .ok_or_else(|| Error::InvalidArgument("restricted gap needs at least two vertices".into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    /// Constant in `ρ ≥ c·α²`, `ρ ≥ c·β_max`.
    pub c: f64,
    /// Clusters up to this size get exact conductance.
    pub exact_cap: usize,
    /// Threshold for the average relative expansion verdict.
    pub tau_min: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            c: DEFAULT_C,
            exact_cap: DEFAULT_EXACT_CAP,
            tau_min: DEFAULT_C,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionVerdicts {
    /// `α < 1`.
    pub cross_cluster: Verdict,
    /// `γ > 0`, judged on the lower end of the bracket.
    pub intra_conductance: Verdict,
    /// `ρ ≥ c·α²` and `ρ ≥ c·β_max`.
    pub relative_expansion: Verdict,
    /// `τ ≥ tau_min`.
    pub average_relative_expansion: Verdict,
}

/// Everything the bounds refer to, computed for one graph and domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub k: usize,
    pub alpha: f64,
    pub rho: f64,
    pub beta_max: f64,
    pub tau: f64,
    pub tau_candidates: Vec<TauCandidate>,
    pub gamma: Conductance,
    pub cluster_gammas: Vec<Conductance>,
    /// `λ_{T_i}` per target class; `None` if the restriction is invalid.
    pub restricted_gaps: Vec<Option<f64>>,
    pub lambda_spectrum: Vec<f64>,
    /// `λ_{k+1}`.
    pub lambda_k1: f64,
    /// `P_X(S) / P_X(T)`.
    pub source_target_mass_ratio: f64,
    pub c: f64,
    pub tau_min: f64,
    pub verdicts: AssumptionVerdicts,
}

pub fn assumption_report(
    graph: &PositivePairGraph,
    domain: &DomainSpec,
    k: usize,
    options: &ReportOptions,
) -> Result<GraphStats> {
    let decomposition = spectral::decompose(graph)?;
    assumption_report_with(graph, domain, &decomposition, k, options)
}

pub fn assumption_report_with(
    graph: &PositivePairGraph,
    domain: &DomainSpec,
    decomposition: &SpectralDecomposition,
    k: usize,
    options: &ReportOptions,
) -> Result<GraphStats> {
    let n = graph.n();
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!("k must lie in [1, {}), got {k}", n)));
    }
    let rel = compute_rho(graph, domain, options.c)?;
    let candidates = tau_candidates(graph, domain)?;
    let tau = candidates.iter().map(|c| c.ratio).fold(f64::INFINITY, f64::min);
    let gamma = conductance_gamma(graph, domain.clusters(), options.exact_cap)?;
    let restricted_gaps = (0..domain.r())
        .map(|i| restricted_gap(graph, domain.target(i)).ok())
        .collect();
    let mass_s = graph.set_weight(&domain.source_union())?;
    let mass_t = graph.set_weight(&domain.target_union())?;
    let verdicts = AssumptionVerdicts {
        cross_cluster: Verdict::from_margin(1.0 - rel.alpha).strict(),
        intra_conductance: Verdict::from_margin(gamma.gamma.lower()).strict(),
        relative_expansion: rel.verdict,
        average_relative_expansion: Verdict::from_margin(tau - options.tau_min),
    };
    Ok(GraphStats {
        n,
        m: domain.num_clusters(),
        r: domain.r(),
        k,
        alpha: rel.alpha,
        rho: rel.rho,
        beta_max: rel.beta_max,
        tau,
        tau_candidates: candidates,
        gamma: gamma.gamma,
        cluster_gammas: gamma.per_cluster,
        restricted_gaps,
        lambda_spectrum: decomposition.eigenvalues().iter().copied().collect(),
        lambda_k1: decomposition.lambda(k + 1),
        source_target_mass_ratio: mass_s / mass_t,
        c: options.c,
        tau_min: options.tau_min,
        verdicts,
    })
}

impl Verdict {
    /// Strict inequality: a zero margin fails.
    fn strict(self) -> Self {
        Verdict {
            holds: self.margin > 0.0,
            margin: self.margin,
        }
    }
}
