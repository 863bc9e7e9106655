//! Exhaustive checkers for the quantitative lemmas behind the transfer bounds.
//!
//! Every checker evaluates one inequality over all of its instances (cluster
//! pairs, vertices and powers `t`) and reports the smallest slack. An instance
//! counts as violated only when its slack is below `-LEMMA_TOL`.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{indicator_vector, SmoothingOperator};
use crate::error::{Error, Result};
use crate::graph::{DomainSpec, PositivePairGraph};
use crate::metrics::{self, RelativeExpansion};
use crate::pfa::epsilon_t;
use crate::spectral::{self, Representation};
use crate::tol::LEMMA_TOL;

const MAX_WITNESSES: usize = 16;
const DEFAULT_T_CAP: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    /// `g_iᵀL²g_i ≤ 2α²‖g_i‖²` for every cluster.
    LaplacianSquare,
    /// `(M^t g_i)_x ∈ [(1−tα)√w(x), √w(x)]` on `C_i`, `t ≤ 1/α`.
    InductionIn,
    /// `(M^t g_i)_x ∈ [0, tα√w(x)]` off `C_i`, `t ≤ 1/α`.
    InductionOut,
    /// `(M^t g_{S_i} − M^t g_{S_j})_x ≥ (ρ/4)√w(x)` on `T_i`, `1 ≤ t ≤ ρ/(8α²)`.
    InductionTarget,
    /// `‖M^t g_i − (F̃F̃ᵀ)^t g_i‖² ≤ ε_t·2α²/λ_{k+1}²·‖g_i‖²`.
    PowerTError,
    /// `λ_{T_i} ≥ γ_i²/2` with exact conductance.
    RestrictedCheeger,
    /// Lower bound on `M^t g_{S_i}` over `T_i` up to an explicit remainder `Δ_i`.
    MultistepRho,
    /// `Σ_{x∈T_i} √w(x)(M^t g_{S_j})_x ≤ (t²α² + tβ_ij)·P_X(T_i)`, `t ≤ 1/α`.
    MultistepBeta,
}

impl LemmaId {
    pub const ALL: [LemmaId; 8] = [
        LemmaId::LaplacianSquare,
        LemmaId::InductionIn,
        LemmaId::InductionOut,
        LemmaId::InductionTarget,
        LemmaId::PowerTError,
        LemmaId::RestrictedCheeger,
        LemmaId::MultistepRho,
        LemmaId::MultistepBeta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::LaplacianSquare => "laplacian_square",
            LemmaId::InductionIn => "induction_in",
            LemmaId::InductionOut => "induction_out",
            LemmaId::InductionTarget => "induction_target",
            LemmaId::PowerTError => "power_t_error",
            LemmaId::RestrictedCheeger => "restricted_cheeger",
            LemmaId::MultistepRho => "multistep_rho",
            LemmaId::MultistepBeta => "multistep_beta",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown lemma `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum LemmaVerdict {
    Holds,
    Violated,
    NotApplicable(String),
}

/// One checked instance. Fields that do not index this lemma are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub x: Option<usize>,
    pub t: Option<u32>,
    pub margin: f64,
}

impl Witness {
    fn at(i: usize, margin: f64) -> Self {
        Witness {
            i: Some(i),
            j: None,
            x: None,
            t: None,
            margin,
        }
    }

    fn with_j(mut self, j: usize) -> Self {
        self.j = Some(j);
        self
    }

    fn with_x(mut self, x: usize) -> Self {
        self.x = Some(x);
        self
    }

    fn with_t(mut self, t: u32) -> Self {
        self.t = Some(t);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub lemma_id: LemmaId,
    pub verdict: LemmaVerdict,
    /// Smallest slack over all instances; `None` if nothing was checked.
    pub worst_margin: Option<f64>,
    pub instances: usize,
    /// Violating instances (at most a handful), or the tightest one when none fail.
    pub witnesses: Vec<Witness>,
}

impl LemmaReport {
    /// True unless some instance was violated.
    pub fn holds(&self) -> bool {
        self.verdict != LemmaVerdict::Violated
    }

    pub fn is_applicable(&self) -> bool {
        !matches!(self.verdict, LemmaVerdict::NotApplicable(_))
    }

    fn not_applicable(lemma_id: LemmaId, reason: impl Into<String>) -> Self {
        LemmaReport {
            lemma_id,
            verdict: LemmaVerdict::NotApplicable(reason.into()),
            worst_margin: None,
            instances: 0,
            witnesses: Vec::new(),
        }
    }
}

struct Tally {
    id: LemmaId,
    worst: Option<Witness>,
    instances: usize,
    violations: Vec<Witness>,
}

impl Tally {
    fn new(id: LemmaId) -> Self {
        Tally {
            id,
            worst: None,
            instances: 0,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, w: Witness) {
        self.instances += 1;
        if self.worst.is_none_or(|cur| w.margin < cur.margin) {
            self.worst = Some(w);
        }
        if w.margin < -LEMMA_TOL && self.violations.len() < MAX_WITNESSES {
            self.violations.push(w);
        }
    }

    fn finish(self, empty_reason: &str) -> LemmaReport {
        let Some(worst) = self.worst else {
            return LemmaReport::not_applicable(self.id, empty_reason);
        };
        let violated = !self.violations.is_empty();
        LemmaReport {
            lemma_id: self.id,
            verdict: if violated {
                LemmaVerdict::Violated
            } else {
                LemmaVerdict::Holds
            },
            worst_margin: Some(worst.margin),
            instances: self.instances,
            witnesses: if violated { self.violations } else { vec![worst] },
        }
    }
}

/// `[0, min(⌊1/α⌋, 50)]`.
pub fn default_t_range(alpha: f64) -> RangeInclusive<u32> {
    let cap = if alpha > 0.0 {
        (1.0 / alpha).floor().min(DEFAULT_T_CAP as f64) as u32
    } else {
        DEFAULT_T_CAP
    };
    0..=cap
}

/// Shared state for checking several lemmas on one instance.
pub struct LemmaChecker<'a> {
    graph: &'a PositivePairGraph,
    domain: &'a DomainSpec,
    rep: Option<&'a Representation>,
    smoothing: SmoothingOperator,
    alpha: f64,
    relative: RelativeExpansion,
    exact_cap: usize,
}

impl<'a> LemmaChecker<'a> {
    pub fn new(graph: &'a PositivePairGraph, domain: &'a DomainSpec) -> Result<Self> {
        if domain.n() != graph.n() {
            return Err(Error::DimensionMismatch {
                expected: graph.n(),
                found: domain.n(),
            });
        }
        let alpha = metrics::compute_alpha(graph, domain.clusters())?;
        let relative = if domain.r() > 0 {
            metrics::compute_rho(graph, domain, metrics::DEFAULT_C)?
        } else {
            RelativeExpansion {
                rho: 0.0,
                beta_max: 0.0,
                alpha,
                c: metrics::DEFAULT_C,
                verdict: metrics::Verdict::from_margin(-1.0),
            }
        };
        Ok(LemmaChecker {
            graph,
            domain,
            rep: None,
            smoothing: SmoothingOperator::new(graph),
            alpha,
            relative,
            exact_cap: metrics::DEFAULT_EXACT_CAP,
        })
    }

    /// Representation used by `power_t_error`.
    pub fn with_representation(mut self, rep: &'a Representation) -> Self {
        self.rep = Some(rep);
        self
    }

    /// Cluster-size cap for the exact conductance in `restricted_cheeger`.
    pub fn with_exact_cap(mut self, cap: usize) -> Self {
        self.exact_cap = cap;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn default_t_range(&self) -> RangeInclusive<u32> {
        default_t_range(self.alpha)
    }

    pub fn check(&self, id: LemmaId, t_range: RangeInclusive<u32>) -> Result<LemmaReport> {
        match id {
            LemmaId::LaplacianSquare => Ok(self.laplacian_square()),
            LemmaId::InductionIn | LemmaId::InductionOut => Ok(self.induction(id, t_range)),
            LemmaId::InductionTarget => Ok(self.induction_target(t_range)),
            LemmaId::PowerTError => self.power_t_error(t_range),
            LemmaId::RestrictedCheeger => self.restricted_cheeger(),
            LemmaId::MultistepRho => self.multistep_rho(t_range),
            LemmaId::MultistepBeta => Ok(self.multistep_beta(t_range)),
        }
    }

    /// Every lemma over the default range.
    pub fn check_all(&self) -> Result<Vec<LemmaReport>> {
        LemmaId::ALL
            .into_iter()
            .map(|id| self.check(id, self.default_t_range()))
            .collect()
    }

    fn sqrt_w(&self, x: usize) -> f64 {
        self.graph.marginal(x).sqrt()
    }

    /// Powers in `range` that also satisfy `t ≤ 1/α`.
    fn within_inverse_alpha(&self, range: &RangeInclusive<u32>) -> RangeInclusive<u32> {
        let end = if self.alpha > 0.0 {
            (*range.end() as f64).min((1.0 / self.alpha).floor()) as u32
        } else {
            *range.end()
        };
        *range.start()..=end
    }

    fn laplacian_square(&self) -> LemmaReport {
        let mut tally = Tally::new(LemmaId::LaplacianSquare);
        let lap = spectral::laplacian(self.graph);
        for (i, cluster) in self.domain.clusters().iter().enumerate() {
            let g = indicator_vector(self.graph, cluster);
            let lg = &lap * &g;
            let margin = 2.0 * self.alpha * self.alpha * g.norm_squared() - lg.norm_squared();
            tally.record(Witness::at(i, margin));
        }
        tally.finish("no clusters")
    }

    fn induction(&self, id: LemmaId, t_range: RangeInclusive<u32>) -> LemmaReport {
        let mut tally = Tally::new(id);
        let range = self.within_inverse_alpha(&t_range);
        if range.is_empty() {
            return tally.finish("no t in range with t ≤ 1/α");
        }
        let a = self.alpha;
        for (i, cluster) in self.domain.clusters().iter().enumerate() {
            let mask = cluster.mask(self.graph.n());
            let traj = self.smoothing.trajectory(&indicator_vector(self.graph, cluster), *range.end());
            for t in range.clone() {
                let v = &traj[t as usize];
                let tf = t as f64;
                for x in 0..self.graph.n() {
                    let s = self.sqrt_w(x);
                    let margin = match (id, mask[x]) {
                        (LemmaId::InductionIn, true) => (v[x] - (1.0 - tf * a) * s).min(s - v[x]),
                        (LemmaId::InductionOut, false) => v[x].min(tf * a * s - v[x]),
                        _ => continue,
                    };
                    tally.record(Witness::at(i, margin).with_x(x).with_t(t));
                }
            }
        }
        tally.finish("no vertices to check")
    }

    fn source_trajectories(&self, t_max: u32) -> Vec<Vec<DVector<f64>>> {
        (0..self.domain.r())
            .map(|i| {
                let g = indicator_vector(self.graph, self.domain.source(i));
                self.smoothing.trajectory(&g, t_max)
            })
            .collect()
    }

    fn induction_target(&self, t_range: RangeInclusive<u32>) -> LemmaReport {
        let id = LemmaId::InductionTarget;
        let r = self.domain.r();
        let rel = &self.relative;
        if r < 2 {
            return LemmaReport::not_applicable(id, "needs at least two classes");
        }
        if self.alpha <= 0.0 {
            return LemmaReport::not_applicable(id, "α = 0");
        }
        if rel.rho < 8.0 * self.alpha * self.alpha || rel.rho < 8.0 * rel.beta_max {
            return LemmaReport::not_applicable(id, "relative expansion with c = 8 fails");
        }
        if rel.rho > self.alpha {
            return LemmaReport::not_applicable(id, "ρ > α");
        }
        let upper = (rel.rho / (8.0 * self.alpha * self.alpha)).floor().min(*t_range.end() as f64) as u32;
        let lower = (*t_range.start()).max(1);
        if lower > upper {
            return LemmaReport::not_applicable(id, "no t in [1, ρ/(8α²)] within range");
        }
        let traj = self.source_trajectories(upper);
        let mut tally = Tally::new(id);
        for t in lower..=upper {
            for i in 0..r {
                for j in (0..r).filter(|&j| j != i) {
                    let (vi, vj) = (&traj[i][t as usize], &traj[j][t as usize]);
                    for x in self.domain.target(i).iter() {
                        let margin = vi[x] - vj[x] - rel.rho / 4.0 * self.sqrt_w(x);
                        tally.record(Witness::at(i, margin).with_j(j).with_x(x).with_t(t));
                    }
                }
            }
        }
        tally.finish("no instances")
    }

    fn power_t_error(&self, t_range: RangeInclusive<u32>) -> Result<LemmaReport> {
        let id = LemmaId::PowerTError;
        let Some(rep) = self.rep else {
            return Ok(LemmaReport::not_applicable(id, "no representation supplied"));
        };
        if rep.sigma() != Some(2.0) {
            return Ok(LemmaReport::not_applicable(id, "representation is not the σ = 2 minimizer"));
        }
        let n = self.graph.n();
        let k = rep.k();
        if k >= n {
            return Ok(LemmaReport::not_applicable(id, "k = n leaves no λ_{k+1}"));
        }
        let lambda = spectral::decompose(self.graph)?.lambda(k + 1);
        if lambda <= 0.0 {
            return Ok(LemmaReport::not_applicable(id, "λ_{k+1} = 0"));
        }
        let lower = (*t_range.start()).max(1);
        let upper = *t_range.end();
        let mut tally = Tally::new(id);
        for (i, cluster) in self.domain.clusters().iter().enumerate() {
            let g = indicator_vector(self.graph, cluster);
            let norm2 = g.norm_squared();
            let traj = self.smoothing.trajectory(&g, upper);
            let ft = rep.weighted();
            let gram = ft.transpose() * ft;
            let mut low = ft.transpose() * &g;
            for t in 1..=upper {
                if t > 1 {
                    low = &gram * low;
                }
                if t < lower {
                    continue;
                }
                let diff = (&traj[t as usize] - ft * &low).norm_squared();
                let bound = epsilon_t(lambda, t) * 2.0 * self.alpha * self.alpha / (lambda * lambda) * norm2;
                tally.record(Witness::at(i, bound - diff).with_t(t));
            }
        }
        Ok(tally.finish("no t ≥ 1 in range"))
    }

    fn restricted_cheeger(&self) -> Result<LemmaReport> {
        let mut tally = Tally::new(LemmaId::RestrictedCheeger);
        for i in 0..self.domain.r() {
            let t_i = self.domain.target(i);
            if t_i.len() < 2 || t_i.len() > self.exact_cap {
                continue;
            }
            let Ok(gap) = metrics::restricted_gap(self.graph, t_i) else {
                continue;
            };
            let gamma = metrics::exact_conductance(self.graph, t_i)?;
            tally.record(Witness::at(i, gap - gamma * gamma / 2.0));
        }
        Ok(tally.finish("no target class with a valid restriction and exact conductance"))
    }

    fn multistep_rho(&self, t_range: RangeInclusive<u32>) -> Result<LemmaReport> {
        let id = LemmaId::MultistepRho;
        let r = self.domain.r();
        let lower = (*t_range.start()).max(1);
        let upper = *t_range.end();
        if r == 0 || lower > upper {
            return Ok(LemmaReport::not_applicable(id, "no classes or no t ≥ 1 in range"));
        }
        let a = spectral::normalized_adjacency(self.graph);
        let traj = self.source_trajectories(upper);
        let mut tally = Tally::new(id);
        for (i, traj_i) in traj.iter().enumerate().take(r) {
            let t_i = self.domain.target(i);
            let Ok(restricted) = self.graph.restrict(t_i) else {
                continue;
            };
            let Some(gap) = spectral::restricted_spectral_gap(&restricted)? else {
                continue;
            };
            let members = t_i.members();
            let s = members.len();
            let a_t = spectral::restricted_normalized_adjacency(&restricted);
            let m_t = (DMatrix::identity(s, s) + a_t) * 0.5;
            let rho_i = metrics::expansion(self.graph, t_i, self.domain.source(i))?;
            let mass_t = self.graph.set_weight(t_i)?;

            let g = indicator_vector(self.graph, self.domain.source(i));
            let ag = &a * g;
            let y = DVector::from_iterator(s, members.iter().map(|&x| ag[x]));
            let u_hat = DVector::from_iterator(s, restricted.marginals().iter().map(|w| w.sqrt()));
            let v1 = &u_hat * (u_hat.dot(&y) / u_hat.norm_squared());
            let mut v2_power = y - v1;
            for t in 1..=upper {
                if t > 1 {
                    v2_power = &m_t * v2_power;
                }
                if t < lower {
                    continue;
                }
                let delta = &v2_power * (0.5 * (1.0 - self.alpha).powi(t as i32 - 1));
                let norm_bound = (1.0 - gap / 2.0).powi(2 * (t as i32 - 1)) * mass_t;
                tally.record(Witness::at(i, norm_bound - delta.norm_squared()).with_t(t));
                let v = &traj_i[t as usize];
                let lead = 0.5 * (1.0 - self.alpha).powi(t as i32) * rho_i;
                for (local, &x) in members.iter().enumerate() {
                    let margin = v[x] - lead * self.sqrt_w(x) - delta[local];
                    tally.record(Witness::at(i, margin).with_x(x).with_t(t));
                }
            }
        }
        Ok(tally.finish("no target class with a valid restriction"))
    }

    fn multistep_beta(&self, t_range: RangeInclusive<u32>) -> LemmaReport {
        let id = LemmaId::MultistepBeta;
        let r = self.domain.r();
        if r < 2 {
            return LemmaReport::not_applicable(id, "needs at least two classes");
        }
        let range = self.within_inverse_alpha(&t_range);
        if range.is_empty() {
            return LemmaReport::not_applicable(id, "no t in range with t ≤ 1/α");
        }
        let traj = self.source_trajectories(*range.end());
        let a2 = self.alpha * self.alpha;
        let mut tally = Tally::new(id);
        for i in 0..r {
            let t_i = self.domain.target(i);
            let mass_t = t_i.iter().map(|x| self.graph.marginal(x)).sum::<f64>();
            for j in (0..r).filter(|&j| j != i) {
                let beta = self.graph.cut_weight(t_i, self.domain.source(j)) / mass_t;
                for t in range.clone() {
                    let v = &traj[j][t as usize];
                    let lhs: f64 = t_i.iter().map(|x| self.sqrt_w(x) * v[x]).sum();
                    let tf = t as f64;
                    let margin = (tf * tf * a2 + tf * beta) * mass_t - lhs;
                    tally.record(Witness::at(i, margin).with_j(j).with_t(t));
                }
            }
        }
        tally.finish("no instances")
    }
}

/// Checks one lemma on one instance. `t_range` defaults to [`default_t_range`].
pub fn check_lemma(
    graph: &PositivePairGraph,
    domain: &DomainSpec,
    rep: &Representation,
    id: LemmaId,
    t_range: Option<RangeInclusive<u32>>,
) -> Result<LemmaReport> {
    let checker = LemmaChecker::new(graph, domain)?.with_representation(rep);
    let range = t_range.unwrap_or_else(|| checker.default_t_range());
    checker.check(id, range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Normalization, VertexSet};

    fn disconnected() -> (PositivePairGraph, DomainSpec) {
        let g = PositivePairGraph::from_edges(
            6,
            &[(0, 1, 0.2), (2, 3, 0.15), (4, 5, 0.15)],
            Normalization::Strict,
        )
        .unwrap();
        let d = DomainSpec::new(6, vec![VertexSet::new([0, 1]), VertexSet::new([2, 3]), VertexSet::new([4, 5])], 1).unwrap();
        (g, d)
    }

    #[test]
    fn names_round_trip() {
        for id in LemmaId::ALL {
            assert_eq!(id.name().parse::<LemmaId>().unwrap(), id);
        }
        assert!("nope".parse::<LemmaId>().is_err());
    }

    #[test]
    fn default_range_caps() {
        assert_eq!(default_t_range(0.0), 0..=50);
        assert_eq!(default_t_range(0.3), 0..=3);
        assert_eq!(default_t_range(0.001), 0..=50);
    }

    #[test]
    fn disconnected_clusters_have_zero_laplacian_square() {
        let (g, d) = disconnected();
        let rep = spectral::minimize_loss(&g, 3, 2.0).unwrap();
        let report = check_lemma(&g, &d, &rep, LemmaId::LaplacianSquare, None).unwrap();
        assert_eq!(report.verdict, LemmaVerdict::Holds);
        assert!(report.worst_margin.unwrap().abs() < 1e-15);
    }

    #[test]
    fn one_class_gates_pairwise_lemmas() {
        let (g, d) = disconnected();
        let rep = spectral::minimize_loss(&g, 3, 2.0).unwrap();
        for id in [LemmaId::InductionTarget, LemmaId::MultistepBeta] {
            let report = check_lemma(&g, &d, &rep, id, None).unwrap();
            assert!(!report.is_applicable(), "{id}");
        }
    }

    #[test]
    fn all_lemmas_hold_on_disconnected_instance() {
        let (g, d) = disconnected();
        let rep = spectral::minimize_loss(&g, 3, 2.0).unwrap();
        let checker = LemmaChecker::new(&g, &d).unwrap().with_representation(&rep);
        for report in checker.check_all().unwrap() {
            assert!(report.holds(), "{report:?}");
        }
    }

    #[test]
    fn foreign_representation_skips_power_error() {
        let (g, d) = disconnected();
        let rep = Representation::from_features(&g, DMatrix::zeros(6, 2)).unwrap();
        let report = check_lemma(&g, &d, &rep, LemmaId::PowerTError, None).unwrap();
        assert!(!report.is_applicable());
    }
}
