//! Block-structured positive-pair graphs with designated source and target
//! classes.
//!
//! Clusters `0..r` are the source classes, `r..2r` the target classes and
//! any `extra_clusters` follow. Before normalization, two distinct vertices
//! are joined with weight
//!
//! | pair                        | weight                        |
//! |-----------------------------|-------------------------------|
//! | same cluster                | `p_intra` (per `intra_topology`) |
//! | `S_i`–`T_i`                 | `q_same`                      |
//! | `S_i`–`T_j`, `i ≠ j`        | `q_cross`                     |
//! | anything else               | `q_other`                     |
//!
//! There are no self-loops.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DomainSpec, Normalization, PositivePairGraph, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntraTopology {
    /// Every pair inside a cluster.
    Complete,
    /// A cycle plus `chords` random extra pairs per cluster.
    RingPlusChords { chords: usize },
    /// Two complete halves joined with weight `epsilon · p_intra`.
    TwoCommunities { epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbmParams {
    pub r: usize,
    pub cluster_size: usize,
    #[serde(default)]
    pub extra_clusters: usize,
    pub p_intra: f64,
    pub q_same: f64,
    pub q_cross: f64,
    pub q_other: f64,
    #[serde(default = "default_topology")]
    pub intra_topology: IntraTopology,
    #[serde(default)]
    pub seed: u64,
}

fn default_topology() -> IntraTopology {
    IntraTopology::Complete
}

/// Closed-form `α`, `ρ`, `β_max`, `τ` for the complete topology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedStats {
    pub alpha: f64,
    pub rho: f64,
    pub beta_max: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub graph: PositivePairGraph,
    pub domain: DomainSpec,
    /// Present only for the complete topology before any perturbation.
    pub predicted_stats: Option<PredictedStats>,
}

impl SbmParams {
    pub fn num_clusters(&self) -> usize {
        2 * self.r + self.extra_clusters
    }

    pub fn n(&self) -> usize {
        self.num_clusters() * self.cluster_size
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::DegenerateParams(msg));
        if self.r == 0 {
            return bad("r must be at least 1".into());
        }
        if self.cluster_size < 2 {
            return bad(format!("cluster_size must be at least 2, got {}", self.cluster_size));
        }
        for (name, v) in [
            ("p_intra", self.p_intra),
            ("q_same", self.q_same),
            ("q_cross", self.q_cross),
            ("q_other", self.q_other),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        if self.p_intra == 0.0 {
            return bad("p_intra must be positive".into());
        }
        if let IntraTopology::TwoCommunities { epsilon } = self.intra_topology {
            if !(epsilon.is_finite() && epsilon >= 0.0) {
                return bad(format!("epsilon must be finite and nonnegative, got {epsilon}"));
            }
        }
        Ok(())
    }

    /// Weight between distinct clusters `a` and `b`.
    fn block_weight(&self, a: usize, b: usize) -> f64 {
        let r = self.r;
        let class = |c: usize| (c < 2 * r).then_some((c % r, c < r));
        match (class(a), class(b)) {
            (Some((i, src_a)), Some((j, src_b))) if src_a != src_b => {
                if i == j {
                    self.q_same
                } else {
                    self.q_cross
                }
            }
            _ => self.q_other,
        }
    }

    fn predict(&self) -> Option<PredictedStats> {
        if self.intra_topology != IntraTopology::Complete {
            return None;
        }
        let s = self.cluster_size as f64;
        let r = self.r as f64;
        let m = self.num_clusters() as f64;
        let intra = (s - 1.0) * self.p_intra;
        // A class vertex sees one matching cluster, r − 1 crossing ones and m − r − 1 others.
        let same = s * self.q_same;
        let cross = (r - 1.0) * s * self.q_cross;
        let other = (m - r - 1.0) * s * self.q_other;
        let d_class = intra + same + cross + other;
        let leak_class = (same + cross + other) / d_class;
        let leak_extra = if self.extra_clusters > 0 {
            let out = (m - 1.0) * s * self.q_other;
            out / (intra + out)
        } else {
            0.0
        };
        let alpha = leak_class.max(leak_extra);
        let rho = same / d_class;
        let beta_max = if self.r > 1 { s * self.q_cross / d_class } else { 0.0 };
        let ratio = |num: f64, den: f64| {
            if num == 0.0 {
                0.0
            } else if den == 0.0 {
                f64::INFINITY
            } else {
                num / den
            }
        };
        let tau = ratio(rho, alpha * alpha).min(if self.r > 1 { ratio(rho, beta_max) } else { f64::INFINITY });
        Some(PredictedStats {
            alpha,
            rho,
            beta_max,
            tau,
        })
    }
}

/// Two classes of 50 vertices per domain, complete clusters, with
/// `ρ ≥ 8α²`, `ρ = 15·β_max` and `⌊ρ/(8α²)⌋ = 3`.
pub fn reference_sbm(seed: u64) -> SbmParams {
    SbmParams {
        r: 2,
        cluster_size: 50,
        extra_clusters: 0,
        p_intra: 1.0,
        q_same: 0.03,
        q_cross: 0.002,
        q_other: 0.002,
        intra_topology: IntraTopology::Complete,
        seed,
    }
}

pub fn generate_sbm(params: &SbmParams) -> Result<GeneratedInstance> {
    params.validate()?;
    let s = params.cluster_size;
    let m = params.num_clusters();
    let n = params.n();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut w = DMatrix::zeros(n, n);
    let set = |w: &mut DMatrix<f64>, x: usize, y: usize, v: f64| {
        w[(x, y)] = v;
        w[(y, x)] = v;
    };
    for a in 0..m {
        for b in (a + 1)..m {
            let v = params.block_weight(a, b);
            for x in a * s..(a + 1) * s {
                for y in b * s..(b + 1) * s {
                    set(&mut w, x, y, v);
                }
            }
        }
        let base = a * s;
        let p = params.p_intra;
        match params.intra_topology {
            IntraTopology::Complete => {
                for u in 0..s {
                    for v in (u + 1)..s {
                        set(&mut w, base + u, base + v, p);
                    }
                }
            }
            IntraTopology::RingPlusChords { chords } => {
                for u in 0..s {
                    set(&mut w, base + u, base + (u + 1) % s, p);
                }
                for _ in 0..chords {
                    let u = rng.random_range(0..s);
                    let v = rng.random_range(0..s);
                    if u != v {
                        set(&mut w, base + u, base + v, p);
                    }
                }
            }
            IntraTopology::TwoCommunities { epsilon } => {
                let half = s / 2;
                for u in 0..s {
                    for v in (u + 1)..s {
                        let weight = if (u < half) == (v < half) { p } else { epsilon * p };
                        set(&mut w, base + u, base + v, weight);
                    }
                }
            }
        }
    }
    let graph = PositivePairGraph::from_weights(w, Normalization::Rescale)?;
    let clusters = (0..m).map(|c| VertexSet::new(c * s..(c + 1) * s)).collect();
    let domain = DomainSpec::new(n, clusters, params.r)?;
    Ok(GeneratedInstance {
        graph,
        domain,
        predicted_stats: params.predict(),
    })
}

/// Multiplies every unordered pair weight by an independent factor drawn
/// uniformly from `[1 − noise, 1 + noise]` and renormalizes.
pub fn perturb(instance: &GeneratedInstance, noise: f64, seed: u64) -> Result<GeneratedInstance> {
    if !(noise.is_finite() && (0.0..=1.0).contains(&noise)) {
        return Err(Error::InvalidArgument(format!("noise must lie in [0, 1], got {noise}")));
    }
    if noise == 0.0 {
        return Ok(instance.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = instance.graph.weights().clone();
    let n = w.nrows();
    for x in 0..n {
        for y in x..n {
            if w[(x, y)] > 0.0 {
                let factor = 1.0 + noise * (2.0 * rng.random::<f64>() - 1.0);
                let v = w[(x, y)] * factor;
                w[(x, y)] = v;
                w[(y, x)] = v;
            }
        }
    }
    Ok(GeneratedInstance {
        graph: PositivePairGraph::from_weights(w, Normalization::Rescale)?,
        domain: instance.domain.clone(),
        predicted_stats: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_closed_form() {
        let p = reference_sbm(0).predict().unwrap();
        let d = 49.0 + 1.5 + 0.1 + 0.1;
        assert!((p.alpha - 1.7 / d).abs() < 1e-15);
        assert!((p.rho - 1.5 / d).abs() < 1e-15);
        assert!((p.beta_max - 0.1 / d).abs() < 1e-15);
        assert!((p.rho / p.beta_max - 15.0).abs() < 1e-12);
        assert_eq!((p.rho / (8.0 * p.alpha * p.alpha)).floor(), 3.0);
    }

    #[test]
    fn block_weights() {
        let p = reference_sbm(0);
        assert_eq!(p.block_weight(0, 2), 0.03);
        assert_eq!(p.block_weight(0, 3), 0.002);
        assert_eq!(p.block_weight(0, 1), 0.002);
        assert_eq!(p.block_weight(3, 1), 0.03);
    }

    #[test]
    fn degenerate_params() {
        let mut p = reference_sbm(0);
        p.cluster_size = 1;
        assert!(matches!(generate_sbm(&p), Err(Error::DegenerateParams(_))));
        let mut p = reference_sbm(0);
        p.q_cross = -1.0;
        assert!(matches!(generate_sbm(&p), Err(Error::DegenerateParams(_))));
        let mut p = reference_sbm(0);
        p.r = 0;
        assert!(matches!(generate_sbm(&p), Err(Error::DegenerateParams(_))));
    }

    #[test]
    fn sizes_and_mass() {
        let mut p = reference_sbm(0);
        p.cluster_size = 5;
        p.extra_clusters = 1;
        let inst = generate_sbm(&p).unwrap();
        assert_eq!(inst.graph.n(), 25);
        assert_eq!(inst.domain.num_clusters(), 5);
        assert!((inst.graph.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_noise_is_identity() {
        let mut p = reference_sbm(0);
        p.cluster_size = 4;
        let inst = generate_sbm(&p).unwrap();
        assert_eq!(perturb(&inst, 0.0, 9).unwrap(), inst);
        assert!(perturb(&inst, -0.1, 9).is_err());
        let noisy = perturb(&inst, 0.2, 9).unwrap();
        assert!(noisy.predicted_stats.is_none());
        assert_eq!(noisy, perturb(&inst, 0.2, 9).unwrap());
    }

    #[test]
    fn params_from_json() {
        let p: SbmParams = serde_json::from_str(
            r#"{"r": 2, "cluster_size": 10, "p_intra": 1, "q_same": 0.1, "q_cross": 0, "q_other": 0,
                "intra_topology": {"kind": "two_communities", "epsilon": 0.01}, "seed": 3}"#,
        )
        .unwrap();
        assert_eq!(p.intra_topology, IntraTopology::TwoCommunities { epsilon: 0.01 });
        assert_eq!(p.extra_clusters, 0);
    }
}
