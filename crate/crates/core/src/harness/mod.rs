//! End-to-end drivers behind the command-line tool: generation, verification
//! reports, embeddings, target-error sweeps and the gradient-descent
//! cross-check. Every function here is deterministic given its inputs.

mod gd;

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{self, SbmParams};
use crate::graph::{DomainSpec, PositivePairGraph};
use crate::io;
use crate::metrics::{self, GraphStats, ReportOptions};
use crate::oracles::{LemmaChecker, LemmaId, LemmaReport};
use crate::pfa;
use crate::spectral::{self, Representation};

pub use gd::{gd_crosscheck, GdConfig, GdReport, MAX_GD_VERTICES};

/// Exit code for input, output and argument errors.
pub const EXIT_ERROR: i32 = 2;

/// Writes a generated instance as a graph file.
pub fn cmd_generate(params: &SbmParams, out: &Path) -> Result<()> {
    let instance = generators::generate_sbm(params)?;
    io::save_graph(&instance.graph, Some(&instance.domain), out)
}

/// What makes a verification run fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyPolicy {
    /// Only violated lemmas fail the run.
    #[default]
    LemmasOnly,
    /// Violated lemmas or any failed assumption verdict fail the run.
    RequireAssumptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub policy: VerifyPolicy,
    pub passed: bool,
    pub stats: GraphStats,
    pub lemmas: Vec<LemmaReport>,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub k: usize,
    pub options: ReportOptions,
    pub policy: VerifyPolicy,
    pub lemmas: Vec<LemmaId>,
}

impl VerifyConfig {
    pub fn new(k: usize) -> Self {
        VerifyConfig {
            k,
            options: ReportOptions::default(),
            policy: VerifyPolicy::default(),
            lemmas: LemmaId::ALL.to_vec(),
        }
    }
}

/// Assumption report plus every requested lemma check on the `σ = 2`
/// minimizer of dimension `k`.
pub fn verify(graph: &PositivePairGraph, domain: &DomainSpec, config: &VerifyConfig) -> Result<VerifyReport> {
    let decomposition = spectral::decompose(graph)?;
    let stats = metrics::assumption_report_with(graph, domain, &decomposition, config.k, &config.options)?;
    let rep = Representation::from_decomposition(graph, &decomposition, config.k, 2.0)?;
    let checker = LemmaChecker::new(graph, domain)?
        .with_representation(&rep)
        .with_exact_cap(config.options.exact_cap);
    let lemmas = config
        .lemmas
        .iter()
        .map(|&id| checker.check(id, checker.default_t_range()))
        .collect::<Result<Vec<_>>>()?;
    let lemmas_hold = lemmas.iter().all(LemmaReport::holds);
    let v = &stats.verdicts;
    let assumptions_hold = v.cross_cluster.holds
        && v.intra_conductance.holds
        && v.relative_expansion.holds
        && v.average_relative_expansion.holds;
    let passed = match config.policy {
        VerifyPolicy::LemmasOnly => lemmas_hold,
        VerifyPolicy::RequireAssumptions => lemmas_hold && assumptions_hold,
    };
    Ok(VerifyReport {
        policy: config.policy,
        passed,
        stats,
        lemmas,
    })
}

pub fn cmd_verify(graph_path: &Path, config: &VerifyConfig, normalization: crate::Normalization) -> Result<VerifyReport> {
    let file = io::load_graph(graph_path, normalization)?;
    verify(&file.graph, file.domain()?, config)
}

/// Writes `vertex,f1,…,fk` rows for the closed-form minimizer.
pub fn write_embedding(rep: &Representation, out: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(out)?;
    let mut header = vec!["vertex".to_string()];
    header.extend((1..=rep.k()).map(|j| format!("f{j}")));
    writer.write_record(&header)?;
    for x in 0..rep.n() {
        let mut record = vec![x.to_string()];
        record.extend(rep.features().row(x).iter().map(|v| v.to_string()));
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::io(out, e))?;
    Ok(())
}

pub fn cmd_embed(graph_path: &Path, k: usize, sigma: f64, out: &Path, normalization: crate::Normalization) -> Result<()> {
    let file = io::load_graph(graph_path, normalization)?;
    let rep = spectral::minimize_loss(&file.graph, k, sigma)?;
    write_embedding(&rep, out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub t_values: Vec<u32>,
    pub k_values: Vec<usize>,
    pub sigma: f64,
    pub options: ReportOptions,
    /// Also add rows at `t_0, 2t_0, 4t_0` with `t_0 = ⌈log(1/α)/γ²⌉`.
    pub multistep_rows: bool,
}

impl SweepConfig {
    /// Sorts and deduplicates both lists; both must be nonempty and `t ≥ 1`.
    pub fn new(mut t_values: Vec<u32>, mut k_values: Vec<usize>) -> Result<Self> {
        t_values.sort_unstable();
        t_values.dedup();
        k_values.sort_unstable();
        k_values.dedup();
        if t_values.is_empty() || k_values.is_empty() {
            return Err(Error::InvalidArgument("sweep needs at least one t and one k".into()));
        }
        if t_values[0] == 0 {
            return Err(Error::InvalidArgument("t values must be at least 1".into()));
        }
        Ok(SweepConfig {
            t_values,
            k_values,
            sigma: 2.0,
            options: ReportOptions::default(),
            multistep_rows: true,
        })
    }
}

/// One row of the sweep CSV. Column order is fixed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: u32,
    pub k: usize,
    pub sigma: f64,
    pub target_error: f64,
    /// Numeric bound, `out_of_range` when `t ∉ [1, ρ/(8α²)]`, or `not_applicable`.
    pub bound_thm31: String,
    /// `true`/`false`, or the same marker as `bound_thm31`.
    pub bound_satisfied: String,
    /// Measured error over the structural conductance bound; only on its `t` rows.
    pub ratio_thm32: Option<f64>,
    pub alpha: f64,
    pub rho: f64,
    pub beta_max: f64,
    pub tau: f64,
    pub gamma_lower: f64,
    pub gamma_upper: f64,
    pub lambda_k1: f64,
    pub mass_ratio: f64,
}

impl SweepRow {
    /// `Some(verdict)` when the transfer bound applies to this row.
    pub fn bound_verdict(&self) -> Option<bool> {
        self.bound_satisfied.parse().ok()
    }
}

/// `t` values for the conductance-based bound: `t_0, 2t_0, 4t_0`.
pub fn multistep_t_values(alpha: f64, gamma: f64) -> Vec<u32> {
    match pfa::multistep_base_t(alpha, gamma) {
        Some(t0) => [1u32, 2, 4].iter().filter_map(|&m| t0.checked_mul(m)).collect(),
        None => Vec::new(),
    }
}

pub fn run_sweep(graph: &PositivePairGraph, domain: &DomainSpec, config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let n = graph.n();
    if let Some(&k) = config.k_values.iter().find(|&&k| k == 0 || k >= n) {
        return Err(Error::InvalidArgument(format!("k must lie in [1, {n}), got {k}")));
    }
    let decomposition = spectral::decompose(graph)?;
    let stats = metrics::assumption_report_with(graph, domain, &decomposition, config.k_values[0], &config.options)?;
    let gamma_lower = stats.gamma.lower();
    let multistep_ts = if config.multistep_rows {
        multistep_t_values(stats.alpha, gamma_lower)
    } else {
        Vec::new()
    };
    let mut t_values = config.t_values.clone();
    t_values.extend(&multistep_ts);
    t_values.sort_unstable();
    t_values.dedup();

    let t_max = pfa::transfer_t_max(stats.alpha, stats.rho);
    let bound_applies = config.sigma == 2.0 && stats.verdicts.relative_expansion.holds && stats.rho > 0.0;
    let structural =
        pfa::multistep_structural_bound(domain.r(), stats.alpha, stats.tau, gamma_lower);

    let mut rows = Vec::new();
    for &k in &config.k_values {
        let lambda_k1 = decomposition.lambda(k + 1);
        let rep = Representation::from_decomposition(graph, &decomposition, k, config.sigma)?;
        let classifier = pfa::fit_pfa(&rep, graph, domain)?;
        for &t in &t_values {
            let report = classifier.target_error(&rep, graph, domain, t)?;
            let in_range = t_max.is_none_or(|max| u64::from(t) <= max);
            let (bound, satisfied) = if !bound_applies || lambda_k1 <= 0.0 {
                ("not_applicable".to_string(), "not_applicable".to_string())
            } else if !in_range {
                ("out_of_range".to_string(), "out_of_range".to_string())
            } else {
                let b = pfa::transfer_bound(
                    stats.alpha,
                    stats.rho,
                    lambda_k1,
                    domain.r(),
                    stats.source_target_mass_ratio,
                    t,
                );
                (b.to_string(), (report.target_error <= b).to_string())
            };
            rows.push(SweepRow {
                t,
                k,
                sigma: config.sigma,
                target_error: report.target_error,
                bound_thm31: bound,
                bound_satisfied: satisfied,
                ratio_thm32: multistep_ts.contains(&t).then(|| report.target_error / structural),
                alpha: stats.alpha,
                rho: stats.rho,
                beta_max: stats.beta_max,
                tau: stats.tau,
                gamma_lower,
                gamma_upper: stats.gamma.upper(),
                lambda_k1,
                mass_ratio: stats.source_target_mass_ratio,
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|e| Error::io("<sweep output>", e))?;
    Ok(())
}

pub fn cmd_sweep(graph_path: &Path, config: &SweepConfig, out: &Path, normalization: crate::Normalization) -> Result<Vec<SweepRow>> {
    let file = io::load_graph(graph_path, normalization)?;
    let rows = run_sweep(&file.graph, file.domain()?, config)?;
    let handle = fs::File::create(out).map_err(|e| Error::io(out, e))?;
    write_sweep_csv(&rows, handle)?;
    Ok(rows)
}

pub fn cmd_gd_crosscheck(graph_path: &Path, config: &GdConfig, normalization: crate::Normalization) -> Result<GdReport> {
    let file = io::load_graph(graph_path, normalization)?;
    gd_crosscheck(&file.graph, config)
}
