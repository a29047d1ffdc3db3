//! Amortized-cost sweep over Δ.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::harness::run::{log3, run, Algorithm, RunConfig};
use crate::harness::workload::{generate_workload, GenConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchConfig {
    pub deltas: Vec<u32>,
    pub n: usize,
    /// Single-edge batches per Δ.
    pub updates: usize,
    /// Insert fraction. Pure insertion cannot reach 10⁵ updates at Δ = 9
    /// with n = 10⁴, so the default keeps some deletions.
    pub mix: f64,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { deltas: vec![9, 81, 729], n: 10_000, updates: 100_000, mix: 0.6, seed: 1, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchPoint {
    pub delta: u32,
    pub log3_delta: f64,
    pub updates: usize,
    pub total_work: u64,
    pub work_per_update: f64,
    /// work / (T · log₃Δ).
    pub normalized: f64,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub points: Vec<BenchPoint>,
    /// normalized(largest Δ) / normalized(smallest Δ).
    pub ratio: f64,
}

pub fn bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.deltas.is_empty() || cfg.updates == 0 {
        return Err(Error::Infeasible("bench needs at least one Δ and one update".into()));
    }
    let mut points = Vec::new();
    for &delta in &cfg.deltas {
        let gen = GenConfig { n: cfg.n, delta, batches: cfg.updates, batch_size: 1, mix: cfg.mix, seed: cfg.seed };
        let w = generate_workload(&gen)?;
        let out = run(&w, &RunConfig { exec: cfg.exec, ..RunConfig::new(Algorithm::Parallel, cfg.seed) })?;
        let r = out.report;
        points.push(BenchPoint {
            delta,
            log3_delta: log3(delta),
            updates: r.updates_applied,
            total_work: r.total_work,
            work_per_update: r.work_per_update,
            normalized: r.work_per_update_log,
            violations: r.violations,
        });
    }
    let lo = points.iter().min_by_key(|p| p.delta).unwrap().normalized;
    let hi = points.iter().max_by_key(|p| p.delta).unwrap().normalized;
    Ok(BenchReport { config: cfg.clone(), points, ratio: hi / lo })
}
