//! Replaying a workload through one algorithm and summarizing the run.

use serde::Serialize;
use serde_json::Value;

use crate::baselines::{BaselineMetrics, FolkloreState, RelaxedSequential};
use crate::error::Result;
use crate::exec::Exec;
use crate::graph::{pow3, Level};
use crate::harness::verify::{verify_proper, Violation};
use crate::harness::workload::Workload;
use crate::updater::{BatchMetrics, BatchUpdater, DropCounts, EdgeUpdate, UpdaterConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
pub enum Algorithm {
    #[value(name = "parallel")]
    #[serde(rename = "parallel")]
    Parallel,
    #[value(name = "relaxed-seq")]
    #[serde(rename = "relaxed-seq")]
    RelaxedSeq,
    #[value(name = "folklore-2delta")]
    #[serde(rename = "folklore-2delta")]
    Folklore2Delta,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
pub enum VerifyMode {
    #[default]
    #[value(name = "end")]
    #[serde(rename = "end")]
    End,
    #[value(name = "every-batch")]
    #[serde(rename = "every-batch")]
    EveryBatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub verify: VerifyMode,
    pub seed: u64,
    /// Compare the token ledger with a recount every this many batches and
    /// at the end; 0 disables. Parallel algorithm only.
    pub ledger_check: u64,
    pub per_batch: bool,
    pub exec: Exec,
    /// Full invariant audit inside every batch; slow.
    pub audit: bool,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        RunConfig {
            algorithm,
            verify: VerifyMode::End,
            seed,
            ledger_check: 0,
            per_batch: false,
            exec: Exec::default(),
            audit: false,
        }
    }
}

/// Summary of a run. Holds no timings, so identical inputs give identical
/// bytes whatever the thread count.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunReport {
    pub algorithm: Option<Algorithm>,
    pub n: usize,
    pub delta: u32,
    pub lambda: Level,
    pub seed: u64,
    pub batches: usize,
    pub updates_applied: usize,
    pub dropped: DropCounts,
    pub total_work: u64,
    pub work_per_update: f64,
    /// work / (updates · log₃Δ).
    pub work_per_update_log: f64,
    pub blank_initial: usize,
    pub recolored: usize,
    pub max_rounds: u64,
    pub injected_sixths: i64,
    pub released_sixths: i64,
    pub final_gamma_sixths: i64,
    /// Batches whose injection exceeded λ tokens per applied update.
    pub injection_violations: usize,
    pub raise_rounds: usize,
    pub raise_moved: usize,
    /// Mean over raise rounds of moved / active.
    pub raise_rate_mean: Option<f64>,
    pub raise_bound_failures: usize,
    pub lower_rounds: usize,
    pub lower_moved: usize,
    pub lower_rate_mean: Option<f64>,
    pub lower_bound_failures: usize,
    pub lower_refiltered: usize,
    pub raise_residual_violations: usize,
    pub mark_stability_violations: usize,
    pub ledger_checks: usize,
    pub ledger_mismatches: usize,
    pub important_clean: usize,
    pub important_dirty: usize,
    pub max_chain: usize,
    pub moves: usize,
    pub verify_scans: usize,
    pub violations: usize,
    /// The first few violations found.
    pub violation_samples: Vec<Violation>,
}

impl RunReport {
    pub fn is_ok(&self) -> bool {
        self.violations == 0 && self.ledger_mismatches == 0
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    pub report: RunReport,
    /// One JSON object per batch when requested.
    pub per_batch: Vec<Value>,
}

enum Engine {
    Parallel(BatchUpdater),
    Relaxed(RelaxedSequential),
    Folklore(FolkloreState),
}

impl Engine {
    fn violations(&self) -> Vec<Violation> {
        match self {
            Engine::Parallel(u) => verify_proper(u.graph()),
            Engine::Relaxed(r) => verify_proper(r),
            Engine::Folklore(f) => verify_proper(f),
        }
    }
}

const SAMPLE_LIMIT: usize = 16;

/// Sum over rounds of moved / active, and the number of rounds counted.
fn rate_sum<'a>(rounds: impl Iterator<Item = (usize, usize)> + 'a) -> (f64, usize) {
    rounds.filter(|&(active, _)| active > 0).fold((0.0, 0), |(s, k), (a, m)| (s + m as f64 / a as f64, k + 1))
}

struct Acc {
    raise_rate: (f64, usize),
    lower_rate: (f64, usize),
}

fn absorb_parallel(r: &mut RunReport, acc: &mut Acc, m: &BatchMetrics, lambda: Level) {
    r.total_work += m.total_work();
    r.blank_initial += m.blank_initial;
    r.recolored += m.recolored;
    r.injected_sixths += m.injected_sixths;
    r.released_sixths += m.released_sixths;
    if m.injected_sixths > 6 * lambda as i64 * m.applied as i64 {
        r.injection_violations += 1;
    }
    for s in &m.levels {
        r.max_rounds = r.max_rounds.max(s.rounds_marked).max(s.rounds_unmarked).max(s.rounds_raise).max(s.rounds_lower);
    }
    r.raise_rounds += m.raise_rounds.len();
    r.lower_rounds += m.lower_rounds.len();
    for x in &m.raise_rounds {
        r.raise_moved += x.moved;
        if x.moved > 0 && x.drop_sixths < 6 * pow3(x.target as u32 - 2) as i64 * x.moved as i64 {
            r.raise_bound_failures += 1;
        }
    }
    for x in &m.lower_rounds {
        r.lower_moved += x.moved;
        if x.moved > 0 && x.drop_sixths < 7 * pow3(x.level as u32 - 4) as i64 * x.moved as i64 {
            r.lower_bound_failures += 1;
        }
    }
    let (s, k) = rate_sum(m.raise_rounds.iter().map(|x| (x.active, x.moved)));
    acc.raise_rate = (acc.raise_rate.0 + s, acc.raise_rate.1 + k);
    let (s, k) = rate_sum(m.lower_rounds.iter().map(|x| (x.active, x.moved)));
    acc.lower_rate = (acc.lower_rate.0 + s, acc.lower_rate.1 + k);
    r.lower_refiltered += m.lower_refiltered;
    r.raise_residual_violations += m.raise_residual_violations;
    r.mark_stability_violations += m.mark_stability_violations;
    for e in m.records.iter().filter(|e| e.is_important()) {
        if e.dirty {
            r.important_dirty += 1;
        } else {
            r.important_clean += 1;
        }
    }
    r.final_gamma_sixths = m.gamma_sixths;
}

fn absorb_baseline(r: &mut RunReport, m: &BaselineMetrics) {
    r.total_work += m.work;
    r.blank_initial += m.blank_initial;
    r.recolored += m.recolored;
    r.max_rounds = r.max_rounds.max(m.rounds);
    r.max_chain = r.max_chain.max(m.max_chain);
    r.moves += m.moves;
}

/// Replays `w` with the configured algorithm. Library errors abort the run;
/// propriety violations and ledger mismatches are counted in the report.
pub fn run(w: &Workload, cfg: &RunConfig) -> Result<RunOutcome> {
    let mut engine = match cfg.algorithm {
        Algorithm::Parallel => {
            Engine::Parallel(BatchUpdater::new(w.n, w.delta, cfg.seed, UpdaterConfig { exec: cfg.exec, audit: cfg.audit })?)
        }
        Algorithm::RelaxedSeq => Engine::Relaxed(RelaxedSequential::new(w.n, w.delta, cfg.seed)?),
        Algorithm::Folklore2Delta => {
            let mut f = FolkloreState::new(w.n, w.delta, cfg.seed)?;
            f.set_exec(cfg.exec);
            Engine::Folklore(f)
        }
    };
    let lambda = crate::graph::lambda_for(w.delta);
    let mut out = RunOutcome::default();
    let r = &mut out.report;
    *r = RunReport {
        algorithm: Some(cfg.algorithm),
        n: w.n,
        delta: w.delta,
        lambda,
        seed: cfg.seed,
        batches: w.batches.len(),
        ..Default::default()
    };
    if let Engine::Parallel(u) = &engine {
        r.final_gamma_sixths = u.ledger().gamma_sixths();
    }
    let mut acc = Acc { raise_rate: (0.0, 0), lower_rate: (0.0, 0) };
    let record = |r: &mut RunReport, found: Vec<Violation>| {
        r.verify_scans += 1;
        r.violations += found.len();
        let room = SAMPLE_LIMIT.saturating_sub(r.violation_samples.len());
        r.violation_samples.extend(found.into_iter().take(room));
    };

    for (b, batch) in w.batches.iter().enumerate() {
        let (applied, dropped) = step(&mut engine, batch, r, &mut acc, lambda, cfg.per_batch.then_some(&mut out.per_batch))?;
        r.updates_applied += applied;
        r.dropped.add(&dropped);
        if cfg.verify == VerifyMode::EveryBatch {
            record(r, engine.violations());
        }
        if cfg.ledger_check > 0 && (b as u64 + 1) % cfg.ledger_check == 0 {
            check_ledger(&engine, r);
        }
    }
    if cfg.verify == VerifyMode::End || w.batches.is_empty() {
        record(r, engine.violations());
    }
    if cfg.ledger_check > 0 {
        check_ledger(&engine, r);
    }
    if r.updates_applied > 0 {
        r.work_per_update = r.total_work as f64 / r.updates_applied as f64;
        r.work_per_update_log = r.work_per_update / log3(w.delta);
    }
    r.raise_rate_mean = (acc.raise_rate.1 > 0).then(|| acc.raise_rate.0 / acc.raise_rate.1 as f64);
    r.lower_rate_mean = (acc.lower_rate.1 > 0).then(|| acc.lower_rate.0 / acc.lower_rate.1 as f64);
    Ok(out)
}

/// log₃Δ, floored at 1 so that tiny Δ does not blow up the normalization.
pub fn log3(delta: u32) -> f64 {
    (delta as f64).log(3.0).max(1.0)
}

fn step(
    engine: &mut Engine,
    batch: &[EdgeUpdate],
    r: &mut RunReport,
    acc: &mut Acc,
    lambda: Level,
    lines: Option<&mut Vec<Value>>,
) -> Result<(usize, DropCounts)> {
    let (applied, dropped, json) = match engine {
        Engine::Parallel(u) => {
            let m = u.apply_batch(batch)?;
            absorb_parallel(r, acc, &m, lambda);
            (m.applied, m.dropped, lines.is_some().then(|| serde_json::to_value(&m)))
        }
        Engine::Relaxed(x) => {
            let m = x.apply_batch(batch)?;
            absorb_baseline(r, &m);
            (m.applied, m.dropped, lines.is_some().then(|| serde_json::to_value(&m)))
        }
        Engine::Folklore(x) => {
            let m = x.apply_batch(batch)?;
            absorb_baseline(r, &m);
            (m.applied, m.dropped, lines.is_some().then(|| serde_json::to_value(&m)))
        }
    };
    if let (Some(lines), Some(v)) = (lines, json) {
        lines.push(v.expect("metrics serialize"));
    }
    Ok((applied, dropped))
}

fn check_ledger(engine: &Engine, r: &mut RunReport) {
    if let Engine::Parallel(u) = engine {
        r.ledger_checks += 1;
        if u.ledger().check(u.graph()).is_err() {
            r.ledger_mismatches += 1;
        }
    }
}
