//! End-to-end driver: resolves k, s and m, runs the trials, refines every
//! enriched bucket and keeps the best candidate.
//!
//! Trial `i` (1-based) draws its projection from a ChaCha8 generator keyed by
//! `seed_from_u64(seed)` on stream `i - 1`, so any trial can be replayed on
//! its own and the outcome of a run does not depend on how trials are
//! scheduled. Candidates are ranked by score, then expectation (higher
//! first), then bucket key and trial number (lower first).

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{median_string, naive_mfp, DEFAULT_MEDIAN_LIMIT, DEFAULT_NAIVE_LIMIT};
use crate::projection::{
    enriched_buckets, hash_trial, num_trials, optimal_k, p_hat, sample_plan, threshold_for_lmers,
    Backend, ProjectionPlan, TrialParams, DEFAULT_DENSE_CAP, DEFAULT_THRESHOLD_FLOOR,
};
use crate::refine::{refine, RefinedCandidate, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use crate::seqcore::{generate_planted, SequenceSet};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_Q: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub l: usize,
    pub d: usize,
    pub k: Option<usize>,
    pub s: Option<usize>,
    pub m: Option<u64>,
    pub q: f64,
    pub t_hat: Option<usize>,
    pub threshold_floor: usize,
    pub seed: u64,
    /// Worker threads; `None` runs on the ambient rayon pool.
    pub workers: Option<usize>,
    pub backend: Backend,
    pub dense_cap: u64,
    pub max_em_iters: usize,
    pub em_tol: f64,
    /// Stop after the first trial whose best candidate scores l·t.
    pub early_stop: bool,
    /// Use this projection in every trial instead of sampling one.
    pub plan: Option<ProjectionPlan>,
}

impl RunConfig {
    pub fn new(l: usize, d: usize) -> Self {
        RunConfig {
            l,
            d,
            k: None,
            s: None,
            m: None,
            q: DEFAULT_Q,
            t_hat: None,
            threshold_floor: DEFAULT_THRESHOLD_FLOOR,
            seed: 0,
            workers: None,
            backend: Backend::Auto,
            dense_cap: DEFAULT_DENSE_CAP,
            max_em_iters: DEFAULT_MAX_ITERS,
            em_tol: DEFAULT_TOL,
            early_stop: true,
            plan: None,
        }
    }
}

/// Fills in k, s and m that the config leaves open.
pub fn resolve_params(config: &RunConfig, seqs: &SequenceSet) -> Result<TrialParams> {
    let (l, d) = (config.l, config.d);
    seqs.check_len(l)?;
    if d >= l {
        return Err(Error::InvalidParams(format!(
            "d = {d} must be below l = {l}"
        )));
    }
    let k = match (&config.plan, config.k) {
        (Some(plan), Some(k)) if plan.k() != k => {
            return Err(Error::InvalidParams(format!(
                "fixed plan keeps {} columns but k = {k}",
                plan.k()
            )))
        }
        (Some(plan), _) if plan.l() != l => {
            return Err(Error::InvalidParams(format!(
                "fixed plan is for l = {}",
                plan.l()
            )))
        }
        (Some(plan), _) => plan.k(),
        (None, Some(k)) => k,
        (None, None) => optimal_k(l, d)?,
    };
    if k == 0 || k > l {
        return Err(Error::InvalidParams(format!("k = {k} must be in 1..={l}")));
    }
    let t = seqs.len();
    let s = config.s.unwrap_or_else(|| {
        threshold_for_lmers(
            seqs.lmer_count(l),
            k,
            seqs.alphabet().len(),
            config.threshold_floor,
        )
    });
    let t_hat = config.t_hat.unwrap_or(t);
    let m = match config.m {
        Some(m) => m,
        None => {
            if !(config.q > 0.0 && config.q < 1.0) {
                return Err(Error::InvalidParams(format!(
                    "q = {} must be in (0, 1)",
                    config.q
                )));
            }
            num_trials(config.q, t_hat as u64, p_hat(l, d, k), s as u64)?
        }
    };
    let params = TrialParams {
        l,
        d,
        k,
        s,
        m,
        q: config.q,
        t_hat,
    };
    params.validate(t)?;
    Ok(params)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best: RefinedCandidate,
    /// 1-based trial that produced `best`
    pub best_trial: u64,
    pub trials_run: u64,
    pub enriched_buckets_total: u64,
    pub params: TrialParams,
    pub seed: u64,
    pub wall_time: Duration,
}

struct TrialOutcome {
    enriched: usize,
    best: Option<RefinedCandidate>,
}

/// Ordering of candidates, `Greater` meaning better.
fn rank(a: &RefinedCandidate, b: &RefinedCandidate) -> Ordering {
    a.score
        .cmp(&b.score)
        .then(a.expectation.total_cmp(&b.expectation))
        .then(b.source_bucket.cmp(&a.source_bucket))
}

/// Generator for trial `index` (0-based).
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn run_trial(
    config: &RunConfig,
    params: &TrialParams,
    seqs: &SequenceSet,
    index: u64,
) -> Result<TrialOutcome> {
    let plan = match &config.plan {
        Some(p) => p.clone(),
        None => sample_plan(params.l, params.k, &mut trial_rng(config.seed, index))?,
    };
    let grouping = hash_trial(seqs, params.l, &plan, config.backend, config.dense_cap)?;
    let buckets = enriched_buckets(&grouping, params.s, params.r_cap(seqs.len()));
    let candidates = buckets
        .par_iter()
        .map(|b| refine(b, seqs, params.l, config.max_em_iters, config.em_tol))
        .collect::<Result<Vec<_>>>()?;
    let best = candidates
        .into_iter()
        .reduce(|a, b| if rank(&b, &a).is_gt() { b } else { a });
    Ok(TrialOutcome {
        enriched: buckets.len(),
        best,
    })
}

/// wasm32-unknown-unknown has no clock, so timings read as zero there.
#[cfg(not(target_arch = "wasm32"))]
fn stopwatch() -> impl Fn() -> Duration {
    let start = std::time::Instant::now();
    move || start.elapsed()
}

#[cfg(target_arch = "wasm32")]
fn stopwatch() -> impl Fn() -> Duration {
    || Duration::ZERO
}

pub fn run(config: &RunConfig, seqs: &SequenceSet) -> Result<RunResult> {
    let started = stopwatch();
    let params = resolve_params(config, seqs)?;
    let work = || run_trials(config, &params, seqs);
    let mut result = match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParams(format!("cannot start {n} workers: {e}")))?
            .install(work),
        None => work(),
    }?;
    result.wall_time = started();
    Ok(result)
}

fn run_trials(config: &RunConfig, params: &TrialParams, seqs: &SequenceSet) -> Result<RunResult> {
    let perfect = (params.l * seqs.len()) as u32;
    let chunk = rayon::current_num_threads().max(1) as u64;
    let mut best: Option<(RefinedCandidate, u64)> = None;
    let mut trials_run = 0;
    let mut enriched_total = 0;
    let mut next = 0;
    'trials: while next < params.m {
        let end = (next + chunk).min(params.m);
        let outcomes = (next..end)
            .into_par_iter()
            .map(|i| run_trial(config, params, seqs, i))
            .collect::<Result<Vec<_>>>()?;
        for (i, outcome) in (next..end).zip(outcomes) {
            trials_run += 1;
            enriched_total += outcome.enriched as u64;
            if let Some(cand) = outcome.best {
                if best.as_ref().is_none_or(|(b, _)| rank(&cand, b).is_gt()) {
                    best = Some((cand, i + 1));
                }
            }
            if config.early_stop && best.as_ref().is_some_and(|(b, _)| b.score == perfect) {
                break 'trials;
            }
        }
        next = end;
    }
    let (best, best_trial) = best.ok_or(Error::NoEnrichedBuckets { trials: trials_run })?;
    Ok(RunResult {
        best,
        best_trial,
        trials_run,
        enriched_buckets_total: enriched_total,
        params: *params,
        seed: config.seed,
        wall_time: Duration::ZERO,
    })
}

#[derive(Serialize)]
struct Report<'a> {
    version: u32,
    params: ReportParams,
    best: ReportBest<'a>,
    stats: ReportStats,
}

#[derive(Serialize)]
struct ReportParams {
    l: usize,
    d: usize,
    k: usize,
    s: usize,
    m: u64,
    q: f64,
    seed: u64,
}

#[derive(Serialize)]
struct ReportBest<'a> {
    motif: String,
    score: u32,
    expectation: f64,
    positions: &'a [usize],
    source_bucket: u64,
    trial: u64,
}

#[derive(Serialize)]
struct ReportStats {
    trials_run: u64,
    buckets_enriched: u64,
    wall_ms: u64,
}

impl RunResult {
    pub fn motif(&self) -> String {
        String::from_utf8_lossy(&self.best.consensus).into_owned()
    }

    fn wall_ms(&self, timing: bool) -> u64 {
        if timing {
            self.wall_time.as_millis() as u64
        } else {
            0
        }
    }

    /// Result document; with `timing` off, `wall_ms` is written as 0 so the
    /// output depends only on the input, parameters and seed.
    pub fn to_json(&self, timing: bool) -> String {
        let p = &self.params;
        let report = Report {
            version: SCHEMA_VERSION,
            params: ReportParams {
                l: p.l,
                d: p.d,
                k: p.k,
                s: p.s,
                m: p.m,
                q: p.q,
                seed: self.seed,
            },
            best: ReportBest {
                motif: self.motif(),
                score: self.best.score,
                expectation: self.best.expectation,
                positions: self.best.positions.as_slice(),
                source_bucket: self.best.source_bucket,
                trial: self.best_trial,
            },
            stats: ReportStats {
                trials_run: self.trials_run,
                buckets_enriched: self.enriched_buckets_total,
                wall_ms: self.wall_ms(timing),
            },
        };
        serde_json::to_string_pretty(&report).expect("plain data serializes")
    }

    pub fn to_tsv(&self, timing: bool) -> String {
        let p = &self.params;
        let positions: Vec<String> = self.best.positions.iter().map(usize::to_string).collect();
        format!(
            "motif\tscore\texpectation\tpositions\tsource_bucket\ttrial\tl\td\tk\ts\tm\tq\tseed\ttrials_run\tbuckets_enriched\twall_ms\n\
             {}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            self.motif(),
            self.best.score,
            self.best.expectation,
            positions.join(","),
            self.best.source_bucket,
            self.best_trial,
            p.l,
            p.d,
            p.k,
            p.s,
            p.m,
            p.q,
            self.seed,
            self.trials_run,
            self.enriched_buckets_total,
            self.wall_ms(timing),
        )
    }
}

/// Planted instances small enough for both exhaustive solvers.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub instances: usize,
    pub t: usize,
    pub n: usize,
    pub l: usize,
    pub d: usize,
    /// Instance `i` (0-based) is generated, and run, with `seed + i`.
    pub seed: u64,
    /// Template for each projection run; `l`, `d` and `seed` are overwritten.
    pub run: RunConfig,
    pub naive_limit: u128,
    pub median_limit: u128,
}

impl BenchConfig {
    /// Defaults the bucket threshold to t: at oracle scale the
    /// twice-the-mean rule asks for more hits than there are sequences.
    pub fn new(instances: usize, t: usize, n: usize, l: usize, d: usize, seed: u64) -> Self {
        let mut run = RunConfig::new(l, d);
        run.s = Some(t);
        BenchConfig {
            instances,
            t,
            n,
            l,
            d,
            seed,
            run,
            naive_limit: DEFAULT_NAIVE_LIMIT,
            median_limit: DEFAULT_MEDIAN_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: usize,
    pub seed: u64,
    pub planted: String,
    /// `None` when no trial produced an enriched bucket
    pub run_score: Option<u32>,
    pub run_motif: Option<String>,
    pub naive_score: u32,
    pub naive_motif: String,
    pub median_distance: usize,
    pub median_motif: String,
    /// run() reached the exhaustive optimum
    pub agree: bool,
    /// naive score = l·t − median distance
    pub duality: bool,
    pub run_ms: f64,
    pub naive_ms: f64,
    pub median_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

pub fn benchmark(config: &BenchConfig) -> Result<BenchReport> {
    let mut rows = Vec::with_capacity(config.instances);
    for instance in 0..config.instances {
        let seed = config.seed.wrapping_add(instance as u64);
        let inst = generate_planted(config.t, config.n, config.l, config.d, seed)?;
        let seqs = &inst.sequences;

        let mut run_cfg = config.run.clone();
        run_cfg.l = config.l;
        run_cfg.d = config.d;
        run_cfg.seed = seed;
        let clock = stopwatch();
        let found = match run(&run_cfg, seqs) {
            Ok(r) => Some(r),
            Err(Error::NoEnrichedBuckets { .. }) => None,
            Err(e) => return Err(e),
        };
        let run_ms = ms(clock());

        let clock = stopwatch();
        let naive = naive_mfp(seqs, config.l, config.naive_limit)?;
        let naive_ms = ms(clock());
        let clock = stopwatch();
        let median = median_string(seqs, config.l, config.median_limit)?;
        let median_ms = ms(clock());

        let run_score = found.as_ref().map(|r| r.best.score);
        rows.push(BenchRow {
            instance: instance + 1,
            seed,
            planted: String::from_utf8_lossy(&inst.motif).into_owned(),
            run_score,
            run_motif: found.as_ref().map(RunResult::motif),
            naive_score: naive.score,
            naive_motif: String::from_utf8_lossy(&naive.consensus).into_owned(),
            median_distance: median.total_distance,
            median_motif: String::from_utf8_lossy(&median.motif).into_owned(),
            agree: run_score == Some(naive.score),
            duality: naive.score as usize + median.total_distance == config.l * config.t,
            run_ms,
            naive_ms,
            median_ms,
        });
    }
    Ok(BenchReport { rows })
}

impl BenchReport {
    pub fn agreement(&self) -> usize {
        self.rows.iter().filter(|r| r.agree).count()
    }

    /// One line per instance followed by a `summary` line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(
            "instance\tseed\tplanted\trun_motif\trun_score\tnaive_motif\tnaive_score\tmedian_motif\tmedian_distance\tagree\tduality\trun_ms\tnaive_ms\tmedian_ms\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{:.3}\t{:.3}",
                r.instance,
                r.seed,
                r.planted,
                r.run_motif.as_deref().unwrap_or("-"),
                r.run_score.map_or("-".to_string(), |s| s.to_string()),
                r.naive_motif,
                r.naive_score,
                r.median_motif,
                r.median_distance,
                r.agree,
                r.duality,
                r.run_ms,
                r.naive_ms,
                r.median_ms,
            );
        }
        let n = self.rows.len();
        let total = |f: fn(&BenchRow) -> f64| self.rows.iter().map(f).sum::<f64>();
        let _ = writeln!(
            out,
            "summary\t-\t-\t-\t-\t-\t-\t-\t-\t{}/{}\t{}/{}\t{:.3}\t{:.3}\t{:.3}",
            self.agreement(),
            n,
            self.rows.iter().filter(|r| r.duality).count(),
            n,
            total(|r| r.run_ms),
            total(|r| r.naive_ms),
            total(|r| r.median_ms),
        );
        out
    }
}
