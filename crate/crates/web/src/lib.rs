//! WebAssembly bindings for the browser demo.
//!
//! Each operation has a plain Rust form returning JSON (tested natively) and a
//! `#[wasm_bindgen]` wrapper that turns errors into JS exceptions.

use projmotif::driver::{resolve_params, run, trial_rng, RunConfig};
use projmotif::projection::{
    binomial_lt, bucket_threshold, enriched_buckets, hash_trial, optimal_k, p_hat, project,
    sample_plan, trials_for_tail, Backend, DEFAULT_DENSE_CAP,
};
use projmotif::scoring::{alignment, profile};
use projmotif::seqcore::{encode_kmer, generate_planted, Alphabet};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn trial_json(l: usize, d: usize, k: usize, t: usize, n: usize, q: f64, floor: usize) -> Value {
    let sigma = Alphabet::dna().len();
    let s = bucket_threshold(t, n, l, k, sigma, floor);
    let p = p_hat(l, d, k);
    let tail = binomial_lt(t as u64, p, s as u64);
    let m = trials_for_tail(q, tail).ok();
    json!({ "k": k, "s": s, "p_hat": p, "tail": tail, "m": m })
}

/// Derived search parameters for an (l,d) problem on t sequences of length
/// n, plus the same quantities for every usable projection size.
pub fn explore_params_json(
    l: usize,
    d: usize,
    t: usize,
    n: usize,
    q: f64,
    floor: usize,
) -> Result<String, String> {
    if t == 0 || n < l {
        return Err(format!("need t ≥ 1 and n ≥ l (t = {t}, n = {n}, l = {l})"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(format!("q = {q} must be in (0, 1)"));
    }
    let k = optimal_k(l, d).map_err(|e| e.to_string())?;
    let curve: Vec<Value> = (1..=l - d)
        .map(|k| trial_json(l, d, k, t, n, q, floor))
        .collect();
    let chosen = trial_json(l, d, k, t, n, q, floor);
    Ok(json!({ "chosen": chosen, "curve": curve }).to_string())
}

/// Plants an (l,d) motif, searches for it, and reports what was found next to
/// the ground truth.
pub fn generate_and_find_json(
    t: usize,
    n: usize,
    l: usize,
    d: usize,
    seed: u64,
) -> Result<String, String> {
    let inst = generate_planted(t, n, l, d, seed).map_err(|e| e.to_string())?;
    let seqs = &inst.sequences;
    let mut cfg = RunConfig::new(l, d);
    cfg.seed = seed;
    let result = run(&cfg, seqs).map_err(|e| e.to_string())?;
    let best = &result.best;
    let rows = alignment(seqs, &best.positions, l).map_err(|e| e.to_string())?;
    let prof = profile(&rows, seqs.alphabet()).map_err(|e| e.to_string())?;
    let planted: Vec<usize> = inst.positions.to_vec();
    let found: Vec<usize> = best.positions.to_vec();
    let hits = planted.iter().zip(&found).filter(|(a, b)| a == b).count();
    Ok(json!({
        "sequences": seqs.sequences().map(text).collect::<Vec<_>>(),
        "planted": { "motif": text(&inst.motif), "positions": planted },
        "found": {
            "motif": text(&best.consensus),
            "positions": found,
            "score": best.score,
            "expectation": best.expectation,
            "trial": result.best_trial,
        },
        "positions_recovered": hits,
        "max_score": l * t,
        "alignment": rows.rows().iter().map(|r| text(r)).collect::<Vec<_>>(),
        "alphabet": text(seqs.alphabet().symbols()),
        "profile": prof.counts(),
        "params": {
            "k": result.params.k,
            "s": result.params.s,
            "m": result.params.m,
        },
        "trials_run": result.trials_run,
        "buckets_enriched": result.enriched_buckets_total,
    })
    .to_string())
}

/// Bucket-size histogram of a single projection trial on a planted instance,
/// with the bucket that the unmutated motif hashes to.
pub fn bucket_histogram_json(
    t: usize,
    n: usize,
    l: usize,
    d: usize,
    seed: u64,
    trial: u64,
) -> Result<String, String> {
    let err = |e: projmotif::Error| e.to_string();
    let inst = generate_planted(t, n, l, d, seed).map_err(err)?;
    let seqs = &inst.sequences;
    let alphabet = seqs.alphabet();
    let params = resolve_params(&RunConfig::new(l, d), seqs).map_err(err)?;
    let plan = sample_plan(l, params.k, &mut trial_rng(seed, trial)).map_err(err)?;
    let grouping = hash_trial(seqs, l, &plan, Backend::Auto, DEFAULT_DENSE_CAP).map_err(err)?;

    let mut histogram = std::collections::BTreeMap::<usize, usize>::new();
    for b in &grouping.buckets {
        *histogram.entry(b.members.len()).or_default() += 1;
    }
    let key_of = |lmer: &[u8]| -> Result<u64, String> {
        encode_kmer(&project(lmer, &plan).map_err(err)?, alphabet).map_err(err)
    };
    let planted_key = key_of(&inst.motif)?;
    let mut planted_members = 0;
    for i in 1..=t {
        if key_of(inst.occurrence(i))? == planted_key {
            planted_members += 1;
        }
    }
    let planted_size = grouping.get(planted_key).map_or(0, |b| b.members.len());
    let enriched = enriched_buckets(&grouping, params.s, params.r_cap(t)).len();
    Ok(json!({
        "kept": plan.kept(),
        "k": params.k,
        "s": params.s,
        "histogram": histogram.into_iter().collect::<Vec<_>>(),
        "buckets": grouping.buckets.len(),
        "enriched": enriched,
        "planted": {
            "key": text(&project(&inst.motif, &plan).map_err(err)?),
            "size": planted_size,
            "occurrences": planted_members,
        },
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = exploreParams)]
pub fn explore_params(
    l: usize,
    d: usize,
    t: usize,
    n: usize,
    q: f64,
    floor: usize,
) -> Result<String, JsError> {
    js(explore_params_json(l, d, t, n, q, floor))
}

#[wasm_bindgen(js_name = generateAndFind)]
pub fn generate_and_find(
    t: usize,
    n: usize,
    l: usize,
    d: usize,
    seed: u64,
) -> Result<String, JsError> {
    js(generate_and_find_json(t, n, l, d, seed))
}

#[wasm_bindgen(js_name = bucketHistogram)]
pub fn bucket_histogram(
    t: usize,
    n: usize,
    l: usize,
    d: usize,
    seed: u64,
    trial: u64,
) -> Result<String, JsError> {
    js(bucket_histogram_json(t, n, l, d, seed, trial))
}
