use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of one projection run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialParams {
    pub l: usize,
    pub d: usize,
    /// projection width
    pub k: usize,
    /// bucket threshold
    pub s: usize,
    /// number of independent trials
    pub m: u64,
    /// target probability that the planted bucket is enriched in some trial
    pub q: f64,
    /// estimated number of sequences that contain the motif
    pub t_hat: usize,
}

impl TrialParams {
    pub fn validate(&self, t: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.k == 0 || self.k > self.l {
            return bad(format!("k = {} must be in 1..={}", self.k, self.l));
        }
        if self.d >= self.l {
            return bad(format!("d = {} must be below l = {}", self.d, self.l));
        }
        if self.s == 0 {
            return bad("s must be at least 1".into());
        }
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return bad(format!("q = {} must be in (0, 1)", self.q));
        }
        if self.t_hat == 0 || self.t_hat > t {
            return bad(format!("t_hat = {} must be in 1..={t}", self.t_hat));
        }
        Ok(())
    }

    /// Per-bucket membership cap, r = t·s.
    pub fn r_cap(&self, t: usize) -> usize {
        t * self.s
    }
}

/// k = l − d − 1.
pub fn optimal_k(l: usize, d: usize) -> Result<usize> {
    match l.checked_sub(d + 1) {
        Some(k) if k >= 1 => Ok(k),
        _ => Err(Error::InvalidParams(format!(
            "l = {l}, d = {d} leaves no projection width (need l - d - 1 >= 1)"
        ))),
    }
}

/// Probability that a random k-subset of the l motif columns avoids all d
/// mutated ones: C(l−d, k) / C(l, k), evaluated as Π_{i<k} (l−d−i)/(l−i).
pub fn p_hat(l: usize, d: usize, k: usize) -> f64 {
    if d > l || k > l - d {
        return 0.0;
    }
    (0..k)
        .map(|i| (l - d - i) as f64 / (l - i) as f64)
        .product()
}

/// B_{t̂,p}(s) = P[X < s] for X ~ Binomial(t̂, p).
pub fn binomial_lt(t_hat: u64, p: f64, s: u64) -> f64 {
    if s == 0 {
        return 0.0;
    }
    if s > t_hat || p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    let n = t_hat as f64;
    let odds = p / (1.0 - p);
    let first = (1.0 - p).powf(n);
    let sum = if first > 0.0 {
        let mut term = first;
        let mut sum = 0.0;
        for i in 0..s {
            sum += term;
            term *= (n - i as f64) / (i as f64 + 1.0) * odds;
        }
        sum
    } else {
        // (1-p)^t̂ underflowed; accumulate the terms in log space
        let (ln_odds, mut ln_term) = (odds.ln(), n * (-p).ln_1p());
        let mut sum = 0.0;
        for i in 0..s {
            sum += ln_term.exp();
            ln_term += (n - i as f64).ln() - (i as f64 + 1.0).ln() + ln_odds;
        }
        sum
    };
    sum.clamp(0.0, 1.0)
}

/// Smallest m with 1 − tail^m ≥ q, where `tail` is the per-trial
/// probability that the planted bucket misses the threshold.
pub fn trials_for_tail(q: f64, tail: f64) -> Result<u64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParams(format!("q = {q} must be in (0, 1)")));
    }
    if tail.is_nan() || tail >= 1.0 {
        return Err(Error::Unreachable { tail });
    }
    if tail <= 0.0 {
        return Ok(1);
    }
    let reached = |m: u64| 1.0 - tail.powf(m as f64) >= q;
    let estimate = ((1.0 - q).ln() / tail.ln()).ceil();
    if !estimate.is_finite() || estimate >= u64::MAX as f64 {
        return Err(Error::Unreachable { tail });
    }
    let mut m = (estimate as u64).max(1);
    // the float ceiling can land one off at exact boundaries
    while m > 1 && reached(m - 1) {
        m -= 1;
    }
    while !reached(m) {
        m += 1;
    }
    Ok(m)
}

/// m = ⌈log(1 − q) / log B_{t̂,p}(s)⌉.
pub fn num_trials(q: f64, t_hat: u64, p: f64, s: u64) -> Result<u64> {
    trials_for_tail(q, binomial_lt(t_hat, p, s))
}

pub const DEFAULT_THRESHOLD_FLOOR: usize = 3;

/// s = max(floor, ⌈2·x / |Σ|^k⌉) with x = t·(n − l + 1) l-mers: twice the
/// expected bucket size under uniform background.
pub fn bucket_threshold(
    t: usize,
    n: usize,
    l: usize,
    k: usize,
    sigma: usize,
    floor: usize,
) -> usize {
    let x = t * (n + 1).saturating_sub(l);
    threshold_for_lmers(x, k, sigma, floor)
}

pub(crate) fn threshold_for_lmers(x: usize, k: usize, sigma: usize, floor: usize) -> usize {
    let computed = (2.0 * x as f64 / (sigma as f64).powi(k as i32)).ceil() as usize;
    computed.max(floor)
}
