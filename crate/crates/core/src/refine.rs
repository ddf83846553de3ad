//! EM refinement of an enriched bucket under the one-occurrence-per-sequence
//! model.
//!
//! The motif model θ is a |Σ| × (l+1) column-stochastic matrix. Column 0 is
//! the background distribution, columns 1..=l are the motif positions. Given
//! θ, the responsibility of offset j in sequence i is
//!
//! ```text
//! Z_ij ∝ Π_p θ[S_i[j+p-1]][p] / θ[S_i[j+p-1]][0],   Σ_j Z_ij = 1
//! ```
//!
//! and the M-step re-estimates each column from Z-weighted symbol counts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::projection::EnrichedBucket;
use crate::scoring::{alignment, consensus, profile, StartVector};
use crate::seqcore::{LmerRef, SequenceSet};

/// Lower bound applied to every probability during EM.
pub const PROB_FLOOR: f64 = 1e-9;
pub const DEFAULT_MAX_ITERS: usize = 5;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MotifModel {
    sigma: usize,
    l: usize,
    /// row-major over symbols: theta[rank * (l + 1) + column]
    theta: Vec<f64>,
}

impl MotifModel {
    /// Builds a model from `[rank][column]` rows, each of length l + 1.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let sigma = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if sigma < 2 || width < 2 || rows.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidParams(
                "model rows must be |Σ| x (l+1)".into(),
            ));
        }
        let m = MotifModel {
            sigma,
            l: width - 1,
            theta: rows.concat(),
        };
        for j in 0..=m.l {
            let sum: f64 = (0..sigma).map(|r| m.get(r, j)).sum();
            if (sum - 1.0).abs() > 1e-9 || (0..sigma).any(|r| !(0.0..=1.0).contains(&m.get(r, j))) {
                return Err(Error::InvalidParams(format!(
                    "column {j} is not a distribution"
                )));
            }
        }
        Ok(m)
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    #[inline]
    pub fn get(&self, rank: usize, column: usize) -> f64 {
        self.theta[rank * (self.l + 1) + column]
    }

    fn set(&mut self, rank: usize, column: usize, v: f64) {
        self.theta[rank * (self.l + 1) + column] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.sigma).map(|r| self.get(r, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.theta.chunks(self.l + 1).map(<[f64]>::to_vec).collect()
    }

    fn zeros(sigma: usize, l: usize) -> Self {
        MotifModel {
            sigma,
            l,
            theta: vec![0.0; sigma * (l + 1)],
        }
    }

    /// Normalizes each column of non-negative weights, lifting entries to at
    /// least `floor` first.
    fn normalize(&mut self, floor: f64) {
        for j in 0..=self.l {
            let mut sum = 0.0;
            for r in 0..self.sigma {
                let v = self.get(r, j).max(0.0).max(floor);
                self.set(r, j, v);
                sum += v;
            }
            for r in 0..self.sigma {
                self.set(r, j, self.get(r, j) / sum);
            }
        }
    }

    /// Log-odds of each symbol at motif position p against the background,
    /// `[p - 1][rank]`, after flooring.
    fn log_odds(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut floored = self.clone();
        floored.normalize(PROB_FLOOR);
        let bg: Vec<f64> = (0..self.sigma).map(|r| floored.get(r, 0).ln()).collect();
        let odds = (1..=self.l)
            .map(|p| {
                (0..self.sigma)
                    .map(|r| floored.get(r, p).ln() - bg[r])
                    .collect()
            })
            .collect();
        (odds, bg)
    }
}

/// θ⁰ from the bucket's l-mers. Column j ≥ 1 holds
/// (count + pseudocount) / (members + |Σ|·pseudocount); column 0 is the
/// symbol composition of the whole sequence set.
pub fn init_model(
    members: &[LmerRef],
    seqs: &SequenceSet,
    l: usize,
    pseudocount: f64,
) -> Result<MotifModel> {
    if members.is_empty() {
        return Err(Error::EmptyBucket);
    }
    if !(pseudocount >= 0.0 && pseudocount.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "pseudocount {pseudocount} must be finite and >= 0"
        )));
    }
    let sigma = seqs.alphabet().len();
    let mut model = MotifModel::zeros(sigma, l);
    for m in members {
        if m.length as usize != l {
            return Err(Error::LengthMismatch {
                left: m.length as usize,
                right: l,
            });
        }
        let ranks = seqs.lmer_ranks(m.seq_index as usize, m.offset as usize, l)?;
        for (p, &r) in ranks.iter().enumerate() {
            model.theta[r as usize * (l + 1) + p + 1] += 1.0;
        }
    }
    let denom = members.len() as f64 + sigma as f64 * pseudocount;
    for r in 0..sigma {
        for p in 1..=l {
            model.set(r, p, (model.get(r, p) + pseudocount) / denom);
        }
    }
    let composition = composition(seqs);
    let total: f64 = composition.iter().sum();
    for (r, c) in composition.iter().enumerate() {
        model.set(r, 0, c / total);
    }
    Ok(model)
}

fn composition(seqs: &SequenceSet) -> Vec<f64> {
    let mut counts = vec![0.0; seqs.alphabet().len()];
    for row in seqs.rank_rows() {
        for &r in row {
            counts[r as usize] += 1.0;
        }
    }
    counts
}

/// Sum of the column maxima over motif columns 1..=l.
pub fn expectation(model: &MotifModel) -> f64 {
    (1..=model.l)
        .map(|j| {
            (0..model.sigma)
                .map(|r| model.get(r, j))
                .fold(0.0, f64::max)
        })
        .sum()
}

/// Log-likelihood ratio score of every offset of every sequence.
fn offset_scores(model: &MotifModel, seqs: &SequenceSet, l: usize) -> Result<Vec<Vec<f64>>> {
    if model.l != l || model.sigma != seqs.alphabet().len() {
        return Err(Error::InvalidParams(format!(
            "model is {}x{} but the instance needs {}x{}",
            model.sigma,
            model.l + 1,
            seqs.alphabet().len(),
            l + 1
        )));
    }
    seqs.check_len(l)?;
    let (odds, _) = model.log_odds();
    Ok(seqs
        .rank_rows()
        .iter()
        .map(|row| {
            row.windows(l)
                .map(|w| w.iter().zip(&odds).map(|(&r, col)| col[r as usize]).sum())
                .collect()
        })
        .collect())
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// One E-step and M-step. Returns the updated model and the OOPS
/// log-likelihood of the input model (uniform prior over offsets).
pub fn em_step(model: &MotifModel, seqs: &SequenceSet, l: usize) -> Result<(MotifModel, f64)> {
    let scores = offset_scores(model, seqs, l)?;
    let (_, log_bg) = model.log_odds();
    let sigma = model.sigma;
    let mut motif = vec![vec![0.0; sigma]; l];
    let mut ll = 0.0;
    for (row, s) in seqs.rank_rows().iter().zip(&scores) {
        let norm = log_sum_exp(s);
        ll += row.iter().map(|&r| log_bg[r as usize]).sum::<f64>() + norm - (s.len() as f64).ln();
        for (j, &sc) in s.iter().enumerate() {
            let z = (sc - norm).exp();
            for (p, &r) in row[j..j + l].iter().enumerate() {
                motif[p][r as usize] += z;
            }
        }
    }
    if !ll.is_finite() {
        return Err(Error::NumericalUnderflow);
    }

    let mut next = MotifModel::zeros(sigma, l);
    let mut background = composition(seqs);
    for (p, col) in motif.iter().enumerate() {
        for (r, &c) in col.iter().enumerate() {
            next.set(r, p + 1, c);
            background[r] -= c;
        }
    }
    for (r, &c) in background.iter().enumerate() {
        next.set(r, 0, c);
    }
    next.normalize(PROB_FLOOR);
    Ok((next, ll))
}

/// Per-sequence offset with the highest responsibility; ties go to the
/// smallest offset.
pub fn best_starts(model: &MotifModel, seqs: &SequenceSet, l: usize) -> Result<StartVector> {
    let scores = offset_scores(model, seqs, l)?;
    Ok(StartVector::new(
        scores
            .iter()
            .map(|s| {
                let mut best = 0;
                for j in 1..s.len() {
                    if s[j] > s[best] {
                        best = j;
                    }
                }
                best + 1
            })
            .collect(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinedCandidate {
    #[serde(serialize_with = "crate::ser::bytes_as_str")]
    pub consensus: Vec<u8>,
    pub positions: StartVector,
    pub score: u32,
    pub expectation: f64,
    pub iterations: usize,
    pub source_bucket: u64,
}

/// Seeds θ⁰ from the bucket (no pseudocount), runs up to `max_iters` EM steps
/// stopping once the log-likelihood gains less than `tol`, then reads off
/// the best offset per sequence.
pub fn refine(
    bucket: &EnrichedBucket,
    seqs: &SequenceSet,
    l: usize,
    max_iters: usize,
    tol: f64,
) -> Result<RefinedCandidate> {
    let mut model = init_model(&bucket.members, seqs, l, 0.0)?;
    let mut prev: Option<f64> = None;
    let mut iterations = 0;
    while iterations < max_iters {
        let (next, ll) = em_step(&model, seqs, l)?;
        model = next;
        iterations += 1;
        if prev.is_some_and(|p| ll - p < tol) {
            break;
        }
        prev = Some(ll);
    }
    let positions = best_starts(&model, seqs, l)?;
    let p = profile(&alignment(seqs, &positions, l)?, seqs.alphabet())?;
    Ok(RefinedCandidate {
        consensus: consensus(&p, seqs.alphabet()),
        score: p.score(),
        positions,
        expectation: expectation(&model),
        iterations,
        source_bucket: bucket.key,
    })
}
