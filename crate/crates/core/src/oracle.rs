//! Exhaustive solvers for small instances. They are exponential by nature and
//! refuse to start when the search space exceeds an explicit limit.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scoring::{alignment, consensus, profile, StartVector};
use crate::seqcore::{decode_kmer, SequenceSet};

pub const DEFAULT_NAIVE_LIMIT: u128 = 100_000_000;
pub const DEFAULT_MEDIAN_LIMIT: u128 = 1 << 24; // 4^12

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MfpSolution {
    pub starts: StartVector,
    pub score: u32,
    #[serde(serialize_with = "crate::ser::bytes_as_str")]
    pub consensus: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MedianSolution {
    #[serde(serialize_with = "crate::ser::bytes_as_str")]
    pub motif: Vec<u8>,
    pub total_distance: usize,
}

/// Number of start vectors, Π_i (n_i − l + 1).
pub fn configuration_count(seqs: &SequenceSet, l: usize) -> u128 {
    (1..=seqs.len()).fold(1u128, |acc, i| {
        acc.saturating_mul(seqs.starts(i, l) as u128)
    })
}

/// Maximizes Score over every start vector. Ties resolve to the
/// lexicographically smallest vector, which is the first maximum met when the
/// last sequence's offset varies fastest.
pub fn naive_mfp(seqs: &SequenceSet, l: usize, limit: u128) -> Result<MfpSolution> {
    seqs.check_len(l)?;
    let size = configuration_count(seqs, l);
    if size > limit {
        return Err(Error::SearchSpaceTooLarge { size, limit });
    }
    let sigma = seqs.alphabet().len();
    let rows = seqs.rank_rows();
    let first_starts = seqs.starts(1, l);

    // partition on the first sequence's offset; each part is searched in order
    let best = (1..=first_starts)
        .into_par_iter()
        .map(|a1| {
            let mut search = Search {
                rows,
                l,
                sigma,
                counts: vec![0u32; l * sigma],
                current: Vec::with_capacity(rows.len()),
                best_score: 0,
                best: Vec::new(),
            };
            search.push(1, a1);
            search.descend(1);
            (search.best_score, search.best)
        })
        .reduce_with(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one start");

    let starts = StartVector::new(best.1);
    let p = profile(&alignment(seqs, &starts, l)?, seqs.alphabet())?;
    debug_assert_eq!(p.score(), best.0);
    Ok(MfpSolution {
        consensus: consensus(&p, seqs.alphabet()),
        starts,
        score: best.0,
    })
}

struct Search<'a> {
    rows: &'a [Vec<u8>],
    l: usize,
    sigma: usize,
    /// column-major: counts[col * sigma + rank]
    counts: Vec<u32>,
    current: Vec<usize>,
    best_score: u32,
    best: Vec<usize>,
}

impl Search<'_> {
    fn push(&mut self, i: usize, a: usize) {
        for (c, &r) in self.rows[i - 1][a - 1..a - 1 + self.l].iter().enumerate() {
            self.counts[c * self.sigma + r as usize] += 1;
        }
        self.current.push(a);
    }

    fn pop(&mut self, i: usize) {
        let a = self.current.pop().expect("pushed");
        for (c, &r) in self.rows[i - 1][a - 1..a - 1 + self.l].iter().enumerate() {
            self.counts[c * self.sigma + r as usize] -= 1;
        }
    }

    /// `depth` sequences are already placed.
    fn descend(&mut self, depth: usize) {
        if depth == self.rows.len() {
            let score: u32 = self
                .counts
                .chunks(self.sigma)
                .map(|col| *col.iter().max().expect("sigma >= 2"))
                .sum();
            if score > self.best_score || self.best.is_empty() {
                self.best_score = score;
                self.best = self.current.clone();
            }
            return;
        }
        let i = depth + 1;
        let starts = self.rows[i - 1].len() + 1 - self.l;
        for a in 1..=starts {
            self.push(i, a);
            self.descend(depth + 1);
            self.pop(i);
        }
    }
}

/// Minimizes TotalDistance(v) = Σ_i min_j hamming(v, S_ij) over all |Σ|^l
/// candidates v. Ties resolve to the smallest k-mer code.
pub fn median_string(seqs: &SequenceSet, l: usize, limit: u128) -> Result<MedianSolution> {
    seqs.check_len(l)?;
    let alphabet = seqs.alphabet();
    let max = alphabet.max_kmer_len();
    let size = alphabet.pow(l).map_or(u128::MAX, u128::from);
    if size > limit {
        return Err(Error::SearchSpaceTooLarge { size, limit });
    }
    if l > max {
        return Err(Error::KmerTooLong { len: l, max });
    }
    let base = alphabet.len() as u64;
    let rows = seqs.rank_rows();
    let (distance, code) = (0..size as u64)
        .into_par_iter()
        .map_init(
            || vec![0u8; l],
            |cand, code| {
                let mut rest = code;
                for slot in cand.iter_mut().rev() {
                    *slot = (rest % base) as u8;
                    rest /= base;
                }
                (total_distance(rows, cand), code)
            },
        )
        .min()
        .expect("non-empty candidate space");
    Ok(MedianSolution {
        motif: decode_kmer(code, l, alphabet)?,
        total_distance: distance,
    })
}

fn total_distance(rows: &[Vec<u8>], cand: &[u8]) -> usize {
    let l = cand.len();
    rows.iter()
        .map(|row| {
            let mut best = l;
            for w in row.windows(l) {
                let d = w.iter().zip(cand).filter(|(a, b)| a != b).count();
                if d < best {
                    best = d;
                    if d == 0 {
                        break;
                    }
                }
            }
            best
        })
        .sum()
}
