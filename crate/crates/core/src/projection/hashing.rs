use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::{encode_ranks, LmerRef, SequenceSet};

/// Buckets above this many entries are not allocated by the dense backend.
pub const DEFAULT_DENSE_CAP: u64 = 1 << 16;

/// The k columns of an l-mer kept by a projection, 1-based and increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProjectionPlan {
    l: usize,
    kept: Vec<usize>,
}

impl ProjectionPlan {
    pub fn new(l: usize, kept: Vec<usize>) -> Result<Self> {
        if kept.is_empty() {
            return Err(Error::InvalidParams(
                "a projection keeps at least one column".into(),
            ));
        }
        let increasing = kept.windows(2).all(|w| w[0] < w[1]);
        if !increasing || kept[0] == 0 || *kept.last().expect("non-empty") > l {
            return Err(Error::InvalidParams(format!(
                "kept columns {kept:?} must be strictly increasing within 1..={l}"
            )));
        }
        Ok(ProjectionPlan { l, kept })
    }

    /// Plan keeping every column not listed in `excluded`.
    pub fn from_excluded(l: usize, excluded: &[usize]) -> Result<Self> {
        let skip: BTreeSet<usize> = excluded.iter().copied().collect();
        if let Some(bad) = skip.iter().find(|&&c| c == 0 || c > l) {
            return Err(Error::InvalidParams(format!(
                "excluded column {bad} not in 1..={l}"
            )));
        }
        Self::new(l, (1..=l).filter(|c| !skip.contains(c)).collect())
    }

    pub fn identity(l: usize) -> Result<Self> {
        Self::new(l, (1..=l).collect())
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.kept.len()
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn excluded(&self) -> Vec<usize> {
        (1..=self.l)
            .filter(|c| self.kept.binary_search(c).is_err())
            .collect()
    }

    /// True if none of `columns` is kept.
    pub fn avoids(&self, columns: &[usize]) -> bool {
        columns.iter().all(|c| self.kept.binary_search(c).is_err())
    }
}

/// Draws the l − k excluded columns uniformly and keeps the complement.
pub fn sample_plan<R: Rng + ?Sized>(l: usize, k: usize, rng: &mut R) -> Result<ProjectionPlan> {
    if k == 0 || k > l {
        return Err(Error::InvalidParams(format!("k = {k} must be in 1..={l}")));
    }
    let excluded: Vec<usize> = sample(rng, l, l - k).into_iter().map(|c| c + 1).collect();
    ProjectionPlan::from_excluded(l, &excluded)
}

/// h_k(lmer): the kept columns, in order.
pub fn project(lmer: &[u8], plan: &ProjectionPlan) -> Result<Vec<u8>> {
    if lmer.len() != plan.l {
        return Err(Error::LengthMismatch {
            left: lmer.len(),
            right: plan.l,
        });
    }
    Ok(plan.kept.iter().map(|&c| lmer[c - 1]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Direct-indexed table of |Σ|^k counters.
    Dense,
    /// Sort all (code, l-mer) pairs and split runs of equal codes.
    Grouped,
    /// Dense when the table fits under the cap, grouped otherwise.
    #[default]
    Auto,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Backend::Dense),
            "grouped" => Ok(Backend::Grouped),
            "auto" => Ok(Backend::Auto),
            _ => Err(Error::InvalidParams(format!("unknown backend {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bucket {
    pub key: u64,
    /// in (seq_index, offset) order
    pub members: Vec<LmerRef>,
}

/// Every l-mer of a sequence set, partitioned by the code of its projection.
/// Buckets are sorted by key; empty buckets are omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketGrouping {
    pub buckets: Vec<Bucket>,
}

impl BucketGrouping {
    pub fn total_members(&self) -> usize {
        self.buckets.iter().map(|b| b.members.len()).sum()
    }

    pub fn get(&self, key: u64) -> Option<&Bucket> {
        self.buckets
            .binary_search_by_key(&key, |b| b.key)
            .ok()
            .map(|i| &self.buckets[i])
    }
}

/// Projects and encodes all x l-mers, then buckets them with `backend`.
pub fn hash_trial(
    seqs: &SequenceSet,
    l: usize,
    plan: &ProjectionPlan,
    backend: Backend,
    dense_cap: u64,
) -> Result<BucketGrouping> {
    seqs.check_len(l)?;
    if plan.l != l {
        return Err(Error::LengthMismatch {
            left: plan.l,
            right: l,
        });
    }
    let alphabet = seqs.alphabet();
    let max = alphabet.max_kmer_len();
    if plan.k() > max {
        return Err(Error::KmerTooLong { len: plan.k(), max });
    }
    let table = alphabet.pow(plan.k()).expect("k within max_kmer_len");
    let backend = match backend {
        Backend::Auto if table <= dense_cap => Backend::Dense,
        Backend::Auto => Backend::Grouped,
        Backend::Dense if table > dense_cap => {
            return Err(Error::DenseTableTooLarge {
                size: table as u128,
                cap: dense_cap,
            })
        }
        b => b,
    };

    let base = alphabet.len() as u64;
    let kept = &plan.kept;
    let codes: Vec<Vec<u64>> = seqs
        .rank_rows()
        .par_iter()
        .map(|row| {
            row.windows(l)
                .map(|w| encode_ranks(kept.iter().map(|&c| w[c - 1]), base))
                .collect()
        })
        .collect();

    let buckets = match backend {
        Backend::Dense => dense_buckets(&codes, l, table as usize),
        _ => grouped_buckets(&codes, l),
    };
    Ok(BucketGrouping { buckets })
}

fn refs(codes: &[Vec<u64>], l: usize) -> impl Iterator<Item = (u64, LmerRef)> + '_ {
    codes.iter().enumerate().flat_map(move |(i, row)| {
        row.iter()
            .enumerate()
            .map(move |(j, &code)| (code, LmerRef::new(i + 1, j + 1, l)))
    })
}

// counting sort into a table of |Σ|^k slots
fn dense_buckets(codes: &[Vec<u64>], l: usize, table: usize) -> Vec<Bucket> {
    let mut start = vec![0u32; table + 1];
    for &c in codes.iter().flatten() {
        start[c as usize + 1] += 1;
    }
    for i in 1..=table {
        start[i] += start[i - 1];
    }
    let total = start[table] as usize;
    let mut fill = start.clone();
    let mut slots = vec![LmerRef::new(0, 0, 0); total];
    for (code, r) in refs(codes, l) {
        let at = &mut fill[code as usize];
        slots[*at as usize] = r;
        *at += 1;
    }
    (0..table)
        .filter(|&key| start[key + 1] > start[key])
        .map(|key| Bucket {
            key: key as u64,
            members: slots[start[key] as usize..start[key + 1] as usize].to_vec(),
        })
        .collect()
}

fn grouped_buckets(codes: &[Vec<u64>], l: usize) -> Vec<Bucket> {
    let mut pairs: Vec<(u64, LmerRef)> = refs(codes, l).collect();
    pairs.par_sort_unstable();
    pairs
        .chunk_by(|a, b| a.0 == b.0)
        .map(|run| Bucket {
            key: run[0].0,
            members: run.iter().map(|p| p.1).collect(),
        })
        .collect()
}

/// A bucket with at least s members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnrichedBucket {
    pub key: u64,
    /// bucket size before truncation
    pub hits: usize,
    /// the first `r_cap` members in (seq_index, offset) order
    pub members: Vec<LmerRef>,
    pub overflowed: bool,
}

/// Buckets with ≥ s members, truncated to `r_cap`, ordered by size
/// (descending) then key.
pub fn enriched_buckets(grouping: &BucketGrouping, s: usize, r_cap: usize) -> Vec<EnrichedBucket> {
    let s = s.max(1);
    let cap = r_cap.max(s);
    let mut out: Vec<EnrichedBucket> = grouping
        .buckets
        .par_iter()
        .filter(|b| b.members.len() >= s)
        .map(|b| EnrichedBucket {
            key: b.key,
            hits: b.members.len(),
            members: b.members[..b.members.len().min(cap)].to_vec(),
            overflowed: b.members.len() > cap,
        })
        .collect();
    out.sort_by(|a, b| b.hits.cmp(&a.hits).then(a.key.cmp(&b.key)));
    out
}
