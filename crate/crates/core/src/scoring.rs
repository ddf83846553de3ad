//! Alignment and profile matrices, consensus strings and the column-max score.

use std::ops::{Deref, Index};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::{Alphabet, SequenceSet};

/// One 1-based motif start per sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StartVector(Vec<usize>);

impl StartVector {
    pub fn new(positions: Vec<usize>) -> Self {
        StartVector(positions)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    pub fn validate(&self, seqs: &SequenceSet, l: usize) -> Result<()> {
        if self.0.len() != seqs.len() {
            return Err(Error::IndexOutOfRange(format!(
                "start vector has {} entries for {} sequences",
                self.0.len(),
                seqs.len()
            )));
        }
        for (i, &a) in self.0.iter().enumerate() {
            let max = seqs.starts(i + 1, l);
            if a == 0 || a > max {
                return Err(Error::IndexOutOfRange(format!(
                    "start {a} for sequence {} not in 1..={max}",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

impl Deref for StartVector {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for StartVector {
    fn from(v: Vec<usize>) -> Self {
        StartVector(v)
    }
}

/// t rows of equal length l.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentMatrix {
    rows: Vec<Vec<u8>>,
    width: usize,
}

impl AlignmentMatrix {
    pub fn from_rows(rows: Vec<Vec<u8>>) -> Result<Self> {
        let width = rows.first().map(Vec::len).ok_or(Error::EmptyInput)?;
        if let Some(bad) = rows.iter().find(|r| r.len() != width) {
            return Err(Error::LengthMismatch {
                left: width,
                right: bad.len(),
            });
        }
        Ok(AlignmentMatrix { rows, width })
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }
}

/// Per-column symbol counts, indexed `[symbol rank][column]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileMatrix {
    counts: Vec<Vec<u32>>,
    rows: u32,
}

impl ProfileMatrix {
    pub fn counts(&self) -> &[Vec<u32>] {
        &self.counts
    }

    pub fn width(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    /// Number of aligned rows, which every column sums to.
    pub fn rows(&self) -> u32 {
        self.rows
    }

    /// Column maxima, M(1)..M(l).
    pub fn column_maxima(&self) -> Vec<u32> {
        (0..self.width())
            .map(|c| self.counts.iter().map(|row| row[c]).max().unwrap_or(0))
            .collect()
    }

    pub fn score(&self) -> u32 {
        self.column_maxima().iter().sum()
    }
}

impl Index<(usize, usize)> for ProfileMatrix {
    type Output = u32;
    fn index(&self, (rank, col): (usize, usize)) -> &u32 {
        &self.counts[rank][col]
    }
}

pub fn alignment(seqs: &SequenceSet, s: &StartVector, l: usize) -> Result<AlignmentMatrix> {
    s.validate(seqs, l)?;
    let rows = s
        .iter()
        .enumerate()
        .map(|(i, &a)| seqs.lmer_at(i + 1, a, l).map(<[u8]>::to_vec))
        .collect::<Result<Vec<_>>>()?;
    AlignmentMatrix::from_rows(rows)
}

pub fn profile(a: &AlignmentMatrix, alphabet: &Alphabet) -> Result<ProfileMatrix> {
    let mut counts = vec![vec![0u32; a.width()]; alphabet.len()];
    for row in a.rows() {
        for (c, &sym) in row.iter().enumerate() {
            counts[alphabet.rank_of(sym)? as usize][c] += 1;
        }
    }
    Ok(ProfileMatrix {
        counts,
        rows: a.height() as u32,
    })
}

/// Score(s) = Σ over columns of the most frequent symbol's count.
pub fn score(seqs: &SequenceSet, s: &StartVector, l: usize) -> Result<u32> {
    Ok(profile(&alignment(seqs, s, l)?, seqs.alphabet())?.score())
}

/// Most frequent symbol per column; ties go to the lowest alphabet rank.
pub fn consensus(p: &ProfileMatrix, alphabet: &Alphabet) -> Vec<u8> {
    (0..p.width())
        .map(|c| {
            let mut best = 0usize;
            for r in 1..alphabet.len() {
                if p[(r, c)] > p[(best, c)] {
                    best = r;
                }
            }
            alphabet.symbol(best as u8)
        })
        .collect()
}
