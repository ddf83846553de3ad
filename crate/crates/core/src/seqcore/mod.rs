//! Sequences over a finite alphabet, l-mer addressing, k-mer codes, FASTA
//! I/O and planted-instance generation.
//!
//! Public positions are 1-based: sequence `i` is `1..=t` and an l-mer offset
//! `j` is `1..=n_i - l + 1`.

mod alphabet;
mod fasta;
mod kmer;
mod planted;

pub use alphabet::Alphabet;
pub use fasta::{parse_fasta, to_fasta};
pub(crate) use kmer::encode_ranks;
pub use kmer::{decode_kmer, encode_kmer, hamming};
pub use planted::{generate_planted, PlantedInstance, TruthFile};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The t input sequences, stored uppercase alongside their symbol ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSet {
    alphabet: Alphabet,
    names: Vec<String>,
    seqs: Vec<Vec<u8>>,
    ranks: Vec<Vec<u8>>,
}

impl SequenceSet {
    /// Validates every symbol against `alphabet`. Names default to `seq<i>`.
    pub fn new<S: AsRef<[u8]>>(alphabet: Alphabet, sequences: &[S]) -> Result<Self> {
        let records: Vec<(String, Vec<u8>)> = sequences
            .iter()
            .enumerate()
            .map(|(i, s)| (format!("seq{}", i + 1), s.as_ref().to_vec()))
            .collect();
        Self::from_records(alphabet, records)
    }

    pub fn from_records(alphabet: Alphabet, records: Vec<(String, Vec<u8>)>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut names = Vec::with_capacity(records.len());
        let mut seqs = Vec::with_capacity(records.len());
        let mut ranks = Vec::with_capacity(records.len());
        for (name, seq) in records {
            let r = seq
                .iter()
                .map(|&c| {
                    alphabet.rank(c).ok_or_else(|| Error::UnknownSymbol {
                        symbol: c as char,
                        record: Some(name.clone()),
                        line: None,
                    })
                })
                .collect::<Result<Vec<u8>>>()?;
            seqs.push(seq.to_ascii_uppercase());
            ranks.push(r);
            names.push(name);
        }
        Ok(SequenceSet {
            alphabet,
            names,
            seqs,
            ranks,
        })
    }

    pub fn dna<S: AsRef<[u8]>>(sequences: &[S]) -> Result<Self> {
        Self::new(Alphabet::dna(), sequences)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Number of sequences, t.
    pub fn len(&self) -> usize {
        self.seqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seqs.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Sequence `i`, 1-based.
    pub fn sequence(&self, i: usize) -> &[u8] {
        &self.seqs[i - 1]
    }

    pub fn sequences(&self) -> impl ExactSizeIterator<Item = &[u8]> {
        self.seqs.iter().map(Vec::as_slice)
    }

    pub(crate) fn rank_rows(&self) -> &[Vec<u8>] {
        &self.ranks
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.seqs.iter().map(Vec::len).collect()
    }

    pub fn min_len(&self) -> usize {
        self.seqs.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Number of l-mer start positions in sequence `i` (1-based).
    pub fn starts(&self, i: usize, l: usize) -> usize {
        (self.seqs[i - 1].len() + 1).saturating_sub(l)
    }

    /// x = Σ_i (n_i − l + 1), the size of the l-mer index space.
    pub fn lmer_count(&self, l: usize) -> usize {
        (1..=self.len()).map(|i| self.starts(i, l)).sum()
    }

    pub fn check_len(&self, l: usize) -> Result<()> {
        if l == 0 {
            return Err(Error::InvalidParams("l must be at least 1".into()));
        }
        if l > self.min_len() {
            return Err(Error::InvalidParams(format!(
                "l = {l} exceeds the shortest sequence ({})",
                self.min_len()
            )));
        }
        Ok(())
    }

    /// S_ij: the l-mer of sequence `i` starting at offset `j` (both 1-based).
    pub fn lmer_at(&self, i: usize, j: usize, l: usize) -> Result<&[u8]> {
        let (s, e) = self.span(i, j, l)?;
        Ok(&self.seqs[i - 1][s..e])
    }

    pub(crate) fn lmer_ranks(&self, i: usize, j: usize, l: usize) -> Result<&[u8]> {
        let (s, e) = self.span(i, j, l)?;
        Ok(&self.ranks[i - 1][s..e])
    }

    fn span(&self, i: usize, j: usize, l: usize) -> Result<(usize, usize)> {
        if i == 0 || i > self.len() {
            return Err(Error::IndexOutOfRange(format!(
                "sequence {i} not in 1..={}",
                self.len()
            )));
        }
        let n = self.seqs[i - 1].len();
        if j == 0 || l == 0 || j + l - 1 > n {
            return Err(Error::IndexOutOfRange(format!(
                "l-mer at {j} of length {l} does not fit sequence {i} (length {n})"
            )));
        }
        Ok((j - 1, j - 1 + l))
    }
}

/// Coordinates of one l-mer; ordering is (sequence, offset).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LmerRef {
    pub seq_index: u32,
    pub offset: u32,
    pub length: u32,
}

impl LmerRef {
    pub fn new(seq_index: usize, offset: usize, length: usize) -> Self {
        LmerRef {
            seq_index: seq_index as u32,
            offset: offset as u32,
            length: length as u32,
        }
    }

    pub fn resolve<'a>(&self, seqs: &'a SequenceSet) -> Result<&'a [u8]> {
        seqs.lmer_at(
            self.seq_index as usize,
            self.offset as usize,
            self.length as usize,
        )
    }
}

/// Sequences of the two-figure worked example: seven 40-mers with an
/// (8,1) motif `ATGCAACT` planted at (8, 19, 3, 5, 31, 27, 15).
pub const WORKED_EXAMPLE: [&str; 7] = [
    "CGGGGCTATGGAACTGGGTCGTCACATTCCCCTTTCGATA",
    "TTTGAGGGTGCCCAATAAATGCCACTCCAAAGCGGACAAA",
    "GGATGCAACTGATGCCGTTTGACGACCTAAATCAACGGCC",
    "AAGGATGCAACTCCAGGAGCGCCTTTGCTGGTTCTACCTG",
    "AATTTTCTAAAAAGATTATAATGTCGGTCCATGCAACTTC",
    "CTGCTGTACAACTGAGATCATGCTGCATGCAACTTTCAAC",
    "TACATGATCTTTTGATGCAACGTGGATGAGGGAATGATGC",
];

pub const WORKED_EXAMPLE_STARTS: [usize; 7] = [8, 19, 3, 5, 31, 27, 15];

pub fn worked_example() -> SequenceSet {
    SequenceSet::dna(&WORKED_EXAMPLE).expect("static DNA")
}
