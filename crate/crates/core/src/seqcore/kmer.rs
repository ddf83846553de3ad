use super::Alphabet;
use crate::error::{Error, Result};

/// Reads a k-mer as a base-|Σ| number, most significant symbol first.
pub fn encode_kmer(kmer: &[u8], alphabet: &Alphabet) -> Result<u64> {
    let max = alphabet.max_kmer_len();
    if kmer.len() > max {
        return Err(Error::KmerTooLong {
            len: kmer.len(),
            max,
        });
    }
    let base = alphabet.len() as u64;
    kmer.iter().try_fold(0u64, |acc, &c| {
        let r = alphabet.rank_of(c)?;
        Ok(acc * base + r as u64)
    })
}

/// Same as [`encode_kmer`] over symbol ranks. Callers guarantee the length bound.
#[inline]
pub(crate) fn encode_ranks<I: IntoIterator<Item = u8>>(ranks: I, base: u64) -> u64 {
    ranks.into_iter().fold(0u64, |acc, r| acc * base + r as u64)
}

pub fn decode_kmer(code: u64, k: usize, alphabet: &Alphabet) -> Result<Vec<u8>> {
    let max = alphabet.max_kmer_len();
    if k > max {
        return Err(Error::KmerTooLong { len: k, max });
    }
    let bound = alphabet.pow(k).expect("k within max_kmer_len");
    if code >= bound {
        return Err(Error::CodeOutOfRange { code, k });
    }
    let base = alphabet.len() as u64;
    let mut out = vec![0u8; k];
    let mut rest = code;
    for slot in out.iter_mut().rev() {
        *slot = alphabet.symbol((rest % base) as u8);
        rest /= base;
    }
    Ok(out)
}

/// Number of positions at which two equal-length strings differ.
pub fn hamming(a: &[u8], b: &[u8]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}
