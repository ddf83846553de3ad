use crate::error::{Error, Result};

/// An ordered set of symbols. A symbol's rank is its index in the ordering,
/// and ranks are the digits used by k-mer encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
    ranks: [Option<u8>; 256],
}

impl Alphabet {
    /// Builds an alphabet from distinct ASCII symbols. Lookups are
    /// case-insensitive; symbols are stored uppercase.
    pub fn new(symbols: &str) -> Result<Self> {
        let mut ranks = [None; 256];
        let mut out = Vec::with_capacity(symbols.len());
        for (i, c) in symbols.chars().enumerate() {
            if !c.is_ascii_graphic() {
                return Err(Error::InvalidParams(format!(
                    "symbol {c:?} is not printable ASCII"
                )));
            }
            let up = c.to_ascii_uppercase() as u8;
            if ranks[up as usize].is_some() {
                return Err(Error::InvalidParams(format!("duplicate symbol {c:?}")));
            }
            ranks[up as usize] = Some(i as u8);
            ranks[up.to_ascii_lowercase() as usize] = Some(i as u8);
            out.push(up);
        }
        if out.len() < 2 || out.len() > 255 {
            return Err(Error::InvalidParams(format!(
                "alphabet needs 2..=255 symbols, got {}",
                out.len()
            )));
        }
        Ok(Alphabet {
            symbols: out,
            ranks,
        })
    }

    /// DNA with the ordering A, C, T, G (ranks 0..=3).
    pub fn dna() -> Self {
        Alphabet::new("ACTG").expect("static alphabet")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    #[inline]
    pub fn rank(&self, symbol: u8) -> Option<u8> {
        self.ranks[symbol as usize]
    }

    pub fn rank_of(&self, symbol: u8) -> Result<u8> {
        self.rank(symbol).ok_or(Error::UnknownSymbol {
            symbol: symbol as char,
            record: None,
            line: None,
        })
    }

    #[inline]
    pub fn symbol(&self, rank: u8) -> u8 {
        self.symbols[rank as usize]
    }

    /// Longest k whose codes all fit in a `u64`, i.e. the largest k with
    /// |Σ|^k - 1 representable and |Σ|^k itself computable.
    pub fn max_kmer_len(&self) -> usize {
        let base = self.len() as u64;
        let mut k = 0;
        let mut p: u64 = 1;
        while let Some(next) = p.checked_mul(base) {
            p = next;
            k += 1;
        }
        k
    }

    /// |Σ|^k, or `None` on overflow.
    pub fn pow(&self, k: usize) -> Option<u64> {
        (self.len() as u64).checked_pow(k as u32)
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::dna()
    }
}
