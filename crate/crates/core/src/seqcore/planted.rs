use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Alphabet, SequenceSet};
use crate::error::{Error, Result};
use crate::scoring::StartVector;

/// A synthetic (l,d) instance together with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedInstance {
    pub sequences: SequenceSet,
    pub motif: Vec<u8>,
    pub positions: StartVector,
    /// Per sequence, the sorted 1-based motif columns that were mutated.
    pub mutation_sets: Vec<Vec<usize>>,
    pub l: usize,
    pub d: usize,
    pub seed: u64,
}

/// Sidecar written next to a generated FASTA file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthFile {
    pub motif: String,
    pub positions: Vec<usize>,
    pub d: usize,
    pub l: usize,
    pub seed: u64,
}

impl PlantedInstance {
    pub fn truth(&self) -> TruthFile {
        TruthFile {
            motif: String::from_utf8(self.motif.clone()).expect("ascii"),
            positions: self.positions.as_slice().to_vec(),
            d: self.d,
            l: self.l,
            seed: self.seed,
        }
    }

    /// The planted occurrence in sequence `i` (1-based).
    pub fn occurrence(&self, i: usize) -> &[u8] {
        self.sequences
            .lmer_at(i, self.positions[i - 1], self.l)
            .expect("planted position is in range")
    }
}

/// Generates t DNA sequences of length n, each carrying one copy of a random
/// l-mer motif with exactly d substitutions.
///
/// Draw order from a `ChaCha8Rng` seeded by `seed_from_u64(seed)`: the motif,
/// then per sequence its background, start offset, mutated columns, and the
/// replacement symbol for each mutated column.
pub fn generate_planted(
    t: usize,
    n: usize,
    l: usize,
    d: usize,
    seed: u64,
) -> Result<PlantedInstance> {
    if t == 0 || l == 0 || d >= l || l > n {
        return Err(Error::InvalidParams(format!(
            "need t >= 1 and 0 <= d < l <= n (t={t}, n={n}, l={l}, d={d})"
        )));
    }
    let alphabet = Alphabet::dna();
    let sigma = alphabet.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| alphabet.symbol(rng.random_range(0..sigma) as u8);

    let motif: Vec<u8> = (0..l).map(|_| draw(&mut rng)).collect();
    let mut seqs = Vec::with_capacity(t);
    let mut starts = Vec::with_capacity(t);
    let mut mutation_sets = Vec::with_capacity(t);
    for _ in 0..t {
        let mut seq: Vec<u8> = (0..n).map(|_| draw(&mut rng)).collect();
        let start = rng.random_range(0..=n - l);
        let mut columns = sample(&mut rng, l, d).into_vec();
        columns.sort_unstable();
        let mut occ = motif.clone();
        for &c in &columns {
            let old = alphabet.rank(occ[c]).expect("dna") as usize;
            // shift by 1..sigma-1 so the replacement always differs
            let new = (old + rng.random_range(1..sigma)) % sigma;
            occ[c] = alphabet.symbol(new as u8);
        }
        seq[start..start + l].copy_from_slice(&occ);
        seqs.push(seq);
        starts.push(start + 1);
        mutation_sets.push(columns.into_iter().map(|c| c + 1).collect());
    }
    Ok(PlantedInstance {
        sequences: SequenceSet::new(alphabet, &seqs)?,
        motif,
        positions: StartVector::new(starts),
        mutation_sets,
        l,
        d,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::hamming;
    use proptest::prelude::*;

    #[test]
    fn exactly_d_mutations() {
        for seed in 0..20 {
            let inst = generate_planted(7, 40, 8, 1, seed).unwrap();
            assert_eq!(inst.sequences.len(), 7);
            for i in 1..=7 {
                assert_eq!(hamming(&inst.motif, inst.occurrence(i)).unwrap(), 1);
                assert_eq!(inst.mutation_sets[i - 1].len(), 1);
            }
        }
    }

    #[test]
    fn zero_mutations() {
        let inst = generate_planted(5, 20, 5, 0, 99).unwrap();
        for i in 1..=5 {
            assert_eq!(inst.occurrence(i), inst.motif.as_slice());
        }
    }

    #[test]
    fn deterministic() {
        let a = generate_planted(6, 50, 10, 2, 1234).unwrap();
        let b = generate_planted(6, 50, 10, 2, 1234).unwrap();
        assert_eq!(a, b);
        let c = generate_planted(6, 50, 10, 2, 1235).unwrap();
        assert_ne!(a.sequences, c.sequences);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(generate_planted(0, 10, 5, 1, 0).is_err());
        assert!(generate_planted(3, 10, 5, 5, 0).is_err());
        assert!(generate_planted(3, 4, 5, 1, 0).is_err());
        assert!(generate_planted(3, 5, 5, 4, 0).is_ok());
    }

    #[test]
    fn truth_json() {
        let inst = generate_planted(2, 12, 4, 1, 7).unwrap();
        let json = serde_json::to_string(&inst.truth()).unwrap();
        assert!(json.starts_with("{\"motif\":"));
        let back: TruthFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, inst.truth());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn plant_invariants(t in 1usize..8, extra in 0usize..30, l in 1usize..16, dfrac in 0.0f64..1.0, seed in any::<u64>()) {
            let d = ((l as f64) * dfrac) as usize;
            let n = l + extra;
            let inst = generate_planted(t, n, l, d, seed).unwrap();
            for i in 1..=t {
                let p = inst.positions[i - 1];
                prop_assert!(p >= 1 && p + l - 1 <= n);
                prop_assert_eq!(hamming(&inst.motif, inst.occurrence(i)).unwrap(), d);
                let diff: Vec<usize> = (1..=l).filter(|&c| inst.motif[c - 1] != inst.occurrence(i)[c - 1]).collect();
                prop_assert_eq!(&diff, &inst.mutation_sets[i - 1]);
            }
        }
    }
}
