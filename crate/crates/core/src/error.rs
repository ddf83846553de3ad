use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown symbol {symbol:?}{}", location(.record, .line))]
    UnknownSymbol {
        symbol: char,
        record: Option<String>,
        line: Option<usize>,
    },
    #[error("k-mer of length {len} does not fit in 64 bits (max {max} for this alphabet)")]
    KmerTooLong { len: usize, max: usize },
    #[error("code {code} is out of range for k = {k}")]
    CodeOutOfRange { code: u64, k: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("record {0:?} has no sequence")]
    RecordWithoutSequence(String),
    #[error("sequence data before the first header at line {0}")]
    MissingHeader(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("search space of {size} exceeds the limit of {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },
    #[error("dense table of {size} buckets exceeds the cap of {cap}; use the grouped backend")]
    DenseTableTooLarge { size: u128, cap: u64 },
    #[error("bucket threshold is unreachable (P[fewer than s hits] = {tail}); lower s or k")]
    Unreachable { tail: f64 },
    #[error("bucket has no members")]
    EmptyBucket,
    #[error("no enriched buckets in {trials} trial(s); try a lower bucket threshold s")]
    NoEnrichedBuckets { trials: u64 },
    #[error("numerical underflow in EM")]
    NumericalUnderflow,
}

fn location(record: &Option<String>, line: &Option<usize>) -> String {
    match (record, line) {
        (Some(r), Some(l)) => format!(" in record {r:?} at line {l}"),
        (Some(r), None) => format!(" in record {r:?}"),
        (None, Some(l)) => format!(" at line {l}"),
        (None, None) => String::new(),
    }
}
