use super::{Alphabet, SequenceSet};
use crate::error::{Error, Result};

/// Parses FASTA text. Sequence lines may be folded, mixed case, and contain
/// whitespace; blank lines are skipped.
pub fn parse_fasta(text: &str, alphabet: &Alphabet) -> Result<SequenceSet> {
    let mut records: Vec<(String, Vec<u8>)> = Vec::new();
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let line = line.trim_end_matches('\r');
        if let Some(header) = line.strip_prefix('>') {
            if let Some((name, seq)) = records.last() {
                if seq.is_empty() {
                    return Err(Error::RecordWithoutSequence(name.clone()));
                }
            }
            let name = header.split_whitespace().next().unwrap_or("").to_string();
            records.push((name, Vec::new()));
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let Some((name, seq)) = records.last_mut() else {
            return Err(Error::MissingHeader(lineno));
        };
        for c in line.bytes().filter(|c| !c.is_ascii_whitespace()) {
            if alphabet.rank(c).is_none() {
                return Err(Error::UnknownSymbol {
                    symbol: c as char,
                    record: Some(name.clone()),
                    line: Some(lineno),
                });
            }
            seq.push(c.to_ascii_uppercase());
        }
    }
    match records.last() {
        None => return Err(Error::EmptyInput),
        Some((name, seq)) if seq.is_empty() => {
            return Err(Error::RecordWithoutSequence(name.clone()))
        }
        _ => {}
    }
    SequenceSet::from_records(alphabet.clone(), records)
}

const LINE_WIDTH: usize = 60;

pub fn to_fasta(seqs: &SequenceSet) -> String {
    let mut out = String::new();
    for (name, seq) in seqs.names().iter().zip(seqs.sequences()) {
        out.push('>');
        out.push_str(name);
        out.push('\n');
        for chunk in seq.chunks(LINE_WIDTH) {
            out.push_str(std::str::from_utf8(chunk).expect("ascii"));
            out.push('\n');
        }
    }
    out
}
