//! Codebooks and their text serialization.
//!
//! ```text
//! L 3 epsilon 0.25 d_max 0.5877866649021191
//! 0
//! 1
//! 0
//! ```
//!
//! The header is a list of whitespace-separated `key value` pairs starting
//! with `L`, `epsilon`, `d_max`; further pairs carry construction parameters.
//! Each following line is one codeword written as its symbol tokens.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::prob::Alphabet;

/// Construction metadata carried alongside the codewords.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CodebookMeta {
    pub epsilon: f64,
    pub d_max: f64,
    /// Extra `(name, value)` pairs written after the fixed header fields.
    pub params: Vec<(String, f64)>,
}

/// An ordered multiset of codewords `x_1, ..., x_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    alphabet: Alphabet,
    words: Vec<usize>,
    pub meta: CodebookMeta,
}

impl Codebook {
    pub fn new(alphabet: Alphabet, words: Vec<usize>) -> Result<Self> {
        Self::with_meta(alphabet, words, CodebookMeta::default())
    }

    pub fn with_meta(alphabet: Alphabet, words: Vec<usize>, meta: CodebookMeta) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyCodebook);
        }
        if let Some(&bad) = words.iter().find(|&&x| x >= alphabet.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                size: alphabet.len(),
            });
        }
        Ok(Codebook { alphabet, words, meta })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn words(&self) -> &[usize] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Multiplicity of each symbol of the alphabet.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.alphabet.len()];
        for &x in &self.words {
            counts[x] += 1;
        }
        counts
    }

    /// Re-expresses a codebook over a subset alphabet in terms of the
    /// subset's parent alphabet.
    pub fn lift_to_parent(&self) -> Result<Codebook> {
        let (parent, members) = self
            .alphabet
            .as_subset()
            .ok_or_else(|| Error::AlphabetMismatch("lift_to_parent needs a subset".into()))?;
        Ok(Codebook {
            alphabet: parent.clone(),
            words: self.words.iter().map(|&x| members[x]).collect(),
            meta: self.meta.clone(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write!(
            out,
            "L {} epsilon {} d_max {}",
            self.words.len(),
            self.meta.epsilon,
            self.meta.d_max
        )
        .unwrap();
        for (k, v) in &self.meta.params {
            write!(out, " {k} {v}").unwrap();
        }
        out.push('\n');
        for &x in &self.words {
            out.push_str(&self.alphabet.label(x));
            out.push('\n');
        }
        out
    }

    /// Parses the text format against a known alphabet.
    pub fn from_text(alphabet: Alphabet, text: &str) -> Result<Codebook> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("missing header line".into()))?;
        let (len, meta) = parse_header(header)?;
        let mut words = Vec::with_capacity(len);
        for (i, line) in lines.enumerate() {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let x = alphabet
                .index_of_tokens(&tokens)
                .map_err(|e| Error::Format(format!("codeword {}: {e}", i + 1)))?;
            words.push(x);
        }
        if words.len() != len {
            return Err(Error::Format(format!(
                "header declares L = {len} but {} codewords follow",
                words.len()
            )));
        }
        Codebook::with_meta(alphabet, words, meta)
    }
}

pub(crate) fn parse_header(line: &str) -> Result<(usize, CodebookMeta)> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if !tokens.len().is_multiple_of(2) {
        return Err(Error::Format(format!("odd number of header tokens: {line:?}")));
    }
    let mut len = None;
    let mut meta = CodebookMeta::default();
    let mut seen_eps = false;
    let mut seen_dmax = false;
    for pair in tokens.chunks(2) {
        let (key, value) = (pair[0], pair[1]);
        match key {
            "L" => len = Some(value.parse::<usize>().map_err(|e| Error::Format(format!("L: {e}")))?),
            _ => {
                let v = value.parse::<f64>().map_err(|e| Error::Format(format!("{key}: {e}")))?;
                match key {
                    "epsilon" => {
                        meta.epsilon = v;
                        seen_eps = true;
                    }
                    "d_max" => {
                        meta.d_max = v;
                        seen_dmax = true;
                    }
                    _ => meta.params.push((key.to_string(), v)),
                }
            }
        }
    }
    let len = len.ok_or_else(|| Error::Format("header lacks L".into()))?;
    if !seen_eps || !seen_dmax {
        return Err(Error::Format("header lacks epsilon or d_max".into()));
    }
    Ok((len, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Budget;

    #[test]
    fn text_round_trip_over_sequences() {
        let bits = Alphabet::numeric(2).unwrap();
        let seqs = bits.power(3, Budget::DEFAULT).unwrap();
        let meta = CodebookMeta {
            epsilon: 0.25,
            d_max: std::f64::consts::LN_2,
            params: vec![("tau".into(), 0.1)],
        };
        let c = Codebook::with_meta(seqs.clone(), vec![0, 5, 5, 7], meta).unwrap();
        let text = c.to_text();
        assert!(text.starts_with("L 4 epsilon 0.25 d_max 0.6931471805599453 tau 0.1\n0 0 0\n1 0 1\n"));
        assert_eq!(Codebook::from_text(seqs, &text).unwrap(), c);
    }

    #[test]
    fn rejects_inconsistent_text() {
        let bits = Alphabet::numeric(2).unwrap();
        assert!(Codebook::from_text(bits.clone(), "L 2 epsilon 0.5 d_max 0\n0\n").is_err());
        assert!(Codebook::from_text(bits.clone(), "L 1 epsilon 0.5\n0\n").is_err());
        assert!(Codebook::from_text(bits, "L 1 epsilon 0.5 d_max 0\n7\n").is_err());
    }

    #[test]
    fn empty_codebook_is_an_error() {
        let bits = Alphabet::numeric(2).unwrap();
        assert_eq!(Codebook::new(bits, vec![]).unwrap_err(), Error::EmptyCodebook);
    }
}
