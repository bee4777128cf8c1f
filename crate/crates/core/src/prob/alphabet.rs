//! Finite alphabets with a fixed symbol order.
//!
//! Three shapes exist: an explicit list of labels, the `n`-fold power of
//! another alphabet (sequences, indexed in mixed radix with the first
//! coordinate most significant, so index order is lexicographic order), and
//! an ordered subset of another alphabet. Product alphabets never materialize
//! their labels; a label is rendered on demand from its coordinates.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Upper bound on the number of enumerated states (product symbols, matrix
/// cells, type-class members) an exact computation may touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub usize);

impl Budget {
    pub const DEFAULT: Budget = Budget(1 << 24);

    pub fn check(self, needed: u128) -> Result<()> {
        if needed > self.0 as u128 {
            Err(Error::BudgetExceeded { needed, budget: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}

#[derive(Debug)]
enum Repr {
    Labels {
        labels: Vec<String>,
        lookup: HashMap<String, usize>,
    },
    Power {
        base: Alphabet,
        n: usize,
        size: usize,
    },
    Subset {
        parent: Alphabet,
        members: Vec<usize>,
    },
}

/// An ordered, finite set of symbols. Cheap to clone.
#[derive(Clone)]
pub struct Alphabet(Arc<Repr>);

impl Alphabet {
    /// Builds an alphabet from labels in the given order.
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut lookup = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() || label.chars().any(char::is_whitespace) {
                return Err(Error::InvalidLabel(label.clone()));
            }
            if lookup.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateSymbol(label.clone()));
            }
        }
        Ok(Alphabet(Arc::new(Repr::Labels { labels, lookup })))
    }

    /// `{"0", "1", ..., "k-1"}`.
    pub fn numeric(k: usize) -> Result<Self> {
        Self::new((0..k).map(|i| i.to_string()))
    }

    /// The set of length-`n` sequences over `self`.
    pub fn power(&self, n: usize, budget: Budget) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: 0.0,
                reason: "block length must be at least 1",
            });
        }
        let size = checked_pow(self.len(), n);
        budget.check(size)?;
        Ok(Alphabet(Arc::new(Repr::Power {
            base: self.clone(),
            n,
            size: size as usize,
        })))
    }

    /// The sub-alphabet made of `members` (indices into `self`), kept in
    /// ascending index order.
    pub fn subset(&self, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if let Some(&last) = members.last() {
            if last >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: last,
                    size: self.len(),
                });
            }
        }
        Ok(Alphabet(Arc::new(Repr::Subset {
            parent: self.clone(),
            members,
        })))
    }

    pub fn len(&self) -> usize {
        match &*self.0 {
            Repr::Labels { labels, .. } => labels.len(),
            Repr::Power { size, .. } => *size,
            Repr::Subset { members, .. } => members.len(),
        }
    }

    /// Alphabets are never empty; provided for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(base, n)` when this is a power alphabet.
    pub fn as_power(&self) -> Option<(&Alphabet, usize)> {
        match &*self.0 {
            Repr::Power { base, n, .. } => Some((base, *n)),
            _ => None,
        }
    }

    /// `(parent, members)` when this is a subset alphabet.
    pub fn as_subset(&self) -> Option<(&Alphabet, &[usize])> {
        match &*self.0 {
            Repr::Subset { parent, members } => Some((parent, members)),
            _ => None,
        }
    }

    /// Number of whitespace-separated tokens a symbol of this alphabet
    /// occupies in text formats.
    pub fn token_width(&self) -> usize {
        match &*self.0 {
            Repr::Labels { .. } => 1,
            Repr::Power { base, n, .. } => base.token_width() * n,
            Repr::Subset { parent, .. } => parent.token_width(),
        }
    }

    /// Label tokens of symbol `i`.
    pub fn tokens(&self, i: usize) -> Vec<String> {
        let mut out = Vec::with_capacity(self.token_width());
        self.push_tokens(i, &mut out);
        out
    }

    fn push_tokens(&self, i: usize, out: &mut Vec<String>) {
        match &*self.0 {
            Repr::Labels { labels, .. } => out.push(labels[i].clone()),
            Repr::Power { base, n, .. } => {
                for c in decode_mixed(i, base.len(), *n) {
                    base.push_tokens(c, out);
                }
            }
            Repr::Subset { parent, members } => parent.push_tokens(members[i], out),
        }
    }

    /// Human-readable label: the tokens joined by single spaces.
    pub fn label(&self, i: usize) -> String {
        self.tokens(i).join(" ")
    }

    /// Looks a symbol up by its tokens (see [`Alphabet::token_width`]).
    pub fn index_of_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Result<usize> {
        if tokens.len() != self.token_width() {
            let joined: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
            return Err(Error::UnknownSymbol(joined.join(" ")));
        }
        match &*self.0 {
            Repr::Labels { lookup, .. } => {
                let t = tokens[0].as_ref();
                lookup
                    .get(t)
                    .copied()
                    .ok_or_else(|| Error::UnknownSymbol(t.to_string()))
            }
            Repr::Power { base, n, .. } => {
                let w = base.token_width();
                let mut coords = Vec::with_capacity(*n);
                for chunk in tokens.chunks(w) {
                    coords.push(base.index_of_tokens(chunk)?);
                }
                Ok(encode_mixed(&coords, base.len()))
            }
            Repr::Subset { parent, members } => {
                let j = parent.index_of_tokens(tokens)?;
                members.binary_search(&j).map_err(|_| {
                    let joined: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
                    Error::UnknownSymbol(joined.join(" "))
                })
            }
        }
    }

    /// Looks a symbol up by its space-separated label.
    pub fn index_of(&self, label: &str) -> Result<usize> {
        let tokens: Vec<&str> = label.split_whitespace().collect();
        self.index_of_tokens(&tokens)
    }

    /// Mixed-radix index of a coordinate sequence; only meaningful for power
    /// alphabets.
    pub fn encode(&self, coords: &[usize]) -> Result<usize> {
        let (base, n) = self
            .as_power()
            .ok_or_else(|| Error::AlphabetMismatch("encode needs a power alphabet".into()))?;
        if coords.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: coords.len(),
            });
        }
        if let Some(&bad) = coords.iter().find(|&&c| c >= base.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                size: base.len(),
            });
        }
        Ok(encode_mixed(coords, base.len()))
    }

    /// Coordinates of power-alphabet symbol `i`.
    pub fn decode(&self, i: usize) -> Result<Vec<usize>> {
        let (base, n) = self
            .as_power()
            .ok_or_else(|| Error::AlphabetMismatch("decode needs a power alphabet".into()))?;
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                size: self.len(),
            });
        }
        Ok(decode_mixed(i, base.len(), n))
    }

    pub(crate) fn ensure_same(&self, other: &Alphabet, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!(
                "{what}: alphabets of size {} and {} differ",
                self.len(),
                other.len()
            )))
        }
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&*self.0, &*other.0) {
            (Repr::Labels { labels: a, .. }, Repr::Labels { labels: b, .. }) => a == b,
            (Repr::Power { base: a, n: na, .. }, Repr::Power { base: b, n: nb, .. }) => na == nb && a == b,
            (Repr::Subset { parent: a, members: ma }, Repr::Subset { parent: b, members: mb }) => ma == mb && a == b,
            _ => false,
        }
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Repr::Labels { labels, .. } => f.debug_tuple("Alphabet").field(labels).finish(),
            Repr::Power { base, n, .. } => write!(f, "{base:?}^{n}"),
            Repr::Subset { parent, members } => {
                write!(f, "{parent:?}|{} of {}", members.len(), parent.len())
            }
        }
    }
}

/// `base^n` as `u128`, saturating at `u128::MAX`.
pub(crate) fn checked_pow(base: usize, n: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

pub(crate) fn encode_mixed(coords: &[usize], radix: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * radix + c)
}

pub(crate) fn decode_mixed(mut i: usize, radix: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = i % radix;
        i /= radix;
    }
    out
}

/// Fills `out` with the coordinates of `i`; avoids an allocation per symbol
/// in enumeration loops.
pub(crate) fn decode_into(mut i: usize, radix: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = i % radix;
        i /= radix;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_blank_labels() {
        assert_eq!(
            Alphabet::new(["a", "a"]).unwrap_err(),
            Error::DuplicateSymbol("a".into())
        );
        assert!(matches!(Alphabet::new(["a b"]), Err(Error::InvalidLabel(_))));
        assert_eq!(Alphabet::new(Vec::<String>::new()).unwrap_err(), Error::EmptyAlphabet);
    }

    #[test]
    fn power_indexing_is_lexicographic() {
        let a = Alphabet::new(["a", "b", "c"]).unwrap();
        let a2 = a.power(2, Budget::DEFAULT).unwrap();
        assert_eq!(a2.len(), 9);
        let labels: Vec<String> = (0..9).map(|i| a2.label(i)).collect();
        let mut sorted = labels.clone();
        sorted.sort();
        assert_eq!(labels, sorted);
        assert_eq!(a2.label(5), "b c");
        assert_eq!(a2.index_of("b c").unwrap(), 5);
        assert_eq!(a2.encode(&[1, 2]).unwrap(), 5);
        assert_eq!(a2.decode(5).unwrap(), vec![1, 2]);
    }

    #[test]
    fn power_respects_budget() {
        let a = Alphabet::numeric(2).unwrap();
        assert!(a.power(10, Budget(1 << 10)).is_ok());
        assert_eq!(
            a.power(11, Budget(1 << 10)).unwrap_err(),
            Error::BudgetExceeded {
                needed: 2048,
                budget: 1024
            }
        );
    }

    #[test]
    fn subset_inherits_labels() {
        let a = Alphabet::new(["x", "y", "z"]).unwrap();
        let s = a.subset([2, 0]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.label(0), "x");
        assert_eq!(s.label(1), "z");
        assert_eq!(s.index_of("z").unwrap(), 1);
        assert!(s.index_of("y").is_err());
    }

    #[test]
    fn structural_equality() {
        let a = Alphabet::numeric(2).unwrap();
        let b = Alphabet::numeric(2).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.power(3, Budget::DEFAULT).unwrap(),
            b.power(3, Budget::DEFAULT).unwrap()
        );
        assert_ne!(a.power(2, Budget::DEFAULT).unwrap(), a);
    }
}
