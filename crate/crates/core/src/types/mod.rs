//! Method of types: compositions, type classes, and typical sets.

mod typical;

pub use typical::{build_typed_sets, conditional_typical_set, typical_set, SequenceSet, TypedSets};

use std::fmt;

use crate::error::{Error, Result};
use crate::prob::{Alphabet, Budget, Distribution};

/// The composition of length-`n` sequences over an alphabet together with
/// the size of its type class.
#[derive(Clone, PartialEq, Eq)]
pub struct TypeClass {
    alphabet: Alphabet,
    n: usize,
    counts: Vec<usize>,
    class_size: u128,
}

impl TypeClass {
    pub fn new(alphabet: Alphabet, counts: Vec<usize>) -> Result<Self> {
        if counts.len() != alphabet.len() {
            return Err(Error::LengthMismatch {
                expected: alphabet.len(),
                got: counts.len(),
            });
        }
        let n: usize = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: 0.0,
                reason: "a type needs a positive block length",
            });
        }
        let class_size = multinomial(&counts);
        Ok(TypeClass {
            alphabet,
            n,
            counts,
            class_size,
        })
    }

    /// The type of a sequence of symbol indices.
    pub fn of_sequence(alphabet: Alphabet, seq: &[usize]) -> Result<Self> {
        let mut counts = vec![0; alphabet.len()];
        for &s in seq {
            *counts.get_mut(s).ok_or(Error::IndexOutOfRange {
                index: s,
                size: alphabet.len(),
            })? += 1;
        }
        Self::new(alphabet, counts)
    }

    /// The type of a sequence of symbol labels.
    pub fn of_labels<S: AsRef<str>>(alphabet: Alphabet, seq: &[S]) -> Result<Self> {
        let idx = seq
            .iter()
            .map(|s| alphabet.index_of(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::of_sequence(alphabet, &idx)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// `|X_T^n| = n! / Π_a N(a)!`, saturating at `u128::MAX`.
    pub fn class_size(&self) -> u128 {
        self.class_size
    }

    /// Empirical frequencies `N(a)/n`.
    pub fn freq(&self) -> Distribution {
        Distribution::from_counts(self.alphabet.clone(), &self.counts).expect("counts sum to n > 0")
    }

    /// Compact label such as `(2,1)`.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.counts.iter().map(ToString::to_string).collect();
        format!("({})", parts.join(","))
    }

    /// Sequences of this type in lexicographic order.
    pub fn sequences(&self, budget: Budget) -> Result<TypeClassSequences> {
        budget.check(self.class_size)?;
        let first = self
            .counts
            .iter()
            .enumerate()
            .flat_map(|(a, &c)| std::iter::repeat_n(a, c))
            .collect();
        Ok(TypeClassSequences { next: Some(first) })
    }

    /// Indices of the type class inside `alphabet^n`, ascending.
    pub fn members(&self, budget: Budget) -> Result<Vec<usize>> {
        let k = self.alphabet.len();
        Ok(self
            .sequences(budget)?
            .map(|s| s.iter().fold(0, |acc, &c| acc * k + c))
            .collect())
    }

    /// Whether `seq` (symbol indices) has this type.
    pub fn contains(&self, seq: &[usize]) -> bool {
        if seq.len() != self.n {
            return false;
        }
        let mut counts = vec![0; self.counts.len()];
        for &s in seq {
            match counts.get_mut(s) {
                Some(c) => *c += 1,
                None => return false,
            }
        }
        counts == self.counts
    }
}

impl fmt::Debug for TypeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TypeClass{} n={} |class|={}", self.label(), self.n, self.class_size)
    }
}

/// Iterator over the sequences of a type class, lexicographically.
#[derive(Debug, Clone)]
pub struct TypeClassSequences {
    next: Option<Vec<usize>>,
}

impl Iterator for TypeClassSequences {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// Advances to the lexicographic successor; false when `v` is the last
/// arrangement.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn multinomial(counts: &[usize]) -> u128 {
    let mut acc: u128 = 1;
    let mut total = 0usize;
    for &c in counts {
        total += c;
        // acc *= C(total, c), built incrementally so every division is exact.
        let mut binom: u128 = 1;
        for i in 1..=c {
            binom = match binom.checked_mul((total - c + i) as u128) {
                Some(v) => v / i as u128,
                None => return u128::MAX,
            };
        }
        acc = match acc.checked_mul(binom) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    acc
}

/// All types of length-`n` sequences over `alphabet`, ordered by the
/// lexicographically smallest sequence of each class: `(n,0,…)` first,
/// `(…,0,n)` last.
pub fn enumerate_types(alphabet: &Alphabet, n: usize) -> Result<Vec<TypeClass>> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "block length must be at least 1",
        });
    }
    let mut out = Vec::new();
    let mut counts = vec![0; alphabet.len()];
    compositions(n, 0, &mut counts, &mut |c| {
        out.push(TypeClass::new(alphabet.clone(), c.to_vec()).expect("valid composition"))
    });
    Ok(out)
}

fn compositions(remaining: usize, slot: usize, counts: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if slot + 1 == counts.len() {
        counts[slot] = remaining;
        emit(counts);
        return;
    }
    for c in (0..=remaining).rev() {
        counts[slot] = c;
        compositions(remaining - c, slot + 1, counts, emit);
    }
    counts[slot] = 0;
}

/// Index of a type within [`enumerate_types`] order, computed from counts.
pub(crate) fn type_lookup(types: &[TypeClass]) -> std::collections::HashMap<Vec<usize>, usize> {
    types
        .iter()
        .enumerate()
        .map(|(i, t)| (t.counts().to_vec(), i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::entropy;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn enumerate_examples() {
        let types = enumerate_types(&ab(), 2).unwrap();
        let counts: Vec<&[usize]> = types.iter().map(TypeClass::counts).collect();
        assert_eq!(counts, vec![&[2, 0][..], &[1, 1], &[0, 2]]);
        assert_eq!(enumerate_types(&ab(), 3).unwrap().len(), 4);
        assert_eq!(enumerate_types(&Alphabet::numeric(3).unwrap(), 1).unwrap().len(), 3);
        assert!(enumerate_types(&ab(), 0).is_err());
    }

    #[test]
    fn type_of_examples() {
        let t = TypeClass::of_labels(ab(), &["a", "a", "b"]).unwrap();
        assert_eq!(t.counts(), &[2, 1]);
        let f = t.freq();
        assert!((f.get(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((f.get(1) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(TypeClass::of_labels(ab(), &["b", "b", "b"]).unwrap().counts(), &[0, 3]);
        let t = TypeClass::of_labels(ab(), &["a", "b", "a", "b"]).unwrap();
        assert_eq!(t.counts(), &[2, 2]);
        assert_eq!(t.class_size(), 6);
        assert_eq!(
            TypeClass::of_labels(ab(), &["a", "c"]).unwrap_err(),
            Error::UnknownSymbol("c".into())
        );
    }

    #[test]
    fn class_sequence_examples() {
        let t = TypeClass::new(ab(), vec![1, 1]).unwrap();
        let seqs: Vec<_> = t.sequences(Budget::DEFAULT).unwrap().collect();
        assert_eq!(seqs, vec![vec![0, 1], vec![1, 0]]);
        let t = TypeClass::new(ab(), vec![2, 0]).unwrap();
        assert_eq!(t.sequences(Budget::DEFAULT).unwrap().count(), 1);
        let t = TypeClass::new(ab(), vec![2, 1]).unwrap();
        assert_eq!(t.sequences(Budget::DEFAULT).unwrap().count(), 3);
        let t = TypeClass::new(ab(), vec![10, 10]).unwrap();
        assert!(matches!(t.sequences(Budget(1000)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn class_sequences_brute_force() {
        let abc = Alphabet::numeric(3).unwrap();
        let n = 5;
        let power = abc.power(n, Budget::DEFAULT).unwrap();
        for t in enumerate_types(&abc, n).unwrap() {
            let expected: Vec<usize> = (0..power.len())
                .filter(|&i| t.contains(&power.decode(i).unwrap()))
                .collect();
            assert_eq!(t.members(Budget::DEFAULT).unwrap(), expected);
            assert_eq!(t.class_size(), expected.len() as u128);
        }
    }

    #[test]
    fn class_size_below_entropy_bound() {
        for k in 2..=4 {
            let a = Alphabet::numeric(k).unwrap();
            for n in 1..=10 {
                let types = enumerate_types(&a, n).unwrap();
                assert!((types.len() as f64) <= ((n + 1) as f64).powi(k as i32));
                for t in types {
                    let bound = (n as f64 * entropy(&t.freq())).exp();
                    assert!(t.class_size() as f64 <= bound * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn multinomial_values() {
        assert_eq!(multinomial(&[2, 2]), 6);
        assert_eq!(multinomial(&[3, 2, 1]), 60);
        assert_eq!(multinomial(&[50, 50]), 100_891_344_545_564_193_334_812_497_256);
    }
}
