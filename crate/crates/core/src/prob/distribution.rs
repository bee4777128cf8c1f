use std::sync::Arc;

use super::alphabet::Alphabet;
use crate::error::{Error, Result};

/// Tolerance on the total mass of a probability vector.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    alphabet: Alphabet,
    mass: Arc<[f64]>,
}

impl Distribution {
    /// Validates and wraps `mass`. Entries must be finite and nonnegative and
    /// sum to 1 within [`NORMALIZATION_TOL`]; nothing is renormalized.
    pub fn new(alphabet: Alphabet, mass: Vec<f64>) -> Result<Self> {
        check_probability_vector(alphabet.len(), &mass)?;
        Ok(Distribution {
            alphabet,
            mass: mass.into(),
        })
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        Distribution {
            alphabet,
            mass: vec![1.0 / k as f64; k].into(),
        }
    }

    pub fn point(alphabet: Alphabet, index: usize) -> Result<Self> {
        if index >= alphabet.len() {
            return Err(Error::IndexOutOfRange {
                index,
                size: alphabet.len(),
            });
        }
        let mut mass = vec![0.0; alphabet.len()];
        mass[index] = 1.0;
        Ok(Distribution {
            alphabet,
            mass: mass.into(),
        })
    }

    /// Empirical distribution `counts / total`.
    pub fn from_counts(alphabet: Alphabet, counts: &[usize]) -> Result<Self> {
        let total: usize = counts.iter().sum();
        if total == 0 {
            return Err(Error::NotNormalized { sum: 0.0 });
        }
        let mass = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Self::new(alphabet, mass)
    }

    /// The `n`-fold i.i.d. extension `P^n` over `alphabet^n`.
    pub fn iid_power(&self, power: &Alphabet) -> Result<Self> {
        let (base, n) = power
            .as_power()
            .ok_or_else(|| Error::AlphabetMismatch("iid_power needs a power alphabet".into()))?;
        self.alphabet.ensure_same(base, "iid_power")?;
        let mut mass = vec![1.0];
        for _ in 0..n {
            let mut next = Vec::with_capacity(mass.len() * self.mass.len());
            for &m in &mass {
                next.extend(self.mass.iter().map(|&p| m * p));
            }
            mass = next;
        }
        Self::new(power.clone(), mass)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn get(&self, i: usize) -> f64 {
        self.mass[i]
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Indices with strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

pub(crate) fn check_probability_vector(expected_len: usize, mass: &[f64]) -> Result<()> {
    if mass.len() != expected_len {
        return Err(Error::LengthMismatch {
            expected: expected_len,
            got: mass.len(),
        });
    }
    if let Some((index, &value)) = mass.iter().enumerate().find(|(_, &m)| !m.is_finite() || m < 0.0) {
        return Err(Error::InvalidProbability { index, value });
    }
    let sum: f64 = mass.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}
