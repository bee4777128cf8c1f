//! Block-length-`n` constructions built from the single-shot one: codes for
//! a fixed input type, codes over the type distribution, and two-stage codes
//! for arbitrary inputs on `X^n`.

mod fixed;
mod general;
mod iid;
mod source;

pub use fixed::{build_fixed_type_code, fixed_type_size, FixedTypeCode, FixedTypeParams, FixedTypeReport};
pub use general::{build_general_code, GeneralCode, GeneralParams, GeneralReport, TwoStageCode};
pub use iid::{capacity_over_types, continuity_slack, iid_size, residual_mass, IidParams, IidReport};
pub use source::{build_type_code, source_size, TypeCode};

use crate::error::{Error, Result};
use crate::prob::{decode_into, Alphabet, Budget, Channel, Distribution};
use crate::types::{enumerate_types, type_lookup, TypeClass};

/// `P_T(T) = P_n(X_T^n)` together with the conditionals `P_n^T`.
#[derive(Debug, Clone)]
pub struct TypeDistribution {
    sequences: Alphabet,
    types: Vec<TypeClass>,
    type_alphabet: Alphabet,
    mass: Distribution,
    members: Vec<Vec<usize>>,
    conditionals: Vec<Option<Distribution>>,
}

impl TypeDistribution {
    /// `X^n`.
    pub fn sequences(&self) -> &Alphabet {
        &self.sequences
    }

    pub fn n(&self) -> usize {
        self.types[0].n()
    }

    /// All types of `X^n`, in [`enumerate_types`] order.
    pub fn types(&self) -> &[TypeClass] {
        &self.types
    }

    /// One symbol per type, labelled like `(2,1)`.
    pub fn type_alphabet(&self) -> &Alphabet {
        &self.type_alphabet
    }

    /// `P_T` over [`Self::type_alphabet`].
    pub fn mass(&self) -> &Distribution {
        &self.mass
    }

    /// Indices of `X_T^n` in `X^n`, ascending.
    pub fn members(&self, t: usize) -> &[usize] {
        &self.members[t]
    }

    /// `P_n^T` over `X_T^n`; `None` for zero-mass types.
    pub fn conditional(&self, t: usize) -> Option<&Distribution> {
        self.conditionals[t].as_ref()
    }

    /// `Σ_T P_T(T) P_n^T(·)` over `X^n`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.sequences.len()];
        for (t, cond) in self.conditionals.iter().enumerate() {
            let Some(cond) = cond else { continue };
            let pt = self.mass.get(t);
            for (&x, &q) in self.members[t].iter().zip(cond.mass()) {
                out[x] += pt * q;
            }
        }
        out
    }
}

/// Splits `p_n` (over `X^n`) into its type distribution and conditionals.
pub fn type_distribution(p_n: &Distribution) -> Result<TypeDistribution> {
    let sequences = p_n.alphabet().clone();
    let (base, n) = sequences
        .as_power()
        .ok_or_else(|| Error::AlphabetMismatch("type distribution needs an input on X^n".into()))?;
    let types = enumerate_types(base, n)?;
    let lookup = type_lookup(&types);
    let k = base.len();
    let mut members = vec![Vec::new(); types.len()];
    let mut mass = vec![0.0; types.len()];
    let mut xs = vec![0; n];
    let mut counts = vec![0; k];
    for (x, &p) in p_n.mass().iter().enumerate() {
        decode_into(x, k, &mut xs);
        counts.iter_mut().for_each(|c| *c = 0);
        for &a in &xs {
            counts[a] += 1;
        }
        let t = lookup[&counts];
        members[t].push(x);
        mass[t] += p;
    }
    let type_alphabet = Alphabet::new(types.iter().map(TypeClass::label))?;
    let conditionals = (0..types.len())
        .map(|t| {
            if mass[t] <= 0.0 {
                return Ok(None);
            }
            let subset = sequences.subset(members[t].iter().copied())?;
            let cond = members[t].iter().map(|&x| p_n.get(x) / mass[t]).collect();
            Distribution::new(subset, cond).map(Some)
        })
        .collect::<Result<Vec<_>>>()?;
    let mass = Distribution::new(type_alphabet.clone(), mass)?;
    Ok(TypeDistribution {
        sequences,
        types,
        type_alphabet,
        mass,
        members,
        conditionals,
    })
}

/// `Σ_i q_i W^n_{x_i}` over `Y^n` for inputs `x_i ∈ X^n` given by index.
pub(crate) fn mixture_output(
    w: &Channel,
    n: usize,
    inputs: impl IntoIterator<Item = (usize, f64)>,
    budget: Budget,
) -> Result<Vec<f64>> {
    let outputs = w.output().power(n, budget)?;
    let mut out = vec![0.0; outputs.len()];
    let mut xs = vec![0; n];
    for (x, q) in inputs {
        if q == 0.0 {
            continue;
        }
        decode_into(x, w.input().len(), &mut xs);
        for (o, v) in out.iter_mut().zip(w.memoryless_row(&xs)) {
            *o += q * v;
        }
    }
    Ok(out)
}

/// Uniform-mixture weights of a list of words: `(word, multiplicity / len)`.
pub(crate) fn word_weights(words: &[usize]) -> Vec<(usize, f64)> {
    let mut sorted = words.to_vec();
    sorted.sort_unstable();
    let scale = 1.0 / words.len() as f64;
    let mut out: Vec<(usize, f64)> = Vec::new();
    for x in sorted {
        match out.last_mut() {
            Some((y, c)) if *y == x => *c += scale,
            _ => out.push((x, scale)),
        }
    }
    out
}
