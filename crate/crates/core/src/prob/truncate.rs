//! Support masks over input/output pairs and the truncated measures they
//! induce.

use fixedbitset::FixedBitSet;

use super::alphabet::Alphabet;
use super::channel::Channel;
use super::distribution::Distribution;
use crate::error::Result;

/// A subset of `input × output`, stored as a row-major bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportMask {
    input: Alphabet,
    output: Alphabet,
    bits: FixedBitSet,
}

impl SupportMask {
    pub fn empty(input: Alphabet, output: Alphabet) -> Self {
        let bits = FixedBitSet::with_capacity(input.len() * output.len());
        SupportMask { input, output, bits }
    }

    pub fn full(input: Alphabet, output: Alphabet) -> Self {
        let mut mask = Self::empty(input, output);
        mask.bits.insert_range(..);
        mask
    }

    pub fn from_fn(input: Alphabet, output: Alphabet, mut member: impl FnMut(usize, usize) -> bool) -> Self {
        let mut mask = Self::empty(input, output);
        let width = mask.output.len();
        for x in 0..mask.input.len() {
            for y in 0..width {
                if member(x, y) {
                    mask.bits.insert(x * width + y);
                }
            }
        }
        mask
    }

    pub fn from_pairs(input: Alphabet, output: Alphabet, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut mask = Self::empty(input, output);
        for (x, y) in pairs {
            mask.insert(x, y);
        }
        mask
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.bits.contains(x * self.output.len() + y)
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        let width = self.output.len();
        self.bits.insert(x * width + y);
    }

    pub fn set_row(&mut self, x: usize, row: &FixedBitSet) {
        let width = self.output.len();
        for y in row.ones() {
            self.bits.insert(x * width + y);
        }
    }

    /// Pointwise negation.
    pub fn complement(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        SupportMask {
            input: self.input.clone(),
            output: self.output.clone(),
            bits,
        }
    }

    /// Number of member pairs.
    pub fn count(&self) -> usize {
        self.bits.count_ones(..)
    }

    fn check(&self, w: &Channel, p: &Distribution) -> Result<()> {
        self.input.ensure_same(w.input(), "mask input")?;
        self.output.ensure_same(w.output(), "mask output")?;
        p.alphabet().ensure_same(w.input(), "input distribution")
    }
}

/// `W`, `P`, and `S` together with the truncated measures `W_x^S`,
/// `W_P^S`, and the support `s(W_P^S)`.
#[derive(Debug, Clone)]
pub struct TruncatedView {
    channel: Channel,
    input_dist: Distribution,
    mask: SupportMask,
    per_x: Vec<f64>,
    mixed: Vec<f64>,
    support: Vec<usize>,
    complement_mass: f64,
}

impl TruncatedView {
    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn input_dist(&self) -> &Distribution {
        &self.input_dist
    }

    pub fn mask(&self) -> &SupportMask {
        &self.mask
    }

    /// `W_x^S(·)`.
    pub fn truncated_row(&self, x: usize) -> &[f64] {
        let w = self.channel.output().len();
        &self.per_x[x * w..(x + 1) * w]
    }

    /// `W_P^S(·)`, a sub-stochastic vector over the output alphabet.
    pub fn mixed(&self) -> &[f64] {
        &self.mixed
    }

    /// Output indices with `W_P^S(y) > 0`, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// `Σ_{(x,y) ∉ S} P(x) W_x(y)`.
    pub fn complement_mass(&self) -> f64 {
        self.complement_mass
    }

    /// `W_P^{S^c}(·)`.
    pub fn complement_mixed(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.channel.output().len()];
        for (x, &px) in self.input_dist.mass().iter().enumerate() {
            if px == 0.0 {
                continue;
            }
            for (y, (o, &wxy)) in out.iter_mut().zip(self.channel.row(x)).enumerate() {
                if !self.mask.contains(x, y) {
                    *o += px * wxy;
                }
            }
        }
        out
    }

    /// `W_C^S(·)` for a list of codewords.
    pub fn truncated_codebook_output(&self, words: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.channel.output().len()];
        if words.is_empty() {
            return out;
        }
        let mut counts = vec![0usize; self.channel.input().len()];
        for &x in words {
            counts[x] += 1;
        }
        let scale = 1.0 / words.len() as f64;
        for (x, &k) in counts.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let weight = k as f64 * scale;
            for (o, &v) in out.iter_mut().zip(self.truncated_row(x)) {
                *o += weight * v;
            }
        }
        out
    }
}

/// Builds the truncated view of `w` under input `p` and mask `s`.
pub fn truncate(w: &Channel, p: &Distribution, s: &SupportMask) -> Result<TruncatedView> {
    s.check(w, p)?;
    let width = w.output().len();
    let mut per_x = Vec::with_capacity(w.input().len() * width);
    let mut mixed = vec![0.0; width];
    let mut complement_mass = 0.0;
    for x in 0..w.input().len() {
        let px = p.get(x);
        for (y, &wxy) in w.row(x).iter().enumerate() {
            let v = if s.contains(x, y) { wxy } else { 0.0 };
            per_x.push(v);
            if px > 0.0 {
                mixed[y] += px * v;
                if !s.contains(x, y) {
                    complement_mass += px * wxy;
                }
            }
        }
    }
    let support = mixed
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(y, _)| y)
        .collect();
    Ok(TruncatedView {
        channel: w.clone(),
        input_dist: p.clone(),
        mask: s.clone(),
        per_x,
        mixed,
        support,
        complement_mass,
    })
}
