use std::sync::Arc;

use super::alphabet::{checked_pow, Alphabet, Budget};
use super::distribution::{check_probability_vector, Distribution};
use crate::codebook::Codebook;
use crate::error::{Error, Result};

/// A row-stochastic matrix from `input` to `output`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    input: Alphabet,
    output: Alphabet,
    matrix: Arc<[f64]>,
}

impl Channel {
    pub fn new(input: Alphabet, output: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != input.len() {
            return Err(Error::LengthMismatch {
                expected: input.len(),
                got: rows.len(),
            });
        }
        let mut matrix = Vec::with_capacity(input.len() * output.len());
        for (x, row) in rows.into_iter().enumerate() {
            check_row(&input, &output, x, &row)?;
            matrix.extend(row);
        }
        Ok(Channel {
            input,
            output,
            matrix: matrix.into(),
        })
    }

    /// Row-major constructor; `matrix.len()` must be `|input| * |output|`.
    pub fn from_flat(input: Alphabet, output: Alphabet, matrix: Vec<f64>) -> Result<Self> {
        let width = output.len();
        if matrix.len() != input.len() * width {
            return Err(Error::LengthMismatch {
                expected: input.len() * width,
                got: matrix.len(),
            });
        }
        for (x, row) in matrix.chunks(width).enumerate() {
            check_row(&input, &output, x, row)?;
        }
        Ok(Channel {
            input,
            output,
            matrix: matrix.into(),
        })
    }

    /// The noiseless channel `1[y = x]` on `alphabet`.
    pub fn identity(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        let mut matrix = vec![0.0; k * k];
        for i in 0..k {
            matrix[i * k + i] = 1.0;
        }
        Channel {
            input: alphabet.clone(),
            output: alphabet,
            matrix: matrix.into(),
        }
    }

    /// Binary symmetric channel with crossover probability `p` on `{0, 1}`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter {
                name: "crossover",
                value: p,
                reason: "must lie in [0, 1]",
            });
        }
        let bits = Alphabet::numeric(2)?;
        Channel::new(bits.clone(), bits, vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let w = self.output.len();
        &self.matrix[x * w..(x + 1) * w]
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.matrix[x * self.output.len() + y]
    }

    pub fn row_distribution(&self, x: usize) -> Distribution {
        Distribution::new(self.output.clone(), self.row(x).to_vec())
            .expect("channel rows are validated on construction")
    }

    /// Memoryless extension row `W_{x^n}(·) = Π_i W_{x_i}(·)` over
    /// `output^n` in mixed-radix order.
    pub fn memoryless_row(&self, xs: &[usize]) -> Vec<f64> {
        let k = self.output.len();
        let mut acc = vec![1.0];
        for &x in xs {
            let row = self.row(x);
            let mut next = Vec::with_capacity(acc.len() * k);
            for &a in &acc {
                next.extend(row.iter().map(|&w| a * w));
            }
            acc = next;
        }
        acc
    }

    /// Restricts the input alphabet to `inputs` (indices into `self.input()`).
    pub fn restrict_inputs(&self, inputs: &Alphabet) -> Result<Channel> {
        let (parent, members) = inputs
            .as_subset()
            .ok_or_else(|| Error::AlphabetMismatch("restriction needs a subset alphabet".into()))?;
        parent.ensure_same(&self.input, "restrict_inputs")?;
        let mut matrix = Vec::with_capacity(members.len() * self.output.len());
        for &x in members {
            matrix.extend_from_slice(self.row(x));
        }
        Ok(Channel {
            input: inputs.clone(),
            output: self.output.clone(),
            matrix: matrix.into(),
        })
    }

    /// Builds a channel whose input alphabet is a subset of `base^n`, with
    /// rows taken from the memoryless extension of `self`.
    pub fn memoryless_on(&self, inputs: &Alphabet, budget: Budget) -> Result<Channel> {
        let (parent, members) = inputs
            .as_subset()
            .ok_or_else(|| Error::AlphabetMismatch("memoryless_on needs a subset".into()))?;
        let (base, n) = parent
            .as_power()
            .ok_or_else(|| Error::AlphabetMismatch("memoryless_on needs a power parent".into()))?;
        base.ensure_same(&self.input, "memoryless_on")?;
        let output = self.output.power(n, budget)?;
        budget.check(members.len() as u128 * output.len() as u128)?;
        let mut matrix = Vec::with_capacity(members.len() * output.len());
        let mut coords = vec![0; n];
        for &x in members {
            super::alphabet::decode_into(x, base.len(), &mut coords);
            matrix.extend(self.memoryless_row(&coords));
        }
        Ok(Channel {
            input: inputs.clone(),
            output,
            matrix: matrix.into(),
        })
    }
}

fn check_row(input: &Alphabet, output: &Alphabet, x: usize, row: &[f64]) -> Result<()> {
    check_probability_vector(output.len(), row).map_err(|e| Error::NotStochastic {
        row: x,
        label: input.label(x),
        reason: e.to_string(),
    })
}

/// Output distribution `W_P = Σ_x P(x) W_x`.
pub fn channel_output(p: &Distribution, w: &Channel) -> Result<Distribution> {
    p.alphabet().ensure_same(w.input(), "channel_output")?;
    let mut out = vec![0.0; w.output().len()];
    for (x, &px) in p.mass().iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (o, &wxy) in out.iter_mut().zip(w.row(x)) {
            *o += px * wxy;
        }
    }
    Distribution::new(w.output().clone(), out)
}

/// Output distribution of a codebook, `W_C = (1/L) Σ_l W_{x_l}`.
pub fn codebook_output(c: &Codebook, w: &Channel) -> Result<Distribution> {
    Distribution::new(w.output().clone(), codebook_output_raw(c, w)?)
}

pub(crate) fn codebook_output_raw(c: &Codebook, w: &Channel) -> Result<Vec<f64>> {
    if c.is_empty() {
        return Err(Error::EmptyCodebook);
    }
    c.alphabet().ensure_same(w.input(), "codebook_output")?;
    let mut counts = vec![0usize; w.input().len()];
    for &x in c.words() {
        counts[x] += 1;
    }
    let scale = 1.0 / c.len() as f64;
    let mut out = vec![0.0; w.output().len()];
    for (x, &k) in counts.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let weight = k as f64 * scale;
        for (o, &wxy) in out.iter_mut().zip(w.row(x)) {
            *o += weight * wxy;
        }
    }
    Ok(out)
}

/// Memoryless extension `W^n : X^n → Y^n`.
///
/// Both `|Y|^n` and the number of matrix cells `|X|^n |Y|^n` must fit the
/// budget.
pub fn product_channel(w: &Channel, n: usize, budget: Budget) -> Result<Channel> {
    let output = w.output().power(n, budget)?;
    let input = w.input().power(n, budget)?;
    budget.check(checked_pow(w.input().len() * w.output().len(), n))?;
    let mut matrix = Vec::with_capacity(input.len() * output.len());
    let mut coords = vec![0; n];
    for x in 0..input.len() {
        super::alphabet::decode_into(x, w.input().len(), &mut coords);
        matrix.extend(w.memoryless_row(&coords));
    }
    Ok(Channel {
        input,
        output,
        matrix: matrix.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn rejects_bad_rows() {
        let a = Alphabet::numeric(2).unwrap();
        let err = Channel::new(a.clone(), a, vec![vec![0.5, 0.5], vec![0.9, 0.08]]).unwrap_err();
        assert!(matches!(err, Error::NotStochastic { row: 1, .. }));
    }

    #[test]
    fn output_examples() {
        let bsc = Channel::bsc(0.1).unwrap();
        let a = bsc.input().clone();
        let pt = Distribution::point(a.clone(), 0).unwrap();
        assert!(close(channel_output(&pt, &bsc).unwrap().mass(), &[0.9, 0.1]));
        let u = Distribution::uniform(a.clone());
        assert!(close(channel_output(&u, &bsc).unwrap().mass(), &[0.5, 0.5]));
        let id = Channel::identity(a.clone());
        let p = Distribution::new(a, vec![0.3, 0.7]).unwrap();
        assert_eq!(channel_output(&p, &id).unwrap(), p);
    }

    #[test]
    fn codebook_output_examples() {
        let bsc = Channel::bsc(0.1).unwrap();
        let a = bsc.input().clone();
        let c = Codebook::new(a.clone(), vec![1]).unwrap();
        assert!(close(codebook_output(&c, &bsc).unwrap().mass(), bsc.row(1)));
        let c = Codebook::new(a.clone(), vec![0, 1]).unwrap();
        let id = Channel::identity(a.clone());
        assert!(close(codebook_output(&c, &id).unwrap().mass(), &[0.5, 0.5]));
        let c = Codebook::new(a, vec![0, 0, 1]).unwrap();
        let out = codebook_output(&c, &bsc).unwrap();
        assert!(close(
            out.mass(),
            &[2.0 / 3.0 * 0.9 + 0.1 / 3.0, 2.0 / 3.0 * 0.1 + 0.9 / 3.0]
        ));
        assert!((out.get(0) - 0.633_333_333_333).abs() < 1e-9);
    }

    #[test]
    fn product_examples() {
        let bsc = Channel::bsc(0.1).unwrap();
        let w1 = product_channel(&bsc, 1, Budget::DEFAULT).unwrap();
        assert_eq!(w1.row(0), bsc.row(0));
        assert_eq!(w1.row(1), bsc.row(1));
        let w2 = product_channel(&bsc, 2, Budget::DEFAULT).unwrap();
        assert!(close(w2.row(0), &[0.81, 0.09, 0.09, 0.01]));
        let id2 = product_channel(&Channel::identity(Alphabet::numeric(2).unwrap()), 2, Budget::DEFAULT).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(id2.prob(x, y), if x == y { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn product_budget() {
        let bsc = Channel::bsc(0.1).unwrap();
        assert!(matches!(
            product_channel(&bsc, 6, Budget(1000)),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
