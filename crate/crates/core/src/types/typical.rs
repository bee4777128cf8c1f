//! Strong typical and conditionally typical sets, and the sets `A`, `B`,
//! `S` used by the fixed-type construction.

use fixedbitset::FixedBitSet;

use super::TypeClass;
use crate::error::{Error, Result};
use crate::prob::{
    channel_output, conditional_entropy, decode_into, entropy, Alphabet, Budget, Channel, Distribution, SupportMask,
};

/// A set of sequences, as a bitset over a power alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSet {
    alphabet: Alphabet,
    bits: FixedBitSet,
}

impl SequenceSet {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            reason: "must be positive and finite",
        })
    }
}

/// Joint-count test of one `y^n` against `x^n`. `xs_counts[a]` is `N(a|x^n)`.
struct JointTest<'a> {
    w: &'a Channel,
    xs_counts: Vec<usize>,
    n: usize,
    alpha: f64,
    joint: Vec<usize>,
    ys: Vec<usize>,
}

impl<'a> JointTest<'a> {
    fn new(w: &'a Channel, xs: &[usize], alpha: f64) -> Self {
        let mut xs_counts = vec![0; w.input().len()];
        for &x in xs {
            xs_counts[x] += 1;
        }
        JointTest {
            w,
            xs_counts,
            n: xs.len(),
            alpha,
            joint: vec![0; w.input().len() * w.output().len()],
            ys: vec![0; xs.len()],
        }
    }

    fn typical(&mut self, xs: &[usize], y: usize) -> bool {
        let k = self.w.output().len();
        decode_into(y, k, &mut self.ys);
        self.joint.iter_mut().for_each(|c| *c = 0);
        for (&a, &b) in xs.iter().zip(&self.ys) {
            self.joint[a * k + b] += 1;
        }
        let n = self.n as f64;
        for (a, &ca) in self.xs_counts.iter().enumerate() {
            let t = ca as f64 / n;
            for (b, &wab) in self.w.row(a).iter().enumerate() {
                let dev = (self.joint[a * k + b] as f64 / n - t * wab).abs();
                if dev >= self.alpha {
                    return false;
                }
            }
        }
        true
    }
}

/// `T^n_{W,α}(x^n)`: all `y^n` with `|N(a,b)/n − T(a) W_a(b)| < α` for
/// every pair `(a, b)`.
pub fn conditional_typical_set(xs: &[usize], w: &Channel, alpha: f64, budget: Budget) -> Result<SequenceSet> {
    positive("alpha", alpha)?;
    if let Some(&bad) = xs.iter().find(|&&x| x >= w.input().len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            size: w.input().len(),
        });
    }
    let outputs = w.output().power(xs.len(), budget)?;
    let mut test = JointTest::new(w, xs, alpha);
    let mut bits = FixedBitSet::with_capacity(outputs.len());
    for y in 0..outputs.len() {
        if test.typical(xs, y) {
            bits.insert(y);
        }
    }
    Ok(SequenceSet {
        alphabet: outputs,
        bits,
    })
}

/// `T^n_{W_T,β}`: all `y^n` with `|N(b)/n − W_T(b)| ≤ β` for every `b`.
pub fn typical_set(w_t: &Distribution, n: usize, beta: f64, budget: Budget) -> Result<SequenceSet> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "must be nonnegative",
        });
    }
    let outputs = w_t.alphabet().power(n, budget)?;
    let k = w_t.len();
    let mut ys = vec![0; n];
    let mut counts = vec![0usize; k];
    let mut bits = FixedBitSet::with_capacity(outputs.len());
    for y in 0..outputs.len() {
        decode_into(y, k, &mut ys);
        counts.iter_mut().for_each(|c| *c = 0);
        for &b in &ys {
            counts[b] += 1;
        }
        let ok = counts
            .iter()
            .zip(w_t.mass())
            .all(|(&c, &p)| (c as f64 / n as f64 - p).abs() <= beta);
        if ok {
            bits.insert(y);
        }
    }
    Ok(SequenceSet {
        alphabet: outputs,
        bits,
    })
}

/// The sets `A`, `B`, `S` for one type, together with the restricted
/// channel and input distribution they live on and the quantities measured
/// from them.
#[derive(Debug, Clone)]
pub struct TypedSets {
    pub type_class: TypeClass,
    pub alpha: f64,
    /// `|X| α`.
    pub beta: f64,
    pub tau: f64,
    /// `X_T^n` as a subset of `X^n`.
    pub inputs: Alphabet,
    /// The memoryless channel restricted to `X_T^n`, with output `Y^n`.
    pub channel: Channel,
    /// `P_n^T` over `X_T^n`.
    pub input_dist: Distribution,
    /// Row `i` holds `T^n_{W,α}(x_i)` for the `i`-th member of `X_T^n`.
    pub a_rows: Vec<FixedBitSet>,
    pub typical: SequenceSet,
    pub b: FixedBitSet,
    pub s: SupportMask,
    /// `W^A_{P_n^T}(y)` for every `y^n`.
    pub w_a: Vec<f64>,
    /// Mass of pairs outside `A`.
    pub nontypical_mass: f64,
    /// Mass of pairs in `A` whose output is outside `B`.
    pub low_mass: f64,
    /// Mass of pairs outside `S`.
    pub complement_mass: f64,
    /// `max_{(x,y) ∈ A, W>0} |−(1/n) ln W_x(y) − H(W|T)|`.
    pub alpha_measured: f64,
    /// `|(1/n) ln |T^n_{W_T,β}| − H(W_T)|`.
    pub beta_measured: f64,
    pub conditional_entropy: f64,
    pub output_entropy: f64,
}

impl TypedSets {
    pub fn n(&self) -> usize {
        self.type_class.n()
    }

    pub fn in_a(&self, x: usize, y: usize) -> bool {
        self.a_rows[x].contains(y)
    }

    /// `I(T, W) = H(W_T) − H(W|T)`.
    pub fn mutual_information(&self) -> f64 {
        (self.output_entropy - self.conditional_entropy).max(0.0)
    }

    /// Number of pairs in `A` whose output is not strongly typical.
    pub fn atypical_pairs_in_a(&self) -> usize {
        self.a_rows
            .iter()
            .map(|row| row.difference(self.typical.bits()).count())
            .sum()
    }

    /// `Σ_{y ∈ T_β \ B} W^A_{P_n^T}(y)`.
    pub fn typical_low_mass(&self) -> f64 {
        self.typical
            .iter()
            .filter(|&y| !self.b.contains(y))
            .map(|y| self.w_a[y])
            .sum()
    }

    /// `n (I(T,W) + α′ + β′) − ln τ`, the analytic cap on `D_max` over `S`.
    pub fn d_max_bound(&self) -> f64 {
        self.n() as f64 * (self.mutual_information() + self.alpha_measured + self.beta_measured) - self.tau.ln()
    }
}

fn restrict_to_class(t: &TypeClass, inputs: &Alphabet, members: &[usize], p: &Distribution) -> Result<Distribution> {
    if p.alphabet() == inputs {
        return Ok(p.clone());
    }
    let (base, n) = p
        .alphabet()
        .as_power()
        .ok_or_else(|| Error::AlphabetMismatch("type-class input must live on X^n or X_T^n".into()))?;
    base.ensure_same(t.alphabet(), "type-class input")?;
    if n != t.n() {
        return Err(Error::LengthMismatch {
            expected: t.n(),
            got: n,
        });
    }
    let mut inside = vec![false; p.len()];
    for &m in members {
        inside[m] = true;
    }
    if let Some(i) = (0..p.len()).find(|&i| !inside[i] && p.get(i) > 0.0) {
        return Err(Error::InvalidParameter {
            name: "p_nT",
            value: p.get(i),
            reason: "puts mass outside the type class",
        });
    }
    Distribution::new(inputs.clone(), members.iter().map(|&m| p.get(m)).collect())
}

/// Builds `A`, `B = {y ∈ T^n_{W_T,β}: W^A_{P_n^T}(y) ≥ τ/|T^n_{W_T,β}|}`
/// and `S = A ∩ (X_T^n × B)` for the type `t`.
///
/// `p_nt` may be given over `X^n` (zero outside the class) or over the
/// class itself.
pub fn build_typed_sets(
    t: &TypeClass,
    p_nt: &Distribution,
    w: &Channel,
    alpha: f64,
    tau: f64,
    budget: Budget,
) -> Result<TypedSets> {
    positive("alpha", alpha)?;
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParameter {
            name: "tau",
            value: tau,
            reason: "must lie in [0, 1]",
        });
    }
    t.alphabet().ensure_same(w.input(), "type alphabet")?;
    let n = t.n();
    let power = t.alphabet().power(n, budget)?;
    let members = t.members(budget)?;
    let inputs = power.subset(members.iter().copied())?;
    let input_dist = restrict_to_class(t, &inputs, &members, p_nt)?;
    let channel = w.memoryless_on(&inputs, budget)?;
    let ny = channel.output().len();

    let beta = w.input().len() as f64 * alpha;
    let freq = t.freq();
    let w_t = channel_output(&freq, w)?;
    let typical = typical_set(&w_t, n, beta, budget)?;
    if typical.is_empty() {
        return Err(Error::EmptyTypicalSet);
    }
    let h_cond = conditional_entropy(&freq, w)?;
    let h_out = entropy(&w_t);

    let mut a_rows = Vec::with_capacity(members.len());
    let mut xs = vec![0; n];
    let mut w_a = vec![0.0; ny];
    let mut alpha_measured: f64 = 0.0;
    for (i, &m) in members.iter().enumerate() {
        decode_into(m, t.alphabet().len(), &mut xs);
        let mut test = JointTest::new(w, &xs, alpha);
        let mut row = FixedBitSet::with_capacity(ny);
        let px = input_dist.get(i);
        for (y, &wxy) in channel.row(i).iter().enumerate() {
            if test.typical(&xs, y) {
                row.insert(y);
                w_a[y] += px * wxy;
                if wxy > 0.0 {
                    alpha_measured = alpha_measured.max((-wxy.ln() / n as f64 - h_cond).abs());
                }
            }
        }
        a_rows.push(row);
    }

    let threshold = tau / typical.len() as f64;
    let mut b = FixedBitSet::with_capacity(ny);
    for y in typical.iter() {
        if w_a[y] >= threshold {
            b.insert(y);
        }
    }

    let mut s = SupportMask::empty(inputs.clone(), channel.output().clone());
    let mut nontypical_mass = 0.0;
    let mut low_mass = 0.0;
    for (i, row) in a_rows.iter().enumerate() {
        let kept = row.intersection(&b).collect::<FixedBitSet>();
        s.set_row(i, &kept);
        let px = input_dist.get(i);
        if px == 0.0 {
            continue;
        }
        for (y, &wxy) in channel.row(i).iter().enumerate() {
            if !row.contains(y) {
                nontypical_mass += px * wxy;
            } else if !b.contains(y) {
                low_mass += px * wxy;
            }
        }
    }

    let beta_measured = ((typical.len() as f64).ln() / n as f64 - h_out).abs();
    Ok(TypedSets {
        type_class: t.clone(),
        alpha,
        beta,
        tau,
        inputs,
        channel,
        input_dist,
        a_rows,
        typical,
        b,
        s,
        w_a,
        nontypical_mass,
        low_mass,
        complement_mass: nontypical_mass + low_mass,
        alpha_measured,
        beta_measured,
        conditional_entropy: h_cond,
        output_entropy: h_out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits2() -> Alphabet {
        Alphabet::numeric(2).unwrap()
    }

    #[test]
    fn conditional_typical_examples() {
        let id = Channel::identity(bits2());
        let set = conditional_typical_set(&[0, 1], &id, 0.1, Budget::DEFAULT).unwrap();
        assert_eq!(set.iter().collect::<Vec<_>>(), vec![1]);

        let bsc = Channel::bsc(0.1).unwrap();
        let all = conditional_typical_set(&[0, 1, 1], &bsc, 1.5, Budget::DEFAULT).unwrap();
        assert_eq!(all.len(), 8);

        let empty = conditional_typical_set(&[0], &bsc, 0.05, Budget::DEFAULT).unwrap();
        assert!(empty.is_empty());
        assert!(conditional_typical_set(&[0], &bsc, 0.0, Budget::DEFAULT).is_err());
    }

    #[test]
    fn typical_set_examples() {
        let half = Distribution::uniform(bits2());
        let set = typical_set(&half, 2, 0.0, Budget::DEFAULT).unwrap();
        assert_eq!(set.iter().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(typical_set(&half, 3, 1.0, Budget::DEFAULT).unwrap().len(), 8);

        let skew = Distribution::new(bits2(), vec![0.75, 0.25]).unwrap();
        let set = typical_set(&skew, 4, 0.1, Budget::DEFAULT).unwrap();
        assert_eq!(set.len(), 4);
        assert!(set.iter().all(|y| (y as u32).count_ones() == 1));
    }

    #[test]
    fn typed_sets_with_vacuous_threshold() {
        let w = Channel::bsc(0.1).unwrap();
        let t = TypeClass::new(bits2(), vec![1, 1]).unwrap();
        let p = Distribution::uniform(bits2().power(2, Budget::DEFAULT).unwrap().subset([1, 2]).unwrap());
        let sets = build_typed_sets(&t, &p, &w, 1.0, 0.0, Budget::DEFAULT).unwrap();
        // α ≥ 1 makes every pair conditionally typical.
        assert_eq!(sets.nontypical_mass, 0.0);
        assert_eq!(sets.b, *sets.typical.bits());
        let outside: f64 = (0..4).filter(|&y| !sets.typical.contains(y)).map(|y| sets.w_a[y]).sum();
        assert!((sets.complement_mass - outside).abs() < 1e-15);
        assert_eq!(sets.atypical_pairs_in_a(), 0);
    }

    #[test]
    fn mass_outside_class_rejected() {
        let w = Channel::bsc(0.1).unwrap();
        let t = TypeClass::new(bits2(), vec![1, 1]).unwrap();
        let p = Distribution::uniform(bits2().power(2, Budget::DEFAULT).unwrap());
        assert!(build_typed_sets(&t, &p, &w, 0.3, 0.1, Budget::DEFAULT).is_err());
    }
}
