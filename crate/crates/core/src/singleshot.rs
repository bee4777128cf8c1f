//! Single-shot channel resolvability.
//!
//! Given an input distribution `P`, a channel `W`, and a mask `S`, the cost
//! of the X-player move `x` against output `y` is
//! `m(x, y) = W_x^S(y) / W_P^S(y) · e^{−D_max}`, defined only on the support
//! of `W_P^S`. Hedge runs over that support; at each round the X-player
//! plays the input with the largest expected cost under the current mixed
//! strategy. The chosen inputs form the codebook. With
//! `L ≥ e^{D_max} ln|Y| / ε²` the codebook output covers `W_P^S` pointwise up
//! to a factor `1 − 2ε`, which gives `d_var(W_P, W_C) ≤ 2ε + P·W(S^c)`.

use crate::codebook::{Codebook, CodebookMeta};
use crate::error::{Error, Result};
use crate::hedge::{check_epsilon, regret_slack, HedgeState};
use crate::prob::{
    codebook_output_raw, truncate, tv_slices, Alphabet, Channel, Distribution, SupportMask, TruncatedView,
};

/// Absolute tolerance for comparing probabilities against bounds.
pub const BOUND_TOL: f64 = 1e-9;

/// The normalized cost matrix over `X × s(W_P^S)`, stored sparsely by row.
#[derive(Debug, Clone)]
pub struct ResolvabilityCost {
    view: TruncatedView,
    d_max: f64,
    support: Alphabet,
    rows: Vec<Vec<(usize, f64)>>,
}

impl ResolvabilityCost {
    pub fn view(&self) -> &TruncatedView {
        &self.view
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    /// The strategy space of the Y-player, `s(W_P^S)` as a subset of the
    /// output alphabet.
    pub fn support(&self) -> &Alphabet {
        &self.support
    }

    /// Nonzero entries `(support position, m(x, y))` of row `x`.
    pub fn row(&self, x: usize) -> &[(usize, f64)] {
        &self.rows[x]
    }

    /// `m(x, y_j)` for the `j`-th support element.
    pub fn cost(&self, x: usize, j: usize) -> f64 {
        self.rows[x].iter().find(|(k, _)| *k == j).map_or(0.0, |&(_, m)| m)
    }

    /// Dense cost column `m(x, ·)` over the support.
    pub fn column(&self, x: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.support.len()];
        for &(j, m) in &self.rows[x] {
            out[j] = m;
        }
        out
    }

    fn expected(&self, x: usize, f: &[f64]) -> f64 {
        self.rows[x].iter().map(|&(j, m)| f[j] * m).sum()
    }

    /// Argmax over inputs of the expected cost under `f`, smallest index on
    /// ties.
    pub(crate) fn best_response_raw(&self, f: &[f64]) -> (usize, f64) {
        let mut best = (0, self.expected(0, f));
        for x in 1..self.rows.len() {
            let v = self.expected(x, f);
            if v > best.1 {
                best = (x, v);
            }
        }
        best
    }
}

/// Builds the cost of a truncated view.
pub fn build_cost(view: TruncatedView) -> Result<ResolvabilityCost> {
    let support_idx = view.support().to_vec();
    if support_idx.is_empty() {
        return Err(Error::EmptySupport);
    }
    let support = view.channel().output().subset(support_idx.iter().copied())?;
    let mixed = view.mixed();
    let n_inputs = view.channel().input().len();

    let mut max_ratio: f64 = 0.0;
    for x in 0..n_inputs {
        let row = view.truncated_row(x);
        for &y in &support_idx {
            if row[y] > 0.0 {
                max_ratio = max_ratio.max(row[y] / mixed[y]);
            }
        }
    }
    // The maximal ratio dominates its P-average, which is 1.
    let d_max = max_ratio.ln().max(0.0);
    let scale = (-d_max).exp();

    let rows = (0..n_inputs)
        .map(|x| {
            let row = view.truncated_row(x);
            support_idx
                .iter()
                .enumerate()
                .filter(|(_, &y)| row[y] > 0.0)
                .map(|(j, &y)| (j, (row[y] / mixed[y] * scale).min(1.0)))
                .collect()
        })
        .collect();

    Ok(ResolvabilityCost {
        view,
        d_max,
        support,
        rows,
    })
}

/// The X-player's best response to `f` and its expected cost.
pub fn best_response(cost: &ResolvabilityCost, f: &Distribution) -> Result<(usize, f64)> {
    f.alphabet().ensure_same(&cost.support, "best_response")?;
    Ok(cost.best_response_raw(f.mass()))
}

/// Smallest integer `L ≥ e^{d_max} ln(out_size) / ε²`; 1 when `out_size ≤ 1`.
pub fn required_size(d_max: f64, out_size: usize, epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    if out_size <= 1 {
        return Ok(1);
    }
    let raw = d_max.exp() * (out_size as f64).ln() / (epsilon * epsilon);
    if !raw.is_finite() || raw > usize::MAX as f64 {
        return Err(Error::InvalidParameter {
            name: "d_max",
            value: d_max,
            reason: "required codebook size overflows",
        });
    }
    Ok((raw.ceil() as usize).max(1))
}

/// `2ε + Σ_{(x,y) ∈ S^c} P(x) W_x(y)`.
pub fn singleshot_bound(epsilon: f64, view: &TruncatedView) -> f64 {
    2.0 * epsilon + view.complement_mass()
}

/// TV bound for an arbitrary size `L` built with learning rate `ε`:
/// `ε + e^{d_max} ln|Y| / (L ε) + P·W(S^c)`, capped at 1. Equals at most
/// [`singleshot_bound`] once `L` reaches [`required_size`].
pub fn singleshot_bound_for_size(epsilon: f64, d_max: f64, out_size: usize, size: usize, complement_mass: f64) -> f64 {
    let log_out = (out_size.max(1) as f64).ln();
    let slack = epsilon + d_max.exp() * log_out / (size as f64 * epsilon);
    (slack + complement_mass).min(1.0)
}

/// Codebook length request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeSize {
    /// [`required_size`] for the measured `D_max`.
    Auto,
    Fixed(usize),
}

impl From<Option<usize>> for CodeSize {
    fn from(v: Option<usize>) -> Self {
        v.map_or(CodeSize::Auto, CodeSize::Fixed)
    }
}

/// A codebook together with what its construction observed.
#[derive(Debug, Clone)]
pub struct Construction {
    pub codebook: Codebook,
    pub cost: ResolvabilityCost,
    pub epsilon: f64,
    /// Expected cost of the X-player's move in each round.
    pub round_values: Vec<f64>,
    /// `Σ_l m(x_l, y)` for each support element.
    pub column_sums: Vec<f64>,
}

impl Construction {
    pub fn view(&self) -> &TruncatedView {
        self.cost.view()
    }

    pub fn d_max(&self) -> f64 {
        self.cost.d_max()
    }

    /// `min_l (expected cost in round l) − e^{−D_max}`; nonnegative up to
    /// rounding.
    pub fn floor_margin(&self) -> f64 {
        let floor = (-self.d_max()).exp();
        self.round_values
            .iter()
            .map(|v| v - floor)
            .fold(f64::INFINITY, f64::min)
    }

    /// Regret slack of the Hedge run for every support element.
    pub fn regret_slack(&self) -> Vec<f64> {
        let played: f64 = self.round_values.iter().sum();
        regret_slack(&self.column_sums, played, self.cost.support().len(), self.epsilon)
    }

    /// `W_P`.
    pub fn target(&self) -> Vec<f64> {
        let view = self.view();
        let w = view.channel();
        let mut out = vec![0.0; w.output().len()];
        for (x, &px) in view.input_dist().mass().iter().enumerate() {
            if px == 0.0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(w.row(x)) {
                *o += px * v;
            }
        }
        out
    }

    /// `W_C`.
    pub fn output(&self) -> Vec<f64> {
        codebook_output_raw(&self.codebook, self.view().channel()).expect("codebook alphabet is the channel input")
    }

    /// Exact `d_var(W_P, W_C)`.
    pub fn tv(&self) -> f64 {
        tv_slices(&self.target(), &self.output())
    }

    /// [`singleshot_bound`] when the codebook reaches [`required_size`],
    /// otherwise [`singleshot_bound_for_size`].
    pub fn bound(&self) -> f64 {
        let out = self.view().channel().output().len();
        match required_size(self.d_max(), out, self.epsilon) {
            Ok(req) if self.codebook.len() >= req => singleshot_bound(self.epsilon, self.view()),
            _ => singleshot_bound_for_size(
                self.epsilon,
                self.d_max(),
                out,
                self.codebook.len(),
                self.view().complement_mass(),
            ),
        }
    }

    /// `2ε W_P^S(y) − (W_P^S(y) − W_C^S(y))` for every output `y`.
    pub fn pointwise_margins(&self) -> Vec<f64> {
        pointwise_margins(self.view(), self.codebook.words(), self.epsilon)
    }
}

fn pointwise_margins(view: &TruncatedView, words: &[usize], epsilon: f64) -> Vec<f64> {
    let covered = view.truncated_codebook_output(words);
    view.mixed()
        .iter()
        .zip(&covered)
        .map(|(&p, &c)| 2.0 * epsilon * p - (p - c))
        .collect()
}

/// Runs Hedge over `s(W_P^S)` against best responses and returns the chosen
/// inputs as a codebook. Fully deterministic.
pub fn build_codebook(
    p: &Distribution,
    w: &Channel,
    s: &SupportMask,
    epsilon: f64,
    size: CodeSize,
) -> Result<Construction> {
    check_epsilon(epsilon)?;
    let cost = build_cost(truncate(w, p, s)?)?;
    construct(cost, epsilon, size, Vec::new())
}

pub(crate) fn construct(
    cost: ResolvabilityCost,
    epsilon: f64,
    size: CodeSize,
    params: Vec<(String, f64)>,
) -> Result<Construction> {
    let rounds = match size {
        CodeSize::Auto => required_size(cost.d_max(), cost.view().channel().output().len(), epsilon)?,
        CodeSize::Fixed(0) => {
            return Err(Error::InvalidParameter {
                name: "L",
                value: 0.0,
                reason: "codebook needs at least one word",
            })
        }
        CodeSize::Fixed(l) => l,
    };
    let mut state = HedgeState::new(cost.support().clone(), epsilon)?;
    let mut words = Vec::with_capacity(rounds);
    let mut round_values = Vec::with_capacity(rounds);
    let mut f = Vec::with_capacity(cost.support().len());
    for _ in 0..rounds {
        state.strategy_into(&mut f);
        let (x, value) = cost.best_response_raw(&f);
        state.update_sparse(cost.row(x))?;
        words.push(x);
        round_values.push(value);
    }
    let meta = CodebookMeta {
        epsilon,
        d_max: cost.d_max(),
        params,
    };
    let codebook = Codebook::with_meta(cost.view().channel().input().clone(), words, meta)?;
    Ok(Construction {
        codebook,
        column_sums: state.cum_cost().to_vec(),
        cost,
        epsilon,
        round_values,
    })
}

/// Pointwise covering margins `2ε W_P^S(y) − (W_P^S(y) − W_C^S(y))` of an
/// arbitrary codebook; all nonnegative (up to [`BOUND_TOL`]) for codebooks
/// built with at least [`required_size`] words.
pub fn verify_pointwise(
    c: &Codebook,
    p: &Distribution,
    w: &Channel,
    s: &SupportMask,
    epsilon: f64,
) -> Result<Vec<f64>> {
    c.alphabet().ensure_same(w.input(), "verify_pointwise")?;
    let view = truncate(w, p, s)?;
    Ok(pointwise_margins(&view, c.words(), epsilon))
}
