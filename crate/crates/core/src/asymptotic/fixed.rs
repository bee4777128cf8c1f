//! Resolvability codes for inputs supported on one type class.

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::hedge::check_epsilon;
use crate::prob::{mutual_information, truncate, Budget, Channel, Distribution, SupportMask};
use crate::singleshot::{build_cost, construct, CodeSize, Construction};
use crate::types::{build_typed_sets, TypeClass, TypedSets};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedTypeParams {
    pub alpha: f64,
    pub tau: f64,
    pub epsilon: f64,
    pub size: CodeSize,
    pub budget: Budget,
}

/// What a fixed-type construction measured.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedTypeReport {
    pub type_label: String,
    pub n: usize,
    pub size: usize,
    pub epsilon: f64,
    pub tau: f64,
    pub alpha: f64,
    pub beta: f64,
    pub mutual_information: f64,
    pub alpha_measured: f64,
    pub beta_measured: f64,
    pub d_max: f64,
    /// `n (I(T,W) + α′ + β′) − ln τ`.
    pub d_max_bound: f64,
    pub nontypical_mass: f64,
    pub low_mass: f64,
    pub complement_mass: f64,
    /// Exact `d_var(W_{P_n^T}, W_C)`.
    pub tv: f64,
    /// `2ε + complement mass` (or its finite-`L` form).
    pub bound: f64,
    /// [`fixed_type_size`] at the measured `α′`, `β′`.
    pub size_formula: f64,
    pub floor_margin: f64,
    /// The truncated support was empty and the full mask was used instead.
    pub fallback: bool,
}

#[derive(Debug, Clone)]
pub struct FixedTypeCode {
    pub sets: TypedSets,
    /// Construction over `X_T^n`.
    pub construction: Construction,
    /// The codewords as indices of `X^n`.
    pub codebook: Codebook,
    pub report: FixedTypeReport,
}

/// `exp(n (I(T,W) + α′ + β′) − ln τ) · n ln|Y| / ε²`, rounded up; infinite
/// when it does not fit a float.
pub fn fixed_type_size(t: &TypeClass, w: &Channel, alpha_m: f64, beta_m: f64, tau: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let n = t.n() as f64;
    let info = mutual_information(&t.freq(), w)?;
    let log_out = n * (w.output().len() as f64).ln();
    let exponent = n * (info + alpha_m + beta_m) - tau.ln();
    Ok((exponent.exp() * log_out / (epsilon * epsilon)).ceil())
}

/// Builds the sets `A`, `B`, `S` for `t` and runs the single-shot
/// construction on the memoryless channel restricted to `X_T^n`.
///
/// `p_nt` lives on `X^n` (zero off the class) or on the class itself.
pub fn build_fixed_type_code(
    t: &TypeClass,
    p_nt: &Distribution,
    w: &Channel,
    params: FixedTypeParams,
) -> Result<FixedTypeCode> {
    check_epsilon(params.epsilon)?;
    let sets = build_typed_sets(t, p_nt, w, params.alpha, params.tau, params.budget)?;
    let view = truncate(&sets.channel, &sets.input_dist, &sets.s)?;
    let (cost, fallback) = match build_cost(view) {
        Ok(cost) => (cost, false),
        Err(Error::EmptySupport) => {
            let full = SupportMask::full(sets.inputs.clone(), sets.channel.output().clone());
            (build_cost(truncate(&sets.channel, &sets.input_dist, &full)?)?, true)
        }
        Err(e) => return Err(e),
    };
    let meta = vec![
        ("n".to_string(), t.n() as f64),
        ("alpha".to_string(), params.alpha),
        ("tau".to_string(), params.tau),
    ];
    let construction = construct(cost, params.epsilon, params.size, meta)?;
    let codebook = construction.codebook.lift_to_parent()?;
    let size_formula = fixed_type_size(
        t,
        w,
        sets.alpha_measured,
        sets.beta_measured,
        params.tau,
        params.epsilon,
    )?;
    let report = FixedTypeReport {
        type_label: t.label(),
        n: t.n(),
        size: codebook.len(),
        epsilon: params.epsilon,
        tau: params.tau,
        alpha: params.alpha,
        beta: sets.beta,
        mutual_information: sets.mutual_information(),
        alpha_measured: sets.alpha_measured,
        beta_measured: sets.beta_measured,
        d_max: construction.d_max(),
        d_max_bound: sets.d_max_bound(),
        nontypical_mass: sets.nontypical_mass,
        low_mass: sets.low_mass,
        complement_mass: construction.view().complement_mass(),
        tv: construction.tv(),
        bound: construction.bound(),
        size_formula,
        floor_margin: construction.floor_margin(),
        fallback,
    };
    Ok(FixedTypeCode {
        sets,
        construction,
        codebook,
        report,
    })
}
