//! Size refinements for i.i.d. inputs `P^n`.

use super::fixed::fixed_type_size;
use crate::error::{Error, Result};
use crate::hedge::check_epsilon;
use crate::prob::{kl_divergence, mutual_information, Budget, Channel, Distribution};
use crate::types::{build_typed_sets, enumerate_types};

/// `(3√(2ν)/2) ln|Y| − √(ν/2) ln √(ν/2)` for `0 < ν ≤ 1/2`.
pub fn continuity_slack(nu: f64, out_size: usize) -> Result<f64> {
    if !(nu > 0.0 && nu <= 0.5) {
        return Err(Error::InvalidParameter {
            name: "nu",
            value: nu,
            reason: "must lie in (0, 1/2]",
        });
    }
    let s = (nu / 2.0).sqrt();
    Ok(1.5 * (2.0 * nu).sqrt() * (out_size as f64).ln() - s * s.ln())
}

/// `(n+1)^{|X|} e^{−nν}`.
pub fn residual_mass(n: usize, input_size: usize, nu: f64) -> f64 {
    ((n + 1) as f64).powi(input_size as i32) * (-(n as f64) * nu).exp()
}

/// `max_T I(T, W)` over the types of length `n`.
pub fn capacity_over_types(w: &Channel, n: usize) -> Result<f64> {
    let mut best: f64 = 0.0;
    for t in enumerate_types(w.input(), n)? {
        best = best.max(mutual_information(&t.freq(), w)?);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IidParams {
    pub epsilon: f64,
    pub tau: f64,
    pub alpha: f64,
    pub nu: f64,
    pub budget: Budget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IidReport {
    pub n: usize,
    /// `I(P, W)`.
    pub mutual_information: f64,
    pub slack: f64,
    /// Types with `D(T‖P) ≤ ν`.
    pub qualifying_types: usize,
    /// Qualifying types whose typical set was empty, left out of `α′`, `β′`.
    pub unmeasured_types: usize,
    /// `max |I(T,W) − I(P,W)|` over qualifying types.
    pub max_info_gap: f64,
    pub alpha_measured: f64,
    pub beta_measured: f64,
    /// `exp(n (I(P,W) + slack + α′ + β′) − ln τ) · n ln|Y| / ε²`, rounded up.
    pub size: f64,
    /// Largest per-type size formula over qualifying types.
    pub worst_type_size: f64,
    /// `(n+1)^{|X|} e^{−nν}`.
    pub residual: f64,
}

/// Evaluates the i.i.d. size formula, measuring `α′` and `β′` as maxima over
/// the types within divergence `ν` of `p`.
pub fn iid_size(p: &Distribution, w: &Channel, n: usize, params: IidParams) -> Result<IidReport> {
    check_epsilon(params.epsilon)?;
    p.alphabet().ensure_same(w.input(), "iid input")?;
    let slack = continuity_slack(params.nu, w.output().len())?;
    let info = mutual_information(p, w)?;
    let power = p.alphabet().power(n, params.budget)?;
    let mut qualifying = 0;
    let mut unmeasured = 0;
    let mut gap: f64 = 0.0;
    let mut alpha_m: f64 = 0.0;
    let mut beta_m: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for t in enumerate_types(p.alphabet(), n)? {
        let freq = t.freq();
        if kl_divergence(&freq, p)? > params.nu {
            continue;
        }
        qualifying += 1;
        gap = gap.max((mutual_information(&freq, w)? - info).abs());
        // Under P^n every sequence of a class is equally likely.
        let cond = Distribution::uniform(power.subset(t.members(params.budget)?)?);
        match build_typed_sets(&t, &cond, w, params.alpha, params.tau, params.budget) {
            Ok(sets) => {
                alpha_m = alpha_m.max(sets.alpha_measured);
                beta_m = beta_m.max(sets.beta_measured);
                worst = worst.max(fixed_type_size(
                    &t,
                    w,
                    sets.alpha_measured,
                    sets.beta_measured,
                    params.tau,
                    params.epsilon,
                )?);
            }
            Err(Error::EmptyTypicalSet) => unmeasured += 1,
            Err(e) => return Err(e),
        }
    }
    let nf = n as f64;
    let exponent = nf * (info + slack + alpha_m + beta_m) - params.tau.ln();
    let log_out = nf * (w.output().len() as f64).ln();
    let size = (exponent.exp() * log_out / (params.epsilon * params.epsilon)).ceil();
    Ok(IidReport {
        n,
        mutual_information: info,
        slack,
        qualifying_types: qualifying,
        unmeasured_types: unmeasured,
        max_info_gap: gap,
        alpha_measured: alpha_m,
        beta_measured: beta_m,
        size,
        worst_type_size: worst,
        residual: residual_mass(n, p.len(), params.nu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Alphabet;

    #[test]
    fn slack_examples() {
        assert!((continuity_slack(0.5, 2).unwrap() - 1.3863).abs() < 1e-4);
        assert!(continuity_slack(1e-12, 2).unwrap() < 1e-4);
        assert!(continuity_slack(0.0, 2).is_err());
        assert!(continuity_slack(0.6, 2).is_err());
    }

    #[test]
    fn residual_example() {
        assert!((residual_mass(10, 2, 0.5) - 121.0 * (-5.0f64).exp()).abs() < 1e-12);
        assert!((residual_mass(10, 2, 0.5) - 0.815).abs() < 1e-3);
    }

    #[test]
    fn uniform_input_achieves_capacity() {
        let w = Channel::bsc(0.1).unwrap();
        let p = Distribution::uniform(Alphabet::numeric(2).unwrap());
        let params = IidParams {
            epsilon: 0.25,
            tau: 0.1,
            alpha: 0.3,
            nu: 0.05,
            budget: Budget::DEFAULT,
        };
        let r = iid_size(&p, &w, 6, params).unwrap();
        let c = capacity_over_types(&w, 6).unwrap();
        assert!((r.mutual_information - c).abs() < 1e-12);
        assert!(r.qualifying_types >= 1);
        assert!(r.max_info_gap <= r.slack);
        assert!(r.size >= 1.0);
    }
}
