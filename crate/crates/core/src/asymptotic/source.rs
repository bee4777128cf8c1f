//! Resolvability of the type distribution through a noiseless channel over
//! types.

use crate::error::{Error, Result};
use crate::hedge::check_epsilon;
use crate::prob::{truncate, Channel, Distribution, SupportMask};
use crate::singleshot::{build_cost, construct, CodeSize, Construction};

/// A list `C′ = (T_1, ..., T_{L′})` of types approximating `P_T`.
#[derive(Debug, Clone)]
pub struct TypeCode {
    pub construction: Construction,
    pub epsilon: f64,
    pub tau: f64,
    /// `D = {T : P_T(T) ≥ τ′/|T|}`, as type indices.
    pub retained: Vec<usize>,
}

impl TypeCode {
    pub fn words(&self) -> &[usize] {
        self.construction.codebook.words()
    }

    pub fn len(&self) -> usize {
        self.construction.codebook.len()
    }

    pub fn is_empty(&self) -> bool {
        self.construction.codebook.is_empty()
    }

    /// `R_{C′}(T) = (1/L′) Σ_l 1[T_l = T]`.
    pub fn empirical(&self) -> Distribution {
        let c = &self.construction.codebook;
        Distribution::from_counts(c.alphabet().clone(), &c.counts()).expect("nonempty codebook")
    }

    /// Exact `d_var(P_T, R_{C′})`.
    pub fn tv(&self) -> f64 {
        self.construction.tv()
    }

    /// `2ε′ + τ′`.
    pub fn bound(&self) -> f64 {
        2.0 * self.epsilon + self.tau
    }

    /// `P_T(D^c)`, never above `τ′`.
    pub fn dropped_mass(&self) -> f64 {
        self.construction.view().complement_mass()
    }
}

/// `⌈|T| ln|T| / (τ′ ε′²)⌉`, at least 1.
pub fn source_size(num_types: usize, tau: f64, epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    check_tau(tau)?;
    let raw = num_types as f64 * (num_types as f64).ln() / (tau * epsilon * epsilon);
    if !raw.is_finite() || raw > usize::MAX as f64 {
        return Err(Error::InvalidParameter {
            name: "tau_prime",
            value: tau,
            reason: "type code size overflows",
        });
    }
    Ok((raw.ceil() as usize).max(1))
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "tau_prime",
            value: tau,
            reason: "must lie in (0, 1]",
        })
    }
}

/// Builds `C′` for the type distribution `p_t` with the identity channel
/// and mask `D × D`. [`CodeSize::Auto`] uses [`source_size`].
pub fn build_type_code(p_t: &Distribution, epsilon: f64, tau: f64, size: CodeSize) -> Result<TypeCode> {
    check_epsilon(epsilon)?;
    check_tau(tau)?;
    let alphabet = p_t.alphabet().clone();
    let k = alphabet.len();
    let threshold = tau / k as f64;
    let retained: Vec<usize> = (0..k).filter(|&t| p_t.get(t) >= threshold).collect();
    if retained.is_empty() {
        return Err(Error::EmptySupport);
    }
    let mut keep = vec![false; k];
    for &t in &retained {
        keep[t] = true;
    }
    let mask = SupportMask::from_fn(alphabet.clone(), alphabet.clone(), |a, b| keep[a] && keep[b]);
    let channel = Channel::identity(alphabet);
    let cost = build_cost(truncate(&channel, p_t, &mask)?)?;
    let size = match size {
        CodeSize::Auto => CodeSize::Fixed(source_size(k, tau, epsilon)?),
        fixed => fixed,
    };
    let construction = construct(cost, epsilon, size, vec![("tau_prime".into(), tau)])?;
    Ok(TypeCode {
        construction,
        epsilon,
        tau,
        retained,
    })
}
