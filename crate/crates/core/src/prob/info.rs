//! Information measures, all in nats.

use super::channel::{channel_output, Channel};
use super::distribution::Distribution;
use crate::error::Result;

/// Total variation distance `½ Σ |p − q|`.
pub fn tv_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    p.alphabet().ensure_same(q.alphabet(), "tv_distance")?;
    Ok(tv_slices(p.mass(), q.mass()))
}

pub(crate) fn tv_slices(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub(crate) fn entropy_slice(p: &[f64]) -> f64 {
    -p.iter().filter(|&&m| m > 0.0).map(|&m| m * m.ln()).sum::<f64>()
}

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn entropy(p: &Distribution) -> f64 {
    entropy_slice(p.mass())
}

/// `H(W|T) = Σ_a T(a) H(W_a)` in nats.
pub fn conditional_entropy(t: &Distribution, w: &Channel) -> Result<f64> {
    t.alphabet().ensure_same(w.input(), "conditional_entropy")?;
    Ok(t.mass()
        .iter()
        .enumerate()
        .filter(|(_, &ta)| ta > 0.0)
        .map(|(a, &ta)| ta * entropy_slice(w.row(a)))
        .sum())
}

/// `I(T, W) = H(W_T) − H(W|T)` in nats.
pub fn mutual_information(t: &Distribution, w: &Channel) -> Result<f64> {
    let out = channel_output(t, w)?;
    Ok(entropy(&out) - conditional_entropy(t, w)?)
}

/// `D(t ‖ p)` in nats; `+∞` when `t` charges a symbol `p` does not.
pub fn kl_divergence(t: &Distribution, p: &Distribution) -> Result<f64> {
    t.alphabet().ensure_same(p.alphabet(), "kl_divergence")?;
    let mut acc = 0.0;
    for (&ti, &pi) in t.mass().iter().zip(p.mass()) {
        if ti == 0.0 {
            continue;
        }
        if pi == 0.0 {
            return Ok(f64::INFINITY);
        }
        acc += ti * (ti / pi).ln();
    }
    // Rounding can leave a tiny negative value when t == p.
    Ok(acc.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::alphabet::Alphabet;
    use std::f64::consts::LN_2;

    fn dist(v: &[f64]) -> Distribution {
        Distribution::new(Alphabet::numeric(v.len()).unwrap(), v.to_vec()).unwrap()
    }

    fn h2(p: f64) -> f64 {
        -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap(), 1.0);
        let p = dist(&[0.2, 0.3, 0.5]);
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(tv_distance(&dist(&[0.5, 0.5]), &dist(&[0.75, 0.25])).unwrap(), 0.25);
        assert!(tv_distance(&dist(&[0.5, 0.5]), &dist(&[0.2, 0.3, 0.5])).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&dist(&[1.0, 0.0])), 0.0);
        assert!((entropy(&dist(&[0.5, 0.5])) - LN_2).abs() < 1e-15);
        assert!((entropy(&dist(&[0.25; 4])) - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn conditional_entropy_examples() {
        let bits = Alphabet::numeric(2).unwrap();
        let id = Channel::identity(bits.clone());
        assert_eq!(conditional_entropy(&dist(&[0.3, 0.7]), &id).unwrap(), 0.0);
        let bsc = Channel::bsc(0.1).unwrap();
        let h = conditional_entropy(&dist(&[0.5, 0.5]), &bsc).unwrap();
        assert!((h - h2(0.1)).abs() < 1e-15);
        assert!((h - 0.3251).abs() < 1e-4);
        let skew = Channel::new(bits.clone(), bits, vec![vec![0.2, 0.8], vec![1.0, 0.0]]).unwrap();
        let h = conditional_entropy(&dist(&[1.0, 0.0]), &skew).unwrap();
        assert!((h - h2(0.2)).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_examples() {
        let id = Channel::identity(Alphabet::numeric(2).unwrap());
        assert!((mutual_information(&dist(&[0.5, 0.5]), &id).unwrap() - LN_2).abs() < 1e-15);
        let half = Channel::bsc(0.5).unwrap();
        assert!(mutual_information(&dist(&[0.3, 0.7]), &half).unwrap().abs() < 1e-15);
        let bsc = Channel::bsc(0.1).unwrap();
        let i = mutual_information(&dist(&[0.5, 0.5]), &bsc).unwrap();
        assert!((i - (LN_2 - h2(0.1))).abs() < 1e-15);
        assert!((i - 0.3680).abs() < 1e-4);
    }

    #[test]
    fn kl_examples() {
        let p = dist(&[0.3, 0.7]);
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let k = kl_divergence(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap();
        assert!((k - LN_2).abs() < 1e-15);
        assert_eq!(
            kl_divergence(&dist(&[0.5, 0.5]), &dist(&[1.0, 0.0])).unwrap(),
            f64::INFINITY
        );
    }
}
