//! Random-coding baseline: codewords drawn i.i.d. from the input
//! distribution with a seeded xoshiro256++ generator.
//!
//! Each draw takes the top 53 bits of one `next_u64` output as a uniform
//! `u ∈ [0, 1)` and returns the first symbol whose cumulative mass exceeds
//! `u`. Seeding goes through `seed_from_u64`, so a seed reproduces the same
//! codebook on every platform.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use resolvability::{channel_output, codebook_output, tv_distance, Channel, Codebook, Distribution};

use crate::HarnessError;

#[derive(Debug, Clone)]
pub struct Baseline {
    pub codebook: Codebook,
    pub tv: f64,
}

/// Draws `len` symbols from `p` with the generator seeded by `seed`.
pub fn draw(p: &Distribution, len: usize, seed: u64) -> Vec<usize> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut cdf = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &m in p.mass() {
        acc += m;
        cdf.push(acc);
    }
    // Rounding can leave the last cumulative value just under u.
    let last = p.mass().iter().rposition(|&m| m > 0.0).unwrap_or(0);
    (0..len)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            cdf.iter().position(|&c| u < c).map_or(last, |i| i.min(last))
        })
        .collect()
}

/// `len` codewords drawn from `p` and the exact `d_var(W_P, W_C)`.
pub fn random_baseline(p: &Distribution, w: &Channel, len: usize, seed: u64) -> Result<Baseline, HarnessError> {
    if len == 0 {
        return Err(HarnessError::Config("baseline needs L ≥ 1".into()));
    }
    let codebook = Codebook::new(w.input().clone(), draw(p, len, seed))?;
    let tv = tv_distance(&channel_output(p, w)?, &codebook_output(&codebook, w)?)?;
    Ok(Baseline { codebook, tv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use resolvability::Alphabet;

    #[test]
    fn same_seed_same_codebook() {
        let w = Channel::bsc(0.1).unwrap();
        let p = Distribution::uniform(w.input().clone());
        let a = random_baseline(&p, &w, 50, 42).unwrap();
        let b = random_baseline(&p, &w, 50, 42).unwrap();
        assert_eq!(a.codebook, b.codebook);
        assert_eq!(a.tv, b.tv);
        let c = random_baseline(&p, &w, 50, 43).unwrap();
        assert_ne!(a.codebook, c.codebook);
    }

    #[test]
    fn point_mass_input() {
        let w = Channel::identity(Alphabet::numeric(3).unwrap());
        let p = Distribution::point(w.input().clone(), 2).unwrap();
        let b = random_baseline(&p, &w, 20, 1).unwrap();
        assert!(b.codebook.words().iter().all(|&x| x == 2));
        assert_eq!(b.tv, 0.0);
    }

    #[test]
    fn zero_mass_symbols_never_drawn() {
        let p = Distribution::new(Alphabet::numeric(4).unwrap(), vec![0.5, 0.0, 0.5, 0.0]).unwrap();
        assert!(draw(&p, 1000, 7).iter().all(|&x| x == 0 || x == 2));
    }

    #[test]
    fn long_noiseless_draws_get_close() {
        let w = Channel::identity(Alphabet::numeric(2).unwrap());
        let p = Distribution::uniform(w.input().clone());
        let b = random_baseline(&p, &w, 20_000, 3).unwrap();
        assert!(b.tv < 0.05);
    }
}
