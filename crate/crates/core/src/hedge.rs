//! The Hedge variant of the multiplicative weight update algorithm.
//!
//! A Y-player keeps one weight per strategy, `w(l+1, y) = exp(−ε Σ_{l'≤l}
//! m(x_{l'}, y))`, and plays `f(l, ·) ∝ w(l, ·)`. Weights are never
//! materialized: only cumulative costs are stored, and `f` is normalized
//! after shifting by the minimum cumulative cost, so long runs cannot
//! underflow. The engine does not know what the costs mean; the caller's
//! responder picks the X-player move and supplies its cost column.

use crate::error::{Error, Result};
use crate::prob::{Alphabet, Distribution};

/// Mutable state of one Hedge run.
#[derive(Debug, Clone)]
pub struct HedgeState {
    space: Alphabet,
    epsilon: f64,
    cum_cost: Vec<f64>,
    round: usize,
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 0.5 {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(epsilon))
    }
}

impl HedgeState {
    /// Uniform start: round 1, all cumulative costs zero.
    pub fn new(space: Alphabet, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        let k = space.len();
        Ok(HedgeState {
            space,
            epsilon,
            cum_cost: vec![0.0; k],
            round: 1,
        })
    }

    pub fn space(&self) -> &Alphabet {
        &self.space
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// 1-based index of the round about to be played.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn cum_cost(&self) -> &[f64] {
        &self.cum_cost
    }

    /// Writes `f(l, ·)` into `buf`.
    pub fn strategy_into(&self, buf: &mut Vec<f64>) {
        let min = self.cum_cost.iter().copied().fold(f64::INFINITY, f64::min);
        buf.clear();
        buf.extend(self.cum_cost.iter().map(|&c| (-self.epsilon * (c - min)).exp()));
        let total: f64 = buf.iter().sum();
        for v in buf.iter_mut() {
            *v /= total;
        }
    }

    /// The Y-player's mixed strategy `f(l, ·)`.
    pub fn strategy(&self) -> Distribution {
        let mut buf = Vec::with_capacity(self.cum_cost.len());
        self.strategy_into(&mut buf);
        Distribution::new(self.space.clone(), buf).expect("normalized by construction")
    }

    /// Adds a dense cost column and advances the round.
    pub fn update(&mut self, cost: &[f64]) -> Result<()> {
        if cost.len() != self.cum_cost.len() {
            return Err(Error::LengthMismatch {
                expected: self.cum_cost.len(),
                got: cost.len(),
            });
        }
        check_costs(cost.iter().copied().enumerate())?;
        for (c, &m) in self.cum_cost.iter_mut().zip(cost) {
            *c += m;
        }
        self.round += 1;
        Ok(())
    }

    /// Adds a cost column given by its nonzero `(strategy, cost)` entries.
    pub fn update_sparse(&mut self, entries: &[(usize, f64)]) -> Result<()> {
        if let Some(&(index, _)) = entries.iter().find(|(i, _)| *i >= self.cum_cost.len()) {
            return Err(Error::IndexOutOfRange {
                index,
                size: self.cum_cost.len(),
            });
        }
        check_costs(entries.iter().copied())?;
        for &(i, m) in entries {
            self.cum_cost[i] += m;
        }
        self.round += 1;
        Ok(())
    }
}

fn check_costs(costs: impl Iterator<Item = (usize, f64)>) -> Result<()> {
    for (index, value) in costs {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::CostOutOfRange { index, value });
        }
    }
    Ok(())
}

/// What the X-player did in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub chosen: usize,
    pub cost: Vec<f64>,
}

/// Full record of a Hedge run.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub space: Alphabet,
    pub chosen: Vec<usize>,
    pub strategies: Vec<Distribution>,
    pub costs: Vec<Vec<f64>>,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }
}

/// Runs `rounds` rounds of Hedge. `responder` sees the round index (1-based)
/// and `f(l, ·)` and returns the X-player's move with its cost column.
pub fn hedge_run<F>(space: Alphabet, epsilon: f64, rounds: usize, mut responder: F) -> Result<Transcript>
where
    F: FnMut(usize, &Distribution) -> Result<Response>,
{
    let mut state = HedgeState::new(space.clone(), epsilon)?;
    let mut transcript = Transcript {
        space,
        chosen: Vec::with_capacity(rounds),
        strategies: Vec::with_capacity(rounds),
        costs: Vec::with_capacity(rounds),
    };
    for _ in 0..rounds {
        let f = state.strategy();
        let response = responder(state.round(), &f)?;
        state.update(&response.cost)?;
        transcript.chosen.push(response.chosen);
        transcript.strategies.push(f);
        transcript.costs.push(response.cost);
    }
    Ok(transcript)
}

/// Per-strategy slack of the regret guarantee,
/// `Σ_l m(x_l, y) + ln|space|/ε − (1−ε) Σ_l ⟨f(l,·), m(x_l,·)⟩`.
///
/// Every entry is nonnegative up to rounding (tolerance `1e-9 · L`).
pub fn regret_audit(t: &Transcript, epsilon: f64) -> Vec<f64> {
    let k = t.space.len();
    let mut column_sums = vec![0.0; k];
    let mut played = 0.0;
    for (f, cost) in t.strategies.iter().zip(&t.costs) {
        for (s, &m) in column_sums.iter_mut().zip(cost) {
            *s += m;
        }
        played += f.mass().iter().zip(cost).map(|(a, b)| a * b).sum::<f64>();
    }
    regret_slack(&column_sums, played, k, epsilon)
}

/// The regret slack from aggregated quantities: per-strategy total costs and
/// the total expected cost of the played mixed strategies.
pub fn regret_slack(column_sums: &[f64], played: f64, space_size: usize, epsilon: f64) -> Vec<f64> {
    let offset = (space_size as f64).ln() / epsilon - (1.0 - epsilon) * played;
    column_sums.iter().map(|&s| s + offset).collect()
}

/// Rounding slack allowed when evaluating the scalar inequalities below.
pub const INEQUALITY_TOL: f64 = 1e-12;

/// `(1 − (1 − e^{−ε}) z) − e^{−εz}`; nonnegative on `[0,1] × [0,1]`.
pub fn exp_linear_gap(z: f64, epsilon: f64) -> f64 {
    let eps1 = -(-epsilon).exp_m1();
    (1.0 - eps1 * z) - (-epsilon * z).exp()
}

/// `e^{−εz} ≤ 1 − (1 − e^{−ε}) z`, up to [`INEQUALITY_TOL`].
pub fn ineq_exp_linear(z: f64, epsilon: f64) -> bool {
    exp_linear_gap(z, epsilon) >= -INEQUALITY_TOL
}

/// `(1 − e^{−ε}) − ε(1 − ε)`; nonnegative on `[0, 1/2]`.
pub fn eps_quadratic_gap(epsilon: f64) -> f64 {
    -(-epsilon).exp_m1() - epsilon * (1.0 - epsilon)
}

/// `1 − e^{−ε} ≥ ε(1 − ε)`, up to [`INEQUALITY_TOL`].
pub fn ineq_eps_quadratic(epsilon: f64) -> bool {
    eps_quadratic_gap(epsilon) >= -INEQUALITY_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(k: usize) -> Alphabet {
        Alphabet::numeric(k).unwrap()
    }

    #[test]
    fn init_examples() {
        let s = HedgeState::new(space(4), 0.5).unwrap();
        assert_eq!(s.round(), 1);
        assert_eq!(s.strategy().mass(), &[0.25; 4]);
        assert_eq!(HedgeState::new(space(1), 0.5).unwrap().strategy().mass(), &[1.0]);
        assert_eq!(
            HedgeState::new(space(2), 0.6).unwrap_err(),
            Error::EpsilonOutOfRange(0.6)
        );
        assert!(HedgeState::new(space(2), 0.0).is_err());
    }

    #[test]
    fn strategy_formula() {
        let mut s = HedgeState::new(space(2), 0.5).unwrap();
        s.update(&[1.0, 0.0]).unwrap();
        let f = s.strategy();
        let z = (-0.5f64).exp() + 1.0;
        assert!((f.get(0) - (-0.5f64).exp() / z).abs() < 1e-15);
        assert!((f.get(0) - 0.3775).abs() < 1e-4);
        assert!((f.get(1) - 0.6225).abs() < 1e-4);
    }

    #[test]
    fn update_examples() {
        let mut s = HedgeState::new(space(3), 0.5).unwrap();
        s.update(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.round(), 2);
        assert_eq!(s.cum_cost(), &[0.0; 3]);
        assert_eq!(
            s.update(&[1.2, 0.0, 0.0]).unwrap_err(),
            Error::CostOutOfRange { index: 0, value: 1.2 }
        );
        assert_eq!(s.round(), 2);
        s.update_sparse(&[(2, 0.5)]).unwrap();
        assert_eq!(s.cum_cost(), &[0.0, 0.0, 0.5]);
        assert!(s.update_sparse(&[(3, 0.5)]).is_err());
    }

    #[test]
    fn run_with_no_rounds() {
        let t = hedge_run(space(3), 0.5, 0, |_, _| unreachable!()).unwrap();
        assert!(t.is_empty());
        let slack = regret_audit(&t, 0.5);
        for s in slack {
            assert!((s - 3f64.ln() / 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_cost_keeps_uniform() {
        let t = hedge_run(space(4), 0.3, 20, |_, _| {
            Ok(Response {
                chosen: 0,
                cost: vec![1.0; 4],
            })
        })
        .unwrap();
        for f in &t.strategies {
            for &v in f.mass() {
                assert!((v - 0.25).abs() < 1e-15);
            }
        }
        let slack = regret_audit(&t, 0.3);
        let expected = 0.3 * 20.0 + 4f64.ln() / 0.3;
        for s in slack {
            assert!((s - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn long_runs_do_not_underflow() {
        let mut s = HedgeState::new(space(3), 0.5).unwrap();
        for _ in 0..10_000 {
            s.update(&[1.0, 1.0, 1.0]).unwrap();
        }
        let f = s.strategy();
        for &v in f.mass() {
            assert!(v.is_finite());
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn responder_errors_propagate() {
        let err = hedge_run(space(2), 0.5, 3, |l, _| {
            if l == 2 {
                Err(Error::EmptySupport)
            } else {
                Ok(Response {
                    chosen: 0,
                    cost: vec![0.0, 1.0],
                })
            }
        })
        .unwrap_err();
        assert_eq!(err, Error::EmptySupport);
    }

    #[test]
    fn inequality_examples() {
        for eps in [0.0, 0.1, 0.5, 1.0] {
            assert!(exp_linear_gap(0.0, eps).abs() <= 1e-12);
            assert!(exp_linear_gap(1.0, eps).abs() <= 1e-12);
        }
        assert!(ineq_exp_linear(0.5, 0.5));
        assert!(((-0.25f64).exp() - 0.7788).abs() < 1e-4);
        assert!((exp_linear_gap(0.5, 0.5) - (0.8033 - 0.7788)).abs() < 1e-3);
        assert_eq!(eps_quadratic_gap(0.0), 0.0);
        assert!(ineq_eps_quadratic(0.5));
        assert!(ineq_eps_quadratic(0.25));
        assert!((-(-0.25f64).exp_m1() - 0.2212).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn strategy_is_shift_invariant(
            costs in prop::collection::vec(0.0f64..1.0, 1..8),
            shift in 0.0f64..1.0,
            eps in 0.01f64..0.5,
        ) {
            let mut a = HedgeState::new(space(costs.len()), eps).unwrap();
            a.update(&costs).unwrap();
            let mut b = a.clone();
            b.update(&vec![shift; costs.len()]).unwrap();
            for (x, y) in a.strategy().mass().iter().zip(b.strategy().mass()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn regret_bound_holds(
            k in 1usize..10,
            rounds in 0usize..80,
            eps in 0.01f64..0.5,
            seed in any::<u64>(),
        ) {
            let mut state = seed;
            let mut next = move || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64
            };
            let t = hedge_run(space(k), eps, rounds, |_, _| {
                Ok(Response { chosen: 0, cost: (0..k).map(|_| next()).collect() })
            }).unwrap();
            for s in regret_audit(&t, eps) {
                prop_assert!(s >= -1e-9 * rounds.max(1) as f64);
            }
        }

        #[test]
        fn appendix_inequalities(z in 0.0f64..=1.0, eps in 0.0f64..=1.0) {
            prop_assert!(ineq_exp_linear(z, eps));
            prop_assert!(ineq_eps_quadratic(eps * 0.5));
        }
    }
}
