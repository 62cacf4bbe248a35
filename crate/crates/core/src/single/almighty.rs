use num_bigint::BigInt;
use num_traits::Zero;

use crate::bits;
use crate::dist::{pair_singleton_dist, ExplicitDist};
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};

/// Largest `n` for policies whose coin string has one bit per item.
pub const COIN_LIMIT: usize = 16;

/// Single-item online rules that are deterministic once their coin string is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlmightyPolicy {
    /// Take the first arrival.
    AcceptFirst,
    /// Each item carries a fair coin; take the first arrival whose coin is heads.
    CoinFlip,
    /// Draw a uniform cut `c ∈ {0, …, n}`; take the first arrival with id at least `c`.
    RandomCut,
}

impl AlmightyPolicy {
    pub const ALL: [AlmightyPolicy; 3] = [AlmightyPolicy::AcceptFirst, AlmightyPolicy::CoinFlip, AlmightyPolicy::RandomCut];

    pub fn name(&self) -> &'static str {
        match self {
            AlmightyPolicy::AcceptFirst => "accept-first",
            AlmightyPolicy::CoinFlip => "coin-flip",
            AlmightyPolicy::RandomCut => "random-cut",
        }
    }

    /// Every coin string with its probability.
    pub fn coin_strings(&self, n: usize) -> Result<Vec<(u64, Rational)>> {
        Ok(match self {
            AlmightyPolicy::AcceptFirst => vec![(0, rat(1, 1))],
            AlmightyPolicy::CoinFlip => {
                if n > COIN_LIMIT {
                    return Err(Error::TooLarge { what: "coin strings", size: n, limit: COIN_LIMIT });
                }
                let each = Rational::new(1.into(), BigInt::from(1u64) << n);
                (0..1u64 << n).map(|s| (s, each.clone())).collect()
            }
            AlmightyPolicy::RandomCut => (0..=n as u64).map(|c| (c, rat(1, n as i64 + 1))).collect(),
        })
    }

    /// Whether the rule takes `item` when it arrives and nothing has been taken yet.
    pub fn accepts(&self, coins: u64, item: usize) -> bool {
        match self {
            AlmightyPolicy::AcceptFirst => true,
            AlmightyPolicy::CoinFlip => (coins >> item) & 1 == 1,
            AlmightyPolicy::RandomCut => item as u64 >= coins,
        }
    }

    fn run(&self, coins: u64, order: &[usize]) -> Option<usize> {
        order.iter().copied().find(|&i| self.accepts(coins, i))
    }
}

/// Selection probabilities when the adversary sees the active set and the coins.
#[derive(Clone, Debug, PartialEq)]
pub struct AlmightyReport {
    /// `Pr[i selected under every arrival order | i ∈ R]` for each item.
    pub conditional: Vec<Rational>,
    pub worst_item: usize,
    /// `Σ_i Pr[E_i]`, with `E_i` the event that `i` is active and selected under every order.
    pub total_robust: Rational,
}

impl AlmightyReport {
    pub fn min(&self) -> &Rational {
        &self.conditional[self.worst_item]
    }
}

/// Enumerates active sets of the pair/singleton distribution, coin strings and arrival orders.
pub fn almighty_experiment(n: usize, policy: AlmightyPolicy) -> Result<AlmightyReport> {
    almighty_on(&pair_singleton_dist(n)?, policy)
}

/// The same adversary on any distribution whose active sets have at most 4 elements.
pub fn almighty_on(d: &ExplicitDist, policy: AlmightyPolicy) -> Result<AlmightyReport> {
    let n = d.ground_size();
    if let Some((mask, _)) = d.support().iter().find(|(m, _)| m.count_ones() > 4) {
        return Err(Error::TooLarge { what: "active set for order enumeration", size: mask.count_ones() as usize, limit: 4 });
    }
    let coins = policy.coin_strings(n)?;
    let mut robust = vec![Rational::zero(); n];
    for (mask, p) in d.support() {
        let active = bits::elements(*mask);
        let orders = permutations(&active);
        for (s, ps) in &coins {
            for &i in &active {
                if orders.iter().all(|order| policy.run(*s, order) == Some(i)) {
                    robust[i] += p * ps;
                }
            }
        }
    }
    let x = d.marginals();
    let conditional: Vec<Rational> =
        robust.iter().zip(&x).map(|(r, xi)| if xi.is_zero() { Rational::zero() } else { r / xi }).collect();
    let worst_item = (0..n).filter(|&i| !x[i].is_zero()).min_by(|&a, &b| conditional[a].cmp(&conditional[b])).unwrap_or(0);
    Ok(AlmightyReport { conditional, worst_item, total_robust: robust.iter().sum() })
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// `1/4 + 1/n`.
pub fn almighty_bound(n: usize) -> Rational {
    rat(1, 4) + rat(1, n as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accept_first_is_robust_only_alone() {
        let report = almighty_experiment(4, AlmightyPolicy::AcceptFirst).unwrap();
        // robust only when R = {i}: probability 1/16, conditional on x_i = 1/4
        assert!(report.conditional.iter().all(|c| *c == rat(1, 4)));
        assert_eq!(report.total_robust, rat(1, 4));
    }

    #[test]
    fn coin_flip_closed_form() {
        for n in [4, 6, 8] {
            let report = almighty_experiment(n, AlmightyPolicy::CoinFlip).unwrap();
            let nn = n as i64;
            let expected = rat(1, 2 * nn) + rat(nn - 1, 4 * nn);
            assert!(report.conditional.iter().all(|c| *c == expected));
            assert!(report.total_robust <= almighty_bound(n));
        }
    }

    #[test]
    fn every_policy_respects_the_bound() {
        for n in [2, 4, 6, 8] {
            for policy in AlmightyPolicy::ALL {
                let report = almighty_experiment(n, policy).unwrap();
                assert!(*report.min() <= almighty_bound(n), "{} n={n}", policy.name());
                assert!(report.total_robust <= almighty_bound(n), "{} n={n}", policy.name());
            }
        }
    }

    #[test]
    fn random_cut_favours_high_ids() {
        let report = almighty_experiment(6, AlmightyPolicy::RandomCut).unwrap();
        assert_eq!(report.worst_item, 0);
        assert!(report.conditional[5] > report.conditional[0]);
    }
}
