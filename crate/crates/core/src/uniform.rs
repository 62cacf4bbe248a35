//! Schemes for k-uniform matroids: the simple greedy family, the two-bucket family and the
//! offline ordered CRS.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::dist::{ExplicitDist, SubsetDistribution};
use crate::error::{Error, Result};
use crate::matroid::CapacitySet;
use crate::mc::{self, Estimate, McConfig, Proportion};
use crate::ocrs::CapacityFamily;
use crate::rational::{self, Rational};

const ROUNDING_SLACK: f64 = 1e-9;

/// `F = {I : |I| ≤ k}`, which is `(b, 1−b)`-selectable.
pub fn simple_uniform_family(n: usize, k: usize) -> Result<CapacityFamily> {
    if k == 0 {
        return Err(Error::InvalidParameter("rank k must be at least 1".into()));
    }
    Ok(CapacityFamily::uniform(n, k))
}

/// Rank `k`, face slack `eps` and split constant `r` of the two-bucket family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BucketParams {
    pub k: usize,
    pub eps: f64,
    pub r: f64,
}

impl BucketParams {
    pub fn new(k: usize, eps: f64, r: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("rank k must be at least 1".into()));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, 1)")));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!("r = {r} must lie in (0, 1)")));
        }
        Ok(Self { k, eps, r })
    }

    /// `eps = k^{-1/5}` and `r = 1/3`.
    pub fn with_defaults(k: usize) -> Result<Self> {
        Self::new(k, (k as f64).powf(-0.2), 1.0 / 3.0)
    }

    /// `((1−r)² r ε³ k)^{-1/2}`, the badness threshold and the failure bound of both buckets.
    pub fn b_star(&self) -> f64 {
        ((1.0 - self.r).powi(2) * self.r * self.eps.powi(3) * self.k as f64).powf(-0.5)
    }

    pub fn guarantee(&self) -> f64 {
        1.0 - self.b_star()
    }

    /// `⌊(1−rε)k⌋`.
    pub fn good_capacity(&self) -> usize {
        ((1.0 - self.r * self.eps) * self.k as f64 + ROUNDING_SLACK).floor() as usize
    }

    /// `⌈rεk⌉`.
    pub fn bad_capacity(&self) -> usize {
        ((self.r * self.eps * self.k as f64 - ROUNDING_SLACK).ceil() as usize).max(1)
    }
}

/// The prepared two-bucket family with its classification record.
#[derive(Clone, Debug)]
pub struct TwoBucket {
    /// Parameters after the slack adjustment of `eps`.
    pub params: BucketParams,
    /// `Pr[|R| > ⌊(1−rε)k⌋ | i ∈ R]`, absent for zero-marginal items.
    pub overflow: Vec<Option<Estimate>>,
    pub good: Vec<bool>,
    /// Sampled items whose estimate exceeds the threshold while the confidence interval straddles it.
    pub ambiguous: Vec<usize>,
    pub family: CapacityFamily,
}

impl TwoBucket {
    pub fn good_items(&self) -> Vec<usize> {
        (0..self.good.len()).filter(|&i| self.good[i]).collect()
    }

    pub fn bad_items(&self) -> Vec<usize> {
        (0..self.good.len()).filter(|&i| !self.good[i]).collect()
    }
}

/// Uses the marginal total to fix `eps`: when `Σx < (1−ε)k` the slack is raised to `1 − Σx/k`.
pub fn effective_params(total: f64, params: BucketParams) -> Result<BucketParams> {
    let k = params.k as f64;
    let face = (1.0 - params.eps) * k;
    if total > face * (1.0 + ROUNDING_SLACK) + ROUNDING_SLACK {
        return Err(Error::InvalidParameter(format!("Σx = {total} exceeds (1−ε)k = {face}")));
    }
    if total <= 0.0 || total >= face {
        return Ok(params);
    }
    let eps = 1.0 - total / k;
    log::info!("Σx = {total} lies below (1−ε)k = {face}; raising ε from {} to {eps}", params.eps);
    BucketParams::new(params.k, eps, params.r)
}

/// Classifies items as good or bad and builds
/// `F = {I : |I ∩ E_g| ≤ ⌊(1−rε)k⌋, |I ∩ E_b| ≤ ⌈rεk⌉}`.
pub fn two_bucket_prepare(d: &SubsetDistribution, params: BucketParams, mc: McConfig) -> Result<TwoBucket> {
    let n = d.ground_size();
    let x = d.marginals();
    let total = rational::to_f64(&x.iter().sum());
    let params = effective_params(total, params)?;
    let cap = params.good_capacity();
    let threshold = params.b_star();
    let overflow: Vec<Option<Estimate>> = match d {
        SubsetDistribution::Explicit(e) => {
            let mass = e.credited_mass(|m| if m.count_ones() as usize > cap { m } else { 0 });
            mass.into_iter().zip(&x).map(|(m, xi)| (!xi.is_zero()).then(|| Estimate::exact(m / xi))).collect()
        }
        SubsetDistribution::Sampler(_) => {
            let counts = mc::counts(mc.seed, mc.trials, 2 * n, |rng, acc| {
                let active = d.sample(rng);
                let over = u64::from(active.len() > cap);
                for &i in &active {
                    acc[i] += 1;
                    acc[n + i] += over;
                }
            });
            (0..n).map(|i| (counts[i] > 0).then(|| Estimate::sampled(Proportion::new(counts[n + i], counts[i])))).collect()
        }
    };
    let mut good = vec![true; n];
    let mut ambiguous = Vec::new();
    for (i, est) in overflow.iter().enumerate() {
        let Some(est) = est else { continue };
        if est.value <= threshold {
            continue;
        }
        if est.is_exact() || est.value - mc::Z99 * est.sigma > threshold {
            good[i] = false;
        } else {
            log::warn!("item {i}: overflow estimate {} straddles the threshold {threshold}; kept good", est.value);
            ambiguous.push(i);
        }
    }
    let constraints = vec![
        CapacitySet { members: (0..n).filter(|&i| good[i]).collect(), cap },
        CapacitySet { members: (0..n).filter(|&i| !good[i]).collect(), cap: params.bad_capacity() },
    ];
    let family = CapacityFamily::new(n, constraints)?;
    Ok(TwoBucket { params, overflow, good, ambiguous, family })
}

/// `Σ_i Pr[|R| ≥ k, i ∈ R] = E[|R|·1[|R| ≥ k]]`.
pub fn averaging_tail(d: &ExplicitDist, k: usize) -> Rational {
    d.credited_mass(|m| if m.count_ones() as usize >= k { m } else { 0 }).into_iter().sum()
}

/// `(1−δ²)/δ²`, the bound on [`averaging_tail`] when `x(E) = (1−δ)k`.
pub fn averaging_bound(delta: &Rational) -> Rational {
    let sq = delta * delta;
    (Rational::one() - &sq) / sq
}

/// An arrival order for the offline greedy CRS with its certified prefix probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct OfflineOrdering {
    pub k: usize,
    pub order: Vec<usize>,
    /// `Pr[|R ∩ {i_1..i_j}| ≥ k | i_j ∈ R]` for each position `j` (zero for zero-marginal items).
    pub prefix_overflow: Vec<Rational>,
    /// `(1+ε)/(ε²k)`.
    pub bound: Rational,
}

impl OfflineOrdering {
    /// Greedy in the stored order with capacity `k`.
    pub fn run(&self, active: u64) -> u64 {
        let mut selected = 0u64;
        for &i in &self.order {
            if active >> i & 1 == 1 && (selected.count_ones() as usize) < self.k {
                selected |= 1 << i;
            }
        }
        selected
    }

    /// Exact `Pr[i ∈ run(R) | i ∈ R]`, `None` where `x_i = 0`.
    pub fn balancedness(&self, d: &ExplicitDist) -> Vec<Option<Rational>> {
        let kept = d.credited_mass(|m| self.run(m));
        kept.into_iter().zip(d.marginals()).map(|(k, x)| (!x.is_zero()).then(|| k / x)).collect()
    }
}

/// Builds the order back to front: each step places last the remaining item with the
/// smallest `Pr[|R ∩ U| ≥ k | i ∈ R]` over the remaining set `U`.
pub fn offline_uniform_crs(d: &ExplicitDist, k: usize, eps: &Rational) -> Result<OfflineOrdering> {
    if k == 0 {
        return Err(Error::InvalidParameter("rank k must be at least 1".into()));
    }
    if *eps <= Rational::zero() || *eps >= Rational::one() {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, 1)")));
    }
    let n = d.ground_size();
    let x = d.marginals();
    let kk = Rational::from_integer(BigInt::from(k));
    let total: Rational = x.iter().sum();
    if total > (Rational::one() - eps) * &kk {
        return Err(Error::InvalidParameter(format!("Σx = {total} exceeds (1−ε)k")));
    }
    let bound = (Rational::one() + eps) / (eps * eps * &kk);
    let mut remaining = crate::bits::full(n);
    let mut reversed = Vec::with_capacity(n);
    let mut overflow_rev = Vec::with_capacity(n);
    for step in 0..n {
        let mass = d.credited_mass(|m| if (m & remaining).count_ones() as usize >= k { m & remaining } else { 0 });
        let (best, value) = crate::bits::iter(remaining)
            .map(|i| (i, if x[i].is_zero() { Rational::zero() } else { &mass[i] / &x[i] }))
            .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("remaining set is nonempty");
        if value > bound {
            return Err(Error::NoQualifyingElement { step, best: value.to_string() });
        }
        remaining &= !(1 << best);
        reversed.push(best);
        overflow_rev.push(value);
    }
    reversed.reverse();
    overflow_rev.reverse();
    Ok(OfflineOrdering { k, order: reversed, prefix_overflow: overflow_rev, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{mixture, parity_dist, product_dist, thin, twise_symmetric};
    use crate::ocrs::{exact_selectability, Deterministic};
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn min_selectability(values: &[Option<Rational>]) -> Rational {
        values.iter().flatten().min().cloned().unwrap()
    }

    #[test]
    fn simple_family_example() {
        let d = product_dist(&[rat(1, 4), rat(1, 4)]).unwrap();
        let scheme = Deterministic::new(simple_uniform_family(2, 1).unwrap());
        let sel = exact_selectability(&scheme, &d).unwrap();
        assert_eq!(sel, vec![Some(rat(3, 4)), Some(rat(3, 4))]);
        assert!(simple_uniform_family(2, 0).is_err());
    }

    #[test]
    fn bucket_capacities() {
        let p = BucketParams::with_defaults(32).unwrap();
        assert!((p.eps - 0.5).abs() < 1e-12);
        assert_eq!((p.good_capacity(), p.bad_capacity()), (26, 6));
        let big = BucketParams::with_defaults(10_000).unwrap();
        let formula = 1.0 - (4.0 / 27.0 * big.eps.powi(3) * 10_000.0).powf(-0.5);
        assert!((big.guarantee() - formula).abs() < 1e-12);
        assert!((big.guarantee() - 0.588).abs() < 1e-3);
        assert!(BucketParams::with_defaults(1).is_err());
    }

    #[test]
    fn small_sets_are_all_good() {
        // |R| ≤ 2 always, capacity of the good bucket is 7
        let d: SubsetDistribution = twise_symmetric(8, 2).unwrap().into();
        let p = BucketParams::new(8, 0.5, 1.0 / 3.0).unwrap();
        let tb = two_bucket_prepare(&d, p, McConfig::new(0, 0)).unwrap();
        assert!(tb.good.iter().all(|&g| g));
        assert!((tb.params.eps - 0.875).abs() < 1e-12);
    }

    #[test]
    fn overloaded_marginals_are_rejected() {
        let d: SubsetDistribution = product_dist(&vec![rat(1, 2); 8]).unwrap().into();
        assert!(two_bucket_prepare(&d, BucketParams::new(4, 0.5, 0.5).unwrap(), McConfig::new(0, 0)).is_err());
    }

    #[test]
    fn two_bucket_exact_meets_its_bound() {
        let d = product_dist(&vec![rat(3, 5); 10]).unwrap();
        let params = BucketParams::new(10, 0.4, 1.0 / 3.0).unwrap();
        let tb = two_bucket_prepare(&d.clone().into(), params, McConfig::new(0, 0)).unwrap();
        let sel = exact_selectability(&Deterministic::new(tb.family.clone()), &d).unwrap();
        let min = rational::to_f64(&min_selectability(&sel));
        assert!(min >= 1.0 - tb.params.b_star());
    }

    #[test]
    fn offline_order_product_example() {
        let eps = rat(1, 3);
        let x = rat(2, 9);
        let d = product_dist(&vec![x; 6]).unwrap();
        let ordering = offline_uniform_crs(&d, 2, &eps).unwrap();
        assert_eq!(ordering.bound, int(6));
        let mut sorted = ordering.order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..6).collect::<Vec<_>>());
        assert!(ordering.prefix_overflow.iter().all(|p| *p <= ordering.bound));
        // last-placed item sees the whole ground set
        let whole = d.conditional(|m| m.count_ones() >= 2, |m| m >> ordering.order[5] & 1 == 1).unwrap();
        assert_eq!(ordering.prefix_overflow[5], whole);
        for (j, b) in ordering.balancedness(&d).into_iter().enumerate() {
            assert!(b.unwrap() >= int(1) - &ordering.prefix_overflow[ordering.order.iter().position(|&i| i == j).unwrap()]);
        }
    }

    #[test]
    fn offline_large_k_keeps_everything() {
        let d = product_dist(&vec![rat(1, 2); 4]).unwrap();
        let ordering = offline_uniform_crs(&d, 5, &rat(1, 2)).unwrap();
        assert!(ordering.balancedness(&d).into_iter().all(|b| b == Some(int(1))));
    }

    /// Mixture of two parity constructions, thinned per item: pairwise independent.
    fn random_pi(seed: u64) -> ExplicitDist {
        use rand::Rng;
        let mut rng = mc::rng(seed, 0);
        let n = rng.gen_range(3..=10);
        let mut vectors = || -> Vec<u64> { rand::seq::index::sample(&mut rng, 15, n).into_iter().map(|v| v as u64 + 1).collect() };
        let (a, b) = (vectors(), vectors());
        let mixed = mixture(&[(parity_dist(&a, 4).unwrap(), rat(1, 3)), (parity_dist(&b, 4).unwrap(), rat(2, 3))]).unwrap();
        let keep: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(1..=4), 4)).collect();
        thin(&mixed.into(), &keep).unwrap().as_explicit().unwrap().clone()
    }

    #[test]
    fn averaging_bound_on_random_pi_distributions() {
        for seed in 0..25 {
            let d = random_pi(seed);
            let total: Rational = d.marginals().iter().sum();
            for k in 1..=d.ground_size() {
                let kk = Rational::from_integer(BigInt::from(k));
                if total >= kk {
                    continue;
                }
                let delta = Rational::one() - &total / &kk;
                assert!(averaging_tail(&d, k) <= averaging_bound(&delta), "seed {seed} k {k}");
            }
        }
    }

    proptest! {
        #[test]
        fn simple_family_is_one_minus_b(n in 2usize..8, k in 1usize..4, num in 1i64..10) {
            // product D with Σx = bk
            let b = rat(num, 10);
            let x = &b * rat(k as i64, n as i64);
            prop_assume!(x <= int(1));
            let d = product_dist(&vec![x; n]).unwrap();
            let sel = exact_selectability(&Deterministic::new(simple_uniform_family(n, k).unwrap()), &d).unwrap();
            prop_assert!(min_selectability(&sel) >= int(1) - b);
        }
    }
}
