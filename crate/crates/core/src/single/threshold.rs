use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// The balancedness the √2 policy guarantees under a fixed arrival order.
pub const SQRT2_GUARANTEE: f64 = SQRT_2 - 1.0;

/// Acceptance probabilities for the items in arrival order: an active item `i` is taken with
/// probability `q_i` if nothing was taken before it.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdPolicy {
    pub q: Vec<f64>,
}

impl ThresholdPolicy {
    /// `r_i = q_i (1 − Σ_{j<i} x_j q_j)`, a lower bound on `Pr[i selected | i active]` under pairwise independence.
    pub fn ratios(&self, x: &[f64]) -> Vec<f64> {
        let mut taken = 0.0;
        self.q
            .iter()
            .zip(x)
            .map(|(q, xi)| {
                let r = q * (1.0 - taken);
                taken += xi * q;
                r
            })
            .collect()
    }

    pub fn min_ratio(&self, x: &[f64]) -> f64 {
        self.ratios(x).into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// `f(t) = 1/√((3+2√2) − (2+2√2)t)`.
pub fn sqrt2_acceptance(t: f64) -> f64 {
    1.0 / ((3.0 + 2.0 * SQRT_2) - (2.0 + 2.0 * SQRT_2) * t).sqrt()
}

/// `q_i = f(Σ_{j<i} x_j)`, computable online from the marginals seen so far.
pub fn sqrt2_policy(x: &[f64]) -> Result<ThresholdPolicy> {
    if let Some(i) = x.iter().position(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::InvalidParameter(format!("x_{i} = {} is not a probability", x[i])));
    }
    let total: f64 = x.iter().sum();
    if total > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!("marginals sum to {total} > 1")));
    }
    let mut prefix: f64 = 0.0;
    let q = x
        .iter()
        .map(|xi| {
            let q = sqrt2_acceptance(prefix.min(1.0)).min(1.0);
            prefix += xi;
            q
        })
        .collect();
    Ok(ThresholdPolicy { q })
}

/// The largest `c` such that some policy has `r_i ≥ c` for all `i`, by bisection on `c`.
///
/// For a target `c` the cheapest policy sets every `r_i` to exactly `c`; it is feasible iff all
/// the resulting `q_i` stay at most 1.
pub fn best_uniform_ratio(x: &[f64]) -> (f64, ThresholdPolicy) {
    let equalize = |c: f64| -> Option<ThresholdPolicy> {
        let mut taken = 0.0;
        let mut q = Vec::with_capacity(x.len());
        for xi in x {
            let qi = c / (1.0 - taken);
            if !(0.0..=1.0).contains(&qi) {
                return None;
            }
            taken += xi * qi;
            q.push(qi);
        }
        Some(ThresholdPolicy { q })
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if equalize(mid).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, equalize(lo).expect("c = lo is feasible"))
}

/// The hard instance for multiple-threshold algorithms: `n + 2` items, item 0 worth `t` always,
/// items `1..=n` worth 1 and item `n+1` worth `rn`, with the last `n + 1` items active in a
/// uniform pair with probability `(n+1)/(2n)` and all inactive otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiThresholdInstance {
    pub n: usize,
    pub r: f64,
    pub t: f64,
}

impl MultiThresholdInstance {
    pub fn new(n: usize, r: f64, t: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n = {n} must be at least 2")));
        }
        if !(0.0..1.0).contains(&t) || t == 0.0 || r <= 0.0 {
            return Err(Error::InvalidParameter(format!("need 0 < t < 1 and r > 0, got t = {t}, r = {r}")));
        }
        Ok(Self { n, r, t })
    }

    /// The parameters minimising the asymptotic bound: `r = (√5−1)/2`, `t = (1+r²)/2`.
    pub fn optimal(n: usize) -> Result<Self> {
        let r = 0.5 * (5f64.sqrt() - 1.0);
        Self::new(n, r, 0.5 * (1.0 + r * r))
    }

    pub fn items(&self) -> usize {
        self.n + 2
    }

    pub fn value(&self, item: usize) -> f64 {
        match item {
            0 => self.t,
            i if i == self.n + 1 => self.r * self.n as f64,
            _ => 1.0,
        }
    }

    /// Every outcome as (probability, active items in arrival order).
    pub fn outcomes(&self) -> crate::Result<super::ValueInstance> {
        let n = self.n;
        let mut outcomes = Vec::with_capacity((n + 1) * n / 2 + 1);
        let pair = crate::rational::rat(1, (n * n) as i64);
        for a in 1..=n + 1 {
            for b in a + 1..=n + 1 {
                outcomes.push((vec![(0, self.t), (a, self.value(a)), (b, self.value(b))], pair.clone()));
            }
        }
        outcomes.push((vec![(0, self.t)], crate::rational::rat(n as i64 - 1, 2 * n as i64)));
        super::ValueInstance::sparse(self.items(), outcomes)
    }

    /// `E[max_i W_i]`.
    pub fn opt(&self) -> f64 {
        let n = self.n as f64;
        (n - 1.0) / (2.0 * n) * self.t + self.r + ((n + 1.0) / (2.0 * n) - 1.0 / n)
    }

    /// Expected value collected by the policy that takes an arriving nonzero item `i` with probability `q[i]`.
    pub fn alg(&self, q: &[f64]) -> Result<f64> {
        if q.len() != self.items() {
            return Err(Error::InvalidParameter(format!("{} acceptance probabilities for {} items", q.len(), self.items())));
        }
        let n = self.n;
        let pair = 1.0 / (n * n) as f64;
        let mut pairs = 0.0;
        for a in 1..=n + 1 {
            for b in a + 1..=n + 1 {
                pairs += pair * (q[a] * self.value(a) + (1.0 - q[a]) * q[b] * self.value(b));
            }
        }
        Ok(q[0] * self.t + (1.0 - q[0]) * pairs)
    }

    /// An upper bound on `max_q ALG(q) / OPT`, exact at finite `n`.
    ///
    /// With `s = Σ_{i=1}^{n} q_i / n`, the pair term is at most `r + (1 − r + 1/(2n))s − s²/2`
    /// because `Σ_{j<i} q_i q_j ≥ (S² − S)/2`; ALG is linear in `q_0`.
    pub fn sup_bound(&self) -> f64 {
        let slope = 1.0 - self.r + 0.5 / self.n as f64;
        let s = slope.clamp(0.0, 1.0);
        let pair_term = self.r + slope * s - 0.5 * s * s;
        self.t.max(pair_term) / self.opt()
    }

    /// Largest ratio found over structured policies (threshold on the first item, constant or
    /// prefix-shaped acceptance on the middle items, last item always taken) plus coordinate ascent.
    pub fn search_ratio(&self) -> (f64, Vec<f64>) {
        let m = self.items();
        let opt = self.opt();
        let mut best = (f64::NEG_INFINITY, vec![1.0; m]);
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
        for &q0 in &[0.0, 1.0] {
            for &level in &grid {
                for &prefix in &grid {
                    let cut = (prefix * self.n as f64).round() as usize;
                    let mut q = vec![level; m];
                    q[0] = q0;
                    for qi in q.iter_mut().skip(1).take(cut) {
                        *qi = 1.0;
                    }
                    q[m - 1] = 1.0;
                    let ratio = self.alg(&q).expect("sized") / opt;
                    if ratio > best.0 {
                        best = (ratio, q);
                    }
                }
            }
        }
        let (mut ratio, mut q) = best;
        for _ in 0..3 {
            for i in 0..m {
                for &v in &grid {
                    let old = q[i];
                    q[i] = v;
                    let candidate = self.alg(&q).expect("sized") / opt;
                    if candidate > ratio {
                        ratio = candidate;
                    } else {
                        q[i] = old;
                    }
                }
            }
        }
        (ratio, q)
    }
}

/// `2√5 − 4`, the limit of the best multiple-threshold ratio on the hard instance.
pub fn multi_threshold_limit() -> f64 {
    2.0 * 5f64.sqrt() - 4.0
}

/// Minimises [`MultiThresholdInstance::sup_bound`] over a grid of `(r, t)`.
pub fn minimise_sup_bound(n: usize, steps: usize) -> Result<MultiThresholdInstance> {
    let mut best: Option<(f64, MultiThresholdInstance)> = None;
    for i in 1..steps {
        for j in 1..steps {
            let r = 2.0 * i as f64 / steps as f64;
            let t = j as f64 / steps as f64;
            let inst = MultiThresholdInstance::new(n, r, t)?;
            let bound = inst.sup_bound();
            if best.as_ref().is_none_or(|(b, _)| bound < *b) {
                best = Some((bound, inst));
            }
        }
    }
    best.map(|(_, inst)| inst).ok_or_else(|| Error::InvalidParameter("grid needs at least 2 steps".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn acceptance_curve_endpoints() {
        assert!((sqrt2_acceptance(0.0) - SQRT2_GUARANTEE).abs() < 1e-12);
        assert!((sqrt2_acceptance(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt2_guarantee_on_random_marginals() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let n = rng.gen_range(1..40);
            let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let scale = rng.gen_range(0.1..=1.0) / total;
            let x: Vec<f64> = raw.iter().map(|v| v * scale).collect();
            let policy = sqrt2_policy(&x).unwrap();
            assert!(policy.min_ratio(&x) >= SQRT2_GUARANTEE - 1e-9);
        }
    }

    #[test]
    fn overfull_marginals_are_rejected() {
        assert!(sqrt2_policy(&[0.6, 0.6]).is_err());
    }

    #[test]
    fn best_policy_on_uniform_marginals_is_near_sqrt2() {
        let x = vec![0.01; 100];
        let (c, policy) = best_uniform_ratio(&x);
        assert!(c <= SQRT2_GUARANTEE + 0.05);
        assert!(c >= SQRT2_GUARANTEE - 1e-9);
        assert!((policy.min_ratio(&x) - c).abs() < 1e-9);
    }

    #[test]
    fn instance_is_pairwise_independent() {
        let inst = MultiThresholdInstance::optimal(12).unwrap();
        let values = inst.outcomes().unwrap();
        values.verify_pairwise().unwrap();
        assert!((values.expected_max() - inst.opt()).abs() < 1e-12);
    }

    #[test]
    fn alg_matches_enumeration() {
        let inst = MultiThresholdInstance::optimal(10).unwrap();
        let values = inst.outcomes().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let q: Vec<f64> = (0..inst.items()).map(|_| rng.gen::<f64>()).collect();
            assert!((inst.alg(&q).unwrap() - values.threshold_value(&q)).abs() < 1e-12);
        }
    }

    #[test]
    fn only_last_item_policy() {
        let inst = MultiThresholdInstance::new(8, 0.7, 0.4).unwrap();
        let mut q = vec![0.0; inst.items()];
        q[9] = 1.0;
        // the last item is taken whenever it is active: probability 1/n, value rn
        assert!((inst.alg(&q).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn closed_form_bound_dominates_search() {
        for n in [10, 50] {
            let inst = MultiThresholdInstance::optimal(n).unwrap();
            let (found, _) = inst.search_ratio();
            assert!(found <= inst.sup_bound() + 1e-12);
            assert!(inst.alg(&vec![1.0; inst.items()]).unwrap() / inst.opt() <= inst.sup_bound());
            assert!(inst.sup_bound() <= multi_threshold_limit() + 5.0 / n as f64);
        }
    }

    #[test]
    fn grid_minimiser_lands_near_golden_ratio() {
        let inst = minimise_sup_bound(1000, 100).unwrap();
        assert!((inst.r - 0.618).abs() < 0.05);
        assert!(inst.sup_bound() <= multi_threshold_limit() + 0.01);
    }
}
