use std::collections::HashMap;

use num_traits::{One, Zero};
use rand::{Rng, RngCore};

use crate::bits;
use crate::dist::ExplicitDist;
use crate::error::{Error, Result};
use crate::mc::{self, McConfig, Moments};
use crate::rational::{self, Rational};

/// A joint distribution of item values given as an explicit outcome list.
///
/// Each outcome lists the items with a nonzero value; every other item is worth 0.
#[derive(Clone, Debug)]
pub struct ValueInstance {
    items: usize,
    outcomes: Vec<(Vec<(usize, f64)>, Rational)>,
    cumulative: Vec<f64>,
}

impl ValueInstance {
    pub fn sparse(items: usize, outcomes: Vec<(Vec<(usize, f64)>, Rational)>) -> Result<Self> {
        let mut total = Rational::zero();
        for (values, p) in &outcomes {
            if !rational::is_probability(p) {
                return Err(Error::InvalidDistribution(format!("outcome probability {p} is not in [0, 1]")));
            }
            if let Some((i, v)) = values.iter().find(|(i, v)| *i >= items || !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidDistribution(format!("item {i} has value {v} (items = {items})")));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("outcome probabilities sum to {total}")));
        }
        let mut acc = 0.0;
        let cumulative = outcomes
            .iter()
            .map(|(_, p)| {
                acc += rational::to_f64(p);
                acc
            })
            .collect();
        Ok(Self { items, outcomes, cumulative })
    }

    /// `W_i = w_i · 1[i ∈ R]` for `R ∼ d`.
    pub fn from_weights(d: &ExplicitDist, weights: &[f64]) -> Result<Self> {
        if weights.len() != d.ground_size() {
            return Err(Error::InvalidParameter(format!("{} weights for {} items", weights.len(), d.ground_size())));
        }
        let outcomes = d.support().iter().map(|(m, p)| (bits::iter(*m).map(|i| (i, weights[i])).collect(), p.clone())).collect();
        Self::sparse(d.ground_size(), outcomes)
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn outcomes(&self) -> &[(Vec<(usize, f64)>, Rational)] {
        &self.outcomes
    }

    fn dense(&self, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.items];
        for &(i, w) in &self.outcomes[k].0 {
            v[i] = w;
        }
        v
    }

    /// Checks `Pr[W_i = a, W_j = b] = Pr[W_i = a] Pr[W_j = b]` for every pair of items and values, exactly.
    pub fn verify_pairwise(&self) -> Result<()> {
        // value tables per item, keyed by bit pattern
        let mut marginal: Vec<HashMap<u64, Rational>> = vec![HashMap::new(); self.items];
        for k in 0..self.outcomes.len() {
            for (i, v) in self.dense(k).into_iter().enumerate() {
                *marginal[i].entry(v.to_bits()).or_insert_with(Rational::zero) += &self.outcomes[k].1;
            }
        }
        // the most likely value of each item is its base; only non-base pairs need checking
        let base: Vec<u64> = marginal
            .iter()
            .map(|m| {
                let mut entries: Vec<(&u64, &Rational)> = m.iter().collect();
                entries.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
                *entries[0].0
            })
            .collect();
        let mut joint: HashMap<(usize, u64, usize, u64), Rational> = HashMap::new();
        for k in 0..self.outcomes.len() {
            let off: Vec<(usize, u64)> =
                self.dense(k).into_iter().enumerate().map(|(i, v)| (i, v.to_bits())).filter(|(i, v)| *v != base[*i]).collect();
            for (a, &(i, vi)) in off.iter().enumerate() {
                for &(j, vj) in &off[a + 1..] {
                    *joint.entry((i, vi, j, vj)).or_insert_with(Rational::zero) += &self.outcomes[k].1;
                }
            }
        }
        let off_values: Vec<Vec<(u64, &Rational)>> = marginal
            .iter()
            .zip(&base)
            .map(|(m, b)| {
                let mut v: Vec<(u64, &Rational)> = m.iter().filter(|(k, _)| *k != b).map(|(k, p)| (*k, p)).collect();
                v.sort_by_key(|(k, _)| *k);
                v
            })
            .collect();
        let zero = Rational::zero();
        for i in 0..self.items {
            for j in i + 1..self.items {
                for &(vi, pi) in &off_values[i] {
                    for &(vj, pj) in &off_values[j] {
                        let observed = joint.get(&(i, vi, j, vj)).unwrap_or(&zero);
                        if *observed != pi * pj {
                            return Err(Error::InvalidDistribution(format!(
                                "Pr[W_{i} = {}, W_{j} = {}] = {observed}, product of marginals {}",
                                f64::from_bits(vi),
                                f64::from_bits(vj),
                                pi * pj
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `E[max_i W_i]`.
    pub fn expected_max(&self) -> f64 {
        self.outcomes.iter().map(|(v, p)| rational::to_f64(p) * v.iter().map(|(_, w)| *w).fold(0.0, f64::max)).sum()
    }

    /// Expected value of the policy that takes an arriving nonzero item `i` with probability `q[i]`, in index order.
    pub fn threshold_value(&self, q: &[f64]) -> f64 {
        self.outcomes
            .iter()
            .map(|(values, p)| {
                let mut sorted = values.clone();
                sorted.sort_by_key(|(i, _)| *i);
                let mut still_open = 1.0;
                let mut gained = 0.0;
                for (i, w) in sorted.into_iter().filter(|(_, w)| *w > 0.0) {
                    gained += still_open * q[i] * w;
                    still_open *= 1.0 - q[i];
                }
                rational::to_f64(p) * gained
            })
            .sum()
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let u: f64 = rng.gen::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        let k = self.cumulative.partition_point(|&c| c <= u).min(self.outcomes.len() - 1);
        self.dense(k)
    }
}

/// Threshold at the largest sampled value; take the first positive stream value at least as large.
pub fn single_sample_select(sample: &[f64], stream: &[f64]) -> Option<usize> {
    let threshold = sample.iter().copied().fold(0.0, f64::max);
    stream.iter().position(|&v| v > 0.0 && v >= threshold)
}

/// Performance of the single-sample rule: expected value collected against `E[max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleRatio {
    pub alg: f64,
    pub opt: f64,
    /// Standard error of `alg / opt`; zero when enumerated.
    pub sigma: f64,
}

impl SampleRatio {
    pub fn ratio(&self) -> f64 {
        self.alg / self.opt
    }
}

/// The guarantee of the single-sample rule on any pairwise-independent instance.
pub fn single_sample_guarantee() -> f64 {
    3.0 - 5f64.sqrt() - 2f64.ln()
}

/// Enumerates every (sample, stream) pair of outcomes.
pub fn single_sample_exact(instance: &ValueInstance) -> SampleRatio {
    let dense: Vec<(Vec<f64>, f64)> =
        (0..instance.outcomes.len()).map(|k| (instance.dense(k), rational::to_f64(&instance.outcomes[k].1))).collect();
    let mut alg = 0.0;
    for (sample, ps) in &dense {
        for (stream, pr) in &dense {
            if let Some(i) = single_sample_select(sample, stream) {
                alg += ps * pr * stream[i];
            }
        }
    }
    SampleRatio { alg, opt: instance.expected_max(), sigma: 0.0 }
}

pub fn single_sample_mc(instance: &ValueInstance, mc: McConfig) -> SampleRatio {
    let parts = mc::chunked(mc.seed, mc.trials, |rng, len| {
        let mut m = Moments::default();
        for _ in 0..len {
            let sample = instance.sample(rng);
            let stream = instance.sample(rng);
            m.push(single_sample_select(&sample, &stream).map_or(0.0, |i| stream[i]));
        }
        m
    });
    let mut total = Moments::default();
    for part in &parts {
        total.merge(part);
    }
    let opt = instance.expected_max();
    SampleRatio { alg: total.mean(), opt, sigma: total.sigma() / opt }
}

/// Three pairwise-independent value instances used to exercise the single-sample rule.
pub fn single_sample_fixtures() -> Result<Vec<(&'static str, ValueInstance)>> {
    use crate::dist::{pair_singleton_dist, parity_dist};
    let pairs = pair_singleton_dist(8)?;
    let pair_weights: Vec<f64> = (0..8).map(|i| (i + 1) as f64).collect();
    let parity = parity_dist(&(1..=7).collect::<Vec<u64>>(), 3)?;
    let parity_weights: Vec<f64> = (0..7).map(|i| 2f64.powi(i)).collect();
    let hard = super::MultiThresholdInstance::optimal(10)?.outcomes()?;
    Ok(vec![
        ("pair-singleton-8", ValueInstance::from_weights(&pairs, &pair_weights)?),
        ("parity-7", ValueInstance::from_weights(&parity, &parity_weights)?),
        ("multi-threshold-10", hard),
    ])
}
