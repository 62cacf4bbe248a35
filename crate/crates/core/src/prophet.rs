//! Selectability measurement, arrival-order search, scaling and the reduction from a
//! pairwise-independent matroid prophet game to a greedy OCRS.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits;
use crate::dist::{thin, ExplicitDist, SubsetDistribution};
use crate::error::{Error, Result};
use crate::matroid::{polytope_violation, Matroid};
use crate::mc::{self, Estimate, McConfig, RatioMoments};
use crate::ocrs::{exact_selectability, sampled_selectability, ScaleWrapper, Scheme};
use crate::rational::{self, Rational};
use crate::single::sqrt2_policy;

/// Largest ground set for exhaustive arrival-order search.
pub const ORDER_SEARCH_LIMIT: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Enumerate the support of an explicit distribution and every realization of the scheme.
    Exact,
    Sampled(McConfig),
}

/// Per-item `Pr[I ∪ {i} ∈ F for all I ⊆ R with I ∈ F | i ∈ R]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectabilityReport {
    /// `None` for items with zero marginal, where the conditional is undefined.
    pub items: Vec<Option<Estimate>>,
    pub min_item: Option<usize>,
    pub exact: bool,
}

impl SelectabilityReport {
    fn new(items: Vec<Option<Estimate>>, exact: bool) -> Self {
        let min_item = (0..items.len())
            .filter(|&i| items[i].is_some())
            .min_by(|&a, &b| {
                let (ea, eb) = (items[a].as_ref().expect("filtered"), items[b].as_ref().expect("filtered"));
                match (&ea.exact, &eb.exact) {
                    (Some(x), Some(y)) => x.cmp(y),
                    _ => ea.value.total_cmp(&eb.value),
                }
            });
        Self { items, min_item, exact }
    }

    pub fn min(&self) -> Option<&Estimate> {
        self.min_item.map(|i| self.items[i].as_ref().expect("min item is defined"))
    }

    /// The smallest estimate minus its 99% half-width (the estimate itself when exact).
    pub fn lower_bound(&self) -> f64 {
        self.items.iter().flatten().map(|e| e.value - e.ci99()).fold(f64::INFINITY, f64::min)
    }
}

/// A scheme with its declared `(b, c)` guarantee: `c`-selectable for inputs in `b·P`.
#[derive(Clone, Debug)]
pub struct PreparedScheme {
    pub scheme: Arc<dyn Scheme>,
    pub b: Rational,
    pub c: f64,
}

impl PreparedScheme {
    pub fn new(scheme: Arc<dyn Scheme>, b: Rational, c: f64) -> Self {
        Self { scheme, b, c }
    }
}

pub fn selectability(s: &PreparedScheme, d: &SubsetDistribution, mode: Mode) -> Result<SelectabilityReport> {
    match mode {
        Mode::Exact => {
            let explicit = d
                .as_explicit()
                .ok_or_else(|| Error::InvalidParameter("exact selectability needs an explicit distribution".into()))?;
            let items = exact_selectability(s.scheme.as_ref(), explicit)?;
            Ok(SelectabilityReport::new(items.into_iter().map(|v| v.map(Estimate::exact)).collect(), true))
        }
        Mode::Sampled(mc) => Ok(SelectabilityReport::new(sampled_selectability(s.scheme.as_ref(), d, mc), false)),
    }
}

/// Drops each arriving element with probability `1 − b` before the inner scheme, which must have
/// been prepared on the subsampled distribution; the composite is `(1, bc)`.
pub fn scale_wrapper(s: &PreparedScheme, b: &Rational) -> Result<PreparedScheme> {
    if b.is_one() {
        return Ok(PreparedScheme::new(Arc::clone(&s.scheme), Rational::one(), s.c));
    }
    let wrapped = ScaleWrapper::new(Arc::clone(&s.scheme), b.clone())?;
    Ok(PreparedScheme::new(Arc::new(wrapped), Rational::one(), rational::to_f64(b) * s.c))
}

/// An online rule run under an arrival order fixed before the randomness is drawn.
#[derive(Clone, Copy, Debug)]
pub enum OrderedRule<'a> {
    Greedy(&'a dyn Scheme),
    /// The √2 threshold policy with acceptance probabilities computed along the order.
    Sqrt2,
}

/// `Pr[i selected | i ∈ R]` for every item under the arrival order `order`.
pub fn order_balancedness(rule: OrderedRule<'_>, d: &ExplicitDist, order: &[usize]) -> Result<Vec<Option<f64>>> {
    let n = d.ground_size();
    let mut position = vec![usize::MAX; n];
    for (k, &e) in order.iter().enumerate() {
        position[e] = k;
    }
    if order.len() != n || position.contains(&usize::MAX) {
        return Err(Error::InvalidParameter(format!("arrival order {order:?} is not a permutation of 0..{n}")));
    }
    let x = d.marginals();
    let selected: Vec<f64> = match rule {
        OrderedRule::Greedy(scheme) => {
            let mut total = vec![Rational::zero(); n];
            for (family, weight) in scheme.realizations()? {
                let mass = d.credited_mass(|mask| {
                    let mut arrivals = bits::elements(mask);
                    arrivals.sort_by_key(|&e| position[e]);
                    bits::mask_of(&family.select(&arrivals))
                });
                for (t, m) in total.iter_mut().zip(mass) {
                    *t += m * &weight;
                }
            }
            total.iter().map(rational::to_f64).collect()
        }
        OrderedRule::Sqrt2 => {
            let ordered_x: Vec<f64> = order.iter().map(|&e| rational::to_f64(&x[e])).collect();
            let policy = sqrt2_policy(&ordered_x)?;
            let mut q = vec![0.0; n];
            for (k, &e) in order.iter().enumerate() {
                q[e] = policy.q[k];
            }
            let mut total = vec![0.0; n];
            for (mask, p) in d.support() {
                let mut arrivals = bits::elements(*mask);
                arrivals.sort_by_key(|&e| position[e]);
                let mut open = rational::to_f64(p);
                for e in arrivals {
                    total[e] += open * q[e];
                    open *= 1.0 - q[e];
                }
            }
            total
        }
    };
    Ok(selected.into_iter().zip(&x).map(|(s, xi)| (!xi.is_zero()).then(|| s / rational::to_f64(xi))).collect())
}

/// The arrival order chosen by an offline adversary, with the balancedness it leaves.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderReport {
    pub order: Vec<usize>,
    pub items: Vec<Option<f64>>,
    pub min: f64,
    /// False when the search used random restarts instead of every permutation.
    pub exhaustive: bool,
}

/// Minimises the smallest per-item balancedness over arrival orders: every permutation for
/// `n ≤ ORDER_SEARCH_LIMIT`, otherwise `restarts.trials` random permutations.
pub fn worst_order_balancedness(rule: OrderedRule<'_>, d: &ExplicitDist, restarts: McConfig) -> Result<OrderReport> {
    let n = d.ground_size();
    let exhaustive = n <= ORDER_SEARCH_LIMIT;
    let orders: Vec<Vec<usize>> = if exhaustive {
        permutations(n)
    } else {
        let mut rng = mc::rng(restarts.seed, 0);
        (0..restarts.trials.max(1))
            .map(|_| {
                let mut o: Vec<usize> = (0..n).collect();
                o.shuffle(&mut rng);
                o
            })
            .collect()
    };
    let mut best: Option<OrderReport> = None;
    for order in orders {
        let items = order_balancedness(rule, d, &order)?;
        let min = items.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        if best.as_ref().is_none_or(|b| min < b.min) {
            best = Some(OrderReport { order, items, min, exhaustive });
        }
    }
    Ok(best.expect("at least one order"))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut current, &mut out);
    out
}

fn heap_permute(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k - 1 {
        heap_permute(k - 1, a, out);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
    heap_permute(k - 1, a, out);
}

/// The constraint of a prophet game.
#[derive(Clone, Debug)]
pub enum Feasibility {
    /// At most `k` items.
    Uniform(usize),
    Matroid(Arc<Matroid>),
}

impl Feasibility {
    /// The max-weight independent subset of `active`, given sorted by decreasing weight then id.
    fn max_weight_set(&self, active: &[usize]) -> Vec<usize> {
        match self {
            Feasibility::Uniform(k) => active.iter().copied().take(*k).collect(),
            Feasibility::Matroid(m) => {
                let mut chosen = Vec::new();
                for &e in active {
                    chosen.push(e);
                    if m.rank_unchecked(&chosen) < chosen.len() {
                        chosen.pop();
                    }
                }
                chosen
            }
        }
    }
}

/// Item values `W_i = w_i · 1[i ∈ R]` for `R ∼ d`, under a matroid constraint.
#[derive(Clone, Debug)]
pub struct ValueModel {
    pub d: SubsetDistribution,
    pub weights: Vec<f64>,
    pub feasibility: Feasibility,
}

impl ValueModel {
    pub fn new(d: SubsetDistribution, weights: Vec<f64>, feasibility: Feasibility) -> Result<Self> {
        if weights.len() != d.ground_size() {
            return Err(Error::InvalidParameter(format!("{} weights for {} items", weights.len(), d.ground_size())));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParameter(format!("weight w_{i} = {} must be positive", weights[i])));
        }
        if let Feasibility::Matroid(m) = &feasibility {
            if m.elements() != (0..weights.len()).collect::<Vec<_>>() {
                return Err(Error::InvalidParameter("matroid elements must be 0..n".into()));
            }
        }
        Ok(Self { d, weights, feasibility })
    }

    /// Active items sorted by decreasing weight, ties by id.
    fn by_weight(&self, mut active: Vec<usize>) -> Vec<usize> {
        active.sort_by(|&a, &b| self.weights[b].total_cmp(&self.weights[a]).then(a.cmp(&b)));
        active
    }

    fn opt_set(&self, active: Vec<usize>) -> Vec<usize> {
        self.feasibility.max_weight_set(&self.by_weight(active))
    }

    fn weight(&self, set: &[usize]) -> f64 {
        set.iter().map(|&i| self.weights[i]).sum()
    }
}

/// `p_i = Pr[i ∈ I_max]` and the thresholds `τ_i = w_i`, passed with probability `keep_i = p_i / x_i`
/// when `W_i = w_i`, so that `Pr[W_i ≥ τ_i] = p_i` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Thresholds {
    pub p: Vec<Rational>,
    pub tau: Vec<f64>,
    pub keep: Vec<Rational>,
    /// `E[max_{I ∈ I} Σ_{i ∈ I} W_i]`.
    pub opt: f64,
    pub exact: bool,
}

impl Thresholds {
    /// The distribution of `{i : W_i ≥ τ_i}`.
    pub fn passing(&self, v: &ValueModel) -> Result<SubsetDistribution> {
        thin(&v.d, &self.keep)
    }

    /// `Σ_i p_i E[W_i | W_i ≥ τ_i]`.
    pub fn membership_value(&self, v: &ValueModel) -> f64 {
        self.p.iter().zip(&v.weights).map(|(p, w)| rational::to_f64(p) * w).sum()
    }
}

fn keep_ratios(p: &[Rational], x: &[Rational]) -> Vec<Rational> {
    p.iter().zip(x).map(|(p, x)| if x.is_zero() { Rational::zero() } else { (p / x).min(Rational::one()) }).collect()
}

/// Exact thresholds for an explicit value model; checks `p ∈ P_M` and `OPT ≤ Σ p_i E[W_i | W_i ≥ τ_i]`.
pub fn opt_membership_thresholds(v: &ValueModel) -> Result<Thresholds> {
    let d = v
        .d
        .as_explicit()
        .ok_or_else(|| Error::InvalidParameter("exact thresholds need an explicit distribution".into()))?;
    let mut opt = 0.0;
    let p = d.credited_mass(|mask| bits::mask_of(&v.opt_set(bits::elements(mask))));
    for (mask, prob) in d.support() {
        opt += rational::to_f64(prob) * v.weight(&v.opt_set(bits::elements(*mask)));
    }
    check_membership(v, &p)?;
    let thresholds = Thresholds { keep: keep_ratios(&p, &d.marginals()), p, tau: v.weights.clone(), opt, exact: true };
    let bound = thresholds.membership_value(v);
    if opt > bound * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("OPT = {opt} exceeds Σ p_i E[W_i | W_i ≥ τ_i] = {bound}")));
    }
    Ok(thresholds)
}

fn check_membership(v: &ValueModel, p: &[Rational]) -> Result<()> {
    match &v.feasibility {
        Feasibility::Uniform(k) => {
            let total: Rational = p.iter().sum();
            if total > Rational::from_integer((*k).into()) || p.iter().any(|pi| *pi > Rational::one()) {
                return Err(Error::OutsidePolytope { subset: (0..p.len()).collect() });
            }
        }
        Feasibility::Matroid(m) => {
            if let Some(subset) = polytope_violation(m, p, &Rational::one())? {
                return Err(Error::OutsidePolytope { subset });
            }
        }
    }
    Ok(())
}

/// Monte Carlo thresholds for models too large to enumerate: `p_i` is the empirical frequency of
/// `i ∈ I_max` over `mc.trials` draws.
pub fn sampled_membership_thresholds(v: &ValueModel, mc: McConfig) -> Result<Thresholds> {
    let n = v.weights.len();
    let counts = mc::counts(mc.seed, mc.trials, n + 1, |rng, acc| {
        let chosen = v.opt_set(v.d.sample(rng));
        for &i in &chosen {
            acc[i] += 1;
        }
        // total weight in units of 2^-20, enough for the reported mean
        acc[n] += (v.weight(&chosen) * 1_048_576.0).round() as u64;
    });
    let p: Vec<Rational> = counts[..n].iter().map(|&c| Rational::new(c.into(), mc.trials.into())).collect();
    check_membership(v, &p)?;
    let opt = counts[n] as f64 / 1_048_576.0 / mc.trials as f64;
    Ok(Thresholds { keep: keep_ratios(&p, &v.d.marginals()), p, tau: v.weights.clone(), opt, exact: false })
}

/// Order in which passing items reach the scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArrivalOrder {
    ById,
    /// Lightest first, the natural adversary for capacity-style families.
    IncreasingWeight,
}

/// Competitive ratio of the reduction against the prophet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProphetReport {
    pub alg: f64,
    pub opt: f64,
    pub ratio: f64,
    /// Standard error of `ratio`.
    pub sigma: f64,
}

/// Each trial draws `R`, keeps `i ∈ R` with probability `keep_i`, feeds the survivors to a fresh
/// realization of the scheme in the given order, and compares the selected weight with the
/// prophet's `max_{I ∈ I} W(I)` on the same draw.
pub fn prophet_simulate(s: &PreparedScheme, v: &ValueModel, th: &Thresholds, order: ArrivalOrder, mc: McConfig) -> Result<ProphetReport> {
    let n = v.weights.len();
    if s.scheme.ground_size() != n || th.keep.len() != n {
        return Err(Error::InvalidParameter("scheme, thresholds and value model sizes differ".into()));
    }
    let keep: Vec<f64> = th.keep.iter().map(rational::to_f64).collect();
    let parts = mc::chunked(mc.seed, mc.trials, |rng, len| {
        let mut acc = RatioMoments::default();
        for _ in 0..len {
            let family = s.scheme.realize(rng);
            let active = v.d.sample(rng);
            let mut passing: Vec<usize> = active.iter().copied().filter(|&i| rng.gen::<f64>() < keep[i]).collect();
            match order {
                ArrivalOrder::ById => passing.sort_unstable(),
                ArrivalOrder::IncreasingWeight => {
                    passing.sort_by(|&a, &b| v.weights[a].total_cmp(&v.weights[b]).then(a.cmp(&b)))
                }
            }
            let alg = v.weight(&family.select(&passing));
            let opt = v.weight(&v.opt_set(active));
            acc.push(alg, opt);
        }
        acc
    });
    let mut total = RatioMoments::default();
    for part in &parts {
        total.merge(part);
    }
    let n_trials = total.count as f64;
    Ok(ProphetReport { alg: total.sum_a / n_trials, opt: total.sum_b / n_trials, ratio: total.ratio(), sigma: total.sigma() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{product_dist, subsample, Sampler};
    use crate::matroid::Multigraph;
    use crate::ocrs::{CapacityFamily, Deterministic, FreeFamily};
    use crate::rational::{int, rat};
    use crate::structured::graphic_chain_prepare;

    fn free(n: usize) -> PreparedScheme {
        PreparedScheme::new(Arc::new(Deterministic::new(FreeFamily(n))), int(1), 1.0)
    }

    #[test]
    fn free_family_is_always_selectable() {
        let d: SubsetDistribution = product_dist(&[rat(1, 2), rat(1, 3), int(0)]).unwrap().into();
        let report = selectability(&free(3), &d, Mode::Exact).unwrap();
        assert!(report.items[2].is_none());
        assert_eq!(report.min().unwrap().exact, Some(int(1)));
    }

    #[test]
    fn simple_uniform_meets_one_minus_b() {
        // k = 2, b = 1/2: Σx = 1 = bk
        let d: SubsetDistribution = product_dist(&vec![rat(1, 4); 4]).unwrap().into();
        let s = PreparedScheme::new(Arc::new(Deterministic::new(CapacityFamily::uniform(4, 2))), rat(1, 2), 0.5);
        let report = selectability(&s, &d, Mode::Exact).unwrap();
        assert!(report.min().unwrap().exact.clone().unwrap() >= rat(1, 2));
        let sampled = selectability(&s, &d, Mode::Sampled(McConfig::new(3, 100_000))).unwrap();
        let exact = report.min().unwrap().value;
        let est = sampled.min().unwrap();
        assert!((est.value - exact).abs() <= 3.0 * est.sigma + 1e-3);
    }

    #[test]
    fn triangle_fixture_meets_one_minus_two_b() {
        let b = rat(3, 10);
        let d: SubsetDistribution = product_dist(&vec![rat(1, 5); 3]).unwrap().into();
        let (_, family) = graphic_chain_prepare(Multigraph::cycle(3), &d, &b, McConfig::new(1, 1000)).unwrap();
        let s = PreparedScheme::new(Arc::new(Deterministic::new(family)), b, 0.4);
        let report = selectability(&s, &d, Mode::Exact).unwrap();
        assert!(report.min().unwrap().exact.clone().unwrap() >= rat(2, 5));
    }

    #[test]
    fn scale_wrapper_multiplies_selectability() {
        let b = rat(1, 2);
        let d: SubsetDistribution = product_dist(&[rat(1, 2), rat(1, 3), rat(2, 3), rat(1, 4)]).unwrap().into();
        let inner = PreparedScheme::new(Arc::new(Deterministic::new(CapacityFamily::uniform(4, 1))), int(1), 0.0);
        let wrapped = scale_wrapper(&inner, &b).unwrap();
        assert_eq!(wrapped.b, int(1));
        let outer = selectability(&wrapped, &d, Mode::Exact).unwrap();
        let thinned = subsample(&d, &b).unwrap();
        let inside = selectability(&inner, &thinned, Mode::Exact).unwrap();
        for (o, i) in outer.items.iter().zip(&inside.items) {
            assert_eq!(o.as_ref().unwrap().exact.clone().unwrap(), &b * i.as_ref().unwrap().exact.clone().unwrap());
        }
        let identity = scale_wrapper(&inner, &int(1)).unwrap();
        assert!(Arc::ptr_eq(&identity.scheme, &inner.scheme));
    }

    #[test]
    fn greedy_worst_order_is_at_least_selectability() {
        let d = product_dist(&[rat(1, 2), rat(1, 3), rat(1, 4), rat(1, 5)]).unwrap();
        let scheme = Deterministic::new(CapacityFamily::uniform(4, 2));
        let worst = worst_order_balancedness(OrderedRule::Greedy(&scheme), &d, McConfig::new(0, 0)).unwrap();
        assert!(worst.exhaustive);
        let select = exact_selectability(&scheme, &d).unwrap();
        let floor = select.iter().flatten().min().unwrap();
        assert!(worst.min >= rational::to_f64(floor) - 1e-12);
    }

    #[test]
    fn sqrt2_under_every_fixed_order() {
        let d = product_dist(&[rat(1, 5), rat(1, 4), rat(1, 3), rat(1, 6)]).unwrap();
        let worst = worst_order_balancedness(OrderedRule::Sqrt2, &d, McConfig::new(0, 0)).unwrap();
        assert!(worst.min >= std::f64::consts::SQRT_2 - 1.0 - 1e-9);
        let single = product_dist(&[rat(1, 2)]).unwrap();
        let one = order_balancedness(OrderedRule::Sqrt2, &single, &[0]).unwrap();
        assert!((one[0].unwrap() - (std::f64::consts::SQRT_2 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn thresholds_on_small_models() {
        let d: SubsetDistribution = ExplicitDist::point(1, 1).unwrap().into();
        let th = opt_membership_thresholds(&ValueModel::new(d, vec![2.0], Feasibility::Uniform(1)).unwrap()).unwrap();
        assert_eq!(th.p, vec![int(1)]);
        assert_eq!(th.tau, vec![2.0]);

        let d: SubsetDistribution = product_dist(&[rat(1, 2), rat(1, 2)]).unwrap().into();
        let v = ValueModel::new(d, vec![1.0, 10.0], Feasibility::Uniform(1)).unwrap();
        let th = opt_membership_thresholds(&v).unwrap();
        assert_eq!(th.p, vec![rat(1, 4), rat(1, 2)]);
        assert_eq!(th.keep, vec![rat(1, 2), int(1)]);
        assert!((th.opt - th.membership_value(&v)).abs() < 1e-12);
    }

    #[test]
    fn uniform_membership_sums_to_at_most_k() {
        let d: SubsetDistribution = product_dist(&vec![rat(1, 2); 8]).unwrap().into();
        let weights = (1..=8).map(|w| w as f64).collect();
        let v = ValueModel::new(d, weights, Feasibility::Uniform(3)).unwrap();
        let th = opt_membership_thresholds(&v).unwrap();
        assert!(th.p.iter().sum::<Rational>() <= int(3));
        let passing = th.passing(&v).unwrap();
        assert_eq!(passing.marginals(), th.p);
    }

    #[test]
    fn graphic_thresholds_lie_in_the_polytope() {
        let graph = Multigraph::complete(4);
        let m = Arc::new(Matroid::graphic(graph).unwrap());
        let d: SubsetDistribution = product_dist(&vec![rat(1, 2); 6]).unwrap().into();
        let v = ValueModel::new(d, vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0], Feasibility::Matroid(m)).unwrap();
        let th = opt_membership_thresholds(&v).unwrap();
        assert!(th.exact);
        assert!(th.opt <= th.membership_value(&v) * (1.0 + 1e-12));
    }

    #[test]
    fn free_scheme_reaches_the_prophet() {
        let d: SubsetDistribution = product_dist(&[rat(1, 2), rat(1, 3), rat(1, 4)]).unwrap().into();
        let v = ValueModel::new(d, vec![1.0, 2.0, 3.0], Feasibility::Uniform(3)).unwrap();
        let th = opt_membership_thresholds(&v).unwrap();
        let r = prophet_simulate(&free(3), &v, &th, ArrivalOrder::ById, McConfig::new(4, 20_000)).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn graphic_triangle_reduction() {
        let b = rat(3, 10);
        let graph = Multigraph::cycle(3);
        let m = Arc::new(Matroid::graphic(graph.clone()).unwrap());
        let d: SubsetDistribution = product_dist(&vec![rat(1, 5); 3]).unwrap().into();
        let v = ValueModel::new(d, vec![1.0, 2.0, 3.0], Feasibility::Matroid(m)).unwrap();
        let th = opt_membership_thresholds(&v).unwrap();
        let passing = th.passing(&v).unwrap();
        let (_, family) = graphic_chain_prepare(graph, &passing, &b, McConfig::new(1, 1000)).unwrap();
        let s = PreparedScheme::new(Arc::new(Deterministic::new(family)), b, 0.4);
        let r = prophet_simulate(&s, &v, &th, ArrivalOrder::IncreasingWeight, McConfig::new(8, 20_000)).unwrap();
        assert!(r.ratio >= 0.4 - 3.0 * r.sigma);
    }

    #[test]
    fn sampled_thresholds_on_a_parity_model() {
        let n = 64;
        let d: SubsetDistribution = Sampler::parity(vec![rat(1, 2); n]).unwrap().into();
        let weights = (0..n).map(|i| 1.0 + (i % 7) as f64).collect();
        let v = ValueModel::new(d, weights, Feasibility::Uniform(8)).unwrap();
        let th = sampled_membership_thresholds(&v, McConfig::new(2, 4000)).unwrap();
        assert!(!th.exact);
        assert!(th.p.iter().sum::<Rational>() <= int(8));
        assert!((th.opt - th.membership_value(&v)).abs() / th.opt < 1e-9);
    }
}
