//! Greedy OCRS families and the schemes that produce them.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::RngCore;

use crate::bits;
use crate::dist::{ExplicitDist, SubsetDistribution};
use crate::error::{Error, Result};
use crate::mc::{self, Estimate, McConfig, Proportion};
use crate::matroid::{CapacitySet, LaminarFamily};
use crate::rational::Rational;

/// Largest active set for which [`brute_force_extends`] enumerates subsets.
pub const BRUTE_FORCE_ACTIVE_LIMIT: usize = 20;

/// A down-closed family `F` used by a greedy OCRS: an arriving active element is accepted
/// iff the current selection plus it stays in `F`.
pub trait GreedyFamily: Send + Sync + fmt::Debug {
    fn ground_size(&self) -> usize;

    /// Membership of a duplicate-free set.
    fn contains(&self, set: &[usize]) -> bool;

    /// Whether the greedy rule accepts `item` when `selected` (a member) is already chosen.
    fn accepts(&self, selected: &[usize], item: usize) -> bool {
        let mut with = selected.to_vec();
        with.push(item);
        self.contains(&with)
    }

    /// Exact certificate for `I ∪ {item} ∈ F` for every `I ⊆ active ∖ {item}` with `I ∈ F`.
    /// `active` is sorted and need not contain `item`.
    fn always_extends(&self, active: &[usize], item: usize) -> bool;

    /// [`Self::always_extends`] for every element of `active`.
    fn extending(&self, active: &[usize]) -> Vec<bool> {
        active.iter().map(|&i| self.always_extends(active, i)).collect()
    }

    /// The greedy selection over `arrivals` in order.
    fn select(&self, arrivals: &[usize]) -> Vec<usize> {
        let mut selected = Vec::new();
        for &item in arrivals {
            if self.accepts(&selected, item) {
                selected.push(item);
            }
        }
        selected
    }
}

/// Subset enumeration semantics of [`GreedyFamily::always_extends`].
pub fn brute_force_extends(family: &dyn GreedyFamily, active: &[usize], item: usize) -> Result<bool> {
    let others: Vec<usize> = active.iter().copied().filter(|&e| e != item).collect();
    if others.len() > BRUTE_FORCE_ACTIVE_LIMIT {
        return Err(Error::TooLarge { what: "active set for brute force", size: others.len(), limit: BRUTE_FORCE_ACTIVE_LIMIT });
    }
    for mask in 0u32..(1 << others.len()) {
        let subset: Vec<usize> = bits::iter(mask as u64).map(|k| others[k]).collect();
        if family.contains(&subset) {
            let mut with = subset;
            with.push(item);
            if !family.contains(&with) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Runs the greedy rule over `arrivals` (active elements in arrival order).
pub fn run_greedy(family: &dyn GreedyFamily, arrivals: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut selected = Vec::new();
    for item in arrivals {
        if family.accepts(&selected, item) {
            selected.push(item);
        }
    }
    selected
}

/// Exact `Pr[I ∪ {i} ∈ F for all I ⊆ R with I ∈ F | i ∈ R]` per item, averaged over the
/// scheme's realizations; `None` where `x_i = 0`.
pub fn exact_selectability(scheme: &dyn Scheme, d: &ExplicitDist) -> Result<Vec<Option<Rational>>> {
    if scheme.ground_size() != d.ground_size() {
        return Err(Error::InvalidParameter(format!(
            "scheme has {} elements, distribution {}",
            scheme.ground_size(),
            d.ground_size()
        )));
    }
    let mut total = vec![Rational::zero(); d.ground_size()];
    for (family, weight) in scheme.realizations()? {
        let mass = d.credited_mass(|mask| {
            let active = bits::elements(mask);
            let ok = family.extending(&active);
            active.iter().zip(ok).filter(|(_, ok)| *ok).fold(0u64, |acc, (&e, _)| acc | 1 << e)
        });
        for (t, m) in total.iter_mut().zip(mass) {
            *t += m * &weight;
        }
    }
    Ok(total.into_iter().zip(d.marginals()).map(|(t, x)| (!x.is_zero()).then(|| t / x)).collect())
}

/// Monte Carlo version of [`exact_selectability`]; every trial redraws the scheme's
/// prepare-time randomness and the active set.
pub fn sampled_selectability(scheme: &dyn Scheme, d: &SubsetDistribution, mc: McConfig) -> Vec<Option<Estimate>> {
    let n = d.ground_size();
    let counts = mc::counts(mc.seed, mc.trials, 2 * n, |rng, acc| {
        let family = scheme.realize(rng);
        let active = d.sample(rng);
        for (&i, ok) in active.iter().zip(family.extending(&active)) {
            acc[i] += 1;
            acc[n + i] += u64::from(ok);
        }
    });
    (0..n).map(|i| (counts[i] > 0).then(|| Estimate::sampled(Proportion::new(counts[n + i], counts[i])))).collect()
}

/// A possibly randomized preparation step producing a [`GreedyFamily`].
pub trait Scheme: Send + Sync + fmt::Debug {
    fn ground_size(&self) -> usize;

    /// Draws the prepare-time randomness (sampled sets, labels, drop coins).
    fn realize(&self, rng: &mut dyn RngCore) -> Arc<dyn GreedyFamily>;

    /// Every realization with its exact probability.
    fn realizations(&self) -> Result<Vec<(Arc<dyn GreedyFamily>, Rational)>>;
}

/// A scheme without prepare-time randomness.
#[derive(Clone, Debug)]
pub struct Deterministic(pub Arc<dyn GreedyFamily>);

impl Deterministic {
    pub fn new(family: impl GreedyFamily + 'static) -> Self {
        Self(Arc::new(family))
    }
}

impl Scheme for Deterministic {
    fn ground_size(&self) -> usize {
        self.0.ground_size()
    }

    fn realize(&self, _rng: &mut dyn RngCore) -> Arc<dyn GreedyFamily> {
        Arc::clone(&self.0)
    }

    fn realizations(&self) -> Result<Vec<(Arc<dyn GreedyFamily>, Rational)>> {
        Ok(vec![(Arc::clone(&self.0), Rational::one())])
    }
}

/// `F = 2^E`.
#[derive(Clone, Debug)]
pub struct FreeFamily(pub usize);

impl GreedyFamily for FreeFamily {
    fn ground_size(&self) -> usize {
        self.0
    }

    fn contains(&self, _set: &[usize]) -> bool {
        true
    }

    fn always_extends(&self, _active: &[usize], _item: usize) -> bool {
        true
    }
}

/// `F = 2^S` for a fixed set `S`.
#[derive(Clone, Debug)]
pub struct SubsetFamily {
    inside: Vec<bool>,
}

impl SubsetFamily {
    pub fn new(n: usize, members: &[usize]) -> Self {
        let mut inside = vec![false; n];
        for &e in members {
            inside[e] = true;
        }
        Self { inside }
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.inside.len()).filter(|&e| self.inside[e]).collect()
    }
}

impl GreedyFamily for SubsetFamily {
    fn ground_size(&self) -> usize {
        self.inside.len()
    }

    fn contains(&self, set: &[usize]) -> bool {
        set.iter().all(|&e| self.inside[e])
    }

    fn always_extends(&self, _active: &[usize], item: usize) -> bool {
        self.inside[item]
    }
}

/// `F = {I : |I ∩ P| ≤ cap(P) for every constraint P}`.
#[derive(Clone, Debug)]
pub struct CapacityFamily {
    n: usize,
    constraints: Vec<CapacitySet>,
    containing: Vec<Vec<usize>>,
    laminar: Option<LaminarFamily>,
    partition: bool,
}

impl CapacityFamily {
    pub fn new(n: usize, constraints: Vec<CapacitySet>) -> Result<Self> {
        let mut containing = vec![Vec::new(); n];
        for (idx, c) in constraints.iter().enumerate() {
            for &e in &c.members {
                if e >= n {
                    return Err(Error::ElementOutOfRange { id: e, n });
                }
                containing[e].push(idx);
            }
        }
        let laminar = LaminarFamily::new(n, constraints.clone()).ok();
        let partition = containing.iter().all(|c| c.len() <= 1);
        Ok(Self { n, constraints, containing, laminar, partition })
    }

    /// `|I| ≤ k`.
    pub fn uniform(n: usize, k: usize) -> Self {
        Self::new(n, vec![CapacitySet { members: (0..n).collect(), cap: k }]).expect("ids are in range")
    }

    pub fn constraints(&self) -> &[CapacitySet] {
        &self.constraints
    }

    /// Largest `|I ∩ P_c|` over members `I ⊆ pool`.
    fn max_overlap(&self, pool: &[usize], constraint: usize) -> usize {
        let inside: Vec<usize> =
            pool.iter().copied().filter(|&e| self.containing[e].contains(&constraint)).collect();
        if let Some(lam) = &self.laminar {
            return lam.rank(inside);
        }
        let cap = self.constraints[constraint].cap;
        let mut used = vec![0usize; self.constraints.len()];
        self.deepest(&inside, 0, &mut used, cap)
    }

    /// Depth-first search for the largest member inside `pool[from..]`, stopping once `goal` is reached.
    fn deepest(&self, pool: &[usize], from: usize, used: &mut [usize], goal: usize) -> usize {
        if goal == 0 || from == pool.len() || pool.len() - from < goal {
            return 0;
        }
        let e = pool[from];
        let mut best = 0;
        if self.containing[e].iter().all(|&c| used[c] < self.constraints[c].cap) {
            for &c in &self.containing[e] {
                used[c] += 1;
            }
            best = 1 + self.deepest(pool, from + 1, used, goal - 1);
            for &c in &self.containing[e] {
                used[c] -= 1;
            }
        }
        if best < goal {
            best = best.max(self.deepest(pool, from + 1, used, goal));
        }
        best
    }
}

impl GreedyFamily for CapacityFamily {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn contains(&self, set: &[usize]) -> bool {
        let mut used = vec![0usize; self.constraints.len()];
        for &e in set {
            for &c in &self.containing[e] {
                used[c] += 1;
                if used[c] > self.constraints[c].cap {
                    return false;
                }
            }
        }
        true
    }

    fn always_extends(&self, active: &[usize], item: usize) -> bool {
        let constraints = &self.containing[item];
        if constraints.iter().any(|&c| self.constraints[c].cap == 0) {
            return false;
        }
        let others: Vec<usize> = active.iter().copied().filter(|&e| e != item).collect();
        constraints.iter().all(|&c| {
            let cap = self.constraints[c].cap;
            // quick headroom check before the exact search
            let reachable = others.iter().filter(|&&e| self.containing[e].contains(&c)).count();
            reachable < cap || self.max_overlap(&others, c) < cap
        })
    }

    fn select(&self, arrivals: &[usize]) -> Vec<usize> {
        let mut load = vec![0usize; self.constraints.len()];
        let mut selected = Vec::new();
        for &e in arrivals {
            if self.containing[e].iter().all(|&c| load[c] < self.constraints[c].cap) {
                for &c in &self.containing[e] {
                    load[c] += 1;
                }
                selected.push(e);
            }
        }
        selected
    }

    fn extending(&self, active: &[usize]) -> Vec<bool> {
        if !self.partition {
            return active.iter().map(|&i| self.always_extends(active, i)).collect();
        }
        let mut load = vec![0usize; self.constraints.len()];
        for &e in active {
            for &c in &self.containing[e] {
                load[c] += 1;
            }
        }
        active.iter().map(|&i| self.containing[i].iter().all(|&c| load[c] <= self.constraints[c].cap)).collect()
    }
}

/// Largest ground set whose drop coins [`ScaleWrapper::realizations`] enumerates.
pub const COIN_LIMIT: usize = 16;

/// Independently drops each arriving element with probability `1 − b` before consulting the
/// inner family; a `(b, c)`-selectable inner scheme prepared on the subsampled distribution
/// yields a `bc`-selectable scheme.
#[derive(Clone, Debug)]
pub struct ScaleWrapper {
    pub inner: Arc<dyn Scheme>,
    pub keep: Rational,
}

/// The family `{I ⊆ kept : I ∈ F}`.
#[derive(Clone, Debug)]
pub struct ScaledFamily {
    kept: Vec<bool>,
    inner: Arc<dyn GreedyFamily>,
}

impl ScaledFamily {
    pub fn new(kept: Vec<bool>, inner: Arc<dyn GreedyFamily>) -> Self {
        Self { kept, inner }
    }
}

impl GreedyFamily for ScaledFamily {
    fn ground_size(&self) -> usize {
        self.kept.len()
    }

    fn contains(&self, set: &[usize]) -> bool {
        set.iter().all(|&e| self.kept[e]) && self.inner.contains(set)
    }

    fn accepts(&self, selected: &[usize], item: usize) -> bool {
        self.kept[item] && self.inner.accepts(selected, item)
    }

    fn always_extends(&self, active: &[usize], item: usize) -> bool {
        if !self.kept[item] {
            return false;
        }
        let surviving: Vec<usize> = active.iter().copied().filter(|&e| self.kept[e]).collect();
        self.inner.always_extends(&surviving, item)
    }

    fn select(&self, arrivals: &[usize]) -> Vec<usize> {
        let surviving: Vec<usize> = arrivals.iter().copied().filter(|&e| self.kept[e]).collect();
        self.inner.select(&surviving)
    }

    fn extending(&self, active: &[usize]) -> Vec<bool> {
        let surviving: Vec<usize> = active.iter().copied().filter(|&e| self.kept[e]).collect();
        let mut inner = self.inner.extending(&surviving).into_iter();
        active.iter().map(|&e| self.kept[e] && inner.next().unwrap_or(false)).collect()
    }
}

impl ScaleWrapper {
    pub fn new(inner: Arc<dyn Scheme>, keep: Rational) -> Result<Self> {
        if !crate::rational::is_probability(&keep) {
            return Err(Error::InvalidParameter(format!("keep probability {keep} is not in [0, 1]")));
        }
        Ok(Self { inner, keep })
    }
}

impl Scheme for ScaleWrapper {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn realize(&self, rng: &mut dyn RngCore) -> Arc<dyn GreedyFamily> {
        use rand::Rng;
        let p = crate::rational::to_f64(&self.keep);
        let kept = (0..self.ground_size()).map(|_| rng.gen::<f64>() < p).collect();
        Arc::new(ScaledFamily::new(kept, self.inner.realize(rng)))
    }

    fn realizations(&self) -> Result<Vec<(Arc<dyn GreedyFamily>, Rational)>> {
        let n = self.ground_size();
        if self.keep.is_one() {
            return self.inner.realizations();
        }
        if n > COIN_LIMIT {
            return Err(Error::TooLarge { what: "drop-coin enumeration", size: n, limit: COIN_LIMIT });
        }
        let inner = self.inner.realizations()?;
        let drop = Rational::one() - &self.keep;
        let mut out = Vec::new();
        for coins in 0u64..(1 << n) {
            let kept: Vec<bool> = (0..n).map(|e| coins >> e & 1 == 1).collect();
            let weight = crate::rational::pow(&self.keep, coins.count_ones() as usize)
                * crate::rational::pow(&drop, n - coins.count_ones() as usize);
            if weight.is_zero() {
                continue;
            }
            for (family, w) in &inner {
                let scaled: Arc<dyn GreedyFamily> = Arc::new(ScaledFamily::new(kept.clone(), Arc::clone(family)));
                out.push((scaled, w * &weight));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_all_actives(family: &dyn GreedyFamily) {
        let n = family.ground_size();
        for mask in 0u64..(1 << n) {
            let active = crate::bits::elements(mask);
            let batch = family.extending(&active);
            for (&i, ok) in active.iter().zip(batch) {
                assert_eq!(ok, family.always_extends(&active, i));
            }
            for item in 0..n {
                assert_eq!(
                    family.always_extends(&active, item),
                    brute_force_extends(family, &active, item).unwrap(),
                    "{family:?} active {active:?} item {item}"
                );
            }
        }
    }

    #[test]
    fn simple_families_match_brute_force() {
        check_all_actives(&FreeFamily(4));
        check_all_actives(&SubsetFamily::new(5, &[0, 3]));
        check_all_actives(&CapacityFamily::uniform(6, 2));
        check_all_actives(&CapacityFamily::uniform(3, 0));
    }

    #[test]
    fn crossing_constraints_use_search() {
        let sets = vec![
            CapacitySet { members: vec![0, 1, 2, 3], cap: 2 },
            CapacitySet { members: vec![2, 3, 4, 5], cap: 1 },
            CapacitySet { members: vec![0, 5, 6], cap: 2 },
        ];
        let fam = CapacityFamily::new(7, sets).unwrap();
        assert!(fam.laminar.is_none());
        check_all_actives(&fam);
    }

    #[test]
    fn greedy_run_respects_capacity() {
        let fam = CapacityFamily::uniform(5, 2);
        assert_eq!(run_greedy(&fam, [4, 1, 3, 0]), vec![4, 1]);
    }

    proptest! {
        #[test]
        fn random_capacity_families_match(
            sets in proptest::collection::vec((1u64..256, 0usize..4), 1..4)
        ) {
            let constraints = sets
                .into_iter()
                .map(|(m, cap)| CapacitySet { members: crate::bits::elements(m), cap })
                .collect();
            let fam = CapacityFamily::new(8, constraints).unwrap();
            for mask in (0u64..256).step_by(7) {
                let active = crate::bits::elements(mask);
                for item in 0..8 {
                    prop_assert_eq!(fam.always_extends(&active, item), brute_force_extends(&fam, &active, item).unwrap());
                }
                let reversed: Vec<usize> = active.iter().rev().copied().collect();
                prop_assert_eq!(fam.select(&reversed), run_greedy(&fam, reversed.iter().copied()));
            }
        }
    }
}
