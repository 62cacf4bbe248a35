use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use std::ops::AddAssign;

use crate::bits;
use crate::dist::{ExplicitDist, ZVector};
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpOutcome};
use crate::rational::{self, binomial, factorial, Rational};

/// Largest ground set for the subset enumeration in [`rank1_crs_quality`].
pub const QUALITY_LIMIT: usize = 20;
/// Largest ground set for the direct linear program in [`rank1_quality_lp`].
pub const QUALITY_LP_LIMIT: usize = 8;

/// `1 − Σ_{k=0}^{m} (−1)^k / k!`.
pub fn phi_series(m: usize) -> Rational {
    let mut partial = Rational::zero();
    for k in 0..=m {
        let term = Rational::new(BigInt::one(), factorial(k));
        if k % 2 == 0 {
            partial += term;
        } else {
            partial -= term;
        }
    }
    Rational::one() - partial
}

/// The tight single-item CRS quality under t-wise independence, truncated at the even index `2⌊t/2⌋`.
pub fn phi(t: usize) -> Rational {
    phi_series(2 * (t / 2))
}

/// `Σ_{k=1}^{t} (−1)^{k−1} c^k / k!`, a lower bound on the union probability of events with total mass `c`.
pub fn bonferroni_lower(c: &Rational, t: usize) -> Result<Rational> {
    if t % 2 == 1 {
        return Err(Error::InvalidParameter(format!("truncation level t = {t} must be even")));
    }
    if !rational::is_probability(c) {
        return Err(Error::InvalidParameter(format!("total mass {c} is not in [0, 1]")));
    }
    Ok(alternating(t, |k| rational::pow(c, k) / factorial(k)))
}

/// `Σ_{k=1}^{t} (−1)^{k−1} C(n, k) (c/n)^k`: the same truncation for `n` events of mass `c/n` each.
pub fn bonferroni_binomial(c: &Rational, n: usize, t: usize) -> Rational {
    let each = c / BigInt::from(n);
    alternating(t.min(n), |k| rational::pow(&each, k) * binomial(n, k))
}

fn alternating(t: usize, term: impl Fn(usize) -> Rational) -> Rational {
    (1..=t).fold(Rational::zero(), |acc, k| if k % 2 == 1 { acc + term(k) } else { acc - term(k) })
}

/// `Σ_{k=1}^{t} (−1)^{k−1} e_k(x)` with `e_k` the elementary symmetric polynomials.
pub fn truncated_union(x: &[f64], t: usize) -> f64 {
    let mut e = vec![0.0; t + 1];
    e[0] = 1.0;
    for &v in x {
        for k in (1..=t).rev() {
            e[k] += e[k - 1] * v;
        }
    }
    (1..=t).map(|k| if k % 2 == 1 { e[k] } else { -e[k] }).sum()
}

/// The best balancedness of a single-item CRS for a distribution, with the subset attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityReport {
    pub value: Rational,
    pub witness: u64,
}

/// `min over S with x(S) > 0 of Pr[R ∩ S ≠ ∅] / x(S)`, by enumerating all subsets.
pub fn rank1_crs_quality(d: &ExplicitDist) -> Result<QualityReport> {
    let n = d.ground_size();
    if n > QUALITY_LIMIT {
        return Err(Error::TooLarge { what: "ground set for quality enumeration", size: n, limit: QUALITY_LIMIT });
    }
    let den = d.denominator();
    let numerators: Vec<BigInt> = d.support().iter().map(|(_, p)| (p * &den).to_integer()).collect();
    let weights: Vec<BigInt> = d.element_weights();
    if weights.iter().all(Zero::is_zero) {
        return Err(Error::InvalidParameter("every element has zero marginal".into()));
    }
    // avoid[T] = weight of outcomes contained in T
    let avoid: Vec<BigInt> = match (den.to_u128(), numerators.iter().map(ToPrimitive::to_u128).collect::<Option<Vec<_>>>()) {
        (Some(_), Some(small)) => zeta(n, d.support().iter().map(|(m, _)| *m).zip(small)).into_iter().map(BigInt::from).collect(),
        _ => zeta(n, d.support().iter().map(|(m, _)| *m).zip(numerators)),
    };
    let full = bits::full(n);
    let den_f64 = den.to_f64().unwrap_or(f64::MAX);
    let weights_f64: Vec<f64> = weights.iter().map(|w| w.to_f64().unwrap_or(f64::MAX)).collect();
    let mut best: Option<(BigInt, BigInt, u64)> = None;
    let mut best_f64 = f64::INFINITY;
    for s in 1..=full {
        let mass_f64: f64 = bits::iter(s).map(|i| weights_f64[i]).sum();
        if mass_f64 == 0.0 {
            continue;
        }
        let avoid_s = &avoid[(full & !s) as usize];
        let approx = (den_f64 - avoid_s.to_f64().unwrap_or(f64::MAX)) / mass_f64;
        if approx > best_f64 * (1.0 + 1e-9) + 1e-12 {
            continue;
        }
        let mass: BigInt = bits::iter(s).map(|i| &weights[i]).sum();
        let hit = &den - avoid_s;
        let better = match &best {
            None => true,
            Some((h, m, _)) => &hit * m < h * &mass,
        };
        if better {
            best_f64 = best_f64.min(approx);
            best = Some((hit, mass, s));
        }
    }
    let (hit, mass, witness) = best.expect("some element has positive marginal");
    Ok(QualityReport { value: Rational::new(hit, mass), witness })
}

/// Subset-sum transform: `out[T] = Σ_{R ⊆ T} w(R)`.
fn zeta<T: Clone + Zero + for<'a> AddAssign<&'a T>>(n: usize, entries: impl Iterator<Item = (u64, T)>) -> Vec<T> {
    let mut table = vec![T::zero(); 1usize << n];
    for (mask, w) in entries {
        table[mask as usize] += &w;
    }
    for i in 0..n {
        let bit = 1usize << i;
        for t in 0..table.len() {
            if t & bit != 0 {
                let (low, high) = table.split_at_mut(t);
                high[0] += &low[t ^ bit];
            }
        }
    }
    table
}

/// The quality of the symmetric distribution with size profile `z`; the worst set is a prefix `[s]`.
pub fn symmetric_quality(z: &ZVector) -> Result<QualityReport> {
    let n = z.n();
    let x = z.marginal();
    if x.is_zero() {
        return Err(Error::InvalidParameter("every element has zero marginal".into()));
    }
    let mut best: Option<(Rational, usize)> = None;
    for s in 1..=n {
        let miss: Rational = (0..=n - s)
            .map(|j| z.get(j) * Rational::new(binomial(n - s, j), binomial(n, j)))
            .sum();
        let ratio = (Rational::one() - miss) / (&x * BigInt::from(s));
        if best.as_ref().is_none_or(|(v, _)| ratio < *v) {
            best = Some((ratio, s));
        }
    }
    let (value, s) = best.expect("n ≥ 1");
    let witness = if s == 64 { u64::MAX } else { (1u64 << s) - 1 };
    Ok(QualityReport { value, witness })
}

/// `min_{y ≥ 0} E[max_{i ∈ R} y_i] / Σ_i x_i y_i`, solved directly as a linear program.
pub fn rank1_quality_lp(d: &ExplicitDist) -> Result<Rational> {
    let n = d.ground_size();
    if n > QUALITY_LP_LIMIT {
        return Err(Error::TooLarge { what: "ground set for the quality program", size: n, limit: QUALITY_LP_LIMIT });
    }
    let x = d.marginals();
    let outcomes: Vec<(u64, Rational)> = d.support().iter().filter(|(m, _)| *m != 0).cloned().collect();
    let slacks: usize = outcomes.iter().map(|(m, _)| m.count_ones() as usize).sum();
    // columns: y_0..y_{n-1}, one max variable per outcome, one slack per (outcome, member)
    let columns = n + outcomes.len() + slacks;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut slack = n + outcomes.len();
    for (k, (mask, _)) in outcomes.iter().enumerate() {
        for i in bits::iter(*mask) {
            let mut row = vec![Rational::zero(); columns];
            row[n + k] = Rational::one();
            row[i] = -Rational::one();
            row[slack] = -Rational::one();
            slack += 1;
            a.push(row);
            b.push(Rational::zero());
        }
    }
    let mut normal = vec![Rational::zero(); columns];
    normal[..n].clone_from_slice(&x);
    a.push(normal);
    b.push(Rational::one());
    let mut c = vec![Rational::zero(); columns];
    for (k, (_, p)) in outcomes.iter().enumerate() {
        c[n + k] = p.clone();
    }
    match lp::solve(&LinearProgram { a, b, c }) {
        LpOutcome::Optimal { value, .. } => Ok(value),
        LpOutcome::Infeasible => Err(Error::InvalidParameter("every element has zero marginal".into())),
        LpOutcome::Unbounded => unreachable!("the objective is nonnegative"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{pair_singleton_dist, parity_dist, product_dist, symmetric_from_z, thin, twise_symmetric, twise_z};
    use crate::rational::{int, rat};
    use num_traits::Signed;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn phi_values() {
        assert_eq!(phi(1), Rational::zero());
        assert_eq!(phi(2), rat(1, 2));
        assert_eq!(phi(3), rat(1, 2));
        assert_eq!(phi(4), rat(5, 8));
        assert_eq!(phi_series(3), rat(2, 3));
        assert!(rational::to_f64(&phi(12)) - (1.0 - (-1.0f64).exp()) < 1e-8);
    }

    #[test]
    fn bonferroni_values() {
        assert_eq!(bonferroni_lower(&int(0), 4).unwrap(), int(0));
        assert_eq!(bonferroni_lower(&int(1), 2).unwrap(), rat(1, 2));
        assert!(bonferroni_lower(&int(1), 3).is_err());
        assert!(bonferroni_lower(&rat(3, 2), 2).is_err());
    }

    #[test]
    fn binomial_form_dominates_series() {
        for t in [2, 4, 6] {
            for n in 1..=30 {
                for c in (0..=10).map(|k| rat(k, 10)) {
                    assert!(bonferroni_binomial(&c, n, t) >= bonferroni_lower(&c, t).unwrap(), "c={c} n={n} t={t}");
                }
            }
        }
    }

    #[test]
    fn uniform_point_minimises_truncated_union() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let n = rng.gen_range(2..12);
            let t = [2, 4][rng.gen_range(0..2)];
            let c: f64 = rng.gen_range(0.05..1.0);
            let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let x: Vec<f64> = raw.iter().map(|v| v * c / total).collect();
            let uniform = vec![c / n as f64; n];
            assert!(truncated_union(&x, t) >= truncated_union(&uniform, t) - 1e-9);
        }
    }

    #[test]
    fn deterministic_singleton_has_quality_one() {
        let d = ExplicitDist::point(3, 0b010).unwrap();
        let q = rank1_crs_quality(&d).unwrap();
        assert_eq!(q.value, int(1));
    }

    #[test]
    fn product_quality_is_one_minus_miss() {
        for n in [2, 5, 8] {
            let d = product_dist(&vec![rat(1, n as i64); n]).unwrap();
            let q = rank1_crs_quality(&d).unwrap();
            assert_eq!(q.value, int(1) - rational::pow(&rat(n as i64 - 1, n as i64), n));
            assert_eq!(q.witness, bits::full(n));
        }
    }

    #[test]
    fn pairwise_symmetric_quality() {
        for n in [3, 6, 10] {
            let d = twise_symmetric(n, 2).unwrap();
            let q = rank1_crs_quality(&d).unwrap();
            assert_eq!(q.value, rat(n as i64 + 1, 2 * n as i64));
            assert_eq!(q.witness, bits::full(n));
            assert_eq!(symmetric_quality(&twise_z(n, 2).unwrap()).unwrap(), q);
        }
    }

    #[test]
    fn symmetric_fast_path_matches_enumeration() {
        for (n, t) in [(6, 3), (8, 4), (9, 5)] {
            let z = twise_z(n, t).unwrap();
            let explicit = symmetric_from_z(n, &z).unwrap();
            assert_eq!(symmetric_quality(&z).unwrap().value, rank1_crs_quality(&explicit).unwrap().value);
        }
    }

    #[test]
    fn quality_dominates_phi_on_twise_fixtures() {
        for (n, t) in [(8, 2), (12, 2), (8, 4), (12, 4), (10, 6)] {
            let q = rank1_crs_quality(&twise_symmetric(n, t).unwrap()).unwrap();
            assert!(q.value >= phi(t), "n={n} t={t}");
        }
        let parity = parity_dist(&(1..=7).collect::<Vec<u64>>(), 3).unwrap();
        let thinned = thin(&parity.into(), &vec![rat(2, 7); 7]).unwrap();
        let q = rank1_crs_quality(thinned.as_explicit().unwrap()).unwrap();
        assert!(q.value >= phi(2));
        let q = rank1_crs_quality(&pair_singleton_dist(6).unwrap()).unwrap();
        assert!(q.value >= phi(2));
    }

    #[test]
    fn symmetric_quality_approaches_phi() {
        for t in [2, 4] {
            for n in [16, 32, 64] {
                let z = twise_z(n, t).unwrap();
                let q = symmetric_quality(&z).unwrap();
                assert_eq!(q.value, int(1) - z.get(0));
                assert_eq!(q.witness, bits::full(n));
                let gap = &q.value - phi(t);
                assert!(gap.abs() <= rat(4, n as i64), "t={t} n={n} gap={gap}");
            }
        }
    }

    #[test]
    fn zero_marginals_are_rejected() {
        let d = ExplicitDist::point(3, 0).unwrap();
        assert!(rank1_crs_quality(&d).is_err());
        assert!(rank1_quality_lp(&d).is_err());
    }

    fn small_dist() -> impl Strategy<Value = ExplicitDist> {
        (1usize..=5).prop_flat_map(|n| {
            prop::collection::vec((0u64..(1 << n), 1i64..6), 1..7).prop_map(move |entries| {
                let total: i64 = entries.iter().map(|(_, w)| w).sum();
                ExplicitDist::new(n, entries.into_iter().map(|(m, w)| (m, rat(w, total)))).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn subset_form_equals_program(d in small_dist()) {
            prop_assume!(d.marginals().iter().any(|x| !x.is_zero()));
            let q = rank1_crs_quality(&d).unwrap();
            prop_assert_eq!(rank1_quality_lp(&d).unwrap(), q.value.clone());
            let mass: Rational = bits::iter(q.witness).map(|i| d.marginal(i)).sum();
            let hit = d.probability(|m| m & q.witness != 0);
            prop_assert_eq!(hit / mass, q.value);
        }
    }
}
