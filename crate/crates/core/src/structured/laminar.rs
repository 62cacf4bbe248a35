use crate::dist::{thin, SubsetDistribution};
use crate::error::{Error, Result};
use crate::matroid::{CapacitySet, LaminarFamily};
use crate::mc::McConfig;
use crate::ocrs::CapacityFamily;
use crate::rational::{self, Rational};
use crate::uniform::{two_bucket_prepare, BucketParams, TwoBucket};

/// Capacities rounded down to powers of two with dominated constraints discarded.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundedLaminar {
    /// The input family, with the whole ground set added when it was missing.
    pub original: LaminarFamily,
    pub rounded: LaminarFamily,
}

/// Largest power of two `≤ c`.
pub fn round_capacity(c: usize) -> usize {
    if c == 0 {
        0
    } else {
        1 << (usize::BITS - 1 - c.leading_zeros())
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|e| b.binary_search(e).is_ok())
}

/// Rounds every capacity to a power of two and drops `A` whenever some `B ⊋ A` (or an
/// identical earlier set) has rounded capacity `≤ c'(A)`.
pub fn round_laminar(family: &LaminarFamily) -> Result<RoundedLaminar> {
    let n = family.n();
    if let Some(set) = family.sets().iter().find(|s| s.cap == 0) {
        return Err(Error::InvalidParameter(format!("capacity 0 on {:?} makes its elements loops", set.members)));
    }
    let mut sets = family.sets().to_vec();
    if !sets.iter().any(|s| s.members.len() == n) {
        let cap = family.rank(0..n);
        sets.push(CapacitySet { members: (0..n).collect(), cap });
    }
    let original = LaminarFamily::new(n, sets)?;
    let sets = original.sets();
    let caps: Vec<usize> = sets.iter().map(|s| round_capacity(s.cap)).collect();
    let kept = (0..sets.len())
        .filter(|&a| {
            !(0..sets.len()).any(|b| {
                if a == b || !is_subset(&sets[a].members, &sets[b].members) || caps[b] > caps[a] {
                    return false;
                }
                let same = sets[a].members.len() == sets[b].members.len();
                !same || caps[b] < caps[a] || b < a
            })
        })
        .map(|a| CapacitySet { members: sets[a].members.clone(), cap: caps[a] })
        .collect();
    Ok(RoundedLaminar { rounded: LaminarFamily::new(n, kept)?, original })
}

/// `1 − t(1−b) − b^{-3/2}·2^{-t/2}·3√3/(2−√2)`: the selectability of the intersection family
/// with per-constraint slack `1−b` and the switch to two buckets at capacity `2^t`.
pub fn laminar_guarantee(t: u32, b: f64) -> f64 {
    1.0 - t as f64 * (1.0 - b) - b.powf(-1.5) * 2f64.powf(-(t as f64) / 2.0) * 3.0 * 3f64.sqrt() / (2.0 - 2f64.sqrt())
}

/// One uniform subscheme per rounded constraint.
#[derive(Clone, Debug)]
pub enum ConstraintScheme {
    Simple(CapacitySet),
    TwoBucket { set: CapacitySet, buckets: Box<TwoBucket> },
}

#[derive(Clone, Debug)]
pub struct LaminarScheme {
    pub parts: Vec<ConstraintScheme>,
    pub family: CapacityFamily,
}

/// Runs the simple family on constraints with `c' < 2^t` and the two-bucket family with
/// `ε = b` on the others, then intersects them.
pub fn laminar_prepare(rounded: &RoundedLaminar, d: &SubsetDistribution, t: u32, b: f64, mc: McConfig) -> Result<LaminarScheme> {
    let n = rounded.rounded.n();
    if d.ground_size() != n {
        return Err(Error::InvalidParameter(format!("distribution has {} elements, family {n}", d.ground_size())));
    }
    let switch = 1usize.checked_shl(t).unwrap_or(usize::MAX);
    let mut parts = Vec::new();
    let mut constraints = Vec::new();
    for (idx, set) in rounded.rounded.sets().iter().enumerate() {
        if set.cap < switch {
            constraints.push(set.clone());
            parts.push(ConstraintScheme::Simple(set.clone()));
            continue;
        }
        let mut keep = vec![Rational::from_integer(0.into()); n];
        for &e in &set.members {
            keep[e] = Rational::from_integer(1.into());
        }
        let restricted = thin(d, &keep)?;
        let params = BucketParams::new(set.cap, b, 1.0 / 3.0)?;
        let buckets = two_bucket_prepare(&restricted, params, mc.fork(idx as u64))?;
        let (good, bad): (Vec<usize>, Vec<usize>) = set.members.iter().partition(|&&e| buckets.good[e]);
        constraints.push(CapacitySet { members: good, cap: buckets.params.good_capacity() });
        constraints.push(CapacitySet { members: bad, cap: buckets.params.bad_capacity() });
        parts.push(ConstraintScheme::TwoBucket { set: set.clone(), buckets: Box::new(buckets) });
    }
    let family = CapacityFamily::new(n, constraints)?;
    Ok(LaminarScheme { parts, family })
}

/// `max_A x(A)/c(A)` over the constraints of `family`.
pub fn laminar_load(family: &LaminarFamily, x: &[Rational]) -> Rational {
    family
        .sets()
        .iter()
        .map(|s| rational::sum(s.members.iter().map(|&e| &x[e])) / num_bigint::BigInt::from(s.cap))
        .max()
        .unwrap_or_else(|| Rational::from_integer(0.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::product_dist;
    use crate::matroid::{in_scaled_polytope, Matroid};
    use crate::ocrs::{exact_selectability, Deterministic, GreedyFamily};
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn family(text: &str) -> LaminarFamily {
        LaminarFamily::parse(text).unwrap()
    }

    #[test]
    fn rounding_examples() {
        assert_eq!(round_capacity(5), 4);
        assert_eq!(round_capacity(4), 4);
        assert_eq!(round_capacity(1), 1);
        let r = round_laminar(&family("laminar 6\ncap 5 : 0 1 2 3\ncap 4 : 0 1 2 3 4 5\n")).unwrap();
        // the inner set rounds to 4 ≥ 4 and is dropped
        assert_eq!(r.rounded.sets(), &[CapacitySet { members: (0..6).collect(), cap: 4 }]);
        let r = round_laminar(&family("laminar 4\ncap 3 : 0 1\n")).unwrap();
        assert_eq!(r.original.sets().len(), 2);
        // the added ground set has capacity rank(E) = 4
        assert_eq!(r.rounded.sets().iter().map(|s| s.cap).collect::<Vec<_>>(), vec![2, 4]);
    }

    #[test]
    fn rounded_caps_are_strictly_monotone() {
        let r = round_laminar(&family("laminar 8\ncap 7 : 0 1 2 3 4 5 6 7\ncap 6 : 0 1 2 3\ncap 3 : 0 1\ncap 2 : 4 5\ncap 1 : 6\n")).unwrap();
        let sets = r.rounded.sets();
        for a in sets {
            assert!(a.cap.is_power_of_two());
            for b in sets {
                if a != b && is_subset(&a.members, &b.members) {
                    assert!(a.cap < b.cap);
                }
            }
        }
    }

    #[test]
    fn constants() {
        let g = laminar_guarantee(13, 24.0 / 25.0);
        assert!(g >= 1.0 / 2.661 - 1e-6, "{g}");
        let series: f64 = (13..200).map(|i| (4.0 / 27.0 * (24.0f64 / 25.0).powi(3) * 2f64.powi(i)).powf(-0.5)).sum();
        let closed = 1.0 - 13.0 / 25.0 - g;
        assert!((series - closed).abs() < 1e-9);
        assert!(0.5 / 25.0 * g >= 1.0 / 134.0);
    }

    #[test]
    fn single_constraint_degenerates() {
        let r = round_laminar(&family("laminar 4\ncap 2 : 0 1 2 3\n")).unwrap();
        let d = product_dist(&vec![rat(1, 8); 4]).unwrap();
        let scheme = laminar_prepare(&r, &d.clone().into(), 13, 24.0 / 25.0, McConfig::new(0, 0)).unwrap();
        assert_eq!(scheme.family.constraints(), r.rounded.sets());
        let sel = exact_selectability(&Deterministic::new(scheme.family), &d).unwrap();
        assert!(sel.into_iter().flatten().all(|s| s >= int(1) - rat(1, 4)));
    }

    #[test]
    fn large_capacity_switches_to_buckets() {
        let r = round_laminar(&family("laminar 6\ncap 4 : 0 1 2 3 4 5\ncap 2 : 0 1 2\n")).unwrap();
        let d = product_dist(&vec![rat(1, 30); 6]).unwrap();
        let scheme = laminar_prepare(&r, &d.into(), 2, 0.9, McConfig::new(0, 0)).unwrap();
        assert!(matches!(scheme.parts[0], ConstraintScheme::TwoBucket { .. }));
        assert!(matches!(scheme.parts[1], ConstraintScheme::Simple(_)));
        assert!(scheme.family.contains(&[0, 3]));
        assert!(!scheme.family.contains(&[0, 1, 2]));
    }

    proptest! {
        #[test]
        fn half_polytope_maps_into_rounded_polytope(nums in proptest::collection::vec(0i64..=4, 6)) {
            let orig = family("laminar 6\ncap 3 : 0 1 2 3 4 5\ncap 3 : 0 1 2\ncap 1 : 3\n");
            let r = round_laminar(&orig).unwrap();
            let x: Vec<Rational> = nums.iter().map(|&v| rat(v, 8)).collect();
            let m_orig = Matroid::laminar(orig.clone()).unwrap();
            prop_assume!(in_scaled_polytope(&m_orig, &x, &rat(1, 2)).unwrap());
            let m_round = Matroid::laminar(r.rounded.clone()).unwrap();
            prop_assert!(in_scaled_polytope(&m_round, &x, &int(1)).unwrap());
            for mask in 0u64..64 {
                let set = crate::bits::elements(mask);
                if m_round.is_independent(&set).unwrap() {
                    prop_assert!(m_orig.is_independent(&set).unwrap());
                }
            }
        }
    }
}
