use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use super::{Kind, Matroid, UnionFind};
use crate::bits;
use crate::error::{Error, Result};
use crate::lp;
use crate::rational::Rational;

/// Largest ground set handled by exhaustive subset enumeration.
pub const BRUTE_FORCE_LIMIT: usize = 22;
/// Largest support enumerated when decomposing a point.
const DECOMPOSE_LIMIT: usize = 16;

fn small_ground(m: &Matroid, limit: usize) -> Result<Vec<usize>> {
    let elements = m.elements();
    if elements.len() > limit {
        return Err(Error::TooLarge { what: "ground set", size: elements.len(), limit });
    }
    if m.id_space() > 64 {
        return Err(Error::TooLarge { what: "id space for subset enumeration", size: m.id_space(), limit: 64 });
    }
    Ok(elements)
}

fn reject_loops(m: &Matroid, elements: &[usize]) -> Result<()> {
    match elements.iter().find(|&&e| m.rank_mask(1 << e) == 0) {
        Some(&e) => Err(Error::Loop(e)),
        None => Ok(()),
    }
}

/// Spreads the bits of `local` over the positions listed in `elements`.
fn spread(local: u64, elements: &[usize]) -> u64 {
    bits::iter(local).fold(0, |acc, i| acc | (1 << elements[i]))
}

/// `γ(M) = max |S| / rank(S)` over nonempty subsets, by exhaustive enumeration.
pub fn density(m: &Matroid) -> Result<Rational> {
    let elements = small_ground(m, BRUTE_FORCE_LIMIT)?;
    reject_loops(m, &elements)?;
    if elements.is_empty() {
        return Err(Error::InvalidParameter("density of an empty ground set".into()));
    }
    let mut best = (1usize, 1usize);
    for local in 1..(1u64 << elements.len()) {
        let size = local.count_ones() as usize;
        // Only sets larger than best * rank can improve; rank ≥ 1 so a cheap size check first.
        if size * best.1 <= best.0 {
            continue;
        }
        let rank = m.rank_mask(spread(local, &elements));
        if size * best.1 > best.0 * rank {
            best = (size, rank);
        }
    }
    Ok(Rational::new(BigInt::from(best.0), BigInt::from(best.1)))
}

/// Equivalence classes of the parallel relation (pairs forming 2-circuits).
pub fn parallel_classes(m: &Matroid) -> Result<Vec<Vec<usize>>> {
    let elements = m.elements();
    reject_loops_general(m, &elements)?;
    let mut uf = UnionFind::new(m.id_space());
    for (i, &a) in elements.iter().enumerate() {
        for &b in &elements[i + 1..] {
            if m.rank_unchecked(&[a, b]) == 1 {
                uf.union(a, b);
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; m.id_space()];
    for &e in &elements {
        let root = uf.find(e);
        if index[root] == usize::MAX {
            index[root] = classes.len();
            classes.push(Vec::new());
        }
        classes[index[root]].push(e);
    }
    Ok(classes)
}

fn reject_loops_general(m: &Matroid, elements: &[usize]) -> Result<()> {
    match elements.iter().find(|&&e| m.rank_unchecked(&[e]) == 0) {
        Some(&e) => Err(Error::Loop(e)),
        None => Ok(()),
    }
}

/// Integer numerators over a common denominator.
struct Scaled {
    nums: Vec<BigInt>,
    den: BigInt,
}

fn scale(values: &[Rational]) -> Scaled {
    let den = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let nums = values.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    Scaled { nums, den }
}

fn check_vector(m: &Matroid, x: &[Rational]) -> Result<()> {
    if x.len() != m.id_space() {
        return Err(Error::InvalidParameter(format!("vector has {} entries for {} ids", x.len(), m.id_space())));
    }
    if let Some(i) = x.iter().position(|v| v.is_negative()) {
        return Err(Error::InvalidParameter(format!("negative entry at {i}")));
    }
    if let Some(i) = (0..x.len()).find(|&i| !m.is_element(i) && !x[i].is_zero()) {
        return Err(Error::RemovedElement(i));
    }
    Ok(())
}

/// A subset `S` with `x(S) > b·rank(S)`, if any. Entries for removed ids must be zero.
pub fn polytope_violation(m: &Matroid, x: &[Rational], b: &Rational) -> Result<Option<Vec<usize>>> {
    check_vector(m, x)?;
    if let (Kind::Uniform { k, .. }, true) = (m.kind(), m.contracted().is_empty()) {
        if let Some(i) = (0..x.len()).find(|&i| &x[i] > b) {
            return Ok(Some(vec![i]));
        }
        let total: Rational = x.iter().sum();
        let bound = b * Rational::from_integer(BigInt::from(*k));
        return Ok((total > bound).then(|| m.elements()));
    }
    let elements = small_ground(m, BRUTE_FORCE_LIMIT)?;
    let local: Vec<Rational> = elements.iter().map(|&e| x[e].clone()).collect();
    let Scaled { nums, den } = scale(&local);
    // Compare q · Σ nums ≤ p · den · rank with b = p/q.
    let lhs_factor = b.denom().clone();
    let rhs_factor = b.numer() * &den;
    let small: Option<(Vec<i128>, i128, i128)> = (|| {
        let nums: Vec<i128> = nums.iter().map(|v| v.to_i128()).collect::<Option<_>>()?;
        let l = lhs_factor.to_i128()?;
        let r = rhs_factor.to_i128()?;
        let total: i128 = nums.iter().try_fold(0i128, |acc, v| acc.checked_add(*v))?;
        total.checked_mul(l)?;
        r.checked_mul(elements.len() as i128 + 1)?;
        Some((nums, l, r))
    })();
    for local_mask in 1..(1u64 << elements.len()) {
        let rank = m.rank_mask(spread(local_mask, &elements)) as i128;
        let violated = match &small {
            Some((nums, l, r)) => bits::iter(local_mask).map(|i| nums[i]).sum::<i128>() * l > r * rank,
            None => {
                let total: BigInt = bits::iter(local_mask).map(|i| &nums[i]).sum();
                total * &lhs_factor > &rhs_factor * BigInt::from(rank)
            }
        };
        if violated {
            return Ok(Some(bits::iter(local_mask).map(|i| elements[i]).collect()));
        }
    }
    Ok(None)
}

/// Whether `x ∈ b·P_M`.
pub fn in_scaled_polytope(m: &Matroid, x: &[Rational], b: &Rational) -> Result<bool> {
    Ok(polytope_violation(m, x, b)?.is_none())
}

/// A convex combination of independent sets (the empty set included when it carries weight).
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexCombination {
    terms: Vec<(Vec<usize>, Rational)>,
}

impl ConvexCombination {
    pub fn terms(&self) -> &[(Vec<usize>, Rational)] {
        &self.terms
    }

    pub fn marginals(&self, ids: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); ids];
        for (set, w) in &self.terms {
            for &e in set {
                out[e] += w;
            }
        }
        out
    }

    /// Draws one set with probability equal to its weight.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &[usize] {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (set, w) in &self.terms {
            acc += crate::rational::to_f64(w);
            if u < acc {
                return set;
            }
        }
        &self.terms.last().expect("weights sum to one").0
    }
}

/// Writes `y ∈ P_M` as a convex combination of independent sets by solving the exact
/// marginal-matching feasibility system over all independent subsets of `supp(y)`.
pub fn decompose_point(m: &Matroid, y: &[Rational]) -> Result<ConvexCombination> {
    check_vector(m, y)?;
    if let Some(subset) = polytope_violation(m, y, &Rational::one())? {
        return Err(Error::OutsidePolytope { subset });
    }
    let support: Vec<usize> = (0..y.len()).filter(|&e| !y[e].is_zero()).collect();
    if support.len() > DECOMPOSE_LIMIT {
        return Err(Error::TooLarge { what: "decomposition support", size: support.len(), limit: DECOMPOSE_LIMIT });
    }
    let sets: Vec<u64> = (0..(1u64 << support.len()))
        .map(|local| spread(local, &support))
        .filter(|&mask| m.rank_mask(mask) == mask.count_ones() as usize)
        .collect();
    let rows = support.len() + 1;
    let mut a = vec![vec![Rational::zero(); sets.len()]; rows];
    for (col, &mask) in sets.iter().enumerate() {
        for (row, &e) in support.iter().enumerate() {
            if (mask >> e) & 1 == 1 {
                a[row][col] = Rational::one();
            }
        }
        a[support.len()][col] = Rational::one();
    }
    let mut rhs: Vec<Rational> = support.iter().map(|&e| y[e].clone()).collect();
    rhs.push(Rational::one());
    let weights = lp::feasible_point(a, rhs, sets.len())
        .ok_or_else(|| Error::OutsidePolytope { subset: support.clone() })?;
    let terms = sets
        .iter()
        .zip(weights)
        .filter(|(_, w)| w.is_positive())
        .map(|(&mask, w)| (bits::elements(mask), w))
        .collect();
    Ok(ConvexCombination { terms })
}
