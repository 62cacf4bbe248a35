use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::bits;
use crate::dist::SubsetDistribution;
use crate::error::{Error, Result};
use crate::matroid::{Matroid, Multigraph};
use crate::mc::{self, Estimate, McConfig, Proportion};
use crate::ocrs::GreedyFamily;
use crate::rational::{self, Rational};

/// Nested sets `∅ = E_l ⊊ … ⊊ E_0 = E` stored as the level blocks `E_i ∖ E_{i+1}`.
#[derive(Clone, Debug)]
pub struct Chain {
    /// `blocks[i] = E_i ∖ E_{i+1}` as masks over element ids.
    pub blocks: Vec<u64>,
    /// `Pr[e ∈ span_{M/E_{i+1}}((R ∩ block_i) ∖ e) | e ∈ R]` recorded when `e` was certified.
    pub certified: Vec<Option<Estimate>>,
}

impl Chain {
    /// `E_i` for `i = 0..=l`.
    pub fn sets(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.blocks.len() + 1];
        for i in (0..self.blocks.len()).rev() {
            out[i] = out[i + 1] | self.blocks[i];
        }
        out
    }

    pub fn level_of(&self, e: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b >> e & 1 == 1)
    }
}

/// `F = {I : I ∩ block_i is independent in M / E_{i+1} for every level i}`.
#[derive(Clone, Debug)]
pub struct ChainFamily {
    blocks: Vec<u64>,
    minors: Vec<Matroid>,
    level: Vec<Option<usize>>,
}

/// Elements `e` of `active` with `e ∈ span_minor(active ∖ e)`.
fn spanned(minor: &Matroid, active: u64) -> u64 {
    bits::iter(active).filter(|&e| minor.spans_mask(active & !(1 << e), e)).fold(0, |acc, e| acc | 1 << e)
}

impl ChainFamily {
    fn new(m: &Matroid, chain: &Chain) -> Result<Self> {
        let sets = chain.sets();
        let minors = (0..chain.blocks.len())
            .map(|i| m.minor(&bits::elements(sets[i + 1]), &[]))
            .collect::<Result<Vec<_>>>()?;
        let mut level = vec![None; m.id_space()];
        for (i, b) in chain.blocks.iter().enumerate() {
            for e in bits::iter(*b) {
                level[e] = Some(i);
            }
        }
        Ok(Self { blocks: chain.blocks.clone(), minors, level })
    }
}

impl GreedyFamily for ChainFamily {
    fn ground_size(&self) -> usize {
        self.level.len()
    }

    fn contains(&self, set: &[usize]) -> bool {
        let mask = bits::mask_of(set);
        if set.iter().any(|&e| self.level[e].is_none()) {
            return false;
        }
        self.blocks.iter().zip(&self.minors).all(|(b, minor)| {
            let part = mask & b;
            minor.rank_mask(part) == part.count_ones() as usize
        })
    }

    fn always_extends(&self, active: &[usize], item: usize) -> bool {
        let Some(i) = self.level[item] else { return false };
        let part = bits::mask_of(active) & self.blocks[i] & !(1 << item);
        !self.minors[i].spans_mask(part, item)
    }

    fn extending(&self, active: &[usize]) -> Vec<bool> {
        let mask = bits::mask_of(active);
        let blocked = self.blocks.iter().zip(&self.minors).fold(0u64, |acc, (b, minor)| acc | spanned(minor, mask & b));
        active.iter().map(|&e| self.level[e].is_some() && blocked >> e & 1 == 0).collect()
    }
}

/// Conditional span probabilities of every element of `pool` under `M / contracted`.
fn span_probabilities(
    m: &Matroid,
    contracted: u64,
    pool: u64,
    d: &SubsetDistribution,
    x: &[Rational],
    mc: McConfig,
    stream: u64,
) -> Result<Vec<Option<Estimate>>> {
    let minor = m.minor(&bits::elements(contracted), &[])?;
    let n = m.id_space();
    Ok(match d {
        SubsetDistribution::Explicit(e) => {
            let mass = e.credited_mass(|r| spanned(&minor, r & pool));
            (0..n)
                .map(|i| (pool >> i & 1 == 1 && x[i].is_positive()).then(|| Estimate::exact(&mass[i] / &x[i])))
                .collect()
        }
        SubsetDistribution::Sampler(_) => {
            let fork = mc.fork(stream);
            let counts = mc::counts(fork.seed, fork.trials, 2 * n, |rng, acc| {
                let r = bits::mask_of(&d.sample(rng)) & pool;
                let hit = spanned(&minor, r);
                for i in bits::iter(r) {
                    acc[i] += 1;
                    acc[n + i] += hit >> i & 1;
                }
            });
            (0..n)
                .map(|i| (pool >> i & 1 == 1 && counts[i] > 0).then(|| Estimate::sampled(Proportion::new(counts[n + i], counts[i]))))
                .collect()
        }
    })
}

fn exceeds(est: &Estimate, threshold: &Rational) -> bool {
    match &est.exact {
        Some(v) => v > threshold,
        None => est.value > rational::to_f64(threshold) + 3.0 * est.ci99(),
    }
}

/// Builds the chain level by level: starting from `S = ∅`, repeatedly moves into `S` the
/// lowest-id element whose conditional span probability in `M/S` exceeds `2b`; the rest
/// of the level becomes the block and `S` the next level.
pub fn chain_prepare(m: &Matroid, d: &SubsetDistribution, b: &Rational, mc: McConfig) -> Result<(Chain, ChainFamily)> {
    if !b.is_positive() || *b >= rational::rat(1, 2) {
        return Err(Error::InvalidParameter(format!("b = {b} must lie in (0, 1/2)")));
    }
    if m.id_space() > bits::MAX_MASK_ELEMENTS {
        return Err(Error::TooLarge { what: "chain ground set", size: m.id_space(), limit: bits::MAX_MASK_ELEMENTS });
    }
    if d.ground_size() != m.id_space() {
        return Err(Error::InvalidParameter(format!("distribution has {} elements, matroid {}", d.ground_size(), m.id_space())));
    }
    let threshold = b * BigInt::from(2);
    let x = d.marginals();
    let mut current = bits::mask_of(&m.elements());
    let mut blocks = Vec::new();
    let mut certified = vec![None; m.id_space()];
    let mut stream = 0;
    while current != 0 {
        let mut s = 0u64;
        let last = loop {
            stream += 1;
            let probs = span_probabilities(m, s, current & !s, d, &x, mc, stream)?;
            let next = bits::iter(current & !s).find(|&e| probs[e].as_ref().is_some_and(|p| exceeds(p, &threshold)));
            match next {
                Some(e) => s |= 1 << e,
                None => break probs,
            }
        };
        let block = current & !s;
        if block == 0 {
            return Err(Error::ChainStall { level: blocks.len(), elements: bits::elements(current) });
        }
        for e in bits::iter(block) {
            certified[e] = last[e].clone();
        }
        log::debug!("chain level {}: block {:?}", blocks.len(), bits::elements(block));
        blocks.push(block);
        current = s;
    }
    let chain = Chain { blocks, certified };
    let family = ChainFamily::new(m, &chain)?;
    Ok((chain, family))
}

/// [`chain_prepare`] on the graphic matroid of `graph` (isolated vertices already stripped by the parser).
pub fn graphic_chain_prepare(graph: Multigraph, d: &SubsetDistribution, b: &Rational, mc: McConfig) -> Result<(Chain, ChainFamily)> {
    let m = Matroid::graphic(graph.strip_isolated())?;
    chain_prepare(&m, d, b, mc)
}

/// Recomputes the certified probability of every element from the final chain (explicit only).
pub fn recheck_chain(m: &Matroid, chain: &Chain, d: &crate::dist::ExplicitDist) -> Result<Vec<Option<Rational>>> {
    let sets = chain.sets();
    let x = d.marginals();
    let mut out = vec![None; m.id_space()];
    for (i, block) in chain.blocks.iter().enumerate() {
        let minor = m.minor(&bits::elements(sets[i + 1]), &[])?;
        let mass = d.credited_mass(|r| spanned(&minor, r & block));
        for e in bits::iter(*block) {
            if !x[e].is_zero() {
                out[e] = Some(&mass[e] / &x[e]);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{kn_cycle_dist, product_dist};
    use crate::ocrs::{brute_force_extends, exact_selectability, Deterministic};
    use crate::rational::{int, rat};

    fn explicit(x: &[Rational]) -> SubsetDistribution {
        product_dist(x).unwrap().into()
    }

    #[test]
    fn triangle_has_one_level() {
        let b = rat(3, 10);
        let x = vec![&b * rat(2, 3); 3];
        let d = explicit(&x);
        let (chain, _) = graphic_chain_prepare(Multigraph::cycle(3), &d, &b, McConfig::new(0, 0)).unwrap();
        assert_eq!(chain.blocks, vec![0b111]);
        // e is spanned iff both other edges are active
        let expected = &x[0] * &x[0];
        assert!(chain.certified.iter().all(|c| c.as_ref().unwrap().exact.as_ref() == Some(&expected)));
    }

    #[test]
    fn low_load_vertex_keeps_its_edges() {
        // a K4 whose vertex 0 carries little mass next to a heavy triangle
        let g = Multigraph::complete(4);
        let mut x = vec![rat(2, 5); 6];
        for (e, &(u, _)) in g.edges().iter().enumerate() {
            if u == 0 {
                x[e] = rat(1, 20);
            }
        }
        let b = rat(9, 20);
        let (chain, _) = graphic_chain_prepare(g.clone(), &explicit(&x), &b, McConfig::new(0, 0)).unwrap();
        for (e, &(u, _)) in g.edges().iter().enumerate() {
            if u == 0 {
                assert_eq!(chain.level_of(e), Some(0));
            }
        }
    }

    #[test]
    fn cycle_instance_stalls() {
        let d: SubsetDistribution = kn_cycle_dist(5).unwrap().into();
        let err = graphic_chain_prepare(Multigraph::complete(5), &d, &rat(49, 100), McConfig::new(0, 0)).unwrap_err();
        assert!(matches!(err, Error::ChainStall { level: 0, .. }));
    }

    #[test]
    fn rejects_large_b() {
        let d = explicit(&vec![rat(1, 4); 3]);
        assert!(graphic_chain_prepare(Multigraph::cycle(3), &d, &rat(1, 2), McConfig::new(0, 0)).is_err());
    }

    #[test]
    fn certificates_recheck_and_match_brute_force() {
        let g = Multigraph::new(4, vec![(0, 1), (0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let m = Matroid::graphic(g.clone()).unwrap();
        let x = vec![rat(1, 5), rat(1, 5), rat(3, 10), rat(1, 4), rat(1, 4), rat(1, 5)];
        let b = rat(2, 5);
        let d = explicit(&x);
        let (chain, family) = graphic_chain_prepare(g, &d, &b, McConfig::new(0, 0)).unwrap();
        let recheck = recheck_chain(&m, &chain, d.as_explicit().unwrap()).unwrap();
        for (e, rechecked) in recheck.iter().enumerate() {
            assert_eq!(rechecked.as_ref(), chain.certified[e].as_ref().unwrap().exact.as_ref());
        }
        for mask in 0u64..64 {
            let active = bits::elements(mask);
            for item in 0..6 {
                assert_eq!(family.always_extends(&active, item), brute_force_extends(&family, &active, item).unwrap());
            }
            // every member is independent in M
            if family.contains(&active) {
                assert!(m.is_independent(&active).unwrap());
            }
        }
        let sel = exact_selectability(&Deterministic::new(family), d.as_explicit().unwrap()).unwrap();
        assert!(sel.into_iter().flatten().all(|s| s >= int(1) - &b * BigInt::from(2)));
    }

    #[test]
    fn sampled_distribution_builds_a_chain() {
        use crate::dist::Sampler;
        let d: SubsetDistribution = Sampler::product(vec![rat(1, 5); 3]).unwrap().into();
        let (chain, _) = graphic_chain_prepare(Multigraph::cycle(3), &d, &rat(3, 10), McConfig::new(3, 4000)).unwrap();
        assert_eq!(chain.blocks, vec![0b111]);
        assert!(chain.certified.iter().all(|c| !c.as_ref().unwrap().is_exact()));
    }
}
