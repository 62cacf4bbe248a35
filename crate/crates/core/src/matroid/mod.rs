//! Matroid oracles over an indexed ground set, with minors and polytope utilities.
//!
//! Element ids are stable: a minor keeps the ids of its parent and simply stops accepting the
//! contracted and deleted ones.

mod bipartite;
mod gf2;
mod graph;
mod laminar;
mod polytope;

use std::sync::Arc;

pub use bipartite::Bipartite;
pub use gf2::{binary_sum, nullspace, rank_of, Gf2Matrix};
pub use graph::Multigraph;
pub(crate) use graph::{content_lines, parse_usize, UnionFind};
pub use laminar::{CapacitySet, LaminarFamily};
pub use polytope::{decompose_point, density, in_scaled_polytope, parallel_classes, polytope_violation, ConvexCombination, BRUTE_FORCE_LIMIT};

use crate::error::{Error, Result};

/// The concrete matroid a [`Matroid`] oracle is built on.
#[derive(Clone, Debug)]
pub enum Kind {
    Uniform { n: usize, k: usize },
    Graphic(Multigraph),
    Cographic { graph: Multigraph, graph_rank: usize },
    Laminar(LaminarFamily),
    Transversal(Bipartite),
    Binary(Gf2Matrix),
}

/// Rank oracle with an attached minor record (contracted and deleted elements).
#[derive(Clone, Debug)]
pub struct Matroid {
    kind: Arc<Kind>,
    size: usize,
    contracted: Vec<usize>,
    deleted: Vec<usize>,
    removed: Vec<bool>,
    contracted_rank: usize,
    labels: Option<Arc<Vec<String>>>,
}

impl Matroid {
    fn from_kind(kind: Kind, size: usize) -> Self {
        Self {
            kind: Arc::new(kind),
            size,
            contracted: Vec::new(),
            deleted: Vec::new(),
            removed: vec![false; size],
            contracted_rank: 0,
            labels: None,
        }
    }

    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        if k == 0 && n > 0 {
            return Err(Error::Loop(0));
        }
        Ok(Self::from_kind(Kind::Uniform { n, k }, n))
    }

    pub fn graphic(graph: Multigraph) -> Result<Self> {
        if let Some(&e) = graph.self_loops().first() {
            return Err(Error::Loop(e));
        }
        let size = graph.edge_count();
        Ok(Self::from_kind(Kind::Graphic(graph), size))
    }

    /// The dual of the graphic matroid; bridges of the graph are its loops and are rejected.
    pub fn cographic(graph: Multigraph) -> Result<Self> {
        if let Some(&e) = graph.bridges().first() {
            return Err(Error::Loop(e));
        }
        let size = graph.edge_count();
        let graph_rank = graph.forest_rank(0..size);
        Ok(Self::from_kind(Kind::Cographic { graph, graph_rank }, size))
    }

    pub fn laminar(family: LaminarFamily) -> Result<Self> {
        for e in 0..family.n() {
            if family.containing(e).iter().any(|&s| family.sets()[s].cap == 0) {
                return Err(Error::Loop(e));
            }
        }
        let size = family.n();
        Ok(Self::from_kind(Kind::Laminar(family), size))
    }

    pub fn transversal(graph: Bipartite) -> Result<Self> {
        if let Some(u) = (0..graph.left()).find(|&u| graph.neighbors(u).is_empty()) {
            return Err(Error::Loop(u));
        }
        let size = graph.left();
        Ok(Self::from_kind(Kind::Transversal(graph), size))
    }

    pub fn binary(matrix: Gf2Matrix) -> Result<Self> {
        if let Some(j) = (0..matrix.cols()).find(|&j| matrix.column(j) == 0) {
            return Err(Error::Loop(j));
        }
        let size = matrix.cols();
        Ok(Self::from_kind(Kind::Binary(matrix), size))
    }

    pub fn r10() -> Self {
        Self::binary(Gf2Matrix::r10()).expect("R10 is loopless")
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size {
            return Err(Error::InvalidParameter(format!("{} labels for {} elements", labels.len(), self.size)));
        }
        self.labels = Some(Arc::new(labels));
        Ok(self)
    }

    pub fn label(&self, e: usize) -> String {
        self.labels.as_ref().map_or_else(|| e.to_string(), |l| l[e].clone())
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// Number of ids, including contracted and deleted ones.
    pub fn id_space(&self) -> usize {
        self.size
    }

    /// The ground set of the (minored) matroid.
    pub fn elements(&self) -> Vec<usize> {
        (0..self.size).filter(|&e| !self.removed[e]).collect()
    }

    pub fn is_element(&self, e: usize) -> bool {
        e < self.size && !self.removed[e]
    }

    pub fn contracted(&self) -> &[usize] {
        &self.contracted
    }

    pub fn deleted(&self) -> &[usize] {
        &self.deleted
    }

    pub fn graph(&self) -> Option<&Multigraph> {
        match self.kind.as_ref() {
            Kind::Graphic(g) | Kind::Cographic { graph: g, .. } => Some(g),
            _ => None,
        }
    }

    fn check(&self, set: &[usize]) -> Result<Vec<usize>> {
        let mut out = set.to_vec();
        out.sort_unstable();
        out.dedup();
        for &e in &out {
            if e >= self.size {
                return Err(Error::ElementOutOfRange { id: e, n: self.size });
            }
            if self.removed[e] {
                return Err(Error::RemovedElement(e));
            }
        }
        Ok(out)
    }

    /// Rank of a duplicate-free set of ids in the underlying (unminored) matroid.
    fn base_rank(&self, set: &[usize]) -> usize {
        match self.kind.as_ref() {
            Kind::Uniform { k, .. } => set.len().min(*k),
            Kind::Graphic(g) => g.forest_rank(set.iter().copied()),
            Kind::Cographic { graph, graph_rank } => {
                let mut inside = vec![false; self.size];
                for &e in set {
                    inside[e] = true;
                }
                let rest = graph.forest_rank((0..self.size).filter(|&e| !inside[e]));
                set.len() + rest - graph_rank
            }
            Kind::Laminar(f) => f.rank(set.iter().copied()),
            Kind::Transversal(b) => b.matching_size(set.iter().copied()),
            Kind::Binary(m) => m.column_rank(set.iter().copied()),
        }
    }

    /// Rank of a set already known to be duplicate-free and inside the ground set.
    pub(crate) fn rank_unchecked(&self, set: &[usize]) -> usize {
        if self.contracted.is_empty() {
            return self.base_rank(set);
        }
        let mut with: Vec<usize> = Vec::with_capacity(set.len() + self.contracted.len());
        with.extend_from_slice(set);
        with.extend_from_slice(&self.contracted);
        self.base_rank(&with) - self.contracted_rank
    }

    /// Rank of the elements of `mask` (ids below 64).
    pub(crate) fn rank_mask(&self, mask: u64) -> usize {
        self.rank_unchecked(&crate::bits::elements(mask))
    }

    /// Whether `e` lies in the span of the set `mask` in this minor (ids below 64).
    pub(crate) fn spans_mask(&self, mask: u64, e: usize) -> bool {
        if (mask >> e) & 1 == 1 {
            return true;
        }
        if let Kind::Graphic(g) = self.kind.as_ref() {
            let mut uf = UnionFind::new(g.vertices());
            for f in crate::bits::iter(mask).chain(self.contracted.iter().copied()) {
                let (u, v) = g.edge(f);
                uf.union(u, v);
            }
            let (u, v) = g.edge(e);
            return uf.find(u) == uf.find(v);
        }
        self.rank_mask(mask | (1 << e)) == self.rank_mask(mask)
    }

    pub fn rank(&self, set: &[usize]) -> Result<usize> {
        let set = self.check(set)?;
        Ok(self.rank_unchecked(&set))
    }

    pub fn full_rank(&self) -> usize {
        self.rank_unchecked(&self.elements())
    }

    pub fn is_independent(&self, set: &[usize]) -> Result<bool> {
        let set = self.check(set)?;
        Ok(self.rank_unchecked(&set) == set.len())
    }

    /// True iff `rank(S ∪ {e}) = rank(S)`; in particular true when `e ∈ S`.
    pub fn in_span(&self, set: &[usize], e: usize) -> Result<bool> {
        let set = self.check(set)?;
        self.check(&[e])?;
        if set.binary_search(&e).is_ok() {
            return Ok(true);
        }
        let mut with = set.clone();
        with.push(e);
        Ok(self.rank_unchecked(&with) == self.rank_unchecked(&set))
    }

    /// `M / contract \ delete`, keeping element ids.
    pub fn minor(&self, contract: &[usize], delete: &[usize]) -> Result<Matroid> {
        let contract = self.check(contract)?;
        let delete = self.check(delete)?;
        if let Some(&e) = contract.iter().find(|e| delete.binary_search(e).is_ok()) {
            return Err(Error::MinorOverlap(e));
        }
        let mut minor = self.clone();
        minor.contracted.extend(&contract);
        minor.contracted.sort_unstable();
        minor.deleted.extend(&delete);
        minor.deleted.sort_unstable();
        for &e in contract.iter().chain(&delete) {
            minor.removed[e] = true;
        }
        minor.contracted_rank = self.base_rank(&minor.contracted);
        Ok(minor)
    }

    /// Restriction to the given elements (everything else deleted).
    pub fn restrict(&self, keep: &[usize]) -> Result<Matroid> {
        let keep = self.check(keep)?;
        let delete: Vec<usize> = self.elements().into_iter().filter(|e| keep.binary_search(e).is_err()).collect();
        self.minor(&[], &delete)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> Matroid {
        Matroid::graphic(Multigraph::cycle(3)).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(triangle().rank(&[0, 1, 2]).unwrap(), 2);
        let cotri = Matroid::cographic(Multigraph::cycle(3)).unwrap();
        assert_eq!(cotri.rank(&[0, 1, 2]).unwrap(), 1);
        assert_eq!(Matroid::r10().full_rank(), 5);
        assert!(matches!(triangle().rank(&[3]), Err(Error::ElementOutOfRange { id: 3, n: 3 })));
    }

    #[test]
    fn span_examples() {
        let tri = triangle();
        assert!(tri.in_span(&[0, 1], 2).unwrap());
        assert!(!tri.in_span(&[], 2).unwrap());
        assert!(tri.in_span(&[2], 2).unwrap());
        let path = Matroid::graphic(Multigraph::new(3, vec![(0, 1), (1, 2)]).unwrap()).unwrap();
        assert!(!path.in_span(&[0], 1).unwrap());
    }

    #[test]
    fn contracting_a_triangle_edge_makes_the_rest_parallel() {
        let m = triangle().minor(&[0], &[]).unwrap();
        assert_eq!(m.elements(), vec![1, 2]);
        assert_eq!(m.rank(&[1]).unwrap(), 1);
        assert_eq!(m.rank(&[1, 2]).unwrap(), 1);
        assert!(matches!(m.rank(&[0]), Err(Error::RemovedElement(0))));
        assert!(matches!(triangle().minor(&[0], &[0]), Err(Error::MinorOverlap(0))));
    }

    #[test]
    fn uniform_deletion_matches_smaller_uniform() {
        let m = Matroid::uniform(4, 2).unwrap().minor(&[], &[3]).unwrap();
        let small = Matroid::uniform(3, 2).unwrap();
        for mask in 0u64..8 {
            let s = crate::bits::elements(mask);
            assert_eq!(m.rank(&s).unwrap(), small.rank(&s).unwrap());
        }
    }

    #[test]
    fn graphic_contraction_equals_merged_graph() {
        let g = Multigraph::complete(4);
        let m = Matroid::graphic(g.clone()).unwrap().minor(&[0, 5], &[]).unwrap();
        let merged = g.contract_edges(&[0, 5]);
        assert_eq!(merged.edge_count(), g.edge_count());
        for mask in 0u64..64 {
            if mask & 0b100001 != 0 {
                continue;
            }
            let s = crate::bits::elements(mask);
            assert_eq!(m.rank(&s).unwrap(), merged.forest_rank(s.iter().copied()));
        }
    }

    #[test]
    fn loops_are_rejected() {
        assert!(matches!(Matroid::graphic(Multigraph::new(1, vec![(0, 0)]).unwrap()), Err(Error::Loop(0))));
        let path = Multigraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert!(matches!(Matroid::cographic(path), Err(Error::Loop(0))));
        assert!(Matroid::binary(Gf2Matrix::from_rows(vec![0b01], 2).unwrap()).is_err());
        assert!(Matroid::transversal(Bipartite::new(2, 1, &[(0, 0)]).unwrap()).is_err());
    }

    #[test]
    fn cographic_dual_identity() {
        let g = Multigraph::complete(5);
        let m = Matroid::cographic(g.clone()).unwrap();
        assert_eq!(m.full_rank(), g.edge_count() - (g.vertices() - g.components()));
    }

    fn sample_matroids() -> Vec<Matroid> {
        let mut g = Multigraph::complete(4).edges().to_vec();
        g.push((0, 1));
        let multi = Multigraph::new(4, g).unwrap();
        vec![
            Matroid::uniform(7, 3).unwrap(),
            Matroid::graphic(multi.clone()).unwrap(),
            Matroid::cographic(multi).unwrap(),
            Matroid::laminar(LaminarFamily::parse("cap 3 : 0 1 2 3 4 5 6\ncap 1 : 0 1\ncap 2 : 2 3 4\n").unwrap()).unwrap(),
            Matroid::transversal(Bipartite::new(6, 3, &[(0, 0), (1, 0), (1, 1), (2, 1), (3, 2), (4, 2), (5, 0), (5, 2)]).unwrap()).unwrap(),
            Matroid::r10(),
        ]
    }

    proptest! {
        #[test]
        fn rank_is_submodular_and_bounded(s in 0u64..1024, t in 0u64..1024) {
            for m in sample_matroids() {
                let full = crate::bits::full(m.id_space());
                let (s, t) = (s & full, t & full);
                let r = |x: u64| m.rank_mask(x);
                prop_assert!(r(s) + r(t) >= r(s | t) + r(s & t));
                prop_assert!(r(s) <= s.count_ones() as usize);
                prop_assert!(r(s & t) <= r(s));
                prop_assert_eq!(r(0), 0);
            }
        }

        #[test]
        fn minor_rank_formula(c in 0u64..1024, d in 0u64..1024, s in 0u64..1024) {
            for m in sample_matroids() {
                let full = crate::bits::full(m.id_space());
                let c = c & full;
                let d = d & full & !c;
                let s = s & full & !c & !d;
                let minor = m.minor(&crate::bits::elements(c), &crate::bits::elements(d)).unwrap();
                prop_assert_eq!(minor.rank_mask(s), m.rank_mask(s | c) - m.rank_mask(c));
                // a minor of a minor composes
                if let Some(e) = crate::bits::iter(s).next() {
                    let twice = minor.minor(&[e], &[]).unwrap();
                    let rest = s & !(1 << e);
                    prop_assert_eq!(twice.rank_mask(rest), m.rank_mask(rest | c | (1 << e)) - m.rank_mask(c | (1 << e)));
                }
            }
        }

        #[test]
        fn mask_span_agrees_with_rank(s in 0u64..64, e in 0usize..6) {
            let m = Matroid::graphic(Multigraph::complete(4)).unwrap().minor(&[0], &[]).unwrap();
            let s = s & !1;
            if e != 0 {
                let expected = m.rank_mask(s | (1 << e)) == m.rank_mask(s);
                prop_assert_eq!(m.spans_mask(s, e), expected);
            }
        }
    }
}
