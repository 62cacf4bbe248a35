use std::collections::VecDeque;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::matroid::Bipartite;
use crate::ocrs::{GreedyFamily, Scheme};
use crate::rational::{self, Rational};

/// Most label combinations [`TransversalScheme::realizations`] will enumerate.
pub const LABELING_LIMIT: usize = 1 << 16;

/// Fractional assignment `y_{i,j}` of each left vertex to its neighbours.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowAssignment {
    /// Per left vertex, `(j, y_{i,j})` with positive weights summing to one; empty for
    /// isolated vertices with `x_i = 0`.
    pub rows: Vec<Vec<(usize, Rational)>>,
    right: usize,
}

impl FlowAssignment {
    /// `Σ_i x_i y_{i,j}` per right vertex.
    pub fn loads(&self, x: &[Rational]) -> Vec<Rational> {
        let mut load = vec![Rational::zero(); self.right];
        for (row, xi) in self.rows.iter().zip(x) {
            for (j, y) in row {
                load[*j] += xi * y;
            }
        }
        load
    }
}

struct Network {
    cap: Vec<Vec<Rational>>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Self { cap: vec![vec![Rational::zero(); nodes]; nodes], adj: vec![Vec::new(); nodes] }
    }

    fn add(&mut self, u: usize, v: usize, c: Rational) {
        if self.cap[u][v].is_zero() && self.cap[v][u].is_zero() {
            self.adj[u].push(v);
            self.adj[v].push(u);
        }
        self.cap[u][v] += c;
    }

    fn residual_parents(&self, source: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.adj.len()];
        parent[source] = Some(source);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if parent[v].is_none() && self.cap[u][v].is_positive() {
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        parent
    }

    /// Edmonds–Karp; leaves residual capacities in `cap` and returns the flow value.
    fn max_flow(&mut self, source: usize, sink: usize) -> Rational {
        let mut value = Rational::zero();
        loop {
            let parent = self.residual_parents(source);
            if parent[sink].is_none() {
                return value;
            }
            let mut path = Vec::new();
            let mut v = sink;
            while v != source {
                let u = parent[v].expect("on path");
                path.push((u, v));
                v = u;
            }
            let push = path.iter().map(|&(u, v)| self.cap[u][v].clone()).min().expect("nonempty path");
            for (u, v) in path {
                self.cap[u][v] -= &push;
                self.cap[v][u] += &push;
            }
            value += push;
        }
    }
}

/// Solves `Σ_j y_{i,j} = 1`, `Σ_i x_i y_{i,j} ≤ b` by max flow with exact rationals.
/// A deficit reports the left vertices on the source side of a minimum cut, a set `S` with
/// `x(S) > b·|N(S)|`.
pub fn transversal_flow(graph: &Bipartite, x: &[Rational], b: &Rational) -> Result<FlowAssignment> {
    let (left, right) = (graph.left(), graph.right());
    if x.len() != left {
        return Err(Error::InvalidParameter(format!("{} marginals for {left} left vertices", x.len())));
    }
    if !b.is_positive() {
        return Err(Error::InvalidParameter(format!("b = {b} must be positive")));
    }
    let (source, sink) = (left + right, left + right + 1);
    let required = rational::sum(x);
    let unbounded = &required + Rational::one();
    let mut net = Network::new(left + right + 2);
    for (i, xi) in x.iter().enumerate() {
        if xi.is_positive() {
            net.add(source, i, xi.clone());
            for &j in graph.neighbors(i) {
                net.add(i, left + j, unbounded.clone());
            }
        }
    }
    for j in 0..right {
        net.add(left + j, sink, b.clone());
    }
    let value = net.max_flow(source, sink);
    if value < required {
        let parent = net.residual_parents(source);
        let subset = (0..left).filter(|&i| parent[i].is_some()).collect();
        return Err(Error::FlowDeficit { value: value.to_string(), required: required.to_string(), subset });
    }
    let rows = (0..left)
        .map(|i| {
            if x[i].is_zero() {
                return graph.neighbors(i).first().map(|&j| (j, Rational::one())).into_iter().collect();
            }
            graph
                .neighbors(i)
                .iter()
                .filter_map(|&j| {
                    // flow on i → j is what the reverse residual edge accumulated
                    let f = &net.cap[left + j][i];
                    f.is_positive().then(|| (j, f / &x[i]))
                })
                .collect()
        })
        .collect();
    Ok(FlowAssignment { rows, right })
}

/// `F = {S : labels of S pairwise distinct}`; unlabeled elements are never accepted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelFamily {
    pub labels: Vec<Option<usize>>,
}

impl GreedyFamily for LabelFamily {
    fn ground_size(&self) -> usize {
        self.labels.len()
    }

    fn contains(&self, set: &[usize]) -> bool {
        let mut seen = std::collections::HashSet::new();
        set.iter().all(|&e| self.labels[e].is_some_and(|l| seen.insert(l)))
    }

    fn always_extends(&self, active: &[usize], item: usize) -> bool {
        let Some(label) = self.labels[item] else { return false };
        !active.iter().any(|&e| e != item && self.labels[e] == Some(label))
    }

    fn extending(&self, active: &[usize]) -> Vec<bool> {
        let mut count = std::collections::HashMap::new();
        for &e in active {
            if let Some(l) = self.labels[e] {
                *count.entry(l).or_insert(0usize) += 1;
            }
        }
        active.iter().map(|&e| self.labels[e].is_some_and(|l| count[&l] == 1)).collect()
    }
}

/// Draws each label `Y_i` from row `i` of a [`FlowAssignment`], independently of the arrivals.
#[derive(Clone, Debug)]
pub struct TransversalScheme {
    pub assignment: FlowAssignment,
}

pub fn transversal_prepare(graph: &Bipartite, x: &[Rational], b: &Rational) -> Result<TransversalScheme> {
    Ok(TransversalScheme { assignment: transversal_flow(graph, x, b)? })
}

impl Scheme for TransversalScheme {
    fn ground_size(&self) -> usize {
        self.assignment.rows.len()
    }

    fn realize(&self, rng: &mut dyn RngCore) -> Arc<dyn GreedyFamily> {
        let labels = self
            .assignment
            .rows
            .iter()
            .map(|row| {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (j, y) in row {
                    acc += rational::to_f64(y);
                    if u < acc {
                        return Some(*j);
                    }
                }
                row.last().map(|(j, _)| *j)
            })
            .collect();
        Arc::new(LabelFamily { labels })
    }

    fn realizations(&self) -> Result<Vec<(Arc<dyn GreedyFamily>, Rational)>> {
        let rows = &self.assignment.rows;
        let count = rows.iter().try_fold(1usize, |acc, row| acc.checked_mul(row.len().max(1)));
        match count {
            Some(c) if c <= LABELING_LIMIT => {}
            _ => {
                return Err(Error::TooLarge { what: "label combinations", size: count.unwrap_or(usize::MAX), limit: LABELING_LIMIT })
            }
        }
        let mut out: Vec<(Vec<Option<usize>>, Rational)> = vec![(Vec::new(), Rational::one())];
        for row in rows {
            out = if row.is_empty() {
                out.into_iter().map(|(mut l, w)| { l.push(None); (l, w) }).collect()
            } else {
                out.into_iter()
                    .flat_map(|(l, w)| row.iter().map(move |(j, y)| {
                        let mut l = l.clone();
                        l.push(Some(*j));
                        (l, &w * y)
                    }))
                    .collect()
            };
        }
        Ok(out.into_iter().map(|(labels, w)| (Arc::new(LabelFamily { labels }) as Arc<dyn GreedyFamily>, w)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits;
    use crate::dist::{parity_dist, product_dist};
    use crate::matroid::{in_scaled_polytope, Matroid};
    use crate::ocrs::exact_selectability;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn single_edge() {
        let g = Bipartite::new(1, 1, &[(0, 0)]).unwrap();
        let y = transversal_flow(&g, &[rat(1, 3)], &rat(1, 2)).unwrap();
        assert_eq!(y.rows, vec![vec![(0, int(1))]]);
    }

    #[test]
    fn shared_right_vertex_is_tight() {
        let b = rat(1, 2);
        let g = Bipartite::new(2, 1, &[(0, 0), (1, 0)]).unwrap();
        let x = vec![&b / int(2), &b / int(2)];
        let y = transversal_flow(&g, &x, &b).unwrap();
        assert_eq!(y.rows, vec![vec![(0, int(1))], vec![(0, int(1))]]);
        assert_eq!(y.loads(&x), vec![b]);
    }

    #[test]
    fn zero_marginal_takes_lowest_neighbor() {
        let g = Bipartite::new(2, 3, &[(0, 2), (0, 1), (1, 0)]).unwrap();
        let y = transversal_flow(&g, &[int(0), rat(1, 2)], &rat(1, 2)).unwrap();
        assert_eq!(y.rows[0], vec![(1, int(1))]);
    }

    #[test]
    fn deficit_reports_hall_violator() {
        let g = Bipartite::new(3, 2, &[(0, 0), (1, 0), (2, 1)]).unwrap();
        let err = transversal_flow(&g, &[rat(1, 2), rat(1, 2), rat(1, 4)], &rat(1, 2)).unwrap_err();
        let Error::FlowDeficit { subset, .. } = err else { panic!("expected deficit") };
        assert_eq!(subset, vec![0, 1]);
    }

    #[test]
    fn perfect_matching_selects_everything() {
        let g = Bipartite::new(3, 3, &[(0, 0), (1, 1), (2, 2)]).unwrap();
        let x = vec![rat(1, 2); 3];
        let scheme = transversal_prepare(&g, &x, &rat(1, 2)).unwrap();
        let d = product_dist(&x).unwrap();
        assert_eq!(exact_selectability(&scheme, &d).unwrap(), vec![Some(int(1)); 3]);
    }

    #[test]
    fn pairwise_independent_guarantee() {
        // five left vertices on a cycle of right vertices, pairwise independent parity arrivals
        let edges: Vec<(usize, usize)> = (0..5).flat_map(|i| [(i, i), (i, (i + 1) % 5)]).collect();
        let g = Bipartite::new(5, 5, &edges).unwrap();
        let d = parity_dist(&[1, 2, 3, 4, 5], 3).unwrap();
        let x = d.marginals();
        let b = rat(1, 2);
        assert!(in_scaled_polytope(&Matroid::transversal(g.clone()).unwrap(), &x, &b).unwrap());
        let scheme = transversal_prepare(&g, &x, &b).unwrap();
        let sel = exact_selectability(&scheme, &d).unwrap();
        assert!(sel.into_iter().flatten().all(|s| s >= int(1) - &b));
    }

    fn small_instance() -> impl Strategy<Value = (Bipartite, Vec<Rational>)> {
        (1usize..6, 1usize..5).prop_flat_map(|(l, r)| {
            (
                proptest::collection::vec(proptest::collection::vec(0..r, 1..=r), l),
                proptest::collection::vec(0i64..=8, l),
            )
                .prop_map(move |(adj, xs)| {
                    let edges: Vec<_> = adj.iter().enumerate().flat_map(|(i, js)| js.iter().map(move |&j| (i, j))).collect();
                    let g = Bipartite::new(l, r, &edges).unwrap();
                    (g, xs.into_iter().map(|v| rat(v, 16)).collect())
                })
        })
    }

    proptest! {
        #[test]
        fn flow_invariants((g, x) in small_instance()) {
            let b = rat(1, 2);
            let feasible = in_scaled_polytope(&Matroid::transversal(g.clone()).unwrap(), &x, &b).unwrap();
            match transversal_flow(&g, &x, &b) {
                Ok(y) => {
                    prop_assert!(feasible);
                    for (i, row) in y.rows.iter().enumerate() {
                        prop_assert_eq!(rational::sum(row.iter().map(|(_, v)| v)), int(1));
                        prop_assert!(row.iter().all(|(j, _)| g.neighbors(i).contains(j)));
                    }
                    prop_assert!(y.loads(&x).iter().all(|l| l <= &b));
                    let scheme = TransversalScheme { assignment: y };
                    for (family, _) in scheme.realizations().unwrap() {
                        for mask in 0..1u64 << g.left() {
                            let set = bits::elements(mask);
                            if family.contains(&set) {
                                prop_assert_eq!(g.matching_size(set.iter().copied()), set.len());
                            }
                        }
                    }
                }
                Err(Error::FlowDeficit { subset, .. }) => {
                    prop_assert!(!feasible);
                    let mut nbrs: Vec<usize> = subset.iter().flat_map(|&i| g.neighbors(i).to_vec()).collect();
                    nbrs.sort_unstable();
                    nbrs.dedup();
                    let mass = rational::sum(subset.iter().map(|&i| &x[i]));
                    prop_assert!(mass > &b * int(nbrs.len() as i64));
                }
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
