//! Small instances shipped with the repository.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::matroid::Multigraph;
use crate::regular::DecompositionTree;

macro_rules! shipped {
    ($($name:literal),* $(,)?) => {
        const FILES: &[(&str, &str)] = &[$(($name, include_str!(concat!("../../../fixtures/regular/", $name)))),*];
    };
}

shipped!(
    "triangle.graph",
    "k4.graph",
    "four_cycle.binary",
    "k23.binary",
    "r10_cographic_k4.binary",
    "two_triangles.dec",
    "k4_three_sum.dec",
    "r10_cographic_k4.dec",
    "bad_three_sum.dec",
);

/// Valid regular decompositions, by name.
pub const REGULAR: &[&str] = &["two_triangles", "k4_three_sum", "r10_cographic_k4"];

/// Contents of a shipped fixture file.
pub fn resolve(name: &str) -> Result<String> {
    FILES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .ok_or_else(|| Error::Io(std::io::Error::new(std::io::ErrorKind::NotFound, format!("no shipped fixture `{name}`"))))
}

/// A shipped decomposition such as `two_triangles`.
pub fn regular(name: &str) -> Result<DecompositionTree> {
    DecompositionTree::parse(&resolve(&format!("{name}.dec"))?, &resolve)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for smaller in permutations(n - 1) {
        for slot in 0..n {
            let mut p = smaller.clone();
            p.insert(slot, n - 1);
            out.push(p);
        }
    }
    out
}

fn canonical(edges: &[(usize, usize)], perms: &[Vec<usize>]) -> Vec<(usize, usize)> {
    perms
        .iter()
        .map(|p| {
            let mut relabeled: Vec<(usize, usize)> =
                edges.iter().map(|&(u, v)| (p[u].min(p[v]), p[u].max(p[v]))).collect();
            relabeled.sort_unstable();
            relabeled
        })
        .min()
        .unwrap_or_default()
}

/// Every loopless multigraph with at most `max_vertices` vertices and `1..=max_edges` edges
/// and no isolated vertices, one per isomorphism class.
pub fn multigraphs(max_vertices: usize, max_edges: usize) -> Vec<Multigraph> {
    let pairs: Vec<(usize, usize)> = (0..max_vertices).flat_map(|u| (u + 1..max_vertices).map(move |v| (u, v))).collect();
    let perms = permutations(max_vertices);
    let mut seen = BTreeSet::new();
    let mut stack: Vec<(Vec<(usize, usize)>, usize)> = vec![(Vec::new(), 0)];
    while let Some((edges, from)) = stack.pop() {
        if !edges.is_empty() {
            seen.insert(canonical(&edges, &perms));
        }
        if edges.len() == max_edges {
            continue;
        }
        for (k, &pair) in pairs.iter().enumerate().skip(from) {
            let mut next = edges.clone();
            next.push(pair);
            stack.push((next, k));
        }
    }
    seen.into_iter()
        .map(|edges| {
            let mut used: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
            used.sort_unstable();
            used.dedup();
            let dense = edges.iter().map(|&(u, v)| (used.binary_search(&u).unwrap_or(0), used.binary_search(&v).unwrap_or(0))).collect();
            Multigraph::new(used.len(), dense).expect("relabelled vertices are dense")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_multigraph_counts() {
        // one edge; parallel pair, path, matching; triple edge, doubled path, triangle
        assert_eq!(multigraphs(3, 1).len(), 1);
        assert_eq!(multigraphs(4, 2).len(), 4);
        assert_eq!(multigraphs(3, 3).len(), 6);
        for g in multigraphs(4, 3) {
            assert!(g.degrees().iter().all(|&d| d > 0));
            assert!(g.self_loops().is_empty());
        }
    }
}
