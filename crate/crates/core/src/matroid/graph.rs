use crate::error::{Error, Result};

/// Disjoint-set forest over `0..n`.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns true when `a` and `b` were in different components.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// An undirected multigraph with edges indexed `0..m` in insertion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    stripped: Vec<usize>,
}

impl Multigraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(u, v) in &edges {
            let bad = u.max(v);
            if bad >= vertices {
                return Err(Error::ElementOutOfRange { id: bad, n: vertices });
            }
        }
        Ok(Self { vertices, edges, stripped: Vec::new() })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self { vertices: n, edges, stripped: Vec::new() }
    }

    pub fn cycle(n: usize) -> Self {
        let edges = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Self { vertices: n, edges, stripped: Vec::new() }
    }

    /// Parses the `graph n_vertices n_edges` format and strips isolated vertices.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (line, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty graph file".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "graph" {
            return Err(Error::Parse { line, msg: "expected `graph <n_vertices> <n_edges>`".into() });
        }
        let vertices = parse_usize(fields[1], line)?;
        let count = parse_usize(fields[2], line)?;
        let mut edges = Vec::with_capacity(count);
        for (line, row) in lines {
            let ends: Vec<&str> = row.split_whitespace().collect();
            if ends.len() != 2 {
                return Err(Error::Parse { line, msg: "expected an edge `u v`".into() });
            }
            let (u, v) = (parse_usize(ends[0], line)?, parse_usize(ends[1], line)?);
            if u >= vertices || v >= vertices {
                return Err(Error::Parse { line, msg: format!("vertex out of range 0..{vertices}") });
            }
            edges.push((u, v));
        }
        if edges.len() != count {
            return Err(Error::Parse { line: 1, msg: format!("header declares {count} edges, found {}", edges.len()) });
        }
        Ok(Self { vertices, edges, stripped: Vec::new() }.strip_isolated())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("graph {} {}\n", self.vertices, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Removes vertices without incident edges, relabelling the rest densely.
    /// The removed (original) vertex ids are remembered and a warning is logged.
    pub fn strip_isolated(mut self) -> Self {
        let mut used = vec![false; self.vertices];
        for &(u, v) in &self.edges {
            used[u] = true;
            used[v] = true;
        }
        let stripped: Vec<usize> = (0..self.vertices).filter(|&v| !used[v]).collect();
        if stripped.is_empty() {
            return self;
        }
        log::warn!("stripping isolated vertices {stripped:?}");
        let mut relabel = vec![usize::MAX; self.vertices];
        let mut next = 0;
        for v in 0..self.vertices {
            if used[v] {
                relabel[v] = next;
                next += 1;
            }
        }
        for edge in &mut self.edges {
            *edge = (relabel[edge.0], relabel[edge.1]);
        }
        self.vertices = next;
        self.stripped.extend(stripped);
        self
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Vertices removed by [`Multigraph::strip_isolated`], in original numbering.
    pub fn stripped_vertices(&self) -> &[usize] {
        &self.stripped
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn self_loops(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].0 == self.edges[e].1).collect()
    }

    /// Size of a spanning forest of the given edges.
    pub fn forest_rank(&self, edges: impl IntoIterator<Item = usize>) -> usize {
        let mut uf = UnionFind::new(self.vertices);
        edges.into_iter().filter(|&e| uf.union(self.edges[e].0, self.edges[e].1)).count()
    }

    pub fn components(&self) -> usize {
        self.vertices - self.forest_rank(0..self.edges.len())
    }

    /// Edges whose removal disconnects their endpoints.
    pub fn bridges(&self) -> Vec<usize> {
        let full = self.forest_rank(0..self.edges.len());
        (0..self.edges.len())
            .filter(|&b| self.forest_rank((0..self.edges.len()).filter(|&e| e != b)) < full)
            .collect()
    }

    /// Merges the endpoints of each given edge. Every edge keeps its id; contracted edges
    /// (and any edge whose endpoints get identified) become self-loops.
    pub fn contract_edges(&self, contract: &[usize]) -> Multigraph {
        let mut uf = UnionFind::new(self.vertices);
        for &e in contract {
            uf.union(self.edges[e].0, self.edges[e].1);
        }
        let mut relabel = vec![usize::MAX; self.vertices];
        let mut next = 0;
        for v in 0..self.vertices {
            let root = uf.find(v);
            if relabel[root] == usize::MAX {
                relabel[root] = next;
                next += 1;
            }
        }
        let edges = self.edges.iter().map(|&(u, v)| (relabel[uf.find(u)], relabel[uf.find(v)])).collect();
        Multigraph { vertices: next, edges, stripped: Vec::new() }
    }
}

pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub(crate) fn parse_usize(field: &str, line: usize) -> Result<usize> {
    field.parse().map_err(|_| Error::Parse { line, msg: format!("expected a non-negative integer, got `{field}`") })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_strips_isolated_vertices() {
        let g = Multigraph::parse("graph 4 2\n0 2\n2 0\n").unwrap();
        assert_eq!(g.vertices(), 2);
        assert_eq!(g.stripped_vertices(), &[1, 3]);
        assert_eq!(g.edges(), &[(0, 1), (1, 0)]);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = Multigraph::parse("graph 2 1\n0 5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(Multigraph::parse("graph 2 2\n0 1\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = Multigraph::complete(4);
        assert_eq!(Multigraph::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn contraction_preserves_edge_count() {
        let tri = Multigraph::cycle(3);
        let merged = tri.contract_edges(&[0]);
        assert_eq!(merged.edge_count(), 3);
        assert_eq!(merged.vertices(), 2);
        assert_eq!(merged.self_loops(), vec![0]);
    }

    #[test]
    fn bridges_of_a_path_and_a_cycle() {
        let path = Multigraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.bridges(), vec![0, 1]);
        assert!(Multigraph::cycle(4).bridges().is_empty());
    }
}
