use super::graph::{content_lines, parse_usize};
use crate::error::{Error, Result};

/// Bipartite graph with left vertices `0..left` (the matroid's elements) and right vertices `0..right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartite {
    left: usize,
    right: usize,
    adj: Vec<Vec<usize>>,
}

impl Bipartite {
    pub fn new(left: usize, right: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); left];
        for &(u, v) in edges {
            if u >= left {
                return Err(Error::ElementOutOfRange { id: u, n: left });
            }
            if v >= right {
                return Err(Error::ElementOutOfRange { id: v, n: right });
            }
            adj[u].push(v);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { left, right, adj })
    }

    /// Parses `bipartite |U| |V|` followed by `u v` edge lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (line, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty bipartite file".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "bipartite" {
            return Err(Error::Parse { line, msg: "expected `bipartite <|U|> <|V|>`".into() });
        }
        let left = parse_usize(fields[1], line)?;
        let right = parse_usize(fields[2], line)?;
        let mut edges = Vec::new();
        for (line, row) in lines {
            let ends: Vec<&str> = row.split_whitespace().collect();
            if ends.len() != 2 {
                return Err(Error::Parse { line, msg: "expected an edge `u v`".into() });
            }
            let (u, v) = (parse_usize(ends[0], line)?, parse_usize(ends[1], line)?);
            if u >= left || v >= right {
                return Err(Error::Parse { line, msg: "endpoint out of range".into() });
            }
            edges.push((u, v));
        }
        Self::new(left, right, &edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("bipartite {} {}\n", self.left, self.right);
        for (u, list) in self.adj.iter().enumerate() {
            for v in list {
                out.push_str(&format!("{u} {v}\n"));
            }
        }
        out
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    /// Size of a maximum matching covering only the given left vertices (augmenting paths).
    pub fn matching_size(&self, lefts: impl IntoIterator<Item = usize>) -> usize {
        let mut owner = vec![usize::MAX; self.right];
        let mut size = 0;
        for u in lefts {
            let mut seen = vec![false; self.right];
            if self.augment(u, &mut owner, &mut seen) {
                size += 1;
            }
        }
        size
    }

    fn augment(&self, u: usize, owner: &mut [usize], seen: &mut [bool]) -> bool {
        for &v in &self.adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v] == usize::MAX || self.augment(owner[v], owner, seen) {
                owner[v] = u;
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_respects_shared_right_vertex() {
        let g = Bipartite::parse("bipartite 3 2\n0 0\n1 0\n2 0\n2 1\n").unwrap();
        assert_eq!(g.matching_size([0, 1]), 1);
        assert_eq!(g.matching_size([0, 1, 2]), 2);
        assert_eq!(Bipartite::parse(&g.to_text()).unwrap(), g);
    }
}
