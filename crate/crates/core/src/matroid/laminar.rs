use super::graph::{content_lines, parse_usize};
use crate::error::{Error, Result};

/// One capacity constraint `|I ∩ members| ≤ cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacitySet {
    pub members: Vec<usize>,
    pub cap: usize,
}

/// A laminar family of capacity constraints over `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaminarFamily {
    n: usize,
    sets: Vec<CapacitySet>,
    containing: Vec<Vec<usize>>,
}

impl LaminarFamily {
    pub fn new(n: usize, sets: Vec<CapacitySet>) -> Result<Self> {
        let mut sets = sets;
        for set in &mut sets {
            set.members.sort_unstable();
            set.members.dedup();
            if let Some(&bad) = set.members.iter().find(|&&e| e >= n) {
                return Err(Error::ElementOutOfRange { id: bad, n });
            }
        }
        for (i, a) in sets.iter().enumerate() {
            for b in &sets[i + 1..] {
                let common = a.members.iter().filter(|e| b.members.binary_search(e).is_ok()).count();
                if common != 0 && common != a.members.len() && common != b.members.len() {
                    return Err(Error::NotLaminar(a.members.clone(), b.members.clone()));
                }
            }
        }
        let mut containing = vec![Vec::new(); n];
        for (idx, set) in sets.iter().enumerate() {
            for &e in &set.members {
                containing[e].push(idx);
            }
        }
        Ok(Self { n, sets, containing })
    }

    /// Parses lines `cap <c> : <ids>`. An optional first line `laminar <n>` fixes the ground size;
    /// otherwise it is one more than the largest id mentioned.
    pub fn parse(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut sets = Vec::new();
        for (line, row) in content_lines(text) {
            let fields: Vec<&str> = row.split_whitespace().collect();
            match fields.first() {
                Some(&"laminar") if declared.is_none() && sets.is_empty() && fields.len() == 2 => {
                    declared = Some(parse_usize(fields[1], line)?);
                }
                Some(&"cap") if fields.len() >= 3 && fields[2] == ":" => {
                    let cap = parse_usize(fields[1], line)?;
                    let members = fields[3..].iter().map(|f| parse_usize(f, line)).collect::<Result<Vec<_>>>()?;
                    sets.push(CapacitySet { members, cap });
                }
                _ => return Err(Error::Parse { line, msg: "expected `cap <c> : <id list>`".into() }),
            }
        }
        let n = declared.unwrap_or_else(|| sets.iter().flat_map(|s| s.members.iter()).max().map_or(0, |m| m + 1));
        Self::new(n, sets)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("laminar {}\n", self.n);
        for set in &self.sets {
            let ids: Vec<String> = set.members.iter().map(ToString::to_string).collect();
            out.push_str(&format!("cap {} : {}\n", set.cap, ids.join(" ")));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[CapacitySet] {
        &self.sets
    }

    /// Indices of the constraints containing `e`.
    pub fn containing(&self, e: usize) -> &[usize] {
        &self.containing[e]
    }

    /// Greedy rank: adds elements while every enclosing constraint has headroom.
    pub fn rank(&self, elements: impl IntoIterator<Item = usize>) -> usize {
        let mut used = vec![0usize; self.sets.len()];
        let mut rank = 0;
        for e in elements {
            if self.containing[e].iter().all(|&s| used[s] < self.sets[s].cap) {
                for &s in &self.containing[e] {
                    used[s] += 1;
                }
                rank += 1;
            }
        }
        rank
    }
}
