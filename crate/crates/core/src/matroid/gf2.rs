use super::graph::{content_lines, parse_usize, Multigraph};
use crate::error::{Error, Result};

const MAX_DIM: usize = 64;

/// A GF(2) matrix with at most 64 rows and 64 columns, stored row-wise and column-wise as bit masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: Vec<u64>,
    cols: usize,
    columns: Vec<u64>,
}

impl Gf2Matrix {
    /// Builds a matrix from rows; bit `j` of a row is the entry in column `j`.
    pub fn from_rows(rows: Vec<u64>, cols: usize) -> Result<Self> {
        if cols > MAX_DIM || rows.len() > MAX_DIM {
            return Err(Error::TooLarge { what: "binary matrix dimension", size: cols.max(rows.len()), limit: MAX_DIM });
        }
        let columns = (0..cols)
            .map(|j| rows.iter().enumerate().fold(0u64, |acc, (i, r)| acc | (((r >> j) & 1) << i)))
            .collect();
        Ok(Self { rows, cols, columns })
    }

    /// The standard representation `[I5 | A]` of R10, with `A` the circulant of `11001`.
    pub fn r10() -> Self {
        let a = ["11001", "11100", "01110", "00111", "10011"];
        let rows = a
            .iter()
            .enumerate()
            .map(|(i, pattern)| {
                let tail = pattern.bytes().enumerate().fold(0u64, |acc, (j, b)| acc | (((b - b'0') as u64) << (5 + j)));
                (1u64 << i) | tail
            })
            .collect();
        Self::from_rows(rows, 10).expect("fixed size")
    }

    /// Vertex-edge incidence matrix (represents the graphic matroid). Self-loops give zero columns.
    pub fn incidence(graph: &Multigraph) -> Result<Self> {
        let mut rows = vec![0u64; graph.vertices()];
        if graph.edge_count() > MAX_DIM {
            return Err(Error::TooLarge { what: "binary matrix dimension", size: graph.edge_count(), limit: MAX_DIM });
        }
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            if u != v {
                rows[u] ^= 1 << e;
                rows[v] ^= 1 << e;
            }
        }
        Self::from_rows(reduce_rows(&rows), graph.edge_count())
    }

    /// A matrix whose row space is the cycle space of the graph (represents the cographic matroid).
    pub fn cycle_space(graph: &Multigraph) -> Result<Self> {
        let incidence = Self::incidence(graph)?;
        Self::from_rows(nullspace(&incidence.rows, incidence.cols), incidence.cols)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (line, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty binary matrix file".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "binary" {
            return Err(Error::Parse { line, msg: "expected `binary <rows> <cols>`".into() });
        }
        let nrows = parse_usize(fields[1], line)?;
        let ncols = parse_usize(fields[2], line)?;
        if ncols > MAX_DIM || nrows > MAX_DIM {
            return Err(Error::Parse { line, msg: format!("dimensions above {MAX_DIM} are not supported") });
        }
        let mut rows = Vec::with_capacity(nrows);
        for (line, row) in lines {
            let bits: String = row.chars().filter(|c| !c.is_whitespace()).collect();
            if bits.len() != ncols || !bits.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::Parse { line, msg: format!("expected {ncols} entries of 0/1") });
            }
            rows.push(bits.bytes().enumerate().fold(0u64, |acc, (j, b)| acc | (((b - b'0') as u64) << j)));
        }
        if rows.len() != nrows {
            return Err(Error::Parse { line: 1, msg: format!("header declares {nrows} rows, found {}", rows.len()) });
        }
        Self::from_rows(rows, ncols)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("binary {} {}\n", self.rows.len(), self.cols);
        for row in &self.rows {
            let bits: Vec<String> = (0..self.cols).map(|j| ((row >> j) & 1).to_string()).collect();
            out.push_str(&bits.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Column `j` as a bit mask over rows.
    pub fn column(&self, j: usize) -> u64 {
        self.columns[j]
    }

    pub fn column_rank(&self, cols: impl IntoIterator<Item = usize>) -> usize {
        rank_of(cols.into_iter().map(|j| self.columns[j]))
    }

    /// Basis of the cycle space: all `v` with `Σ_j v_j · column_j = 0`.
    pub fn kernel(&self) -> Vec<u64> {
        nullspace(&self.rows, self.cols)
    }
}

/// Rank of a family of GF(2) vectors.
pub fn rank_of(vectors: impl IntoIterator<Item = u64>) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for mut v in vectors {
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                rank += 1;
                break;
            }
            v ^= basis[top];
        }
    }
    rank
}

/// Row-reduces and drops zero rows.
fn reduce_rows(rows: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
        }
    }
    basis
}

/// Basis of `{u ∈ GF(2)^ncols : <row, u> = 0 for every row}`.
pub fn nullspace(rows: &[u64], ncols: usize) -> Vec<u64> {
    // Reduced row echelon form with pivot columns.
    let mut pivots: Vec<(usize, u64)> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &(p, b) in &pivots {
            if (v >> p) & 1 == 1 {
                v ^= b;
            }
        }
        if v == 0 {
            continue;
        }
        let p = v.trailing_zeros() as usize;
        for entry in pivots.iter_mut() {
            if (entry.1 >> p) & 1 == 1 {
                entry.1 ^= v;
            }
        }
        pivots.push((p, v));
    }
    let pivot_mask = pivots.iter().fold(0u64, |acc, &(p, _)| acc | (1 << p));
    (0..ncols)
        .filter(|&f| (pivot_mask >> f) & 1 == 0)
        .map(|free| {
            let mut u = 1u64 << free;
            for &(p, row) in &pivots {
                if (row >> free) & 1 == 1 {
                    u |= 1 << p;
                }
            }
            u
        })
        .collect()
}

/// The binary k-sum of two represented matroids sharing the element ids in both id lists.
///
/// Cycles of the sum are the symmetric differences `C1 Δ C2` of cycles that agree on the shared
/// elements; the result represents the matroid on `ids1 Δ ids2` whose cycle space is exactly that.
/// Returns the representation and its column ids (sorted).
pub fn binary_sum(m1: &Gf2Matrix, ids1: &[usize], m2: &Gf2Matrix, ids2: &[usize]) -> Result<(Gf2Matrix, Vec<usize>)> {
    let mut union: Vec<usize> = ids1.iter().chain(ids2).copied().collect();
    union.sort_unstable();
    union.dedup();
    if union.len() > MAX_DIM {
        return Err(Error::TooLarge { what: "binary sum ground set", size: union.len(), limit: MAX_DIM });
    }
    let pos = |id: usize| union.binary_search(&id).expect("id in union");
    let lift = |v: u64, ids: &[usize]| ids.iter().enumerate().filter(|(j, _)| (v >> j) & 1 == 1).fold(0u64, |acc, (_, &id)| acc | (1 << pos(id)));
    let shared: Vec<usize> = ids1.iter().filter(|id| ids2.contains(id)).map(|&id| pos(id)).collect();
    let shared_mask = shared.iter().fold(0u64, |acc, &p| acc | (1 << p));
    let generators: Vec<u64> = m1.kernel().into_iter().map(|v| lift(v, ids1)).chain(m2.kernel().into_iter().map(|v| lift(v, ids2))).collect();
    // Combinations of generators that vanish on the shared coordinates.
    let constraint_rows: Vec<u64> = shared
        .iter()
        .map(|&p| generators.iter().enumerate().fold(0u64, |acc, (k, g)| acc | (((g >> p) & 1) << k)))
        .collect();
    let combos = nullspace(&constraint_rows, generators.len());
    let keep: Vec<usize> = (0..union.len()).filter(|p| (shared_mask >> p) & 1 == 0).collect();
    let cycles: Vec<u64> = combos
        .into_iter()
        .map(|c| {
            let v = generators.iter().enumerate().filter(|(k, _)| (c >> k) & 1 == 1).fold(0u64, |acc, (_, g)| acc ^ g);
            keep.iter().enumerate().fold(0u64, |acc, (j, &p)| acc | (((v >> p) & 1) << j))
        })
        .collect();
    let rows = nullspace(&cycles, keep.len());
    let ids = keep.iter().map(|&p| union[p]).collect();
    Ok((Gf2Matrix::from_rows(rows, keep.len())?, ids))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r10_has_rank_five() {
        let r10 = Gf2Matrix::r10();
        assert_eq!(r10.column_rank(0..10), 5);
        assert_eq!(r10.kernel().len(), 5);
    }

    #[test]
    fn parse_round_trip() {
        let r10 = Gf2Matrix::r10();
        assert_eq!(Gf2Matrix::parse(&r10.to_text()).unwrap(), r10);
        assert!(Gf2Matrix::parse("binary 1 2\n1 2\n").is_err());
    }

    #[test]
    fn kernel_vectors_are_cycles() {
        let k4 = Gf2Matrix::incidence(&Multigraph::complete(4)).unwrap();
        let kernel = k4.kernel();
        assert_eq!(kernel.len(), 3);
        for v in kernel {
            let sum = (0..6).filter(|j| (v >> j) & 1 == 1).fold(0u64, |acc, j| acc ^ k4.column(j));
            assert_eq!(sum, 0);
        }
    }

    #[test]
    fn two_sum_of_triangles_is_a_four_cycle() {
        let tri = Gf2Matrix::incidence(&Multigraph::cycle(3)).unwrap();
        let (sum, ids) = binary_sum(&tri, &[0, 1, 9], &tri, &[2, 3, 9]).unwrap();
        assert_eq!(ids, vec![0, 1, 2, 3]);
        assert_eq!(sum.column_rank(0..4), 3);
        for drop in 0..4 {
            assert_eq!(sum.column_rank((0..4).filter(|&j| j != drop)), 3);
        }
    }
}
