//! Regular matroids given as a tree of 1-, 2- and 3-sums over graphic, cographic and R10 leaves.
//!
//! Every leaf lists the global id of each of its local elements. Ids that occur in exactly one
//! leaf form the ground set `0..n` of the composed matroid; ids shared by two leaves are the
//! sum elements and must be declared in the `:z` list of the sum that joins them.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::RngCore;

use crate::bits;
use crate::dist::{relabel, subsample, ExplicitDist, SubsetDistribution};
use crate::error::{Error, Result};
use crate::matroid::{
    binary_sum, in_scaled_polytope, polytope_violation, rank_of, Gf2Matrix, Matroid, Multigraph, UnionFind,
};
use crate::mc::{self, McConfig};
use crate::ocrs::{exact_selectability, run_greedy, Deterministic, GreedyFamily, ScaleWrapper, Scheme};
use crate::rational::{int, rat, Rational};
use crate::structured::{chain_prepare, low_density_prepare, parallel_class_prepare, Chain};

/// Most combined realizations [`RegularScheme::realizations`] will enumerate.
pub const REALIZATION_LIMIT: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafKind {
    Graphic,
    Cographic,
    R10,
}

#[derive(Clone, Debug)]
pub struct Leaf {
    pub kind: LeafKind,
    /// Oracle over local ids `0..ids.len()`.
    pub matroid: Matroid,
    pub representation: Gf2Matrix,
    /// Global id of each local element.
    pub ids: Vec<usize>,
    pub declared_a: Option<Vec<usize>>,
    pub line: usize,
}

#[derive(Clone, Debug)]
pub enum Node {
    Leaf(usize),
    Sum { order: usize, z: Vec<usize>, children: Box<(Node, Node)>, line: usize },
}

/// A binary representation whose column `j` is global id `ids[j]`.
#[derive(Clone, Debug)]
pub struct RootBinary {
    pub matrix: Gf2Matrix,
    pub ids: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct DecompositionTree {
    pub root: Node,
    pub leaves: Vec<Leaf>,
    pub root_binary: Option<RootBinary>,
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Vec<(Token, usize)> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split(['#', ';']).next().unwrap_or("");
        let spaced = content.replace('(', " ( ").replace(')', " ) ");
        for word in spaced.split_whitespace() {
            let token = match word {
                "(" => Token::Open,
                ")" => Token::Close,
                _ => Token::Atom(word.to_string()),
            };
            out.push((token, line));
        }
    }
    out
}

#[derive(Debug)]
enum Expr {
    List(Vec<Expr>, usize),
    Atom(String, usize),
}

impl Expr {
    fn line(&self) -> usize {
        match self {
            Expr::List(_, l) | Expr::Atom(_, l) => *l,
        }
    }
}

fn read_exprs(tokens: &[(Token, usize)]) -> Result<Vec<Expr>> {
    fn read(tokens: &[(Token, usize)], pos: &mut usize) -> Result<Expr> {
        let (token, line) = &tokens[*pos];
        *pos += 1;
        match token {
            Token::Atom(a) => Ok(Expr::Atom(a.clone(), *line)),
            Token::Close => Err(Error::Parse { line: *line, msg: "unbalanced `)`".into() }),
            Token::Open => {
                let mut items = Vec::new();
                loop {
                    match tokens.get(*pos) {
                        None => return Err(Error::Parse { line: *line, msg: "unclosed `(`".into() }),
                        Some((Token::Close, _)) => {
                            *pos += 1;
                            return Ok(Expr::List(items, *line));
                        }
                        Some(_) => items.push(read(tokens, pos)?),
                    }
                }
            }
        }
    }
    let mut pos = 0;
    let mut out = Vec::new();
    while pos < tokens.len() {
        out.push(read(tokens, &mut pos)?);
    }
    Ok(out)
}

/// Positional items and `:key value...` groups of a list.
struct Fields<'a> {
    head: String,
    positional: Vec<&'a Expr>,
    keys: BTreeMap<String, Vec<&'a Expr>>,
}

fn fields(items: &[Expr], line: usize) -> Result<Fields<'_>> {
    let Some(Expr::Atom(head, _)) = items.first() else {
        return Err(Error::Parse { line, msg: "expected a keyword after `(`".into() });
    };
    let mut positional = Vec::new();
    let mut keys: BTreeMap<String, Vec<&Expr>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for item in &items[1..] {
        match item {
            Expr::Atom(a, l) if a.starts_with(':') => {
                if keys.contains_key(a) {
                    return Err(Error::Parse { line: *l, msg: format!("duplicate key {a}") });
                }
                keys.insert(a.clone(), Vec::new());
                current = Some(a.clone());
            }
            Expr::List(..) => {
                current = None;
                positional.push(item);
            }
            Expr::Atom(..) => match &current {
                Some(key) => keys.get_mut(key).expect("inserted").push(item),
                None => positional.push(item),
            },
        }
    }
    Ok(Fields { head: head.clone(), positional, keys })
}

fn atom(expr: &Expr) -> Result<&str> {
    match expr {
        Expr::Atom(a, _) => Ok(a),
        Expr::List(_, line) => Err(Error::Parse { line: *line, msg: "expected a word, found a list".into() }),
    }
}

fn id_list(values: &[&Expr]) -> Result<Vec<usize>> {
    values
        .iter()
        .map(|v| {
            let text = atom(v)?;
            text.parse().map_err(|_| Error::Parse { line: v.line(), msg: format!("`{text}` is not an element id") })
        })
        .collect()
}

fn single_path<'a>(f: &'a Fields<'_>, line: usize) -> Result<Option<&'a str>> {
    match f.keys.get(":file").map(Vec::as_slice) {
        None => Ok(None),
        Some([path]) => Ok(Some(atom(path)?)),
        Some(_) => Err(Error::Parse { line, msg: ":file takes exactly one path".into() }),
    }
}

struct Parser<'r> {
    resolve: &'r dyn Fn(&str) -> Result<String>,
    leaves: Vec<Leaf>,
}

impl Parser<'_> {
    fn node(&mut self, expr: &Expr) -> Result<Node> {
        let Expr::List(items, line) = expr else {
            return Err(Error::Parse { line: expr.line(), msg: "expected `(sum ...)` or `(leaf ...)`".into() });
        };
        let line = *line;
        let f = fields(items, line)?;
        match f.head.as_str() {
            "sum" => {
                let [order, left, right] = f.positional[..] else {
                    return Err(Error::Parse { line, msg: "expected `(sum <1|2|3> <child> <child> :z <ids>)`".into() });
                };
                let order: usize = atom(order)?
                    .parse()
                    .ok()
                    .filter(|k| (1..=3).contains(k))
                    .ok_or(Error::Parse { line, msg: "sum type must be 1, 2 or 3".into() })?;
                let z = id_list(f.keys.get(":z").map(Vec::as_slice).unwrap_or_default())?;
                let children = Box::new((self.node(left)?, self.node(right)?));
                Ok(Node::Sum { order, z, children, line })
            }
            "leaf" => self.leaf(&f, line),
            other => Err(Error::Parse { line, msg: format!("unknown block `{other}`") }),
        }
    }

    fn leaf(&mut self, f: &Fields<'_>, line: usize) -> Result<Node> {
        let [kind] = f.positional[..] else {
            return Err(Error::Parse { line, msg: "expected `(leaf graphic|cographic|r10 ...)`".into() });
        };
        let path = single_path(f, line)?;
        let load = |path: Option<&str>| -> Result<String> {
            let path = path.ok_or(Error::Parse { line, msg: "leaf needs :file".into() })?;
            (self.resolve)(path)
        };
        let (kind, matroid, representation) = match atom(kind)? {
            "graphic" => {
                let graph = Multigraph::parse(&load(path)?)?;
                let rep = Gf2Matrix::incidence(&graph)?;
                (LeafKind::Graphic, Matroid::graphic(graph)?, rep)
            }
            "cographic" => {
                let graph = Multigraph::parse(&load(path)?)?;
                let rep = Gf2Matrix::cycle_space(&graph)?;
                (LeafKind::Cographic, Matroid::cographic(graph)?, rep)
            }
            "r10" => {
                let rep = match path {
                    Some(p) => Gf2Matrix::parse(&(self.resolve)(p)?)?,
                    None => Gf2Matrix::r10(),
                };
                if rep.cols() != 10 {
                    return Err(Error::Parse { line, msg: "an r10 leaf has exactly 10 elements".into() });
                }
                (LeafKind::R10, Matroid::binary(rep.clone())?, rep)
            }
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unsupported leaf kind `{other}`; only plain graphic, cographic and r10 leaves are accepted"),
                })
            }
        };
        let size = matroid.id_space();
        let ids = match f.keys.get(":ids") {
            Some(values) => id_list(values)?,
            None => (0..size).collect(),
        };
        if ids.len() != size {
            return Err(Error::Parse { line, msg: format!(":ids lists {} ids for {size} elements", ids.len()) });
        }
        let declared_a = f.keys.get(":A").map(|v| id_list(v)).transpose()?;
        self.leaves.push(Leaf { kind, matroid, representation, ids, declared_a, line });
        Ok(Node::Leaf(self.leaves.len() - 1))
    }

    fn root_binary(&self, f: &Fields<'_>, line: usize) -> Result<RootBinary> {
        let path = single_path(f, line)?.ok_or(Error::Parse { line, msg: "root-binary needs :file".into() })?;
        let matrix = Gf2Matrix::parse(&(self.resolve)(path)?)?;
        let ids = match f.keys.get(":ids") {
            Some(values) => id_list(values)?,
            None => (0..matrix.cols()).collect(),
        };
        if ids.len() != matrix.cols() {
            return Err(Error::Parse { line, msg: format!(":ids lists {} ids for {} columns", ids.len(), matrix.cols()) });
        }
        Ok(RootBinary { matrix, ids })
    }
}

/// Reorders columns so that column `g` holds global id `g`; `ids` must be a permutation of `0..n`.
fn to_global_order(rep: &RootBinary) -> Option<Gf2Matrix> {
    let n = rep.ids.len();
    let mut seen = vec![false; n];
    for &g in &rep.ids {
        if g >= n || std::mem::replace(&mut seen[g], true) {
            return None;
        }
    }
    let rows = rep
        .matrix
        .rows()
        .iter()
        .map(|&r| bits::iter(r).fold(0u64, |acc, j| acc | 1 << rep.ids[j]))
        .collect();
    Gf2Matrix::from_rows(rows, n).ok()
}

impl DecompositionTree {
    /// Parses a decomposition; `resolve` maps a `:file` argument to the file's contents.
    pub fn parse(text: &str, resolve: &dyn Fn(&str) -> Result<String>) -> Result<Self> {
        let exprs = read_exprs(&tokenize(text))?;
        let mut parser = Parser { resolve, leaves: Vec::new() };
        let mut root = None;
        let mut root_binary = None;
        for expr in &exprs {
            let Expr::List(items, line) = expr else {
                return Err(Error::Parse { line: expr.line(), msg: "stray word outside a block".into() });
            };
            let f = fields(items, *line)?;
            match f.head.as_str() {
                "root-binary" if root_binary.is_none() => root_binary = Some(parser.root_binary(&f, *line)?),
                "sum" | "leaf" if root.is_none() => root = Some(parser.node(expr)?),
                _ => return Err(Error::Parse { line: *line, msg: format!("unexpected top-level block `{}`", f.head) }),
            }
        }
        let root = root.ok_or(Error::Parse { line: 1, msg: "no decomposition tree".into() })?;
        Ok(Self { root, leaves: parser.leaves, root_binary })
    }

    /// Reads a decomposition file, resolving `:file` paths relative to its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &|p| Ok(std::fs::read_to_string(base.join(p))?))
    }

    /// Leaves containing each global id.
    pub fn occurrences(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (l, leaf) in self.leaves.iter().enumerate() {
            for &g in &leaf.ids {
                out.entry(g).or_default().push(l);
            }
        }
        out
    }

    /// One more than the largest id that occurs in a single leaf.
    pub fn ground_size(&self) -> usize {
        self.occurrences().iter().filter(|(_, ls)| ls.len() == 1).map(|(&g, _)| g + 1).max().unwrap_or(0)
    }

    /// `A_M`: the global ids of `leaf` shared with another leaf.
    pub fn shared_ids(&self, leaf: usize) -> Vec<usize> {
        let occ = self.occurrences();
        self.leaves[leaf].ids.iter().copied().filter(|g| occ[g].len() > 1).collect()
    }

    /// `M̂ = M / A_M` over the leaf's local ids.
    pub fn leaf_minor(&self, leaf: usize) -> Result<Matroid> {
        let shared = self.shared_ids(leaf);
        let local: Vec<usize> = self.leaves[leaf].ids.iter().enumerate().filter(|(_, g)| shared.contains(g)).map(|(l, _)| l).collect();
        self.leaves[leaf].matroid.minor(&local, &[])
    }

    fn leaves_under(node: &Node, out: &mut Vec<usize>) {
        match node {
            Node::Leaf(l) => out.push(*l),
            Node::Sum { children, .. } => {
                Self::leaves_under(&children.0, out);
                Self::leaves_under(&children.1, out);
            }
        }
    }

    fn compose(&self, node: &Node) -> Result<RootBinary> {
        match node {
            Node::Leaf(l) => Ok(RootBinary { matrix: self.leaves[*l].representation.clone(), ids: self.leaves[*l].ids.clone() }),
            Node::Sum { children, .. } => {
                let left = self.compose(&children.0)?;
                let right = self.compose(&children.1)?;
                let (matrix, ids) = binary_sum(&left.matrix, &left.ids, &right.matrix, &right.ids)?;
                Ok(RootBinary { matrix, ids })
            }
        }
    }

    /// The binary representation obtained by summing the leaf representations along the tree.
    pub fn composed_representation(&self) -> Result<RootBinary> {
        self.compose(&self.root)
    }

    /// The composed matroid `M̃` over `0..n`: the supplied root representation when present,
    /// otherwise the sum of the leaves.
    pub fn root_matroid(&self) -> Result<Matroid> {
        let rep = match &self.root_binary {
            Some(r) => r.clone(),
            None => self.composed_representation()?,
        };
        let matrix = to_global_order(&rep).ok_or_else(|| {
            Error::InvalidDecomposition(vec![format!("root columns {:?} are not a permutation of 0..{}", rep.ids, rep.ids.len())])
        })?;
        Matroid::binary(matrix)
    }
}

fn sum_side_leaf(tree: &DecompositionTree, node: &Node, z: &[usize]) -> Option<usize> {
    let mut under = Vec::new();
    DecompositionTree::leaves_under(node, &mut under);
    under.into_iter().find(|&l| z.iter().all(|g| tree.leaves[l].ids.contains(g)))
}

fn local_of(leaf: &Leaf, ids: &[usize]) -> Vec<usize> {
    ids.iter().filter_map(|g| leaf.ids.iter().position(|h| h == g)).collect()
}

/// Checks sum-set sizes, circuit conditions, goodness, the conflict forest, the absence of
/// elements parallel to shared ones, declared `:A` sets, dense ids and the root representation.
pub fn validate_good(tree: &DecompositionTree) -> Result<()> {
    let mut problems = Vec::new();
    let occ = tree.occurrences();
    let mut declared: BTreeMap<usize, usize> = BTreeMap::new();
    let mut uf = UnionFind::new(tree.leaves.len());
    let mut cyclic = false;

    let mut stack = vec![&tree.root];
    while let Some(node) = stack.pop() {
        let Node::Sum { order, z, children, line } = node else { continue };
        stack.push(&children.0);
        stack.push(&children.1);
        let expected = match order {
            1 => 0,
            2 => 1,
            _ => 3,
        };
        if z.len() != expected {
            problems.push(format!("line {line}: a {order}-sum needs {expected} sum elements, found {}", z.len()));
            continue;
        }
        for &g in z {
            if let Some(prev) = declared.insert(g, *line) {
                problems.push(format!("line {line}: element {g} already used by the sum on line {prev}"));
            }
            if occ.get(&g).map_or(0, Vec::len) != 2 {
                problems.push(format!("line {line}: sum element {g} must occur in exactly two leaves"));
            }
        }
        if z.is_empty() {
            continue;
        }
        let sides = [sum_side_leaf(tree, &children.0, z), sum_side_leaf(tree, &children.1, z)];
        let [Some(a), Some(b)] = sides else {
            problems.push(format!("line {line}: sum set {z:?} is not inside a single leaf on both sides"));
            continue;
        };
        if !uf.union(a, b) {
            cyclic = true;
        }
        for leaf in [a, b].map(|l| &tree.leaves[l]) {
            let local = local_of(leaf, z);
            let m = &leaf.matroid;
            if *order == 3 {
                let circuit = m.rank_unchecked(&local) == 2 && (0..3).all(|skip| {
                    let pair: Vec<usize> = local.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &e)| e).collect();
                    m.rank_unchecked(&pair) == 2
                });
                if !circuit {
                    problems.push(format!("line {line}: sum set {z:?} is not a circuit in the leaf on line {}", leaf.line));
                }
            } else {
                let rest: Vec<usize> = (0..m.id_space()).filter(|e| *e != local[0]).collect();
                if m.rank_unchecked(&rest) < m.full_rank() {
                    problems.push(format!("line {line}: sum element {} is a coloop in the leaf on line {}", z[0], leaf.line));
                }
            }
        }
    }

    for (&g, leaves) in &occ {
        if leaves.len() > 2 {
            problems.push(format!("element {g} occurs in {} leaves", leaves.len()));
        } else if leaves.len() == 2 && !declared.contains_key(&g) {
            problems.push(format!("element {g} is shared by two leaves but not declared as a sum element"));
            if !uf.union(leaves[0], leaves[1]) {
                cyclic = true;
            }
        }
    }
    if cyclic {
        problems.push("the conflict graph of the leaves has a cycle".into());
    }

    for (l, leaf) in tree.leaves.iter().enumerate() {
        let shared = tree.shared_ids(l);
        if let Some(a) = &leaf.declared_a {
            let (mut a, mut s) = (a.clone(), shared.clone());
            a.sort_unstable();
            s.sort_unstable();
            if a != s {
                problems.push(format!("leaf on line {}: declared :A {a:?} differs from the shared elements {s:?}", leaf.line));
            }
        }
        for a in local_of(leaf, &shared) {
            for e in (0..leaf.ids.len()).filter(|&e| e != a) {
                if leaf.matroid.rank_unchecked(&[a, e]) < 2 {
                    problems.push(format!(
                        "leaf on line {}: element {} is parallel to shared element {}",
                        leaf.line, leaf.ids[e], leaf.ids[a]
                    ));
                }
            }
        }
    }

    let finals: Vec<usize> = occ.iter().filter(|(_, ls)| ls.len() == 1).map(|(&g, _)| g).collect();
    if finals.iter().enumerate().any(|(k, &g)| k != g) {
        problems.push(format!("ground elements {finals:?} are not exactly 0..{}", finals.len()));
    }

    if problems.is_empty() {
        if let Some(root) = &tree.root_binary {
            match (to_global_order(root), tree.composed_representation().ok().as_ref().and_then(to_global_order)) {
                (Some(given), Some(composed)) => {
                    let (a, b) = (given.kernel(), composed.kernel());
                    let joint = rank_of(a.iter().chain(&b).copied());
                    if given.cols() != composed.cols() || joint != a.len() || joint != b.len() {
                        problems.push("root representation differs from the sum of the leaves".into());
                    }
                }
                (None, _) => problems.push(format!("root columns {:?} are not a permutation of 0..{}", root.ids, root.ids.len())),
                (_, None) => problems.push("the leaves do not compose to a matroid on 0..n".into()),
            }
        }
    }

    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidDecomposition(problems))
    }
}

/// Restricts `x` to each leaf minor (local ids, zero on shared elements) after checking
/// `x ∈ ⅓P` of the composed matroid; each restriction is checked to lie in `P` of its minor.
pub fn project_leaf_vectors(tree: &DecompositionTree, x: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    let root = tree.root_matroid()?;
    if x.len() != root.id_space() {
        return Err(Error::InvalidParameter(format!("{} marginals for {} elements", x.len(), root.id_space())));
    }
    if let Some(subset) = polytope_violation(&root, x, &rat(1, 3))? {
        return Err(Error::OutsidePolytope { subset });
    }
    let n = x.len();
    (0..tree.leaves.len())
        .map(|l| {
            let leaf = &tree.leaves[l];
            let local: Vec<Rational> = leaf.ids.iter().map(|&g| if g < n && tree.shared_ids(l).binary_search(&g).is_err() { x[g].clone() } else { Rational::zero() }).collect();
            let minor = tree.leaf_minor(l)?;
            if !in_scaled_polytope(&minor, &local, &Rational::one())? {
                let subset = polytope_violation(&minor, &local, &Rational::one())?.unwrap_or_default();
                return Err(Error::OutsidePolytope { subset: subset.into_iter().map(|e| leaf.ids[e]).collect() });
            }
            Ok(local)
        })
        .collect()
}

/// Drop probability and chain parameter for graphic leaves.
pub const GRAPHIC_LEAF_KEEP: (i64, i64) = (1, 4);
/// Drop probability for cographic leaves.
pub const COGRAPHIC_LEAF_KEEP: (i64, i64) = (1, 2);

#[derive(Clone, Debug)]
pub struct PreparedLeaf {
    pub kind: LeafKind,
    pub scheme: Arc<dyn Scheme>,
    /// Selectability the leaf scheme guarantees for marginals in `P` of the leaf minor.
    pub guarantee: Rational,
    pub chain: Option<Chain>,
    /// Global id of each local element, `None` for shared ones.
    pub globals: Vec<Option<usize>>,
}

/// Product of per-leaf schemes: `F = {I : I ∩ E(M̂) ∈ F_M̂ for every leaf}`.
#[derive(Clone, Debug)]
pub struct RegularScheme {
    pub leaves: Vec<PreparedLeaf>,
    owner: Vec<(usize, usize)>,
}

/// Prepares graphic leaves as a ¼-subsampled chain scheme with `b = ¼`, cographic leaves as a
/// ½-subsampled parallel-class scheme, and R10 leaves with the low-density scheme.
pub fn regular_prepare(tree: &DecompositionTree, d: &SubsetDistribution, mc: McConfig) -> Result<RegularScheme> {
    validate_good(tree)?;
    let n = tree.ground_size();
    if d.ground_size() != n {
        return Err(Error::InvalidParameter(format!("distribution has {} elements, decomposition {n}", d.ground_size())));
    }
    project_leaf_vectors(tree, &d.marginals())?;
    let mut owner = vec![(usize::MAX, usize::MAX); n];
    let mut leaves = Vec::new();
    for (l, leaf) in tree.leaves.iter().enumerate() {
        let shared = tree.shared_ids(l);
        let globals: Vec<Option<usize>> = leaf.ids.iter().map(|&g| (!shared.contains(&g)).then_some(g)).collect();
        let mut map = vec![None; n];
        for (local, g) in globals.iter().enumerate() {
            if let Some(g) = g {
                map[*g] = Some(local);
                owner[*g] = (l, local);
            }
        }
        let local_d = relabel(d, &map, leaf.ids.len())?;
        let minor = tree.leaf_minor(l)?;
        let prepared = match leaf.kind {
            LeafKind::Graphic => {
                let keep = rat(GRAPHIC_LEAF_KEEP.0, GRAPHIC_LEAF_KEEP.1);
                let thinned = subsample(&local_d, &keep)?;
                let (chain, family) = chain_prepare(&minor, &thinned, &keep, mc.fork(l as u64))?;
                let inner: Arc<dyn Scheme> = Arc::new(Deterministic::new(family));
                let guarantee = &keep * (int(1) - int(2) * &keep);
                PreparedLeaf { kind: leaf.kind, scheme: Arc::new(ScaleWrapper::new(inner, keep)?), guarantee, chain: Some(chain), globals }
            }
            LeafKind::Cographic => {
                let keep = rat(COGRAPHIC_LEAF_KEEP.0, COGRAPHIC_LEAF_KEEP.1);
                let classes = parallel_class_prepare(&minor)?;
                let guarantee = &keep * (int(1) - &keep) / &classes.representatives.density;
                PreparedLeaf { kind: leaf.kind, scheme: Arc::new(ScaleWrapper::new(Arc::new(classes), keep)?), guarantee, chain: None, globals }
            }
            LeafKind::R10 => {
                let scheme = low_density_prepare(&minor)?;
                let guarantee = int(1) / &scheme.density;
                PreparedLeaf { kind: leaf.kind, scheme: Arc::new(scheme), guarantee, chain: None, globals }
            }
        };
        leaves.push(prepared);
    }
    Ok(RegularScheme { leaves, owner })
}

impl RegularScheme {
    /// The weakest leaf guarantee.
    pub fn guarantee(&self) -> Rational {
        self.leaves.iter().map(|l| l.guarantee.clone()).min().unwrap_or_else(Rational::one)
    }

    /// Exact selectability computed leaf by leaf on the pushed-forward distributions.
    pub fn leaf_selectability(&self, d: &ExplicitDist) -> Result<Vec<Option<Rational>>> {
        let n = self.owner.len();
        let mut out = vec![None; n];
        for leaf in &self.leaves {
            let size = leaf.globals.len();
            let mut map = vec![None; n];
            for (local, g) in leaf.globals.iter().enumerate() {
                if let Some(g) = g {
                    map[*g] = Some(local);
                }
            }
            let local_d = d.push_forward(size, |mask| bits::iter(mask).filter_map(|g| map[g]).fold(0u64, |acc, j| acc | 1 << j))?;
            for (local, s) in exact_selectability(leaf.scheme.as_ref(), &local_d)?.into_iter().enumerate() {
                if let Some(g) = leaf.globals[local] {
                    out[g] = s;
                }
            }
        }
        Ok(out)
    }

    fn assemble(&self, families: Vec<Arc<dyn GreedyFamily>>) -> RegularFamily {
        RegularFamily { owner: self.owner.clone(), leaves: families }
    }
}

impl Scheme for RegularScheme {
    fn ground_size(&self) -> usize {
        self.owner.len()
    }

    fn realize(&self, rng: &mut dyn RngCore) -> Arc<dyn GreedyFamily> {
        Arc::new(self.assemble(self.leaves.iter().map(|l| l.scheme.realize(rng)).collect()))
    }

    fn realizations(&self) -> Result<Vec<(Arc<dyn GreedyFamily>, Rational)>> {
        let mut combos: Vec<(Vec<Arc<dyn GreedyFamily>>, Rational)> = vec![(Vec::new(), Rational::one())];
        for leaf in &self.leaves {
            let options = leaf.scheme.realizations()?;
            let size = combos.len().saturating_mul(options.len());
            if size > REALIZATION_LIMIT {
                return Err(Error::TooLarge { what: "combined leaf realizations", size, limit: REALIZATION_LIMIT });
            }
            combos = combos
                .into_iter()
                .flat_map(|(fams, w)| {
                    options.iter().map(move |(f, p)| {
                        let mut fams = fams.clone();
                        fams.push(Arc::clone(f));
                        (fams, &w * p)
                    })
                })
                .collect();
        }
        Ok(combos.into_iter().map(|(fams, w)| (Arc::new(self.assemble(fams)) as Arc<dyn GreedyFamily>, w)).collect())
    }
}

#[derive(Clone, Debug)]
pub struct RegularFamily {
    owner: Vec<(usize, usize)>,
    leaves: Vec<Arc<dyn GreedyFamily>>,
}

impl RegularFamily {
    /// Splits a global set into sorted local sets per leaf.
    fn split(&self, set: &[usize]) -> Vec<Vec<usize>> {
        let mut parts = vec![Vec::new(); self.leaves.len()];
        for &g in set {
            let (l, local) = self.owner[g];
            parts[l].push(local);
        }
        for p in &mut parts {
            p.sort_unstable();
        }
        parts
    }
}

impl GreedyFamily for RegularFamily {
    fn ground_size(&self) -> usize {
        self.owner.len()
    }

    fn contains(&self, set: &[usize]) -> bool {
        self.split(set).iter().zip(&self.leaves).all(|(part, fam)| fam.contains(part))
    }

    fn accepts(&self, selected: &[usize], item: usize) -> bool {
        let (l, local) = self.owner[item];
        let same: Vec<usize> = selected.iter().filter(|&&g| self.owner[g].0 == l).map(|&g| self.owner[g].1).collect();
        self.leaves[l].accepts(&same, local)
    }

    fn always_extends(&self, active: &[usize], item: usize) -> bool {
        let (l, local) = self.owner[item];
        let mut same: Vec<usize> = active.iter().filter(|&&g| self.owner[g].0 == l).map(|&g| self.owner[g].1).collect();
        same.sort_unstable();
        self.leaves[l].always_extends(&same, local)
    }

    fn extending(&self, active: &[usize]) -> Vec<bool> {
        let parts = self.split(active);
        let verdicts: Vec<Vec<bool>> = parts.iter().zip(&self.leaves).map(|(p, f)| f.extending(p)).collect();
        active
            .iter()
            .map(|&g| {
                let (l, local) = self.owner[g];
                let pos = parts[l].binary_search(&local).expect("split contains every active element");
                verdicts[l][pos]
            })
            .collect()
    }
}

/// Runs the greedy rule on sampled arrivals in random order and counts selections that are
/// dependent in `root`.
pub fn gluing_violations(root: &Matroid, scheme: &dyn Scheme, d: &SubsetDistribution, mc: McConfig) -> u64 {
    mc::counts(mc.seed, mc.trials, 1, |rng, acc| {
        let family = scheme.realize(rng);
        let mut arrivals = d.sample(rng);
        arrivals.shuffle(rng);
        let selected = run_greedy(family.as_ref(), arrivals);
        if !matches!(root.is_independent(&selected), Ok(true)) {
            acc[0] += 1;
        }
    })[0]
}
