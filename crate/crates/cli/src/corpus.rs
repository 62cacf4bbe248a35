//! The fixture corpus under `fixtures/`: seeded generators and loaders.
//!
//! `cargo run -p pi-ocrs-cli --example gen_fixtures` rewrites the generated files; a test checks
//! that the shipped files match the generators.

use std::fs;
use std::path::{Path, PathBuf};

use num_traits::Zero;
use pi_ocrs::dist::{mixture, parity_dist, thin, ExplicitDist};
use pi_ocrs::matroid::{Bipartite, LaminarFamily, Multigraph};
use pi_ocrs::mc;
use pi_ocrs::rational::{self, rat};
use pi_ocrs::Rational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{CliError, Result};

pub const PI_DISTRIBUTIONS: usize = 100;
pub const COGRAPHIC_GRAPHS: usize = 50;
pub const BIPARTITE_INSTANCES: usize = 100;
/// Seed of every generator; instance `i` uses stream `i`.
pub const CORPUS_SEED: u64 = 20_240_601;
const MAX_COGRAPHIC_EDGES: usize = 20;

/// Location of the shipped corpus.
pub fn default_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn parity_vectors(rng: &mut impl Rng, n: usize) -> Vec<u64> {
    rand::seq::index::sample(rng, 15, n).into_iter().map(|v| v as u64 + 1).collect()
}

/// A mixture of two parity constructions on `GF(2)^4`, with up to two items thinned.
pub fn random_pi_dist(index: usize) -> ExplicitDist {
    let mut rng = mc::rng(CORPUS_SEED, index as u64);
    let n = rng.gen_range(3..=12);
    let (a, b) = (parity_vectors(&mut rng, n), parity_vectors(&mut rng, n));
    let weight = rat(rng.gen_range(1..=3), 4);
    let mixed = mixture(&[
        (parity_dist(&a, 4).expect("distinct nonzero vectors"), weight.clone()),
        (parity_dist(&b, 4).expect("distinct nonzero vectors"), rat(1, 1) - weight),
    ])
    .expect("weights sum to one");
    let mut keep = vec![rat(1, 1); n];
    for _ in 0..rng.gen_range(0..=2) {
        keep[rng.gen_range(0..n)] = rat(rng.gen_range(1..=3), 4);
    }
    let thinned = thin(&mixed.into(), &keep).expect("keep probabilities are valid");
    thinned.as_explicit().expect("thinning keeps explicit distributions explicit").clone()
}

/// A simple bridgeless graph with minimum degree 3 and at most 20 edges.
pub fn random_cographic_graph(index: usize) -> Multigraph {
    let mut rng = mc::rng(CORPUS_SEED ^ 0xc0, index as u64);
    loop {
        let v = rng.gen_range(4..=9);
        let mut pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
        pairs.shuffle(&mut rng);
        let mut edges = Vec::new();
        let mut degree = vec![0usize; v];
        for (a, b) in pairs {
            if degree.iter().all(|&d| d >= 3) {
                break;
            }
            if degree[a] < 3 || degree[b] < 3 || rng.gen_bool(0.2) {
                degree[a] += 1;
                degree[b] += 1;
                edges.push((a, b));
            }
        }
        if edges.len() > MAX_COGRAPHIC_EDGES || degree.iter().any(|&d| d < 3) {
            continue;
        }
        let graph = Multigraph::new(v, edges).expect("endpoints are below v");
        if graph.bridges().is_empty() {
            return graph;
        }
    }
}

/// A bipartite graph with a point `x ∈ ½·P`: half the average of three greedy matchings.
pub fn random_bipartite(index: usize) -> (Bipartite, Vec<Rational>) {
    let mut rng = mc::rng(CORPUS_SEED ^ 0xb1, index as u64);
    let left = rng.gen_range(2..=8);
    let right = rng.gen_range(2..=6);
    let mut edges = Vec::new();
    for u in 0..left {
        let degree = rng.gen_range(1..=3.min(right));
        for j in rand::seq::index::sample(&mut rng, right, degree) {
            edges.push((u, j));
        }
    }
    let graph = Bipartite::new(left, right, &edges).expect("endpoints are in range");
    let mut x = vec![Rational::zero(); left];
    for _ in 0..3 {
        let mut order: Vec<usize> = (0..left).collect();
        order.shuffle(&mut rng);
        let mut matched = Vec::new();
        for u in order {
            matched.push(u);
            if graph.matching_size(matched.iter().copied()) < matched.len() {
                matched.pop();
            }
        }
        for u in matched {
            x[u] += rat(1, 6);
        }
    }
    (graph, x)
}

/// Three levels: the whole set (cap 8), two halves (cap 4) and four quarters (cap 2).
pub fn three_level_laminar() -> LaminarFamily {
    let mut text = String::from("laminar 24\ncap 8 :");
    for e in 0..24 {
        text.push_str(&format!(" {e}"));
    }
    text.push('\n');
    for (size, cap) in [(12, 4), (6, 2)] {
        for start in (0..24).step_by(size) {
            let ids: Vec<String> = (start..start + size).map(|e| e.to_string()).collect();
            text.push_str(&format!("cap {cap} : {}\n", ids.join(" ")));
        }
    }
    LaminarFamily::parse(&text).expect("nested blocks are laminar")
}

pub const NEGATIVE_PROBABILITY: &str = "ground 3\n1/2 : 0 1\n-1/4 : 2\n3/4 :\n";

fn x_to_text(x: &[Rational]) -> String {
    x.iter().enumerate().map(|(i, v)| format!("{i} {v}\n")).collect()
}

fn x_parse(text: &str, path: &Path) -> Result<Vec<Rational>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(line, l)| {
            let value = l.split_whitespace().nth(1).and_then(rational::parse_rational);
            value.ok_or_else(|| CliError::Fixture {
                path: path.display().to_string(),
                source: pi_ocrs::Error::Parse { line: line + 1, msg: "expected `<item> <rational>`".into() },
            })
        })
        .collect()
}

/// Every generated file as `(relative path, contents)`.
pub fn generated_files() -> Vec<(String, String)> {
    let mut files = Vec::new();
    for i in 0..PI_DISTRIBUTIONS {
        files.push((format!("dists/pi_{i:03}.dist"), random_pi_dist(i).to_text()));
    }
    for i in 0..COGRAPHIC_GRAPHS {
        files.push((format!("cographic/g_{i:02}.graph"), random_cographic_graph(i).to_text()));
    }
    for i in 0..BIPARTITE_INSTANCES {
        let (graph, x) = random_bipartite(i);
        files.push((format!("bipartite/b_{i:03}.bip"), graph.to_text()));
        files.push((format!("bipartite/b_{i:03}.x"), x_to_text(&x)));
    }
    files.push(("laminar/three_level_24.lam".into(), three_level_laminar().to_text()));
    files.push(("corrupt/negative_probability.dist".into(), NEGATIVE_PROBABILITY.into()));
    files
}

pub fn write_generated(root: &Path) -> Result<()> {
    for (rel, text) in generated_files() {
        let path = root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, text)?;
    }
    Ok(())
}

/// Reads the shipped corpus.
#[derive(Clone, Debug)]
pub struct Corpus {
    root: PathBuf,
}

impl Corpus {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn shipped() -> Self {
        Self::new(default_root())
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn read(&self, rel: &str) -> Result<(PathBuf, String)> {
        let path = self.root.join(rel);
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Fixture { path: path.display().to_string(), source: e.into() })?;
        Ok((path, text))
    }

    fn load<T>(&self, rel: &str, parse: impl Fn(&str) -> pi_ocrs::Result<T>) -> Result<T> {
        let (path, text) = self.read(rel)?;
        parse(&text).map_err(|source| CliError::Fixture { path: path.display().to_string(), source })
    }

    pub fn pi_dists(&self) -> Result<Vec<(String, ExplicitDist)>> {
        (0..PI_DISTRIBUTIONS)
            .map(|i| {
                let rel = format!("dists/pi_{i:03}.dist");
                Ok((rel.clone(), self.load(&rel, ExplicitDist::parse)?))
            })
            .collect()
    }

    pub fn cographic_graphs(&self) -> Result<Vec<(String, Multigraph)>> {
        (0..COGRAPHIC_GRAPHS)
            .map(|i| {
                let rel = format!("cographic/g_{i:02}.graph");
                Ok((rel.clone(), self.load(&rel, Multigraph::parse)?))
            })
            .collect()
    }

    pub fn bipartite(&self) -> Result<Vec<(String, Bipartite, Vec<Rational>)>> {
        (0..BIPARTITE_INSTANCES)
            .map(|i| {
                let rel = format!("bipartite/b_{i:03}.bip");
                let graph = self.load(&rel, Bipartite::parse)?;
                let (path, text) = self.read(&format!("bipartite/b_{i:03}.x"))?;
                Ok((rel, graph, x_parse(&text, &path)?))
            })
            .collect()
    }

    pub fn three_level_laminar(&self) -> Result<LaminarFamily> {
        self.load("laminar/three_level_24.lam", LaminarFamily::parse)
    }

    /// An explicit distribution file anywhere on disk.
    pub fn dist_file(path: &Path) -> Result<ExplicitDist> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Fixture { path: path.display().to_string(), source: e.into() })?;
        ExplicitDist::parse(&text).map_err(|source| CliError::Fixture { path: path.display().to_string(), source })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pi_ocrs::dist::verify_independence;
    use pi_ocrs::matroid::{in_scaled_polytope, Matroid};

    #[test]
    fn shipped_files_match_generators() {
        let root = default_root();
        for (rel, text) in generated_files() {
            let shipped = fs::read_to_string(root.join(&rel)).unwrap_or_else(|e| panic!("{rel}: {e}"));
            assert_eq!(shipped, text, "{rel} is stale; rerun the gen_fixtures example");
        }
    }

    #[test]
    fn generated_instances_have_their_properties() {
        for i in 0..10 {
            let d = random_pi_dist(i);
            assert!(d.ground_size() <= 12);
            assert!(verify_independence(&d, 2).unwrap().pass);
            let g = random_cographic_graph(i);
            assert!(g.edge_count() <= MAX_COGRAPHIC_EDGES && g.degrees().iter().all(|&d| d >= 3));
            let (graph, x) = random_bipartite(i);
            assert!(in_scaled_polytope(&Matroid::transversal(graph).unwrap(), &x, &rat(1, 2)).unwrap());
        }
    }

    #[test]
    fn corrupt_fixture_is_rejected() {
        assert!(ExplicitDist::parse(NEGATIVE_PROBABILITY).is_err());
    }
}
