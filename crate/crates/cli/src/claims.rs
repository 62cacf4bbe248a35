//! `verify`: the acceptance suite, one summary row per criterion.

use std::path::PathBuf;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};
use pi_ocrs::dist::{
    kn_cycle_dist, pair_singleton_dist, product_dist, thin, twise_symmetric, twise_z, verify_independence, ExplicitDist,
    Sampler, SubsetDistribution,
};
use pi_ocrs::fixtures;
use pi_ocrs::matroid::{density, LaminarFamily, Matroid, Multigraph};
use pi_ocrs::mc::{self, McConfig};
use pi_ocrs::ocrs::{brute_force_extends, exact_selectability, Deterministic, GreedyFamily, Scheme};
use pi_ocrs::prophet::{
    opt_membership_thresholds, prophet_simulate, sampled_membership_thresholds, scale_wrapper, ArrivalOrder,
    Feasibility, PreparedScheme, ValueModel,
};
use pi_ocrs::rational::{self, int, rat};
use pi_ocrs::regular::regular_prepare;
use pi_ocrs::single::{phi, rank1_crs_quality};
use pi_ocrs::structured::{
    cographic_prepare, graphic_chain_prepare, laminar_prepare, round_laminar, transversal_prepare,
};
use pi_ocrs::uniform::{averaging_bound, averaging_tail, offline_uniform_crs, simple_uniform_family, two_bucket_prepare, BucketParams};
use pi_ocrs::{bits, Rational};
use rand::Rng;
use serde::Serialize;

use crate::config::{ExperimentConfig, Settings};
use crate::corpus::Corpus;
use crate::error::Result;
use crate::experiments::{self, five_cycle, thinned_parity};
use crate::report::{Bound, Measured, Relation, Row, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Every row held, but some rested on a reduced Monte Carlo budget.
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimRow {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub rows: usize,
    pub failing: usize,
    pub detail: String,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Divides every Monte Carlo budget; results can then only be inconclusive.
    pub reduced: Option<u64>,
    pub corpus: Corpus,
    /// Extra distribution files held to pairwise independence in criterion 1.
    pub extra_dists: Vec<PathBuf>,
}

impl VerifyOptions {
    pub fn new(seed: u64, corpus: Corpus) -> Self {
        Self { seed, reduced: None, corpus, extra_dists: Vec::new() }
    }

    fn trials(&self, full: u64) -> u64 {
        self.reduced.map_or(full, |div| (full / div.max(1)).max(1))
    }

    fn mc(&self, full: u64, stream: u64) -> McConfig {
        McConfig::new(self.seed, self.trials(full)).fork(stream)
    }

    /// Runs a registered experiment, shrinking its `trials` default in reduced mode.
    fn experiment(&self, name: &str, params: &[(&str, &str)]) -> Result<Table> {
        let mut settings = Settings { seed: Some(self.seed), ..Settings::default() };
        for (k, v) in params {
            settings.set(k, v)?;
        }
        if let (Some(_), None) = (self.reduced, settings.params.get("trials")) {
            let declared = experiments::find(name)?.defaults.iter().find(|(k, _)| *k == "trials");
            if let Some((_, full)) = declared {
                let full: u64 = full.parse().expect("defaults are valid");
                settings.set("trials", &self.trials(full).to_string())?;
            }
        }
        experiments::run_experiment(&ExperimentConfig::new(name, settings), &self.corpus)
    }
}

struct Criterion {
    id: u8,
    title: &'static str,
    /// Whether the verdict rests on Monte Carlo budgets.
    sampled: bool,
    check: fn(&VerifyOptions) -> Result<Vec<Table>>,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, title: "exact t-wise independence of the constructions (pi-consistency)", sampled: false, check: independence },
    Criterion { id: 2, title: "graphic chain family meets 1-2b on small multigraphs; K_n cycle tightness", sampled: false, check: graphic },
    Criterion { id: 3, title: "uniform matroids: averaging bound, simple family, two buckets, offline CRS", sampled: true, check: uniform },
    Criterion { id: 4, title: "laminar matroids meet 1/2.661", sampled: false, check: laminar },
    Criterion { id: 5, title: "cographic density and selectability", sampled: false, check: cographic },
    Criterion { id: 6, title: "transversal flow and selectability", sampled: false, check: transversal },
    Criterion { id: 7, title: "regular matroids: good decompositions, gluing, 1/12 selectability", sampled: true, check: regular },
    Criterion { id: 8, title: "single-item CRS quality under t-wise independence", sampled: false, check: quality },
    Criterion { id: 9, title: "single-item thresholds and upper bounds", sampled: true, check: single_item },
    Criterion { id: 10, title: "prophet inequalities through the reduction", sampled: true, check: prophet },
    Criterion { id: 11, title: "family certificates agree with subset enumeration", sampled: false, check: certificates },
];

pub fn criterion_count() -> usize {
    CRITERIA.len()
}

fn summarize(criterion: &Criterion, outcome: Result<Vec<Table>>, reduced: bool) -> ClaimRow {
    let tables = match outcome {
        Ok(tables) => tables,
        Err(e) => {
            return ClaimRow {
                id: criterion.id,
                title: criterion.title,
                status: Status::Fail,
                rows: 0,
                failing: 0,
                detail: format!("criterion {}: {e}", criterion.id),
                tables: Vec::new(),
            }
        }
    };
    let rows: Vec<(&Table, &Row)> = tables.iter().flat_map(|t| t.rows.iter().map(move |r| (t, r))).collect();
    let failing: Vec<&(&Table, &Row)> = rows.iter().filter(|(_, r)| !r.pass).collect();
    let sampled = criterion.sampled || rows.iter().any(|(_, r)| r.sampled);
    let status = match (failing.is_empty(), reduced && sampled) {
        (false, _) => Status::Fail,
        (true, true) => Status::Inconclusive,
        (true, false) => Status::Pass,
    };
    let detail = match failing.first() {
        Some((t, r)) => format!("{}: {} = {} not {}", t.experiment, r.item, r.estimate, r.bound),
        None if status == Status::Inconclusive => "holds under the reduced Monte Carlo budget".into(),
        None => "all rows hold".into(),
    };
    ClaimRow { id: criterion.id, title: criterion.title, status, rows: rows.len(), failing: failing.len(), detail, tables }
}

pub fn verify(opts: &VerifyOptions) -> Vec<ClaimRow> {
    verify_only(opts, &[])
}

/// Runs the listed criteria, or all of them when `ids` is empty.
pub fn verify_only(opts: &VerifyOptions, ids: &[u8]) -> Vec<ClaimRow> {
    CRITERIA
        .iter()
        .filter(|c| ids.is_empty() || ids.contains(&c.id))
        .map(|c| {
            log::info!("criterion {}: {}", c.id, c.title);
            summarize(c, (c.check)(opts), opts.reduced.is_some())
        })
        .collect()
}

pub fn summary_csv(rows: &[ClaimRow]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["criterion", "title", "status", "rows", "failing", "detail"])?;
    for r in rows {
        writer.write_record([&r.id.to_string(), r.title, &r.status.to_string(), &r.rows.to_string(), &r.failing.to_string(), &r.detail])?;
    }
    let body = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(body).expect("csv output is utf-8"))
}

pub fn summary_json(rows: &[ClaimRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)? + "\n")
}

fn table(name: &str, claim: &str, opts: &VerifyOptions) -> Table {
    Table::new(name, claim, opts.seed, Vec::new())
}

fn independent_row(table: &mut Table, label: String, d: &ExplicitDist, t: usize) -> Result<()> {
    let report = verify_independence(d, t)?;
    let item = match &report.worst {
        Some(v) => format!("{label}, worst tuple {:?}", v.tuple),
        None => label,
    };
    table.push(Row::check(item, report.pass));
    Ok(())
}

fn independence(opts: &VerifyOptions) -> Result<Vec<Table>> {
    let mut t = table("independence", "the constructions are exactly t-wise independent", opts);
    for n in 4..=64 {
        independent_row(&mut t, format!("D_(2,{n}) at t = 2"), &twise_symmetric(n, 2)?, 2)?;
    }
    for n in 3..=12 {
        independent_row(&mut t, format!("D_(3,{n}) at t = 3"), &twise_symmetric(n, 3)?, 3)?;
    }
    let smallest = (4..=64).find(|&n| twise_z(n, 4).is_ok()).expect("D_(4,n) exists for some n");
    independent_row(&mut t, format!("D_(4,{smallest}) at t = 4, smallest feasible n"), &twise_symmetric(smallest, 4)?, 4)?;
    for n in [5, 7, 9] {
        independent_row(&mut t, format!("K_{n} cycles at t = 2"), &kn_cycle_dist(n)?, 2)?;
    }
    for n in 2..=12 {
        independent_row(&mut t, format!("pair or singleton, n = {n}, at t = 2"), &pair_singleton_dist(n)?, 2)?;
    }
    for (name, d) in opts.corpus.pi_dists()? {
        independent_row(&mut t, format!("{name} at t = 2"), &d, 2)?;
    }
    for path in &opts.extra_dists {
        let label = format!("{} at t = 2", path.display());
        match Corpus::dist_file(path) {
            Ok(d) => independent_row(&mut t, label, &d, 2)?,
            Err(e) => {
                log::warn!("{e}");
                t.push(Row::check(format!("{label} (unreadable: {e})"), false));
            }
        }
    }
    Ok(vec![t])
}

/// Product distribution at `x_e = b/γ(M)` on every edge.
fn graphic_instance(graph: &Multigraph, b: &Rational) -> Result<ExplicitDist> {
    let gamma = density(&Matroid::graphic(graph.clone())?)?;
    Ok(product_dist(&vec![b / gamma; graph.edge_count()])?)
}

fn graphic(opts: &VerifyOptions) -> Result<Vec<Table>> {
    let graphs = fixtures::multigraphs(5, 8);
    let mut t = table("graphic-small", "the chain family is (b, 1-2b)-selectable on every multigraph with <= 5 vertices and <= 8 edges", opts);
    for b in [rat(1, 10), rat(3, 10), rat(9, 20)] {
        let mut worst: Option<(Rational, usize)> = None;
        for (index, graph) in graphs.iter().enumerate() {
            let d = graphic_instance(graph, &b)?;
            let (_, family) = graphic_chain_prepare(graph.clone(), &d.clone().into(), &b, McConfig::new(opts.seed, 0))?;
            let min = exact_selectability(&Deterministic::new(family), &d)?.into_iter().flatten().min();
            if let Some(min) = min {
                if worst.as_ref().is_none_or(|(w, _)| &min < w) {
                    worst = Some((min, index));
                }
            }
        }
        let (min, index) = worst.expect("the enumeration is not empty");
        let item = format!("b = {b}: minimum over {} graphs (graph {index}: {})", graphs.len(), graphs[index].to_text().lines().collect::<Vec<_>>().join("; "));
        t.push(Row::new(item, Measured::Exact(min), Relation::AtLeast, int(1) - int(2) * &b));
    }
    Ok(vec![t, opts.experiment("graphic-tightness", &[("n", "5")])?])
}

fn uniform(opts: &VerifyOptions) -> Result<Vec<Table>> {
    let dists = opts.corpus.pi_dists()?;
    let mut averaging = table("averaging", "E[|R| 1[|R| >= k]] <= (1-delta^2)/delta^2 whenever x(E) = (1-delta)k", opts);
    let mut simple = table("simple-family", "{I : |I| <= k} is (b, 1-b)-selectable for x(E) <= bk", opts);
    let mut offline = table("offline-crs", "prefix overflow probabilities stay below (1+eps)/(eps^2 k)", opts);
    let half = rat(1, 2);
    for (name, d) in &dists {
        let total: Rational = d.marginals().iter().sum();
        let mut worst: Option<(Rational, usize, Rational, Rational)> = None;
        for k in 1..=d.ground_size() {
            let kk = int(k as i64);
            if total >= kk {
                continue;
            }
            let delta = int(1) - &total / &kk;
            let (tail, bound) = (averaging_tail(d, k), averaging_bound(&delta));
            let slack = &bound - &tail;
            if worst.as_ref().is_none_or(|(s, ..)| &slack < s) {
                worst = Some((slack, k, tail, bound));
            }
        }
        if let Some((_, k, tail, bound)) = worst {
            averaging.push(Row::new(format!("{name}, tightest k = {k}"), Measured::Exact(tail), Relation::AtMost, bound));
        }
        let k = ceil(&(&total / &half)).max(1);
        let items = exact_selectability(&Deterministic::new(simple_uniform_family(d.ground_size(), k)?), d)?;
        let min = items.into_iter().flatten().min().unwrap_or_else(|| int(1));
        simple.push(Row::new(format!("{name}, k = {k}"), Measured::Exact(min), Relation::AtLeast, int(1) - &half));
        let k = ceil(&(&total * int(2))).max(1);
        let ordering = offline_uniform_crs(d, k, &half)?;
        let (pos, overflow) = ordering
            .prefix_overflow
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1))
            .map(|(p, o)| (p, o.clone()))
            .unwrap_or((0, Rational::zero()));
        offline.push(Row::new(format!("{name}, k = {k}, worst prefix {pos}"), Measured::Exact(overflow), Relation::AtMost, ordering.bound.clone()));
    }
    Ok(vec![
        averaging,
        simple,
        opts.experiment("uniform-simple", &[])?,
        opts.experiment("uniform-two-bucket", &[])?,
        offline,
        opts.experiment("uniform-crs", &[])?,
    ])
}

fn ceil(r: &Rational) -> usize {
    r.ceil().to_integer().to_usize().expect("a small nonnegative count")
}

fn laminar(opts: &VerifyOptions) -> Result<Vec<Table>> {
    Ok(vec![opts.experiment("laminar", &[])?])
}

fn cographic(opts: &VerifyOptions) -> Result<Vec<Table>> {
    Ok(vec![opts.experiment("cographic", &[])?])
}

fn transversal(opts: &VerifyOptions) -> Result<Vec<Table>> {
    Ok(vec![opts.experiment("transversal", &[])?])
}

fn regular(opts: &VerifyOptions) -> Result<Vec<Table>> {
    Ok(vec![opts.experiment("regular", &[])?])
}

fn quality(opts: &VerifyOptions) -> Result<Vec<Table>> {
    let mut tables = Vec::new();
    for t in [2, 4] {
        for n in [16, 32, 64] {
            tables.push(opts.experiment("twise-quality", &[("t", &t.to_string()), ("n", &n.to_string())])?);
        }
    }
    let mut fixtures = table("quality-fixtures", "every exactly t-wise independent fixture has quality at least phi(t)", opts);
    let mut push = |label: String, d: &ExplicitDist, t: usize| -> Result<()> {
        let q = rank1_crs_quality(d)?;
        fixtures.push(Row::new(label, Measured::Exact(q.value), Relation::AtLeast, phi(t)));
        Ok(())
    };
    for t in 2..=4 {
        for n in (t.max(3))..=12 {
            if let Ok(d) = twise_symmetric(n, t) {
                push(format!("D_({t},{n})"), &d, t)?;
            }
        }
    }
    push("K_5 cycles, thinned to x(E) = 1".into(), &onto_simplex(&kn_cycle_dist(5)?)?, 2)?;
    for n in 2..=12 {
        push(format!("pair or singleton, n = {n}"), &onto_simplex(&pair_singleton_dist(n)?)?, 2)?;
    }
    for (name, d) in opts.corpus.pi_dists()? {
        push(format!("{name}, thinned to x(E) <= 1"), &onto_simplex(&d)?, 2)?;
    }
    tables.push(fixtures);
    Ok(tables)
}

/// Thins every item by `1/x(E)` when `x(E) > 1`; independence of each level survives thinning.
fn onto_simplex(d: &ExplicitDist) -> Result<ExplicitDist> {
    let total: Rational = d.marginals().iter().sum();
    if total <= int(1) {
        return Ok(d.clone());
    }
    let keep = vec![int(1) / total; d.ground_size()];
    let thinned = thin(&d.clone().into(), &keep)?;
    Ok(thinned.as_explicit().expect("explicit input stays explicit").clone())
}

fn single_item(opts: &VerifyOptions) -> Result<Vec<Table>> {
    let mut tables = vec![opts.experiment("single-sqrt2", &[])?];
    for n in ["50", "200"] {
        tables.push(opts.experiment("multi-threshold-ub", &[("n", n)])?);
    }
    for n in ["4", "6", "8"] {
        tables.push(opts.experiment("almighty-ub", &[("n", n)])?);
    }
    tables.push(opts.experiment("single-sample", &[])?);
    Ok(tables)
}

const PROPHET_K: usize = 10_000;
const PROPHET_TRIALS: u64 = 10_000;

fn prophet(opts: &VerifyOptions) -> Result<Vec<Table>> {
    let mut t = table("prophet", "greedy OCRS families turn into prophet inequalities with the same constant", opts);
    let params = BucketParams::with_defaults(PROPHET_K)?;
    let n = 2 * PROPHET_K;
    // x(E) = (1-eps)k minus a 1e-3 margin, so that sampled thresholds stay inside the face
    let keep = rational::from_f64((1.0 - params.eps) * (1.0 - 1e-3), 9);
    let d: SubsetDistribution = Sampler::parity(vec![keep; n])?.into();
    let weights: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 / n as f64).collect();
    let v = ValueModel::new(d, weights, Feasibility::Uniform(PROPHET_K))?;
    let th = sampled_membership_thresholds(&v, opts.mc(PROPHET_TRIALS, 0))?;
    let buckets = two_bucket_prepare(&th.passing(&v)?, params, opts.mc(PROPHET_TRIALS, 1))?;
    let s = PreparedScheme::new(Arc::new(Deterministic::new(buckets.family)), rat(1, 1), params.guarantee());
    let report = prophet_simulate(&s, &v, &th, ArrivalOrder::IncreasingWeight, opts.mc(PROPHET_TRIALS, 2))?;
    let bound = 0.9 * (1.0 - 3.0 * (PROPHET_K as f64).powf(-0.2));
    let measured = Measured::Sampled { value: report.ratio, sigma: report.sigma };
    t.push(Row::new(format!("k = {PROPHET_K} uniform, two buckets"), measured, Relation::AtLeast, bound));

    let b = rat(3, 10);
    let graph = Multigraph::cycle(3);
    let m = Arc::new(Matroid::graphic(graph.clone())?);
    let d: SubsetDistribution = product_dist(&vec![rat(1, 5); 3])?.into();
    let v = ValueModel::new(d, vec![1.0, 2.0, 3.0], Feasibility::Matroid(m))?;
    let th = opt_membership_thresholds(&v)?;
    let (_, family) = graphic_chain_prepare(graph, &th.passing(&v)?, &b, opts.mc(0, 3))?;
    let guarantee = int(1) - int(2) * &b;
    let s = PreparedScheme::new(Arc::new(Deterministic::new(family)), b, rational::to_f64(&guarantee));
    let report = prophet_simulate(&s, &v, &th, ArrivalOrder::IncreasingWeight, opts.mc(20_000, 4))?;
    let measured = Measured::Sampled { value: report.ratio, sigma: report.sigma };
    t.push(Row::new("triangle, b = 3/10", measured, Relation::AtLeast, Bound::Exact(guarantee)));
    Ok(vec![t])
}

/// Most realizations compared per scheme; larger schemes are sampled.
const CERTIFIED_REALIZATIONS: usize = 16;
/// Ground sets up to this size have every active set compared.
const ALL_ACTIVE_SETS: usize = 8;
const SAMPLED_ACTIVE_SETS: usize = 128;
const CERTIFIED_GROUND: usize = 12;

fn families(scheme: &dyn Scheme, rng: &mut impl Rng) -> Vec<Arc<dyn GreedyFamily>> {
    match scheme.realizations() {
        Ok(all) if all.len() <= CERTIFIED_REALIZATIONS => all.into_iter().map(|(f, _)| f).collect(),
        _ => (0..CERTIFIED_REALIZATIONS).map(|_| scheme.realize(rng)).collect(),
    }
}

/// Compares `extending` with [`brute_force_extends`] and records the number of disagreements.
fn certify(t: &mut Table, label: &str, scheme: &dyn Scheme, rng: &mut impl Rng) -> Result<()> {
    let n = scheme.ground_size();
    let masks: Vec<u64> = if n <= ALL_ACTIVE_SETS {
        (0..1u64 << n).collect()
    } else {
        (0..SAMPLED_ACTIVE_SETS).map(|_| rng.gen::<u64>() & bits::full(n)).collect()
    };
    let mut checks = 0u64;
    let mut disagreements = 0u64;
    for family in families(scheme, rng) {
        for &mask in &masks {
            let active = bits::elements(mask);
            for (&item, certified) in active.iter().zip(family.extending(&active)) {
                checks += 1;
                disagreements += u64::from(certified != brute_force_extends(family.as_ref(), &active, item)?);
            }
        }
    }
    log::debug!("{label}: {checks} checks");
    t.push(Row::count_at_most(format!("{label}: disagreements in {checks} checks"), disagreements, 0));
    Ok(())
}

fn small_laminar() -> LaminarFamily {
    LaminarFamily::parse("laminar 12\ncap 4 : 0 1 2 3 4 5 6 7 8 9 10 11\ncap 2 : 0 1 2 3 4 5\ncap 2 : 6 7 8 9 10 11\ncap 1 : 0 1\n")
        .expect("nested blocks are laminar")
}

fn certificates(opts: &VerifyOptions) -> Result<Vec<Table>> {
    let mut t = table("certificates", "each family's extension certificate matches subset enumeration", opts);
    let mut rng = mc::rng(opts.seed, 11);
    let half = rat(1, 2);

    for (name, d) in opts.corpus.pi_dists()? {
        let k = ceil(&(d.marginals().iter().sum::<Rational>() * int(2))).max(1);
        certify(&mut t, &format!("capacity family on {name}, k = {k}"), &Deterministic::new(simple_uniform_family(d.ground_size(), k)?), &mut rng)?;
    }
    for (index, graph) in fixtures::multigraphs(4, 6).iter().enumerate() {
        let b = rat(3, 10);
        let d = graphic_instance(graph, &b)?;
        let (_, family) = graphic_chain_prepare(graph.clone(), &d.into(), &b, McConfig::new(opts.seed, 0))?;
        certify(&mut t, &format!("chain family on multigraph {index}"), &Deterministic::new(family), &mut rng)?;
    }
    let k4 = Multigraph::complete(4);
    let mut cographic: Vec<(String, Multigraph)> = vec![("K4".into(), k4.clone())];
    cographic.extend(opts.corpus.cographic_graphs()?.into_iter().filter(|(_, g)| g.edge_count() <= CERTIFIED_GROUND));
    for (name, graph) in cographic {
        certify(&mut t, &format!("cographic family on {name}"), &cographic_prepare(graph)?, &mut rng)?;
    }
    let inner = PreparedScheme::new(Arc::new(cographic_prepare(k4)?), half.clone(), 1.0 / 6.0);
    certify(&mut t, "scaled cographic family on K4", scale_wrapper(&inner, &half)?.scheme.as_ref(), &mut rng)?;
    for (name, graph, x) in opts.corpus.bipartite()? {
        certify(&mut t, &format!("transversal family on {name}"), &transversal_prepare(&graph, &x, &half)?, &mut rng)?;
    }
    let five = five_cycle();
    certify(&mut t, "transversal family on the five-cycle", &transversal_prepare(&five, &vec![half.clone(); 5], &half)?, &mut rng)?;
    let rounded = round_laminar(&small_laminar())?;
    let x: Vec<Rational> = (0..12).map(|e| if e < 2 { rat(1, 50) } else { rat(1, 75) }).collect();
    let d = thinned_parity(&x)?;
    let scheme = laminar_prepare(&rounded, &d.into(), 13, 24.0 / 25.0, opts.mc(2000, 12))?;
    certify(&mut t, "laminar family on a 12-element chain of blocks", &Deterministic::new(scheme.family), &mut rng)?;
    for name in fixtures::REGULAR {
        let tree = fixtures::regular(name)?;
        let root = tree.root_matroid()?;
        if root.id_space() > CERTIFIED_GROUND {
            continue;
        }
        let x = vec![rat(1, 3) / density(&root)?; root.id_space()];
        let scheme = regular_prepare(&tree, &product_dist(&x)?.into(), opts.mc(2000, 13))?;
        certify(&mut t, &format!("glued regular family on {name}"), &scheme, &mut rng)?;
    }
    Ok(vec![t])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_are_numbered_in_order() {
        for (i, c) in CRITERIA.iter().enumerate() {
            assert_eq!(c.id as usize, i + 1);
        }
    }

    #[test]
    fn corrupt_file_fails_pi_consistency() {
        let corpus = Corpus::shipped();
        let mut opts = VerifyOptions::new(0, corpus.clone());
        opts.extra_dists.push(corpus.root().join("corrupt/negative_probability.dist"));
        let rows = verify_only(&opts, &[1]);
        assert_eq!(rows[0].status, Status::Fail);
        assert!(rows[0].detail.contains("negative_probability"));
    }

    #[test]
    fn reduced_budgets_are_never_a_pass() {
        let mut opts = VerifyOptions::new(0, Corpus::shipped());
        opts.reduced = Some(100);
        let rows = verify_only(&opts, &[9]);
        assert_ne!(rows[0].status, Status::Pass);
    }

    #[test]
    fn errors_become_failures() {
        let opts = VerifyOptions::new(0, Corpus::new("/nonexistent"));
        let rows = verify_only(&opts, &[5]);
        assert_eq!(rows[0].status, Status::Fail);
        assert!(rows[0].detail.starts_with("criterion 5:"));
    }
}
