//! The registered experiments. Each resolves its parameters against documented defaults and
//! fills one claim table.

use std::sync::Arc;

use num_traits::{Signed, Zero};
use pi_ocrs::dist::{parity_dist, product_dist, thin, twise_symmetric, twise_z, verify_independence, ExplicitDist, Sampler};
use pi_ocrs::fixtures;
use pi_ocrs::matroid::{density, in_scaled_polytope, Bipartite, Matroid, Multigraph};
use pi_ocrs::mc::{self, Estimate, McConfig};
use pi_ocrs::ocrs::{exact_selectability, sampled_selectability, Deterministic, Scheme};
use pi_ocrs::prophet::{scale_wrapper, selectability, Mode, PreparedScheme};
use pi_ocrs::rational::{self, int, rat};
use pi_ocrs::regular::{gluing_violations, regular_prepare, validate_good, DecompositionTree};
use pi_ocrs::single::{
    almighty_bound, almighty_experiment, best_uniform_ratio, multi_threshold_limit, phi, rank1_crs_quality,
    single_sample_exact, single_sample_fixtures, single_sample_guarantee, single_sample_mc, sqrt2_policy,
    symmetric_quality, AlmightyPolicy, MultiThresholdInstance, SQRT2_GUARANTEE,
};
use pi_ocrs::structured::{
    cographic_prepare, graphic_chain_prepare, laminar_guarantee, laminar_load, laminar_prepare, round_laminar,
    transversal_flow, transversal_prepare,
};
use pi_ocrs::uniform::{offline_uniform_crs, simple_uniform_family, two_bucket_prepare, BucketParams};
use pi_ocrs::Rational;
use rand::Rng;

use crate::config::{Args, ExperimentConfig};
use crate::corpus::Corpus;
use crate::error::{CliError, Result};
use crate::report::{Bound, Measured, Relation, Row, Table};

/// Shared inputs of a run.
#[derive(Clone, Debug)]
pub struct Context {
    pub seed: u64,
    pub corpus: Corpus,
}

impl Context {
    pub fn mc(&self, trials: u64, stream: u64) -> McConfig {
        McConfig::new(self.seed, trials).fork(stream)
    }
}

type Body = fn(&Args, &Context, &mut Table) -> Result<()>;

pub struct Experiment {
    pub name: &'static str,
    /// The statement the table checks, in words.
    pub claim: &'static str,
    /// Every parameter the experiment takes, with its default; `auto` derives it from the others.
    pub defaults: &'static [(&'static str, &'static str)],
    body: Body,
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "uniform-simple",
        claim: "the family {I : |I| <= k} is (b, 1-b)-selectable for k-uniform matroids under pairwise independence",
        defaults: &[("n", "8"), ("k", "2"), ("b", "1/2")],
        body: uniform_simple,
    },
    Experiment {
        name: "uniform-two-bucket",
        claim: "the two-bucket family is (1 - (4/27 eps^3 k)^(-1/2))-selectable on the face x(E) <= (1-eps)k",
        defaults: &[("k", "10000"), ("eps", "auto"), ("n", "auto"), ("trials", "10000")],
        body: uniform_two_bucket,
    },
    Experiment {
        name: "uniform-crs",
        claim: "the offline ordered CRS certifies every prefix overflow probability below (1+eps)/(eps^2 k)",
        defaults: &[("n", "10"), ("k", "3"), ("eps", "1/2")],
        body: uniform_crs,
    },
    Experiment {
        name: "graphic",
        claim: "the chain family is (b, 1-2b)-selectable for graphic matroids under pairwise independence",
        defaults: &[("n", "4"), ("b", "3/10")],
        body: graphic,
    },
    Experiment {
        name: "graphic-tightness",
        claim: "on K_n under the pairwise-independent cycle distribution every active edge is spanned by the other active edges",
        defaults: &[("n", "5")],
        body: graphic_tightness,
    },
    Experiment {
        name: "laminar",
        claim: "rounded laminar constraints with slack 1-b per constraint give a 1/2.661-selectable intersection family",
        defaults: &[("t", "13"), ("b", "24/25"), ("trials", "2000")],
        body: laminar,
    },
    Experiment {
        name: "cographic",
        claim: "cographic matroids of bridgeless min-degree-3 graphs have density at most 3 and a (b, (1-b)/3)-selectable scheme",
        defaults: &[("b", "1/2")],
        body: cographic,
    },
    Experiment {
        name: "transversal",
        claim: "a fractional assignment with flow value x(E) yields a (b, 1-b)-selectable label scheme for transversal matroids",
        defaults: &[("b", "1/2")],
        body: transversal,
    },
    Experiment {
        name: "regular",
        claim: "leaf schemes glued along a good decomposition stay independent in the regular matroid and are 1/12-selectable for x in P/3",
        defaults: &[("trials", "10000")],
        body: regular,
    },
    Experiment {
        name: "single-sqrt2",
        claim: "the sqrt2 threshold policy is (sqrt2 - 1)-balanced for every x with x(E) <= 1, and no policy does much better on uniform x",
        defaults: &[("n", "100"), ("trials", "1000")],
        body: single_sqrt2,
    },
    Experiment {
        name: "single-sample",
        claim: "the single-sample rule earns at least 3 - sqrt5 - ln2 of E[max] on pairwise-independent values",
        defaults: &[("trials", "100000")],
        body: single_sample,
    },
    Experiment {
        name: "multi-threshold-ub",
        claim: "no multiple-threshold policy beats 2sqrt5 - 4 + O(1/n) on the pairwise-independent hard instance",
        defaults: &[("n", "200")],
        body: multi_threshold_ub,
    },
    Experiment {
        name: "almighty-ub",
        claim: "against the almighty adversary no single-item rule keeps an element with conditional probability above 1/4 + 1/n",
        defaults: &[("n", "8")],
        body: almighty_ub,
    },
    Experiment {
        name: "twise-quality",
        claim: "the best single-item CRS quality under t-wise independence tends to phi(t) and equals 1 - Pr[R empty] on D_{t,n}",
        defaults: &[("t", "2"), ("n", "16")],
        body: twise_quality,
    },
    Experiment {
        name: "phi-table",
        claim: "phi(t) = 1 - sum_{k<=2floor(t/2)} (-1)^k/k! approaches 1 - 1/e from below, with phi(2) = 1/2",
        defaults: &[("tmax", "8")],
        body: phi_table,
    },
];

pub fn find(name: &str) -> Result<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name).ok_or_else(|| CliError::UnknownExperiment(name.into()))
}

pub fn run_experiment(config: &ExperimentConfig, corpus: &Corpus) -> Result<Table> {
    let experiment = find(&config.name)?;
    let args = Args::resolve(experiment.name, experiment.defaults, &config.params)?;
    let mut table = Table::new(experiment.name, experiment.claim, config.seed, args.entries());
    let cx = Context { seed: config.seed, corpus: corpus.clone() };
    (experiment.body)(&args, &cx, &mut table)?;
    Ok(table)
}

fn param_error(key: &str, value: impl ToString, reason: &str) -> CliError {
    CliError::InvalidValue { key: key.into(), value: value.to_string(), reason: reason.into() }
}

/// Pairwise-independent distribution with marginals `x`: parity bits over `GF(2)^m`, thinned by `2x_i`.
pub fn thinned_parity(x: &[Rational]) -> Result<ExplicitDist> {
    let n = x.len();
    let m = (usize::BITS - n.leading_zeros()) as usize;
    let vectors: Vec<u64> = (1..=n as u64).collect();
    let parity = parity_dist(&vectors, m.max(1))?;
    let keep: Vec<Rational> = x.iter().map(|xi| xi * int(2)).collect();
    let thinned = thin(&parity.into(), &keep)?;
    Ok(thinned.as_explicit().expect("explicit input stays explicit").clone())
}

const ROW_LIMIT: usize = 64;

/// One row per item; above [`ROW_LIMIT`] items only failing rows and the smallest estimate.
pub fn selectability_rows(table: &mut Table, label: &str, items: &[Option<Estimate>], bound: &Bound) {
    let rows: Vec<(f64, Row)> = items
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.as_ref().map(|e| (i, e)))
        .map(|(i, e)| (e.value, Row::new(format!("{label} {i}"), Measured::from_estimate(e), Relation::AtLeast, bound.clone())))
        .collect();
    if rows.len() <= ROW_LIMIT {
        table.rows.extend(rows.into_iter().map(|(_, r)| r));
        return;
    }
    let total = rows.len();
    let worst = rows.iter().min_by(|a, b| a.0.total_cmp(&b.0)).map(|(_, r)| r.clone());
    let mut kept: Vec<Row> = rows.into_iter().map(|(_, r)| r).filter(|r| !r.pass).collect();
    if let Some(mut worst) = worst {
        worst.item = format!("worst of {total}: {}", worst.item);
        if worst.pass {
            kept.push(worst);
        }
    }
    table.rows.extend(kept);
}

fn exact_items(values: Vec<Option<Rational>>) -> Vec<Option<Estimate>> {
    values.into_iter().map(|v| v.map(Estimate::exact)).collect()
}

fn uniform_simple(a: &Args, _cx: &Context, table: &mut Table) -> Result<()> {
    let (n, k, b) = (a.count("n"), a.count("k"), a.rational("b"));
    let x = &b * rat(k as i64, n as i64);
    let d = thinned_parity(&vec![x; n])?;
    let scheme = Deterministic::new(simple_uniform_family(n, k)?);
    let items = exact_items(exact_selectability(&scheme, &d)?);
    selectability_rows(table, "item", &items, &Bound::Exact(int(1) - &b));
    table.fixture("uniform-simple.dist", d.to_text());
    Ok(())
}

fn uniform_two_bucket(a: &Args, cx: &Context, table: &mut Table) -> Result<()> {
    let k = a.count("k");
    let params = match a.maybe_rational("eps") {
        Some(eps) => BucketParams::new(k, rational::to_f64(&eps), 1.0 / 3.0)?,
        None => BucketParams::with_defaults(k)?,
    };
    let n = a.maybe_count("n").unwrap_or(2 * k);
    // x(E) = (1-eps)k, rounded down to nine digits so that it stays on the face
    let x = ((1.0 - params.eps) * k as f64 / n as f64 * 1e9).floor() / 1e9;
    if x > 1.0 {
        return Err(param_error("n", n, "too few items to reach x(E) = (1-eps)k"));
    }
    let d = Sampler::product(vec![rational::from_f64(x, 9); n])?.into();
    let buckets = two_bucket_prepare(&d, params, cx.mc(a.trials(), 0))?;
    let family = Deterministic::new(buckets.family.clone());
    let items = sampled_selectability(&family, &d, cx.mc(a.trials(), 1));
    selectability_rows(table, "item", &items, &Bound::Float(params.guarantee()));
    table.push(Row::count_at_most("ambiguous classifications", buckets.ambiguous.len() as u64, n as u64));
    Ok(())
}

fn uniform_crs(a: &Args, _cx: &Context, table: &mut Table) -> Result<()> {
    let (n, k, eps) = (a.count("n"), a.count("k"), a.rational("eps"));
    let x = (int(1) - &eps) * rat(k as i64, n as i64);
    let d = thinned_parity(&vec![x; n])?;
    let ordering = offline_uniform_crs(&d, k, &eps)?;
    for (pos, (item, overflow)) in ordering.order.iter().zip(&ordering.prefix_overflow).enumerate() {
        table.push(Row::new(
            format!("position {pos} (item {item})"),
            Measured::Exact(overflow.clone()),
            Relation::AtMost,
            ordering.bound.clone(),
        ));
    }
    table.fixture("uniform-crs.dist", d.to_text());
    Ok(())
}

/// `x = b/gamma` on every element: a point of `b·P` on the densest face.
fn density_point(m: &Matroid, b: &Rational) -> Result<Vec<Rational>> {
    let gamma = density(m)?;
    Ok(vec![b / gamma; m.id_space()])
}

fn graphic(a: &Args, cx: &Context, table: &mut Table) -> Result<()> {
    let (n, b) = (a.count("n"), a.rational("b"));
    let graph = Multigraph::complete(n);
    let x = density_point(&Matroid::graphic(graph.clone())?, &b)?;
    let d = product_dist(&x)?;
    let (_, family) = graphic_chain_prepare(graph.clone(), &d.clone().into(), &b, cx.mc(0, 0))?;
    let items = exact_items(exact_selectability(&Deterministic::new(family), &d)?);
    selectability_rows(table, "edge", &items, &Bound::Exact(int(1) - int(2) * &b));
    table.fixture(format!("k{n}.graph"), graph.to_text());
    table.fixture(format!("k{n}-product.dist"), d.to_text());
    Ok(())
}

fn graphic_tightness(a: &Args, _cx: &Context, table: &mut Table) -> Result<()> {
    let n = a.count("n");
    let d = pi_ocrs::dist::kn_cycle_dist(n)?;
    let m = Matroid::graphic(Multigraph::complete(n))?;
    let pi = verify_independence(&d, 2)?;
    table.push(Row::check("pairwise independent", pi.pass));
    for e in m.elements() {
        let spanned = d
            .conditional(
                |mask| {
                    let rest: Vec<usize> = pi_ocrs::bits::iter(mask).filter(|&f| f != e).collect();
                    m.in_span(&rest, e).unwrap_or(false)
                },
                |mask| mask >> e & 1 == 1,
            )
            .unwrap_or_else(Rational::zero);
        table.push(Row::new(format!("edge {e}"), Measured::Exact(spanned), Relation::Equal, int(1)));
    }
    table.fixture(format!("k{n}-cycles.dist"), d.to_text());
    Ok(())
}

fn laminar(a: &Args, cx: &Context, table: &mut Table) -> Result<()> {
    let (t, b) = (a.count("t"), a.rational("b"));
    let target = 1.0 / 2.661;
    let b_f = rational::to_f64(&b);
    table.push(Row::new("closed-form guarantee", Measured::Computed(laminar_guarantee(t as u32, b_f)), Relation::AtLeast, target - 1e-6));
    let family = cx.corpus.three_level_laminar()?;
    let rounded = round_laminar(&family)?;
    let n = family.n();
    let slack = int(1) - &b;
    let x: Vec<Rational> = (0..n)
        .map(|e| {
            let tightest = rounded
                .rounded
                .sets()
                .iter()
                .filter(|s| s.members.contains(&e))
                .map(|s| rat(s.cap as i64, s.members.len() as i64))
                .min()
                .unwrap_or_else(|| int(1));
            &slack * tightest
        })
        .collect();
    table.push(Row::new("max load x(A)/c'(A)", Measured::Exact(laminar_load(&rounded.rounded, &x)), Relation::AtMost, slack));
    let d = thinned_parity(&x)?;
    let scheme = laminar_prepare(&rounded, &d.clone().into(), t as u32, b_f, cx.mc(a.trials(), 0))?;
    let items = exact_items(exact_selectability(&Deterministic::new(scheme.family), &d)?);
    selectability_rows(table, "item", &items, &Bound::Float(target));
    table.fixture("three_level_24.lam", family.to_text());
    table.fixture("three_level_24.dist", d.to_text());
    Ok(())
}

fn cographic(a: &Args, cx: &Context, table: &mut Table) -> Result<()> {
    let b = a.rational("b");
    for (name, graph) in cx.corpus.cographic_graphs()? {
        let gamma = density(&Matroid::cographic(graph)?)?;
        table.push(Row::new(format!("density {name}"), Measured::Exact(gamma), Relation::AtMost, int(3)));
    }
    let k4 = Multigraph::complete(4);
    let scheme: Arc<dyn Scheme> = Arc::new(cographic_prepare(k4.clone())?);
    let m = Matroid::cographic(k4.clone())?;
    let inner_c = (int(1) - &b) / int(3);
    let x = density_point(&m, &b)?;
    let d = product_dist(&x)?;
    let items = exact_items(exact_selectability(scheme.as_ref(), &d)?);
    selectability_rows(table, "K4 edge", &items, &Bound::Exact(inner_c.clone()));
    // the composite sees x in P; the inner scheme sees the b-subsample
    let prepared = PreparedScheme::new(scheme, b.clone(), rational::to_f64(&inner_c));
    let composite = scale_wrapper(&prepared, &b)?;
    let full = product_dist(&density_point(&m, &int(1))?)?;
    let report = selectability(&composite, &full.clone().into(), Mode::Exact)?;
    selectability_rows(table, "K4 composite edge", &report.items, &Bound::Exact(&b * &inner_c));
    table.fixture("k4.graph", k4.to_text());
    table.fixture("k4-composite.dist", full.to_text());
    Ok(())
}

/// Left vertex `i` sees right vertices `i` and `i+1 mod 5`.
pub fn five_cycle() -> Bipartite {
    let edges: Vec<(usize, usize)> = (0..5).flat_map(|i| [(i, i), (i, (i + 1) % 5)]).collect();
    Bipartite::new(5, 5, &edges).expect("endpoints are in range")
}

fn transversal(a: &Args, cx: &Context, table: &mut Table) -> Result<()> {
    let b = a.rational("b");
    let mut worst_load = Rational::zero();
    for (name, graph, x) in cx.corpus.bipartite()? {
        let y = transversal_flow(&graph, &x, &b)?;
        let flow: Rational = y.rows.iter().zip(&x).map(|(row, xi)| xi * rational::sum(row.iter().map(|(_, v)| v))).sum();
        table.push(Row::new(format!("flow {name}"), Measured::Exact(flow), Relation::Equal, rational::sum(&x)));
        worst_load = y.loads(&x).into_iter().fold(worst_load, |acc, l| acc.max(l));
    }
    table.push(Row::new("max right-vertex load", Measured::Exact(worst_load), Relation::AtMost, b.clone()));
    let graph = five_cycle();
    let d = thinned_parity(&vec![b.clone(); 5])?;
    let scheme = transversal_prepare(&graph, &d.marginals(), &b)?;
    let items = exact_items(exact_selectability(&scheme, &d)?);
    selectability_rows(table, "cycle item", &items, &Bound::Exact(int(1) - &b));
    let full = parity_dist(&[1, 2, 3, 4, 5], 3)?;
    let sub: Vec<Rational> = full.marginals().iter().map(|xi| xi * &b).collect();
    let inner = PreparedScheme::new(Arc::new(transversal_prepare(&graph, &sub, &b)?), b.clone(), rational::to_f64(&(int(1) - &b)));
    let report = selectability(&scale_wrapper(&inner, &b)?, &full.clone().into(), Mode::Exact)?;
    selectability_rows(table, "cycle composite item", &report.items, &Bound::Exact(&b * (int(1) - &b)));
    table.fixture("five_cycle.bip", graph.to_text());
    table.fixture("five_cycle.dist", d.to_text());
    Ok(())
}

fn regular(a: &Args, cx: &Context, table: &mut Table) -> Result<()> {
    let third = rat(1, 3);
    for (k, name) in fixtures::REGULAR.iter().enumerate() {
        let tree = fixtures::regular(name)?;
        table.push(Row::check(format!("{name} is good"), validate_good(&tree).is_ok()));
        let root = tree.root_matroid()?;
        let x = density_point(&root, &third)?;
        let d = product_dist(&x)?;
        let scheme = regular_prepare(&tree, &d.clone().into(), cx.mc(a.trials(), 2 * k as u64))?;
        let violations = gluing_violations(&root, &scheme, &d.clone().into(), cx.mc(a.trials(), 2 * k as u64 + 1));
        table.push(Row::count_at_most(format!("{name} glued sets dependent in the root"), violations, 0));
        if *name == "two_triangles" {
            table.push(Row::check(format!("{name} x in P/3"), in_scaled_polytope(&root, &x, &third)?));
            let items = exact_items(exact_selectability(&scheme, &d)?);
            selectability_rows(table, &format!("{name} element"), &items, &Bound::Exact(rat(1, 12)));
        }
        table.fixture(format!("{name}.dec"), fixtures::resolve(&format!("{name}.dec"))?);
    }
    let bad = DecompositionTree::parse(&fixtures::resolve("bad_three_sum.dec")?, &fixtures::resolve)?;
    table.push(Row::check("bad_three_sum is rejected", validate_good(&bad).is_err()));
    Ok(())
}

fn single_sqrt2(a: &Args, cx: &Context, table: &mut Table) -> Result<()> {
    let draws = a.trials();
    let mut rng = mc::rng(cx.seed, 0);
    let mut worst = f64::INFINITY;
    for _ in 0..draws {
        let len = rng.gen_range(1..=20);
        let raw: Vec<f64> = (0..len).map(|_| rng.gen::<f64>()).collect();
        let scale = rng.gen::<f64>() / raw.iter().sum::<f64>();
        let x: Vec<f64> = raw.iter().map(|v| v * scale).collect();
        worst = worst.min(sqrt2_policy(&x)?.min_ratio(&x));
    }
    table.push(Row::new(format!("worst of {draws} random x"), Measured::Computed(worst), Relation::AtLeast, SQRT2_GUARANTEE - 1e-9));
    let n = a.count("n");
    let (best, _) = best_uniform_ratio(&vec![1.0 / n as f64; n]);
    table.push(Row::new(format!("best policy on uniform x, n = {n}"), Measured::Computed(best), Relation::AtMost, SQRT2_GUARANTEE + 0.05));
    Ok(())
}

fn single_sample(a: &Args, cx: &Context, table: &mut Table) -> Result<()> {
    let guarantee = single_sample_guarantee();
    for (k, (name, instance)) in single_sample_fixtures()?.into_iter().enumerate() {
        table.push(Row::check(format!("{name} pairwise independent"), instance.verify_pairwise().is_ok()));
        let exact = single_sample_exact(&instance);
        table.push(Row::new(format!("{name} enumerated"), Measured::Computed(exact.ratio()), Relation::AtLeast, guarantee));
        let sampled = single_sample_mc(&instance, cx.mc(a.trials(), k as u64));
        let measured = Measured::Sampled { value: sampled.ratio(), sigma: sampled.sigma };
        table.push(Row::new(format!("{name} sampled"), measured, Relation::AtLeast, guarantee));
    }
    Ok(())
}

fn multi_threshold_ub(a: &Args, _cx: &Context, table: &mut Table) -> Result<()> {
    let n = a.count("n");
    let instance = MultiThresholdInstance::optimal(n)?;
    let bound = multi_threshold_limit() + 5.0 / n as f64;
    table.push(Row::new("upper bound on any policy", Measured::Computed(instance.sup_bound()), Relation::AtMost, bound));
    let (found, _) = instance.search_ratio();
    table.push(Row::new("best policy found by search", Measured::Computed(found), Relation::AtMost, instance.sup_bound()));
    table.push(Row::check("instance pairwise independent", instance.outcomes()?.verify_pairwise().is_ok()));
    Ok(())
}

fn almighty_ub(a: &Args, _cx: &Context, table: &mut Table) -> Result<()> {
    let n = a.count("n");
    for policy in AlmightyPolicy::ALL {
        let report = almighty_experiment(n, policy)?;
        let label = format!("{} (worst item {})", policy.name(), report.worst_item);
        table.push(Row::new(label, Measured::Exact(report.min().clone()), Relation::AtMost, almighty_bound(n)));
    }
    Ok(())
}

/// Largest `n` for which the quality of `D_{t,n}` is also computed by subset enumeration.
const ENUMERATION_LIMIT: usize = 16;

fn twise_quality(a: &Args, _cx: &Context, table: &mut Table) -> Result<()> {
    let (t, n) = (a.count("t"), a.count("n"));
    let z = twise_z(n, t)?;
    let expected = int(1) - z.get(0);
    if n <= ENUMERATION_LIMIT {
        let enumerated = rank1_crs_quality(&twise_symmetric(n, t)?)?;
        table.push(Row::new("enumerated quality of D_{t,n}", Measured::Exact(enumerated.value), Relation::Equal, expected.clone()));
    }
    let quality = symmetric_quality(&z)?.value;
    table.push(Row::new("quality of D_{t,n}", Measured::Exact(quality.clone()), Relation::Equal, expected.clone()));
    let gap = (&expected - phi(t)).abs();
    table.push(Row::new("|quality - phi(t)|", Measured::Exact(gap), Relation::AtMost, rat(4, n as i64)));
    table.push(Row::new("quality against phi(t)", Measured::Exact(quality), Relation::AtLeast, phi(t)));
    let m = n.min(12);
    let product = rank1_crs_quality(&product_dist(&vec![rat(1, m as i64); m])?)?;
    let closed = int(1) - rational::pow(&(int(1) - rat(1, m as i64)), m);
    table.push(Row::new(format!("product quality, x = 1/{m}"), Measured::Exact(product.value), Relation::Equal, closed));
    table.fixture(format!("twise-{t}-{n}.z"), z.to_text());
    Ok(())
}

fn phi_table(a: &Args, _cx: &Context, table: &mut Table) -> Result<()> {
    let tmax = a.count("tmax");
    let limit = 1.0 - (-1f64).exp();
    table.push(Row::new("phi(2) anchor", Measured::Exact(phi(2)), Relation::Equal, rat(1, 2)));
    for t in 2..=tmax {
        table.push(Row::new(format!("phi({t})"), Measured::Exact(phi(t)), Relation::AtMost, limit));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Settings;

    fn run(name: &str, overrides: &[(&str, &str)]) -> Table {
        let mut settings = Settings::default();
        for (k, v) in overrides {
            settings.set(k, v).unwrap();
        }
        run_experiment(&ExperimentConfig::new(name, settings), &Corpus::shipped()).unwrap()
    }

    #[test]
    fn registry_names_are_unique() {
        for (i, e) in EXPERIMENTS.iter().enumerate() {
            assert!(EXPERIMENTS[i + 1..].iter().all(|o| o.name != e.name));
        }
        assert_eq!(EXPERIMENTS.len(), 15);
    }

    #[test]
    fn graphic_example() {
        let table = run("graphic", &[("b", "0.3"), ("seed", "7")]);
        assert!(table.passed());
        assert_eq!(table.rows.len(), 6);
    }

    #[test]
    fn phi_table_rows() {
        let table = run("phi-table", &[("tmax", "8")]);
        assert!(table.passed());
        assert_eq!(table.rows[3].estimate, "5/8");
    }

    #[test]
    fn thinned_parity_is_pairwise_independent() {
        let d = thinned_parity(&[rat(1, 4), rat(1, 3), rat(1, 2)]).unwrap();
        assert_eq!(d.marginals(), vec![rat(1, 4), rat(1, 3), rat(1, 2)]);
        assert!(verify_independence(&d, 2).unwrap().pass);
        assert!(thinned_parity(&[rat(3, 4)]).is_err());
    }

    #[test]
    fn unused_parameters_are_rejected() {
        let mut settings = Settings::default();
        settings.set("b", "0.3").unwrap();
        let err = run_experiment(&ExperimentConfig::new("phi-table", settings), &Corpus::shipped()).unwrap_err();
        assert!(matches!(err, CliError::UnusedKey { .. }));
    }
}
