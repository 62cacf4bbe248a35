use std::sync::Arc;

use num_traits::{One, Zero};
use pi_ocrs::dist::{parity_dist, product_dist, thin, twise_z, verify_independence, ExplicitDist, SubsetDistribution, ZVector};
use pi_ocrs::fixtures;
use pi_ocrs::matroid::{density, Bipartite, LaminarFamily, Matroid, Multigraph};
use pi_ocrs::mc::McConfig;
use pi_ocrs::ocrs::{exact_selectability, sampled_selectability, Deterministic};
use pi_ocrs::prophet::{scale_wrapper, selectability, Mode, PreparedScheme};
use pi_ocrs::rational::{int, rat};
use pi_ocrs::structured::{graphic_chain_prepare, round_laminar};
use pi_ocrs::uniform::simple_uniform_family;
use pi_ocrs::Rational;
use proptest::prelude::*;

/// Parity bits over `GF(2)^3`, thinned by `keep/4`: pairwise independent with marginals `keep/8`.
fn thinned_parity(n: usize, keep: &[i64]) -> ExplicitDist {
    let vectors: Vec<u64> = (1..=n as u64).collect();
    let keep: Vec<Rational> = keep.iter().map(|&k| rat(k, 4)).collect();
    let d = thin(&parity_dist(&vectors, 3).unwrap().into(), &keep).unwrap();
    d.as_explicit().unwrap().clone()
}

fn small_graph() -> impl Strategy<Value = Multigraph> {
    let graphs = fixtures::multigraphs(4, 5);
    (0..graphs.len()).prop_map(move |i| graphs[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graphic_chain_meets_one_minus_two_b_under_pairwise_independence(
        graph in small_graph(),
        keep in proptest::collection::vec(1i64..=4, 5),
        b_tenths in 1i64..=4,
    ) {
        let b = rat(b_tenths, 10);
        let m = Matroid::graphic(graph.clone()).unwrap();
        let n = graph.edge_count();
        // scale the parity marginals into b·P
        let raw = thinned_parity(n, &keep[..n]);
        let scale = &b / density(&m).unwrap() / raw.marginals().into_iter().max().unwrap();
        let scale = scale.min(Rational::one());
        let d = thin(&raw.into(), &vec![scale; n]).unwrap();
        let d = d.as_explicit().unwrap().clone();
        prop_assert!(verify_independence(&d, 2).unwrap().pass);
        let (_, family) = graphic_chain_prepare(graph, &d.clone().into(), &b, McConfig::new(0, 0)).unwrap();
        for s in exact_selectability(&Deterministic::new(family), &d).unwrap().into_iter().flatten() {
            prop_assert!(s >= int(1) - int(2) * &b);
        }
    }

    #[test]
    fn scale_wrapper_multiplies_by_the_keep_probability(
        keep in proptest::collection::vec(1i64..=4, 4),
        k in 1usize..=2,
        b_quarters in 1i64..=3,
    ) {
        let b = rat(b_quarters, 4);
        let d = thinned_parity(4, &keep);
        let inner = PreparedScheme::new(Arc::new(Deterministic::new(simple_uniform_family(4, k).unwrap())), b.clone(), 0.0);
        let wrapped = scale_wrapper(&inner, &b).unwrap();
        let outer = selectability(&wrapped, &d.clone().into(), Mode::Exact).unwrap();
        let sub = thin(&d.into(), &vec![b.clone(); 4]).unwrap();
        let direct = selectability(&inner, &sub, Mode::Exact).unwrap();
        for (o, i) in outer.items.iter().zip(&direct.items) {
            let (o, i) = (o.as_ref().unwrap(), i.as_ref().unwrap());
            prop_assert_eq!(o.exact.clone().unwrap(), &b * i.exact.clone().unwrap());
        }
    }

    #[test]
    fn text_formats_round_trip(
        edges in proptest::collection::vec((0usize..5, 0usize..5), 1..8),
        keep in proptest::collection::vec(0i64..=4, 5),
    ) {
        let graph = Multigraph::new(5, edges.clone()).unwrap();
        let reparsed = Multigraph::parse(&graph.to_text()).unwrap();
        prop_assert_eq!(reparsed.edge_count(), graph.edge_count());
        prop_assert_eq!(Multigraph::parse(&reparsed.to_text()).unwrap().to_text(), reparsed.to_text());
        let bip = Bipartite::new(5, 5, &edges).unwrap();
        prop_assert_eq!(Bipartite::parse(&bip.to_text()).unwrap().to_text(), bip.to_text());
        let d = thinned_parity(5, &keep);
        prop_assert_eq!(ExplicitDist::parse(&d.to_text()).unwrap(), d);
    }

    #[test]
    fn symmetric_profiles_have_unit_mean(n in 4usize..40, t in 1usize..=4) {
        let z = twise_z(n, t).unwrap();
        let mean: Rational = z.as_slice().iter().enumerate().map(|(j, zj)| zj * int(j as i64)).sum();
        prop_assert_eq!(mean, int(1));
        prop_assert_eq!(ZVector::parse(&z.to_text()).unwrap(), z);
    }

    #[test]
    fn rounded_laminar_sets_stay_independent(caps in proptest::collection::vec(1usize..=6, 3), mask in 0u64..(1 << 9)) {
        let text = format!(
            "laminar 9\ncap {} : 0 1 2 3 4 5 6 7 8\ncap {} : 0 1 2 3 4 5\ncap {} : 0 1 2\n",
            caps[0] + 3, caps[1] + 1, caps[2]
        );
        let family = LaminarFamily::parse(&text).unwrap();
        let rounded = round_laminar(&family).unwrap();
        let set: Vec<usize> = (0..9).filter(|e| mask >> e & 1 == 1).collect();
        let original = Matroid::laminar(family).unwrap();
        let smaller = Matroid::laminar(rounded.rounded).unwrap();
        if smaller.is_independent(&set).unwrap() {
            prop_assert!(original.is_independent(&set).unwrap());
        }
    }
}

#[test]
fn monte_carlo_agrees_with_enumeration() {
    let d = product_dist(&[rat(1, 4), rat(1, 3), rat(1, 2), rat(1, 5)]).unwrap();
    let scheme = Deterministic::new(simple_uniform_family(4, 2).unwrap());
    let exact = exact_selectability(&scheme, &d).unwrap();
    let sampled = sampled_selectability(&scheme, &SubsetDistribution::from(d), McConfig::new(17, 100_000));
    for (e, s) in exact.iter().zip(&sampled) {
        let (e, s) = (pi_ocrs::rational::to_f64(e.as_ref().unwrap()), s.as_ref().unwrap());
        assert!((s.value - e).abs() <= 3.0 * s.sigma, "{} vs {e}", s.value);
    }
}

#[test]
fn zero_marginals_have_no_selectability() {
    let d = product_dist(&[rat(1, 2), Rational::zero()]).unwrap();
    let items = exact_selectability(&Deterministic::new(simple_uniform_family(2, 1).unwrap()), &d).unwrap();
    // item 1 never arrives, so item 0 is always selectable
    assert_eq!(items, vec![Some(int(1)), None]);
}
