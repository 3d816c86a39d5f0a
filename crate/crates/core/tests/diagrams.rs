//! Blocks and composite diagrams: non-expansiveness, monotonicity, the
//! gs-monoidal laws, functoriality of the approximation and agreement with
//! the literal δ-definition.

mod common;

use common::axioms::AXIOMS;
use common::Gen;
use fixcheck_core::blocks::Block;
use fixcheck_core::diagram::Diagram;
use fixcheck_core::oracle::{alpha, approx_delta, approx_delta_union, gamma};
use fixcheck_core::scalar::Scalar;
use fixcheck_core::valuation::Subset;
use proptest::prelude::*;
use rand::Rng;

fn non_expansive<T: Scalar>(g: &mut Gen<T>, d: &Diagram<T>) {
    let alg = g.alg.clone();
    let (a, b) = (g.valuation(d.input()), g.valuation(d.input()));
    let (fa, fb) = (d.evaluate(&a, &alg).unwrap(), d.evaluate(&b, &alg).unwrap());
    let out = fb.ominus(&fa, &alg).unwrap().norm();
    let inp = b.ominus(&a, &alg).unwrap().norm();
    assert!(out <= inp, "norm(f(b) ⊖ f(a)) = {out} > {inp} = norm(b ⊖ a)");
}

fn monotone<T: Scalar>(g: &mut Gen<T>, d: &Diagram<T>) {
    let alg = g.alg.clone();
    let a = g.valuation(d.input());
    let b = a.oplus(&g.valuation(d.input()), &alg).unwrap();
    assert!(d.evaluate(&a, &alg).unwrap().leq(&d.evaluate(&b, &alg).unwrap()).unwrap());
    let big = g.subset_of(&a.support_nonzero());
    let small = g.subset_of(&big);
    let (s, l) = (d.approximate(&a, &small, &alg).unwrap(), d.approximate(&a, &big, &alg).unwrap());
    assert!(s.is_subset(&l));
    assert!(l.is_subset(&d.evaluate(&a, &alg).unwrap().support_nonzero()));
}

fn agrees_with_oracle(g: &mut Gen<i64>, d: &Diagram<i64>) {
    let alg = g.alg.clone();
    let a = g.valuation(d.input());
    let y = g.subset_of(&a.support_nonzero());
    let fast = d.approximate(&a, &y, &alg).unwrap();
    assert_eq!(fast, approx_delta_union(d, &a, &y, &alg).unwrap(), "a = {a}, Y' = {y}");
    // the union is attained at the smallest δ
    assert_eq!(fast, approx_delta(d, &a, &1, &y, &alg).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn blocks_are_non_expansive_and_monotone_on_chains(seed in any::<u64>(), k in 1u64..=4) {
        let mut g = Gen::chain(seed, k);
        let (i, o) = (g.carrier(), g.carrier());
        let same = i.clone();
        for d in [g.block(&i, &o), g.block(&i, &same)] {
            non_expansive(&mut g, &d);
            monotone(&mut g, &d);
        }
    }

    #[test]
    fn blocks_are_non_expansive_and_monotone_on_the_unit_interval(seed in any::<u64>()) {
        let mut g = Gen::unit(seed);
        let (i, o) = (g.carrier(), g.carrier());
        let d = g.block(&i, &o);
        non_expansive(&mut g, &d);
        monotone(&mut g, &d);
    }

    #[test]
    fn composites_are_non_expansive(seed in any::<u64>(), k in 1u64..=4) {
        let mut g = Gen::chain(seed, k);
        let (_, d) = g.endo(4);
        non_expansive(&mut g, &d);
        monotone(&mut g, &d);
        let mut g = Gen::unit(seed);
        let (_, d) = g.endo(3);
        non_expansive(&mut g, &d);
    }

    #[test]
    fn block_approximation_matches_the_definition(seed in any::<u64>(), k in 1u64..=4) {
        let mut g = Gen::chain(seed, k);
        let (i, o) = (g.carrier(), g.carrier());
        let d = g.block(&i, &o);
        agrees_with_oracle(&mut g, &d);
        let d = g.block(&i, &i);
        agrees_with_oracle(&mut g, &d);
    }

    #[test]
    fn composite_approximation_matches_the_definition(seed in any::<u64>(), k in 1u64..=4) {
        let mut g = Gen::chain(seed, k);
        let (i, o) = (g.carrier(), g.carrier());
        let d = g.diagram(4, &i, &o);
        agrees_with_oracle(&mut g, &d);
    }

    #[test]
    fn gs_monoidal_axioms(seed in any::<u64>(), which in 0..AXIOMS.len()) {
        let mut g = Gen::chain(seed, 3);
        let (l, r) = g.axiom(which);
        prop_assert!(g.axiom_agrees(&l, &r).is_ok(), "{}: {:?}", AXIOMS[which], g.axiom_agrees(&l, &r));
        let mut g = Gen::unit(seed);
        let (l, r) = g.axiom(which);
        let verdict = g.axiom_agrees(&l, &r);
        prop_assert!(verdict.is_ok(), "{}: {:?}", AXIOMS[which], verdict);
    }

    #[test]
    fn approximation_is_functorial(seed in any::<u64>()) {
        let mut g = Gen::chain(seed, 4);
        let alg = g.alg.clone();
        let (a_set, b_set, c_set) = (g.carrier(), g.carrier(), g.carrier());
        let f = g.diagram(2, &a_set, &b_set);
        let h = g.diagram(2, &b_set, &c_set);
        let a = g.valuation(&a_set);
        let y = g.subset_of(&a.support_nonzero());
        let fa = f.evaluate(&a, &alg).unwrap();
        let step = f.approximate(&a, &y, &alg).unwrap();
        let composed = h.approximate(&fa.reorder_to(h.input()).unwrap(), &step.reorder_to(h.input()).unwrap(), &alg).unwrap();
        let whole = Diagram::seq(f, h.clone()).unwrap();
        prop_assert_eq!(whole.approximate(&a, &y, &alg).unwrap(), composed);
        prop_assert_eq!(Diagram::id(&a_set).approximate(&a, &y, &alg).unwrap(), y);
    }

    #[test]
    fn fixed_delta_composition_is_lax(seed in any::<u64>(), k in 1u64..=4) {
        let mut g = Gen::chain(seed, k);
        let alg = g.alg.clone();
        let (a_set, b_set, c_set) = (g.carrier(), g.carrier(), g.carrier());
        let f = g.diagram(2, &a_set, &b_set);
        let h = g.diagram(2, &b_set, &c_set);
        let a = g.valuation(&a_set);
        let y = g.subset_of(&a.support_nonzero());
        let delta = g.rng.gen_range(1..=k as i64);
        let fa = f.evaluate(&a, &alg).unwrap();
        let mid = approx_delta(&f, &a, &delta, &y, &alg).unwrap();
        let two_steps = approx_delta(&h, &fa.reorder_to(h.input()).unwrap(), &delta, &mid.reorder_to(h.input()).unwrap(), &alg).unwrap();
        let whole = approx_delta(&Diagram::seq(f, h).unwrap(), &a, &delta, &y, &alg).unwrap();
        prop_assert!(two_steps.is_subset(&whole.reorder_to(two_steps.domain()).unwrap()));
    }

    #[test]
    fn abstraction_and_concretisation_commute_with_reindexing(seed in any::<u64>(), k in 1u64..=4) {
        let mut g = Gen::chain(seed, k);
        let alg = g.alg.clone();
        let (y_set, z_set) = (g.carrier(), g.carrier());
        let map: Vec<usize> = (0..z_set.len()).map(|_| g.rng.gen_range(0..y_set.len())).collect();
        let reindex = Block::reindex(&y_set, &z_set, map.clone()).unwrap();
        let pre = |s: &Subset| Subset::from_indices(&z_set, (0..z_set.len()).filter(|&z| s.contains_index(map[z])));
        let a = g.valuation(&y_set);
        let b = g.valuation(&y_set);
        let ag = reindex.apply(&a, &alg).unwrap();
        let delta = g.rng.gen_range(1..=k as i64);
        let y = g.subset(&y_set);
        let lhs = alpha(&ag, &delta, &pre(&y), &alg).unwrap();
        let rhs = reindex.apply(&alpha(&a, &delta, &y, &alg).unwrap(), &alg).unwrap();
        prop_assert_eq!(lhs, rhs);
        let lhs = gamma(&ag, &delta, &reindex.apply(&b, &alg).unwrap(), &alg).unwrap();
        let rhs = pre(&gamma(&a, &delta, &b, &alg).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn larger_delta_gives_smaller_sets(seed in any::<u64>(), k in 2u64..=4) {
        let mut g = Gen::chain(seed, k);
        let alg = g.alg.clone();
        let (_, d) = g.endo(3);
        let a = g.valuation(d.input());
        let y = g.subset_of(&a.support_nonzero());
        let sets: Vec<Subset> = (1..=k as i64).map(|delta| approx_delta(&d, &a, &delta, &y, &alg).unwrap()).collect();
        for w in sets.windows(2) {
            prop_assert!(w[1].is_subset(&w[0]));
        }
    }

    #[test]
    fn conjugation_denotes_the_dual_function(seed in any::<u64>()) {
        let mut g = Gen::chain(seed, 3);
        let alg = g.alg.clone();
        let (_, d) = g.endo(3);
        let a = g.valuation(d.input());
        let dual = d.conjugate(&alg);
        let lhs = dual.evaluate(&a, &alg).unwrap();
        let rhs = d.evaluate(&a.complement(&alg), &alg).unwrap().complement(&alg);
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(dual.conjugate(&alg), d);
    }
}

#[test]
fn every_block_kind_is_generated() {
    let mut g = Gen::unit(7);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..400 {
        let (i, o) = (g.carrier(), g.carrier());
        let d = if g.rng.gen_bool(0.5) { g.block(&i, &o) } else { g.block(&i, &i) };
        for b in d.blocks() {
            seen.insert(b.kind().tag());
        }
    }
    assert_eq!(seen.len(), 7, "{seen:?}");
}
