//! Planar trees: grafting axioms, equivariance under relabeling, and the
//! comparison with composition of curves.

mod common;

use std::collections::BTreeMap;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use virtmor::curves::compose_unframed;
use virtmor::fm_operad::{count_binary, curve_to_tree, enumerate, graft, tree_to_curve, PlanarTree};
use virtmor::random;

#[test]
fn grafting_is_associative_up_to_arity_five() {
    check_graft_associativity(5).unwrap();
}

#[test]
fn counts_match_the_closed_formula() {
    // n! Catalan(n - 1)
    let closed = |n: u128| (1..=n).product::<u128>() * (n + 1..=2 * n - 2).product::<u128>() / (1..=n - 1).product::<u128>();
    for n in 2..=10u32 {
        assert_eq!(count_binary(n), closed(n as u128), "n = {n}");
    }
    for n in 2..=5 {
        let labels = letters(0, n);
        assert_eq!(enumerate(&strs(&labels)).unwrap().len() as u128, count_binary(n as u32));
    }
}

#[test]
fn tree_curve_round_trip_for_five_labels() {
    for t in enumerate(&["a", "b", "c", "d", "e"]).unwrap() {
        let c = tree_to_curve(&t).unwrap();
        assert_eq!(c.num_components(), 4);
        assert_eq!(curve_to_tree(&c).unwrap(), t);
    }
}

#[test]
fn parse_render_round_trip() {
    for s in ["(ab)", "((ab)c)", "(a(bc))", "((da)(cb))", "(e((ab)(cd)))"] {
        let t = PlanarTree::parse(s).unwrap();
        assert_eq!(t.render(), s);
        assert!(t.is_binary());
    }
    assert!(PlanarTree::parse("(a(bc)").is_err());
    assert!(PlanarTree::parse("(aa)").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn relabeling_commutes_with_grafting(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let t1 = random::binary_tree(&mut r, &["a", "b", "x"]);
        let t2 = random::binary_tree(&mut r, &["c", "d", "e"]);
        let mut fresh: Vec<String> = letters(10, 5);
        fresh.shuffle(&mut r);
        let map: BTreeMap<String, String> =
            ["a", "b", "c", "d", "e"].iter().map(|s| s.to_string()).zip(fresh).collect();
        let mut map1 = map.clone();
        map1.insert("x".into(), "x".into());
        let lhs = graft(&t1, "x", &t2).unwrap().relabel(&map);
        let rhs = graft(&t1.relabel(&map1), "x", &t2.relabel(&map)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn relabeling_is_compatible_with_curves(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let t = random::binary_tree(&mut r, &["a", "b", "c", "d"]);
        let mut fresh = letters(10, 4);
        fresh.shuffle(&mut r);
        let map: BTreeMap<String, String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).zip(fresh).collect();
        let u = t.relabel(&map);
        prop_assert_eq!(curve_to_tree(&tree_to_curve(&u).unwrap()).unwrap(), u.clone());
        prop_assert_eq!(u.leaf_order().len(), 4);
    }

    #[test]
    fn tree_to_curve_intertwines_random_grafts(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let t1 = random::binary_tree(&mut r, &["a", "b", "c", "x"]);
        let t2 = random::binary_tree(&mut r, &["d", "e", "f"]);
        let g = graft(&t1, "x", &t2).unwrap();
        let composed = compose_unframed(&tree_to_curve(&t1).unwrap(), "x", &tree_to_curve(&t2).unwrap()).unwrap();
        prop_assert!(composed.is_isomorphic(&tree_to_curve(&g).unwrap()));
        prop_assert_eq!(curve_to_tree(&composed).unwrap(), g);
    }
}
