//! Seeded generators of random instances for property checks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curves::{Component, Edge, FamilyConfig, StableCurve};
use crate::fm_operad::PlanarTree;
use crate::forms::{FormContext, LogForm};
use crate::pab::{Braid, PabMorphism};
use crate::poly::{Monomial, Poly};
use crate::ratfunc::RatFunc;
use crate::scalar::{Ring, Q};

/// The default seed of every randomized check.
pub const DEFAULT_SEED: u64 = 20240611;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational with numerator and denominator bounded by `bound`.
pub fn rational<R: Rng>(r: &mut R, bound: i64) -> Q {
    let n = r.gen_range(-bound..=bound);
    let d = r.gen_range(1..=bound);
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn nonzero_rational<R: Rng>(r: &mut R, bound: i64) -> Q {
    loop {
        let x = rational(r, bound);
        if !x.is_zero() {
            return x;
        }
    }
}

fn distinct_rationals<R: Rng>(r: &mut R, k: usize, bound: i64) -> Vec<Q> {
    let mut out: Vec<Q> = Vec::with_capacity(k);
    while out.len() < k {
        let x = rational(r, bound);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// A stable curve with the given markings and at most `max_components`
/// components, random coordinates and gluing data.
pub fn curve<R: Rng>(r: &mut R, labels: &[&str], max_components: usize) -> StableCurve<Q> {
    assert!(labels.len() >= 2 && max_components >= 1);
    let mut labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    labels.shuffle(r);
    let mut comps = Vec::new();
    let mut edges = Vec::new();
    let mut budget = max_components - 1;
    build_component(r, labels, None, &mut budget, &mut comps, &mut edges);
    StableCurve::new(comps, edges, nonzero_rational(r, 9)).expect("random curve is stable").normalize_ids()
}

fn build_component<R: Rng>(
    r: &mut R,
    labels: Vec<String>,
    parent: Option<String>,
    budget: &mut usize,
    comps: &mut Vec<Component<Q>>,
    edges: &mut Vec<Edge<Q>>,
) -> String {
    // subtree label sets are distinct, so they make unique ids
    let id = labels.join(",");
    let n = labels.len();
    // cut the shuffled labels into k slots; slots with several labels nest
    let mut k = if *budget == 0 { n } else { r.gen_range(2..=n) };
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(r);
    let mut chosen: Vec<usize> = cuts[..k - 1].to_vec();
    chosen.sort();
    let nested = |cs: &[usize]| {
        let mut bounds = vec![0];
        bounds.extend_from_slice(cs);
        bounds.push(n);
        bounds.windows(2).filter(|w| w[1] - w[0] > 1).count()
    };
    if nested(&chosen) > *budget {
        k = n;
        chosen = (1..n).collect();
    }
    *budget -= nested(&chosen);
    let mut bounds = vec![0];
    bounds.extend_from_slice(&chosen);
    bounds.push(n);
    let coords = distinct_rationals(r, k, 6);
    let mut points = BTreeMap::new();
    for (w, x) in bounds.windows(2).zip(coords) {
        let group = labels[w[0]..w[1]].to_vec();
        if group.len() == 1 {
            points.insert(group[0].clone(), x);
        } else {
            let cid = build_component(r, group, Some(id.clone()), budget, comps, edges);
            points.insert(format!("@{cid}"), x);
        }
    }
    comps.push(Component { id: id.clone(), points });
    if let Some(p) = parent {
        edges.push(Edge { parent: p, child: id.clone(), scalar: nonzero_rational(r, 9) });
    }
    id
}

/// A uniformly random planar binary tree on the labels.
pub fn binary_tree<R: Rng>(r: &mut R, labels: &[&str]) -> PlanarTree {
    let mut leaves: Vec<PlanarTree> = labels.iter().map(|l| PlanarTree::leaf(l)).collect();
    leaves.shuffle(r);
    while leaves.len() > 1 {
        let i = r.gen_range(0..leaves.len() - 1);
        let right = leaves.remove(i + 1);
        let left = leaves.remove(i);
        leaves.insert(i, PlanarTree::Node(vec![left, right]));
    }
    leaves.pop().expect("nonempty")
}

/// A random braid word of the given length.
pub fn braid<R: Rng>(r: &mut R, strands: usize, len: usize) -> Braid {
    if strands < 2 {
        return Braid::identity(strands);
    }
    let word = (0..len)
        .map(|_| {
            let k = r.gen_range(1..strands as i32);
            if r.gen_bool(0.5) {
                k
            } else {
                -k
            }
        })
        .collect();
    Braid::new(strands, word).expect("indices in range")
}

/// A random parenthesized braid with a random source.
pub fn morphism<R: Rng>(r: &mut R, labels: &[&str], len: usize) -> PabMorphism {
    let source = binary_tree(r, labels);
    let b = braid(r, labels.len(), len);
    let order = source.leaf_order();
    let perm = b.permutation();
    let mut target_order = vec![String::new(); order.len()];
    for (p, l) in order.iter().enumerate() {
        target_order[perm[p]] = l.clone();
    }
    let refs: Vec<&str> = target_order.iter().map(|s| s.as_str()).collect();
    let target = bracket_in_order(r, &refs);
    PabMorphism::new(source, target, b).expect("permutation matches by construction")
}

fn bracket_in_order<R: Rng>(r: &mut R, order: &[&str]) -> PlanarTree {
    let mut items: Vec<PlanarTree> = order.iter().map(|l| PlanarTree::leaf(l)).collect();
    while items.len() > 1 {
        let i = r.gen_range(0..items.len() - 1);
        let right = items.remove(i + 1);
        let left = items.remove(i);
        items.insert(i, PlanarTree::Node(vec![left, right]));
    }
    items.pop().expect("nonempty")
}

/// A two-component degeneration with `outer` and `inner` markings.
pub fn family<R: Rng>(r: &mut R, outer: &[&str], inner: &[&str], c: Q) -> FamilyConfig {
    let xs = distinct_rationals(r, outer.len() + 1, 7);
    let ys = distinct_rationals(r, inner.len(), 7);
    FamilyConfig {
        outer: outer.iter().zip(&xs).map(|(l, x)| (l.to_string(), x.clone())).collect(),
        node: xs[outer.len()].clone(),
        inner: inner.iter().zip(ys).map(|(l, y)| (l.to_string(), y)).collect(),
        c,
    }
}

/// A random polynomial in the given variables.
pub fn polynomial<R: Rng>(r: &mut R, vars: u32, terms: usize, max_deg: u32) -> Poly<Q> {
    Poly::from_terms((0..terms).map(|_| {
        let m = Monomial::from_pairs((0..vars).map(|v| (v, r.gen_range(0..=max_deg))));
        (m, nonzero_rational(r, 5))
    }))
}

/// A random log form of mixed degree: sums of polynomial multiples of
/// wedges of `dlog` on divisor variables and `dz` on the others.
pub fn log_form<R: Rng>(r: &mut R, ctx: &FormContext, terms: usize) -> LogForm {
    let n = ctx.num_vars() as u32;
    let mut w = LogForm::zero(ctx);
    for _ in 0..terms {
        let f = RatFunc::from_poly(polynomial(r, n, 2, 2));
        let mut t = LogForm::function(ctx, f).expect("polynomials have no poles");
        for v in 0..n {
            if r.gen_bool(0.4) {
                let s = if ctx.is_divisor(v) { LogForm::dlog(ctx, v).expect("divisor") } else { LogForm::dz(ctx, v) };
                t = t.wedge(&s).expect("same chart");
            }
        }
        w = w.add(&t).expect("same chart");
    }
    w
}
