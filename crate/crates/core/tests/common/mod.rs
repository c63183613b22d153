//! Shared checks for the integration tests and the acceptance suite. Each
//! check returns a short summary on success and a description of the first
//! failure otherwise.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use virtmor::arnold::{self, cocompose, ArnoldElement, Pair};
use virtmor::curves::{
    compose_framed, compose_unframed, factorization_family_check, FramedCurve, StableCurve, INF,
};
use virtmor::fm_operad::{curve_to_tree, enumerate, graft, tree_to_curve, PlanarTree};
use virtmor::forms::{regularize, regularized_pullback, FormContext, Jet, LogForm};
use virtmor::kn::{fibre_rank, z_points_to_kn};
use virtmor::logmodel::{
    continuity_check, coordinate_axes_map, fat_point_endomorphism, Branch, LogModel, MonomialScaling,
};
use virtmor::pab::{artin_relations, braid_eq, objects, operadic_insert, Braid, PabMorphism};
use virtmor::random;
use virtmor::scalar::{q, qf};
use virtmor::tangential::{enumerate_cover, p1_three_points, signs, three_lines, Chart};
use virtmor::{Field, RatFunc, Ring, Q};

pub type Check = std::result::Result<String, String>;

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(|s| s.as_str()).collect()
}

pub fn letters(from: usize, n: usize) -> Vec<String> {
    "abcdefghijklmnopqrstuv".chars().skip(from).take(n).map(|c| c.to_string()).collect()
}

const PRIME: u128 = (1 << 61) - 1;

fn pow_mod(mut b: u128, mut e: u128) -> u128 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % PRIME;
        }
        b = b * b % PRIME;
        e >>= 1;
    }
    acc
}

fn q_mod(x: &Q) -> Option<u128> {
    use num_traits::{Signed, ToPrimitive};
    let p = num_bigint::BigInt::from(PRIME);
    let red = |n: &num_bigint::BigInt| {
        let r = n.abs() % &p;
        let r = r.to_u128().expect("reduced");
        if n.is_negative() { (PRIME - r) % PRIME } else { r }
    };
    let d = red(x.denom());
    (d != 0).then(|| red(x.numer()) * pow_mod(d, PRIME - 2) % PRIME)
}

/// Rank modulo the prime `2^61 - 1` of a rational matrix. A full rank
/// modulo the prime implies full rank over the rationals.
pub fn rank_mod_prime(rows: &[Vec<Q>]) -> Option<usize> {
    let mut m: Vec<Vec<u128>> = rows.iter().map(|r| r.iter().map(q_mod).collect::<Option<Vec<_>>>()).collect::<Option<_>>()?;
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, p);
        let inv = pow_mod(m[rank][c], PRIME - 2);
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let f = m[i][c] * inv % PRIME;
                for j in c..cols {
                    let t = m[rank][j] * f % PRIME;
                    m[i][j] = (m[i][j] + PRIME - t) % PRIME;
                }
            }
        }
        rank += 1;
    }
    Some(rank)
}

/// Determinant of a small rational matrix.
pub fn det(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            m.swap(p, c);
            d = d.neg();
        }
        d = d.mul(&m[c][c]);
        let inv = m[c][c].inv().expect("nonzero pivot");
        for i in c + 1..n {
            let f = m[i][c].mul(&inv);
            for j in c..n {
                let t = m[c][j].mul(&f);
                m[i][j] = m[i][j].sub(&t);
            }
        }
    }
    d
}

/// Coefficients of `prod_{i=1}^{n-1} (1 + i t)`.
pub fn arrangement_poincare(n: usize) -> Vec<u64> {
    let mut p = vec![1u64];
    for i in 1..n as u64 {
        let mut next = vec![0u64; p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k] += c;
            next[k + 1] += c * i;
        }
        p = next;
    }
    p
}

// ---------------------------------------------------------------- points

pub fn check_integral_points() -> Check {
    let units = signs::<Q>();
    let pts = enumerate_cover(&p1_three_points(&units), &units).map_err(|e| e.to_string())?;
    ensure(pts.len() == 6, || format!("expected 6 integral virtual points, found {}", pts.len()))?;
    // two over each of 0, 1 and infinity
    let mut over = std::collections::BTreeMap::new();
    for (chart, vp) in &pts {
        *over.entry((chart.clone(), vp.point.clone())).or_insert(0) += 1;
    }
    ensure(over.len() == 3 && over.values().all(|&c| c == 2), || format!("uneven fibres: {over:?}"))?;
    Ok("6 points, two over each boundary point".into())
}

// ---------------------------------------------------------------- trees

pub fn check_tree_counts() -> Check {
    for (n, want) in [(2usize, 2usize), (3, 12), (4, 120)] {
        let labels = letters(0, n);
        let trees = enumerate(&strs(&labels)).map_err(|e| e.to_string())?;
        ensure(trees.len() == want, || format!("|A| = {n}: {} trees, expected {want}", trees.len()))?;
        let distinct: BTreeSet<String> = trees.iter().map(|t| t.render()).collect();
        ensure(distinct.len() == want, || format!("|A| = {n}: duplicate trees"))?;
        for t in &trees {
            let c = tree_to_curve(t).map_err(|e| e.to_string())?;
            let back = curve_to_tree(&c).map_err(|e| e.to_string())?;
            ensure(&back == t, || format!("tree {} came back as {}", t.render(), back.render()))?;
            let again = tree_to_curve(&back).map_err(|e| e.to_string())?;
            ensure(again == c, || format!("curve of {} is not stable under the round trip", t.render()))?;
        }
    }
    Ok("2, 12, 120 trees; round trips are identities".into())
}

// ---------------------------------------------------------------- transport

fn all_points(c: &StableCurve<Q>) -> Vec<String> {
    let mut v = c.labels();
    v.push(INF.to_string());
    v
}

pub fn check_transport(seed: u64, single: usize, random_curves: usize) -> Check {
    let mut r = random::rng(seed);
    for _ in 0..single {
        let p = random::rational(&mut r, 20);
        let mut other = random::rational(&mut r, 20);
        while other == p {
            other = random::rational(&mut r, 20);
        }
        let lambda = random::nonzero_rational(&mut r, 20);
        let c = StableCurve::smooth(&[("p", p.clone()), ("o", other)], q(1)).map_err(|e| e.to_string())?;
        let got = c.transport("p", INF, &lambda).map_err(|e| e.to_string())?;
        ensure(got == lambda.inv().unwrap(), || format!("s(p = {p}, inf)({lambda}) = {got}"))?;
        let got = c.transport(INF, "p", &lambda).map_err(|e| e.to_string())?;
        ensure(got == lambda.inv().unwrap(), || format!("s(inf, p = {p})({lambda}) = {got}"))?;
    }
    // root with p1 and the node, child with q2 and r2, gluing scalar a
    for _ in 0..single {
        let a = random::nonzero_rational(&mut r, 20);
        let lambda = random::nonzero_rational(&mut r, 20);
        let json = serde_json::json!({
            "components": [
                {"id": "top", "points": {"p1": "1", "@bottom": "0"}},
                {"id": "bottom", "points": {"q2": "0", "r2": "1", "@parent": "inf"}}
            ],
            "edges": [{"parent": "top", "child": "bottom", "scalar": a.to_text()}],
            "basepoint": "1"
        });
        let c: StableCurve<Q> = serde_json::from_value(json).map_err(|e| e.to_string())?;
        let got = c.transport(INF, "q2", &lambda).map_err(|e| e.to_string())?;
        let want = a.mul(&lambda).inv().unwrap();
        ensure(got == want, || format!("two components: got {got}, expected {want}"))?;
    }
    let labels = ["a", "b", "c", "d", "e", "f"];
    for _ in 0..random_curves {
        let n = r.gen_range(2..=labels.len());
        let c = random::curve(&mut r, &labels[..n], 5);
        let pts = all_points(&c);
        let p = pts.choose(&mut r).unwrap().clone();
        let mut q_ = pts.choose(&mut r).unwrap().clone();
        while q_ == p {
            q_ = pts.choose(&mut r).unwrap().clone();
        }
        let there = c.transport_scaling(&p, &q_).map_err(|e| e.to_string())?;
        let back = c.transport_scaling(&q_, &p).map_err(|e| e.to_string())?;
        ensure(there.exponent == -1, || format!("parity {} from {p} to {q_}", there.exponent))?;
        ensure(back.compose(&there) == MonomialScaling::identity(), || format!("round trip {p} -> {q_} -> {p} is not the identity"))?;
        let lambda = random::nonzero_rational(&mut r, 20);
        let v = c.transport(&p, &q_, &lambda).map_err(|e| e.to_string())?;
        let w = c.transport(&q_, &p, &v).map_err(|e| e.to_string())?;
        ensure(w == lambda, || format!("round trip moved {lambda} to {w}"))?;
    }
    Ok(format!("{single} one-component, {single} two-component, {random_curves} random curves"))
}

// ---------------------------------------------------------------- factorization

pub fn check_factorization(seed: u64, configs: usize) -> Check {
    let mut r = random::rng(seed);
    let mut checked = 0;
    for c in [q(1), q(2), q(-3)] {
        for _ in 0..configs {
            let n_out = r.gen_range(1..=2);
            let n_in = r.gen_range(2..=3);
            let outer = letters(0, n_out);
            let inner = letters(10, n_in);
            let cfg = random::family(&mut r, &strs(&outer), &strs(&inner), c.clone());
            let mut pts: Vec<String> = outer.iter().chain(&inner).cloned().collect();
            pts.push(INF.to_string());
            for p in &pts {
                for q_ in &pts {
                    if p == q_ {
                        continue;
                    }
                    let rep = factorization_family_check(&cfg, p, q_).map_err(|e| e.to_string())?;
                    ensure(rep.holds(), || format!("c = {c}, {p} -> {q_}: {rep:?} for {cfg:?}"))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} marking pairs over {} families", 3 * configs))
}

// ---------------------------------------------------------------- operads

/// All trees on the given labels.
fn trees(labels: &[String]) -> Vec<PlanarTree> {
    enumerate(&strs(labels)).expect("valid labels")
}

fn check_tree_triple_sequential(t1: &PlanarTree, t2: &PlanarTree, t3: &PlanarTree) -> std::result::Result<(), String> {
    let e = |e: virtmor::Error| e.to_string();
    let left = graft(&graft(t1, "x", t2).map_err(e)?, "y", t3).map_err(e)?;
    let right = graft(t1, "x", &graft(t2, "y", t3).map_err(e)?).map_err(e)?;
    ensure(left == right, || format!("sequential: {} vs {}", left.render(), right.render()))?;
    let (c1, c2, c3) = (tree_to_curve(t1).map_err(e)?, tree_to_curve(t2).map_err(e)?, tree_to_curve(t3).map_err(e)?);
    let composed = compose_unframed(&compose_unframed(&c1, "x", &c2).map_err(e)?, "y", &c3).map_err(e)?;
    let image = tree_to_curve(&left).map_err(e)?;
    ensure(composed.is_isomorphic(&image), || format!("tree_to_curve does not intertwine at {}", left.render()))?;
    Ok(())
}

fn check_tree_triple_parallel(t1: &PlanarTree, t2: &PlanarTree, t3: &PlanarTree) -> std::result::Result<(), String> {
    let e = |e: virtmor::Error| e.to_string();
    let left = graft(&graft(t1, "x", t2).map_err(e)?, "y", t3).map_err(e)?;
    let right = graft(&graft(t1, "y", t3).map_err(e)?, "x", t2).map_err(e)?;
    ensure(left == right, || format!("parallel: {} vs {}", left.render(), right.render()))?;
    let (c1, c2, c3) = (tree_to_curve(t1).map_err(e)?, tree_to_curve(t2).map_err(e)?, tree_to_curve(t3).map_err(e)?);
    let composed = compose_unframed(&compose_unframed(&c1, "y", &c3).map_err(e)?, "x", &c2).map_err(e)?;
    let image = tree_to_curve(&left).map_err(e)?;
    ensure(composed.is_isomorphic(&image), || format!("tree_to_curve does not intertwine at {}", left.render()))?;
    Ok(())
}

/// Exhaustive associativity of grafting, and intertwining with curve
/// composition, for all trees of total arity at most `max_total`.
pub fn check_graft_associativity(max_total: usize) -> Check {
    let mut count = 0;
    // t1 on A + {x}, t2 on B + {y}, t3 on C
    for a in 1..max_total {
        for b in 1..max_total {
            for c in 2..=max_total {
                if a + b + c > max_total {
                    continue;
                }
                let mut l1 = letters(0, a);
                l1.push("x".into());
                let mut l2 = letters(a, b);
                l2.push("y".into());
                let l3 = letters(a + b, c);
                let (s1, s2, s3) = (trees(&l1), trees(&l2), trees(&l3));
                for t1 in &s1 {
                    for t2 in &s2 {
                        for t3 in &s3 {
                            check_tree_triple_sequential(t1, t2, t3)?;
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    // t1 on A + {x, y}, t2 on B, t3 on C
    for a in 0..max_total {
        for b in 2..=max_total {
            for c in 2..=max_total {
                if a + b + c > max_total {
                    continue;
                }
                let mut l1 = letters(0, a);
                l1.extend(["x".to_string(), "y".to_string()]);
                let l2 = letters(a, b);
                let l3 = letters(a + b, c);
                let (s1, s2, s3) = (trees(&l1), trees(&l2), trees(&l3));
                for t1 in &s1 {
                    for t2 in &s2 {
                        for t3 in &s3 {
                            check_tree_triple_parallel(t1, t2, t3)?;
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{count} tree triples"))
}

fn random_split<R: Rng>(r: &mut R, total: usize, parts: &[usize]) -> Vec<usize> {
    // sizes at least `parts[i]` summing to `total`
    let mut sizes = parts.to_vec();
    let mut left = total - parts.iter().sum::<usize>();
    while left > 0 {
        let i = r.gen_range(0..sizes.len());
        sizes[i] += 1;
        left -= 1;
    }
    sizes
}

fn same_curve(a: &StableCurve<Q>, b: &StableCurve<Q>, what: &str) -> std::result::Result<(), String> {
    ensure(a.is_isomorphic(b), || {
        format!("{what}: {} vs {}", serde_json::to_string(&a.canonical()).unwrap(), serde_json::to_string(&b.canonical()).unwrap())
    })
}

/// Associativity of unframed composition on random rational curves, and
/// agreement with framed composition of induced framings.
pub fn check_curve_associativity(seed: u64, instances: usize) -> Check {
    let mut r = random::rng(seed);
    let e = |e: virtmor::Error| e.to_string();
    for _ in 0..instances {
        let total = r.gen_range(4..=7);
        let s = random_split(&mut r, total, &[1, 1, 2]);
        let mut l1 = letters(0, s[0]);
        l1.push("x".into());
        let mut l2 = letters(s[0], s[1]);
        l2.push("y".into());
        let l3 = letters(s[0] + s[1], s[2]);
        let c1 = random::curve(&mut r, &strs(&l1), 3);
        let c2 = random::curve(&mut r, &strs(&l2), 3);
        let c3 = random::curve(&mut r, &strs(&l3), 3);
        let left = compose_unframed(&compose_unframed(&c1, "x", &c2).map_err(e)?, "y", &c3).map_err(e)?;
        let right = compose_unframed(&c1, "x", &compose_unframed(&c2, "y", &c3).map_err(e)?).map_err(e)?;
        same_curve(&left, &right, "sequential associativity")?;
        let f = |c: &StableCurve<Q>| FramedCurve::induced(c);
        let framed = compose_framed(&f(&c1).map_err(e)?, "x", &f(&c2).map_err(e)?).map_err(e)?;
        same_curve(&framed.curve, &compose_unframed(&c1, "x", &c2).map_err(e)?, "framed vs unframed")?;

        let s = random_split(&mut r, total, &[0, 2, 2]);
        let mut l1 = letters(0, s[0]);
        l1.extend(["x".to_string(), "y".to_string()]);
        let l2 = letters(s[0], s[1]);
        let l3 = letters(s[0] + s[1], s[2]);
        let c1 = random::curve(&mut r, &strs(&l1), 3);
        let c2 = random::curve(&mut r, &strs(&l2), 3);
        let c3 = random::curve(&mut r, &strs(&l3), 3);
        let left = compose_unframed(&compose_unframed(&c1, "x", &c2).map_err(e)?, "y", &c3).map_err(e)?;
        let right = compose_unframed(&compose_unframed(&c1, "y", &c3).map_err(e)?, "x", &c2).map_err(e)?;
        same_curve(&left, &right, "parallel associativity")?;
    }
    Ok(format!("{instances} sequential and {instances} parallel instances"))
}

// ---------------------------------------------------------------- Arnold algebra

pub fn element_of(labels: &[String], w: &[Pair]) -> ArnoldElement {
    let word: Vec<(&str, &str)> = w.iter().map(|&(a, b)| (labels[a].as_str(), labels[b].as_str())).collect();
    ArnoldElement::from_word(labels, &word, q(1)).expect("valid word")
}

/// `dlog(z_b - z_a)` in the chart `ctx`.
fn omega(ctx: &FormContext, za: u32, zb: u32) -> LogForm {
    LogForm::dlog_of(ctx, &RatFunc::var(zb).sub(&RatFunc::var(za))).expect("nonzero difference")
}

pub fn check_arnold_dimensions(max_n: usize) -> Check {
    for n in 1..=max_n {
        let want = arrangement_poincare(n);
        for (k, &w) in want.iter().enumerate() {
            ensure(arnold::dimension(n, k) == w, || format!("dim A({n})_{k} = {}, expected {w}", arnold::dimension(n, k)))?;
            let mons = arnold::admissible_monomials(n, k).len() as u64;
            ensure(mons == w, || format!("{mons} admissible monomials in A({n})_{k}, expected {w}"))?;
        }
    }
    let row: Vec<String> = (0..4).map(|k| arnold::dimension(4, k).to_string()).collect();
    Ok(format!("n <= {max_n}; n = 4 gives {}", row.join(" ")))
}

/// The Arnold relation built directly from logarithmic differentials.
pub fn check_arnold_relation_forms(max_n: usize) -> Check {
    for n in 3..=max_n {
        let names: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
        let ctx = FormContext::new(&strs(&names), &[]).map_err(|e| e.to_string())?;
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                for c in 0..n as u32 {
                    if a == b || b == c || a == c {
                        continue;
                    }
                    let (ab, bc, ca) = (omega(&ctx, a, b), omega(&ctx, b, c), omega(&ctx, c, a));
                    let rel = ab.wedge(&bc).unwrap().add(&bc.wedge(&ca).unwrap()).unwrap().add(&ca.wedge(&ab).unwrap()).unwrap();
                    ensure(rel.is_zero(), || format!("relation on ({a},{b},{c}) is {rel}"))?;
                }
            }
        }
    }
    Ok(format!("all ordered triples for n <= {max_n}"))
}

/// Evaluations of the admissible monomials at random points are linearly
/// independent. The oracle evaluates each `dlog(z_b - z_a)` as the covector
/// `(e_b - e_a) / (z_b - z_a)` and a wedge of them through its minors.
pub fn check_arnold_independence(seed: u64, max_n: usize) -> Check {
    let mut r = random::rng(seed);
    for n in 2..=max_n {
        for k in 0..n {
            let mons = arnold::admissible_monomials(n, k);
            let subsets: Vec<Vec<usize>> = (0u32..1 << n)
                .filter(|m| m.count_ones() as usize == k)
                .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
                .collect();
            // forms are translation invariant, so a point gives at most
            // binomial(n - 1, k) independent values
            let npts = 2 * mons.len() / binomial(n - 1, k).max(1) + 4;
            let mut rows = vec![Vec::new(); mons.len()];
            for _ in 0..npts {
                let pt: Vec<Q> = loop {
                    let p: Vec<Q> = (0..n).map(|_| random::rational(&mut r, 30)).collect();
                    if p.iter().collect::<BTreeSet<_>>().len() == n {
                        break p;
                    }
                };
                for (row, w) in rows.iter_mut().zip(&mons) {
                    for s in &subsets {
                        let m = w
                            .iter()
                            .map(|&(a, b)| {
                                let inv = pt[b].sub(&pt[a]).inv().expect("distinct coordinates");
                                s.iter()
                                    .map(|&c| if c == b { inv.clone() } else if c == a { inv.neg() } else { Q::zero() })
                                    .collect()
                            })
                            .collect();
                        row.push(det(m));
                    }
                }
            }
            let rank = rank_mod_prime(&rows).ok_or("a denominator vanished modulo the prime")?;
            ensure(rank == mons.len(), || format!("n = {n}, degree {k}: rank {rank} < {}", mons.len()))?;
        }
    }
    Ok(format!("full rank in every degree for n <= {max_n}"))
}

/// The library realization of each admissible monomial agrees with the
/// covector oracle at random points.
pub fn check_realization_matches_oracle(seed: u64, n: usize, points: usize) -> Check {
    let mut r = random::rng(seed);
    let labels = ArnoldElement::numbered(n);
    let mut count = 0;
    for k in 1..n {
        for w in arnold::admissible_monomials(n, k) {
            let form = element_of(&labels, &w).realize_standard().map_err(|e| e.to_string())?;
            for _ in 0..points {
                let pt: Vec<Q> = loop {
                    let p: Vec<Q> = (0..n).map(|_| random::rational(&mut r, 30)).collect();
                    if p.iter().collect::<BTreeSet<_>>().len() == n {
                        break p;
                    }
                };
                let ev = form.evaluate(&pt).map_err(|e| e.to_string())?;
                for m in (0u32..1 << n).filter(|m| m.count_ones() as usize == k) {
                    let s: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
                    let mat = w
                        .iter()
                        .map(|&(a, b)| {
                            let inv = pt[b].sub(&pt[a]).inv().expect("distinct");
                            s.iter().map(|&c| if c == b { inv.clone() } else if c == a { inv.neg() } else { Q::zero() }).collect()
                        })
                        .collect();
                    let want = det(mat);
                    let key: Vec<u32> = s.iter().map(|&i| i as u32).collect();
                    let got = ev.get(&key).cloned().unwrap_or_else(Q::zero);
                    ensure(got == want, || format!("{w:?} at {pt:?} on {key:?}: {got} vs {want}"))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} coefficients agree"))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All ways to collide `2..n-1` of the labels.
pub fn partitions(labels: &[String]) -> Vec<Vec<String>> {
    let n = labels.len();
    (0u32..1 << n)
        .filter(|m| (2..n as u32).contains(&m.count_ones()))
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| labels[i].clone()).collect())
        .collect()
}

/// Oracle: pull the realization back along `z_b = z_nu + e w_b` for the
/// inner labels, take the regularized restriction to `e = 0`, and compare
/// with the realization of the cocomposed tensor.
pub fn cocompose_oracle(e: &ArnoldElement, inner: &[String], nu: &str) -> std::result::Result<(), String> {
    let err = |e: virtmor::Error| e.to_string();
    let labels = e.labels().to_vec();
    let t = cocompose(e, inner, nu).map_err(err)?;
    let (left, right) = (&t.factors()[0], &t.factors()[1]);
    let mut names: Vec<String> = left.iter().map(|l| format!("z{l}")).collect();
    names.extend(right.iter().map(|l| format!("w{l}")));
    names.push("e".into());
    let ev = (names.len() - 1) as u32;
    let tgt = FormContext::new(&strs(&names), &[ev]).map_err(err)?;
    let src_names: Vec<String> = labels.iter().map(|l| format!("z{l}")).collect();
    let src = FormContext::new(&strs(&src_names), &[]).map_err(err)?;
    let w = e.realize(&src, &(0..labels.len() as u32).collect::<Vec<_>>()).map_err(err)?;
    let nu_var = left.iter().position(|l| l == nu).unwrap() as u32;
    let images: Vec<RatFunc> = labels
        .iter()
        .map(|l| match right.iter().position(|x| x == l) {
            Some(j) => RatFunc::var(nu_var).add(&RatFunc::var(ev).mul(&RatFunc::var((left.len() + j) as u32))),
            None => RatFunc::var(left.iter().position(|x| x == l).unwrap() as u32),
        })
        .collect();
    let pulled = w.pullback(&tgt, &images).map_err(err)?;
    let jet = Jet::new(&tgt, &[ev], ev, RatFunc::var(ev)).map_err(err)?;
    let (ctx, restricted) = regularized_pullback(&pulled, &[jet]).map_err(err)?;
    let lv: Vec<u32> = (0..left.len() as u32).collect();
    let rv: Vec<u32> = (left.len() as u32..(left.len() + right.len()) as u32).collect();
    let expected = t.realize(&ctx, &[lv, rv]).map_err(err)?;
    let diff = restricted.sub(&expected).map_err(err)?;
    ensure(diff.is_zero(), || format!("cocompose of {e} along {inner:?}: forms differ by {diff}"))
}

fn random_element<R: Rng>(r: &mut R, labels: &[String]) -> ArnoldElement {
    let n = labels.len();
    let k = r.gen_range(0..n);
    let mons = arnold::admissible_monomials(n, k);
    let mut e = ArnoldElement::zero(labels).unwrap();
    for _ in 0..r.gen_range(1..=3) {
        let w = mons.choose(r).unwrap();
        e = e.add(&element_of(labels, w).scale(&random::nonzero_rational(r, 5))).unwrap();
    }
    e
}

pub fn check_cocompose(seed: u64, pairs: usize, max_n: usize) -> Check {
    let mut r = random::rng(seed);
    let err = |e: virtmor::Error| e.to_string();
    // relations are sent to zero: the images of generators satisfy them
    for n in 3..=max_n {
        let labels = ArnoldElement::numbered(n);
        for inner in partitions(&labels) {
            let img = |a: usize, b: usize| {
                cocompose(&ArnoldElement::generator(&labels, &labels[a], &labels[b]).unwrap(), &inner, "v").unwrap()
            };
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let g = img(i, j);
                    ensure(g.multiply(&g).map_err(err)?.is_zero(), || format!("square of w({i},{j}) survives"))?;
                    for k in 0..n {
                        if k == i || k == j {
                            continue;
                        }
                        let (ij, jk, ki) = (img(i, j), img(j, k), img(k, i));
                        let rel = ij
                            .multiply(&jk)
                            .map_err(err)?
                            .add(&jk.multiply(&ki).map_err(err)?)
                            .map_err(err)?
                            .add(&ki.multiply(&ij).map_err(err)?)
                            .map_err(err)?;
                        ensure(rel.is_zero(), || format!("relation ({i},{j},{k}) along {inner:?} maps to {rel}"))?;
                    }
                }
            }
        }
    }
    // multiplicativity
    for _ in 0..pairs {
        let n = r.gen_range(3..=max_n);
        let labels = ArnoldElement::numbered(n);
        let parts = partitions(&labels);
        let inner = parts.choose(&mut r).unwrap();
        let (x, y) = (random_element(&mut r, &labels), random_element(&mut r, &labels));
        let lhs = cocompose(&x.multiply(&y).map_err(err)?, inner, "v").map_err(err)?;
        let rhs = cocompose(&x, inner, "v").map_err(err)?.multiply(&cocompose(&y, inner, "v").map_err(err)?).map_err(err)?;
        ensure(lhs == rhs, || format!("not multiplicative on {x} and {y} along {inner:?}"))?;
    }
    // coassociativity on the whole basis: collide B at v, then C inside B at u,
    // against colliding C at u first and then (B - C) + u at v
    let mut nested = 0;
    for n in 4..=max_n {
        let labels = ArnoldElement::numbered(n);
        let basis: Vec<ArnoldElement> =
            (0..n).flat_map(|k| arnold::admissible_monomials(n, k)).map(|w| element_of(&labels, &w)).collect();
        for b in partitions(&labels) {
            for c in partitions(&b) {
                let mut b2: Vec<String> = b.iter().filter(|l| !c.contains(l)).cloned().collect();
                b2.push("u".into());
                for x in &basis {
                    let first = cocompose(x, &b, "v").map_err(err)?.cocompose_factor(1, &c, "u").map_err(err)?;
                    let left_c = cocompose(x, &c, "u").map_err(err)?;
                    let b2_ordered: Vec<String> =
                        left_c.factors()[0].iter().filter(|l| b2.contains(l)).cloned().collect();
                    let second = left_c.cocompose_factor(0, &b2_ordered, "v").map_err(err)?;
                    ensure(first == second, || format!("coassociativity fails on {x} for {b:?} > {c:?}: {first} vs {second}"))?;
                    nested += 1;
                }
            }
        }
    }
    Ok(format!("relations killed for n <= {max_n}, {pairs} products, {nested} nested cocompositions"))
}

/// Cocomposition agrees with the regularized pullback of the forms.
pub fn check_cocompose_oracle(max_n: usize) -> Check {
    let mut count = 0;
    for n in 3..=max_n {
        let labels = ArnoldElement::numbered(n);
        for inner in partitions(&labels) {
            for k in 0..n {
                for w in arnold::admissible_monomials(n, k) {
                    cocompose_oracle(&element_of(&labels, &w), &inner, "v")?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} basis elements"))
}

pub fn check_closedness(max_n: usize) -> Check {
    let mut count = 0;
    for n in 2..=max_n {
        let labels = ArnoldElement::numbered(n);
        for k in 0..n {
            for w in arnold::admissible_monomials(n, k) {
                let e = element_of(&labels, &w);
                let d = e.realize_standard().map_err(|e| e.to_string())?.d().map_err(|e| e.to_string())?;
                ensure(d.is_zero(), || format!("d of {e} is {d}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} admissible monomials closed"))
}

// ---------------------------------------------------------------- braids

pub fn check_braids(seed: u64, triples: usize) -> Check {
    let err = |e: virtmor::Error| e.to_string();
    let mut relations = 0;
    for n in 2..=6 {
        for (a, b) in artin_relations(n) {
            ensure(braid_eq(&a, &b).map_err(err)?, || format!("{a} != {b} on {n} strands"))?;
            relations += 1;
        }
    }
    let s = Braid::parse("s1", Some(2)).map_err(err)?;
    ensure(!braid_eq(&s, &s.inverse()).map_err(err)?, || "s1 equals its inverse".into())?;

    let mut r = random::rng(seed);
    for _ in 0..triples {
        let total = r.gen_range(5..=9);
        // sequential: f on A + x, g on B + y, h on C
        let sz = random_split(&mut r, total, &[1, 1, 2]);
        let mut l1 = letters(0, sz[0]);
        l1.push("x".into());
        let mut l2 = letters(sz[0], sz[1]);
        l2.push("y".into());
        let l3 = letters(sz[0] + sz[1], sz[2]);
        let f = random::morphism(&mut r, &strs(&l1), 6);
        let g = random::morphism(&mut r, &strs(&l2), 6);
        let h = random::morphism(&mut r, &strs(&l3), 6);
        let lhs = operadic_insert(&operadic_insert(&f, "x", &g).map_err(err)?, "y", &h).map_err(err)?;
        let rhs = operadic_insert(&f, "x", &operadic_insert(&g, "y", &h).map_err(err)?).map_err(err)?;
        ensure(lhs.equivalent(&rhs), || format!("sequential insertion differs: {} vs {}", lhs.to_json(), rhs.to_json()))?;
        // parallel: f on A + {x, y}
        let sz = random_split(&mut r, total, &[0, 2, 2]);
        let mut l1 = letters(0, sz[0]);
        l1.extend(["x".to_string(), "y".to_string()]);
        let l2 = letters(sz[0], sz[1]);
        let l3 = letters(sz[0] + sz[1], sz[2]);
        let f = random::morphism(&mut r, &strs(&l1), 6);
        let g = random::morphism(&mut r, &strs(&l2), 6);
        let h = random::morphism(&mut r, &strs(&l3), 6);
        let lhs = operadic_insert(&operadic_insert(&f, "x", &g).map_err(err)?, "y", &h).map_err(err)?;
        let rhs = operadic_insert(&operadic_insert(&f, "y", &h).map_err(err)?, "x", &g).map_err(err)?;
        ensure(lhs.equivalent(&rhs), || format!("parallel insertion differs: {} vs {}", lhs.to_json(), rhs.to_json()))?;
        ensure(lhs.braid().strands() == total, || "strand count".into())?;
    }
    for n in 2..=5 {
        let labels = letters(0, n);
        let obj = objects(&strs(&labels)).map_err(err)?;
        let trees: BTreeSet<PlanarTree> = enumerate(&strs(&labels)).map_err(err)?.into_iter().collect();
        ensure(obj == trees, || format!("objects on {n} labels differ from the trees"))?;
    }
    Ok(format!("{relations} Artin relations, {triples} insertion triples of each shape"))
}

pub fn identity_morphism(t: &PlanarTree) -> PabMorphism {
    PabMorphism::identity(t).expect("tree")
}

// ---------------------------------------------------------------- continuity

pub fn check_continuity() -> Check {
    let err = |e: virtmor::Error| e.to_string();
    let bad = fat_point_endomorphism(q(2), q(3)).map_err(err)?;
    let rep = continuity_check(&bad);
    ensure(!rep.passes() && !rep.violations().is_empty(), || "a != b was not flagged".into())?;
    let good = fat_point_endomorphism(qf(5, 2), qf(5, 2)).map_err(err)?;
    ensure(continuity_check(&good).passes(), || "a = b was flagged".into())?;
    let rep = continuity_check(&coordinate_axes_map::<Q>());
    ensure(rep.branch("x = 0", "z") == Some(&Branch::Zero), || format!("x = 0 branch: {:?}", rep.branch("x = 0", "z")))?;
    ensure(rep.branch("y = 0", "z") == Some(&Branch::Unit), || format!("y = 0 branch: {:?}", rep.branch("y = 0", "z")))?;
    Ok("dichotomy flagged for a != b, axes: zero and unit".into())
}

// ---------------------------------------------------------------- forms

pub fn check_regularized_pullback(seed: u64, forms: usize) -> Check {
    let err = |e: virtmor::Error| e.to_string();
    let ctx = FormContext::new(&["z1", "z2"], &[0, 1]).map_err(err)?;
    let jet = Jet::new(&ctx, &[0], 0, RatFunc::var(0).div(&RatFunc::var(1)).map_err(err)?).map_err(err)?;
    let (tgt, img) = regularized_pullback(&LogForm::dlog(&ctx, 0).map_err(err)?, &[jet]).map_err(err)?;
    let want = LogForm::parse(&tgt, "dlog(z2)").map_err(err)?;
    ensure(img == want, || format!("dlog z1 pulled back to {img}"))?;

    let mut r = random::rng(seed);
    let ctx = FormContext::new(&["z1", "z2", "z3"], &[0, 1]).map_err(err)?;
    for i in 0..forms {
        let w = random::log_form(&mut r, &ctx, 4);
        // the jet along z1 may carry a monomial in the other branch z2
        let e2 = r.gen_range(-2i32..=2);
        let c = random::nonzero_rational(&mut r, 5);
        let f = RatFunc::var(0).mul(&RatFunc::constant(c)).mul(&RatFunc::var(1).pow_i(e2 as i64).map_err(err)?);
        let jet = Jet::new(&ctx, &[0], 0, f).map_err(err)?;
        let reg = regularize(&w, std::slice::from_ref(&jet)).map_err(err)?;
        let res = reg.residue(0).map_err(err)?;
        ensure(res.is_zero(), || format!("form {i}: residue {res} of the regularization of {w}"))?;
        regularized_pullback(&w, &[jet]).map_err(err)?;
        // both branches at once
        let j1 = Jet::new(&ctx, &[0, 1], 0, RatFunc::var(0)).map_err(err)?;
        let j2 = Jet::new(&ctx, &[0, 1], 1, RatFunc::var(1).mul(&RatFunc::constant(q(3)))).map_err(err)?;
        let reg = regularize(&w, &[j1.clone(), j2.clone()]).map_err(err)?;
        for v in [0, 1] {
            let res = reg.residue(v).map_err(err)?;
            ensure(res.is_zero(), || format!("form {i}: residue along z{} is {res}", v + 1))?;
        }
        regularized_pullback(&w, &[j1, j2]).map_err(err)?;
    }
    Ok(format!("dlog z1 -> dlog z2; {forms} random forms residue-free"))
}

// ---------------------------------------------------------------- KN

pub fn check_kn() -> Check {
    let err = |e: virtmor::Error| e.to_string();
    let mut charts = p1_three_points::<Q>(&signs());
    charts.push(Chart { label: "log point".into(), model: LogModel::log_point(), points: vec![vec![q(0)]] });
    let reports = z_points_to_kn(&charts).map_err(err)?;
    for rep in &reports {
        ensure(rep.is_bijection(), || format!("{rep:?}"))?;
    }
    let total: usize = reports.iter().map(|r| r.integral_points).sum();
    // fibre rank equals the number of branches through the point
    let axes = LogModel::<Q>::divisorial(&["z1", "z2"], &[0, 1]);
    let cases: Vec<(LogModel<Q>, Vec<Q>, usize)> = vec![
        (LogModel::log_point(), vec![q(0)], 1),
        (axes.clone(), vec![q(0), q(0)], 2),
        (axes.clone(), vec![q(0), q(5)], 1),
        (axes, vec![q(2), q(5)], 0),
        (LogModel::log_line(), vec![q(3)], 0),
        (three_lines(), vec![q(0), q(0), q(0)], 3),
    ];
    for (x, pt, want) in &cases {
        let got = fibre_rank(x, pt).map_err(err)?;
        ensure(got == *want, || format!("fibre rank {got} at {pt:?}, expected {want} for {}", x.sections_summary()))?;
    }
    Ok(format!("{total} integral points over {} charts, {} fibre ranks", charts.len(), cases.len()))
}
