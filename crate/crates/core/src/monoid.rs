//! Affine monoids (finitely generated submonoids of a lattice), their group
//! completions, saturation checks and homomorphisms.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMonoid", into = "RawMonoid")]
pub struct AffineMonoid {
    ambient_rank: usize,
    generators: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct RawMonoid {
    ambient_rank: usize,
    generators: Vec<Vec<i64>>,
}

impl TryFrom<RawMonoid> for AffineMonoid {
    type Error = Error;
    fn try_from(r: RawMonoid) -> Result<Self> {
        AffineMonoid::new(r.ambient_rank, r.generators)
    }
}

impl From<AffineMonoid> for RawMonoid {
    fn from(m: AffineMonoid) -> Self {
        RawMonoid { ambient_rank: m.ambient_rank, generators: m.generators }
    }
}

/// A finitely generated abelian group `Z^rank + sum Z/t_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinAbGroup {
    pub rank: usize,
    pub torsion_orders: Vec<u64>,
}

impl FinAbGroup {
    pub fn free(rank: usize) -> Self {
        FinAbGroup { rank, torsion_orders: Vec::new() }
    }

    /// `Z^n / span(rows)`.
    pub fn cokernel(rows: &[Vec<i64>], n: usize) -> Self {
        let s = intmat::smith(&intmat::to_i128(rows), n);
        FinAbGroup {
            rank: n - s.rank(),
            torsion_orders: s.invariants.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect(),
        }
    }
}

impl std::fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.rank > 0 || self.torsion_orders.is_empty() {
            parts.push(if self.rank == 1 { "Z".to_string() } else { format!("Z^{}", self.rank) });
        }
        for t in &self.torsion_orders {
            parts.push(format!("Z/{t}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Outcome of a membership search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Non-negative coefficients expressing the element.
    Member(Vec<u64>),
    NotMember,
    Unknown,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Saturation {
    /// Certified; the string names the certificate.
    Saturated(String),
    NotSaturated { witness: Vec<i64>, multiple: u64 },
    Inconclusive,
}

const MEMBERSHIP_BUDGET: usize = 200_000;

impl AffineMonoid {
    pub fn new(ambient_rank: usize, generators: Vec<Vec<i64>>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.len() != ambient_rank {
                return Err(Error::Invalid(format!("generator {i} has length {}, expected {ambient_rank}", g.len())));
            }
            if g.iter().all(|&x| x == 0) {
                return Err(Error::Invalid(format!("generator {i} is the identity")));
            }
            if generators[..i].contains(g) {
                return Err(Error::Invalid(format!("duplicate generator {g:?}")));
            }
        }
        Ok(AffineMonoid { ambient_rank, generators })
    }

    /// `N^n` with the standard basis.
    pub fn free(n: usize) -> Self {
        let gens = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        AffineMonoid { ambient_rank: n, generators: gens }
    }

    pub fn trivial() -> Self {
        AffineMonoid { ambient_rank: 0, generators: Vec::new() }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn rank(&self) -> usize {
        intmat::rank(&self.generators, self.ambient_rank)
    }

    /// Basis of the relation lattice among the generators.
    pub fn relations(&self) -> Vec<Vec<i64>> {
        intmat::left_kernel(&self.generators, self.ambient_rank)
    }

    pub fn is_free(&self) -> bool {
        self.relations().is_empty()
    }

    /// `sum c_i g_i` for integer coefficients.
    pub fn combine(&self, coeffs: &[i64]) -> Vec<i64> {
        intmat::apply_rows(coeffs, &self.generators, self.ambient_rank)
    }

    /// Integer coefficients expressing `v` in the group completion, if `v` lies there.
    pub fn gp_coordinates(&self, v: &[i64]) -> Option<Vec<i64>> {
        intmat::solve_left(&self.generators, self.ambient_rank, v)
    }

    pub fn in_group_completion(&self, v: &[i64]) -> bool {
        self.gp_coordinates(v).is_some()
    }

    /// Direct sum.
    pub fn direct_sum(&self, other: &AffineMonoid) -> AffineMonoid {
        let n = self.ambient_rank + other.ambient_rank;
        let mut gens = Vec::new();
        for g in &self.generators {
            let mut v = g.clone();
            v.resize(n, 0);
            gens.push(v);
        }
        for g in &other.generators {
            let mut v = vec![0; self.ambient_rank];
            v.extend(g);
            gens.push(v);
        }
        AffineMonoid { ambient_rank: n, generators: gens }
    }

    /// A linear functional positive on every generator, if one is found.
    pub fn positive_functional(&self) -> Option<Vec<i64>> {
        let n = self.ambient_rank;
        let positive = |l: &[i64]| self.generators.iter().all(|g| g.iter().zip(l).map(|(a, b)| a * b).sum::<i64>() > 0);
        let sum: Vec<i64> = (0..n).map(|j| self.generators.iter().map(|g| g[j]).sum()).collect();
        if positive(&sum) {
            return Some(sum);
        }
        let gram: Vec<i64> = (0..n)
            .map(|j| self.generators.iter().map(|g| g[j] * g.iter().map(|x| x.abs()).sum::<i64>()).sum())
            .collect();
        if positive(&gram) {
            return Some(gram);
        }
        if n > 5 {
            return None;
        }
        let range = 4i64;
        let total = (2 * range + 1).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let l: Vec<i64> = (0..n)
                .map(|_| {
                    let d = c % (2 * range + 1) - range;
                    c /= 2 * range + 1;
                    d
                })
                .collect();
            if positive(&l) {
                return Some(l);
            }
        }
        None
    }

    /// Decide whether `v` lies in the monoid. Exact when a positive
    /// functional exists (pointed cone); otherwise a bounded search.
    pub fn membership(&self, v: &[i64]) -> Membership {
        if v.iter().all(|&x| x == 0) {
            return Membership::Member(vec![0; self.generators.len()]);
        }
        if !self.in_group_completion(v) {
            return Membership::NotMember;
        }
        match self.positive_functional() {
            Some(l) => self.membership_pointed(v, &l),
            None => self.membership_bounded(v),
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.membership(v).is_member()
    }

    fn membership_pointed(&self, v: &[i64], l: &[i64]) -> Membership {
        let dot = |a: &[i64]| a.iter().zip(l).map(|(x, y)| x * y).sum::<i64>();
        if dot(v) <= 0 {
            return Membership::NotMember;
        }
        // depth-first descent from v, remembering dead ends
        let k = self.generators.len();
        let mut dead: HashSet<Vec<i64>> = HashSet::new();
        let mut coeffs = vec![0u64; k];
        let mut budget = MEMBERSHIP_BUDGET;
        fn go(
            m: &AffineMonoid,
            rem: Vec<i64>,
            start: usize,
            dot: &dyn Fn(&[i64]) -> i64,
            dead: &mut HashSet<Vec<i64>>,
            coeffs: &mut Vec<u64>,
            budget: &mut usize,
        ) -> Option<bool> {
            if rem.iter().all(|&x| x == 0) {
                return Some(true);
            }
            if dot(&rem) <= 0 || dead.contains(&rem) {
                return Some(false);
            }
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            for i in start..m.generators.len() {
                let next: Vec<i64> = rem.iter().zip(&m.generators[i]).map(|(a, b)| a - b).collect();
                coeffs[i] += 1;
                match go(m, next, i, dot, dead, coeffs, budget) {
                    Some(true) => return Some(true),
                    None => {
                        coeffs[i] -= 1;
                        return None;
                    }
                    Some(false) => coeffs[i] -= 1,
                }
            }
            dead.insert(rem);
            Some(false)
        }
        match go(self, v.to_vec(), 0, &dot, &mut dead, &mut coeffs, &mut budget) {
            Some(true) => Membership::Member(coeffs),
            Some(false) => Membership::NotMember,
            None => Membership::Unknown,
        }
    }

    fn membership_bounded(&self, v: &[i64]) -> Membership {
        let radius = v.iter().map(|x| x.abs()).max().unwrap_or(0)
            + 2 * self.generators.iter().flatten().map(|x| x.abs()).max().unwrap_or(0);
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut queue: VecDeque<(Vec<i64>, Vec<u64>)> = VecDeque::new();
        queue.push_back((vec![0; self.ambient_rank], vec![0; self.generators.len()]));
        seen.insert(vec![0; self.ambient_rank]);
        while let Some((p, c)) = queue.pop_front() {
            if p == v {
                return Membership::Member(c);
            }
            if seen.len() > MEMBERSHIP_BUDGET {
                break;
            }
            for (i, g) in self.generators.iter().enumerate() {
                let q: Vec<i64> = p.iter().zip(g).map(|(a, b)| a + b).collect();
                if q.iter().all(|x| x.abs() <= radius) && seen.insert(q.clone()) {
                    let mut c2 = c.clone();
                    c2[i] += 1;
                    queue.push_back((q, c2));
                }
            }
        }
        Membership::Unknown
    }
}

/// Group completion: the lattice spanned by the generators.
pub fn group_completion(m: &AffineMonoid) -> FinAbGroup {
    let s = intmat::smith(&intmat::to_i128(&m.generators), m.ambient_rank);
    // Z^k / (relation lattice) is isomorphic to the image lattice, which is free.
    FinAbGroup::free(s.rank())
}

/// Saturation check with an explicit certificate, witness, or no verdict.
pub fn is_saturated(m: &AffineMonoid, search_bound: u64) -> Saturation {
    let n = m.ambient_rank;
    let basis = intmat::lattice_basis(&m.generators, n);
    let r = basis.len();
    if r == 0 {
        return Saturation::Saturated("trivial monoid".into());
    }
    // generators in coordinates of the group completion
    let local: Vec<Vec<i64>> =
        m.generators.iter().map(|g| intmat::solve_left(&basis, n, g).expect("generator in its own span")).collect();
    let to_ambient = |c: &[i64]| intmat::apply_rows(c, &basis, n);
    if local.len() == r {
        return Saturation::Saturated("simplicial cone generated by a lattice basis".into());
    }
    if r == 1 {
        let pos: Vec<i64> = local.iter().map(|g| g[0]).filter(|&x| x > 0).collect();
        let neg: Vec<i64> = local.iter().map(|g| g[0]).filter(|&x| x < 0).collect();
        if !pos.is_empty() && !neg.is_empty() {
            return Saturation::Saturated("monoid is a group".into());
        }
        let (vals, sign) = if pos.is_empty() { (neg.iter().map(|x| -x).collect::<Vec<_>>(), -1) } else { (pos, 1) };
        if vals.contains(&1) {
            return Saturation::Saturated("contains the lattice generator".into());
        }
        let k = *vals.iter().min().unwrap() as u64;
        if k <= search_bound {
            return Saturation::NotSaturated { witness: to_ambient(&[sign]), multiple: k };
        }
        return Saturation::Inconclusive;
    }
    if r == 2 {
        if let Some(cert) = unimodular_fan_2d(&local) {
            return Saturation::Saturated(cert);
        }
    }
    witness_search(m, &basis, search_bound)
}

/// Consecutive rays of a pointed planar cone all forming lattice bases.
fn unimodular_fan_2d(gens: &[Vec<i64>]) -> Option<String> {
    let probe = AffineMonoid { ambient_rank: 2, generators: gens.to_vec() };
    // rays of a pointed cone lie in an open half-plane, where angle order is total
    probe.positive_functional()?;
    let mut rays: Vec<&Vec<i64>> = gens.iter().collect();
    rays.sort_by(|a, b| {
        let cross = a[0] * b[1] - a[1] * b[0];
        0.cmp(&cross).then_with(|| (a[0].abs() + a[1].abs()).cmp(&(b[0].abs() + b[1].abs())))
    });
    let mut dirs: Vec<&Vec<i64>> = Vec::new();
    for g in rays {
        if let Some(last) = dirs.last() {
            if last[0] * g[1] - last[1] * g[0] == 0 {
                continue;
            }
        }
        dirs.push(g);
    }
    for w in dirs.windows(2) {
        let d = w[0][0] * w[1][1] - w[0][1] * w[1][0];
        if d.abs() != 1 {
            return None;
        }
    }
    Some("unimodular fan subdivision of a planar cone".into())
}

fn witness_search(m: &AffineMonoid, basis: &[Vec<i64>], bound: u64) -> Saturation {
    let n = m.ambient_rank;
    let r = basis.len();
    let b = bound as i64;
    let mut candidates: Vec<Vec<i64>> = Vec::new();
    let side = (2 * b + 1) as u64;
    let total = side.checked_pow(r as u32).unwrap_or(u64::MAX);
    if total > 5_000_000 {
        return Saturation::Inconclusive;
    }
    for code in 0..total {
        let mut c = code;
        let v: Vec<i64> = (0..r)
            .map(|_| {
                let d = (c % side) as i64 - b;
                c /= side;
                d
            })
            .collect();
        if v.iter().any(|&x| x != 0) {
            candidates.push(v);
        }
    }
    candidates.sort_by_key(|v| (v.iter().map(|x| x.abs()).max().unwrap_or(0), v.clone()));
    for c in candidates {
        let w = intmat::apply_rows(&c, basis, n);
        if m.membership(&w) != Membership::NotMember {
            continue;
        }
        for k in 2..=bound {
            let kw: Vec<i64> = w.iter().map(|x| x * k as i64).collect();
            if m.membership(&kw).is_member() {
                return Saturation::NotSaturated { witness: w, multiple: k };
            }
        }
    }
    Saturation::Inconclusive
}

/// Homomorphism of affine monoids, given by images of the source generators
/// (as vectors in the target's ambient lattice).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidHom {
    source: AffineMonoid,
    target: AffineMonoid,
    images: Vec<Vec<i64>>,
}

impl MonoidHom {
    pub fn new(source: AffineMonoid, target: AffineMonoid, images: Vec<Vec<i64>>) -> Result<Self> {
        if images.len() != source.num_generators() {
            return Err(Error::Invalid(format!(
                "{} images for {} generators",
                images.len(),
                source.num_generators()
            )));
        }
        for (i, img) in images.iter().enumerate() {
            if img.len() != target.ambient_rank {
                return Err(Error::Invalid(format!("image {i} has wrong length")));
            }
            if target.membership(img) == Membership::NotMember {
                return Err(Error::Invalid(format!("image {img:?} of generator {i} is not in the target monoid")));
            }
        }
        for rel in source.relations() {
            let v = intmat::apply_rows(&rel, &images, target.ambient_rank);
            if v.iter().any(|&x| x != 0) {
                return Err(Error::Invalid(format!("relation {rel:?} is not respected")));
            }
        }
        Ok(MonoidHom { source, target, images })
    }

    pub fn identity(m: &AffineMonoid) -> Self {
        MonoidHom { source: m.clone(), target: m.clone(), images: m.generators.clone() }
    }

    pub fn source(&self) -> &AffineMonoid {
        &self.source
    }

    pub fn target(&self) -> &AffineMonoid {
        &self.target
    }

    pub fn images(&self) -> &[Vec<i64>] {
        &self.images
    }

    /// Image of an element of the source group completion.
    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        let c = self
            .source
            .gp_coordinates(v)
            .ok_or_else(|| Error::Invalid(format!("{v:?} is not in the source group completion")))?;
        Ok(intmat::apply_rows(&c, &self.images, self.target.ambient_rank))
    }
}

/// `g` after `f`: first `f`, then `g`.
pub fn hom_compose(f: &MonoidHom, g: &MonoidHom) -> Result<MonoidHom> {
    if f.target != g.source {
        return Err(Error::Mismatch("target of the first map differs from source of the second".into()));
    }
    let images = f.images.iter().map(|y| g.apply(y)).collect::<Result<Vec<_>>>()?;
    MonoidHom::new(f.source.clone(), g.target.clone(), images)
}
