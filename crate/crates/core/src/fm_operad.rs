//! Planar rooted trees written as parenthesized monomials, their grafting,
//! and the bijection with maximally degenerate integral stable curves.
//!
//! Orientation dictionary: on the component of an internal vertex the two
//! children sit at 0 and 1, the one whose subtree holds the least label at
//! 0. The sign of the basepoint transported to the vertex is `+` when the
//! planar order of the children agrees with this placement, `-` otherwise.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::curves::{Component, Edge, StableCurve};
use crate::error::{Error, Result};
use crate::scalar::{Field, Ring, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanarTree {
    Leaf(String),
    Node(Vec<PlanarTree>),
}

impl PlanarTree {
    pub fn leaf(label: &str) -> Self {
        PlanarTree::Leaf(label.to_string())
    }

    /// Parse a monomial such as `(b(ac))`; every label is one character.
    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse_at(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Parse(format!("trailing input in {s:?}")));
        }
        if matches!(t, PlanarTree::Leaf(_)) {
            return Err(Error::Parse("a tree needs at least two leaves".into()));
        }
        t.check_labels()?;
        Ok(t)
    }

    fn check_labels(&self) -> Result<()> {
        let order = self.leaf_order();
        let set: BTreeSet<&String> = order.iter().collect();
        if set.len() != order.len() {
            return Err(Error::Label("duplicate leaf label".into()));
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        match self {
            PlanarTree::Leaf(l) => l.clone(),
            PlanarTree::Node(ch) => format!("({})", ch.iter().map(|c| c.render()).collect::<String>()),
        }
    }

    /// Leaf labels in planar order.
    pub fn leaf_order(&self) -> Vec<String> {
        match self {
            PlanarTree::Leaf(l) => vec![l.clone()],
            PlanarTree::Node(ch) => ch.iter().flat_map(|c| c.leaf_order()).collect(),
        }
    }

    pub fn labels(&self) -> BTreeSet<String> {
        self.leaf_order().into_iter().collect()
    }

    fn min_label(&self) -> String {
        self.labels().into_iter().next().expect("nonempty")
    }

    pub fn is_binary(&self) -> bool {
        match self {
            PlanarTree::Leaf(_) => true,
            PlanarTree::Node(ch) => ch.len() == 2 && ch.iter().all(|c| c.is_binary()),
        }
    }

    pub fn num_internal(&self) -> usize {
        match self {
            PlanarTree::Leaf(_) => 0,
            PlanarTree::Node(ch) => 1 + ch.iter().map(|c| c.num_internal()).sum::<usize>(),
        }
    }

    pub fn relabel(&self, map: &BTreeMap<String, String>) -> Self {
        match self {
            PlanarTree::Leaf(l) => PlanarTree::Leaf(map.get(l).cloned().unwrap_or_else(|| l.clone())),
            PlanarTree::Node(ch) => PlanarTree::Node(ch.iter().map(|c| c.relabel(map)).collect()),
        }
    }

    fn replace_leaf(&self, nu: &str, t: &PlanarTree) -> Self {
        match self {
            PlanarTree::Leaf(l) if l == nu => t.clone(),
            PlanarTree::Leaf(_) => self.clone(),
            PlanarTree::Node(ch) => PlanarTree::Node(ch.iter().map(|c| c.replace_leaf(nu, t)).collect()),
        }
    }
}

impl std::fmt::Display for PlanarTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

fn parse_at(chars: &[char], pos: &mut usize) -> Result<PlanarTree> {
    match chars.get(*pos) {
        None => Err(Error::Parse("unexpected end of input".into())),
        Some(')') => Err(Error::Parse("unbalanced parentheses".into())),
        Some('(') => {
            *pos += 1;
            let mut children = Vec::new();
            loop {
                match chars.get(*pos) {
                    None => return Err(Error::Parse("unbalanced parentheses".into())),
                    Some(')') => {
                        *pos += 1;
                        break;
                    }
                    _ => children.push(parse_at(chars, pos)?),
                }
            }
            if children.len() < 2 {
                return Err(Error::Parse("every vertex needs at least two children".into()));
            }
            Ok(PlanarTree::Node(children))
        }
        Some(c) => {
            *pos += 1;
            Ok(PlanarTree::Leaf(c.to_string()))
        }
    }
}

/// Replace the leaf `nu` of `t1` by the tree `t2`.
pub fn graft(t1: &PlanarTree, nu: &str, t2: &PlanarTree) -> Result<PlanarTree> {
    let left = t1.labels();
    if !left.contains(nu) {
        return Err(Error::Label(format!("{nu:?} is not a leaf of {t1}")));
    }
    if let Some(l) = t2.labels().iter().find(|l| left.contains(*l)) {
        return Err(Error::Label(format!("label {l:?} appears in both trees")));
    }
    Ok(t1.replace_leaf(nu, t2))
}

/// All planar binary trees with the given leaves, sorted by rendering.
pub fn enumerate(labels: &[&str]) -> Result<Vec<PlanarTree>> {
    if labels.len() < 2 {
        return Err(Error::Invalid("at least two labels are needed".into()));
    }
    let set: BTreeSet<&str> = labels.iter().copied().collect();
    if set.len() != labels.len() {
        return Err(Error::Label("duplicate label".into()));
    }
    let labels: Vec<String> = set.into_iter().map(String::from).collect();
    let mut out = trees_on(&labels);
    out.sort_by_key(|t| t.render());
    Ok(out)
}

fn trees_on(labels: &[String]) -> Vec<PlanarTree> {
    if labels.len() == 1 {
        return vec![PlanarTree::Leaf(labels[0].clone())];
    }
    let n = labels.len();
    let mut out = Vec::new();
    for mask in 1..(1u64 << n) - 1 {
        let (l, r): (Vec<String>, Vec<String>) = {
            let mut l = Vec::new();
            let mut r = Vec::new();
            for (i, x) in labels.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    l.push(x.clone());
                } else {
                    r.push(x.clone());
                }
            }
            (l, r)
        };
        let rights = trees_on(&r);
        for a in trees_on(&l) {
            for b in &rights {
                out.push(PlanarTree::Node(vec![a.clone(), b.clone()]));
            }
        }
    }
    out
}

/// `n! * Catalan(n - 1)`.
pub fn count_binary(n: u32) -> u128 {
    let fact: u128 = (1..=n as u128).product();
    let m = n.saturating_sub(1) as u128;
    let binom: u128 = (0..m).fold(1u128, |acc, i| acc * (2 * m - i) / (i + 1));
    fact * binom / (m + 1)
}

fn comp_id(t: &PlanarTree) -> String {
    format!("{{{}}}", t.labels().into_iter().collect::<Vec<_>>().join(","))
}

/// The degenerate integral curve of a binary tree.
pub fn tree_to_curve(t: &PlanarTree) -> Result<StableCurve<Q>> {
    if !t.is_binary() || matches!(t, PlanarTree::Leaf(_)) {
        return Err(Error::Invalid(format!("{t} is not a binary tree")));
    }
    t.check_labels()?;
    let mut comps = Vec::new();
    let mut edges = Vec::new();
    let root_sign = build(t, None, &mut comps, &mut edges);
    Ok(StableCurve::new(comps, edges, Q::from_int(root_sign))?.normalize_ids())
}

fn build(t: &PlanarTree, parent: Option<(&str, i64)>, comps: &mut Vec<Component<Q>>, edges: &mut Vec<Edge<Q>>) -> i64 {
    let PlanarTree::Node(ch) = t else { unreachable!("internal vertex") };
    let id = comp_id(t);
    let sign = if ch[0].min_label() < ch[1].min_label() { 1 } else { -1 };
    let mut points = BTreeMap::new();
    for c in ch {
        let at = if c.min_label() == t.min_label() { 0 } else { 1 };
        let key = match c {
            PlanarTree::Leaf(l) => l.clone(),
            PlanarTree::Node(_) => {
                build(c, Some((&id, sign)), comps, edges);
                format!("@{}", comp_id(c))
            }
        };
        points.insert(key, Q::from_int(at));
    }
    comps.push(Component { id: id.clone(), points });
    if let Some((pid, psign)) = parent {
        edges.push(Edge { parent: pid.to_string(), child: id, scalar: Q::from_int(sign * psign) });
    }
    sign
}

/// Inverse of [`tree_to_curve`] on curves isomorphic to an integral
/// maximally degenerate one.
pub fn curve_to_tree(c: &StableCurve<Q>) -> Result<PlanarTree> {
    let k = c.canonical();
    let unit = |x: &Q| *x == Q::one() || *x == Q::one().neg();
    if k.components().iter().any(|comp| comp.points.len() != 2) {
        return Err(Error::Invalid("every component must carry exactly three special points".into()));
    }
    if !unit(k.basepoint()) || k.edges().iter().any(|e| !unit(&e.scalar)) {
        return Err(Error::Invalid("the curve is not an integral point".into()));
    }
    let root = k.root().id.clone();
    Ok(unbuild(&k, &root, k.basepoint().clone()))
}

fn unbuild(k: &StableCurve<Q>, id: &str, sign: Q) -> PlanarTree {
    let comp = k.components().iter().find(|c| c.id == id).expect("known");
    let mut pts: Vec<(&Q, &String)> = comp.points.iter().map(|(key, x)| (x, key)).collect();
    pts.sort();
    if sign < Q::from_int(0) {
        pts.reverse();
    }
    PlanarTree::Node(
        pts.into_iter()
            .map(|(_, key)| match key.strip_prefix('@') {
                Some(child) => {
                    let e = k.edges().iter().find(|e| e.child == child).expect("edge");
                    unbuild(k, child, sign.mul(&e.scalar))
                }
                None => PlanarTree::Leaf(key.clone()),
            })
            .collect(),
    )
}
