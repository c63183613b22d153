//! Parenthesized braids: braid words with equality decided by the Artin
//! action on a free group, morphisms between parenthesized permutations,
//! vertical composition and operadic insertion by cabling.
//!
//! Letters `k > 0` stand for `s_k`, `k < 0` for its inverse; `s_k` crosses
//! the strands at positions `k` and `k + 1`. Words are read top to bottom.
//! Cabling convention: when a bundle of `m` strands crosses a single strand,
//! the single strand passes the bundle one strand at a time, starting with
//! the bundle strand next to it, every crossing carrying the original sign.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fm_operad::{graft, PlanarTree};

/// Free-group word: `k > 0` is `x_k`, `k < 0` its inverse.
pub type FreeWord = Vec<i32>;

fn push_reduced(w: &mut FreeWord, x: i32) {
    if w.last() == Some(&-x) {
        w.pop();
    } else {
        w.push(x);
    }
}

pub fn free_reduce(w: &[i32]) -> FreeWord {
    let mut out = Vec::with_capacity(w.len());
    for &x in w {
        push_reduced(&mut out, x);
    }
    out
}

fn free_inverse(w: &[i32]) -> FreeWord {
    w.iter().rev().map(|x| -x).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Braid {
    strands: usize,
    word: Vec<i32>,
}

impl Braid {
    pub fn new(strands: usize, word: Vec<i32>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::Invalid("a braid needs at least one strand".into()));
        }
        if let Some(k) = word.iter().find(|&&k| k == 0 || k.unsigned_abs() as usize >= strands) {
            return Err(Error::Invalid(format!("generator index {} out of range for {strands} strands", k.abs())));
        }
        Ok(Braid { strands, word })
    }

    pub fn identity(strands: usize) -> Self {
        Braid { strands: strands.max(1), word: vec![] }
    }

    /// Parse `s1 s2' s1`; the strand count defaults to one more than the
    /// largest index.
    pub fn parse(s: &str, strands: Option<usize>) -> Result<Self> {
        let mut word = Vec::new();
        for tok in s.split_whitespace() {
            let (body, inv) = match tok.strip_suffix('\'') {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let k: i32 = body
                .strip_prefix('s')
                .and_then(|d| d.parse().ok())
                .filter(|&k| k > 0)
                .ok_or_else(|| Error::Parse(format!("bad braid letter {tok:?}")))?;
            word.push(if inv { -k } else { k });
        }
        let needed = word.iter().map(|k| k.unsigned_abs() as usize + 1).max().unwrap_or(1);
        Self::new(strands.unwrap_or(needed), word)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn word(&self) -> &[i32] {
        &self.word
    }

    pub fn inverse(&self) -> Self {
        Braid { strands: self.strands, word: self.word.iter().rev().map(|k| -k).collect() }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if self.strands != other.strands {
            return Err(Error::Mismatch("braids have different strand counts".into()));
        }
        Ok(Braid { strands: self.strands, word: [self.word.as_slice(), other.word.as_slice()].concat() })
    }

    /// Images of `x_1..x_n` under the automorphism of the word, where a word
    /// acts as the composite of its letters, first letter outermost.
    pub fn artin_action(&self) -> Vec<FreeWord> {
        let n = self.strands;
        let mut images: Vec<FreeWord> = (1..=n as i32).map(|i| vec![i]).collect();
        for &k in &self.word {
            let i = k.unsigned_abs() as usize;
            let (xi, xj) = (images[i - 1].clone(), images[i].clone());
            let (new_i, new_j) = if k > 0 {
                // x_i -> x_i x_{i+1} x_i^-1, x_{i+1} -> x_i
                (free_reduce(&[xi.as_slice(), &xj, &free_inverse(&xi)].concat()), xi)
            } else {
                // x_i -> x_{i+1}, x_{i+1} -> x_{i+1}^-1 x_i x_{i+1}
                (xj.clone(), free_reduce(&[free_inverse(&xj).as_slice(), &xi, &xj].concat()))
            };
            images[i - 1] = new_i;
            images[i] = new_j;
        }
        images
    }

    /// Final position of the strand starting at each position.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect();
        for &k in &self.word {
            let i = k.unsigned_abs() as usize;
            at.swap(i - 1, i);
        }
        let mut out = vec![0; self.strands];
        for (pos, &strand) in at.iter().enumerate() {
            out[strand] = pos;
        }
        out
    }

    fn shifted(&self, offset: usize, strands: usize) -> Self {
        Braid { strands, word: self.word.iter().map(|&k| k.signum() * (k.abs() + offset as i32)).collect() }
    }
}

impl fmt::Display for Braid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> =
            self.word.iter().map(|&k| if k > 0 { format!("s{k}") } else { format!("s{}'", -k) }).collect();
        f.write_str(&toks.join(" "))
    }
}

/// Equality of braids through their Artin actions.
pub fn braid_eq(a: &Braid, b: &Braid) -> Result<bool> {
    if a.strands != b.strands {
        return Err(Error::Mismatch("braids have different strand counts".into()));
    }
    Ok(a.artin_action() == b.artin_action())
}

/// The Artin relations on `n` strands, as pairs of words.
pub fn artin_relations(n: usize) -> Vec<(Braid, Braid)> {
    let mut out = Vec::new();
    for i in 1..n as i32 {
        for j in i + 1..n as i32 {
            let (l, r) = if j == i + 1 { (vec![i, j, i], vec![j, i, j]) } else { (vec![i, j], vec![j, i]) };
            out.push((Braid { strands: n, word: l }, Braid { strands: n, word: r }));
        }
    }
    out
}

/// A braid between two parenthesized permutations of the same labels.
#[derive(Clone, Debug, PartialEq)]
pub struct PabMorphism {
    source: PlanarTree,
    target: PlanarTree,
    braid: Braid,
}

impl PabMorphism {
    pub fn new(source: PlanarTree, target: PlanarTree, braid: Braid) -> Result<Self> {
        for t in [&source, &target] {
            if !t.is_binary() || matches!(t, PlanarTree::Leaf(_)) {
                return Err(Error::Invalid(format!("{t} is not a parenthesized permutation")));
            }
        }
        let (ls, lt) = (source.leaf_order(), target.leaf_order());
        if source.labels() != target.labels() {
            return Err(Error::Label("source and target have different labels".into()));
        }
        if braid.strands != ls.len() {
            return Err(Error::Mismatch(format!("braid has {} strands for {} labels", braid.strands, ls.len())));
        }
        let perm = braid.permutation();
        if (0..ls.len()).any(|p| lt[perm[p]] != ls[p]) {
            return Err(Error::Mismatch("the braid does not carry the source order to the target order".into()));
        }
        Ok(PabMorphism { source, target, braid })
    }

    pub fn identity(t: &PlanarTree) -> Result<Self> {
        Self::new(t.clone(), t.clone(), Braid::identity(t.leaf_order().len()))
    }

    pub fn source(&self) -> &PlanarTree {
        &self.source
    }

    pub fn target(&self) -> &PlanarTree {
        &self.target
    }

    pub fn braid(&self) -> &Braid {
        &self.braid
    }

    pub fn inverse(&self) -> Self {
        PabMorphism { source: self.target.clone(), target: self.source.clone(), braid: self.braid.inverse() }
    }

    /// Same objects and equal braids.
    pub fn equivalent(&self, o: &Self) -> bool {
        self.source == o.source && self.target == o.target && braid_eq(&self.braid, &o.braid).unwrap_or(false)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(RawMorphism {
            source: self.source.render(),
            target: self.target.render(),
            word: self.braid.to_string(),
        })
        .expect("plain strings")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let r: RawMorphism = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let source = PlanarTree::parse(&r.source)?;
        let target = PlanarTree::parse(&r.target)?;
        let n = source.leaf_order().len();
        Self::new(source, target, Braid::parse(&r.word, Some(n))?)
    }
}

#[derive(Serialize, Deserialize)]
struct RawMorphism {
    source: String,
    target: String,
    word: String,
}

/// `f` followed by `g`.
pub fn compose_vertical(f: &PabMorphism, g: &PabMorphism) -> Result<PabMorphism> {
    if f.target != g.source {
        return Err(Error::Mismatch(format!("target {} differs from source {}", f.target, g.source)));
    }
    PabMorphism::new(f.source.clone(), g.target.clone(), f.braid.then(&g.braid)?)
}

/// Replace the strand starting at `pos` by a bundle of `m` strands.
pub fn cable(b: &Braid, pos: usize, m: usize) -> Result<Braid> {
    if pos >= b.strands || m == 0 {
        return Err(Error::Invalid("bad cabling position".into()));
    }
    let n = b.strands + m - 1;
    let mut at = pos;
    let mut word = Vec::new();
    // cabled position of an ordinary strand
    let c = |p: usize, at: usize| if p < at { p } else { p + m - 1 };
    for &k in &b.word {
        let s = k.signum();
        let i = k.unsigned_abs() as usize;
        let (l, r) = (i - 1, i);
        if l == at {
            // the single strand on the right moves left across the bundle
            let base = at;
            for j in (base + 1..=base + m).rev() {
                word.push(s * j as i32);
            }
            at = r;
        } else if r == at {
            // the single strand on the left moves right across the bundle
            let base = at - 1;
            for j in base + 1..=base + m {
                word.push(s * j as i32);
            }
            at = l;
        } else {
            word.push(s * (c(l, at) + 1) as i32);
        }
    }
    Braid::new(n, word)
}

/// Insert `g` at the leaf `nu` of `f`: the objects graft, the strand `nu`
/// of `f` is cabled and the braid of `g` runs first inside the bundle.
pub fn operadic_insert(f: &PabMorphism, nu: &str, g: &PabMorphism) -> Result<PabMorphism> {
    let source = graft(&f.source, nu, &g.source)?;
    let target = graft(&f.target, nu, &g.target)?;
    let pos = f.source.leaf_order().iter().position(|l| l == nu).expect("grafted leaf");
    let m = g.braid.strands;
    let cabled = cable(&f.braid, pos, m)?;
    let inner = g.braid.shifted(pos, cabled.strands);
    PabMorphism::new(source, target, inner.then(&cabled)?)
}

/// Parenthesized permutations of the labels, built from permutations and
/// bracketings.
pub fn objects(labels: &[&str]) -> Result<BTreeSet<PlanarTree>> {
    if labels.len() < 2 {
        return Err(Error::Invalid("at least two labels are needed".into()));
    }
    let mut out = BTreeSet::new();
    let mut perm: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    perm.sort();
    loop {
        for t in bracketings(&perm) {
            out.insert(t);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(out)
}

fn bracketings(seq: &[String]) -> Vec<PlanarTree> {
    if seq.len() == 1 {
        return vec![PlanarTree::Leaf(seq[0].clone())];
    }
    let mut out = Vec::new();
    for k in 1..seq.len() {
        for l in bracketings(&seq[..k]) {
            for r in bracketings(&seq[k..]) {
                out.push(PlanarTree::Node(vec![l.clone(), r]));
            }
        }
    }
    out
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else { return false };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
