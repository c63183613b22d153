//! The algebra generated by the forms `w(a,b) = dlog(z_b - z_a)` subject to
//! the three-term relations, with normal forms in the admissible basis, the
//! cocomposition along a collision of markings and the realization as
//! logarithmic forms.
//!
//! A monomial is admissible when each factor `w(a,b)` has `a < b` and the
//! larger endpoints strictly increase along the word.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{FormContext, LogForm};
use crate::ratfunc::RatFunc;
use crate::scalar::{parse_q, q_to_string, Ring, Q};

/// A factor `w(a,b)` as positions in the label order.
pub type Pair = (usize, usize);

#[derive(Clone, Debug, PartialEq)]
pub struct ArnoldElement {
    labels: Vec<String>,
    terms: BTreeMap<Vec<Pair>, Q>,
}

fn add_term(terms: &mut BTreeMap<Vec<Pair>, Q>, word: Vec<Pair>, c: Q) {
    if c.is_zero() {
        return;
    }
    let e = terms.entry(word.clone()).or_insert_with(Q::zero);
    *e = e.add(&c);
    if e.is_zero() {
        terms.remove(&word);
    }
}

/// Rewrite a word into admissible monomials, accumulating into `out`.
fn normalize_into(word: Vec<Pair>, c: Q, out: &mut BTreeMap<Vec<Pair>, Q>) {
    let mut w: Vec<Pair> = word.into_iter().map(|(a, b)| if a < b { (a, b) } else { (b, a) }).collect();
    let mut c = c;
    // insertion sort by (b, a), tracking the sign
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && (w[j - 1].1, w[j - 1].0) > (w[j].1, w[j].0) {
            w.swap(j - 1, j);
            c = c.neg();
            j -= 1;
        }
    }
    for i in 1..w.len() {
        if w[i] == w[i - 1] {
            return;
        }
    }
    if let Some(p) = (1..w.len()).find(|&p| w[p].1 == w[p - 1].1) {
        // w(i,k) w(j,k) = w(i,j) w(j,k) - w(i,j) w(i,k) for i < j < k
        let (i, k) = w[p - 1];
        let j = w[p].0;
        let mut first = w.clone();
        first[p - 1] = (i, j);
        let mut second = w.clone();
        second[p - 1] = (i, j);
        second[p] = (i, k);
        normalize_into(first, c.clone(), out);
        normalize_into(second, c.neg(), out);
        return;
    }
    add_term(out, w, c);
}

impl ArnoldElement {
    pub fn zero(labels: &[String]) -> Result<Self> {
        let set: BTreeSet<&String> = labels.iter().collect();
        if set.len() != labels.len() {
            return Err(Error::Label("duplicate label".into()));
        }
        if labels.iter().any(|l| l.is_empty() || l.contains([',', '(', ')', ' ', '^'])) {
            return Err(Error::Label("labels may not contain separators".into()));
        }
        Ok(ArnoldElement { labels: labels.to_vec(), terms: BTreeMap::new() })
    }

    /// Labels `1..=n` in their numeric order.
    pub fn numbered(n: usize) -> Vec<String> {
        (1..=n).map(|i| i.to_string()).collect()
    }

    pub fn scalar(labels: &[String], c: Q) -> Result<Self> {
        let mut e = Self::zero(labels)?;
        add_term(&mut e.terms, vec![], c);
        Ok(e)
    }

    pub fn one(labels: &[String]) -> Result<Self> {
        Self::scalar(labels, Q::one())
    }

    fn position(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::Label(format!("unknown label {label:?}")))
    }

    /// `c` times the normal form of a word in label names.
    pub fn from_word(labels: &[String], word: &[(&str, &str)], c: Q) -> Result<Self> {
        let mut e = Self::zero(labels)?;
        let mut w = Vec::new();
        for (a, b) in word {
            let (i, j) = (e.position(a)?, e.position(b)?);
            if i == j {
                return Err(Error::Invalid(format!("w({a},{b}) needs two distinct labels")));
            }
            w.push((i, j));
        }
        normalize_into(w, c, &mut e.terms);
        Ok(e)
    }

    pub fn generator(labels: &[String], a: &str, b: &str) -> Result<Self> {
        Self::from_word(labels, &[(a, b)], Q::one())
    }

    fn from_raw(labels: &[String], words: impl IntoIterator<Item = (Vec<Pair>, Q)>) -> Self {
        let mut terms = BTreeMap::new();
        for (w, c) in words {
            normalize_into(w, c, &mut terms);
        }
        ArnoldElement { labels: labels.to_vec(), terms }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Pair>, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree when homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let degs: BTreeSet<usize> = self.terms.keys().map(|w| w.len()).collect();
        match degs.len() {
            0 => Some(0),
            1 => degs.into_iter().next(),
            _ => None,
        }
    }

    /// Whether all coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    fn same_labels(&self, o: &Self) -> Result<()> {
        if self.labels != o.labels {
            return Err(Error::Mismatch("elements live on different label sets".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_labels(o)?;
        let mut out = self.clone();
        for (w, c) in &o.terms {
            add_term(&mut out.terms, w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = ArnoldElement { labels: self.labels.clone(), terms: BTreeMap::new() };
        for (w, d) in &self.terms {
            add_term(&mut out.terms, w.clone(), d.mul(c));
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&Q::one().neg()))
    }

    /// Exterior product, normalized.
    pub fn multiply(&self, o: &Self) -> Result<Self> {
        self.same_labels(o)?;
        let words = self.terms.iter().flat_map(|(w1, c1)| {
            o.terms.iter().map(move |(w2, c2)| ([w1.as_slice(), w2.as_slice()].concat(), c1.mul(c2)))
        });
        Ok(Self::from_raw(&self.labels, words.collect::<Vec<_>>()))
    }

    /// Realize as a form; `vars[i]` is the coordinate of the `i`-th label.
    pub fn realize(&self, ctx: &FormContext, vars: &[u32]) -> Result<LogForm> {
        let mut out = LogForm::zero(ctx);
        for (w, c) in &self.terms {
            let mut t = LogForm::constant(ctx, c.clone());
            for &(a, b) in w {
                let diff = RatFunc::var(vars[b]).sub(&RatFunc::var(vars[a]));
                t = t.wedge(&LogForm::dlog_of(ctx, &diff)?)?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Realization in the context `z<label>` with no divisor.
    pub fn realize_standard(&self) -> Result<LogForm> {
        let names: Vec<String> = self.labels.iter().map(|l| format!("z{l}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let ctx = FormContext::new(&refs, &[])?;
        let vars: Vec<u32> = (0..self.labels.len() as u32).collect();
        self.realize(&ctx, &vars)
    }

    pub fn parse(labels: &[String], s: &str) -> Result<Self> {
        let mut out = Self::zero(labels)?;
        for (sign, body) in split_terms(s)? {
            let (coef, word) = parse_term(&out, &body)?;
            let coef = if sign { coef.neg() } else { coef };
            normalize_into(word, coef, &mut out.terms);
        }
        Ok(out)
    }

    fn fmt_word(&self, w: &[Pair]) -> String {
        w.iter().map(|&(a, b)| format!("w({},{})", self.labels[a], self.labels[b])).collect::<Vec<_>>().join("^")
    }
}

/// Split at top-level signs; returns `(negated, body)`.
fn split_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse("unbalanced parentheses".into()));
        }
        if depth == 0 && (ch == '+' || ch == '-') {
            if !cur.trim().is_empty() {
                out.push((neg, cur.trim().to_string()));
            } else if !out.is_empty() || neg {
                return Err(Error::Parse(format!("dangling sign in {s:?}")));
            }
            cur.clear();
            neg = ch == '-';
            continue;
        }
        cur.push(ch);
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced parentheses".into()));
    }
    if cur.trim().is_empty() {
        return Err(Error::Parse(format!("empty term in {s:?}")));
    }
    out.push((neg, cur.trim().to_string()));
    Ok(out)
}

fn parse_term(e: &ArnoldElement, body: &str) -> Result<(Q, Vec<Pair>)> {
    let (coef, rest) = match body.find('w') {
        Some(0) => (Q::one(), body),
        Some(i) => (parse_q(body[..i].trim().trim_end_matches('*').trim())?, &body[i..]),
        None => return Ok((parse_q(body)?, vec![])),
    };
    let mut word = Vec::new();
    for f in rest.split('^') {
        let f = f.trim();
        let inner = f
            .strip_prefix("w(")
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected w(a,b), got {f:?}")))?;
        let (a, b) = inner.split_once(',').ok_or_else(|| Error::Parse(format!("expected w(a,b), got {f:?}")))?;
        let (i, j) = (e.position(a.trim())?, e.position(b.trim())?);
        if i == j {
            return Err(Error::Invalid(format!("{f} needs two distinct labels")));
        }
        word.push((i, j));
    }
    Ok((coef, word))
}

fn fmt_sum<'a>(terms: impl Iterator<Item = (&'a Q, String)>) -> String {
    let mut out = String::new();
    for (c, m) in terms {
        let neg = c.is_negative();
        let a = c.abs();
        let body = match (m.is_empty(), a == Q::one()) {
            (true, _) => q_to_string(&a),
            (false, true) => m,
            (false, false) => format!("{} {m}", q_to_string(&a)),
        };
        if out.is_empty() {
            out = if neg { format!("-{body}") } else { body };
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&body);
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn ordered<K: Clone + Ord, F: Fn(&K) -> usize>(terms: &BTreeMap<K, Q>, deg: F) -> Vec<(&K, &Q)> {
    let mut v: Vec<(&K, &Q)> = terms.iter().collect();
    v.sort_by_key(|(k, _)| (deg(k), (*k).clone()));
    v
}

impl fmt::Display for ArnoldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = ordered(&self.terms, |w| w.len());
        f.write_str(&fmt_sum(terms.into_iter().map(|(w, c)| (c, self.fmt_word(w)))))
    }
}

/// `prod_{i=1}^{n-1} (1 + i t)`, coefficient of `t^k`.
pub fn dimension(n: usize, k: usize) -> u64 {
    let mut poly = vec![1u64];
    for i in 1..n.max(1) as u64 {
        let mut next = vec![0u64; poly.len() + 1];
        for (d, c) in poly.iter().enumerate() {
            next[d] += c;
            next[d + 1] += c * i;
        }
        poly = next;
    }
    poly.get(k).copied().unwrap_or(0)
}

/// All admissible monomials of degree `k` on `n` labels.
pub fn admissible_monomials(n: usize, k: usize) -> Vec<Vec<Pair>> {
    fn go(n: usize, k: usize, start: usize, acc: &mut Vec<Pair>, out: &mut Vec<Vec<Pair>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for b in start..n {
            for a in 0..b {
                acc.push((a, b));
                go(n, k, b + 1, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, k, 1, &mut Vec::new(), &mut out);
    out
}

/// Tensor product of several Arnold algebras.
#[derive(Clone, Debug, PartialEq)]
pub struct ArnoldTensor {
    factors: Vec<Vec<String>>,
    terms: BTreeMap<Vec<Vec<Pair>>, Q>,
}

fn koszul_sign(a: &[Vec<Pair>], b: &[Vec<Pair>]) -> bool {
    // moving b_j past a_i for i > j
    let mut odd = false;
    for (j, bj) in b.iter().enumerate() {
        for ai in &a[j + 1..] {
            odd ^= ai.len() % 2 == 1 && bj.len() % 2 == 1;
        }
    }
    odd
}

impl ArnoldTensor {
    pub fn factors(&self) -> &[Vec<String>] {
        &self.factors
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Vec<Pair>>, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// A single element viewed as a one-factor tensor.
    pub fn from_element(e: &ArnoldElement) -> Self {
        ArnoldTensor {
            factors: vec![e.labels.clone()],
            terms: e.terms.iter().map(|(w, c)| (vec![w.clone()], c.clone())).collect(),
        }
    }

    fn insert(&mut self, words: Vec<Vec<Pair>>, c: Q) {
        // normalize each factor, expanding the product of the normal forms
        let mut acc: Vec<(Vec<Vec<Pair>>, Q)> = vec![(vec![], c)];
        for w in words {
            let mut nf = BTreeMap::new();
            normalize_into(w, Q::one(), &mut nf);
            let mut next = Vec::new();
            for (prefix, c) in &acc {
                for (v, d) in &nf {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    next.push((p, c.mul(d)));
                }
            }
            acc = next;
        }
        for (k, c) in acc {
            if c.is_zero() {
                continue;
            }
            let e = self.terms.entry(k.clone()).or_insert_with(Q::zero);
            *e = e.add(&c);
            if e.is_zero() {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.factors != o.factors {
            return Err(Error::Mismatch("tensors have different factors".into()));
        }
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.insert(k.clone(), c.clone());
        }
        Ok(out)
    }

    /// Product with the Koszul sign rule.
    pub fn multiply(&self, o: &Self) -> Result<Self> {
        if self.factors != o.factors {
            return Err(Error::Mismatch("tensors have different factors".into()));
        }
        let mut out = ArnoldTensor { factors: self.factors.clone(), terms: BTreeMap::new() };
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let mut c = ca.mul(cb);
                if koszul_sign(a, b) {
                    c = c.neg();
                }
                let words = a.iter().zip(b).map(|(x, y)| [x.as_slice(), y.as_slice()].concat()).collect();
                out.insert(words, c);
            }
        }
        Ok(out)
    }

    /// Apply [`cocompose`] to factor `i`.
    pub fn cocompose_factor(&self, i: usize, inner: &[String], nu: &str) -> Result<Self> {
        let labels = self.factors.get(i).ok_or_else(|| Error::Invalid("no such factor".into()))?;
        let rule = CocompositionRule::new(labels, inner, nu)?;
        let mut factors = self.factors.clone();
        factors.splice(i..=i, [rule.left.clone(), rule.right.clone()]);
        let mut out = ArnoldTensor { factors, terms: BTreeMap::new() };
        for (k, c) in &self.terms {
            let (l, r, odd) = rule.apply_word(&k[i]);
            let mut words = k.clone();
            words.splice(i..=i, [l, r]);
            out.insert(words, if odd { c.neg() } else { c.clone() });
        }
        Ok(out)
    }

    /// Realize as the wedge of the factor realizations; `vars[f][i]` is
    /// the coordinate of label `i` of factor `f`.
    pub fn realize(&self, ctx: &FormContext, vars: &[Vec<u32>]) -> Result<LogForm> {
        let mut out = LogForm::zero(ctx);
        for (k, c) in &self.terms {
            let mut t = LogForm::constant(ctx, c.clone());
            for (f, w) in k.iter().enumerate() {
                let e = ArnoldElement { labels: self.factors[f].clone(), terms: [(w.clone(), Q::one())].into() };
                t = t.wedge(&e.realize(ctx, &vars[f])?)?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    fn fmt_key(&self, k: &[Vec<Pair>]) -> String {
        k.iter()
            .enumerate()
            .map(|(f, w)| {
                if w.is_empty() {
                    "1".to_string()
                } else {
                    let e = ArnoldElement { labels: self.factors[f].clone(), terms: BTreeMap::new() };
                    e.fmt_word(w)
                }
            })
            .collect::<Vec<_>>()
            .join(" ⊗ ")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<TensorTerm> = self
            .terms
            .iter()
            .map(|(k, c)| TensorTerm {
                coefficient: q_to_string(c),
                factors: k
                    .iter()
                    .enumerate()
                    .map(|(f, w)| {
                        let e = ArnoldElement { labels: self.factors[f].clone(), terms: [(w.clone(), Q::one())].into() };
                        e.to_string()
                    })
                    .collect(),
            })
            .collect();
        serde_json::json!({ "factors": self.factors, "terms": terms })
    }
}

#[derive(Serialize, Deserialize)]
struct TensorTerm {
    coefficient: String,
    factors: Vec<String>,
}

impl fmt::Display for ArnoldTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = ordered(&self.terms, |k| k.iter().map(|w| w.len()).sum());
        let text = fmt_sum(terms.into_iter().map(|(k, c)| {
            let body = self.fmt_key(k);
            (c, if k.iter().all(|w| w.is_empty()) { String::new() } else { body })
        }));
        f.write_str(&text)
    }
}

/// Image of a generator under cocomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorImage {
    Left(Pair),
    Right(Pair),
}

/// The generator table of one partition: the markings `inner` collide at
/// the fresh label `nu`, which takes the place of the first of them in the
/// outer label order.
#[derive(Clone, Debug)]
pub struct CocompositionRule {
    pub left: Vec<String>,
    pub right: Vec<String>,
    table: BTreeMap<Pair, GeneratorImage>,
}

impl CocompositionRule {
    pub fn new(labels: &[String], inner: &[String], nu: &str) -> Result<Self> {
        let inner_set: BTreeSet<&String> = inner.iter().collect();
        if inner_set.len() != inner.len() || inner.iter().any(|b| !labels.contains(b)) {
            return Err(Error::Label("the inner labels must be distinct labels of the element".into()));
        }
        if inner.len() < 2 || inner.len() == labels.len() {
            return Err(Error::Invalid("both sides of the partition need at least two points".into()));
        }
        if labels.iter().any(|l| l == nu) {
            return Err(Error::Label(format!("{nu:?} is not fresh")));
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        for l in labels {
            if inner_set.contains(l) {
                if right.is_empty() {
                    left.push(nu.to_string());
                }
                right.push(l.clone());
            } else {
                left.push(l.clone());
            }
        }
        // validates the label syntax
        ArnoldElement::zero(&left)?;
        let lpos = |l: &String| left.iter().position(|x| x == l).expect("left label");
        let rpos = |l: &String| right.iter().position(|x| x == l).expect("right label");
        let nu_pos = left.iter().position(|x| x == nu).expect("nu");
        let mut table = BTreeMap::new();
        for b in 0..labels.len() {
            for a in 0..b {
                let (la, lb) = (&labels[a], &labels[b]);
                let img = match (inner_set.contains(la), inner_set.contains(lb)) {
                    (false, false) => GeneratorImage::Left((lpos(la), lpos(lb))),
                    (true, true) => GeneratorImage::Right((rpos(la), rpos(lb))),
                    (false, true) => GeneratorImage::Left((lpos(la), nu_pos)),
                    (true, false) => GeneratorImage::Left((nu_pos, lpos(lb))),
                };
                table.insert((a, b), img);
            }
        }
        Ok(CocompositionRule { left, right, table })
    }

    pub fn image(&self, p: Pair) -> &GeneratorImage {
        let key = if p.0 < p.1 { p } else { (p.1, p.0) };
        &self.table[&key]
    }

    /// Image of a word: left word, right word and the Koszul sign.
    fn apply_word(&self, w: &[Pair]) -> (Vec<Pair>, Vec<Pair>, bool) {
        let mut l = Vec::new();
        let mut r: Vec<Pair> = Vec::new();
        let mut odd = false;
        for &p in w {
            match self.image(p) {
                GeneratorImage::Left(x) => {
                    odd ^= r.len() % 2 == 1;
                    l.push(*x);
                }
                GeneratorImage::Right(x) => r.push(*x),
            }
        }
        (l, r, odd)
    }
}

/// Cocomposition along the collision of the `inner` markings.
pub fn cocompose(e: &ArnoldElement, inner: &[String], nu: &str) -> Result<ArnoldTensor> {
    ArnoldTensor::from_element(e).cocompose_factor(0, inner, nu)
}
