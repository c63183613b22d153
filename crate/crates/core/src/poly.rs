//! Sparse multivariate polynomials over an exact field.
//!
//! Variables are plain indices; names live in whatever context owns the
//! polynomial. Terms are kept in lex order with variable 0 most significant.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::{Field, Ring};

/// Exponent vector stored sparsely as sorted `(variable, exponent)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: u32) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut m: BTreeMap<u32, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e > 0 {
                *m.entry(v).or_insert(0) += e;
            }
        }
        Monomial(m.into_iter().collect())
    }

    /// Dense exponent vector of length `n` (variables beyond `n` are dropped).
    pub fn from_dense(exps: &[u32]) -> Self {
        Monomial::from_pairs(exps.iter().enumerate().map(|(i, &e)| (i as u32, e)))
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    pub fn exp(&self, v: u32) -> u32 {
        self.0.iter().find(|p| p.0 == v).map_or(0, |p| p.1)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            if j >= o.0.len() || (i < self.0.len() && self.0[i].0 < o.0[j].0) {
                out.push(self.0[i]);
                i += 1;
            } else if i >= self.0.len() || o.0[j].0 < self.0[i].0 {
                out.push(o.0[j]);
                j += 1;
            } else {
                out.push((self.0[i].0, self.0[i].1 + o.0[j].1));
                i += 1;
                j += 1;
            }
        }
        Monomial(out)
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().all(|&(v, e)| o.exp(v) >= e)
    }

    /// `o / self`, assuming `self` divides `o`.
    pub fn quotient_of(&self, o: &Monomial) -> Monomial {
        Monomial::from_pairs(o.0.iter().map(|&(v, e)| (v, e - self.exp(v))))
    }

    pub fn gcd(&self, o: &Monomial) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|&(v, e)| (v, e.min(o.exp(v)))))
    }

    pub fn support(&self) -> Vec<u32> {
        self.0.iter().map(|p| p.0).collect()
    }

    pub fn without(&self, vars: &[u32]) -> Monomial {
        Monomial(self.0.iter().copied().filter(|p| !vars.contains(&p.0)).collect())
    }

    pub fn only(&self, vars: &[u32]) -> Monomial {
        Monomial(self.0.iter().copied().filter(|p| vars.contains(&p.0)).collect())
    }

    pub fn max_var(&self) -> Option<u32> {
        self.0.last().map(|p| p.0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let mut i = 0;
        loop {
            match (a.get(i), b.get(i)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va != vb {
                        return if va < vb { Ordering::Greater } else { Ordering::Less };
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                }
            }
            i += 1;
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Poly<F: Field> {
    terms: BTreeMap<Monomial, F>,
}

impl<F: Field> Default for Poly<F> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<F: Field> Poly<F> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: F) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn var(v: u32) -> Self {
        Self::term(F::one(), Monomial::var(v))
    }

    pub fn term(c: F, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, F)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = existing.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &F)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// Constant coefficient (the value at the origin).
    pub fn constant_term(&self) -> F {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(F::zero)
    }

    pub fn as_constant(&self) -> Option<F> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &F)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, m: &Monomial) -> F {
        self.terms.get(m).cloned().unwrap_or_else(F::zero)
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().flat_map(|m| m.support()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.neg());
        }
        r
    }

    pub fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x.mul(c))).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Poly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (lm, lc) = d.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quo = Poly::zero();
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let qm = lm.quotient_of(m);
            let qc = c.div(&lc).ok()?;
            let t = Poly::term(qc.clone(), qm.clone());
            rem = rem.sub(&d.mul(&t));
            quo.add_term(qm, qc);
        }
        Some(quo)
    }

    pub fn derivative(&self, v: u32) -> Self {
        let mut r = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let nm = Monomial::from_pairs(m.pairs().iter().map(|&(w, k)| if w == v { (w, k - 1) } else { (w, k) }));
            r.add_term(nm, c.mul(&F::from_int(e as i64)));
        }
        r
    }

    /// Evaluate in any ring, given images of coefficients and variables.
    pub fn eval_in<R: Ring>(&self, coef: impl Fn(&F) -> R, var: impl Fn(u32) -> R) -> R {
        let mut cache: BTreeMap<(u32, u32), R> = BTreeMap::new();
        let mut acc = R::zero();
        for (m, c) in &self.terms {
            let mut t = coef(c);
            for &(v, e) in m.pairs() {
                let p = cache.entry((v, e)).or_insert_with(|| var(v).pow_u(e as u64)).clone();
                t = t.mul(&p);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Evaluate at a point given as a slice indexed by variable.
    pub fn eval(&self, point: &[F]) -> F {
        self.eval_in(|c| c.clone(), |v| point.get(v as usize).cloned().unwrap_or_else(F::zero))
    }

    /// Substitute polynomials for variables (`images[i]` replaces variable i;
    /// variables without an image are kept).
    pub fn compose(&self, images: &[Poly<F>]) -> Self {
        self.eval_in(
            |c| Poly::constant(c.clone()),
            |v| images.get(v as usize).cloned().unwrap_or_else(|| Poly::var(v)),
        )
    }

    pub fn substitute(&self, v: u32, image: &Poly<F>) -> Self {
        self.eval_in(|c| Poly::constant(c.clone()), |w| if w == v { image.clone() } else { Poly::var(w) })
    }

    /// Set the listed variables to zero.
    pub fn restrict_zero(&self, vars: &[u32]) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.pairs().iter().all(|p| !vars.contains(&p.0)))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drop every term divisible by one of the given monomials.
    pub fn reduce_monomial_ideal(&self, ideal: &[Monomial]) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !ideal.iter().any(|g| g.divides(m)))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Greatest common monomial factor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(),
            Some(first) => it.fold(first.clone(), |g, m| g.gcd(m)),
        }
    }

    /// Lowest power of `v` present, and the coefficient polynomial of that power.
    pub fn lowest_in(&self, v: u32) -> Option<(u32, Poly<F>)> {
        let k = self.terms.keys().map(|m| m.exp(v)).min()?;
        let part = Poly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.exp(v) == k)
                .map(|(m, c)| (m.without(&[v]), c.clone())),
        );
        Some((k, part))
    }

    pub fn map_monomials(&self, f: impl Fn(&Monomial) -> Monomial) -> Self {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (f(m), c.clone())))
    }

    pub fn shift_vars(&self, offset: u32) -> Self {
        self.map_monomials(|m| Monomial::from_pairs(m.pairs().iter().map(|&(v, e)| (v + offset, e))))
    }

    pub fn fmt_with(&self, names: &dyn Fn(u32) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let mut cs = c.to_text();
            let negative = cs.starts_with('-') && !cs.contains(['+', ' ']);
            if negative {
                cs.remove(0);
            }
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let complex = cs.contains(['+', '-', ' ', '/']);
            let mono: Vec<String> = m
                .pairs()
                .iter()
                .map(|&(v, e)| if e == 1 { names(v) } else { format!("{}^{}", names(v), e) })
                .collect();
            if m.is_one() {
                out.push_str(&cs);
            } else {
                if cs != "1" {
                    if complex {
                        out.push_str(&format!("({cs})*"));
                    } else {
                        out.push_str(&cs);
                        out.push('*');
                    }
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

/// Default variable names: `g` for variable 0, `x1`, `x2`, ... otherwise.
pub fn default_name(v: u32) -> String {
    if v == 0 {
        "g".into()
    } else {
        format!("x{v}")
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&default_name))
    }
}

impl<F: Field> Ring for Poly<F> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn add(&self, o: &Self) -> Self {
        Poly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Poly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Poly::mul(self, o)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};

    fn x(v: u32) -> Poly<Q> {
        Poly::var(v)
    }

    #[test]
    fn lex_order() {
        let a = Monomial::from_pairs([(0, 1)]);
        let b = Monomial::from_pairs([(1, 5)]);
        assert!(a > b);
        assert!(Monomial::from_pairs([(0, 1), (1, 1)]) > a);
        assert!(Monomial::one() < b);
    }

    #[test]
    fn exact_division() {
        let p = x(0).add(&x(1)).mul(&x(0).sub(&x(2)));
        let d = x(0).add(&x(1));
        assert_eq!(p.div_exact(&d).unwrap(), x(0).sub(&x(2)));
        assert!(p.div_exact(&x(1)).is_none());
        let sq = x(0).pow(2).sub(&Poly::constant(q(1)));
        assert_eq!(sq.div_exact(&x(0).sub(&Poly::one())).unwrap(), x(0).add(&Poly::one()));
    }

    #[test]
    fn derivative_and_compose() {
        let p = x(0).pow(3).mul(&x(1));
        assert_eq!(p.derivative(0), x(0).pow(2).mul(&x(1)).scale(&q(3)));
        let c = p.compose(&[x(1), x(0)]);
        assert_eq!(c, x(1).pow(3).mul(&x(0)));
        assert_eq!(p.eval(&[q(2), q(5)]), q(40));
    }

    #[test]
    fn monomial_ideal_reduction() {
        let p = x(0).mul(&x(1)).add(&x(0)).add(&x(1).pow(2));
        let j = vec![Monomial::from_pairs([(0, 1), (1, 1)])];
        assert_eq!(p.reduce_monomial_ideal(&j), x(0).add(&x(1).pow(2)));
    }

    #[test]
    fn printing() {
        let p = x(1).scale(&q(-2)).add(&Poly::one());
        assert_eq!(p.to_string(), "-2*x1 + 1");
    }
}
