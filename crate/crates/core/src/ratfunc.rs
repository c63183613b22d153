//! Multivariate rational functions over the rationals.
//!
//! The denominator is kept as a list of normalized factors (monic, no
//! monomial content, single variables split off) so that poles along a
//! hyperplane can be read off directly. Equality is decided by
//! cross-multiplication, so non-irreducible factors never break it.

use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{default_name, Monomial, Poly};
use crate::scalar::{Field, Ring, Q};

/// A denominator as a list of factors with multiplicities.
type Factors = Vec<(Poly<Q>, u32)>;

#[derive(Clone, Debug)]
pub struct RatFunc {
    num: Poly<Q>,
    den: Vec<(Poly<Q>, u32)>,
}

impl RatFunc {
    pub fn from_poly(p: Poly<Q>) -> Self {
        RatFunc { num: p, den: Vec::new() }
    }

    pub fn var(v: u32) -> Self {
        Self::from_poly(Poly::var(v))
    }

    pub fn constant(c: Q) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn new(num: Poly<Q>, den: Poly<Q>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut r = RatFunc { num, den: Vec::new() };
        r.push_factor(den, 1);
        r.cancel();
        Ok(r)
    }

    pub fn numerator(&self) -> &Poly<Q> {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Poly<Q>, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> Poly<Q> {
        self.den.iter().fold(Poly::one(), |acc, (f, e)| acc.mul(&f.pow(*e)))
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_polynomial(&self) -> Option<&Poly<Q>> {
        if self.den.is_empty() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut v = self.num.vars();
        for (f, _) in &self.den {
            v.extend(f.vars());
        }
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Multiply the denominator by `p^e`, splitting and normalizing.
    fn push_factor(&mut self, p: Poly<Q>, e: u32) {
        if e == 0 {
            return;
        }
        let content = p.monomial_content();
        let rest = if content.is_one() {
            p
        } else {
            let cp = Poly::term(Q::one(), content.clone());
            for &(v, k) in content.pairs() {
                self.insert_factor(Poly::var(v), k * e);
            }
            p.div_exact(&cp).expect("monomial content divides")
        };
        let (_, lc) = rest.leading().expect("nonzero factor");
        let lc = lc.clone();
        let monic = rest.scale(&lc.inv().expect("nonzero"));
        let scale = lc.pow_i(-(e as i64)).expect("nonzero");
        self.num = self.num.scale(&scale);
        if !monic.is_constant() {
            self.insert_factor(monic, e);
        }
    }

    fn insert_factor(&mut self, f: Poly<Q>, e: u32) {
        if let Some(slot) = self.den.iter_mut().find(|(g, _)| *g == f) {
            slot.1 += e;
        } else {
            self.den.push((f, e));
            self.den.sort_by(|a, b| a.0.leading().map(|t| t.0).cmp(&b.0.leading().map(|t| t.0)).then_with(|| a.0.num_terms().cmp(&b.0.num_terms())));
        }
    }

    fn cancel(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for slot in self.den.iter_mut() {
            while slot.1 > 0 {
                match self.num.div_exact(&slot.0) {
                    Some(q) => {
                        self.num = q;
                        slot.1 -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|s| s.1 > 0);
    }

    /// Least common multiple of the factor lists, and the cofactors.
    fn common(a: &[(Poly<Q>, u32)], b: &[(Poly<Q>, u32)]) -> (Factors, Poly<Q>, Poly<Q>) {
        let mut l: Vec<(Poly<Q>, u32)> = a.to_vec();
        for (f, e) in b {
            match l.iter_mut().find(|(g, _)| g == f) {
                Some(slot) => slot.1 = slot.1.max(*e),
                None => l.push((f.clone(), *e)),
            }
        }
        let exp_in = |list: &[(Poly<Q>, u32)], f: &Poly<Q>| list.iter().find(|(g, _)| g == f).map_or(0, |s| s.1);
        let mut ca = Poly::one();
        let mut cb = Poly::one();
        for (f, e) in &l {
            ca = ca.mul(&f.pow(e - exp_in(a, f)));
            cb = cb.mul(&f.pow(e - exp_in(b, f)));
        }
        (l, ca, cb)
    }

    fn with_den(num: Poly<Q>, den: Vec<(Poly<Q>, u32)>) -> Self {
        let mut r = RatFunc { num, den };
        r.cancel();
        r
    }

    pub fn derivative(&self, v: u32) -> RatFunc {
        if self.den.is_empty() {
            return RatFunc::from_poly(self.num.derivative(v));
        }
        // d(N / prod p^e) = (N' P - N sum e p' P/p) / (D P) with P = prod p.
        let p_all = self.den.iter().fold(Poly::one(), |acc, (f, _)| acc.mul(f));
        let mut sum = Poly::zero();
        for (i, (f, e)) in self.den.iter().enumerate() {
            let others = self
                .den
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(Poly::one(), |acc, (_, (g, _))| acc.mul(g));
            sum = sum.add(&f.derivative(v).mul(&others).scale(&Q::from_int(*e as i64)));
        }
        let num = self.num.derivative(v).mul(&p_all).sub(&self.num.mul(&sum));
        let den = self.den.iter().map(|(f, e)| (f.clone(), e + 1)).collect();
        RatFunc::with_den(num, den)
    }

    /// Substitute rational functions for variables (missing images keep the variable).
    pub fn compose(&self, images: &[RatFunc]) -> Result<RatFunc> {
        let sub = |p: &Poly<Q>| {
            p.eval_in(
                |c| RatFunc::constant(c.clone()),
                |v| images.get(v as usize).cloned().unwrap_or_else(|| RatFunc::var(v)),
            )
        };
        let n = sub(&self.num);
        let d = sub(&self.denominator());
        n.div(&d)
    }

    pub fn substitute(&self, v: u32, image: &RatFunc) -> Result<RatFunc> {
        let n = (v as usize) + 1;
        let mut images: Vec<RatFunc> = (0..n as u32).map(RatFunc::var).collect();
        images[v as usize] = image.clone();
        self.compose(&images)
    }

    /// Exact value at a rational point.
    pub fn eval(&self, point: &[Q]) -> Result<Q> {
        let d = self.denominator().eval(point);
        if Ring::is_zero(&d) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(point) / d)
    }

    /// True when some denominator factor vanishes identically on `{v = 0}`.
    pub fn has_pole_along(&self, v: u32) -> bool {
        self.den.iter().any(|(f, _)| f.restrict_zero(&[v]).is_zero())
    }

    /// Restriction to `{v = 0}`; fails on a pole along that hyperplane.
    pub fn restrict_zero(&self, v: u32) -> Result<RatFunc> {
        if self.has_pole_along(v) {
            return Err(Error::Invalid(format!("pole along variable {v}")));
        }
        let mut r = RatFunc { num: self.num.restrict_zero(&[v]), den: Vec::new() };
        for (f, e) in &self.den {
            r.push_factor(f.restrict_zero(&[v]), *e);
        }
        r.cancel();
        Ok(r)
    }

    /// Order of vanishing along `{v = 0}` and the leading coefficient, which
    /// is free of `v`.
    pub fn leading_in(&self, v: u32) -> Option<(i64, RatFunc)> {
        let (k, lead_num) = self.num.lowest_in(v)?;
        let mut order = k as i64;
        let mut den = Poly::one();
        for (f, e) in &self.den {
            let (kf, lf) = f.lowest_in(v).expect("nonzero factor");
            order -= (kf * e) as i64;
            den = den.mul(&lf.pow(*e));
        }
        Some((order, RatFunc::new(lead_num, den).expect("nonzero leading part")))
    }

    pub fn fmt_with(&self, names: &dyn Fn(u32) -> String) -> String {
        let n = self.num.fmt_with(names);
        if self.den.is_empty() {
            return n;
        }
        let factors: Vec<String> = self
            .den
            .iter()
            .map(|(f, e)| {
                let s = f.fmt_with(names);
                let s = if f.num_terms() > 1 || s.contains('*') { format!("({s})") } else { s };
                if *e == 1 {
                    s
                } else {
                    format!("{s}^{e}")
                }
            })
            .collect();
        let d = factors.join("*");
        let n = if self.num.num_terms() > 1 { format!("({n})") } else { n };
        if self.den.len() == 1 && !d.starts_with('(') && self.den[0].1 == 1 {
            format!("{n}/{d}")
        } else {
            format!("{n}/({d})")
        }
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, o: &Self) -> bool {
        if self.den == o.den {
            return self.num == o.num;
        }
        let (_, ca, cb) = RatFunc::common(&self.den, &o.den);
        self.num.mul(&ca) == o.num.mul(&cb)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&default_name))
    }
}

impl Ring for RatFunc {
    fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }
    fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }
    fn add(&self, o: &Self) -> Self {
        let (l, ca, cb) = RatFunc::common(&self.den, &o.den);
        RatFunc::with_den(self.num.mul(&ca).add(&o.num.mul(&cb)), l)
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let mut r = RatFunc { num: self.num.mul(&o.num), den: self.den.clone() };
        for (f, e) in &o.den {
            r.insert_factor(f.clone(), *e);
        }
        r.cancel();
        r
    }
    fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl Field for RatFunc {
    fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            return None;
        }
        let mut r = RatFunc { num: self.denominator(), den: Vec::new() };
        r.push_factor(self.num.clone(), 1);
        r.cancel();
        Some(r)
    }
    fn from_q(q: &Q) -> Self {
        RatFunc::constant(q.clone())
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn parse_text(s: &str) -> Result<Self> {
        crate::expr::parse_ratfunc(s, &|name| crate::expr::default_var_index(name))
    }
}

/// Helper: `x^m` as a rational function.
pub fn monomial(m: Monomial) -> RatFunc {
    RatFunc::from_poly(Poly::term(Q::one(), m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qf};

    fn x(v: u32) -> RatFunc {
        RatFunc::var(v)
    }
    fn c(n: i64) -> RatFunc {
        RatFunc::constant(q(n))
    }

    #[test]
    fn arithmetic_cancels() {
        let a = x(0).sub(&c(1));
        let b = x(0).mul(&x(0)).sub(&c(1));
        let r = a.div(&b).unwrap();
        assert_eq!(r, c(1).div(&x(0).add(&c(1))).unwrap());
        assert_eq!(r.denominator_factors().len(), 1);
        let s = r.add(&r.neg());
        assert!(s.is_zero());
    }

    #[test]
    fn equality_by_cross_multiplication() {
        let a = RatFunc::new(Poly::var(0).sub(&Poly::one()), Poly::var(0).pow(2).sub(&Poly::one())).unwrap();
        let b = c(1).div(&x(0).add(&c(1))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn derivative_of_inverse() {
        let r = c(1).div(&x(0).sub(&x(1))).unwrap();
        let d = r.derivative(0);
        let expected = c(-1).div(&x(0).sub(&x(1)).mul(&x(0).sub(&x(1)))).unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn leading_term_in_g() {
        // 3g / (2 - g)^2 -> order 1, leading coefficient 3/4
        let g = x(0);
        let r = g.mul(&c(3)).div(&c(2).sub(&g).mul(&c(2).sub(&g))).unwrap();
        let (k, lead) = r.leading_in(0).unwrap();
        assert_eq!(k, 1);
        assert_eq!(lead, RatFunc::constant(qf(3, 4)));
    }

    #[test]
    fn poles_and_restriction() {
        let r = x(1).div(&x(0).add(&x(1))).unwrap();
        assert!(!r.has_pole_along(0));
        assert_eq!(r.restrict_zero(0).unwrap(), c(1));
        let p = c(1).div(&x(0).mul(&x(1).add(&c(1)))).unwrap();
        assert!(p.has_pole_along(0));
        assert!(p.restrict_zero(0).is_err());
    }

    #[test]
    fn text_round_trip() {
        let r = x(0).mul(&c(3)).div(&c(2).sub(&x(0))).unwrap();
        let s = r.to_text();
        assert_eq!(RatFunc::parse_text(&s).unwrap(), r);
    }
}
