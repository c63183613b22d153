//! Logarithmic differential forms with rational-function coefficients.
//!
//! A form is a sum of `f * s_1 ^ ... ^ s_k` with strictly increasing symbols
//! `dlog(z_j)` (divisor variables, listed first) and `dz_i` (the others).
//! A plain `dz_j` of a divisor variable is rewritten as `z_j dlog(z_j)`, and
//! coefficients may not have poles along divisor hyperplanes, so every form
//! has at most logarithmic poles there.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{names_lookup, parse_ratfunc};
use crate::ratfunc::RatFunc;
use crate::scalar::{Field, Ring, Q};

/// Variables and divisor of the ambient chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormContext {
    names: Vec<String>,
    divisor: Vec<u32>,
}

impl FormContext {
    pub fn new(names: &[&str], divisor: &[u32]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let mut divisor = divisor.to_vec();
        divisor.sort_unstable();
        divisor.dedup();
        if divisor.iter().any(|&d| d as usize >= names.len()) {
            return Err(Error::Invalid("divisor variable out of range".into()));
        }
        Ok(FormContext { names, divisor })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn divisor(&self) -> &[u32] {
        &self.divisor
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn is_divisor(&self, v: u32) -> bool {
        self.divisor.contains(&v)
    }

    pub fn var(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    fn name(&self, v: u32) -> String {
        self.names.get(v as usize).cloned().unwrap_or_else(|| format!("?{v}"))
    }

    pub fn fmt_coeff(&self, f: &RatFunc) -> String {
        f.fmt_with(&|v| self.name(v))
    }
}

/// Exterior generator. The derived order puts every `Dlog` before every `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Dlog(u32),
    D(u32),
}

impl Symbol {
    pub fn var(self) -> u32 {
        match self {
            Symbol::Dlog(v) | Symbol::D(v) => v,
        }
    }
}

/// Sort symbols, returning the permutation sign, or `None` on a repeat.
fn sort_symbols(mut s: Vec<Symbol>) -> Option<(Vec<Symbol>, bool)> {
    let mut odd = false;
    // insertion sort keeps track of the parity
    for i in 1..s.len() {
        let mut j = i;
        while j > 0 && s[j - 1] > s[j] {
            s.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if s.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((s, odd))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogForm {
    ctx: FormContext,
    terms: BTreeMap<Vec<Symbol>, RatFunc>,
}

impl LogForm {
    pub fn zero(ctx: &FormContext) -> Self {
        LogForm { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    /// A function, as a 0-form.
    pub fn function(ctx: &FormContext, f: RatFunc) -> Result<Self> {
        let mut w = Self::zero(ctx);
        w.add_raw(vec![], f)?;
        Ok(w)
    }

    pub fn constant(ctx: &FormContext, c: Q) -> Self {
        Self::function(ctx, RatFunc::constant(c)).expect("constants have no poles")
    }

    /// `dz_v`, rewritten as `z_v dlog(z_v)` on a divisor variable.
    pub fn dz(ctx: &FormContext, v: u32) -> Self {
        let mut w = Self::zero(ctx);
        w.add_raw(vec![Symbol::D(v)], RatFunc::one()).expect("no poles");
        w
    }

    pub fn dlog(ctx: &FormContext, v: u32) -> Result<Self> {
        if !ctx.is_divisor(v) {
            return Err(Error::Invalid(format!("{} is not a divisor variable", ctx.name(v))));
        }
        let mut w = Self::zero(ctx);
        w.add_raw(vec![Symbol::Dlog(v)], RatFunc::one())?;
        Ok(w)
    }

    /// `df`.
    pub fn differential(ctx: &FormContext, f: &RatFunc) -> Result<Self> {
        let mut w = Self::zero(ctx);
        for v in f.vars() {
            w.add_raw(vec![Symbol::D(v)], f.derivative(v))?;
        }
        Ok(w)
    }

    /// `df / f`; fails unless the result has log poles only.
    pub fn dlog_of(ctx: &FormContext, f: &RatFunc) -> Result<Self> {
        let inv = f.inv().ok_or(Error::DivisionByZero)?;
        let mut w = Self::zero(ctx);
        for v in f.vars() {
            w.add_raw(vec![Symbol::D(v)], f.derivative(v).mul(&inv))?;
        }
        Ok(w)
    }

    pub fn context(&self) -> &FormContext {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Symbol>, &RatFunc)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, symbols: &[Symbol]) -> RatFunc {
        self.terms.get(symbols).cloned().unwrap_or_else(RatFunc::zero)
    }

    /// Degree, if homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|k| k.len());
        let first = it.next().unwrap_or(0);
        it.all(|d| d == first).then_some(first)
    }

    /// Insert `f * (symbols in the given order)` after normalization.
    fn add_raw(&mut self, symbols: Vec<Symbol>, f: RatFunc) -> Result<()> {
        if f.is_zero() {
            return Ok(());
        }
        let mut coef = f;
        let mut syms = Vec::with_capacity(symbols.len());
        for s in symbols {
            match s {
                Symbol::D(v) if self.ctx.is_divisor(v) => {
                    coef = coef.mul(&RatFunc::var(v));
                    syms.push(Symbol::Dlog(v));
                }
                Symbol::Dlog(v) if !self.ctx.is_divisor(v) => {
                    // dlog of a non-divisor variable is dz / z
                    coef = coef.div(&RatFunc::var(v))?;
                    syms.push(Symbol::D(v));
                }
                _ => syms.push(s),
            }
        }
        let Some((syms, odd)) = sort_symbols(syms) else { return Ok(()) };
        if odd {
            coef = coef.neg();
        }
        for &d in &self.ctx.divisor {
            if coef.has_pole_along(d) {
                return Err(Error::Invalid(format!(
                    "coefficient {} has a non-logarithmic pole along {}",
                    self.ctx.fmt_coeff(&coef),
                    self.ctx.name(d)
                )));
            }
        }
        let entry = self.terms.entry(syms.clone()).or_insert_with(RatFunc::zero);
        *entry = entry.add(&coef);
        if entry.is_zero() {
            self.terms.remove(&syms);
        }
        Ok(())
    }

    fn same_ctx(&self, o: &Self) -> Result<()> {
        if self.ctx != o.ctx {
            return Err(Error::Mismatch("forms live on different charts".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_ctx(o)?;
        let mut w = self.clone();
        for (s, c) in &o.terms {
            w.add_raw(s.clone(), c.clone())?;
        }
        Ok(w)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        LogForm { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(s, c)| (s.clone(), c.neg())).collect() }
    }

    pub fn scale(&self, f: &RatFunc) -> Result<Self> {
        let mut w = Self::zero(&self.ctx);
        for (s, c) in &self.terms {
            w.add_raw(s.clone(), c.mul(f))?;
        }
        Ok(w)
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        self.same_ctx(o)?;
        let mut w = Self::zero(&self.ctx);
        for (s1, c1) in &self.terms {
            for (s2, c2) in &o.terms {
                w.add_raw([s1.as_slice(), s2.as_slice()].concat(), c1.mul(c2))?;
            }
        }
        Ok(w)
    }

    /// Exterior derivative; symbols are closed.
    pub fn d(&self) -> Result<Self> {
        let mut w = Self::zero(&self.ctx);
        for (s, c) in &self.terms {
            for v in c.vars() {
                let mut syms = vec![Symbol::D(v)];
                syms.extend_from_slice(s);
                w.add_raw(syms, c.derivative(v))?;
            }
        }
        Ok(w)
    }

    /// Residue along the divisor branch `z_v`: move `dlog(z_v)` to the front,
    /// strip it and restrict the rest to `z_v = 0`.
    pub fn residue(&self, v: u32) -> Result<Self> {
        if !self.ctx.is_divisor(v) {
            return Err(Error::Invalid(format!("{} is not a divisor variable", self.ctx.name(v))));
        }
        let mut w = Self::zero(&self.ctx);
        for (s, c) in &self.terms {
            let Some(k) = s.iter().position(|&x| x == Symbol::Dlog(v)) else { continue };
            let mut rest = s.clone();
            rest.remove(k);
            let c = c.restrict_zero(v)?;
            w.add_raw(rest, if k % 2 == 1 { c.neg() } else { c })?;
        }
        Ok(w)
    }

    /// Pull back along `z_i = images[i]`, a map from the chart `target`.
    /// The computation runs in plain coordinates so that poles may cancel
    /// between terms before the log-pole condition is checked.
    pub fn pullback(&self, target: &FormContext, images: &[RatFunc]) -> Result<Self> {
        if images.len() != self.ctx.num_vars() {
            return Err(Error::Invalid("one image is needed per variable".into()));
        }
        let names: Vec<&str> = target.names.iter().map(|n| n.as_str()).collect();
        let plain = FormContext::new(&names, &[])?;
        let mut sym_images = BTreeMap::new();
        for s in self.terms.keys() {
            for &x in s {
                if let std::collections::btree_map::Entry::Vacant(e) = sym_images.entry(x) {
                    let img = &images[x.var() as usize];
                    e.insert(match x {
                        Symbol::D(_) => LogForm::differential(&plain, img)?,
                        Symbol::Dlog(_) => LogForm::dlog_of(&plain, img)?,
                    });
                }
            }
        }
        let mut w = Self::zero(&plain);
        for (s, c) in &self.terms {
            let mut acc = LogForm::function(&plain, c.compose(images)?)?;
            for x in s {
                acc = acc.wedge(&sym_images[x])?;
            }
            w = w.add(&acc)?;
        }
        let mut out = Self::zero(target);
        for (s, c) in w.terms {
            out.add_raw(s, c)?;
        }
        Ok(out)
    }

    /// Coefficients after writing `dlog(z) = dz / z`, as a map from sorted
    /// variable lists to functions.
    pub fn plain_coefficients(&self) -> Result<BTreeMap<Vec<u32>, RatFunc>> {
        let mut out: BTreeMap<Vec<u32>, RatFunc> = BTreeMap::new();
        for (s, c) in &self.terms {
            let mut c = c.clone();
            for x in s {
                if let Symbol::Dlog(v) = x {
                    c = c.div(&RatFunc::var(*v))?;
                }
            }
            // symbols are already sorted by kind then variable; sort by variable
            let mut vars: Vec<(u32, usize)> = s.iter().enumerate().map(|(i, x)| (x.var(), i)).collect();
            let mut odd = false;
            for i in 1..vars.len() {
                let mut j = i;
                while j > 0 && vars[j - 1].0 > vars[j].0 {
                    vars.swap(j - 1, j);
                    odd = !odd;
                    j -= 1;
                }
            }
            if odd {
                c = c.neg();
            }
            let key: Vec<u32> = vars.iter().map(|p| p.0).collect();
            let e = out.entry(key.clone()).or_insert_with(RatFunc::zero);
            *e = e.add(&c);
            if e.is_zero() {
                out.remove(&key);
            }
        }
        Ok(out)
    }

    /// Values of the plain coefficients at a point.
    pub fn evaluate(&self, point: &[Q]) -> Result<BTreeMap<Vec<u32>, Q>> {
        let mut out = BTreeMap::new();
        for (k, c) in self.plain_coefficients()? {
            let v = c.eval(point)?;
            if !v.is_zero() {
                out.insert(k, v);
            }
        }
        Ok(out)
    }

    pub fn parse(ctx: &FormContext, s: &str) -> Result<Self> {
        parse_form(ctx, s)
    }
}

fn fmt_symbol(ctx: &FormContext, s: Symbol) -> String {
    match s {
        Symbol::Dlog(v) => format!("dlog({})", ctx.name(v)),
        Symbol::D(v) => format!("d{}", ctx.name(v)),
    }
}

impl fmt::Display for LogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(s, c)| {
                let coef = format!("({})", self.ctx.fmt_coeff(c));
                if s.is_empty() {
                    coef
                } else {
                    let syms: Vec<String> = s.iter().map(|&x| fmt_symbol(&self.ctx, x)).collect();
                    if c.is_one() {
                        syms.join("^")
                    } else {
                        format!("{} * {coef}", syms.join("^"))
                    }
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Split at top-level occurrences of any of `seps`, keeping the separator.
fn split_top(s: &str, seps: &[char]) -> Result<Vec<(Option<char>, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut lead = None;
    let mut prev_sig: Option<char> = None;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse("unbalanced ')'".into()));
        }
        // a sign right after an operator is unary, not a separator
        let unary = matches!(prev_sig, None | Some('*' | '/' | '^' | '(' | '+' | '-'));
        if depth == 0 && seps.contains(&c) && !(unary && (c == '-' || c == '+')) {
            out.push((lead, std::mem::take(&mut cur)));
            lead = Some(c);
        } else {
            cur.push(c);
        }
        if !c.is_whitespace() {
            prev_sig = Some(c);
        }
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced '('".into()));
    }
    out.push((lead, cur));
    Ok(out)
}

fn parse_symbol(ctx: &FormContext, s: &str) -> Option<Symbol> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("dlog(").and_then(|r| r.strip_suffix(')')) {
        return ctx.var(inner.trim()).map(Symbol::Dlog);
    }
    if let Some(inner) = s.strip_prefix("d(").and_then(|r| r.strip_suffix(')')) {
        return ctx.var(inner.trim()).map(Symbol::D);
    }
    s.strip_prefix('d').and_then(|n| ctx.var(n)).map(Symbol::D)
}

fn parse_form(ctx: &FormContext, s: &str) -> Result<LogForm> {
    let mut w = LogForm::zero(ctx);
    if s.trim() == "0" {
        return Ok(w);
    }
    for (sign, term) in split_top(s, &['+', '-'])? {
        if term.trim().is_empty() {
            if sign.is_none() {
                continue;
            }
            return Err(Error::Parse("empty term".into()));
        }
        let mut coef = RatFunc::one();
        let mut syms = Vec::new();
        for (_, factor) in split_top(&term, &['*'])? {
            let pieces = split_top(&factor, &['^'])?;
            let first = parse_symbol(ctx, &pieces[0].1);
            if first.is_some() {
                for (_, p) in &pieces {
                    syms.push(parse_symbol(ctx, p).ok_or_else(|| Error::Parse(format!("bad symbol {p:?}")))?);
                }
            } else {
                coef = coef.mul(&parse_ratfunc(&factor, &names_lookup(&ctx.names))?);
            }
        }
        if sign == Some('-') {
            coef = coef.neg();
        }
        let mut t = LogForm::zero(ctx);
        t.add_raw(syms, coef)?;
        w = w.add(&t)?;
    }
    Ok(w)
}

/// Defining jet `y = z_v * c * prod z_j^e_j` of a stratum branch, with the
/// extra factor a Laurent monomial in the other divisor variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub branch: u32,
    pub function: RatFunc,
    cofactor: Vec<(u32, i64)>,
}

impl Jet {
    pub fn new(ctx: &FormContext, stratum: &[u32], branch: u32, function: RatFunc) -> Result<Self> {
        let bad = |why: &str| Error::Invalid(format!("invalid jet for {}: {why}", ctx.name(branch)));
        let u = function.div(&RatFunc::var(branch)).map_err(|_| bad("zero"))?;
        let num = u.numerator();
        if num.num_terms() != 1 {
            return Err(bad("not a monomial multiple of the branch"));
        }
        let (m, _) = num.terms().next().expect("one term");
        let mut cofactor: BTreeMap<u32, i64> = m.pairs().iter().map(|&(v, e)| (v, e as i64)).collect();
        for (f, e) in u.denominator_factors() {
            let v = f.vars();
            if v.len() != 1 || *f != crate::poly::Poly::var(v[0]) {
                return Err(bad("denominator is not a monomial"));
            }
            *cofactor.entry(v[0]).or_default() -= *e as i64;
        }
        cofactor.retain(|_, e| *e != 0);
        for &v in cofactor.keys() {
            if !ctx.is_divisor(v) || stratum.contains(&v) {
                return Err(bad("the cofactor may only involve the other divisor branches"));
            }
        }
        Ok(Jet { branch, function, cofactor: cofactor.into_iter().collect() })
    }
}

/// Replace `dlog(z_i)` by `dlog(z_i) - dlog(y_i)` for each jet. The result
/// has no residue along the stratum branches.
pub fn regularize(w: &LogForm, jets: &[Jet]) -> Result<LogForm> {
    let ctx = &w.ctx;
    let mut images: BTreeMap<u32, LogForm> = BTreeMap::new();
    for j in jets {
        // dlog z - dlog y = -dlog(cofactor)
        let mut img = LogForm::zero(ctx);
        for &(v, e) in &j.cofactor {
            img = img.sub(&LogForm::dlog(ctx, v)?.scale(&RatFunc::constant(Q::from_int(e)))?)?;
        }
        images.insert(j.branch, img);
    }
    let mut out = LogForm::zero(ctx);
    for (s, c) in &w.terms {
        let mut acc = LogForm::function(ctx, c.clone())?;
        for x in s {
            let f = match x {
                Symbol::Dlog(v) if images.contains_key(v) => images[v].clone(),
                _ => {
                    let mut t = LogForm::zero(ctx);
                    t.add_raw(vec![*x], RatFunc::one())?;
                    t
                }
            };
            acc = acc.wedge(&f)?;
        }
        out = out.add(&acc)?;
    }
    Ok(out)
}

/// Restrict a form without poles along the stratum to the stratum chart.
pub fn restrict_to_stratum(w: &LogForm, stratum: &[u32]) -> Result<(FormContext, LogForm)> {
    let ctx = &w.ctx;
    let keep: Vec<u32> = (0..ctx.num_vars() as u32).filter(|v| !stratum.contains(v)).collect();
    let names: Vec<&str> = keep.iter().map(|&v| ctx.names[v as usize].as_str()).collect();
    let divisor: Vec<u32> =
        keep.iter().enumerate().filter(|(_, v)| ctx.is_divisor(**v)).map(|(i, _)| i as u32).collect();
    let target = FormContext::new(&names, &divisor)?;
    let images: Vec<RatFunc> = (0..ctx.num_vars() as u32)
        .map(|v| match keep.iter().position(|&k| k == v) {
            Some(i) => RatFunc::var(i as u32),
            None => RatFunc::zero(),
        })
        .collect();
    let mut out = LogForm::zero(&target);
    for (s, c) in &w.terms {
        if s.iter().any(|x| stratum.contains(&x.var())) {
            return Err(Error::Invalid("form still has a logarithmic pole along the stratum".into()));
        }
        let syms = s
            .iter()
            .map(|x| {
                let i = keep.iter().position(|&k| k == x.var()).expect("kept variable") as u32;
                match x {
                    Symbol::Dlog(_) => Symbol::Dlog(i),
                    Symbol::D(_) => Symbol::D(i),
                }
            })
            .collect();
        out.add_raw(syms, c.compose(&images)?)?;
    }
    Ok((target, out))
}

/// `w - sum Res(w) dlog y` restricted to the stratum cut out by the jets.
pub fn regularized_pullback(w: &LogForm, jets: &[Jet]) -> Result<(FormContext, LogForm)> {
    let stratum: Vec<u32> = jets.iter().map(|j| j.branch).collect();
    for &s in &stratum {
        if !w.ctx.is_divisor(s) {
            return Err(Error::Invalid(format!("{} is not a divisor branch", w.ctx.name(s))));
        }
    }
    restrict_to_stratum(&regularize(w, jets)?, &stratum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn ctx2() -> FormContext {
        FormContext::new(&["z1", "z2"], &[0]).unwrap()
    }

    fn f(ctx: &FormContext, s: &str) -> LogForm {
        LogForm::parse(ctx, s).unwrap()
    }

    #[test]
    fn wedge_rules() {
        let c = FormContext::new(&["z1", "z2", "z3"], &[0, 1]).unwrap();
        let dz3 = LogForm::dz(&c, 2);
        assert!(dz3.wedge(&dz3).unwrap().is_zero());
        let a = LogForm::dlog(&c, 0).unwrap().wedge(&LogForm::dlog(&c, 1).unwrap()).unwrap();
        let b = LogForm::dlog(&c, 1).unwrap().wedge(&LogForm::dlog(&c, 0).unwrap()).unwrap();
        assert_eq!(a, b.neg());
        let c = ctx2();
        let lhs = f(&c, "dlog(z1) * (z2)").wedge(&LogForm::dz(&c, 1)).unwrap();
        assert_eq!(lhs.to_string(), "dlog(z1)^dz2 * (z2)");
    }

    #[test]
    fn derivatives() {
        let c = ctx2();
        assert!(LogForm::dlog(&c, 0).unwrap().d().unwrap().is_zero());
        let c0 = FormContext::new(&["z1", "z2"], &[]).unwrap();
        let p = f(&c0, "(z1*z2)").d().unwrap();
        assert_eq!(p, f(&c0, "dz1 * (z2) + dz2 * (z1)"));
        let w = f(&c, "dlog(z1) * (z1)");
        assert_eq!(w, LogForm::dz(&c, 0));
        assert!(w.d().unwrap().is_zero());
    }

    #[test]
    fn residues() {
        let c = ctx2();
        assert_eq!(LogForm::dlog(&c, 0).unwrap().residue(0).unwrap(), LogForm::constant(&c, q(1)));
        let w = f(&c, "dlog(z1)^dz2 * (z2)");
        assert_eq!(w.residue(0).unwrap(), f(&c, "dz2 * (z2)"));
        assert!(LogForm::dz(&c, 1).residue(0).unwrap().is_zero());
        assert!(LogForm::parse(&c, "(1/z1)").is_err());
    }

    #[test]
    fn regularized_pullbacks() {
        let c = FormContext::new(&["z1", "z2"], &[0, 1]).unwrap();
        let jet = Jet::new(&c, &[0], 0, RatFunc::var(0).div(&RatFunc::var(1)).unwrap()).unwrap();
        let (y, p) = regularized_pullback(&LogForm::dlog(&c, 0).unwrap(), std::slice::from_ref(&jet)).unwrap();
        assert_eq!(p, LogForm::dlog(&y, 0).unwrap());
        let (y, p) = regularized_pullback(&LogForm::dz(&c, 1), std::slice::from_ref(&jet)).unwrap();
        assert_eq!(p, LogForm::dz(&y, 0));
        let dlog_y = LogForm::dlog_of(&c, &jet.function).unwrap();
        let (_, p) = regularized_pullback(&dlog_y, &[jet]).unwrap();
        assert!(p.is_zero());
        assert!(Jet::new(&c, &[0], 0, RatFunc::var(0).add(&RatFunc::var(1))).is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = ctx2();
        let w = f(&c, "dlog(z1)^dz2 * (z2/(1+z2)) - 3 * dlog(z1) + (z2^2)");
        let back = LogForm::parse(&c, &w.to_string()).unwrap();
        assert_eq!(back, w);
        assert_eq!(f(&c, "dz2^dlog(z1)"), f(&c, "dlog(z1)^dz2").neg());
    }

    #[test]
    fn pullback_along_coordinates() {
        // z1 = e * u on the chart (e, u) with divisor e
        let src = FormContext::new(&["z1"], &[0]).unwrap();
        let tgt = FormContext::new(&["e", "u"], &[0]).unwrap();
        let w = LogForm::dlog(&src, 0).unwrap();
        let p = w.pullback(&tgt, &[RatFunc::var(0).mul(&RatFunc::var(1))]).unwrap();
        assert_eq!(p, f(&tgt, "dlog(e) + du * (1/u)"));
    }
}
