//! Parser for rational-function expressions such as `z2/(1+z2)` or `(3*g)/(2-g)^2`.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ratfunc::RatFunc;
use crate::scalar::{Field, Ring, Q};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(text.parse().map_err(|_| Error::Parse(text.clone()))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    lookup: &'a dyn Fn(&str) -> Option<u32>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                acc = acc.div(&d)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc> {
        if self.eat('-') {
            Ok(self.unary()?.neg())
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: i64 = n.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
                    base.pow_i(if neg { -e } else { e })
                }
                _ => Err(Error::Parse("expected integer exponent".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<RatFunc> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(RatFunc::constant(Q::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let v = (self.lookup)(&name).ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
                Ok(RatFunc::var(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse a rational-function expression; `lookup` maps variable names to indices.
pub fn parse_ratfunc(s: &str, lookup: &dyn Fn(&str) -> Option<u32>) -> Result<RatFunc> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, lookup };
    let r = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in {s:?}")));
    }
    Ok(r)
}

/// Inverse of [`crate::poly::default_name`].
pub fn default_var_index(name: &str) -> Option<u32> {
    if name == "g" {
        Some(0)
    } else {
        name.strip_prefix('x')?.parse().ok().filter(|&k: &u32| k > 0)
    }
}

/// Lookup over an explicit list of names.
pub fn names_lookup(names: &[String]) -> impl Fn(&str) -> Option<u32> + '_ {
    move |n| names.iter().position(|m| m == n).map(|i| i as u32)
}

/// Parse a polynomial with rational coefficients into any field.
pub fn parse_poly<F: crate::scalar::Field>(s: &str, names: &[String]) -> Result<crate::poly::Poly<F>> {
    let r = parse_ratfunc(s, &names_lookup(names))?;
    let p = r.as_polynomial().ok_or_else(|| Error::Parse(format!("{s:?} is not a polynomial")))?;
    Ok(crate::poly::Poly::from_terms(p.terms().map(|(m, c)| (m.clone(), F::from_q(c)))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn parses_precedence() {
        let names = vec!["z1".to_string(), "z2".to_string()];
        let r = parse_ratfunc("z2/(1+z2) - 2*z1^2", &names_lookup(&names)).unwrap();
        let z1 = RatFunc::var(0);
        let z2 = RatFunc::var(1);
        let expected = z2
            .div(&RatFunc::constant(q(1)).add(&z2))
            .unwrap()
            .sub(&z1.mul(&z1).mul(&RatFunc::constant(q(2))));
        assert_eq!(r, expected);
    }

    #[test]
    fn rejects_garbage() {
        let names: Vec<String> = vec![];
        assert!(parse_ratfunc("1/(2-2)", &names_lookup(&names)).is_err());
        assert!(parse_ratfunc("(1", &names_lookup(&names)).is_err());
        assert!(parse_ratfunc("y", &names_lookup(&names)).is_err());
        assert_eq!(parse_ratfunc("2^-1", &names_lookup(&names)).unwrap(), RatFunc::constant(crate::scalar::qf(1, 2)));
    }
}
