//! Monomial models of log schemes and the maps between them.
//!
//! A [`LogModel`] is a chart: a ring `K[x_1..x_m]/J` with `J` a monomial
//! ideal, an affine monoid `M` of global sections and a structure map
//! `alpha: M -> ring` given on generators. A [`MonomialVirtualMap`] pulls
//! each target generator back to a monomial section `c * s^e` of the source,
//! where `e` splits into an exponent matrix and a unit factor supported on
//! divisor generators.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::parse_poly;
use crate::intmat;
use crate::monoid::{AffineMonoid, Membership};
use crate::poly::{Monomial, Poly};
use crate::scalar::Field;

/// A chart of a log scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLogModel", into = "RawLogModel", bound = "F: Field")]
pub struct LogModel<F: Field> {
    var_names: Vec<String>,
    ideal: Vec<Monomial>,
    monoid: AffineMonoid,
    gen_names: Vec<String>,
    alpha: Vec<Poly<F>>,
    divisor: Vec<u32>,
    units: Vec<usize>,
}

fn minimize_ideal(gens: Vec<Monomial>) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = Vec::new();
    let mut sorted = gens;
    sorted.sort_by_key(|m| m.degree());
    for g in sorted {
        if !out.iter().any(|h| h.divides(&g)) {
            out.push(g);
        }
    }
    out.sort();
    out
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

impl<F: Field> LogModel<F> {
    /// Build and check a chart. `alpha` is reduced modulo the ideal.
    pub fn new(
        var_names: Vec<String>,
        ideal: Vec<Monomial>,
        monoid: AffineMonoid,
        gen_names: Vec<String>,
        alpha: Vec<Poly<F>>,
        divisor: Vec<u32>,
    ) -> Result<Self> {
        let m = var_names.len() as u32;
        if BTreeSet::from_iter(&var_names).len() != var_names.len() {
            return Err(Error::Invalid("duplicate variable names".into()));
        }
        if BTreeSet::from_iter(&gen_names).len() != gen_names.len() {
            return Err(Error::Invalid("duplicate generator names".into()));
        }
        if gen_names.len() != monoid.num_generators() || alpha.len() != monoid.num_generators() {
            return Err(Error::Invalid("one name and one structure value are needed per generator".into()));
        }
        for g in &ideal {
            if g.is_one() {
                return Err(Error::Invalid("the ideal is the unit ideal".into()));
            }
            if g.max_var().is_some_and(|v| v >= m) {
                return Err(Error::Invalid("ideal uses an unknown variable".into()));
            }
        }
        let ideal = minimize_ideal(ideal);
        let alpha: Vec<Poly<F>> = alpha.iter().map(|a| a.reduce_monomial_ideal(&ideal)).collect();
        for a in &alpha {
            if a.vars().iter().any(|&v| v >= m) {
                return Err(Error::Invalid("structure map uses an unknown variable".into()));
            }
        }
        let mut divisor = divisor;
        divisor.sort_unstable();
        divisor.dedup();
        for &d in &divisor {
            if d >= m {
                return Err(Error::Invalid(format!("divisor variable {d} out of range")));
            }
            let xd = Poly::var(d).reduce_monomial_ideal(&ideal);
            if xd.is_zero() || !alpha.contains(&xd) {
                return Err(Error::Invalid(format!(
                    "divisor variable {} needs a generator mapping to it",
                    var_names[d as usize]
                )));
            }
        }
        let mut model = LogModel { var_names, ideal, monoid, gen_names, alpha, divisor, units: Vec::new() };
        for r in model.monoid.relations() {
            let (num, den) = model.alpha_of_exponents(&F::one(), &r);
            if num.sub(&den).reduce_monomial_ideal(&model.ideal).is_zero() {
                continue;
            }
            return Err(Error::Invalid(format!("structure map does not respect the relation {r:?}")));
        }
        model.units = (0..model.alpha.len()).filter(|&i| model.is_unit(&model.alpha[i])).collect();
        Ok(model)
    }

    /// The trivial log point `Spec K` with monoid `0`.
    pub fn trivial_point() -> Self {
        Self::new(vec![], vec![], AffineMonoid::trivial(), vec![], vec![], vec![]).expect("well formed")
    }

    /// Affine space with the trivial log structure.
    pub fn affine_space(var_names: &[&str]) -> Self {
        let vars = var_names.iter().map(|s| s.to_string()).collect();
        Self::new(vars, vec![], AffineMonoid::trivial(), vec![], vec![], vec![]).expect("well formed")
    }

    /// The standard log point: sections `K^x t^N` with `alpha(t) = 0`.
    pub fn log_point() -> Self {
        Self::new(
            vec!["t".into()],
            vec![Monomial::var(0)],
            AffineMonoid::free(1),
            vec!["t".into()],
            vec![Poly::var(0)],
            vec![],
        )
        .expect("well formed")
    }

    /// The log line `(A^1, {0})`: sections `K^x z^N`.
    pub fn log_line() -> Self {
        Self::divisorial(&["z"], &[0])
    }

    /// Affine space with the normal-crossing divisor given by the listed coordinates.
    pub fn divisorial(var_names: &[&str], divisor: &[u32]) -> Self {
        let k = divisor.len();
        Self::new(
            var_names.iter().map(|s| s.to_string()).collect(),
            vec![],
            AffineMonoid::free(k),
            divisor.iter().map(|&d| var_names[d as usize].to_string()).collect(),
            divisor.iter().map(|&d| Poly::var(d)).collect(),
            divisor.to_vec(),
        )
        .expect("well formed")
    }

    /// The fat log point `Spec K[e]/(e^2)` with `alpha(t) = e`.
    pub fn fat_point() -> Self {
        Self::new(
            vec!["e".into()],
            vec![Monomial::from_pairs([(0, 2)])],
            AffineMonoid::free(1),
            vec!["t".into()],
            vec![Poly::var(0)],
            vec![],
        )
        .expect("well formed")
    }

    /// The coordinate axes `xy = 0` with one section `w`, `alpha(w) = x - y`.
    pub fn coordinate_axes() -> Self {
        Self::new(
            vec!["x".into(), "y".into()],
            vec![Monomial::from_pairs([(0, 1), (1, 1)])],
            AffineMonoid::free(1),
            vec!["w".into()],
            vec![Poly::var(0).sub(&Poly::var(1))],
            vec![],
        )
        .expect("well formed")
    }

    /// `Spec(N^k -> K[N^k]/I)` for a monomial ideal `I` of `N^k`.
    /// Only free monoids have a polynomial coordinate ring here.
    pub fn monoid_algebra(monoid: &AffineMonoid, ideal: &[Vec<u32>]) -> Result<Self> {
        if !monoid.is_free() || monoid.num_generators() != monoid.ambient_rank() {
            return Err(Error::Unsupported("coordinate rings are only built for free monoids".into()));
        }
        let k = monoid.num_generators();
        // variables follow the generators, which form a basis
        let mut rows = monoid.generators().to_vec();
        let mut perm: Vec<usize> = (0..k).collect();
        perm.sort_by_key(|&i| rows[i].iter().position(|&x| x != 0));
        rows = perm.iter().map(|&i| rows[i].clone()).collect();
        if rows.iter().enumerate().any(|(i, r)| r.iter().enumerate().any(|(j, &x)| x != i64::from(i == j))) {
            return Err(Error::Unsupported("coordinate rings are only built for the standard basis".into()));
        }
        let gens = names("t", k);
        let ideal = ideal
            .iter()
            .map(|e| {
                if e.len() != k {
                    return Err(Error::Invalid("ideal exponent has the wrong length".into()));
                }
                Ok(Monomial::from_dense(e))
            })
            .collect::<Result<Vec<_>>>()?;
        let divisor: Vec<u32> = (0..k as u32).filter(|&v| !ideal.iter().any(|g| g.divides(&Monomial::var(v)))).collect();
        Self::new(
            gens.clone(),
            ideal,
            AffineMonoid::free(k),
            gens,
            (0..k as u32).map(Poly::var).collect(),
            divisor,
        )
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn ideal(&self) -> &[Monomial] {
        &self.ideal
    }

    pub fn monoid(&self) -> &AffineMonoid {
        &self.monoid
    }

    pub fn gen_names(&self) -> &[String] {
        &self.gen_names
    }

    pub fn num_gens(&self) -> usize {
        self.gen_names.len()
    }

    pub fn alpha(&self) -> &[Poly<F>] {
        &self.alpha
    }

    pub fn divisor(&self) -> &[u32] {
        &self.divisor
    }

    /// Generators whose structure value is a unit of the ring.
    pub fn unit_generators(&self) -> &[usize] {
        &self.units
    }

    /// Generators with `alpha = 0`.
    pub fn phantom_generators(&self) -> Vec<usize> {
        (0..self.alpha.len()).filter(|&i| self.alpha[i].is_zero()).collect()
    }

    /// Generator carrying the divisor branch `x_var`.
    pub fn divisor_generator(&self, var: u32) -> Option<usize> {
        let xv = Poly::var(var).reduce_monomial_ideal(&self.ideal);
        self.alpha.iter().position(|a| *a == xv)
    }

    pub fn var_index(&self, name: &str) -> Option<u32> {
        self.var_names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.gen_names.iter().position(|n| n == name)
    }

    pub fn reduce(&self, p: &Poly<F>) -> Poly<F> {
        p.reduce_monomial_ideal(&self.ideal)
    }

    fn is_nilpotent(&self, m: &Monomial) -> bool {
        let supp = m.support();
        self.ideal.iter().any(|g| g.support().iter().all(|v| supp.contains(v)))
    }

    /// Unit test in `K[x]/J`: nonzero constant plus nilpotents.
    pub fn is_unit(&self, p: &Poly<F>) -> bool {
        let p = self.reduce(p);
        !p.constant_term().is_zero() && p.terms().all(|(m, _)| m.is_one() || self.is_nilpotent(m))
    }

    /// `(num, den)` with `alpha(c * s^e) = num / den`.
    pub fn alpha_of_exponents(&self, c: &F, e: &[i64]) -> (Poly<F>, Poly<F>) {
        let mut num = Poly::constant(c.clone());
        let mut den = Poly::one();
        for (a, &k) in self.alpha.iter().zip(e) {
            if k > 0 {
                num = self.reduce(&num.mul(&a.pow(k as u32)));
            } else if k < 0 {
                den = self.reduce(&den.mul(&a.pow((-k) as u32)));
            }
        }
        (num, den)
    }

    /// Minimal primes of `J`, each as a sorted list of variables.
    pub fn minimal_primes(&self) -> Vec<Vec<u32>> {
        fn covers(ideal: &[Monomial], chosen: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            match ideal.iter().find(|g| !g.support().iter().any(|v| chosen.contains(v))) {
                None => {
                    let mut c = chosen.clone();
                    c.sort_unstable();
                    out.push(c);
                }
                Some(g) => {
                    for v in g.support() {
                        chosen.push(v);
                        covers(ideal, chosen, out);
                        chosen.pop();
                    }
                }
            }
        }
        let mut all = Vec::new();
        covers(&self.ideal, &mut Vec::new(), &mut all);
        all.sort();
        all.dedup();
        let minimal: Vec<Vec<u32>> = all
            .iter()
            .filter(|p| !all.iter().any(|q| q != *p && q.iter().all(|v| p.contains(v))))
            .cloned()
            .collect();
        minimal
    }

    /// The ring is a domain exactly when `J` is generated by variables.
    pub fn is_integral_domain(&self) -> bool {
        self.ideal.iter().all(|g| g.degree() == 1)
    }

    fn local_ideal(&self, prime: &[u32]) -> Vec<Monomial> {
        minimize_ideal(self.ideal.iter().map(|g| g.only(prime)).collect())
    }

    /// Is `p` zero in the localization at the minimal prime `prime`?
    pub fn is_zero_at(&self, p: &Poly<F>, prime: &[u32]) -> bool {
        let jp = self.local_ideal(prime);
        let mut parts: std::collections::BTreeMap<Monomial, Poly<F>> = Default::default();
        for (m, c) in p.terms() {
            let key = m.only(prime);
            if jp.iter().any(|g| g.divides(&key)) {
                continue;
            }
            let e = parts.entry(key).or_default();
            *e = e.add(&Poly::term(c.clone(), m.without(prime)));
        }
        parts.values().all(|q| q.is_zero())
    }

    /// Is `p` a unit in the localization at the minimal prime `prime`?
    pub fn is_unit_at(&self, p: &Poly<F>, prime: &[u32]) -> bool {
        !p.restrict_zero(prime).is_zero()
    }

    /// Human-readable description of the prime, e.g. `x = 0`.
    pub fn describe_prime(&self, prime: &[u32]) -> String {
        if prime.is_empty() {
            "generic point".into()
        } else {
            prime.iter().map(|&v| format!("{} = 0", self.var_names[v as usize])).collect::<Vec<_>>().join(", ")
        }
    }

    /// Description of the global sections, such as `K^x * t1^N * t2^N`.
    pub fn sections_summary(&self) -> String {
        let mut parts = vec!["K^x".to_string()];
        let non_units: Vec<usize> = (0..self.num_gens()).filter(|i| !self.units.contains(i)).collect();
        if self.monoid.is_free() {
            for i in non_units {
                let tag = if self.alpha[i].is_zero() { " (phantom)" } else { "" };
                parts.push(format!("{}^N{tag}", self.gen_names[i]));
            }
        } else {
            let gens: Vec<&str> = non_units.iter().map(|&i| self.gen_names[i].as_str()).collect();
            parts.push(format!("<{}>", gens.join(", ")));
        }
        parts.join(" * ")
    }

    /// Same chart up to the choice of names.
    pub fn same_structure(&self, other: &Self) -> bool {
        self.ideal == other.ideal
            && self.monoid == other.monoid
            && self.alpha == other.alpha
            && self.divisor == other.divisor
            && self.num_vars() == other.num_vars()
    }

    pub fn format_poly(&self, p: &Poly<F>) -> String {
        p.fmt_with(&|v| self.var_names.get(v as usize).cloned().unwrap_or_else(|| format!("?{v}")))
    }

    /// Evaluate the structure value of a generator at a point of the underlying scheme.
    pub fn evaluate_alpha(&self, gen: usize, point: &[F]) -> F {
        self.alpha[gen].eval(point)
    }

    /// Does the point lie on the underlying scheme?
    pub fn contains_point(&self, point: &[F]) -> bool {
        point.len() == self.num_vars() && self.ideal.iter().all(|g| Poly::term(F::one(), g.clone()).eval(point).is_zero())
    }
}

/// A monomial section `c * s_1^e_1 ... s_k^e_k` in the group completion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Field")]
pub struct MonomialSection<F: Field> {
    #[serde(with = "crate::scalar::field_text")]
    pub coefficient: F,
    pub exponents: Vec<i64>,
}

impl<F: Field> MonomialSection<F> {
    pub fn new(coefficient: F, exponents: Vec<i64>) -> Result<Self> {
        if coefficient.is_zero() {
            return Err(Error::Invalid("a monomial section needs a nonzero coefficient".into()));
        }
        Ok(MonomialSection { coefficient, exponents })
    }

    pub fn unit(n: usize) -> Self {
        MonomialSection { coefficient: F::one(), exponents: vec![0; n] }
    }

    pub fn mul(&self, o: &Self) -> Self {
        MonomialSection {
            coefficient: self.coefficient.mul(&o.coefficient),
            exponents: self.exponents.iter().zip(&o.exponents).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Virtual morphism between charts, written as a pullback of sections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMap", into = "RawMap", bound = "F: Field")]
pub struct MonomialVirtualMap<F: Field> {
    source: LogModel<F>,
    target: LogModel<F>,
    ring_map: Vec<Poly<F>>,
    exponents: Vec<Vec<i64>>,
    unit_factors: Vec<MonomialSection<F>>,
}

impl<F: Field> MonomialVirtualMap<F> {
    /// `ring_map[k]` is the pullback of target variable `k`; `exponents[i][j]`
    /// is the exponent of source generator `i` in the pullback of target
    /// generator `j`; `unit_factors[j]` may only involve divisor generators.
    pub fn new(
        source: LogModel<F>,
        target: LogModel<F>,
        ring_map: Vec<Poly<F>>,
        exponents: Vec<Vec<i64>>,
        unit_factors: Vec<MonomialSection<F>>,
    ) -> Result<Self> {
        let (ns, nt) = (source.num_gens(), target.num_gens());
        if ring_map.len() != target.num_vars() {
            return Err(Error::Invalid("the ring map needs one image per target variable".into()));
        }
        if exponents.len() != ns || exponents.iter().any(|r| r.len() != nt) {
            return Err(Error::Invalid(format!("exponent matrix must be {ns} x {nt}")));
        }
        if unit_factors.len() != nt {
            return Err(Error::Invalid("one unit factor is needed per target generator".into()));
        }
        let divisor_gens: Vec<usize> = source.divisor.iter().filter_map(|&d| source.divisor_generator(d)).collect();
        for (j, h) in unit_factors.iter().enumerate() {
            if h.coefficient.is_zero() {
                return Err(Error::Invalid(format!("unit factor of {} has zero coefficient", target.gen_names[j])));
            }
            if h.exponents.len() != ns {
                return Err(Error::Invalid("unit factor has the wrong length".into()));
            }
            if h.exponents.iter().enumerate().any(|(i, &e)| e != 0 && !divisor_gens.contains(&i)) {
                return Err(Error::Invalid(format!(
                    "unit factor of {} is not invertible off the divisor",
                    target.gen_names[j]
                )));
            }
        }
        let ring_map: Vec<Poly<F>> = ring_map.iter().map(|p| source.reduce(p)).collect();
        if ring_map.iter().any(|p| p.vars().iter().any(|&v| v as usize >= source.num_vars())) {
            return Err(Error::Invalid("ring map uses an unknown source variable".into()));
        }
        for g in &target.ideal {
            let img = source.reduce(&Poly::term(F::one(), g.clone()).compose(&ring_map));
            if !img.is_zero() {
                return Err(Error::Invalid("ring map does not kill the target ideal".into()));
            }
        }
        let map = MonomialVirtualMap { source, target, ring_map, exponents, unit_factors };
        for r in map.target.monoid.relations() {
            let mut acc = MonomialSection::unit(ns);
            let mut acc_inv = MonomialSection::unit(ns);
            for (j, &k) in r.iter().enumerate() {
                let s = map.pullback_generator(j);
                for _ in 0..k.unsigned_abs() {
                    if k > 0 {
                        acc = acc.mul(&s);
                    } else {
                        acc_inv = acc_inv.mul(&s);
                    }
                }
            }
            let same_vector = map.source.monoid.combine(&acc.exponents) == map.source.monoid.combine(&acc_inv.exponents);
            if !same_vector || acc.coefficient != acc_inv.coefficient {
                return Err(Error::Invalid(format!("section pullback does not respect the target relation {r:?}")));
            }
        }
        Ok(map)
    }

    pub fn identity(x: &LogModel<F>) -> Self {
        let n = x.num_gens();
        Self::new(
            x.clone(),
            x.clone(),
            (0..x.num_vars() as u32).map(Poly::var).collect(),
            (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect(),
            vec![MonomialSection::unit(n); n],
        )
        .expect("identity is well formed")
    }

    pub fn source(&self) -> &LogModel<F> {
        &self.source
    }

    pub fn target(&self) -> &LogModel<F> {
        &self.target
    }

    pub fn ring_map(&self) -> &[Poly<F>] {
        &self.ring_map
    }

    pub fn exponent_matrix(&self) -> &[Vec<i64>] {
        &self.exponents
    }

    pub fn unit_factors(&self) -> &[MonomialSection<F>] {
        &self.unit_factors
    }

    /// Pullback of target generator `j`, as a section of the source.
    pub fn pullback_generator(&self, j: usize) -> MonomialSection<F> {
        let h = &self.unit_factors[j];
        MonomialSection {
            coefficient: h.coefficient.clone(),
            exponents: (0..self.source.num_gens()).map(|i| self.exponents[i][j] + h.exponents[i]).collect(),
        }
    }

    /// Pullback of an arbitrary target section.
    pub fn pullback_section(&self, s: &MonomialSection<F>) -> Result<MonomialSection<F>> {
        let mut c = s.coefficient.clone();
        let mut e = vec![0i64; self.source.num_gens()];
        for (j, &k) in s.exponents.iter().enumerate() {
            let p = self.pullback_generator(j);
            c = c.mul(&p.coefficient.pow_i(k)?);
            for (x, y) in e.iter_mut().zip(&p.exponents) {
                *x += k * y;
            }
        }
        Ok(MonomialSection { coefficient: c, exponents: e })
    }

    /// Pullback of a target function along the underlying ring map.
    pub fn pullback_function(&self, p: &Poly<F>) -> Poly<F> {
        self.source.reduce(&p.compose(&self.ring_map))
    }

    /// Pullback along a log-point endomorphism `t -> c t^e`, as a scaling.
    pub fn as_scaling(&self) -> Option<MonomialScaling<F>> {
        if self.source.num_gens() != 1 || self.target.num_gens() != 1 {
            return None;
        }
        let s = self.pullback_generator(0);
        MonomialScaling::new(s.coefficient, s.exponents[0]).ok()
    }
}

/// Outcome of [`validate_virtual_map`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(String),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Unit compatibility: wherever the pulled-back function of a target
/// generator is invertible, the pulled-back section must be invertible with
/// the same value. Checked at the generic point of every component.
pub fn validate_virtual_map<F: Field>(m: &MonomialVirtualMap<F>) -> Validity {
    let x = &m.source;
    for prime in x.minimal_primes() {
        for j in 0..m.target.num_gens() {
            let h = m.pullback_function(&m.target.alpha[j]);
            if !x.is_unit_at(&h, &prime) {
                continue;
            }
            let s = m.pullback_generator(j);
            let name = &m.target.gen_names[j];
            let where_ = x.describe_prime(&prime);
            for (i, &e) in s.exponents.iter().enumerate() {
                if e != 0 && !x.is_unit_at(&x.alpha[i], &prime) {
                    return Validity::Invalid(format!(
                        "pullback of {name} involves {} which is not a unit at {where_}, though the pulled-back function is",
                        x.gen_names[i]
                    ));
                }
            }
            let (num, den) = x.alpha_of_exponents(&s.coefficient, &s.exponents);
            if !x.is_zero_at(&num.sub(&h.mul(&den)), &prime) {
                return Validity::Invalid(format!(
                    "pullback of {name} disagrees with the pulled-back function {} at {where_}",
                    x.format_poly(&h)
                ));
            }
        }
    }
    Validity::Valid
}

/// Ordinary morphism: every pulled-back generator is a section of the source
/// monoid, and the structure maps commute on the nose.
pub fn is_ordinary<F: Field>(m: &MonomialVirtualMap<F>) -> bool {
    let x = &m.source;
    (0..m.target.num_gens()).all(|j| {
        let s = m.pullback_generator(j);
        let v = x.monoid.combine(&s.exponents);
        let Membership::Member(coeffs) = x.monoid.membership(&v) else { return false };
        let coeffs: Vec<i64> = coeffs.iter().map(|&c| c as i64).collect();
        let (num, _) = x.alpha_of_exponents(&s.coefficient, &coeffs);
        num == m.pullback_function(&m.target.alpha[j])
    })
}

/// `g` after `f`: `(g o f)^* = f^* g^*`.
pub fn compose_maps<F: Field>(f: &MonomialVirtualMap<F>, g: &MonomialVirtualMap<F>) -> Result<MonomialVirtualMap<F>> {
    if !f.target.same_structure(&g.source) {
        return Err(Error::Mismatch("target of the first map is not the source of the second".into()));
    }
    let ring_map = g.ring_map.iter().map(|p| f.source.reduce(&p.compose(&f.ring_map))).collect();
    let (ns, nm, nt) = (f.source.num_gens(), f.target.num_gens(), g.target.num_gens());
    // total exponents of g, including its unit factors
    let eg: Vec<Vec<i64>> =
        (0..nm).map(|j| (0..nt).map(|k| g.exponents[j][k] + g.unit_factors[k].exponents[j]).collect()).collect();
    let exponents = (0..ns).map(|i| (0..nt).map(|k| (0..nm).map(|j| f.exponents[i][j] * eg[j][k]).sum()).collect()).collect();
    let mut unit_factors = Vec::with_capacity(nt);
    for k in 0..nt {
        let mut c = g.unit_factors[k].coefficient.clone();
        for j in 0..nm {
            c = c.mul(&f.unit_factors[j].coefficient.pow_i(eg[j][k])?);
        }
        let e = (0..ns).map(|i| (0..nm).map(|j| f.unit_factors[j].exponents[i] * eg[j][k]).sum()).collect();
        unit_factors.push(MonomialSection { coefficient: c, exponents: e });
    }
    MonomialVirtualMap::new(f.source.clone(), g.target.clone(), ring_map, exponents, unit_factors)
}

/// Composable scaling `lambda -> c * lambda^e` of a tangent line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Field")]
pub struct MonomialScaling<F: Field> {
    #[serde(with = "crate::scalar::field_text")]
    pub coefficient: F,
    pub exponent: i64,
}

impl<F: Field> MonomialScaling<F> {
    pub fn new(coefficient: F, exponent: i64) -> Result<Self> {
        if coefficient.is_zero() {
            return Err(Error::Invalid("scaling coefficient must be nonzero".into()));
        }
        if exponent != 1 && exponent != -1 {
            return Err(Error::Invalid("scaling exponent must be 1 or -1".into()));
        }
        Ok(MonomialScaling { coefficient, exponent })
    }

    pub fn identity() -> Self {
        MonomialScaling { coefficient: F::one(), exponent: 1 }
    }

    /// Inversion step `lambda -> c / lambda`.
    pub fn inversion(c: F) -> Result<Self> {
        Self::new(c, -1)
    }

    pub fn apply(&self, lambda: &F) -> Result<F> {
        Ok(self.coefficient.mul(&lambda.pow_i(self.exponent)?))
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Self {
        let c = other.coefficient.pow_i(self.exponent).expect("nonzero coefficient");
        MonomialScaling { coefficient: self.coefficient.mul(&c), exponent: self.exponent * other.exponent }
    }

    pub fn inverse(&self) -> Self {
        // c lambda^e = mu  =>  lambda = (mu / c)^e
        let ci = self.coefficient.inv().expect("nonzero coefficient").pow_i(self.exponent).expect("nonzero");
        MonomialScaling { coefficient: ci, exponent: self.exponent }
    }

    /// The log-point endomorphism `t -> c t^e`.
    pub fn to_map(&self) -> MonomialVirtualMap<F> {
        let p = LogModel::log_point();
        MonomialVirtualMap::new(
            p.clone(),
            p,
            vec![Poly::zero()],
            vec![vec![self.exponent]],
            vec![MonomialSection { coefficient: self.coefficient.clone(), exponents: vec![0] }],
        )
        .expect("log point endomorphism")
    }
}

/// Push the pre-log structure out along its units: generators whose
/// structure value is a nonzero constant are absorbed into `K^x`.
pub fn logify_sections<F: Field>(x: &LogModel<F>) -> Result<LogModel<F>> {
    let units = x.unit_generators();
    if units.is_empty() {
        return Ok(x.clone());
    }
    for &u in units {
        if !x.alpha[u].is_constant() {
            return Err(Error::Unsupported(format!(
                "generator {} maps to a non-constant unit; only constant units are absorbed",
                x.gen_names[u]
            )));
        }
    }
    let n = x.monoid.ambient_rank();
    let unit_rows: Vec<Vec<i64>> = units.iter().map(|&u| x.monoid.generators()[u].clone()).collect();
    let r = intmat::rank(&unit_rows, n);
    let (proj, _) = intmat::quotient_projection(&unit_rows, n);
    let mut gens: Vec<Vec<i64>> = Vec::new();
    let mut gen_names = Vec::new();
    let mut alpha = Vec::new();
    for i in 0..x.num_gens() {
        if units.contains(&i) {
            continue;
        }
        let v = intmat::apply_rows(&x.monoid.generators()[i], &proj, n - r);
        if v.iter().all(|&c| c == 0) || gens.contains(&v) {
            continue;
        }
        gens.push(v);
        gen_names.push(x.gen_names[i].clone());
        alpha.push(x.alpha[i].clone());
    }
    let monoid = AffineMonoid::new(n - r, gens)?;
    LogModel::new(x.var_names.clone(), x.ideal.clone(), monoid, gen_names, alpha, x.divisor.clone()).map_err(|e| {
        Error::Unsupported(format!("units are entangled with the other generators ({e}); the pushout needs a rescaled chart"))
    })
}

/// Restrict to the hyperplane `x_var = 0`, keep every section and logify.
pub fn pullback_to_hyperplane<F: Field>(x: &LogModel<F>, var: u32) -> Result<LogModel<F>> {
    if var as usize >= x.num_vars() {
        return Err(Error::Invalid(format!("variable {var} out of range")));
    }
    let mut ideal = x.ideal.clone();
    ideal.push(Monomial::var(var));
    let divisor: Vec<u32> = x.divisor.iter().copied().filter(|&d| d != var).collect();
    let pre = LogModel::new(x.var_names.clone(), ideal, x.monoid.clone(), x.gen_names.clone(), x.alpha.clone(), divisor)?;
    logify_sections(&pre)
}

/// Restrict to a declared divisor branch.
pub fn pullback_to_divisor<F: Field>(x: &LogModel<F>, branch: u32) -> Result<LogModel<F>> {
    if !x.divisor.contains(&branch) {
        return Err(Error::Invalid(format!("variable {branch} is not a divisor branch")));
    }
    pullback_to_hyperplane(x, branch)
}

/// The inclusion of the restricted chart, an ordinary map.
pub fn hyperplane_inclusion<F: Field>(x: &LogModel<F>, var: u32) -> Result<MonomialVirtualMap<F>> {
    let y = pullback_to_hyperplane(x, var)?;
    if y.num_gens() != x.num_gens() {
        return Err(Error::Unsupported("inclusion is only built when no generator is absorbed".into()));
    }
    let n = x.num_gens();
    MonomialVirtualMap::new(
        y,
        x.clone(),
        (0..x.num_vars() as u32).map(Poly::var).collect(),
        (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect(),
        vec![MonomialSection::unit(n); n],
    )
}

fn disambiguate(a: &[String], b: &[String]) -> (Vec<String>, Vec<String>) {
    let clash = a.iter().any(|n| b.contains(n));
    if clash {
        (a.iter().map(|n| format!("{n}1")).collect(), b.iter().map(|n| format!("{n}2")).collect())
    } else {
        (a.to_vec(), b.to_vec())
    }
}

/// Product over the trivial point: variables concatenate, monoids add.
pub fn product<F: Field>(x: &LogModel<F>, y: &LogModel<F>) -> LogModel<F> {
    let off = x.num_vars() as u32;
    let (vx, vy) = disambiguate(&x.var_names, &y.var_names);
    let (gx, gy) = disambiguate(&x.gen_names, &y.gen_names);
    let ideal = x
        .ideal
        .iter()
        .cloned()
        .chain(y.ideal.iter().map(|g| Monomial::from_pairs(g.pairs().iter().map(|&(v, e)| (v + off, e)))))
        .collect();
    let alpha = x.alpha.iter().cloned().chain(y.alpha.iter().map(|a| a.shift_vars(off))).collect();
    let divisor = x.divisor.iter().copied().chain(y.divisor.iter().map(|d| d + off)).collect();
    LogModel::new(
        [vx, vy].concat(),
        ideal,
        x.monoid.direct_sum(&y.monoid),
        [gx, gy].concat(),
        alpha,
        divisor,
    )
    .expect("product of well formed charts")
}

/// The two projections out of [`product`].
pub fn product_projections<F: Field>(
    x: &LogModel<F>,
    y: &LogModel<F>,
) -> (MonomialVirtualMap<F>, MonomialVirtualMap<F>) {
    let p = product(x, y);
    let (nx, ny) = (x.num_gens(), y.num_gens());
    let off = x.num_vars() as u32;
    let px = MonomialVirtualMap::new(
        p.clone(),
        x.clone(),
        (0..off).map(Poly::var).collect(),
        (0..nx + ny).map(|i| (0..nx).map(|j| i64::from(i == j)).collect()).collect(),
        vec![MonomialSection::unit(nx + ny); nx],
    )
    .expect("first projection");
    let py = MonomialVirtualMap::new(
        p,
        y.clone(),
        (0..y.num_vars() as u32).map(|v| Poly::var(v + off)).collect(),
        (0..nx + ny).map(|i| (0..ny).map(|j| i64::from(i == j + nx)).collect()).collect(),
        vec![MonomialSection::unit(nx + ny); ny],
    )
    .expect("second projection");
    (px, py)
}

/// Which side of the continuity dichotomy a generator falls on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", content = "detail", rename_all = "snake_case")]
pub enum Branch {
    /// The pulled-back function vanishes.
    Zero,
    /// The pulled-back function is a unit and the values agree.
    Unit,
    /// Neither zero nor a unit, but the values still agree.
    Agree,
    Violation(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorOutcome {
    pub generator: String,
    #[serde(flatten)]
    pub branch: Branch,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentReport {
    pub component: String,
    pub outcomes: Vec<GeneratorOutcome>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuityReport {
    /// The source ring is a domain, so the dichotomy is predicted to hold.
    pub applicable: bool,
    pub components: Vec<ComponentReport>,
}

impl ContinuityReport {
    pub fn violations(&self) -> Vec<(&str, &str, &str)> {
        self.components
            .iter()
            .flat_map(|c| {
                c.outcomes.iter().filter_map(move |o| match &o.branch {
                    Branch::Violation(r) => Some((c.component.as_str(), o.generator.as_str(), r.as_str())),
                    _ => None,
                })
            })
            .collect()
    }

    pub fn passes(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn branch(&self, component: &str, generator: &str) -> Option<&Branch> {
        let c = self.components.iter().find(|c| c.component == component)?;
        c.outcomes.iter().find(|o| o.generator == generator).map(|o| &o.branch)
    }
}

/// Evaluate the continuity dichotomy at the generic point of every component.
pub fn continuity_check<F: Field>(m: &MonomialVirtualMap<F>) -> ContinuityReport {
    let x = &m.source;
    let components = x
        .minimal_primes()
        .iter()
        .map(|prime| {
            let outcomes = (0..m.target.num_gens())
                .map(|j| {
                    let h = m.pullback_function(&m.target.alpha[j]);
                    let s = m.pullback_generator(j);
                    let branch = if x.is_zero_at(&h, prime) {
                        Branch::Zero
                    } else if s.exponents.iter().enumerate().any(|(i, &e)| e < 0 && !x.is_unit_at(&x.alpha[i], prime)) {
                        Branch::Violation("the pulled-back section is not regular here".into())
                    } else {
                        let (num, den) = x.alpha_of_exponents(&s.coefficient, &s.exponents);
                        let agree = x.is_zero_at(&num.sub(&h.mul(&den)), prime);
                        match (x.is_unit_at(&h, prime), agree) {
                            (true, true) => Branch::Unit,
                            (false, true) => Branch::Agree,
                            (true, false) => Branch::Violation("unit, but the values differ".into()),
                            (false, false) => Branch::Violation(format!(
                                "pulled-back function {} is neither zero nor a unit and differs from the structure value",
                                x.format_poly(&h)
                            )),
                        }
                    };
                    GeneratorOutcome { generator: m.target.gen_names[j].clone(), branch }
                })
                .collect();
            ComponentReport { component: x.describe_prime(prime), outcomes }
        })
        .collect();
    ContinuityReport { applicable: x.is_integral_domain(), components }
}

#[derive(Serialize, Deserialize)]
struct RawLogModel {
    variables: Vec<String>,
    #[serde(default)]
    ideal: Vec<String>,
    monoid: AffineMonoid,
    generators: Vec<String>,
    alpha: Vec<String>,
    #[serde(default)]
    divisor: Vec<String>,
}

impl<F: Field> TryFrom<RawLogModel> for LogModel<F> {
    type Error = Error;

    fn try_from(r: RawLogModel) -> Result<Self> {
        let mut ideal = Vec::new();
        for s in &r.ideal {
            let p: Poly<F> = parse_poly(s, &r.variables)?;
            match p.terms().next() {
                Some((m, _)) if p.num_terms() == 1 => ideal.push(m.clone()),
                _ => return Err(Error::Parse(format!("ideal generator {s:?} is not a monomial"))),
            };
        }
        let alpha = r.alpha.iter().map(|s| parse_poly(s, &r.variables)).collect::<Result<Vec<_>>>()?;
        let divisor = r
            .divisor
            .iter()
            .map(|d| {
                r.variables
                    .iter()
                    .position(|v| v == d)
                    .map(|i| i as u32)
                    .ok_or_else(|| Error::Invalid(format!("unknown divisor variable {d:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        LogModel::new(r.variables, ideal, r.monoid, r.generators, alpha, divisor)
    }
}

impl<F: Field> From<LogModel<F>> for RawLogModel {
    fn from(m: LogModel<F>) -> Self {
        RawLogModel {
            ideal: m.ideal.iter().map(|g| m.format_poly(&Poly::term(F::one(), g.clone()))).collect(),
            alpha: m.alpha.iter().map(|a| m.format_poly(a)).collect(),
            divisor: m.divisor.iter().map(|&d| m.var_names[d as usize].clone()).collect(),
            variables: m.var_names,
            monoid: m.monoid,
            generators: m.gen_names,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawSection {
    coefficient: String,
    exponents: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct RawMap {
    source: RawLogModel,
    target: RawLogModel,
    ring_map: Vec<String>,
    exponent_matrix: Vec<Vec<i64>>,
    unit_factors: Vec<RawSection>,
}

impl<F: Field> TryFrom<RawMap> for MonomialVirtualMap<F> {
    type Error = Error;

    fn try_from(r: RawMap) -> Result<Self> {
        let ring_map = r.ring_map.iter().map(|s| parse_poly(s, &r.source.variables)).collect::<Result<Vec<_>>>()?;
        let units = r
            .unit_factors
            .iter()
            .map(|u| MonomialSection::new(F::parse_text(&u.coefficient)?, u.exponents.clone()))
            .collect::<Result<Vec<_>>>()?;
        let source = LogModel::try_from(r.source)?;
        let target = LogModel::try_from(r.target)?;
        MonomialVirtualMap::new(source, target, ring_map, r.exponent_matrix, units)
    }
}

impl<F: Field> From<MonomialVirtualMap<F>> for RawMap {
    fn from(m: MonomialVirtualMap<F>) -> Self {
        RawMap {
            ring_map: m.ring_map.iter().map(|p| m.source.format_poly(p)).collect(),
            exponent_matrix: m.exponents,
            unit_factors: m
                .unit_factors
                .iter()
                .map(|u| RawSection { coefficient: u.coefficient.to_text(), exponents: u.exponents.clone() })
                .collect(),
            source: m.source.into(),
            target: m.target.into(),
        }
    }
}

/// The fat-point endomorphism `e -> a e`, `t -> b t`.
pub fn fat_point_endomorphism<F: Field>(a: F, b: F) -> Result<MonomialVirtualMap<F>> {
    let x = LogModel::fat_point();
    MonomialVirtualMap::new(x.clone(), x, vec![Poly::var(0).scale(&a)], vec![vec![1]], vec![MonomialSection::new(b, vec![0])?])
}

/// The map from the coordinate axes to the log line with `z -> x`, `z -> w`.
pub fn coordinate_axes_map<F: Field>() -> MonomialVirtualMap<F> {
    MonomialVirtualMap::new(
        LogModel::coordinate_axes(),
        LogModel::log_line(),
        vec![Poly::var(0)],
        vec![vec![1]],
        vec![MonomialSection::unit(1)],
    )
    .expect("coordinate axes map")
}
