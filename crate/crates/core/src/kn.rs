//! Kato–Nakayama points of monomial log models over the rationals: a point
//! with a sign (the argument) and a positive magnitude for every generator.

use std::collections::BTreeSet;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat;
use crate::logmodel::{LogModel, MonomialVirtualMap};
use crate::scalar::{Field, Ring, Q};
use crate::tangential::{check_virtual_point, enumerate_unit_points, Chart, VirtualPoint};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Arg {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Arg {
    pub fn of(x: &Q) -> Self {
        if x.is_negative() {
            Arg::Minus
        } else {
            Arg::Plus
        }
    }

    pub fn as_q(&self) -> Q {
        match self {
            Arg::Plus => Q::one(),
            Arg::Minus => Q::one().neg(),
        }
    }

    fn mul(&self, o: &Arg) -> Arg {
        if self == o {
            Arg::Plus
        } else {
            Arg::Minus
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KnPoint {
    #[serde(with = "q_vec")]
    pub point: Vec<Q>,
    pub arg: Vec<Arg>,
    #[serde(with = "q_vec")]
    pub mag: Vec<Q>,
}

mod q_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::scalar::{Field, Q};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_text()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| Q::parse_text(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// Polar decomposition of the generator values.
pub fn to_kn_point(x: &LogModel<Q>, v: &VirtualPoint<Q>) -> Result<KnPoint> {
    check_virtual_point(x, v)?;
    Ok(KnPoint {
        point: v.point.clone(),
        arg: v.values.iter().map(Arg::of).collect(),
        mag: v.values.iter().map(|c| c.abs()).collect(),
    })
}

/// Multiply argument and magnitude back together.
pub fn from_kn_point(x: &LogModel<Q>, k: &KnPoint) -> Result<VirtualPoint<Q>> {
    if k.arg.len() != x.num_gens() || k.mag.len() != x.num_gens() {
        return Err(Error::Invalid("one argument and magnitude are needed per generator".into()));
    }
    if k.mag.iter().any(|m| !m.is_positive()) {
        return Err(Error::Invalid("magnitudes must be positive".into()));
    }
    let v = VirtualPoint { point: k.point.clone(), values: k.arg.iter().zip(&k.mag).map(|(a, m)| a.as_q().mul(m)).collect() };
    check_virtual_point(x, &v)?;
    Ok(v)
}

/// Rank of `M^gp` modulo the sections invertible at the point: the number
/// of independent positive rescalings of a KN point over it.
pub fn fibre_rank(x: &LogModel<Q>, point: &[Q]) -> Result<usize> {
    if !x.contains_point(point) {
        return Err(Error::Invalid("the point does not lie on the chart".into()));
    }
    let gens = x.monoid().generators();
    let units: Vec<Vec<i64>> =
        (0..x.num_gens()).filter(|&g| !x.evaluate_alpha(g, point).is_zero()).map(|g| gens[g].clone()).collect();
    let amb = x.monoid().ambient_rank();
    Ok(x.monoid().rank() - intmat::rank(&units, amb))
}

/// Image of a KN point under a virtual map: the point moves along the ring
/// map, arguments and magnitudes along the monomial pullback.
pub fn kn_map(m: &MonomialVirtualMap<Q>, k: &KnPoint) -> Result<KnPoint> {
    let src = m.source();
    if k.arg.len() != src.num_gens() {
        return Err(Error::Mismatch("KN point does not live on the source".into()));
    }
    let point = m.ring_map().iter().map(|p| p.eval(&k.point)).collect();
    let mut arg = Vec::new();
    let mut mag = Vec::new();
    for j in 0..m.target().num_gens() {
        let s = m.pullback_generator(j);
        let mut a = Arg::of(&s.coefficient);
        let mut r = s.coefficient.abs();
        for (i, &e) in s.exponents.iter().enumerate() {
            if e % 2 != 0 {
                a = a.mul(&k.arg[i]);
            }
            r = r.mul(&k.mag[i].pow_i(e)?);
        }
        arg.push(a);
        mag.push(r);
    }
    Ok(KnPoint { point, arg, mag })
}

/// Sign characters of `M^gp` over a point extending the signs of the
/// generators that are invertible there, which must be integral units.
pub fn integral_kn_points(x: &LogModel<Q>, point: &[Q]) -> Result<Vec<KnPoint>> {
    if !x.contains_point(point) {
        return Err(Error::Invalid("the point does not lie on the chart".into()));
    }
    let n = x.num_gens();
    let mut forced: Vec<Option<Arg>> = Vec::with_capacity(n);
    for g in 0..n {
        let a = x.evaluate_alpha(g, point);
        if a.is_zero() {
            forced.push(None);
        } else if a.abs() == Q::one() {
            forced.push(Some(Arg::of(&a)));
        } else {
            return Ok(vec![]);
        }
    }
    let relations = x.monoid().relations();
    let mut out = Vec::new();
    for mask in 0u64..1 << n {
        let arg: Vec<Arg> = (0..n).map(|g| if mask >> g & 1 == 1 { Arg::Minus } else { Arg::Plus }).collect();
        if forced.iter().zip(&arg).any(|(f, a)| f.as_ref().is_some_and(|f| f != a)) {
            continue;
        }
        let character = relations.iter().all(|r| r.iter().zip(&arg).filter(|(k, a)| *k % 2 != 0 && **a == Arg::Minus).count() % 2 == 0);
        if character {
            out.push(KnPoint { point: point.to_vec(), arg, mag: vec![Q::one(); n] });
        }
    }
    Ok(out)
}

/// Outcome of comparing `X(Z)` with `KN_Z(X)` on one chart.
#[derive(Clone, Debug, PartialEq)]
pub struct BijectionReport {
    pub label: String,
    pub integral_points: usize,
    pub kn_points: usize,
    pub injective: bool,
    pub surjective: bool,
}

impl BijectionReport {
    pub fn is_bijection(&self) -> bool {
        self.injective && self.surjective
    }
}

/// Check that `X(Z) -> KN_Z(X)` is a bijection on every chart of a cover.
pub fn z_points_to_kn(charts: &[Chart<Q>]) -> Result<Vec<BijectionReport>> {
    let units = [Q::one(), Q::one().neg()];
    let mut out = Vec::new();
    for c in charts {
        let mut images = Vec::new();
        let mut kn = BTreeSet::new();
        let mut count = 0;
        for p in &c.points {
            for vp in enumerate_unit_points(&c.model, p, &units)? {
                images.push(to_kn_point(&c.model, &vp)?);
                count += 1;
            }
            kn.extend(integral_kn_points(&c.model, p)?);
        }
        let distinct: BTreeSet<KnPoint> = images.iter().cloned().collect();
        out.push(BijectionReport {
            label: c.label.clone(),
            integral_points: count,
            kn_points: kn.len(),
            injective: distinct.len() == images.len(),
            surjective: distinct == kn,
        });
    }
    Ok(out)
}
