//! Tangential basepoints on normal-crossing charts, seen as virtual points.
//!
//! A virtual point of a chart is a point of the underlying scheme together
//! with a value in `K^x` for every monoid generator, agreeing with the
//! structure map wherever that is invertible and respecting the relations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logmodel::{
    hyperplane_inclusion, pullback_to_divisor, LogModel, MonomialSection, MonomialVirtualMap,
};
use crate::poly::Poly;
use crate::scalar::Field;

/// A point on a divisorial chart plus a nonzero normal vector per branch through it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Field")]
pub struct TangentialBasepoint<F: Field> {
    #[serde(with = "field_vec")]
    pub point: Vec<F>,
    pub branches: Vec<u32>,
    #[serde(with = "field_vec")]
    pub vector: Vec<F>,
}

/// A point plus a value for every chart generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Field")]
pub struct VirtualPoint<F: Field> {
    #[serde(with = "field_vec")]
    pub point: Vec<F>,
    #[serde(with = "field_vec")]
    pub values: Vec<F>,
}

mod field_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::scalar::Field;

    pub fn serialize<F: Field, S: Serializer>(v: &[F], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_text()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, F: Field, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<F>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| F::parse_text(s).map_err(serde::de::Error::custom)).collect()
    }
}

impl<F: Field> TangentialBasepoint<F> {
    pub fn new(point: Vec<F>, branches: Vec<u32>, vector: Vec<F>) -> Result<Self> {
        if branches.len() != vector.len() {
            return Err(Error::Invalid("one vector component is needed per branch".into()));
        }
        if vector.iter().any(|v| v.is_zero()) {
            return Err(Error::Invalid("normal vector components must be nonzero".into()));
        }
        Ok(TangentialBasepoint { point, branches, vector })
    }

    /// JSON in the `{"point": [...], "vector": {"z1": "2"}}` layout.
    pub fn to_named_json(&self, x: &LogModel<F>) -> serde_json::Value {
        let vector: serde_json::Map<String, serde_json::Value> = self
            .branches
            .iter()
            .zip(&self.vector)
            .map(|(&b, v)| (x.var_names()[b as usize].clone(), v.to_text().into()))
            .collect();
        serde_json::json!({
            "point": self.point.iter().map(|p| p.to_text()).collect::<Vec<_>>(),
            "vector": vector,
        })
    }

    pub fn from_named_json(x: &LogModel<F>, v: &serde_json::Value) -> Result<Self> {
        let bad = || Error::Parse("expected {\"point\": [...], \"vector\": {...}}".into());
        let point = v["point"]
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|p| match p {
                serde_json::Value::String(s) => F::parse_text(s),
                serde_json::Value::Number(n) => F::parse_text(&n.to_string()),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        let mut branches = Vec::new();
        let mut vector = Vec::new();
        for (name, val) in v["vector"].as_object().ok_or_else(bad)? {
            let b = x.var_index(name).ok_or_else(|| Error::Invalid(format!("unknown branch {name:?}")))?;
            branches.push(b);
            vector.push(match val {
                serde_json::Value::String(s) => F::parse_text(s)?,
                serde_json::Value::Number(n) => F::parse_text(&n.to_string())?,
                _ => return Err(bad()),
            });
        }
        let mut order: Vec<usize> = (0..branches.len()).collect();
        order.sort_by_key(|&i| branches[i]);
        Self::new(point, order.iter().map(|&i| branches[i]).collect(), order.iter().map(|&i| vector[i].clone()).collect())
    }
}

fn check_basepoint<F: Field>(x: &LogModel<F>, b: &TangentialBasepoint<F>) -> Result<()> {
    if b.point.len() != x.num_vars() {
        return Err(Error::Invalid("point has the wrong dimension".into()));
    }
    for &d in x.divisor() {
        let on = b.point[d as usize].is_zero();
        if on != b.branches.contains(&d) {
            return Err(Error::Invalid(format!(
                "the point {} on branch {} but the basepoint says otherwise",
                if on { "lies" } else { "does not lie" },
                x.var_names()[d as usize]
            )));
        }
    }
    if b.branches.iter().any(|br| !x.divisor().contains(br)) {
        return Err(Error::Invalid("basepoint names a variable that is not a divisor branch".into()));
    }
    Ok(())
}

/// `z_i -> v_i` on the branches through the point, evaluation elsewhere.
pub fn basepoint_to_virtual<F: Field>(x: &LogModel<F>, b: &TangentialBasepoint<F>) -> Result<VirtualPoint<F>> {
    check_basepoint(x, b)?;
    let mut values = Vec::with_capacity(x.num_gens());
    for g in 0..x.num_gens() {
        let branch = b.branches.iter().position(|&d| x.divisor_generator(d) == Some(g));
        values.push(match branch {
            Some(k) => b.vector[k].clone(),
            None => x.evaluate_alpha(g, &b.point),
        });
    }
    let vp = VirtualPoint { point: b.point.clone(), values };
    check_virtual_point(x, &vp)?;
    Ok(vp)
}

/// Inverse of [`basepoint_to_virtual`].
pub fn virtual_to_basepoint<F: Field>(x: &LogModel<F>, p: &VirtualPoint<F>) -> Result<TangentialBasepoint<F>> {
    check_virtual_point(x, p)?;
    let branches: Vec<u32> = x.divisor().iter().copied().filter(|&d| p.point[d as usize].is_zero()).collect();
    let vector = branches
        .iter()
        .map(|&d| p.values[x.divisor_generator(d).expect("divisor branch has a generator")].clone())
        .collect();
    TangentialBasepoint::new(p.point.clone(), branches, vector)
}

/// Checks a virtual point: it lies on the scheme, its values are nonzero,
/// agree with the structure map where that is invertible, and satisfy the
/// monoid relations.
pub fn check_virtual_point<F: Field>(x: &LogModel<F>, p: &VirtualPoint<F>) -> Result<()> {
    if !x.contains_point(&p.point) {
        return Err(Error::Invalid("the point does not lie on the chart".into()));
    }
    if p.values.len() != x.num_gens() {
        return Err(Error::Invalid("one value is needed per generator".into()));
    }
    for (g, v) in p.values.iter().enumerate() {
        if v.is_zero() {
            return Err(Error::Invalid(format!("value of {} is zero", x.gen_names()[g])));
        }
        let a = x.evaluate_alpha(g, &p.point);
        if !a.is_zero() && a != *v {
            return Err(Error::Invalid(format!("value of {} differs from its evaluation", x.gen_names()[g])));
        }
    }
    if !relations_hold(x, &p.values) {
        return Err(Error::Invalid("values violate a monoid relation".into()));
    }
    Ok(())
}

fn relations_hold<F: Field>(x: &LogModel<F>, values: &[F]) -> bool {
    x.monoid().relations().iter().all(|r| {
        let mut lhs = F::one();
        let mut rhs = F::one();
        for (v, &k) in values.iter().zip(r) {
            if k > 0 {
                lhs = lhs.mul(&v.pow_u(k as u64));
            } else if k < 0 {
                rhs = rhs.mul(&v.pow_u((-k) as u64));
            }
        }
        lhs == rhs
    })
}

impl<F: Field> VirtualPoint<F> {
    /// The virtual morphism from the trivial point.
    pub fn to_map(&self, x: &LogModel<F>) -> Result<MonomialVirtualMap<F>> {
        check_virtual_point(x, self)?;
        MonomialVirtualMap::new(
            LogModel::trivial_point(),
            x.clone(),
            self.point.iter().map(|c| Poly::constant(c.clone())).collect(),
            vec![],
            self.values.iter().map(|v| MonomialSection::new(v.clone(), vec![])).collect::<Result<_>>()?,
        )
    }

    pub fn from_map(m: &MonomialVirtualMap<F>) -> Result<Self> {
        if m.source().num_vars() != 0 || m.source().num_gens() != 0 {
            return Err(Error::Invalid("a virtual point is a map out of the trivial point".into()));
        }
        Ok(VirtualPoint {
            point: m.ring_map().iter().map(|p| p.constant_term()).collect(),
            values: m.unit_factors().iter().map(|s| s.coefficient.clone()).collect(),
        })
    }
}

/// All virtual points over `point` whose free values are drawn from `units`.
/// Generators that do not vanish at the point are pinned to their values,
/// which must themselves be among `units`.
pub fn enumerate_unit_points<F: Field>(x: &LogModel<F>, point: &[F], units: &[F]) -> Result<Vec<VirtualPoint<F>>> {
    if !x.contains_point(point) {
        return Err(Error::Invalid("the point does not lie on the chart".into()));
    }
    let mut choices: Vec<Vec<F>> = Vec::with_capacity(x.num_gens());
    for g in 0..x.num_gens() {
        let a = x.evaluate_alpha(g, point);
        if a.is_zero() {
            choices.push(units.to_vec());
        } else if units.contains(&a) {
            choices.push(vec![a]);
        } else {
            return Ok(vec![]);
        }
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; choices.len()];
    if choices.iter().any(|c| c.is_empty()) {
        return Ok(out);
    }
    loop {
        let values: Vec<F> = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
        if relations_hold(x, &values) {
            out.push(VirtualPoint { point: point.to_vec(), values });
        }
        // odometer
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// The units `{1, -1}`.
pub fn signs<F: Field>() -> Vec<F> {
    vec![F::one(), F::one().neg()]
}

/// One chart of a cover together with the points it is responsible for.
#[derive(Clone, Debug)]
pub struct Chart<F: Field> {
    pub label: String,
    pub model: LogModel<F>,
    pub points: Vec<Vec<F>>,
}

/// `P^1` with the divisor `{0, 1, oo}`: the chart `z` covers the finite
/// points, the chart `w = 1/z` only the point at infinity. Candidate points
/// are those where every generator takes a value in `{0} u units`.
pub fn p1_three_points<F: Field>(units: &[F]) -> Vec<Chart<F>> {
    let z = Poly::<F>::var(0);
    let one = Poly::<F>::one();
    let finite = LogModel::new(
        vec!["z".into()],
        vec![],
        crate::monoid::AffineMonoid::free(2),
        vec!["z".into(), "z-1".into()],
        vec![z.clone(), z.sub(&one)],
        vec![0],
    )
    .expect("finite chart");
    let infinite = LogModel::new(
        vec!["w".into()],
        vec![],
        crate::monoid::AffineMonoid::free(2),
        vec!["w".into(), "1-w".into()],
        vec![z.clone(), one.sub(&z)],
        vec![0],
    )
    .expect("chart at infinity");
    let mut finite_points: Vec<Vec<F>> = vec![vec![F::zero()]];
    for u in units {
        if !finite_points.contains(&vec![u.clone()]) {
            finite_points.push(vec![u.clone()]);
        }
    }
    vec![
        Chart { label: "z".into(), model: finite, points: finite_points },
        Chart { label: "w = 1/z".into(), model: infinite, points: vec![vec![F::zero()]] },
    ]
}

/// Integral (unit-valued) virtual points over every chart of a cover.
pub fn enumerate_cover<F: Field>(charts: &[Chart<F>], units: &[F]) -> Result<Vec<(String, VirtualPoint<F>)>> {
    let mut out = Vec::new();
    for c in charts {
        for p in &c.points {
            for vp in enumerate_unit_points(&c.model, p, units)? {
                out.push((c.label.clone(), vp));
            }
        }
    }
    Ok(out)
}

/// A chart with no coordinates and every generator a phantom: the virtual
/// points are the homomorphisms `M^gp -> K^x`.
pub fn phantom_point<F: Field>(monoid: crate::monoid::AffineMonoid, gen_names: &[&str]) -> Result<LogModel<F>> {
    let n = monoid.num_generators();
    LogModel::new(vec![], vec![], monoid, gen_names.iter().map(|s| s.to_string()).collect(), vec![Poly::zero(); n], vec![])
}

/// The cone point `uv = w^2` at the origin.
pub fn quadric_cone_point<F: Field>() -> LogModel<F> {
    let m = crate::monoid::AffineMonoid::new(2, vec![vec![2, 0], vec![0, 2], vec![1, 1]]).expect("cone monoid");
    phantom_point(m, &["u", "v", "w"]).expect("cone point")
}

/// The three coordinate axes of `A^3`, with the monoid `N^3` of coordinates.
pub fn three_lines<F: Field>() -> LogModel<F> {
    use crate::poly::Monomial;
    LogModel::new(
        vec!["x".into(), "y".into(), "z".into()],
        vec![
            Monomial::from_pairs([(0, 1), (1, 1)]),
            Monomial::from_pairs([(0, 1), (2, 1)]),
            Monomial::from_pairs([(1, 1), (2, 1)]),
        ],
        crate::monoid::AffineMonoid::free(3),
        vec!["x".into(), "y".into(), "z".into()],
        (0..3).map(Poly::var).collect(),
        vec![],
    )
    .expect("three lines")
}

fn check_stratum<F: Field>(x: &LogModel<F>, stratum: &[u32]) -> Result<Vec<u32>> {
    if stratum.is_empty() {
        return Err(Error::Invalid("the stratum must lie on at least one branch".into()));
    }
    for s in stratum {
        if !x.divisor().contains(s) {
            return Err(Error::Invalid(format!("variable {s} is not a divisor branch")));
        }
    }
    if !x.ideal().is_empty() || x.num_gens() != x.divisor().len() {
        return Err(Error::Unsupported("strata lifts need a divisorial chart".into()));
    }
    Ok(x.divisor().iter().copied().filter(|d| !stratum.contains(d)).collect())
}

/// The stratum `{z_s = 0, s in stratum}` with its own divisorial structure.
pub fn stratum_model<F: Field>(x: &LogModel<F>, stratum: &[u32]) -> Result<LogModel<F>> {
    check_stratum(x, stratum)?;
    let keep: Vec<u32> = (0..x.num_vars() as u32).filter(|v| !stratum.contains(v)).collect();
    let names: Vec<&str> = keep.iter().map(|&v| x.var_names()[v as usize].as_str()).collect();
    let divisor: Vec<u32> =
        keep.iter().enumerate().filter(|(_, v)| x.divisor().contains(v)).map(|(i, _)| i as u32).collect();
    Ok(LogModel::divisorial(&names, &divisor))
}

/// The virtual inclusion of a stratum defined by a normal vector field
/// `z_s -> section_s` (monomials in the stratum's divisor generators).
pub fn strata_lift<F: Field>(
    x: &LogModel<F>,
    stratum: &[u32],
    sections: &[MonomialSection<F>],
) -> Result<MonomialVirtualMap<F>> {
    let (_, into_pullback) = lift_to_pullback(x, stratum, sections)?;
    let mut z = x.clone();
    let mut inclusions = Vec::new();
    for &s in stratum {
        inclusions.push(hyperplane_inclusion(&z, s)?);
        z = pullback_to_divisor(&z, s)?;
    }
    let mut m = into_pullback;
    for inc in inclusions.iter().rev() {
        m = crate::logmodel::compose_maps(&m, inc)?;
    }
    Ok(m)
}

/// The restriction of `x` to the stratum, keeping every section.
pub fn pullback_to_stratum<F: Field>(x: &LogModel<F>, stratum: &[u32]) -> Result<LogModel<F>> {
    check_stratum(x, stratum)?;
    let mut z = x.clone();
    for &s in stratum {
        z = pullback_to_divisor(&z, s)?;
    }
    Ok(z)
}

/// The first factor of a strata lift: from the stratum to the pulled-back chart.
pub fn lift_to_pullback<F: Field>(
    x: &LogModel<F>,
    stratum: &[u32],
    sections: &[MonomialSection<F>],
) -> Result<(LogModel<F>, MonomialVirtualMap<F>)> {
    let rest = check_stratum(x, stratum)?;
    if sections.len() != stratum.len() {
        return Err(Error::Invalid("one section is needed per branch of the stratum".into()));
    }
    let y = stratum_model(x, stratum)?;
    for s in sections {
        if s.coefficient.is_zero() {
            return Err(Error::Invalid("the normal section vanishes on the open stratum".into()));
        }
        if s.exponents.len() != y.num_gens() {
            return Err(Error::Invalid("section exponents must range over the stratum's divisor".into()));
        }
    }
    let target = pullback_to_stratum(x, stratum)?;
    let keep: Vec<u32> = (0..x.num_vars() as u32).filter(|v| !stratum.contains(v)).collect();
    let ring_map = (0..x.num_vars() as u32)
        .map(|v| match keep.iter().position(|&k| k == v) {
            Some(i) => Poly::var(i as u32),
            None => Poly::zero(),
        })
        .collect();
    let ny = y.num_gens();
    let nt = target.num_gens();
    let mut exponents = vec![vec![0i64; nt]; ny];
    let mut units = vec![MonomialSection::unit(ny); nt];
    for j in 0..nt {
        let var = x.divisor()[j];
        if let Some(k) = stratum.iter().position(|&s| s == var) {
            units[j] = sections[k].clone();
        } else {
            let i = rest.iter().position(|&r| r == var).expect("remaining branch");
            exponents[i][j] = 1;
        }
    }
    let m = MonomialVirtualMap::new(y.clone(), target, ring_map, exponents, units)?;
    Ok((y, m))
}
