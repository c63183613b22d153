//! Stable genus-zero curves with gluing data and a basepoint at infinity.
//!
//! Every component carries an affine coordinate `z` whose point at infinity
//! is the attachment to its parent (for the root: the output marking).
//! Special points other than infinity are stored by key: a marking label or
//! `@child` for the node to a child component. Tangent vectors are scalars
//! in the chart bases `d/dz` at finite points and `d/dw`, `w = 1/z`, at
//! infinity. An edge scalar `a` stands for the gluing datum
//! `a d/dz|node (x) d/dw|inf`, the basepoint `lambda` for `lambda d/dw|inf` on
//! the root.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logmodel::{product, LogModel, MonomialSection, MonomialScaling, MonomialVirtualMap};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::scalar::{Field, Ring, Q};

/// The output marking at infinity of the root.
pub const INF: &str = "inf";

#[derive(Clone, Debug, PartialEq)]
pub struct Component<F: Field> {
    pub id: String,
    pub points: BTreeMap<String, F>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<F: Field> {
    pub parent: String,
    pub child: String,
    pub scalar: F,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve", into = "RawCurve", bound = "F: Field")]
pub struct StableCurve<F: Field> {
    components: Vec<Component<F>>,
    edges: Vec<Edge<F>>,
    basepoint: F,
}

/// A point of a component: infinity or a finite special point.
#[derive(Clone, Debug, PartialEq, Eq)]
enum At {
    Inf,
    Key(String),
}

/// The s-tensor of two points, or the zero flag across components.
#[derive(Clone, Debug, PartialEq)]
pub enum STensor<F: Field> {
    Scalar(F),
    Zero,
}

fn node_key(child: &str) -> String {
    format!("@{child}")
}

/// Scalar of the s-tensor between two points of one chart.
pub fn s_scalar<F: Field>(p: Option<&F>, q: Option<&F>) -> Result<F> {
    match (p, q) {
        (None, None) => Err(Error::Invalid("the s-tensor needs two distinct points".into())),
        (Some(_), None) | (None, Some(_)) => Ok(F::one()),
        (Some(p), Some(q)) => {
            let d = p.sub(q);
            if d.is_zero() {
                return Err(Error::Invalid("the s-tensor needs two distinct points".into()));
            }
            Ok(d.mul(&d).inv().expect("nonzero").neg())
        }
    }
}

impl<F: Field> StableCurve<F> {
    pub fn new(components: Vec<Component<F>>, edges: Vec<Edge<F>>, basepoint: F) -> Result<Self> {
        let c = StableCurve { components, edges, basepoint };
        c.check()?;
        Ok(c)
    }

    /// A single component with the given marked points.
    pub fn smooth(points: &[(&str, F)], basepoint: F) -> Result<Self> {
        let points = points.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        Self::new(vec![Component { id: "r".into(), points }], vec![], basepoint)
    }

    fn check(&self) -> Result<()> {
        if self.basepoint.is_zero() {
            return Err(Error::Invalid("the basepoint must be nonzero".into()));
        }
        let ids: BTreeSet<&str> = self.components.iter().map(|c| c.id.as_str()).collect();
        if ids.len() != self.components.len() {
            return Err(Error::Invalid("duplicate component id".into()));
        }
        let mut labels = BTreeSet::new();
        for c in &self.components {
            if c.points.len() < 2 {
                return Err(Error::Invalid(format!("component {} has fewer than three special points", c.id)));
            }
            let coords: Vec<&F> = c.points.values().collect();
            for i in 0..coords.len() {
                for j in 0..i {
                    if coords[i] == coords[j] {
                        return Err(Error::Invalid(format!("component {} has two points at {}", c.id, coords[i])));
                    }
                }
            }
            for k in c.points.keys() {
                match k.strip_prefix('@') {
                    Some(child) => {
                        if !self.edges.iter().any(|e| e.parent == c.id && e.child == child) {
                            return Err(Error::Invalid(format!("node {k} on {} has no edge", c.id)));
                        }
                    }
                    None => {
                        if k == INF || k.is_empty() {
                            return Err(Error::Label(format!("{k:?} is reserved")));
                        }
                        if !labels.insert(k.clone()) {
                            return Err(Error::Label(format!("marking {k} appears twice")));
                        }
                    }
                }
            }
        }
        let mut children = BTreeSet::new();
        for e in &self.edges {
            if e.scalar.is_zero() {
                return Err(Error::Invalid("gluing scalars must be nonzero".into()));
            }
            if !ids.contains(e.parent.as_str()) || !ids.contains(e.child.as_str()) {
                return Err(Error::Invalid("edge refers to an unknown component".into()));
            }
            if !children.insert(e.child.as_str()) {
                return Err(Error::Invalid(format!("component {} has two parents", e.child)));
            }
            let parent = self.components.iter().find(|c| c.id == e.parent).expect("known");
            if !parent.points.contains_key(&node_key(&e.child)) {
                return Err(Error::Invalid(format!("edge {} -> {} has no node point", e.parent, e.child)));
            }
        }
        let roots: Vec<&str> = ids.iter().copied().filter(|id| !children.contains(id)).collect();
        if roots.len() != 1 {
            return Err(Error::Invalid("the components must form a rooted tree".into()));
        }
        // every component reaches the root
        for c in &self.components {
            let mut cur = c.id.as_str();
            let mut steps = 0;
            while let Some(e) = self.edges.iter().find(|e| e.child == cur) {
                cur = &e.parent;
                steps += 1;
                if steps > self.components.len() {
                    return Err(Error::Invalid("the component graph has a cycle".into()));
                }
            }
        }
        Ok(())
    }

    pub fn components(&self) -> &[Component<F>] {
        &self.components
    }

    pub fn edges(&self) -> &[Edge<F>] {
        &self.edges
    }

    pub fn basepoint(&self) -> &F {
        &self.basepoint
    }

    pub fn with_basepoint(&self, lambda: F) -> Result<Self> {
        Self::new(self.components.clone(), self.edges.clone(), lambda)
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// Marking labels, sorted.
    pub fn labels(&self) -> Vec<String> {
        let mut v: Vec<String> =
            self.components.iter().flat_map(|c| c.points.keys().filter(|k| !k.starts_with('@')).cloned()).collect();
        v.sort();
        v
    }

    fn index(&self, id: &str) -> usize {
        self.components.iter().position(|c| c.id == id).expect("known component")
    }

    pub fn root(&self) -> &Component<F> {
        self.components.iter().find(|c| !self.edges.iter().any(|e| e.child == c.id)).expect("rooted")
    }

    fn parent_edge(&self, id: &str) -> Option<&Edge<F>> {
        self.edges.iter().find(|e| e.child == id)
    }

    fn locate(&self, marker: &str) -> Result<(usize, At)> {
        if marker == INF {
            return Ok((self.index(&self.root().id), At::Inf));
        }
        if marker.starts_with('@') {
            return Err(Error::Label(format!("{marker} is a node, not a marking")));
        }
        self.components
            .iter()
            .position(|c| c.points.contains_key(marker))
            .map(|i| (i, At::Key(marker.to_string())))
            .ok_or_else(|| Error::Label(format!("unknown marking {marker:?}")))
    }

    fn coord(&self, ci: usize, at: &At) -> Option<&F> {
        match at {
            At::Inf => None,
            At::Key(k) => self.components[ci].points.get(k),
        }
    }

    /// Ancestors of a component, itself first.
    fn ancestry(&self, ci: usize) -> Vec<usize> {
        let mut out = vec![ci];
        let mut cur = self.components[ci].id.clone();
        while let Some(e) = self.parent_edge(&cur) {
            cur = e.parent.clone();
            out.push(self.index(&cur));
        }
        out
    }

    /// Subtree markings of a component.
    fn leaves_below(&self, id: &str) -> Vec<String> {
        let c = &self.components[self.index(id)];
        let mut out = Vec::new();
        for k in c.points.keys() {
            match k.strip_prefix('@') {
                Some(child) => out.extend(self.leaves_below(child)),
                None => out.push(k.clone()),
            }
        }
        out.sort();
        out
    }

    /// The s-tensor between two markings.
    pub fn s_tensor(&self, p: &str, q: &str) -> Result<STensor<F>> {
        let (cp, ap) = self.locate(p)?;
        let (cq, aq) = self.locate(q)?;
        if cp != cq {
            return Ok(STensor::Zero);
        }
        if ap == aq {
            return Err(Error::Invalid("the s-tensor needs two distinct points".into()));
        }
        Ok(STensor::Scalar(s_scalar(self.coord(cp, &ap), self.coord(cq, &aq))?))
    }

    /// Elementary steps from `p` to `q`: an s-step `v -> 1/(sigma v)` on each
    /// component crossed and a gluing step `v -> a/v` at each node.
    pub fn transport_steps(&self, p: &str, q: &str) -> Result<Vec<MonomialScaling<F>>> {
        if p == q {
            return Err(Error::Invalid("transport needs two distinct markings".into()));
        }
        let (cp, ap) = self.locate(p)?;
        let (cq, aq) = self.locate(q)?;
        let up = self.ancestry(cp);
        let down = self.ancestry(cq);
        let lca = *up.iter().find(|c| down.contains(c)).expect("common root");
        let mut steps = Vec::new();
        let push_s = |steps: &mut Vec<MonomialScaling<F>>, ci: usize, from: &At, to: &At| -> Result<()> {
            let sigma = s_scalar(self.coord(ci, from), self.coord(ci, to))?;
            steps.push(MonomialScaling::inversion(sigma.inv().expect("nonzero"))?);
            Ok(())
        };
        let (mut ci, mut at) = (cp, ap);
        while ci != lca {
            push_s(&mut steps, ci, &at, &At::Inf)?;
            let e = self.parent_edge(&self.components[ci].id).expect("non-root");
            steps.push(MonomialScaling::inversion(e.scalar.clone())?);
            at = At::Key(node_key(&self.components[ci].id));
            ci = self.index(&e.parent);
        }
        let descent: Vec<usize> = down.iter().copied().take_while(|&c| c != lca).collect();
        for &next in descent.iter().rev() {
            let key = At::Key(node_key(&self.components[next].id));
            push_s(&mut steps, ci, &at, &key)?;
            let e = self.parent_edge(&self.components[next].id).expect("non-root");
            steps.push(MonomialScaling::inversion(e.scalar.clone())?);
            ci = next;
            at = At::Inf;
        }
        push_s(&mut steps, ci, &at, &aq)?;
        Ok(steps)
    }

    /// The composite of [`Self::transport_steps`].
    pub fn transport_scaling(&self, p: &str, q: &str) -> Result<MonomialScaling<F>> {
        let steps = self.transport_steps(p, q)?;
        Ok(steps.iter().fold(MonomialScaling::identity(), |acc, s| s.compose(&acc)))
    }

    /// Transport a tangent vector at `p` to a tangent vector at `q`.
    pub fn transport(&self, p: &str, q: &str, v: &F) -> Result<F> {
        if v.is_zero() {
            return Err(Error::Invalid("cannot transport the zero vector".into()));
        }
        self.transport_scaling(p, q)?.apply(v)
    }

    /// Product of the s-scalars and gluing scalars along the path from `p`
    /// to `q`: the contraction `s' eta s''` in chart bases.
    pub fn s_composite(&self, p: &str, q: &str) -> Result<F> {
        let t = self.transport_scaling(p, q)?;
        t.coefficient.inv().ok_or(Error::DivisionByZero)
    }

    fn renamed(&self, prefix: &str) -> Self {
        let ren = |id: &str| format!("{prefix}{id}");
        StableCurve {
            components: self
                .components
                .iter()
                .map(|c| Component {
                    id: ren(&c.id),
                    points: c
                        .points
                        .iter()
                        .map(|(k, v)| match k.strip_prefix('@') {
                            Some(ch) => (node_key(&ren(ch)), v.clone()),
                            None => (k.clone(), v.clone()),
                        })
                        .collect(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge { parent: ren(&e.parent), child: ren(&e.child), scalar: e.scalar.clone() })
                .collect(),
            basepoint: self.basepoint.clone(),
        }
    }

    /// Rename every component after the markings below it, e.g. `{a,b}`.
    pub fn normalize_ids(&self) -> Self {
        let names: BTreeMap<String, String> =
            self.components.iter().map(|c| (c.id.clone(), format!("{{{}}}", self.leaves_below(&c.id).join(",")))).collect();
        let mut out = StableCurve {
            components: self
                .components
                .iter()
                .map(|c| Component {
                    id: names[&c.id].clone(),
                    points: c
                        .points
                        .iter()
                        .map(|(k, v)| match k.strip_prefix('@') {
                            Some(ch) => (node_key(&names[ch]), v.clone()),
                            None => (k.clone(), v.clone()),
                        })
                        .collect(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge { parent: names[&e.parent].clone(), child: names[&e.child].clone(), scalar: e.scalar.clone() })
                .collect(),
            basepoint: self.basepoint.clone(),
        };
        out.components.sort_by(|a, b| a.id.cmp(&b.id));
        out.edges.sort_by(|a, b| (&a.parent, &a.child).cmp(&(&b.parent, &b.child)));
        out
    }

    /// Ordering key of a special point: its label, or the least label below a node.
    fn point_key(&self, key: &str) -> String {
        match key.strip_prefix('@') {
            Some(child) => self.leaves_below(child)[0].clone(),
            None => key.to_string(),
        }
    }

    /// Normal form under the affine reparametrizations `z -> alpha z + beta`
    /// of the components: the two special points with the least keys go to
    /// 0 and 1. Two curves are isomorphic iff their normal forms agree.
    pub fn canonical(&self) -> Self {
        let mut alphas: BTreeMap<String, F> = BTreeMap::new();
        let mut comps = Vec::new();
        for c in &self.components {
            let mut keys: Vec<(String, &String)> = c.points.keys().map(|k| (self.point_key(k), k)).collect();
            keys.sort();
            let p0 = &c.points[keys[0].1];
            let p1 = &c.points[keys[1].1];
            let alpha = p1.sub(p0).inv().expect("distinct points");
            let beta = p0.mul(&alpha).neg();
            let points = c.points.iter().map(|(k, v)| (k.clone(), alpha.mul(v).add(&beta))).collect();
            alphas.insert(c.id.clone(), alpha);
            comps.push(Component { id: c.id.clone(), points });
        }
        let root = self.root().id.clone();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                parent: e.parent.clone(),
                child: e.child.clone(),
                scalar: e.scalar.mul(&alphas[&e.parent]).div(&alphas[&e.child]).expect("nonzero"),
            })
            .collect();
        let basepoint = self.basepoint.div(&alphas[&root]).expect("nonzero");
        StableCurve { components: comps, edges, basepoint }.normalize_ids()
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }

    /// Drop a marking from a one-component curve that stays stable.
    pub fn forget_marking(&self, label: &str) -> Result<Self> {
        if self.components.len() != 1 {
            return Err(Error::Unsupported("forgetting markings is implemented on smooth curves only".into()));
        }
        let mut c = self.components[0].clone();
        if c.points.remove(label).is_none() {
            return Err(Error::Label(format!("unknown marking {label:?}")));
        }
        Self::new(vec![c], vec![], self.basepoint.clone())
    }

    /// Coordinate of the image in the two-pointed space: `lambda (z_b - z_a)`.
    pub fn forget_to_pair(&self, a: &str, b: &str) -> Result<F> {
        if self.components.len() != 1 {
            return Err(Error::Unsupported("forgetting markings is implemented on smooth curves only".into()));
        }
        let pts = &self.components[0].points;
        let za = pts.get(a).ok_or_else(|| Error::Label(format!("unknown marking {a:?}")))?;
        let zb = pts.get(b).ok_or_else(|| Error::Label(format!("unknown marking {b:?}")))?;
        Ok(self.basepoint.mul(&zb.sub(za)))
    }
}

fn check_disjoint(left: &[String], nu: &str, right: &[String]) -> Result<()> {
    if !left.iter().any(|l| l == nu) {
        return Err(Error::Label(format!("{nu:?} is not a marking of the outer curve")));
    }
    if let Some(l) = right.iter().find(|l| left.contains(l) && l.as_str() != nu) {
        return Err(Error::Label(format!("marking {l:?} appears in both curves")));
    }
    if right.iter().any(|l| l == nu) {
        return Err(Error::Label(format!("marking {nu:?} appears in both curves")));
    }
    Ok(())
}

fn glue<F: Field>(c1: &StableCurve<F>, nu: &str, c2: &StableCurve<F>, a: F) -> Result<StableCurve<F>> {
    let l = c1.renamed("L");
    let r = c2.renamed("R");
    let root2 = r.root().id.clone();
    let mut comps = l.components.clone();
    let holder = comps.iter_mut().find(|c| c.points.contains_key(nu)).expect("marking present");
    let x = holder.points.remove(nu).expect("present");
    holder.points.insert(node_key(&root2), x);
    let parent = holder.id.clone();
    comps.extend(r.components.iter().cloned());
    let mut edges = l.edges.clone();
    edges.extend(r.edges.iter().cloned());
    edges.push(Edge { parent, child: root2, scalar: a });
    Ok(StableCurve::new(comps, edges, c1.basepoint.clone())?.normalize_ids())
}

/// Unframed composition: glue the root of `c2` to the marking `nu` of `c1`
/// with the gluing scalar `transport(inf -> nu, lambda_1) * lambda_2`.
pub fn compose_unframed<F: Field>(c1: &StableCurve<F>, nu: &str, c2: &StableCurve<F>) -> Result<StableCurve<F>> {
    check_disjoint(&c1.labels(), nu, &c2.labels())?;
    let t = c1.transport(INF, nu, &c1.basepoint)?;
    glue(c1, nu, c2, t.mul(&c2.basepoint))
}

/// A stable curve with a tangent vector at every marking.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Field")]
pub struct FramedCurve<F: Field> {
    pub curve: StableCurve<F>,
    #[serde(with = "field_map")]
    pub frames: BTreeMap<String, F>,
}

mod field_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::scalar::Field;

    pub fn serialize<F: Field, S: Serializer>(m: &BTreeMap<String, F>, s: S) -> std::result::Result<S::Ok, S::Error> {
        m.iter().map(|(k, v)| (k.clone(), v.to_text())).collect::<BTreeMap<_, _>>().serialize(s)
    }

    pub fn deserialize<'de, F: Field, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<String, F>, D::Error> {
        let m = BTreeMap::<String, String>::deserialize(d)?;
        m.into_iter().map(|(k, v)| F::parse_text(&v).map(|x| (k, x)).map_err(serde::de::Error::custom)).collect()
    }
}

impl<F: Field> FramedCurve<F> {
    pub fn new(curve: StableCurve<F>, frames: BTreeMap<String, F>) -> Result<Self> {
        let labels: BTreeSet<String> = curve.labels().into_iter().collect();
        let keys: BTreeSet<String> = frames.keys().cloned().collect();
        if labels != keys {
            return Err(Error::Label("one frame is needed per marking".into()));
        }
        if frames.values().any(|v| v.is_zero()) {
            return Err(Error::Invalid("frames must be nonzero".into()));
        }
        Ok(FramedCurve { curve, frames })
    }

    /// Frames obtained by transporting the basepoint to every marking.
    pub fn induced(curve: &StableCurve<F>) -> Result<Self> {
        let frames = curve
            .labels()
            .into_iter()
            .map(|l| curve.transport(INF, &l, curve.basepoint()).map(|v| (l, v)))
            .collect::<Result<_>>()?;
        Self::new(curve.clone(), frames)
    }

    /// Normal form; frames rescale with their component.
    pub fn canonical(&self) -> Self {
        let c = &self.curve;
        let mut frames = BTreeMap::new();
        for comp in &c.components {
            let mut keys: Vec<(String, &String)> = comp.points.keys().map(|k| (c.point_key(k), k)).collect();
            keys.sort();
            let alpha = comp.points[keys[1].1].sub(&comp.points[keys[0].1]).inv().expect("distinct");
            for k in comp.points.keys().filter(|k| !k.starts_with('@')) {
                frames.insert(k.clone(), self.frames[k].mul(&alpha));
            }
        }
        FramedCurve { curve: c.canonical(), frames }
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Framed composition: the gluing scalar is `frame(nu) * lambda_2`.
pub fn compose_framed<F: Field>(c1: &FramedCurve<F>, nu: &str, c2: &FramedCurve<F>) -> Result<FramedCurve<F>> {
    check_disjoint(&c1.curve.labels(), nu, &c2.curve.labels())?;
    let a = c1.frames[nu].mul(&c2.curve.basepoint);
    let curve = glue(&c1.curve, nu, &c2.curve, a)?;
    let mut frames = c1.frames.clone();
    frames.remove(nu);
    frames.extend(c2.frames.iter().map(|(k, v)| (k.clone(), v.clone())));
    FramedCurve::new(curve, frames)
}

fn gluing_map<F: Field>(coefficient: F, first_exponent: i64) -> Result<MonomialVirtualMap<F>> {
    let pt = LogModel::log_point();
    MonomialVirtualMap::new(
        product(&pt, &pt),
        pt,
        vec![Poly::zero()],
        vec![vec![first_exponent], vec![1]],
        vec![MonomialSection::new(coefficient, vec![0, 0])?],
    )
}

/// The gluing scalar of [`compose_framed`] as a monomial map of the
/// tangent lines `(frame at nu, basepoint of c2) -> edge`.
pub fn framed_gluing_map<F: Field>() -> MonomialVirtualMap<F> {
    gluing_map(F::one(), 1).expect("quadratic monomial map")
}

/// The gluing scalar of [`compose_unframed`] as a monomial map of the
/// tangent lines `(basepoint of c1, basepoint of c2) -> edge`.
pub fn unframed_gluing_map<F: Field>(c1: &StableCurve<F>, nu: &str) -> Result<MonomialVirtualMap<F>> {
    let t = c1.transport_scaling(INF, nu)?;
    gluing_map(t.coefficient, t.exponent)
}

/// Two-component degeneration: the outer chart `x` carries the markings
/// `outer` and the node at `node`; the inner markings sit at
/// `x = node + c g y_b`, so that `(x - node) (1/y) = c g` near the node.
#[derive(Clone, Debug)]
pub struct FamilyConfig {
    pub outer: Vec<(String, Q)>,
    pub node: Q,
    pub inner: Vec<(String, Q)>,
    pub c: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationReport {
    /// Order of vanishing of the s-scalar in `g`.
    pub order: i64,
    pub leading: Q,
    pub expected_order: i64,
    pub expected: Q,
}

impl FactorizationReport {
    pub fn holds(&self) -> bool {
        self.order == self.expected_order && self.leading == self.expected
    }
}

impl FamilyConfig {
    /// The nodal fibre, with gluing scalar `c`.
    pub fn nodal_curve(&self) -> Result<StableCurve<Q>> {
        if self.c == Q::from_int(0) {
            return Err(Error::Invalid("the smoothing parameter must be nonzero".into()));
        }
        let mut outer: BTreeMap<String, Q> = self.outer.iter().cloned().collect();
        outer.insert("@in".into(), self.node.clone());
        let inner = self.inner.iter().cloned().collect();
        StableCurve::new(
            vec![Component { id: "out".into(), points: outer }, Component { id: "in".into(), points: inner }],
            vec![Edge { parent: "out".into(), child: "in".into(), scalar: self.c.clone() }],
            Q::from_int(1),
        )
    }

    /// The smooth fibre over the generic point of the base.
    pub fn generic_fibre(&self) -> Result<StableCurve<RatFunc>> {
        let g = RatFunc::var(0);
        let cg = g.mul(&RatFunc::constant(self.c.clone()));
        let mut points: BTreeMap<String, RatFunc> =
            self.outer.iter().map(|(k, x)| (k.clone(), RatFunc::constant(x.clone()))).collect();
        for (k, y) in &self.inner {
            points.insert(k.clone(), RatFunc::constant(self.node.clone()).add(&cg.mul(&RatFunc::constant(y.clone()))));
        }
        StableCurve::new(vec![Component { id: "r".into(), points }], vec![], RatFunc::one())
    }

    fn is_inner(&self, m: &str) -> bool {
        self.inner.iter().any(|(k, _)| k == m)
    }
}

/// Compare the leading term of the s-scalar on the smooth fibres with the
/// contraction `s' eta s''` on the nodal fibre.
pub fn factorization_family_check(cfg: &FamilyConfig, p: &str, q: &str) -> Result<FactorizationReport> {
    if p == q {
        return Err(Error::Invalid("the check needs two distinct markings".into()));
    }
    let nodal = cfg.nodal_curve()?;
    let fibre = cfg.generic_fibre()?;
    let mut sigma = match fibre.s_tensor(p, q)? {
        STensor::Scalar(s) => s,
        STensor::Zero => unreachable!("one component"),
    };
    // inner markings use the inner coordinate y, and dx = c g dy
    let cg = RatFunc::var(0).mul(&RatFunc::constant(cfg.c.clone()));
    for m in [p, q] {
        if cfg.is_inner(m) {
            sigma = sigma.mul(&cg);
        }
    }
    let (order, lead) = sigma.leading_in(0).ok_or_else(|| Error::Invalid("s-scalar vanishes identically".into()))?;
    let leading = lead.as_constant().ok_or_else(|| Error::Invalid("leading coefficient depends on g".into()))?;
    let expected_order = i64::from(cfg.is_inner(p) != cfg.is_inner(q));
    let expected = match nodal.s_tensor(p, q)? {
        STensor::Scalar(s) => s,
        STensor::Zero => nodal.s_composite(p, q)?,
    };
    Ok(FactorizationReport { order, leading, expected_order, expected })
}

#[derive(Serialize, Deserialize)]
struct RawComponent {
    id: String,
    points: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    parent: String,
    child: String,
    scalar: String,
}

#[derive(Serialize, Deserialize)]
struct RawCurve {
    components: Vec<RawComponent>,
    #[serde(default)]
    edges: Vec<RawEdge>,
    basepoint: String,
}

impl<F: Field> TryFrom<RawCurve> for StableCurve<F> {
    type Error = Error;

    fn try_from(r: RawCurve) -> Result<Self> {
        let mut comps = Vec::new();
        for c in r.components {
            let mut points = BTreeMap::new();
            for (k, v) in c.points {
                if k == "@parent" {
                    if v != INF {
                        return Err(Error::Invalid("the parent attachment sits at inf".into()));
                    }
                    continue;
                }
                points.insert(k, F::parse_text(&v)?);
            }
            comps.push(Component { id: c.id, points });
        }
        let edges = r
            .edges
            .into_iter()
            .map(|e| Ok(Edge { parent: e.parent, child: e.child, scalar: F::parse_text(&e.scalar)? }))
            .collect::<Result<Vec<_>>>()?;
        StableCurve::new(comps, edges, F::parse_text(&r.basepoint)?)
    }
}

impl<F: Field> From<StableCurve<F>> for RawCurve {
    fn from(c: StableCurve<F>) -> Self {
        let children: BTreeSet<String> = c.edges.iter().map(|e| e.child.clone()).collect();
        RawCurve {
            components: c
                .components
                .iter()
                .map(|comp| {
                    let mut points: BTreeMap<String, String> =
                        comp.points.iter().map(|(k, v)| (k.clone(), v.to_text())).collect();
                    if children.contains(&comp.id) {
                        points.insert("@parent".into(), INF.into());
                    }
                    RawComponent { id: comp.id.clone(), points }
                })
                .collect(),
            edges: c
                .edges
                .iter()
                .map(|e| RawEdge { parent: e.parent.clone(), child: e.child.clone(), scalar: e.scalar.to_text() })
                .collect(),
            basepoint: c.basepoint.to_text(),
        }
    }
}
