//! The non-strict cone `u^2 + v^2 = 0` over the reals: after adjoining `i`
//! it becomes the normal crossing `p m = 0` with `p = u + i v` and
//! `m = u - i v`, and complex conjugation swaps the branches. Tangential
//! basepoints fixed by the conjugation are the nonzero real tangent vectors.

use std::collections::BTreeSet;
use std::fmt;

use virtmor::logmodel::LogModel;
use virtmor::scalar::{parse_q, q, q_to_string};
use virtmor::tangential::{basepoint_to_virtual, enumerate_unit_points, virtual_to_basepoint, TangentialBasepoint, VirtualPoint};
use virtmor::{Error, Field, Result, Ring, Q};

/// Gaussian rationals `re + im i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Gauss {
    re: Q,
    im: Q,
}

impl Gauss {
    fn new(re: Q, im: Q) -> Self {
        Gauss { re, im }
    }

    fn conj(&self) -> Self {
        Gauss::new(self.re.clone(), -self.im.clone())
    }
}

impl fmt::Display for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl Ring for Gauss {
    fn zero() -> Self {
        Gauss::new(q(0), q(0))
    }
    fn one() -> Self {
        Gauss::new(q(1), q(0))
    }
    fn add(&self, o: &Self) -> Self {
        Gauss::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn sub(&self, o: &Self) -> Self {
        Gauss::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn mul(&self, o: &Self) -> Self {
        Gauss::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
    fn neg(&self) -> Self {
        Gauss::new(-self.re.clone(), -self.im.clone())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl Field for Gauss {
    fn inv(&self) -> Option<Self> {
        let n = &self.re * &self.re + &self.im * &self.im;
        (!n.is_zero()).then(|| Gauss::new(&self.re / &n, -&self.im / &n))
    }
    fn from_q(x: &Q) -> Self {
        Gauss::new(x.clone(), q(0))
    }
    fn to_text(&self) -> String {
        format!("{}+{}i", q_to_string(&self.re), q_to_string(&self.im))
    }
    fn parse_text(s: &str) -> Result<Self> {
        let body = s.strip_suffix('i').ok_or_else(|| Error::Parse(format!("bad Gaussian rational {s:?}")))?;
        let (re, im) = body.split_once('+').ok_or_else(|| Error::Parse(format!("bad Gaussian rational {s:?}")))?;
        Ok(Gauss::new(parse_q(re)?, parse_q(im)?))
    }
}

/// Conjugation on virtual points at the origin: conjugate the values and
/// swap the branches `p` and `m`.
fn involution(v: &VirtualPoint<Gauss>) -> VirtualPoint<Gauss> {
    VirtualPoint { point: v.point.iter().map(Gauss::conj).collect(), values: vec![v.values[1].conj(), v.values[0].conj()] }
}

/// The real vector `a d/du + b d/dv` has `dp = a + b i` and `dm = a - b i`.
fn from_real(a: &Q, b: &Q) -> VirtualPoint<Gauss> {
    VirtualPoint { point: vec![Gauss::zero(), Gauss::zero()], values: vec![Gauss::new(a.clone(), b.clone()), Gauss::new(a.clone(), -b.clone())] }
}

#[test]
fn fixed_basepoints_are_real_tangent_vectors() {
    let x = LogModel::<Gauss>::divisorial(&["p", "m"], &[0, 1]);
    let origin = vec![Gauss::zero(), Gauss::zero()];
    let grid: Vec<Q> = (-2..=2).map(q).collect();
    let values: Vec<Gauss> = grid
        .iter()
        .flat_map(|a| grid.iter().map(move |b| Gauss::new(a.clone(), b.clone())))
        .filter(|g| !g.is_zero())
        .collect();
    let all = enumerate_unit_points(&x, &origin, &values).unwrap();
    assert_eq!(all.len(), values.len() * values.len());
    let fixed: BTreeSet<Vec<Gauss>> = all.iter().filter(|v| involution(v) == **v).map(|v| v.values.clone()).collect();
    let real: BTreeSet<Vec<Gauss>> = grid
        .iter()
        .flat_map(|a| grid.iter().map(move |b| (a.clone(), b.clone())))
        .filter(|(a, b)| !(a.is_zero() && b.is_zero()))
        .map(|(a, b)| from_real(&a, &b).values)
        .collect();
    assert_eq!(fixed, real);
    assert_eq!(fixed.len(), 24);
    for v in &all {
        assert_eq!(involution(&involution(v)), *v);
    }
}

#[test]
fn real_vectors_round_trip_through_basepoints() {
    let x = LogModel::<Gauss>::divisorial(&["p", "m"], &[0, 1]);
    for (a, b) in [(q(1), q(0)), (q(0), q(1)), (q(3), q(-2))] {
        let vp = from_real(&a, &b);
        let bp = virtual_to_basepoint(&x, &vp).unwrap();
        assert_eq!(bp.branches, vec![0, 1]);
        assert_eq!(basepoint_to_virtual(&x, &bp).unwrap(), vp);
        // recover the real vector from the p component
        assert_eq!((bp.vector[0].re.clone(), bp.vector[0].im.clone()), (a, b));
    }
    // a vector with a vanishing component is not a basepoint
    assert!(TangentialBasepoint::new(vec![Gauss::zero(); 2], vec![0, 1], vec![Gauss::one(), Gauss::zero()]).is_err());
}

#[test]
fn off_the_node_there_is_nothing_to_choose() {
    // the real point u = v = 1 sits at p = 1 + i, m = 1 - i
    let x = LogModel::<Gauss>::divisorial(&["p", "m"], &[0, 1]);
    let pt = vec![Gauss::new(q(1), q(1)), Gauss::new(q(1), q(-1))];
    let vals = vec![pt[0].clone(), pt[1].clone(), Gauss::one()];
    let pts = enumerate_unit_points(&x, &pt, &vals).unwrap();
    assert_eq!(pts.len(), 1);
    assert_eq!(involution(&pts[0]).values, pts[0].values);
}
