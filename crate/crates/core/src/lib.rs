//! Exact calculators for virtual morphisms of log schemes: affine monoids,
//! monomial log models, tangential basepoints, logarithmic forms, genus-zero
//! curves with gluing data, the tree and braid operads and Arnold forms.

pub mod arnold;
pub mod curves;
pub mod error;
pub mod expr;
pub mod fm_operad;
pub mod forms;
pub mod intmat;
pub mod kn;
pub mod logmodel;
pub mod monoid;
pub mod pab;
pub mod poly;
pub mod random;
pub mod ratfunc;
pub mod scalar;
pub mod tangential;

pub use error::{Error, Result};
pub use poly::{Monomial, Poly};
pub use ratfunc::RatFunc;
pub use scalar::{Field, Ring, Q};
