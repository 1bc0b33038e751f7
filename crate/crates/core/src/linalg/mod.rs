//! Exact integer and rational linear algebra. Nothing in here touches
//! floating point.

mod matrix;
mod normal_form;

use std::fmt;
use std::ops::Mul;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use matrix::{clear_denominators, IntMatrix, RatMatrix};
pub use normal_form::{
    echelon_coordinates, hermite_basis, hermite_form, hermite_form_modulo, invariant_factors, is_hermite, rank,
    smith_form,
};

/// Size of a quotient group: a finite natural `>= 1`, or infinite.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Cardinality {
    Finite(BigUint),
    Infinite,
}

impl Cardinality {
    pub fn one() -> Self {
        Cardinality::Finite(BigUint::one())
    }

    /// Panics on zero: no quotient group is empty.
    pub fn finite(n: impl Into<BigUint>) -> Self {
        let n = n.into();
        assert!(n >= BigUint::one(), "a cardinality is at least 1");
        Cardinality::Finite(n)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Cardinality::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&BigUint> {
        match self {
            Cardinality::Finite(n) => Some(n),
            Cardinality::Infinite => None,
        }
    }
}

impl Mul for &Cardinality {
    type Output = Cardinality;
    fn mul(self, rhs: &Cardinality) -> Cardinality {
        match (self, rhs) {
            (Cardinality::Finite(a), Cardinality::Finite(b)) => Cardinality::Finite(a * b),
            _ => Cardinality::Infinite,
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::Infinite => write!(f, "infinite"),
        }
    }
}

impl From<Cardinality> for String {
    fn from(c: Cardinality) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Cardinality {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, String> {
        if s == "infinite" {
            return Ok(Cardinality::Infinite);
        }
        let n: BigUint = s.parse().map_err(|_| format!("bad cardinality {s:?}"))?;
        if n < BigUint::one() {
            return Err("cardinality must be at least 1".into());
        }
        Ok(Cardinality::Finite(n))
    }
}

/// Index `[span(sup) : span(sub)]` of row lattices in `Z^cols`.
///
/// Finite exactly when both spans have the same rank. Fails if some row of
/// `sub` is not in `span(sup)`.
pub fn lattice_index(sub: &IntMatrix, sup: &IntMatrix) -> Result<Cardinality> {
    if sub.cols() != sup.cols() {
        return Err(Error::Dimension(format!("lattice_index on {} vs {} columns", sub.cols(), sup.cols())));
    }
    let basis = hermite_basis(sup).without_zero_rows();
    let r = basis.rows();
    let mut coords = Vec::with_capacity(sub.rows());
    for (i, row) in sub.row_vecs().enumerate() {
        let c = echelon_coordinates(&basis, row)
            .ok_or_else(|| Error::Containment(format!("row {i} of the sublattice is not in the superlattice")))?;
        coords.push(c);
    }
    if r == 0 {
        return Ok(Cardinality::one());
    }
    let factors = invariant_factors(&IntMatrix::from_rows(r, coords));
    if factors.len() < r {
        return Ok(Cardinality::Infinite);
    }
    let prod = factors.iter().fold(BigInt::one(), |acc, d| acc * d.abs());
    Ok(Cardinality::Finite(prod.magnitude().clone()))
}
