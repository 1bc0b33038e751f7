//! Endomorphisms of the ambient groups and their iterated powers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{Ambient, Element, FgSubgroup};
use crate::linalg::RatMatrix;

/// One term of a stencil: `e_i ↦ coeff · e_{i+offset}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Tap {
    pub offset: i64,
    pub coeff: u64,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Endo {
    /// `x ↦ A·x` on `Q^n`, with `x` a column vector.
    Matrix(RatMatrix),
    /// Translation-invariant map on `⊕ Z/m`, `e_i ↦ Σ coeff_j · e_{i+offset_j}`.
    /// Terms landing below index 0 are dropped.
    Stencil { modulus: u64, taps: Vec<Tap> },
}

impl Endo {
    pub fn matrix(m: RatMatrix) -> Result<Self> {
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::InvalidEndo(format!(
                "matrix endomorphism must be square and nonempty, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(Endo::Matrix(m))
    }

    /// Multiplication by `p/q` on `Q`.
    pub fn scalar(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidEndo("zero denominator".into()));
        }
        Self::matrix(RatMatrix::from_fractions(&[&[(p, q)]]))
    }

    /// Coefficients are reduced mod `modulus`. Zero coefficients and repeated
    /// offsets are rejected.
    pub fn stencil(modulus: u64, taps: impl IntoIterator<Item = (i64, i64)>) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidEndo("stencil modulus must be >= 2".into()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (offset, coeff) in taps {
            if !seen.insert(offset) {
                return Err(Error::InvalidEndo(format!("duplicate tap offset {offset}")));
            }
            let coeff = coeff.rem_euclid(modulus as i64) as u64;
            if coeff == 0 {
                return Err(Error::InvalidEndo(format!("tap at offset {offset} has zero coefficient mod {modulus}")));
            }
            out.push(Tap { offset, coeff });
        }
        out.sort_by_key(|t| t.offset);
        Ok(Endo::Stencil { modulus, taps: out })
    }

    /// The right Bernoulli shift `(x_0, x_1, ...) ↦ (0, x_0, x_1, ...)`.
    pub fn right_shift(modulus: u64) -> Result<Self> {
        Self::stencil(modulus, [(1, 1)])
    }

    /// The left shift `(x_0, x_1, ...) ↦ (x_1, x_2, ...)`.
    pub fn left_shift(modulus: u64) -> Result<Self> {
        Self::stencil(modulus, [(-1, 1)])
    }

    pub fn identity(ambient: Ambient) -> Self {
        match ambient {
            Ambient::Rational { rank } => Endo::Matrix(RatMatrix::identity(rank)),
            Ambient::TorsionSum { modulus } => Endo::Stencil { modulus, taps: vec![Tap { offset: 0, coeff: 1 }] },
        }
    }

    pub fn ambient(&self) -> Ambient {
        match self {
            Endo::Matrix(m) => Ambient::Rational { rank: m.rows() },
            Endo::Stencil { modulus, .. } => Ambient::TorsionSum { modulus: *modulus },
        }
    }

    fn apply_once(&self, x: &Element) -> Element {
        match (self, x) {
            (Endo::Matrix(m), Element::Rational(v)) => Element::Rational(m.mul_vec(v)),
            (Endo::Stencil { modulus, taps }, Element::Torsion(map)) => {
                let m = *modulus as u128;
                let mut out: BTreeMap<usize, u128> = BTreeMap::new();
                for (&i, &r) in map {
                    for tap in taps {
                        let Some(j) = i.checked_add_signed(tap.offset as isize) else {
                            continue;
                        };
                        let slot = out.entry(j).or_insert(0);
                        *slot = (*slot + r as u128 * tap.coeff as u128) % m;
                    }
                }
                Element::Torsion(out.into_iter().filter(|&(_, r)| r != 0).map(|(i, r)| (i, r as u64)).collect())
            }
            _ => unreachable!("ambient checked by caller"),
        }
    }
}

impl fmt::Display for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endo::Matrix(m) => {
                write!(f, "matrix[")?;
                for i in 0..m.rows() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    for (j, x) in m.row(i).iter().enumerate() {
                        if j > 0 {
                            write!(f, " ")?;
                        }
                        write!(f, "{x}")?;
                    }
                }
                write!(f, "]")
            }
            Endo::Stencil { modulus, taps } => {
                write!(f, "stencil mod {modulus} {{")?;
                for (i, t) in taps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{:+}:{}", t.offset, t.coeff)?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// `f^k` for `k >= 1`, applied by iterating `f`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EndoPower {
    base: Endo,
    exponent: u32,
}

pub fn power(f: &Endo, k: u32) -> Result<EndoPower> {
    if k == 0 {
        return Err(Error::InvalidExponent(k));
    }
    Ok(EndoPower { base: f.clone(), exponent: k })
}

impl From<Endo> for EndoPower {
    fn from(base: Endo) -> Self {
        EndoPower { base, exponent: 1 }
    }
}

impl EndoPower {
    pub fn base(&self) -> &Endo {
        &self.base
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn ambient(&self) -> Ambient {
        self.base.ambient()
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.ambient().check(x)?;
        let mut y = self.base.apply_once(x);
        for _ in 1..self.exponent {
            y = self.base.apply_once(&y);
        }
        Ok(y)
    }

    /// Subgroup generated by the images of the canonical generators of `h`.
    pub fn image(&self, h: &FgSubgroup) -> Result<FgSubgroup> {
        self.ambient().expect_same(&h.ambient())?;
        let imgs = h.generators().iter().map(|g| self.apply(g)).collect::<Result<Vec<_>>>()?;
        FgSubgroup::generated(h.ambient(), &imgs)
    }

    /// The scalar of the base map when it is multiplication on `Q`.
    pub fn as_scalar(&self) -> Option<&BigRational> {
        match &self.base {
            Endo::Matrix(m) if m.rows() == 1 => Some(&m[(0, 0)]),
            _ => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        match &self.base {
            Endo::Matrix(m) => *m == RatMatrix::identity(m.rows()),
            Endo::Stencil { taps, .. } => taps == &[Tap { offset: 0, coeff: 1 }],
        }
    }
}

impl fmt::Display for EndoPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 1 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "({})^{}", self.base, self.exponent)
        }
    }
}
