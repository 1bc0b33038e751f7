//! Brute-force ground truth for small instances. Nothing here goes through
//! the normal-form machinery: torsion subgroups are enumerated element by
//! element, and cyclic subgroups of `Q` are handled with gcd arithmetic on
//! a single generator.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::groups::{Ambient, Element, FgSubgroup};
use crate::linalg::Cardinality;

pub const DEFAULT_CAP: usize = 4096;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ElementSet {
    pub ambient: Ambient,
    pub elements: BTreeSet<Element>,
    /// Set when enumeration stopped at the cap before closing up.
    pub capped: bool,
}

impl ElementSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Closure of `gens` under addition, breadth first.
pub fn enumerate_generated(ambient: Ambient, gens: &[Element], cap: usize) -> Result<ElementSet> {
    if !matches!(ambient, Ambient::TorsionSum { .. }) {
        return Err(Error::RationalAmbient);
    }
    let mut elements = BTreeSet::from([ambient.zero()]);
    let mut queue = VecDeque::from([ambient.zero()]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = ambient.add(&x, g)?;
            if elements.contains(&y) {
                continue;
            }
            if elements.len() >= cap {
                return Ok(ElementSet { ambient, elements, capped: true });
            }
            elements.insert(y.clone());
            queue.push_back(y);
        }
    }
    Ok(ElementSet { ambient, elements, capped: false })
}

pub fn enumerate_subgroup(h: &FgSubgroup, cap: usize) -> Result<ElementSet> {
    enumerate_generated(h.ambient(), &h.generators(), cap)
}

/// `|k| / |h|` from explicit element counts.
pub fn index_by_enumeration(k: &FgSubgroup, h: &FgSubgroup, cap: usize) -> Result<Cardinality> {
    let ks = enumerate_subgroup(k, cap)?;
    let hs = enumerate_subgroup(h, cap)?;
    if ks.capped || hs.capped {
        return Err(Error::CapExceeded { cap });
    }
    if !hs.elements.is_subset(&ks.elements) {
        return Err(Error::Containment("enumerated h is not inside k".into()));
    }
    let (q, r) = ks.len().div_rem(&hs.len());
    if r != 0 {
        return Err(Error::InternalInvariantViolation("subgroup order does not divide".into()));
    }
    Ok(Cardinality::finite(BigUint::from(q)))
}

/// The cyclic subgroup `g·Z` of `Q`, with `g >= 0` in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CyclicRational {
    generator: BigRational,
}

impl CyclicRational {
    pub fn new(g: BigRational) -> Self {
        CyclicRational { generator: g.abs() }
    }

    pub fn zero() -> Self {
        CyclicRational { generator: BigRational::zero() }
    }

    pub fn generator(&self) -> &BigRational {
        &self.generator
    }

    pub fn from_generators<'a>(gens: impl IntoIterator<Item = &'a BigRational>) -> Self {
        gens.into_iter().fold(Self::zero(), |acc, g| cyclic_sum(&acc, &Self::new(g.clone())))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        if self.generator.is_zero() {
            return x.is_zero();
        }
        (x / &self.generator).is_integer()
    }

    /// `[self : sub]` when `sub ⊆ self`.
    pub fn index_over(&self, sub: &CyclicRational) -> Result<Cardinality> {
        if !self.contains(&sub.generator) {
            return Err(Error::Containment("cyclic subgroup not contained".into()));
        }
        if self.generator.is_zero() {
            return Ok(Cardinality::one());
        }
        if sub.generator.is_zero() {
            return Ok(Cardinality::Infinite);
        }
        let ratio = &sub.generator / &self.generator;
        Ok(Cardinality::finite(ratio.to_integer().magnitude().clone()))
    }
}

/// `gZ + g'Z = g''Z` with `g'' = gcd(p q', p' q) / (q q')`.
pub fn cyclic_sum(a: &CyclicRational, b: &CyclicRational) -> CyclicRational {
    if a.generator.is_zero() {
        return b.clone();
    }
    if b.generator.is_zero() {
        return a.clone();
    }
    let (p, q) = (a.generator.numer(), a.generator.denom());
    let (p2, q2) = (b.generator.numer(), b.generator.denom());
    let num: BigInt = (p * q2).gcd(&(p2 * q));
    CyclicRational::new(BigRational::new(num, q * q2))
}
