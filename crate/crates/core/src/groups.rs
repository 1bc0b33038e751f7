//! Ambient groups, their elements, and finitely generated subgroups.
//!
//! Two ambient families are representable: `Q^n`, and the countable direct
//! sum `⊕_{i∈N} Z/m` of finitely supported sequences. A finitely generated
//! subgroup is stored in a canonical form, so structural equality is
//! subgroup equality:
//!
//! * in `Q^n`, as `(1/d) · L` where `d` is the least positive integer with
//!   `d·H ⊆ Z^n` and `L` is the Hermite basis of `d·H`;
//! * in `⊕ Z/m`, as the Hermite basis of the lifted lattice
//!   `lift(H) + m·Z^w ⊆ Z^w`, where the window `w` is one past the largest
//!   coordinate any element of `H` touches.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{echelon_coordinates, hermite_basis, hermite_form_modulo, lattice_index, Cardinality, IntMatrix};

/// Alias used where a value is specifically the size of a quotient `K/H`.
pub type QuotientSize = Cardinality;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ambient {
    /// `Q^rank`.
    Rational { rank: usize },
    /// `⊕_{i∈N} Z/modulus`.
    TorsionSum { modulus: u64 },
}

impl Ambient {
    pub fn rational(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Dimension("rational ambient needs rank >= 1".into()));
        }
        Ok(Ambient::Rational { rank })
    }

    pub fn torsion_sum(modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::Dimension("torsion ambient needs modulus >= 2".into()));
        }
        Ok(Ambient::TorsionSum { modulus })
    }

    pub fn zero(&self) -> Element {
        match *self {
            Ambient::Rational { rank } => Element::Rational(vec![BigRational::zero(); rank]),
            Ambient::TorsionSum { .. } => Element::Torsion(BTreeMap::new()),
        }
    }

    /// The `i`-th standard basis element.
    pub fn unit(&self, i: usize) -> Result<Element> {
        match *self {
            Ambient::Rational { rank } => {
                if i >= rank {
                    return Err(Error::Dimension(format!("unit vector {i} in Q^{rank}")));
                }
                let mut v = vec![BigRational::zero(); rank];
                v[i] = BigRational::one();
                Ok(Element::Rational(v))
            }
            Ambient::TorsionSum { .. } => Ok(Element::Torsion(BTreeMap::from([(i, 1)]))),
        }
    }

    /// Checks that `x` is a well-formed element of this ambient.
    pub fn check(&self, x: &Element) -> Result<()> {
        match (self, x) {
            (Ambient::Rational { rank }, Element::Rational(v)) => {
                if v.len() != *rank {
                    return Err(Error::Dimension(format!("element of length {} in Q^{rank}", v.len())));
                }
                Ok(())
            }
            (Ambient::TorsionSum { modulus }, Element::Torsion(map)) => {
                if let Some((i, r)) = map.iter().find(|(_, &r)| r == 0 || r >= *modulus) {
                    return Err(Error::InvalidElement(format!(
                        "residue {r} at index {i} is not in [1, {}]",
                        modulus - 1
                    )));
                }
                Ok(())
            }
            _ => Err(self.mismatch(x)),
        }
    }

    fn mismatch(&self, x: &Element) -> Error {
        let found = match x {
            Element::Rational(v) => format!("rational element of length {}", v.len()),
            Element::Torsion(_) => "torsion element".to_string(),
        };
        Error::AmbientMismatch { expected: self.to_string(), found }
    }

    pub(crate) fn expect_same(&self, other: &Ambient) -> Result<()> {
        if self != other {
            return Err(Error::AmbientMismatch { expected: self.to_string(), found: other.to_string() });
        }
        Ok(())
    }

    pub fn add(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (Element::Rational(x), Element::Rational(y)) => {
                Element::Rational(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (Element::Torsion(x), Element::Torsion(y)) => {
                let m = self.modulus().expect("torsion ambient");
                let mut out = x.clone();
                for (&i, &r) in y {
                    let slot = out.entry(i).or_insert(0);
                    *slot = ((*slot as u128 + r as u128) % m as u128) as u64;
                    if *slot == 0 {
                        out.remove(&i);
                    }
                }
                Element::Torsion(out)
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn neg(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        Ok(match a {
            Element::Rational(x) => Element::Rational(x.iter().map(|p| -p).collect()),
            Element::Torsion(x) => {
                let m = self.modulus().expect("torsion ambient");
                Element::Torsion(x.iter().map(|(&i, &r)| (i, m - r)).collect())
            }
        })
    }

    pub fn modulus(&self) -> Option<u64> {
        match *self {
            Ambient::TorsionSum { modulus } => Some(modulus),
            Ambient::Rational { .. } => None,
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Rational { rank } => write!(f, "Q^{rank}"),
            Ambient::TorsionSum { modulus } => write!(f, "⊕Z/{modulus}"),
        }
    }
}

/// An element of an ambient group. Torsion elements are sparse and never
/// store a zero residue.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Element {
    Rational(Vec<BigRational>),
    Torsion(BTreeMap<usize, u64>),
}

impl Element {
    /// Sparse torsion element; residues are reduced modulo `modulus` and
    /// zeros dropped. Repeated indices accumulate.
    pub fn torsion(modulus: u64, entries: impl IntoIterator<Item = (usize, i64)>) -> Element {
        let m = modulus as i128;
        let mut acc: BTreeMap<usize, i128> = BTreeMap::new();
        for (i, r) in entries {
            *acc.entry(i).or_insert(0) += r as i128;
        }
        Element::Torsion(acc.into_iter().map(|(i, r)| (i, r.rem_euclid(m) as u64)).filter(|&(_, r)| r != 0).collect())
    }

    /// Rational vector from `(numerator, denominator)` pairs.
    pub fn rational(entries: &[(i64, i64)]) -> Element {
        Element::Rational(entries.iter().map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q))).collect())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Element::Rational(v) => v.iter().all(Zero::is_zero),
            Element::Torsion(m) => m.is_empty(),
        }
    }

    /// One past the largest nonzero coordinate of a torsion element.
    fn support_end(&self) -> usize {
        match self {
            Element::Torsion(m) => m.keys().next_back().map_or(0, |&i| i + 1),
            Element::Rational(v) => v.len(),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Rational(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Element::Torsion(m) if m.is_empty() => write!(f, "0"),
            Element::Torsion(m) => {
                for (k, (i, r)) in m.iter().enumerate() {
                    if k > 0 {
                        write!(f, " + ")?;
                    }
                    if *r == 1 {
                        write!(f, "e{i}")?;
                    } else {
                        write!(f, "{r}e{i}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Basis {
    Rational { denom: BigInt, lattice: IntMatrix },
    Torsion { window: usize, lift: IntMatrix },
}

/// A finitely generated subgroup in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FgSubgroup {
    ambient: Ambient,
    basis: Basis,
}

/// The subgroup of `ambient` generated by `gens`.
pub fn subgroup(ambient: Ambient, gens: &[Element]) -> Result<FgSubgroup> {
    FgSubgroup::generated(ambient, gens)
}

/// `|k / h|` for `h ⊆ k`.
pub fn quotient_index(k: &FgSubgroup, h: &FgSubgroup) -> Result<QuotientSize> {
    k.ambient.expect_same(&h.ambient)?;
    match (&k.basis, &h.basis) {
        (Basis::Rational { denom: dk, lattice: lk }, Basis::Rational { denom: dh, lattice: lh }) => {
            let d = dk.lcm(dh);
            let sup = lk.scale(&(&d / dk));
            let sub = lh.scale(&(&d / dh));
            lattice_index(&sub, &sup).map_err(|_| not_contained())
        }
        (Basis::Torsion { window: wk, .. }, Basis::Torsion { window: wh, .. }) => {
            let w = (*wk).max(*wh);
            lattice_index(&h.lifted(w), &k.lifted(w)).map_err(|_| not_contained())
        }
        _ => unreachable!("ambients agree"),
    }
}

fn not_contained() -> Error {
    Error::Containment("quotient_index needs h ⊆ k".into())
}

impl FgSubgroup {
    pub fn zero(ambient: Ambient) -> Self {
        Self::generated(ambient, &[]).expect("empty generator list is always valid")
    }

    pub fn generated(ambient: Ambient, gens: &[Element]) -> Result<Self> {
        for g in gens {
            ambient.check(g)?;
        }
        let basis = match ambient {
            Ambient::Rational { rank } => {
                let denom = gens
                    .iter()
                    .flat_map(|g| match g {
                        Element::Rational(v) => v.iter(),
                        Element::Torsion(_) => unreachable!("checked"),
                    })
                    .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                let rows = gens
                    .iter()
                    .map(|g| match g {
                        Element::Rational(v) => v.iter().map(|x| x.numer() * (&denom / x.denom())).collect(),
                        Element::Torsion(_) => unreachable!("checked"),
                    })
                    .collect();
                let lattice = hermite_basis(&IntMatrix::from_rows(rank, rows)).without_zero_rows();
                Basis::Rational { denom, lattice }
            }
            Ambient::TorsionSum { modulus } => {
                let window = gens.iter().map(Element::support_end).max().unwrap_or(0);
                let rows = gens.iter().map(|g| torsion_row(g, window)).collect();
                let lift = hermite_form_modulo(&IntMatrix::from_rows(window, rows), &BigInt::from(modulus));
                Basis::Torsion { window, lift }
            }
        };
        Ok(FgSubgroup { ambient, basis })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    /// Canonical nonzero generators.
    pub fn generators(&self) -> Vec<Element> {
        match &self.basis {
            Basis::Rational { denom, lattice } => lattice
                .row_vecs()
                .map(|r| Element::Rational(r.iter().map(|x| BigRational::new(x.clone(), denom.clone())).collect()))
                .collect(),
            Basis::Torsion { lift, .. } => {
                let m = BigInt::from(self.ambient.modulus().expect("torsion"));
                lift.row_vecs()
                    .enumerate()
                    .filter(|(j, r)| r[*j] != m)
                    .map(|(_, r)| {
                        Element::Torsion(
                            r.iter()
                                .enumerate()
                                .filter_map(|(i, x)| {
                                    let x = x.mod_floor(&m);
                                    (!x.is_zero()).then(|| (i, u64::try_from(x).expect("residue below modulus")))
                                })
                                .collect(),
                        )
                    })
                    .collect()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.basis {
            Basis::Rational { lattice, .. } => lattice.rows() == 0,
            Basis::Torsion { window, .. } => *window == 0,
        }
    }

    /// Torsion-free rank; `0` for every torsion subgroup.
    pub fn rank(&self) -> usize {
        match &self.basis {
            Basis::Rational { lattice, .. } => lattice.rows(),
            Basis::Torsion { .. } => 0,
        }
    }

    /// Support window for torsion subgroups; `None` in a rational ambient.
    pub fn window(&self) -> Option<usize> {
        match &self.basis {
            Basis::Torsion { window, .. } => Some(*window),
            Basis::Rational { .. } => None,
        }
    }

    pub fn sum(&self, other: &FgSubgroup) -> Result<FgSubgroup> {
        self.ambient.expect_same(&other.ambient)?;
        let mut gens = self.generators();
        gens.extend(other.generators());
        Self::generated(self.ambient, &gens)
    }

    /// The subgroup generated by `self` and the extra elements.
    pub fn extend(&self, extra: &[Element]) -> Result<FgSubgroup> {
        let mut gens = self.generators();
        gens.extend_from_slice(extra);
        Self::generated(self.ambient, &gens)
    }

    pub fn contains(&self, x: &Element) -> Result<bool> {
        self.ambient.check(x)?;
        Ok(match (&self.basis, x) {
            (Basis::Rational { denom, lattice }, Element::Rational(v)) => {
                let scaled: Vec<BigRational> = v.iter().map(|q| q * BigRational::from(denom.clone())).collect();
                if !scaled.iter().all(|q| q.is_integer()) {
                    return Ok(false);
                }
                let ints: Vec<BigInt> = scaled.into_iter().map(|q| q.to_integer()).collect();
                echelon_coordinates(lattice, &ints).is_some()
            }
            (Basis::Torsion { window, lift }, Element::Torsion(_)) => {
                if x.support_end() > *window {
                    return Ok(false);
                }
                echelon_coordinates(lift, &torsion_row(x, *window)).is_some()
            }
            _ => unreachable!("checked"),
        })
    }

    pub fn is_subgroup_of(&self, k: &FgSubgroup) -> Result<bool> {
        self.ambient.expect_same(&k.ambient)?;
        for g in self.generators() {
            if !k.contains(&g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Order of the subgroup. Infinite for any nonzero subgroup of `Q^n`.
    pub fn order(&self) -> Cardinality {
        match &self.basis {
            Basis::Rational { lattice, .. } if lattice.rows() == 0 => Cardinality::one(),
            Basis::Rational { .. } => Cardinality::Infinite,
            Basis::Torsion { lift, .. } => {
                let m = BigUint::from(self.ambient.modulus().expect("torsion"));
                let order = (0..lift.rows()).fold(BigUint::one(), |acc, j| acc * (&m / lift[(j, j)].magnitude()));
                Cardinality::Finite(order)
            }
        }
    }

    /// Lifted lattice `lift(H) + m·Z^width` for torsion subgroups.
    fn lifted(&self, width: usize) -> IntMatrix {
        let Basis::Torsion { window, lift } = &self.basis else {
            panic!("lifted() on a rational subgroup");
        };
        assert!(width >= *window);
        let m = BigInt::from(self.ambient.modulus().expect("torsion"));
        let mut out = lift.pad_cols(width);
        let extra = IntMatrix::from_rows(
            width,
            (*window..width)
                .map(|i| {
                    let mut r = vec![BigInt::zero(); width];
                    r[i] = m.clone();
                    r
                })
                .collect(),
        );
        out = out.stack(&extra);
        out
    }
}

impl fmt::Display for FgSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens = self.generators();
        write!(f, "<")?;
        for (i, g) in gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

fn torsion_row(x: &Element, width: usize) -> Vec<BigInt> {
    let Element::Torsion(map) = x else { unreachable!("torsion_row on rational element") };
    let mut row = vec![BigInt::zero(); width];
    for (&i, &r) in map {
        row[i] = BigInt::from(r);
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Ambient {
        Ambient::torsion_sum(2).unwrap()
    }

    fn q1() -> Ambient {
        Ambient::rational(1).unwrap()
    }

    fn e(i: usize) -> Element {
        Element::torsion(2, [(i, 1)])
    }

    fn q(p: i64, d: i64) -> Element {
        Element::rational(&[(p, d)])
    }

    #[test]
    fn example_subgroup_h() {
        let h = subgroup(z2(), &[e(0)]).unwrap();
        assert!(h.contains(&e(0)).unwrap());
        assert!(!h.contains(&e(1)).unwrap());
        assert_eq!(h.order(), Cardinality::finite(2u32));
        assert_eq!(h.generators(), vec![e(0)]);
    }

    #[test]
    fn empty_generators_give_zero() {
        let z = subgroup(q1(), &[]).unwrap();
        assert!(z.is_zero());
        assert_eq!(z, FgSubgroup::zero(q1()));
        assert!(z.contains(&q1().zero()).unwrap());
        assert_eq!(z.order(), Cardinality::one());
    }

    #[test]
    fn cyclic_rational_subgroup() {
        let h = subgroup(q1(), &[q(1, 1), q(3, 2)]).unwrap();
        assert_eq!(h, subgroup(q1(), &[q(1, 2)]).unwrap());
        assert!(h.contains(&q(3, 2)).unwrap());
        assert!(!h.contains(&q(1, 4)).unwrap());
    }

    #[test]
    fn sum_cases() {
        let h = subgroup(z2(), &[e(0)]).unwrap();
        assert_eq!(h.sum(&h).unwrap(), h);
        let h1 = subgroup(z2(), &[e(1)]).unwrap();
        let hp = h.sum(&h1).unwrap();
        assert_eq!(hp.order(), Cardinality::finite(4u32));
        assert!(h.is_subgroup_of(&hp).unwrap());
        assert!(!hp.is_subgroup_of(&h).unwrap());

        let z = subgroup(q1(), &[q(1, 1)]).unwrap();
        let z32 = subgroup(q1(), &[q(3, 2)]).unwrap();
        assert_eq!(z.sum(&z32).unwrap(), subgroup(q1(), &[q(1, 2)]).unwrap());
        assert!(!z.is_subgroup_of(&z32).unwrap());
    }

    #[test]
    fn quotient_cases() {
        let quarter = subgroup(q1(), &[q(1, 4)]).unwrap();
        let z = subgroup(q1(), &[q(1, 1)]).unwrap();
        assert_eq!(quotient_index(&quarter, &z).unwrap(), Cardinality::finite(4u32));
        assert_eq!(quotient_index(&z, &z).unwrap(), Cardinality::one());
        assert!(quotient_index(&z, &quarter).is_err());
        assert_eq!(z.order(), Cardinality::Infinite);

        let zero = FgSubgroup::zero(q1());
        assert_eq!(quotient_index(&z, &zero).unwrap(), Cardinality::Infinite);
    }

    #[test]
    fn torsion_quotient_with_different_windows() {
        let hp = subgroup(z2(), &[e(0), e(1)]).unwrap();
        let t3: Vec<Element> = (0..6).map(e).collect();
        let k = subgroup(z2(), &t3).unwrap();
        assert_eq!(quotient_index(&k, &hp).unwrap(), Cardinality::finite(16u32));
    }

    #[test]
    fn window_is_trimmed_and_not_part_of_identity() {
        let a = subgroup(z2(), &[e(0), Element::torsion(2, [(0, 1), (5, 1)])]).unwrap();
        let b = subgroup(z2(), &[e(0), e(5)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.window(), Some(6));
        // generators that cancel beyond index 2
        let c = subgroup(z2(), &[Element::torsion(2, [(0, 1), (3, 1)]), Element::torsion(2, [(3, 1)])]).unwrap();
        assert_eq!(c, subgroup(z2(), &[e(0), e(3)]).unwrap());
    }

    #[test]
    fn composite_modulus_order() {
        let z6 = Ambient::torsion_sum(6).unwrap();
        let h = subgroup(z6, &[Element::torsion(6, [(0, 2), (1, 3)]), Element::torsion(6, [(1, 3)])]).unwrap();
        // <2e0> x <3e1>: order 3 * 2
        assert_eq!(h.order(), Cardinality::finite(6u32));
        assert!(h.contains(&Element::torsion(6, [(0, 4)])).unwrap());
        assert!(!h.contains(&Element::torsion(6, [(0, 1)])).unwrap());
    }

    #[test]
    fn mismatched_ambients() {
        let h = subgroup(z2(), &[e(0)]).unwrap();
        let z = subgroup(q1(), &[q(1, 1)]).unwrap();
        assert!(matches!(h.sum(&z), Err(Error::AmbientMismatch { .. })));
        assert!(h.contains(&q(1, 1)).is_err());
        assert!(subgroup(Ambient::rational(2).unwrap(), &[q(1, 1)]).is_err());
    }

    #[test]
    fn invalid_residue_rejected() {
        let bad = Element::Torsion(BTreeMap::from([(0, 2)]));
        assert!(matches!(subgroup(z2(), &[bad]), Err(Error::InvalidElement(_))));
    }
}
