//! Random instance generators shared by the property suites and the
//! acceptance runner.
#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use entropy_lab::endo::{Endo, EndoPower};
use entropy_lab::entropy::find_inert_trajectory_level;
use entropy_lab::groups::{subgroup, Ambient, Element, FgSubgroup};
use entropy_lab::linalg::{IntMatrix, RatMatrix};
use entropy_lab::oracle::DEFAULT_CAP;

pub const TORSION_MODULI: &[u64] = &[2, 3, 4, 5, 6];
const DENOMINATORS: &[i64] = &[1, 1, 2, 3];

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_fraction(rng: &mut impl Rng, span: i64) -> BigRational {
    let p = rng.gen_range(-span..=span);
    let q = *DENOMINATORS.choose(rng).unwrap();
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn random_int_matrix(rng: &mut impl Rng, rows: usize, cols: usize, span: i64) -> IntMatrix {
    IntMatrix::from_rows(
        cols,
        (0..rows).map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-span..=span))).collect()).collect(),
    )
}

/// A stencil on `⊕ Z/m` with one to three taps at offsets in `-1..=2`.
pub fn random_stencil(rng: &mut impl Rng, modulus: u64) -> Endo {
    let mut offsets = [-1i64, 0, 1, 2];
    offsets.shuffle(rng);
    let taps = rng.gen_range(1..=3);
    let m = modulus as i64;
    Endo::stencil(modulus, offsets[..taps].iter().map(|&o| (o, rng.gen_range(1..m)))).unwrap()
}

/// A small-entry rational matrix of rank at most 3.
pub fn random_rational_endo(rng: &mut impl Rng, rank: usize) -> Endo {
    let rows = (0..rank).map(|_| (0..rank).map(|_| random_fraction(rng, 3)).collect()).collect();
    Endo::matrix(RatMatrix::from_rows(rank, rows)).unwrap()
}

pub fn random_element(rng: &mut impl Rng, ambient: Ambient, window: usize) -> Element {
    match ambient {
        Ambient::Rational { rank } => Element::Rational((0..rank).map(|_| random_fraction(rng, 4)).collect()),
        Ambient::TorsionSum { modulus } => {
            let m = modulus as i64;
            Element::torsion(modulus, (0..window).map(|i| (i, rng.gen_range(0..m))))
        }
    }
}

pub fn random_subgroup(rng: &mut impl Rng, ambient: Ambient, max_gens: usize, window: usize) -> FgSubgroup {
    let count = rng.gen_range(1..=max_gens);
    let gens: Vec<Element> = (0..count).map(|_| random_element(rng, ambient, window)).collect();
    FgSubgroup::generated(ambient, &gens).unwrap()
}

pub fn random_ambient_endo(rng: &mut impl Rng, torsion: bool) -> (Ambient, Endo) {
    if torsion {
        let modulus = *TORSION_MODULI.choose(rng).unwrap();
        (Ambient::torsion_sum(modulus).unwrap(), random_stencil(rng, modulus))
    } else {
        let rank = rng.gen_range(1..=3);
        (Ambient::rational(rank).unwrap(), random_rational_endo(rng, rank))
    }
}

/// `(φ, F, level)` with a nonzero `F` whose trajectory has an inert level
/// at most `max_m`. Draws without one are discarded.
pub fn random_trajectory(rng: &mut impl Rng, torsion: bool, max_m: usize) -> (Endo, FgSubgroup, usize) {
    loop {
        let (ambient, phi) = random_ambient_endo(rng, torsion);
        let fgen = random_subgroup(rng, ambient, 2, 3);
        if fgen.is_zero() {
            continue;
        }
        if let Some((level, _)) = find_inert_trajectory_level(&EndoPower::from(phi.clone()), &fgen, max_m).unwrap() {
            return (phi, fgen, level);
        }
    }
}

/// A nested pair `h ⊆ k` in `(Z/m)^width` with `|k| <= cap`.
pub fn nested_pair(r: &mut impl Rng, modulus: u64, width: usize) -> (FgSubgroup, FgSubgroup) {
    let ambient = Ambient::torsion_sum(modulus).unwrap();
    loop {
        let gens: Vec<Element> = (0..r.gen_range(1..=4)).map(|_| random_element(r, ambient, width)).collect();
        let k = subgroup(ambient, &gens).unwrap();
        if k.order().as_finite().is_none_or(|n| *n > BigUint::from(DEFAULT_CAP)) {
            continue;
        }
        let sub: Vec<Element> = gens.iter().filter(|_| r.gen_bool(0.5)).cloned().collect();
        let mut h = subgroup(ambient, &sub).unwrap();
        if r.gen_bool(0.3) {
            // A multiple of a generator keeps h inside k without being a subset of gens.
            let g = &gens[0];
            let twice = ambient.add(g, g).unwrap();
            h = h.extend(&[twice]).unwrap();
        }
        return (h, k);
    }
}

/// Determinant by cofactor expansion; only for small matrices.
pub fn det(m: &IntMatrix) -> BigInt {
    let n = m.rows();
    assert!(m.is_square());
    if n == 0 {
        return BigInt::from(1);
    }
    if n == 1 {
        return m[(0, 0)].clone();
    }
    let mut total = BigInt::from(0);
    for j in 0..n {
        let minor = IntMatrix::from_rows(
            n - 1,
            (1..n).map(|i| (0..n).filter(|&c| c != j).map(|c| m[(i, c)].clone()).collect()).collect(),
        );
        let term = &m[(0, j)] * det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}
