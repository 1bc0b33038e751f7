mod common;

use proptest::prelude::*;
use rand::Rng;

use common::{random_ambient_endo, random_element, random_subgroup, rng};
use entropy_lab::endo::{power, EndoPower};
use entropy_lab::groups::{quotient_index, subgroup, Ambient, FgSubgroup};

fn ambient_and_rng(seed: u64, torsion: bool) -> (Ambient, rand_chacha::ChaCha8Rng) {
    let mut r = rng(seed);
    let ambient = if torsion {
        Ambient::torsion_sum(*[2u64, 3, 4, 6].get(r.gen_range(0..4)).unwrap()).unwrap()
    } else {
        Ambient::rational(r.gen_range(1..=3)).unwrap()
    };
    (ambient, r)
}

fn extend_randomly(r: &mut impl Rng, h: &FgSubgroup) -> FgSubgroup {
    let extra: Vec<_> = (0..r.gen_range(0..=2)).map(|_| random_element(r, h.ambient(), 4)).collect();
    h.extend(&extra).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_generators_regenerate(seed in any::<u64>(), torsion in any::<bool>()) {
        let (ambient, mut r) = ambient_and_rng(seed, torsion);
        let h = random_subgroup(&mut r, ambient, 4, 4);
        let again = subgroup(ambient, &h.generators()).unwrap();
        prop_assert_eq!(&again, &h);
        prop_assert_eq!(again.generators(), h.generators());
    }

    #[test]
    fn index_multiplicative_on_chains(seed in any::<u64>(), torsion in any::<bool>()) {
        let (ambient, mut r) = ambient_and_rng(seed, torsion);
        let h = random_subgroup(&mut r, ambient, 2, 4);
        let k = extend_randomly(&mut r, &h);
        let l = extend_randomly(&mut r, &k);
        let lh = quotient_index(&l, &h).unwrap();
        let lk = quotient_index(&l, &k).unwrap();
        let kh = quotient_index(&k, &h).unwrap();
        if lk.is_finite() && kh.is_finite() {
            prop_assert_eq!(lh, &lk * &kh);
        } else {
            prop_assert!(!lh.is_finite());
        }
    }

    #[test]
    fn sum_is_least_upper_bound(seed in any::<u64>(), torsion in any::<bool>()) {
        let (ambient, mut r) = ambient_and_rng(seed, torsion);
        let h = random_subgroup(&mut r, ambient, 3, 4);
        let k = random_subgroup(&mut r, ambient, 3, 4);
        let s = h.sum(&k).unwrap();
        prop_assert!(h.is_subgroup_of(&s).unwrap());
        prop_assert!(k.is_subgroup_of(&s).unwrap());
        for g in s.generators() {
            let mut gens = h.generators();
            gens.extend(k.generators());
            prop_assert!(subgroup(ambient, &gens).unwrap().contains(&g).unwrap());
        }
        let l = extend_randomly(&mut r, &s);
        if h.is_subgroup_of(&l).unwrap() && k.is_subgroup_of(&l).unwrap() {
            prop_assert!(s.is_subgroup_of(&l).unwrap());
        }
        prop_assert_eq!(&s, &k.sum(&h).unwrap());
    }

    #[test]
    fn endo_is_additive(seed in any::<u64>(), torsion in any::<bool>()) {
        let mut r = rng(seed);
        let (ambient, f) = random_ambient_endo(&mut r, torsion);
        let f = EndoPower::from(f);
        let x = random_element(&mut r, ambient, 5);
        let y = random_element(&mut r, ambient, 5);
        let lhs = f.apply(&ambient.add(&x, &y).unwrap()).unwrap();
        let rhs = ambient.add(&f.apply(&x).unwrap(), &f.apply(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn image_commutes_with_sum(seed in any::<u64>(), torsion in any::<bool>()) {
        let mut r = rng(seed);
        let (ambient, f) = random_ambient_endo(&mut r, torsion);
        let f = EndoPower::from(f);
        let h = random_subgroup(&mut r, ambient, 2, 4);
        let k = random_subgroup(&mut r, ambient, 2, 4);
        let lhs = f.image(&h.sum(&k).unwrap()).unwrap();
        let rhs = f.image(&h).unwrap().sum(&f.image(&k).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn powers_compose(seed in any::<u64>(), torsion in any::<bool>(), a in 1u32..=4, b in 1u32..=4) {
        let mut r = rng(seed);
        let (ambient, f) = random_ambient_endo(&mut r, torsion);
        let x = random_element(&mut r, ambient, 4);
        let fa = power(&f, a).unwrap();
        let fb = power(&f, b).unwrap();
        let fab = power(&f, a + b).unwrap();
        prop_assert_eq!(fab.apply(&x).unwrap(), fb.apply(&fa.apply(&x).unwrap()).unwrap());
    }
}
