//! Imaginary quadratic orders, their class groups, and the ring class tower
//! of `p`-power conductor with its characters.

pub mod characters;
pub mod forms;
pub mod group;
pub mod tower;

pub use characters::{
    character_sum, characters, decompose, g0_characters, is_primitive, p_set, RingClassCharacter,
};
pub use forms::{compose, prime_form, reduce_form, reduced_forms, Form, KElement, QuadraticOrder};
pub use group::{class_group, AbelianGroup, ClassGroupSummary, RingClassGroup};
pub use tower::{
    genus_g1, required_height, tau_form, torsion_g0, tower, z_subgroup, GenusReport, RingClassTower,
    TowerSubgroups, ZSubgroup,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use num_bigint::BigInt;
    use std::collections::BTreeSet;
    use std::sync::OnceLock;

    fn flagship() -> &'static (RingClassTower, TowerSubgroups) {
        static T: OnceLock<(RingClassTower, TowerSubgroups)> = OnceLock::new();
        T.get_or_init(|| TowerSubgroups::for_level(-67, 3, 2).unwrap())
    }

    fn group(dk: i64, c: u64) -> RingClassGroup {
        class_group(&QuadraticOrder::new(dk, c).unwrap()).unwrap()
    }

    #[test]
    fn class_groups_match_enumeration() {
        assert_eq!(group(-67, 1).len(), 1);
        let g = group(-67, 3);
        assert_eq!(g.len(), 4);
        assert_eq!(g.invariants(), &[4]);
        let g = group(-56, 1);
        assert_eq!(g.invariants(), &[4]);
        for (dk, c) in [(-4, 5), (-3, 7), (-23, 3), (-84, 1), (-420, 1), (-67, 27), (-7, 13)] {
            let g = group(dk, c);
            let disc = BigInt::from(dk) * BigInt::from(c * c);
            assert_eq!(g.len(), reduced_forms(&disc).len(), "d_K = {dk}, c = {c}");
            assert_eq!(g.invariants().iter().product::<u64>() as usize, g.len());
            assert!(g.invariants().windows(2).all(|w| w[1] % w[0] == 0));
        }
        // (ℤ/2)^3 for -420
        assert_eq!(group(-420, 1).invariants(), &[2, 2, 2]);
    }

    #[test]
    fn discrete_logs_respect_composition() {
        let g = group(-23, 9);
        for x in 0..g.len() {
            for y in 0..g.len() {
                let f = compose(g.form(x), g.form(y));
                assert_eq!(g.index_of(&f), Some(g.mul(x, y)));
            }
        }
    }

    #[test]
    fn flagship_tower() {
        let (t, s) = flagship();
        assert_eq!(&t.orders()[..4], &[1, 4, 12, 36]);
        assert_eq!(s.g0.len(), 4);
        assert_eq!(s.h_order, 3);
        assert_eq!(t.level(2).invariants(), &[12]);
        assert_eq!(tower(-7, 13, 1).unwrap().order(1), 14);
        for n in 2..=t.n_max() {
            assert_eq!(t.order(n), 3 * t.order(n - 1));
            assert_eq!(t.kernel(n, 1).len(), 3);
        }
    }

    #[test]
    fn g0_identification() {
        let (t, _) = flagship();
        assert_eq!(torsion_g0(t, 1).unwrap().len(), 4);
        assert!(matches!(torsion_g0(t, 0), Err(Error::NotStabilized { .. })));
        // 3 | h(-107): G₀ has a 3-part, stable from level 1 on
        let t = tower(-107, 3, 7).unwrap();
        assert!(torsion_g0(&t, 0).is_err());
        for n in 1..=2 {
            let g0 = torsion_g0(&t, n).unwrap();
            assert_eq!(g0.len(), 6);
            assert!(g0.iter().any(|&x| t.level(n).group().element_order(x) == 3));
        }
        assert_eq!(t.level(2).invariants(), &[3, 6]);
    }

    #[test]
    fn genus_subgroup() {
        let (t, s) = flagship();
        assert_eq!(s.g1.generators.len(), 1);
        assert_eq!(s.g1.subgroup.len(), 2);
        assert!(s.g1.subgroup.iter().all(|x| s.g0.contains(x)));
        let t56 = tower(-56, 3, 1).unwrap();
        let r = genus_g1(&t56, 1).unwrap();
        assert_eq!(r.generators.len(), 2);
        let g = t56.level(1);
        assert!(r.subgroup.iter().all(|&x| g.group().element_order(x) <= 2));
        let _ = t;
    }

    #[test]
    fn z_labelling() {
        let (t, _) = flagship();
        for n in 2..=4 {
            let z = z_subgroup(t, n, 1).unwrap();
            assert_eq!(z.elements.len(), 3);
            assert_eq!(z.tau(0), 0);
        }
        let z = z_subgroup(t, 4, 2).unwrap();
        let g = t.level(4);
        assert_eq!(z.elements.len(), 9);
        for a in 0..9 {
            for b in 0..9 {
                assert_eq!(g.mul(z.tau(a), z.tau(b)), z.tau(a + b));
            }
        }
        assert!(z_subgroup(t, 3, 2).is_err());
    }

    #[test]
    fn splitting_and_characters() {
        let (t, s) = flagship();
        let g = t.level(2);
        let chars = characters(g, 2);
        assert_eq!(chars.len(), g.len());
        let distinct: BTreeSet<_> = chars.iter().collect();
        assert_eq!(distinct.len(), chars.len());
        for chi in &chars {
            assert_eq!(character_sum(chi, g).is_zero(), !chi.is_trivial());
            let (c0, c1) = decompose(chi, g, s);
            assert_eq!(&c0.mul(&c1), chi);
            assert_eq!(c1.value_exp(g, s.g0[1]), 0);
            assert_eq!(c0.value_exp(g, s.complement), 0);
        }
        assert!(!is_primitive(&RingClassCharacter::trivial(g, 2), t));
        let g0c = g0_characters(g, s);
        assert_eq!(g0c.len(), 4);
        for chi0 in &g0c {
            assert_eq!(p_set(t, s, chi0).unwrap().len(), 2);
        }
    }
}
