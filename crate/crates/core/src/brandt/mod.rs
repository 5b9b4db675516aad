//! Brandt matrices on the class set of an Eichler order, the theta eigenform
//! attached to an elliptic curve, and its congruences modulo λ.

pub mod curve;
pub mod eisenstein;
pub mod hecke;

pub use curve::EllipticCurve;
pub use eisenstein::{
    eisenstein_profile, hypothesis_checks, is_eisenstein_mod, is_exceptional_mod, lambda_divides, mu_constant,
    norm_classes, nu_constant, EisensteinProfile, HypothesisReport, MuReport, NormClassSet,
};
pub use hecke::{
    brandt_matrix, commutes, hecke_eigenforms, is_weighted_self_adjoint, row_sums,
    satisfies_square_recursion, BrandtMatrix, EigenReport, ThetaForm, ThetaTable,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::LambdaContext;
    use crate::numerics::arith::{factor, primes_up_to};
    use crate::quat::{algebra_from_ramification, eichler_order, maximal_order, right_ideal_classes};
    use crate::quat::IdealClassSet;
    use num_bigint::BigInt;
    use std::sync::OnceLock;

    fn classes(d: u64, m: u64) -> IdealClassSet {
        let ram: Vec<u64> = factor(d).iter().map(|p| p.0).collect();
        let alg = algebra_from_ramification(&ram, 200).unwrap();
        let o = maximal_order(&alg).unwrap();
        right_ideal_classes(&eichler_order(&o, m).unwrap()).unwrap()
    }

    fn disc11() -> &'static (IdealClassSet, ThetaTable) {
        static CELL: OnceLock<(IdealClassSet, ThetaTable)> = OnceLock::new();
        CELL.get_or_init(|| {
            let s = classes(11, 1);
            let t = ThetaTable::new(&s, 60).unwrap();
            (s, t)
        })
    }

    fn theta11() -> ThetaForm {
        let (_, t) = disc11();
        let mats: Vec<BrandtMatrix> = primes_up_to(50)
            .into_iter()
            .filter(|&q| q != 11)
            .map(|q| t.brandt(q).unwrap())
            .collect();
        let rep = hecke_eigenforms(&mats).unwrap();
        assert_eq!(rep.forms.len(), 1);
        assert!(rep.unresolved.is_empty());
        rep.forms[0].clone()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn disc11_b2() {
        let (s, t) = disc11();
        let b2 = t.brandt(2).unwrap();
        assert_eq!(row_sums(&b2), big(&[3, 3]));
        assert!(is_weighted_self_adjoint(&b2, s.weights()));
        let tr = &b2.matrix[(0, 0)] + &b2.matrix[(1, 1)];
        let det = &b2.matrix[(0, 0)] * &b2.matrix[(1, 1)] - &b2.matrix[(0, 1)] * &b2.matrix[(1, 0)];
        // eigenvalues 3 and −2
        assert_eq!(tr, BigInt::from(1));
        assert_eq!(det, BigInt::from(-6));
        assert!(commutes(&b2, &t.brandt(3).unwrap()));
    }

    #[test]
    fn disc11_structure() {
        let (s, t) = disc11();
        let qs: Vec<u64> = primes_up_to(53).into_iter().filter(|&q| q != 11).collect();
        let mats: Vec<BrandtMatrix> = qs.iter().map(|&q| t.brandt(q).unwrap()).collect();
        for b in &mats {
            assert!(row_sums(b).iter().all(|x| *x == BigInt::from(b.n + 1)));
            assert!(is_weighted_self_adjoint(b, s.weights()));
        }
        for a in &mats {
            for b in &mats {
                assert!(commutes(a, b));
            }
        }
        for q in [2u64, 3, 5, 7] {
            assert!(satisfies_square_recursion(&t.brandt(q).unwrap(), &t.brandt(q * q).unwrap()));
        }
    }

    #[test]
    fn single_class() {
        let s = classes(2, 1);
        let b3 = brandt_matrix(&s, 3).unwrap();
        assert_eq!(b3.matrix[(0, 0)], BigInt::from(4));
        let rep = hecke_eigenforms(&[b3]).unwrap();
        assert!(rep.forms.is_empty());
    }

    #[test]
    fn eigenvalues_match_point_counts() {
        let theta = theta11();
        assert!(!theta.is_constant());
        let mut sorted = theta.values.clone();
        sorted.sort();
        assert!(sorted == big(&[-3, 2]) || sorted == big(&[-2, 3]));
        let e = EllipticCurve::curve_11a();
        for q in primes_up_to(50).into_iter().filter(|&q| q != 11) {
            assert_eq!(theta.eigenvalue(q), Some(e.aq_pointcount(q).unwrap()), "q = {q}");
        }
    }

    #[test]
    fn mu_nu_flagship() {
        let theta = theta11();
        let n_h = norm_classes(&disc11().0).unwrap();
        assert_eq!(n_h.size, 1);
        let c5 = LambdaContext::new(5, 3, 1, 8).unwrap();
        let mu5 = mu_constant(&theta, &c5, 11, -67, 47).unwrap();
        assert_eq!(mu5.mu, 2);
        assert!(mu5.achieving_primes.contains(&3));
        for (v, o) in &mu5.per_prime {
            assert!(o.unwrap() + 1 >= mu5.mu, "v = {v}");
        }
        assert_eq!(nu_constant(&theta, &c5, &n_h).unwrap(), 1);
        let c7 = LambdaContext::new(7, 3, 1, 8).unwrap();
        assert_eq!(mu_constant(&theta, &c7, 11, -67, 47).unwrap().mu, 1);
        assert_eq!(nu_constant(&theta, &c7, &n_h).unwrap(), 0);
        assert!(mu_constant(&theta, &c5, 11, -67, 0).is_err());
        let p = eisenstein_profile(&theta, &c5, &n_h, 11, -67, 47).unwrap();
        assert!(p.nu < p.mu);
    }

    #[test]
    fn predicates() {
        let c5 = LambdaContext::new(5, 3, 1, 8).unwrap();
        let n1 = NormClassSet::trivial(2);
        let phi = big(&[2, -3]);
        assert!(is_eisenstein_mod(&phi, 1, &c5, &n1));
        assert!(!is_eisenstein_mod(&phi, 2, &c5, &n1));
        assert!(is_eisenstein_mod(&big(&[7, 7]), 40, &c5, &n1));
        assert!(!is_exceptional_mod(&phi, 2, &c5, &n1, &[vec![0]]));
        assert!(is_exceptional_mod(&phi, 1, &c5, &n1, &[vec![0]]));
        let n3 = NormClassSet {
            size: 3,
            c_map: vec![0, 0, 1, 1, 2],
        };
        let psi = big(&[1, 2, 4, 4, 9]);
        assert!(!is_eisenstein_mod(&psi, 1, &c5, &n3));
        assert!(is_exceptional_mod(&psi, 1, &c5, &n3, &[vec![0], vec![1, 2]]));
        assert!(is_exceptional_mod(&psi, 1, &c5, &n3, &[vec![0, 1], vec![2]]));
        assert!(!is_exceptional_mod(&psi, 1, &c5, &n3, &[vec![0, 1, 2]]));
    }

    #[test]
    fn hypotheses() {
        let e = EllipticCurve::curve_11a();
        let r = hypothesis_checks(&e, -67, 3, 5, 100).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert_eq!(r.s_finite, vec![11]);
        assert_eq!(r.unit_inert_witness, Some(2));
        let r7 = hypothesis_checks(&e, -7, 3, 5, 100).unwrap();
        assert!(!r7.s_even);
        let rc = hypothesis_checks(&e, -11, 3, 5, 100).unwrap();
        assert!(!rc.coprime);
    }
}
