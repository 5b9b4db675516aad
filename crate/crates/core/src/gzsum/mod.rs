//! Gross–Zagier sums `a(x, χ)` on the CM orbit, their trace down to `E_λ`,
//! and the valuation experiments built on them.

pub mod instance;
pub mod local;
pub mod trace;

pub use instance::{
    gz_average, gz_sum, gz_sum_unchecked, gz_sum_with, GZBase, GZInstance, GZValue, TraceParameters, EIGEN_BOUND,
};
pub use local::{
    embed_local, factorization_holds, k_p, lambda_factors, lambda_matrix, matrix_check_kp,
    matrix_check_lambda_factorization, unit_char_sum, unit_char_sum_brute, Mat2,
};
pub use trace::{
    equivariance_pairs, main_theorem_report, main_theorem_scan, mu_nu_experiment, psi_m_sum, psi_md_sum,
    reduced_sum, residue_extension_degree, trace_direct, trace_grid, trace_identity_check,
    trace_identity_check_with_m, trace_reduced, valuation_table, MainTheoremReport, MuNuReport, ScanRow,
    TraceReport, ValuationRow,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::ringclass::{p_set, tower, z_subgroup, RingClassCharacter};
    use num_bigint::BigInt;
    use std::sync::{Arc, OnceLock};

    fn base() -> Arc<GZBase> {
        static B: OnceLock<Arc<GZBase>> = OnceLock::new();
        B.get_or_init(|| Arc::new(GZBase::flagship().unwrap())).clone()
    }

    fn inst(l: u64, n: u32) -> &'static GZInstance {
        static I: OnceLock<Vec<((u64, u32), GZInstance)>> = OnceLock::new();
        let all = I.get_or_init(|| {
            [(5, 1), (5, 2), (7, 1), (7, 2)]
                .into_iter()
                .map(|(l, n)| ((l, n), GZInstance::new(base(), l, n, 10).unwrap()))
                .collect()
        });
        &all.iter().find(|(k, _)| *k == (l, n)).unwrap().1
    }

    fn primitive(i: &GZInstance) -> Vec<RingClassCharacter> {
        i.characters.iter().filter(|c| i.is_primitive(c)).cloned().collect()
    }

    #[test]
    fn trivial_character_sums_the_orbit() {
        let i = inst(5, 2);
        let one = RingClassCharacter::trivial(i.group(), 2);
        let total: BigInt = i.psi.iter().sum();
        for s in 0..i.orbit.len() {
            let a = gz_sum_unchecked(i, s, &one).unwrap();
            assert_eq!(a.value, crate::cyclo::CyclotomicInteger::from_int(i.modulus(), &total));
        }
        assert!(matches!(gz_sum(i, 0, &one), Err(Error::ConductorMismatch { chi: 0, point: 2 })));
        assert!(gz_sum_unchecked(i, i.orbit.len(), &one).is_err());
    }

    #[test]
    fn equivariance_under_generators() {
        for n in 1..=2 {
            let i = inst(5, n);
            for chi in primitive(i) {
                for s in 0..i.orbit.len() {
                    for (lhs, rhs) in equivariance_pairs(i, s, &chi).unwrap() {
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn constant_theta_is_orthogonal() {
        let i = inst(7, 2);
        let c = i.with_constant_theta();
        for chi in &i.characters {
            let a = gz_sum_with(i, &c, 3, chi);
            assert_eq!(a.is_zero(), !chi.is_trivial());
            if !chi.is_trivial() {
                assert_eq!(i.ctx.ord_with_ladder(&a).unwrap(), crate::cyclo::Valuation::BottomedOut);
            }
        }
    }

    #[test]
    fn valuations_respect_nu() {
        for n in 1..=2 {
            let i = inst(5, n);
            let rows = valuation_table(i).unwrap();
            assert_eq!(rows.len(), i.characters.len() * i.orbit.len());
            for r in rows.iter().filter(|r| r.primitive) {
                assert!(r.ord.is_none_or(|v| v >= i.nu), "{r:?}");
            }
            // ord is constant along the orbit
            for c in 0..i.characters.len() {
                let ords: Vec<_> = rows.iter().filter(|r| r.chi == c).map(|r| r.ord).collect();
                assert!(ords.windows(2).all(|w| w[0] == w[1]));
            }
        }
    }

    #[test]
    fn averages_are_linear() {
        let i = inst(7, 2);
        for chi0 in i.g0_characters() {
            let ps = p_set(&i.tower, &i.subs, &chi0).unwrap();
            assert_eq!(ps.len(), 2);
            let b = gz_average(i, 1, &chi0).unwrap();
            let direct = ps
                .iter()
                .fold(crate::cyclo::CyclotomicInteger::zero(i.modulus()), |acc, chi| {
                    acc.add(&gz_sum(i, 1, chi).unwrap().value)
                });
            assert_eq!(b.value, direct);
        }
        // a singleton P-set at level one
        let i = inst(7, 1);
        for chi0 in i.g0_characters().into_iter().filter(|c| !c.is_trivial()) {
            assert_eq!(gz_average(i, 0, &chi0).unwrap().value, gz_sum(i, 0, &chi0).unwrap().value);
        }
    }

    #[test]
    fn psi_sums_by_term_count() {
        let i = inst(7, 2);
        let g = i.group();
        let one = RingClassCharacter::trivial(g, 2);
        let z = &i.z[0];
        assert_eq!(z.labels.len(), 3);
        for s in 0..i.orbit.len() {
            let plain: BigInt = z.labels.iter().map(|&t| i.psi_at(t, s)).sum();
            let got = psi_m_sum(i, s, &one, 1).unwrap();
            assert_eq!(got, crate::cyclo::CyclotomicInteger::from_int(i.modulus(), &plain));
            // |G₁/G₂| = 2
            let chi0 = &i.g0_characters()[1];
            let chi1 = &primitive(i).iter().map(|c| i.decompose(c).1).next().unwrap();
            let two = psi_md_sum(i, s, chi0, chi1, 1).unwrap();
            let gen = i.subs.g1.subgroup[1];
            let expect = psi_m_sum(i, s, chi1, 1).unwrap().add(
                &crate::cyclo::CyclotomicInteger::zeta_pow(i.modulus(), i.chi_exp(chi0, gen) as i64)
                    .mul(&psi_m_sum(i, i.act(gen, s), chi1, 1).unwrap()),
            );
            assert_eq!(two, expect);
        }
        assert!(psi_m_sum(i, 0, &one, 2).is_err());
    }

    #[test]
    fn direct_trace_matches_frobenius_trace() {
        for (l, n) in [(5, 2), (7, 2)] {
            let i = inst(l, n);
            let field = i.ctx.field();
            for chi in primitive(i) {
                let (_, chi1) = i.decompose(&chi);
                let d = residue_extension_degree(i, &chi1);
                for s in [0, 5] {
                    let a = gz_sum(i, s, &chi).unwrap();
                    let frob = field.trace(&i.ctx.residue(&a.value), &i.e_lambda_order, d);
                    assert_eq!(trace_direct(i, s, &chi).unwrap(), frob);
                    if d == 1 {
                        assert_eq!(frob, i.ctx.residue(&a.value));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_reduction_on_the_flagship_grid() {
        for l in [5, 7] {
            let grid = trace_grid(inst(l, 2)).unwrap();
            assert_eq!(grid.len(), 8 * 12);
            assert!(grid.iter().all(|r| r.equal && r.psi_evaluations == 12 && r.m == 1));
        }
        // θ ≡ const mod 5, so at l = 5 both sides vanish
        assert!(trace_grid(inst(5, 2)).unwrap().iter().all(|r| r.lhs.iter().all(|&c| c == 0)));
        assert!(trace_grid(inst(7, 2)).unwrap().iter().any(|r| r.lhs.iter().any(|&c| c != 0)));
    }

    #[test]
    fn main_theorem_at_levels_one_and_two() {
        for l in [5, 7] {
            for n in 1..=2 {
                let i = inst(l, n);
                let rep = main_theorem_report(i).unwrap();
                assert!(rep.all_exist(), "l = {l}, n = {n}: {rep:?}");
                assert_eq!(rep.rows.len(), if n == 1 { 4 } else { 8 });
            }
        }
        let p = inst(5, 2).trace_parameters(&inst(5, 2).g0_characters()[1]);
        assert_eq!((p.o, p.r, p.m, p.k_exponent, p.s), (0, 1, 1, 2, None));
    }

    #[test]
    fn mu_and_nu() {
        let r5 = mu_nu_experiment(&[inst(5, 1), inst(5, 2)]).unwrap();
        assert_eq!((r5.mu, r5.nu, r5.nu_plus_one_is_mu), (2, 1, true));
        assert!(r5.achieving_primes.contains(&3));
        let r7 = mu_nu_experiment(&[inst(7, 1)]).unwrap();
        assert_eq!((r7.mu, r7.nu), (1, 0));
    }

    #[test]
    fn unit_character_sums() {
        for (dk, p, n, m) in [(-67, 3, 2, 1), (-67, 3, 4, 2), (-67, 5, 2, 1)] {
            let t = tower(dk, p, n).unwrap();
            let g = t.level(n);
            let z = z_subgroup(&t, n, m).unwrap();
            let pm = p.pow(m);
            let faithful: Vec<_> = crate::ringclass::characters(g, n)
                .into_iter()
                .filter(|c| c.value_exp(g, z.tau(pm / p)) != 0)
                .collect();
            assert!(!faithful.is_empty());
            for chi in &faithful {
                for a in 0..pm {
                    let brute = unit_char_sum_brute(a, &z, chi, g, p).unwrap();
                    let closed = crate::cyclo::CyclotomicInteger::from_int(chi.modulus(), &unit_char_sum(a, m, p));
                    assert_eq!(brute, closed, "p = {p}, m = {m}, a = {a}");
                }
            }
            let trivial = RingClassCharacter::trivial(g, n);
            assert!(unit_char_sum_brute(1, &z, &trivial, g, p).is_err());
        }
        assert_eq!(unit_char_sum(0, 2, 3), BigInt::from(6));
        assert_eq!(unit_char_sum(3, 2, 3), BigInt::from(-3));
        assert_eq!(unit_char_sum(4, 2, 3), BigInt::from(0));
    }

    #[test]
    fn local_matrix_identities() {
        let (tr, nm) = crate::gross::min_poly(-67, 1);
        for delta in 0..=1 {
            for n in delta..=4 {
                assert!(matrix_check_kp(n, delta, 3, &tr, &nm));
                for m in 0..=n.min(2) {
                    for a in 0..3u64.pow(m) {
                        assert!(matrix_check_lambda_factorization(a, n, m, delta, 3, &tr, &nm));
                    }
                }
            }
        }
        let (u, lower) = lambda_factors(0, 3, 1, 0, 3, &tr, &nm);
        assert_eq!((u, lower), (Mat2::identity(), Mat2::identity()));
        let (u, mut lower) = lambda_factors(2, 3, 1, 1, 3, &tr, &nm);
        lower.0[0][0] += num_rational::BigRational::from_integer(BigInt::from(1));
        assert!(!factorization_holds(2, 3, 1, 1, 3, &tr, &nm, &u, &lower));
        assert!(!matrix_check_kp(0, 1, 3, &tr, &nm));
    }
}
