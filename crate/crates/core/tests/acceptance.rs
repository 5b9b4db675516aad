mod common;

use anticyclo_core::brandt::{hecke_eigenforms, BrandtMatrix, EllipticCurve, ThetaTable};
use anticyclo_core::cyclo::{residue_degree, CyclotomicInteger, LambdaContext, Valuation};
use anticyclo_core::gross::{cm_points, transitivity_report};
use anticyclo_core::gzsum::{
    equivariance_pairs, main_theorem_scan, matrix_check_kp, matrix_check_lambda_factorization, mu_nu_experiment,
    unit_char_sum, unit_char_sum_brute, valuation_table,
};
use anticyclo_core::numerics::arith::{euler_phi, factor, ord_p, primes_up_to};
use anticyclo_core::quat::{algebra_from_ramification, eichler_order, mass_check, maximal_order, right_ideal_classes};
use anticyclo_core::quat::IdealClassSet;
use anticyclo_core::ringclass::{characters, class_group, tower, z_subgroup, QuadraticOrder, RingClassCharacter};
use common::*;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn classes(d: u64, m: u64) -> IdealClassSet {
    let ram: Vec<u64> = factor(d).iter().map(|p| p.0).collect();
    let alg = algebra_from_ramification(&ram, 200).unwrap();
    right_ideal_classes(&eichler_order(&maximal_order(&alg).unwrap(), m).unwrap()).unwrap()
}

fn entry(b: &BrandtMatrix, i: usize, j: usize) -> BigInt {
    b.matrix[(i, j)].clone()
}

fn square_minus(b: &BrandtMatrix, q: u64) -> Vec<Vec<BigInt>> {
    let h = b.matrix.rows();
    (0..h)
        .map(|i| {
            (0..h)
                .map(|j| {
                    let s: BigInt = (0..h).map(|k| entry(b, i, k) * entry(b, k, j)).sum();
                    if i == j {
                        s - q
                    } else {
                        s
                    }
                })
                .collect()
        })
        .collect()
}

fn brandt_correctness() -> Check {
    let s = classes(11, 1);
    let w = s.weights();
    let qs = [2u64, 3, 5, 7, 13];
    let table = ThetaTable::new(&s, 169).map_err(|e| e.to_string())?;
    let mats: Vec<BrandtMatrix> = qs.iter().map(|&q| table.brandt(q).unwrap()).collect();
    let h = s.len();
    for b in &mats {
        for i in 0..h {
            let row: BigInt = (0..h).map(|j| entry(b, i, j)).sum();
            ensure!(row == BigInt::from(b.n + 1), "row sum of B_{} is {row}", b.n);
            for j in 0..h {
                // B_ij counts with weight 1/w_j, so w_j B_ij is symmetric
                ensure!(entry(b, i, j) * w[j] == entry(b, j, i) * w[i], "B_{} not self-adjoint", b.n);
            }
        }
        let b2 = table.brandt(b.n * b.n).unwrap();
        let expect = square_minus(b, b.n);
        for (i, row) in expect.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                ensure!(entry(&b2, i, j) == *v, "B_{} ≠ B_{}² − {}", b.n * b.n, b.n, b.n);
            }
        }
    }
    for a in &mats {
        for b in &mats {
            ensure!(a.matrix.mul(&b.matrix) == b.matrix.mul(&a.matrix), "B_{} B_{} do not commute", a.n, b.n);
        }
    }
    Ok(())
}

fn mass_certification() -> Check {
    for (d, m) in [(2u64, 1u64), (11, 1), (2, 3)] {
        let s = classes(d, m);
        ensure!(mass_check(&s).is_zero(), "mass_check({d}, {m}) = {}", mass_check(&s));
        // Σ 1/w_i against (1/12) ∏_{p|D}(p − 1) ∏_{p|M}(p + 1)
        let lhs: BigRational = s.weights().iter().map(|&x| BigRational::new(1.into(), x.into())).sum();
        let num: u64 = factor(d).iter().map(|(p, _)| p - 1).product::<u64>()
            * factor(m).iter().map(|(p, e)| (p + 1) * p.pow(e - 1)).product::<u64>();
        ensure!(lhs == BigRational::new(num.into(), 12.into()), "mass of ({d}, {m}) is {lhs}");
    }
    Ok(())
}

/// `q + 1 − #E(F_q)` by counting affine solutions of the 11a model.
fn point_count_a(q: u64) -> i64 {
    let q = q as i64;
    let mut affine = 0;
    for x in 0..q {
        let rhs = (x * x % q * x - x * x - 10 * x - 20).rem_euclid(q);
        affine += (0..q).filter(|y| (y * y + y).rem_euclid(q) == rhs).count() as i64;
    }
    q - affine
}

fn eigenvalue_oracle() -> Check {
    let s = classes(11, 1);
    let table = ThetaTable::new(&s, 50).map_err(|e| e.to_string())?;
    let good: Vec<u64> = primes_up_to(50).into_iter().filter(|&q| q != 11).collect();
    let mats: Vec<BrandtMatrix> = good.iter().map(|&q| table.brandt(q).unwrap()).collect();
    let rep = hecke_eigenforms(&mats).map_err(|e| e.to_string())?;
    let curve = EllipticCurve::curve_11a();
    let matching: Vec<_> = rep
        .forms
        .iter()
        .filter(|f| good.iter().all(|&q| f.eigenvalue(q) == Some(point_count_a(q))))
        .collect();
    ensure!(matching.len() == 1, "{} eigenforms match the point counts", matching.len());
    for &q in &good {
        ensure!(curve.aq_pointcount(q).unwrap() == point_count_a(q), "aq_pointcount({q}) disagrees");
    }
    Ok(())
}

fn mu_and_nu() -> Check {
    let r5 = mu_nu_experiment(&[&inst(5, 1), &inst(5, 2)]).map_err(|e| e.to_string())?;
    ensure!(r5.mu == 2 && r5.nu == 1, "l = 5: μ = {}, ν = {}", r5.mu, r5.nu);
    ensure!(r5.achieving_primes.contains(&3), "l = 5: 3 does not achieve μ");
    let r7 = mu_nu_experiment(&[&inst(7, 1), &inst(7, 2)]).map_err(|e| e.to_string())?;
    ensure!(r7.mu == 1 && r7.nu == 0, "l = 7: μ = {}, ν = {}", r7.mu, r7.nu);
    ensure!(r5.nu < r5.mu && r7.nu < r7.mu, "ν < μ fails");
    Ok(())
}

/// Primitive reduced forms of discriminant `d`.
fn class_number(d: i64) -> usize {
    let mut h = 0;
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    h
}

fn ring_class_towers() -> Check {
    ensure!(class_number(-67) == 1 && class_number(-603) == 4, "brute-force class numbers");
    for (dk, c, h) in [(-67, 1u64, 1usize), (-67, 3, 4)] {
        let g = class_group(&QuadraticOrder::new(dk, c).unwrap()).unwrap();
        ensure!(g.len() == h, "h({}) = {}", dk * (c * c) as i64, g.len());
    }
    let t = tower(-67, 3, 3).map_err(|e| e.to_string())?;
    for n in 1..=3 {
        ensure!(t.order(n) == 4 * 3usize.pow(n - 1), "|G({n})| = {}", t.order(n));
    }
    for n in 2..=3 {
        let g = t.level(n);
        let z = z_subgroup(&t, n, 1).map_err(|e| e.to_string())?;
        ensure!(z.elements.len() == 3 && g.group().element_order(z.tau(1)) == 3, "Z({n}, 1) not cyclic of order 3");
        for a in 0..3 {
            for b in 0..3 {
                ensure!(g.mul(z.tau(a), z.tau(b)) == z.tau(a + b), "τ not additive at n = {n}");
            }
        }
    }
    for n in 1..=3 {
        let g = t.level(n);
        let chars = characters(g, n);
        let m = chars[0].modulus();
        let sum = |v: &mut dyn Iterator<Item = u64>| {
            v.fold(CyclotomicInteger::zero(m), |acc, e| acc.add(&CyclotomicInteger::zeta_pow(m, e as i64)))
        };
        for chi in &chars {
            let s = sum(&mut (0..g.len()).map(|x| chi.value_exp(g, x)));
            ensure!(s.is_zero() != chi.is_trivial(), "row orthogonality at n = {n}");
        }
        for x in 0..g.len() {
            let s = sum(&mut chars.iter().map(|c| c.value_exp(g, x)));
            ensure!(s.is_zero() != (x == g.group().identity()), "column orthogonality at n = {n}");
        }
    }
    Ok(())
}

fn simple_transitivity() -> Check {
    let b = base();
    for n in 1..=2 {
        let g = class_group(&QuadraticOrder::new(-67, 3u64.pow(n)).unwrap()).unwrap();
        let orbit = cm_points(&b.cm, &g, n).map_err(|e| e.to_string())?;
        ensure!(orbit.len() == g.len(), "|CM(3^{n})| = {} ≠ {}", orbit.len(), g.len());
        let rep = transitivity_report(&b.cm, &g, &orbit).map_err(|e| e.to_string())?;
        ensure!(rep.simply_transitive(), "n = {n}: {rep:?}");
        // γ_k.(σ.x₀) = (σγ_k).x₀ and the points are pairwise K-inequivalent
        for (k, &gen) in orbit.generators.iter().enumerate() {
            for s in 0..g.len() {
                ensure!(orbit.action_table[k][s] == g.mul(s, gen), "action table at n = {n}");
            }
        }
        for i in 0..orbit.len() {
            for j in 0..i {
                ensure!(
                    b.cm.k_equivalence(&orbit.points[i].lattice, &orbit.points[j].lattice).is_none(),
                    "points {i} and {j} coincide at n = {n}"
                );
            }
        }
    }
    Ok(())
}

fn character_sum_lemma() -> Check {
    for (p, m, n) in [(3u64, 1u32, 2u32), (3, 2, 4), (5, 1, 2)] {
        let t = tower(-67, p, n).map_err(|e| e.to_string())?;
        let g = t.level(n);
        let z = z_subgroup(&t, n, m).map_err(|e| e.to_string())?;
        let pm = p.pow(m);
        let faithful: Vec<RingClassCharacter> = characters(g, n)
            .into_iter()
            .filter(|c| c.value_exp(g, z.tau(pm / p)) != 0)
            .collect();
        ensure!(!faithful.is_empty(), "no faithful χ₁ for ({p}, {m})");
        for chi in &faithful {
            for a in 0..pm {
                let brute = unit_char_sum_brute(a, &z, chi, g, p).map_err(|e| e.to_string())?;
                let closed = CyclotomicInteger::from_int(chi.modulus(), &unit_char_sum(a, m, p));
                ensure!(brute == closed, "(p, m) = ({p}, {m}), a = {a}");
            }
        }
    }
    Ok(())
}

fn matrix_identities() -> Check {
    let (tr, nm) = anticyclo_core::gross::min_poly(-67, 1);
    for delta in 0..=1u32 {
        for n in delta..=4 {
            ensure!(matrix_check_kp(n, delta, 3, &tr, &nm), "k_P check at n = {n}, δ = {delta}");
            for m in 0..=n.min(2) {
                for a in 0..3u64.pow(m) {
                    ensure!(
                        matrix_check_lambda_factorization(a, n, m, delta, 3, &tr, &nm),
                        "λ_a factorization at n = {n}, m = {m}, δ = {delta}, a = {a}"
                    );
                }
            }
        }
    }
    Ok(())
}

fn equivariance_and_bound() -> Check {
    for n in 1..=2 {
        let i = inst(5, n);
        let primitive: Vec<_> = i.characters.iter().filter(|c| i.is_primitive(c)).collect();
        for chi in &primitive {
            for s in 0..i.orbit.len() {
                for (lhs, rhs) in equivariance_pairs(&i, s, chi).map_err(|e| e.to_string())? {
                    ensure!(lhs == rhs, "equivariance at n = {n}, x = {s}");
                }
            }
        }
        for r in valuation_table(&i).map_err(|e| e.to_string())?.iter().filter(|r| r.primitive) {
            ensure!(r.ord.is_none_or(|v| v >= i.nu), "ord < ν at n = {n}: {r:?}");
        }
    }
    Ok(())
}

fn main_theorem() -> Check {
    for l in [5, 7] {
        for n in 1..=2 {
            let i = inst(l, n);
            for chi0 in i.g0_characters() {
                for row in main_theorem_scan(&i, &chi0).map_err(|e| e.to_string())? {
                    let below = row.min.is_some_and(|v| v < row.params.k_exponent);
                    ensure!(row.exists_y && below, "l = {l}, n = {n}, χ₀ = {}: {row:?}", row.chi0);
                }
            }
            let name = format!("main_theorem_l{l}_n{n}.txt");
            ensure!(check_golden(&name, &render_main_theorem(l, n)), "{name} differs");
        }
    }
    Ok(())
}

fn trace_machinery() -> Check {
    let c = LambdaContext::new(5, 3, 108, 2).map_err(|e| e.to_string())?;
    let f = c.field();
    let q = BigInt::from(25);
    ensure!(c.contains_mu_p(), "μ_3 not in the residue field");
    // ζ of order 3^k for k ≤ 3, inside μ_108
    for j in 0..27i64 {
        let ord = 27 / 27i64.gcd(&j) as u64;
        let z = c.residue_of_zeta(4 * j);
        let d = residue_degree(&q, ord, 5);
        let tr = f.trace(&z, &q, d);
        if d > 1 {
            ensure!(tr.is_zero(), "trace of ζ_{ord}^{j} over F_25 is non-zero");
        }
    }
    for l in [5, 7] {
        let name = format!("trace_identity_l{l}_n2.txt");
        ensure!(check_golden(&name, &render_trace_grid(l, 2)), "{name} differs");
    }
    Ok(())
}

fn valuation_engine() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for m in [3u64, 9, 12, 36] {
        for l in [3u64, 5, 7] {
            let primes = LambdaContext::all_primes(l, 3, m, 24).map_err(|e| e.to_string())?;
            let c = &primes[0];
            let phi = euler_phi(m) as usize;
            let mut tested = 0;
            while tested < 100 {
                let coeffs: Vec<BigInt> = (0..phi).map(|_| BigInt::from(rng.gen_range(-4i64..=4))).collect();
                let a = CyclotomicInteger::from_poly(m, &coeffs);
                let b = CyclotomicInteger::from_poly(m, &(0..phi).map(|_| BigInt::from(rng.gen_range(-4i64..=4))).collect::<Vec<_>>());
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                tested += 1;
                let (Valuation::Finite(va), Valuation::Finite(vb)) = (c.ord(&a), c.ord(&b)) else {
                    return Err(format!("precision exhausted at M = {m}, l = {l}"));
                };
                ensure!(c.ord(&a.mul(&b)) == Valuation::Finite(va + vb), "ord not additive at M = {m}, l = {l}");
                let total: u64 = primes.iter().map(|p| p.f_res() * p.ord(&a).finite().unwrap_or(u64::MAX / 64)).sum();
                ensure!(total == ord_p(&a.norm(), l) as u64, "Σ f·ord ≠ v_l(N a) at M = {m}, l = {l}");
            }
        }
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("Brandt matrices for discriminant 11", brandt_correctness),
        ("mass certification", mass_certification),
        ("eigenform against point counts", eigenvalue_oracle),
        ("μ and ν", mu_and_nu),
        ("ring class towers", ring_class_towers),
        ("simple transitivity of the CM orbit", simple_transitivity),
        ("unit character sum", character_sum_lemma),
        ("local matrix identities", matrix_identities),
        ("equivariance and the ν bound", equivariance_and_bound),
        ("main theorem scan", main_theorem),
        ("trace machinery", trace_machinery),
        ("valuation engine", valuation_engine),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => println!("PASS {:>2} {name}", k + 1),
            Err(e) => {
                println!("FAIL {:>2} {name}: {e}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
