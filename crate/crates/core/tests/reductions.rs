use crossmeasure::measure::{full_mask, is_cross_intersecting, Mask, ProbabilityVector, SubsetFamily};
use crossmeasure::oracle::max_cross_product;
use crossmeasure::rational::{rat, to_f64};
use crossmeasure::reductions::{
    eigen_coefficients, junta_coefficients_exact, kernel_extract, main_hypotheses_hold, monotone_scale,
    reduce_large_p, verify_reduction_chain, witness_set, WitnessForm,
};
use crossmeasure::testkit::{example_families, random_co_complex, random_cross_pair};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pv(text: &str) -> ProbabilityVector {
    ProbabilityVector::parse(text).unwrap()
}

/// `θ(z) = Σ_{x ∈ U} μ(x) Π_l V^(l)[x_l][z_l] / √μ(U)` with `V = [[1, c], [1, -1/c]]`.
fn theta_naive(p: &ProbabilityVector, u: &SubsetFamily) -> Vec<f64> {
    let n = p.n();
    let ps: Vec<f64> = (1..=n).map(|l| to_f64(p.p(l))).collect();
    let c: Vec<f64> = ps.iter().map(|p| (p / (1.0 - p)).sqrt()).collect();
    let atom = |x: Mask| (0..n).map(|l| if x >> l & 1 == 1 { ps[l] } else { 1.0 - ps[l] }).product::<f64>();
    let mu: f64 = u.members().map(atom).sum();
    (0..=full_mask(n))
        .map(|z| {
            u.members()
                .map(|x| {
                    let v: f64 = (0..n)
                        .map(|l| match (x >> l & 1, z >> l & 1) {
                            (0, 0) | (1, 0) => 1.0,
                            (0, _) => c[l],
                            _ => -1.0 / c[l],
                        })
                        .product();
                    atom(x) * v
                })
                .sum::<f64>()
                / mu.sqrt()
        })
        .collect()
}

#[test]
fn witness_sets() {
    let a = pv("1/2,1/3,1/2");
    assert_eq!(witness_set(&a, &a, WitnessForm::Strong).unwrap().elements(), &[1, 3]);
    let (a, b) = (pv("1/2,1/3"), pv("1/3,1/2"));
    assert_eq!(witness_set(&a, &b, WitnessForm::Weak).unwrap().elements(), &[1, 2]);
    assert_eq!(witness_set(&a, &b, WitnessForm::Strong).unwrap().elements(), &[1]);
}

#[test]
fn star_and_full_coefficients() {
    for text in ["1/2,1/3", "1/3,1/4,1/5", "2/5"] {
        let p = pv(text);
        let n = p.n();
        let star = eigen_coefficients(&p, &SubsetFamily::star(n, 1).unwrap()).unwrap();
        let (pp, qq) = (to_f64(p.first()), 1.0 - to_f64(p.first()));
        assert!((star.get(0) - pp.sqrt()).abs() < 1e-12);
        assert!((star.get(1) + qq.sqrt()).abs() < 1e-12);
        assert!(star.max_outside(|z| z <= 1) < 1e-12);

        let full = eigen_coefficients(&p, &SubsetFamily::full(n)).unwrap();
        assert!((full.get(0) - 1.0).abs() < 1e-12);
        assert!(full.max_outside(|z| z == 0) < 1e-12);
    }
    assert!(eigen_coefficients(&pv("1/2"), &SubsetFamily::empty(1)).is_err());
}

#[test]
fn optimal_pairs_live_on_witness_subsets() {
    for (x, y) in [("1/2,1/2,1/3", "1/2,1/2,1/3"), ("1/3,1/4,1/3", "1/4,1/5,1/4"), ("1/2,1/2,1/2", "1/2,1/2,1/2")] {
        let (a, b) = (pv(x), pv(y));
        let w = witness_set(&a, &b, WitnessForm::Strong).unwrap().mask();
        let r = max_cross_product(&a, &b).unwrap();
        for pair in &r.pairs {
            for (p, u) in [(&a, &pair.u1), (&b, &pair.u2)] {
                let th = eigen_coefficients(p, u).unwrap();
                assert!(th.max_outside(|z| z & !w == 0) < 1e-10, "{x} {y}");
            }
            let k = kernel_extract(&a, &b, &pair.u1, &pair.u2).unwrap();
            assert!(k.holds(), "{x} {y}: {:?}", k.violations);
        }
    }
}

#[test]
fn kernels_of_examples() {
    let a = pv("1/2,1/2,1/2");
    let maj = &example_families(3).unwrap()["ex-n3"];
    let k = kernel_extract(&a, &a, maj, maj).unwrap();
    assert!(k.holds());
    assert_eq!(k.k1.len(), 4);
    assert_eq!(&k.k1, maj);

    let (a, b) = (pv("1/2,1/2,1/3"), pv("1/2,1/2,1/3"));
    let s = SubsetFamily::star(3, 2).unwrap();
    let k = kernel_extract(&a, &b, &s, &s).unwrap();
    assert!(k.holds());
    assert_eq!(k.w.elements(), &[1, 2]);
    assert_eq!(k.k1, SubsetFamily::star(2, 2).unwrap());

    assert!(kernel_extract(&pv("3/5,1/2"), &b.restrict(0b11).unwrap(), &s.restrict(0b11), &s.restrict(0b11)).is_err());
}

#[test]
fn monotone_examples() {
    let u = SubsetFamily::star(1, 1).unwrap();
    let r = monotone_scale(&pv("3/5"), &pv("1/2"), &u).unwrap();
    assert_eq!((r.lhs.clone(), r.rhs.clone()), (rat(3, 5), rat(3, 5)));
    assert!(r.equality && r.pivot_contained && r.holds());

    let r = monotone_scale(&pv("3/5,1/3"), &pv("1/2,1/3"), &SubsetFamily::full(2)).unwrap();
    assert_eq!(r.lhs, rat(1, 1));
    assert_eq!(r.rhs, rat(6, 5));
    assert!(!r.equality && r.holds());

    assert!(monotone_scale(&pv("1/2"), &pv("3/5"), &u).is_err());
    assert!(monotone_scale(&pv("3/5"), &pv("1/2"), &SubsetFamily::from_sets(1, &[Vec::<usize>::new()]).unwrap()).is_err());
}

#[test]
fn reduction_examples() {
    let r = reduce_large_p(&pv("3/5,1/3,1/2"), &pv("1/2,1/4,1/2")).unwrap();
    assert_eq!(r.pv1_tilde, pv("1/2,1/3,1/2"));
    assert_eq!(r.pv2_tilde.first(), &rat(1, 2));
    assert_eq!(r.w_tilde.elements(), &[1, 3]);

    let r = reduce_large_p(&pv("2/3,1/3"), &pv("2/3,1/3")).unwrap();
    assert_eq!(r.pv1_tilde, pv("1/3,1/3"));
    assert_eq!(r.pv2_tilde, pv("1/3,1/3"));
    assert_eq!(r.w_tilde.elements(), &[1, 2]);

    assert!(reduce_large_p(&pv("1/2,1/3"), &pv("1/3,1/3")).is_err());
}

#[test]
fn chain_on_stars() {
    let p = pv("3/5,1/3");
    let s = SubsetFamily::star(2, 1).unwrap();
    let r = verify_reduction_chain(&p, &p, &s, &s).unwrap();
    assert!(r.holds() && r.all_tight());
    assert_eq!(r.product, rat(9, 25));
    assert_eq!(r.product, r.bound);
}

#[test]
fn chain_claim_with_explicit_extras() {
    let (a, b) = (pv("2/3,1/2,1/2,1/2"), pv("1/2,1/2,1/2,1/2"));
    let u1 = SubsetFamily::from_sets(4, &[vec![1, 2, 3, 4]]).unwrap().up_closure();
    let u2 = SubsetFamily::from_predicate(4, |x| x != 0);
    let r = verify_reduction_chain(&a, &b, &u1, &u2).unwrap();
    let c = r.claim.clone().unwrap();
    assert_eq!(c.e_size, 7);
    assert!(c.holds && r.holds());
    assert!(r.product < r.bound);
}

#[test]
fn junta_coefficients_of_star() {
    let s = SubsetFamily::star(3, 2).unwrap();
    let lam = junta_coefficients_exact(&s);
    for (z, v) in lam.iter().enumerate() {
        assert_eq!(*v, i64::from(z == 0b10));
    }
}

fn co_complex_case() -> impl Strategy<Value = (usize, u64)> {
    (1usize..=5, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_matches_direct_inner_products((n, seed) in co_complex_case()) {
        let p = ProbabilityVector::new((1..=n).map(|l| rat(1, l as i64 + 1)).collect()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_co_complex(n, &mut rng);
        prop_assume!(!u.is_empty());
        let th = eigen_coefficients(&p, &u).unwrap();
        let want = theta_naive(&p, &u);
        for (a, b) in th.theta.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        prop_assert!((th.parseval() - 1.0).abs() < 1e-10);
        prop_assert!(th.reconstruction_error(&u) < 1e-10);
    }

    #[test]
    fn monotone_inequality_on_co_complexes((n, seed) in co_complex_case(), num in 11i64..20) {
        let tilde = ProbabilityVector::new((1..=n).map(|l| rat(1, l as i64 + 1)).collect()).unwrap();
        let big = tilde.with_entry(1, rat(num, 20)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_co_complex(n, &mut rng);
        let r = monotone_scale(&big, &tilde, &u).unwrap();
        prop_assert!(r.holds());
        if r.equality {
            prop_assert!(u.members().all(|x| x & 1 != 0));
        }
    }

    #[test]
    fn chain_holds_on_random_pairs(n in 2usize..=5, seed in any::<u64>(), num in 11i64..20) {
        let base: Vec<_> = (1..=n).map(|l| if l == 1 { rat(num, 20) } else { rat(1, l as i64 + 1) }).collect();
        let a = ProbabilityVector::new(base).unwrap();
        let b = a.with_entry(2, rat(1, 4)).unwrap();
        prop_assume!(main_hypotheses_hold(&a, &b));
        let (u1, u2) = random_cross_pair(n, seed).unwrap();
        prop_assert!(is_cross_intersecting(&u1, &u2).unwrap());
        let r = verify_reduction_chain(&a, &b, &u1, &u2).unwrap();
        prop_assert!(r.holds());
        prop_assert!(r.product <= r.bound);
    }
}
