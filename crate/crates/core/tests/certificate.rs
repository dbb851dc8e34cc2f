use std::collections::BTreeSet;

use crossmeasure::certificate::{
    certificate_bound, choose_small_epsilon2, epsilon_eta, is_block_psd, strict_block_set, verify_dual_feasibility,
    verify_third_certificate, BlockMatrix, CoordinateBlocks, DualCertificate, EpsilonChoice,
};
use crossmeasure::measure::{full_mask, Mask, ProbabilityVector};
use crossmeasure::rational::{rat, to_f64};
use crossmeasure::sdp::dense_certificate_oracle;
use crossmeasure::surd::Surd;
use proptest::prelude::*;

fn pv(text: &str) -> ProbabilityVector {
    ProbabilityVector::parse(text).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

/// `(ε1, η)` straight from the defining formulas, in floating point.
fn eps_eta_f64(p1: f64, p2: f64, e2: f64) -> (f64, f64) {
    let s = (p1 * p2).sqrt();
    (p2 / p1 * e2 + (p1 - p2) * p2 / (2.0 * s), p2 / s * e2 + (1.0 - p2) / 2.0)
}

#[test]
fn epsilon_eta_at_half_half() {
    let (a, b) = (pv("1/2"), pv("1/2"));
    let d = rat(1, 4);
    let (e1, eta) = epsilon_eta(&a, &b, &Surd::zero(&d)).unwrap();
    assert!(e1.is_zero());
    assert_eq!(eta.to_rational(), Some(rat(1, 4)));
}

#[test]
fn epsilon_eta_at_max() {
    for (x, y) in [("1/2", "1/2"), ("1/2", "1/3"), ("2/5", "1/7"), ("3/5", "1/4")] {
        let (a, b) = (pv(x), pv(y));
        let d = a.first() * b.first();
        let half_s = Surd::root(rat(1, 2), &d);
        let (e1, eta) = epsilon_eta(&a, &b, &half_s).unwrap();
        assert_eq!(e1, half_s, "{x} {y}");
        assert_eq!(eta.to_rational(), Some(rat(1, 2)), "{x} {y}");
    }
}

#[test]
fn epsilon_eta_at_half_third() {
    let (a, b) = (pv("1/2"), pv("1/3"));
    let d = rat(1, 6);
    let (e1, eta) = epsilon_eta(&a, &b, &Surd::zero(&d)).unwrap();
    // (p1 - p2) p2 / (2s) with s² = 1/6 is s/6.
    assert_eq!(e1, Surd::root(rat(1, 6), &d));
    let (want_e1, want_eta) = eps_eta_f64(0.5, 1.0 / 3.0, 0.0);
    assert!(close(e1.to_f64(), want_e1));
    assert!(close(eta.to_f64(), want_eta));
    assert_eq!(eta.to_rational(), Some(rat(1, 3)));
}

#[test]
fn epsilon_eta_rejects_bad_input() {
    let d = rat(1, 6);
    assert!(epsilon_eta(&pv("1/3"), &pv("1/2"), &Surd::zero(&d)).is_err());
    assert!(epsilon_eta(&pv("1/2"), &pv("1/3"), &Surd::root(rat(1, 1), &d)).is_err());
}

#[test]
fn c_product_values() {
    let b = CoordinateBlocks::new(&pv("1/2,1/2,1/2"), &pv("1/3,1/3,1/3")).unwrap();
    for side in 0..2 {
        assert_eq!(b.c_product(side, side, 0).square, rat(1, 1));
        assert_eq!(b.c_product(side, side, 0).sign, 1);
    }
    for z in 0..8u64 {
        let k = (z as Mask).count_ones() as i32;
        assert_eq!(b.c_diag(0, z as Mask), rat((-1i64).pow(k as u32), 1));
    }
    let c = b.c_product(1, 1, 0b11);
    assert_eq!(c.sign, 1);
    assert!(close(c.to_f64(), 0.25));
}

#[test]
fn empty_block_at_half() {
    let c = DualCertificate::new(&pv("1/2,1/2"), &pv("1/2,1/2"), EpsilonChoice::Zero).unwrap();
    let m = c.block(0).to_f64();
    assert!(close(m[0][0], 0.25) && close(m[1][1], 0.25) && close(m[0][1], -0.25));
    assert!(c.block(0).det().is_zero());
}

#[test]
fn singleton_blocks_in_witness_are_singular() {
    for (x, y) in [("1/2,1/2,1/2", "1/2,1/2,1/2"), ("1/3,1/3", "1/4,1/4"), ("1/2,1/2", "1/3,1/3")] {
        let c = DualCertificate::new(&pv(x), &pv(y), EpsilonChoice::Zero).unwrap();
        for l in 0..c.n() {
            assert!(c.block(1 << l).det().is_zero(), "{x} {y} l={}", l + 1);
        }
    }
}

#[test]
fn psd_test_on_literals() {
    let d = rat(1, 1);
    let r = |a: i64, b: i64| Surd::rational(rat(a, b), &d);
    assert!(is_block_psd(&BlockMatrix::from_entries(r(1, 1), r(1, 1), &r(0, 1))));
    assert!(!is_block_psd(&BlockMatrix::from_entries(r(0, 1), r(0, 1), &r(1, 1))));
    assert!(is_block_psd(&BlockMatrix::from_entries(r(1, 4), r(1, 4), &r(-1, 4))));
}

#[test]
fn feasibility_examples() {
    for n in 1..=5 {
        let a = ProbabilityVector::uniform(n, rat(1, 2)).unwrap();
        let r = verify_dual_feasibility(&a, &a, EpsilonChoice::Zero).unwrap();
        assert!(r.feasible);
        assert_eq!(r.bound, Some(rat(1, 4)));
    }
    let r = verify_dual_feasibility(&pv("1/2,1/3"), &pv("1/3,1/4"), EpsilonChoice::Zero).unwrap();
    assert!(r.feasible);
    assert_eq!(r.bound, Some(rat(1, 6)));

    let r = verify_dual_feasibility(&pv("3/5,1/3"), &pv("1/2,1/3"), EpsilonChoice::Zero).unwrap();
    assert!(!r.feasible);
    assert!(!r.check("z_nonnegative").unwrap().pass);
}

#[test]
fn bound_only_after_verification() {
    let c = DualCertificate::new(&pv("1/3,1/3"), &pv("1/3,1/3"), EpsilonChoice::Zero).unwrap();
    assert_eq!(certificate_bound(&c).unwrap(), rat(1, 9));
    let bad = DualCertificate::new(&pv("3/5,1/3"), &pv("1/2,1/3"), EpsilonChoice::Zero).unwrap();
    assert!(certificate_bound(&bad).is_err());
    assert!(strict_block_set(&bad).is_err());
}

#[test]
fn third_certificate_examples() {
    assert!(verify_third_certificate(&pv("1/3,1/3"), &pv("1/3,1/3")).unwrap().feasible);
    assert!(verify_third_certificate(&pv("1/3,1/4"), &pv("1/3,1/5")).unwrap().feasible);
    let r = verify_third_certificate(&pv("2/5,1/4"), &pv("1/3,1/5")).unwrap();
    assert!(!r.feasible);
    assert!(!r.check("preconditions").unwrap().pass);
}

#[test]
fn third_certificate_matches_generic_check() {
    for (x, y) in [("1/3,1/3", "1/3,1/3"), ("1/3,1/4,1/5", "1/4,1/5,1/6"), ("1/4,1/4", "1/3,1/5"), ("1/5", "1/3")] {
        let third = verify_third_certificate(&pv(x), &pv(y)).unwrap();
        let generic = verify_dual_feasibility(&pv(x), &pv(y), EpsilonChoice::Max).unwrap();
        assert_eq!(third.feasible, generic.feasible, "{x} {y}");
    }
}

fn sizes(n: usize, keep: impl Fn(Mask) -> bool) -> BTreeSet<Mask> {
    (0..=full_mask(n)).filter(|&z| keep(z)).collect()
}

#[test]
fn strict_blocks_by_regime() {
    let c = DualCertificate::new(&pv("1/2,1/2,1/2"), &pv("1/2,1/2,1/2"), EpsilonChoice::Zero).unwrap();
    assert!(strict_block_set(&c).unwrap().is_empty());

    let c = DualCertificate::new(&pv("1/2,1/2,1/2,1/2"), &pv("1/3,1/3,1/3,1/3"), EpsilonChoice::Zero).unwrap();
    assert_eq!(strict_block_set(&c).unwrap(), sizes(4, |z| z.count_ones() >= 3));

    let (a, b) = (pv("1/3,1/3,1/3"), pv("1/4,1/4,1/4"));
    let e = choose_small_epsilon2(&a, &b).unwrap();
    let c = DualCertificate::new(&a, &b, EpsilonChoice::Value(e)).unwrap();
    assert_eq!(strict_block_set(&c).unwrap(), sizes(3, |z| z.count_ones() >= 2));

    // Coordinates outside w are strict even at |z| = 1.
    let c = DualCertificate::new(&pv("1/2,1/3"), &pv("1/2,1/3"), EpsilonChoice::Zero).unwrap();
    assert!(strict_block_set(&c).unwrap().contains(&0b10));
}

#[test]
fn small_epsilon_search() {
    let e = choose_small_epsilon2(&pv("1/4,1/4"), &pv("1/4,1/4")).unwrap();
    assert!(e.is_positive());
    assert!(choose_small_epsilon2(&pv("1/2,1/3"), &pv("1/3,1/3")).is_err());
    let (a, b) = (pv("1/3,1/3,1/3"), pv("1/3,1/3,1/3"));
    let e = choose_small_epsilon2(&a, &b).unwrap();
    let c = DualCertificate::new(&a, &b, EpsilonChoice::Value(e)).unwrap();
    assert!(c.verify().feasible);
    assert_eq!(strict_block_set(&c).unwrap(), sizes(3, |z| z.count_ones() >= 2));
}

#[test]
fn exact_verdict_matches_dense_eigenvalues() {
    let cases = [
        ("1/2,1/3,1/4", "1/3,1/4,1/5"),
        ("1/2,1/3", "1/3,1/4"),
        ("2/5,2/5,1/7", "1/3,1/3,1/9"),
        ("1/2,1/3", "1/3,1/4"),
        ("1/3,1/2,1/4", "1/4,1/3,1/5"),
    ];
    for (x, y) in cases {
        for e in [EpsilonChoice::Zero, EpsilonChoice::Max] {
            let c = DualCertificate::new(&pv(x), &pv(y), e).unwrap();
            let exact = c.block_spectrum().iter().all(|(_, b)| is_block_psd(b));
            let audit = dense_certificate_oracle(&c, 1e-9).unwrap();
            assert_eq!(audit.dense_psd, exact, "{x} {y}");
            if exact {
                assert!(audit.min_eigenvalue >= -1e-12);
            } else {
                assert!(audit.min_eigenvalue < 0.0);
            }
        }
    }
}

#[test]
fn swapping_sides_does_not_change_verdict() {
    for (x, y) in [("1/2,1/3", "1/3,1/4"), ("1/3,1/5", "2/5,1/5"), ("1/4,1/4,1/4", "1/2,1/4,1/4")] {
        let a = verify_dual_feasibility(&pv(x), &pv(y), EpsilonChoice::Zero).unwrap();
        let b = verify_dual_feasibility(&pv(y), &pv(x), EpsilonChoice::Zero).unwrap();
        assert_eq!(a.feasible, b.feasible);
        assert_ne!(a.swapped, b.swapped);
    }
}

type Fractions = Vec<(i64, i64)>;

fn small_pair() -> impl Strategy<Value = (Fractions, Fractions)> {
    (1usize..=4).prop_flat_map(|n| {
        let entry = (3i64..13).prop_flat_map(|d| (1..=d / 2, Just(d)));
        (prop::collection::vec(entry.clone(), n), prop::collection::vec(entry, n))
    })
}

fn vector(raw: &[(i64, i64)]) -> ProbabilityVector {
    let mut v: Vec<_> = raw.iter().map(|&(a, b)| rat(a, b)).collect();
    // Put the largest entry first so that p = p^(1) = max.
    let top = v.iter().enumerate().max_by(|a, b| a.1.cmp(b.1)).unwrap().0;
    v.swap(0, top);
    ProbabilityVector::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn feasible_blocks_have_nonnegative_invariants((x, y) in small_pair()) {
        let (a, b) = (vector(&x), vector(&y));
        let c = DualCertificate::new(&a, &b, EpsilonChoice::Zero).unwrap();
        if c.verify().feasible {
            for (_, m) in c.block_spectrum().iter() {
                prop_assert!(m.diag[0].is_nonnegative() && m.diag[1].is_nonnegative());
                prop_assert!(m.det().is_nonnegative());
            }
        }
    }

    #[test]
    fn zero_epsilon_singular_on_empty_and_witness_singletons((x, y) in small_pair()) {
        let (a, b) = (vector(&x), vector(&y));
        let c = DualCertificate::new(&a, &b, EpsilonChoice::Zero).unwrap();
        let (p1, p2) = (c.pv1().first().clone(), c.pv2().first().clone());
        prop_assert!(c.block(0).det().is_zero());
        for l in 1..=c.n() {
            if c.pv1().p(l) == &p1 && c.pv2().p(l) == &p2 {
                prop_assert!(c.block(1 << (l - 1)).det().is_zero());
            }
        }
    }

    #[test]
    fn epsilon_formulas_agree_with_floats((x, y) in small_pair(), k in 0i64..=8) {
        let (a, b) = (vector(&x), vector(&y));
        let c = DualCertificate::new(&a, &b, EpsilonChoice::Zero).unwrap();
        let (a, b) = (c.pv1(), c.pv2());
        let d = a.first() * b.first();
        let e2 = Surd::root(rat(k, 16), &d);
        let (e1, eta) = epsilon_eta(a, b, &e2).unwrap();
        let (w1, weta) = eps_eta_f64(to_f64(a.first()), to_f64(b.first()), e2.to_f64());
        prop_assert!(close(e1.to_f64(), w1));
        prop_assert!(close(eta.to_f64(), weta));
    }
}
