use num_complex::Complex64;
use proptest::prelude::*;
use ripforge::analysis::{holder_floor, l2_identity, l4_identity};
use ripforge::designs::{design_defect, epsilon_chain, ChainDirection, WeightedPointSet};
use ripforge::golomb::{build_ruler, verify_ruler};
use ripforge::matrix::norm;
use ripforge::num_theory::{enumerate_polys, family_size, is_prime, poly_eval, PolyOverFp, PrimeModulus};
use ripforge::recovery::{hard_threshold, iht};
use ripforge::{cmx, constructors, Field, Matrix, Vector};

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 101, 65_521, 2_147_483_647])
}

fn complex_vec(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(re, im)| Complex64::new(re, im)),
        len,
    )
}

fn unit_point(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n).prop_filter_map("nonzero", |v| {
        let v: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        let nrm = norm(&v, 2.0);
        (nrm > 1e-3).then(|| v.into_iter().map(|z| z / nrm).collect())
    })
}

proptest! {
    #[test]
    fn poly_eval_matches_naive(p in small_prime(), coeffs in prop::collection::vec(any::<u64>(), 1..6), k in any::<u64>()) {
        let modulus = PrimeModulus::new(p).unwrap();
        let coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        let f = PolyOverFp::new(modulus, coeffs.clone()).unwrap();
        let k = k % p;
        let naive = coeffs.iter().rev().fold(0u128, |acc, &c| (acc * k as u128 + c as u128) % p as u128);
        prop_assert_eq!(poly_eval(&f, k) as u128, naive);
    }

    #[test]
    fn enumeration_is_injective(p in prop::sample::select(vec![2u64, 3, 5, 7]), d in 1usize..3) {
        let modulus = PrimeModulus::new(p).unwrap();
        let n = family_size(modulus, d).min(200);
        let polys = enumerate_polys(modulus, d, n).unwrap();
        let mut seen: Vec<&[u64]> = polys.iter().map(|f| f.coeffs()).collect();
        seen.sort();
        seen.dedup();
        prop_assert_eq!(seen.len() as u64, n);
    }

    #[test]
    fn rulers_are_sidon(idx in 0usize..40) {
        let p = (3u64..).filter(|&p| is_prime(p)).nth(idx).unwrap();
        let r = build_ruler(p).unwrap();
        prop_assert!(verify_ruler(r.marks()));
        prop_assert!(r.marks().iter().all(|&g| g < r.range_bound()));
    }

    #[test]
    fn norms_decrease_in_exponent(v in complex_vec(1..=20)) {
        let (n1, n2, n4) = (norm(&v, 1.0), norm(&v, 2.0), norm(&v, 4.0));
        prop_assert!(n4 <= n2 * (1.0 + 1e-12) + 1e-300);
        prop_assert!(n2 <= n1 * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn holder_floor_below_l1(v in complex_vec(1..=20)) {
        let y = Vector::complex(v);
        prop_assume!(!y.is_zero());
        prop_assert!(holder_floor(&y).unwrap() <= norm(y.entries(), 1.0) * (1.0 + 1e-12));
    }

    #[test]
    fn cmx_round_trip_is_bit_exact(rows in 1usize..6, cols in 1usize..6, complex in any::<bool>(), raw in prop::collection::vec(any::<f64>(), 72)) {
        let field = if complex { Field::Complex } else { Field::Real };
        let finite = |x: f64| if x.is_finite() { x } else { 0.5 };
        let data: Vec<Complex64> = (0..rows * cols)
            .map(|i| Complex64::new(finite(raw[2 * i]), if complex { finite(raw[2 * i + 1]) } else { 0.0 }))
            .collect();
        let a = Matrix::from_entries(field, rows, cols, data).unwrap();
        let back = cmx::from_str(&cmx::to_string(&a)).unwrap();
        prop_assert_eq!(back.field(), a.field());
        let same = a.entries().iter().zip(back.entries())
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits());
        prop_assert!(same);
    }

    #[test]
    fn identities_hold_for_random_unimodular(q in 1usize..12, r in 1usize..6, seed in any::<u64>()) {
        let mut rng = ripforge::seed::rng(seed);
        let phases = (0..q * r).map(|_| Complex64::from_polar(1.0, ripforge::seed::gaussian(&mut rng))).collect();
        let b = Matrix::from_entries(Field::Complex, q, r, phases).unwrap();
        let x = Vector::complex((0..r).map(|_| ripforge::seed::complex_gaussian(&mut rng)).collect());
        prop_assert!(l2_identity(&b, &x).unwrap().max_gap() <= 1e-9);
        prop_assert!(l4_identity(&b, &x).unwrap().max_gap() <= 1e-8);
    }

    #[test]
    fn sidelnikov(points in prop::collection::vec(unit_point(3), 1..8), k in 1u32..4, raw in prop::collection::vec(0.01..1.0f64, 8)) {
        let total: f64 = raw[..points.len()].iter().sum();
        let weights = raw[..points.len()].iter().map(|w| w / total).collect();
        let ps = WeightedPointSet::new(Field::Complex, points, weights).unwrap();
        prop_assert!(design_defect(&ps, k).unwrap() >= -1e-12);
    }

    #[test]
    fn epsilon_chain_composes(eps2 in 0.0..1.0f64, n in 1u32..6, k in 1u32..4) {
        let e3 = epsilon_chain(ChainDirection::TwoToThree, eps2, n, k, Field::Real).unwrap();
        let e1 = epsilon_chain(ChainDirection::ThreeToOne, e3, n, k, Field::Real).unwrap();
        prop_assert!((e3 * e3 - eps2).abs() <= 1e-12);
        prop_assert!(e1 >= e3);
    }

    #[test]
    fn threshold_keeps_largest(v in complex_vec(1..=16), s in 0usize..8) {
        let mut t = v.clone();
        hard_threshold(&mut t, s);
        let kept = t.iter().filter(|z| **z != Complex64::new(0.0, 0.0)).count();
        prop_assert!(kept <= s);
        let min_kept = t.iter().filter(|z| z.norm() > 0.0).map(|z| z.norm_sqr()).fold(f64::INFINITY, f64::min);
        let max_dropped = v.iter().zip(&t).filter(|(_, z)| z.norm() == 0.0).map(|(x, _)| x.norm_sqr()).fold(0.0, f64::max);
        prop_assert!(kept == 0 || min_kept >= max_dropped);
    }

    #[test]
    fn iht_output_is_s_sparse(seed in any::<u64>(), s in 0usize..5) {
        let a = constructors::rademacher(12, 20, seed).unwrap();
        let mut rng = ripforge::seed::rng(seed ^ 1);
        let y = Vector::real((0..12).map(|_| ripforge::seed::gaussian(&mut rng)));
        let r = iht(&a, &y, s, 25, 1e-9).unwrap();
        prop_assert!(r.estimate.support_size() <= s);
    }
}
