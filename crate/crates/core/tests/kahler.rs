mod common;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seshadri_core::kahler::{
    fs_expansion, fs_potential, fs_section_sum, glue_potentials, metric_fd, packing_report, perturbed_section_sum,
    potential_from_sections, GridSpec,
};
use seshadri_core::picard::seshadri_constant_general;
use seshadri_core::rational::{to_f64, Rational};

fn random_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<Complex64> {
    loop {
        let z: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius)))
            .collect();
        if z.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt() < radius {
            return z;
        }
    }
}

#[test]
fn multinomial_identity_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in 1..=6u32 {
        for n in 1..=3usize {
            let exp = fs_expansion(m, n);
            for _ in 0..20 {
                let xs: Vec<Rational> = (0..n)
                    .map(|_| Rational::new(BigInt::from(rng.gen_range(1..50)), BigInt::from(rng.gen_range(1..50))))
                    .collect();
                let t = Rational::new(BigInt::from(rng.gen_range(1..50)), BigInt::from(rng.gen_range(1..50)));
                let lhs = exp.terms.iter().fold(Rational::zero(), |acc, term| {
                    let mono = term
                        .alpha
                        .iter()
                        .zip(&xs)
                        .fold(num_traits::pow(t.clone(), term.beta as usize), |a, (&e, x)| {
                            a * num_traits::pow(x.clone(), e as usize)
                        });
                    acc + Rational::from_integer(term.c.clone()) * mono
                });
                let base = xs.iter().fold(t.clone(), |a, x| a + x);
                assert_eq!(lhs, num_traits::pow(base, m as usize));
            }
        }
    }
}

#[test]
fn metric_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in 1..=3 {
        for _ in 0..100 {
            let z = random_point(&mut rng, 2, 2.0);
            let g = metric_fd(|w| fs_potential(m, w), &z, 1e-4).unwrap();
            let want = common::fs_metric_closed_form(m, &z);
            for j in 0..2 {
                for k in 0..2 {
                    assert!((g.get(j, k) - want[j][k]).norm() <= 1e-6, "m {m} z {z:?}");
                }
            }
            assert!(g.is_positive_definite());
        }
    }
}

proptest! {
    #[test]
    fn potential_of_a_power_is_a_multiple(
        m in 1u32..=6,
        coords in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..=3),
    ) {
        let z: Vec<Complex64> = coords.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let n = z.len();
        let one = potential_from_sections(&fs_expansion(1, n), &z).unwrap();
        let many = potential_from_sections(&fs_expansion(m, n), &z).unwrap();
        prop_assert!((many - f64::from(m) * one).abs() <= 1e-12 * many.abs().max(1e-300));
        prop_assert!((one - fs_potential(1, &z)).abs() <= 1e-12 * one.abs().max(1e-300));
    }
}

#[test]
fn gluing_converges_to_the_unperturbed_metric() {
    let grid = GridSpec::default();
    let mut gaps = Vec::new();
    for a in [1e-2, 1e-3, 1e-4] {
        let r = glue_potentials(|z| perturbed_section_sum(1, a, z), |z| fs_section_sum(1, z), 1.0, 2.0, &grid).unwrap();
        assert!(r.positive_definite(), "amplitude {a}");
        assert!(r.sup_perturbation <= a);
        gaps.push(r.eigenvalue_gap());
    }
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    let r = glue_potentials(|z| perturbed_section_sum(1, 0.5, z), |z| fs_section_sum(1, z), 1.0, 2.0, &grid).unwrap();
    let v = r.violation.expect("large perturbation breaks positivity");
    assert!(v.min_eigenvalue < 0.0);
}

#[test]
fn packing_radii_square_to_seshadri_constants() {
    for k in 1..=8 {
        let eps = common::seshadri_oracle(k, 6);
        let r = packing_report(k, seshadri_constant_general(k, 20).unwrap(), 2).unwrap();
        let e = to_f64(&eps);
        assert!((r.gamma_lower * r.gamma_lower - e).abs() <= 1e-12 * e);
        assert!((r.gamma_upper * r.gamma_upper - e).abs() <= 1e-12 * e);
        let volume = Rational::from_integer(BigInt::from(k)) * &eps * &eps;
        assert!(volume <= Rational::one());
        assert!((r.total_ball_volume - to_f64(&volume)).abs() <= 1e-15);
    }
}
