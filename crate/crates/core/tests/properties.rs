use mvop_core::diffops::build_operators;
use mvop_core::laurent::{LaurentPoly, TorusPoint};
use mvop_core::linalg::QMat;
use mvop_core::phipoly::{monomials_of_degree, PhiPoly};
use mvop_core::quadrature::{integrate, integrate_exact, inner_product_exact, Moments};
use mvop_core::rational::{q, to_f64, Q};
use mvop_core::spherical::{phi_point, psi0};
use mvop_core::symfun::{newton_girard, power_sums_from_elementary};
use mvop_core::weight::{domain_contains, torus_to_real, weight_polynomial};
use num_complex::Complex64;
use proptest::prelude::*;

fn laurent(rank: usize) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::collection::vec(-2i32..=2, rank + 1), -4i64..=4, 1i64..=3), 0..5)
        .prop_map(move |ts| LaurentPoly::from_terms(rank, ts.into_iter().map(|(e, a, b)| (e, q(a, b)))))
}

fn angles(n: usize) -> impl Strategy<Value = TorusPoint> {
    prop::collection::vec(-3.1f64..3.1, n).prop_map(TorusPoint::new)
}

fn phipoly(n: usize, size: usize, degree: u32) -> impl Strategy<Value = PhiPoly> {
    let monos: Vec<Vec<u32>> = (0..=degree).flat_map(|d| monomials_of_degree(n, d)).collect();
    let count = monos.len() * size * size;
    prop::collection::vec(-3i64..=3, count).prop_map(move |c| {
        let mut p = PhiPoly::zero(n, size, size);
        for (i, m) in monos.iter().enumerate() {
            let block = QMat::from_fn(size, size, |r, s| q(c[i * size * size + r * size + s], 1));
            p.add_term(m, &block);
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn laurent_ring_laws(a in laurent(2), b in laurent(2), c in laurent(2)) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in laurent(2), b in laurent(2), x in angles(2)) {
        let lhs = (&a * &b).evaluate(&x);
        let rhs = a.evaluate(&x) * b.evaluate(&x);
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
        prop_assert!((a.conj().evaluate(&x) - a.evaluate(&x).conj()).norm() < 1e-9);
    }

    #[test]
    fn exact_and_grid_integrals_agree(a in laurent(2)) {
        let exact = to_f64(&integrate_exact(&a, true));
        let grid = integrate(&a, true, 512).unwrap();
        prop_assert!((grid - Complex64::new(exact, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn newton_girard_roundtrip(e in prop::collection::vec((-9i64..=9, 1i64..=5), 1..6)) {
        let e: Vec<Q> = e.into_iter().map(|(a, b)| q(a, b)).collect();
        let p = power_sums_from_elementary(&e, e.len());
        let back = newton_girard(&p);
        prop_assert_eq!(&back[..e.len()], &e[..]);
    }

    #[test]
    fn weight_is_psi0_gram(x in angles(3)) {
        let w = weight_polynomial(3, 1).unwrap();
        let p = psi0(3).evaluate(&x);
        let direct = p.adjoint() * &p;
        let via_phi = w.evaluate(&phi_point(3, &x));
        prop_assert!((direct - &via_phi).norm() < 1e-10);
        let h = via_phi.clone() - via_phi.adjoint();
        prop_assert!(h.norm() < 1e-10);
    }

    #[test]
    fn torus_image_lies_in_domain(x in angles(2)) {
        prop_assert!(domain_contains(&torus_to_real(2, &x)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn inner_product_is_symmetric(a in phipoly(2, 3, 1), b in phipoly(2, 3, 1)) {
        let w = weight_polynomial(2, 1).unwrap();
        let mut mom = Moments::new(2);
        let ab = inner_product_exact(&a, &b, &w, &mut mom);
        let ba = inner_product_exact(&b, &a, &w, &mut mom);
        prop_assert_eq!(ab, ba.transpose());
    }

    #[test]
    fn operators_are_symmetric(a in phipoly(2, 3, 1), b in phipoly(2, 3, 1)) {
        let ops = build_operators(2, 1).unwrap();
        let w = weight_polynomial(2, 1).unwrap();
        let mut mom = Moments::new(2);
        for op in [&ops.plus, &ops.minus] {
            let lhs = inner_product_exact(&op.apply(&a), &b, &w, &mut mom);
            let rhs = inner_product_exact(&a, &op.apply(&b), &w, &mut mom);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
