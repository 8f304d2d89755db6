use proptest::prelude::*;

use krein_core::detect::{self, Component};
use krein_core::ideals;
use krein_core::linalg::{self, c};
use krein_core::spinor::SpinorModule;
use krein_core::{AdmissibleRealStructure, Multivector, Signature};

const SIGS: [(usize, usize); 5] = [(2, 0), (1, 1), (1, 3), (3, 1), (2, 2)];

fn signature() -> impl Strategy<Value = Signature> {
    prop::sample::select(SIGS.to_vec()).prop_map(|(p, q)| Signature::new(p, q).unwrap())
}

fn element(sig: Signature) -> impl Strategy<Value = Multivector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), sig.blade_count())
        .prop_map(move |z| Multivector::from_dense(sig, &z.iter().map(|&(re, im)| c(re, im)).collect::<Vec<_>>()))
}

fn integer_element(sig: Signature) -> impl Strategy<Value = Multivector> {
    prop::collection::vec((-4i32..=4, -4i32..=4), sig.blade_count()).prop_map(move |z| {
        Multivector::from_dense(sig, &z.iter().map(|&(re, im)| c(f64::from(re), f64::from(im))).collect::<Vec<_>>())
    })
}

fn triple() -> impl Strategy<Value = (Multivector, Multivector, Multivector)> {
    signature().prop_flat_map(|s| (integer_element(s), integer_element(s), integer_element(s)))
}

fn pair() -> impl Strategy<Value = (Multivector, Multivector)> {
    signature().prop_flat_map(|s| (element(s), element(s)))
}

fn lorentz_vector() -> impl Strategy<Value = (Signature, Vec<f64>)> {
    prop::sample::select(vec![(1usize, 3usize), (3, 1)])
        .prop_flat_map(|(p, q)| (Just(Signature::new(p, q).unwrap()), prop::collection::vec(-1.0..1.0f64, p + q)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative_on_integer_elements((a, b, x) in triple()) {
        prop_assert_eq!((&(&a * &b) * &x).distance(&(&a * &(&b * &x))), 0.0);
    }

    #[test]
    fn trace_is_cyclic((a, b) in pair()) {
        prop_assert!(((&a * &b).normalized_trace() - (&b * &a).normalized_trace()).norm() < 1e-12);
    }

    #[test]
    fn cross_reverses_products((a, b) in pair()) {
        prop_assert!((&a * &b).cross().distance(&(&b.cross() * &a.cross())) < 1e-12);
    }

    #[test]
    fn sigma_product_is_hermitian((a, b) in pair()) {
        let sigma = AdmissibleRealStructure::euclidean_for(a.signature());
        prop_assert!((sigma.sigma_product(&a, &b) - sigma.sigma_product(&b, &a).conj()).norm() < 1e-12);
    }

    #[test]
    fn euclidean_sigma_product_is_positive(a in signature().prop_flat_map(element)) {
        let sigma = AdmissibleRealStructure::euclidean_for(a.signature());
        let n = sigma.sigma_product(&a, &a);
        prop_assert!(n.re > 0.0 && n.im.abs() < 1e-12);
    }

    #[test]
    fn representation_is_multiplicative((a, b) in pair()) {
        let m = SpinorModule::new(a.signature()).unwrap();
        let lhs = m.gammas.represent(&(&a * &b)).unwrap();
        let rhs = m.gammas.represent(&a).unwrap() * m.gammas.represent(&b).unwrap();
        prop_assert!(linalg::max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn cross_is_krein_adjoint(a in signature().prop_flat_map(element)) {
        let m = SpinorModule::new(a.signature()).unwrap();
        let lhs = m.gammas.represent(&a.cross()).unwrap();
        prop_assert!(linalg::max_diff(&lhs, &m.krein.adjoint(&m.gammas.represent(&a).unwrap())) < 1e-12);
    }

    #[test]
    fn cone_verdict_is_odd((s, v) in lorentz_vector()) {
        prop_assume!(s.quadratic_form(&v).abs() > 1e-6);
        let m = SpinorModule::new(s).unwrap();
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let a = detect::cone_test(&m.gammas, &m.krein, &v).unwrap().component;
        let b = detect::cone_test(&m.gammas, &m.krein, &neg).unwrap().component;
        let expected = match a {
            Component::Future => Component::Past,
            Component::Past => Component::Future,
            Component::None => Component::None,
        };
        prop_assert_eq!(b, expected);
    }

    #[test]
    fn cstar_norm_is_submultiplicative((a, b) in pair()) {
        let s = a.signature();
        prop_assume!(s.q() == 0 || s.p() == 1);
        let sigma = if s.q() == 0 {
            AdmissibleRealStructure::canonical(s)
        } else {
            AdmissibleRealStructure::from_vector(&Multivector::generator(s, 1), false).unwrap()
        };
        let nab = ideals::cstar_norm(&sigma, &(&a * &b)).unwrap();
        let (na, nb) = (ideals::cstar_norm(&sigma, &a).unwrap(), ideals::cstar_norm(&sigma, &b).unwrap());
        prop_assert!(nab <= na * nb * (1.0 + 1e-12));
    }
}
