use approx::assert_abs_diff_eq;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use ionframe::hilbert::{
    annihilation, coherent_state, displacement, number_state, tensor, FockSpace, Operator, Space, StateVector,
};
use ionframe::Error;

fn fock(n: usize) -> FockSpace {
    FockSpace::new(n).unwrap()
}

fn small_alpha() -> impl Strategy<Value = C64> {
    (-1.2..1.2f64, -1.2..1.2f64).prop_map(|(re, im)| C64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn displacement_is_unitary(alpha in small_alpha()) {
        let d = displacement(alpha, fock(40)).unwrap();
        prop_assert!(d.unitarity_error() < 1e-12);
    }

    #[test]
    fn displacements_compose_up_to_phase(a in small_alpha(), b in small_alpha()) {
        // D(a) D(b) = exp(i Im(a b*)) D(a + b), checked away from the cutoff
        let f = fock(60);
        let lhs = displacement(a, f).unwrap().mul(&displacement(b, f).unwrap()).unwrap();
        let phase = C64::from_polar(1.0, (a * b.conj()).im);
        let rhs = displacement(a + b, f).unwrap().scale(phase);
        prop_assert!(lhs.low_block_diff(&rhs, 20).unwrap() < 1e-9);
    }

    #[test]
    fn coherent_state_is_eigenstate_of_annihilation(alpha in small_alpha()) {
        let f = fock(50);
        let psi = coherent_state(alpha, f).unwrap();
        let mean = annihilation(f).expectation(&psi).unwrap();
        prop_assert!((mean - alpha).norm() < 1e-9);
        prop_assert!((psi.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tensor_dimension(n in 2usize..12) {
        let a = annihilation(fock(n));
        let q = Operator::identity(Space::Qubit);
        let t = tensor(&q, &a).unwrap();
        prop_assert_eq!(t.matrix().dim(), (2 * n, 2 * n));
        prop_assert!(tensor(&a, &q).is_err());
    }

    #[test]
    fn superposition_is_normalized(c0 in -2.0..2.0f64, c1 in 0.1..2.0f64, n in 1usize..10) {
        let f = fock(12);
        let v0 = number_state(0, f).unwrap();
        let vn = number_state(n, f).unwrap();
        let s = StateVector::superpose(&[(C64::new(c0, 0.0), &v0), (C64::new(0.0, c1), &vn)]).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn guard_band_is_enforced_at_the_boundary() {
    let f = fock(50);
    // |alpha|^2 = 12.5 is allowed, anything beyond is not
    assert!(displacement(C64::new(12.5_f64.sqrt(), 0.0), f).is_ok());
    let err = displacement(C64::new(3.6, 0.0), f).unwrap_err();
    assert!(matches!(err, Error::GuardBandViolation { .. }));
}

#[test]
fn small_cutoff_annihilation() {
    let a = annihilation(fock(2));
    assert_abs_diff_eq!(a.matrix()[[0, 1]].re, 1.0);
    assert_abs_diff_eq!(a.matrix()[[1, 0]].re, 0.0);
}
