use proptest::prelude::*;

use twistor_kepler::dynamics;
use twistor_kepler::integrable::{self, ActionAngleChart, ExponentVector};
use twistor_kepler::matrix::{frob, CMatrix, CVector, C64};
use twistor_kepler::momentum;
use twistor_kepler::regularize::{self, TwistorClass};
use twistor_kepler::twistor_core::{self, Realization, TwistorVector};

fn cvec(parts: &[f64]) -> CVector {
    CVector::from_fn(parts.len() / 2, |i, _| C64::new(parts[2 * i], parts[2 * i + 1]))
}

/// Anti-diagonal null twistor from raw coordinates: the imaginary part of
/// `zeta^+ upsilon` is projected out.
fn null_antidiagonal(u: &[f64], z: &[f64]) -> Option<TwistorVector> {
    let zeta = cvec(z);
    if zeta.norm() < 1e-3 {
        return None;
    }
    let mut ups = cvec(u);
    let overlap = zeta.dotc(&ups);
    ups -= &zeta * C64::new(0.0, overlap.im / zeta.norm_squared());
    TwistorVector::new(Realization::AntiDiagonal, ups, zeta).ok()
}

fn coords(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-2.0..2.0f64, 2 * n),
        prop::collection::vec(-2.0..2.0f64, 2 * n),
    )
}

fn dims_and_coords() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..=4).prop_flat_map(coords)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn null_twistor_images_square_to_zero((u, z) in dims_and_coords()) {
        if let Some(v) = null_antidiagonal(&u, &z) {
            let a = momentum::j_pm_tilde(&v).unwrap().matrix;
            let b = momentum::j_pm(&twistor_core::change_realization(&v)).unwrap().matrix;
            for m in [a, b] {
                prop_assert!(frob(&(&m * &m)) <= 1e-10 * (1.0 + m.norm_squared()));
            }
        }
    }

    #[test]
    fn quadratic_identity_holds_off_the_null_cone((u, z) in dims_and_coords()) {
        let v = TwistorVector::new(Realization::Diagonal, cvec(&u), cvec(&z)).unwrap();
        let r = momentum::quadratic_identity_residual(&v).unwrap();
        prop_assert!(r <= 1e-12 * (1.0 + v.norm().powi(4)));
    }

    #[test]
    fn ks_section_inverts_submersion((u, z) in dims_and_coords(), phase in 0.0..6.3f64) {
        if let Some(v) = null_antidiagonal(&u, &z) {
            let p = regularize::ks_section(&v, 1e-10).unwrap();
            prop_assert!((&p.y * &v.lower - &v.upper).norm() <= 1e-12 * (1.0 + v.norm()));
            let q = regularize::ks_section(&v.scaled(C64::new(phase.cos(), phase.sin())), 1e-10).unwrap();
            prop_assert!(dynamics::relative_distance(&q, &p) <= 1e-12);
            let back = TwistorClass::new(regularize::submersion_r(&p, 1e-10).unwrap());
            prop_assert!(regularize::class_distance(&back, &TwistorClass::new(v.clone())).unwrap() <= 1e-12 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn canonical_class_ignores_phase((u, z) in dims_and_coords(), phase in 0.0..6.3f64) {
        let v = TwistorVector::new(Realization::Diagonal, cvec(&u), cvec(&z)).unwrap();
        prop_assume!(v.norm() > 1e-3);
        let a = TwistorClass::new(v.clone());
        let b = TwistorClass::new(v.scaled(C64::new(phase.cos(), phase.sin())));
        prop_assert!(regularize::class_distance(&a, &b).unwrap() <= 1e-12 * (1.0 + v.norm()));
    }

    #[test]
    fn twistor_flow_is_pi_antiperiodic((u, z) in dims_and_coords()) {
        let v = TwistorVector::new(Realization::AntiDiagonal, cvec(&u), cvec(&z)).unwrap();
        let w = dynamics::twistor_flow(&v, std::f64::consts::PI).unwrap();
        prop_assert!((w.stacked() + v.stacked()).norm() <= 1e-14 * (1.0 + v.norm()));
    }

    #[test]
    fn angles_lie_in_range(parts in prop::collection::vec(-3.0..3.0f64, 4)) {
        let v = TwistorVector::new(Realization::Diagonal, cvec(&parts[..2]), cvec(&parts[2..])).unwrap();
        prop_assume!(v.upper[0].norm() > 1e-6 && v.lower[0].norm() > 1e-6);
        let chart = ActionAngleChart::from_rows(&[&[1.0, 0.0], &[1.0, 1.0]]).unwrap();
        for psi in integrable::angles(&chart, &v).unwrap() {
            prop_assert!((0.0..2.0 * std::f64::consts::PI).contains(&psi));
        }
    }

    #[test]
    fn actions_reconstruct_moduli(parts in prop::collection::vec(-3.0..3.0f64, 8)) {
        let v = TwistorVector::new(Realization::Diagonal, cvec(&parts[..4]), cvec(&parts[4..])).unwrap();
        let chart = ActionAngleChart::from_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, -1.0],
            &[1.0, 1.0, -1.0, -1.0],
            &[1.0, 1.0, 1.0, 1.0],
        ]).unwrap();
        let a = integrable::actions(&chart, &v).unwrap();
        let m = integrable::moduli_at(&chart, a[0], &a[1..]).unwrap();
        for (x, y) in m.iter().zip(integrable::squared_moduli(&v)) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y));
        }
    }

    #[test]
    fn integrability_is_linear_in_the_exponents(k in -3i32..=3, l in -3i32..=3) {
        let chart = ActionAngleChart::from_rows(&[&[1.0, 0.0], &[1.0, 1.0]]).unwrap();
        let e = ExponentVector::new(vec![k], vec![l]).unwrap();
        let rows = integrable::check_integrability(&chart, &e).unwrap();
        prop_assert_eq!(rows, vec![k == 1, k + l == 0]);
    }

    #[test]
    fn cayley_is_unitary_and_round_trips(entries in prop::collection::vec(-2.0..2.0f64, 8)) {
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new(entries[2 * (2 * i + j)], entries[2 * (2 * i + j) + 1]));
        let y = twistor_kepler::matrix::hermitian_part(&a);
        let z = regularize::cayley(&y).unwrap();
        prop_assert!(twistor_kepler::matrix::unitary_residual(&z) <= 1e-12);
        let back = regularize::cayley_inverse(&z).unwrap();
        prop_assert!(frob(&(back - &y)) <= 1e-10 * (1.0 + frob(&y)));
    }
}
