mod common;

use lorch_core::calculus::{antiderivative, first_integral_pair};
use lorch_core::dynamics::{flow, integrate, level_drift, regular_domain};
use lorch_core::field::Reversed;
use lorch_core::geometry::rectified_flow;
use lorch_core::{Family, FieldDef, Vector, VectorField};

const STEP: f64 = 0.01;
// Some corpus flows pass close to a finite-time blow-up within |t| ≤ 0.5.
const FINE_STEP: f64 = 1e-3;

#[test]
fn rk4_flow_matches_rectified_flow() {
    let mut rng = common::rng(61);
    let mut checked = 0;
    for family in Family::ALL {
        let alg = common::random_algebra(&mut rng, family);
        for (name, f) in common::corpus(&mut rng, &alg) {
            let w = common::ball_center(&mut rng, &f, &alg);
            let h = antiderivative(&f, &alg, w, alg.zero()).unwrap();
            for t in [-0.5, -0.25, -0.05, 0.05, 0.25, 0.5] {
                // The identity only holds while the trajectory stays regular.
                let Ok(numeric) = flow(&f, &alg, &w, t, FINE_STEP) else { continue };
                let Ok(rectified) = rectified_flow(&h, &w, t) else { continue };
                let err = common::max_abs_diff(&numeric, &rectified);
                assert!(err <= 1e-5 * (1.0 + numeric.max_abs()), "{family} {name} t={t}: {err}");
                checked += 1;
            }
        }
    }
    assert!(checked >= 120, "only {checked} comparisons ran");
}

#[test]
fn first_integrals_do_not_drift_along_trajectories() {
    let mut rng = common::rng(62);
    for family in [Family::A3_r, Family::A3_rs, Family::A3_123] {
        let alg = common::random_algebra(&mut rng, family);
        // affine fields keep regular flows: F(Φ_t) = exp(at)F(w₀)
        let a = common::random_regular_element(&mut rng, &alg);
        let b = common::random_vector(&mut rng, 3, -1.0, 1.0);
        let f = FieldDef::polynomial(&alg, 0, vec![b.scale(0.3), a.scale(0.3)]).unwrap();
        let w0 = common::ball_center(&mut rng, &f, &alg);
        let h = antiderivative(&f, &alg, w0, alg.zero()).unwrap();
        let pair = first_integral_pair(&h).unwrap();
        let hv = pair.values(&w0).unwrap();
        let forward = integrate(&f, &alg, &w0, 0.0, 1.0, STEP).unwrap();
        let backward = integrate(&Reversed(&f), &alg, &w0, 0.0, 1.0, STEP).unwrap();
        for traj in [&forward, &backward] {
            assert!(!traj.halted);
            let drift = level_drift(&pair, traj).unwrap();
            for k in 0..2 {
                assert!(drift[k] <= 1e-5 * (1.0 + hv[k].abs()), "{family}: drift {drift:?}");
            }
        }
    }
}

#[test]
fn trajectories_have_increasing_times_and_finite_states() {
    let mut rng = common::rng(63);
    for family in Family::ALL {
        let alg = common::random_algebra(&mut rng, family);
        for (_, f) in common::corpus(&mut rng, &alg) {
            let w = common::ball_center(&mut rng, &f, &alg);
            let Ok(traj) = integrate(&f, &alg, &w, 0.0, 0.3, 0.07) else { continue };
            assert!(traj.times.windows(2).all(|p| p[1] > p[0]));
            assert!(traj.points.iter().all(Vector::is_finite));
            assert_eq!(traj.times.len(), traj.points.len());
            assert_eq!(traj.dets.len(), traj.points.len());
        }
    }
}

#[test]
fn determinant_matches_family_polynomial_on_fields() {
    let mut rng = common::rng(64);
    for family in Family::ALL {
        let alg = common::random_algebra(&mut rng, family);
        for (name, f) in common::corpus(&mut rng, &alg) {
            let pts: Vec<Vector> = (0..200).map(|_| common::random_vector(&mut rng, alg.dim(), -2.0, 2.0)).collect();
            let report = regular_domain(&f, &alg, &pts).unwrap();
            assert!(report.max_polynomial_discrepancy <= 1e-9, "{family} {name}: {}", report.max_polynomial_discrepancy);
            assert_eq!(report.regular + report.singular + report.undefined, pts.len());
        }
    }
}

#[test]
fn determinant_classification_is_consistent() {
    let alg = common::random_algebra(&mut common::rng(65), Family::A3_123);
    let f = FieldDef::identity(3);
    let pts = [Vector::new3(1.0, 2.0, 3.0), Vector::new3(0.0, 1.0, 1.0), Vector::new3(-1.0, 1.0, 1.0)];
    let report = regular_domain(&f, &alg, &pts).unwrap();
    assert_eq!((report.regular, report.singular), (2, 1));
    for w in &pts {
        assert_eq!(alg.is_regular(&f.eval(w).unwrap()), w[0] != 0.0);
    }
}
