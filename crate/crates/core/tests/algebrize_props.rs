mod common;

use lorch_core::algebrize::{
    a_derivative, check_algebrizable, family_gcre, generic_gcre, infer_candidates, membership, EXACT_TOL,
    FD_TOL,
};
use lorch_core::field::FiniteDifference;
use lorch_core::{AlgebraSpec, Family, FieldDef, Matrix, Vector, VectorField};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

fn planted_field(rng: &mut ChaCha8Rng, alg: &AlgebraSpec) -> FieldDef {
    let n = alg.dim();
    let coeffs = (0..4).map(|_| common::random_vector(rng, n, -1.0, 1.0)).collect();
    FieldDef::polynomial(alg, 0, coeffs).unwrap()
}

fn samples(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vector> {
    (0..8).map(|_| common::random_vector(rng, n, -1.0, 1.0)).collect()
}

fn max_param_error(found: &[f64], planted: &[f64]) -> f64 {
    found.iter().zip(planted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn round_trip<F: VectorField>(field: &F, planted: &AlgebraSpec, pts: &[Vector], tol: f64, bound: f64) {
    let candidates = infer_candidates(field, pts, tol).unwrap();
    let hit = candidates
        .iter()
        .find(|c| c.family == planted.family() && c.roles == planted.roles())
        .expect("planted candidate missing");
    assert!(hit.verdict, "planted {} rejected: residual {}", planted.family(), hit.residual);
    let err = max_param_error(&hit.params, planted.params());
    assert!(err <= bound, "{}: parameter error {err}", planted.family());
    // The best-ranked candidate must pass too.
    assert!(candidates[0].verdict);
}

#[test]
fn inference_recovers_planted_algebras_with_exact_jacobians() {
    let mut rng = common::rng(21);
    for k in 0..100 {
        let family = Family::ALL[k % Family::ALL.len()];
        let alg = common::random_algebra(&mut rng, family);
        let field = planted_field(&mut rng, &alg);
        let pts = samples(&mut rng, alg.dim());
        round_trip(&field, &alg, &pts, EXACT_TOL, 1e-4);
    }
}

#[test]
fn inference_recovers_planted_algebras_with_finite_differences() {
    let mut rng = common::rng(22);
    for k in 0..100 {
        let family = Family::ALL[k % Family::ALL.len()];
        let alg = common::random_algebra(&mut rng, family);
        let field = FiniteDifference(planted_field(&mut rng, &alg));
        let pts = samples(&mut rng, alg.dim());
        round_trip(&field, &alg, &pts, FD_TOL, 1e-3);
    }
}

#[test]
fn positive_verdict_implies_a_derivative_everywhere() {
    let mut rng = common::rng(23);
    for family in Family::ALL {
        for _ in 0..10 {
            let alg = common::random_algebra(&mut rng, family);
            let poly = planted_field(&mut rng, &alg);
            let pts = samples(&mut rng, alg.dim());
            let fd = FiniteDifference(&poly);
            let report = check_algebrizable(&fd, &alg, &pts, FD_TOL).unwrap();
            assert!(report.verdict);
            for w in &pts {
                let d = a_derivative(&fd, &alg, w, FD_TOL).unwrap();
                let jf = fd.jacobian(w).unwrap().matrix;
                let rd = alg.representation(&d).unwrap();
                assert!(rd.axpy(-1.0, &jf).frobenius() <= FD_TOL * (1.0 + jf.frobenius()));
                // and the exact derivative is what was recovered
                let exact = match &poly {
                    FieldDef::Polynomial(p) => p.derivative(w).unwrap(),
                    _ => unreachable!(),
                };
                assert!((d - exact).max_abs() <= 1e-5 * (1.0 + exact.max_abs()));
            }
        }
    }
}

#[test]
fn wrong_family_is_rejected() {
    let mut rng = common::rng(24);
    let a31 = AlgebraSpec::standard(Family::A3_r, &[0.0; 6]).unwrap();
    let a123 = AlgebraSpec::standard(Family::A3_123, &[]).unwrap();
    let field = FieldDef::power(&a31, 2);
    let pts = samples(&mut rng, 3);
    assert!(check_algebrizable(&field, &a31, &pts, EXACT_TOL).unwrap().verdict);
    assert!(!check_algebrizable(&field, &a123, &pts, EXACT_TOL).unwrap().verdict);
}

fn algebra_and_matrix() -> impl Strategy<Value = (AlgebraSpec, Vec<f64>, Vec<f64>, bool)> {
    (0..Family::ALL.len(), any::<u64>(), prop::collection::vec(-2.0..2.0f64, 9), any::<bool>()).prop_map(
        |(f, seed, entries, inside)| {
            let mut rng = common::rng(seed);
            let alg = common::random_algebra(&mut rng, Family::ALL[f]);
            let u = common::random_vector(&mut rng, alg.dim(), -2.0, 2.0).as_slice().to_vec();
            (alg, u, entries, inside)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn generic_and_family_gcre_vanish_together((alg, u, entries, inside) in algebra_and_matrix()) {
        let n = alg.dim();
        let jac = if inside {
            alg.representation(&Vector::from_slice(&u)).unwrap()
        } else {
            let rows: Vec<&[f64]> = entries.chunks(3).take(n).map(|r| &r[..n]).collect();
            Matrix::from_rows(&rows)
        };
        let generic = generic_gcre(&jac, &alg).unwrap().iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
        let labeled = family_gcre(&jac, &alg).unwrap().iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
        let scale = 1.0 + jac.max_abs() * (0..n).flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
            .map(|(i, j, k)| alg.constant(i, j, k).abs()).fold(1.0, f64::max);
        if inside {
            prop_assert!(generic <= 1e-12 * scale && labeled <= 1e-12 * scale, "{} {}", generic, labeled);
        } else {
            // A random matrix is almost surely outside the image; both systems see it.
            prop_assert!((generic <= 1e-12 * scale) == (labeled <= 1e-12 * scale), "{} {}", generic, labeled);
        }
    }
}

#[test]
fn family_gcre_vanish_only_on_the_image() {
    // Matrices just off the image violate both systems.
    let mut rng = common::rng(25);
    for family in Family::ALL {
        let alg = common::random_algebra(&mut rng, family);
        let n = alg.dim();
        for _ in 0..100 {
            let u = common::random_vector(&mut rng, n, -2.0, 2.0);
            let mut jac = alg.representation(&u).unwrap();
            let (i, j) = (rand::Rng::gen_range(&mut rng, 0..n), rand::Rng::gen_range(&mut rng, 0..n));
            jac[(i, j)] += 0.5;
            if membership(&jac, &alg).unwrap().residual < 1e-3 {
                continue;
            }
            let generic = generic_gcre(&jac, &alg).unwrap().iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
            let labeled = family_gcre(&jac, &alg).unwrap().iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
            assert!(generic > 1e-3, "{family}: generic blind to perturbation");
            assert!(labeled > 1e-3, "{family}: labeled blind to perturbation at ({i},{j})");
        }
    }
}
