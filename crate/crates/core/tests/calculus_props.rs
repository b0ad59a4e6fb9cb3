mod common;

use lorch_core::calculus::{
    antiderivative, first_integral_pair, frame_fields, g_fields, line_integral_algebra, potential, PathSpec,
    PotentialMode,
};
use lorch_core::field::{fd_jacobian, Reciprocal};
use lorch_core::quadrature::Tolerance;
use lorch_core::{AlgebraSpec, Family, FieldDef, Matrix, Vector, VectorField};

fn curl_max(jac: &Matrix) -> f64 {
    let n = jac.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((jac[(i, j)] - jac[(j, i)]).abs());
        }
    }
    worst
}

#[test]
fn example_field_identity_gives_printed_g_fields() {
    let alg = AlgebraSpec::standard(Family::A3_r, &[0.0; 6]).unwrap();
    let f = FieldDef::identity(3);
    let g = g_fields(&f, &alg);
    let mut rng = common::rng(31);
    for _ in 0..100 {
        let mut w = common::random_vector(&mut rng, 3, -2.0, 2.0);
        if w[0].abs() < 0.2 {
            w[0] = 0.2f64.copysign(w[0]);
        }
        let (x1, x2, x3) = (w[0], w[1], w[2]);
        let printed = [
            Vector::new3(1.0 / x1, 0.0, 0.0),
            Vector::new3(-x2 / (x1 * x1), 1.0 / x1, 0.0),
            Vector::new3(-x3 / (x1 * x1), 0.0, 1.0 / x1),
        ];
        for k in 0..3 {
            let got = g[k].eval(&w).unwrap();
            assert!(common::max_abs_diff(&got, &printed[k]) <= 1e-9, "G{} at {w:?}", k + 1);
        }
    }
}

#[test]
fn frame_and_dual_fields_are_biorthogonal() {
    let mut rng = common::rng(32);
    for family in Family::ALL {
        let alg = common::random_algebra(&mut rng, family);
        for (name, f) in common::corpus(&mut rng, &alg) {
            let es = frame_fields(&f, &alg);
            let gs = g_fields(&f, &alg);
            let center = Vector::zeros(alg.dim());
            for _ in 0..40 {
                let w = common::regular_point(&mut rng, &f, &alg, &center, 2.0);
                for i in 0..alg.dim() {
                    let ei = es[i].eval(&w).unwrap();
                    for j in 0..alg.dim() {
                        let gj = gs[j].eval(&w).unwrap();
                        let want = if i == j { 1.0 } else { 0.0 };
                        let err = (ei.dot(&gj) - want).abs();
                        assert!(err <= 1e-9, "{family} {name}: <E{i},G{j}> off by {err}");
                    }
                }
            }
        }
    }
}

#[test]
fn dual_fields_are_curl_free() {
    let mut rng = common::rng(33);
    for family in Family::ALL {
        let alg = common::random_algebra(&mut rng, family);
        for (name, f) in common::corpus(&mut rng, &alg) {
            let center = Vector::zeros(alg.dim());
            for _ in 0..40 {
                let w = common::regular_point(&mut rng, &f, &alg, &center, 2.0);
                for (k, g) in g_fields(&f, &alg).iter().enumerate() {
                    let jac = fd_jacobian(g, &w).unwrap().matrix;
                    let c = curl_max(&jac);
                    assert!(c <= 1e-4, "{family} {name}: curl G{} = {c}", k + 1);
                }
            }
        }
    }
}

#[test]
fn printed_dual_fields_for_the_two_parameter_family() {
    let mut rng = common::rng(34);
    for _ in 0..20 {
        let alg = common::random_algebra(&mut rng, Family::A3_rs);
        let (p1, p2) = (alg.params()[0], alg.params()[1]);
        let roles = alg.roles();
        let f = FieldDef::identity(3);
        let g = g_fields(&f, &alg);
        for _ in 0..20 {
            let w = common::regular_point(&mut rng, &f, &alg, &Vector::zeros(3), 2.0);
            let (fr, fs, ft) = (w[roles.r], w[roles.s], w[roles.t]);
            let den = fs * fs + p2 * fs * ft - p1 * ft * ft;
            let mut gr = Vector::zeros(3);
            gr[roles.r] = 1.0 / fr;
            let mut gs = Vector::zeros(3);
            gs[roles.s] = (fs + p2 * ft) / den;
            gs[roles.t] = -p1 * ft / den;
            let mut gt = Vector::zeros(3);
            gt[roles.s] = -ft / den;
            gt[roles.t] = fs / den;
            let scale = 1.0 + gr.max_abs() + gs.max_abs() + gt.max_abs();
            assert!(common::max_abs_diff(&g[roles.r].eval(&w).unwrap(), &gr) <= 1e-9 * scale);
            assert!(common::max_abs_diff(&g[roles.s].eval(&w).unwrap(), &gs) <= 1e-9 * scale);
            assert!(common::max_abs_diff(&g[roles.t].eval(&w).unwrap(), &gt) <= 1e-9 * scale);
        }
    }
}

#[test]
fn printed_dual_fields_for_the_diagonal_family() {
    let alg = AlgebraSpec::standard(Family::A3_123, &[]).unwrap();
    let mut rng = common::rng(35);
    let f = FieldDef::parse("f1 = x1^2 + 1; f2 = x2*x2*x2 + 2; f3 = x3 - 3", 3).unwrap();
    let g = g_fields(&f, &alg);
    for _ in 0..100 {
        let w = common::regular_point(&mut rng, &f, &alg, &Vector::zeros(3), 1.0);
        let fw = f.eval(&w).unwrap();
        for i in 0..3 {
            let mut want = Vector::zeros(3);
            want[i] = 1.0 / fw[i];
            assert!(common::max_abs_diff(&g[i].eval(&w).unwrap(), &want) <= 1e-9);
        }
    }
}

/// `∫ w⁻ⁿ dξ = −w^{1−n}/(n−1)` computed coordinate-wise: on `A³₁(0,…,0)`
/// write `w = x₁e + v` with `v² = 0`; on `A³₁,₂,₃` everything is diagonal.
fn power_antiderivative_oracle(family: Family, n: i32, w: &Vector) -> Vector {
    let m = 1 - n;
    let k = 1.0 / m as f64;
    match family {
        Family::A3_r => {
            let x1 = w[0];
            Vector::new3(k * x1.powi(m), x1.powi(m - 1) * w[1], x1.powi(m - 1) * w[2])
        }
        Family::A3_123 => Vector::new3(k * w[0].powi(m), k * w[1].powi(m), k * w[2].powi(m)),
        _ => unreachable!(),
    }
}

#[test]
fn antiderivative_of_powers_matches_closed_form() {
    let mut rng = common::rng(36);
    for family in [Family::A3_r, Family::A3_123] {
        let alg = AlgebraSpec::standard(family, &[0.0; 6][..family.param_count()]).unwrap();
        for n in [2, 3, -1, -2] {
            let f = FieldDef::power(&alg, n);
            let base = Vector::new3(1.5, 1.2, 0.8);
            let h = antiderivative(&f, &alg, base, power_antiderivative_oracle(family, n, &base)).unwrap();
            for _ in 0..50 {
                let w = common::random_vector(&mut rng, 3, 0.5, 2.5);
                let got = h.eval(&w).unwrap();
                let want = power_antiderivative_oracle(family, n, &w);
                assert!(common::max_abs_diff(&got, &want) <= 1e-7, "{family} n={n} at {w:?}");
            }
        }
    }
}

#[test]
fn homotopic_paths_give_the_same_value() {
    let mut rng = common::rng(37);
    let tol = Tolerance::default();
    for family in Family::ALL {
        let alg = common::random_algebra(&mut rng, family);
        for (name, f) in common::corpus(&mut rng, &alg) {
            let c = common::ball_center(&mut rng, &f, &alg);
            let h = antiderivative(&f, &alg, c, alg.zero()).unwrap();
            for _ in 0..5 {
                let w = c + common::random_vector(&mut rng, alg.dim(), -0.3, 0.3);
                let via = c + common::random_vector(&mut rng, alg.dim(), -0.3, 0.3);
                let direct = h.eval_along(&PathSpec::polyline(vec![c, w]).unwrap()).unwrap();
                let detour = h.eval_along(&PathSpec::polyline(vec![c, via, w]).unwrap()).unwrap();
                let bound = 10.0 * (tol.abs + tol.rel * direct.max_abs());
                assert!(common::max_abs_diff(&direct, &detour) <= bound, "{family} {name}");
            }
        }
    }
}

#[test]
fn closed_loops_integrate_to_zero() {
    let mut rng = common::rng(38);
    let tol = Tolerance::default();
    for family in Family::ALL {
        let alg = common::random_algebra(&mut rng, family);
        for (name, f) in common::corpus(&mut rng, &alg) {
            let c = common::ball_center(&mut rng, &f, &alg);
            let recip = Reciprocal { field: &f, algebra: &alg };
            for _ in 0..5 {
                let pts: Vec<Vector> =
                    (0..4).map(|_| c + common::random_vector(&mut rng, alg.dim(), -0.3, 0.3)).collect();
                let path = PathSpec::closed(pts).unwrap();
                let loop_value = line_integral_algebra(&recip, &path, &alg, &tol).unwrap();
                assert!(loop_value.max_abs() <= 1e-8, "{family} {name}: {loop_value:?}");
            }
        }
    }
}

#[test]
fn antiderivative_rectifies_the_field() {
    let mut rng = common::rng(39);
    for family in Family::ALL {
        let alg = common::random_algebra(&mut rng, family);
        for (name, f) in common::corpus(&mut rng, &alg) {
            let c = common::ball_center(&mut rng, &f, &alg);
            let h = antiderivative(&f, &alg, c, alg.zero()).unwrap();
            for _ in 0..5 {
                let w = c + common::random_vector(&mut rng, alg.dim(), -0.3, 0.3);
                let fd = fd_jacobian(&h, &w).unwrap().matrix;
                let want = alg.representation(&alg.inverse(&f.eval(&w).unwrap()).unwrap()).unwrap();
                let err = fd.axpy(-1.0, &want).max_abs();
                assert!(err <= 1e-4 * (1.0 + want.max_abs()), "{family} {name}: {err}");
                // H_*F = e
                let pushed = fd.mul_vec(&f.eval(&w).unwrap());
                assert!(common::max_abs_diff(&pushed, &alg.unit()) <= 1e-4 * (1.0 + want.max_abs()));
            }
        }
    }
}

#[test]
fn potentials_of_dual_fields_are_the_coordinates_of_h() {
    let mut rng = common::rng(40);
    let tol = Tolerance::default();
    for family in [Family::A2_r, Family::A3_r, Family::A3_rs] {
        let alg = common::random_algebra(&mut rng, family);
        let f = FieldDef::power(&alg, 2);
        let c = common::ball_center(&mut rng, &f, &alg);
        let h = antiderivative(&f, &alg, c, alg.zero()).unwrap();
        let w = c + common::random_vector(&mut rng, alg.dim(), -0.2, 0.2);
        let hw = h.eval(&w).unwrap();
        for (k, g) in g_fields(&f, &alg).iter().enumerate() {
            let line = potential(g, &c, &w, PotentialMode::LineIntegral, &tol).unwrap();
            assert!((line - hw[k]).abs() <= 1e-8 * (1.0 + hw[k].abs()));
            let nested = potential(g, &c, &w, PotentialMode::Iterated, &tol).unwrap();
            assert!((nested - hw[k]).abs() <= 1e-5 * (1.0 + hw[k].abs()), "{family} G{k}: {nested} vs {}", hw[k]);
        }
    }
}

#[test]
fn first_integrals_are_conserved_and_transversal() {
    let mut rng = common::rng(41);
    for family in [Family::A3_r, Family::A3_rs, Family::A3_123] {
        let alg = common::random_algebra(&mut rng, family);
        for (name, f) in common::corpus(&mut rng, &alg) {
            let c = common::ball_center(&mut rng, &f, &alg);
            let h = antiderivative(&f, &alg, c, alg.zero()).unwrap();
            let pair = first_integral_pair(&h).unwrap();
            for _ in 0..5 {
                let w = c + common::random_vector(&mut rng, 3, -0.3, 0.3);
                let [r1, r2] = pair.flow_residuals(&w).unwrap();
                let scale = 1.0 + f.eval(&w).unwrap().norm();
                assert!(r1.abs() <= 1e-5 * scale && r2.abs() <= 1e-5 * scale, "{family} {name}");
                assert!(pair.transversality_angle(&w).unwrap() >= 1.0);
            }
        }
    }
}
