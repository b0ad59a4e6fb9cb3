#![allow(dead_code)]

use lorch_core::algebra::Roles;
use lorch_core::{AlgebraSpec, Element, Family, FieldDef, Vector, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Vector {
    let mut v = Vector::zeros(dim);
    for i in 0..dim {
        v[i] = rng.gen_range(lo..hi);
    }
    v
}

pub fn random_params(rng: &mut ChaCha8Rng, family: Family) -> Vec<f64> {
    (0..family.param_count()).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

pub fn random_roles(rng: &mut ChaCha8Rng, family: Family) -> Roles {
    let c = Roles::candidates(family);
    c[rng.gen_range(0..c.len())]
}

pub fn random_algebra(rng: &mut ChaCha8Rng, family: Family) -> AlgebraSpec {
    let roles = random_roles(rng, family);
    let params = random_params(rng, family);
    AlgebraSpec::new(family, roles, &params).unwrap()
}

/// Comfortably regular: `|det R(a)|` well above the singularity guard.
pub fn well_regular(algebra: &AlgebraSpec, a: &Element) -> bool {
    let det = algebra.det_representation(a).unwrap();
    det.is_finite() && det.abs() > 1e-2 * (1.0 + a.norm()).powi(algebra.dim() as i32)
}

/// Random element `u` with `R(u)` comfortably invertible.
pub fn random_regular_element(rng: &mut ChaCha8Rng, algebra: &AlgebraSpec) -> Element {
    loop {
        let a = random_vector(rng, algebra.dim(), -2.0, 2.0);
        if well_regular(algebra, &a) {
            return a;
        }
    }
}

/// Point in `center + [−radius, radius]ⁿ` where `F` is comfortably regular.
pub fn regular_point<F: VectorField + ?Sized>(
    rng: &mut ChaCha8Rng,
    field: &F,
    algebra: &AlgebraSpec,
    center: &Vector,
    radius: f64,
) -> Vector {
    for _ in 0..10_000 {
        let w = *center + random_vector(rng, algebra.dim(), -radius, radius);
        if let Ok(f) = field.eval(&w) {
            if f.is_finite() && well_regular(algebra, &f) {
                return w;
            }
        }
    }
    panic!("no regular point near {center:?}");
}

/// Test corpus of algebrizable fields: polynomials in `w` with random
/// coefficients, including a Laurent term.
pub fn corpus(rng: &mut ChaCha8Rng, algebra: &AlgebraSpec) -> Vec<(String, FieldDef)> {
    let e = algebra.unit();
    let a = random_regular_element(rng, algebra);
    let b = random_vector(rng, algebra.dim(), -1.0, 1.0);
    let c = random_vector(rng, algebra.dim(), -0.5, 0.5);
    vec![
        ("identity".into(), FieldDef::identity(algebra.dim())),
        ("square".into(), FieldDef::power(algebra, 2)),
        ("affine".into(), FieldDef::polynomial(algebra, 0, vec![b, a]).unwrap()),
        ("quadratic".into(), FieldDef::polynomial(algebra, 0, vec![e, a, c]).unwrap()),
        ("reciprocal".into(), FieldDef::power(algebra, -1)),
    ]
}

/// Central point of a regular ball for `field`: a random regular point.
pub fn ball_center<F: VectorField + ?Sized>(rng: &mut ChaCha8Rng, field: &F, algebra: &AlgebraSpec) -> Vector {
    loop {
        let w = random_vector(rng, algebra.dim(), -2.0, 2.0);
        let Ok(f) = field.eval(&w) else { continue };
        if !f.is_finite() || !well_regular(algebra, &f) {
            continue;
        }
        // The whole ball must stay comfortably regular.
        let ok = (0..64).all(|_| {
            let p = w + random_vector(rng, algebra.dim(), -0.3, 0.3);
            field.eval(&p).map(|f| well_regular(algebra, &f)).unwrap_or(false)
        });
        if ok {
            return w;
        }
    }
}

pub fn max_abs_diff(a: &Vector, b: &Vector) -> f64 {
    (*a - *b).max_abs()
}
