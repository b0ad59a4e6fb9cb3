//! Composite Gauss–Legendre quadrature with dyadic refinement.

use crate::error::{Error, Result};
use crate::linalg::Vector;

const NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];

const WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Largest refinement level; level `L` uses `2^L` panels.
    pub max_depth: u32,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-10,
            rel: 1e-10,
            max_depth: 14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Vector,
    /// Refinement level at which the estimate was accepted.
    pub depth: u32,
    /// Max-norm difference between the last two levels.
    pub difference: f64,
}

fn panels<F>(f: &mut F, a: f64, b: f64, dim: usize, count: u32) -> Result<Vector>
where
    F: FnMut(f64) -> Result<Vector>,
{
    let h = (b - a) / count as f64;
    let mut total = Vector::zeros(dim);
    for p in 0..count {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        let mut panel = Vector::zeros(dim);
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            let v = f(mid + 0.5 * h * x)?;
            v.check_len(dim)?;
            panel = panel.axpy(w, &v);
        }
        total = total.axpy(0.5 * h, &panel);
    }
    Ok(total)
}

/// Single-panel 8-point rule on `[a, b]`.
pub fn gauss_legendre_panel<F>(f: &mut F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for (x, w) in NODES.iter().zip(WEIGHTS) {
        s += w * f(mid + half * x)?;
    }
    Ok(half * s)
}

/// `∫ₐᵇ f(t) dt` for a vector-valued integrand of length `dim`.
pub fn integrate_vector<F>(mut f: F, a: f64, b: f64, dim: usize, tol: &Tolerance) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<Vector>,
{
    if a == b {
        return Ok(Quadrature {
            value: Vector::zeros(dim),
            depth: 0,
            difference: 0.0,
        });
    }
    let mut prev = panels(&mut f, a, b, dim, 1)?;
    let mut difference = f64::INFINITY;
    for depth in 1..=tol.max_depth {
        let next = panels(&mut f, a, b, dim, 1 << depth)?;
        difference = (next - prev).max_abs();
        if difference <= tol.abs + tol.rel * next.max_abs() {
            return Ok(Quadrature {
                value: next,
                depth,
                difference,
            });
        }
        prev = next;
    }
    Err(Error::NonConvergence {
        depth: tol.max_depth,
        difference,
    })
}

/// `∫ₐᵇ f(t) dt` for a scalar integrand.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_vector(|t| Ok(Vector::from_slice(&[f(t)?])), a, b, 1, tol).map(|q| q.value[0])
}
