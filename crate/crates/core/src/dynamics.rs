//! Flows of vector fields by fixed-step RK4, drift of first integrals along
//! trajectories, and classification of the regular domain.

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_traits::Float;

use crate::algebra::{AlgebraSpec, Family};
use crate::calculus::FirstIntegralPair;
use crate::error::{Error, Result};
use crate::field::{Reversed, VectorField};
use crate::linalg::Vector;

/// Local error estimates above this abort the integration.
pub const MAX_LOCAL_ERROR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vector>,
    pub step: f64,
    pub method: &'static str,
    /// `det R(F(x))` at every point.
    pub dets: Vec<f64>,
    /// Integration stopped because `F` became singular.
    pub halted: bool,
    /// Largest step-doubling error estimate seen.
    pub max_error_estimate: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Vector {
        self.points[self.points.len() - 1]
    }
}

fn rk4_step<F: VectorField + ?Sized>(f: &F, y: &Vector, h: f64) -> Result<Vector> {
    let k1 = f.eval(y)?;
    let k2 = f.eval(&y.axpy(0.5 * h, &k1))?;
    let k3 = f.eval(&y.axpy(0.5 * h, &k2))?;
    let k4 = f.eval(&y.axpy(h, &k3))?;
    let incr = k1 + k2.scale(2.0) + k3.scale(2.0) + k4;
    Ok(y.axpy(h / 6.0, &incr))
}

/// Classical RK4 from `t0` to `t1 > t0` with the largest step `≤ h` that
/// divides the span evenly. Every step is checked against two half steps.
/// Integration halts, flagged, if `F` becomes singular in `algebra` after
/// starting regular.
pub fn integrate<F: VectorField + ?Sized>(
    field: &F,
    algebra: &AlgebraSpec,
    w0: &Vector,
    t0: f64,
    t1: f64,
    h: f64,
) -> Result<Trajectory> {
    let n = algebra.dim();
    if field.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            found: field.dim(),
        });
    }
    w0.check_len(n)?;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    if !(t1 >= t0) || !t1.is_finite() || !t0.is_finite() {
        return Err(Error::InvalidArgument("time span must satisfy t0 <= t1".into()));
    }
    let det_at = |y: &Vector, t: f64| -> Result<(f64, bool)> {
        let f = field.eval(y).map_err(|e| Error::TrajectoryInterrupted {
            t,
            state: *y,
            cause: Box::new(e),
        })?;
        Ok((algebra.rep(&f).det(), algebra.is_regular(&f)))
    };
    let steps = Float::ceil((t1 - t0) / h) as usize;
    let step = if steps == 0 { 0.0 } else { (t1 - t0) / steps as f64 };
    let mut traj = Trajectory {
        times: alloc::vec![t0],
        points: alloc::vec![*w0],
        step,
        method: "rk4",
        dets: Vec::with_capacity(steps + 1),
        halted: false,
        max_error_estimate: 0.0,
    };
    let (d0, started_regular) = det_at(w0, t0)?;
    traj.dets.push(d0);
    let mut y = *w0;
    for i in 0..steps {
        let t = t0 + step * i as f64;
        let interrupted = |e: Error| Error::TrajectoryInterrupted {
            t,
            state: y,
            cause: Box::new(e),
        };
        let full = rk4_step(field, &y, step).map_err(interrupted)?;
        let half = rk4_step(field, &y, 0.5 * step)
            .and_then(|m| rk4_step(field, &m, 0.5 * step))
            .map_err(interrupted)?;
        let estimate = (half - full).max_abs() / 15.0;
        traj.max_error_estimate = traj.max_error_estimate.max(estimate);
        if estimate > MAX_LOCAL_ERROR {
            return Err(Error::StepTooLarge { t, estimate });
        }
        if !full.is_finite() {
            return Err(Error::TrajectoryInterrupted {
                t,
                state: y,
                cause: Box::new(Error::Domain {
                    expr: "non-finite state".into(),
                }),
            });
        }
        y = full;
        let tn = if i + 1 == steps { t1 } else { t0 + step * (i + 1) as f64 };
        let (d, regular) = det_at(&y, tn)?;
        let crossed = traj.dets[traj.dets.len() - 1].signum() != d.signum();
        traj.times.push(tn);
        traj.points.push(y);
        traj.dets.push(d);
        if started_regular && (!regular || crossed) {
            traj.halted = true;
            break;
        }
    }
    Ok(traj)
}

/// `Φ_t(w)` for either sign of `t`; negative times integrate `−F`.
pub fn flow<F: VectorField>(field: &F, algebra: &AlgebraSpec, w: &Vector, t: f64, h: f64) -> Result<Vector> {
    let traj = if t >= 0.0 {
        integrate(field, algebra, w, 0.0, t, h)?
    } else {
        integrate(&Reversed(field), algebra, w, 0.0, -t, h)?
    };
    if traj.halted {
        return Err(Error::SingularElement {
            det: traj.dets[traj.dets.len() - 1],
        });
    }
    Ok(traj.last())
}

/// `maxᵢ |h(Φ_{tᵢ}) − h(Φ_{t₀})|` for both integrals of the pair.
pub fn level_drift<F: VectorField>(pair: &FirstIntegralPair<'_, F>, traj: &Trajectory) -> Result<[f64; 2]> {
    let Some(first) = traj.points.first() else {
        return Ok([0.0, 0.0]);
    };
    let h0 = pair.values(first)?;
    let mut drift = [0.0f64; 2];
    for p in &traj.points[1..] {
        let v = pair.values(p)?;
        for k in 0..2 {
            drift[k] = drift[k].max((v[k] - h0[k]).abs());
        }
    }
    Ok(drift)
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainSample {
    Evaluated {
        point: Vector,
        det: f64,
        /// The family's closed-form determinant polynomial at `F(w)`.
        polynomial: f64,
        regular: bool,
    },
    /// `F` is undefined at the point.
    Undefined { point: Vector, error: Error },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularDomainReport {
    pub family: Family,
    /// The determinant polynomial in the role coordinates of `F`.
    pub polynomial: &'static str,
    pub samples: Vec<DomainSample>,
    pub regular: usize,
    pub singular: usize,
    pub undefined: usize,
    /// `max |det − polynomial| / (1 + |det|)` over evaluated samples.
    pub max_polynomial_discrepancy: f64,
}

pub fn det_polynomial_text(family: Family) -> &'static str {
    match family {
        Family::A2_r => "f_r^2 + p2*f_r*f_s - p1*f_s^2",
        Family::A2_12 => "f_1*f_2",
        Family::A3_r => "P(f_r, f_s, f_t), the cubic of the A3_r representation",
        Family::A3_rs => "f_r*f_s^2 + p2*f_r*f_s*f_t - p1*f_r*f_t^2",
        Family::A3_123 => "f_1*f_2*f_3",
    }
}

/// Classifies samples as regular or singular by `|det R(F(w))|`.
pub fn regular_domain<F: VectorField + ?Sized>(field: &F, algebra: &AlgebraSpec, samples: &[Vector]) -> Result<RegularDomainReport> {
    if field.dim() != algebra.dim() {
        return Err(Error::Dimension {
            expected: algebra.dim(),
            found: field.dim(),
        });
    }
    let mut report = RegularDomainReport {
        family: algebra.family(),
        polynomial: det_polynomial_text(algebra.family()),
        samples: Vec::with_capacity(samples.len()),
        regular: 0,
        singular: 0,
        undefined: 0,
        max_polynomial_discrepancy: 0.0,
    };
    for w in samples {
        w.check_len(algebra.dim())?;
        match field.eval(w) {
            Ok(f) => {
                let det = algebra.rep(&f).det();
                let polynomial = algebra.family_det_polynomial(&f)?;
                let regular = algebra.is_regular(&f);
                if regular {
                    report.regular += 1;
                } else {
                    report.singular += 1;
                }
                report.max_polynomial_discrepancy = report
                    .max_polynomial_discrepancy
                    .max((det - polynomial).abs() / (1.0 + det.abs()));
                report.samples.push(DomainSample::Evaluated {
                    point: *w,
                    det,
                    polynomial,
                    regular,
                });
            }
            Err(error) => {
                report.undefined += 1;
                report.samples.push(DomainSample::Undefined { point: *w, error });
            }
        }
    }
    Ok(report)
}
