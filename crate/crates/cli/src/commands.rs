use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use lorch_core::algebrize::{check_algebrizable, default_tolerance, infer_candidates, InferenceResult, SampleCheck};
use lorch_core::calculus::{antiderivative, first_integral_pair, g_matrix};
use lorch_core::dynamics::{integrate, level_drift, regular_domain, DomainSample, Trajectory};
use lorch_core::field::Reversed;
use lorch_core::geometry::{distance, metric_at};
use lorch_core::{AlgebraSpec, FieldDef, Matrix, Vector, VectorField};

use crate::config::{parse_field, ConfigError, JobConfig};
use crate::errata;
use crate::report::{core_error_kind, csv_number};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] lorch_core::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigError",
            CliError::Core(e) => core_error_kind(e),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Result of one command: the JSON payload, the exit code and, for `trace`,
/// the CSV text.
#[derive(Debug)]
pub struct Outcome {
    pub payload: serde_json::Value,
    pub exit: i32,
    pub csv: Option<String>,
}

impl Outcome {
    fn ok<P: Serialize>(payload: P) -> Self {
        Outcome::with_exit(payload, 0)
    }

    fn with_exit<P: Serialize>(payload: P, exit: i32) -> Self {
        Outcome {
            payload: serde_json::to_value(payload).expect("payloads serialize"),
            exit,
            csv: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Command {
    Check,
    Infer,
    Analyze,
    Trace,
    Errata,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Infer => "infer",
            Command::Analyze => "analyze",
            Command::Trace => "trace",
            Command::Errata => "errata",
        }
    }
}

pub fn run(command: Command, cfg: &JobConfig, seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match command {
        Command::Check => check(cfg, &mut rng),
        Command::Infer => infer(cfg, &mut rng),
        Command::Analyze => analyze(cfg, &mut rng),
        Command::Trace => trace(cfg),
        Command::Errata => errata::run(cfg.errata.as_deref(), &mut rng).map(Outcome::ok),
    }
}

fn vec(v: &Vector) -> Vec<f64> {
    v.as_slice().to_vec()
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.dim()).map(|i| vec(&m.row(i))).collect()
}

fn to_vector(v: &[f64], dim: usize, key: &str) -> Result<Vector> {
    if v.len() != dim {
        return Err(ConfigError::Value {
            section: "task",
            key: key.into(),
            msg: format!("point {v:?} has {} coordinates, expected {dim}", v.len()),
        }
        .into());
    }
    Ok(Vector::from_slice(v))
}

fn required(v: &Option<Vec<f64>>, key: &'static str, dim: usize) -> Result<Vector> {
    let v = v.as_ref().ok_or(ConfigError::MissingKey(key))?;
    to_vector(v, dim, key)
}

/// The configured points, or `samples` uniform draws from the sampling box.
fn sample_points(cfg: &JobConfig, dim: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vector>> {
    if !cfg.task.points.is_empty() {
        return cfg.task.points.iter().map(|p| to_vector(p, dim, "points")).collect();
    }
    let (lo, hi) = cfg.task.sample_box;
    Ok((0..cfg.task.samples)
        .map(|_| {
            let mut v = Vector::zeros(dim);
            for i in 0..dim {
                v[i] = rng.gen_range(lo..hi);
            }
            v
        })
        .collect())
}

fn grid_or_samples(cfg: &JobConfig, dim: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vector>> {
    match cfg.task.grid {
        Some(g) => Ok(g.points(dim)),
        None => sample_points(cfg, dim, rng),
    }
}

fn algebra_and_field(cfg: &JobConfig) -> Result<(AlgebraSpec, FieldDef)> {
    let alg = cfg.algebra()?;
    cfg.field_text()?;
    let field = parse_field(cfg, Some(&alg))?;
    Ok((alg, field))
}

#[derive(Serialize)]
struct AlgebraInfo {
    family: &'static str,
    roles: Vec<usize>,
    params: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    derived_params: Vec<f64>,
    unit_norm_sq: f64,
}

impl AlgebraInfo {
    fn new(alg: &AlgebraSpec) -> Self {
        AlgebraInfo {
            family: alg.family().name(),
            roles: alg.roles().as_vec(alg.dim()).into_iter().map(|i| i + 1).collect(),
            params: alg.params().to_vec(),
            derived_params: alg.derived_params().to_vec(),
            unit_norm_sq: alg.unit_norm_sq(),
        }
    }
}

#[derive(Serialize)]
struct Equation {
    label: &'static str,
    equation: String,
    residual: f64,
}

#[derive(Serialize)]
struct CheckedSample {
    point: Vec<f64>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    membership: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gcre_scaled: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_jacobian: Option<bool>,
    passes: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    equations: Vec<Equation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct CheckPayload {
    algebra: AlgebraInfo,
    tolerance: f64,
    verdict: bool,
    max_membership: f64,
    max_gcre: f64,
    skipped: usize,
    samples: Vec<CheckedSample>,
}

fn check(cfg: &JobConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let (alg, field) = algebra_and_field(cfg)?;
    let pts = sample_points(cfg, alg.dim(), rng)?;
    let tol = match (cfg.tolerance(), pts.first()) {
        (Some(t), _) => t,
        (None, Some(w)) => default_tolerance(&field, w),
        (None, None) => lorch_core::algebrize::FD_TOL,
    };
    let report = check_algebrizable(&field, &alg, &pts, tol)?;
    let samples = report
        .samples
        .iter()
        .map(|s| match s {
            SampleCheck::Evaluated {
                point,
                membership,
                gcre,
                gcre_scaled,
                exact_jacobian,
            } => CheckedSample {
                point: vec(point),
                status: "evaluated",
                membership: Some(*membership),
                gcre_scaled: Some(*gcre_scaled),
                exact_jacobian: Some(*exact_jacobian),
                passes: s.passes(tol),
                equations: gcre
                    .labeled
                    .iter()
                    .map(|r| Equation {
                        label: r.label,
                        equation: r.equation.clone(),
                        residual: r.residual,
                    })
                    .collect(),
                error: None,
            },
            SampleCheck::Skipped { point, error } => CheckedSample {
                point: vec(point),
                status: "skipped",
                membership: None,
                gcre_scaled: None,
                exact_jacobian: None,
                passes: false,
                equations: Vec::new(),
                error: Some(error.to_string()),
            },
        })
        .collect();
    let exit = if report.verdict { 0 } else { 1 };
    Ok(Outcome::with_exit(
        CheckPayload {
            algebra: AlgebraInfo::new(&alg),
            tolerance: tol,
            verdict: report.verdict,
            max_membership: report.max_membership,
            max_gcre: report.max_gcre,
            skipped: report.skipped,
            samples,
        },
        exit,
    ))
}

#[derive(Serialize)]
struct Candidate {
    family: &'static str,
    roles: Vec<usize>,
    params: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    derived: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fitted_derived: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    commutativity_residual: Option<f64>,
    fit_residual: f64,
    residual: f64,
    verdict: bool,
    degenerate: bool,
    rank: usize,
    samples: usize,
}

impl From<&InferenceResult> for Candidate {
    fn from(c: &InferenceResult) -> Self {
        Candidate {
            family: c.family.name(),
            roles: c.roles.as_vec(c.family.dim()).into_iter().map(|i| i + 1).collect(),
            params: c.params.clone(),
            derived: c.derived,
            fitted_derived: c.fitted_derived,
            commutativity_residual: c.commutativity_residual,
            fit_residual: c.fit_residual,
            residual: c.residual,
            verdict: c.verdict,
            degenerate: c.degenerate,
            rank: c.rank,
            samples: c.samples,
        }
    }
}

#[derive(Serialize)]
struct InferPayload {
    dim: usize,
    tolerance: f64,
    found: bool,
    best_residual: f64,
    candidates: Vec<Candidate>,
}

fn infer(cfg: &JobConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    cfg.field_text()?;
    let alg = match &cfg.algebra {
        Some(_) => Some(cfg.algebra()?),
        None => None,
    };
    let field = parse_field(cfg, alg.as_ref())?;
    let dim = field.dim();
    let pts = sample_points(cfg, dim, rng)?;
    let tol = match (cfg.tolerance(), pts.first()) {
        (Some(t), _) => t,
        (None, Some(w)) => default_tolerance(&field, w),
        (None, None) => lorch_core::algebrize::FD_TOL,
    };
    let candidates = infer_candidates(&field, &pts, tol)?;
    // Same acceptance rule as `infer_algebra`: the best candidate must pass.
    let found = candidates.first().is_some_and(|c| c.verdict);
    let best_residual = candidates.iter().map(|c| c.residual).fold(f64::INFINITY, f64::min);
    Ok(Outcome::with_exit(
        InferPayload {
            dim,
            tolerance: tol,
            found,
            best_residual,
            candidates: candidates.iter().map(Candidate::from).collect(),
        },
        if found { 0 } else { 1 },
    ))
}

#[derive(Serialize)]
struct MetricOut {
    matrix: Vec<Vec<f64>>,
    entries: Vec<f64>,
    frame_residual: f64,
    pullback_discrepancy: f64,
    unnormalized_discrepancy: f64,
    condition: f64,
    positive_definite: bool,
    ill_conditioned: bool,
}

#[derive(Serialize)]
struct FirstIntegralsAt {
    values: [f64; 2],
    flow_residuals: [f64; 2],
    transversality_deg: f64,
}

#[derive(Serialize)]
struct PointReport {
    point: Vec<f64>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    det: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g_fields: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    frame: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metric: Option<MetricOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_integrals: Option<FirstIntegralsAt>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    errors: Vec<String>,
}

#[derive(Serialize)]
struct DistanceOut {
    from: Vec<f64>,
    to: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct PairInfo {
    names: [String; 2],
    coeffs: [Vec<f64>; 2],
}

#[derive(Serialize)]
struct DomainOut {
    polynomial: &'static str,
    regular: usize,
    singular: usize,
    undefined: usize,
    max_polynomial_discrepancy: f64,
}

#[derive(Serialize)]
struct AnalyzePayload {
    algebra: AlgebraInfo,
    base: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_integrals: Option<PairInfo>,
    points: Vec<PointReport>,
    distances: Vec<DistanceOut>,
    regular_domain: DomainOut,
}

fn analyze(cfg: &JobConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let (alg, field) = algebra_and_field(cfg)?;
    let n = alg.dim();
    let base = required(&cfg.task.base, "base", n)?;
    let pts = grid_or_samples(cfg, n, rng)?;
    let h = antiderivative(field.clone(), &alg, base, alg.zero())?;
    let pair = if n == 3 { Some(first_integral_pair(&h)?) } else { None };

    let domain = regular_domain(&field, &alg, &pts)?;
    let mut points = Vec::with_capacity(pts.len());
    for (w, sample) in pts.iter().zip(&domain.samples) {
        let mut rep = PointReport {
            point: vec(w),
            status: "undefined",
            det: None,
            g_fields: None,
            frame: None,
            metric: None,
            h: None,
            first_integrals: None,
            errors: Vec::new(),
        };
        match sample {
            DomainSample::Undefined { error, .. } => rep.errors.push(error.to_string()),
            DomainSample::Evaluated { det, regular, .. } => {
                rep.det = Some(*det);
                rep.status = if *regular { "regular" } else { "singular" };
                if *regular {
                    match g_matrix(&field, &alg, w) {
                        Ok(g) => rep.g_fields = Some(rows(&g)),
                        Err(e) => rep.errors.push(e.to_string()),
                    }
                    match field.eval(w).and_then(|f| alg.representation(&f)) {
                        Ok(rf) => rep.frame = Some(rows(&rf.transpose())),
                        Err(e) => rep.errors.push(e.to_string()),
                    }
                    match metric_at(&field, &alg, w) {
                        Ok(m) => {
                            rep.metric = Some(MetricOut {
                                matrix: rows(&m.matrix),
                                entries: m.entries.clone(),
                                frame_residual: m.frame_residual,
                                pullback_discrepancy: m.discrepancy,
                                unnormalized_discrepancy: m.unnormalized_discrepancy,
                                condition: m.condition,
                                positive_definite: m.positive_definite,
                                ill_conditioned: m.ill_conditioned,
                            })
                        }
                        Err(e) => rep.errors.push(e.to_string()),
                    }
                    match h.eval(w) {
                        Ok(v) => rep.h = Some(vec(&v)),
                        Err(e) => rep.errors.push(e.to_string()),
                    }
                    if let Some(pair) = &pair {
                        let at = (|| {
                            Ok::<_, lorch_core::Error>(FirstIntegralsAt {
                                values: pair.values(w)?,
                                flow_residuals: pair.flow_residuals(w)?,
                                transversality_deg: pair.transversality_angle(w)?,
                            })
                        })();
                        match at {
                            Ok(v) => rep.first_integrals = Some(v),
                            Err(e) => rep.errors.push(e.to_string()),
                        }
                    }
                }
            }
        }
        points.push(rep);
    }

    let mut distances = Vec::new();
    for (a, b) in &cfg.task.distance {
        let (va, vb) = (to_vector(a, n, "distance")?, to_vector(b, n, "distance")?);
        let (d, error) = match distance(&h, &va, &vb) {
            Ok(d) => (Some(d), None),
            Err(e) => (None, Some(e.to_string())),
        };
        distances.push(DistanceOut {
            from: a.clone(),
            to: b.clone(),
            distance: d,
            error,
        });
    }

    Ok(Outcome::ok(AnalyzePayload {
        algebra: AlgebraInfo::new(&alg),
        base: vec(&base),
        first_integrals: pair.as_ref().map(|p| PairInfo {
            names: p.names.clone(),
            coeffs: [vec(&p.coeffs[0]), vec(&p.coeffs[1])],
        }),
        points,
        distances,
        regular_domain: DomainOut {
            polynomial: domain.polynomial,
            regular: domain.regular,
            singular: domain.singular,
            undefined: domain.undefined,
            max_polynomial_discrepancy: domain.max_polynomial_discrepancy,
        },
    }))
}

#[derive(Serialize)]
struct DriftOut {
    names: [String; 2],
    at_start: [f64; 2],
    drift: [f64; 2],
}

#[derive(Serialize)]
struct TracePayload {
    algebra: AlgebraInfo,
    start: Vec<f64>,
    t1: f64,
    step: f64,
    method: &'static str,
    points: usize,
    halted: bool,
    max_error_estimate: f64,
    final_time: f64,
    final_point: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_integrals: Option<DriftOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    drift_error: Option<String>,
}

fn trajectory_csv(traj: &Trajectory, dim: usize) -> String {
    let mut out = String::from(if dim == 3 { "t,x1,x2,x3,detR\n" } else { "t,x1,x2,detR\n" });
    for ((t, w), det) in traj.times.iter().zip(&traj.points).zip(&traj.dets) {
        let mut cells = vec![csv_number(*t)];
        cells.extend(w.iter().map(|x| csv_number(*x)));
        cells.push(csv_number(*det));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn trace(cfg: &JobConfig) -> Result<Outcome> {
    let (alg, field) = algebra_and_field(cfg)?;
    let n = alg.dim();
    let start = required(&cfg.task.start, "start", n)?;
    let t1 = cfg.task.t1.ok_or(ConfigError::MissingKey("t1"))?;
    let h = cfg.task.h;
    let traj = if t1 >= 0.0 {
        integrate(&field, &alg, &start, 0.0, t1, h)?
    } else {
        let mut back = integrate(&Reversed(&field), &alg, &start, 0.0, -t1, h)?;
        for t in &mut back.times {
            *t = -*t;
        }
        back
    };

    let (mut first_integrals, mut drift_error) = (None, None);
    if n == 3 {
        let drift = antiderivative(field.clone(), &alg, start, alg.zero()).and_then(|ad| {
            let pair = first_integral_pair(&ad)?;
            Ok(DriftOut {
                at_start: pair.values(&start)?,
                drift: level_drift(&pair, &traj)?,
                names: pair.names.clone(),
            })
        });
        match drift {
            Ok(d) => first_integrals = Some(d),
            Err(e) => drift_error = Some(e.to_string()),
        }
    }

    let csv = trajectory_csv(&traj, n);
    let mut out = Outcome::ok(TracePayload {
        algebra: AlgebraInfo::new(&alg),
        start: vec(&start),
        t1,
        step: traj.step,
        method: traj.method,
        points: traj.len(),
        halted: traj.halted,
        max_error_estimate: traj.max_error_estimate,
        final_time: *traj.times.last().unwrap_or(&0.0),
        final_point: vec(&traj.last()),
        first_integrals,
        drift_error,
    });
    out.csv = Some(csv);
    Ok(out)
}
