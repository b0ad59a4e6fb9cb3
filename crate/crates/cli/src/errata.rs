//! Printed closed forms compared against values computed from the structure
//! constants.
//!
//! Each item evaluates a list of named scalars both ways on random inputs and
//! reports per-entry values at a fixed example input.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use lorch_core::algebra::{derived_a3r_params, printed_a3r_params};
use lorch_core::calculus::{antiderivative, g_matrix};
use lorch_core::geometry::metric_at;
use lorch_core::{AlgebraSpec, Family, FieldDef, Vector, VectorField};

use crate::commands::CliError;
use crate::config::ConfigError;

const SAMPLES: usize = 100;
const MAX_DRAWS: usize = 10_000;

#[derive(Debug, Serialize)]
pub struct ErrataPayload {
    pub status: &'static str,
    pub compared: usize,
    pub mismatches: usize,
    pub items: Vec<ItemReport>,
}

#[derive(Debug, Serialize)]
pub struct ItemReport {
    pub id: &'static str,
    pub description: &'static str,
    pub status: &'static str,
    pub tolerance: f64,
    pub samples: usize,
    /// `max |computed − printed| / (1 + |computed|)` over all entries and samples.
    pub max_rel_delta: f64,
    pub example_input: Vec<f64>,
    pub entries: Vec<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Entry {
    pub name: String,
    pub computed: f64,
    pub printed: f64,
    pub delta: f64,
    pub max_rel_delta: f64,
}

type Pair = (Vec<f64>, Vec<f64>);

struct Item {
    id: &'static str,
    description: &'static str,
    names: fn() -> Vec<String>,
    tolerance: f64,
    example: &'static [f64],
    draw: fn(&mut ChaCha8Rng) -> Vec<f64>,
    /// `(computed, printed)`, or `None` where the input is (nearly) singular.
    eval: fn(&[f64]) -> Option<Pair>,
    note: Option<fn() -> String>,
}

fn uniform(rng: &mut ChaCha8Rng, k: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..k).map(|_| rng.gen_range(lo..hi)).collect()
}

fn rel(c: f64, p: f64) -> f64 {
    (c - p).abs() / (1.0 + c.abs())
}

fn a3r(p: &[f64]) -> AlgebraSpec {
    AlgebraSpec::standard(Family::A3_r, p).expect("six parameters")
}

fn a3rs(p: &[f64]) -> AlgebraSpec {
    AlgebraSpec::standard(Family::A3_rs, p).expect("two parameters")
}

fn a123() -> AlgebraSpec {
    AlgebraSpec::standard(Family::A3_123, &[]).expect("no parameters")
}

/// `F(w)` values well inside the regular set.
fn regular(alg: &AlgebraSpec, f: &[f64]) -> Option<Vector> {
    let v = Vector::from_slice(f);
    let det = alg.det_representation(&v).ok()?;
    (det.abs() > 1e-3 * (1.0 + v.norm()).powi(3)).then_some(v)
}

fn matrix_names(prefix: &str, rows: [&str; 3], cols: [&str; 3]) -> Vec<String> {
    rows.iter()
        .flat_map(|r| cols.iter().map(move |c| format!("{prefix}{r}[{c}]")))
        .collect()
}

fn metric_names() -> Vec<String> {
    ["(1,1)", "(1,2)", "(1,3)", "(2,2)", "(2,3)", "(3,3)"]
        .iter()
        .map(|s| format!("g{s}"))
        .collect()
}

/// `g` from the frame system for a field whose value at the point is `f`.
fn frame_metric(alg: &AlgebraSpec, f: &Vector) -> Option<Vec<f64>> {
    metric_at(&FieldDef::identity(alg.dim()), alg, f).ok().map(|m| m.entries)
}

/// Rows `G₁, G₂, G₃` of `R(e/F)`, flattened.
fn dual_rows(alg: &AlgebraSpec, f: &Vector) -> Option<Vec<f64>> {
    let g = g_matrix(&FieldDef::identity(alg.dim()), alg, f).ok()?;
    Some(g.entries().collect())
}

/// Columns `Eᵢ = eᵢF` of `R(F)`, flattened.
fn frame_columns(alg: &AlgebraSpec, f: &Vector) -> Option<Vec<f64>> {
    let rf = alg.representation(f).ok()?;
    Some(rf.transpose().entries().collect())
}

fn p9(p: &[f64], q: [f64; 3]) -> [f64; 10] {
    [0.0, p[0], p[1], p[2], p[3], p[4], p[5], q[0], q[1], q[2]]
}

/// `max |[R(e_s), R(e_t)]|` for the nilpotent family with `p₇..p₉ = q`.
fn role_commutator(p: &[f64], q: [f64; 3]) -> f64 {
    let p = p9(p, q);
    let rs = [[0.0, p[7], p[8]], [1.0, p[1], p[3]], [0.0, p[2], p[4]]];
    let rt = [[0.0, p[8], p[9]], [0.0, p[3], p[5]], [1.0, p[4], p[6]]];
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let c: f64 = (0..3).map(|k| rs[i][k] * rt[k][j] - rt[i][k] * rs[k][j]).sum();
            worst = worst.max(c.abs());
        }
    }
    worst
}

fn printed_a3r_dual(p: &[f64], q: [f64; 3], f: &[f64], det: f64) -> Vec<f64> {
    let p = p9(p, q);
    let (fr, fs, ft) = (f[0], f[1], f[2]);
    let gr = [
        fr * fr + (p[1] + p[4]) * fr * fs + (p[3] + p[6]) * fr * ft + (p[1] * p[4] - p[2] * p[3]) * fs * fs
            + (p[1] * p[6] - p[2] * p[5]) * fs * ft
            + (p[3] * p[6] - p[4] * p[5]) * ft * ft,
        -p[7] * fr * fs - p[8] * fr * ft + (p[2] * p[8] - p[4] * p[7]) * fs * fs + (p[2] * p[9] - p[6] * p[7]) * fs * ft
            + (p[5] * p[7] - p[3] * p[8]) * ft * ft,
        -p[8] * fr * fs - p[9] * fr * ft + (p[2] * p[9] - p[4] * p[8]) * fs * fs + (p[5] * p[7] - p[1] * p[9]) * fs * ft
            + (p[5] * p[8] - p[3] * p[9]) * ft * ft,
    ];
    let gs = [
        -fr * fs - p[4] * fs * fs - (p[6] - p[3]) * fs * ft + p[5] * ft * ft,
        fr * fr + p[4] * fr * fs + p[6] * fr * ft - p[8] * fs * ft - p[9] * ft * ft,
        -(p[3] * fr * fs - p[8] * fs * fs + p[5] * fr * ft - p[9] * fs * ft),
    ];
    let gt = [
        p[2] * fs * fs - fr * ft - (p[1] - p[4]) * fs * ft - p[3] * ft * ft,
        -(p[2] * fr * fs + p[4] * fr * ft - p[7] * fs * ft - p[8] * ft * ft),
        fr * fr + p[1] * fr * fs + p[3] * fr * ft - p[7] * fs * fs - p[8] * fs * ft,
    ];
    gr.iter().chain(&gs).chain(&gt).map(|x| x / det).collect()
}

fn draw_p6_f(rng: &mut ChaCha8Rng) -> Vec<f64> {
    uniform(rng, 9, -2.0, 2.0)
}

fn draw_p2_f(rng: &mut ChaCha8Rng) -> Vec<f64> {
    uniform(rng, 5, -2.0, 2.0)
}

fn draw_f(rng: &mut ChaCha8Rng) -> Vec<f64> {
    uniform(rng, 3, -2.0, 2.0)
}

fn draw_right_half(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = uniform(rng, 3, -1.0, 1.0);
    x[0] = rng.gen_range(0.5..2.0);
    x
}

fn eval_a3r_dual(x: &[f64]) -> Option<Pair> {
    let alg = a3r(&x[..6]);
    let f = regular(&alg, &x[6..])?;
    let det = alg.det_representation(&f).ok()?;
    Some((dual_rows(&alg, &f)?, printed_a3r_dual(&x[..6], derived_a3r_params(&x[..6]), &x[6..], det)))
}

fn square_metric_printed(x: &[f64]) -> Vec<f64> {
    let (x1, x2, x3) = (x[0], x[1], x[2]);
    let x8 = x1.powi(8);
    [
        x8 + 8.0 * x1 * x1 * x2 * x2 + 8.0 * x1.powi(3) * x2.powi(3),
        -2.0 * x1.powi(3) * x2,
        -2.0 * x1.powi(3) * x3,
        x1.powi(4),
        0.0,
        x1.powi(4),
    ]
    .iter()
    .map(|v| v / x8)
    .collect()
}

fn items() -> Vec<Item> {
    vec![
        Item {
            id: "a3r-derived-parameters",
            description: "p7, p8, p9 of A3_r from the commutativity equations",
            names: || vec!["p7".into(), "p8".into(), "p9".into()],
            tolerance: 1e-9,
            example: &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            draw: |rng| uniform(rng, 6, -2.0, 2.0),
            eval: |p| Some((derived_a3r_params(p).to_vec(), printed_a3r_params(p).to_vec())),
            note: Some(|| {
                let p = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
                format!(
                    "at the example, max |[R(e_s), R(e_t)]| is {:e} with the printed values and {:e} with the computed ones",
                    role_commutator(&p, printed_a3r_params(&p)),
                    role_commutator(&p, derived_a3r_params(&p)),
                )
            }),
        },
        Item {
            id: "a3r-inverse",
            description: "components k1, k2, k3 of e/F in A3_r",
            names: || vec!["k1".into(), "k2".into(), "k3".into()],
            tolerance: 1e-9,
            example: &[0.5, -1.0, 0.25, 1.5, -0.5, 1.0, 1.0, 0.5, -0.75],
            draw: draw_p6_f,
            eval: |x| {
                let alg = a3r(&x[..6]);
                let f = regular(&alg, &x[6..])?;
                let det = alg.det_representation(&f).ok()?;
                let p = p9(&x[..6], derived_a3r_params(&x[..6]));
                let (f1, f2, f3) = (f[0], f[1], f[2]);
                let printed = vec![
                    (f1 * f1 + (p[1] + p[4]) * f1 * f2 + (p[3] + p[6]) * f1 * f3 + (p[1] * p[4] - p[2] * p[3]) * f2 * f2
                        + (p[1] * p[6] - p[2] * p[5]) * f2 * f3
                        + (p[3] * p[6] - p[4] * p[5]) * f3 * f3)
                        / det,
                    (-f1 * f2 - p[4] * f2 * f2 - (p[6] - p[3]) * f2 * f3 + p[5] * f3 * f3) / det,
                    (-f1 * f3 + p[2] * f2 * f2 - (p[1] - p[4]) * f2 * f3 - p[3] * f3 * f3) / det,
                ];
                Some((vec_of(&alg.inverse(&f).ok()?), printed))
            },
            note: None,
        },
        Item {
            id: "a3r-dual-fields",
            description: "conservative fields G_r, G_s, G_t of A3_r",
            names: || matrix_names("G", ["_r", "_s", "_t"], ["e_r", "e_s", "e_t"]),
            tolerance: 1e-9,
            example: &[0.5, -1.0, 0.25, 1.5, -0.5, 1.0, 1.0, 0.5, -0.75],
            draw: draw_p6_f,
            eval: eval_a3r_dual,
            note: Some(|| {
                let x = [0.5, -1.0, 0.25, 1.5, -0.5, 1.0, 1.0, 0.5, -0.75];
                let alg = a3r(&x[..6]);
                let f = Vector::from_slice(&x[6..]);
                let det = alg.det_representation(&f).unwrap_or(f64::NAN);
                let computed = dual_rows(&alg, &f).unwrap_or_default();
                let printed = printed_a3r_dual(&x[..6], printed_a3r_params(&x[..6]), &x[6..], det);
                let worst = computed.iter().zip(&printed).map(|(c, p)| rel(*c, *p)).fold(0.0, f64::max);
                format!("printed forms evaluated with computed p7..p9; with the printed p7..p9 the example deviates by {worst:e}")
            }),
        },
        Item {
            id: "a3r-determinant",
            description: "cubic P(f_r, f_s, f_t) = det R(F) for A3_r",
            names: || vec!["det".into()],
            tolerance: 1e-9,
            example: &[0.5, -1.0, 0.25, 1.5, -0.5, 1.0, 1.0, 0.5, -0.75],
            draw: draw_p6_f,
            eval: |x| {
                let alg = a3r(&x[..6]);
                let f = Vector::from_slice(&x[6..]);
                let p = p9(&x[..6], derived_a3r_params(&x[..6]));
                let (fr, fs, ft) = (f[0], f[1], f[2]);
                let printed = fr.powi(3) + (p[1] + p[4]) * fr * fr * fs + (p[3] + p[6]) * fr * fr * ft
                    + (p[1] * p[4] - p[2] * p[3] - p[7]) * fr * fs * fs
                    + (p[1] * p[6] - p[2] * p[5] - 2.0 * p[8]) * fr * fs * ft
                    + (p[3] * p[6] - p[4] * p[5] - p[9]) * fr * ft * ft
                    + (p[2] * p[8] - p[4] * p[7]) * fs.powi(3)
                    + (2.0 * p[2] * p[9] - p[4] * p[8] - p[6] * p[7]) * fs * fs * ft
                    + (p[5] * p[7] - p[6] * p[8] - p[1] * p[9] + p[4] * p[9]) * fs * ft * ft
                    + (p[5] * p[8] - p[3] * p[9]) * ft.powi(3);
                Some((vec![alg.representation(&f).ok()?.det()], vec![printed]))
            },
            note: None,
        },
        Item {
            id: "identity-frame",
            description: "frame E_i = e_i F of F(w) = w in A3_r(0, ..., 0)",
            names: || matrix_names("E", ["1", "2", "3"], ["e1", "e2", "e3"]),
            tolerance: 1e-9,
            example: &[1.0, 2.0, 3.0],
            draw: draw_f,
            eval: |x| {
                let alg = a3r(&[0.0; 6]);
                let f = regular(&alg, x)?;
                let x1 = x[0];
                let printed = vec![x1, 0.0, 0.0, 0.0, x1, 0.0, 0.0, 0.0, x1];
                Some((frame_columns(&alg, &f)?, printed))
            },
            note: None,
        },
        Item {
            id: "identity-dual-fields",
            description: "conservative fields G_1, G_2, G_3 of F(w) = w in A3_r(0, ..., 0)",
            names: || matrix_names("G", ["1", "2", "3"], ["e1", "e2", "e3"]),
            tolerance: 1e-9,
            example: &[1.0, 2.0, 3.0],
            draw: draw_f,
            eval: |x| {
                let alg = a3r(&[0.0; 6]);
                let f = regular(&alg, x)?;
                let (x1, x2, x3) = (x[0], x[1], x[2]);
                let printed = vec![1.0 / x1, 0.0, 0.0, -x2 / (x1 * x1), 1.0 / x1, 0.0, -x3 / (x1 * x1), 0.0, 1.0 / x1];
                Some((dual_rows(&alg, &f)?, printed))
            },
            note: None,
        },
        Item {
            id: "a3rs-dual-fields",
            description: "frame E and conservative fields G of A3_rs(p1, p2)",
            names: || {
                let mut n = matrix_names("E", ["_r", "_s", "_t"], ["e_r", "e_s", "e_t"]);
                n.extend(matrix_names("G", ["_r", "_s", "_t"], ["e_r", "e_s", "e_t"]));
                n
            },
            tolerance: 1e-9,
            example: &[0.5, -0.3, 1.0, 1.0, 0.5],
            draw: draw_p2_f,
            eval: |x| {
                let (p1, p2) = (x[0], x[1]);
                let alg = a3rs(&x[..2]);
                let f = regular(&alg, &x[2..])?;
                let (fr, fs, ft) = (f[0], f[1], f[2]);
                let d = fs * fs + p2 * fs * ft - p1 * ft * ft;
                let mut printed = vec![fr, 0.0, 0.0, 0.0, fs, ft, 0.0, p1 * ft, fs + p2 * ft];
                printed.extend([1.0 / fr, 0.0, 0.0, 0.0, (fs + p2 * ft) / d, -p1 * ft / d, 0.0, -ft / d, fs / d]);
                let mut computed = frame_columns(&alg, &f)?;
                computed.extend(dual_rows(&alg, &f)?);
                Some((computed, printed))
            },
            note: None,
        },
        Item {
            id: "a3-123-dual-fields",
            description: "frame E and conservative fields G_i = e_i / f_i of A3_123",
            names: || {
                let mut n = matrix_names("E", ["1", "2", "3"], ["e1", "e2", "e3"]);
                n.extend(matrix_names("G", ["1", "2", "3"], ["e1", "e2", "e3"]));
                n
            },
            tolerance: 1e-9,
            example: &[1.0, -2.0, 0.5],
            draw: draw_f,
            eval: |x| {
                let alg = a123();
                let f = regular(&alg, x)?;
                let mut printed = vec![0.0; 18];
                for i in 0..3 {
                    printed[4 * i] = f[i];
                    printed[9 + 4 * i] = 1.0 / f[i];
                }
                let mut computed = frame_columns(&alg, &f)?;
                computed.extend(dual_rows(&alg, &f)?);
                Some((computed, printed))
            },
            note: Some(|| "the frame is printed as F_1, F_2, F_2; the third field is named as the second".into()),
        },
        Item {
            id: "a3r-zero-metric",
            description: "metric g of an A3_r(0, ..., 0)-algebrizable field in terms of F = (f1, f2, f3)",
            names: metric_names,
            tolerance: 1e-9,
            example: &[1.0, 1.0, 0.0],
            draw: draw_f,
            eval: |x| {
                let alg = a3r(&[0.0; 6]);
                let f = regular(&alg, x)?;
                let (f1, f2, f3) = (x[0], x[1], x[2]);
                let f14 = f1.powi(4);
                let printed = vec![
                    (f14 + 2.0 * f2 * f2 + f3 * f3) / f14,
                    -f1 * f2 / f14,
                    -f1 * f3 / f14,
                    f1 * f1 / f14,
                    0.0,
                    f1 * f1 / f14,
                ];
                Some((frame_metric(&alg, &f)?, printed))
            },
            note: None,
        },
        Item {
            id: "a3-12-metric",
            description: "metric g of an A3_rs(p1, p2)-algebrizable field with r = 1, s = 2",
            names: metric_names,
            tolerance: 1e-9,
            example: &[0.5, -0.3, 1.0, 1.0, 0.5],
            draw: draw_p2_f,
            eval: |x| {
                let (p1, p2) = (x[0], x[1]);
                let alg = a3rs(&x[..2]);
                let f = regular(&alg, &x[2..])?;
                let (f1, f2, f3) = (f[0], f[1], f[2]);
                let den = f2 * f2 - p1 * f2 * f3 - p2 * f3 * f3;
                let den2 = den * den;
                let printed = vec![
                    1.0 / (f1 * f1),
                    0.0,
                    0.0,
                    ((f2 - p1 * f3).powi(2) + f3 * f3) / den2,
                    (-f2 - p2 * f2 + p1 * p2 * f3) * f3 / den2,
                    (f2 * f2 + p2 * p2 * f3 * f3) / den2,
                ];
                Some((frame_metric(&alg, &f)?, printed))
            },
            note: None,
        },
        Item {
            id: "a3-123-metric",
            description: "metric g_ij = delta_ij / f_i^2 of an A3_123-algebrizable field",
            names: metric_names,
            tolerance: 1e-9,
            example: &[1.0, -2.0, 0.5],
            draw: draw_f,
            eval: |x| {
                let alg = a123();
                let f = regular(&alg, x)?;
                let printed = vec![
                    1.0 / (x[0] * x[0]),
                    0.0,
                    0.0,
                    1.0 / (x[1] * x[1]),
                    0.0,
                    1.0 / (x[2] * x[2]),
                ];
                Some((frame_metric(&alg, &f)?, printed))
            },
            note: None,
        },
        Item {
            id: "square-field-components",
            description: "components of F(w) = w^2 in A3_r(0, ..., 0)",
            names: || vec!["f1".into(), "f2".into(), "f3".into()],
            tolerance: 1e-12,
            example: &[1.0, 2.0, 3.0],
            draw: draw_f,
            eval: |x| {
                let alg = a3r(&[0.0; 6]);
                let computed = FieldDef::power(&alg, 2).eval(&Vector::from_slice(x)).ok()?;
                let printed = vec![x[0] * x[0], 2.0 * x[0] * x[1], 2.0 * x[1] * x[2]];
                Some((vec_of(&computed), printed))
            },
            note: None,
        },
        Item {
            id: "square-field-metric",
            description: "metric g of F(w) = w^2 in A3_r(0, ..., 0)",
            names: metric_names,
            tolerance: 1e-9,
            example: &[1.0, 1.0, 1.0],
            draw: draw_right_half,
            eval: |x| {
                let alg = a3r(&[0.0; 6]);
                let m = metric_at(&FieldDef::power(&alg, 2), &alg, &Vector::from_slice(x)).ok()?;
                Some((m.entries, square_metric_printed(x)))
            },
            note: None,
        },
        Item {
            id: "square-field-antiderivative",
            description: "antiderivative H = -e/w of e/w^2 in A3_r(0, ..., 0)",
            names: || vec!["h1".into(), "h2".into(), "h3".into()],
            tolerance: 1e-7,
            example: &[2.0, 0.5, -0.5],
            draw: draw_right_half,
            eval: |x| {
                let alg = a3r(&[0.0; 6]);
                let base = Vector::new3(1.0, 0.0, 0.0);
                let h = antiderivative(FieldDef::power(&alg, 2), &alg, base, Vector::new3(-1.0, 0.0, 0.0)).ok()?;
                let computed = h.eval(&Vector::from_slice(x)).ok()?;
                let (x1, x2, x3) = (x[0], x[1], x[2]);
                Some((vec_of(&computed), vec![-1.0 / x1, x2 / (x1 * x1), x3 / (x1 * x1)]))
            },
            note: None,
        },
    ]
}

fn vec_of(v: &Vector) -> Vec<f64> {
    v.as_slice().to_vec()
}

/// Ids of every errata item, in report order.
pub fn item_ids() -> Vec<&'static str> {
    items().iter().map(|i| i.id).collect()
}

fn evaluate(item: &Item, rng: &mut ChaCha8Rng) -> ItemReport {
    let names = (item.names)();
    let mut max_entry = vec![0.0f64; names.len()];
    let mut samples = 0;
    let mut draws = 0;
    while samples < SAMPLES && draws < MAX_DRAWS {
        draws += 1;
        let x = (item.draw)(rng);
        let Some((c, p)) = (item.eval)(&x) else { continue };
        for (k, m) in max_entry.iter_mut().enumerate() {
            *m = m.max(rel(c[k], p[k]));
        }
        samples += 1;
    }
    let mut entries = Vec::with_capacity(names.len());
    if let Some((c, p)) = (item.eval)(item.example) {
        for (k, name) in names.into_iter().enumerate() {
            max_entry[k] = max_entry[k].max(rel(c[k], p[k]));
            entries.push(Entry {
                name,
                computed: c[k],
                printed: p[k],
                delta: c[k] - p[k],
                max_rel_delta: max_entry[k],
            });
        }
    }
    let max_rel_delta = max_entry.iter().copied().fold(0.0, f64::max);
    ItemReport {
        id: item.id,
        description: item.description,
        status: if max_rel_delta <= item.tolerance { "match" } else { "mismatch" },
        tolerance: item.tolerance,
        samples,
        max_rel_delta,
        example_input: item.example.to_vec(),
        entries,
        note: item.note.map(|n| n()),
    }
}

/// Runs the selected items (`None` for all).
pub fn run(selected: Option<&[String]>, rng: &mut ChaCha8Rng) -> Result<ErrataPayload, CliError> {
    let all = items();
    let chosen: Vec<&Item> = match selected {
        None => all.iter().collect(),
        Some(ids) => ids
            .iter()
            .map(|id| {
                all.iter().find(|i| i.id == id).ok_or_else(|| {
                    CliError::Config(ConfigError::Value {
                        section: "errata",
                        key: "items".into(),
                        msg: format!("unknown item `{id}`; known items: {}", item_ids().join(", ")),
                    })
                })
            })
            .collect::<Result<_, _>>()?,
    };
    let items: Vec<ItemReport> = chosen.into_iter().map(|i| evaluate(i, rng)).collect();
    let mismatches = items.iter().filter(|i| i.status == "mismatch").count();
    let status = match (items.len(), mismatches) {
        (0, _) => "nothing to compare",
        (_, 0) => "match",
        _ => "mismatch",
    };
    Ok(ErrataPayload {
        status,
        compared: items.len(),
        mismatches,
        items,
    })
}
