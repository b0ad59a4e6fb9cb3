//! INI-style job files.
//!
//! ```text
//! [algebra]
//! family = A3_r
//! roles = 1 2 3
//! params = 0 0 0 0 0 0
//!
//! [field]
//! f1 = x1^2
//! f2 = 2*x1*x2
//! f3 = 2*x1*x3
//!
//! [task]
//! seed = 7
//! samples = 16
//! ```
//!
//! The `[field]` section is handed verbatim to the field parser; every other
//! section holds `key = value` lines. Outside `[field]`, lines starting with
//! `#` or `;` are comments and `#` also ends a value.

use std::collections::BTreeMap;
use std::path::PathBuf;

use lorch_core::{AlgebraSpec, Family, FieldDef, Roles, Vector};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing section [{0}]")]
    MissingSection(&'static str),
    #[error("[{section}] {key}: {msg}")]
    Value { section: &'static str, key: String, msg: String },
    #[error("[task] needs `{0}` for this command")]
    MissingKey(&'static str),
}

type Result<T> = std::result::Result<T, ConfigError>;

const SECTIONS: [&str; 5] = ["algebra", "field", "task", "output", "errata"];

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraConfig {
    pub family: Family,
    /// One-based basis indices of the roles `r, s, t`.
    pub roles: Option<Vec<usize>>,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid {
    /// All points of the `n × … × n` lattice on `[lo, hi]^dim`.
    pub fn points(&self, dim: usize) -> Vec<Vector> {
        let coord = |k: usize| {
            if self.n == 1 {
                0.5 * (self.lo + self.hi)
            } else {
                self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64
            }
        };
        let total = self.n.pow(dim as u32);
        (0..total)
            .map(|mut idx| {
                let mut v = Vector::zeros(dim);
                for i in (0..dim).rev() {
                    v[i] = coord(idx % self.n);
                    idx /= self.n;
                }
                v
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskConfig {
    pub seed: u64,
    pub samples: usize,
    pub sample_box: (f64, f64),
    pub points: Vec<Vec<f64>>,
    pub base: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub grid: Option<Grid>,
    pub distance: Vec<(Vec<f64>, Vec<f64>)>,
    pub start: Option<Vec<f64>>,
    pub t1: Option<f64>,
    pub h: f64,
    pub dim: Option<usize>,
}

impl Default for TaskConfig {
    fn default() -> Self {
        TaskConfig {
            seed: 0,
            samples: 16,
            sample_box: (-1.0, 1.0),
            points: Vec::new(),
            base: None,
            tol: None,
            grid: None,
            distance: Vec::new(),
            start: None,
            t1: None,
            h: 0.01,
            dim: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputConfig {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct JobConfig {
    pub algebra: Option<AlgebraConfig>,
    /// Raw field-definition text.
    pub field: Option<String>,
    pub task: TaskConfig,
    pub output: OutputConfig,
    /// `None` selects every errata item.
    pub errata: Option<Vec<String>>,
}

struct Section {
    name: &'static str,
    raw: Vec<String>,
    keys: BTreeMap<String, (usize, String)>,
}

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax {
                    line: lineno,
                    msg: format!("unterminated section header `{trimmed}`"),
                })?
                .trim();
            let name = SECTIONS
                .iter()
                .find(|s| **s == name)
                .ok_or_else(|| ConfigError::Syntax {
                    line: lineno,
                    msg: format!("unknown section [{name}]"),
                })?;
            if out.iter().any(|s| s.name == *name) {
                return Err(ConfigError::Syntax {
                    line: lineno,
                    msg: format!("section [{name}] appears twice"),
                });
            }
            out.push(Section {
                name,
                raw: Vec::new(),
                keys: BTreeMap::new(),
            });
            continue;
        }
        let Some(section) = out.last_mut() else {
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
                continue;
            }
            return Err(ConfigError::Syntax {
                line: lineno,
                msg: "content before the first section".into(),
            });
        };
        if section.name == "field" {
            section.raw.push(line.to_string());
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        let trimmed = trimmed.split('#').next().unwrap_or_default().trim_end();
        let (key, value) = trimmed.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: lineno,
            msg: format!("expected `key = value`, found `{trimmed}`"),
        })?;
        let key = key.trim().to_string();
        if section.keys.insert(key.clone(), (lineno, value.trim().to_string())).is_some() {
            return Err(ConfigError::Syntax {
                line: lineno,
                msg: format!("key `{key}` repeated in [{}]", section.name),
            });
        }
    }
    Ok(out)
}

struct Keys {
    section: &'static str,
    map: BTreeMap<String, (usize, String)>,
}

impl Keys {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key).map(|(_, v)| v)
    }

    fn err(&self, key: &str, msg: impl Into<String>) -> ConfigError {
        ConfigError::Value {
            section: self.section,
            key: key.to_string(),
            msg: msg.into(),
        }
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| self.err(key, format!("`{v}`: {e}"))),
        }
    }

    fn numbers(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => parse_numbers(&v).map(Some).map_err(|m| self.err(key, m)),
        }
    }

    fn finish(self) -> Result<()> {
        match self.map.into_iter().next() {
            Some((key, (line, _))) => Err(ConfigError::Syntax {
                line,
                msg: format!("unknown key `{key}` in [{}]", self.section),
            }),
            None => Ok(()),
        }
    }
}

/// Numbers separated by whitespace and/or commas.
pub fn parse_numbers(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect()
}

fn parse_point_list(s: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(parse_numbers)
        .collect()
}

impl JobConfig {
    pub fn parse(text: &str) -> Result<JobConfig> {
        let mut cfg = JobConfig::default();
        for section in split_sections(text)? {
            let mut keys = Keys {
                section: section.name,
                map: section.keys,
            };
            match section.name {
                "algebra" => {
                    let family = keys
                        .take("family")
                        .ok_or_else(|| keys.err("family", "required"))?;
                    let family: Family = family.parse().map_err(|e: lorch_core::Error| keys.err("family", e.to_string()))?;
                    let roles = match keys.numbers("roles")? {
                        None => None,
                        Some(r) => {
                            if r.iter().any(|x| x.fract() != 0.0 || *x < 1.0) {
                                return Err(keys.err("roles", "expected one-based basis indices"));
                            }
                            Some(r.into_iter().map(|x| x as usize).collect())
                        }
                    };
                    let params = keys.numbers("params")?.unwrap_or_default();
                    cfg.algebra = Some(AlgebraConfig { family, roles, params });
                }
                "field" => cfg.field = Some(section.raw.join("\n")),
                "task" => cfg.task = parse_task(&mut keys)?,
                "output" => {
                    cfg.output.json = keys.take("json").map(PathBuf::from);
                    cfg.output.csv = keys.take("csv").map(PathBuf::from);
                }
                "errata" => {
                    let items = keys.take("items").unwrap_or_else(|| "all".into());
                    let list: Vec<String> = items
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|t| !t.is_empty())
                        .map(str::to_string)
                        .collect();
                    cfg.errata = if list.iter().any(|i| i == "all") { None } else { Some(list) };
                }
                _ => unreachable!(),
            }
            keys.finish()?;
        }
        Ok(cfg)
    }

    pub fn algebra(&self) -> Result<AlgebraSpec> {
        let a = self.algebra.as_ref().ok_or(ConfigError::MissingSection("algebra"))?;
        let err = |key: &str, e: lorch_core::Error| ConfigError::Value {
            section: "algebra",
            key: key.to_string(),
            msg: e.to_string(),
        };
        let roles = match &a.roles {
            Some(r) => {
                if r.len() != a.family.dim() {
                    return Err(ConfigError::Value {
                        section: "algebra",
                        key: "roles".into(),
                        msg: format!("{} needs {} roles", a.family, a.family.dim()),
                    });
                }
                Roles::from_one_based(r).map_err(|e| err("roles", e))?
            }
            None => Roles::identity(a.family.dim()),
        };
        AlgebraSpec::new(a.family, roles, &a.params).map_err(|e| err("params", e))
    }

    pub fn field_text(&self) -> Result<&str> {
        self.field.as_deref().ok_or(ConfigError::MissingSection("field"))
    }

    pub fn tolerance(&self) -> Option<f64> {
        self.task.tol
    }
}

/// Parses the field in the configured algebra, or guesses its dimension when
/// no algebra is given.
pub fn parse_field(cfg: &JobConfig, algebra: Option<&AlgebraSpec>) -> std::result::Result<FieldDef, lorch_core::Error> {
    let text = cfg.field.as_deref().unwrap_or_default();
    if let Some(alg) = algebra {
        return FieldDef::parse_in(text, alg);
    }
    if let Some(dim) = cfg.task.dim {
        return FieldDef::parse(text, dim);
    }
    FieldDef::parse(text, 2).or_else(|first| FieldDef::parse(text, 3).map_err(|_| first))
}

fn parse_task(keys: &mut Keys) -> Result<TaskConfig> {
    let mut t = TaskConfig::default();
    if let Some(seed) = keys.parsed("seed")? {
        t.seed = seed;
    }
    if let Some(n) = keys.parsed("samples")? {
        t.samples = n;
    }
    if let Some(b) = keys.numbers("box")? {
        if b.len() != 2 || !(b[0] < b[1]) {
            return Err(keys.err("box", "expected `lo hi` with lo < hi"));
        }
        t.sample_box = (b[0], b[1]);
    }
    if let Some(p) = keys.take("points") {
        t.points = parse_point_list(&p).map_err(|m| keys.err("points", m))?;
    }
    t.base = keys.numbers("base")?;
    t.start = keys.numbers("start")?;
    if let Some(tol) = keys.parsed::<f64>("tol")? {
        if !(tol > 0.0) {
            return Err(keys.err("tol", "tolerance must be positive"));
        }
        t.tol = Some(tol);
    }
    if let Some(g) = keys.numbers("grid")? {
        if g.len() != 3 || g[2] < 1.0 || g[2].fract() != 0.0 || !(g[0] <= g[1]) {
            return Err(keys.err("grid", "expected `lo hi n` with lo ≤ hi and integer n ≥ 1"));
        }
        t.grid = Some(Grid {
            lo: g[0],
            hi: g[1],
            n: g[2] as usize,
        });
    }
    if let Some(d) = keys.take("distance") {
        for pair in d.split(';').filter(|p| !p.trim().is_empty()) {
            let (a, b) = pair
                .split_once("->")
                .ok_or_else(|| keys.err("distance", format!("`{}` is not `a -> b`", pair.trim())))?;
            let a = parse_numbers(a).map_err(|m| keys.err("distance", m))?;
            let b = parse_numbers(b).map_err(|m| keys.err("distance", m))?;
            t.distance.push((a, b));
        }
    }
    t.t1 = keys.parsed("t1")?;
    if let Some(h) = keys.parsed::<f64>("h")? {
        if !(h > 0.0) {
            return Err(keys.err("h", "step must be positive"));
        }
        t.h = h;
    }
    if let Some(dim) = keys.parsed::<usize>("dim")? {
        if !(2..=3).contains(&dim) {
            return Err(keys.err("dim", "dimension must be 2 or 3"));
        }
        t.dim = Some(dim);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = "\
# w^2 in the nilpotent algebra
[algebra]
family = A3_r
roles = 1, 2, 3
params = 0 0 0 0 0 0

[field]
f1 = x1^2   # first
f2 = 2*x1*x2
f3 = 2*x1*x3

[task]
seed = 9  # trailing comment
box = 0.5 2
points = 1 0 0; 2 0 0
distance = 1 0 0 -> 2 0 0
grid = 0 1 3
tol = 1e-8
";

    #[test]
    fn parses_sections() {
        let cfg = JobConfig::parse(SQUARE).unwrap();
        let alg = cfg.algebra().unwrap();
        assert_eq!(alg.family(), Family::A3_r);
        assert!(cfg.field_text().unwrap().contains("f2 = 2*x1*x2"));
        assert_eq!(cfg.task.seed, 9);
        assert_eq!(cfg.task.sample_box, (0.5, 2.0));
        assert_eq!(cfg.task.points, vec![vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]]);
        assert_eq!(cfg.task.distance.len(), 1);
        assert_eq!(cfg.task.tol, Some(1e-8));
        assert_eq!(cfg.task.grid.unwrap().points(3).len(), 27);
        assert!(parse_field(&cfg, Some(&alg)).is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "[algebra]\nfamily = A4",
            "[task]\ntol = -1",
            "[task]\nfrobnicate = 1",
            "[task]\nseed = 1\nseed = 2",
            "[nope]",
            "stray = 1",
            "[algebra]\nfamily = A3_r\nroles = 1 1 2\nparams = 0 0 0 0 0 0",
        ] {
            let r = JobConfig::parse(bad).and_then(|c| c.algebra().map(|_| ()));
            assert!(r.is_err(), "{bad}");
        }
    }

    #[test]
    fn guesses_dimension_without_algebra() {
        let cfg = JobConfig::parse("[field]\nf1 = x1\nf2 = x2\nf3 = x3").unwrap();
        assert_eq!(lorch_core::VectorField::dim(&parse_field(&cfg, None).unwrap()), 3);
        let cfg = JobConfig::parse("[field]\nf1 = x1\nf2 = x2").unwrap();
        assert_eq!(lorch_core::VectorField::dim(&parse_field(&cfg, None).unwrap()), 2);
    }

    #[test]
    fn grid_corners() {
        let g = Grid { lo: -1.0, hi: 1.0, n: 2 };
        let pts = g.points(2);
        assert_eq!(pts, vec![Vector::new2(-1.0, -1.0), Vector::new2(-1.0, 1.0), Vector::new2(1.0, -1.0), Vector::new2(1.0, 1.0)]);
    }
}
