//! JSON run configuration and its translation into library objects.

use std::path::{Path, PathBuf};

use korovkin::bounds::Delta;
use korovkin::domain::{BoxRegion, Domain, Interval};
use korovkin::function::{battery, VectorFunction};
use korovkin::growth::GrowthFunction;
use korovkin::operators::{load_family, make_bernstein, make_gauss_weierstrass, make_szasz, make_tensor, MeasureFamily, OperatorPair, SzaszTruncation, DEFAULT_QUAD_POINTS};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::expr::{parse_expression, parse_scalar, Expr, VectorExpr};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub operator: OperatorSpec,
    #[serde(default = "default_growth")]
    pub growth: String,
    #[serde(default)]
    pub targets: Vec<TargetSpec>,
    #[serde(default)]
    pub options: Options,
}

fn default_growth() -> String {
    "quadratic".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    #[default]
    Box,
    HalfLine,
    FullSpace,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub m: usize,
    #[serde(default)]
    pub shape: Shape,
    /// Sides of X for a box; defaults to K, which selects X = K.
    #[serde(default)]
    pub x: Option<Vec<[f64; 2]>>,
    pub k: Vec<[f64; 2]>,
    /// Defaults to K when X = K.
    #[serde(default)]
    pub k1: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_resolution")]
    pub grid_resolution: usize,
    #[serde(default)]
    pub truncation_radius: Option<f64>,
    #[serde(default)]
    pub points: PointsSpec,
}

fn default_resolution() -> usize {
    korovkin::domain::DEFAULT_RESOLUTION
}

/// Evaluation points: a per-axis grid of K1 or an explicit list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointsSpec {
    Grid(usize),
    List(Vec<Vec<f64>>),
}

impl Default for PointsSpec {
    fn default() -> Self {
        PointsSpec::Grid(21)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    /// `bernstein`, `szasz` or `gauss-weierstrass`; tensorised when m > 1.
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub n: Vec<u64>,
    /// Family files, relative to the config file.
    #[serde(default)]
    pub files: Vec<String>,
    #[serde(default)]
    pub quad_points: Option<usize>,
    #[serde(default)]
    pub tail: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Text(String),
    Full {
        expr: String,
        #[serde(default)]
        codim: Option<usize>,
        #[serde(default)]
        label: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaSpec {
    Value(f64),
    Named(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_delta")]
    pub delta: Vec<DeltaSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Random targets per pair in check-operator.
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_threshold() -> f64 {
    korovkin::convergence::DEFAULT_THRESHOLD
}

fn default_delta() -> Vec<DeltaSpec> {
    vec![DeltaSpec::Named("auto".into())]
}

fn default_epsilon() -> f64 {
    0.5
}

fn default_trials() -> usize {
    20
}

impl Default for Options {
    fn default() -> Self {
        Options {
            threshold: default_threshold(),
            delta: default_delta(),
            seed: 0,
            out: None,
            epsilon: default_epsilon(),
            trials: default_trials(),
        }
    }
}

/// Sets `path` (dot separated) in a JSON tree; `raw` is read as JSON when
/// possible and as a string otherwise.
pub fn apply_override(root: &mut Value, path: &str, raw: &str) -> CliResult<()> {
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        let obj = node.as_object_mut().ok_or_else(|| CliError::Config(format!("`{path}`: `{}` is not an object", keys[..i].join("."))))?;
        if i + 1 == keys.len() {
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        node = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Err(CliError::Config("empty override path".into()))
}

/// Reads a config, applies overrides and validates it.
pub fn load(path: &Path, overrides: &[(String, String)]) -> CliResult<(RunConfig, PathBuf)> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let mut tree: Value = serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_path_buf(), source })?;
    for (k, v) in overrides {
        apply_override(&mut tree, k, v)?;
    }
    let cfg: RunConfig = serde_json::from_value(tree).map_err(|source| CliError::Json { path: path.to_path_buf(), source })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    cfg.validate(&base)?;
    Ok((cfg, base))
}

/// A target ready for evaluation, with its source text when parsed.
#[derive(Debug, Clone)]
pub struct Target {
    pub function: VectorFunction,
    pub source: Option<(String, VectorExpr)>,
}

impl Target {
    pub fn label(&self) -> &str {
        self.function.label()
    }
}

fn region(sides: &[[f64; 2]], what: &str, m: usize) -> CliResult<BoxRegion> {
    if sides.len() != m {
        return Err(CliError::Config(format!("{what} has {} sides, expected m = {m}", sides.len())));
    }
    let pairs: Vec<(f64, f64)> = sides.iter().map(|s| (s[0], s[1])).collect();
    BoxRegion::from_intervals(&pairs).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

impl RunConfig {
    fn validate(&self, base: &Path) -> CliResult<()> {
        let m = self.domain.m;
        if m == 0 {
            return Err(CliError::Config("m must be positive".into()));
        }
        let op = &self.operator;
        match (&op.family, op.files.is_empty()) {
            (Some(_), true) if op.n.is_empty() => return Err(CliError::Config("operator.n is empty".into())),
            (Some(_), true) => {}
            (None, false) => {
                for f in &op.files {
                    let p = base.join(f);
                    if !p.is_file() {
                        return Err(CliError::Config(format!("family file {} does not exist", p.display())));
                    }
                }
            }
            _ => return Err(CliError::Config("operator needs exactly one of `family` (with `n`) or `files`".into())),
        }
        if op.n.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config(format!("operator.n must be strictly increasing, got {:?}", op.n)));
        }
        if !(self.options.threshold > 0.0) {
            return Err(CliError::Config(format!("threshold must be positive, got {}", self.options.threshold)));
        }
        self.deltas()?;
        self.growth_function()?;
        self.targets()?;
        self.domain()?;
        Ok(())
    }

    pub fn domain(&self) -> CliResult<Domain> {
        let d = &self.domain;
        let m = d.m;
        let k = region(&d.k, "domain.k", m)?;
        let k1 = d.k1.as_ref().map(|s| region(s, "domain.k1", m)).transpose()?;
        let axes: Vec<Interval> = match d.shape {
            Shape::Box => match &d.x {
                Some(x) => region(x, "domain.x", m)?.lo().iter().zip(region(x, "domain.x", m)?.hi()).map(|(&lo, &hi)| Interval { lo, hi }).collect(),
                None => k.lo().iter().zip(k.hi()).map(|(&lo, &hi)| Interval { lo, hi }).collect(),
            },
            Shape::HalfLine => vec![Interval { lo: 0.0, hi: f64::INFINITY }; m],
            Shape::FullSpace => vec![Interval::real_line(); m],
        };
        let domain = match (d.shape, k1) {
            (Shape::Box, None) if d.x.is_none() => Domain::bounded(k),
            (_, None) => return Err(CliError::Config("domain.k1 is required unless X = K".into())),
            (_, Some(k1)) => Domain::new(axes, k, k1)?,
        };
        let domain = domain.with_resolution(d.grid_resolution)?;
        Ok(match d.truncation_radius {
            Some(r) => domain.with_truncation_radius(r)?,
            None => domain,
        })
    }

    pub fn points(&self, domain: &Domain) -> CliResult<Vec<Vec<f64>>> {
        match &self.domain.points {
            PointsSpec::Grid(k) => Ok(domain.k1().grid(*k)?.points()),
            PointsSpec::List(pts) => {
                if pts.is_empty() {
                    return Err(CliError::Config("domain.points is empty".into()));
                }
                for p in pts {
                    if p.len() != self.domain.m {
                        return Err(CliError::Config(format!("point {p:?} does not have {} coordinates", self.domain.m)));
                    }
                }
                Ok(pts.clone())
            }
        }
    }

    pub fn families(&self, base: &Path) -> CliResult<Vec<MeasureFamily>> {
        let op = &self.operator;
        let m = self.domain.m;
        if let Some(name) = &op.family {
            return op
                .n
                .iter()
                .map(|&n| {
                    let one = match name.as_str() {
                        "bernstein" => make_bernstein(n)?,
                        "szasz" => make_szasz(n, SzaszTruncation { tail: op.tail.unwrap_or(SzaszTruncation::default().tail) })?,
                        "gauss-weierstrass" => make_gauss_weierstrass(n, op.quad_points.unwrap_or(DEFAULT_QUAD_POINTS))?,
                        other => return Err(CliError::Config(format!("unknown operator family `{other}`"))),
                    };
                    Ok(if m == 1 { one } else { make_tensor(&one, m)? })
                })
                .collect();
        }
        let families = op.files.iter().map(|f| load_family(base.join(f))).collect::<Result<Vec<_>, _>>()?;
        if families.windows(2).any(|w| w[1].n() <= w[0].n()) {
            return Err(CliError::Config("family files must be listed by strictly increasing n".into()));
        }
        Ok(families)
    }

    pub fn pairs(&self, base: &Path) -> CliResult<Vec<OperatorPair>> {
        let domain = self.domain()?;
        self.families(base)?.into_iter().map(|f| Ok(OperatorPair::new(f, domain.clone())?)).collect()
    }

    pub fn deltas(&self) -> CliResult<Vec<Delta>> {
        self.options
            .delta
            .iter()
            .map(|d| match d {
                DeltaSpec::Named(s) if s == "auto" => Ok(Delta::Auto),
                DeltaSpec::Value(v) if *v > 0.0 && v.is_finite() => Ok(Delta::Fixed(*v)),
                other => Err(CliError::Config(format!("delta must be \"auto\" or a positive number, got {other:?}"))),
            })
            .collect()
    }

    pub fn growth_function(&self) -> CliResult<GrowthFunction> {
        if let Some(g) = GrowthFunction::builtin(&self.growth) {
            return Ok(g);
        }
        let text = self.growth.clone();
        let expr = parse_scalar(&text).map_err(|source| CliError::Syntax { text: text.clone(), source })?;
        if expr.arity() > self.domain.m {
            return Err(CliError::Config(format!("growth `{text}` uses u{} but m = {}", expr.arity(), self.domain.m)));
        }
        let grads: Vec<Expr> = (0..self.domain.m).map(|i| expr.derivative(i)).collect();
        let value = expr.clone();
        Ok(GrowthFunction::new(
            text,
            move |u| value.eval(u).unwrap_or(f64::NAN),
            move |u| grads.iter().map(|d| d.eval(u).unwrap_or(f64::NAN)).collect(),
        ))
    }

    /// Targets in config order; builtin names come from the default
    /// battery centred in K1, and `battery` expands to all of it.
    pub fn targets(&self) -> CliResult<Vec<Target>> {
        let m = self.domain.m;
        let center = match &self.domain.k1 {
            Some(k1) => k1.iter().map(|s| 0.5 * (s[0] + s[1])).collect::<Vec<_>>(),
            None => self.domain.k.iter().map(|s| 0.5 * (s[0] + s[1])).collect(),
        };
        let builtins = battery(&center);
        let mut out = Vec::new();
        for spec in &self.targets {
            let (text, codim, label) = match spec {
                TargetSpec::Text(t) => (t.clone(), None, None),
                TargetSpec::Full { expr, codim, label } => (expr.clone(), *codim, label.clone()),
            };
            if text == "battery" {
                out.extend(builtins.iter().map(|f| Target { function: f.clone(), source: None }));
                continue;
            }
            if let Some(f) = builtins.iter().find(|f| f.label() == text) {
                out.push(Target { function: f.clone(), source: None });
                continue;
            }
            let expr = parse_expression(&text).map_err(|source| CliError::Syntax { text: text.clone(), source })?;
            if let Some(c) = codim {
                if c != expr.codim() {
                    return Err(CliError::Config(format!("target `{text}` has {} components, config says {c}", expr.codim())));
                }
            }
            if expr.arity() > m {
                return Err(CliError::Config(format!("target `{text}` uses u{} but m = {m}", expr.arity())));
            }
            let e = expr.clone();
            let f = VectorFunction::new(label.unwrap_or_else(|| text.clone()), expr.codim(), move |u| {
                e.eval(u).unwrap_or_else(|_| vec![f64::NAN; e.codim()])
            })?;
            out.push(Target { function: f, source: Some((text, expr)) });
        }
        Ok(out)
    }
}

/// Turns a failed evaluation into a located expression error when one of
/// the parsed targets is responsible.
pub fn locate(err: korovkin::Error, targets: &[Target]) -> CliError {
    if let korovkin::Error::Evaluation { node } = &err {
        for t in targets {
            if let Some((text, expr)) = &t.source {
                if let Err(source) = expr.eval(node) {
                    return CliError::Evaluation { text: text.clone(), node: node.clone(), source };
                }
            }
        }
    }
    CliError::Core(err)
}
