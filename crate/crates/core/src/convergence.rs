//! Test-function convergence checks and the empirical equivalence harness.
//!
//! A sequence of pairs is evaluated on a point set; every quantity that
//! should tend to zero becomes a series of sup defects indexed by `n`. A
//! series converges when its last defect is below the threshold and each
//! of its last two steps either decreases or is already negligible.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::{norm, ScalarFunction, VectorFunction};
use crate::growth::{growth_certificate, truncation_region, GrowthFunction};
use crate::operators::{AtomSet, OperatorPair};
use crate::par::{argmax, Execution};

pub const DEFAULT_THRESHOLD: f64 = 1e-3;
/// Defects at or below this level count as exact zeros.
pub const ZERO_TOL: f64 = 1e-12;
/// Allowed relative gap between the direct and expanded `S(h)`.
pub const IDENTITY_TOL: f64 = 1e-9;
const PROBE_GRID: usize = 201;

/// The statements of the equivalence theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Statement {
    /// constants, `S(1)` and `S(h(t, .))(t)`
    A,
    /// constants, `S(1)`, projections and `g`
    B,
    /// every probe through `L` and every scalar probe through `S`
    C,
    /// vector probes through `L`
    D,
    /// scalar probes through `S`
    E,
    /// `S(1)`, projections and `g`
    F,
}

impl Statement {
    pub const ALL: [Statement; 6] = [Statement::A, Statement::B, Statement::C, Statement::D, Statement::E, Statement::F];
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statement::A => "a",
            Statement::B => "b'",
            Statement::C => "c",
            Statement::D => "d",
            Statement::E => "e",
            Statement::F => "f",
        })
    }
}

/// `k + 1` unit vectors in R^k at the vertices of a regular simplex.
pub fn simplex_constants(k: usize) -> Vec<Vec<f64>> {
    assert!(k > 0, "codimension must be positive");
    let alpha = (1.0 - ((k + 1) as f64).sqrt()) / k as f64;
    let mut w: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut e = vec![0.0; k];
            e[i] = 1.0;
            e
        })
        .collect();
    w.push(vec![alpha; k]);
    let centroid: Vec<f64> = (0..k).map(|j| w.iter().map(|v| v[j]).sum::<f64>() / (k + 1) as f64).collect();
    w.into_iter()
        .map(|v| {
            let d: Vec<f64> = v.iter().zip(&centroid).map(|(a, c)| a - c).collect();
            let r = norm(&d);
            d.into_iter().map(|x| x / r).collect()
        })
        .collect()
}

/// Test functions `1, pr_1 .. pr_m, g` and the constants used for the
/// vector operator.
#[derive(Debug, Clone)]
pub struct TestSet {
    functions: Vec<ScalarFunction>,
    g: GrowthFunction,
    constants: Vec<Vec<f64>>,
}

impl TestSet {
    pub fn new(m: usize, g: GrowthFunction, codim: usize) -> Self {
        let mut functions = vec![ScalarFunction::one()];
        functions.extend((0..m).map(ScalarFunction::projection));
        let gg = g.clone();
        functions.push(ScalarFunction::new("g", move |u| gg.value(u)));
        TestSet { functions, g, constants: simplex_constants(codim) }
    }

    /// `1`, the projections and `g`, in that order.
    pub fn functions(&self) -> &[ScalarFunction] {
        &self.functions
    }

    pub fn growth(&self) -> &GrowthFunction {
        &self.g
    }

    pub fn constants(&self) -> &[Vec<f64>] {
        &self.constants
    }

    pub fn dim(&self) -> usize {
        self.functions.len() - 2
    }
}

/// Least-squares line through `(ln n, ln defect)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// `-inf` when every defect is zero.
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square residual of the fit.
    pub residual: f64,
    /// Some defects were zero and the fit used the positive ones only.
    pub partial: bool,
}

impl RateFit {
    pub fn is_exact_zero(&self) -> bool {
        self.slope == f64::NEG_INFINITY
    }
}

pub fn rate_fit(series: &[(u64, f64)]) -> Result<RateFit> {
    if series.len() < 3 {
        return Err(Error::InsufficientData(format!("rate fit needs at least 3 points, got {}", series.len())));
    }
    let pos: Vec<(f64, f64)> = series.iter().filter(|(_, d)| *d > 0.0).map(|&(n, d)| ((n as f64).ln(), d.ln())).collect();
    if pos.is_empty() {
        return Ok(RateFit { slope: f64::NEG_INFINITY, intercept: f64::NEG_INFINITY, residual: 0.0, partial: false });
    }
    let partial = pos.len() < series.len();
    if pos.len() == 1 {
        return Ok(RateFit { slope: f64::NEG_INFINITY, intercept: pos[0].1, residual: 0.0, partial });
    }
    let k = pos.len() as f64;
    let mx = pos.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pos.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pos.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pos.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("rate fit needs distinct n values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pos.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / k).sqrt();
    Ok(RateFit { slope, intercept, residual, partial })
}

/// Convergence rule shared by every series.
pub fn converges(defects: &[f64], threshold: f64) -> bool {
    let k = defects.len();
    if k < 3 {
        return false;
    }
    let last = defects[k - 1];
    let step_ok = |i: usize| defects[i] <= ZERO_TOL || defects[i] < defects[i - 1];
    last <= threshold && step_ok(k - 1) && step_ok(k - 2)
}

/// Defects stop decreasing at one of the last two steps while still
/// above the zero tolerance.
fn stagnates(defects: &[f64]) -> bool {
    let k = defects.len();
    (k - 2..k).any(|i| defects[i] > ZERO_TOL && defects[i] >= defects[i - 1])
}

/// Sup defects of one quantity across the sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// `(n, sup defect)`
    pub values: Vec<(u64, f64)>,
    /// Point attaining each sup.
    pub witnesses: Vec<Vec<f64>>,
    pub fit: RateFit,
    pub verdict: bool,
}

impl Series {
    pub fn defects(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.1).collect()
    }

    pub fn last(&self) -> f64 {
        self.values.last().map(|v| v.1).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectedProbe {
    pub label: String,
    pub ratio: f64,
    pub witness: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatementReport {
    pub statement: Statement,
    pub series: Vec<Series>,
    pub verdict: bool,
    pub threshold: f64,
    /// Largest relative gap between direct and expanded `S(h)`
    /// (statement a only).
    pub identity_residual: Option<f64>,
    pub rejected: Vec<RejectedProbe>,
}

impl StatementReport {
    pub fn series(&self, label: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.label == label)
    }

    /// `(n, worst point)` over all series at the largest `n`.
    pub fn worst_witness(&self) -> Option<(u64, Vec<f64>)> {
        let lasts: Vec<f64> = self.series.iter().map(Series::last).collect();
        let (i, _) = argmax(&lasts)?;
        let s = &self.series[i];
        Some((s.values.last()?.0, s.witnesses.last()?.clone()))
    }
}

/// Probe functions for statements c, d and e.
#[derive(Debug, Clone, Default)]
pub struct ProbeSet {
    pub vector: Vec<VectorFunction>,
    pub scalar: Vec<ScalarFunction>,
}

impl ProbeSet {
    /// Vector probes as given; their one-component members double as
    /// scalar probes.
    pub fn from_vectors(vector: Vec<VectorFunction>) -> Self {
        let scalar = vector.iter().filter(|f| f.codim() == 1).map(|f| f.component(0).with_label(f.label())).collect();
        ProbeSet { vector, scalar }
    }
}

type Measure = Arc<dyn Fn(&[f64], &AtomSet) -> Result<f64> + Send + Sync>;

struct Quantity {
    statement: Statement,
    label: String,
    measure: Measure,
}

fn check_sequence(pairs: &[OperatorPair], points: &[Vec<f64>]) -> Result<()> {
    if pairs.len() < 3 {
        return Err(Error::InsufficientData(format!("need at least 3 values of n, got {}", pairs.len())));
    }
    if pairs.windows(2).any(|w| w[1].n() <= w[0].n()) {
        return Err(Error::Input("pairs must be ordered by strictly increasing n".into()));
    }
    let m = pairs[0].domain().dim();
    if pairs.iter().any(|p| p.domain().dim() != m) {
        return Err(Error::Input("pairs act on domains of different dimension".into()));
    }
    if points.is_empty() {
        return Err(Error::Config("no evaluation points".into()));
    }
    Ok(())
}

/// Evaluates every quantity at every `(n, t)`, reusing atoms per point.
/// Returns `[quantity][pair] -> (sup, argmax)`.
fn sweep(pairs: &[OperatorPair], points: &[Vec<f64>], quantities: &[Quantity]) -> Result<Vec<Vec<(f64, usize)>>> {
    let mut out = vec![Vec::with_capacity(pairs.len()); quantities.len()];
    for pair in pairs {
        let rows = Execution::default().try_map(points, |t| {
            let set = pair.atoms_at(t)?;
            quantities.iter().map(|q| (q.measure)(t, &set)).collect::<Result<Vec<f64>>>()
        })?;
        for (qi, col) in out.iter_mut().enumerate() {
            let vals: Vec<f64> = rows.iter().map(|r| r[qi]).collect();
            let (i, v) = argmax(&vals).unwrap_or((0, f64::NAN));
            col.push((v, i));
        }
    }
    Ok(out)
}

fn build_series(label: &str, pairs: &[OperatorPair], points: &[Vec<f64>], col: &[(f64, usize)], threshold: f64) -> Result<Series> {
    let values: Vec<(u64, f64)> = pairs.iter().zip(col).map(|(p, (v, _))| (p.n(), *v)).collect();
    let floored: Vec<(u64, f64)> = values.iter().map(|&(n, d)| (n, if d <= ZERO_TOL { 0.0 } else { d })).collect();
    let defects: Vec<f64> = values.iter().map(|v| v.1).collect();
    Ok(Series {
        label: label.to_string(),
        witnesses: col.iter().map(|(_, i)| points[*i].clone()).collect(),
        fit: rate_fit(&floored)?,
        verdict: converges(&defects, threshold),
        values,
    })
}

fn constants_quantity(statement: Statement, constants: Vec<Vec<f64>>) -> Result<Quantity> {
    let cs = constants.into_iter().map(VectorFunction::constant).collect::<Result<Vec<_>>>()?;
    Ok(Quantity {
        statement,
        label: "const".into(),
        measure: Arc::new(move |_, set| {
            let mut worst: f64 = 0.0;
            for c in &cs {
                let lc = set.apply_l(c)?;
                let target = c.eval(&[]);
                worst = worst.max(norm(&lc.iter().zip(&target).map(|(a, b)| a - b).collect::<Vec<_>>()));
            }
            Ok(worst)
        }),
    })
}

fn scalar_quantity(statement: Statement, label: String, f: ScalarFunction) -> Quantity {
    Quantity {
        statement,
        label,
        measure: Arc::new(move |t, set| {
            let ft = f.eval(t);
            if !ft.is_finite() {
                return Err(Error::Evaluation { node: t.to_vec() });
            }
            Ok((set.apply_s(&f)? - ft).abs())
        }),
    }
}

fn vector_quantity(statement: Statement, f: VectorFunction) -> Quantity {
    Quantity {
        statement,
        label: f.label().to_string(),
        measure: Arc::new(move |t, set| {
            let ft = f.eval_checked(t)?;
            let lf = set.apply_l(&f)?;
            Ok(norm(&lf.iter().zip(&ft).map(|(a, b)| a - b).collect::<Vec<_>>()))
        }),
    }
}

fn test_quantities(statement: Statement, tests: &TestSet, with_constants: bool) -> Result<Vec<Quantity>> {
    let mut q = Vec::new();
    if with_constants {
        q.push(constants_quantity(statement, tests.constants().to_vec())?);
    }
    for f in tests.functions() {
        q.push(scalar_quantity(statement, f.label().to_string(), f.clone()));
    }
    Ok(q)
}

fn a_quantities(tests: &TestSet) -> Result<Vec<Quantity>> {
    let g = tests.growth().clone();
    Ok(vec![
        constants_quantity(Statement::A, tests.constants().to_vec())?,
        scalar_quantity(Statement::A, "1".into(), ScalarFunction::one()),
        Quantity {
            statement: Statement::A,
            label: "snh".into(),
            measure: Arc::new(move |t, set| Ok(set.growth_moments(&g, t)?.snh_direct.abs())),
        },
    ])
}

/// Relative gap between the two evaluations of `S(h(t, .))(t)`.
pub fn identity_gap(set: &AtomSet, g: &GrowthFunction, t: &[f64]) -> Result<f64> {
    let mom = set.growth_moments(g, t)?;
    let (d, e) = (mom.snh_direct, mom.snh_expanded());
    let scale = d.abs().max(e.abs());
    Ok(if scale == 0.0 { 0.0 } else { (d - e).abs() / scale })
}

fn identity_quantity(g: &GrowthFunction) -> Quantity {
    let g = g.clone();
    Quantity { statement: Statement::A, label: "identity".into(), measure: Arc::new(move |t, set| identity_gap(set, &g, t)) }
}

/// Splits probes into admissible ones and those violating the growth bound
/// on a grid of the truncated domain.
fn screen_probes(pairs: &[OperatorPair], g: &GrowthFunction, probes: &ProbeSet) -> Result<(ProbeSet, Vec<RejectedProbe>)> {
    let domain = pairs[0].domain();
    let region = truncation_region(g, domain)?;
    let sample = region.grid(domain.grid_resolution().min(PROBE_GRID))?.points();
    let mut kept = ProbeSet::default();
    let mut rejected = Vec::new();
    let mut screen = |f: &VectorFunction| -> Result<bool> {
        match growth_certificate(f, g, &sample) {
            Ok(_) => Ok(true),
            Err(Error::Growth { ratio, witness, .. }) => {
                if !rejected.iter().any(|r: &RejectedProbe| r.label == f.label()) {
                    rejected.push(RejectedProbe { label: f.label().to_string(), ratio, witness });
                }
                Ok(false)
            }
            Err(e) => Err(e),
        }
    };
    for f in &probes.vector {
        if screen(f)? {
            kept.vector.push(f.clone());
        }
    }
    for f in &probes.scalar {
        if screen(&VectorFunction::from_scalar(f.clone()))? {
            kept.scalar.push(f.clone());
        }
    }
    Ok((kept, rejected))
}

fn probe_quantities(statement: Statement, probes: &ProbeSet, vector: bool, scalar: bool) -> Vec<Quantity> {
    let mut q = Vec::new();
    if vector {
        q.extend(probes.vector.iter().map(|f| vector_quantity(statement, f.clone())));
    }
    if scalar {
        q.extend(probes.scalar.iter().map(|f| scalar_quantity(statement, format!("S:{}", f.label()), f.clone())));
    }
    q
}

fn assemble(
    statement: Statement,
    pairs: &[OperatorPair],
    points: &[Vec<f64>],
    quantities: &[Quantity],
    cols: &[Vec<(f64, usize)>],
    threshold: f64,
) -> Result<StatementReport> {
    let mut series = Vec::new();
    let mut identity_residual = None;
    for (q, col) in quantities.iter().zip(cols) {
        if q.statement != statement {
            continue;
        }
        if q.label == "identity" {
            identity_residual = Some(col.iter().map(|c| c.0).fold(0.0, f64::max));
            continue;
        }
        series.push(build_series(&q.label, pairs, points, col, threshold)?);
    }
    let verdict = series.iter().all(|s| s.verdict);
    Ok(StatementReport { statement, series, verdict, threshold, identity_residual, rejected: Vec::new() })
}

fn run_one(statement: Statement, pairs: &[OperatorPair], points: &[Vec<f64>], quantities: Vec<Quantity>, threshold: f64) -> Result<StatementReport> {
    check_sequence(pairs, points)?;
    let cols = sweep(pairs, points, &quantities)?;
    assemble(statement, pairs, points, &quantities, &cols, threshold)
}

/// Statement b': constants, `S(1)`, `S(pr_i)` and `S(g)`.
pub fn check_statement_b(pairs: &[OperatorPair], tests: &TestSet, points: &[Vec<f64>], threshold: f64) -> Result<StatementReport> {
    run_one(Statement::B, pairs, points, test_quantities(Statement::B, tests, true)?, threshold)
}

/// Statement a: constants, `S(1)` and `S(h(t, .))(t)`, with the direct and
/// expanded evaluations of the last one compared at every point.
pub fn check_statement_a(pairs: &[OperatorPair], tests: &TestSet, points: &[Vec<f64>], threshold: f64) -> Result<StatementReport> {
    let mut q = a_quantities(tests)?;
    q.push(identity_quantity(tests.growth()));
    run_one(Statement::A, pairs, points, q, threshold)
}

/// Statement c on a probe set; probes outside the growth class of `g` are
/// rejected and listed.
pub fn check_statement_c(
    pairs: &[OperatorPair],
    g: &GrowthFunction,
    probes: &ProbeSet,
    points: &[Vec<f64>],
    threshold: f64,
) -> Result<StatementReport> {
    check_sequence(pairs, points)?;
    let (kept, rejected) = screen_probes(pairs, g, probes)?;
    let mut report = run_one(Statement::C, pairs, points, probe_quantities(Statement::C, &kept, true, true), threshold)?;
    report.rejected = rejected;
    report.verdict &= !report.series.is_empty();
    Ok(report)
}

/// Threshold for statement a implied by statement b' holding at `tau`:
/// expanding `S(h)` bounds it by `tau (1 + g(t) + sum |g'_i(t)| (1 + |t_i|))`.
pub fn implied_threshold_a(g: &GrowthFunction, points: &[Vec<f64>], tau: f64) -> f64 {
    let scale = points
        .iter()
        .map(|t| {
            let grad = g.gradient(t);
            1.0 + g.value(t) + grad.iter().zip(t).map(|(d, x)| d.abs() * (1.0 + x.abs())).sum::<f64>()
        })
        .fold(1.0, f64::max);
    tau * scale
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// One row of the defect matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectRow {
    pub statement: Statement,
    pub label: String,
    pub n: u64,
    pub defect: f64,
    pub slope: f64,
    pub verdict: bool,
}

impl DefectRow {
    pub const HEADER: [&'static str; 6] = ["statement", "label", "n", "defect", "slope", "verdict"];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.statement.to_string(),
            self.label.clone(),
            self.n.to_string(),
            crate::format_number(self.defect),
            crate::format_number(self.slope),
            self.verdict.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub statements: Vec<StatementReport>,
    pub regular: bool,
    pub findings: Vec<Finding>,
}

impl EquivalenceReport {
    pub fn statement(&self, s: Statement) -> &StatementReport {
        self.statements.iter().find(|r| r.statement == s).expect("every statement is evaluated")
    }

    pub fn verdict(&self, s: Statement) -> bool {
        self.statement(s).verdict
    }

    pub fn all_true(&self) -> bool {
        self.statements.iter().all(|r| r.verdict)
    }

    pub fn consistent(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn defect_matrix(&self) -> Vec<DefectRow> {
        defect_matrix(&self.statements)
    }
}

/// Rows ordered by statement, then label, then `n`.
pub fn defect_matrix(reports: &[StatementReport]) -> Vec<DefectRow> {
    let mut rows = Vec::new();
    for r in reports {
        let mut series: Vec<&Series> = r.series.iter().collect();
        series.sort_by(|a, b| a.label.cmp(&b.label));
        for s in series {
            for &(n, d) in &s.values {
                rows.push(DefectRow { statement: r.statement, label: s.label.clone(), n, defect: d, slope: s.fit.slope, verdict: s.verdict });
            }
        }
    }
    rows
}

/// Runs all six statements on one sweep and reports implication
/// consistency. Statement c uses the admissible probes together with the
/// test functions as scalar probes and the test constants as vector
/// probes, so that every implication of the theorem is testable.
pub fn equivalence_harness(
    pairs: &[OperatorPair],
    tests: &TestSet,
    probes: &ProbeSet,
    points: &[Vec<f64>],
    threshold: f64,
) -> Result<EquivalenceReport> {
    check_sequence(pairs, points)?;
    let g = tests.growth();
    let (mut kept, rejected) = screen_probes(pairs, g, probes)?;
    kept.scalar.extend(tests.functions().iter().cloned());
    for c in tests.constants() {
        kept.vector.push(VectorFunction::constant(c.clone())?.with_label(format!("c{c:?}")));
    }

    let mut q = a_quantities(tests)?;
    q.push(identity_quantity(g));
    q.extend(test_quantities(Statement::B, tests, true)?);
    q.extend(probe_quantities(Statement::C, &kept, true, true));
    q.extend(probe_quantities(Statement::D, &kept, true, false));
    q.extend(probe_quantities(Statement::E, &kept, false, true));
    q.extend(test_quantities(Statement::F, tests, false)?);
    let cols = sweep(pairs, points, &q)?;

    let mut statements = Statement::ALL
        .iter()
        .map(|&s| assemble(s, pairs, points, &q, &cols, threshold))
        .collect::<Result<Vec<_>>>()?;
    for r in statements.iter_mut().filter(|r| matches!(r.statement, Statement::C | Statement::D | Statement::E)) {
        r.rejected = rejected.clone();
    }
    let regular = pairs.iter().all(|p| p.family().flags().regular);
    let mut report = EquivalenceReport { statements, regular, findings: Vec::new() };

    let mut implications = vec![(Statement::B, Statement::A), (Statement::A, Statement::C), (Statement::C, Statement::B)];
    if regular {
        implications.extend([(Statement::D, Statement::C), (Statement::F, Statement::B), (Statement::E, Statement::F)]);
    }
    let mut findings = Vec::new();
    for (p, qs) in implications {
        if !report.verdict(p) {
            continue;
        }
        for s in &report.statement(qs).series {
            if stagnates(&s.defects()) {
                findings.push(Finding {
                    message: format!("{p} holds but {qs} series `{}` does not decrease: {:?}", s.label, s.defects()),
                });
            }
        }
    }
    report.findings = findings;
    if let Some(res) = report.statement(Statement::A).identity_residual {
        if res > IDENTITY_TOL {
            report.findings.push(Finding { message: format!("direct and expanded S(h) differ by {res:e} relative") });
        }
    }
    if report.verdict(Statement::B) {
        let tau_a = implied_threshold_a(g, points, threshold);
        let a = report.statement(Statement::A);
        if let Some(s) = a.series.iter().find(|s| s.last() > tau_a) {
            let message = format!("b' holds at {threshold:e} but a-series `{}` ends at {:e} > {tau_a:e}", s.label, s.last());
            report.findings.push(Finding { message });
        }
    }
    Ok(report)
}

/// Premise and conclusion of the bounded-domain corollary.
#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryReport {
    /// `sup_c |L(c) - c|` and `sup_t gamma(t)`.
    pub premises: Vec<Series>,
    pub conclusions: Vec<Series>,
    pub premise_holds: bool,
    pub conclusion_holds: bool,
}

impl CorollaryReport {
    pub fn consistent(&self) -> bool {
        !self.premise_holds || self.conclusion_holds
    }
}

/// For `X = K`: uniform convergence on constants and of `gamma` should
/// carry over to every probe.
pub fn check_corollary(pairs: &[OperatorPair], probes: &[VectorFunction], points: &[Vec<f64>], threshold: f64) -> Result<CorollaryReport> {
    check_sequence(pairs, points)?;
    if pairs.iter().any(|p| !p.domain().is_bounded_mode()) {
        return Err(Error::Mode);
    }
    let codim = probes.iter().map(VectorFunction::codim).max().unwrap_or(1);
    let mut q = vec![
        constants_quantity(Statement::B, simplex_constants(codim))?,
        Quantity { statement: Statement::B, label: "gamma".into(), measure: Arc::new(|t, set| Ok(set.gamma_sq(t).sqrt())) },
    ];
    q.extend(probes.iter().map(|f| vector_quantity(Statement::C, f.clone())));
    let cols = sweep(pairs, points, &q)?;
    let premises = assemble(Statement::B, pairs, points, &q, &cols, threshold)?;
    let conclusions = assemble(Statement::C, pairs, points, &q, &cols, threshold)?;
    Ok(CorollaryReport {
        premise_holds: premises.verdict,
        conclusion_holds: conclusions.verdict,
        premises: premises.series,
        conclusions: conclusions.series,
    })
}
