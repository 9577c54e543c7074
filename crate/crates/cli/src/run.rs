//! Subcommand implementations. Each returns the CSV text and an exit code.

use std::path::Path;

use korovkin::bounds::{estimate_m, uniform_bound, BoundEstimator, BoundReport, Delta, NuPolicy};
use korovkin::convergence::{
    check_statement_a, check_statement_b, check_statement_c, defect_matrix, equivalence_harness, simplex_constants, DefectRow, ProbeSet,
    RejectedProbe, StatementReport, TestSet,
};
use korovkin::function::{ScalarFunction, VectorFunction};
use korovkin::growth::{growth_certificate, truncation_region, GrowthFunction};
use korovkin::operators::checks::{check_constants, check_domination, check_positivity, check_regularity, AxiomReport};
use korovkin::operators::OperatorPair;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{locate, RunConfig, Target};
use crate::error::{CliError, CliResult, EXIT_GROWTH, EXIT_OK, EXIT_VERDICT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bound,
    Converge,
    CheckOperator,
    Equivalence,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Bound => "bound",
            Command::Converge => "converge",
            Command::CheckOperator => "check-operator",
            Command::Equivalence => "equivalence",
        }
    }
}

/// CSV text, exit code and diagnostics for stderr.
#[derive(Debug, Clone)]
pub struct Output {
    pub csv: String,
    pub code: u8,
    pub messages: Vec<String>,
}

struct Sheet {
    text: String,
    rows: Vec<Vec<String>>,
}

impl Sheet {
    fn new(cmd: Command, cfg: &RunConfig) -> Self {
        let mut text = format!("# korovkin {}\n# seed={}\n", cmd.name(), cfg.options.seed);
        if matches!(cmd, Command::Converge | Command::Equivalence) {
            text.push_str(&format!("# threshold={}\n", cfg.options.threshold));
        }
        if cmd != Command::CheckOperator {
            text.push_str(&format!("# growth={}\n", cfg.growth));
        }
        Sheet { text, rows: Vec::new() }
    }

    fn comment(&mut self, line: impl AsRef<str>) {
        for l in line.as_ref().lines() {
            self.text.push_str("# ");
            self.text.push_str(l);
            self.text.push('\n');
        }
    }

    fn finish(mut self) -> CliResult<String> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv writer: {e}")))?;
        self.text.push_str(&String::from_utf8(bytes).expect("csv output is UTF-8"));
        Ok(self.text)
    }
}

pub fn run(cmd: Command, cfg: &RunConfig, base: &Path) -> CliResult<Output> {
    let targets = cfg.targets()?;
    let out = match cmd {
        Command::Bound => bound(cfg, base, &targets),
        Command::Converge => converge(cfg, base, &targets),
        Command::CheckOperator => check_operator(cfg, base, &targets),
        Command::Equivalence => equivalence(cfg, base, &targets),
    };
    out.map_err(|e| match e {
        CliError::Core(err) => locate(err, &targets),
        other => other,
    })
}

fn checked_growth(cfg: &RunConfig, pairs: &[OperatorPair]) -> CliResult<GrowthFunction> {
    let g = cfg.growth_function()?;
    if let Some(p) = pairs.first() {
        if !p.domain().is_bounded_mode() {
            g.check_hypotheses(p.domain(), cfg.options.seed)?;
        }
    }
    Ok(g)
}

fn bound(cfg: &RunConfig, base: &Path, targets: &[Target]) -> CliResult<Output> {
    if targets.is_empty() {
        return Err(CliError::Config("bound needs at least one target".into()));
    }
    let domain = cfg.domain()?;
    let pairs = cfg.pairs(base)?;
    let points = cfg.points(&domain)?;
    let deltas = cfg.deltas()?;
    let g = checked_growth(cfg, &pairs)?;
    let bounded = domain.is_bounded_mode();
    let policy = NuPolicy { epsilon: cfg.options.epsilon, ..NuPolicy::default() };

    let mut sheet = Sheet::new(Command::Bound, cfg);
    let mut header = BoundReport::csv_header(domain.dim());
    header.extend(["target".to_string(), "form".to_string()]);
    sheet.rows.push(header);
    let mut invalid = 0usize;
    let mut push = |sheet: &mut Sheet, r: &BoundReport, target: &str| {
        if !r.valid {
            invalid += 1;
        }
        let mut rec = r.csv_record();
        rec.extend([target.to_string(), r.form.to_string()]);
        sheet.rows.push(rec);
    };

    for target in targets {
        let f = &target.function;
        let m = if bounded {
            None
        } else {
            let region = truncation_region(&g, &domain)?;
            growth_certificate(f, &g, &region.grid(domain.grid_resolution())?.points())?;
            let m = estimate_m(f, &g, &domain, policy)?;
            let at = m.witness.as_ref().map(|(t, u)| format!(" t={t:?} u={u:?}")).unwrap_or_default();
            sheet.comment(format!("{}: M={} nu={}{at}", f.label(), m.m, m.nu));
            Some(m)
        };
        for pair in &pairs {
            let max_gamma = points.iter().map(|t| pair.gamma_sq(t).map(f64::sqrt)).collect::<Result<Vec<_>, _>>()?.into_iter().fold(0.0, f64::max);
            let reach = deltas.iter().map(|d| if let Delta::Fixed(x) = d { *x } else { 0.0 }).fold(max_gamma, f64::max);
            let est = BoundEstimator::new(pair, f, Some(reach.max(f64::MIN_POSITIVE)))?;
            for t in &points {
                for (i, &delta) in deltas.iter().enumerate() {
                    match &m {
                        None => push(&mut sheet, &est.shisha_mond(t, delta)?, f.label()),
                        Some(m) => {
                            for r in est.growth_forms(&g, t, delta, m)? {
                                if i == 0 || r.form == korovkin::bounds::BoundForm::Growth {
                                    push(&mut sheet, &r, f.label());
                                }
                            }
                        }
                    }
                }
            }
            push(&mut sheet, &uniform_bound(pair, f)?, f.label());
        }
    }
    let mut messages = Vec::new();
    if invalid > 0 {
        messages.push(format!("{invalid} bound(s) below the measured error"));
    }
    let code = if invalid > 0 { EXIT_VERDICT } else { EXIT_OK };
    Ok(Output { csv: sheet.finish()?, code, messages })
}

fn probes(targets: &[Target], center: &[f64]) -> ProbeSet {
    if targets.is_empty() {
        ProbeSet::from_vectors(korovkin::function::battery(center))
    } else {
        ProbeSet::from_vectors(targets.iter().map(|t| t.function.clone()).collect())
    }
}

fn write_matrix(sheet: &mut Sheet, rows: &[DefectRow]) {
    sheet.rows.push(DefectRow::HEADER.iter().map(|s| s.to_string()).collect());
    sheet.rows.extend(rows.iter().map(DefectRow::csv_record));
}

fn note_reports(sheet: &mut Sheet, reports: &[StatementReport]) {
    for r in reports {
        let mut line = format!("statement {} verdict={}", r.statement, r.verdict);
        if let Some(res) = r.identity_residual {
            line.push_str(&format!(" identity_residual={res:e}"));
        }
        if let Some((n, t)) = r.worst_witness() {
            line.push_str(&format!(" worst n={n} t={t:?}"));
        }
        sheet.comment(line);
    }
}

fn note_rejected(sheet: &mut Sheet, messages: &mut Vec<String>, rejected: &[RejectedProbe]) -> bool {
    for r in rejected {
        let e = CliError::RejectedProbe { label: r.label.clone(), ratio: r.ratio, witness: r.witness.clone() };
        sheet.comment(format!("rejected: {e}"));
        messages.push(e.to_string());
    }
    !rejected.is_empty()
}

fn codim(targets: &[Target]) -> usize {
    targets.iter().map(|t| t.function.codim()).max().unwrap_or(2)
}

fn converge(cfg: &RunConfig, base: &Path, targets: &[Target]) -> CliResult<Output> {
    let domain = cfg.domain()?;
    let pairs = cfg.pairs(base)?;
    let points = cfg.points(&domain)?;
    let g = checked_growth(cfg, &pairs)?;
    let tau = cfg.options.threshold;
    let tests = TestSet::new(domain.dim(), g.clone(), codim(targets));
    let probe_set = probes(targets, &domain.k1().center());

    let a = check_statement_a(&pairs, &tests, &points, tau)?;
    let b = check_statement_b(&pairs, &tests, &points, tau)?;
    let c = check_statement_c(&pairs, &g, &probe_set, &points, tau)?;
    let mut sheet = Sheet::new(Command::Converge, cfg);
    let mut messages = Vec::new();
    let rejected = note_rejected(&mut sheet, &mut messages, &c.rejected);
    let reports = [a, b, c];
    note_reports(&mut sheet, &reports);
    write_matrix(&mut sheet, &defect_matrix(&reports));
    let code = if rejected {
        EXIT_GROWTH
    } else if reports.iter().all(|r| r.verdict) {
        EXIT_OK
    } else {
        EXIT_VERDICT
    };
    Ok(Output { csv: sheet.finish()?, code, messages })
}

fn equivalence(cfg: &RunConfig, base: &Path, targets: &[Target]) -> CliResult<Output> {
    let domain = cfg.domain()?;
    let pairs = cfg.pairs(base)?;
    let points = cfg.points(&domain)?;
    let g = checked_growth(cfg, &pairs)?;
    let tests = TestSet::new(domain.dim(), g, codim(targets));
    let probe_set = probes(targets, &domain.k1().center());
    let report = equivalence_harness(&pairs, &tests, &probe_set, &points, cfg.options.threshold)?;

    let mut sheet = Sheet::new(Command::Equivalence, cfg);
    let mut messages = Vec::new();
    let rejected = note_rejected(&mut sheet, &mut messages, &report.statement(korovkin::convergence::Statement::C).rejected);
    sheet.comment(format!("regular={}", report.regular));
    note_reports(&mut sheet, &report.statements);
    for f in &report.findings {
        sheet.comment(format!("finding: {f}"));
        messages.push(format!("finding: {f}"));
    }
    write_matrix(&mut sheet, &report.defect_matrix());
    let code = if rejected {
        EXIT_GROWTH
    } else if report.all_true() && report.consistent() {
        EXIT_OK
    } else {
        EXIT_VERDICT
    };
    Ok(Output { csv: sheet.finish()?, code, messages })
}

fn random_scalar(rng: &mut ChaCha8Rng, label: String) -> ScalarFunction {
    let c: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
    ScalarFunction::new(label, move |u| {
        let s: f64 = u.iter().sum();
        c[0] + c[1] * s + c[2] * (c[3] * s).sin()
    })
}

fn random_vector(rng: &mut ChaCha8Rng, k: usize, label: String) -> VectorFunction {
    let parts: Vec<ScalarFunction> = (0..k).map(|i| random_scalar(rng, format!("{label}.{i}"))).collect();
    VectorFunction::new(label, k, move |u| parts.iter().map(|p| p.eval(u)).collect()).expect("positive codimension")
}

fn check_operator(cfg: &RunConfig, base: &Path, targets: &[Target]) -> CliResult<Output> {
    let domain = cfg.domain()?;
    let pairs = cfg.pairs(base)?;
    let sample = cfg.points(&domain)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.options.seed);

    let mut sheet = Sheet::new(Command::CheckOperator, cfg);
    sheet.rows.push(
        ["label", "n", "axiom", "function", "pass", "max_violation", "points", "worst_t", "violations", "first_violation"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    let mut messages = Vec::new();
    let mut failed = false;
    for pair in &pairs {
        let k = pair.atoms_at(&sample[0])?.vector_atoms.as_ref().and_then(|v| v.first()).map(|a| a.weights.len()).filter(|&k| k > 1).unwrap_or(2);
        let mut reports: Vec<(String, AxiomReport)> = vec![("-".into(), check_positivity(pair, &sample)?)];
        let mut dom_targets: Vec<VectorFunction> = targets.iter().map(|t| t.function.clone()).filter(|f| f.codim() == k || f.codim() == 1).collect();
        dom_targets.extend((0..cfg.options.trials).map(|i| random_vector(&mut rng, k, format!("random{i}"))));
        for f in &dom_targets {
            reports.push((f.label().to_string(), check_domination(pair, f, &sample)?));
        }
        let constants = simplex_constants(k);
        let f = random_scalar(&mut rng, "random-scalar".into());
        reports.push((format!("{}*{:?}", f.label(), constants[0]), check_regularity(pair, &f, &constants[0], &sample)?));
        for c in &constants {
            reports.push((format!("{c:?}"), check_constants(pair, c, &sample)?));
        }
        let mut reported = Vec::new();
        for (function, r) in reports {
            if !r.pass {
                failed = true;
                if !reported.contains(&r.axiom) {
                    reported.push(r.axiom);
                    messages.push(format!("{} n={} {function}: {r}", pair.label(), pair.n()));
                }
            }
            sheet.rows.push(vec![
                pair.label().to_string(),
                pair.n().to_string(),
                r.axiom.to_string(),
                function,
                r.pass.to_string(),
                korovkin::format_number(r.max_violation),
                r.points_checked.to_string(),
                r.worst_point.as_ref().map(|t| format!("{t:?}")).unwrap_or_default(),
                r.violating_atoms.len().to_string(),
                r.violating_atoms.first().map(|a| a.to_string()).unwrap_or_default(),
            ]);
        }
    }
    let code = if failed { EXIT_VERDICT } else { EXIT_OK };
    Ok(Output { csv: sheet.finish()?, code, messages })
}
