//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p korovkin-cli --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use korovkin::bounds::{estimate_m, shisha_mond_bound, uniform_bound, BoundEstimator, BoundForm, Delta, NuPolicy};
use korovkin::convergence::{equivalence_harness, identity_gap, simplex_constants, ProbeSet, Statement, TestSet, DEFAULT_THRESHOLD};
use korovkin::domain::{BoxRegion, Domain, Interval};
use korovkin::function::{battery, ScalarFunction, VectorFunction};
use korovkin::growth::GrowthFunction;
use korovkin::modulus::{modulus_of_continuity, weak_modulus, ModulusProfile, Norm, WeakNeighborhood};
use korovkin::operators::checks::{check_constants, check_domination, check_positivity, check_regularity, AXIOM_TOL};
use korovkin::operators::transform::{perturb_vector_weights, scale_mass};
use korovkin::operators::{
    make_bernstein, make_gauss_weierstrass, make_szasz, make_tensor, parse_family, OperatorPair, SzaszTruncation, DEFAULT_QUAD_POINTS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let held: bool = $cond;
        if !held {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn unit_interval() -> Domain {
    Domain::bounded(BoxRegion::cube(1, 0.0, 1.0).unwrap())
}

fn half_line() -> Domain {
    Domain::new(vec![Interval::new(0.0, f64::INFINITY).unwrap()], BoxRegion::cube(1, 0.0, 2.0).unwrap(), BoxRegion::cube(1, 0.0, 1.0).unwrap())
        .unwrap()
}

fn real_line() -> Domain {
    Domain::new(vec![Interval::real_line()], BoxRegion::cube(1, -1.0, 1.0).unwrap(), BoxRegion::cube(1, -0.5, 0.5).unwrap()).unwrap()
}

fn bernstein(n: u64) -> OperatorPair {
    OperatorPair::new(make_bernstein(n).unwrap(), unit_interval()).unwrap()
}

fn szasz(n: u64) -> OperatorPair {
    OperatorPair::new(make_szasz(n, SzaszTruncation::default()).unwrap(), half_line()).unwrap()
}

fn weierstrass(n: u64) -> OperatorPair {
    OperatorPair::new(make_gauss_weierstrass(n, DEFAULT_QUAD_POINTS).unwrap(), real_line()).unwrap()
}

fn tensor_bernstein(n: u64) -> OperatorPair {
    let family = make_tensor(&make_bernstein(n).unwrap(), 2).unwrap();
    OperatorPair::new(family, Domain::bounded(BoxRegion::cube(2, 0.0, 1.0).unwrap()).with_resolution(41).unwrap()).unwrap()
}

fn line(lo: f64, hi: f64, k: usize) -> Vec<Vec<f64>> {
    (0..k).map(|i| vec![lo + (hi - lo) * i as f64 / (k - 1) as f64]).collect()
}

fn k1_sample(pair: &OperatorPair, per_axis: usize) -> Vec<Vec<f64>> {
    pair.domain().k1().grid(per_axis).unwrap().points()
}

fn bernstein_moments() -> Check {
    let mut worst = [0.0f64; 3];
    let mut checks = 0;
    for n in [1u64, 10, 100, 1000] {
        let pair = bernstein(n);
        for t in line(0.0, 1.0, 201) {
            let x = t[0];
            worst[0] = worst[0].max((ok(pair.apply_s(&ScalarFunction::one(), &t))? - 1.0).abs());
            worst[1] = worst[1].max((ok(pair.apply_s(&ScalarFunction::projection(0), &t))? - x).abs());
            worst[2] = worst[2].max((ok(pair.gamma_sq(&t))? - x * (1.0 - x) / n as f64).abs());
            checks += 3;
        }
    }
    ensure!(worst.iter().all(|&w| w <= 1e-12), "max errors S1 {:e}, Su {:e}, gamma^2 {:e}", worst[0], worst[1], worst[2]);
    Ok(format!("{checks} moments, max error {:e}", worst.iter().fold(0.0f64, |a, &b| a.max(b))))
}

fn shisha_mond_validity() -> Check {
    let deltas = [Delta::Auto, Delta::Fixed(0.05), Delta::Fixed(0.2)];
    let mut pairs: Vec<(OperatorPair, Vec<Vec<f64>>)> = [1u64, 5, 10, 50, 100, 500, 1000].iter().map(|&n| (bernstein(n), line(0.0, 1.0, 101))).collect();
    pairs.extend([4u64, 16, 64].iter().map(|&n| (tensor_bernstein(n), BoxRegion::cube(2, 0.0, 1.0).unwrap().grid(11).unwrap().points())));
    let (mut checks, mut worst) = (0usize, f64::NEG_INFINITY);
    for (pair, points) in &pairs {
        for f in battery(&pair.domain().k1().center()) {
            let est = ok(BoundEstimator::new(pair, &f, None))?;
            for t in points {
                for &delta in &deltas {
                    let r = ok(est.shisha_mond(t, delta))?;
                    ensure!(r.measured <= r.bound + 1e-9, "{} {} t={t:?} {delta:?}: measured {} > bound {}", pair.label(), f.label(), r.measured, r.bound);
                    if checks % 97 == 0 {
                        let direct = ok(shisha_mond_bound(pair, &f, t, delta))?;
                        ensure!((direct.bound - r.bound).abs() <= 1e-12 * r.bound.max(1.0), "estimator and direct bound disagree at {t:?}");
                    }
                    worst = worst.max(r.measured - r.bound);
                    checks += 1;
                }
            }
        }
    }
    ensure!(checks >= 10_000, "only {checks} checks");
    Ok(format!("{checks} checks, max(measured - bound) = {worst:e}"))
}

fn uniform_specialization() -> Check {
    let square = VectorFunction::from_scalar(ScalarFunction::new("u^2", |u| u[0] * u[0]));
    let mut parts = Vec::new();
    for n in [10u64, 100, 1000] {
        let r = ok(uniform_bound(&bernstein(n), &square))?;
        let exact = 0.25 / n as f64;
        ensure!((r.measured - exact).abs() <= 1e-12, "n={n}: sup error {} vs {exact}", r.measured);
        let two_omega = 2.0 * r.components.omega;
        ensure!(two_omega > r.measured && r.valid, "n={n}: 2*omega {two_omega} does not exceed {}", r.measured);
        parts.push(format!("n={n}: {:.3e} < {:.3e}", r.measured, two_omega));
    }
    Ok(parts.join(", "))
}

fn identity_expansion() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let quartic = GrowthFunction::new("1+|u|^4", |u: &[f64]| 1.0 + u.iter().map(|x| x.powi(4)).sum::<f64>(), |u: &[f64]| {
        u.iter().map(|x| 4.0 * x.powi(3)).collect()
    });
    let growths = [GrowthFunction::quadratic(), GrowthFunction::gaussian(), quartic];
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let kind = rng.gen_range(0..4);
        let pair = match kind {
            0 => bernstein(rng.gen_range(1..=2000)),
            1 => szasz(rng.gen_range(1..=2000)),
            2 => weierstrass(rng.gen_range(1..=2000)),
            _ => tensor_bernstein(rng.gen_range(1..=100)),
        };
        let k1 = pair.domain().k1().clone();
        let t: Vec<f64> = k1.lo().iter().zip(k1.hi()).map(|(&lo, &hi)| rng.gen_range(lo..=hi)).collect();
        let g = &growths[rng.gen_range(0..growths.len())];
        let set = ok(pair.atoms_at(&t))?;
        let gap = ok(identity_gap(&set, g, &t))?;
        ensure!(gap <= 1e-9, "{} g={} t={t:?}: relative gap {gap:e}", pair.label(), g.label());
        worst = worst.max(gap);
    }
    Ok(format!("1000 triples, max relative gap {worst:e}"))
}

fn growth_bounds() -> Check {
    let g = GrowthFunction::quadratic();
    let targets = [
        VectorFunction::from_scalar(ScalarFunction::new("u^2", |u| u[0] * u[0])),
        VectorFunction::from_scalar(ScalarFunction::new("sin", |u| u[0].sin())),
        VectorFunction::new("(u, exp(-u))", 2, |u| vec![u[0], (-u[0]).exp()]).unwrap(),
    ];
    let domain = half_line();
    let (mut checks, mut worst, mut coincide) = (0usize, f64::NEG_INFINITY, 0.0f64);
    for f in &targets {
        let m = ok(estimate_m(f, &g, &domain, NuPolicy::default()))?;
        for n in [10u64, 100, 1000] {
            let pair = szasz(n);
            let est = ok(BoundEstimator::new(&pair, f, None))?;
            for t in line(0.0, 1.0, 101) {
                let forms = ok(est.growth_forms(&g, &t, Delta::Auto, &m))?;
                for r in &forms {
                    ensure!(r.measured <= r.bound + 1e-9, "{} n={n} t={t:?} {:?}: {} > {}", f.label(), r.form, r.measured, r.bound);
                    worst = worst.max(r.measured - r.bound);
                    checks += 1;
                }
                let by_form = |form: BoundForm| forms.iter().find(|r| r.form == form).map(|r| r.bound);
                let (c, l) = (by_form(BoundForm::GrowthConstants), by_form(BoundForm::GrowthLinear));
                ensure!(c.is_some() && l.is_some(), "missing specialised forms at n={n}");
                let d = (c.unwrap() - l.unwrap()).abs();
                ensure!(d <= 1e-9, "{} n={n} t={t:?}: constants form and linear form differ by {d:e}", f.label());
                coincide = coincide.max(d);
            }
        }
    }
    Ok(format!("{checks} checks, max(measured - bound) = {worst:e}, forms agree to {coincide:e}"))
}

fn m_estimator() -> Check {
    let g = GrowthFunction::quadratic();
    let domain = half_line();
    ensure!(domain.grid_resolution() == 201, "resolution {}", domain.grid_resolution());
    let square = VectorFunction::from_scalar(ScalarFunction::new("u^2", |u| u[0] * u[0]));
    let base = ok(estimate_m(&square, &g, &domain, NuPolicy::default()))?;
    ensure!((2.9..=3.1).contains(&base.m), "M = {}", base.m);
    for alpha in [-3.0, -0.5, 0.0, 0.25, 2.0, 7.5] {
        let scaled = ok(estimate_m(&square.scaled(alpha), &g, &domain, NuPolicy::default()))?;
        ensure!((scaled.m - alpha.abs() * base.m).abs() <= 1e-12, "alpha={alpha}: {} vs {}", scaled.m, alpha.abs() * base.m);
    }
    let at = base.witness.as_ref().map(|(t, u)| format!(" at t={t:?} u={u:?}")).unwrap_or_default();
    Ok(format!("M = {}{at}", base.m))
}

fn korovkin_harness() -> Check {
    let suite = [10u64, 100, 1000, 10_000, 100_000, 1_000_000];
    let tests = TestSet::new(1, GrowthFunction::quadratic(), 2);
    let probes = ProbeSet::from_vectors(battery(&[0.5]));
    let points = line(0.1, 0.9, 33);
    let pairs: Vec<_> = suite.iter().map(|&n| bernstein(n)).collect();
    let r = ok(equivalence_harness(&pairs, &tests, &probes, &points, DEFAULT_THRESHOLD))?;
    for s in Statement::ALL {
        ensure!(r.verdict(s), "Bernstein verdict {s} is false");
    }
    ensure!(r.consistent(), "Bernstein findings: {:?}", r.findings);
    let slope = r.statement(Statement::B).series("g").map(|s| s.fit.slope).unwrap_or(f64::NAN);
    ensure!((slope + 1.0).abs() <= 0.05, "g-defect slope {slope}");

    let drifting: Vec<_> = suite[..4]
        .iter()
        .map(|&n| {
            let factor = 1.0 + 0.1 * if n % 2 == 0 { 1.0 } else { -1.0 };
            OperatorPair::new(scale_mass(&make_bernstein(n).unwrap(), factor), unit_interval()).unwrap()
        })
        .collect();
    let d = ok(equivalence_harness(&drifting, &tests, &probes, &points, DEFAULT_THRESHOLD))?;
    ensure!(!d.verdict(Statement::B) && !d.verdict(Statement::C), "drifting mass: b'={} c={}", d.verdict(Statement::B), d.verdict(Statement::C));
    ensure!(d.consistent(), "drifting findings: {:?}", d.findings);
    Ok(format!("six verdicts true, g slope {slope:.4}; drifting mass b'=false c=false, consistent"))
}

fn operator_axioms() -> Check {
    let pairs = [bernstein(10), bernstein(200), szasz(10), szasz(200), weierstrass(10), weierstrass(200), tensor_bernstein(8)];
    let scalar = ScalarFunction::new("wave", |u| u.iter().sum::<f64>().sin() + 0.5);
    for pair in &pairs {
        let sample = k1_sample(pair, 21);
        let mut reports = vec![ok(check_positivity(pair, &sample))?];
        for f in battery(&pair.domain().k1().center()) {
            reports.push(ok(check_domination(pair, &f, &sample))?);
        }
        for c in simplex_constants(2) {
            reports.push(ok(check_regularity(pair, &scalar, &c, &sample))?);
            reports.push(ok(check_constants(pair, &c, &sample))?);
        }
        for r in reports {
            ensure!(r.pass && r.max_violation <= AXIOM_TOL, "{}: {r}", pair.label());
        }
    }

    // one negative weight: S(|u|) = 1 < |L(u)| = 2 at t = 0.5
    let negative = OperatorPair::new(ok(parse_family("m 1\nn 1\nflags none\nt: 0.5\n-0.5 -1\n1.5 1\n"))?, real_line()).unwrap();
    let r = ok(check_domination(&negative, &VectorFunction::from_scalar(ScalarFunction::projection(0)), &[vec![0.5]]))?;
    ensure!(!r.pass && r.violating_atoms.iter().any(|a| a.index == 0 && a.node == [-1.0]), "negative weight not named: {r}");

    let perturbed = OperatorPair::new(perturb_vector_weights(&make_bernstein(4).unwrap(), 2, 0.1), unit_interval()).unwrap();
    let sample = line(0.0, 1.0, 21);
    let r = ok(check_regularity(&perturbed, &ScalarFunction::one(), &[1.0, 0.0], &sample))?;
    ensure!(!r.pass && r.violating_atoms.iter().any(|a| a.vector && a.index == 0), "perturbed L atom not named: {r}");

    let scaled = OperatorPair::new(scale_mass(&make_bernstein(6).unwrap(), 0.9), unit_interval()).unwrap();
    let c = [3.0, 4.0];
    let r = ok(check_constants(&scaled, &c, &sample))?;
    ensure!(!r.pass && (r.max_violation - 0.5).abs() <= 1e-12 && !r.violating_atoms.is_empty(), "scaled mass: {r}");
    Ok(format!("{} built-ins pass, 3 corrupted fixtures fail with atoms named", pairs.len()))
}

fn moduli() -> Check {
    let grid = BoxRegion::cube(1, 0.0, 1.0).unwrap().grid(201).unwrap();
    let deltas: Vec<f64> = (1..=20).map(|k| 0.025 * k as f64).collect();
    for f in battery(&[0.5]) {
        let values: Vec<f64> = deltas.iter().map(|&d| modulus_of_continuity(&f, &grid, d)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        ensure!(values.windows(2).all(|w| w[0] <= w[1]), "{} not monotone: {values:?}", f.label());
        if f.label() == "const" {
            ensure!(values.iter().all(|&v| v == 0.0), "constant has modulus {values:?}");
        }
    }
    let f = VectorFunction::new("mix", 2, |u| vec![(u[0] + 2.0 * u[1]).sin(), u[0] * u[1]]).unwrap();
    let grid2 = BoxRegion::cube(2, 0.0, 1.0).unwrap().grid(21).unwrap();
    let profile = ok(ModulusProfile::new(&f, &grid2, Norm::Max, None))?;
    let mut worst = 0.0f64;
    for k in 1..=8 {
        let delta = 0.05 * k as f64;
        let weak = ok(weak_modulus(&f, &grid2, &ok(WeakNeighborhood::coordinate(2, delta))?, &grid2))?;
        worst = worst.max((weak - profile.at(delta)).abs());
    }
    ensure!(worst <= 1e-12, "weak vs max-norm modulus differ by {worst:e}");
    Ok(format!("5 battery functions monotone over 20 deltas, weak = max-norm within {worst:e}"))
}

fn cli_determinism() -> Check {
    let configs = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cases = [
        ("bound", "bound_bernstein.json", 0),
        ("bound", "bound_szasz.json", 0),
        ("bound", "growth_violation.json", 65),
        ("converge", "converge_szasz.json", 0),
        ("converge", "growth_violation.json", 65),
        ("check-operator", "check_bernstein.json", 0),
        ("check-operator", "check_negative.json", 2),
        ("equivalence", "equivalence_bernstein.json", 0),
    ];
    let exe = env!("CARGO_BIN_EXE_korovkin");
    let mut runs = 0;
    for (i, (cmd, config, expected)) in cases.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("{i}-{rep}.csv"));
            let status = Command::new(exe)
                .args([cmd, "--config", configs.join(config).to_str().unwrap(), "--out", out.to_str().unwrap()])
                .output()
                .map_err(|e| e.to_string())?;
            ensure!(status.status.code() == Some(*expected), "{cmd} {config}: exit {:?}, expected {expected}", status.status.code());
            outputs.push(std::fs::read(&out).unwrap_or_default());
            runs += 1;
        }
        ensure!(outputs[0] == outputs[1], "{cmd} {config}: outputs differ");
        if *expected != 65 {
            ensure!(!outputs[0].is_empty(), "{cmd} {config}: no CSV written");
            let mut tables = Vec::new();
            for _ in 0..2 {
                let t = Command::new(exe).args(["table", "--input", dir.path().join(format!("{i}-0.csv")).to_str().unwrap()]).output().map_err(|e| e.to_string())?;
                ensure!(t.status.code() == Some(0), "table on {config}: exit {:?}", t.status.code());
                tables.push(t.stdout);
                runs += 1;
            }
            ensure!(tables[0] == tables[1], "table on {config}: outputs differ");
        }
    }
    Ok(format!("{runs} runs byte-identical in pairs, exit codes as expected"))
}

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Check,
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria = [
        Criterion { id: 1, name: "Bernstein moments", limit: Some(Duration::from_secs(1)), run: bernstein_moments },
        Criterion { id: 2, name: "Shisha-Mond validity", limit: Some(Duration::from_secs(30)), run: shisha_mond_validity },
        Criterion { id: 3, name: "uniform specialization", limit: None, run: uniform_specialization },
        Criterion { id: 4, name: "growth identity expansion", limit: None, run: identity_expansion },
        Criterion { id: 5, name: "growth bounds on Szasz", limit: None, run: growth_bounds },
        Criterion { id: 6, name: "M estimator", limit: None, run: m_estimator },
        Criterion { id: 7, name: "Korovkin harness", limit: Some(Duration::from_secs(60)), run: korovkin_harness },
        Criterion { id: 8, name: "operator axioms", limit: None, run: operator_axioms },
        Criterion { id: 9, name: "moduli", limit: None, run: moduli },
        Criterion { id: 10, name: "CLI determinism", limit: None, run: cli_determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let result = match (result, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {:.2} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs())),
            (r, _) => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {} ({:.2} s): {detail}", c.id, c.name, elapsed.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
