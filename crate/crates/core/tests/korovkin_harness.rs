mod common;

use common::*;
use korovkin::convergence::{
    check_statement_a, check_statement_b, equivalence_harness, identity_gap, implied_threshold_a, ProbeSet, Statement, TestSet,
    DEFAULT_THRESHOLD,
};
use korovkin::domain::BoxRegion;
use korovkin::function::battery;
use korovkin::growth::GrowthFunction;
use korovkin::operators::transform::{reindex, scale_mass};
use korovkin::operators::{make_bernstein, OperatorPair};
use proptest::prelude::*;

const SUITE: [u64; 6] = [10, 100, 1000, 10_000, 100_000, 1_000_000];

fn inner() -> Vec<Vec<f64>> {
    grid(0.1, 0.9, 33)
}

fn drifting(ns: &[u64]) -> Vec<OperatorPair> {
    ns.iter()
        .map(|&n| {
            let factor = if n % 2 == 0 { 1.1 } else { 0.9 };
            OperatorPair::new(scale_mass(&make_bernstein(n).unwrap(), factor), unit_interval()).unwrap()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identity_holds_on_random_points(x in 0.0f64..1.0, n in 1u64..500, which in 0usize..3) {
        let g = [GrowthFunction::quadratic(), GrowthFunction::gaussian(), GrowthFunction::quadratic()][which].clone();
        let pair = match which { 2 => szasz(n), _ => bernstein(n) };
        let set = pair.atoms_at(&[x]).unwrap();
        prop_assert!(identity_gap(&set, &g, &[x]).unwrap() <= 1e-9);
    }
}

#[test]
fn bernstein_suite_is_fully_consistent() {
    let pairs: Vec<_> = SUITE.iter().map(|&n| bernstein(n)).collect();
    let tests = TestSet::new(1, GrowthFunction::quadratic(), 2);
    let probes = ProbeSet::from_vectors(battery(&[0.5]));
    let r = equivalence_harness(&pairs, &tests, &probes, &inner(), DEFAULT_THRESHOLD).unwrap();
    for s in Statement::ALL {
        assert!(r.verdict(s), "{s}: {:?}", r.statement(s).series.iter().map(|x| (&x.label, x.last())).collect::<Vec<_>>());
    }
    assert!(r.consistent(), "{:?}", r.findings);
    let g = r.statement(Statement::B).series("g").unwrap();
    assert!((g.fit.slope + 1.0).abs() <= 0.05);
    assert!(r.statement(Statement::B).series("pr1").unwrap().fit.is_exact_zero());
}

#[test]
fn drifting_mass_breaks_b_and_c() {
    let pairs = drifting(&[10, 100, 1000, 10_000]);
    let tests = TestSet::new(1, GrowthFunction::quadratic(), 2);
    let probes = ProbeSet::from_vectors(battery(&[0.5]));
    let r = equivalence_harness(&pairs, &tests, &probes, &inner(), DEFAULT_THRESHOLD).unwrap();
    assert!(!r.verdict(Statement::B));
    assert!(!r.verdict(Statement::C));
    let c = r.statement(Statement::C);
    for label in ["square", "sin", "kink", "mixed"] {
        assert!(!c.series(label).unwrap().verdict, "{label}");
    }
    assert!(r.consistent(), "{:?}", r.findings);
}

#[test]
fn b_implies_a_with_scaled_threshold() {
    let g = GrowthFunction::quadratic();
    let tests = TestSet::new(1, g.clone(), 1);
    let pts = inner();
    let fixtures: Vec<Vec<OperatorPair>> = vec![
        [10u64, 100, 1000].iter().map(|&n| bernstein(n)).collect(),
        drifting(&[10, 100, 1000]),
        [10u64, 100, 1000].iter().map(|&n| OperatorPair::new(reindex(&make_bernstein(3).unwrap(), n), unit_interval()).unwrap()).collect(),
        [10u64, 100, 1000]
            .iter()
            .map(|&n| OperatorPair::new(scale_mass(&make_bernstein(n).unwrap(), 1.0 + 1.0 / (n as f64).sqrt()), unit_interval()).unwrap())
            .collect(),
    ];
    for tau in [1e-3, 1e-2, 5e-2] {
        for pairs in &fixtures {
            let b = check_statement_b(pairs, &tests, &pts, tau).unwrap();
            if b.verdict {
                let a = check_statement_a(pairs, &tests, &pts, implied_threshold_a(&g, &pts, tau)).unwrap();
                assert!(a.series.iter().all(|s| s.last() <= a.threshold), "{}", pairs[0].label());
            }
        }
    }
}

#[test]
fn szasz_statement_a() {
    let pairs: Vec<_> = [10u64, 100, 1000].iter().map(|&n| szasz(n)).collect();
    let tests = TestSet::new(1, GrowthFunction::quadratic(), 1);
    let r = check_statement_a(&pairs, &tests, &[vec![1.0]], DEFAULT_THRESHOLD).unwrap();
    let snh = r.series("snh").unwrap();
    for &(n, d) in &snh.values {
        assert!((d - 1.0 / n as f64).abs() <= 1e-12, "n={n}");
    }
    assert!(r.identity_residual.unwrap() <= 1e-9);
}

#[test]
fn collapse_for_linear_preserving_families() {
    let g = GrowthFunction::quadratic();
    for pair in [bernstein(40), szasz(40), weierstrass(40)] {
        let k1 = pair.domain().k1().clone();
        for x in grid(k1.lo()[0], k1.hi()[0], 11) {
            let set = pair.atoms_at(&x).unwrap();
            let mom = set.growth_moments(&g, &x).unwrap();
            assert!((mom.snh_direct - (mom.s_g - g.value(&x))).abs() <= 1e-9 * (1.0 + mom.s_g), "{}", pair.label());
        }
    }
}

#[test]
fn tensor_suite_in_two_dimensions() {
    let pairs: Vec<_> = [10u64, 100, 1000].iter().map(|&n| tensor_bernstein(n)).collect();
    let tests = TestSet::new(2, GrowthFunction::quadratic(), 2);
    let pts = BoxRegion::cube(2, 0.1, 0.9).unwrap().grid(9).unwrap().points();
    let r = check_statement_b(&pairs, &tests, &pts, 1e-2).unwrap();
    assert!(r.verdict);
    assert!((r.series("g").unwrap().fit.slope + 1.0).abs() <= 0.05);
}
