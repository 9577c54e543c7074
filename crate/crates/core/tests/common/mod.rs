#![allow(dead_code)]

use korovkin::domain::{BoxRegion, Domain, Interval};
use korovkin::operators::{make_bernstein, make_gauss_weierstrass, make_szasz, make_tensor, OperatorPair, SzaszTruncation, DEFAULT_QUAD_POINTS};

pub fn unit_interval() -> Domain {
    Domain::bounded(BoxRegion::cube(1, 0.0, 1.0).unwrap())
}

pub fn half_line() -> Domain {
    Domain::new(
        vec![Interval::new(0.0, f64::INFINITY).unwrap()],
        BoxRegion::cube(1, 0.0, 2.0).unwrap(),
        BoxRegion::cube(1, 0.0, 1.0).unwrap(),
    )
    .unwrap()
}

pub fn real_line() -> Domain {
    Domain::new(vec![Interval::real_line()], BoxRegion::cube(1, -1.0, 1.0).unwrap(), BoxRegion::cube(1, -0.5, 0.5).unwrap()).unwrap()
}

pub fn bernstein(n: u64) -> OperatorPair {
    OperatorPair::new(make_bernstein(n).unwrap(), unit_interval()).unwrap()
}

pub fn szasz(n: u64) -> OperatorPair {
    OperatorPair::new(make_szasz(n, SzaszTruncation::default()).unwrap(), half_line()).unwrap()
}

pub fn weierstrass(n: u64) -> OperatorPair {
    OperatorPair::new(make_gauss_weierstrass(n, DEFAULT_QUAD_POINTS).unwrap(), real_line()).unwrap()
}

pub fn tensor_bernstein(n: u64) -> OperatorPair {
    let family = make_tensor(&make_bernstein(n).unwrap(), 2).unwrap();
    OperatorPair::new(family, Domain::bounded(BoxRegion::cube(2, 0.0, 1.0).unwrap()).with_resolution(41).unwrap()).unwrap()
}

/// One pair of every built-in kind, with a point of K1 to evaluate at.
pub fn builtin_pairs(n: u64) -> Vec<OperatorPair> {
    vec![bernstein(n), szasz(n), weierstrass(n), tensor_bernstein(n)]
}

pub fn grid(lo: f64, hi: f64, k: usize) -> Vec<Vec<f64>> {
    (0..k).map(|i| vec![lo + (hi - lo) * i as f64 / (k - 1) as f64]).collect()
}
