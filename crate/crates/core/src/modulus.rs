//! Grid moduli of continuity.
//!
//! `ModulusProfile` evaluates the target once on a tensor grid and then,
//! for every integer offset between grid points, records the largest
//! increment of the target across that offset. Queries at any radius are
//! a binary search over offsets sorted by length.

use crate::domain::{BoxRegion, Grid};
use crate::error::{Error, Result};
use crate::function::VectorFunction;

const RADIUS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    #[default]
    Euclidean,
    Max,
}

impl Norm {
    fn of(self, v: impl Iterator<Item = f64>) -> f64 {
        match self {
            Norm::Euclidean => v.map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Max => v.map(f64::abs).fold(0.0, f64::max),
        }
    }
}

fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Target values on a grid, flattened point-major.
struct Sampled {
    values: Vec<f64>,
    codim: usize,
}

impl Sampled {
    fn new(f: &VectorFunction, grid: &Grid) -> Result<Self> {
        let pts = grid.points();
        let rows = grid.execution().try_map(&pts, |p| f.eval_checked(p))?;
        Ok(Sampled { values: rows.concat(), codim: f.codim() })
    }

    #[inline]
    fn at(&self, i: usize) -> &[f64] {
        &self.values[i * self.codim..(i + 1) * self.codim]
    }
}

#[derive(Debug, Clone)]
struct OffsetStat {
    length: f64,
    /// distance between the nearest points of the two grid cells
    lower: f64,
    increment: f64,
}

/// Precomputed increments of a target over all grid offsets up to a radius.
#[derive(Debug, Clone)]
pub struct ModulusProfile {
    by_length: Vec<(f64, f64)>,
    by_lower: Vec<(f64, f64)>,
    max_radius: f64,
    norm: Norm,
}

impl ModulusProfile {
    /// Profile over all offsets of length at most `max_radius`
    /// (`None` means every offset in the grid).
    pub fn new(f: &VectorFunction, grid: &Grid, norm: Norm, max_radius: Option<f64>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Config("empty grid".into()));
        }
        let sampled = Sampled::new(f, grid)?;
        let shape = grid.shape();
        let h = grid.spacing().to_vec();
        let m = shape.len();
        let radius = max_radius.unwrap_or(f64::INFINITY);

        // canonical offsets: first nonzero component positive
        let mut offsets: Vec<Vec<isize>> = Vec::new();
        let ranges: Vec<isize> = shape.iter().map(|&n| n as isize - 1).collect();
        let mut cur: Vec<isize> = ranges.iter().map(|r| -r).collect();
        'outer: loop {
            let first_nz = cur.iter().find(|&&d| d != 0);
            if matches!(first_nz, Some(&d) if d > 0) {
                let len = norm.of(cur.iter().zip(&h).map(|(&d, &hh)| d as f64 * hh));
                if len <= radius * (1.0 + RADIUS_TOL) {
                    offsets.push(cur.clone());
                }
            }
            for ax in (0..m).rev() {
                if cur[ax] < ranges[ax] {
                    cur[ax] += 1;
                    continue 'outer;
                }
                cur[ax] = -ranges[ax];
            }
            break;
        }

        let idx: Vec<Vec<usize>> = (0..grid.len()).map(|i| grid.unravel(i)).collect();
        let strides: Vec<isize> = {
            let mut s = vec![1isize; m];
            for ax in (0..m.saturating_sub(1)).rev() {
                s[ax] = s[ax + 1] * shape[ax + 1] as isize;
            }
            s
        };
        let stats = grid.execution().map(&offsets, |d| {
            let shift: isize = d.iter().zip(&strides).map(|(a, b)| a * b).sum();
            let mut best: f64 = 0.0;
            for (i, mi) in idx.iter().enumerate() {
                let inside = mi.iter().zip(d).zip(&shape).all(|((&p, &dd), &n)| {
                    let q = p as isize + dd;
                    q >= 0 && q < n as isize
                });
                if inside {
                    let j = (i as isize + shift) as usize;
                    best = best.max(diff_norm(sampled.at(i), sampled.at(j)));
                }
            }
            OffsetStat {
                length: norm.of(d.iter().zip(&h).map(|(&dd, &hh)| dd as f64 * hh)),
                lower: norm.of(d.iter().zip(&h).map(|(&dd, &hh)| (dd.unsigned_abs().max(1) - 1) as f64 * hh)),
                increment: best,
            }
        });

        let prefix = |mut v: Vec<(f64, f64)>| {
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut run: f64 = 0.0;
            for e in v.iter_mut() {
                run = run.max(e.1);
                e.1 = run;
            }
            v
        };
        Ok(ModulusProfile {
            by_length: prefix(stats.iter().map(|s| (s.length, s.increment)).collect()),
            by_lower: prefix(stats.iter().map(|s| (s.lower, s.increment)).collect()),
            max_radius: radius,
            norm,
        })
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    /// Grid supremum of `|F(u) - F(t)|` over pairs with `|u - t| <= delta`.
    pub fn at(&self, delta: f64) -> f64 {
        debug_assert!(delta <= self.max_radius * (1.0 + RADIUS_TOL), "radius beyond profile");
        let cut = self.by_length.partition_point(|e| e.0 <= delta * (1.0 + RADIUS_TOL));
        if cut == 0 { 0.0 } else { self.by_length[cut - 1].1 }
    }

    /// Like `at`, but the radius is rounded up to the grid: an offset counts
    /// whenever its two cells come closer than `delta`. Any positive radius
    /// therefore sees at least the nearest neighbours, so the value does not
    /// collapse to zero when `delta` is below the grid spacing.
    pub fn covering(&self, delta: f64) -> f64 {
        if !(delta > 0.0) {
            return 0.0;
        }
        let cut = self.by_lower.partition_point(|e| e.0 < delta * (1.0 - RADIUS_TOL));
        if cut == 0 { 0.0 } else { self.by_lower[cut - 1].1 }
    }
}

/// `sup |F(u) - F(t)|` over grid pairs at Euclidean distance at most `delta`.
pub fn modulus_of_continuity(f: &VectorFunction, grid: &Grid, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Input(format!("delta must be positive, got {delta}")));
    }
    Ok(ModulusProfile::new(f, grid, Norm::Euclidean, Some(delta))?.at(delta))
}

/// Finite set of linear functionals and a tolerance, defining the
/// neighbourhood `{y : |<xi, y>| <= delta for all xi}` of the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakNeighborhood {
    functionals: Vec<Vec<f64>>,
    delta: f64,
}

impl WeakNeighborhood {
    pub fn new(functionals: Vec<Vec<f64>>, delta: f64) -> Result<Self> {
        if functionals.is_empty() {
            return Err(Error::Input("weak neighbourhood needs at least one functional".into()));
        }
        if !(delta > 0.0) {
            return Err(Error::Input(format!("delta must be positive, got {delta}")));
        }
        let m = functionals[0].len();
        if let Some(bad) = functionals.iter().find(|f| f.len() != m) {
            return Err(Error::Dimension { expected: m, got: bad.len() });
        }
        Ok(WeakNeighborhood { functionals, delta })
    }

    /// Coordinate functionals `e_1, ..., e_m`.
    pub fn coordinate(m: usize, delta: f64) -> Result<Self> {
        let fs = (0..m)
            .map(|i| {
                let mut e = vec![0.0; m];
                e[i] = 1.0;
                e
            })
            .collect();
        Self::new(fs, delta)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn functionals(&self) -> &[Vec<f64>] {
        &self.functionals
    }

    pub fn contains_offset(&self, y: &[f64]) -> bool {
        let lim = self.delta * (1.0 + RADIUS_TOL);
        self.functionals.iter().all(|xi| xi.iter().zip(y).map(|(a, b)| a * b).sum::<f64>().abs() <= lim)
    }
}

fn grid_bounds(grid: &Grid) -> BoxRegion {
    let lo = (0..grid.dim()).map(|i| grid.axis(i)[0]).collect();
    let hi = (0..grid.dim()).map(|i| *grid.axis(i).last().unwrap()).collect();
    BoxRegion::new(lo, hi).expect("grid bounds")
}

/// `sup |F(t) - F(u)|` over `t` on the K grid and `u` on the `B_nu` grid
/// with `u - t` in the weak neighbourhood.
pub fn weak_modulus(f: &VectorFunction, k: &Grid, nbhd: &WeakNeighborhood, b_nu: &Grid) -> Result<f64> {
    if k.is_empty() || b_nu.is_empty() {
        return Err(Error::Config("empty grid".into()));
    }
    if nbhd.functionals[0].len() != k.dim() {
        return Err(Error::Dimension { expected: k.dim(), got: nbhd.functionals[0].len() });
    }
    if !grid_bounds(b_nu).contains_box(&grid_bounds(k)) {
        return Err(Error::Config("B_nu must contain K".into()));
    }
    let t_pts = k.points();
    let u_pts = b_nu.points();
    let ft = Sampled::new(f, k)?;
    let fu = Sampled::new(f, b_nu)?;
    let per_t = k.execution().map_range(t_pts.len(), |i| {
        let t = &t_pts[i];
        let mut best: f64 = 0.0;
        let mut y = vec![0.0; t.len()];
        for (j, u) in u_pts.iter().enumerate() {
            for ax in 0..y.len() {
                y[ax] = u[ax] - t[ax];
            }
            if nbhd.contains_offset(&y) {
                best = best.max(diff_norm(ft.at(i), fu.at(j)));
            }
        }
        best
    });
    Ok(per_t.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::ScalarFunction;

    fn scalar(label: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> VectorFunction {
        VectorFunction::from_scalar(ScalarFunction::new(label, move |u| f(u[0])))
    }

    fn unit(res: usize) -> Grid {
        BoxRegion::cube(1, 0.0, 1.0).unwrap().grid(res).unwrap()
    }

    /// Pairwise brute force, independent of the offset profile.
    fn brute(f: &VectorFunction, grid: &Grid, delta: f64, norm: Norm) -> f64 {
        let pts = grid.points();
        let mut best: f64 = 0.0;
        for t in &pts {
            for u in &pts {
                let d = norm.of(t.iter().zip(u).map(|(a, b)| a - b));
                if d <= delta * (1.0 + 1e-9) {
                    best = best.max(diff_norm(&f.eval(t), &f.eval(u)));
                }
            }
        }
        best
    }

    #[test]
    fn constant_has_zero_modulus() {
        let c = VectorFunction::constant(vec![2.0, -1.0]).unwrap();
        for d in [0.01, 0.1, 1.0] {
            assert_eq!(modulus_of_continuity(&c, &unit(201), d).unwrap(), 0.0);
        }
    }

    #[test]
    fn identity_and_square_on_unit_interval() {
        let id = scalar("u", |x| x);
        let w = modulus_of_continuity(&id, &unit(201), 0.1).unwrap();
        assert!((w - 0.1).abs() < 1e-12, "{w}");
        assert!((w - brute(&id, &unit(201), 0.1, Norm::Euclidean)).abs() < 1e-15);
        let sq = scalar("u^2", |x| x * x);
        let w = modulus_of_continuity(&sq, &unit(201), 0.1).unwrap();
        assert!((w - 0.19).abs() < 1e-12, "{w}");
    }

    #[test]
    fn profile_matches_brute_force_in_2d() {
        let f = VectorFunction::new("v", 2, |u| vec![u[0] * u[1], (u[0] - u[1]).sin()]).unwrap();
        let grid = BoxRegion::from_intervals(&[(0.0, 1.0), (-1.0, 0.5)]).unwrap().grid(9).unwrap();
        let prof_e = ModulusProfile::new(&f, &grid, Norm::Euclidean, None).unwrap();
        let prof_m = ModulusProfile::new(&f, &grid, Norm::Max, None).unwrap();
        for delta in [0.1, 0.13, 0.2, 0.5, 1.0, 3.0] {
            assert!((prof_e.at(delta) - brute(&f, &grid, delta, Norm::Euclidean)).abs() < 1e-15);
            assert!((prof_m.at(delta) - brute(&f, &grid, delta, Norm::Max)).abs() < 1e-15);
        }
    }

    #[test]
    fn covering_rounds_radius_up() {
        let id = scalar("u", |x| x);
        let prof = ModulusProfile::new(&id, &unit(201), Norm::Euclidean, None).unwrap();
        assert_eq!(prof.at(0.001), 0.0);
        assert!((prof.covering(0.001) - 0.005).abs() < 1e-15);
        assert!((prof.covering(0.05) - prof.at(0.05)).abs() < 1e-15);
        assert!(prof.covering(0.0501) > prof.at(0.0501));
    }

    #[test]
    fn weak_modulus_1d_coordinate() {
        let id = scalar("u", |x| x);
        let nb = WeakNeighborhood::coordinate(1, 0.1).unwrap();
        let w = weak_modulus(&id, &unit(201), &nb, &unit(201)).unwrap();
        assert!((w - 0.1).abs() < 1e-12);
        let c = VectorFunction::constant(vec![3.0]).unwrap();
        assert_eq!(weak_modulus(&c, &unit(21), &nb, &unit(21)).unwrap(), 0.0);
    }

    #[test]
    fn weak_modulus_requires_b_to_contain_k() {
        let id = scalar("u", |x| x);
        let nb = WeakNeighborhood::coordinate(1, 0.1).unwrap();
        let small = BoxRegion::cube(1, 0.2, 0.8).unwrap().grid(11).unwrap();
        assert!(matches!(weak_modulus(&id, &unit(11), &nb, &small), Err(Error::Config(_))));
    }

    #[test]
    fn neighbourhood_validation() {
        assert!(WeakNeighborhood::new(vec![], 0.1).is_err());
        assert!(WeakNeighborhood::new(vec![vec![1.0]], 0.0).is_err());
        assert!(WeakNeighborhood::new(vec![vec![1.0], vec![1.0, 0.0]], 0.1).is_err());
    }

    #[test]
    fn undefined_target_is_reported() {
        let f = scalar("ln", f64::ln);
        let grid = BoxRegion::cube(1, -1.0, 1.0).unwrap().grid(5).unwrap();
        assert!(matches!(modulus_of_continuity(&f, &grid, 0.5), Err(Error::Evaluation { .. })));
    }
}
