//! Convex domains in R^m, the compact pieces K and K1 inside them, and the
//! tensor grids used to sample them.

use crate::error::{Error, Result};
use crate::par::Execution;

/// Default number of grid points per axis.
pub const DEFAULT_RESOLUTION: usize = 201;

/// A closed interval on one axis; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Input(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn real_line() -> Self {
        Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Compact axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::Input("box must have at least one axis".into()));
        }
        if lo.len() != hi.len() {
            return Err(Error::Dimension { expected: lo.len(), got: hi.len() });
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !a.is_finite() || !b.is_finite() || a > b {
                return Err(Error::Input(format!("invalid box side [{a}, {b}]")));
            }
        }
        Ok(BoxRegion { lo, hi })
    }

    pub fn from_intervals(sides: &[(f64, f64)]) -> Result<Self> {
        Self::new(sides.iter().map(|s| s.0).collect(), sides.iter().map(|s| s.1).collect())
    }

    /// `[lo, hi]^dim`
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| *a <= *x && *x <= *b)
    }

    pub fn contains_box(&self, other: &BoxRegion) -> bool {
        other.dim() == self.dim()
            && (0..self.dim()).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    /// Smallest box containing both.
    pub fn hull(&self, other: &BoxRegion) -> BoxRegion {
        BoxRegion {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    pub fn grid(&self, resolution: usize) -> Result<Grid> {
        Grid::new(self, resolution)
    }
}

/// Tensor-product grid over a box, row-major with the last axis fastest.
#[derive(Debug, Clone)]
pub struct Grid {
    coords: Vec<Vec<f64>>,
    spacing: Vec<f64>,
    execution: Execution,
}

impl Grid {
    pub fn new(region: &BoxRegion, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::Config("grid resolution must be positive".into()));
        }
        let mut coords = Vec::with_capacity(region.dim());
        let mut spacing = Vec::with_capacity(region.dim());
        for (&a, &b) in region.lo.iter().zip(&region.hi) {
            if a == b || resolution == 1 {
                coords.push(vec![if a == b { a } else { 0.5 * (a + b) }]);
                spacing.push(0.0);
                continue;
            }
            let h = (b - a) / (resolution - 1) as f64;
            let mut axis: Vec<f64> = (0..resolution).map(|i| a + i as f64 * h).collect();
            axis[resolution - 1] = b;
            coords.push(axis);
            spacing.push(h);
        }
        Ok(Grid { coords, spacing, execution: Execution::default() })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.coords.iter().map(Vec::len).collect()
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn axis(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    pub fn len(&self) -> usize {
        self.coords.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of a flat index.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for ax in (0..self.dim()).rev() {
            let n = self.coords[ax].len();
            idx[ax] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.coords).fold(0, |acc, (&i, c)| acc * c.len() + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat).iter().enumerate().map(|(ax, &i)| self.coords[ax][i]).collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainShape {
    Box,
    HalfLineProduct,
    FullSpace,
}

/// The convex set X together with the compact K and the inner K1.
#[derive(Debug, Clone)]
pub struct Domain {
    axes: Vec<Interval>,
    k: BoxRegion,
    k1: BoxRegion,
    grid_resolution: usize,
    truncation_radius: Option<f64>,
}

impl Domain {
    pub fn new(axes: Vec<Interval>, k: BoxRegion, k1: BoxRegion) -> Result<Self> {
        let m = axes.len();
        if m == 0 {
            return Err(Error::Input("domain needs at least one axis".into()));
        }
        if k.dim() != m {
            return Err(Error::Dimension { expected: m, got: k.dim() });
        }
        if k1.dim() != m {
            return Err(Error::Dimension { expected: m, got: k1.dim() });
        }
        for (i, axis) in axes.iter().enumerate() {
            if !(axis.contains(k.lo[i]) && axis.contains(k.hi[i])) {
                return Err(Error::Config(format!("K is not contained in the domain on axis {}", i + 1)));
            }
        }
        if !k.contains_box(&k1) {
            return Err(Error::Config("K1 is not contained in K".into()));
        }
        let d = Domain { axes, k, k1, grid_resolution: DEFAULT_RESOLUTION, truncation_radius: None };
        if !d.is_bounded_mode() && !d.k1_is_interior() {
            return Err(Error::Config("K1 must lie in the interior of K".into()));
        }
        Ok(d)
    }

    /// Bounded mode: X = K, no growth control needed. K1 is set to K.
    pub fn bounded(k: BoxRegion) -> Self {
        let axes = k.lo.iter().zip(&k.hi).map(|(&lo, &hi)| Interval { lo, hi }).collect();
        Domain { axes, k1: k.clone(), k, grid_resolution: DEFAULT_RESOLUTION, truncation_radius: None }
    }

    pub fn with_resolution(mut self, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::Config("grid resolution must be positive".into()));
        }
        self.grid_resolution = resolution;
        Ok(self)
    }

    pub fn with_truncation_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("truncation radius must be positive, got {radius}")));
        }
        self.truncation_radius = Some(radius);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Interval] {
        &self.axes
    }

    pub fn k(&self) -> &BoxRegion {
        &self.k
    }

    pub fn k1(&self) -> &BoxRegion {
        &self.k1
    }

    pub fn grid_resolution(&self) -> usize {
        self.grid_resolution
    }

    pub fn truncation_radius(&self) -> Option<f64> {
        self.truncation_radius
    }

    pub fn shape(&self) -> DomainShape {
        if self.axes.iter().all(Interval::is_bounded) {
            DomainShape::Box
        } else if self.axes.iter().all(|a| !a.lo.is_finite() && !a.hi.is_finite()) {
            DomainShape::FullSpace
        } else {
            DomainShape::HalfLineProduct
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.shape() == DomainShape::Box
    }

    /// X coincides with K.
    pub fn is_bounded_mode(&self) -> bool {
        self.is_bounded() && (0..self.dim()).all(|i| self.axes[i].lo == self.k.lo[i] && self.axes[i].hi == self.k.hi[i])
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && p.iter().zip(&self.axes).all(|(x, a)| a.contains(*x))
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: p.len() });
        }
        if !self.contains(p) {
            return Err(Error::Domain { point: p.to_vec(), region: "the domain" });
        }
        Ok(())
    }

    pub fn check_in_k(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: p.len() });
        }
        if !self.k.contains(p) {
            return Err(Error::Domain { point: p.to_vec(), region: "K" });
        }
        Ok(())
    }

    /// K1 lies strictly inside K on every axis where K has positive width.
    /// In one dimension with X a closed half-line, K1 may share the finite
    /// endpoint of X with K.
    pub fn k1_is_interior(&self) -> bool {
        let half_line_1d = |i: usize| self.dim() == 1 && !self.axes[i].is_bounded();
        (0..self.dim()).all(|i| {
            let (klo, khi, lo1, hi1) = (self.k.lo[i], self.k.hi[i], self.k1.lo[i], self.k1.hi[i]);
            if klo == khi {
                return lo1 == klo && hi1 == khi;
            }
            let lo_ok = klo < lo1 || (half_line_1d(i) && klo == self.axes[i].lo && lo1 == klo);
            let hi_ok = hi1 < khi || (half_line_1d(i) && khi == self.axes[i].hi && hi1 == khi);
            lo_ok && hi_ok
        })
    }

    /// Interior of K relative to X: faces of K lying on the boundary of X
    /// count as interior.
    pub fn in_relative_interior_of_k(&self, p: &[f64]) -> bool {
        (0..self.dim()).all(|i| {
            let x = p[i];
            let lo_ok = self.k.lo[i] < x || (x == self.k.lo[i] && self.k.lo[i] == self.axes[i].lo);
            let hi_ok = x < self.k.hi[i] || (x == self.k.hi[i] && self.k.hi[i] == self.axes[i].hi);
            lo_ok && hi_ok
        })
    }

    /// X intersected with `[-r, r]^m`, widened to contain K.
    pub fn truncated(&self, radius: f64) -> BoxRegion {
        let lo = self.axes.iter().zip(&self.k.lo).map(|(a, &k)| a.lo.max(-radius).min(k)).collect();
        let hi = self.axes.iter().zip(&self.k.hi).map(|(a, &k)| a.hi.min(radius).max(k)).collect();
        BoxRegion { lo, hi }
    }

    pub fn k_grid(&self) -> Result<Grid> {
        self.k.grid(self.grid_resolution)
    }

    pub fn k1_grid(&self) -> Result<Grid> {
        self.k1.grid(self.grid_resolution)
    }
}
