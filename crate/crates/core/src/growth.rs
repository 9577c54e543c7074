//! Growth functions `g`, their Bregman gap and the sublevel sets that
//! exhaust an unbounded domain.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{BoxRegion, Domain};
use crate::error::{Error, Result};
use crate::function::{dot, norm, VectorFunction};
use crate::par::argmax;

type Field = dyn Fn(&[f64]) -> f64 + Send + Sync;
type Gradient = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Ratios `|F(u)| / g(u)` above this are treated as a growth violation.
pub const GROWTH_RATIO_LIMIT: f64 = 1e6;
/// Hard cap on the truncation radius for unbounded domains.
pub const MAX_TRUNCATION_RADIUS: f64 = 50.0;

#[derive(Clone)]
pub struct GrowthFunction {
    g: Arc<Field>,
    grad: Arc<Gradient>,
    label: String,
}

impl fmt::Debug for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrowthFunction").field("label", &self.label).finish()
    }
}

impl GrowthFunction {
    pub fn new(
        label: impl Into<String>,
        g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        GrowthFunction { g: Arc::new(g), grad: Arc::new(grad), label: label.into() }
    }

    /// `1 + |u|^2`; its gap is exactly the squared distance.
    pub fn quadratic() -> Self {
        Self::new("1+|u|^2", |u| 1.0 + dot(u, u), |u| u.iter().map(|x| 2.0 * x).collect())
    }

    /// `exp(|u|^2 / 2)`
    pub fn gaussian() -> Self {
        Self::new(
            "exp(|u|^2/2)",
            |u| (0.5 * dot(u, u)).exp(),
            |u| {
                let e = (0.5 * dot(u, u)).exp();
                u.iter().map(|x| x * e).collect()
            },
        )
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "quadratic" => Some(Self::quadratic()),
            "gaussian" => Some(Self::gaussian()),
            _ => None,
        }
    }

    #[inline]
    pub fn value(&self, u: &[f64]) -> f64 {
        (self.g)(u)
    }

    #[inline]
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        (self.grad)(u)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `g(u) - g(t) - <g'(t), u - t>`, unchecked.
    pub fn gap(&self, t: &[f64], u: &[f64]) -> f64 {
        let grad = self.gradient(t);
        self.gap_with(t, self.value(t), &grad, u)
    }

    /// Gap with `g(t)` and `g'(t)` already evaluated.
    #[inline]
    pub fn gap_with(&self, t: &[f64], g_t: f64, grad_t: &[f64], u: &[f64]) -> f64 {
        let lin: f64 = grad_t.iter().zip(u.iter().zip(t)).map(|(d, (a, b))| d * (a - b)).sum();
        self.value(u) - g_t - lin
    }

    /// Membership in the sublevel set `{g <= level}`.
    pub fn sublevel_member(&self, level: f64, u: &[f64]) -> Result<bool> {
        if !(level > 0.0) {
            return Err(Error::Input(format!("sublevel index must be positive, got {level}")));
        }
        Ok(self.value(u) <= level)
    }

    /// Checks positivity, midpoint strict convexity, gradient consistency
    /// and, on unbounded domains, superlinear growth along rays.
    pub fn check_hypotheses(&self, domain: &Domain, seed: u64) -> Result<GrowthDiagnostics> {
        let region = truncation_region(self, domain)?;
        let samples = region.grid(domain.grid_resolution().min(41))?.points();
        let min_value = samples.iter().map(|u| self.value(u)).fold(f64::INFINITY, f64::min);
        if !(min_value > 0.0) {
            return Err(Error::Config(format!("{} is not strictly positive (min {min_value})", self.label)));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst_midpoint = f64::NEG_INFINITY;
        for _ in 0..MIDPOINT_PAIRS {
            let u: Vec<f64> = (0..region.dim()).map(|i| rng.gen_range(region.lo()[i]..=region.hi()[i])).collect();
            let v: Vec<f64> = (0..region.dim()).map(|i| rng.gen_range(region.lo()[i]..=region.hi()[i])).collect();
            if u == v {
                continue;
            }
            let mid: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 0.5 * (a + b)).collect();
            let avg = 0.5 * (self.value(&u) + self.value(&v));
            let excess = (self.value(&mid) - avg) / avg.abs().max(1.0);
            worst_midpoint = worst_midpoint.max(excess);
        }
        if worst_midpoint > CONVEXITY_TOL {
            return Err(Error::Config(format!("{} fails midpoint convexity by {worst_midpoint:e}", self.label)));
        }

        let k_points = domain.k().grid(domain.grid_resolution().min(41))?.points();
        let gradient_error = k_points.iter().map(|t| self.gradient_error(t)).fold(0.0, f64::max);
        if gradient_error > GRADIENT_TOL {
            return Err(Error::Config(format!(
                "gradient of {} disagrees with central differences (rel. error {gradient_error:e})",
                self.label
            )));
        }

        let ray_growth = if domain.is_bounded() { None } else { Some(self.ray_growth(domain)?) };
        Ok(GrowthDiagnostics { min_value, worst_midpoint, gradient_error, ray_growth, region })
    }

    fn gradient_error(&self, t: &[f64]) -> f64 {
        let grad = self.gradient(t);
        let mut worst: f64 = 0.0;
        let mut probe = t.to_vec();
        for i in 0..t.len() {
            let h = 6e-6 * t[i].abs().max(1.0);
            probe[i] = t[i] + h;
            let up = self.value(&probe);
            probe[i] = t[i] - h;
            let down = self.value(&probe);
            probe[i] = t[i];
            let fd = (up - down) / (2.0 * h);
            worst = worst.max((grad[i] - fd).abs() / grad[i].abs().max(1.0));
        }
        worst
    }

    /// Smallest ratio `g(p)/|p|` at the largest sampled radius over all
    /// recession rays. Fails if the ratio stops increasing.
    fn ray_growth(&self, domain: &Domain) -> Result<f64> {
        let m = domain.dim();
        let mut dirs = Vec::new();
        let mut diag = vec![0.0; m];
        for (i, ax) in domain.axes().iter().enumerate() {
            if ax.hi.is_infinite() {
                let mut d = vec![0.0; m];
                d[i] = 1.0;
                dirs.push(d);
                diag[i] = 1.0;
            }
            if ax.lo.is_infinite() {
                let mut d = vec![0.0; m];
                d[i] = -1.0;
                dirs.push(d);
                if diag[i] == 0.0 {
                    diag[i] = -1.0;
                }
            }
        }
        if diag.iter().filter(|x| **x != 0.0).count() > 1 {
            let n = norm(&diag);
            dirs.push(diag.iter().map(|x| x / n).collect());
        }
        let c = domain.k().center();
        let mut floor = f64::INFINITY;
        for d in &dirs {
            let ratios: Vec<f64> = (0..12)
                .map(|j| {
                    let r = 2f64.powi(j);
                    let p: Vec<f64> = c.iter().zip(d).map(|(a, b)| a + r * b).collect();
                    self.value(&p) / norm(&p)
                })
                .collect();
            let tail = &ratios[6..];
            let increasing = tail.windows(2).all(|w| w[1] > w[0] || w[1].is_infinite());
            let last = *tail.last().unwrap();
            if !increasing || !(last > 100.0) {
                return Err(Error::Config(format!(
                    "{} does not grow superlinearly along direction {d:?} (ratios {ratios:?})",
                    self.label
                )));
            }
            floor = floor.min(last);
        }
        Ok(floor)
    }
}

const MIDPOINT_PAIRS: usize = 1000;
const CONVEXITY_TOL: f64 = 1e-10;
const GRADIENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct GrowthDiagnostics {
    pub min_value: f64,
    pub worst_midpoint: f64,
    pub gradient_error: f64,
    pub ray_growth: Option<f64>,
    pub region: BoxRegion,
}

/// Gap `h(t, u)` with `t` required to lie in K.
pub fn bregman_gap(g: &GrowthFunction, domain: &Domain, t: &[f64], u: &[f64]) -> Result<f64> {
    domain.check_in_k(t)?;
    if u.len() != t.len() {
        return Err(Error::Dimension { expected: t.len(), got: u.len() });
    }
    Ok(g.gap(t, u))
}

/// Bounded region on which unbounded domains are sampled.
///
/// Bounded domains are returned unchanged. Otherwise an explicit radius
/// from the domain wins; failing that, the box grows around K until `g`
/// exceeds `10 * max_K g` on every face not lying on the boundary of X,
/// capped at `|u_i| <= 50`.
pub fn truncation_region(g: &GrowthFunction, domain: &Domain) -> Result<BoxRegion> {
    if domain.is_bounded() {
        let (lo, hi) = domain.axes().iter().map(|a| (a.lo, a.hi)).unzip();
        return BoxRegion::new(lo, hi);
    }
    if let Some(r) = domain.truncation_radius() {
        return Ok(domain.truncated(r));
    }
    let k_max = domain
        .k()
        .grid(domain.grid_resolution().min(41))?
        .points()
        .iter()
        .map(|u| g.value(u))
        .fold(f64::NEG_INFINITY, f64::max);
    let level = 10.0 * k_max;
    let center = domain.k().center();
    let boxed = |r: f64| -> BoxRegion {
        let lo = domain.axes().iter().zip(&center).zip(domain.k().lo()).map(|((a, c), k)| (c - r).max(a.lo).max(-MAX_TRUNCATION_RADIUS).min(*k)).collect();
        let hi = domain.axes().iter().zip(&center).zip(domain.k().hi()).map(|((a, c), k)| (c + r).min(a.hi).min(MAX_TRUNCATION_RADIUS).max(*k)).collect();
        BoxRegion::new(lo, hi).expect("truncation box")
    };
    let escapes = |r: f64| -> bool {
        let b = boxed(r);
        let grid = b.grid(21).expect("grid");
        grid.points().iter().all(|p| {
            let on_open_face = (0..p.len()).any(|i| {
                let ax = domain.axes()[i];
                (p[i] == b.lo()[i] && b.lo()[i] > ax.lo) || (p[i] == b.hi()[i] && b.hi()[i] < ax.hi)
            });
            !on_open_face || g.value(p) > level
        })
    };
    let mut hi_r = 1.0;
    while !escapes(hi_r) {
        hi_r *= 2.0;
        if hi_r > 2.0 * MAX_TRUNCATION_RADIUS {
            return Ok(boxed(hi_r));
        }
    }
    let mut lo_r = 0.0;
    for _ in 0..30 {
        let mid = 0.5 * (lo_r + hi_r);
        if escapes(mid) {
            hi_r = mid;
        } else {
            lo_r = mid;
        }
    }
    Ok(boxed(hi_r))
}

/// Empirical certificate that `|F| <= M g` on a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCertificate {
    pub max_ratio: f64,
    pub witness: Vec<f64>,
}

pub fn growth_certificate(f: &VectorFunction, g: &GrowthFunction, points: &[Vec<f64>]) -> Result<GrowthCertificate> {
    let ratios: Vec<f64> = points
        .iter()
        .map(|u| {
            let r = norm(&f.eval(u)) / g.value(u);
            if r.is_finite() { r } else { f64::INFINITY }
        })
        .collect();
    let (i, max_ratio) = argmax(&ratios).ok_or_else(|| Error::Config("empty sample for growth check".into()))?;
    if max_ratio > GROWTH_RATIO_LIMIT {
        return Err(Error::Growth { ratio: max_ratio, witness: points[i].clone(), limit: GROWTH_RATIO_LIMIT });
    }
    Ok(GrowthCertificate { max_ratio, witness: points[i].clone() })
}
