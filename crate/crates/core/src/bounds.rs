//! Certified pointwise and uniform error bounds for `L_n(F)`.
//!
//! All bounds split `|L(F)(t) - F(t)|` into the defect on constants, a
//! modulus-of-continuity term driven by the second moment
//! `gamma^2(t) = S(|. - t|^2)(t)` and, on unbounded domains, a growth term
//! `M S(h(t, .))(t)`.

use std::fmt;

use crate::domain::{BoxRegion, Domain, Grid};
use crate::error::{Error, Result};
use crate::function::{norm, ScalarFunction, VectorFunction};
use crate::growth::{growth_certificate, truncation_region, GrowthFunction, GROWTH_RATIO_LIMIT};
use crate::modulus::{ModulusProfile, Norm};
use crate::operators::{AtomSet, OperatorPair};
use crate::par::{argmax, Execution};

/// Slack on `measured <= bound`.
pub const VALIDITY_TOL: f64 = 1e-9;
/// Tolerance for deciding that `S(1) = 1` and `S(pr_i) = pr_i` hold.
pub const PRESERVATION_TOL: f64 = 1e-12;
/// Largest grid used for the modulus on the hull of atom nodes.
const MAX_HULL_RESOLUTION: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Delta {
    /// `delta = gamma(t)` pointwise, `max gamma` for uniform bounds.
    Auto,
    Fixed(f64),
}

impl Delta {
    fn validate(self) -> Result<Self> {
        match self {
            Delta::Fixed(d) if !(d > 0.0 && d.is_finite()) => Err(Error::Input(format!("delta must be positive, got {d}"))),
            _ => Ok(self),
        }
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delta::Auto => f.write_str("auto"),
            Delta::Fixed(d) => write!(f, "{d}"),
        }
    }
}

/// Which inequality produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundForm {
    /// `c + omega(delta) (S1 + gamma^2 / delta^2)`
    ShishaMond,
    /// Same shape with suprema over K.
    Uniform,
    /// `c + omega(delta) (S1 + gamma^2 / delta^2) + M S(h)`
    Growth,
    /// `2 omega(gamma) + M S(h)` for constant-preserving pairs.
    GrowthConstants,
    /// `2 omega(gamma) + M (S(g) - g(t))` when linear functionals are kept.
    GrowthLinear,
}

impl fmt::Display for BoundForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundForm::ShishaMond => "shisha-mond",
            BoundForm::Uniform => "uniform",
            BoundForm::Growth => "growth",
            BoundForm::GrowthConstants => "growth-constants",
            BoundForm::GrowthLinear => "growth-linear",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundComponents {
    /// `|L(F(t))(t) - F(t)|`
    pub const_defect: f64,
    pub omega: f64,
    /// Absent when `gamma = 0` made the modulus term vanish.
    pub delta: Option<f64>,
    pub s1: f64,
    pub gamma_sq: f64,
    pub m: Option<f64>,
    pub snh: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub label: String,
    /// Evaluation point; for uniform bounds, the point of largest error.
    pub t: Vec<f64>,
    pub n: u64,
    pub bound: f64,
    pub measured: f64,
    pub components: BoundComponents,
    pub form: BoundForm,
    pub valid: bool,
}

impl BoundReport {
    fn assemble(label: &str, t: Vec<f64>, n: u64, measured: f64, components: BoundComponents, form: BoundForm) -> Self {
        let mut r = BoundReport { label: label.to_string(), t, n, bound: 0.0, measured, components, form, valid: false };
        r.bound = r.reconstruct();
        r.valid = r.measured <= r.bound + VALIDITY_TOL;
        r
    }

    /// Recomputes the bound from the stored components.
    pub fn reconstruct(&self) -> f64 {
        let c = &self.components;
        let growth = c.m.unwrap_or(0.0) * c.snh.unwrap_or(0.0);
        let modulus = match c.delta {
            None => 0.0,
            Some(d) => c.omega * (c.s1 + c.gamma_sq / (d * d)),
        };
        match self.form {
            BoundForm::ShishaMond | BoundForm::Uniform => c.const_defect + modulus,
            BoundForm::Growth => c.const_defect + modulus + growth,
            BoundForm::GrowthConstants | BoundForm::GrowthLinear => {
                let omega = if c.delta.is_some() { c.omega } else { 0.0 };
                2.0 * omega + growth
            }
        }
    }

    pub fn csv_header(dim: usize) -> Vec<String> {
        let mut h = vec!["label".to_string(), "n".to_string()];
        if dim == 1 {
            h.push("t".into());
        } else {
            h.extend((1..=dim).map(|i| format!("t{i}")));
        }
        h.extend(
            ["bound", "measured", "valid", "const_defect", "omega", "delta", "s1", "gamma_sq", "M", "snh"]
                .iter()
                .map(|s| s.to_string()),
        );
        h
    }

    pub fn csv_record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(crate::format_number).unwrap_or_default();
        let c = &self.components;
        let mut r = vec![self.label.clone(), self.n.to_string()];
        r.extend(self.t.iter().map(|&x| crate::format_number(x)));
        r.extend([
            crate::format_number(self.bound),
            crate::format_number(self.measured),
            self.valid.to_string(),
            crate::format_number(c.const_defect),
            crate::format_number(c.omega),
            opt(c.delta),
            crate::format_number(c.s1),
            crate::format_number(c.gamma_sq),
            opt(c.m),
            opt(c.snh),
        ]);
        r
    }
}

/// Grid settings behind a growth constant.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeta {
    pub resolution: usize,
    pub truncation: BoxRegion,
    pub sample_points: usize,
    pub k1_points: usize,
}

/// Empirical constant `M` with `|F(t) - F(u)| <= M h(t, u)` for `t` in K1
/// and `u` outside the relative interior of K.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthConstant {
    pub m: f64,
    /// Sublevel index: `u` is far when `g(u) > nu`.
    pub nu: f64,
    pub far_ratio_max: f64,
    pub mid_ratio_max: f64,
    /// `(t, u)` attaining `m`, if any pair was examined.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
    /// `max |F| / g` on the sample.
    pub growth_ratio: f64,
    /// `max |u - c|^2 / g(u)` on the sample, `c` the centre of K.
    pub psi_ratio: f64,
    pub grid_meta: GridMeta,
}

/// How the sublevel index is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuPolicy {
    /// Far points must satisfy `h(t, u) >= (1 - epsilon) g(u)`.
    pub epsilon: f64,
    pub max_doublings: usize,
}

impl Default for NuPolicy {
    fn default() -> Self {
        NuPolicy { epsilon: 0.5, max_doublings: 64 }
    }
}

struct PairMax {
    ratio: f64,
    witness: Option<(usize, usize)>,
}

#[allow(clippy::too_many_arguments)]
fn max_ratio(
    exec: Execution,
    k1: &[Vec<f64>],
    f_k1: &[Vec<f64>],
    gt: &[(f64, Vec<f64>)],
    us: &[usize],
    sample: &[Vec<f64>],
    f_sample: &[Vec<f64>],
    g: &GrowthFunction,
) -> PairMax {
    let rows = exec.map_range(k1.len(), |i| {
        let t = &k1[i];
        let (g_t, grad_t) = &gt[i];
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for &j in us {
            let u = &sample[j];
            let h = g.gap_with(t, *g_t, grad_t, u);
            let num = norm(&f_k1[i].iter().zip(&f_sample[j]).map(|(a, b)| a - b).collect::<Vec<_>>());
            if h <= 0.0 {
                if num > 0.0 {
                    return (f64::INFINITY, j);
                }
                continue;
            }
            let r = num / h;
            if r > best.0 {
                best = (r, j);
            }
        }
        best
    });
    let ratios: Vec<f64> = rows.iter().map(|r| r.0).collect();
    match argmax(&ratios) {
        Some((i, r)) if r > f64::NEG_INFINITY => PairMax { ratio: r, witness: Some((i, rows[i].1)) },
        _ => PairMax { ratio: 0.0, witness: None },
    }
}

/// Estimates the growth constant by maximising `|F(t) - F(u)| / h(t, u)`
/// on grids of K1 and of the truncated domain.
pub fn estimate_m(f: &VectorFunction, g: &GrowthFunction, domain: &Domain, policy: NuPolicy) -> Result<GrowthConstant> {
    if !(policy.epsilon > 0.0 && policy.epsilon < 1.0) {
        return Err(Error::Input(format!("epsilon must lie in (0, 1), got {}", policy.epsilon)));
    }
    if f.codim() == 0 {
        return Err(Error::Input("target has no components".into()));
    }
    let res = domain.grid_resolution();
    let region = truncation_region(g, domain)?;
    let mut sample = region.grid(res)?.points();
    sample.extend(domain.k_grid()?.points());
    let exec = Execution::default();

    let cert = growth_certificate(f, g, &sample)?;
    let centre = domain.k().center();
    let psi = VectorFunction::from_scalar(ScalarFunction::psi_sq_at(centre));
    let psi_cert = growth_certificate(&psi, g, &sample)?;

    let k1 = domain.k1_grid()?.points();
    let f_k1 = exec.try_map(&k1, |t| f.eval_checked(t))?;
    let f_sample = exec.try_map(&sample, |u| f.eval_checked(u))?;
    let g_sample: Vec<f64> = sample.iter().map(|u| g.value(u)).collect();
    let gt: Vec<(f64, Vec<f64>)> = k1.iter().map(|t| (g.value(t), g.gradient(t))).collect();

    let k_max = domain.k_grid()?.points().iter().map(|u| g.value(u)).fold(f64::NEG_INFINITY, f64::max);
    let nu0 = k_max.ceil().max(1.0);
    let mut nu = nu0;
    let mut doublings = 0;
    let far = loop {
        let far: Vec<usize> = (0..sample.len()).filter(|&j| g_sample[j] > nu).collect();
        if far.is_empty() {
            if nu == nu0 {
                break far;
            }
            return Err(Error::Truncation { radius: region.hi().iter().chain(region.lo()).fold(0.0, |a, x| a.max(x.abs())) });
        }
        let keep = 1.0 - policy.epsilon;
        let ok = exec
            .map_range(k1.len(), |i| {
                let (g_t, grad_t) = &gt[i];
                far.iter().all(|&j| g.gap_with(&k1[i], *g_t, grad_t, &sample[j]) >= keep * g_sample[j])
            })
            .into_iter()
            .all(|b| b);
        if ok {
            break far;
        }
        doublings += 1;
        if doublings > policy.max_doublings {
            return Err(Error::Truncation { radius: region.hi().iter().chain(region.lo()).fold(0.0, |a, x| a.max(x.abs())) });
        }
        nu *= 2.0;
    };
    let mid: Vec<usize> = (0..sample.len())
        .filter(|&j| g_sample[j] <= nu && !domain.in_relative_interior_of_k(&sample[j]))
        .collect();

    let far_max = max_ratio(exec, &k1, &f_k1, &gt, &far, &sample, &f_sample, g);
    let mid_max = max_ratio(exec, &k1, &f_k1, &gt, &mid, &sample, &f_sample, g);
    for pm in [&far_max, &mid_max] {
        if !pm.ratio.is_finite() {
            let (_, j) = pm.witness.expect("witness for infinite ratio");
            return Err(Error::Growth { ratio: pm.ratio, witness: sample[j].clone(), limit: GROWTH_RATIO_LIMIT });
        }
    }
    let (m, best) = if far_max.ratio >= mid_max.ratio { (far_max.ratio, &far_max) } else { (mid_max.ratio, &mid_max) };
    Ok(GrowthConstant {
        m,
        nu,
        far_ratio_max: far_max.ratio,
        mid_ratio_max: mid_max.ratio,
        witness: best.witness.map(|(i, j)| (k1[i].clone(), sample[j].clone())),
        growth_ratio: cert.max_ratio,
        psi_ratio: psi_cert.max_ratio,
        grid_meta: GridMeta { resolution: res, truncation: region, sample_points: sample.len(), k1_points: k1.len() },
    })
}

/// Per-point quantities shared by every bound.
struct PointData {
    set: AtomSet,
    measured: f64,
    const_defect: f64,
    s1: f64,
    gamma_sq: f64,
}

fn point_data(pair: &OperatorPair, f: &VectorFunction, t: &[f64]) -> Result<PointData> {
    let set = pair.atoms_at(t)?;
    let f_t = f.eval_checked(t)?;
    let lf = set.apply_l(f)?;
    let measured = norm(&lf.iter().zip(&f_t).map(|(a, b)| a - b).collect::<Vec<_>>());
    let c = VectorFunction::constant(f_t.clone())?;
    let lc = set.apply_l(&c)?;
    let const_defect = norm(&lc.iter().zip(&f_t).map(|(a, b)| a - b).collect::<Vec<_>>());
    Ok(PointData { s1: set.mass(), gamma_sq: set.gamma_sq(t), set, measured, const_defect })
}

/// `|L(F)(t) - F(t)|`
pub fn measured_error(pair: &OperatorPair, f: &VectorFunction, t: &[f64]) -> Result<f64> {
    Ok(point_data(pair, f, t)?.measured)
}

/// Errors at every point and their supremum with its location.
pub fn measured_errors(pair: &OperatorPair, f: &VectorFunction, points: &[Vec<f64>]) -> Result<(Vec<f64>, f64, Option<usize>)> {
    let errs = Execution::default().try_map(points, |t| measured_error(pair, f, t))?;
    let (i, sup) = argmax(&errs).map(|(i, v)| (Some(i), v)).unwrap_or((None, 0.0));
    Ok((errs, sup, i))
}

/// Bound evaluator for one pair and one target; holds the modulus of the
/// target on K so repeated queries are cheap.
pub struct BoundEstimator<'a> {
    pair: &'a OperatorPair,
    f: &'a VectorFunction,
    k_profile: ModulusProfile,
    max_delta: f64,
}

impl<'a> BoundEstimator<'a> {
    /// Supports radii up to `max_delta` (`None`: every radius in K).
    pub fn new(pair: &'a OperatorPair, f: &'a VectorFunction, max_delta: Option<f64>) -> Result<Self> {
        let grid = pair.domain().k_grid()?;
        let reach = max_delta.map(|d| d + diagonal(&grid));
        let k_profile = ModulusProfile::new(f, &grid, Norm::Euclidean, reach)?;
        Ok(BoundEstimator { pair, f, k_profile, max_delta: max_delta.unwrap_or(f64::INFINITY) })
    }

    /// Grid modulus on K, rounded up to the grid.
    pub fn omega(&self, delta: f64) -> Result<f64> {
        if delta > self.max_delta * (1.0 + 1e-12) {
            return Err(Error::Input(format!("delta {delta} exceeds the estimator radius {}", self.max_delta)));
        }
        Ok(self.k_profile.covering(delta))
    }

    fn modulus_term(&self, delta: Delta, gamma_sq: f64) -> Result<(f64, Option<f64>)> {
        match delta.validate()? {
            Delta::Fixed(d) => Ok((self.omega(d)?, Some(d))),
            Delta::Auto if gamma_sq > 0.0 => {
                let d = gamma_sq.sqrt();
                Ok((self.omega(d)?, Some(d)))
            }
            Delta::Auto => Ok((0.0, None)),
        }
    }

    /// Pointwise bound for `X = K`.
    pub fn shisha_mond(&self, t: &[f64], delta: Delta) -> Result<BoundReport> {
        if !self.pair.domain().is_bounded_mode() {
            return Err(Error::Mode);
        }
        let delta = delta.validate()?;
        let p = point_data(self.pair, self.f, t)?;
        let (omega, delta) = self.modulus_term(delta, p.gamma_sq)?;
        let components = BoundComponents {
            const_defect: p.const_defect,
            omega,
            delta,
            s1: p.s1,
            gamma_sq: p.gamma_sq,
            m: None,
            snh: None,
        };
        Ok(BoundReport::assemble(self.pair.label(), t.to_vec(), self.pair.n(), p.measured, components, BoundForm::ShishaMond))
    }

    /// Every applicable growth-controlled bound at `t` in K1, in the order
    /// general, constant-preserving, linear-preserving.
    pub fn growth_forms(&self, g: &GrowthFunction, t: &[f64], delta: Delta, m: &GrowthConstant) -> Result<Vec<BoundReport>> {
        let domain = self.pair.domain();
        if !domain.k1_is_interior() {
            return Err(Error::Config("K1 must lie in the interior of K".into()));
        }
        if t.len() != domain.dim() {
            return Err(Error::Dimension { expected: domain.dim(), got: t.len() });
        }
        if !domain.k1().contains(t) {
            return Err(Error::Domain { point: t.to_vec(), region: "K1" });
        }
        let delta = delta.validate()?;
        let p = point_data(self.pair, self.f, t)?;
        let mom = p.set.growth_moments(g, t)?;
        let label = self.pair.label();
        let n = self.pair.n();

        let (omega, d) = self.modulus_term(delta, p.gamma_sq)?;
        let mut out = vec![BoundReport::assemble(
            label,
            t.to_vec(),
            n,
            p.measured,
            BoundComponents {
                const_defect: p.const_defect,
                omega,
                delta: d,
                s1: p.s1,
                gamma_sq: p.gamma_sq,
                m: Some(m.m),
                snh: Some(mom.snh_direct),
            },
            BoundForm::Growth,
        )];

        let keeps_constants = self.pair.family().flags().constant_preserving && (p.s1 - 1.0).abs() <= PRESERVATION_TOL;
        if keeps_constants {
            let (omega, d) = self.modulus_term(Delta::Auto, p.gamma_sq)?;
            let base = BoundComponents {
                const_defect: p.const_defect,
                omega,
                delta: d,
                s1: p.s1,
                gamma_sq: p.gamma_sq,
                m: Some(m.m),
                snh: Some(mom.snh_direct),
            };
            out.push(BoundReport::assemble(label, t.to_vec(), n, p.measured, base.clone(), BoundForm::GrowthConstants));
            let keeps_linear = mom
                .s_proj
                .iter()
                .zip(t)
                .all(|(s, x)| (s - x).abs() <= PRESERVATION_TOL * (1.0 + x.abs()));
            if keeps_linear {
                let snh = mom.snh_expanded();
                out.push(BoundReport::assemble(
                    label,
                    t.to_vec(),
                    n,
                    p.measured,
                    BoundComponents { snh: Some(snh), ..base },
                    BoundForm::GrowthLinear,
                ));
            }
        }
        Ok(out)
    }

    /// Tightest applicable growth-controlled bound at `t`.
    pub fn growth(&self, g: &GrowthFunction, t: &[f64], delta: Delta, m: &GrowthConstant) -> Result<BoundReport> {
        let forms = self.growth_forms(g, t, delta, m)?;
        let bounds: Vec<f64> = forms.iter().map(|r| -r.bound).collect();
        let (i, _) = argmax(&bounds).expect("at least one form");
        Ok(forms.into_iter().nth(i).expect("index in range"))
    }
}

fn diagonal(grid: &Grid) -> f64 {
    grid.spacing().iter().map(|h| h * h).sum::<f64>().sqrt()
}

/// Pointwise bound for `X = K` with `delta` fixed or `gamma(t)`.
pub fn shisha_mond_bound(pair: &OperatorPair, f: &VectorFunction, t: &[f64], delta: Delta) -> Result<BoundReport> {
    let radius = match delta.validate()? {
        Delta::Fixed(d) => d,
        Delta::Auto => pair.gamma_sq(t)?.sqrt(),
    };
    BoundEstimator::new(pair, f, Some(radius))?.shisha_mond(t, delta)
}

/// Growth-controlled bound at `t` in K1, choosing the tightest form.
pub fn growth_bound(
    pair: &OperatorPair,
    f: &VectorFunction,
    g: &GrowthFunction,
    t: &[f64],
    delta: Delta,
    m: &GrowthConstant,
) -> Result<BoundReport> {
    let gamma = pair.gamma_sq(t)?.sqrt();
    let radius = match delta.validate()? {
        Delta::Fixed(d) => d.max(gamma),
        Delta::Auto => gamma,
    };
    BoundEstimator::new(pair, f, Some(radius))?.growth(g, t, delta, m)
}

/// Uniform bound over the K grid: `sup c + omega(max gamma) (sup S1 + 1)`.
///
/// The modulus is taken over K when X = K and otherwise over the smallest
/// box holding K and every atom node used on the K grid.
pub fn uniform_bound(pair: &OperatorPair, f: &VectorFunction) -> Result<BoundReport> {
    let domain = pair.domain();
    let k_grid = domain.k_grid()?;
    let points = k_grid.points();
    let exec = k_grid.execution();
    let data = exec.try_map(&points, |t| point_data(pair, f, t))?;

    let measured: Vec<f64> = data.iter().map(|p| p.measured).collect();
    let (worst, sup_err) = argmax(&measured).ok_or_else(|| Error::Config("empty K grid".into()))?;
    let sup = |sel: fn(&PointData) -> f64| data.iter().map(sel).fold(0.0, f64::max);
    let gamma_sq = sup(|p| p.gamma_sq);
    let s1 = sup(|p| p.s1);
    let const_defect = sup(|p| p.const_defect);

    let (omega, delta) = if gamma_sq > 0.0 {
        let d = gamma_sq.sqrt();
        let (grid, reach) = if domain.is_bounded_mode() {
            (k_grid.clone(), d + diagonal(&k_grid))
        } else {
            let mut hull = domain.k().clone();
            for p in &data {
                for a in &p.set.atoms {
                    let node = BoxRegion::new(a.node.clone(), a.node.clone())?;
                    hull = hull.hull(&node);
                }
            }
            let k_width = domain.k().hi().iter().zip(domain.k().lo()).map(|(h, l)| h - l).fold(0.0, f64::max);
            let h_width = hull.hi().iter().zip(hull.lo()).map(|(h, l)| h - l).fold(0.0, f64::max);
            let scale = if k_width > 0.0 { h_width / k_width } else { 1.0 };
            let res = ((domain.grid_resolution() as f64 - 1.0) * scale).ceil() as usize + 1;
            let grid = hull.grid(res.min(MAX_HULL_RESOLUTION))?;
            let reach = d + diagonal(&grid);
            (grid, reach)
        };
        let profile = ModulusProfile::new(f, &grid, Norm::Euclidean, Some(reach))?;
        (profile.covering(d), Some(d))
    } else {
        (0.0, None)
    };
    let components = BoundComponents { const_defect, omega, delta, s1, gamma_sq, m: None, snh: None };
    Ok(BoundReport::assemble(pair.label(), points[worst].clone(), pair.n(), sup_err, components, BoundForm::Uniform))
}
