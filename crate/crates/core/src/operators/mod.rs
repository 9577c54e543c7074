//! Positive linear operators given extensionally as families of discrete
//! measures.
//!
//! For every evaluation point `t` a family yields a finite list of atoms
//! `(u_i, w_i)`. The scalar operator is `S(f)(t) = sum w_i f(u_i)`; the
//! vector operator `L` applies the same atoms to vector values, which makes
//! it `S`-regular and dominated by `S` whenever the weights are
//! nonnegative. Tabulated families may carry separate diagonal vector
//! weights for `L`; the checkers in [`checks`] verify the axioms on those.

use std::fmt;
use std::sync::Arc;

use crate::domain::{Domain, Interval};
use crate::error::{Error, Result};
use crate::function::{dist_sq, ScalarFunction, VectorFunction};
use crate::growth::GrowthFunction;

mod bernstein;
pub mod checks;
pub mod file;
pub mod special;
mod szasz;
mod tensor;
pub mod transform;
mod weierstrass;

pub use bernstein::make_bernstein;
pub use file::{load_family, parse_family, write_family};
pub use szasz::{make_szasz, SzaszTruncation};
pub use tensor::make_tensor;
pub use weierstrass::{make_gauss_weierstrass, DEFAULT_QUAD_POINTS};

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureAtom {
    pub node: Vec<f64>,
    pub weight: f64,
}

impl MeasureAtom {
    pub fn new(node: Vec<f64>, weight: f64) -> Self {
        MeasureAtom { node, weight }
    }
}

/// Atom of a vector operator whose coefficient is the diagonal map
/// `diag(weights)`; a single weight is broadcast over all components.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorAtom {
    pub node: Vec<f64>,
    pub weights: Vec<f64>,
}

impl VectorAtom {
    fn weight(&self, j: usize) -> f64 {
        if self.weights.len() == 1 { self.weights[0] } else { self.weights[j] }
    }

    /// Operator norm of the diagonal coefficient.
    pub fn operator_norm(&self) -> f64 {
        self.weights.iter().fold(0.0, |a, w| a.max(w.abs()))
    }
}

/// Atoms of one family at one evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSet {
    pub atoms: Vec<MeasureAtom>,
    /// Separate atoms for the vector operator, if it does not share `atoms`.
    pub vector_atoms: Option<Vec<VectorAtom>>,
    /// Probability mass dropped by truncation (upper bound).
    pub truncated_mass: f64,
}

impl AtomSet {
    pub fn shared(atoms: Vec<MeasureAtom>) -> Self {
        AtomSet { atoms, vector_atoms: None, truncated_mass: 0.0 }
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn apply_s(&self, f: &ScalarFunction) -> Result<f64> {
        let mut acc = 0.0;
        for a in &self.atoms {
            let v = f.eval(&a.node);
            if !v.is_finite() {
                return Err(Error::Evaluation { node: a.node.clone() });
            }
            acc += a.weight * v;
        }
        Ok(acc)
    }

    pub fn apply_l(&self, f: &VectorFunction) -> Result<Vec<f64>> {
        let mut acc = vec![0.0; f.codim()];
        match &self.vector_atoms {
            None => {
                for a in &self.atoms {
                    let v = f.eval_checked(&a.node)?;
                    for (s, x) in acc.iter_mut().zip(&v) {
                        *s += a.weight * x;
                    }
                }
            }
            Some(vatoms) => {
                for a in vatoms {
                    if a.weights.len() != 1 && a.weights.len() != f.codim() {
                        return Err(Error::Dimension { expected: f.codim(), got: a.weights.len() });
                    }
                    let v = f.eval_checked(&a.node)?;
                    for (j, (s, x)) in acc.iter_mut().zip(&v).enumerate() {
                        *s += a.weight(j) * x;
                    }
                }
            }
        }
        Ok(acc)
    }

    /// `S(1)`, `S(pr_i)`, `S(g)` and `S(h(t, .))` from one pass over atoms.
    pub fn growth_moments(&self, g: &GrowthFunction, t: &[f64]) -> Result<GrowthMoments> {
        let g_t = g.value(t);
        let grad_t = g.gradient(t);
        let mut s1 = TwoSum::default();
        let mut s_proj = vec![TwoSum::default(); t.len()];
        let mut s_g = TwoSum::default();
        let mut snh_direct = 0.0;
        for a in &self.atoms {
            let gu = g.value(&a.node);
            if !gu.is_finite() {
                return Err(Error::Evaluation { node: a.node.clone() });
            }
            s1.add(a.weight);
            for (s, x) in s_proj.iter_mut().zip(&a.node) {
                s.add_product(a.weight, *x);
            }
            s_g.add_product(a.weight, gu);
            let lin: f64 = grad_t.iter().zip(a.node.iter().zip(t)).map(|(d, (u, tt))| d * (u - tt)).sum();
            snh_direct += a.weight * (gu - g_t - lin);
        }
        // the expanded form cancels O(1) terms down to O(1/n); keep the
        // low-order parts so the difference is formed without loss
        let mut expanded = s_g;
        expanded.add_scaled(-g_t, s1);
        let mut lin_t = TwoSum::default();
        for ((d, s), x) in grad_t.iter().zip(&s_proj).zip(t) {
            expanded.add_scaled(-d, *s);
            lin_t.add_product(*d, *x);
        }
        expanded.add_dd_product(lin_t, s1);
        Ok(GrowthMoments {
            s1: s1.value(),
            s_proj: s_proj.iter().map(TwoSum::value).collect(),
            s_g: s_g.value(),
            snh_direct,
            g_t,
            grad_t,
            t: t.to_vec(),
            expanded: expanded.value(),
        })
    }

    pub fn gamma_sq(&self, t: &[f64]) -> f64 {
        self.atoms.iter().map(|a| a.weight * dist_sq(&a.node, t)).sum()
    }
}

/// Test-function moments at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthMoments {
    pub s1: f64,
    pub s_proj: Vec<f64>,
    pub s_g: f64,
    pub snh_direct: f64,
    pub g_t: f64,
    pub grad_t: Vec<f64>,
    pub t: Vec<f64>,
    expanded: f64,
}

impl GrowthMoments {
    /// `S(g) - g(t) S(1) - S(<g'(t), .>) + <g'(t), t> S(1)`, accumulated in
    /// double-double precision.
    pub fn snh_expanded(&self) -> f64 {
        self.expanded
    }
}

/// Unevaluated sum `hi + lo` of two doubles.
#[derive(Debug, Clone, Copy, Default)]
struct TwoSum {
    hi: f64,
    lo: f64,
}

impl TwoSum {
    fn exact(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn add(&mut self, x: f64) {
        let (s, e) = Self::exact(self.hi, x);
        let (hi, lo) = Self::exact(s, e + self.lo);
        *self = TwoSum { hi, lo };
    }

    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let e = a.mul_add(b, -p);
        self.add(p);
        self.add(e);
    }

    fn add_scaled(&mut self, a: f64, x: TwoSum) {
        self.add_product(a, x.hi);
        self.add(a * x.lo);
    }

    fn add_dd_product(&mut self, a: TwoSum, b: TwoSum) {
        self.add_product(a.hi, b.hi);
        self.add(a.hi * b.lo + a.lo * b.hi);
    }

    fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// Source of atoms for a measure family.
pub trait AtomSource: Send + Sync {
    fn dim(&self) -> usize;

    /// Largest set on which the family is defined.
    fn natural_domain(&self) -> Vec<Interval>;

    fn atoms_at(&self, t: &[f64]) -> Result<AtomSet>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FamilyFlags {
    pub constant_preserving: bool,
    pub regular: bool,
}

/// Quantified claims attached to a family.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FamilyMeta {
    /// Bound on `|S(1)(t) - 1|` over the domain.
    pub constant_defect: Option<f64>,
    /// Bound on the mass dropped by series truncation.
    pub truncation_tail: Option<f64>,
    pub quadrature_order: Option<usize>,
}

#[derive(Clone)]
pub struct MeasureFamily {
    source: Arc<dyn AtomSource>,
    n: u64,
    flags: FamilyFlags,
    label: String,
    meta: FamilyMeta,
}

impl fmt::Debug for MeasureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureFamily")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("flags", &self.flags)
            .field("meta", &self.meta)
            .finish()
    }
}

impl MeasureFamily {
    pub fn new(source: Arc<dyn AtomSource>, n: u64, flags: FamilyFlags, label: impl Into<String>) -> Self {
        MeasureFamily { source, n, flags, label: label.into(), meta: FamilyMeta::default() }
    }

    pub fn with_meta(mut self, meta: FamilyMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn flags(&self) -> FamilyFlags {
        self.flags
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn meta(&self) -> &FamilyMeta {
        &self.meta
    }

    pub fn source(&self) -> &Arc<dyn AtomSource> {
        &self.source
    }

    pub fn natural_domain(&self) -> Vec<Interval> {
        self.source.natural_domain()
    }

    pub fn atoms_at(&self, t: &[f64]) -> Result<AtomSet> {
        if t.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: t.len() });
        }
        self.source.atoms_at(t)
    }
}

/// How `S(h(t, .))(t)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnhMode {
    /// Sum of weights times the gap.
    Direct,
    /// Through the moments of `1`, the projections and `g`.
    Expanded,
}

/// A measure family bound to a domain; `L` and `S` are its two actions.
#[derive(Debug, Clone)]
pub struct OperatorPair {
    family: MeasureFamily,
    domain: Domain,
}

impl OperatorPair {
    pub fn new(family: MeasureFamily, domain: Domain) -> Result<Self> {
        if family.dim() != domain.dim() {
            return Err(Error::Dimension { expected: family.dim(), got: domain.dim() });
        }
        for (i, (nat, ax)) in family.natural_domain().iter().zip(domain.axes()).enumerate() {
            if ax.lo < nat.lo || ax.hi > nat.hi {
                return Err(Error::Config(format!(
                    "{} is defined on [{}, {}] along axis {}, domain asks for [{}, {}]",
                    family.label(),
                    nat.lo,
                    nat.hi,
                    i + 1,
                    ax.lo,
                    ax.hi
                )));
            }
        }
        Ok(OperatorPair { family, domain })
    }

    pub fn family(&self) -> &MeasureFamily {
        &self.family
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn n(&self) -> u64 {
        self.family.n()
    }

    pub fn label(&self) -> &str {
        self.family.label()
    }

    /// Atoms at `t`, which must lie in the domain.
    pub fn atoms_at(&self, t: &[f64]) -> Result<AtomSet> {
        self.domain.check_point(t)?;
        self.family.atoms_at(t)
    }

    pub fn apply_s(&self, f: &ScalarFunction, t: &[f64]) -> Result<f64> {
        self.atoms_at(t)?.apply_s(f)
    }

    pub fn apply_l(&self, f: &VectorFunction, t: &[f64]) -> Result<Vec<f64>> {
        self.atoms_at(t)?.apply_l(f)
    }

    /// `S(psi_t^2)(t)`
    pub fn gamma_sq(&self, t: &[f64]) -> Result<f64> {
        Ok(self.atoms_at(t)?.gamma_sq(t))
    }

    /// `S(h(t, .))(t)` for `t` in K.
    pub fn apply_s_h(&self, g: &GrowthFunction, t: &[f64], mode: SnhMode) -> Result<f64> {
        self.domain.check_in_k(t)?;
        let mom = self.atoms_at(t)?.growth_moments(g, t)?;
        Ok(match mode {
            SnhMode::Direct => mom.snh_direct,
            SnhMode::Expanded => mom.snh_expanded(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxRegion;

    fn bernstein_pair(n: u64) -> OperatorPair {
        OperatorPair::new(make_bernstein(n).unwrap(), Domain::bounded(BoxRegion::cube(1, 0.0, 1.0).unwrap())).unwrap()
    }

    #[test]
    fn bernstein_examples() {
        let p = bernstein_pair(10);
        let one = ScalarFunction::one();
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            assert!((p.apply_s(&one, &[t]).unwrap() - 1.0).abs() < 1e-14);
        }
        let sq = ScalarFunction::new("u^2", |u| u[0] * u[0]);
        assert!((p.apply_s(&sq, &[0.5]).unwrap() - 0.275).abs() < 1e-14);
        assert!((p.gamma_sq(&[0.5]).unwrap() - 0.025).abs() < 1e-14);

        let p100 = bernstein_pair(100);
        let f = VectorFunction::new("(u,u^2)", 2, |u| vec![u[0], u[0] * u[0]]).unwrap();
        let v = p100.apply_l(&f, &[0.5]).unwrap();
        assert!((v[0] - 0.5).abs() < 1e-14 && (v[1] - 0.2525).abs() < 1e-14, "{v:?}");
    }

    #[test]
    fn l_of_tensor_is_s_times_vector() {
        let p = bernstein_pair(7);
        let f = ScalarFunction::new("cos", |u| u[0].cos());
        let x = vec![1.5, -2.0, 0.25];
        let fx = VectorFunction::tensor(&f, x.clone()).unwrap();
        for t in [0.0, 0.3, 0.77, 1.0] {
            let lhs = p.apply_l(&fx, &[t]).unwrap();
            let s = p.apply_s(&f, &[t]).unwrap();
            for (a, b) in lhs.iter().zip(&x) {
                assert!((a - s * b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn constants_reproduced() {
        let p = bernstein_pair(25);
        let c = VectorFunction::constant(vec![3.0, -1.0]).unwrap();
        let v = p.apply_l(&c, &[0.41]).unwrap();
        assert!((v[0] - 3.0).abs() < 1e-14 && (v[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn snh_modes_agree_and_match_gamma() {
        let p = bernstein_pair(10);
        let g = GrowthFunction::quadratic();
        let d = p.apply_s_h(&g, &[0.5], SnhMode::Direct).unwrap();
        let e = p.apply_s_h(&g, &[0.5], SnhMode::Expanded).unwrap();
        assert!((d - 0.025).abs() < 1e-14 && (e - 0.025).abs() < 1e-14);
    }

    #[test]
    fn undefined_function_names_node() {
        let p = bernstein_pair(4);
        let f = ScalarFunction::new("1/u", |u| 1.0 / u[0]);
        match p.apply_s(&f, &[0.5]) {
            Err(Error::Evaluation { node }) => assert_eq!(node, vec![0.0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn point_outside_domain_rejected() {
        let p = bernstein_pair(4);
        assert!(matches!(p.apply_s(&ScalarFunction::one(), &[1.5]), Err(Error::Domain { .. })));
    }

    #[test]
    fn domain_must_fit_family() {
        let d = Domain::bounded(BoxRegion::cube(1, -1.0, 1.0).unwrap());
        assert!(matches!(OperatorPair::new(make_bernstein(3).unwrap(), d), Err(Error::Config(_))));
    }
}
