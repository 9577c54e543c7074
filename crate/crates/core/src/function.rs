//! Scalar and vector-valued target functions on R^m.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type VectorFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

/// Squared distance from `t`, i.e. the square of `u -> |u - t|`.
pub fn psi_sq(t: &[f64], u: &[f64]) -> Result<f64> {
    if t.len() != u.len() {
        return Err(Error::Dimension { expected: t.len(), got: u.len() });
    }
    Ok(dist_sq(t, u))
}

/// A real-valued function. Non-finite outputs mark points where the
/// function is undefined.
#[derive(Clone)]
pub struct ScalarFunction {
    f: Arc<ScalarFn>,
    label: String,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction").field("label", &self.label).finish()
    }
}

impl ScalarFunction {
    pub fn new(label: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFunction { f: Arc::new(f), label: label.into() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c)
    }

    pub fn one() -> Self {
        Self::new("1", |_| 1.0)
    }

    /// Coordinate projection `u -> u_i` (zero-based axis).
    pub fn projection(axis: usize) -> Self {
        Self::new(format!("pr{}", axis + 1), move |u| u[axis])
    }

    pub fn psi_sq_at(t: Vec<f64>) -> Self {
        Self::new("psi_t^2", move |u| dist_sq(u, &t))
    }

    #[inline]
    pub fn eval(&self, u: &[f64]) -> f64 {
        (self.f)(u)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let f = self.f.clone();
        Self::new(format!("{alpha}*{}", self.label), move |u| alpha * f(u))
    }

    /// `alpha * self + beta * other`
    pub fn combine(&self, alpha: f64, other: &ScalarFunction, beta: f64) -> Self {
        let (f, g) = (self.f.clone(), other.f.clone());
        Self::new(format!("{alpha}*{}+{beta}*{}", self.label, other.label), move |u| alpha * f(u) + beta * g(u))
    }
}

/// A map R^m -> R^k.
#[derive(Clone)]
pub struct VectorFunction {
    codim: usize,
    f: Arc<VectorFn>,
    label: String,
}

impl fmt::Debug for VectorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorFunction").field("label", &self.label).field("codim", &self.codim).finish()
    }
}

impl VectorFunction {
    pub fn new(
        label: impl Into<String>,
        codim: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if codim == 0 {
            return Err(Error::Input("codimension must be positive".into()));
        }
        Ok(VectorFunction { codim, f: Arc::new(f), label: label.into() })
    }

    pub fn from_scalar(f: ScalarFunction) -> Self {
        let label = f.label.clone();
        let inner = f.f;
        VectorFunction { codim: 1, f: Arc::new(move |u| vec![inner(u)]), label }
    }

    pub fn constant(c: Vec<f64>) -> Result<Self> {
        let label = format!("{c:?}");
        let k = c.len();
        Self::new(label, k, move |_| c.clone())
    }

    /// `u -> f(u) x`
    pub fn tensor(f: &ScalarFunction, x: Vec<f64>) -> Result<Self> {
        let inner = f.f.clone();
        let label = format!("{}*{x:?}", f.label);
        let k = x.len();
        Self::new(label, k, move |u| {
            let s = inner(u);
            x.iter().map(|xi| s * xi).collect()
        })
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn eval(&self, u: &[f64]) -> Vec<f64> {
        let v = (self.f)(u);
        debug_assert_eq!(v.len(), self.codim, "{} returned wrong codimension", self.label);
        v
    }

    /// Evaluate, failing when any component is not finite.
    pub fn eval_checked(&self, u: &[f64]) -> Result<Vec<f64>> {
        let v = self.eval(u);
        if v.len() != self.codim {
            return Err(Error::Dimension { expected: self.codim, got: v.len() });
        }
        if v.iter().all(|x| x.is_finite()) {
            Ok(v)
        } else {
            Err(Error::Evaluation { node: u.to_vec() })
        }
    }

    pub fn component(&self, i: usize) -> ScalarFunction {
        let f = self.f.clone();
        ScalarFunction::new(format!("{}[{}]", self.label, i), move |u| f(u)[i])
    }

    /// Pointwise norm `u -> |F(u)|`.
    pub fn norm_fn(&self) -> ScalarFunction {
        let f = self.f.clone();
        ScalarFunction::new(format!("|{}|", self.label), move |u| norm(&f(u)))
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let f = self.f.clone();
        VectorFunction {
            codim: self.codim,
            f: Arc::new(move |u| f(u).into_iter().map(|x| alpha * x).collect()),
            label: format!("{alpha}*{}", self.label),
        }
    }
}

/// Default probe battery: a smooth unbounded function, a smooth bounded
/// one, a Lipschitz function with a kink at `center`, a vector-valued
/// mixture and a constant.
pub fn battery(center: &[f64]) -> Vec<VectorFunction> {
    let c0 = center[0];
    vec![
        VectorFunction::from_scalar(ScalarFunction::new("square", |u| u.iter().map(|x| x * x).sum())),
        VectorFunction::from_scalar(ScalarFunction::new("sin", |u| u.iter().sum::<f64>().sin())),
        VectorFunction::from_scalar(ScalarFunction::new("kink", move |u| (u[0] - c0).abs())),
        VectorFunction::new("mixed", 2, |u| vec![u[0], (-u[0]).exp()]).expect("codim 2"),
        VectorFunction::constant(vec![1.0, -2.0]).expect("codim 2").with_label("const"),
    ]
}
