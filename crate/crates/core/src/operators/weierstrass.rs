use std::f64::consts::PI;
use std::sync::Arc;

use super::special::gauss_hermite;
use super::{AtomSet, AtomSource, FamilyFlags, FamilyMeta, MeasureAtom, MeasureFamily};
use crate::domain::Interval;
use crate::error::{Error, Result};

pub const DEFAULT_QUAD_POINTS: usize = 64;
const MIN_QUAD_POINTS: usize = 16;

struct GaussWeierstrass {
    scale: f64,
    offsets: Vec<f64>,
    weights: Vec<f64>,
}

impl AtomSource for GaussWeierstrass {
    fn dim(&self) -> usize {
        1
    }

    fn natural_domain(&self) -> Vec<Interval> {
        vec![Interval::real_line()]
    }

    fn atoms_at(&self, t: &[f64]) -> Result<AtomSet> {
        if !t[0].is_finite() {
            return Err(Error::Domain { point: t.to_vec(), region: "the real line" });
        }
        let atoms = self
            .offsets
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| MeasureAtom::new(vec![t[0] + self.scale * x], *w))
            .collect();
        Ok(AtomSet::shared(atoms))
    }
}

/// Gauss-Weierstrass operator `sqrt(n/pi) int f(u) exp(-n (u-t)^2) du`,
/// discretised by substituting `u = t + x / sqrt(n)` and applying a
/// Gauss-Hermite rule with `quad_points` nodes.
pub fn make_gauss_weierstrass(n: u64, quad_points: usize) -> Result<MeasureFamily> {
    if n == 0 {
        return Err(Error::Input("Gauss-Weierstrass index must be at least 1".into()));
    }
    if quad_points < MIN_QUAD_POINTS {
        return Err(Error::Input(format!("need at least {MIN_QUAD_POINTS} quadrature points, got {quad_points}")));
    }
    let (x, w) = gauss_hermite(quad_points);
    let norm = PI.sqrt();
    let weights: Vec<f64> = w.iter().map(|wi| wi / norm).collect();
    let defect = (weights.iter().sum::<f64>() - 1.0).abs();
    Ok(MeasureFamily::new(
        Arc::new(GaussWeierstrass { scale: 1.0 / (n as f64).sqrt(), offsets: x, weights }),
        n,
        FamilyFlags { constant_preserving: true, regular: true },
        format!("gauss-weierstrass({n})"),
    )
    .with_meta(FamilyMeta { constant_defect: Some(defect), truncation_tail: None, quadrature_order: Some(quad_points) }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_moment_is_half_over_n() {
        for n in [1u64, 10, 100] {
            let fam = make_gauss_weierstrass(n, DEFAULT_QUAD_POINTS).unwrap();
            for t in [-3.0, 0.0, 0.7] {
                let set = fam.atoms_at(&[t]).unwrap();
                assert!((set.gamma_sq(&[t]) - 0.5 / n as f64).abs() < 1e-14);
                assert!((set.mass() - 1.0).abs() < 1e-13);
            }
        }
        assert!(make_gauss_weierstrass(10, 8).is_err());
    }
}
