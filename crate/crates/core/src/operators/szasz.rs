use std::sync::Arc;

use super::special::poisson_pmf;
use super::{AtomSet, AtomSource, FamilyFlags, FamilyMeta, MeasureAtom, MeasureFamily};
use crate::domain::Interval;
use crate::error::{Error, Result};

/// Truncation policy for the Poisson series: both tails are cut once a
/// geometric bound on the remaining mass drops below `tail / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SzaszTruncation {
    pub tail: f64,
}

impl Default for SzaszTruncation {
    fn default() -> Self {
        SzaszTruncation { tail: 1e-14 }
    }
}

struct Szasz {
    n: u64,
    tail: f64,
}

impl AtomSource for Szasz {
    fn dim(&self) -> usize {
        1
    }

    fn natural_domain(&self) -> Vec<Interval> {
        vec![Interval { lo: 0.0, hi: f64::INFINITY }]
    }

    fn atoms_at(&self, t: &[f64]) -> Result<AtomSet> {
        let x = t[0];
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::Domain { point: t.to_vec(), region: "[0, inf)" });
        }
        let nf = self.n as f64;
        let lambda = nf * x;
        if lambda == 0.0 {
            return Ok(AtomSet::shared(vec![MeasureAtom::new(vec![0.0], 1.0)]));
        }
        let half = 0.5 * self.tail;
        let mode = lambda.floor() as u64;

        // upward from the mode; for k > lambda the ratio w_{k+1}/w_k is
        // at most r = lambda/(k+1) < 1, so the rest is below w_k r/(1-r)
        let mut upper = Vec::new();
        let mut k = mode;
        let upper_tail = loop {
            let w = poisson_pmf(k, lambda);
            upper.push((k, w));
            let r = lambda / (k + 1) as f64;
            if (k as f64) > lambda && r < 1.0 {
                let bound = w * r / (1.0 - r);
                if bound < half {
                    break bound;
                }
            }
            k += 1;
        };
        // downward; for k < lambda the ratio w_{k-1}/w_k = k/lambda
        let mut lower = Vec::new();
        let mut lower_tail = 0.0;
        let mut k = mode;
        while k > 0 {
            k -= 1;
            let w = poisson_pmf(k, lambda);
            lower.push((k, w));
            let rho = k as f64 / lambda;
            if rho < 1.0 && k > 0 {
                let bound = w * rho / (1.0 - rho);
                if bound < half {
                    lower_tail = bound;
                    break;
                }
            }
        }
        lower.reverse();
        let atoms = lower
            .into_iter()
            .chain(upper)
            .filter(|&(_, w)| w > 0.0)
            .map(|(k, w)| MeasureAtom::new(vec![k as f64 / nf], w))
            .collect();
        Ok(AtomSet { atoms, vector_atoms: None, truncated_mass: upper_tail + lower_tail })
    }
}

/// Szasz-Mirakjan operator on `[0, inf)`: nodes `k/n`, Poisson weights
/// `e^{-nt} (nt)^k / k!`, truncated per `policy`.
pub fn make_szasz(n: u64, policy: SzaszTruncation) -> Result<MeasureFamily> {
    if n == 0 {
        return Err(Error::Input("Szasz index must be at least 1".into()));
    }
    if !(policy.tail > 0.0 && policy.tail < 1.0) {
        return Err(Error::Input(format!("truncation tail must lie in (0, 1), got {}", policy.tail)));
    }
    Ok(MeasureFamily::new(
        Arc::new(Szasz { n, tail: policy.tail }),
        n,
        FamilyFlags { constant_preserving: true, regular: true },
        format!("szasz({n})"),
    )
    .with_meta(FamilyMeta {
        constant_defect: Some(policy.tail),
        truncation_tail: Some(policy.tail),
        quadrature_order: None,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_at_t_equals_one() {
        let fam = make_szasz(100, SzaszTruncation::default()).unwrap();
        let set = fam.atoms_at(&[1.0]).unwrap();
        assert!(set.truncated_mass < 1e-14);
        assert!((set.mass() - 1.0).abs() < 1e-13);
        let mean: f64 = set.atoms.iter().map(|a| a.weight * a.node[0]).sum();
        assert!((mean - 1.0).abs() < 1e-13);
        assert!((set.gamma_sq(&[1.0]) - 0.01).abs() < 1e-14);
    }

    #[test]
    fn truncated_tail_is_tiny() {
        // independent brute-force: full series far past the cut
        let n = 10u64;
        let t = 2.0;
        let fam = make_szasz(n, SzaszTruncation::default()).unwrap();
        let set = fam.atoms_at(&[t]).unwrap();
        let kmax = (set.atoms.last().unwrap().node[0] * n as f64).round() as u64;
        let rest: f64 = (kmax + 1..kmax + 400).map(|k| poisson_pmf(k, n as f64 * t)).sum();
        assert!(rest < 1e-14, "rest {rest}");
    }

    #[test]
    fn origin_is_point_mass() {
        let fam = make_szasz(5, SzaszTruncation::default()).unwrap();
        assert_eq!(fam.atoms_at(&[0.0]).unwrap().atoms, vec![MeasureAtom::new(vec![0.0], 1.0)]);
        assert!(fam.atoms_at(&[-0.1]).is_err());
    }
}
