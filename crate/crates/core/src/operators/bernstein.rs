use std::sync::Arc;

use super::special::binomial_pmf;
use super::{AtomSet, AtomSource, FamilyFlags, FamilyMeta, MeasureAtom, MeasureFamily};
use crate::domain::Interval;
use crate::error::{Error, Result};

/// Mass allowed to be dropped on each side of the mode.
const TAIL: f64 = 1e-17;

struct Bernstein {
    n: u64,
}

impl AtomSource for Bernstein {
    fn dim(&self) -> usize {
        1
    }

    fn natural_domain(&self) -> Vec<Interval> {
        vec![Interval { lo: 0.0, hi: 1.0 }]
    }

    fn atoms_at(&self, t: &[f64]) -> Result<AtomSet> {
        let x = t[0];
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain { point: t.to_vec(), region: "[0, 1]" });
        }
        let n = self.n;
        let nf = n as f64;
        let q = 1.0 - x;
        if x == 0.0 || q == 0.0 {
            return Ok(AtomSet::shared(vec![MeasureAtom::new(vec![x.round()], 1.0)]));
        }
        let mode = (((n + 1) as f64 * x).floor() as u64).min(n);

        // Walk outward from the mode. Past the mode the ratio of successive
        // weights is decreasing, so the remaining mass on each side is
        // below w r / (1 - r).
        let mut upper = Vec::new();
        let mut upper_tail = 0.0;
        let mut k = mode;
        loop {
            let w = binomial_pmf(k, n, x, q);
            upper.push((k, w));
            if k == n {
                break;
            }
            let r = (nf - k as f64) / (k + 1) as f64 * x / q;
            if r < 1.0 {
                let bound = w * r / (1.0 - r);
                if bound < TAIL {
                    upper_tail = bound;
                    break;
                }
            }
            k += 1;
        }
        let mut lower = Vec::new();
        let mut lower_tail = 0.0;
        let mut k = mode;
        while k > 0 {
            k -= 1;
            let w = binomial_pmf(k, n, x, q);
            lower.push((k, w));
            if k == 0 {
                break;
            }
            let rho = k as f64 / (nf - k as f64 + 1.0) * q / x;
            if rho < 1.0 {
                let bound = w * rho / (1.0 - rho);
                if bound < TAIL {
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

/// Bernstein operator of degree `n` on `[0, 1]`: nodes `k/n` with the
/// binomial weights `C(n,k) t^k (1-t)^(n-k)`. Weights far from the mode
/// whose total is below `2e-17` are dropped, which keeps large degrees
/// cheap.
pub fn make_bernstein(n: u64) -> Result<MeasureFamily> {
    if n == 0 {
        return Err(Error::Input("Bernstein degree must be at least 1".into()));
    }
    Ok(MeasureFamily::new(
        Arc::new(Bernstein { n }),
        n,
        FamilyFlags { constant_preserving: true, regular: true },
        format!("bernstein({n})"),
    )
    .with_meta(FamilyMeta { constant_defect: Some(2.0 * TAIL), truncation_tail: Some(2.0 * TAIL), quadrature_order: None }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_atoms() {
        let fam = make_bernstein(1).unwrap();
        let a = fam.atoms_at(&[0.3]).unwrap().atoms;
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].node, vec![0.0]);
        assert_eq!(a[1].node, vec![1.0]);
        assert!((a[0].weight - 0.7).abs() < 1e-15 && (a[1].weight - 0.3).abs() < 1e-15);
    }

    #[test]
    fn endpoints_are_point_masses() {
        let fam = make_bernstein(50).unwrap();
        let a = fam.atoms_at(&[0.0]).unwrap().atoms;
        assert_eq!(a, vec![MeasureAtom::new(vec![0.0], 1.0)]);
        let a = fam.atoms_at(&[1.0]).unwrap().atoms;
        assert_eq!(a, vec![MeasureAtom::new(vec![1.0], 1.0)]);
    }

    #[test]
    fn large_degree_is_truncated_but_exact() {
        let fam = make_bernstein(1_000_000).unwrap();
        let set = fam.atoms_at(&[0.3]).unwrap();
        assert!(set.atoms.len() < 20_000);
        assert!(set.truncated_mass < 1e-16);
        assert!((set.mass() - 1.0).abs() < 1e-12);
        assert!((set.gamma_sq(&[0.3]) - 0.21e-6).abs() < 1e-15);
    }

    #[test]
    fn small_degree_keeps_every_atom() {
        let fam = make_bernstein(10).unwrap();
        assert_eq!(fam.atoms_at(&[0.5]).unwrap().atoms.len(), 11);
        let set = fam.atoms_at(&[0.01]).unwrap();
        let dropped: f64 = (set.atoms.len() as u64..=10).map(|k| binomial_pmf(k, 10, 0.01, 0.99)).sum();
        assert!(dropped <= set.truncated_mass && set.truncated_mass < 2e-17);
    }

    #[test]
    fn rejects_degree_zero_and_outside_points() {
        assert!(make_bernstein(0).is_err());
        assert!(make_bernstein(3).unwrap().atoms_at(&[1.2]).is_err());
    }
}
