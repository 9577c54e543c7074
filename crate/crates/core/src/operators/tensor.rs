use std::sync::Arc;

use super::{AtomSet, AtomSource, MeasureAtom, MeasureFamily};
use crate::domain::Interval;
use crate::error::{Error, Result};

struct Tensor {
    factor: Arc<dyn AtomSource>,
    m: usize,
}

impl AtomSource for Tensor {
    fn dim(&self) -> usize {
        self.m
    }

    fn natural_domain(&self) -> Vec<Interval> {
        vec![self.factor.natural_domain()[0]; self.m]
    }

    fn atoms_at(&self, t: &[f64]) -> Result<AtomSet> {
        let mut atoms = vec![MeasureAtom::new(Vec::with_capacity(self.m), 1.0)];
        let mut tail = 0.0;
        for &ti in t {
            let set = self.factor.atoms_at(&[ti])?;
            if set.vector_atoms.is_some() {
                return Err(Error::Config("tensor products need shared atoms".into()));
            }
            // mass lost in any factor is bounded by the sum of factor tails
            tail += set.truncated_mass;
            atoms = atoms
                .iter()
                .flat_map(|a| {
                    set.atoms.iter().map(move |b| {
                        let mut node = a.node.clone();
                        node.push(b.node[0]);
                        MeasureAtom::new(node, a.weight * b.weight)
                    })
                })
                .collect();
        }
        Ok(AtomSet { atoms, vector_atoms: None, truncated_mass: tail })
    }
}

/// Product of `m` copies of a one-dimensional family.
pub fn make_tensor(factor: &MeasureFamily, m: usize) -> Result<MeasureFamily> {
    if factor.dim() != 1 {
        return Err(Error::Input("tensor factor must be one-dimensional".into()));
    }
    if m == 0 {
        return Err(Error::Input("tensor power must be positive".into()));
    }
    let mut meta = factor.meta().clone();
    meta.constant_defect = meta.constant_defect.map(|d| (1.0 + d).powi(m as i32) - 1.0);
    Ok(MeasureFamily::new(
        Arc::new(Tensor { factor: factor.source().clone(), m }),
        factor.n(),
        factor.flags(),
        format!("{}^{m}", factor.label()),
    )
    .with_meta(meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::make_bernstein;

    #[test]
    fn bernstein_square_at_center() {
        let fam = make_tensor(&make_bernstein(2).unwrap(), 2).unwrap();
        let atoms = fam.atoms_at(&[0.5, 0.5]).unwrap().atoms;
        assert_eq!(atoms.len(), 9);
        let one_d = [0.25, 0.5, 0.25];
        for (i, a) in atoms.iter().enumerate() {
            let expected = one_d[i / 3] * one_d[i % 3];
            assert!((a.weight - expected).abs() < 1e-15);
            assert_eq!(a.node, vec![(i / 3) as f64 / 2.0, (i % 3) as f64 / 2.0]);
        }
    }
}
