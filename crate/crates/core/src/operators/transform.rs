//! Families derived from other families by rewriting their atoms. Besides
//! reindexing, these deliberately break axioms and serve as fixtures for the
//! checkers and the convergence harness.

use std::sync::Arc;

use super::{AtomSet, AtomSource, FamilyFlags, MeasureFamily, VectorAtom};
use crate::domain::Interval;
use crate::error::Result;

struct Rewritten {
    inner: Arc<dyn AtomSource>,
    rewrite: Box<dyn Fn(AtomSet) -> AtomSet + Send + Sync>,
}

impl AtomSource for Rewritten {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn natural_domain(&self) -> Vec<Interval> {
        self.inner.natural_domain()
    }

    fn atoms_at(&self, t: &[f64]) -> Result<AtomSet> {
        Ok((self.rewrite)(self.inner.atoms_at(t)?))
    }
}

fn rewritten(
    family: &MeasureFamily,
    flags: FamilyFlags,
    label: String,
    rewrite: impl Fn(AtomSet) -> AtomSet + Send + Sync + 'static,
) -> MeasureFamily {
    let source = Rewritten { inner: family.source().clone(), rewrite: Box::new(rewrite) };
    MeasureFamily::new(Arc::new(source), family.n(), flags, label).with_meta(family.meta().clone())
}

/// Multiplies every weight by `factor`. The constant-preserving flag is
/// dropped unless `factor == 1`.
pub fn scale_mass(family: &MeasureFamily, factor: f64) -> MeasureFamily {
    let mut flags = family.flags();
    flags.constant_preserving &= factor == 1.0;
    let mut fam = rewritten(family, flags, format!("{}*{factor}", family.label()), move |mut set| {
        for a in &mut set.atoms {
            a.weight *= factor;
        }
        for a in set.vector_atoms.iter_mut().flatten() {
            for w in &mut a.weights {
                *w *= factor;
            }
        }
        set
    });
    if factor != 1.0 {
        let mut meta = family.meta().clone();
        meta.constant_defect = None;
        fam = fam.with_meta(meta);
    }
    fam
}

/// Gives the vector operator its own atoms, equal to the shared ones except
/// that the first atom's first component weight is multiplied by
/// `1 + eps`.
pub fn perturb_vector_weights(family: &MeasureFamily, codim: usize, eps: f64) -> MeasureFamily {
    let mut flags = family.flags();
    flags.regular = false;
    rewritten(family, flags, format!("{}~L", family.label()), move |mut set| {
        let mut vatoms: Vec<VectorAtom> = set
            .atoms
            .iter()
            .map(|a| VectorAtom { node: a.node.clone(), weights: vec![a.weight; codim] })
            .collect();
        if let Some(first) = vatoms.first_mut() {
            first.weights[0] *= 1.0 + eps;
        }
        set.vector_atoms = Some(vatoms);
        set
    })
}

/// Same atoms, reported under process index `n`.
pub fn reindex(family: &MeasureFamily, n: u64) -> MeasureFamily {
    MeasureFamily::new(family.source().clone(), n, family.flags(), format!("{}@{n}", family.label()))
        .with_meta(family.meta().clone())
}
