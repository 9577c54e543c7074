//! Empirical checks of positivity, domination, regularity and constant
//! preservation on sample points.

use std::fmt;

use super::{AtomSet, OperatorPair};
use crate::error::Result;
use crate::function::{norm, ScalarFunction, VectorFunction};
use crate::par::{argmax, Execution};

pub const AXIOM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Positivity,
    Domination,
    Regularity,
    Constants,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Positivity => "positivity",
            Axiom::Domination => "domination",
            Axiom::Regularity => "regularity",
            Axiom::Constants => "constants",
        })
    }
}

/// An atom implicated in a failed check. `index` counts scalar atoms, or
/// vector atoms when `vector` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomViolation {
    pub t: Vec<f64>,
    pub index: usize,
    pub vector: bool,
    pub node: Vec<f64>,
    pub weights: Vec<f64>,
    pub reason: String,
}

impl fmt::Display for AtomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.vector { "L atom" } else { "atom" };
        write!(f, "{kind} #{} at t={:?}: node {:?}, weights {:?}: {}", self.index, self.t, self.node, self.weights, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub max_violation: f64,
    pub worst_point: Option<Vec<f64>>,
    pub points_checked: usize,
    pub pass: bool,
    pub violating_atoms: Vec<AtomViolation>,
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} max_violation={:e} points={}",
            self.axiom,
            if self.pass { "PASS" } else { "FAIL" },
            self.max_violation,
            self.points_checked
        )?;
        if let Some(t) = &self.worst_point {
            write!(f, " worst_t={t:?}")?;
        }
        for v in &self.violating_atoms {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

struct PointResult {
    violation: f64,
    atoms: Vec<AtomViolation>,
}

fn run(
    axiom: Axiom,
    pair: &OperatorPair,
    sample: &[Vec<f64>],
    per_point: impl Fn(&[f64], &AtomSet) -> Result<PointResult> + Sync + Send,
) -> Result<AxiomReport> {
    let results = Execution::default().try_map(sample, |t| {
        let set = pair.atoms_at(t)?;
        per_point(t, &set)
    })?;
    let violations: Vec<f64> = results.iter().map(|r| r.violation).collect();
    let (worst, max_violation) = match argmax(&violations) {
        Some((i, v)) => (Some(i), v),
        None => (None, 0.0),
    };
    let pass = max_violation <= AXIOM_TOL && !violations.iter().any(|v| v.is_nan());
    let violating_atoms = if pass {
        Vec::new()
    } else {
        results.into_iter().filter(|r| r.violation > AXIOM_TOL).flat_map(|r| r.atoms).collect()
    };
    Ok(AxiomReport {
        axiom,
        max_violation: max_violation.max(0.0),
        worst_point: worst.map(|i| sample[i].clone()),
        points_checked: sample.len(),
        pass,
        violating_atoms,
    })
}

fn negative_atoms(t: &[f64], set: &AtomSet) -> Vec<AtomViolation> {
    set.atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| a.weight < 0.0)
        .map(|(index, a)| AtomViolation {
            t: t.to_vec(),
            index,
            vector: false,
            node: a.node.clone(),
            weights: vec![a.weight],
            reason: "negative weight".into(),
        })
        .collect()
}

/// Vector atoms that do not match the scalar atom with the same index,
/// either by node or because `bad(vector weight, scalar weight)` holds.
fn mismatched_vector_atoms(
    t: &[f64],
    set: &AtomSet,
    bad: impl Fn(f64, f64) -> bool,
    reason: &str,
) -> Vec<AtomViolation> {
    let Some(vatoms) = &set.vector_atoms else { return Vec::new() };
    vatoms
        .iter()
        .enumerate()
        .filter_map(|(index, v)| {
            let why = match set.atoms.get(index) {
                None => "no matching scalar atom".to_string(),
                Some(s) if s.node != v.node => "node differs from scalar atom".to_string(),
                Some(s) if v.weights.iter().any(|&w| bad(w, s.weight)) => {
                    format!("{reason} (scalar weight {})", s.weight)
                }
                Some(_) => return None,
            };
            Some(AtomViolation { t: t.to_vec(), index, vector: true, node: v.node.clone(), weights: v.weights.clone(), reason: why })
        })
        .collect()
}

/// Largest negative weight over the sample.
pub fn check_positivity(pair: &OperatorPair, sample: &[Vec<f64>]) -> Result<AxiomReport> {
    run(Axiom::Positivity, pair, sample, |t, set| {
        let violation = set.atoms.iter().map(|a| -a.weight).fold(0.0, f64::max);
        Ok(PointResult { violation, atoms: negative_atoms(t, set) })
    })
}

/// `max_t |L(F)(t)| - S(|F|)(t)`
pub fn check_domination(pair: &OperatorPair, f: &VectorFunction, sample: &[Vec<f64>]) -> Result<AxiomReport> {
    let norm_f = f.norm_fn();
    run(Axiom::Domination, pair, sample, |t, set| {
        let lf = set.apply_l(f)?;
        let violation = norm(&lf) - set.apply_s(&norm_f)?;
        let mut atoms = negative_atoms(t, set);
        atoms.extend(mismatched_vector_atoms(t, set, |v, s| v.abs() > s, "vector weight exceeds scalar weight"));
        Ok(PointResult { violation, atoms })
    })
}

/// `max_t |L(f x)(t) - S(f)(t) x|`
pub fn check_regularity(pair: &OperatorPair, f: &ScalarFunction, x: &[f64], sample: &[Vec<f64>]) -> Result<AxiomReport> {
    let fx = VectorFunction::tensor(f, x.to_vec())?;
    run(Axiom::Regularity, pair, sample, |t, set| {
        let lhs = set.apply_l(&fx)?;
        let s = set.apply_s(f)?;
        let violation = norm(&lhs.iter().zip(x).map(|(a, b)| a - s * b).collect::<Vec<_>>());
        let atoms = mismatched_vector_atoms(t, set, |v, s| v != s, "vector weight differs from scalar weight");
        Ok(PointResult { violation, atoms })
    })
}

/// `max_t |L(c)(t) - c|`. A failure implicates every atom at the worst
/// point, since the defect is a property of their total mass.
pub fn check_constants(pair: &OperatorPair, c: &[f64], sample: &[Vec<f64>]) -> Result<AxiomReport> {
    let cf = VectorFunction::constant(c.to_vec())?;
    let mut report = run(Axiom::Constants, pair, sample, |t, set| {
        let lc = set.apply_l(&cf)?;
        let violation = norm(&lc.iter().zip(c).map(|(a, b)| a - b).collect::<Vec<_>>());
        let mass = set.mass();
        let atoms = set
            .atoms
            .iter()
            .enumerate()
            .map(|(index, a)| AtomViolation {
                t: t.to_vec(),
                index,
                vector: false,
                node: a.node.clone(),
                weights: vec![a.weight],
                reason: format!("weights at this point sum to {mass}"),
            })
            .collect();
        Ok(PointResult { violation, atoms })
    })?;
    if let Some(w) = &report.worst_point {
        report.violating_atoms.retain(|a| &a.t == w);
    }
    Ok(report)
}
