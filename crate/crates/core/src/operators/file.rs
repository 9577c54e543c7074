//! Line-oriented text format for tabulated families.
//!
//! ```text
//! # comment
//! m 1
//! n 4
//! flags constant_preserving regular
//! label my family
//! k 2
//! meta constant_defect 0
//! t: 0.5
//! 0.0625 0
//! 0.25 0.25
//! L 0.5 0.5 0.25
//! ```
//!
//! Each block starts with `t: x1 .. xm` and lists atoms `w u1 .. um`.
//! Lines `L w1 .. wk u1 .. um` give separate diagonal atoms for the vector
//! operator (`k` must be declared first); a block with any `L` line uses
//! only those for `L` and the plain atoms for `S`.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::{AtomSet, AtomSource, FamilyFlags, FamilyMeta, MeasureAtom, MeasureFamily, VectorAtom};
use crate::domain::Interval;
use crate::error::{Error, Result};

const LOOKUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Block {
    t: Vec<f64>,
    set: AtomSet,
}

#[derive(Debug)]
struct Tabulated {
    m: usize,
    blocks: Vec<Block>,
}

impl AtomSource for Tabulated {
    fn dim(&self) -> usize {
        self.m
    }

    fn natural_domain(&self) -> Vec<Interval> {
        vec![Interval::real_line(); self.m]
    }

    fn atoms_at(&self, t: &[f64]) -> Result<AtomSet> {
        self.blocks
            .iter()
            .find(|b| b.t.iter().zip(t).all(|(a, x)| (a - x).abs() <= LOOKUP_TOL))
            .map(|b| b.set.clone())
            .ok_or_else(|| Error::Domain { point: t.to_vec(), region: "the tabulated points" })
    }
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse { line, message: format!("expected a finite number, found `{tok}`") })
}

fn parse_nums(toks: &[&str], line: usize) -> Result<Vec<f64>> {
    toks.iter().map(|t| parse_num(t, line)).collect()
}

fn parse_count(toks: &[&str], line: usize, key: &str) -> Result<usize> {
    match toks {
        [v] => v
            .parse::<usize>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| Error::Parse { line, message: format!("`{key}` needs a positive integer, found `{v}`") }),
        _ => Err(Error::Parse { line, message: format!("`{key}` takes exactly one value") }),
    }
}

pub fn parse_family(text: &str) -> Result<MeasureFamily> {
    let mut m: Option<usize> = None;
    let mut n: Option<u64> = None;
    let mut k: Option<usize> = None;
    let mut flags: Option<FamilyFlags> = None;
    let mut label = String::from("tabulated");
    let mut meta = FamilyMeta::default();
    let mut blocks: Vec<Block> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("t:") {
            let dim = m.ok_or(Error::Parse { line, message: "block before `m` header".into() })?;
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != dim {
                return Err(Error::Parse { line, message: format!("point needs {dim} coordinates, found {}", toks.len()) });
            }
            let t = parse_nums(&toks, line)?;
            if blocks.iter().any(|b| b.t.iter().zip(&t).all(|(a, x)| (a - x).abs() <= LOOKUP_TOL)) {
                return Err(Error::Parse { line, message: "duplicate evaluation point".into() });
            }
            blocks.push(Block { t, set: AtomSet::shared(Vec::new()) });
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let (head, rest) = (toks[0], &toks[1..]);
        match head {
            "m" => m = Some(parse_count(rest, line, "m")?),
            "n" => n = Some(parse_count(rest, line, "n")? as u64),
            "k" => k = Some(parse_count(rest, line, "k")?),
            "label" => label = content["label".len()..].trim().to_string(),
            "flags" => {
                let mut f = FamilyFlags::default();
                for tok in rest {
                    match *tok {
                        "constant_preserving" => f.constant_preserving = true,
                        "regular" => f.regular = true,
                        "none" => {}
                        other => return Err(Error::Parse { line, message: format!("unknown flag `{other}`") }),
                    }
                }
                flags = Some(f);
            }
            "meta" => {
                let [key, value] = rest else {
                    return Err(Error::Parse { line, message: "`meta` takes a key and a value".into() });
                };
                match *key {
                    "constant_defect" => meta.constant_defect = Some(parse_num(value, line)?),
                    "truncation_tail" => meta.truncation_tail = Some(parse_num(value, line)?),
                    "quadrature_order" => meta.quadrature_order = Some(parse_count(&[value], line, "quadrature_order")?),
                    other => return Err(Error::Parse { line, message: format!("unknown meta key `{other}`") }),
                }
            }
            "L" => {
                let dim = m.unwrap_or(0);
                let codim = k.ok_or(Error::Parse { line, message: "`L` atoms need a `k` header".into() })?;
                let block = blocks.last_mut().ok_or(Error::Parse { line, message: "atom outside a `t:` block".into() })?;
                if rest.len() != codim + dim {
                    return Err(Error::Parse {
                        line,
                        message: format!("`L` atom needs {codim} weights and {dim} coordinates, found {} values", rest.len()),
                    });
                }
                let vals = parse_nums(rest, line)?;
                let atom = VectorAtom { weights: vals[..codim].to_vec(), node: vals[codim..].to_vec() };
                block.set.vector_atoms.get_or_insert_with(Vec::new).push(atom);
            }
            _ => {
                let dim = m.ok_or(Error::Parse { line, message: format!("unknown header `{head}`") })?;
                let Some(block) = blocks.last_mut() else {
                    return Err(Error::Parse { line, message: format!("unknown header `{head}`") });
                };
                if toks.len() != dim + 1 {
                    return Err(Error::Parse { line, message: format!("atom needs a weight and {dim} coordinates, found {} values", toks.len()) });
                }
                let vals = parse_nums(&toks, line)?;
                block.set.atoms.push(MeasureAtom::new(vals[1..].to_vec(), vals[0]));
            }
        }
    }

    let m = m.ok_or(Error::Parse { line: 0, message: "missing `m` header".into() })?;
    let n = n.ok_or(Error::Parse { line: 0, message: "missing `n` header".into() })?;
    let flags = flags.ok_or(Error::Parse { line: 0, message: "missing `flags` header".into() })?;
    if blocks.is_empty() {
        return Err(Error::Parse { line: 0, message: "no `t:` blocks".into() });
    }
    Ok(MeasureFamily::new(Arc::new(Tabulated { m, blocks }), n, flags, label).with_meta(meta))
}

pub fn load_family(path: impl AsRef<Path>) -> Result<MeasureFamily> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_family(&text)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Tabulates `family` at `points` in the text format. Float output uses the
/// shortest representation that parses back to the same value.
pub fn write_family(family: &MeasureFamily, points: &[Vec<f64>]) -> Result<String> {
    let mut sets = Vec::with_capacity(points.len());
    let mut codim = None;
    for t in points {
        let set = family.atoms_at(t)?;
        if let Some(v) = &set.vector_atoms {
            for a in v {
                match codim {
                    None => codim = Some(a.weights.len()),
                    Some(c) if c != a.weights.len() => {
                        return Err(Error::Input("vector atoms with differing weight counts".into()));
                    }
                    _ => {}
                }
            }
        }
        sets.push(set);
    }
    let flags = family.flags();
    let mut names = Vec::new();
    if flags.constant_preserving {
        names.push("constant_preserving");
    }
    if flags.regular {
        names.push("regular");
    }
    if names.is_empty() {
        names.push("none");
    }
    let mut out = String::new();
    let _ = writeln!(out, "m {}", family.dim());
    let _ = writeln!(out, "n {}", family.n());
    let _ = writeln!(out, "flags {}", names.join(" "));
    let _ = writeln!(out, "label {}", family.label());
    if let Some(c) = codim {
        let _ = writeln!(out, "k {c}");
    }
    let meta = family.meta();
    if let Some(v) = meta.constant_defect {
        let _ = writeln!(out, "meta constant_defect {v}");
    }
    if let Some(v) = meta.truncation_tail {
        let _ = writeln!(out, "meta truncation_tail {v}");
    }
    if let Some(v) = meta.quadrature_order {
        let _ = writeln!(out, "meta quadrature_order {v}");
    }
    for (t, set) in points.iter().zip(&sets) {
        let _ = writeln!(out, "t: {}", join(t));
        for a in &set.atoms {
            let _ = writeln!(out, "{} {}", a.weight, join(&a.node));
        }
        for a in set.vector_atoms.iter().flatten() {
            let _ = writeln!(out, "L {} {}", join(&a.weights), join(&a.node));
        }
    }
    Ok(out)
}
