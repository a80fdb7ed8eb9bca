//! Unrealizable cores by delta debugging over the guarantees.

use std::collections::{BTreeSet, HashMap};

use crate::diag::Span;
use crate::semcheck::CheckedSpec;
use crate::syntax::Element;

use super::{is_realizable, AnalysisError};

/// A user guarantee, identified by its position among the specification's
/// elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuaranteeRef {
    pub element: usize,
    pub name: Option<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreReport {
    pub core: Vec<GuaranteeRef>,
    /// Number of realizability checks run.
    pub checks: usize,
    /// Whether the core was verified to be unrealizable with every single
    /// guarantee removal realizable.
    pub minimal: bool,
}

struct Oracle<'a> {
    spec: &'a CheckedSpec,
    guarantees: Vec<usize>,
    cache: HashMap<BTreeSet<usize>, bool>,
    checks: usize,
}

impl Oracle<'_> {
    /// True when keeping only the guarantees in `subset` is unrealizable.
    fn unrealizable(&mut self, subset: &[usize]) -> Result<bool, AnalysisError> {
        let key: BTreeSet<usize> = subset.iter().copied().collect();
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let mut ast = self.spec.ast.clone();
        let keep: BTreeSet<usize> = key.iter().map(|&k| self.guarantees[k]).collect();
        let mut index = 0;
        ast.elements.retain(|_| {
            let i = index;
            index += 1;
            !self.guarantees.contains(&i) || keep.contains(&i)
        });
        let reduced = CheckedSpec { ast, symbols: self.spec.symbols.clone() };
        self.checks += 1;
        let v = !is_realizable(&reduced)?;
        self.cache.insert(key, v);
        Ok(v)
    }
}

fn split(items: &[usize], n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    for k in 0..n {
        let end = start + (items.len() - start) / (n - k);
        out.push(items[start..end].to_vec());
        start = end;
    }
    out
}

/// Computes a 1-minimal subset of the guarantees that is unrealizable
/// together with all assumptions. Guarantees are user `gar` elements in
/// source order; monitors and generated constraints are always kept.
pub fn unrealizable_core(spec: &CheckedSpec) -> Result<CoreReport, AnalysisError> {
    let guarantees: Vec<usize> = spec
        .ast
        .elements
        .iter()
        .enumerate()
        .filter(|(_, e)| matches!(e, Element::Guarantee(_)))
        .map(|(i, _)| i)
        .collect();
    let mut o = Oracle { spec, guarantees, cache: HashMap::new(), checks: 0 };
    let all: Vec<usize> = (0..o.guarantees.len()).collect();
    if !o.unrealizable(&all)? {
        return Err(AnalysisError::Realizable);
    }
    let mut current = if o.unrealizable(&[])? { Vec::new() } else { all };
    let mut n = 2;
    while current.len() >= 2 {
        let chunks = split(&current, n);
        let mut reduced = false;
        for c in &chunks {
            if o.unrealizable(c)? {
                current = c.clone();
                n = 2;
                reduced = true;
                break;
            }
        }
        if !reduced && n > 2 {
            for c in &chunks {
                let complement: Vec<usize> = current.iter().copied().filter(|x| !c.contains(x)).collect();
                if o.unrealizable(&complement)? {
                    current = complement;
                    n = (n - 1).max(2);
                    reduced = true;
                    break;
                }
            }
        }
        if !reduced {
            if n >= current.len() {
                break;
            }
            n = (2 * n).min(current.len());
        }
    }
    let mut minimal = o.unrealizable(&current)?;
    for k in 0..current.len() {
        let mut without = current.clone();
        without.remove(k);
        minimal &= !o.unrealizable(&without)?;
    }
    let core = current
        .iter()
        .map(|&k| {
            let element = o.guarantees[k];
            let Element::Guarantee(c) = &spec.ast.elements[element] else {
                unreachable!("guarantee index")
            };
            GuaranteeRef {
                element,
                name: c.name.as_ref().map(|n| n.name.clone()),
                span: c.span,
            }
        })
        .collect();
    Ok(CoreReport { core, checks: o.checks, minimal })
}
