//! Constraints whose lowered form is constant.

use std::collections::BTreeMap;

use crate::bdd::BddRef;
use crate::diag::Span;
use crate::lowering::{lower, to_gr1, Role};
use crate::semcheck::CheckedSpec;
use crate::syntax::{Element, Origin};

use super::AnalysisError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Triviality {
    TriviallyTrue,
    TriviallyFalse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrivialFinding {
    /// Position of the assumption or guarantee among the spec's elements.
    pub element: usize,
    pub role: Role,
    pub name: Option<String>,
    pub span: Span,
    pub verdict: Triviality,
}

/// Reports every assumption and guarantee whose lowered constraints are
/// constant over the valid encodings of the variables.
pub fn find_trivial(spec: &CheckedSpec) -> Result<Vec<TrivialFinding>, AnalysisError> {
    let kernel = lower(spec).map_err(AnalysisError::Lowering)?;
    let mut p = to_gr1(&kernel);
    let m = &mut p.manager;

    let mut valid = BddRef::TRUE;
    let mut parts: BTreeMap<(u32, u32, bool), BddRef> = BTreeMap::new();
    for (c, &b) in kernel.constraints.iter().zip(&p.constraint_bdds) {
        match c.origin {
            Origin::Validity => valid = m.and(valid, b),
            Origin::User | Origin::Pattern => {
                let key = (c.span.start, c.span.end, c.role == Role::Assumption);
                let acc = parts.get(&key).copied().unwrap_or(BddRef::TRUE);
                let conj = m.and(acc, b);
                parts.insert(key, conj);
            }
            Origin::Monitor | Origin::PastLtl => {}
        }
    }
    let not_valid = m.not(valid);

    let mut out = Vec::new();
    for (element, e) in spec.ast.elements.iter().enumerate() {
        let (c, role) = match e {
            Element::Assumption(c) => (c, Role::Assumption),
            Element::Guarantee(c) => (c, Role::Guarantee),
            _ => continue,
        };
        let Some(&f) = parts.get(&(c.span.start, c.span.end, role == Role::Assumption)) else {
            continue;
        };
        let verdict = if m.or(f, not_valid).is_true() {
            Triviality::TriviallyTrue
        } else if m.and(f, valid).is_false() {
            Triviality::TriviallyFalse
        } else {
            continue;
        };
        out.push(TrivialFinding {
            element,
            role,
            name: c.name.as_ref().map(|n| n.name.clone()),
            span: c.span,
            verdict,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semcheck::check;
    use crate::syntax::parse;

    fn findings(src: &str) -> Vec<Triviality> {
        let spec = check(parse(src).unwrap()).unwrap();
        find_trivial(&spec).unwrap().into_iter().map(|f| f.verdict).collect()
    }

    #[test]
    fn tautology_and_contradiction() {
        assert_eq!(findings("spec A sys boolean x; gar alw x | !x;"), vec![Triviality::TriviallyTrue]);
        assert_eq!(findings("spec A env boolean x; asm ini x & !x;"), vec![Triviality::TriviallyFalse]);
        assert!(findings("spec A env boolean x; sys boolean y; gar trans next(y) <-> x;").is_empty());
    }

    #[test]
    fn relative_to_valid_codes() {
        assert_eq!(
            findings("spec A sys {L, M, R} d; gar alw d = L | d = M | d = R;"),
            vec![Triviality::TriviallyTrue]
        );
    }
}
