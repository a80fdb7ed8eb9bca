//! Lowering: removes every language feature in a fixed order until only the
//! kernel remains (Boolean variables with `ini`, `trans` and `alwEv`
//! constraints), then builds the GR(1) game.
//!
//! The AST passes run in this order: defines and type aliases, predicates,
//! patterns, monitors, `alw`, past-time operators. The result is checked
//! again (with generated names allowed) and bit-blasted into a
//! [`KernelSpec`].

pub mod encode;
pub mod kernel;
pub mod kexpr;
pub mod passes;
pub mod problem;

use crate::diag::Diagnostic;
use crate::semcheck::{check_with, CheckOptions, CheckedSpec};
use crate::syntax::SpecAst;

pub use encode::expand_enums_and_ints;
pub use kernel::{print_kernel, KConstraint, KVar, KernelSpec, Role, Value, VarEncoding};
pub use kexpr::KExpr;
pub use problem::{kexpr_to_bdd, to_gr1, Gr1Problem};

/// An AST-to-AST lowering pass.
pub type Pass = fn(SpecAst) -> SpecAst;

/// The AST passes, in the order they run.
pub const AST_PASSES: [(&str, Pass); 6] = [
    ("defines and types", passes::expand_defines_and_typedefs),
    ("predicates", passes::expand_predicates),
    ("patterns", passes::expand_patterns),
    ("monitors", passes::expand_monitors),
    ("state invariants", passes::expand_state_invariants),
    ("past-time operators", passes::expand_pastltl),
];

/// Runs every AST pass.
pub fn desugar(ast: SpecAst) -> SpecAst {
    AST_PASSES.iter().fold(ast, |a, (_, pass)| pass(a))
}

/// Re-checks a lowered AST, allowing the names lowering generates.
pub fn recheck(ast: SpecAst) -> Result<CheckedSpec, Vec<Diagnostic>> {
    check_with(ast, CheckOptions { allow_reserved: true })
}

/// Lowers a checked specification to its kernel.
pub fn lower(spec: &CheckedSpec) -> Result<KernelSpec, Vec<Diagnostic>> {
    let desugared = recheck(desugar(spec.ast.clone()))?;
    Ok(expand_enums_and_ints(&desugared))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semcheck::check;
    use crate::syntax::parse;

    fn kernel(src: &str) -> KernelSpec {
        lower(&check(parse(src).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn motor_enum_uses_two_bits_and_validity() {
        let k = kernel("spec A type MotorCmd = {FWD, STOP, BWD}; sys MotorCmd m; gar ini m = STOP;");
        assert_eq!(k.vars.len(), 2);
        let valid = k.constraints.iter().filter(|c| c.origin == crate::syntax::Origin::Validity).count();
        assert_eq!(valid, 2);
        assert!(k.constraints.iter().all(|c| c.role == Role::Guarantee));
    }

    #[test]
    fn power_of_two_range_has_no_validity() {
        let k = kernel("spec A env Int(0..1) n; gar ini n = 1;");
        assert_eq!(k.vars.len(), 1);
        assert_eq!(k.constraints.len(), 1);
    }

    #[test]
    fn speed_comparison_counts_seven_values() {
        let k = kernel("spec A env Int(0..50) speed; asm ini speed <= 6;");
        assert_eq!(k.vars.len(), 6);
        let c = k.constraints.iter().find(|c| c.origin == crate::syntax::Origin::User).unwrap();
        let enc = k.encoding("speed").unwrap();
        let count = (0..=50)
            .filter(|v| {
                let bits = enc.encode(&Value::Int(*v)).unwrap();
                c.expr.eval(&bits, &bits)
            })
            .count();
        assert_eq!(count, 7);
    }

    #[test]
    fn kernel_print_reparses() {
        let k = kernel(
            "spec A env {L, R, N} d; sys Int(0..5) p; gar ini p = 0; \
             gar trans d = L -> next(p) = p + 1 mod 6; gar alwEv p = 3;",
        );
        let text = print_kernel(&k).unwrap();
        let again = recheck(parse(&text).unwrap()).unwrap();
        let k2 = expand_enums_and_ints(&again);
        assert_eq!(k2.vars.len(), k.vars.len());
        assert_eq!(k2.constraints.len(), k.constraints.len());
    }

    #[test]
    fn empty_spec_gives_true_game() {
        let p = to_gr1(&kernel("spec A env boolean x;"));
        assert!(p.theta_e.is_true() && p.theta_s.is_true() && p.rho_e.is_true() && p.rho_s.is_true());
        assert_eq!(p.je, vec![crate::bdd::BddRef::TRUE]);
        assert_eq!(p.js, vec![crate::bdd::BddRef::TRUE]);
    }

    #[test]
    fn trans_guarantee_is_primed_relation() {
        let p = to_gr1(&kernel("spec A env boolean x; sys boolean y; gar trans next(y) <-> x;"));
        let mut m = p.manager;
        let y1 = m.primed(p.sys[0]);
        let x = m.var(p.env[0]);
        let expected = m.iff(y1, x);
        assert_eq!(p.rho_s, expected);
    }
}
