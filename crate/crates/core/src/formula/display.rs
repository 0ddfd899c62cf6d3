use std::fmt;

use super::{ModalFormula, PropFormula, PropSymbol};

// Binding strength of each node kind; atoms and dependence atoms bind tightest.
const IDIS: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;
const ATOM: u8 = 5;

fn level(f: &ModalFormula) -> u8 {
    match f {
        ModalFormula::IDis(..) => IDIS,
        ModalFormula::Or(..) => OR,
        ModalFormula::And(..) => AND,
        ModalFormula::Diamond(_) | ModalFormula::Box(_) | ModalFormula::NegAtom(_) => UNARY,
        ModalFormula::Atom(_) | ModalFormula::MDep(..) => ATOM,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &ModalFormula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for ModalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModalFormula::Atom(p) => write!(f, "{p}"),
            ModalFormula::NegAtom(p) => write!(f, "!{p}"),
            ModalFormula::And(l, r) | ModalFormula::Or(l, r) | ModalFormula::IDis(l, r) => {
                let op = match self {
                    ModalFormula::And(..) => "&",
                    ModalFormula::Or(..) => "|",
                    _ => "ior",
                };
                let own = level(self);
                write_child(f, l, level(l) < own)?;
                write!(f, " {op} ")?;
                write_child(f, r, level(r) <= own)
            }
            ModalFormula::Diamond(g) | ModalFormula::Box(g) => {
                let op = if matches!(self, ModalFormula::Diamond(_)) { "<>" } else { "[]" };
                write!(f, "{op} ")?;
                write_child(f, g, level(g) < UNARY)
            }
            ModalFormula::MDep(args, target) => {
                f.write_str("dep(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "; {target})")
            }
        }
    }
}

fn prop_level(f: &PropFormula) -> u8 {
    match f {
        PropFormula::Or(..) => OR,
        PropFormula::And(..) => AND,
        PropFormula::NegAtom(_) => UNARY,
        PropFormula::Atom(_) | PropFormula::Dep(..) => ATOM,
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropFormula::Atom(p) => write!(f, "{p}"),
            PropFormula::NegAtom(p) => write!(f, "!{p}"),
            PropFormula::And(l, r) | PropFormula::Or(l, r) => {
                let op = if matches!(self, PropFormula::And(..)) { "&" } else { "|" };
                let own = prop_level(self);
                for (i, (child, parens)) in [(l, prop_level(l) < own), (r, prop_level(r) <= own)]
                    .into_iter()
                    .enumerate()
                {
                    if i == 1 {
                        write!(f, " {op} ")?;
                    }
                    if parens {
                        write!(f, "({child})")?;
                    } else {
                        write!(f, "{child}")?;
                    }
                }
                Ok(())
            }
            PropFormula::Dep(args, target) => {
                let args: Vec<&str> = args.iter().map(PropSymbol::name).collect();
                write!(f, "dep({}; {target})", args.join(", "))
            }
        }
    }
}

/// Renders a formula in the text grammar; parsing the result gives back the
/// same AST.
pub fn render<F: fmt::Display>(f: &F) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::super::{parse_modal, parse_prop};
    use super::*;

    #[test]
    fn render_examples() {
        assert_eq!(render(&PropFormula::dep(&["p"], "q")), "dep(p; q)");
        assert_eq!(render(&PropFormula::dep(&[], "q")), "dep(; q)");
        let f = ModalFormula::and(
            ModalFormula::atom("p"),
            ModalFormula::or(ModalFormula::atom("q"), ModalFormula::atom("r")),
        );
        assert_eq!(render(&f), "p & (q | r)");
        assert_eq!(
            render(&ModalFormula::diamond(ModalFormula::boxed(ModalFormula::atom("p")))),
            "<> [] p"
        );
    }

    #[test]
    fn right_nested_operands_keep_parentheses() {
        for text in ["a & (b & c)", "a | (b | c)", "a ior (b ior c)", "(a | b) & c", "<> (a & b)"] {
            let f = parse_modal(text).unwrap();
            assert_eq!(render(&f), text);
            assert_eq!(parse_modal(&render(&f)).unwrap(), f);
        }
        let g = parse_prop("a & (b & dep(a, b; c))").unwrap();
        assert_eq!(parse_prop(&render(&g)).unwrap(), g);
    }
}
