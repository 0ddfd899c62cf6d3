//! Recursive-descent parser for the ASCII formula grammar.
//!
//! Precedence, tightest first: `!` `<>` `[]`, then `&`, then `|`, then `ior`.
//! Binary operators associate to the left.

use super::{to_nnf, ModalFormula, PropFormula, PropSymbol, RawFormula};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    IDis,
    Diamond,
    Box,
    Dep,
    LParen,
    RParen,
    Comma,
    Semi,
    Eof,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(name) => format!("identifier `{name}`"),
        Tok::Not => "`!`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::IDis => "`ior`".into(),
        Tok::Diamond => "`<>`".into(),
        Tok::Box => "`[]`".into(),
        Tok::Dep => "`dep`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b';' => Tok::Semi,
            b'<' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Diamond
            }
            b'[' if bytes.get(i + 1) == Some(&b']') => {
                i += 1;
                Tok::Box
            }
            c if c.is_ascii_alphabetic() => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                match &text[start..=i] {
                    "dep" => Tok::Dep,
                    "ior" => Tok::IDis,
                    name => Tok::Ident(name.to_string()),
                }
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Prop,
    Modal,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    mode: Mode,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.at].0.clone();
        if tok != Tok::Eof {
            self.at += 1;
        }
        tok
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(Error::syntax(
                self.pos(),
                format!("expected {}, found {}", describe(&want), describe(self.peek())),
            ))
        }
    }

    fn modal_only(&self, what: &str) -> Result<()> {
        match self.mode {
            Mode::Modal => Ok(()),
            Mode::Prop => Err(Error::syntax(
                self.pos(),
                format!("{what} is not allowed in a propositional formula"),
            )),
        }
    }

    // `negated` tracks the parity of enclosing negations so that negated
    // dependence atoms and `ior` are reported with their position.
    fn idis(&mut self, negated: bool) -> Result<RawFormula> {
        let mut lhs = self.or(negated)?;
        while *self.peek() == Tok::IDis {
            self.modal_only("`ior`")?;
            if negated {
                return Err(Error::syntax(
                    self.pos(),
                    "negation cannot be applied to an intuitionistic disjunction",
                ));
            }
            self.bump();
            let rhs = self.or(negated)?;
            lhs = RawFormula::IDis(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self, negated: bool) -> Result<RawFormula> {
        let mut lhs = self.and(negated)?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and(negated)?;
            lhs = RawFormula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self, negated: bool) -> Result<RawFormula> {
        let mut lhs = self.unary(negated)?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary(negated)?;
            lhs = RawFormula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self, negated: bool) -> Result<RawFormula> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(RawFormula::Not(Box::new(self.unary(!negated)?)))
            }
            Tok::Diamond => {
                self.modal_only("`<>`")?;
                self.bump();
                Ok(RawFormula::Diamond(Box::new(self.unary(negated)?)))
            }
            Tok::Box => {
                self.modal_only("`[]`")?;
                self.bump();
                Ok(RawFormula::Box(Box::new(self.unary(negated)?)))
            }
            _ => self.primary(negated),
        }
    }

    fn primary(&mut self, negated: bool) -> Result<RawFormula> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(name) => Ok(RawFormula::Atom(PropSymbol::new(&name))),
            Tok::LParen => {
                let inner = self.idis(negated)?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Dep => {
                if negated {
                    return Err(Error::syntax(pos, "negation cannot be applied to a dependence atom"));
                }
                self.expect(Tok::LParen)?;
                let mut args = Vec::new();
                if *self.peek() != Tok::Semi {
                    args.push(self.dep_argument()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.dep_argument()?);
                    }
                }
                self.expect(Tok::Semi)?;
                let target = self.dep_argument()?;
                self.expect(Tok::RParen)?;
                Ok(RawFormula::Dep(args, Box::new(target)))
            }
            tok => Err(Error::syntax(pos, format!("expected a formula, found {}", describe(&tok)))),
        }
    }

    fn dep_argument(&mut self) -> Result<RawFormula> {
        let pos = self.pos();
        let arg = self.idis(false)?;
        let ok = match self.mode {
            Mode::Prop => matches!(arg, RawFormula::Atom(_)),
            Mode::Modal => is_raw_ml(&arg),
        };
        if ok {
            Ok(arg)
        } else if self.mode == Mode::Prop {
            Err(Error::syntax(pos, "propositional dependence atoms take proposition symbols only"))
        } else {
            Err(Error::syntax(
                pos,
                "dependence atom arguments must not contain `ior` or dependence atoms",
            ))
        }
    }
}

fn is_raw_ml(f: &RawFormula) -> bool {
    match f {
        RawFormula::Atom(_) => true,
        RawFormula::Not(g) | RawFormula::Diamond(g) | RawFormula::Box(g) => is_raw_ml(g),
        RawFormula::And(l, r) | RawFormula::Or(l, r) => is_raw_ml(l) && is_raw_ml(r),
        RawFormula::IDis(..) | RawFormula::Dep(..) => false,
    }
}

fn parse_with(text: &str, mode: Mode) -> Result<RawFormula> {
    let mut parser = Parser {
        toks: lex(text)?,
        at: 0,
        mode,
    };
    let f = parser.idis(false)?;
    if *parser.peek() != Tok::Eof {
        return Err(Error::syntax(
            parser.pos(),
            format!("unexpected {}", describe(parser.peek())),
        ));
    }
    Ok(f)
}

/// Parses text with general negation, without normalising it.
pub fn parse_raw(text: &str) -> Result<RawFormula> {
    parse_with(text, Mode::Modal)
}

/// Parses a PL/PD formula and returns its negation normal form.
pub fn parse_prop(text: &str) -> Result<PropFormula> {
    let raw = parse_with(text, Mode::Prop)?;
    PropFormula::try_from(&to_nnf(&raw)?)
}

/// Parses a modal formula (ML, ML(⊻), MDL, EMDL) into negation normal form.
pub fn parse_modal(text: &str) -> Result<ModalFormula> {
    to_nnf(&parse_with(text, Mode::Modal)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prop_examples() {
        assert_eq!(
            parse_prop("p & !q").unwrap(),
            PropFormula::and(PropFormula::atom("p"), PropFormula::neg("q"))
        );
        assert_eq!(parse_prop("dep(p1,p2; q)").unwrap(), PropFormula::dep(&["p1", "p2"], "q"));
        assert_eq!(
            parse_prop("!(p & q)").unwrap(),
            PropFormula::or(PropFormula::neg("p"), PropFormula::neg("q"))
        );
        assert_eq!(parse_prop("dep(;q)").unwrap(), PropFormula::dep(&[], "q"));
    }

    #[test]
    fn modal_examples() {
        let q = || ModalFormula::atom("q");
        assert_eq!(parse_modal("<> p").unwrap(), ModalFormula::diamond(ModalFormula::atom("p")));
        assert_eq!(
            parse_modal("dep(<>q, <> <> q ; q)").unwrap(),
            ModalFormula::dep(
                vec![ModalFormula::diamond(q()), ModalFormula::diamond(ModalFormula::diamond(q()))],
                q()
            )
        );
        assert_eq!(
            parse_modal("p ior !p").unwrap(),
            ModalFormula::idis(ModalFormula::atom("p"), ModalFormula::neg("p"))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let a = || ModalFormula::atom("a");
        let b = || ModalFormula::atom("b");
        let c = || ModalFormula::atom("c");
        assert_eq!(
            parse_modal("a | b & c").unwrap(),
            ModalFormula::or(a(), ModalFormula::and(b(), c()))
        );
        assert_eq!(
            parse_modal("a & b & c").unwrap(),
            ModalFormula::and(ModalFormula::and(a(), b()), c())
        );
        assert_eq!(
            parse_modal("a ior b | c").unwrap(),
            ModalFormula::idis(a(), ModalFormula::or(b(), c()))
        );
        assert_eq!(
            parse_modal("<> a & b").unwrap(),
            ModalFormula::and(ModalFormula::diamond(a()), b())
        );
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(parse_prop("p &"), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_prop("!dep(p; q)"), Err(Error::Syntax { pos: 1, .. })));
        assert!(matches!(parse_prop("!(p & dep(p; q))"), Err(Error::Syntax { pos: 6, .. })));
        assert!(matches!(parse_prop("<> p"), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse_prop("dep(p & q; r)"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse_modal("dep(p ior q; r)"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse_modal("dep(dep(p;q); r)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_modal("!(p ior q)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_modal("p $ q"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_modal("dep(p q)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_modal("(p"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_modal(""), Err(Error::Syntax { pos: 0, .. })));
    }

    #[test]
    fn keywords_are_not_identifiers() {
        assert!(parse_prop("dep").is_err());
        assert!(parse_prop("ior").is_err());
        assert!(parse_prop("dep_1 & iors").is_ok());
    }

    #[test]
    fn negation_inside_dep_arguments_is_fine() {
        assert_eq!(
            parse_modal("dep(!<>p; q)").unwrap(),
            ModalFormula::dep(
                vec![ModalFormula::boxed(ModalFormula::neg("p"))],
                ModalFormula::atom("q")
            )
        );
    }
}
