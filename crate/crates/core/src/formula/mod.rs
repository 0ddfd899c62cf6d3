//! Formula syntax for the propositional and modal dependence logics.
//!
//! Formulas are kept in negation normal form by construction: negation is
//! only representable on proposition symbols. Text with general negation is
//! parsed into a [`RawFormula`] and pushed down to the atoms by [`to_nnf`].

mod display;
mod parser;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use display::render;
pub use parser::{parse_modal, parse_prop, parse_raw};

/// A proposition symbol (also used for Boolean variables). Compared by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropSymbol(Arc<str>);

impl PropSymbol {
    pub fn new(name: &str) -> PropSymbol {
        assert!(!name.is_empty(), "proposition symbols must be nonempty");
        PropSymbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for PropSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for PropSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PropSymbol {
    fn from(name: &str) -> Self {
        PropSymbol::new(name)
    }
}

/// A formula of propositional logic extended with dependence atoms (PL / PD).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PropFormula {
    Atom(PropSymbol),
    NegAtom(PropSymbol),
    And(Box<PropFormula>, Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
    /// `dep(args; target)`; `args` may be empty (constancy atom).
    Dep(Vec<PropSymbol>, PropSymbol),
}

/// A modal formula with intuitionistic disjunction and modal dependence
/// atoms (ML / ML(⊻) / MDL / EMDL).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ModalFormula {
    Atom(PropSymbol),
    NegAtom(PropSymbol),
    And(Box<ModalFormula>, Box<ModalFormula>),
    Or(Box<ModalFormula>, Box<ModalFormula>),
    IDis(Box<ModalFormula>, Box<ModalFormula>),
    Diamond(Box<ModalFormula>),
    Box(Box<ModalFormula>),
    MDep(Vec<ModalFormula>, Box<ModalFormula>),
}

/// A formula with negation allowed anywhere, as read from text.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RawFormula {
    Atom(PropSymbol),
    Not(Box<RawFormula>),
    And(Box<RawFormula>, Box<RawFormula>),
    Or(Box<RawFormula>, Box<RawFormula>),
    IDis(Box<RawFormula>, Box<RawFormula>),
    Diamond(Box<RawFormula>),
    Box(Box<RawFormula>),
    Dep(Vec<RawFormula>, Box<RawFormula>),
}

/// The syntactic fragments, ordered by inclusion (see [`Fragment::is_within`]).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Fragment {
    Pl,
    Pd,
    Ml,
    MlIdis,
    Mdl,
    Emdl,
}

impl Fragment {
    /// Inclusion order between fragments: `a.is_within(b)` iff every formula
    /// of `a` is a formula of `b`.
    pub fn is_within(self, other: Fragment) -> bool {
        use Fragment::*;
        match self {
            Pl => true,
            Pd => matches!(other, Pd | Mdl | Emdl),
            Ml => matches!(other, Ml | MlIdis | Mdl | Emdl),
            MlIdis => other == MlIdis,
            Mdl => matches!(other, Mdl | Emdl),
            Emdl => other == Emdl,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Fragment::Pl => "PL",
            Fragment::Pd => "PD",
            Fragment::Ml => "ML",
            Fragment::MlIdis => "ML_IDIS",
            Fragment::Mdl => "MDL",
            Fragment::Emdl => "EMDL",
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PropFormula {
    pub fn atom(name: &str) -> PropFormula {
        PropFormula::Atom(PropSymbol::new(name))
    }

    pub fn neg(name: &str) -> PropFormula {
        PropFormula::NegAtom(PropSymbol::new(name))
    }

    pub fn and(l: PropFormula, r: PropFormula) -> PropFormula {
        PropFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: PropFormula, r: PropFormula) -> PropFormula {
        PropFormula::Or(Box::new(l), Box::new(r))
    }

    pub fn dep(args: &[&str], target: &str) -> PropFormula {
        PropFormula::Dep(
            args.iter().map(|a| PropSymbol::new(a)).collect(),
            PropSymbol::new(target),
        )
    }

    /// AST node count; a dependence atom counts one plus its symbols.
    pub fn size(&self) -> usize {
        match self {
            PropFormula::Atom(_) | PropFormula::NegAtom(_) => 1,
            PropFormula::And(l, r) | PropFormula::Or(l, r) => 1 + l.size() + r.size(),
            PropFormula::Dep(args, _) => 2 + args.len(),
        }
    }

    pub fn symbols(&self) -> BTreeSet<PropSymbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<PropSymbol>) {
        match self {
            PropFormula::Atom(p) | PropFormula::NegAtom(p) => {
                out.insert(p.clone());
            }
            PropFormula::And(l, r) | PropFormula::Or(l, r) => {
                l.collect_symbols(out);
                r.collect_symbols(out);
            }
            PropFormula::Dep(args, q) => {
                out.extend(args.iter().cloned());
                out.insert(q.clone());
            }
        }
    }

    pub fn has_dep(&self) -> bool {
        match self {
            PropFormula::Atom(_) | PropFormula::NegAtom(_) => false,
            PropFormula::And(l, r) | PropFormula::Or(l, r) => l.has_dep() || r.has_dep(),
            PropFormula::Dep(..) => true,
        }
    }

    pub fn has_or(&self) -> bool {
        match self {
            PropFormula::Atom(_) | PropFormula::NegAtom(_) | PropFormula::Dep(..) => false,
            PropFormula::Or(..) => true,
            PropFormula::And(l, r) => l.has_or() || r.has_or(),
        }
    }

    /// Least fragment containing the formula: PL when dependence-free.
    pub fn classify(&self) -> Fragment {
        if self.has_dep() {
            Fragment::Pd
        } else {
            Fragment::Pl
        }
    }

    /// The same formula read as a modal formula (dependence atoms become
    /// modal dependence atoms over atomic arguments).
    pub fn to_modal(&self) -> ModalFormula {
        match self {
            PropFormula::Atom(p) => ModalFormula::Atom(p.clone()),
            PropFormula::NegAtom(p) => ModalFormula::NegAtom(p.clone()),
            PropFormula::And(l, r) => ModalFormula::and(l.to_modal(), r.to_modal()),
            PropFormula::Or(l, r) => ModalFormula::or(l.to_modal(), r.to_modal()),
            PropFormula::Dep(args, q) => ModalFormula::MDep(
                args.iter().cloned().map(ModalFormula::Atom).collect(),
                Box::new(ModalFormula::Atom(q.clone())),
            ),
        }
    }
}

impl TryFrom<&ModalFormula> for PropFormula {
    type Error = Error;

    fn try_from(f: &ModalFormula) -> Result<PropFormula> {
        let not_prop = |what: &str| Error::Fragment {
            expected: "PD",
            reason: format!("contains {what}"),
        };
        Ok(match f {
            ModalFormula::Atom(p) => PropFormula::Atom(p.clone()),
            ModalFormula::NegAtom(p) => PropFormula::NegAtom(p.clone()),
            ModalFormula::And(l, r) => PropFormula::and(l.as_ref().try_into()?, r.as_ref().try_into()?),
            ModalFormula::Or(l, r) => PropFormula::or(l.as_ref().try_into()?, r.as_ref().try_into()?),
            ModalFormula::IDis(..) => return Err(not_prop("an intuitionistic disjunction")),
            ModalFormula::Diamond(_) | ModalFormula::Box(_) => return Err(not_prop("a modality")),
            ModalFormula::MDep(args, target) => {
                let atom = |g: &ModalFormula| match g {
                    ModalFormula::Atom(p) => Ok(p.clone()),
                    _ => Err(not_prop("a dependence atom with a non-atomic argument")),
                };
                PropFormula::Dep(args.iter().map(atom).collect::<Result<_>>()?, atom(target)?)
            }
        })
    }
}

impl ModalFormula {
    pub fn atom(name: &str) -> ModalFormula {
        ModalFormula::Atom(PropSymbol::new(name))
    }

    pub fn neg(name: &str) -> ModalFormula {
        ModalFormula::NegAtom(PropSymbol::new(name))
    }

    pub fn and(l: ModalFormula, r: ModalFormula) -> ModalFormula {
        ModalFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: ModalFormula, r: ModalFormula) -> ModalFormula {
        ModalFormula::Or(Box::new(l), Box::new(r))
    }

    pub fn idis(l: ModalFormula, r: ModalFormula) -> ModalFormula {
        ModalFormula::IDis(Box::new(l), Box::new(r))
    }

    pub fn diamond(f: ModalFormula) -> ModalFormula {
        ModalFormula::Diamond(Box::new(f))
    }

    pub fn boxed(f: ModalFormula) -> ModalFormula {
        ModalFormula::Box(Box::new(f))
    }

    pub fn dep(args: Vec<ModalFormula>, target: ModalFormula) -> ModalFormula {
        ModalFormula::MDep(args, Box::new(target))
    }

    pub fn size(&self) -> usize {
        match self {
            ModalFormula::Atom(_) | ModalFormula::NegAtom(_) => 1,
            ModalFormula::And(l, r) | ModalFormula::Or(l, r) | ModalFormula::IDis(l, r) => {
                1 + l.size() + r.size()
            }
            ModalFormula::Diamond(g) | ModalFormula::Box(g) => 1 + g.size(),
            ModalFormula::MDep(args, target) => {
                1 + args.iter().map(ModalFormula::size).sum::<usize>() + target.size()
            }
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            ModalFormula::Atom(_) | ModalFormula::NegAtom(_) => 0,
            ModalFormula::And(l, r) | ModalFormula::Or(l, r) | ModalFormula::IDis(l, r) => {
                l.modal_depth().max(r.modal_depth())
            }
            ModalFormula::Diamond(g) | ModalFormula::Box(g) => 1 + g.modal_depth(),
            ModalFormula::MDep(args, target) => args
                .iter()
                .chain(std::iter::once(target.as_ref()))
                .map(ModalFormula::modal_depth)
                .max()
                .unwrap_or(0),
        }
    }

    pub fn symbols(&self) -> BTreeSet<PropSymbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<PropSymbol>) {
        match self {
            ModalFormula::Atom(p) | ModalFormula::NegAtom(p) => {
                out.insert(p.clone());
            }
            ModalFormula::And(l, r) | ModalFormula::Or(l, r) | ModalFormula::IDis(l, r) => {
                l.collect_symbols(out);
                r.collect_symbols(out);
            }
            ModalFormula::Diamond(g) | ModalFormula::Box(g) => g.collect_symbols(out),
            ModalFormula::MDep(args, target) => {
                for a in args {
                    a.collect_symbols(out);
                }
                target.collect_symbols(out);
            }
        }
    }

    /// True when the formula has neither `ior` nor dependence atoms.
    pub fn is_pure_ml(&self) -> bool {
        match self {
            ModalFormula::Atom(_) | ModalFormula::NegAtom(_) => true,
            ModalFormula::And(l, r) | ModalFormula::Or(l, r) => l.is_pure_ml() && r.is_pure_ml(),
            ModalFormula::Diamond(g) | ModalFormula::Box(g) => g.is_pure_ml(),
            ModalFormula::IDis(..) | ModalFormula::MDep(..) => false,
        }
    }

    pub fn has_idis(&self) -> bool {
        self.any_node(&|g| matches!(g, ModalFormula::IDis(..)))
    }

    pub fn has_dep(&self) -> bool {
        self.any_node(&|g| matches!(g, ModalFormula::MDep(..)))
    }

    pub fn has_or(&self) -> bool {
        self.any_node(&|g| matches!(g, ModalFormula::Or(..)))
    }

    fn any_node(&self, pred: &dyn Fn(&ModalFormula) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            ModalFormula::Atom(_) | ModalFormula::NegAtom(_) => false,
            ModalFormula::And(l, r) | ModalFormula::Or(l, r) | ModalFormula::IDis(l, r) => {
                l.any_node(pred) || r.any_node(pred)
            }
            ModalFormula::Diamond(g) | ModalFormula::Box(g) => g.any_node(pred),
            ModalFormula::MDep(args, target) => {
                args.iter().any(|a| a.any_node(pred)) || target.any_node(pred)
            }
        }
    }

    /// Checks that every dependence atom has pure ML arguments and target.
    pub(crate) fn check_dep_arguments(&self) -> Result<()> {
        let bad = self.any_node(&|g| match g {
            ModalFormula::MDep(args, target) => {
                !args.iter().all(ModalFormula::is_pure_ml) || !target.is_pure_ml()
            }
            _ => false,
        });
        if bad {
            Err(Error::Fragment {
                expected: "EMDL",
                reason: "dependence atom arguments must be ML formulas".into(),
            })
        } else {
            Ok(())
        }
    }

    /// Least fragment containing the formula, or `None` when it mixes `ior`
    /// with dependence atoms or nests non-ML material inside a dependence atom.
    pub fn classify(&self) -> Option<Fragment> {
        if self.check_dep_arguments().is_err() {
            return None;
        }
        let modal = self.any_node(&|g| matches!(g, ModalFormula::Diamond(_) | ModalFormula::Box(_)));
        let idis = self.has_idis();
        let dep = self.has_dep();
        let complex_dep = self.any_node(&|g| match g {
            ModalFormula::MDep(args, target) => args
                .iter()
                .chain(std::iter::once(target.as_ref()))
                .any(|a| !matches!(a, ModalFormula::Atom(_))),
            _ => false,
        });
        Some(match (idis, dep) {
            (true, true) => return None,
            (true, false) => Fragment::MlIdis,
            (false, true) if complex_dep => Fragment::Emdl,
            (false, true) if modal => Fragment::Mdl,
            (false, true) => Fragment::Pd,
            (false, false) if modal => Fragment::Ml,
            (false, false) => Fragment::Pl,
        })
    }

    /// The non-Boolean subformulas: atoms and modal subformulas.
    pub fn nb_subf(&self) -> BTreeSet<ModalFormula> {
        let mut out = BTreeSet::new();
        self.collect_nb_subf(&mut out);
        out
    }

    fn collect_nb_subf(&self, out: &mut BTreeSet<ModalFormula>) {
        match self {
            ModalFormula::Atom(p) | ModalFormula::NegAtom(p) => {
                out.insert(ModalFormula::Atom(p.clone()));
            }
            ModalFormula::And(l, r) | ModalFormula::Or(l, r) | ModalFormula::IDis(l, r) => {
                l.collect_nb_subf(out);
                r.collect_nb_subf(out);
            }
            ModalFormula::Diamond(g) | ModalFormula::Box(g) => {
                out.insert(self.clone());
                g.collect_nb_subf(out);
            }
            ModalFormula::MDep(args, target) => {
                for a in args {
                    a.collect_nb_subf(out);
                }
                target.collect_nb_subf(out);
            }
        }
    }
}

/// The NNF of `¬f` for a pure ML formula.
pub fn dual(f: &ModalFormula) -> Result<ModalFormula> {
    Ok(match f {
        ModalFormula::Atom(p) => ModalFormula::NegAtom(p.clone()),
        ModalFormula::NegAtom(p) => ModalFormula::Atom(p.clone()),
        ModalFormula::And(l, r) => ModalFormula::or(dual(l)?, dual(r)?),
        ModalFormula::Or(l, r) => ModalFormula::and(dual(l)?, dual(r)?),
        ModalFormula::Diamond(g) => ModalFormula::boxed(dual(g)?),
        ModalFormula::Box(g) => ModalFormula::diamond(dual(g)?),
        ModalFormula::IDis(..) | ModalFormula::MDep(..) => {
            return Err(Error::Fragment {
                expected: "ML",
                reason: "only formulas without `ior` and dependence atoms have a dual".into(),
            })
        }
    })
}

/// Pushes negations to the atoms.
pub fn to_nnf(f: &RawFormula) -> Result<ModalFormula> {
    nnf(f, false)
}

fn nnf(f: &RawFormula, negated: bool) -> Result<ModalFormula> {
    let bin = |l: &RawFormula, r: &RawFormula| -> Result<(ModalFormula, ModalFormula)> {
        Ok((nnf(l, negated)?, nnf(r, negated)?))
    };
    Ok(match f {
        RawFormula::Atom(p) if negated => ModalFormula::NegAtom(p.clone()),
        RawFormula::Atom(p) => ModalFormula::Atom(p.clone()),
        RawFormula::Not(g) => nnf(g, !negated)?,
        RawFormula::And(l, r) => {
            let (l, r) = bin(l, r)?;
            if negated {
                ModalFormula::or(l, r)
            } else {
                ModalFormula::and(l, r)
            }
        }
        RawFormula::Or(l, r) => {
            let (l, r) = bin(l, r)?;
            if negated {
                ModalFormula::and(l, r)
            } else {
                ModalFormula::or(l, r)
            }
        }
        RawFormula::IDis(_, _) if negated => return Err(Error::NegatedIntuitionisticDisjunction),
        RawFormula::IDis(l, r) => {
            let (l, r) = bin(l, r)?;
            ModalFormula::idis(l, r)
        }
        RawFormula::Diamond(g) if negated => ModalFormula::boxed(nnf(g, true)?),
        RawFormula::Diamond(g) => ModalFormula::diamond(nnf(g, false)?),
        RawFormula::Box(g) if negated => ModalFormula::diamond(nnf(g, true)?),
        RawFormula::Box(g) => ModalFormula::boxed(nnf(g, false)?),
        RawFormula::Dep(..) if negated => return Err(Error::NegatedDependence),
        RawFormula::Dep(args, target) => ModalFormula::MDep(
            args.iter().map(|a| nnf(a, false)).collect::<Result<_>>()?,
            Box::new(nnf(target, false)?),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(text: &str) -> ModalFormula {
        parse_modal(text).unwrap()
    }

    #[test]
    fn nnf_pushes_negation() {
        assert_eq!(m("!(p | q)"), m("!p & !q"));
        assert_eq!(m("!<> p"), m("[] !p"));
        assert_eq!(m("!!p"), m("p"));
        assert_eq!(m("![] (p & !q)"), m("<> (!p | q)"));
    }

    #[test]
    fn nnf_rejects_negated_dep() {
        let raw = RawFormula::Not(Box::new(RawFormula::Dep(
            vec![],
            Box::new(RawFormula::Atom("q".into())),
        )));
        assert_eq!(to_nnf(&raw), Err(Error::NegatedDependence));
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual(&m("p")).unwrap(), m("!p"));
        assert_eq!(dual(&m("<>(p & q)")).unwrap(), m("[](!p | !q)"));
        assert_eq!(dual(&m("[]<>p")).unwrap(), m("<>[]!p"));
        assert!(dual(&m("p ior q")).is_err());
        assert!(dual(&m("dep(p; q)")).is_err());
    }

    #[test]
    fn nb_subf_examples() {
        let set = |xs: &[&str]| xs.iter().map(|x| m(x)).collect::<BTreeSet<_>>();
        assert_eq!(m("!p").nb_subf(), set(&["p"]));
        assert_eq!(m("<>p & q").nb_subf(), set(&["<>p", "p", "q"]));
        assert_eq!(m("dep(<>p; q)").nb_subf(), set(&["<>p", "p", "q"]));
        assert_eq!(m("[]<>!p").nb_subf(), set(&["[]<>!p", "<>!p", "p"]));
    }

    #[test]
    fn size_examples() {
        assert_eq!(m("p").size(), 1);
        assert_eq!(m("p & q").size(), 3);
        assert_eq!(m("dep(p; q)").size(), 3);
        assert_eq!(parse_prop("dep(p; q)").unwrap().size(), 3);
        assert_eq!(parse_prop("dep(; q)").unwrap().size(), 2);
        assert_eq!(m("<>[]p").size(), 3);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(parse_prop("p | !p").unwrap().classify(), Fragment::Pl);
        assert_eq!(parse_prop("dep(p; q)").unwrap().classify(), Fragment::Pd);
        assert_eq!(m("p | !p").classify(), Some(Fragment::Pl));
        assert_eq!(m("dep(p; q)").classify(), Some(Fragment::Pd));
        assert_eq!(m("dep(<>p; q)").classify(), Some(Fragment::Emdl));
        assert_eq!(m("<>dep(p; q)").classify(), Some(Fragment::Mdl));
        assert_eq!(m("<>p").classify(), Some(Fragment::Ml));
        assert_eq!(m("p ior <>p").classify(), Some(Fragment::MlIdis));
        assert_eq!(m("p ior dep(p; q)").classify(), None);
    }

    #[test]
    fn fragment_order() {
        use Fragment::*;
        let all = [Pl, Pd, Ml, MlIdis, Mdl, Emdl];
        for a in all {
            assert!(a.is_within(a));
            assert!(Pl.is_within(a));
            assert!(a.is_within(Emdl) || a == MlIdis);
        }
        assert!(!Pd.is_within(Ml));
        assert!(!MlIdis.is_within(Emdl));
    }

    #[test]
    fn prop_embedding_round_trips() {
        let f = parse_prop("dep(a, b; c) | (a & !b)").unwrap();
        assert_eq!(PropFormula::try_from(&f.to_modal()).unwrap(), f);
        assert!(PropFormula::try_from(&m("<>p")).is_err());
    }
}
