//! Quantified Boolean formulas with and without dependency constraints, their
//! correspondence, and the reduction to PD validity.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{parse_prop, PropFormula, PropSymbol};
use crate::prop_team::{pl_pointwise, symbol_from_name, Assignment};
use crate::settings::Settings;

/// A quantifier-free matrix in negation normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolMatrix {
    formula: PropFormula,
}

impl BoolMatrix {
    pub fn new(formula: PropFormula) -> Result<BoolMatrix> {
        if formula.has_dep() {
            return Err(Error::Malformed("a Boolean matrix cannot contain dependence atoms".into()));
        }
        Ok(BoolMatrix { formula })
    }

    pub fn parse(text: &str) -> Result<BoolMatrix> {
        BoolMatrix::new(parse_prop(text)?)
    }

    pub fn formula(&self) -> &PropFormula {
        &self.formula
    }

    pub fn variables(&self) -> BTreeSet<PropSymbol> {
        self.formula.symbols()
    }

    fn compile(&self, order: &[PropSymbol]) -> Result<Compiled> {
        let index: HashMap<&PropSymbol, usize> = order.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut ops = Vec::new();
        compile_into(&self.formula, &index, &mut ops)?;
        Ok(Compiled { ops, width: order.len() })
    }
}

impl fmt::Display for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula)
    }
}

#[derive(Clone, Copy)]
enum Op {
    Var(usize),
    Not(usize),
    And,
    Or,
}

/// Postfix matrix over variable positions; position 0 is the most
/// significant bit of the assignment word.
struct Compiled {
    ops: Vec<Op>,
    width: usize,
}

fn compile_into(f: &PropFormula, index: &HashMap<&PropSymbol, usize>, ops: &mut Vec<Op>) -> Result<()> {
    let lookup = |p: &PropSymbol| {
        index.get(p).copied().ok_or_else(|| Error::Malformed(format!("variable `{p}` is not quantified")))
    };
    match f {
        PropFormula::Atom(p) => ops.push(Op::Var(lookup(p)?)),
        PropFormula::NegAtom(p) => ops.push(Op::Not(lookup(p)?)),
        PropFormula::And(l, r) | PropFormula::Or(l, r) => {
            compile_into(l, index, ops)?;
            compile_into(r, index, ops)?;
            ops.push(if matches!(f, PropFormula::And(..)) { Op::And } else { Op::Or });
        }
        PropFormula::Dep(..) => unreachable!("matrices have no dependence atoms"),
    }
    Ok(())
}

impl Compiled {
    fn eval(&self, word: u64) -> bool {
        let bit = |i: usize| (word >> (self.width - 1 - i)) & 1 == 1;
        let mut stack: Vec<bool> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match *op {
                Op::Var(i) => bit(i),
                Op::Not(i) => !bit(i),
                Op::And => {
                    let r = stack.pop().expect("operand");
                    let l = stack.pop().expect("operand");
                    l && r
                }
                Op::Or => {
                    let r = stack.pop().expect("operand");
                    let l = stack.pop().expect("operand");
                    l || r
                }
            };
            stack.push(v);
        }
        stack.pop().expect("result")
    }
}

const MAX_VARIABLES: usize = 64;

fn check_variables(vars: &[PropSymbol]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for v in vars {
        if !seen.insert(v) {
            return Err(Error::Malformed(format!("variable `{v}` is quantified twice")));
        }
    }
    if vars.len() > MAX_VARIABLES {
        return Err(Error::guard("max-variables", vars.len() as u128, MAX_VARIABLES as u128));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// `Q₁α₁ … Qₙαₙ φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfInstance {
    prefix: Vec<(Quantifier, PropSymbol)>,
    matrix: BoolMatrix,
}

impl QbfInstance {
    pub fn new(prefix: Vec<(Quantifier, PropSymbol)>, matrix: BoolMatrix) -> Result<QbfInstance> {
        let vars: Vec<PropSymbol> = prefix.iter().map(|(_, v)| v.clone()).collect();
        check_variables(&vars)?;
        matrix.compile(&vars)?;
        Ok(QbfInstance { prefix, matrix })
    }

    pub fn prefix(&self) -> &[(Quantifier, PropSymbol)] {
        &self.prefix
    }

    pub fn matrix(&self) -> &BoolMatrix {
        &self.matrix
    }

    /// Reads `prefix A x E y ...` followed by `matrix <formula>`.
    pub fn parse(text: &str) -> Result<QbfInstance> {
        let mut prefix = None;
        let mut matrix = None;
        for (keyword, rest) in directives(text)? {
            match keyword {
                "prefix" => {
                    let tokens: Vec<&str> = rest.split_whitespace().collect();
                    if tokens.len() % 2 != 0 {
                        return Err(Error::Malformed("prefix needs quantifier/variable pairs".into()));
                    }
                    let mut out = Vec::new();
                    for pair in tokens.chunks(2) {
                        let q = match pair[0] {
                            "A" => Quantifier::Forall,
                            "E" => Quantifier::Exists,
                            other => return Err(Error::Malformed(format!("unknown quantifier `{other}`"))),
                        };
                        out.push((q, symbol_from_name(pair[1])?));
                    }
                    set_once(&mut prefix, out, "prefix")?;
                }
                "matrix" => set_once(&mut matrix, BoolMatrix::parse(rest)?, "matrix")?,
                other => return Err(Error::Malformed(format!("unknown directive `{other}`"))),
            }
        }
        let matrix = matrix.ok_or_else(|| Error::Malformed("missing matrix line".into()))?;
        QbfInstance::new(prefix.unwrap_or_default(), matrix)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("prefix");
        for (q, v) in &self.prefix {
            out.push_str(if *q == Quantifier::Forall { " A " } else { " E " });
            out.push_str(v.name());
        }
        out.push_str(&format!("\nmatrix {}\n", self.matrix));
        out
    }
}

fn set_once<T>(slot: &mut Option<T>, value: T, what: &str) -> Result<()> {
    if slot.replace(value).is_some() {
        return Err(Error::Malformed(format!("{what} given twice")));
    }
    Ok(())
}

fn directives(text: &str) -> Result<Vec<(&str, &str)>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        out.push((keyword, rest.trim()));
    }
    Ok(out)
}

/// `∀α₁…∀αₙ ∃β₁…∃βₖ φ` with dependency sets `P₁ … Pₖ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DqbfInstance {
    universals: Vec<PropSymbol>,
    existentials: Vec<PropSymbol>,
    constraint: Vec<Vec<PropSymbol>>,
    matrix: BoolMatrix,
}

impl DqbfInstance {
    /// Each dependency set is put into universal order.
    pub fn new(
        universals: Vec<PropSymbol>,
        existentials: Vec<PropSymbol>,
        constraint: Vec<Vec<PropSymbol>>,
        matrix: BoolMatrix,
    ) -> Result<DqbfInstance> {
        if constraint.len() != existentials.len() {
            return Err(Error::Malformed(format!(
                "{} existentials but {} dependency sets",
                existentials.len(),
                constraint.len()
            )));
        }
        let all: Vec<PropSymbol> = universals.iter().chain(&existentials).cloned().collect();
        check_variables(&all)?;
        matrix.compile(&all)?;
        let position: HashMap<&PropSymbol, usize> = universals.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut sorted = Vec::with_capacity(constraint.len());
        for (beta, deps) in existentials.iter().zip(constraint) {
            let mut idx = Vec::with_capacity(deps.len());
            for d in &deps {
                let i = *position.get(d).ok_or_else(|| {
                    Error::Malformed(format!("`{beta}` depends on `{d}`, which is not universal"))
                })?;
                idx.push(i);
            }
            idx.sort_unstable();
            if idx.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Malformed(format!("dependency set of `{beta}` repeats a variable")));
            }
            sorted.push(idx.into_iter().map(|i| universals[i].clone()).collect());
        }
        Ok(DqbfInstance { universals, existentials, constraint: sorted, matrix })
    }

    pub fn universals(&self) -> &[PropSymbol] {
        &self.universals
    }

    pub fn existentials(&self) -> &[PropSymbol] {
        &self.existentials
    }

    pub fn constraint(&self) -> &[Vec<PropSymbol>] {
        &self.constraint
    }

    pub fn matrix(&self) -> &BoolMatrix {
        &self.matrix
    }

    /// Reads the `forall` / `exists` / `matrix` line format.
    pub fn parse(text: &str) -> Result<DqbfInstance> {
        let mut universals = None;
        let mut exists = None;
        let mut matrix = None;
        for (keyword, rest) in directives(text)? {
            match keyword {
                "forall" => set_once(
                    &mut universals,
                    rest.split_whitespace().map(symbol_from_name).collect::<Result<Vec<_>>>()?,
                    "forall line",
                )?,
                "exists" => set_once(&mut exists, parse_exists(rest)?, "exists line")?,
                "matrix" => set_once(&mut matrix, BoolMatrix::parse(rest)?, "matrix")?,
                other => return Err(Error::Malformed(format!("unknown directive `{other}`"))),
            }
        }
        let matrix = matrix.ok_or_else(|| Error::Malformed("missing matrix line".into()))?;
        let (existentials, constraint) = exists.unwrap_or_default().into_iter().unzip();
        DqbfInstance::new(universals.unwrap_or_default(), existentials, constraint, matrix)
    }

    pub fn to_text(&self) -> String {
        fn names(vs: &[PropSymbol]) -> Vec<&str> {
            vs.iter().map(PropSymbol::name).collect()
        }
        let mut out = format!("forall {}\nexists", names(&self.universals).join(" "));
        for (b, deps) in self.existentials.iter().zip(&self.constraint) {
            out.push_str(&format!(" {b} {{{}}}", names(deps).join(", ")));
        }
        out.push_str(&format!("\nmatrix {}\n", self.matrix));
        out
    }
}

fn parse_exists(rest: &str) -> Result<Vec<(PropSymbol, Vec<PropSymbol>)>> {
    let mut out = Vec::new();
    let mut s = rest.trim_start();
    while !s.is_empty() {
        let open = s.find('{').ok_or_else(|| Error::Malformed("existential without a dependency set".into()))?;
        let close = s[open..]
            .find('}')
            .map(|c| open + c)
            .ok_or_else(|| Error::Malformed("unterminated dependency set".into()))?;
        let beta = symbol_from_name(s[..open].trim())?;
        let inside = s[open + 1..close].trim();
        let deps = if inside.is_empty() {
            Vec::new()
        } else {
            inside.split(',').map(|d| symbol_from_name(d.trim())).collect::<Result<Vec<_>>>()?
        };
        out.push((beta, deps));
        s = s[close + 1..].trim_start();
    }
    Ok(out)
}

/// Truth by expansion over the prefix.
pub fn qbf_eval(q: &QbfInstance) -> Result<bool> {
    let vars: Vec<PropSymbol> = q.prefix.iter().map(|(_, v)| v.clone()).collect();
    let compiled = q.matrix.compile(&vars)?;
    fn go(q: &QbfInstance, compiled: &Compiled, depth: usize, word: u64) -> bool {
        if depth == q.prefix.len() {
            return compiled.eval(word);
        }
        let shift = q.prefix.len() - 1 - depth;
        let zero = go(q, compiled, depth + 1, word);
        let one = || go(q, compiled, depth + 1, word | 1 << shift);
        match q.prefix[depth].0 {
            Quantifier::Forall => zero && one(),
            Quantifier::Exists => zero || one(),
        }
    }
    Ok(go(q, &compiled, 0, 0))
}

/// A Skolem function given by its truth table. Entry `i` is the value for
/// the assignment of `dependencies` whose binary code is `i`, the first
/// dependency most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkolemTable {
    pub variable: PropSymbol,
    pub dependencies: Vec<PropSymbol>,
    pub values: Vec<bool>,
}

impl fmt::Display for SkolemTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let deps: Vec<&str> = self.dependencies.iter().map(PropSymbol::name).collect();
        let bits: String = self.values.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "{} {{{}}}: {bits}", self.variable, deps.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DqbfOutcome {
    /// True, with the lexicographically least Skolem tables.
    True(Vec<SkolemTable>),
    False,
}

impl DqbfOutcome {
    pub fn is_true(&self) -> bool {
        matches!(self, DqbfOutcome::True(_))
    }
}

/// Truth under the dependency constraint: a Skolem table for each
/// existential such that every universal assignment, extended by the tables,
/// satisfies the matrix.
///
/// Tables are concatenated into one bit string (the first table's entry 0
/// first) and searched depth-first with `0` before `1`; a universal
/// assignment is checked as soon as every entry it reads is fixed.
pub fn dqbf_eval(d: &DqbfInstance, settings: &Settings) -> Result<DqbfOutcome> {
    let n = d.universals.len();
    let bits: usize = d.constraint.iter().map(|p| 1usize << p.len()).sum();
    if bits > settings.max_skolem_bits {
        return Err(Error::guard("max-skolem-bits", bits as u128, settings.max_skolem_bits as u128));
    }
    let order: Vec<PropSymbol> = d.universals.iter().chain(&d.existentials).cloned().collect();
    let compiled = d.matrix.compile(&order)?;
    let position: HashMap<&PropSymbol, usize> = d.universals.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let deps: Vec<Vec<usize>> = d.constraint.iter().map(|p| p.iter().map(|v| position[v]).collect()).collect();
    let mut offsets = Vec::with_capacity(deps.len());
    let mut acc = 0;
    for p in &deps {
        offsets.push(acc);
        acc += 1 << p.len();
    }
    // positions read by each universal assignment, grouped by the depth at
    // which all of them are fixed
    let mut ready: Vec<Vec<(u64, Vec<usize>)>> = vec![Vec::new(); bits + 1];
    for s in 0..1u64 << n {
        let value = |u: usize| (s >> (n - 1 - u)) & 1;
        let reads: Vec<usize> = deps
            .iter()
            .zip(&offsets)
            .map(|(p, off)| off + p.iter().fold(0usize, |i, &u| (i << 1) | value(u) as usize))
            .collect();
        let depth = reads.iter().map(|r| r + 1).max().unwrap_or(0);
        ready[depth].push((s, reads));
    }
    let k = d.existentials.len();
    let total = n + k;
    let satisfied = |table: &[bool], s: u64, reads: &[usize]| {
        let mut word = s << k;
        for (i, &r) in reads.iter().enumerate() {
            if table[r] {
                word |= 1 << (total - 1 - (n + i));
            }
        }
        compiled.eval(word)
    };
    let check = |table: &[bool], depth: usize| ready[depth].iter().all(|(s, reads)| satisfied(table, *s, reads));
    let mut table = vec![false; bits];
    if !check(&table, 0) {
        return Ok(DqbfOutcome::False);
    }
    // iterative depth-first search; `depth` entries of `table` are fixed
    let mut depth = 0;
    let mut tried_one = vec![false; bits];
    loop {
        if depth == bits {
            let tables = d
                .existentials
                .iter()
                .zip(&d.constraint)
                .zip(&offsets)
                .map(|((b, p), &off)| SkolemTable {
                    variable: b.clone(),
                    dependencies: p.clone(),
                    values: table[off..off + (1 << p.len())].to_vec(),
                })
                .collect();
            return Ok(DqbfOutcome::True(tables));
        }
        table[depth] = tried_one[depth];
        if check(&table, depth + 1) {
            depth += 1;
            if depth < bits {
                tried_one[depth] = false;
            }
            continue;
        }
        // advance to the next untried branch
        loop {
            if !tried_one[depth] {
                tried_one[depth] = true;
                break;
            }
            if depth == 0 {
                return Ok(DqbfOutcome::False);
            }
            depth -= 1;
        }
    }
}

/// Replays Skolem tables over every universal assignment, evaluating the
/// matrix pointwise.
pub fn check_witness(d: &DqbfInstance, tables: &[SkolemTable]) -> Result<bool> {
    if tables.len() != d.existentials.len() {
        return Ok(false);
    }
    let n = d.universals.len();
    for s in 0..1u64 << n {
        let mut pairs: Vec<(&str, bool)> = d
            .universals
            .iter()
            .enumerate()
            .map(|(i, u)| (u.name(), (s >> (n - 1 - i)) & 1 == 1))
            .collect();
        for ((beta, deps), table) in d.existentials.iter().zip(&d.constraint).zip(tables) {
            if &table.variable != beta || &table.dependencies != deps || table.values.len() != 1 << deps.len() {
                return Ok(false);
            }
            let index = deps.iter().fold(0usize, |i, p| {
                let v = pairs.iter().find(|(name, _)| *name == p.name()).map(|&(_, v)| v).unwrap_or(false);
                (i << 1) | v as usize
            });
            pairs.push((beta.name(), table.values[index]));
        }
        if !pl_pointwise(&Assignment::new(&pairs)?, d.matrix.formula())? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `P₁ ⊆ P₂ ⊆ … ⊆ Pₖ`.
pub fn is_simple_constraint(d: &DqbfInstance) -> bool {
    d.constraint.windows(2).all(|w| {
        let wider: BTreeSet<&PropSymbol> = w[1].iter().collect();
        w[0].iter().all(|v| wider.contains(v))
    })
}

/// Pulls the universals to the front; each existential depends on the
/// universals before it.
pub fn qbf_to_dqbf(q: &QbfInstance) -> Result<DqbfInstance> {
    let mut universals = Vec::new();
    let mut existentials = Vec::new();
    let mut constraint = Vec::new();
    for (quant, v) in &q.prefix {
        match quant {
            Quantifier::Forall => universals.push(v.clone()),
            Quantifier::Exists => {
                existentials.push(v.clone());
                constraint.push(universals.clone());
            }
        }
    }
    DqbfInstance::new(universals, existentials, constraint, q.matrix.clone())
}

/// Interleaves a simple-constraint instance into a linear prefix.
///
/// The universals are listed as `P₁`, then `P₂ ∖ P₁`, and so on, with the
/// unconstrained ones last; each existential goes right after the last
/// universal of its set, ties in existential order.
pub fn dqbf_to_qbf(d: &DqbfInstance) -> Result<QbfInstance> {
    if !is_simple_constraint(d) {
        return Err(Error::NonSimpleConstraint);
    }
    let mut prefix = Vec::new();
    let mut placed: BTreeSet<&PropSymbol> = BTreeSet::new();
    for (beta, deps) in d.existentials.iter().zip(&d.constraint) {
        for u in deps {
            if placed.insert(u) {
                prefix.push((Quantifier::Forall, u.clone()));
            }
        }
        prefix.push((Quantifier::Exists, beta.clone()));
    }
    for u in &d.universals {
        if placed.insert(u) {
            prefix.push((Quantifier::Forall, u.clone()));
        }
    }
    QbfInstance::new(prefix, d.matrix.clone())
}

/// `((ψ ∨ dep(P₁; β₁)) ∨ …) ∨ dep(Pₖ; βₖ)`: valid iff the instance is true.
pub fn reduce_to_pd(d: &DqbfInstance) -> PropFormula {
    d.existentials
        .iter()
        .zip(&d.constraint)
        .fold(d.matrix.formula.clone(), |acc, (beta, deps)| {
            PropFormula::or(acc, PropFormula::Dep(deps.clone(), beta.clone()))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prop_team::pd_valid;

    fn syms(names: &[&str]) -> Vec<PropSymbol> {
        names.iter().map(|n| PropSymbol::new(n)).collect()
    }

    fn equiv_matrix() -> BoolMatrix {
        BoolMatrix::parse("(a & b) | (!a & !b)").unwrap()
    }

    fn single(deps: &[&str]) -> DqbfInstance {
        DqbfInstance::new(syms(&["a"]), syms(&["b"]), vec![syms(deps)], equiv_matrix()).unwrap()
    }

    #[test]
    fn qbf_examples() {
        assert!(qbf_eval(&QbfInstance::parse("prefix E x\nmatrix x").unwrap()).unwrap());
        assert!(!qbf_eval(&QbfInstance::parse("prefix A x\nmatrix x").unwrap()).unwrap());
        assert!(qbf_eval(&QbfInstance::parse("prefix A x E y\nmatrix (x & y) | (!x & !y)").unwrap()).unwrap());
        assert!(!qbf_eval(&QbfInstance::parse("prefix E y A x\nmatrix (x & y) | (!x & !y)").unwrap()).unwrap());
    }

    #[test]
    fn dqbf_examples() {
        let s = Settings::default();
        match dqbf_eval(&single(&["a"]), &s).unwrap() {
            DqbfOutcome::True(tables) => {
                assert_eq!(tables[0].values, vec![false, true]);
                assert!(check_witness(&single(&["a"]), &tables).unwrap());
            }
            DqbfOutcome::False => panic!("expected true"),
        }
        assert_eq!(dqbf_eval(&single(&[]), &s).unwrap(), DqbfOutcome::False);
        let taut = DqbfInstance::new(syms(&["a"]), vec![], vec![], BoolMatrix::parse("a | !a").unwrap()).unwrap();
        assert_eq!(dqbf_eval(&taut, &s).unwrap(), DqbfOutcome::True(vec![]));
    }

    #[test]
    fn least_witness_is_returned() {
        // b can be anything; the all-zero table comes first
        let d = DqbfInstance::new(syms(&["a"]), syms(&["b"]), vec![syms(&["a"])], BoolMatrix::parse("b | !b").unwrap())
            .unwrap();
        let DqbfOutcome::True(t) = dqbf_eval(&d, &Settings::default()).unwrap() else { panic!() };
        assert_eq!(t[0].values, vec![false, false]);
        let e = DqbfInstance::new(syms(&["a"]), syms(&["b"]), vec![syms(&["a"])], BoolMatrix::parse("b | a").unwrap())
            .unwrap();
        let DqbfOutcome::True(t) = dqbf_eval(&e, &Settings::default()).unwrap() else { panic!() };
        assert_eq!(t[0].values, vec![true, false]);
    }

    #[test]
    fn skolem_guard() {
        let s = Settings { max_skolem_bits: 1, ..Settings::default() };
        assert!(dqbf_eval(&single(&["a"]), &s).unwrap_err().is_guard());
    }

    #[test]
    fn simple_constraints() {
        let m = BoolMatrix::parse("x | y | p | q").unwrap();
        let d = |p1: &[&str], p2: &[&str]| {
            DqbfInstance::new(syms(&["x", "y"]), syms(&["p", "q"]), vec![syms(p1), syms(p2)], m.clone()).unwrap()
        };
        assert!(is_simple_constraint(&d(&["x"], &["x", "y"])));
        assert!(!is_simple_constraint(&d(&["x"], &["y"])));
        let none = DqbfInstance::new(syms(&["x"]), vec![], vec![], BoolMatrix::parse("x").unwrap()).unwrap();
        assert!(is_simple_constraint(&none));
        assert!(matches!(dqbf_to_qbf(&d(&["x"], &["y"])), Err(Error::NonSimpleConstraint)));
    }

    #[test]
    fn correspondence_examples() {
        let q = QbfInstance::parse("prefix A x E y A z E w\nmatrix (x | y) & (z | w)").unwrap();
        let d = qbf_to_dqbf(&q).unwrap();
        assert_eq!(d.universals(), syms(&["x", "z"]).as_slice());
        assert_eq!(d.existentials(), syms(&["y", "w"]).as_slice());
        assert_eq!(d.constraint(), &[syms(&["x"]), syms(&["x", "z"])]);
        assert!(is_simple_constraint(&d));
        assert_eq!(dqbf_to_qbf(&d).unwrap(), q);
        let e = qbf_to_dqbf(&QbfInstance::parse("prefix E y\nmatrix y").unwrap()).unwrap();
        assert_eq!(e.constraint(), &[Vec::<PropSymbol>::new()]);
        let all_empty =
            DqbfInstance::new(syms(&["x"]), syms(&["y", "w"]), vec![vec![], vec![]], BoolMatrix::parse("x | y | w").unwrap())
                .unwrap();
        let lin = dqbf_to_qbf(&all_empty).unwrap();
        assert_eq!(lin.to_text(), "prefix E y E w A x\nmatrix x | y | w\n");
    }

    #[test]
    fn inverse_reorders_universals() {
        let d = DqbfInstance::new(
            syms(&["x", "z"]),
            syms(&["b", "c"]),
            vec![syms(&["z"]), syms(&["x", "z"])],
            BoolMatrix::parse("(z & b) | (!z & !b) | (x & c)").unwrap(),
        )
        .unwrap();
        let q = dqbf_to_qbf(&d).unwrap();
        assert_eq!(q.to_text().lines().next().unwrap(), "prefix A z E b A x E c");
        let back = qbf_to_dqbf(&q).unwrap();
        assert_eq!(back.constraint()[1].iter().collect::<BTreeSet<_>>(), d.constraint()[1].iter().collect());
        assert_eq!(dqbf_eval(&d, &Settings::default()).unwrap().is_true(), qbf_eval(&q).unwrap());
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_to_pd(&single(&["a"])).to_string(), "a & b | !a & !b | dep(a; b)");
        assert_eq!(reduce_to_pd(&single(&[])).to_string(), "a & b | !a & !b | dep(; b)");
        let none = DqbfInstance::new(syms(&["a"]), vec![], vec![], BoolMatrix::parse("a | !a").unwrap()).unwrap();
        assert_eq!(reduce_to_pd(&none), BoolMatrix::parse("a | !a").unwrap().formula().clone());
        let s = Settings::default();
        assert!(pd_valid(&reduce_to_pd(&single(&["a"])), &s).unwrap());
        assert!(!pd_valid(&reduce_to_pd(&single(&[])), &s).unwrap());
    }

    #[test]
    fn text_format() {
        let text = "forall a1 a2\nexists b1 {a1} b2 {a1, a2}\nmatrix a1 & b1 | !a1 & !b1\n";
        let d = DqbfInstance::parse(text).unwrap();
        assert_eq!(d.constraint()[1], syms(&["a1", "a2"]));
        assert_eq!(d.to_text(), text);
        assert_eq!(DqbfInstance::parse(&d.to_text()).unwrap(), d);
        let reordered = DqbfInstance::parse("forall a1 a2\nexists b {a2, a1}\nmatrix b").unwrap();
        assert_eq!(reordered.constraint()[0], syms(&["a1", "a2"]));
        assert!(DqbfInstance::parse("forall a\nexists b {c}\nmatrix b").is_err());
        assert!(DqbfInstance::parse("forall a\nexists b {a}\nmatrix z").is_err());
        assert!(DqbfInstance::parse("forall a a\nmatrix a").is_err());
        assert!(DqbfInstance::parse("forall a\nexists b {a}\nmatrix dep(a; b)").is_err());
        assert!(QbfInstance::parse("prefix A x X y\nmatrix x").is_err());
    }
}
