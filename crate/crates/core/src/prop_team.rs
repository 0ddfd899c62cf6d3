//! Propositional teams and the PD decision procedures.
//!
//! A team is a set of assignments over one explicit, sorted domain. Rows are
//! encoded as integers with the first domain symbol as the most significant
//! bit, so the numeric order of codes is the lexicographic order of rows.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::antichain::{self, Set};
use crate::error::{Error, Result};
use crate::formula::{PropFormula, PropSymbol};
use crate::settings::Settings;

const MAX_DOMAIN_BITS: usize = 64;

/// A total function from a domain to truth values.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Assignment {
    domain: Vec<PropSymbol>,
    values: Vec<bool>,
}

impl Assignment {
    /// Builds an assignment from `(symbol, value)` pairs; each symbol once.
    pub fn new(pairs: &[(&str, bool)]) -> Result<Assignment> {
        let mut pairs: Vec<(PropSymbol, bool)> =
            pairs.iter().map(|(s, v)| (PropSymbol::new(s), *v)).collect();
        pairs.sort();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Malformed("assignment lists a symbol twice".into()));
        }
        let (domain, values) = pairs.into_iter().unzip();
        Ok(Assignment { domain, values })
    }

    pub fn domain(&self) -> &[PropSymbol] {
        &self.domain
    }

    pub fn get(&self, p: &PropSymbol) -> Option<bool> {
        self.domain.binary_search(p).ok().map(|i| self.values[i])
    }
}

/// A finite set of assignments sharing one domain.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PropTeam {
    domain: Vec<PropSymbol>,
    rows: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct TeamFile {
    domain: Vec<String>,
    rows: Vec<Vec<u8>>,
}

fn canonical_domain(domain: &[PropSymbol]) -> Result<Vec<PropSymbol>> {
    let mut sorted = domain.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Malformed("domain lists a symbol twice".into()));
    }
    if sorted.len() > MAX_DOMAIN_BITS {
        return Err(Error::Malformed(format!(
            "domains of more than {MAX_DOMAIN_BITS} symbols are not supported"
        )));
    }
    Ok(sorted)
}

impl PropTeam {
    /// Builds a team; `rows[i][j]` is the value of `domain[j]`. The domain is
    /// reordered canonically and duplicate rows are rejected.
    pub fn new(domain: &[PropSymbol], rows: &[Vec<bool>]) -> Result<PropTeam> {
        let sorted = canonical_domain(domain)?;
        let n = sorted.len();
        let column: Vec<usize> = domain
            .iter()
            .map(|p| sorted.binary_search(p).expect("symbol is in its own domain"))
            .collect();
        let mut codes = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != n {
                return Err(Error::Malformed(format!(
                    "row has {} values but the domain has {n} symbols",
                    row.len()
                )));
            }
            let mut code = 0u64;
            for (j, &v) in row.iter().enumerate() {
                if v {
                    code |= 1 << (n - 1 - column[j]);
                }
            }
            codes.push(code);
        }
        codes.sort_unstable();
        if codes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Malformed("team contains a duplicate row".into()));
        }
        Ok(PropTeam { domain: sorted, rows: codes })
    }

    pub fn empty(domain: &[PropSymbol]) -> Result<PropTeam> {
        Ok(PropTeam {
            domain: canonical_domain(domain)?,
            rows: Vec::new(),
        })
    }

    pub fn domain(&self) -> &[PropSymbol] {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn value(&self, code: u64, col: usize) -> bool {
        (code >> (self.domain.len() - 1 - col)) & 1 == 1
    }

    /// Member assignments in lexicographic order.
    pub fn rows(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.rows.iter().map(|&code| Assignment {
            domain: self.domain.clone(),
            values: (0..self.domain.len()).map(|c| self.value(code, c)).collect(),
        })
    }

    /// The subteam made of the rows whose positions (in [`PropTeam::rows`]
    /// order) are set in `mask`.
    pub fn subteam(&self, mask: u64) -> PropTeam {
        PropTeam {
            domain: self.domain.clone(),
            rows: self
                .rows
                .iter()
                .enumerate()
                .filter(|(i, _)| *i < 64 && (mask >> i) & 1 == 1)
                .map(|(_, &c)| c)
                .collect(),
        }
    }

    pub fn contains(&self, s: &Assignment) -> bool {
        if s.domain != self.domain {
            return false;
        }
        let n = self.domain.len();
        let code = s
            .values
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &v)| acc | ((v as u64) << (n - 1 - j)));
        self.rows.binary_search(&code).is_ok()
    }

    fn column(&self, p: &PropSymbol) -> Result<usize> {
        self.domain
            .binary_search(p)
            .map_err(|_| Error::DomainMismatch(p.name().to_string()))
    }

    fn check_symbols(&self, f: &PropFormula) -> Result<()> {
        for p in f.symbols() {
            self.column(&p)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = TeamFile {
            domain: self.domain.iter().map(|p| p.name().to_string()).collect(),
            rows: self
                .rows
                .iter()
                .map(|&code| (0..self.domain.len()).map(|c| self.value(code, c) as u8).collect())
                .collect(),
        };
        serde_json::to_string(&file).expect("team serialises")
    }

    pub fn from_json(text: &str) -> Result<PropTeam> {
        let file: TeamFile =
            serde_json::from_str(text).map_err(|e| Error::Malformed(format!("team file: {e}")))?;
        let mut domain = Vec::with_capacity(file.domain.len());
        for name in &file.domain {
            domain.push(symbol_from_name(name)?);
        }
        let rows = file
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| match v {
                        0 => Ok(false),
                        1 => Ok(true),
                        _ => Err(Error::Malformed(format!("row value {v} is not 0 or 1"))),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PropTeam::new(&domain, &rows)
    }
}

pub(crate) fn symbol_from_name(name: &str) -> Result<PropSymbol> {
    let mut chars = name.chars();
    let valid = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "dep"
        && name != "ior";
    if valid {
        Ok(PropSymbol::new(name))
    } else {
        Err(Error::Malformed(format!("`{name}` is not a valid proposition symbol")))
    }
}

/// Classical truth of a dependence-free formula under one assignment.
pub fn pl_pointwise(s: &Assignment, f: &PropFormula) -> Result<bool> {
    let value = |p: &PropSymbol| s.get(p).ok_or_else(|| Error::DomainMismatch(p.name().to_string()));
    Ok(match f {
        PropFormula::Atom(p) => value(p)?,
        PropFormula::NegAtom(p) => !value(p)?,
        PropFormula::And(l, r) => pl_pointwise(s, l)? & pl_pointwise(s, r)?,
        PropFormula::Or(l, r) => pl_pointwise(s, l)? | pl_pointwise(s, r)?,
        PropFormula::Dep(..) => {
            return Err(Error::Fragment {
                expected: "PL",
                reason: "dependence atoms have no pointwise reading".into(),
            })
        }
    })
}

/// The team of all assignments over `domain`.
pub fn max_team(domain: &[PropSymbol], settings: &Settings) -> Result<PropTeam> {
    let sorted = canonical_domain(domain)?;
    if sorted.len() > settings.max_domain {
        return Err(Error::guard("max-team", sorted.len() as u128, settings.max_domain as u128));
    }
    Ok(PropTeam {
        rows: (0..1u64 << sorted.len()).collect(),
        domain: sorted,
    })
}

/// Team-semantics truth `X ⊨ f`.
///
/// Works on the downset of satisfying subteams: a disjunction holds on `X`
/// iff some maximal subteam `A` satisfying the left disjunct leaves a
/// remainder `X ∖ A` satisfying the right one. This is exact for PD because
/// satisfaction is closed under subteams.
pub fn pt_eval(team: &PropTeam, f: &PropFormula, settings: &Settings) -> Result<bool> {
    team.check_symbols(f)?;
    let engine = DownsetEngine { team, limit: settings.max_antichain };
    let mut all = Set::with_capacity(team.len());
    all.insert_range(..);
    engine.holds(f, &all)
}

struct DownsetEngine<'a> {
    team: &'a PropTeam,
    limit: usize,
}

impl DownsetEngine<'_> {
    fn literal(&self, p: &PropSymbol, positive: bool, within: &Set) -> Set {
        let col = self.team.column(p).expect("symbols checked on entry");
        let mut out = Set::with_capacity(within.len());
        out.extend(within.ones().filter(|&i| self.team.value(self.team.rows[i], col) == positive));
        out
    }

    fn holds(&self, f: &PropFormula, sub: &Set) -> Result<bool> {
        Ok(match f {
            PropFormula::Atom(p) => self.literal(p, true, sub) == *sub,
            PropFormula::NegAtom(p) => self.literal(p, false, sub) == *sub,
            PropFormula::And(l, r) => self.holds(l, sub)? && self.holds(r, sub)?,
            PropFormula::Or(l, r) => {
                for a in self.maxima(l, sub)? {
                    let mut rest = sub.clone();
                    rest.difference_with(&a);
                    if self.holds(r, &rest)? {
                        return Ok(true);
                    }
                }
                false
            }
            PropFormula::Dep(args, q) => {
                let key_cols: Vec<usize> = args.iter().map(|a| self.team.column(a)).collect::<Result<_>>()?;
                let qc = self.team.column(q)?;
                let mut seen: HashMap<u64, bool> = HashMap::new();
                for i in sub.ones() {
                    let code = self.team.rows[i];
                    let key = self.key(code, &key_cols);
                    let v = self.team.value(code, qc);
                    if *seen.entry(key).or_insert(v) != v {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }

    fn key(&self, code: u64, cols: &[usize]) -> u64 {
        cols.iter()
            .fold(0u64, |acc, &c| (acc << 1) | self.team.value(code, c) as u64)
    }

    /// Maximal subteams of `within` satisfying `f`.
    fn maxima(&self, f: &PropFormula, within: &Set) -> Result<Vec<Set>> {
        Ok(match f {
            PropFormula::Atom(p) => vec![self.literal(p, true, within)],
            PropFormula::NegAtom(p) => vec![self.literal(p, false, within)],
            PropFormula::And(l, r) => antichain::meet(&self.maxima(l, within)?, &self.maxima(r, within)?, self.limit)?,
            PropFormula::Or(l, r) => antichain::join(&self.maxima(l, within)?, &self.maxima(r, within)?, self.limit)?,
            PropFormula::Dep(args, q) => {
                let key_cols: Vec<usize> = args.iter().map(|a| self.team.column(a)).collect::<Result<_>>()?;
                let qc = self.team.column(q)?;
                let rows = &self.team.rows;
                antichain::dependence_maxima(
                    within,
                    |i| self.key(rows[i], &key_cols),
                    |i| self.team.value(rows[i], qc),
                    self.limit,
                )?
            }
        })
    }
}

/// Team-semantics truth by the literal definition: a disjunction enumerates
/// the ordered partitions `(Y, X ∖ Y)` of the team.
///
/// Independent of [`pt_eval`]; used as an oracle. Teams are limited to
/// `settings.max_split_rows` rows when the formula contains a disjunction.
pub fn pt_eval_by_splits(team: &PropTeam, f: &PropFormula, settings: &Settings) -> Result<bool> {
    team.check_symbols(f)?;
    let mut checker = SplitChecker::new(team, settings, f.has_or())?;
    let full = if team.len() == 64 { u64::MAX } else { (1u64 << team.len()) - 1 };
    Ok(checker.holds(f, full))
}

/// Split-enumerating evaluator over the subteams of one fixed team, memoised
/// by (subformula, subteam mask).
struct SplitChecker<'a> {
    team: &'a PropTeam,
    memo: HashMap<(usize, u64), bool>,
}

impl<'a> SplitChecker<'a> {
    fn new(team: &'a PropTeam, settings: &Settings, has_or: bool) -> Result<Self> {
        let limit = if has_or { settings.max_split_rows.min(63) } else { 64 };
        if team.len() > limit {
            return Err(Error::guard("max-split-rows", team.len() as u128, limit as u128));
        }
        Ok(SplitChecker { team, memo: HashMap::new() })
    }

    fn rows(&self, mask: u64) -> impl Iterator<Item = u64> + '_ {
        self.team
            .rows
            .iter()
            .enumerate()
            .filter(move |(i, _)| (mask >> i) & 1 == 1)
            .map(|(_, &c)| c)
    }

    fn value(&self, code: u64, p: &PropSymbol) -> bool {
        let col = self.team.column(p).expect("symbols checked on entry");
        self.team.value(code, col)
    }

    fn holds(&mut self, f: &PropFormula, mask: u64) -> bool {
        let key = (f as *const PropFormula as usize, mask);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = match f {
            PropFormula::Atom(p) => self.rows(mask).all(|c| self.value(c, p)),
            PropFormula::NegAtom(p) => self.rows(mask).all(|c| !self.value(c, p)),
            PropFormula::And(l, r) => self.holds(l, mask) && self.holds(r, mask),
            PropFormula::Or(l, r) => {
                // all submasks y of mask, including 0 and mask itself
                let mut y = mask;
                loop {
                    if self.holds(l, y) && self.holds(r, mask & !y) {
                        break true;
                    }
                    if y == 0 {
                        break false;
                    }
                    y = (y - 1) & mask;
                }
            }
            PropFormula::Dep(args, q) => {
                let rows: Vec<u64> = self.rows(mask).collect();
                rows.iter().all(|&s| {
                    rows.iter().all(|&t| {
                        !args.iter().all(|a| self.value(s, a) == self.value(t, a))
                            || self.value(s, q) == self.value(t, q)
                    })
                })
            }
        };
        self.memo.insert(key, v);
        v
    }
}

/// PD validity via the maximal team over the formula's own symbols.
pub fn pd_valid(f: &PropFormula, settings: &Settings) -> Result<bool> {
    let domain: Vec<PropSymbol> = f.symbols().into_iter().collect();
    pt_eval(&max_team(&domain, settings)?, f, settings)
}

/// PD validity by checking every team over `domain` (at most 4 symbols) with
/// the split-enumerating evaluator.
pub fn pd_valid_bruteforce(f: &PropFormula, domain: &[PropSymbol]) -> Result<bool> {
    const LIMIT: usize = 4;
    let sorted = canonical_domain(domain)?;
    if sorted.len() > LIMIT {
        return Err(Error::guard("bruteforce-domain", sorted.len() as u128, LIMIT as u128));
    }
    let universe = PropTeam {
        rows: (0..1u64 << sorted.len()).collect(),
        domain: sorted,
    };
    universe.check_symbols(f)?;
    let settings = Settings { max_split_rows: 16, ..Settings::default() };
    let mut checker = SplitChecker::new(&universe, &settings, f.has_or())?;
    let teams = 1u64 << universe.len();
    Ok((0..teams).all(|mask| checker.holds(f, mask)))
}

/// Outcome of a satisfiability query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(PropTeam),
    Unsat,
}

/// PD satisfiability. Without `require_nonempty` the empty team always
/// witnesses; otherwise singleton teams are searched in lexicographic order,
/// which suffices because any nonempty satisfying team has a satisfying
/// singleton subteam.
pub fn pd_sat(f: &PropFormula, require_nonempty: bool, settings: &Settings) -> Result<SatResult> {
    let domain: Vec<PropSymbol> = f.symbols().into_iter().collect();
    if !require_nonempty {
        return Ok(SatResult::Sat(PropTeam::empty(&domain)?));
    }
    let full = max_team(&domain, settings)?;
    for i in 0..full.len() {
        let single = full.subteam(1 << i);
        if pt_eval(&single, f, settings)? {
            return Ok(SatResult::Sat(single));
        }
    }
    Ok(SatResult::Unsat)
}
