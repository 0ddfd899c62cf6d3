//! Kripke structures, world teams and modal team semantics.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::antichain::{self, Set};
use crate::error::{Error, Result};
use crate::formula::{ModalFormula, PropSymbol};
use crate::prop_team::symbol_from_name;
use crate::settings::Settings;

/// `K = (W, R, V)` over a finite, nonempty set of named worlds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeStructure {
    worlds: Vec<String>,
    index: HashMap<String, usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    valuation: BTreeMap<PropSymbol, Set>,
}

/// A subset of the worlds of one structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WorldTeam {
    members: Set,
}

#[derive(Serialize, Deserialize)]
struct KripkeFile {
    worlds: Vec<String>,
    edges: Vec<[String; 2]>,
    valuation: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    team: Option<Vec<String>>,
}

/// Which side of a disjoint union a team comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn tag(self) -> &'static str {
        match self {
            Side::Left => "L:",
            Side::Right => "R:",
        }
    }
}

impl KripkeStructure {
    pub fn new<S: AsRef<str>>(
        worlds: &[S],
        edges: &[(S, S)],
        valuation: &[(S, Vec<S>)],
    ) -> Result<KripkeStructure> {
        if worlds.is_empty() {
            return Err(Error::Malformed("a Kripke structure needs at least one world".into()));
        }
        let mut index = HashMap::with_capacity(worlds.len());
        for (i, w) in worlds.iter().enumerate() {
            if index.insert(w.as_ref().to_string(), i).is_some() {
                return Err(Error::Malformed(format!("world `{}` is listed twice", w.as_ref())));
            }
        }
        let lookup = |w: &str| index.get(w).copied().ok_or_else(|| Error::UnknownWorld(w.to_string()));
        let n = worlds.len();
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (a, b) in edges {
            succ[lookup(a.as_ref())?].insert(lookup(b.as_ref())?);
        }
        let mut val = BTreeMap::new();
        for (p, ws) in valuation {
            let sym = symbol_from_name(p.as_ref())?;
            let mut set = Set::with_capacity(n);
            for w in ws {
                set.insert(lookup(w.as_ref())?);
            }
            if val.insert(sym, set).is_some() {
                return Err(Error::Malformed(format!("valuation lists `{}` twice", p.as_ref())));
            }
        }
        Ok(Self::from_parts(
            worlds.iter().map(|w| w.as_ref().to_string()).collect(),
            succ.into_iter().map(|s| s.into_iter().collect()).collect(),
            val,
        ))
    }

    pub(crate) fn from_parts(
        worlds: Vec<String>,
        succ: Vec<Vec<usize>>,
        valuation: BTreeMap<PropSymbol, Set>,
    ) -> KripkeStructure {
        let n = worlds.len();
        let mut pred = vec![Vec::new(); n];
        for (v, targets) in succ.iter().enumerate() {
            for &w in targets {
                pred[w].push(v);
            }
        }
        let index = worlds.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        KripkeStructure { worlds, index, succ, pred, valuation }
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_index(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownWorld(name.to_string()))
    }

    pub fn successors(&self, w: usize) -> &[usize] {
        &self.succ[w]
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(v, ws)| ws.iter().map(move |&w| (v, w)))
    }

    pub fn symbols(&self) -> impl Iterator<Item = &PropSymbol> {
        self.valuation.keys()
    }

    /// Worlds where `p` holds, or `None` if `p` is not in the valuation.
    pub fn valuation_of(&self, p: &PropSymbol) -> Option<Vec<usize>> {
        self.valuation.get(p).map(|s| s.ones().collect())
    }

    pub fn team<S: AsRef<str>>(&self, names: &[S]) -> Result<WorldTeam> {
        let mut members = self.empty_set();
        for name in names {
            members.insert(self.world_index(name.as_ref())?);
        }
        Ok(WorldTeam { members })
    }

    pub fn team_from_indices(&self, indices: impl IntoIterator<Item = usize>) -> Result<WorldTeam> {
        let mut members = self.empty_set();
        for i in indices {
            if i >= self.world_count() {
                return Err(Error::UnknownWorld(format!("#{i}")));
            }
            members.insert(i);
        }
        Ok(WorldTeam { members })
    }

    pub fn full_team(&self) -> WorldTeam {
        let mut members = self.empty_set();
        members.insert_range(..);
        WorldTeam { members }
    }

    fn empty_set(&self) -> Set {
        Set::with_capacity(self.world_count())
    }

    fn check_team(&self, t: &WorldTeam) -> Result<()> {
        if t.members.len() != self.world_count() {
            return Err(Error::UnknownWorld("team belongs to a different structure".into()));
        }
        Ok(())
    }

    fn check_symbols(&self, f: &ModalFormula) -> Result<()> {
        for p in f.symbols() {
            if !self.valuation.contains_key(&p) {
                return Err(Error::DomainMismatch(p.name().to_string()));
            }
        }
        Ok(())
    }

    fn image_set(&self, t: &Set) -> Set {
        let mut out = self.empty_set();
        for v in t.ones() {
            out.extend(self.succ[v].iter().copied());
        }
        out
    }

    fn preimage_set(&self, t: &Set) -> Set {
        let mut out = self.empty_set();
        for v in t.ones() {
            out.extend(self.pred[v].iter().copied());
        }
        out
    }

    pub fn to_json(&self, team: Option<&WorldTeam>) -> String {
        let file = KripkeFile {
            worlds: self.worlds.clone(),
            edges: self
                .edges()
                .map(|(a, b)| [self.worlds[a].clone(), self.worlds[b].clone()])
                .collect(),
            valuation: self
                .valuation
                .iter()
                .map(|(p, s)| (p.name().to_string(), s.ones().map(|w| self.worlds[w].clone()).collect()))
                .collect(),
            team: team.map(|t| t.members.ones().map(|w| self.worlds[w].clone()).collect()),
        };
        serde_json::to_string(&file).expect("model serialises")
    }

    /// Reads a model file; the team defaults to all worlds when absent.
    pub fn from_json(text: &str) -> Result<(KripkeStructure, WorldTeam)> {
        let file: KripkeFile =
            serde_json::from_str(text).map_err(|e| Error::Malformed(format!("model file: {e}")))?;
        let edges: Vec<(String, String)> =
            file.edges.into_iter().map(|[a, b]| (a, b)).collect();
        let valuation: Vec<(String, Vec<String>)> = file.valuation.into_iter().collect();
        let k = KripkeStructure::new(&file.worlds, &edges, &valuation)?;
        let team = match file.team {
            Some(names) => k.team(&names)?,
            None => k.full_team(),
        };
        Ok((k, team))
    }
}

impl WorldTeam {
    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn contains(&self, w: usize) -> bool {
        self.members.contains(w)
    }

    pub fn is_subset(&self, other: &WorldTeam) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn names<'k>(&self, k: &'k KripkeStructure) -> Vec<&'k str> {
        self.members.ones().map(|w| k.worlds[w].as_str()).collect()
    }
}

/// `R[T]`: the worlds reachable in one step from `T`.
pub fn image(k: &KripkeStructure, t: &WorldTeam) -> Result<WorldTeam> {
    k.check_team(t)?;
    Ok(WorldTeam { members: k.image_set(&t.members) })
}

/// `R⁻¹[T]`: the worlds with a successor in `T`.
pub fn preimage(k: &KripkeStructure, t: &WorldTeam) -> Result<WorldTeam> {
    k.check_team(t)?;
    Ok(WorldTeam { members: k.preimage_set(&t.members) })
}

/// `T[R]S`: every member of `T` has a successor in `S` and every member of
/// `S` a predecessor in `T`.
pub fn is_successor_team(k: &KripkeStructure, t: &WorldTeam, s: &WorldTeam) -> Result<bool> {
    k.check_team(t)?;
    k.check_team(s)?;
    Ok(s.members.is_subset(&k.image_set(&t.members)) && t.members.is_subset(&k.preimage_set(&s.members)))
}

fn pure_ml_required() -> Error {
    Error::Fragment {
        expected: "ML",
        reason: "pointwise evaluation needs a formula without `ior` and dependence atoms".into(),
    }
}

/// The set of worlds satisfying a pure ML formula under pointed semantics.
pub(crate) fn extension(k: &KripkeStructure, f: &ModalFormula) -> Result<Set> {
    Ok(match f {
        ModalFormula::Atom(p) => k.valuation.get(p).cloned().ok_or_else(|| Error::DomainMismatch(p.name().to_string()))?,
        ModalFormula::NegAtom(p) => {
            let mut s = k.valuation.get(p).cloned().ok_or_else(|| Error::DomainMismatch(p.name().to_string()))?;
            s.toggle_range(..);
            s
        }
        ModalFormula::And(l, r) => {
            let mut s = extension(k, l)?;
            s.intersect_with(&extension(k, r)?);
            s
        }
        ModalFormula::Or(l, r) => {
            let mut s = extension(k, l)?;
            s.union_with(&extension(k, r)?);
            s
        }
        ModalFormula::Diamond(g) => k.preimage_set(&extension(k, g)?),
        ModalFormula::Box(g) => {
            let mut outside = extension(k, g)?;
            outside.toggle_range(..);
            let mut s = k.preimage_set(&outside);
            s.toggle_range(..);
            s
        }
        ModalFormula::IDis(..) | ModalFormula::MDep(..) => return Err(pure_ml_required()),
    })
}

/// Standard pointed Kripke semantics `K, w ⊨ f` for pure ML formulas.
pub fn ml_point_eval(k: &KripkeStructure, world: &str, f: &ModalFormula) -> Result<bool> {
    let w = k.world_index(world)?;
    ml_point_eval_at(k, w, f)
}

pub(crate) fn ml_point_eval_at(k: &KripkeStructure, w: usize, f: &ModalFormula) -> Result<bool> {
    if !f.is_pure_ml() {
        return Err(pure_ml_required());
    }
    k.check_symbols(f)?;
    Ok(extension(k, f)?.contains(w))
}

/// Team-semantics truth `K, T ⊨ f` for ML, ML(⊻), MDL and EMDL.
///
/// Subformulas are evaluated through their maximal satisfying subteams. For
/// `◇g` the team needs successors inside a single maximal `g`-team `M`
/// (then `R[T] ∩ M` witnesses `T[R]T'`); for `□g`, `R[T]` must fit inside
/// one. Disjunctions pick a maximal subteam for the left disjunct and test
/// the remainder against the right.
pub fn mt_eval(k: &KripkeStructure, t: &WorldTeam, f: &ModalFormula, settings: &Settings) -> Result<bool> {
    k.check_team(t)?;
    k.check_symbols(f)?;
    f.check_dep_arguments()?;
    let engine = ModalEngine { k, limit: settings.max_antichain, cache: RefCell::new(HashMap::new()) };
    engine.holds(f, &t.members)
}

/// Maximal subteams of `K` satisfying `f`; `T ⊨ f` iff `T` is inside one.
pub fn satisfying_maxima(k: &KripkeStructure, f: &ModalFormula, settings: &Settings) -> Result<Vec<WorldTeam>> {
    k.check_symbols(f)?;
    f.check_dep_arguments()?;
    let engine = ModalEngine { k, limit: settings.max_antichain, cache: RefCell::new(HashMap::new()) };
    Ok(engine.global(f)?.into_iter().map(|members| WorldTeam { members }).collect())
}

struct ModalEngine<'a> {
    k: &'a KripkeStructure,
    limit: usize,
    // maxima over all of W, keyed by subformula address
    cache: RefCell<HashMap<usize, Vec<Set>>>,
}

impl ModalEngine<'_> {
    fn valuation(&self, p: &PropSymbol) -> &Set {
        &self.k.valuation[p]
    }

    fn dep_values(&self, args: &[ModalFormula], target: &ModalFormula) -> Result<(Vec<Set>, Set)> {
        let exts = args.iter().map(|a| extension(self.k, a)).collect::<Result<Vec<_>>>()?;
        Ok((exts, extension(self.k, target)?))
    }

    fn holds(&self, f: &ModalFormula, t: &Set) -> Result<bool> {
        Ok(match f {
            ModalFormula::Atom(p) => t.is_subset(self.valuation(p)),
            ModalFormula::NegAtom(p) => t.is_disjoint(self.valuation(p)),
            ModalFormula::And(l, r) => self.holds(l, t)? && self.holds(r, t)?,
            ModalFormula::Or(l, r) => {
                for a in self.maxima(l, t)? {
                    let mut rest = t.clone();
                    rest.difference_with(&a);
                    if self.holds(r, &rest)? {
                        return Ok(true);
                    }
                }
                false
            }
            ModalFormula::IDis(l, r) => self.holds(l, t)? || self.holds(r, t)?,
            ModalFormula::Diamond(g) => {
                let maxima = self.global(g)?;
                maxima.iter().any(|m| t.is_subset(&self.k.preimage_set(m)))
            }
            ModalFormula::Box(g) => self.holds(g, &self.k.image_set(t))?,
            ModalFormula::MDep(args, target) => {
                let (exts, tgt) = self.dep_values(args, target)?;
                let mut seen: HashMap<Vec<bool>, bool> = HashMap::new();
                for w in t.ones() {
                    let key: Vec<bool> = exts.iter().map(|e| e.contains(w)).collect();
                    let v = tgt.contains(w);
                    if *seen.entry(key).or_insert(v) != v {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }

    fn global(&self, f: &ModalFormula) -> Result<Vec<Set>> {
        let key = f as *const ModalFormula as usize;
        if let Some(hit) = self.cache.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let mut all = self.k.empty_set();
        all.insert_range(..);
        let out = self.maxima(f, &all)?;
        self.cache.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    fn maxima(&self, f: &ModalFormula, within: &Set) -> Result<Vec<Set>> {
        let restrict = |mut s: Set| {
            s.intersect_with(within);
            s
        };
        Ok(match f {
            ModalFormula::Atom(p) => vec![restrict(self.valuation(p).clone())],
            ModalFormula::NegAtom(p) => {
                let mut s = within.clone();
                s.difference_with(self.valuation(p));
                vec![s]
            }
            ModalFormula::And(l, r) => antichain::meet(&self.maxima(l, within)?, &self.maxima(r, within)?, self.limit)?,
            ModalFormula::Or(l, r) => antichain::join(&self.maxima(l, within)?, &self.maxima(r, within)?, self.limit)?,
            ModalFormula::IDis(l, r) => antichain::union(self.maxima(l, within)?, self.maxima(r, within)?, self.limit)?,
            ModalFormula::Diamond(g) => antichain::maximal(
                self.global(g)?.iter().map(|m| restrict(self.k.preimage_set(m))).collect(),
            ),
            ModalFormula::Box(g) => antichain::maximal(
                self.global(g)?
                    .iter()
                    .map(|m| {
                        let mut outside = m.clone();
                        outside.toggle_range(..);
                        let mut s = self.k.preimage_set(&outside);
                        s.toggle_range(..);
                        restrict(s)
                    })
                    .collect(),
            ),
            ModalFormula::MDep(args, target) => {
                let (exts, tgt) = self.dep_values(args, target)?;
                if exts.len() > 64 {
                    return Err(Error::guard("dep-arity", exts.len() as u128, 64));
                }
                antichain::dependence_maxima(
                    within,
                    |w| exts.iter().fold(0u64, |acc, e| (acc << 1) | e.contains(w) as u64),
                    |w| tgt.contains(w),
                    self.limit,
                )?
            }
        })
    }
}

/// Team-semantics truth by the literal clauses: `∨` enumerates ordered
/// partitions of the team, `◇` enumerates successor-choice functions, and
/// dependence atoms evaluate their arguments on singleton teams.
///
/// Independent of [`mt_eval`]; used as an oracle on small models (at most 64
/// worlds).
pub fn mt_eval_by_choices(
    k: &KripkeStructure,
    t: &WorldTeam,
    f: &ModalFormula,
    settings: &Settings,
) -> Result<bool> {
    k.check_team(t)?;
    k.check_symbols(f)?;
    f.check_dep_arguments()?;
    if k.world_count() > 64 {
        return Err(Error::guard("choice-evaluator-worlds", k.world_count() as u128, 64));
    }
    let mask = t.members.ones().fold(0u64, |acc, w| acc | 1 << w);
    ChoiceChecker { k, settings }.holds(f, mask)
}

struct ChoiceChecker<'a> {
    k: &'a KripkeStructure,
    settings: &'a Settings,
}

fn members(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| (mask >> i) & 1 == 1)
}

impl ChoiceChecker<'_> {
    fn holds(&self, f: &ModalFormula, t: u64) -> Result<bool> {
        Ok(match f {
            ModalFormula::Atom(p) => members(t).all(|w| self.k.valuation[p].contains(w)),
            ModalFormula::NegAtom(p) => members(t).all(|w| !self.k.valuation[p].contains(w)),
            ModalFormula::And(l, r) => self.holds(l, t)? && self.holds(r, t)?,
            ModalFormula::IDis(l, r) => self.holds(l, t)? || self.holds(r, t)?,
            ModalFormula::Or(l, r) => {
                let size = t.count_ones() as usize;
                if size > self.settings.max_split_rows {
                    return Err(Error::guard("max-split-rows", size as u128, self.settings.max_split_rows as u128));
                }
                let mut y = t;
                loop {
                    if self.holds(l, y)? && self.holds(r, t & !y)? {
                        break true;
                    }
                    if y == 0 {
                        break false;
                    }
                    y = (y - 1) & t;
                }
            }
            ModalFormula::Diamond(g) => {
                let options: Vec<&[usize]> = members(t).map(|w| self.k.succ[w].as_slice()).collect();
                if options.iter().any(|o| o.is_empty()) {
                    return Ok(false);
                }
                let count = options.iter().fold(1u128, |acc, o| acc.saturating_mul(o.len() as u128));
                if count > self.settings.max_choices {
                    return Err(Error::guard("max-choices", count, self.settings.max_choices));
                }
                let mut counters = vec![0usize; options.len()];
                loop {
                    let image = options.iter().zip(&counters).fold(0u64, |acc, (o, &c)| acc | 1 << o[c]);
                    if self.holds(g, image)? {
                        break true;
                    }
                    // odometer step
                    let mut i = 0;
                    loop {
                        if i == counters.len() {
                            return Ok(false);
                        }
                        counters[i] += 1;
                        if counters[i] < options[i].len() {
                            break;
                        }
                        counters[i] = 0;
                        i += 1;
                    }
                }
            }
            ModalFormula::Box(g) => {
                let image = members(t).fold(0u64, |acc, w| self.k.succ[w].iter().fold(acc, |a, &v| a | 1 << v));
                self.holds(g, image)?
            }
            ModalFormula::MDep(args, target) => {
                let worlds: Vec<usize> = members(t).collect();
                let mut values = Vec::with_capacity(worlds.len());
                for &w in &worlds {
                    let mut key = Vec::with_capacity(args.len());
                    for a in args {
                        key.push(self.holds(a, 1 << w)?);
                    }
                    values.push((key, self.holds(target, 1 << w)?));
                }
                values.iter().all(|(ka, va)| values.iter().all(|(kb, vb)| ka != kb || va == vb))
            }
        })
    }
}

/// Block index of every world of `a ⊎ b` under the greatest bisimulation;
/// worlds of `b` come after those of `a`.
fn bisimulation_blocks(a: &KripkeStructure, b: &KripkeStructure) -> Vec<usize> {
    let n = a.world_count();
    let total = n + b.world_count();
    let symbols: BTreeSet<&PropSymbol> = a.valuation.keys().chain(b.valuation.keys()).collect();
    let holds = |w: usize, p: &PropSymbol| {
        if w < n {
            a.valuation.get(p).is_some_and(|s| s.contains(w))
        } else {
            b.valuation.get(p).is_some_and(|s| s.contains(w - n))
        }
    };
    let succ = |w: usize| -> Vec<usize> {
        if w < n {
            a.succ[w].clone()
        } else {
            b.succ[w - n].iter().map(|v| v + n).collect()
        }
    };
    let renumber = |keys: Vec<Vec<usize>>| -> Vec<usize> {
        let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for key in &keys {
            let next = ids.len();
            ids.entry(key.clone()).or_insert(next);
        }
        keys.iter().map(|k| ids[k]).collect()
    };
    let mut blocks = renumber(
        (0..total)
            .map(|w| symbols.iter().map(|p| holds(w, p) as usize).collect())
            .collect(),
    );
    let successors: Vec<Vec<usize>> = (0..total).map(succ).collect();
    loop {
        let count = blocks.iter().collect::<BTreeSet<_>>().len();
        let refined = renumber(
            (0..total)
                .map(|w| {
                    let targets: BTreeSet<usize> = successors[w].iter().map(|&v| blocks[v]).collect();
                    std::iter::once(blocks[w]).chain(targets).collect()
                })
                .collect(),
        );
        let refined_count = refined.iter().collect::<BTreeSet<_>>().len();
        blocks = refined;
        if refined_count == count {
            return blocks;
        }
    }
}

/// Whether `(a, w)` and `(b, v)` are bisimilar. Symbols missing from one
/// valuation count as false everywhere in that structure.
pub fn bisimilar(a: &KripkeStructure, w: &str, b: &KripkeStructure, v: &str) -> Result<bool> {
    let (wi, vi) = (a.world_index(w)?, b.world_index(v)?);
    let blocks = bisimulation_blocks(a, b);
    Ok(blocks[wi] == blocks[a.world_count() + vi])
}

/// Team bisimilarity: every member of each team has a bisimilar partner in
/// the other.
pub fn team_bisimilar(a: &KripkeStructure, t: &WorldTeam, b: &KripkeStructure, s: &WorldTeam) -> Result<bool> {
    a.check_team(t)?;
    b.check_team(s)?;
    let blocks = bisimulation_blocks(a, b);
    let n = a.world_count();
    let left: BTreeSet<usize> = t.members.ones().map(|w| blocks[w]).collect();
    let right: BTreeSet<usize> = s.members.ones().map(|v| blocks[n + v]).collect();
    Ok(left == right)
}

/// The disjoint union, with worlds renamed `L:<w>` and `R:<w>`.
pub fn disjoint_union(a: &KripkeStructure, b: &KripkeStructure) -> KripkeStructure {
    let n = a.world_count();
    let total = n + b.world_count();
    let worlds: Vec<String> = a
        .worlds
        .iter()
        .map(|w| format!("{}{w}", Side::Left.tag()))
        .chain(b.worlds.iter().map(|w| format!("{}{w}", Side::Right.tag())))
        .collect();
    let succ: Vec<Vec<usize>> = a
        .succ
        .iter()
        .cloned()
        .chain(b.succ.iter().map(|ws| ws.iter().map(|v| v + n).collect()))
        .collect();
    let mut valuation: BTreeMap<PropSymbol, Set> = BTreeMap::new();
    for (p, s) in &a.valuation {
        let entry = valuation.entry(p.clone()).or_insert_with(|| Set::with_capacity(total));
        entry.extend(s.ones());
    }
    for (p, s) in &b.valuation {
        let entry = valuation.entry(p.clone()).or_insert_with(|| Set::with_capacity(total));
        entry.extend(s.ones().map(|v| v + n));
    }
    KripkeStructure::from_parts(worlds, succ, valuation)
}

/// Carries a team of one component into the disjoint union via the tag map.
pub fn lift_team(
    union: &KripkeStructure,
    side: Side,
    component: &KripkeStructure,
    t: &WorldTeam,
) -> Result<WorldTeam> {
    component.check_team(t)?;
    let names: Vec<String> = t.names(component).iter().map(|w| format!("{}{w}", side.tag())).collect();
    union.team(&names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_modal;

    fn edge_model() -> KripkeStructure {
        KripkeStructure::new(&["w", "v"], &[("w", "v")], &[("p", vec!["v"])]).unwrap()
    }

    fn check(k: &KripkeStructure, t: &WorldTeam, text: &str) -> bool {
        let f = parse_modal(text).unwrap();
        let s = Settings::default();
        let fast = mt_eval(k, t, &f, &s).unwrap();
        assert_eq!(fast, mt_eval_by_choices(k, t, &f, &s).unwrap(), "evaluators disagree on {text}");
        fast
    }

    #[test]
    fn image_and_preimage() {
        let k = edge_model();
        let w = k.team(&["w"]).unwrap();
        let v = k.team(&["v"]).unwrap();
        assert_eq!(image(&k, &w).unwrap(), v);
        assert!(image(&k, &v).unwrap().is_empty());
        assert_eq!(preimage(&k, &v).unwrap(), w);
    }

    #[test]
    fn successor_teams() {
        let k = edge_model();
        let w = k.team(&["w"]).unwrap();
        let v = k.team(&["v"]).unwrap();
        let none = k.team::<&str>(&[]).unwrap();
        assert!(is_successor_team(&k, &w, &v).unwrap());
        assert!(!is_successor_team(&k, &w, &none).unwrap());
        assert!(is_successor_team(&k, &none, &none).unwrap());
        assert!(!is_successor_team(&k, &v, &w).unwrap());
    }

    #[test]
    fn foreign_worlds_are_rejected() {
        let k = edge_model();
        assert!(matches!(k.team(&["x"]), Err(Error::UnknownWorld(_))));
        let other = KripkeStructure::new(&["a"], &[], &[]).unwrap();
        let t = other.full_team();
        assert!(image(&k, &t).is_err());
        assert!(KripkeStructure::new(&["a"], &[("a", "b")], &[]).is_err());
        assert!(KripkeStructure::new::<&str>(&[], &[], &[]).is_err());
    }

    #[test]
    fn dead_end_world() {
        let k = KripkeStructure::new(&["w"], &[], &[("p", vec![])]).unwrap();
        let t = k.full_team();
        assert!(check(&k, &t, "[] p"));
        assert!(!check(&k, &t, "<> p"));
        assert!(check(&k, &t, "[] (p & !p)"));
    }

    #[test]
    fn modal_dependence_through_shared_successor() {
        let k = KripkeStructure::new(
            &["w1", "w2", "u"],
            &[("w1", "u"), ("w2", "u")],
            &[("p", vec!["u"]), ("q", vec!["w1"])],
        )
        .unwrap();
        let t = k.team(&["w1", "w2"]).unwrap();
        assert!(!check(&k, &t, "dep(<> p; q)"));
        assert!(check(&k, &t, "dep(q; <> p)"));
        assert!(check(&k, &t, "dep(q; q)"));
        assert!(check(&k, &t, "dep(<>p; q) | dep(<>p; q)"));
    }

    #[test]
    fn pointed_semantics() {
        let k = edge_model();
        let f = parse_modal("<> p").unwrap();
        assert!(ml_point_eval(&k, "w", &f).unwrap());
        let k2 = KripkeStructure::new(&["w"], &[], &[("q", vec![])]).unwrap();
        assert!(ml_point_eval(&k2, "w", &parse_modal("[] q").unwrap()).unwrap());
        let k3 = KripkeStructure::new(&["w", "v"], &[("w", "v")], &[("p", vec![])]).unwrap();
        assert!(!ml_point_eval(&k3, "w", &f).unwrap());
        assert!(ml_point_eval(&k3, "w", &parse_modal("p ior q").unwrap()).is_err());
    }

    #[test]
    fn missing_valuation_is_an_error() {
        let k = edge_model();
        let f = parse_modal("q").unwrap();
        assert!(matches!(mt_eval(&k, &k.full_team(), &f, &Settings::default()), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn diamond_needs_one_successor_team() {
        // w1 -> a, w1 -> b, w2 -> b; only b satisfies p and the team must
        // route both members into a p-team.
        let k = KripkeStructure::new(
            &["w1", "w2", "a", "b"],
            &[("w1", "a"), ("w1", "b"), ("w2", "b")],
            &[("p", vec!["b"]), ("q", vec!["a", "b"])],
        )
        .unwrap();
        let t = k.team(&["w1", "w2"]).unwrap();
        assert!(check(&k, &t, "<> p"));
        assert!(check(&k, &t, "<> dep(; p)"));
        assert!(!check(&k, &t, "[] dep(; p)"));
        assert!(check(&k, &t, "[] q"));
        assert!(check(&k, &t, "<> p ior <> !p"));
    }

    #[test]
    fn bisimulation_examples() {
        let a = KripkeStructure::new(&["w"], &[], &[("p", vec!["w"])]).unwrap();
        let b = KripkeStructure::new(&["v"], &[], &[("p", vec!["v"])]).unwrap();
        assert!(bisimilar(&a, "w", &b, "v").unwrap());
        let c = KripkeStructure::new(&["x", "y"], &[("x", "y")], &[("p", vec!["x", "y"])]).unwrap();
        assert!(!bisimilar(&a, "w", &c, "x").unwrap());
        let lp = KripkeStructure::new(&["w"], &[("w", "w")], &[("p", vec!["w"])]).unwrap();
        let cyc = KripkeStructure::new(&["u", "v"], &[("u", "v"), ("v", "u")], &[("p", vec!["u", "v"])]).unwrap();
        assert!(bisimilar(&lp, "w", &cyc, "u").unwrap());
        assert!(bisimilar(&lp, "w", &cyc, "v").unwrap());
    }

    #[test]
    fn team_bisimulation_examples() {
        let a = KripkeStructure::new(&["w"], &[], &[("p", vec!["w"])]).unwrap();
        let b = KripkeStructure::new(&["v"], &[], &[("p", vec!["v"])]).unwrap();
        let empty_a = a.team::<&str>(&[]).unwrap();
        let empty_b = b.team::<&str>(&[]).unwrap();
        assert!(team_bisimilar(&a, &empty_a, &b, &empty_b).unwrap());
        assert!(!team_bisimilar(&a, &empty_a, &b, &b.full_team()).unwrap());
        assert!(team_bisimilar(&a, &a.full_team(), &b, &b.full_team()).unwrap());
    }

    #[test]
    fn disjoint_union_examples() {
        let a = KripkeStructure::new(&["w"], &[("w", "w")], &[("p", vec!["w"])]).unwrap();
        let b = KripkeStructure::new(&["w"], &[], &[("p", vec!["w"]), ("q", vec![])]).unwrap();
        let u = disjoint_union(&a, &b);
        assert_eq!(u.world_count(), 2);
        assert_eq!(u.edge_count(), a.edge_count() + b.edge_count());
        assert_eq!(u.worlds(), &["L:w".to_string(), "R:w".to_string()]);
        assert_eq!(u.valuation_of(&PropSymbol::new("p")), Some(vec![0, 1]));
        assert_eq!(u.valuation_of(&PropSymbol::new("q")), Some(vec![]));
        let t = lift_team(&u, Side::Right, &b, &b.full_team()).unwrap();
        assert_eq!(t.names(&u), vec!["R:w"]);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"worlds":["w1","w2"],"edges":[["w1","w2"]],"valuation":{"p":["w1"]},"team":["w1"]}"#;
        let (k, t) = KripkeStructure::from_json(text).unwrap();
        assert_eq!(t.names(&k), vec!["w1"]);
        assert_eq!(k.to_json(Some(&t)), text);
        let (_, all) = KripkeStructure::from_json(r#"{"worlds":["a","b"],"edges":[],"valuation":{}}"#).unwrap();
        assert_eq!(all.len(), 2);
        assert!(KripkeStructure::from_json(r#"{"worlds":["a"],"edges":[],"valuation":{},"team":["z"]}"#).is_err());
    }

    #[test]
    fn maxima_of_dependence() {
        let k = KripkeStructure::new(&["a", "b"], &[], &[("p", vec!["a"])]).unwrap();
        let m = satisfying_maxima(&k, &parse_modal("dep(; p)").unwrap(), &Settings::default()).unwrap();
        assert_eq!(m.len(), 2);
    }
}
