//! From EMDL to ML(⊻), selection-function elimination of `ior`, and validity
//! checking for ML, ML(⊻), MDL and EMDL.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formula::{dual, Fragment, ModalFormula, PropSymbol};
use crate::kripke::{self, KripkeStructure, WorldTeam};
use crate::settings::Settings;

/// Left or right disjunct of one `ior` occurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Choice {
    Left,
    Right,
}

/// One choice per `ior` occurrence, indexed by preorder position.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SelectionFunction {
    choices: Vec<Choice>,
}

impl SelectionFunction {
    pub fn new(choices: Vec<Choice>) -> SelectionFunction {
        SelectionFunction { choices }
    }

    pub fn choices(&self) -> &[Choice] {
        &self.choices
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    /// `0` for left, `1` for right, occurrence 0 first.
    pub fn bits(&self) -> String {
        self.choices.iter().map(|c| if *c == Choice::Left { '0' } else { '1' }).collect()
    }

    /// The selection at position `index` in the enumeration order.
    pub fn from_index(index: u64, occurrences: usize) -> SelectionFunction {
        let choices = (0..occurrences)
            .map(|j| {
                if (index >> (occurrences - 1 - j)) & 1 == 0 {
                    Choice::Left
                } else {
                    Choice::Right
                }
            })
            .collect();
        SelectionFunction { choices }
    }
}

impl fmt::Display for SelectionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.choices.is_empty() {
            f.write_str("-")
        } else {
            f.write_str(&self.bits())
        }
    }
}

/// A model with a team refuting a formula. Pointed countermodels use a
/// singleton team.
#[derive(Clone, Debug)]
pub struct Countermodel {
    pub model: KripkeStructure,
    pub team: WorldTeam,
}

impl Countermodel {
    /// The distinguished world of a pointed countermodel.
    pub fn point(&self) -> Option<usize> {
        if self.team.len() == 1 {
            self.team.indices().next()
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
pub enum ValidityVerdict {
    /// Valid; for formulas with `ior`, the least selection whose instance is valid.
    Valid(Option<SelectionFunction>),
    Invalid(Countermodel),
}

impl ValidityVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, ValidityVerdict::Valid(_))
    }
}

/// Bookkeeping from a disjunct search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub disjuncts_checked: u64,
}

/// `φ ↦ φ⁺`: replaces every dependence atom by a disjunction over the truth
/// values of its arguments, with `ψ ior dual(ψ)` for the target.
pub fn emdl_to_mliv(f: &ModalFormula, settings: &Settings) -> Result<ModalFormula> {
    match f.classify() {
        Some(frag) if frag.is_within(Fragment::Emdl) => {}
        _ => {
            return Err(Error::Fragment {
                expected: "EMDL",
                reason: "the translation needs a formula without `ior` whose dependence atoms have ML arguments".into(),
            })
        }
    }
    translate(f, settings)
}

fn translate(f: &ModalFormula, settings: &Settings) -> Result<ModalFormula> {
    Ok(match f {
        ModalFormula::Atom(_) | ModalFormula::NegAtom(_) => f.clone(),
        ModalFormula::And(l, r) => ModalFormula::and(translate(l, settings)?, translate(r, settings)?),
        ModalFormula::Or(l, r) => ModalFormula::or(translate(l, settings)?, translate(r, settings)?),
        ModalFormula::IDis(l, r) => ModalFormula::idis(translate(l, settings)?, translate(r, settings)?),
        ModalFormula::Diamond(g) => ModalFormula::diamond(translate(g, settings)?),
        ModalFormula::Box(g) => ModalFormula::boxed(translate(g, settings)?),
        ModalFormula::MDep(args, target) => {
            let n = args.len();
            if n > settings.max_dep_arity {
                return Err(Error::guard("max-dep-arity", n as u128, settings.max_dep_arity as u128));
            }
            let core = ModalFormula::idis((**target).clone(), dual(target)?);
            if n == 0 {
                return Ok(core);
            }
            let negated = args.iter().map(dual).collect::<Result<Vec<_>>>()?;
            let mut disjunction: Option<ModalFormula> = None;
            for row in 0..1u64 << n {
                let conj = (0..n)
                    .map(|i| {
                        if (row >> (n - 1 - i)) & 1 == 0 {
                            args[i].clone()
                        } else {
                            negated[i].clone()
                        }
                    })
                    .reduce(ModalFormula::and)
                    .expect("at least one argument");
                let term = ModalFormula::and(conj, core.clone());
                disjunction = Some(match disjunction {
                    None => term,
                    Some(acc) => ModalFormula::or(acc, term),
                });
            }
            disjunction.expect("at least one row")
        }
    })
}

/// Number of `ior` nodes in the formula.
pub fn idis_occurrences(g: &ModalFormula) -> usize {
    match g {
        ModalFormula::Atom(_) | ModalFormula::NegAtom(_) => 0,
        ModalFormula::And(l, r) | ModalFormula::Or(l, r) => idis_occurrences(l) + idis_occurrences(r),
        ModalFormula::IDis(l, r) => 1 + idis_occurrences(l) + idis_occurrences(r),
        ModalFormula::Diamond(h) | ModalFormula::Box(h) => idis_occurrences(h),
        ModalFormula::MDep(args, target) => {
            args.iter().map(idis_occurrences).sum::<usize>() + idis_occurrences(target)
        }
    }
}

/// Replaces each `ior` occurrence by the disjunct the selection picks.
pub fn apply_selection(g: &ModalFormula, sel: &SelectionFunction) -> Result<ModalFormula> {
    let expected = idis_occurrences(g);
    if sel.len() != expected {
        return Err(Error::Malformed(format!(
            "selection covers {} occurrences, formula has {expected}",
            sel.len()
        )));
    }
    let mut next = 0;
    Ok(substitute(g, &sel.choices, &mut next))
}

fn substitute(g: &ModalFormula, choices: &[Choice], next: &mut usize) -> ModalFormula {
    match g {
        ModalFormula::Atom(_) | ModalFormula::NegAtom(_) => g.clone(),
        ModalFormula::And(l, r) => {
            let l = substitute(l, choices, next);
            ModalFormula::and(l, substitute(r, choices, next))
        }
        ModalFormula::Or(l, r) => {
            let l = substitute(l, choices, next);
            ModalFormula::or(l, substitute(r, choices, next))
        }
        ModalFormula::IDis(l, r) => {
            let id = *next;
            *next += 1;
            if choices[id] == Choice::Left {
                let out = substitute(l, choices, next);
                *next += idis_occurrences(r);
                out
            } else {
                *next += idis_occurrences(l);
                substitute(r, choices, next)
            }
        }
        ModalFormula::Diamond(h) => ModalFormula::diamond(substitute(h, choices, next)),
        ModalFormula::Box(h) => ModalFormula::boxed(substitute(h, choices, next)),
        ModalFormula::MDep(args, target) => {
            let args = args.iter().map(|a| substitute(a, choices, next)).collect();
            ModalFormula::dep(args, substitute(target, choices, next))
        }
    }
}

/// Lazy enumeration of every `ior`-free instance of a formula.
#[derive(Clone, Debug)]
pub struct Instances {
    formula: ModalFormula,
    next: Option<Vec<Choice>>,
}

impl Iterator for Instances {
    type Item = (SelectionFunction, ModalFormula);

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        let mut pos = 0;
        let instance = substitute(&self.formula, &current, &mut pos);
        // binary increment, last occurrence least significant
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if succ[i] == Choice::Left {
                succ[i] = Choice::Right;
                self.next = Some(succ);
                break;
            }
            succ[i] = Choice::Left;
        }
        Some((SelectionFunction { choices: current }, instance))
    }
}

/// All selection instances of `g`, occurrence 0 most significant, left before
/// right.
pub fn eliminate_idis(g: &ModalFormula) -> Instances {
    Instances { formula: g.clone(), next: Some(vec![Choice::Left; idis_occurrences(g)]) }
}

fn ml_required() -> Error {
    Error::Fragment { expected: "ML", reason: "the formula contains `ior` or a dependence atom".into() }
}

/// Validity of a pure ML formula. Invalid verdicts carry a pointed
/// countermodel with at most `2^|nbSubf(f)|` worlds.
pub fn ml_valid(f: &ModalFormula) -> Result<ValidityVerdict> {
    if !f.is_pure_ml() {
        return Err(ml_required());
    }
    let negation = dual(f)?;
    let mut tableau = Tableau::default();
    let root_label = vec![tableau.intern(&negation)];
    match tableau.sat(root_label) {
        None => Ok(ValidityVerdict::Valid(None)),
        Some(root) => {
            let cm = tableau.countermodel(root, f)?;
            let point = cm.point().expect("pointed countermodel");
            if kripke::ml_point_eval_at(&cm.model, point, f)? {
                return Err(Error::Internal(format!("tableau countermodel does not refute {f}")));
            }
            Ok(ValidityVerdict::Invalid(cm))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Atom(u32),
    Neg(u32),
    And(u32, u32),
    Or(u32, u32),
    Dia(u32),
    Box(u32),
}

#[derive(Default)]
struct Tableau {
    nodes: Vec<Node>,
    ids: HashMap<Node, u32>,
    symbols: Vec<PropSymbol>,
    symbol_ids: HashMap<PropSymbol, u32>,
    memo: HashMap<Vec<u32>, Option<usize>>,
    // (true atoms, successors) of every world built
    worlds: Vec<(Vec<u32>, Vec<usize>)>,
}

impl Tableau {
    fn symbol(&mut self, p: &PropSymbol) -> u32 {
        if let Some(&id) = self.symbol_ids.get(p) {
            return id;
        }
        let id = self.symbols.len() as u32;
        self.symbols.push(p.clone());
        self.symbol_ids.insert(p.clone(), id);
        id
    }

    fn intern(&mut self, f: &ModalFormula) -> u32 {
        let node = match f {
            ModalFormula::Atom(p) => Node::Atom(self.symbol(p)),
            ModalFormula::NegAtom(p) => Node::Neg(self.symbol(p)),
            ModalFormula::And(l, r) => Node::And(self.intern(l), self.intern(r)),
            ModalFormula::Or(l, r) => Node::Or(self.intern(l), self.intern(r)),
            ModalFormula::Diamond(g) => Node::Dia(self.intern(g)),
            ModalFormula::Box(g) => Node::Box(self.intern(g)),
            ModalFormula::IDis(..) | ModalFormula::MDep(..) => unreachable!("checked pure ML"),
        };
        if let Some(&id) = self.ids.get(&node) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.ids.insert(node, id);
        id
    }

    /// A world satisfying every formula of the label, if one exists.
    fn sat(&mut self, mut label: Vec<u32>) -> Option<usize> {
        label.sort_unstable();
        label.dedup();
        if let Some(&hit) = self.memo.get(&label) {
            return hit;
        }
        let result = self.expand(&label);
        self.memo.insert(label, result);
        result
    }

    fn expand(&mut self, label: &[u32]) -> Option<usize> {
        let without = |skip: usize| label.iter().copied().filter(move |&x| x != label[skip]);
        if let Some(i) = label.iter().position(|&x| matches!(self.nodes[x as usize], Node::And(..))) {
            let Node::And(a, b) = self.nodes[label[i] as usize] else { unreachable!() };
            return self.sat(without(i).chain([a, b]).collect());
        }
        if let Some(i) = label.iter().position(|&x| matches!(self.nodes[x as usize], Node::Or(..))) {
            let Node::Or(a, b) = self.nodes[label[i] as usize] else { unreachable!() };
            if label.contains(&a) || label.contains(&b) {
                return self.sat(without(i).collect());
            }
            let left = self.sat(without(i).chain([a]).collect());
            if left.is_some() {
                return left;
            }
            return self.sat(without(i).chain([b]).collect());
        }
        let mut positive = BTreeSet::new();
        let mut negative = BTreeSet::new();
        let mut boxes = Vec::new();
        let mut diamonds = Vec::new();
        for &x in label {
            match self.nodes[x as usize] {
                Node::Atom(p) => {
                    positive.insert(p);
                }
                Node::Neg(p) => {
                    negative.insert(p);
                }
                Node::Box(g) => boxes.push(g),
                Node::Dia(g) => diamonds.push(g),
                Node::And(..) | Node::Or(..) => unreachable!(),
            }
        }
        if !positive.is_disjoint(&negative) {
            return None;
        }
        let mut successors = Vec::with_capacity(diamonds.len());
        for g in diamonds {
            let child = self.sat(boxes.iter().copied().chain([g]).collect())?;
            if !successors.contains(&child) {
                successors.push(child);
            }
        }
        self.worlds.push((positive.into_iter().collect(), successors));
        Some(self.worlds.len() - 1)
    }

    /// The worlds reachable from `root`, filtered through the non-Boolean
    /// subformulas of `f`.
    fn countermodel(&self, root: usize, f: &ModalFormula) -> Result<Countermodel> {
        let mut order = vec![root];
        let mut local: HashMap<usize, usize> = HashMap::from([(root, 0)]);
        let mut queue = VecDeque::from([root]);
        while let Some(w) = queue.pop_front() {
            for &v in &self.worlds[w].1 {
                if !local.contains_key(&v) {
                    local.insert(v, order.len());
                    order.push(v);
                    queue.push_back(v);
                }
            }
        }
        let succ: Vec<Vec<usize>> =
            order.iter().map(|&w| self.worlds[w].1.iter().map(|v| local[v]).collect()).collect();
        let n = order.len();
        let mut valuation: BTreeMap<PropSymbol, FixedBitSet> =
            f.symbols().into_iter().map(|p| (p, FixedBitSet::with_capacity(n))).collect();
        for (i, &w) in order.iter().enumerate() {
            for &p in &self.worlds[w].0 {
                if let Some(set) = valuation.get_mut(&self.symbols[p as usize]) {
                    set.insert(i);
                }
            }
        }
        let names = (0..n).map(|i| format!("w{i}")).collect();
        let tree = KripkeStructure::from_parts(names, succ, valuation);
        let filtered = filtrate(&tree, f)?;
        let team = filtered.team_from_indices([0])?;
        Ok(Countermodel { model: filtered, team })
    }
}

/// Smallest filtration of `k` through `nb_subf(f)`; world 0 stays world 0.
fn filtrate(k: &KripkeStructure, f: &ModalFormula) -> Result<KripkeStructure> {
    let n = k.world_count();
    let exts = f.nb_subf().iter().map(|g| kripke::extension(k, g)).collect::<Result<Vec<_>>>()?;
    let mut class_of = Vec::with_capacity(n);
    let mut classes: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut representatives = Vec::new();
    for w in 0..n {
        let sig: Vec<bool> = exts.iter().map(|e| e.contains(w)).collect();
        let next = classes.len();
        let c = *classes.entry(sig).or_insert(next);
        if c == representatives.len() {
            representatives.push(w);
        }
        class_of.push(c);
    }
    let m = representatives.len();
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    for (v, w) in k.edges() {
        succ[class_of[v]].insert(class_of[w]);
    }
    let valuation = k
        .symbols()
        .map(|p| {
            let worlds = k.valuation_of(p).unwrap_or_default();
            let mut set = FixedBitSet::with_capacity(m);
            set.extend(worlds.into_iter().map(|w| class_of[w]));
            (p.clone(), set)
        })
        .collect();
    Ok(KripkeStructure::from_parts(
        (0..m).map(|i| format!("w{i}")).collect(),
        succ.into_iter().map(|s| s.into_iter().collect()).collect(),
        valuation,
    ))
}

/// Validity over every pointed model with at most `max_worlds` worlds.
pub fn ml_valid_small_models(f: &ModalFormula, max_worlds: usize, settings: &Settings) -> Result<bool> {
    if !f.is_pure_ml() {
        return Err(ml_required());
    }
    if max_worlds > settings.max_small_model_worlds {
        return Err(Error::guard(
            "max-small-model-worlds",
            max_worlds as u128,
            settings.max_small_model_worlds as u128,
        ));
    }
    let symbols: Vec<PropSymbol> = f.symbols().into_iter().collect();
    if symbols.len() > settings.max_small_model_symbols {
        return Err(Error::guard(
            "max-small-model-symbols",
            symbols.len() as u128,
            settings.max_small_model_symbols as u128,
        ));
    }
    let program = MaskProgram::compile(f, &symbols);
    for n in 1..=max_worlds {
        let full: u16 = (1 << n) - 1;
        for relation in 0..1u64 << (n * n) {
            let succ: Vec<u16> = (0..n).map(|w| ((relation >> (w * n)) as u16) & full).collect();
            for val in 0..1u64 << (n * symbols.len()) {
                let atoms: Vec<u16> =
                    (0..symbols.len()).map(|s| ((val >> (s * n)) as u16) & full).collect();
                if program.eval(&succ, &atoms, full) != full {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy)]
enum MaskOp {
    Atom(usize),
    Neg(usize),
    And(usize, usize),
    Or(usize, usize),
    Dia(usize),
    Box(usize),
}

/// Postfix form of a pure ML formula evaluated on world bitmasks.
struct MaskProgram {
    ops: Vec<MaskOp>,
}

impl MaskProgram {
    fn compile(f: &ModalFormula, symbols: &[PropSymbol]) -> MaskProgram {
        fn go(f: &ModalFormula, symbols: &[PropSymbol], ops: &mut Vec<MaskOp>) -> usize {
            let sym = |p: &PropSymbol| symbols.iter().position(|s| s == p).expect("symbol collected");
            let op = match f {
                ModalFormula::Atom(p) => MaskOp::Atom(sym(p)),
                ModalFormula::NegAtom(p) => MaskOp::Neg(sym(p)),
                ModalFormula::And(l, r) => MaskOp::And(go(l, symbols, ops), go(r, symbols, ops)),
                ModalFormula::Or(l, r) => MaskOp::Or(go(l, symbols, ops), go(r, symbols, ops)),
                ModalFormula::Diamond(g) => MaskOp::Dia(go(g, symbols, ops)),
                ModalFormula::Box(g) => MaskOp::Box(go(g, symbols, ops)),
                ModalFormula::IDis(..) | ModalFormula::MDep(..) => unreachable!("checked pure ML"),
            };
            ops.push(op);
            ops.len() - 1
        }
        let mut ops = Vec::new();
        go(f, symbols, &mut ops);
        MaskProgram { ops }
    }

    fn eval(&self, succ: &[u16], atoms: &[u16], full: u16) -> u16 {
        let mut vals = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match *op {
                MaskOp::Atom(s) => atoms[s],
                MaskOp::Neg(s) => !atoms[s] & full,
                MaskOp::And(a, b) => vals[a] & vals[b],
                MaskOp::Or(a, b) => vals[a] | vals[b],
                MaskOp::Dia(a) => {
                    let m: u16 = vals[a];
                    succ.iter().enumerate().fold(0, |acc, (w, s)| if s & m != 0 { acc | 1 << w } else { acc })
                }
                MaskOp::Box(a) => {
                    let m: u16 = vals[a];
                    succ.iter().enumerate().fold(0, |acc, (w, s)| if s & !m == 0 { acc | 1 << w } else { acc })
                }
            };
            vals.push(v);
        }
        *vals.last().expect("nonempty program")
    }
}

/// `n` left-folded copies of `p | !p` conjoined with `g`.
pub fn pad_formula(g: &ModalFormula, n: usize, p: &PropSymbol) -> ModalFormula {
    let tautology = ModalFormula::or(
        ModalFormula::Atom(p.clone()),
        ModalFormula::NegAtom(p.clone()),
    );
    match (0..n).map(|_| tautology.clone()).reduce(ModalFormula::and) {
        None => g.clone(),
        Some(padding) => ModalFormula::and(padding, g.clone()),
    }
}

/// The padding symbol: the least symbol of the formula, or `p` if none.
pub fn default_pad_symbol(g: &ModalFormula) -> PropSymbol {
    g.symbols().into_iter().next().unwrap_or_else(|| PropSymbol::new("p"))
}

/// Validity of an ML(⊻) formula: valid iff some selection instance is a
/// valid ML formula. When none is, the pointed countermodels of all
/// instances are combined into one team countermodel.
pub fn mliv_valid(g: &ModalFormula, settings: &Settings) -> Result<(ValidityVerdict, SearchStats)> {
    if g.has_dep() {
        return Err(Error::Fragment { expected: "ML(ior)", reason: "dependence atoms must be translated first".into() });
    }
    let (verdict, stats) = disjunct_search(g, settings)?;
    if let ValidityVerdict::Invalid(cm) = &verdict {
        if kripke::mt_eval(&cm.model, &cm.team, g, settings)? {
            return Err(Error::Internal(format!("assembled countermodel does not refute {g}")));
        }
    }
    Ok((verdict, stats))
}

/// Validity of an EMDL (or MDL) formula through its ML(⊻) translation.
pub fn emdl_valid(f: &ModalFormula, settings: &Settings) -> Result<ValidityVerdict> {
    emdl_valid_with_stats(f, settings).map(|(v, _)| v)
}

pub fn emdl_valid_with_stats(f: &ModalFormula, settings: &Settings) -> Result<(ValidityVerdict, SearchStats)> {
    let translated = emdl_to_mliv(f, settings)?;
    let (verdict, stats) = disjunct_search(&translated, settings)?;
    if let ValidityVerdict::Invalid(cm) = &verdict {
        if kripke::mt_eval(&cm.model, &cm.team, f, settings)? {
            return Err(Error::Internal(format!("assembled countermodel does not refute {f}")));
        }
    }
    Ok((verdict, stats))
}

fn disjunct_search(g: &ModalFormula, settings: &Settings) -> Result<(ValidityVerdict, SearchStats)> {
    let k = idis_occurrences(g);
    if k > settings.max_selections || k >= 64 {
        return Err(Error::guard("max-selections", k as u128, settings.max_selections as u128));
    }
    let mut stats = SearchStats::default();
    let symbols = g.symbols();
    let mut refuted: Vec<Countermodel> = Vec::new();
    let refutes = |cms: &[Countermodel], h: &ModalFormula| -> Result<bool> {
        for cm in cms {
            let point = cm.point().expect("pointed");
            if !kripke::ml_point_eval_at(&cm.model, point, h)? {
                return Ok(true);
            }
        }
        Ok(false)
    };
    if settings.jobs <= 1 {
        for (sel, instance) in eliminate_idis(g) {
            stats.disjuncts_checked += 1;
            if refutes(&refuted, &instance)? {
                continue;
            }
            match ml_valid(&instance)? {
                ValidityVerdict::Valid(_) => return Ok((ValidityVerdict::Valid(Some(sel)), stats)),
                ValidityVerdict::Invalid(cm) => refuted.push(combine(&[cm], &symbols)?),
            }
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(settings.jobs)
            .build()
            .map_err(|e| Error::Internal(format!("worker pool: {e}")))?;
        let total = 1u64 << k;
        let chunk = 64 * settings.jobs as u64;
        let mut start = 0;
        while start < total {
            let end = (start + chunk).min(total);
            let verdicts: Vec<Result<(SelectionFunction, ValidityVerdict)>> = pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map(|i| {
                        let sel = SelectionFunction::from_index(i, k);
                        let instance = apply_selection(g, &sel)?;
                        Ok((sel, ml_valid(&instance)?))
                    })
                    .collect()
            });
            for v in verdicts {
                let (sel, verdict) = v?;
                stats.disjuncts_checked += 1;
                match verdict {
                    ValidityVerdict::Valid(_) => return Ok((ValidityVerdict::Valid(Some(sel)), stats)),
                    ValidityVerdict::Invalid(cm) => {
                        let instance = apply_selection(g, &sel)?;
                        if !refutes(&refuted, &instance)? {
                            refuted.push(combine(&[cm], &symbols)?);
                        }
                    }
                }
            }
            start = end;
        }
    }
    Ok((ValidityVerdict::Invalid(combine(&refuted, &symbols)?), stats))
}

/// Disjoint union of pointed countermodels, teamed on their points.
/// Every symbol of `symbols` is declared in the result, false everywhere
/// when no instance mentions it.
fn combine(parts: &[Countermodel], symbols: &BTreeSet<PropSymbol>) -> Result<Countermodel> {
    if let [single] = parts {
        if symbols.iter().all(|p| single.model.valuation_of(p).is_some()) {
            return Ok(single.clone());
        }
    }
    let tagged = parts.len() > 1;
    let total: usize = parts.iter().map(|cm| cm.model.world_count()).sum();
    let mut names = Vec::with_capacity(total);
    let mut succ = Vec::with_capacity(total);
    let mut valuation: BTreeMap<PropSymbol, FixedBitSet> = BTreeMap::new();
    let mut points = Vec::with_capacity(parts.len());
    let mut offset = 0;
    for (i, cm) in parts.iter().enumerate() {
        let m = &cm.model;
        for (w, name) in m.worlds().iter().enumerate() {
            names.push(if tagged { format!("{i}:{name}") } else { name.clone() });
            succ.push(m.successors(w).iter().map(|v| v + offset).collect::<Vec<_>>());
        }
        for p in m.symbols() {
            let set = valuation.entry(p.clone()).or_insert_with(|| FixedBitSet::with_capacity(total));
            set.extend(m.valuation_of(p).unwrap_or_default().into_iter().map(|w| w + offset));
        }
        points.push(offset + cm.point().expect("pointed"));
        offset += m.world_count();
    }
    for p in symbols {
        valuation.entry(p.clone()).or_insert_with(|| FixedBitSet::with_capacity(total));
    }
    let model = KripkeStructure::from_parts(names, succ, valuation);
    let team = model.team_from_indices(points)?;
    Ok(Countermodel { model, team })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_modal;

    fn m(text: &str) -> ModalFormula {
        parse_modal(text).unwrap()
    }

    #[test]
    fn translation_examples() {
        let s = Settings::default();
        assert_eq!(emdl_to_mliv(&m("dep(; q)"), &s).unwrap(), m("q ior !q"));
        assert_eq!(
            emdl_to_mliv(&m("dep(p; q)"), &s).unwrap(),
            m("(p & (q ior !q)) | (!p & (q ior !q))")
        );
        assert_eq!(
            emdl_to_mliv(&m("<> dep(p; q)"), &s).unwrap(),
            m("<> ((p & (q ior !q)) | (!p & (q ior !q)))")
        );
        let two = emdl_to_mliv(&m("dep(p, <> r; q)"), &s).unwrap();
        assert_eq!(
            two,
            m("(((p & <> r) & (q ior !q)) | ((p & [] !r) & (q ior !q))) | ((!p & <> r) & (q ior !q)) | ((!p & [] !r) & (q ior !q))")
        );
        assert!(emdl_to_mliv(&m("p ior q"), &s).is_err());
    }

    #[test]
    fn arity_guard() {
        let s = Settings { max_dep_arity: 1, ..Settings::default() };
        let err = emdl_to_mliv(&m("dep(p, q; r)"), &s).unwrap_err();
        assert!(err.is_guard());
    }

    #[test]
    fn elimination_examples() {
        let all: Vec<_> = eliminate_idis(&m("p ior !p")).collect();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].1, m("p"));
        assert_eq!(all[1].1, m("!p"));
        assert_eq!(all[0].0.bits(), "0");
        let none: Vec<_> = eliminate_idis(&m("p & q")).collect();
        assert_eq!(none.len(), 1);
        assert!(none[0].0.is_empty());
        let four: Vec<_> = eliminate_idis(&emdl_to_mliv(&m("dep(p; q)"), &Settings::default()).unwrap()).collect();
        assert_eq!(four.len(), 4);
        assert_eq!(four[1].1, m("(p & q) | (!p & !q)"));
        let bits: Vec<String> = four.iter().map(|(s, _)| s.bits()).collect();
        assert_eq!(bits, ["00", "01", "10", "11"]);
    }

    #[test]
    fn nested_selection_skips_unchosen_occurrences() {
        let g = m("(a ior b) ior (c ior d)");
        let got: Vec<(String, String)> =
            eliminate_idis(&g).map(|(s, f)| (s.bits(), f.to_string())).collect();
        assert_eq!(got.len(), 8);
        assert_eq!(got[0], ("000".into(), "a".into()));
        assert_eq!(got[2], ("010".into(), "b".into()));
        assert_eq!(got[4], ("100".into(), "c".into()));
        assert_eq!(got[7], ("111".into(), "d".into()));
        for (i, (bits, f)) in got.iter().enumerate() {
            let sel = SelectionFunction::from_index(i as u64, 3);
            assert_eq!(&sel.bits(), bits);
            assert_eq!(&apply_selection(&g, &sel).unwrap().to_string(), f);
        }
    }

    #[test]
    fn ml_validity_examples() {
        assert!(ml_valid(&m("p | !p")).unwrap().is_valid());
        assert!(ml_valid(&m("[] p | <> !p")).unwrap().is_valid());
        match ml_valid(&m("<> p")).unwrap() {
            ValidityVerdict::Invalid(cm) => {
                assert_eq!(cm.model.world_count(), 1);
                assert_eq!(cm.model.edge_count(), 0);
            }
            other => panic!("expected a countermodel, got {other:?}"),
        }
        assert!(ml_valid(&m("p ior !p")).is_err());
    }

    #[test]
    fn countermodels_respect_the_size_bound() {
        for text in ["<> <> p & <> <> q", "[] (p | q) | <> (<> p & [] q)", "p | <> [] !p", "<> p & <> !p"] {
            let f = m(text);
            if let ValidityVerdict::Invalid(cm) = ml_valid(&f).unwrap() {
                assert!(cm.model.world_count() <= 1 << f.nb_subf().len());
                let w = cm.point().unwrap();
                assert!(!kripke::ml_point_eval(&cm.model, &cm.model.worlds()[w], &f).unwrap());
            }
        }
    }

    #[test]
    fn small_model_examples() {
        let s = Settings::default();
        assert!(ml_valid_small_models(&m("p | !p"), 3, &s).unwrap());
        assert!(!ml_valid_small_models(&m("p"), 1, &s).unwrap());
        assert!(ml_valid_small_models(&m("[] p | <> !p"), 2, &s).unwrap());
        assert!(ml_valid_small_models(&m("<> p | [] !p"), 2, &s).unwrap());
        assert!(!ml_valid_small_models(&m("<> p | [] p"), 2, &s).unwrap());
        assert!(ml_valid_small_models(&m("p"), 5, &s).unwrap_err().is_guard());
        assert!(ml_valid_small_models(&m("p | q | r"), 1, &s).unwrap_err().is_guard());
    }

    #[test]
    fn padding() {
        let q = m("q");
        let p = PropSymbol::new("p");
        assert_eq!(pad_formula(&q, 0, &p), q);
        assert_eq!(pad_formula(&q, 2, &p), m("((p | !p) & (p | !p)) & q"));
        assert_eq!(default_pad_symbol(&m("<> r & q")), PropSymbol::new("q"));
    }

    #[test]
    fn emdl_examples() {
        let s = Settings::default();
        match emdl_valid(&m("dep(p; p)"), &s).unwrap() {
            ValidityVerdict::Valid(Some(sel)) => assert_eq!(sel.len(), 2),
            other => panic!("expected valid, got {other:?}"),
        }
        match emdl_valid(&m("dep(; p)"), &s).unwrap() {
            ValidityVerdict::Invalid(cm) => {
                assert_eq!(cm.team.len(), 2);
                assert!(!kripke::mt_eval(&cm.model, &cm.team, &m("dep(; p)"), &s).unwrap());
            }
            other => panic!("expected invalid, got {other:?}"),
        }
        assert!(emdl_valid(&m("dep(p; q) | dep(p; q)"), &s).unwrap().is_valid());
        assert!(!emdl_valid(&m("dep(p; q)"), &s).unwrap().is_valid());
        assert!(emdl_valid(&m("[] dep(<> p; <> p)"), &s).unwrap().is_valid());
    }

    #[test]
    fn parallel_search_matches_sequential() {
        let seq = Settings::default();
        let par = Settings { jobs: 3, ..Settings::default() };
        for text in ["dep(p; p)", "dep(; p)", "dep(p; q) | dep(q; p)", "<> dep(p, q; r) | [] p", "dep(p; q) | dep(p; q)"] {
            let f = m(text);
            let (a, sa) = emdl_valid_with_stats(&f, &seq).unwrap();
            let (b, _) = emdl_valid_with_stats(&f, &par).unwrap();
            assert_eq!(a.is_valid(), b.is_valid(), "{text}");
            if let (ValidityVerdict::Valid(x), ValidityVerdict::Valid(y)) = (&a, &b) {
                assert_eq!(x, y);
            }
            assert!(sa.disjuncts_checked >= 1);
        }
    }

    #[test]
    fn disjuncts_over_different_symbols() {
        let s = Settings::default();
        for jobs in [1, 2] {
            let settings = Settings { jobs, ..s };
            for text in ["p ior <> q", "(q & !q) ior p", "[] p ior (r | <> q)"] {
                let g = m(text);
                let (v, _) = mliv_valid(&g, &settings).unwrap();
                let ValidityVerdict::Invalid(cm) = v else { panic!("{text} is not valid") };
                assert!(!kripke::mt_eval(&cm.model, &cm.team, &g, &settings).unwrap());
            }
        }
    }

    #[test]
    fn selection_guard() {
        let s = Settings { max_selections: 1, ..Settings::default() };
        assert!(emdl_valid(&m("dep(p; q)"), &s).unwrap_err().is_guard());
    }
}
