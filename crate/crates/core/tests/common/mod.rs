#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use teamlogic::kripke::{KripkeStructure, WorldTeam};
use teamlogic::prop_team::PropTeam;
use teamlogic::{ModalFormula, PropFormula, PropSymbol};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn syms(names: &[&str]) -> Vec<PropSymbol> {
    names.iter().map(|n| PropSymbol::new(n)).collect()
}

fn pick<'a>(rng: &mut StdRng, names: &[&'a str]) -> &'a str {
    names[rng.gen_range(0..names.len())]
}

pub fn random_pd(rng: &mut StdRng, names: &[&str], depth: usize, dep_weight: f64) -> PropFormula {
    if depth == 0 || rng.gen_bool(0.25) {
        if rng.gen_bool(dep_weight) {
            let arity = rng.gen_range(0..=names.len().min(2));
            let args: Vec<&str> = (0..arity).map(|_| pick(rng, names)).collect();
            return PropFormula::dep(&args, pick(rng, names));
        }
        let p = pick(rng, names);
        return if rng.gen_bool(0.5) { PropFormula::atom(p) } else { PropFormula::neg(p) };
    }
    let l = random_pd(rng, names, depth - 1, dep_weight);
    let r = random_pd(rng, names, depth - 1, dep_weight);
    if rng.gen_bool(0.5) {
        PropFormula::and(l, r)
    } else {
        PropFormula::or(l, r)
    }
}

pub fn random_pl(rng: &mut StdRng, names: &[&str], depth: usize) -> PropFormula {
    random_pd(rng, names, depth, 0.0)
}

/// Which non-classical constructs a random modal formula may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Ml,
    MlIdis,
    Emdl,
}

pub fn random_modal(rng: &mut StdRng, names: &[&str], depth: usize, flavor: Flavor) -> ModalFormula {
    if depth == 0 || rng.gen_bool(0.2) {
        if flavor == Flavor::Emdl && rng.gen_bool(0.3) {
            let arity = rng.gen_range(0..=2);
            let inner = depth.saturating_sub(1).min(1);
            let args = (0..arity).map(|_| random_modal(rng, names, inner, Flavor::Ml)).collect();
            return ModalFormula::dep(args, random_modal(rng, names, inner, Flavor::Ml));
        }
        let p = pick(rng, names);
        return if rng.gen_bool(0.5) { ModalFormula::atom(p) } else { ModalFormula::neg(p) };
    }
    let choice = rng.gen_range(0..if flavor == Flavor::MlIdis { 5 } else { 4 });
    let sub = |rng: &mut StdRng| random_modal(rng, names, depth - 1, flavor);
    match choice {
        0 => ModalFormula::and(sub(rng), sub(rng)),
        1 => ModalFormula::or(sub(rng), sub(rng)),
        2 => ModalFormula::diamond(sub(rng)),
        3 => ModalFormula::boxed(sub(rng)),
        _ => ModalFormula::idis(sub(rng), sub(rng)),
    }
}

pub fn model_from_parts(n: usize, edges: &[(usize, usize)], names: &[&str], valuation: &[Vec<usize>]) -> KripkeStructure {
    let worlds: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let edges: Vec<(String, String)> = edges.iter().map(|&(a, b)| (worlds[a].clone(), worlds[b].clone())).collect();
    let val: Vec<(String, Vec<String>)> = names
        .iter()
        .zip(valuation)
        .map(|(p, ws)| (p.to_string(), ws.iter().map(|&w| worlds[w].clone()).collect()))
        .collect();
    KripkeStructure::new(&worlds, &edges, &val).unwrap()
}

pub fn random_model(rng: &mut StdRng, n: usize, names: &[&str], edge_p: f64) -> KripkeStructure {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(edge_p) {
                edges.push((a, b));
            }
        }
    }
    let valuation: Vec<Vec<usize>> = names.iter().map(|_| (0..n).filter(|_| rng.gen_bool(0.5)).collect()).collect();
    model_from_parts(n, &edges, names, &valuation)
}

pub fn random_world_team(rng: &mut StdRng, k: &KripkeStructure) -> WorldTeam {
    k.team_from_indices((0..k.world_count()).filter(|_| rng.gen_bool(0.5))).unwrap()
}

pub fn team_from_mask(k: &KripkeStructure, mask: u64) -> WorldTeam {
    k.team_from_indices((0..k.world_count()).filter(|i| (mask >> i) & 1 == 1)).unwrap()
}

/// Every subteam of `t`.
pub fn world_subteams(k: &KripkeStructure, t: &WorldTeam) -> Vec<WorldTeam> {
    let members: Vec<usize> = t.indices().collect();
    (0..1u64 << members.len())
        .map(|m| {
            k.team_from_indices(members.iter().enumerate().filter(|(i, _)| (m >> i) & 1 == 1).map(|(_, &w)| w))
                .unwrap()
        })
        .collect()
}

pub fn random_prop_team(rng: &mut StdRng, names: &[&str], max_rows: usize) -> PropTeam {
    let n = names.len();
    let mut rows = BTreeSet::new();
    let target = rng.gen_range(0..=max_rows.min(1 << n));
    while rows.len() < target {
        rows.insert(rng.gen_range(0..1u64 << n));
    }
    let rows: Vec<Vec<bool>> = rows
        .into_iter()
        .map(|code| (0..n).map(|i| (code >> (n - 1 - i)) & 1 == 1).collect())
        .collect();
    PropTeam::new(&syms(names), &rows).unwrap()
}

/// All Kripke structures with `1..=max_worlds` worlds over `names`, one per
/// isomorphism class.
pub fn all_models(max_worlds: usize, names: &[&str]) -> Vec<KripkeStructure> {
    let mut out = Vec::new();
    for n in 1..=max_worlds {
        let perms = permutations(n);
        let mut seen = BTreeSet::new();
        for rel in 0..1u64 << (n * n) {
            for val in 0..1u64 << (n * names.len()) {
                let code = |perm: &[usize]| {
                    let mut r = 0u64;
                    for a in 0..n {
                        for b in 0..n {
                            if (rel >> (a * n + b)) & 1 == 1 {
                                r |= 1 << (perm[a] * n + perm[b]);
                            }
                        }
                    }
                    let mut v = 0u64;
                    for s in 0..names.len() {
                        for w in 0..n {
                            if (val >> (s * n + w)) & 1 == 1 {
                                v |= 1 << (s * n + perm[w]);
                            }
                        }
                    }
                    (r, v)
                };
                let canonical = perms.iter().map(|p| code(p)).min().unwrap();
                if canonical != code(&perms[0]) || !seen.insert(canonical) {
                    continue;
                }
                let edges: Vec<(usize, usize)> = (0..n)
                    .flat_map(|a| (0..n).map(move |b| (a, b)))
                    .filter(|&(a, b)| (rel >> (a * n + b)) & 1 == 1)
                    .collect();
                let valuation: Vec<Vec<usize>> = (0..names.len())
                    .map(|s| (0..n).filter(|w| (val >> (s * n + w)) & 1 == 1).collect())
                    .collect();
                out.push(model_from_parts(n, &edges, names, &valuation));
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// A variant of `k` where every world is split into one or two copies with
/// the same valuation, each copy pointing at the copies of its successors.
/// Returns the variant and, for every world of `k`, its copies.
pub fn split_copies(rng: &mut StdRng, k: &KripkeStructure, names: &[&str]) -> (KripkeStructure, Vec<Vec<usize>>) {
    let n = k.world_count();
    let mut copies = Vec::with_capacity(n);
    let mut next = 0;
    for _ in 0..n {
        let c = if rng.gen_bool(0.5) { 2 } else { 1 };
        copies.push((next..next + c).collect::<Vec<_>>());
        next += c;
    }
    let mut edges = Vec::new();
    for (a, b) in k.edges() {
        for &ca in &copies[a] {
            // every copy needs some edge to a copy of each successor
            edges.push((ca, copies[b][0]));
            if copies[b].len() > 1 && rng.gen_bool(0.5) {
                edges.push((ca, copies[b][1]));
            }
        }
    }
    let valuation: Vec<Vec<usize>> = names
        .iter()
        .map(|p| {
            let truth = k.valuation_of(&PropSymbol::new(p)).unwrap_or_default();
            truth.iter().flat_map(|&w| copies[w].clone()).collect()
        })
        .collect();
    (model_from_parts(next, &edges, names, &valuation), copies)
}
