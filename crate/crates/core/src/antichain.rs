//! Downward-closed families of subteams, stored by their maximal elements.
//!
//! Every formula of the downward-closed logics determines the family of
//! subteams (of some ambient team) that satisfy it. The family contains the
//! empty team and is closed under subsets, so it is fully described by its
//! inclusion-maximal members.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

pub(crate) type Set = FixedBitSet;

/// Inclusion-maximal members of `sets`, without duplicates.
pub(crate) fn maximal(mut sets: Vec<Set>) -> Vec<Set> {
    sets.sort_by_key(|s| std::cmp::Reverse(s.count_ones(..)));
    let mut kept: Vec<Set> = Vec::with_capacity(sets.len());
    for s in sets {
        if !kept.iter().any(|k| s.is_subset(k)) {
            kept.push(s);
        }
    }
    kept
}

fn check_product(a: usize, b: usize, limit: usize) -> Result<()> {
    let n = a as u128 * b as u128;
    if n > limit as u128 {
        return Err(Error::guard("max-antichain", n, limit as u128));
    }
    Ok(())
}

/// Maxima of the intersection of two downsets.
pub(crate) fn meet(a: &[Set], b: &[Set], limit: usize) -> Result<Vec<Set>> {
    check_product(a.len(), b.len(), limit)?;
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            let mut z = x.clone();
            z.intersect_with(y);
            out.push(z);
        }
    }
    Ok(maximal(out))
}

/// Maxima of the family of unions `x ∪ y` with `x`, `y` drawn from each downset.
pub(crate) fn join(a: &[Set], b: &[Set], limit: usize) -> Result<Vec<Set>> {
    check_product(a.len(), b.len(), limit)?;
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            let mut z = x.clone();
            z.union_with(y);
            out.push(z);
        }
    }
    Ok(maximal(out))
}

/// Maxima of the union of two downsets.
pub(crate) fn union(a: Vec<Set>, b: Vec<Set>, limit: usize) -> Result<Vec<Set>> {
    check_product(a.len() + b.len(), 1, limit)?;
    let mut all = a;
    all.extend(b);
    Ok(maximal(all))
}

/// Maximal subsets of `ambient` on which `target` is a function of `key`.
///
/// `key[i]` and `target[i]` are the pointwise values for element `i`.
pub(crate) fn dependence_maxima(
    ambient: &Set,
    key: impl Fn(usize) -> u64,
    target: impl Fn(usize) -> bool,
    limit: usize,
) -> Result<Vec<Set>> {
    use std::collections::BTreeMap;
    let mut classes: BTreeMap<u64, [Vec<usize>; 2]> = BTreeMap::new();
    for i in ambient.ones() {
        classes.entry(key(i)).or_default()[target(i) as usize].push(i);
    }
    let mut base = Set::with_capacity(ambient.len());
    let mut mixed = Vec::new();
    for [zeros, ones] in classes.into_values() {
        if zeros.is_empty() || ones.is_empty() {
            base.extend(zeros.into_iter().chain(ones));
        } else {
            mixed.push([zeros, ones]);
        }
    }
    let count = 1u128.checked_shl(mixed.len() as u32).unwrap_or(u128::MAX);
    if count > limit as u128 {
        return Err(Error::guard("max-antichain", count, limit as u128));
    }
    let mut out = Vec::with_capacity(count as usize);
    for choice in 0..count as u64 {
        let mut s = base.clone();
        for (j, halves) in mixed.iter().enumerate() {
            s.extend(halves[((choice >> j) & 1) as usize].iter().copied());
        }
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, xs: &[usize]) -> Set {
        let mut s = Set::with_capacity(n);
        s.extend(xs.iter().copied());
        s
    }

    #[test]
    fn maximal_drops_subsets_and_duplicates() {
        let sets = vec![set(4, &[0]), set(4, &[0, 1]), set(4, &[2]), set(4, &[0, 1]), set(4, &[])];
        let m = maximal(sets);
        assert_eq!(m, vec![set(4, &[0, 1]), set(4, &[2])]);
    }

    #[test]
    fn dependence_on_two_mixed_classes() {
        // rows 0..4 = 00,01,10,11 over (p,q); dep(p;q)
        let ambient = set(4, &[0, 1, 2, 3]);
        let m = dependence_maxima(&ambient, |i| (i >> 1) as u64, |i| i & 1 == 1, 16).unwrap();
        assert_eq!(m.len(), 4);
        assert!(m.iter().all(|s| s.count_ones(..) == 2));
    }

    #[test]
    fn guard_trips() {
        let a = vec![set(2, &[0]); 3];
        assert!(matches!(join(&a, &a, 8), Err(Error::Guard { .. })));
    }
}
