//! Minimal hitting sets of finite set families.

use std::collections::BTreeSet;

pub fn hits<T: Ord>(h: &BTreeSet<T>, family: &[BTreeSet<T>]) -> bool {
    family.iter().all(|s| !s.is_disjoint(h))
}

pub fn is_minimal_hitting_set<T: Ord + Clone>(h: &BTreeSet<T>, family: &[BTreeSet<T>]) -> bool {
    if !hits(h, family) {
        return false;
    }
    h.iter().all(|x| {
        let mut smaller = h.clone();
        smaller.remove(x);
        !hits(&smaller, family)
    })
}

/// Keeps the inclusion-minimal sets, deduplicated, in sorted order.
pub fn minimize<T: Ord + Clone>(sets: impl IntoIterator<Item = BTreeSet<T>>) -> Vec<BTreeSet<T>> {
    let mut all: Vec<BTreeSet<T>> = sets.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    all.sort_by_key(|s| s.len());
    let mut kept: Vec<BTreeSet<T>> = Vec::new();
    for s in all {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}

/// All minimal hitting sets of `family`, sorted.
///
/// The empty family has the single hitting set ∅; a family containing the
/// empty set has none.
pub fn minimal_hitting_sets<T: Ord + Clone>(family: &[BTreeSet<T>]) -> Vec<BTreeSet<T>> {
    let mut current: Vec<BTreeSet<T>> = vec![BTreeSet::new()];
    for s in minimize(family.iter().cloned()) {
        let mut next = Vec::new();
        for h in &current {
            if !h.is_disjoint(&s) {
                next.push(h.clone());
            } else {
                for x in &s {
                    let mut g = h.clone();
                    g.insert(x.clone());
                    next.push(g);
                }
            }
        }
        current = minimize(next);
        if current.is_empty() {
            break;
        }
    }
    current
}
