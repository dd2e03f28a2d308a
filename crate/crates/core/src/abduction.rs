//! Abductive explanations for view atoms.
//!
//! An explanation of a view atom is a set of ground base atoms that,
//! together with the rules, derives it. Explanations are either computed
//! bottom-up over the ground rules ([`minimal_explanations`]) or read off
//! the branches of an SLD tree ([`tree_explanations`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Budget, Error, Result};
use crate::hitting::{minimal_hitting_sets, minimize};
use crate::inference::{default_depth_bound, sld_tree, BranchStatus, GroundProgram, GroundRule, SLDTree};
use crate::kb::{HornClause, KnowledgeBase};
use crate::logic::{Atom, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    /// Base atoms that must hold.
    pub delta_plus: BTreeSet<Atom>,
    /// Stored facts that must not hold.
    pub delta_minus: BTreeSet<Atom>,
    /// Ids of the SLD branches this explanation was read from.
    pub provenance: Vec<usize>,
    /// The rules the explanation was derived with; empty when it was not
    /// produced from a single derivation.
    pub support: Vec<HornClause>,
}

impl Explanation {
    pub fn of(delta_plus: BTreeSet<Atom>) -> Explanation {
        Explanation {
            delta_plus,
            delta_minus: BTreeSet::new(),
            provenance: Vec::new(),
            support: Vec::new(),
        }
    }
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::inference::set_text(&self.delta_plus))?;
        if !self.delta_minus.is_empty() {
            write!(f, " minus {}", crate::inference::set_text(&self.delta_minus))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    Raw,
    LocallyMinimal,
    /// Locally minimal and consistent with the constraints.
    Closed,
}

impl Closure {
    pub fn name(self) -> &'static str {
        match self {
            Closure::Raw => "raw",
            Closure::LocallyMinimal => "locally-minimal",
            Closure::Closed => "closed-locally-minimal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplanationFamily {
    pub target: Atom,
    pub explanations: Vec<Explanation>,
    pub closed_under: Closure,
}

impl ExplanationFamily {
    pub fn len(&self) -> usize {
        self.explanations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.explanations.is_empty()
    }

    /// The distinct `delta_plus` sets.
    pub fn sets(&self) -> BTreeSet<BTreeSet<Atom>> {
        self.explanations.iter().map(|e| e.delta_plus.clone()).collect()
    }
}

fn require_view(kb: &KnowledgeBase, target: &Atom) -> Result<()> {
    if !target.is_ground() {
        return Err(Error::Precondition(format!("`{target}` is not ground")));
    }
    if !kb.is_view(target) {
        return Err(Error::Precondition(format!(
            "`{target}` is not a view atom; only derived atoms are explained"
        )));
    }
    Ok(())
}

/// Minimal supports of every atom reachable from `targets`: the
/// inclusion-minimal sets of allowed base atoms that derive it.
pub(crate) fn minimal_supports<'a>(
    gp: &'a GroundProgram,
    views: &BTreeSet<Symbol>,
    targets: &[Atom],
    allowed: impl Fn(&Atom) -> bool,
    cap: u128,
) -> Result<BTreeMap<&'a Atom, Vec<BTreeSet<Atom>>>> {
    let rules = gp.relevant_rules(targets);
    let mut fam: BTreeMap<&Atom, Vec<BTreeSet<Atom>>> = BTreeMap::new();
    for r in &rules {
        fam.entry(&r.head).or_default();
    }
    let family_of = |fam: &BTreeMap<&Atom, Vec<BTreeSet<Atom>>>, a: &Atom| -> Vec<BTreeSet<Atom>> {
        if views.contains(&a.predicate) {
            fam.get(a).cloned().unwrap_or_default()
        } else if allowed(a) {
            vec![BTreeSet::from([a.clone()])]
        } else {
            Vec::new()
        }
    };
    let mut changed = true;
    while changed {
        changed = false;
        for r in &rules {
            let mut acc: Vec<BTreeSet<Atom>> = vec![BTreeSet::new()];
            for b in &r.body {
                let fb = family_of(&fam, b);
                if fb.is_empty() {
                    acc.clear();
                    break;
                }
                let size = acc.len() as u128 * fb.len() as u128;
                if size > cap {
                    return Err(Error::BudgetExceeded {
                        what: "explanation combination",
                        needed: size,
                        limit: cap,
                    });
                }
                let mut next = Vec::with_capacity(size as usize);
                for x in &acc {
                    for y in &fb {
                        next.push(x.union(y).cloned().collect());
                    }
                }
                acc = minimize(next);
            }
            if acc.is_empty() {
                continue;
            }
            let cur = fam.get(&r.head).cloned().unwrap_or_default();
            let merged = minimize(cur.iter().cloned().chain(acc));
            if merged != cur {
                fam.insert(&r.head, merged);
                changed = true;
            }
        }
    }
    Ok(fam)
}

/// All inclusion-minimal sets of ground base atoms that derive `target`
/// with the rules.
pub fn minimal_explanations(kb: &KnowledgeBase, target: &Atom, budget: &Budget) -> Result<ExplanationFamily> {
    require_view(kb, target)?;
    let gp = GroundProgram::new(kb, std::slice::from_ref(target))?;
    let views = kb.view_predicates();
    let fam = minimal_supports(&gp, &views, std::slice::from_ref(target), |_| true, budget.subsets)?;
    let sets = fam.get(target).cloned().unwrap_or_default();
    Ok(ExplanationFamily {
        target: target.clone(),
        explanations: sets.into_iter().map(Explanation::of).collect(),
        closed_under: Closure::Raw,
    })
}

/// Inclusion-minimal subsets `C` of `optional` such that the rules with
/// `fixed ∪ C` violate a constraint. Contains `∅` when `fixed` alone does.
pub(crate) fn minimal_conflicts(
    gp: &GroundProgram,
    views: &BTreeSet<Symbol>,
    fixed: &BTreeSet<Atom>,
    optional: &BTreeSet<Atom>,
    cap: u128,
) -> Result<Vec<BTreeSet<Atom>>> {
    let body_atoms: Vec<Atom> = gp
        .denials
        .iter()
        .flat_map(|d| d.body.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let fam = minimal_supports(
        gp,
        views,
        &body_atoms,
        |a| fixed.contains(a) || optional.contains(a),
        cap,
    )?;
    let support_of = |a: &Atom| -> Vec<BTreeSet<Atom>> {
        if views.contains(&a.predicate) {
            fam.get(a).cloned().unwrap_or_default()
        } else if fixed.contains(a) || optional.contains(a) {
            vec![BTreeSet::from([a.clone()])]
        } else {
            Vec::new()
        }
    };
    let mut out = Vec::new();
    for d in &gp.denials {
        let mut acc: Vec<BTreeSet<Atom>> = vec![BTreeSet::new()];
        for b in &d.body {
            let fb = support_of(b);
            let mut next = Vec::new();
            for x in &acc {
                for y in &fb {
                    next.push(x.union(y).cloned().collect::<BTreeSet<_>>());
                }
            }
            acc = minimize(next);
            if acc.is_empty() {
                break;
            }
        }
        for s in acc {
            out.push(s.difference(fixed).cloned().collect::<BTreeSet<_>>());
        }
    }
    Ok(minimize(out))
}

/// Whether `delta` is a minimal explanation of `target` under `rules`
/// alone.
fn minimal_under(rules: &[GroundRule], delta: &BTreeSet<Atom>, target: &Atom) -> bool {
    let gp = GroundProgram::from_parts(rules.to_vec(), Vec::new());
    if !gp.model(delta.iter()).contains(target) {
        return false;
    }
    delta.iter().all(|x| {
        let without: Vec<&Atom> = delta.iter().filter(|a| *a != x).collect();
        !gp.model(without).contains(target)
    })
}

fn ground_rules_of(clauses: &[HornClause], universe: &BTreeSet<Symbol>) -> Result<Vec<GroundRule>> {
    let kb = KnowledgeBase {
        immutable: clauses.iter().filter(|c| c.is_rule()).cloned().collect(),
        ..KnowledgeBase::default()
    };
    Ok(GroundProgram::with_universe(&kb, universe)?.rules)
}

/// Keeps the explanations that are minimal with respect to their own
/// supporting rules (all rules when an explanation carries none), with
/// duplicates merged.
pub fn locally_minimal_filter(family: &ExplanationFamily, kb: &KnowledgeBase) -> Result<ExplanationFamily> {
    let universe = kb.constants(std::slice::from_ref(&family.target));
    let all = GroundProgram::with_universe(kb, &universe)?.rules;
    let mut out: Vec<Explanation> = Vec::new();
    for e in &family.explanations {
        let rules = if e.support.is_empty() {
            all.clone()
        } else {
            ground_rules_of(&e.support, &universe)?
        };
        if !minimal_under(&rules, &e.delta_plus, &family.target) {
            continue;
        }
        merge_into(&mut out, e.clone());
    }
    out.sort_by(|a, b| a.delta_plus.cmp(&b.delta_plus));
    Ok(ExplanationFamily {
        target: family.target.clone(),
        explanations: out,
        closed_under: match family.closed_under {
            Closure::Closed => Closure::Closed,
            _ => Closure::LocallyMinimal,
        },
    })
}

fn merge_into(out: &mut Vec<Explanation>, e: Explanation) {
    if let Some(x) = out.iter_mut().find(|x| x.delta_plus == e.delta_plus) {
        for p in e.provenance {
            if !x.provenance.contains(&p) {
                x.provenance.push(p);
            }
        }
    } else {
        out.push(e);
    }
}

/// The order in which constraint filtering and collection happen when
/// reading explanations off a tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Discard constraint-violating branches, then collect.
    FilterFirst,
    /// Collect from every branch, then discard constraint violations.
    CollectFirst,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::FilterFirst => "filter-first",
            Variant::CollectFirst => "collect-first",
        }
    }
}

/// The explanations read off an SLD tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeExplanations {
    pub variant: Variant,
    /// One candidate per success branch and per completion of a failure
    /// branch.
    pub candidates: Vec<Explanation>,
    /// Branch ids whose candidates are consistent with the constraints.
    pub consistent_branches: BTreeSet<usize>,
    /// Filter-first: atoms of the consistent candidates. Collect-first:
    /// atoms of every candidate.
    pub collected: BTreeSet<Atom>,
    /// Filter-first: missing atoms of rejected candidates. Collect-first:
    /// atoms of the consistent candidates.
    pub residual: BTreeSet<Atom>,
    /// The closed, locally minimal explanations.
    pub family: ExplanationFamily,
}

/// `kb` with its rules replaced by their ground instances.
pub fn ground_kb(kb: &KnowledgeBase, extra: &[Atom]) -> Result<KnowledgeBase> {
    let gp = GroundProgram::new(kb, extra)?;
    let mut out = kb.clone();
    out.immutable = gp.rules.iter().map(|r| r.clone().clause()).collect();
    Ok(out)
}

/// The SLD tree used for explanations: built over the ground rules, with
/// the default depth bound unless one is given.
pub fn explanation_tree(kb: &KnowledgeBase, target: &Atom, depth_bound: Option<usize>) -> Result<SLDTree> {
    let g = ground_kb(kb, std::slice::from_ref(target))?;
    let bound = depth_bound.unwrap_or_else(|| default_depth_bound(kb, target));
    Ok(sld_tree(&g, target, bound))
}

/// Reads candidate explanations off `tree` and reduces them to the closed,
/// locally minimal family.
///
/// Each success branch yields the stored facts it used; each completion of
/// a failure branch adds the base atoms it had to assume. Every candidate
/// also records the stored facts that would have to go (`delta_minus`) to
/// satisfy the constraints.
pub fn tree_explanations(
    tree: &SLDTree,
    kb: &KnowledgeBase,
    variant: Variant,
    budget: &Budget,
) -> Result<TreeExplanations> {
    if tree.has_cut_off() {
        return Err(Error::CutOff(tree.depth_bound));
    }
    let target = tree
        .root
        .first()
        .ok_or_else(|| Error::Precondition("tree has no goal".into()))?
        .clone();
    let gp = GroundProgram::new(kb, std::slice::from_ref(&target))?;
    let views = kb.view_predicates();
    let edb = kb.fact_set();

    let mut candidates: Vec<(Explanation, BTreeSet<Atom>)> = Vec::new();
    for b in &tree.branches {
        match b.status {
            BranchStatus::Success => {
                let mut e = Explanation::of(b.edb_facts.clone());
                e.provenance.push(b.id);
                e.support = b.input_clauses.iter().filter(|c| c.is_rule()).cloned().collect();
                candidates.push((e, BTreeSet::new()));
            }
            BranchStatus::Failure => {
                for c in &b.completions {
                    let delta: BTreeSet<Atom> = b
                        .edb_facts
                        .iter()
                        .chain(c.facts.iter())
                        .chain(c.assumed.iter())
                        .cloned()
                        .collect();
                    let mut e = Explanation::of(delta);
                    e.provenance.push(b.id);
                    e.support = b
                        .input_clauses
                        .iter()
                        .chain(c.clauses.iter())
                        .filter(|c| c.is_rule())
                        .cloned()
                        .collect();
                    candidates.push((e, c.assumed.clone()));
                }
            }
            BranchStatus::CutOff => unreachable!("checked above"),
        }
    }

    // Consistency of a candidate: its atoms alone must not violate a
    // constraint; stored facts outside it may be deleted.
    let mut consistent = Vec::with_capacity(candidates.len());
    for (e, _) in candidates.iter_mut() {
        let others: BTreeSet<Atom> = edb.difference(&e.delta_plus).cloned().collect();
        let conflicts = minimal_conflicts(&gp, &views, &e.delta_plus, &others, budget.subsets)?;
        let ok = !conflicts.iter().any(|c| c.is_empty());
        if ok && !conflicts.is_empty() {
            e.delta_minus = minimal_hitting_sets(&conflicts).into_iter().next().unwrap_or_default();
        }
        consistent.push(ok);
    }

    let mut collected = BTreeSet::new();
    let mut residual = BTreeSet::new();
    let mut consistent_branches = BTreeSet::new();
    for ((e, missing), ok) in candidates.iter().zip(&consistent) {
        if *ok {
            consistent_branches.extend(e.provenance.iter().copied());
        }
        match variant {
            Variant::FilterFirst => {
                if *ok {
                    collected.extend(e.delta_plus.iter().cloned());
                } else {
                    residual.extend(missing.iter().cloned());
                }
            }
            Variant::CollectFirst => {
                collected.extend(e.delta_plus.iter().cloned());
                if *ok {
                    residual.extend(e.delta_plus.iter().cloned());
                }
            }
        }
    }

    let kept: Vec<Explanation> = match variant {
        Variant::FilterFirst => candidates
            .iter()
            .zip(&consistent)
            .filter(|(_, ok)| **ok)
            .map(|((e, _), _)| e.clone())
            .collect(),
        Variant::CollectFirst => {
            let all: Vec<(Explanation, bool)> = candidates
                .iter()
                .zip(&consistent)
                .map(|((e, _), ok)| (e.clone(), *ok))
                .collect();
            all.into_iter().filter(|(_, ok)| *ok).map(|(e, _)| e).collect()
        }
    };
    let family = locally_minimal_filter(
        &ExplanationFamily {
            target: target.clone(),
            explanations: kept,
            closed_under: Closure::Closed,
        },
        kb,
    )?;
    Ok(TreeExplanations {
        variant,
        candidates: candidates.into_iter().map(|(e, _)| e).collect(),
        consistent_branches,
        collected,
        residual,
        family,
    })
}

/// Builds the explanation tree for `target` and reads both variants off it,
/// failing if they disagree.
pub fn closed_explanations(
    kb: &KnowledgeBase,
    target: &Atom,
    depth_bound: Option<usize>,
    budget: &Budget,
) -> Result<ExplanationFamily> {
    require_view(kb, target)?;
    let tree = explanation_tree(kb, target, depth_bound)?;
    let a = tree_explanations(&tree, kb, Variant::FilterFirst, budget)?;
    let b = tree_explanations(&tree, kb, Variant::CollectFirst, budget)?;
    if a.family.sets() != b.family.sets() {
        return Err(Error::Precondition(format!(
            "explanation variants disagree for `{target}`: {} against {}",
            a.family.len(),
            b.family.len()
        )));
    }
    Ok(a.family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{parse_atom, parse_kb};

    const BRANCHING: &str = "\
%% immutable
p :- a, e.
q :- a, f.
p :- b, f.
q :- b, e.
p :- q.
q :- a.
%% updatable
a.
e.
f.
%% constraints
:- b.
";

    fn set(src: &[&str]) -> BTreeSet<Atom> {
        src.iter().map(|s| parse_atom(s).unwrap()).collect()
    }

    fn sets(src: &[&[&str]]) -> BTreeSet<BTreeSet<Atom>> {
        src.iter().map(|s| set(s)).collect()
    }

    #[test]
    fn minimal_explanations_branching() {
        let kb = parse_kb(BRANCHING).unwrap();
        let f = minimal_explanations(&kb, &parse_atom("p").unwrap(), &Budget::default()).unwrap();
        assert_eq!(f.sets(), sets(&[&["a"], &["b", "e"], &["b", "f"]]));
    }

    #[test]
    fn undefined_target_is_rejected_and_unsupported_has_none() {
        let kb = parse_kb("%% immutable\np :- q.\nq :- r.\n").unwrap();
        let f = minimal_explanations(&kb, &parse_atom("p").unwrap(), &Budget::default()).unwrap();
        assert_eq!(f.sets(), sets(&[&["r"]]));
        assert!(minimal_explanations(&kb, &parse_atom("z").unwrap(), &Budget::default()).is_err());
    }

    #[test]
    fn tree_explanations_branching_both_variants() {
        let kb = parse_kb(BRANCHING).unwrap();
        let p = parse_atom("p").unwrap();
        let tree = explanation_tree(&kb, &p, None).unwrap();
        let a = tree_explanations(&tree, &kb, Variant::FilterFirst, &Budget::default()).unwrap();
        assert_eq!(a.collected, set(&["a", "e", "f"]));
        assert_eq!(a.residual, set(&["b"]));
        let b = tree_explanations(&tree, &kb, Variant::CollectFirst, &Budget::default()).unwrap();
        assert_eq!(b.collected, set(&["a", "b", "e", "f"]));
        assert_eq!(b.residual, set(&["a", "e", "f"]));
        let expected = sets(&[&["a"], &["a", "e"], &["a", "f"]]);
        assert_eq!(a.family.sets(), expected);
        assert_eq!(b.family.sets(), expected);
        let successes: BTreeSet<usize> = tree.successes().map(|b| b.id).collect();
        assert_eq!(a.consistent_branches, successes);
    }

    #[test]
    fn single_fact_tree() {
        let kb = parse_kb("%% immutable\np :- a.\n%% updatable\na.\n").unwrap();
        let p = parse_atom("p").unwrap();
        let tree = explanation_tree(&kb, &p, None).unwrap();
        let a = tree_explanations(&tree, &kb, Variant::FilterFirst, &Budget::default()).unwrap();
        assert_eq!(a.collected, set(&["a"]));
        assert!(a.residual.is_empty());
    }

    #[test]
    fn filter_without_support_is_plain_minimality() {
        let kb = parse_kb(BRANCHING).unwrap();
        let fam = ExplanationFamily {
            target: parse_atom("p").unwrap(),
            explanations: vec![Explanation::of(set(&["a"])), Explanation::of(set(&["a", "e"]))],
            closed_under: Closure::Raw,
        };
        let out = locally_minimal_filter(&fam, &kb).unwrap();
        assert_eq!(out.sets(), sets(&[&["a"]]));
        let single = ExplanationFamily {
            explanations: vec![Explanation::of(set(&["a"]))],
            ..fam
        };
        assert_eq!(locally_minimal_filter(&single, &kb).unwrap().sets(), sets(&[&["a"]]));
    }

    #[test]
    fn delta_minus_repairs_conflicts() {
        let kb = parse_kb("%% immutable\np :- a.\n%% updatable\nc.\n%% constraints\n:- a, c.\n").unwrap();
        let p = parse_atom("p").unwrap();
        let tree = explanation_tree(&kb, &p, None).unwrap();
        let t = tree_explanations(&tree, &kb, Variant::FilterFirst, &Budget::default()).unwrap();
        assert_eq!(t.family.len(), 1);
        let e = &t.family.explanations[0];
        assert_eq!(e.delta_plus, set(&["a"]));
        assert_eq!(e.delta_minus, set(&["c"]));
    }

    #[test]
    fn first_order_explanations() {
        let kb = parse_kb(
            "%% immutable\nsc(X,Y) :- sg(X,Z), gc(Z,Y).\n%% updatable\ngc(i1,m).\nsg(d,i1).\n",
        )
        .unwrap();
        let t = parse_atom("sc(d,m)").unwrap();
        let f = closed_explanations(&kb, &t, None, &Budget::default()).unwrap();
        // Universe {d, i1, m}: one explanation per choice of Z.
        assert_eq!(f.len(), 3);
        assert!(f.sets().contains(&set(&["sg(d,i1)", "gc(i1,m)"])));
    }
}
