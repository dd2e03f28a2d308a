//! Brute-force reference implementations and random instance generators.
//!
//! Everything here is deliberately naive: ground everything, evaluate by
//! repeated passes over the rules, enumerate every subset. Nothing is
//! shared with the engines under test beyond the data types and the
//! grounding of clauses.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Budget, Error, Result};
use crate::kb::{HornClause, KnowledgeBase, Literal};
use crate::kernels::KernelSet;
use crate::logic::{ground_instantiate, Atom, Symbol};
use crate::revision::Transaction;

/// A fully ground program: rules as (head, body), denials as bodies.
#[derive(Clone, Debug, Default)]
pub struct Naive {
    pub rules: Vec<(Atom, Vec<Atom>)>,
    pub denials: Vec<Vec<Atom>>,
}

impl Naive {
    pub fn new(kb: &KnowledgeBase, extra: &[Atom]) -> Result<Naive> {
        let universe = kb.constants(extra);
        let mut out = Naive::default();
        for c in ground_all(&kb.immutable, &universe)? {
            if let Some(h) = c.head.clone() {
                out.rules.push((h, c.body_atoms().cloned().collect()));
            }
        }
        out.denials = ground_denials(&kb.constraints, &universe)?;
        Ok(out)
    }

    /// Repeats passes over the rules until nothing new is derived.
    pub fn closure<'a>(&self, facts: impl IntoIterator<Item = &'a Atom>) -> BTreeSet<Atom> {
        closure(self.rules.iter().map(|(h, b)| (h, b.as_slice())), facts)
    }

    pub fn violates(&self, model: &BTreeSet<Atom>) -> bool {
        self.denials.iter().any(|d| d.iter().all(|a| model.contains(a)))
    }
}

fn ground_all(clauses: &BTreeSet<HornClause>, universe: &BTreeSet<Symbol>) -> Result<BTreeSet<HornClause>> {
    if universe.is_empty() {
        return Ok(clauses.iter().filter(|c| c.is_ground()).cloned().collect());
    }
    ground_instantiate(clauses, universe)
}

fn ground_denials(constraints: &BTreeSet<HornClause>, universe: &BTreeSet<Symbol>) -> Result<Vec<Vec<Atom>>> {
    let mut out = Vec::new();
    for c in ground_all(constraints, universe)? {
        let holds = c.body.iter().all(|l| match l {
            Literal::Atom(_) => true,
            Literal::Eq(s, t) => s == t,
            Literal::Neq(s, t) => s != t,
        });
        if holds {
            out.push(c.body_atoms().cloned().collect());
        }
    }
    Ok(out)
}

pub fn closure<'r, 'a>(
    rules: impl Iterator<Item = (&'r Atom, &'r [Atom])> + Clone,
    facts: impl IntoIterator<Item = &'a Atom>,
) -> BTreeSet<Atom> {
    let mut model: BTreeSet<Atom> = facts.into_iter().cloned().collect();
    loop {
        let mut grew = false;
        for (h, body) in rules.clone() {
            if !model.contains(h) && body.iter().all(|b| model.contains(b)) {
                model.insert(h.clone());
                grew = true;
            }
        }
        if !grew {
            return model;
        }
    }
}

fn subsets_of<T: Clone + Ord>(items: &[T], mask: u64) -> BTreeSet<T> {
    items
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, x)| x.clone())
        .collect()
}

fn bound(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::BudgetExceeded {
            what,
            needed: 1u128 << n.min(127),
            limit: 1u128 << limit,
        });
    }
    Ok(())
}

/// Keeps the sets with no proper subset in the collection.
pub fn pairwise_minimal<T: Ord + Clone>(sets: &BTreeSet<BTreeSet<T>>) -> BTreeSet<BTreeSet<T>> {
    sets.iter()
        .filter(|s| !sets.iter().any(|o| o != *s && o.is_subset(s)))
        .cloned()
        .collect()
}

/// Kernels by enumerating every subset of ground(immutable) ∪ updatable.
pub fn brute_kernels(kb: &KnowledgeBase, alpha: &HornClause) -> Result<KernelSet> {
    let extra: Vec<Atom> = alpha.atoms().cloned().collect();
    let universe = kb.constants(&extra);
    let mut elements: Vec<HornClause> = ground_all(&kb.immutable, &universe)?.into_iter().collect();
    elements.extend(kb.updatable.iter().cloned());
    bound("brute kernel enumeration", elements.len(), 20)?;
    let mut denials = ground_denials(&kb.constraints, &universe)?;
    if alpha.is_denial() {
        denials.push(alpha.body_atoms().cloned().collect());
    }
    let alpha_fact: Vec<Atom> = if alpha.is_fact() { alpha.head.iter().cloned().collect() } else { Vec::new() };

    let mut inconsistent: BTreeSet<BTreeSet<HornClause>> = BTreeSet::new();
    for mask in 0..(1u64 << elements.len()) {
        let x = subsets_of(&elements, mask);
        let rules: Vec<(Atom, Vec<Atom>)> = x
            .iter()
            .filter(|c| c.is_rule())
            .map(|c| (c.head.clone().unwrap(), c.body_atoms().cloned().collect()))
            .collect();
        let facts: Vec<Atom> = x.iter().filter(|c| c.is_fact()).filter_map(|c| c.head.clone()).collect();
        let m = closure(rules.iter().map(|(h, b)| (h, b.as_slice())), facts.iter().chain(alpha_fact.iter()));
        if denials.iter().any(|d| d.iter().all(|a| m.contains(a))) {
            inconsistent.insert(x);
        }
    }
    Ok(KernelSet {
        alpha: alpha.clone(),
        members: pairwise_minimal(&inconsistent).into_iter().collect(),
        updatable: kb.updatable.clone(),
    })
}

/// Every componentwise-minimal transaction of at most `max_changes`
/// changes after which `target` is derivable and no constraint is violated.
pub fn brute_transactions(
    kb: &KnowledgeBase,
    target: &Atom,
    max_changes: usize,
    budget: &Budget,
) -> Result<Vec<Transaction>> {
    let naive = Naive::new(kb, std::slice::from_ref(target))?;
    let stored = kb.fact_set();
    let universe = kb.base_atom_universe(std::slice::from_ref(target));
    // Candidate changes: insert an absent base atom or delete a stored fact.
    let mut changes: Vec<(bool, Atom)> = universe
        .iter()
        .filter(|a| !stored.contains(*a))
        .map(|a| (true, a.clone()))
        .collect();
    changes.extend(stored.iter().map(|a| (false, a.clone())));

    let n = changes.len();
    let mut count: u128 = 0;
    let mut c: u128 = 1;
    for k in 0..=max_changes.min(n) {
        if k > 0 {
            c = c * (n - k + 1) as u128 / k as u128;
        }
        count += c;
    }
    if count > budget.subsets {
        return Err(Error::BudgetExceeded {
            what: "brute transaction enumeration",
            needed: count,
            limit: budget.subsets,
        });
    }

    let mut valid: Vec<Transaction> = Vec::new();
    let mut pick: Vec<usize> = Vec::new();
    fn walk(
        start: usize,
        left: usize,
        pick: &mut Vec<usize>,
        changes: &[(bool, Atom)],
        test: &mut dyn FnMut(&[usize]),
    ) {
        test(pick);
        if left == 0 {
            return;
        }
        for i in start..changes.len() {
            pick.push(i);
            walk(i + 1, left - 1, pick, changes, test);
            pick.pop();
        }
    }
    let mut test = |pick: &[usize]| {
        let mut facts = stored.clone();
        let mut t = Transaction::default();
        for &i in pick {
            let (ins, a) = &changes[i];
            if *ins {
                facts.insert(a.clone());
                t.insertions.insert(a.clone());
            } else {
                facts.remove(a);
                t.deletions.insert(a.clone());
            }
        }
        let m = naive.closure(facts.iter());
        if m.contains(target) && !naive.violates(&m) {
            valid.push(t);
        }
    };
    walk(0, max_changes, &mut pick, &changes, &mut test);

    let minimal: Vec<Transaction> = valid
        .iter()
        .filter(|t| !valid.iter().any(|o| o != *t && o.is_subsumed_by(t)))
        .cloned()
        .collect();
    Ok(minimal.into_iter().collect::<BTreeSet<_>>().into_iter().collect())
}

/// Explanation families found by exhaustive enumeration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BruteExplanations {
    /// Inclusion-minimal explanations under all rules.
    pub minimal: BTreeSet<BTreeSet<Atom>>,
    /// Explanations minimal under some subset of the rules.
    pub locally_minimal: BTreeSet<BTreeSet<Atom>>,
    /// Locally minimal explanations consistent with the constraints.
    pub closed: BTreeSet<BTreeSet<Atom>>,
}

/// Enumerates every set of base atoms and every subset of the ground rules.
pub fn brute_explanations(kb: &KnowledgeBase, target: &Atom) -> Result<BruteExplanations> {
    if !kb.is_view(target) {
        return Err(Error::Precondition(format!(
            "`{target}` is not a view atom; explanations range over base atoms"
        )));
    }
    let naive = Naive::new(kb, std::slice::from_ref(target))?;
    let base: Vec<Atom> = kb.base_atom_universe(std::slice::from_ref(target)).into_iter().collect();
    bound("brute explanation base atoms", base.len(), 16)?;
    bound("brute explanation rules", naive.rules.len(), 16)?;
    bound("brute explanation pairs", base.len() + naive.rules.len(), 22)?;

    let deltas: Vec<BTreeSet<Atom>> = (0..1u64 << base.len()).map(|m| subsets_of(&base, m)).collect();
    let mut out = BruteExplanations::default();

    let derivers: BTreeSet<BTreeSet<Atom>> = deltas
        .iter()
        .filter(|d| naive.closure(d.iter()).contains(target))
        .cloned()
        .collect();
    out.minimal = pairwise_minimal(&derivers);

    for rmask in 0..1u64 << naive.rules.len() {
        let rules: Vec<&(Atom, Vec<Atom>)> = naive
            .rules
            .iter()
            .enumerate()
            .filter(|(i, _)| rmask >> i & 1 == 1)
            .map(|(_, r)| r)
            .collect();
        let under: BTreeSet<BTreeSet<Atom>> = derivers
            .iter()
            .filter(|d| closure(rules.iter().map(|(h, b)| (h, b.as_slice())), d.iter()).contains(target))
            .cloned()
            .collect();
        out.locally_minimal.extend(pairwise_minimal(&under));
    }
    out.closed = out
        .locally_minimal
        .iter()
        .filter(|d| !naive.violates(&naive.closure(d.iter())))
        .cloned()
        .collect();
    Ok(out)
}

/// Minimal hitting sets by enumerating every subset of the union.
pub fn brute_minimal_hitting_sets<T: Ord + Clone>(family: &[BTreeSet<T>]) -> BTreeSet<BTreeSet<T>> {
    let universe: Vec<T> = family.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    assert!(universe.len() <= 20, "brute hitting sets over more than 20 elements");
    let hitting: BTreeSet<BTreeSet<T>> = (0..1u64 << universe.len())
        .map(|m| subsets_of(&universe, m))
        .filter(|h| family.iter().all(|s| !s.is_disjoint(h)))
        .collect();
    pairwise_minimal(&hitting)
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

/// Shape of random propositional knowledge bases.
#[derive(Clone, Debug)]
pub struct Shape {
    pub base: Vec<&'static str>,
    /// View predicates in dependency order: a view may only use later ones.
    pub views: Vec<&'static str>,
    pub max_rules: usize,
    pub max_body: usize,
    pub constraint_prob: f64,
    pub max_constraint_body: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            base: vec!["a", "b", "c", "d"],
            views: vec!["p", "q", "r", "s"],
            max_rules: 6,
            max_body: 3,
            constraint_prob: 0.6,
            max_constraint_body: 2,
        }
    }
}

/// A random acyclic propositional knowledge base and a view atom to insert.
///
/// Rules are generated from the last view to the first, and a body may only
/// mention base atoms and views that already have a rule, so every view in
/// a body is defined and the program is acyclic.
pub fn random_instance<R: Rng>(rng: &mut R, shape: &Shape) -> (KnowledgeBase, Atom) {
    loop {
        let mut kb = KnowledgeBase::new();
        let n_rules = rng.gen_range(1..=shape.max_rules);
        let mut defined: Vec<usize> = Vec::new();
        for _ in 0..n_rules {
            let v = rng.gen_range(0..shape.views.len());
            let mut pool: Vec<Atom> = shape.base.iter().map(|b| Atom::prop(b)).collect();
            pool.extend(defined.iter().filter(|&&d| d > v).map(|&d| Atom::prop(shape.views[d])));
            pool.shuffle(rng);
            let k = rng.gen_range(1..=shape.max_body.min(pool.len()));
            let mut body: Vec<Atom> = pool.into_iter().take(k).collect();
            body.sort();
            kb.immutable.insert(HornClause::rule(Atom::prop(shape.views[v]), body));
            if !defined.contains(&v) {
                defined.push(v);
            }
        }
        for b in &shape.base {
            if rng.gen_bool(0.5) {
                kb.updatable.insert(HornClause::fact(Atom::prop(b)));
            }
        }
        if rng.gen_bool(shape.constraint_prob) {
            let mut pool: Vec<Atom> = shape.base.iter().map(|b| Atom::prop(b)).collect();
            pool.extend(defined.iter().map(|&d| Atom::prop(shape.views[d])));
            pool.shuffle(rng);
            let k = rng.gen_range(1..=shape.max_constraint_body.min(pool.len()));
            let mut body: Vec<Atom> = pool.into_iter().take(k).collect();
            body.sort();
            kb.constraints.insert(HornClause::denial(body));
        }
        if !kb.validate().is_empty() {
            continue;
        }
        let target = Atom::prop(shape.views[*defined.choose(rng).expect("at least one rule")]);
        return (kb, target);
    }
}

/// A random family of non-empty subsets of `0..universe`.
pub fn random_family<R: Rng>(rng: &mut R, universe: usize, max_sets: usize, max_size: usize) -> Vec<BTreeSet<usize>> {
    let n = rng.gen_range(1..=max_sets);
    (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=max_size.min(universe));
            let mut items: Vec<usize> = (0..universe).collect();
            items.shuffle(rng);
            items.into_iter().take(k).collect()
        })
        .collect()
}

/// Extends `s` with sets that each contain a member of `s`; when `within`
/// is set, the added sets also stay inside the union of `s`.
pub fn random_extension<R: Rng>(
    rng: &mut R,
    s: &[BTreeSet<usize>],
    universe: usize,
    extra: usize,
    within: bool,
) -> Vec<BTreeSet<usize>> {
    let union: Vec<usize> = s.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let mut out = s.to_vec();
    for _ in 0..extra {
        let mut x = s.choose(rng).expect("non-empty family").clone();
        let pool: Vec<usize> = if within { union.clone() } else { (0..universe).collect() };
        let k = rng.gen_range(0..=2);
        for _ in 0..k {
            x.insert(*pool.choose(rng).expect("non-empty pool"));
        }
        out.push(x);
    }
    out
}

// ---------------------------------------------------------------------------
// Exhaustive small family
// ---------------------------------------------------------------------------

fn subsets_up_to<T: Clone>(items: &[T], max: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for x in items {
        let grown: Vec<Vec<T>> = out
            .iter()
            .filter(|s| s.len() < max)
            .map(|s| {
                let mut s = s.clone();
                s.push(x.clone());
                s
            })
            .collect();
        out.extend(grown);
    }
    out
}

/// Every propositional knowledge base with views `p`, `q` over base atoms
/// `a`, `b`: up to three rules (`p` may use `q`), any stored facts, and at
/// most one denial of one or two atoms.
pub fn exhaustive_family() -> Vec<KnowledgeBase> {
    let a = |s: &str| Atom::prop(s);
    let mut rules = Vec::new();
    for body in subsets_up_to(&[a("a"), a("b"), a("q")], 2).into_iter().filter(|b| !b.is_empty()) {
        rules.push(HornClause::rule(a("p"), body));
    }
    for body in subsets_up_to(&[a("a"), a("b")], 2).into_iter().filter(|b| !b.is_empty()) {
        rules.push(HornClause::rule(a("q"), body));
    }
    let facts = subsets_up_to(&[a("a"), a("b")], 2);
    let denials = subsets_up_to(&[a("a"), a("b"), a("p"), a("q")], 2);
    let mut out = Vec::new();
    for rs in subsets_up_to(&rules, 3) {
        for fs in &facts {
            for ds in &denials {
                let mut kb = KnowledgeBase::new();
                kb.immutable.extend(rs.iter().cloned());
                kb.updatable.extend(fs.iter().cloned().map(HornClause::fact));
                if !ds.is_empty() {
                    kb.constraints.insert(HornClause::denial(ds.clone()));
                }
                out.push(kb);
            }
        }
    }
    out
}

/// Clauses to revise the exhaustive family by: each base fact and a denial
/// of each atom.
pub fn exhaustive_alphas() -> Vec<HornClause> {
    let mut out: Vec<HornClause> = ["a", "b"].iter().map(|s| HornClause::fact(Atom::prop(s))).collect();
    out.extend(["a", "b", "p", "q"].iter().map(|s| HornClause::denial(vec![Atom::prop(s)])));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{parse_atom, parse_clause, parse_kb};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(src: &[&str]) -> BTreeSet<Atom> {
        src.iter().map(|s| parse_atom(s).unwrap()).collect()
    }

    #[test]
    fn brute_kernels_trivial_cases() {
        let kb = parse_kb("%% updatable\na.\n").unwrap();
        assert!(brute_kernels(&kb, &parse_clause(":- b.").unwrap()).unwrap().members.is_empty());
        let k = brute_kernels(&kb, &parse_clause(":- a.").unwrap()).unwrap();
        assert_eq!(k.members, vec![BTreeSet::from([parse_clause("a.").unwrap()])]);
    }

    #[test]
    fn brute_transactions_trivial_cases() {
        let kb = parse_kb("%% immutable\np :- a.\n%% updatable\na.\n").unwrap();
        let b = Budget::default();
        let ts = brute_transactions(&kb, &parse_atom("p").unwrap(), 2, &b).unwrap();
        assert_eq!(ts, vec![Transaction::default()]);
        let kb = parse_kb("%% immutable\np :- q.\nq :- r.\n%% constraints\n:- r.\n").unwrap();
        assert!(brute_transactions(&kb, &parse_atom("p").unwrap(), 2, &b).unwrap().is_empty());
    }

    #[test]
    fn brute_explanations_branching() {
        let kb = parse_kb(
            "%% immutable\np :- a, e.\nq :- a, f.\np :- b, f.\nq :- b, e.\np :- q.\nq :- a.\n\
             %% updatable\na.\ne.\nf.\n%% constraints\n:- b.\n",
        )
        .unwrap();
        let e = brute_explanations(&kb, &parse_atom("p").unwrap()).unwrap();
        let minimal: BTreeSet<_> = [set(&["a"]), set(&["b", "e"]), set(&["b", "f"])].into();
        assert_eq!(e.minimal, minimal);
        let closed: BTreeSet<_> = [set(&["a"]), set(&["a", "e"]), set(&["a", "f"])].into();
        assert_eq!(e.closed, closed);
        assert!(brute_explanations(&kb, &parse_atom("a").unwrap()).is_err());
        let kb = parse_kb("%% immutable\np :- a.\n").unwrap();
        let e = brute_explanations(&kb, &parse_atom("p").unwrap()).unwrap();
        assert_eq!(e.minimal, [set(&["a"])].into());
    }

    #[test]
    fn random_instances_are_valid_and_reproducible() {
        let shape = Shape::default();
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (kb, t) = random_instance(&mut r1, &shape);
            assert!(kb.validate().is_empty());
            assert!(kb.is_view(&t));
            assert_eq!(random_instance(&mut r2, &shape), (kb, t));
        }
    }
}
