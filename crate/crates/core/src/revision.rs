//! Revision operators and view insertion.
//!
//! Inserting a view atom is translated into a [`Transaction`] over stored
//! facts: for every explanation of the atom, insert what is missing and
//! delete a minimal set of stored facts that would otherwise violate a
//! constraint together with it. All minimal transactions are returned,
//! ranked by size and then lexicographically.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::abduction::{closed_explanations, minimal_conflicts, minimal_supports};
use crate::error::{Budget, Error, Result};
use crate::hitting::{minimal_hitting_sets, minimize};
use crate::inference::{ic_violations, GroundProgram};
use crate::kb::{HornClause, KnowledgeBase};
use crate::kernels::{self, IncisionStrategy};
use crate::logic::{Atom, Symbol};

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transaction {
    pub insertions: BTreeSet<Atom>,
    pub deletions: BTreeSet<Atom>,
}

impl Transaction {
    pub fn new(insertions: BTreeSet<Atom>, deletions: BTreeSet<Atom>) -> Transaction {
        Transaction { insertions, deletions }
    }

    pub fn len(&self) -> usize {
        self.insertions.len() + self.deletions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.insertions.is_empty() && self.deletions.is_empty()
    }

    /// Componentwise inclusion.
    pub fn is_subsumed_by(&self, other: &Transaction) -> bool {
        self.insertions.is_subset(&other.insertions) && self.deletions.is_subset(&other.deletions)
    }

    /// `kb` with the deletions removed from and the insertions added to its
    /// updatable partition.
    pub fn apply(&self, kb: &KnowledgeBase) -> KnowledgeBase {
        let mut out = kb.clone();
        for d in &self.deletions {
            out.updatable.remove(&HornClause::fact(d.clone()));
        }
        for i in &self.insertions {
            out.updatable.insert(HornClause::fact(i.clone()));
        }
        out
    }

    /// Signed atoms, insertions first, each group sorted.
    pub fn changes(&self) -> Vec<String> {
        self.insertions
            .iter()
            .map(|a| format!("+{a}"))
            .chain(self.deletions.iter().map(|a| format!("-{a}")))
            .collect()
    }

    fn rank_key(&self) -> (usize, Vec<String>) {
        (self.len(), self.changes())
    }
}

impl fmt::Display for Transaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("(no change)")
        } else {
            f.write_str(&self.changes().join(" "))
        }
    }
}

/// Sorts by size, then lexicographically by the signed atoms.
pub fn rank(ts: &mut [Transaction]) {
    ts.sort_by_cached_key(|t| t.rank_key());
}

/// Drops transactions that componentwise include another, and duplicates.
pub fn minimal_transactions(ts: impl IntoIterator<Item = Transaction>) -> Vec<Transaction> {
    let mut all: Vec<Transaction> = ts.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    all.sort_by_key(|t| t.len());
    let mut kept: Vec<Transaction> = Vec::new();
    for t in all {
        if !kept.iter().any(|k| k.is_subsumed_by(&t)) {
            kept.push(t);
        }
    }
    rank(&mut kept);
    kept
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Generalized,
    PartialMeet,
    Acyclic,
    Kernel,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Generalized => "generalized",
            Algorithm::PartialMeet => "partial-meet",
            Algorithm::Acyclic => "acyclic",
            Algorithm::Kernel => "kernel",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "generalized" => Ok(Algorithm::Generalized),
            "partial-meet" => Ok(Algorithm::PartialMeet),
            "acyclic" => Ok(Algorithm::Acyclic),
            "kernel" => Ok(Algorithm::Kernel),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevisionResult {
    pub kb_after: KnowledgeBase,
    /// The default choice; empty when nothing needed to change or when the
    /// request was refused.
    pub transaction: Transaction,
    /// Every minimal transaction found, ranked; the default comes first.
    pub alternatives: Vec<Transaction>,
    pub algorithm: Algorithm,
    /// The request contradicts the rules and constraints by itself, so the
    /// knowledge base was left unchanged.
    pub vacuous: bool,
}

impl RevisionResult {
    /// The applied transaction, or `None` when the request was refused.
    pub fn chosen(&self) -> Option<&Transaction> {
        (!self.vacuous).then_some(&self.transaction)
    }

    fn unchanged(kb: &KnowledgeBase, algorithm: Algorithm, vacuous: bool) -> RevisionResult {
        RevisionResult {
            kb_after: kb.clone(),
            transaction: Transaction::default(),
            alternatives: if vacuous { Vec::new() } else { vec![Transaction::default()] },
            algorithm,
            vacuous,
        }
    }

    fn from_ranked(kb: &KnowledgeBase, alternatives: Vec<Transaction>, algorithm: Algorithm) -> RevisionResult {
        let transaction = alternatives[0].clone();
        RevisionResult {
            kb_after: transaction.apply(kb),
            transaction,
            alternatives,
            algorithm,
            vacuous: false,
        }
    }
}

/// Adds a ground base fact without any consistency check.
pub fn expand(kb: &KnowledgeBase, alpha: &Atom) -> Result<KnowledgeBase> {
    if kb.is_view(alpha) {
        return Err(Error::Precondition(format!("`{alpha}` is a view atom and cannot be stored")));
    }
    if !alpha.is_ground() {
        return Err(Error::Precondition(format!("`{alpha}` is not ground")));
    }
    let mut out = kb.clone();
    out.updatable.insert(HornClause::fact(alpha.clone()));
    Ok(out)
}

/// A contraction operator: removes what makes the clause fail.
pub type Contraction<'a> = dyn Fn(&KnowledgeBase, &HornClause) -> Result<KnowledgeBase> + 'a;

/// Kernel contraction by the negation of a fact: cuts every minimal subset
/// that is inconsistent with it.
pub fn kernel_contraction(
    kb: &KnowledgeBase,
    alpha: &HornClause,
    strategy: IncisionStrategy,
    budget: &Budget,
) -> Result<KnowledgeBase> {
    let k = kernels::kernel_sets(kb, alpha, budget)?;
    let cut = kernels::incision(&k, strategy);
    let mut out = kb.clone();
    for c in &cut.elements {
        out.updatable.remove(c);
    }
    Ok(out)
}

/// Revision as contraction by the negation of `alpha` followed by
/// expansion.
pub fn levi_revision(kb: &KnowledgeBase, alpha: &Atom, contraction: &Contraction<'_>) -> Result<KnowledgeBase> {
    let clause = HornClause::fact(alpha.clone());
    if kernels::alpha_inconsistent(kb, &clause)? {
        return Ok(kb.clone());
    }
    expand(&contraction(kb, &clause)?, alpha)
}

fn base_explanations(
    gp: &GroundProgram,
    views: &BTreeSet<Symbol>,
    target: &Atom,
    budget: &Budget,
) -> Result<Vec<BTreeSet<Atom>>> {
    if !views.contains(&target.predicate) {
        return Ok(vec![BTreeSet::from([target.clone()])]);
    }
    let fam = minimal_supports(gp, views, std::slice::from_ref(target), |_| true, budget.subsets)?;
    Ok(fam.get(target).cloned().unwrap_or_default())
}

struct Candidates {
    transactions: Vec<Transaction>,
    /// Number of explanations consistent with the constraints.
    consistent: usize,
}

/// For each explanation: insert what is missing, delete a minimal hitting
/// set of the stored facts that conflict with it.
fn transactions_for(
    kb: &KnowledgeBase,
    gp: &GroundProgram,
    views: &BTreeSet<Symbol>,
    explanations: impl IntoIterator<Item = BTreeSet<Atom>>,
    budget: &Budget,
) -> Result<Candidates> {
    let stored = kb.fact_set();
    let mut out = Vec::new();
    let mut consistent = 0;
    for delta in explanations {
        let others: BTreeSet<Atom> = stored.difference(&delta).cloned().collect();
        let conflicts = minimal_conflicts(gp, views, &delta, &others, budget.subsets)?;
        if conflicts.iter().any(|c| c.is_empty()) {
            continue;
        }
        consistent += 1;
        let ins: BTreeSet<Atom> = delta.difference(&stored).cloned().collect();
        for del in minimal_hitting_sets(&conflicts) {
            out.push(Transaction::new(ins.clone(), del));
        }
    }
    Ok(Candidates {
        transactions: minimal_transactions(out),
        consistent,
    })
}

fn consistent_and_derives(gp: &GroundProgram, kb: &KnowledgeBase, target: &Atom) -> bool {
    let m = gp.model(kb.facts());
    m.contains(target) && gp.is_consistent(&m)
}

fn check_target(target: &Atom) -> Result<()> {
    if !target.is_ground() {
        return Err(Error::Precondition(format!("`{target}` is not ground")));
    }
    Ok(())
}

fn finish(
    kb: &KnowledgeBase,
    target: &Atom,
    gp: &GroundProgram,
    cands: Candidates,
    algorithm: Algorithm,
) -> Result<RevisionResult> {
    if cands.transactions.is_empty() {
        if cands.consistent == 0 && has_any_explanation(gp, kb, target) {
            return Ok(RevisionResult::unchanged(kb, algorithm, true));
        }
        return Err(Error::NoRepair(format!("`{target}` has no explanation over the base atoms")));
    }
    for t in &cands.transactions {
        let after = t.apply(kb);
        if !consistent_and_derives(gp, &after, target) {
            return Err(Error::NoRepair(format!("transaction `{t}` does not realize `{target}`")));
        }
    }
    Ok(RevisionResult::from_ranked(kb, cands.transactions, algorithm))
}

fn has_any_explanation(gp: &GroundProgram, kb: &KnowledgeBase, target: &Atom) -> bool {
    if !kb.is_view(target) {
        return true;
    }
    let views = kb.view_predicates();
    minimal_supports(gp, &views, std::slice::from_ref(target), |_| true, u128::MAX)
        .map(|f| f.get(target).is_some_and(|s| !s.is_empty()))
        .unwrap_or(true)
}

/// Inserts `target` (a ground view atom or base fact) with every minimal
/// transaction enumerated.
///
/// The default transaction is applied through [`kr_procedure`], after which
/// remaining constraint violations, if any, are repaired by deleting a
/// minimal set of stored facts, at most once per ground base atom.
pub fn generalized_revision(kb: &KnowledgeBase, target: &Atom, budget: &Budget) -> Result<RevisionResult> {
    check_target(target)?;
    let gp = GroundProgram::new(kb, std::slice::from_ref(target))?;
    if consistent_and_derives(&gp, kb, target) {
        return Ok(RevisionResult::unchanged(kb, Algorithm::Generalized, false));
    }
    let views = kb.view_predicates();
    let explanations = base_explanations(&gp, &views, target, budget)?;
    let cands = transactions_for(kb, &gp, &views, explanations, budget)?;
    let mut result = finish(kb, target, &gp, cands, Algorithm::Generalized)?;
    if result.vacuous {
        return Ok(result);
    }
    let t = &result.transaction;
    let mut after = kr_procedure(kb, &t.insertions, &t.deletions, budget)?;
    let bound = kb.ground_atom_count(std::slice::from_ref(target)).max(1);
    let mut rounds = 0;
    loop {
        let v = ic_violations(&after, &BTreeSet::new())?;
        if v.is_empty() {
            break;
        }
        rounds += 1;
        if rounds > bound {
            return Err(Error::NoRepair(format!(
                "constraints still violated after {bound} rounds: {}",
                v.constraints().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
            )));
        }
        let keep: BTreeSet<Atom> = result.transaction.insertions.clone();
        let optional: BTreeSet<Atom> = after.fact_set().difference(&keep).cloned().collect();
        let conflicts = minimal_conflicts(&gp, &views, &keep, &optional, budget.subsets)?;
        let cut = minimal_hitting_sets(&conflicts).into_iter().next().ok_or_else(|| {
            Error::NoRepair("a constraint is violated by the inserted facts alone".into())
        })?;
        after = kr_procedure(&after, &BTreeSet::new(), &cut, budget)?;
    }
    result.kb_after = after;
    Ok(result)
}

/// Makes every atom of `delta_plus` derivable and every atom of
/// `delta_minus` underivable by editing stored facts.
///
/// Atoms already in the wanted state are skipped. Deletions take the first
/// minimal hitting set of the stored supports of each unwanted atom;
/// insertions then add the missing atoms of the smallest explanation of each
/// wanted atom that avoids the deleted facts.
pub fn kr_procedure(
    kb: &KnowledgeBase,
    delta_plus: &BTreeSet<Atom>,
    delta_minus: &BTreeSet<Atom>,
    budget: &Budget,
) -> Result<KnowledgeBase> {
    let extra: Vec<Atom> = delta_plus.iter().chain(delta_minus.iter()).cloned().collect();
    let gp = GroundProgram::new(kb, &extra)?;
    let model = gp.model(kb.facts());
    let pos: Vec<&Atom> = delta_plus.iter().filter(|e| !model.contains(*e)).collect();
    let neg: Vec<&Atom> = delta_minus.iter().filter(|e| model.contains(*e)).collect();
    if pos.is_empty() && neg.is_empty() {
        return Ok(kb.clone());
    }
    let views = kb.view_predicates();
    let stored = kb.fact_set();

    let mut removed: BTreeSet<Atom> = BTreeSet::new();
    if !neg.is_empty() {
        let targets: Vec<Atom> = neg.iter().map(|a| (*a).clone()).collect();
        let fam = minimal_supports(&gp, &views, &targets, |a| stored.contains(a), budget.subsets)?;
        let mut supports: Vec<BTreeSet<Atom>> = Vec::new();
        for n in &neg {
            if views.contains(&n.predicate) {
                supports.extend(fam.get(*n).cloned().unwrap_or_default());
            } else {
                supports.push(BTreeSet::from([(*n).clone()]));
            }
        }
        removed = minimal_hitting_sets(&minimize(supports)).into_iter().next().unwrap_or_default();
    }

    let mut added: BTreeSet<Atom> = BTreeSet::new();
    for p in &pos {
        let options = base_explanations(&gp, &views, p, budget)?;
        let best = options
            .into_iter()
            .filter(|d| d.is_disjoint(&removed))
            .map(|d| d.difference(&stored).cloned().collect::<BTreeSet<_>>())
            .min_by_key(|m| (m.len(), m.iter().map(|a| a.to_string()).collect::<Vec<_>>()))
            .ok_or_else(|| Error::NoRepair(format!("`{p}` has no explanation avoiding the deletions")))?;
        added.extend(best);
    }

    let mut out = kb.clone();
    for r in &removed {
        out.updatable.remove(&HornClause::fact(r.clone()));
    }
    for a in &added {
        out.updatable.insert(HornClause::fact(a.clone()));
    }
    Ok(out)
}

/// Whether the ground dependency graph of the rules has no cycle.
pub fn is_acyclic(kb: &KnowledgeBase) -> Result<bool> {
    Ok(dependency_cycle(kb)?.is_none())
}

/// A cycle in the ground dependency graph, first atom repeated at the end.
pub fn dependency_cycle(kb: &KnowledgeBase) -> Result<Option<Vec<Atom>>> {
    Ok(GroundProgram::new(kb, &[])?.find_cycle())
}

fn require_view_target(kb: &KnowledgeBase, target: &Atom) -> Result<()> {
    check_target(target)?;
    if !kb.is_view(target) {
        return Err(Error::Precondition(format!("`{target}` is not a view atom")));
    }
    Ok(())
}

/// View insertion for acyclic knowledge bases, with explanations read off
/// the SLD tree of the target.
pub fn acyclic_generalized_revision(kb: &KnowledgeBase, target: &Atom, budget: &Budget) -> Result<RevisionResult> {
    require_view_target(kb, target)?;
    if let Some(cycle) = dependency_cycle(kb)? {
        return Err(Error::Cyclic(cycle.iter().map(|a| a.to_string()).collect()));
    }
    let gp = GroundProgram::new(kb, std::slice::from_ref(target))?;
    if consistent_and_derives(&gp, kb, target) {
        return Ok(RevisionResult::unchanged(kb, Algorithm::Acyclic, false));
    }
    let views = kb.view_predicates();
    let family = closed_explanations(kb, target, None, budget)?;
    let cands = transactions_for(kb, &gp, &views, family.sets(), budget)?;
    finish(kb, target, &gp, cands, Algorithm::Acyclic)
}

/// Partial-meet view insertion.
///
/// The insertion set is an inclusion-minimal set of base atoms that meets
/// every consistent explanation of the target and contains one of them
/// whole; the deletion set is an inclusion-minimal set of stored facts
/// breaking every conflict with it.
pub fn partial_meet_revision(kb: &KnowledgeBase, target: &Atom, budget: &Budget) -> Result<RevisionResult> {
    require_view_target(kb, target)?;
    let gp = GroundProgram::new(kb, std::slice::from_ref(target))?;
    if consistent_and_derives(&gp, kb, target) {
        return Ok(RevisionResult::unchanged(kb, Algorithm::PartialMeet, false));
    }
    let views = kb.view_predicates();
    let family: Vec<BTreeSet<Atom>> = closed_explanations(kb, target, None, budget)?.sets().into_iter().collect();
    let stored = kb.fact_set();

    let hitting = minimal_hitting_sets(&family);
    let mut meets: Vec<BTreeSet<Atom>> = Vec::new();
    for x in &family {
        for h in &hitting {
            meets.push(x.union(h).cloned().collect());
        }
    }
    let meets = minimize(meets);

    let mut out = Vec::new();
    for e in meets {
        let others: BTreeSet<Atom> = stored.difference(&e).cloned().collect();
        let conflicts = minimal_conflicts(&gp, &views, &e, &others, budget.subsets)?;
        if conflicts.iter().any(|c| c.is_empty()) {
            continue;
        }
        let ins: BTreeSet<Atom> = e.difference(&stored).cloned().collect();
        for del in minimal_hitting_sets(&conflicts) {
            out.push(Transaction::new(ins.clone(), del));
        }
    }
    let mut alternatives: Vec<Transaction> = out.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    rank(&mut alternatives);
    let cands = Candidates {
        consistent: if family.is_empty() { 0 } else { alternatives.len() },
        transactions: alternatives,
    };
    finish(kb, target, &gp, cands, Algorithm::PartialMeet)
}

/// Kernel revision by a base fact, reported as a transaction; every minimal
/// incision yields one alternative.
pub fn kernel_revision_result(
    kb: &KnowledgeBase,
    alpha: &Atom,
    strategy: IncisionStrategy,
    budget: &Budget,
) -> Result<RevisionResult> {
    let clause = HornClause::fact(alpha.clone());
    let r = kernels::kernel_revision_detailed(kb, &clause, strategy, budget)?;
    if r.vacuous {
        return Ok(RevisionResult::unchanged(kb, Algorithm::Kernel, true));
    }
    let to_tx = |cut: &kernels::HittingSet| {
        let deletions: BTreeSet<Atom> = cut.elements.iter().filter_map(|c| c.head.clone()).collect();
        let insertions: BTreeSet<Atom> = if kb.contains_fact(alpha) && !deletions.contains(alpha) {
            BTreeSet::new()
        } else {
            BTreeSet::from([alpha.clone()])
        };
        Transaction::new(insertions, deletions.into_iter().filter(|d| d != alpha).collect())
    };
    let chosen = to_tx(&r.incision);
    let mut alternatives: Vec<Transaction> = kernels::minimal_hitting_sets(&r.kernel, &kb.updatable)
        .iter()
        .map(to_tx)
        .filter(|t| *t != chosen)
        .collect();
    rank(&mut alternatives);
    alternatives.insert(0, chosen.clone());
    Ok(RevisionResult {
        kb_after: r.kb_after,
        transaction: chosen,
        alternatives,
        algorithm: Algorithm::Kernel,
        vacuous: false,
    })
}

/// Runs `algorithm` for inserting `target`.
pub fn revise(
    kb: &KnowledgeBase,
    target: &Atom,
    algorithm: Algorithm,
    strategy: IncisionStrategy,
    budget: &Budget,
) -> Result<RevisionResult> {
    match algorithm {
        Algorithm::Generalized => generalized_revision(kb, target, budget),
        Algorithm::PartialMeet => partial_meet_revision(kb, target, budget),
        Algorithm::Acyclic => acyclic_generalized_revision(kb, target, budget),
        Algorithm::Kernel => kernel_revision_result(kb, target, strategy, budget),
    }
}
