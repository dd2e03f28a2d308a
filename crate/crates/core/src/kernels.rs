//! Kernel sets, incisions and kernel revision.
//!
//! A kernel of a knowledge base with respect to a clause `alpha` is a
//! minimal set of ground clauses that, together with `alpha` and the
//! integrity constraints, is inconsistent. An incision cuts at least one
//! updatable clause out of every kernel; kernel revision removes the
//! incision and adds `alpha`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Budget, Error, Result};
use crate::hitting;
use crate::inference::{GroundProgram, GroundRule};
use crate::kb::{HornClause, KnowledgeBase};
use crate::logic::Atom;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelSet {
    pub alpha: HornClause,
    /// Minimal inconsistent subsets of ground(immutable) ∪ updatable.
    pub members: Vec<BTreeSet<HornClause>>,
    /// The updatable partition the kernels were computed against.
    pub updatable: BTreeSet<HornClause>,
}

impl KernelSet {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Each member restricted to its updatable clauses.
    pub fn updatable_projection(&self) -> Vec<BTreeSet<HornClause>> {
        self.members
            .iter()
            .map(|m| m.intersection(&self.updatable).cloned().collect())
            .collect()
    }

    /// Each member restricted to its immutable (rule) clauses.
    pub fn immutable_projection(&self) -> Vec<BTreeSet<HornClause>> {
        self.members
            .iter()
            .map(|m| m.difference(&self.updatable).cloned().collect())
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct HittingSet {
    pub elements: BTreeSet<HornClause>,
}

impl HittingSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn sort_key(&self) -> Vec<String> {
        self.elements.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Display for HittingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.sort_key().join(" "))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IncisionStrategy {
    #[default]
    MinimalLexicographic,
    MinimalCardinality,
    Maximal,
}

impl IncisionStrategy {
    pub fn name(self) -> &'static str {
        match self {
            IncisionStrategy::MinimalLexicographic => "minimal-lexicographic",
            IncisionStrategy::MinimalCardinality => "minimal-cardinality",
            IncisionStrategy::Maximal => "maximal",
        }
    }
}

impl FromStr for IncisionStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "minimal-lexicographic" | "lexicographic" => Ok(IncisionStrategy::MinimalLexicographic),
            "minimal-cardinality" | "cardinality" => Ok(IncisionStrategy::MinimalCardinality),
            "maximal" => Ok(IncisionStrategy::Maximal),
            other => Err(format!("unknown incision strategy `{other}`")),
        }
    }
}

/// The ground denial bodies that `alpha` contributes: its own body when it
/// is a denial.
fn alpha_denials(alpha: &HornClause) -> Vec<Vec<Atom>> {
    if alpha.is_denial() {
        vec![alpha.body_atoms().cloned().collect()]
    } else {
        Vec::new()
    }
}

fn alpha_facts(alpha: &HornClause) -> Vec<Atom> {
    match &alpha.head {
        Some(h) if alpha.is_fact() => vec![h.clone()],
        _ => Vec::new(),
    }
}

fn check_alpha(kb: &KnowledgeBase, alpha: &HornClause) -> Result<()> {
    if !alpha.is_ground() {
        return Err(Error::Precondition(format!("`{alpha}` is not ground")));
    }
    if alpha.is_rule() {
        return Err(Error::Precondition(format!(
            "`{alpha}` is a rule; revision takes a ground fact or denial"
        )));
    }
    if alpha.has_equality() {
        return Err(Error::Precondition(format!("`{alpha}` has equality literals")));
    }
    if let Some(h) = &alpha.head {
        if kb.is_view(h) {
            return Err(Error::Precondition(format!(
                "`{alpha}` is a view fact; kernel revision inserts base facts only"
            )));
        }
    }
    Ok(())
}

/// Whether `alpha` alone is inconsistent with the rules and constraints.
pub fn alpha_inconsistent(kb: &KnowledgeBase, alpha: &HornClause) -> Result<bool> {
    let facts = alpha_facts(alpha);
    let gp = GroundProgram::new(kb, &alpha_atoms(alpha))?;
    Ok(!gp.consistent_with(facts.iter(), &alpha_denials(alpha)))
}

fn alpha_atoms(alpha: &HornClause) -> Vec<Atom> {
    alpha.atoms().cloned().collect()
}

/// Candidate elements: facts and ground rules that can take part in
/// violating a denial.
fn relevant_clauses(
    kb: &KnowledgeBase,
    gp: &GroundProgram,
    alpha: &HornClause,
) -> (Vec<HornClause>, Vec<GroundRule>) {
    let mut denial_atoms: Vec<Atom> = gp.denials.iter().flat_map(|d| d.body.iter().cloned()).collect();
    denial_atoms.extend(alpha_denials(alpha).into_iter().flatten());
    // Only rules whose bodies can all hold are worth considering.
    let possible = gp.model(kb.facts().chain(alpha_facts(alpha).iter()));
    let rules: Vec<&GroundRule> = gp
        .relevant_rules(&denial_atoms)
        .into_iter()
        .filter(|r| r.body.iter().all(|a| possible.contains(a)))
        .collect();
    let mut atoms: BTreeSet<&Atom> = denial_atoms.iter().collect();
    for r in &rules {
        atoms.extend(r.body.iter());
    }
    let facts: Vec<HornClause> = kb
        .updatable
        .iter()
        .filter(|c| c.head.as_ref().is_some_and(|h| atoms.contains(h)))
        .cloned()
        .collect();
    let mut uniq: Vec<GroundRule> = Vec::new();
    for r in rules {
        if !uniq.iter().any(|u| u.head == r.head && u.body == r.body) {
            uniq.push(r.clone());
        }
    }
    (facts, uniq)
}

struct Checker<'a> {
    gp: &'a GroundProgram,
    alpha_facts: Vec<Atom>,
    alpha_denials: Vec<Vec<Atom>>,
}

impl Checker<'_> {
    fn inconsistent(&self, facts: &[&Atom], rules: &[&GroundRule]) -> bool {
        let sub = GroundProgram::from_parts(rules.iter().map(|r| (*r).clone()).collect(), self.gp.denials.clone());
        !sub.consistent_with(facts.iter().copied().chain(self.alpha_facts.iter()), &self.alpha_denials)
    }
}

/// All kernels of `kb` with respect to `alpha`.
///
/// Candidates are restricted to clauses that can contribute to a violation
/// and enumerated by increasing size, skipping supersets of kernels already
/// found.
pub fn kernel_sets(kb: &KnowledgeBase, alpha: &HornClause, budget: &Budget) -> Result<KernelSet> {
    if !alpha.is_ground() {
        return Err(Error::Precondition(format!("`{alpha}` is not ground")));
    }
    let gp = GroundProgram::new(kb, &alpha_atoms(alpha))?;
    let (facts, rules) = relevant_clauses(kb, &gp, alpha);
    let n = facts.len() + rules.len();
    budget.check_subsets("kernel enumeration", n)?;
    let checker = Checker {
        gp: &gp,
        alpha_facts: alpha_facts(alpha),
        alpha_denials: alpha_denials(alpha),
    };
    let clause_of = |i: usize| -> HornClause {
        if i < facts.len() {
            facts[i].clone()
        } else {
            rules[i - facts.len()].clause()
        }
    };
    let mut found: Vec<Vec<usize>> = Vec::new();
    for k in 0..=n {
        for combo in Combinations::new(n, k) {
            if found.iter().any(|m| m.iter().all(|x| combo.contains(x))) {
                continue;
            }
            let fs: Vec<&Atom> = combo
                .iter()
                .filter(|&&i| i < facts.len())
                .map(|&i| facts[i].head.as_ref().unwrap())
                .collect();
            let rs: Vec<&GroundRule> = combo
                .iter()
                .filter(|&&i| i >= facts.len())
                .map(|&i| &rules[i - facts.len()])
                .collect();
            if checker.inconsistent(&fs, &rs) {
                found.push(combo);
            }
        }
    }
    let mut members: Vec<BTreeSet<HornClause>> = found
        .into_iter()
        .map(|m| m.into_iter().map(clause_of).collect())
        .collect();
    members.sort();
    Ok(KernelSet {
        alpha: alpha.clone(),
        members,
        updatable: kb.updatable.clone(),
    })
}

/// k-subsets of 0..n in lexicographic order.
pub(crate) struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Combinations {
        Combinations {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// All minimal hitting sets of the kernels that contain an updatable
/// clause, using updatable clauses only.
pub fn minimal_hitting_sets(kernel: &KernelSet, updatable: &BTreeSet<HornClause>) -> Vec<HittingSet> {
    let family: Vec<BTreeSet<HornClause>> = kernel
        .members
        .iter()
        .map(|m| m.intersection(updatable).cloned().collect::<BTreeSet<_>>())
        .filter(|p| !p.is_empty())
        .collect();
    let mut out: Vec<HittingSet> = hitting::minimal_hitting_sets(&family)
        .into_iter()
        .map(|elements| HittingSet { elements })
        .collect();
    out.sort_by_key(|h| h.sort_key());
    out
}

/// Picks one incision according to `strategy`.
pub fn incision(kernel: &KernelSet, strategy: IncisionStrategy) -> HittingSet {
    match strategy {
        IncisionStrategy::Maximal => HittingSet {
            elements: kernel
                .members
                .iter()
                .flat_map(|m| m.intersection(&kernel.updatable).cloned())
                .collect(),
        },
        IncisionStrategy::MinimalLexicographic => minimal_hitting_sets(kernel, &kernel.updatable)
            .into_iter()
            .next()
            .unwrap_or_default(),
        IncisionStrategy::MinimalCardinality => minimal_hitting_sets(kernel, &kernel.updatable)
            .into_iter()
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.sort_key().cmp(&b.sort_key())))
            .unwrap_or_default(),
    }
}

/// `kb` with `cut` removed from the updatable partition and `alpha` added:
/// facts go to the updatable partition, denials to the constraints.
pub fn apply_incision(kb: &KnowledgeBase, cut: &HittingSet, alpha: &HornClause) -> KnowledgeBase {
    let mut out = kb.clone();
    for c in &cut.elements {
        out.updatable.remove(c);
    }
    if alpha.is_fact() {
        out.updatable.insert(alpha.clone());
    } else if alpha.is_denial() {
        out.constraints.insert(alpha.clone());
    }
    out
}

/// Outcome of a kernel revision, including the incision used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelRevision {
    pub kb_after: KnowledgeBase,
    pub kernel: KernelSet,
    pub incision: HittingSet,
    /// True when `alpha` contradicts the rules and constraints by itself and
    /// the knowledge base was returned unchanged.
    pub vacuous: bool,
}

pub fn kernel_revision_with(
    kb: &KnowledgeBase,
    alpha: &HornClause,
    choose: impl FnOnce(&KernelSet) -> HittingSet,
    budget: &Budget,
) -> Result<KernelRevision> {
    check_alpha(kb, alpha)?;
    if alpha_inconsistent(kb, alpha)? {
        return Ok(KernelRevision {
            kb_after: kb.clone(),
            kernel: KernelSet {
                alpha: alpha.clone(),
                members: Vec::new(),
                updatable: kb.updatable.clone(),
            },
            incision: HittingSet::default(),
            vacuous: true,
        });
    }
    let kernel = kernel_sets(kb, alpha, budget)?;
    let cut = choose(&kernel);
    Ok(KernelRevision {
        kb_after: apply_incision(kb, &cut, alpha),
        kernel,
        incision: cut,
        vacuous: false,
    })
}

pub fn kernel_revision_detailed(
    kb: &KnowledgeBase,
    alpha: &HornClause,
    strategy: IncisionStrategy,
    budget: &Budget,
) -> Result<KernelRevision> {
    kernel_revision_with(kb, alpha, |k| incision(k, strategy), budget)
}

/// Revises `kb` by a ground base fact or ground denial.
pub fn kernel_revision(
    kb: &KnowledgeBase,
    alpha: &HornClause,
    strategy: IncisionStrategy,
    budget: &Budget,
) -> Result<KnowledgeBase> {
    Ok(kernel_revision_detailed(kb, alpha, strategy, budget)?.kb_after)
}
