//! Rationality postulates for revision, checked by definition.
//!
//! The checker takes the knowledge base before and after revising by a
//! clause and evaluates each postulate directly. Whether the clause is a
//! base fact, a view fact or a denial changes what "adding" and
//! "entailing" it mean:
//!
//! * a base fact is stored in the updatable partition;
//! * a denial is stored with the constraints, and holds when its body is
//!   not derivable;
//! * a view fact cannot be stored; it is realized by the stored facts the
//!   revision inserted, and holds when it is derivable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::abduction::minimal_supports;
use crate::error::{Budget, Error, Result};
use crate::hitting::minimize;
use crate::inference::GroundProgram;
use crate::kb::{validate, HornClause, KnowledgeBase};
use crate::logic::{Atom, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Postulate {
    Closure,
    WeakSuccess,
    Inclusion,
    ImmutableInclusion,
    Vacuity1,
    Vacuity2,
    Consistency,
    Preservation,
    StrongRelevance,
    Relevance,
    WeakRelevance,
}

impl Postulate {
    pub const ALL: [Postulate; 11] = [
        Postulate::Closure,
        Postulate::WeakSuccess,
        Postulate::Inclusion,
        Postulate::ImmutableInclusion,
        Postulate::Vacuity1,
        Postulate::Vacuity2,
        Postulate::Consistency,
        Postulate::Preservation,
        Postulate::StrongRelevance,
        Postulate::Relevance,
        Postulate::WeakRelevance,
    ];

    /// Closure through preservation plus weak relevance: the set every
    /// kernel-style operator should satisfy.
    pub const CORE: [Postulate; 9] = [
        Postulate::Closure,
        Postulate::WeakSuccess,
        Postulate::Inclusion,
        Postulate::ImmutableInclusion,
        Postulate::Vacuity1,
        Postulate::Vacuity2,
        Postulate::Consistency,
        Postulate::Preservation,
        Postulate::WeakRelevance,
    ];

    /// Closure through preservation plus strong relevance.
    pub const PARTIAL_MEET: [Postulate; 9] = [
        Postulate::Closure,
        Postulate::WeakSuccess,
        Postulate::Inclusion,
        Postulate::ImmutableInclusion,
        Postulate::Vacuity1,
        Postulate::Vacuity2,
        Postulate::Consistency,
        Postulate::Preservation,
        Postulate::StrongRelevance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Postulate::Closure => "closure",
            Postulate::WeakSuccess => "weak-success",
            Postulate::Inclusion => "inclusion",
            Postulate::ImmutableInclusion => "immutable-inclusion",
            Postulate::Vacuity1 => "vacuity-1",
            Postulate::Vacuity2 => "vacuity-2",
            Postulate::Consistency => "consistency",
            Postulate::Preservation => "preservation",
            Postulate::StrongRelevance => "strong-relevance",
            Postulate::Relevance => "relevance",
            Postulate::WeakRelevance => "weak-relevance",
        }
    }
}

impl fmt::Display for Postulate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Evidence for a failed postulate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub message: String,
    /// The clause the failure is about, when there is one.
    pub clause: Option<HornClause>,
}

impl Witness {
    fn new(message: impl Into<String>, clause: Option<HornClause>) -> Witness {
        Witness {
            message: message.into(),
            clause,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Witness),
    NotApplicable(String),
}

impl Verdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail(_) => "fail",
            Verdict::NotApplicable(_) => "n/a",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PostulateReport {
    pub verdicts: Vec<(Postulate, Verdict)>,
}

impl PostulateReport {
    pub fn get(&self, p: Postulate) -> Option<&Verdict> {
        self.verdicts.iter().find(|(q, _)| *q == p).map(|(_, v)| v)
    }

    /// Postulates among `which` that failed.
    pub fn failures(&self, which: &[Postulate]) -> Vec<(Postulate, &Witness)> {
        self.verdicts
            .iter()
            .filter(|(p, _)| which.contains(p))
            .filter_map(|(p, v)| match v {
                Verdict::Fail(w) => Some((*p, w)),
                _ => None,
            })
            .collect()
    }

    pub fn all_pass(&self, which: &[Postulate]) -> bool {
        self.failures(which).is_empty()
    }

    /// One line per postulate: name, verdict, and the witness or reason.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for (p, v) in &self.verdicts {
            let note = match v {
                Verdict::Pass => String::new(),
                Verdict::Fail(w) => w.message.clone(),
                Verdict::NotApplicable(why) => why.clone(),
            };
            let line = format!("{:<20} {:<5} {}", p.name(), v.label(), note);
            let _ = writeln!(out, "{}", line.trim_end());
        }
        out
    }
}

/// A revision operator, used to compare results for equivalent clauses.
pub type Operator<'a> = dyn Fn(&KnowledgeBase, &HornClause) -> Result<KnowledgeBase> + 'a;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Base,
    View,
    Denial,
}

fn kind_of(kb: &KnowledgeBase, alpha: &HornClause) -> Result<Kind> {
    if !alpha.is_ground() || alpha.is_rule() || alpha.has_equality() {
        return Err(Error::Precondition(format!(
            "`{alpha}` must be a ground fact or a ground denial without equalities"
        )));
    }
    Ok(match &alpha.head {
        Some(h) if kb.is_view(h) => Kind::View,
        Some(_) => Kind::Base,
        None => Kind::Denial,
    })
}

fn head(alpha: &HornClause) -> &Atom {
    alpha.head.as_ref().expect("fact has a head")
}

fn body(alpha: &HornClause) -> Vec<Atom> {
    alpha.body_atoms().cloned().collect()
}

/// Evaluation context shared by the individual checks.
struct Ctx<'a> {
    before: &'a KnowledgeBase,
    after: &'a KnowledgeBase,
    alpha: &'a HornClause,
    kind: Kind,
    gp: GroundProgram,
    views: BTreeSet<Symbol>,
    /// What stands in for `alpha` among the facts: itself for a base fact,
    /// the inserted facts for a view fact.
    alpha_facts: BTreeSet<Atom>,
    alpha_denial: Vec<Vec<Atom>>,
    budget: Budget,
}

impl Ctx<'_> {
    fn consistent(&self, facts: &BTreeSet<Atom>) -> bool {
        self.gp.consistent_with(facts.iter(), &self.alpha_denial)
    }

    fn consistent_plain(&self, facts: &BTreeSet<Atom>) -> bool {
        self.gp.consistent_with(facts.iter(), &[])
    }

    /// Whether `alpha` is consistent with the rules and constraints alone.
    fn alpha_admissible(&self) -> Result<bool> {
        Ok(match self.kind {
            Kind::Base => self.consistent_plain(&BTreeSet::from([head(self.alpha).clone()])),
            // Without stored facts nothing is derivable, so no denial fires.
            Kind::Denial => true,
            Kind::View => {
                let target = head(self.alpha);
                let fam = minimal_supports(&self.gp, &self.views, std::slice::from_ref(target), |_| true, self.budget.subsets)?;
                fam.get(target)
                    .is_some_and(|f| f.iter().any(|d| self.consistent_plain(d)))
            }
        })
    }

    /// Whether `kb` (with its own constraints) entails `alpha`.
    fn entails(&self, kb: &KnowledgeBase) -> Result<bool> {
        let gp = GroundProgram::new(kb, &self.alpha.atoms().cloned().collect::<Vec<_>>())?;
        let m = gp.model(kb.facts());
        Ok(match self.kind {
            Kind::Base | Kind::View => m.contains(head(self.alpha)),
            Kind::Denial => !self.alpha.body_atoms().all(|a| m.contains(a)),
        })
    }
}

/// Evaluates every postulate on `before` revised by `alpha` giving `after`.
///
/// Preservation needs `operator` to revise by equivalent clauses; without
/// it that postulate is reported not applicable.
pub fn check_postulates(
    before: &KnowledgeBase,
    alpha: &HornClause,
    after: &KnowledgeBase,
    operator: Option<&Operator<'_>>,
    budget: &Budget,
) -> Result<PostulateReport> {
    let kind = kind_of(before, alpha)?;
    let extra: Vec<Atom> = alpha.atoms().cloned().collect();
    let gp = GroundProgram::new(before, &extra)?;
    let before_facts = before.fact_set();
    let after_facts = after.fact_set();
    let alpha_facts = match kind {
        Kind::Base => BTreeSet::from([head(alpha).clone()]),
        Kind::View => after_facts.difference(&before_facts).cloned().collect(),
        Kind::Denial => BTreeSet::new(),
    };
    let alpha_denial = if kind == Kind::Denial { vec![body(alpha)] } else { Vec::new() };
    let ctx = Ctx {
        before,
        after,
        alpha,
        kind,
        gp,
        views: before.view_predicates(),
        alpha_facts,
        alpha_denial,
        budget: *budget,
    };
    let admissible = ctx.alpha_admissible()?;

    let verdicts = vec![
        (Postulate::Closure, closure(&ctx)),
        (Postulate::WeakSuccess, weak_success(&ctx, admissible)?),
        (Postulate::Inclusion, inclusion(&ctx)?),
        (Postulate::ImmutableInclusion, immutable_inclusion(&ctx)),
        (Postulate::Vacuity1, vacuity_1(&ctx, admissible)),
        (Postulate::Vacuity2, vacuity_2(&ctx)?),
        (Postulate::Consistency, consistency(&ctx, admissible)?),
        (Postulate::Preservation, preservation(&ctx, operator)?),
        (Postulate::StrongRelevance, strong_relevance(&ctx, admissible)?),
        (Postulate::Relevance, relevance(&ctx, true)?),
        (Postulate::WeakRelevance, relevance(&ctx, false)?),
    ];
    Ok(PostulateReport { verdicts })
}

fn closure(ctx: &Ctx) -> Verdict {
    let v = validate(ctx.after);
    match v.first() {
        None => Verdict::Pass,
        Some(first) => Verdict::Fail(Witness::new(format!("result is not a valid knowledge base: {first}"), None)),
    }
}

fn weak_success(ctx: &Ctx, admissible: bool) -> Result<Verdict> {
    if !admissible {
        return Ok(Verdict::NotApplicable("clause contradicts the rules and constraints".into()));
    }
    let holds = match ctx.kind {
        Kind::Base => ctx.after.contains_fact(head(ctx.alpha)),
        Kind::Denial => ctx.after.constraints.contains(ctx.alpha),
        Kind::View => ctx.entails(ctx.after)?,
    };
    Ok(if holds {
        Verdict::Pass
    } else {
        Verdict::Fail(Witness::new(format!("`{}` is missing from the result", ctx.alpha), Some(ctx.alpha.clone())))
    })
}

/// Base atoms occurring in some derivation of `target`: the union of its
/// locally minimal explanations.
fn derivation_atoms(gp: &GroundProgram, views: &BTreeSet<Symbol>, target: &Atom) -> BTreeSet<Atom> {
    let universe_model = {
        // Every view atom derivable from some set of base atoms.
        let all_base: BTreeSet<Atom> = gp
            .rules
            .iter()
            .flat_map(|r| r.body.iter())
            .filter(|a| !views.contains(&a.predicate))
            .cloned()
            .collect();
        gp.model(all_base.iter())
    };
    let mut by_head: BTreeMap<&Atom, Vec<&Vec<Atom>>> = BTreeMap::new();
    for r in &gp.rules {
        if r.body.iter().all(|b| universe_model.contains(b)) {
            by_head.entry(&r.head).or_default().push(&r.body);
        }
    }
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![target];
    while let Some(a) = stack.pop() {
        if !seen.insert(a) {
            continue;
        }
        if !views.contains(&a.predicate) {
            out.insert(a.clone());
            continue;
        }
        for b in by_head.get(a).into_iter().flatten() {
            stack.extend(b.iter());
        }
    }
    out
}

fn inclusion(ctx: &Ctx) -> Result<Verdict> {
    for c in &ctx.after.immutable {
        if !ctx.before.immutable.contains(c) {
            return Ok(Verdict::Fail(Witness::new(format!("rule `{c}` was not in the input"), Some(c.clone()))));
        }
    }
    for c in &ctx.after.constraints {
        if !ctx.before.constraints.contains(c) && c != ctx.alpha {
            return Ok(Verdict::Fail(Witness::new(format!("constraint `{c}` was not in the input"), Some(c.clone()))));
        }
    }
    let mut base: BTreeSet<Atom> = ctx.before.fact_set();
    if ctx.kind == Kind::Base {
        base.insert(head(ctx.alpha).clone());
    }
    let model = ctx.gp.model(base.iter());
    let explained = if ctx.kind == Kind::View {
        derivation_atoms(&ctx.gp, &ctx.views, head(ctx.alpha))
    } else {
        BTreeSet::new()
    };
    for f in ctx.after.facts() {
        if !model.contains(f) && !explained.contains(f) {
            return Ok(Verdict::Fail(Witness::new(
                format!("fact `{f}` follows neither from the input nor from an explanation"),
                Some(HornClause::fact(f.clone())),
            )));
        }
    }
    Ok(Verdict::Pass)
}

fn immutable_inclusion(ctx: &Ctx) -> Verdict {
    match ctx.before.immutable.iter().find(|c| !ctx.after.immutable.contains(c)) {
        None => Verdict::Pass,
        Some(c) => Verdict::Fail(Witness::new(format!("rule `{c}` was dropped"), Some(c.clone()))),
    }
}

fn vacuity_1(ctx: &Ctx, admissible: bool) -> Verdict {
    if admissible {
        return Verdict::NotApplicable("clause is consistent with the rules and constraints".into());
    }
    if ctx.after == ctx.before {
        Verdict::Pass
    } else {
        Verdict::Fail(Witness::new("result differs from the input", Some(ctx.alpha.clone())))
    }
}

fn vacuity_2(ctx: &Ctx) -> Result<Verdict> {
    let expected = match ctx.kind {
        Kind::Base => {
            let mut facts = ctx.before.fact_set();
            facts.insert(head(ctx.alpha).clone());
            if !ctx.consistent_plain(&facts) {
                return Ok(Verdict::NotApplicable("input plus clause is inconsistent".into()));
            }
            let mut kb = ctx.before.clone();
            kb.updatable.insert(ctx.alpha.clone());
            kb
        }
        Kind::Denial => {
            if !ctx.gp.consistent_with(ctx.before.facts(), &ctx.alpha_denial) {
                return Ok(Verdict::NotApplicable("input plus clause is inconsistent".into()));
            }
            let mut kb = ctx.before.clone();
            kb.constraints.insert(ctx.alpha.clone());
            kb
        }
        Kind::View => {
            if !(ctx.entails(ctx.before)? && ctx.consistent_plain(&ctx.before.fact_set())) {
                return Ok(Verdict::NotApplicable("view atom is not yet derivable".into()));
            }
            ctx.before.clone()
        }
    };
    Ok(if *ctx.after == expected {
        Verdict::Pass
    } else {
        Verdict::Fail(Witness::new("result is not the input plus the clause", Some(ctx.alpha.clone())))
    })
}

fn consistency(ctx: &Ctx, admissible: bool) -> Result<Verdict> {
    if !admissible {
        return Ok(Verdict::NotApplicable("clause contradicts the rules and constraints".into()));
    }
    let gp = GroundProgram::new(ctx.after, &ctx.alpha.atoms().cloned().collect::<Vec<_>>())?;
    let ok = gp.consistent_with(ctx.after.facts(), &ctx.alpha_denial);
    Ok(if ok {
        Verdict::Pass
    } else {
        Verdict::Fail(Witness::new("result violates a constraint", None))
    })
}

/// Minimal sets of base atoms under which `clause` "fires": for a fact,
/// those deriving it; for a denial, those deriving its whole body.
fn trigger_family(gp: &GroundProgram, views: &BTreeSet<Symbol>, clause: &HornClause, cap: u128) -> Result<BTreeSet<BTreeSet<Atom>>> {
    let atoms: Vec<Atom> = match &clause.head {
        Some(h) => vec![h.clone()],
        None => body(clause),
    };
    let fam = minimal_supports(gp, views, &atoms, |_| true, cap)?;
    let mut acc: Vec<BTreeSet<Atom>> = vec![BTreeSet::new()];
    for a in &atoms {
        let fa: Vec<BTreeSet<Atom>> = if views.contains(&a.predicate) {
            fam.get(a).cloned().unwrap_or_default()
        } else {
            vec![BTreeSet::from([a.clone()])]
        };
        let mut next = Vec::new();
        for x in &acc {
            for y in &fa {
                next.push(x.union(y).cloned().collect());
            }
        }
        acc = minimize(next);
    }
    Ok(acc.into_iter().collect())
}

fn fires(gp: &GroundProgram, clause: &HornClause, facts: &BTreeSet<Atom>) -> bool {
    let m = gp.model(facts.iter());
    match &clause.head {
        Some(h) => m.contains(h),
        None => clause.body_atoms().all(|a| m.contains(a)),
    }
}

/// Whether, for every set `E` of atoms from `universe`, the rules with `E`
/// entail `alpha` exactly when they entail `beta`.
pub fn kb_equivalent(
    kb: &KnowledgeBase,
    alpha: &HornClause,
    beta: &HornClause,
    universe: &BTreeSet<Atom>,
    budget: &Budget,
) -> Result<bool> {
    if alpha == beta {
        return Ok(true);
    }
    budget.check_subsets("equivalence check", universe.len())?;
    let extra: Vec<Atom> = alpha.atoms().chain(beta.atoms()).chain(universe.iter()).cloned().collect();
    let rules_only = KnowledgeBase {
        immutable: kb.immutable.clone(),
        ..KnowledgeBase::default()
    };
    let gp = GroundProgram::new(&rules_only, &extra)?;
    let items: Vec<&Atom> = universe.iter().collect();
    for mask in 0..1u64 << items.len() {
        let e: BTreeSet<Atom> = items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, a)| (*a).clone())
            .collect();
        if fires(&gp, alpha, &e) != fires(&gp, beta, &e) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Clauses of the same kind as `alpha` to test preservation against.
fn preservation_candidates(ctx: &Ctx) -> Vec<HornClause> {
    let extra: Vec<Atom> = ctx.alpha.atoms().cloned().collect();
    let base = ctx.before.base_atom_universe(&extra);
    let view_atoms: BTreeSet<Atom> = ctx.gp.rules.iter().map(|r| r.head.clone()).collect();
    match ctx.kind {
        Kind::Base => base.into_iter().map(HornClause::fact).collect(),
        Kind::View => view_atoms.into_iter().map(HornClause::fact).collect(),
        Kind::Denial => base
            .into_iter()
            .chain(view_atoms)
            .map(|a| HornClause::denial(vec![a]))
            .collect(),
    }
}

fn preservation(ctx: &Ctx, operator: Option<&Operator<'_>>) -> Result<Verdict> {
    let Some(op) = operator else {
        return Ok(Verdict::NotApplicable("no operator to compare against".into()));
    };
    let cap = ctx.budget.subsets;
    let alpha_family = trigger_family(&ctx.gp, &ctx.views, ctx.alpha, cap)?;
    let mut compared = 0;
    for beta in preservation_candidates(ctx) {
        if beta == *ctx.alpha {
            continue;
        }
        let gp_b = GroundProgram::new(ctx.before, &beta.atoms().cloned().collect::<Vec<_>>())?;
        // Entailment is monotone in the stored facts, so two clauses are
        // equivalent exactly when their minimal trigger sets agree.
        if trigger_family(&gp_b, &ctx.views, &beta, cap)? != alpha_family {
            continue;
        }
        let Ok(other) = op(ctx.before, &beta) else { continue };
        compared += 1;
        if other.updatable != ctx.after.updatable {
            return Ok(Verdict::Fail(Witness::new(
                format!("`{}` is equivalent to `{beta}` but the results differ", ctx.alpha),
                Some(beta),
            )));
        }
    }
    if compared == 0 {
        return Ok(Verdict::NotApplicable("no equivalent clause".into()));
    }
    Ok(Verdict::Pass)
}

fn strong_relevance(ctx: &Ctx, admissible: bool) -> Result<Verdict> {
    if !admissible {
        return Ok(Verdict::NotApplicable("clause contradicts the rules".into()));
    }
    Ok(if ctx.entails(ctx.after)? {
        Verdict::Pass
    } else {
        Verdict::Fail(Witness::new(format!("result does not entail `{}`", ctx.alpha), Some(ctx.alpha.clone())))
    })
}

/// Relevance of every removed fact: some `KB'` between (for the strong
/// form) the result and the input plus the clause is consistent with the
/// clause but not once the removed fact is added back.
fn relevance(ctx: &Ctx, bounded_below: bool) -> Result<Verdict> {
    let before = ctx.before.fact_set();
    let after = ctx.after.fact_set();
    let removed: Vec<&Atom> = before.difference(&after).collect();
    if removed.is_empty() {
        return Ok(Verdict::NotApplicable("nothing was removed".into()));
    }
    let pool: BTreeSet<Atom> = before.union(&ctx.alpha_facts).cloned().collect();
    let floor: BTreeSet<Atom> = if bounded_below {
        if !after.is_subset(&pool) {
            return Ok(Verdict::Fail(Witness::new("result is not within the input plus the clause", None)));
        }
        after.clone()
    } else {
        BTreeSet::new()
    };
    for beta in removed {
        let free: Vec<&Atom> = pool
            .iter()
            .filter(|a| *a != beta && !floor.contains(*a) && !ctx.alpha_facts.contains(*a))
            .collect();
        ctx.budget.check_relevance("relevance search", free.len())?;
        let mut found = false;
        for mask in 0..1u64 << free.len() {
            let mut kb: BTreeSet<Atom> = floor.union(&ctx.alpha_facts).cloned().collect();
            kb.extend(free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| (*a).clone()));
            if !ctx.consistent(&kb) {
                continue;
            }
            kb.insert(beta.clone());
            if !ctx.consistent(&kb) {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(Verdict::Fail(Witness::new(
                format!("removing `{beta}` was not needed for consistency"),
                Some(HornClause::fact(beta.clone())),
            )));
        }
    }
    Ok(Verdict::Pass)
}

// ---------------------------------------------------------------------------
// Minimal change over interpretations
// ---------------------------------------------------------------------------

/// A truth assignment: the set of true atoms.
pub type Interpretation = BTreeSet<Atom>;

/// Interpretations over `universe` satisfying every ground clause.
pub fn models(clauses: &[HornClause], universe: &[Atom]) -> Result<Vec<Interpretation>> {
    if universe.len() > 12 {
        return Err(Error::BudgetExceeded {
            what: "model enumeration",
            needed: 1u128 << universe.len(),
            limit: 1 << 12,
        });
    }
    let mut out = Vec::new();
    for mask in 0..1u64 << universe.len() {
        let i: Interpretation = universe
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, a)| a.clone())
            .collect();
        if clauses.iter().all(|c| satisfies(&i, c)) {
            out.push(i);
        }
    }
    Ok(out)
}

pub fn satisfies(i: &Interpretation, c: &HornClause) -> bool {
    let body = c.body_atoms().all(|a| i.contains(a));
    match &c.head {
        Some(h) => !body || i.contains(h),
        None => !body,
    }
}

/// Outcome of checking a revision against a preorder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PmcReport {
    /// Models of the old base are pairwise equivalent.
    pub flat_on_models: bool,
    /// Models of the old base are strictly below all other interpretations.
    pub models_strictly_first: bool,
    /// The revised models are the minimal models of the new information.
    pub minimal_models_match: bool,
}

impl PmcReport {
    pub fn holds(&self) -> bool {
        self.flat_on_models && self.models_strictly_first && self.minimal_models_match
    }
}

/// Checks `revised` against the minimal models of `phi` under `le`, and
/// that `le` is faithful to `psi`.
pub fn pmc_check(
    psi: &[HornClause],
    phi: &[HornClause],
    universe: &[Atom],
    le: &dyn Fn(&Interpretation, &Interpretation) -> bool,
    revised: &BTreeSet<Interpretation>,
) -> Result<PmcReport> {
    let all = models(&[], universe)?;
    for a in &all {
        for b in &all {
            if !le(a, b) && !le(b, a) {
                return Err(Error::Precondition(format!(
                    "preorder is not total: {} and {} are incomparable",
                    crate::inference::set_text(a),
                    crate::inference::set_text(b)
                )));
            }
        }
    }
    let lt = |a: &Interpretation, b: &Interpretation| le(a, b) && !le(b, a);
    let mod_psi = models(psi, universe)?;
    let flat_on_models = mod_psi.iter().all(|a| mod_psi.iter().all(|b| !lt(a, b)));
    let models_strictly_first = mod_psi
        .iter()
        .all(|a| all.iter().filter(|b| !mod_psi.contains(b)).all(|b| lt(a, b)));
    let mod_phi = models(phi, universe)?;
    let minimal: BTreeSet<Interpretation> = mod_phi
        .iter()
        .filter(|a| !mod_phi.iter().any(|b| lt(b, a)))
        .cloned()
        .collect();
    Ok(PmcReport {
        flat_on_models,
        models_strictly_first,
        minimal_models_match: &minimal == revised,
    })
}

/// Whether two preorders agree on every pair of interpretations.
pub fn same_preorder(
    universe: &[Atom],
    a: &dyn Fn(&Interpretation, &Interpretation) -> bool,
    b: &dyn Fn(&Interpretation, &Interpretation) -> bool,
) -> Result<bool> {
    let all = models(&[], universe)?;
    Ok(all.iter().all(|x| all.iter().all(|y| a(x, y) == b(x, y))))
}

/// Ordering by distance (size of symmetric difference) to the nearest model
/// of `psi`.
pub fn distance_preorder(psi_models: Vec<Interpretation>) -> impl Fn(&Interpretation, &Interpretation) -> bool {
    move |a, b| distance(&psi_models, a) <= distance(&psi_models, b)
}

fn distance(models: &[Interpretation], i: &Interpretation) -> usize {
    models
        .iter()
        .map(|m| m.symmetric_difference(i).count())
        .min()
        .unwrap_or(usize::MAX)
}

/// A faithful preorder with three ranks: models of `psi`, then `preferred`,
/// then everything else.
pub fn rank_preorder(
    psi_models: Vec<Interpretation>,
    preferred: BTreeSet<Interpretation>,
) -> impl Fn(&Interpretation, &Interpretation) -> bool {
    let rank = move |i: &Interpretation| {
        if psi_models.contains(i) {
            0
        } else if preferred.contains(i) {
            1
        } else {
            2
        }
    };
    move |a, b| rank(a) <= rank(b)
}
