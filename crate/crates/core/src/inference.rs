//! Least-model semantics, integrity checking and SLD trees.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::kb::{HornClause, KnowledgeBase, Literal};
use crate::logic::{groundings, unify_into, Apply, Atom, Substitution, Symbol};

/// Hard cap on ground instances produced by [`GroundProgram::new`].
const MAX_GROUND_INSTANCES: u128 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundRule {
    pub head: Atom,
    pub body: Vec<Atom>,
    /// The immutable clause this instance came from.
    pub source: HornClause,
}

impl GroundRule {
    pub fn clause(&self) -> HornClause {
        HornClause::rule(self.head.clone(), self.body.clone())
    }
}

/// One ground instance of a denial, with equality literals already decided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundDenial {
    pub constraint: HornClause,
    pub witness: Substitution,
    pub body: Vec<Atom>,
}

/// The ground instantiation of the immutable rules and constraints of a
/// knowledge base, with an index for forward chaining.
#[derive(Clone, Debug)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
    pub denials: Vec<GroundDenial>,
    watch: HashMap<Atom, Vec<usize>>,
    distinct_body: Vec<usize>,
}

fn eval_equality(l: &Literal) -> Option<bool> {
    match l {
        Literal::Atom(_) => None,
        Literal::Eq(s, t) => Some(s == t),
        Literal::Neq(s, t) => Some(s != t),
    }
}

fn instances(c: &HornClause, universe: &BTreeSet<Symbol>) -> Result<Vec<(Substitution, HornClause)>> {
    let vars = c.variables();
    let needed = (universe.len() as u128).saturating_pow(vars.len() as u32);
    if needed > MAX_GROUND_INSTANCES {
        return Err(Error::BudgetExceeded {
            what: "ground instantiation",
            needed,
            limit: MAX_GROUND_INSTANCES,
        });
    }
    if !vars.is_empty() && universe.is_empty() {
        return Ok(Vec::new());
    }
    Ok(groundings(&vars, universe)
        .into_iter()
        .map(|theta| {
            let g = c.apply(&theta);
            (theta, g)
        })
        .collect())
}

impl GroundProgram {
    /// Grounds `kb` over the constants of the KB and `extra`.
    pub fn new(kb: &KnowledgeBase, extra: &[Atom]) -> Result<GroundProgram> {
        let universe = kb.constants(extra);
        GroundProgram::with_universe(kb, &universe)
    }

    pub fn with_universe(kb: &KnowledgeBase, universe: &BTreeSet<Symbol>) -> Result<GroundProgram> {
        let mut rules = Vec::new();
        for c in &kb.immutable {
            let Some(_) = &c.head else { continue };
            for (_, g) in instances(c, universe)? {
                let body: Vec<Atom> = g.body_atoms().cloned().collect();
                rules.push(GroundRule {
                    head: g.head.clone().expect("rule head"),
                    body,
                    source: c.clone(),
                });
            }
        }
        let mut denials = Vec::new();
        for c in &kb.constraints {
            'inst: for (theta, g) in instances(c, universe)? {
                for l in &g.body {
                    if eval_equality(l) == Some(false) {
                        continue 'inst;
                    }
                }
                denials.push(GroundDenial {
                    constraint: c.clone(),
                    witness: theta,
                    body: g.body_atoms().cloned().collect(),
                });
            }
        }
        Ok(GroundProgram::from_parts(rules, denials))
    }

    pub fn from_parts(rules: Vec<GroundRule>, denials: Vec<GroundDenial>) -> GroundProgram {
        let mut watch: HashMap<Atom, Vec<usize>> = HashMap::new();
        let mut distinct_body = Vec::with_capacity(rules.len());
        for (i, r) in rules.iter().enumerate() {
            let set: BTreeSet<&Atom> = r.body.iter().collect();
            distinct_body.push(set.len());
            for a in set {
                watch.entry(a.clone()).or_default().push(i);
            }
        }
        GroundProgram {
            rules,
            denials,
            watch,
            distinct_body,
        }
    }

    /// Forward-chaining closure of `facts` under the ground rules.
    pub fn model<'a>(&self, facts: impl IntoIterator<Item = &'a Atom>) -> BTreeSet<Atom> {
        let mut remaining = self.distinct_body.clone();
        let mut model: BTreeSet<Atom> = BTreeSet::new();
        let mut queue: Vec<Atom> = Vec::new();
        for f in facts {
            if model.insert(f.clone()) {
                queue.push(f.clone());
            }
        }
        for (i, r) in self.rules.iter().enumerate() {
            if remaining[i] == 0 && model.insert(r.head.clone()) {
                queue.push(r.head.clone());
            }
        }
        while let Some(a) = queue.pop() {
            if let Some(rs) = self.watch.get(&a) {
                for &i in rs {
                    remaining[i] -= 1;
                    if remaining[i] == 0 && model.insert(self.rules[i].head.clone()) {
                        queue.push(self.rules[i].head.clone());
                    }
                }
            }
        }
        model
    }

    /// Ground denial instances whose body holds in `model`.
    pub fn violated<'s>(&'s self, model: &BTreeSet<Atom>) -> impl Iterator<Item = &'s GroundDenial> + 's {
        let model = model.clone();
        self.denials
            .iter()
            .filter(move |d| d.body.iter().all(|a| model.contains(a)))
    }

    pub fn is_consistent(&self, model: &BTreeSet<Atom>) -> bool {
        !self
            .denials
            .iter()
            .any(|d| d.body.iter().all(|a| model.contains(a)))
    }

    /// Closes `facts` and checks every denial plus the optional extra denial
    /// bodies.
    pub fn consistent_with<'a>(
        &self,
        facts: impl IntoIterator<Item = &'a Atom>,
        extra_denials: &[Vec<Atom>],
    ) -> bool {
        let m = self.model(facts);
        self.is_consistent(&m) && !extra_denials.iter().any(|b| b.iter().all(|a| m.contains(a)))
    }

    /// Atoms that head some ground rule.
    pub fn heads(&self) -> BTreeSet<&Atom> {
        self.rules.iter().map(|r| &r.head).collect()
    }

    /// Rule instances reachable top-down from `goal`.
    pub fn relevant_rules(&self, goals: &[Atom]) -> Vec<&GroundRule> {
        let mut by_head: BTreeMap<&Atom, Vec<&GroundRule>> = BTreeMap::new();
        for r in &self.rules {
            by_head.entry(&r.head).or_default().push(r);
        }
        let mut seen: BTreeSet<&Atom> = BTreeSet::new();
        let mut stack: Vec<&Atom> = goals.iter().collect();
        let mut out = Vec::new();
        while let Some(a) = stack.pop() {
            if !seen.insert(a) {
                continue;
            }
            if let Some(rs) = by_head.get(a) {
                for r in rs {
                    out.push(*r);
                    stack.extend(r.body.iter());
                }
            }
        }
        out
    }

    /// A dependency cycle among ground atoms (head depends on body), if any.
    pub fn find_cycle(&self) -> Option<Vec<Atom>> {
        let mut edges: BTreeMap<&Atom, BTreeSet<&Atom>> = BTreeMap::new();
        for r in &self.rules {
            edges.entry(&r.head).or_default().extend(r.body.iter());
        }
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        fn visit<'a>(
            n: &'a Atom,
            edges: &BTreeMap<&'a Atom, BTreeSet<&'a Atom>>,
            marks: &mut BTreeMap<&'a Atom, Mark>,
            path: &mut Vec<&'a Atom>,
        ) -> Option<Vec<Atom>> {
            match marks.get(n) {
                Some(Mark::Done) => return None,
                Some(Mark::Active) => {
                    let start = path.iter().position(|p| *p == n).unwrap_or(0);
                    let mut cycle: Vec<Atom> = path[start..].iter().map(|a| (*a).clone()).collect();
                    cycle.push(n.clone());
                    return Some(cycle);
                }
                None => {}
            }
            marks.insert(n, Mark::Active);
            path.push(n);
            if let Some(next) = edges.get(n) {
                for m in next {
                    if let Some(c) = visit(m, edges, marks, path) {
                        return Some(c);
                    }
                }
            }
            path.pop();
            marks.insert(n, Mark::Done);
            None
        }
        let mut marks = BTreeMap::new();
        for n in edges.keys() {
            let mut path = Vec::new();
            if let Some(c) = visit(n, &edges, &mut marks, &mut path) {
                return Some(c);
            }
        }
        None
    }
}

/// The least Herbrand model of a knowledge base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeastModel {
    pub atoms: BTreeSet<Atom>,
}

impl LeastModel {
    pub fn contains(&self, a: &Atom) -> bool {
        self.atoms.contains(a)
    }
}

/// Least model of ground(immutable) ∪ updatable ∪ `extra_facts`.
pub fn least_model(kb: &KnowledgeBase, extra_facts: &BTreeSet<Atom>) -> Result<LeastModel> {
    let extra: Vec<Atom> = extra_facts.iter().cloned().collect();
    let gp = GroundProgram::new(kb, &extra)?;
    Ok(LeastModel {
        atoms: gp.model(kb.facts().chain(extra_facts.iter())),
    })
}

pub fn derives(kb: &KnowledgeBase, atom: &Atom) -> Result<bool> {
    let gp = GroundProgram::new(kb, std::slice::from_ref(atom))?;
    Ok(gp.model(kb.facts()).contains(atom))
}

/// The violated constraints, each with one witnessing ground substitution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ViolationSet {
    pub violations: Vec<(HornClause, Substitution)>,
}

impl ViolationSet {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn constraints(&self) -> impl Iterator<Item = &HornClause> {
        self.violations.iter().map(|(c, _)| c)
    }
}

pub fn ic_violations(kb: &KnowledgeBase, extra_facts: &BTreeSet<Atom>) -> Result<ViolationSet> {
    let extra: Vec<Atom> = extra_facts.iter().cloned().collect();
    let gp = GroundProgram::new(kb, &extra)?;
    let model = gp.model(kb.facts().chain(extra_facts.iter()));
    let mut out = ViolationSet::default();
    let mut seen = BTreeSet::new();
    for d in gp.violated(&model) {
        if seen.insert(d.constraint.clone()) {
            out.violations.push((d.constraint.clone(), d.witness.clone()));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// SLD trees
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BranchStatus {
    Success,
    Failure,
    CutOff,
}

impl fmt::Display for BranchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchStatus::Success => "success",
            BranchStatus::Failure => "failure",
            BranchStatus::CutOff => "cut-off",
        })
    }
}

/// One way to finish a failed branch by assuming missing base atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    /// Ground base atoms absent from the EDB that the completion assumes.
    pub assumed: BTreeSet<Atom>,
    /// EDB facts used after the stuck point.
    pub facts: BTreeSet<Atom>,
    /// Input clauses used after the stuck point.
    pub clauses: Vec<HornClause>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub id: usize,
    pub status: BranchStatus,
    /// Input clauses in resolution order, as written in the KB.
    pub input_clauses: Vec<HornClause>,
    /// Ground EDB facts used as input clauses.
    pub edb_facts: BTreeSet<Atom>,
    /// Answer restricted to the root goal's variables (success only).
    pub answer: Substitution,
    /// The selected atom nothing matched (failure only).
    pub stuck: Option<Atom>,
    /// The goal at the point of failure or cut-off.
    pub residual: Vec<Atom>,
    /// Abductive completions of a failure branch stuck on a base atom.
    pub completions: Vec<Completion>,
    /// Whether a completion search hit the depth bound.
    pub completion_cut_off: bool,
}

impl Branch {
    /// The ground base atoms missing from the EDB that made the branch fail:
    /// the union of what its completions assume.
    pub fn missing(&self) -> BTreeSet<Atom> {
        self.completions
            .iter()
            .flat_map(|c| c.assumed.iter().cloned())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    goal: Vec<Atom>,
    via: Option<HornClause>,
    children: Vec<usize>,
    branch: Option<usize>,
}

/// A complete SLD tree under leftmost selection, clauses in KB order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SLDTree {
    pub root: Vec<Atom>,
    pub branches: Vec<Branch>,
    pub depth_bound: usize,
    nodes: Vec<Node>,
}

impl SLDTree {
    pub fn successes(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(|b| b.status == BranchStatus::Success)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(|b| b.status == BranchStatus::Failure)
    }

    pub fn has_cut_off(&self) -> bool {
        self.branches
            .iter()
            .any(|b| b.status == BranchStatus::CutOff || b.completion_cut_off)
    }

    /// Indented rendering, one node per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.nodes.is_empty() {
            self.render_node(0, 0, &mut out);
        }
        out
    }

    fn render_node(&self, i: usize, depth: usize, out: &mut String) {
        let n = &self.nodes[i];
        let pad = "  ".repeat(depth);
        let goal = if n.goal.is_empty() {
            "[]".to_string()
        } else {
            goal_text(&n.goal)
        };
        let _ = write!(out, "{pad}");
        if let Some(c) = &n.via {
            let _ = write!(out, "[{c}] ");
        }
        let _ = write!(out, "<- {goal}");
        if let Some(b) = n.branch {
            let br = &self.branches[b];
            let _ = write!(out, "  #{} {}", br.id, br.status);
            if !br.edb_facts.is_empty() {
                let _ = write!(out, " edb={}", set_text(&br.edb_facts));
            }
            if br.status == BranchStatus::Failure {
                let missing = br.missing();
                if !missing.is_empty() {
                    let _ = write!(out, " missing={}", set_text(&missing));
                }
            }
        }
        out.push('\n');
        for &c in &n.children {
            self.render_node(c, depth + 1, out);
        }
    }
}

pub(crate) fn goal_text(goal: &[Atom]) -> String {
    goal.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ")
}

pub(crate) fn set_text(atoms: &BTreeSet<Atom>) -> String {
    format!(
        "{{{}}}",
        atoms.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ")
    )
}

/// `2 * ground atoms + 1`.
pub fn default_depth_bound(kb: &KnowledgeBase, goal: &Atom) -> usize {
    2 * kb.ground_atom_count(std::slice::from_ref(goal)) + 1
}

struct SldBuilder<'a> {
    kb: &'a KnowledgeBase,
    universe: BTreeSet<Symbol>,
    rules: Vec<&'a HornClause>,
    facts: Vec<&'a Atom>,
    views: BTreeSet<Symbol>,
    bound: usize,
    root_vars: Vec<Symbol>,
    counter: usize,
    nodes: Vec<Node>,
    branches: Vec<Branch>,
}

#[derive(Clone)]
struct Path {
    clauses: Vec<HornClause>,
    facts: BTreeSet<Atom>,
}

impl<'a> SldBuilder<'a> {
    fn fresh(&mut self) -> usize {
        self.counter += 1;
        self.counter
    }

    fn is_view(&self, a: &Atom) -> bool {
        self.views.contains(&a.predicate)
    }

    fn add_node(&mut self, goal: Vec<Atom>, via: Option<HornClause>, parent: Option<usize>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            goal,
            via,
            children: Vec::new(),
            branch: None,
        });
        if let Some(p) = parent {
            self.nodes[p].children.push(id);
        }
        id
    }

    fn leaf(&mut self, node: usize, mut branch: Branch) {
        branch.id = self.branches.len();
        self.nodes[node].branch = Some(branch.id);
        self.branches.push(branch);
    }

    /// Clauses whose head unifies with `selected`, renamed apart, with the
    /// extended substitution.
    fn resolvents(&mut self, selected: &Atom, theta: &Substitution) -> Vec<(HornClause, HornClause, Substitution)> {
        let mut out = Vec::new();
        let candidates: Vec<HornClause> = if self.is_view(selected) {
            self.rules.iter().map(|c| (*c).clone()).collect()
        } else {
            self.facts.iter().map(|a| HornClause::fact((*a).clone())).collect()
        };
        for source in candidates {
            let head = source.head.as_ref().expect("candidate has head");
            if head.predicate != selected.predicate || head.arity() != selected.arity() {
                continue;
            }
            let renamed = if source.is_ground() {
                source.clone()
            } else {
                let n = self.fresh();
                source.rename(n)
            };
            let mut t = theta.clone();
            if unify_into(selected, renamed.head.as_ref().unwrap(), &mut t) {
                out.push((source, renamed, t));
            }
        }
        out
    }

    /// `levels[i]` is the nesting depth of `goal[i]`: the root goal is at 0
    /// and body atoms sit one below the atom they replaced.
    fn explore(&mut self, node: usize, goal: Vec<Atom>, levels: Vec<usize>, theta: Substitution, path: Path) {
        if goal.is_empty() {
            let answer = theta.restrict(self.root_vars.iter());
            self.leaf(
                node,
                Branch {
                    id: 0,
                    status: BranchStatus::Success,
                    input_clauses: path.clauses,
                    edb_facts: path.facts,
                    answer,
                    stuck: None,
                    residual: Vec::new(),
                    completions: Vec::new(),
                    completion_cut_off: false,
                },
            );
            return;
        }
        if levels[0] >= self.bound {
            self.leaf(
                node,
                Branch {
                    id: 0,
                    status: BranchStatus::CutOff,
                    input_clauses: path.clauses,
                    edb_facts: path.facts,
                    answer: Substitution::new(),
                    stuck: None,
                    residual: goal,
                    completions: Vec::new(),
                    completion_cut_off: false,
                },
            );
            return;
        }
        let selected = goal[0].apply(&theta);
        let rest = &goal[1..];
        let depth = levels[0];
        let resolvents = self.resolvents(&selected, &theta);
        if resolvents.is_empty() {
            let residual: Vec<Atom> = goal.apply(&theta);
            let (completions, cut) = if self.is_view(&selected) {
                (Vec::new(), false)
            } else {
                let mut acc = Vec::new();
                let mut cut = false;
                self.complete(&residual, &levels, Substitution::new(), Completion {
                    assumed: BTreeSet::new(),
                    facts: BTreeSet::new(),
                    clauses: Vec::new(),
                }, &mut acc, &mut cut);
                (acc, cut)
            };
            self.leaf(
                node,
                Branch {
                    id: 0,
                    status: BranchStatus::Failure,
                    input_clauses: path.clauses,
                    edb_facts: path.facts,
                    answer: Substitution::new(),
                    stuck: Some(selected),
                    residual,
                    completions,
                    completion_cut_off: cut,
                },
            );
            return;
        }
        for (source, renamed, t) in resolvents {
            let mut next: Vec<Atom> = renamed.body_atoms().cloned().collect();
            let mut next_levels = vec![depth + 1; next.len()];
            next.extend(rest.iter().cloned());
            next_levels.extend_from_slice(&levels[1..]);
            let shown: Vec<Atom> = next.apply(&t);
            let child = self.add_node(shown, Some(source.clone()), Some(node));
            let mut p = path.clone();
            if source.is_fact() {
                p.facts.insert(renamed.head.as_ref().unwrap().apply(&t));
            }
            p.clauses.push(source);
            self.explore(child, next, next_levels, t, p);
        }
    }

    /// Abductive continuation: base atoms absent from the EDB are assumed.
    fn complete(
        &mut self,
        goal: &[Atom],
        levels: &[usize],
        theta: Substitution,
        acc: Completion,
        out: &mut Vec<Completion>,
        cut: &mut bool,
    ) {
        if goal.is_empty() {
            if !out.contains(&acc) {
                out.push(acc);
            }
            return;
        }
        if levels[0] >= self.bound {
            *cut = true;
            return;
        }
        let selected = goal[0].apply(&theta);
        let rest = &goal[1..];
        if self.is_view(&selected) {
            for (source, renamed, t) in self.resolvents(&selected, &theta) {
                let mut next: Vec<Atom> = renamed.body_atoms().cloned().collect();
                let mut next_levels = vec![levels[0] + 1; next.len()];
                next.extend(rest.iter().cloned());
                next_levels.extend_from_slice(&levels[1..]);
                let mut a = acc.clone();
                a.clauses.push(source);
                self.complete(&next, &next_levels, t, a, out, cut);
            }
            return;
        }
        // Base atom: every grounding, using the fact when present.
        let vars: Vec<Symbol> = crate::logic::distinct_vars([&selected]);
        for g in groundings(&vars, &self.universe) {
            let ground = selected.apply(&g);
            let t = theta.compose(&g);
            let mut a = acc.clone();
            if self.kb.contains_fact(&ground) {
                a.facts.insert(ground.clone());
                a.clauses.push(HornClause::fact(ground));
            } else {
                a.assumed.insert(ground);
            }
            self.complete(rest, &levels[1..], t, a, out, cut);
        }
    }
}

/// Builds the complete SLD tree for `<- goal`.
///
/// A branch is cut off when it selects an atom nested `depth_bound` rule
/// applications below the root, so acyclic programs are never cut off once
/// the bound exceeds the number of ground atoms. A
/// failure branch stuck on a base atom also records its abductive
/// completions.
pub fn sld_tree(kb: &KnowledgeBase, goal: &Atom, depth_bound: usize) -> SLDTree {
    let mut universe = kb.constants(std::slice::from_ref(goal));
    if universe.is_empty() {
        universe.insert(crate::logic::sym("c0"));
    }
    let mut b = SldBuilder {
        kb,
        universe,
        rules: kb.immutable.iter().filter(|c| c.is_rule()).collect(),
        facts: kb.facts().collect(),
        views: kb.view_predicates(),
        bound: depth_bound,
        root_vars: goal.variables().cloned().collect(),
        counter: 0,
        nodes: Vec::new(),
        branches: Vec::new(),
    };
    let root = b.add_node(vec![goal.clone()], None, None);
    b.explore(
        root,
        vec![goal.clone()],
        vec![0],
        Substitution::new(),
        Path {
            clauses: Vec::new(),
            facts: BTreeSet::new(),
        },
    );
    SLDTree {
        root: vec![goal.clone()],
        branches: b.branches,
        depth_bound,
        nodes: b.nodes,
    }
}

/// Replays a branch's input clauses from the root goal under leftmost
/// selection; returns the final goal, or `None` if some step fails to unify.
pub fn replay(root: &[Atom], clauses: &[HornClause]) -> Option<Vec<Atom>> {
    let mut goal: Vec<Atom> = root.to_vec();
    let mut theta = Substitution::new();
    for (n, c) in clauses.iter().enumerate() {
        let selected = goal.first()?.apply(&theta);
        let renamed = c.rename(100_000 + n);
        if !unify_into(&selected, renamed.head.as_ref()?, &mut theta) {
            return None;
        }
        let mut next: Vec<Atom> = renamed.body_atoms().cloned().collect();
        next.extend(goal[1..].iter().cloned());
        goal = next;
    }
    Some(goal.apply(&theta))
}
