//! Function-free first-order syntax: terms, atoms, substitutions,
//! unification and ground instantiation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An interned identifier. Cheap to clone and safe to share across threads.
pub type Symbol = Arc<str>;

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

/// A constant or a variable. There are no function symbols.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Symbol),
    Var(Symbol),
}

impl Term {
    /// Classifies an identifier by its first character: uppercase is a
    /// variable, anything else a constant.
    pub fn from_ident(ident: &str) -> Term {
        if ident.starts_with(|c: char| c.is_ascii_uppercase()) {
            Term::Var(sym(ident))
        } else {
            Term::Const(sym(ident))
        }
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(sym(name))
    }

    pub fn var(name: &str) -> Term {
        Term::Var(sym(name))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn name(&self) -> &Symbol {
        match self {
            Term::Const(s) | Term::Var(s) => s,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Atom {
        Atom {
            predicate: sym(predicate),
            args,
        }
    }

    /// A zero-arity atom such as `p`.
    pub fn prop(predicate: &str) -> Atom {
        Atom::new(predicate, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_var())
    }

    pub fn variables(&self) -> impl Iterator<Item = &Symbol> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        })
    }

    pub fn constants(&self) -> impl Iterator<Item = &Symbol> {
        self.args.iter().filter_map(|t| match t {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        })
    }

    /// `(predicate, arity)` pair identifying the relation.
    pub fn signature(&self) -> (Symbol, usize) {
        (self.predicate.clone(), self.arity())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A finite map from variables to terms, kept in solved form: no bound
/// variable occurs in any binding, so application is idempotent.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Substitution {
    bindings: BTreeMap<Symbol, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Term)> {
        self.bindings.iter()
    }

    pub fn resolve(&self, term: &Term) -> Term {
        match term {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| term.clone()),
            Term::Const(_) => term.clone(),
        }
    }

    /// Adds `var ↦ term`, rewriting existing bindings so the map stays in
    /// solved form. Binding a variable to itself is a no-op.
    pub fn bind(&mut self, var: Symbol, term: Term) {
        let term = self.resolve(&term);
        if let Term::Var(v) = &term {
            if *v == var {
                return;
            }
        }
        for t in self.bindings.values_mut() {
            if let Term::Var(v) = t {
                if *v == var {
                    *t = term.clone();
                }
            }
        }
        self.bindings.insert(var, term);
    }

    /// Composition `other ∘ self`: apply `self` first, then `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (v, t) in &self.bindings {
            let t = other.resolve(t);
            if t != Term::Var(v.clone()) {
                out.bindings.insert(v.clone(), t);
            }
        }
        for (v, t) in &other.bindings {
            if !self.bindings.contains_key(v) {
                out.bindings.insert(v.clone(), t.clone());
            }
        }
        out
    }

    /// Restricts the substitution to the given variables.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Symbol>) -> Substitution {
        let keep: BTreeSet<&Symbol> = vars.into_iter().collect();
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(v, _)| keep.contains(v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        }
    }
}

impl FromIterator<(Symbol, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Symbol, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (v, t) in iter {
            s.bind(v, t);
        }
        s
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={t}")?;
        }
        f.write_str("}")
    }
}

/// Anything a substitution can be applied to.
pub trait Apply {
    fn apply(&self, theta: &Substitution) -> Self;
}

impl Apply for Term {
    fn apply(&self, theta: &Substitution) -> Self {
        theta.resolve(self)
    }
}

impl Apply for Atom {
    fn apply(&self, theta: &Substitution) -> Self {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|t| theta.resolve(t)).collect(),
        }
    }
}

impl<T: Apply> Apply for Vec<T> {
    fn apply(&self, theta: &Substitution) -> Self {
        self.iter().map(|x| x.apply(theta)).collect()
    }
}

pub fn apply<T: Apply>(theta: &Substitution, x: &T) -> T {
    x.apply(theta)
}

/// Most general unifier of two atoms, or `None` when they do not unify.
pub fn unify(a: &Atom, b: &Atom) -> Option<Substitution> {
    let mut theta = Substitution::new();
    unify_into(a, b, &mut theta).then_some(theta)
}

/// Extends `theta` so that it also unifies `a` and `b`. On failure `theta`
/// may be partially extended.
pub fn unify_into(a: &Atom, b: &Atom, theta: &mut Substitution) -> bool {
    if a.predicate != b.predicate || a.args.len() != b.args.len() {
        return false;
    }
    for (s, t) in a.args.iter().zip(&b.args) {
        let s = theta.resolve(s);
        let t = theta.resolve(t);
        match (s, t) {
            (Term::Const(x), Term::Const(y)) => {
                if x != y {
                    return false;
                }
            }
            (Term::Var(v), t) | (t, Term::Var(v)) => theta.bind(v, t),
        }
    }
    true
}

/// Every way of binding `vars` to constants of `universe`, in lexicographic
/// order. A single empty substitution when `vars` is empty.
pub fn groundings(vars: &[Symbol], universe: &BTreeSet<Symbol>) -> Vec<Substitution> {
    let mut out = vec![Substitution::new()];
    for v in vars {
        let mut next = Vec::with_capacity(out.len() * universe.len());
        for theta in &out {
            for c in universe {
                let mut t = theta.clone();
                t.bind(v.clone(), Term::Const(c.clone()));
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Distinct variables of a sequence of atoms in first-occurrence order.
pub fn distinct_vars<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Vec<Symbol> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for a in atoms {
        for v in a.variables() {
            if seen.insert(v.clone()) {
                out.push(v.clone());
            }
        }
    }
    out
}

/// Ground instances of every clause over `universe`.
///
/// Fails when a clause has variables and the universe is empty, since that
/// would silently drop the clause.
pub fn ground_instantiate(
    clauses: &BTreeSet<crate::kb::HornClause>,
    universe: &BTreeSet<Symbol>,
) -> Result<BTreeSet<crate::kb::HornClause>> {
    let mut out = BTreeSet::new();
    for c in clauses {
        let vars = c.variables();
        if vars.is_empty() {
            out.insert(c.clone());
            continue;
        }
        if universe.is_empty() {
            return Err(Error::EmptyUniverse(c.to_string()));
        }
        for theta in groundings(&vars, universe) {
            out.insert(c.apply(&theta));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::HornClause;

    fn atom(s: &str) -> Atom {
        crate::kb::parse_atom(s).unwrap()
    }

    #[test]
    fn unify_single_binding() {
        let theta = unify(&atom("p(X)"), &atom("p(a)")).unwrap();
        assert_eq!(theta.get("X"), Some(&Term::constant("a")));
        assert_eq!(theta.len(), 1);
    }

    #[test]
    fn unify_constant_clash() {
        assert!(unify(&atom("p(a)"), &atom("p(b)")).is_none());
        assert!(unify(&atom("p(a)"), &atom("q(a)")).is_none());
        assert!(unify(&atom("p(a)"), &atom("p(a,b)")).is_none());
    }

    #[test]
    fn unify_staff_chair() {
        let a = atom("staff_chair(delhibabu,Y)");
        let b = atom("staff_chair(X,aravindan)");
        let theta = unify(&a, &b).unwrap();
        assert_eq!(theta.get("X"), Some(&Term::constant("delhibabu")));
        assert_eq!(theta.get("Y"), Some(&Term::constant("aravindan")));
        assert_eq!(a.apply(&theta), b.apply(&theta));
        assert_eq!(a.apply(&theta).to_string(), "staff_chair(delhibabu,aravindan)");
    }

    #[test]
    fn unify_shared_variables() {
        let theta = unify(&atom("p(X,X)"), &atom("p(Y,a)")).unwrap();
        assert_eq!(atom("p(X,X)").apply(&theta), atom("p(a,a)"));
        assert!(unify(&atom("p(X,X)"), &atom("p(a,b)")).is_none());
    }

    #[test]
    fn apply_examples() {
        let theta: Substitution = [(sym("X"), Term::constant("a"))].into_iter().collect();
        assert_eq!(atom("p(X,Y)").apply(&theta), atom("p(a,Y)"));
        assert_eq!(atom("p(X)").apply(&Substitution::new()), atom("p(X)"));

        let theta: Substitution = [
            (sym("X"), Term::constant("a")),
            (sym("Y"), Term::constant("b")),
        ]
        .into_iter()
        .collect();
        let c = crate::kb::parse_clause("q(X) :- r(X,Y).").unwrap();
        assert_eq!(c.apply(&theta).to_string(), "q(a) :- r(a,b).");
    }

    #[test]
    fn bind_keeps_solved_form() {
        let mut theta = Substitution::new();
        theta.bind(sym("X"), Term::var("Y"));
        theta.bind(sym("Y"), Term::constant("a"));
        assert_eq!(theta.get("X"), Some(&Term::constant("a")));
        let once = atom("p(X,Y,Z)").apply(&theta);
        assert_eq!(once.apply(&theta), once);
        theta.bind(sym("Z"), Term::var("Z"));
        assert!(theta.get("Z").is_none());
    }

    fn clauses(src: &[&str]) -> BTreeSet<HornClause> {
        src.iter().map(|s| crate::kb::parse_clause(s).unwrap()).collect()
    }

    fn universe(cs: &[&str]) -> BTreeSet<Symbol> {
        cs.iter().map(|c| sym(c)).collect()
    }

    #[test]
    fn ground_one_variable() {
        let g = ground_instantiate(&clauses(&["p(X) :- q(X)."]), &universe(&["a", "b"])).unwrap();
        assert_eq!(g, clauses(&["p(a) :- q(a).", "p(b) :- q(b)."]));
    }

    #[test]
    fn ground_clause_unchanged() {
        let c = clauses(&["p :- q."]);
        assert_eq!(ground_instantiate(&c, &universe(&["a"])).unwrap(), c);
    }

    #[test]
    fn ground_two_variables() {
        let g = ground_instantiate(&clauses(&["t(X,Y) :- s(X), r(Y)."]), &universe(&["a", "b"]))
            .unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.iter().all(|c| c.is_ground()));
    }

    #[test]
    fn ground_empty_universe_is_an_error() {
        let err = ground_instantiate(&clauses(&["p(X) :- q(X)."]), &BTreeSet::new());
        assert!(matches!(err, Err(Error::EmptyUniverse(_))));
        // ground clauses need no universe
        assert!(ground_instantiate(&clauses(&["p :- q."]), &BTreeSet::new()).is_ok());
    }
}
