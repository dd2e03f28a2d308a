//! The partitioned knowledge-base model and its text format.
//!
//! A knowledge base has three disjoint parts: immutable rules (the
//! intensional database), updatable ground facts (the extensional database)
//! and headless integrity constraints. On disk each part is a section:
//!
//! ```text
//! %% immutable
//! staff_chair(X,Y) :- staff_group(X,Z), group_chair(Z,Y).
//! %% updatable
//! group_chair(infor1,matthias).
//! %% constraints
//! :- group_chair(X,Y), group_chair(X,Z), Y != Z.
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::{groundings, sym, Apply, Atom, Substitution, Symbol, Term};

/// A body literal. Equalities only appear inside constraints.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    Atom(Atom),
    Eq(Term, Term),
    Neq(Term, Term),
}

impl Literal {
    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Literal::Atom(a) => Some(a),
            _ => None,
        }
    }

    fn terms(&self) -> Vec<&Term> {
        match self {
            Literal::Atom(a) => a.args.iter().collect(),
            Literal::Eq(s, t) | Literal::Neq(s, t) => vec![s, t],
        }
    }
}

impl Apply for Literal {
    fn apply(&self, theta: &Substitution) -> Self {
        match self {
            Literal::Atom(a) => Literal::Atom(a.apply(theta)),
            Literal::Eq(s, t) => Literal::Eq(theta.resolve(s), theta.resolve(t)),
            Literal::Neq(s, t) => Literal::Neq(theta.resolve(s), theta.resolve(t)),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Atom(a) => write!(f, "{a}"),
            Literal::Eq(s, t) => write!(f, "{s} = {t}"),
            Literal::Neq(s, t) => write!(f, "{s} != {t}"),
        }
    }
}

/// A definite rule, a fact, or a denial constraint.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HornClause {
    pub head: Option<Atom>,
    pub body: Vec<Literal>,
}

impl HornClause {
    pub fn fact(head: Atom) -> HornClause {
        HornClause {
            head: Some(head),
            body: Vec::new(),
        }
    }

    pub fn rule(head: Atom, body: Vec<Atom>) -> HornClause {
        HornClause {
            head: Some(head),
            body: body.into_iter().map(Literal::Atom).collect(),
        }
    }

    pub fn denial(body: Vec<Atom>) -> HornClause {
        HornClause {
            head: None,
            body: body.into_iter().map(Literal::Atom).collect(),
        }
    }

    pub fn is_fact(&self) -> bool {
        self.head.is_some() && self.body.is_empty()
    }

    pub fn is_rule(&self) -> bool {
        self.head.is_some() && !self.body.is_empty()
    }

    pub fn is_denial(&self) -> bool {
        self.head.is_none()
    }

    pub fn body_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter_map(Literal::as_atom)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.head.iter().chain(self.body_atoms())
    }

    pub fn has_equality(&self) -> bool {
        self.body.iter().any(|l| !matches!(l, Literal::Atom(_)))
    }

    /// Distinct variables in first-occurrence order (head first).
    pub fn variables(&self) -> Vec<Symbol> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let terms = self
            .head
            .iter()
            .flat_map(|h| h.args.iter())
            .chain(self.body.iter().flat_map(|l| l.terms()));
        for t in terms {
            if let Term::Var(v) = t {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.variables().is_empty()
    }

    pub fn constants(&self) -> BTreeSet<Symbol> {
        self.head
            .iter()
            .flat_map(|h| h.args.iter())
            .chain(self.body.iter().flat_map(|l| l.terms()))
            .filter_map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(_) => None,
            })
            .collect()
    }

    /// Renames every variable `V` to `V_suffix`.
    pub fn rename(&self, suffix: usize) -> HornClause {
        let theta: Substitution = self
            .variables()
            .into_iter()
            .map(|v| {
                let renamed = Term::Var(sym(&format!("{v}_{suffix}")));
                (v, renamed)
            })
            .collect();
        self.apply(&theta)
    }
}

impl Apply for HornClause {
    fn apply(&self, theta: &Substitution) -> Self {
        HornClause {
            head: self.head.as_ref().map(|h| h.apply(theta)),
            body: self.body.apply(theta),
        }
    }
}

impl fmt::Display for HornClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = &self.head {
            write!(f, "{h}")?;
            if !self.body.is_empty() {
                f.write_str(" ")?;
            }
        }
        if !self.body.is_empty() {
            f.write_str(":- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        f.write_str(".")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Partition {
    Immutable,
    Updatable,
    Constraints,
}

impl Partition {
    pub fn name(self) -> &'static str {
        match self {
            Partition::Immutable => "immutable",
            Partition::Updatable => "updatable",
            Partition::Constraints => "constraints",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    NonGroundFact,
    NotAFact,
    UnitClauseInImmutable,
    DenialInImmutable,
    HeadInConstraint,
    EmptyBody,
    RecursiveRule,
    EqualityOutsideConstraint,
    ArityMismatch { predicate: String, arities: Vec<usize> },
    PartitionsNotDisjoint,
    ViewPredicateFact,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::NonGroundFact => f.write_str("non-ground updatable fact"),
            ViolationKind::NotAFact => f.write_str("updatable clause is not a fact"),
            ViolationKind::UnitClauseInImmutable => f.write_str("unit clause in immutable part"),
            ViolationKind::DenialInImmutable => f.write_str("denial in immutable part"),
            ViolationKind::HeadInConstraint => f.write_str("constraint has a head"),
            ViolationKind::EmptyBody => f.write_str("constraint has an empty body"),
            ViolationKind::RecursiveRule => f.write_str("recursive immutable rule"),
            ViolationKind::EqualityOutsideConstraint => {
                f.write_str("equality literal outside a constraint")
            }
            ViolationKind::ArityMismatch { predicate, arities } => {
                write!(f, "predicate `{predicate}` used with arities {arities:?}")
            }
            ViolationKind::PartitionsNotDisjoint => f.write_str("partitions not disjoint"),
            ViolationKind::ViewPredicateFact => {
                f.write_str("updatable fact uses a view predicate")
            }
        }
    }
}

/// One broken invariant, naming the clause and (when parsed) its line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub clause: Option<String>,
    pub line: Option<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.line {
            write!(f, "line {l}: ")?;
        }
        write!(f, "{}", self.kind)?;
        if let Some(c) = &self.clause {
            write!(f, " `{c}`")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub immutable: BTreeSet<HornClause>,
    pub updatable: BTreeSet<HornClause>,
    pub constraints: BTreeSet<HornClause>,
}

impl KnowledgeBase {
    pub fn new() -> KnowledgeBase {
        KnowledgeBase::default()
    }

    pub fn partition(&self, p: Partition) -> &BTreeSet<HornClause> {
        match p {
            Partition::Immutable => &self.immutable,
            Partition::Updatable => &self.updatable,
            Partition::Constraints => &self.constraints,
        }
    }

    pub fn clauses(&self) -> impl Iterator<Item = (Partition, &HornClause)> {
        self.immutable
            .iter()
            .map(|c| (Partition::Immutable, c))
            .chain(self.updatable.iter().map(|c| (Partition::Updatable, c)))
            .chain(self.constraints.iter().map(|c| (Partition::Constraints, c)))
    }

    pub fn len(&self) -> usize {
        self.immutable.len() + self.updatable.len() + self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Heads of the updatable facts.
    pub fn facts(&self) -> impl Iterator<Item = &Atom> {
        self.updatable
            .iter()
            .filter(|c| c.body.is_empty())
            .filter_map(|c| c.head.as_ref())
    }

    pub fn fact_set(&self) -> BTreeSet<Atom> {
        self.facts().cloned().collect()
    }

    /// A copy with the updatable part replaced by `facts`.
    pub fn with_facts<'a>(&self, facts: impl IntoIterator<Item = &'a Atom>) -> KnowledgeBase {
        KnowledgeBase {
            immutable: self.immutable.clone(),
            updatable: facts.into_iter().cloned().map(HornClause::fact).collect(),
            constraints: self.constraints.clone(),
        }
    }

    pub fn contains_fact(&self, a: &Atom) -> bool {
        self.updatable.contains(&HornClause::fact(a.clone()))
    }

    /// Predicates defined by immutable rules.
    pub fn view_predicates(&self) -> BTreeSet<Symbol> {
        self.immutable
            .iter()
            .filter_map(|c| c.head.as_ref())
            .map(|h| h.predicate.clone())
            .collect()
    }

    pub fn is_view(&self, a: &Atom) -> bool {
        self.immutable
            .iter()
            .filter_map(|c| c.head.as_ref())
            .any(|h| h.predicate == a.predicate)
    }

    /// Every constant mentioned by the KB or by `extra`.
    pub fn constants<'a>(&self, extra: impl IntoIterator<Item = &'a Atom>) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = self.clauses().flat_map(|(_, c)| c.constants()).collect();
        for a in extra {
            out.extend(a.constants().cloned());
        }
        out
    }

    /// `(predicate, arity)` of every non-view relation mentioned anywhere.
    pub fn base_signatures<'a>(
        &self,
        extra: impl IntoIterator<Item = &'a Atom>,
    ) -> BTreeSet<(Symbol, usize)> {
        let views = self.view_predicates();
        self.clauses()
            .flat_map(|(_, c)| c.atoms().map(Atom::signature).collect::<Vec<_>>())
            .chain(extra.into_iter().map(Atom::signature))
            .filter(|(p, _)| !views.contains(p))
            .collect()
    }

    /// Every ground base atom over the constants of the KB and `extra`:
    /// the abducible universe.
    pub fn base_atom_universe(&self, extra: &[Atom]) -> BTreeSet<Atom> {
        let constants = self.constants(extra);
        let mut out = BTreeSet::new();
        for (pred, arity) in self.base_signatures(extra) {
            let vars: Vec<Symbol> = (0..arity).map(|i| sym(&format!("V{i}"))).collect();
            let pattern = Atom {
                predicate: pred.clone(),
                args: vars.iter().cloned().map(Term::Var).collect(),
            };
            if arity > 0 && constants.is_empty() {
                continue;
            }
            for theta in groundings(&vars, &constants) {
                out.insert(pattern.apply(&theta));
            }
        }
        out
    }

    /// Number of ground atoms over every relation, used to size depth bounds.
    pub fn ground_atom_count(&self, extra: &[Atom]) -> usize {
        let constants = self.constants(extra).len().max(1);
        let sigs: BTreeSet<(Symbol, usize)> = self
            .clauses()
            .flat_map(|(_, c)| c.atoms().map(Atom::signature).collect::<Vec<_>>())
            .chain(extra.iter().map(Atom::signature))
            .collect();
        sigs.iter()
            .map(|(_, n)| constants.saturating_pow(*n as u32))
            .fold(0usize, usize::saturating_add)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let entries: Vec<_> = self.clauses().map(|(p, c)| (p, c, None)).collect();
        validate_entries(&entries)
    }
}

pub fn validate(kb: &KnowledgeBase) -> Vec<Violation> {
    kb.validate()
}

fn validate_entries(entries: &[(Partition, &HornClause, Option<usize>)]) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |kind: ViolationKind, c: &HornClause, line: Option<usize>| {
        out.push(Violation {
            kind,
            clause: Some(c.to_string()),
            line,
        })
    };

    for &(part, c, line) in entries {
        match part {
            Partition::Immutable => {
                if c.head.is_none() {
                    push(ViolationKind::DenialInImmutable, c, line);
                } else if c.body.is_empty() {
                    push(ViolationKind::UnitClauseInImmutable, c, line);
                }
                if c.has_equality() {
                    push(ViolationKind::EqualityOutsideConstraint, c, line);
                }
                if let Some(h) = &c.head {
                    if c.body_atoms().any(|b| b.predicate == h.predicate) {
                        push(ViolationKind::RecursiveRule, c, line);
                    }
                }
            }
            Partition::Updatable => {
                if !c.is_fact() {
                    push(ViolationKind::NotAFact, c, line);
                } else if !c.is_ground() {
                    push(ViolationKind::NonGroundFact, c, line);
                }
                if c.has_equality() {
                    push(ViolationKind::EqualityOutsideConstraint, c, line);
                }
            }
            Partition::Constraints => {
                if c.head.is_some() {
                    push(ViolationKind::HeadInConstraint, c, line);
                }
                if c.body.is_empty() {
                    push(ViolationKind::EmptyBody, c, line);
                }
            }
        }
    }

    // Disjointness.
    let mut seen: BTreeMap<&HornClause, Partition> = BTreeMap::new();
    for &(part, c, line) in entries {
        if let Some(prev) = seen.insert(c, part) {
            if prev != part {
                push(ViolationKind::PartitionsNotDisjoint, c, line);
            }
        }
    }

    // Arity consistency.
    let mut arities: BTreeMap<Symbol, BTreeSet<usize>> = BTreeMap::new();
    let mut first_line: BTreeMap<Symbol, Option<usize>> = BTreeMap::new();
    for &(_, c, line) in entries {
        for a in c.atoms() {
            arities.entry(a.predicate.clone()).or_default().insert(a.arity());
            first_line.entry(a.predicate.clone()).or_insert(line);
        }
    }
    for (p, ns) in &arities {
        if ns.len() > 1 {
            out.push(Violation {
                kind: ViolationKind::ArityMismatch {
                    predicate: p.to_string(),
                    arities: ns.iter().copied().collect(),
                },
                clause: None,
                line: first_line[p],
            });
        }
    }

    // View and base predicates are disjoint.
    let views: BTreeSet<&Symbol> = entries
        .iter()
        .filter(|(p, c, _)| *p == Partition::Immutable && c.is_rule())
        .filter_map(|(_, c, _)| c.head.as_ref().map(|h| &h.predicate))
        .collect();
    for &(part, c, line) in entries {
        if part == Partition::Updatable {
            if let Some(h) = &c.head {
                if views.contains(&h.predicate) {
                    out.push(Violation {
                        kind: ViolationKind::ViewPredicateFact,
                        clause: Some(c.to_string()),
                        line,
                    });
                }
            }
        }
    }
    out
}

/// A request to make a ground view atom true.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateRequest {
    pub atom: Atom,
    pub mode: UpdateMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateMode {
    Insertion,
}

impl UpdateRequest {
    pub fn insertion(kb: &KnowledgeBase, atom: Atom) -> Result<UpdateRequest> {
        if !atom.is_ground() {
            return Err(Error::Precondition(format!("update atom `{atom}` is not ground")));
        }
        if !kb.is_view(&atom) {
            return Err(Error::Precondition(format!(
                "`{atom}` does not use a view predicate"
            )));
        }
        Ok(UpdateRequest {
            atom,
            mode: UpdateMode::Insertion,
        })
    }
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
    Eq,
    Neq,
    Section(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Neck => f.write_str("`:-`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Section(s) => write!(f, "section header `%% {s}`"),
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim_start();
        if let Some(rest) = trimmed.strip_prefix("%%") {
            let name = rest.split('%').next().unwrap_or("").trim();
            out.push((Tok::Section(name.to_string()), line));
            continue;
        }
        let code = raw.split('%').next().unwrap_or("");
        let mut chars = code.char_indices().peekable();
        while let Some((start, c)) = chars.next() {
            match c {
                c if c.is_whitespace() => {}
                '(' => out.push((Tok::LParen, line)),
                ')' => out.push((Tok::RParen, line)),
                ',' => out.push((Tok::Comma, line)),
                '.' => out.push((Tok::Dot, line)),
                '=' => out.push((Tok::Eq, line)),
                ':' if matches!(chars.peek(), Some((_, '-'))) => {
                    chars.next();
                    out.push((Tok::Neck, line));
                }
                '!' if matches!(chars.peek(), Some((_, '='))) => {
                    chars.next();
                    out.push((Tok::Neq, line));
                }
                c if c.is_ascii_alphabetic() => {
                    let mut end = start + c.len_utf8();
                    while let Some(&(j, d)) = chars.peek() {
                        if d.is_ascii_alphanumeric() || d == '_' {
                            end = j + d.len_utf8();
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    out.push((Tok::Ident(code[start..end].to_string()), line));
                }
                other => return Err(syntax(line, format!("unexpected character `{other}`"))),
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, l)| *l)
            .unwrap_or(1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let line = self.line();
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(syntax(line, format!("expected {want}, found {t}"))),
            None => Err(syntax(line, format!("expected {want}, found end of input"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        let line = self.line();
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            Some(t) => Err(syntax(line, format!("expected identifier, found {t}"))),
            None => Err(syntax(line, "expected identifier, found end of input")),
        }
    }

    fn term(&mut self) -> Result<Term> {
        Ok(Term::from_ident(&self.ident()?))
    }

    fn atom_after(&mut self, name: String) -> Result<Atom> {
        let line = self.line();
        if name.starts_with(|c: char| c.is_ascii_uppercase()) {
            return Err(syntax(line, format!("predicate `{name}` must start lowercase")));
        }
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.next();
            loop {
                args.push(self.term()?);
                match self.next() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RParen) => break,
                    Some(t) => return Err(syntax(line, format!("expected `,` or `)`, found {t}"))),
                    None => return Err(syntax(line, "unterminated argument list")),
                }
            }
        }
        Ok(Atom::new(&name, args))
    }

    fn literal(&mut self) -> Result<Literal> {
        let name = self.ident()?;
        match self.peek() {
            Some(Tok::Eq) => {
                self.next();
                Ok(Literal::Eq(Term::from_ident(&name), self.term()?))
            }
            Some(Tok::Neq) => {
                self.next();
                Ok(Literal::Neq(Term::from_ident(&name), self.term()?))
            }
            _ => Ok(Literal::Atom(self.atom_after(name)?)),
        }
    }

    fn body(&mut self) -> Result<Vec<Literal>> {
        let mut body = vec![self.literal()?];
        while self.peek() == Some(&Tok::Comma) {
            self.next();
            body.push(self.literal()?);
        }
        Ok(body)
    }

    fn clause(&mut self) -> Result<HornClause> {
        let clause = if self.peek() == Some(&Tok::Neck) {
            self.next();
            HornClause {
                head: None,
                body: self.body()?,
            }
        } else {
            let name = self.ident()?;
            let head = self.atom_after(name)?;
            let body = if self.peek() == Some(&Tok::Neck) {
                self.next();
                self.body()?
            } else {
                Vec::new()
            };
            HornClause {
                head: Some(head),
                body,
            }
        };
        self.expect(Tok::Dot)?;
        Ok(clause)
    }
}

/// Parses a single clause such as `p(X) :- q(X).`
pub fn parse_clause(text: &str) -> Result<HornClause> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let c = p.clause()?;
    if let Some(t) = p.peek() {
        return Err(syntax(p.line(), format!("trailing input at {t}")));
    }
    Ok(c)
}

/// Parses an atom such as `staff_chair(delhibabu,aravindan)`. A trailing
/// `.` is accepted.
pub fn parse_atom(text: &str) -> Result<Atom> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let name = p.ident()?;
    let a = p.atom_after(name)?;
    if p.peek() == Some(&Tok::Dot) {
        p.next();
    }
    if let Some(t) = p.peek() {
        return Err(syntax(p.line(), format!("trailing input at {t}")));
    }
    Ok(a)
}

/// Parses the three-section text format and checks every invariant.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let mut section: Option<Partition> = None;
    let mut seen_sections = BTreeSet::new();
    let mut entries: Vec<(Partition, HornClause, usize)> = Vec::new();
    while let Some(tok) = p.peek().cloned() {
        let line = p.line();
        if let Tok::Section(name) = tok {
            p.next();
            let part = match name.as_str() {
                "immutable" => Partition::Immutable,
                "updatable" => Partition::Updatable,
                "constraints" => Partition::Constraints,
                other => return Err(syntax(line, format!("unknown section `{other}`"))),
            };
            if !seen_sections.insert(part) {
                return Err(syntax(line, format!("duplicate section `{name}`")));
            }
            section = Some(part);
            continue;
        }
        let Some(part) = section else {
            return Err(syntax(line, "clause before any section header"));
        };
        let clause = p.clause()?;
        entries.push((part, clause, line));
    }

    let refs: Vec<_> = entries.iter().map(|(p, c, l)| (*p, c, Some(*l))).collect();
    let violations = validate_entries(&refs);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let mut kb = KnowledgeBase::new();
    for (part, c, _) in entries {
        match part {
            Partition::Immutable => kb.immutable.insert(c),
            Partition::Updatable => kb.updatable.insert(c),
            Partition::Constraints => kb.constraints.insert(c),
        };
    }
    Ok(kb)
}

pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for part in [
        Partition::Immutable,
        Partition::Updatable,
        Partition::Constraints,
    ] {
        out.push_str("%% ");
        out.push_str(part.name());
        out.push('\n');
        for c in kb.partition(part) {
            out.push_str(&c.to_string());
            out.push('\n');
        }
    }
    out
}

impl fmt::Display for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_kb(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const STAFF: &str = "\
%% immutable
staff_chair(X,Y) :- staff_group(X,Z), group_chair(Z,Y).
%% updatable
group_chair(infor1,matthias).
group_chair(infor2,gerhard).
staff_group(delhibabu,infor1).
staff_group(aravindan,infor2).
%% constraints
:- group_chair(X,Y), group_chair(X,Z), Y != Z.
";

    #[test]
    fn parses_staff() {
        let kb = parse_kb(STAFF).unwrap();
        assert_eq!(kb.immutable.len(), 1);
        assert_eq!(kb.updatable.len(), 4);
        assert_eq!(kb.constraints.len(), 1);
        let ic = kb.constraints.iter().next().unwrap();
        assert!(matches!(ic.body[2], Literal::Neq(_, _)));
    }

    #[test]
    fn empty_text_is_empty_kb() {
        assert_eq!(parse_kb("").unwrap(), KnowledgeBase::new());
        assert_eq!(parse_kb("% nothing here\n").unwrap(), KnowledgeBase::new());
    }

    #[test]
    fn non_ground_fact_rejected() {
        let err = parse_kb("%% updatable\np(X).\n").unwrap_err();
        match err {
            Error::Invalid(vs) => {
                assert_eq!(vs[0].kind, ViolationKind::NonGroundFact);
                assert_eq!(vs[0].line, Some(2));
                assert!(vs[0].to_string().contains("non-ground updatable fact"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let err = parse_kb("%% immutable\np :- q\n%% updatable\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, .. }), "{err}");
        let err = parse_kb("p.\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 1, .. }));
        let err = parse_kb("%% bogus\n").unwrap_err();
        assert!(err.to_string().contains("unknown section"));
    }

    #[test]
    fn recursive_and_arity_violations() {
        let err = parse_kb("%% immutable\np :- p, q.\n").unwrap_err();
        assert!(err.to_string().contains("recursive immutable rule"));
        let err = parse_kb("%% immutable\np(X) :- q(X).\n%% updatable\nq(a,b).\n").unwrap_err();
        assert!(err.to_string().contains("arities"));
    }

    #[test]
    fn validate_reports_overlap_and_recursion() {
        let mut kb = KnowledgeBase::new();
        kb.immutable.insert(parse_clause("a.").unwrap());
        kb.updatable.insert(parse_clause("a.").unwrap());
        let vs = kb.validate();
        assert!(vs.iter().any(|v| v.kind == ViolationKind::PartitionsNotDisjoint));

        let mut kb = KnowledgeBase::new();
        kb.immutable.insert(parse_clause("p :- p, q.").unwrap());
        let vs = kb.validate();
        assert_eq!(vs.len(), 1);
        assert_eq!(vs[0].kind, ViolationKind::RecursiveRule);
    }

    #[test]
    fn validate_view_fact_and_equality_in_rule() {
        let mut kb = KnowledgeBase::new();
        kb.immutable.insert(parse_clause("p(X) :- q(X), X = a.").unwrap());
        kb.updatable.insert(parse_clause("p(b).").unwrap());
        let kinds: Vec<_> = kb.validate().into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::EqualityOutsideConstraint));
        assert!(kinds.contains(&ViolationKind::ViewPredicateFact));
    }

    #[test]
    fn serialize_empty_has_three_sections() {
        let text = serialize_kb(&KnowledgeBase::new());
        assert_eq!(text, "%% immutable\n%% updatable\n%% constraints\n");
    }

    #[test]
    fn two_supports_round_trip() {
        let src = "%% immutable\np :- a, b.\np :- a.\nq :- a, b.\n%% updatable\na.\nb.\n";
        let kb = parse_kb(src).unwrap();
        assert_eq!(kb.len(), 5);
        assert_eq!(parse_kb(&serialize_kb(&kb)).unwrap(), kb);
    }

    #[test]
    fn clause_display() {
        for s in ["p(X) :- q(X), r.", "a.", ":- b(X), c(X,Y), X != Y."] {
            assert_eq!(parse_clause(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn base_universe() {
        let kb = parse_kb(STAFF).unwrap();
        let u = kb.base_atom_universe(&[]);
        // two binary base relations over six constants
        assert_eq!(u.len(), 2 * 36);
        assert!(!kb.is_view(&parse_atom("group_chair(a,b)").unwrap()));
        assert!(kb.is_view(&parse_atom("staff_chair(a,b)").unwrap()));
    }

    #[test]
    fn update_request_checks() {
        let kb = parse_kb(STAFF).unwrap();
        assert!(UpdateRequest::insertion(&kb, parse_atom("staff_chair(a,b)").unwrap()).is_ok());
        assert!(UpdateRequest::insertion(&kb, parse_atom("staff_chair(X,b)").unwrap()).is_err());
        assert!(UpdateRequest::insertion(&kb, parse_atom("group_chair(a,b)").unwrap()).is_err());
    }
}
