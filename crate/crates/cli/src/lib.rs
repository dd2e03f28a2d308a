//! Commands behind the `hornrev` binary.
//!
//! Each command returns an [`Outcome`] holding the exit status and the text
//! for stdout and stderr, so the binary only has to print it.
//!
//! Exit statuses: 0 success, 1 input error, 2 no repair (including an
//! insertion that contradicts the rules and constraints), 3 budget
//! exceeded, 4 a postulate failed.

use std::fmt::Write as _;
use std::path::PathBuf;

use hornrev::abduction::{explanation_tree, tree_explanations, Variant};
use hornrev::dump::{explanation_records, report_records, transaction_records, tree_records, write_records};
use hornrev::kb::UpdateRequest;
use hornrev::kernels::{incision, kernel_revision, kernel_revision_detailed, IncisionStrategy};
use hornrev::postulates::{check_postulates, Postulate, PostulateReport};
use hornrev::revision::{dependency_cycle, is_acyclic, revise, Algorithm};
use hornrev::{parse_kb, serialize_kb, Atom, Budget, Error, HornClause, KnowledgeBase, RevisionResult};

pub const OK: i32 = 0;
pub const INPUT_ERROR: i32 = 1;
pub const NO_REPAIR: i32 = 2;
pub const BUDGET_EXCEEDED: i32 = 3;
pub const POSTULATE_FAILED: i32 = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub kb_path: PathBuf,
    /// `None` picks acyclic when the program is acyclic, generalized otherwise.
    pub algorithm: Option<Algorithm>,
    pub strategy: IncisionStrategy,
    pub depth_bound: Option<usize>,
    pub all_solutions: bool,
    pub format: Format,
    pub write_back: Option<PathBuf>,
    pub check_postulates: bool,
    pub budget: Budget,
}

impl RunConfig {
    pub fn new(kb_path: impl Into<PathBuf>) -> RunConfig {
        RunConfig {
            kb_path: kb_path.into(),
            algorithm: None,
            strategy: IncisionStrategy::default(),
            depth_bound: None,
            all_solutions: false,
            format: Format::Text,
            write_back: None,
            check_postulates: false,
            budget: Budget::from_env(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(status: i32, message: impl Into<String>) -> Outcome {
        let mut stderr = message.into();
        stderr.push('\n');
        Outcome {
            status,
            stdout: String::new(),
            stderr,
        }
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Outcome {
        Outcome::fail(exit_status(&e), format!("error: {e}"))
    }
}

pub fn exit_status(e: &Error) -> i32 {
    match e {
        Error::NoRepair(_) => NO_REPAIR,
        Error::BudgetExceeded { .. } => BUDGET_EXCEEDED,
        _ => INPUT_ERROR,
    }
}

pub fn load(cfg: &RunConfig) -> Result<KnowledgeBase, Outcome> {
    let text = std::fs::read_to_string(&cfg.kb_path)
        .map_err(|e| Outcome::fail(INPUT_ERROR, format!("error: cannot read {}: {e}", cfg.kb_path.display())))?;
    let kb = parse_kb(&text)?;
    if let Some(v) = kb.validate().first() {
        return Err(Outcome::fail(INPUT_ERROR, format!("error: {v}")));
    }
    Ok(kb)
}

fn choose_algorithm(cfg: &RunConfig, kb: &KnowledgeBase) -> Result<Algorithm, Outcome> {
    match cfg.algorithm {
        Some(Algorithm::Acyclic) => match dependency_cycle(kb)? {
            Some(cycle) => Err(Outcome::fail(
                INPUT_ERROR,
                format!("error: the acyclic algorithm needs an acyclic program; cycle {}", cycle_text(&cycle)),
            )),
            None => Ok(Algorithm::Acyclic),
        },
        Some(a) => Ok(a),
        None if is_acyclic(kb)? => Ok(Algorithm::Acyclic),
        None => Ok(Algorithm::Generalized),
    }
}

fn cycle_text(cycle: &[Atom]) -> String {
    cycle.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" -> ")
}

fn write_back(cfg: &RunConfig, kb: &KnowledgeBase) -> Result<(), Outcome> {
    if let Some(path) = &cfg.write_back {
        std::fs::write(path, serialize_kb(kb))
            .map_err(|e| Outcome::fail(INPUT_ERROR, format!("error: cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn check_request(kb: &KnowledgeBase, atom: &Atom, algorithm: Algorithm) -> Result<(), Outcome> {
    if algorithm != Algorithm::Kernel {
        UpdateRequest::insertion(kb, atom.clone())?;
    }
    Ok(())
}

fn operator(
    algorithm: Algorithm,
    strategy: IncisionStrategy,
    budget: Budget,
) -> impl Fn(&KnowledgeBase, &HornClause) -> hornrev::Result<KnowledgeBase> {
    move |kb, alpha| match (&alpha.head, algorithm) {
        (None, Algorithm::Kernel) => kernel_revision(kb, alpha, strategy, &budget),
        (Some(h), _) => revise(kb, h, algorithm, strategy, &budget).map(|r| r.kb_after),
        (None, _) => Err(Error::Precondition("view update algorithms only insert atoms".into())),
    }
}

fn postulate_set(algorithm: Algorithm) -> &'static [Postulate] {
    match algorithm {
        Algorithm::PartialMeet => &Postulate::PARTIAL_MEET,
        _ => &Postulate::CORE,
    }
}

fn render_report(cfg: &RunConfig, report: &PostulateReport, out: &mut String) {
    match cfg.format {
        Format::Text => out.push_str(&report.table()),
        Format::Structured => out.push_str(&write_records(&report_records(report))),
    }
}

fn render_result(cfg: &RunConfig, result: &RevisionResult, out: &mut String) {
    match cfg.format {
        Format::Structured => {
            let mut records = transaction_records(result);
            if !cfg.all_solutions {
                records.truncate(1);
            }
            out.push_str(&write_records(&records));
        }
        Format::Text => {
            let _ = writeln!(out, "algorithm: {}", result.algorithm);
            let _ = writeln!(out, "transaction: {}", result.transaction);
            if cfg.all_solutions {
                let _ = writeln!(out, "alternatives: {}", result.alternatives.len());
                for (rank, t) in result.alternatives.iter().enumerate() {
                    let _ = writeln!(out, "  [{rank}] {t}");
                }
            }
        }
    }
}

/// Revises the knowledge base so that `atom` holds, prints the chosen
/// transaction, and optionally writes the result back.
pub fn cmd_revise(cfg: &RunConfig, atom: &Atom) -> Outcome {
    run(|| {
        let kb = load(cfg)?;
        let algorithm = choose_algorithm(cfg, &kb)?;
        check_request(&kb, atom, algorithm)?;
        let result = revise(&kb, atom, algorithm, cfg.strategy, &cfg.budget)?;
        if result.vacuous {
            return Err(Outcome::fail(
                NO_REPAIR,
                format!("vacuity-1: `{atom}` contradicts the rules and constraints; knowledge base unchanged"),
            ));
        }
        let mut out = Outcome::default();
        render_result(cfg, &result, &mut out.stdout);
        if cfg.check_postulates {
            let op = operator(algorithm, cfg.strategy, cfg.budget);
            let alpha = HornClause::fact(atom.clone());
            let report = check_postulates(&kb, &alpha, &result.kb_after, Some(&op), &cfg.budget)?;
            render_report(cfg, &report, &mut out.stdout);
            if !report.all_pass(postulate_set(algorithm)) {
                out.status = POSTULATE_FAILED;
            }
        }
        write_back(cfg, &result.kb_after)?;
        Ok(out)
    })
}

/// Runs the configured algorithm and audits the result against the
/// postulates.
pub fn cmd_check(cfg: &RunConfig, atom: &Atom) -> Outcome {
    let mut cfg = cfg.clone();
    cfg.check_postulates = true;
    cfg.all_solutions = false;
    let out = cmd_revise(&cfg, atom);
    if out.status == NO_REPAIR {
        // The unchanged knowledge base is still a result to audit.
        return run(|| {
            let kb = load(&cfg)?;
            let algorithm = choose_algorithm(&cfg, &kb)?;
            let op = operator(algorithm, cfg.strategy, cfg.budget);
            let alpha = HornClause::fact(atom.clone());
            let report = check_postulates(&kb, &alpha, &kb, Some(&op), &cfg.budget)?;
            let mut res = Outcome {
                stderr: out.stderr.clone(),
                ..Outcome::default()
            };
            render_report(&cfg, &report, &mut res.stdout);
            if !report.all_pass(postulate_set(algorithm)) {
                res.status = POSTULATE_FAILED;
            }
            Ok(res)
        });
    }
    out
}

/// Prints the SLD tree for `target`, the candidate explanations of each
/// branch, and the explanation family under both orders.
pub fn cmd_explain(cfg: &RunConfig, target: &Atom) -> Outcome {
    run(|| {
        let kb = load(cfg)?;
        UpdateRequest::insertion(&kb, target.clone())?;
        let tree = explanation_tree(&kb, target, cfg.depth_bound)?;
        if tree.has_cut_off() {
            let mut o = Outcome::fail(
                INPUT_ERROR,
                match dependency_cycle(&kb)? {
                    Some(c) => format!("error: branches cut off at depth {}; cycle {}", tree.depth_bound, cycle_text(&c)),
                    None => format!("error: branches cut off at depth {}; raise --depth-bound", tree.depth_bound),
                },
            );
            o.stdout = match cfg.format {
                Format::Text => tree.render(),
                Format::Structured => write_records(&tree_records(&tree)),
            };
            return Err(o);
        }
        let filter = tree_explanations(&tree, &kb, Variant::FilterFirst, &cfg.budget)?;
        let collect = tree_explanations(&tree, &kb, Variant::CollectFirst, &cfg.budget)?;
        let agree = filter.family.sets() == collect.family.sets();
        let mut out = Outcome::default();
        match cfg.format {
            Format::Structured => {
                let mut records = tree_records(&tree);
                records.extend(explanation_records(&filter.family));
                out.stdout = write_records(&records);
            }
            Format::Text => {
                let s = &mut out.stdout;
                s.push_str(&tree.render());
                let _ = writeln!(s, "branches:");
                for b in &tree.branches {
                    let used = set_text(b.edb_facts.iter());
                    let missing = set_text(b.missing().iter());
                    let mark = if filter.consistent_branches.contains(&b.id) { "consistent" } else { "rejected" };
                    let _ = writeln!(s, "  #{} {} used {} missing {} {}", b.id, b.status, used, missing, mark);
                }
                for t in [&filter, &collect] {
                    let _ = writeln!(
                        s,
                        "{}: collected {} residual {}",
                        t.variant.name(),
                        set_text(t.collected.iter()),
                        set_text(t.residual.iter())
                    );
                }
                let _ = writeln!(s, "explanations:");
                for e in &filter.family.explanations {
                    let _ = writeln!(s, "  insert {} delete {}", set_text(e.delta_plus.iter()), set_text(e.delta_minus.iter()));
                }
                let _ = writeln!(s, "orders agree: {}", if agree { "yes" } else { "no" });
            }
        }
        if !agree {
            out.status = INPUT_ERROR;
            out.stderr = "error: the two explanation orders disagree\n".into();
        }
        Ok(out)
    })
}

/// Prints the kernel set of `alpha`, the chosen incision, and the revised
/// knowledge base.
pub fn cmd_kernels(cfg: &RunConfig, alpha: &HornClause) -> Outcome {
    run(|| {
        let kb = load(cfg)?;
        let r = kernel_revision_detailed(&kb, alpha, cfg.strategy, &cfg.budget)?;
        let mut out = Outcome::default();
        let s = &mut out.stdout;
        let _ = writeln!(s, "kernels: {}", r.kernel.members.len());
        for m in &r.kernel.members {
            let _ = writeln!(s, "  {}", set_text(m.iter()));
        }
        if r.vacuous {
            out.status = NO_REPAIR;
            out.stderr = format!("vacuity-1: `{alpha}` contradicts the rules and constraints; knowledge base unchanged\n");
            return Ok(out);
        }
        let cut = incision(&r.kernel, cfg.strategy);
        let _ = writeln!(s, "incision ({}): {}", cfg.strategy.name(), set_text(cut.elements.iter()));
        if cfg.check_postulates {
            let op = operator(Algorithm::Kernel, cfg.strategy, cfg.budget);
            let report = check_postulates(&kb, alpha, &r.kb_after, Some(&op), &cfg.budget)?;
            render_report(cfg, &report, s);
            if !report.all_pass(&Postulate::CORE) {
                out.status = POSTULATE_FAILED;
            }
        }
        write_back(cfg, &r.kb_after)?;
        Ok(out)
    })
}

fn set_text<T: std::fmt::Display>(items: impl Iterator<Item = T>) -> String {
    format!("{{{}}}", items.map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

fn run(f: impl FnOnce() -> Result<Outcome, Outcome>) -> Outcome {
    f().unwrap_or_else(|o| o)
}
