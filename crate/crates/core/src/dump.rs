//! Line-delimited JSON records for trees, explanations, transactions and
//! postulate reports.
//!
//! Each line is one object whose first field `kind` names the record type.
//! Fields always appear in the order below; atoms and clauses are written
//! in the text syntax the parser accepts.
//!
//! | kind          | fields after `kind`                                         |
//! |---------------|-------------------------------------------------------------|
//! | `branch`      | `id`, `status`, `clauses`, `answer`, `edb`, `missing`        |
//! | `explanation` | `target`, `insert`, `delete`, `branches`                    |
//! | `transaction` | `insertions`, `deletions`, `algorithm`, `rank`              |
//! | `postulate`   | `name`, `verdict`, `witness`                                |

use serde::{Deserialize, Serialize};

use crate::abduction::ExplanationFamily;
use crate::error::{Error, Result};
use crate::inference::SLDTree;
use crate::postulates::{PostulateReport, Verdict};
use crate::revision::RevisionResult;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Record {
    Branch {
        id: usize,
        status: String,
        clauses: Vec<String>,
        /// Variable bindings as `[variable, term]` pairs.
        answer: Vec<(String, String)>,
        edb: Vec<String>,
        missing: Vec<String>,
    },
    Explanation {
        target: String,
        insert: Vec<String>,
        delete: Vec<String>,
        branches: Vec<usize>,
    },
    Transaction {
        insertions: Vec<String>,
        deletions: Vec<String>,
        algorithm: String,
        rank: usize,
    },
    Postulate {
        name: String,
        verdict: String,
        witness: Option<String>,
    },
}

fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Vec<String> {
    items.into_iter().map(|x| x.to_string()).collect()
}

pub fn tree_records(tree: &SLDTree) -> Vec<Record> {
    tree.branches
        .iter()
        .map(|b| Record::Branch {
            id: b.id,
            status: b.status.to_string(),
            clauses: strings(&b.input_clauses),
            answer: b.answer.iter().map(|(v, t)| (v.to_string(), t.to_string())).collect(),
            edb: strings(&b.edb_facts),
            missing: strings(b.missing()),
        })
        .collect()
}

pub fn explanation_records(family: &ExplanationFamily) -> Vec<Record> {
    family
        .explanations
        .iter()
        .map(|e| Record::Explanation {
            target: family.target.to_string(),
            insert: strings(&e.delta_plus),
            delete: strings(&e.delta_minus),
            branches: e.provenance.clone(),
        })
        .collect()
}

/// The default transaction first (rank 0), then the ranked alternatives.
pub fn transaction_records(result: &RevisionResult) -> Vec<Record> {
    result
        .alternatives
        .iter()
        .enumerate()
        .map(|(rank, t)| Record::Transaction {
            insertions: strings(&t.insertions),
            deletions: strings(&t.deletions),
            algorithm: result.algorithm.name().to_string(),
            rank,
        })
        .collect()
}

pub fn report_records(report: &PostulateReport) -> Vec<Record> {
    report
        .verdicts
        .iter()
        .map(|(p, v)| Record::Postulate {
            name: p.name().to_string(),
            verdict: v.label().to_string(),
            witness: match v {
                Verdict::Pass => None,
                Verdict::Fail(w) => Some(w.message.clone()),
                Verdict::NotApplicable(why) => Some(why.clone()),
            },
        })
        .collect()
}

/// One JSON object per line, each line terminated by a newline.
pub fn write_records(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records always serialize"));
        out.push('\n');
    }
    out
}

/// Parses the output of [`write_records`]; blank lines are skipped.
pub fn read_records(text: &str) -> Result<Vec<Record>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Syntax {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abduction::{closed_explanations, explanation_tree};
    use crate::error::Budget;
    use crate::kb::{parse_atom, parse_kb};
    use crate::revision::generalized_revision;

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

    #[test]
    fn tree_round_trips() {
        let kb = parse_kb(BRANCHING).unwrap();
        let tree = explanation_tree(&kb, &parse_atom("p").unwrap(), None).unwrap();
        let records = tree_records(&tree);
        assert_eq!(records.len(), tree.branches.len());
        assert_eq!(read_records(&write_records(&records)).unwrap(), records);
    }

    #[test]
    fn fields_keep_their_order() {
        let r = Record::Transaction {
            insertions: vec!["a".into()],
            deletions: vec![],
            algorithm: "acyclic".into(),
            rank: 0,
        };
        assert_eq!(
            write_records(&[r]),
            "{\"kind\":\"transaction\",\"insertions\":[\"a\"],\"deletions\":[],\"algorithm\":\"acyclic\",\"rank\":0}\n"
        );
    }

    #[test]
    fn explanations_and_transactions_round_trip() {
        let kb = parse_kb(BRANCHING).unwrap();
        let p = parse_atom("p").unwrap();
        let b = Budget::default();
        let mut records = explanation_records(&closed_explanations(&kb, &p, None, &b).unwrap());
        let mut edb = kb.clone();
        edb.updatable.clear();
        records.extend(transaction_records(&generalized_revision(&edb, &p, &b).unwrap()));
        assert_eq!(read_records(&write_records(&records)).unwrap(), records);
    }

    #[test]
    fn bad_line_reports_its_number() {
        match read_records("\n{\"kind\":\"nope\"}\n") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
