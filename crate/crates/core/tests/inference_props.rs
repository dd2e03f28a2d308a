use std::collections::BTreeSet;

use hornrev::oracle::{random_instance, Naive, Shape};
use hornrev::{derives, ic_violations, least_model, parse_kb, serialize_kb, sld_tree, Atom, HornClause, KnowledgeBase};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const STAFF: &str = "\
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

const TWO_SUPPORTS: &str = "%% immutable\np :- a, b.\np :- a.\nq :- a, b.\n%% updatable\na.\nb.\n";

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

fn instance(seed: u64) -> KnowledgeBase {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed), &Shape::default()).0
}

fn atoms_of(kb: &KnowledgeBase) -> BTreeSet<Atom> {
    let mut out: BTreeSet<Atom> = kb.base_atom_universe(&[]);
    for c in &kb.immutable {
        out.extend(c.atoms().cloned());
    }
    out
}

#[test]
fn fixtures_round_trip_and_start_consistent() {
    for src in [STAFF, TWO_SUPPORTS, BRANCHING] {
        let kb = parse_kb(src).unwrap();
        assert_eq!(parse_kb(&serialize_kb(&kb)).unwrap(), kb);
        assert!(ic_violations(&kb, &BTreeSet::new()).unwrap().is_empty());
    }
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(seed in any::<u64>()) {
        let kb = instance(seed);
        prop_assert_eq!(parse_kb(&serialize_kb(&kb)).unwrap(), kb);
    }

    #[test]
    fn validate_never_panics(
        heads in prop::collection::vec((0usize..5, prop::collection::vec(0usize..5, 0..3)), 0..6),
        facts in prop::collection::vec(0usize..5, 0..4),
    ) {
        let names = ["a", "b", "p", "q", "r"];
        let mut kb = KnowledgeBase::new();
        for (h, body) in heads {
            let body: Vec<Atom> = body.into_iter().map(|i| Atom::prop(names[i])).collect();
            kb.immutable.insert(HornClause::rule(Atom::prop(names[h]), body));
        }
        for f in facts {
            kb.updatable.insert(HornClause::fact(Atom::prop(names[f])));
        }
        let _ = kb.validate();
    }

    #[test]
    fn sld_success_agrees_with_least_model(seed in any::<u64>()) {
        let kb = instance(seed);
        let bound = atoms_of(&kb).len() + 1;
        for a in atoms_of(&kb) {
            let tree = sld_tree(&kb, &a, bound);
            prop_assert!(!tree.has_cut_off());
            prop_assert_eq!(derives(&kb, &a).unwrap(), tree.successes().next().is_some(), "atom {}", a);
        }
    }

    #[test]
    fn least_model_agrees_with_naive_closure(seed in any::<u64>()) {
        let kb = instance(seed);
        let naive = Naive::new(&kb, &[]).unwrap();
        let m = least_model(&kb, &BTreeSet::new()).unwrap();
        prop_assert_eq!(m.atoms, naive.closure(kb.facts()));
    }

    #[test]
    fn least_model_is_monotone(seed in any::<u64>(), m1 in 0u32..16, m2 in 0u32..16) {
        let kb = instance(seed);
        let base: Vec<Atom> = ["a", "b", "c", "d"].iter().map(|s| Atom::prop(s)).collect();
        let pick = |m: u32| -> BTreeSet<Atom> {
            base.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, a)| a.clone()).collect()
        };
        let (small, large) = (pick(m1 & m2), pick(m1 | m2));
        let lo = least_model(&kb, &small).unwrap();
        let hi = least_model(&kb, &large).unwrap();
        prop_assert!(lo.atoms.is_subset(&hi.atoms));
    }
}
