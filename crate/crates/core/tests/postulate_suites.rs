use hornrev::kernels::{kernel_revision, IncisionStrategy};
use hornrev::oracle::{random_instance, Shape};
use hornrev::postulates::{check_postulates, Postulate};
use hornrev::revision::{acyclic_generalized_revision, partial_meet_revision};
use hornrev::{generalized_revision, Atom, Budget, Error, HornClause, KnowledgeBase, Result, RevisionResult};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Engine = fn(&KnowledgeBase, &Atom, &Budget) -> Result<RevisionResult>;

fn as_operator(engine: Engine, budget: Budget) -> impl Fn(&KnowledgeBase, &HornClause) -> Result<KnowledgeBase> {
    move |kb, alpha| {
        let head = alpha.head.clone().ok_or_else(|| Error::Precondition("denial".into()))?;
        engine(kb, &head, &budget).map(|r| r.kb_after)
    }
}

fn run_suite(engine: Engine, postulates: &[Postulate], n: u64) -> Vec<String> {
    let budget = Budget::default();
    let op = as_operator(engine, budget);
    let mut failures = Vec::new();
    for seed in 0..n {
        let (kb, target) = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), &Shape::default());
        let alpha = HornClause::fact(target.clone());
        let after = match engine(&kb, &target, &budget) {
            Ok(r) => r.kb_after,
            Err(Error::NoRepair(_)) => continue,
            Err(e) => panic!("seed {seed}: {e}"),
        };
        let report = check_postulates(&kb, &alpha, &after, Some(&op), &budget).unwrap();
        for (p, w) in report.failures(postulates) {
            failures.push(format!("seed {seed} {p}: {}\n{kb}-> {target}\n{after}", w.message));
        }
    }
    failures
}

#[test]
fn generalized_revision_satisfies_core_postulates() {
    let f = run_suite(generalized_revision, &Postulate::CORE, 200);
    assert!(f.is_empty(), "{} failures, first:\n{}", f.len(), f[0]);
}

#[test]
fn acyclic_revision_satisfies_core_postulates() {
    let f = run_suite(acyclic_generalized_revision, &Postulate::CORE, 200);
    assert!(f.is_empty(), "{} failures, first:\n{}", f.len(), f[0]);
}

#[test]
fn partial_meet_revision_satisfies_its_postulates() {
    let f = run_suite(partial_meet_revision, &Postulate::PARTIAL_MEET, 200);
    assert!(f.is_empty(), "{} failures, first:\n{}", f.len(), f[0]);
}

#[test]
fn kernel_revision_example_denial() {
    let kb: KnowledgeBase = hornrev::parse_kb("%% immutable\np :- a.\n%% updatable\na.\nb.\n").unwrap();
    let alpha = hornrev::parse_clause(":- p.").unwrap();
    let b = Budget::default();
    let after = kernel_revision(&kb, &alpha, IncisionStrategy::default(), &b).unwrap();
    let op = |k: &KnowledgeBase, a: &HornClause| kernel_revision(k, a, IncisionStrategy::default(), &b);
    let r = check_postulates(&kb, &alpha, &after, Some(&op), &b).unwrap();
    assert!(r.all_pass(&Postulate::CORE), "{}", r.table());
}

#[test]
fn kernel_revision_on_exhaustive_family() {
    use hornrev::oracle::{exhaustive_alphas, exhaustive_family};
    let b = Budget::default();
    let op = |k: &KnowledgeBase, a: &HornClause| kernel_revision(k, a, IncisionStrategy::default(), &b);
    let family = exhaustive_family();
    let mut failures = Vec::new();
    let mut checked = 0;
    for kb in family.iter().step_by(7) {
        for alpha in exhaustive_alphas() {
            let after = op(kb, &alpha).unwrap();
            let r = check_postulates(kb, &alpha, &after, Some(&op), &b).unwrap();
            checked += 1;
            for (p, w) in r.failures(&Postulate::CORE) {
                failures.push(format!("{p}: {}\n{kb}* {alpha}\n{after}", w.message));
            }
        }
    }
    assert!(checked > 1000);
    assert!(failures.is_empty(), "{} failures, first:\n{}", failures.len(), failures[0]);
}

fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0..1u32 << items.len())
        .map(|m| items.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, x)| x.clone()).collect())
        .collect()
}

#[test]
fn every_result_passing_the_postulates_comes_from_an_incision() {
    use hornrev::kernels::kernel_sets;
    use hornrev::oracle::{exhaustive_alphas, exhaustive_family};
    use std::collections::BTreeSet;
    let b = Budget::default();
    let without_preservation: Vec<Postulate> =
        Postulate::CORE.iter().copied().filter(|p| *p != Postulate::Preservation).collect();
    let mut passing = 0;
    for kb in exhaustive_family().iter().step_by(11) {
        for alpha in exhaustive_alphas() {
            let kernel = kernel_sets(kb, &alpha, &b).unwrap();
            let cut_from: BTreeSet<HornClause> = kernel.members.iter().flatten().filter(|c| kb.updatable.contains(*c)).cloned().collect();
            let stored: Vec<HornClause> = kb.updatable.iter().cloned().collect();
            for keep in subsets(&stored) {
                let mut after = kb.clone();
                after.updatable = keep.into_iter().collect();
                if alpha.is_fact() {
                    after.updatable.insert(alpha.clone());
                } else {
                    after.constraints.insert(alpha.clone());
                }
                for candidate in [after, kb.clone()] {
                    let r = check_postulates(kb, &alpha, &candidate, None, &b).unwrap();
                    if !r.all_pass(&without_preservation) {
                        continue;
                    }
                    passing += 1;
                    if candidate == *kb && kernel.members.iter().any(|x| x.iter().all(|c| !kb.updatable.contains(c))) {
                        continue;
                    }
                    let cut: BTreeSet<HornClause> = kb.updatable.difference(&candidate.updatable).cloned().collect();
                    assert!(cut.is_subset(&cut_from), "{kb}* {alpha}\ncut {cut:?} outside the kernels");
                    for x in &kernel.members {
                        assert!(x.iter().any(|c| cut.contains(c)), "{kb}* {alpha}\ncut {cut:?} misses {x:?}");
                    }
                }
            }
        }
    }
    assert!(passing > 500, "only {passing} passing results");
}

#[test]
fn relevance_failures_have_no_justifying_subset() {
    use hornrev::oracle::Naive;
    use hornrev::postulates::Verdict;
    use std::collections::BTreeSet;
    let b = Budget::default();
    let mut seen = 0;
    for seed in 0..300 {
        let (kb, _) = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), &Shape::default());
        let alpha = HornClause::fact(Atom::prop("a"));
        // A careless operator: store alpha and drop every other fact.
        let mut after = kb.clone();
        after.updatable = BTreeSet::from([alpha.clone()]);
        let r = check_postulates(&kb, &alpha, &after, None, &b).unwrap();
        let Some(Verdict::Fail(w)) = r.get(Postulate::WeakRelevance) else { continue };
        seen += 1;
        let beta = w.clause.as_ref().and_then(|c| c.head.clone()).expect("witness names the fact");
        let naive = Naive::new(&kb, &[]).unwrap();
        let consistent = |facts: &BTreeSet<Atom>| !naive.violates(&naive.closure(facts.iter()));
        let pool: Vec<Atom> = kb.fact_set().into_iter().filter(|f| *f != beta && f.predicate.as_ref() != "a").collect();
        for extra in subsets(&pool) {
            let mut k: BTreeSet<Atom> = extra.into_iter().collect();
            k.insert(Atom::prop("a"));
            let justified = consistent(&k) && {
                k.insert(beta.clone());
                !consistent(&k)
            };
            assert!(!justified, "seed {seed}: removing {beta} is justified after all");
        }
    }
    assert!(seen > 20, "only {seen} relevance failures exercised");
}
