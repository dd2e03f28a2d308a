use std::collections::BTreeSet;

use hornrev::abduction::{closed_explanations, explanation_tree, minimal_explanations, tree_explanations, Variant};
use hornrev::hitting::{hits, minimal_hitting_sets};
use hornrev::kernels::kernel_sets;
use hornrev::oracle::{
    brute_explanations, brute_kernels, brute_minimal_hitting_sets, brute_transactions, random_extension, random_family,
    random_instance, Naive, Shape,
};
use hornrev::{generalized_revision, Atom, Budget, HornClause, KnowledgeBase};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64) -> (KnowledgeBase, Atom) {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed), &Shape::default())
}

fn member_sets(members: &[BTreeSet<HornClause>]) -> BTreeSet<BTreeSet<HornClause>> {
    members.iter().cloned().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kernels_match_brute_force(seed in any::<u64>(), pick in 0usize..8) {
        let (kb, target) = instance(seed);
        let alphas = [
            HornClause::fact(Atom::prop("a")),
            HornClause::fact(Atom::prop("c")),
            HornClause::denial(vec![target.clone()]),
            HornClause::denial(vec![Atom::prop("b")]),
        ];
        let alpha = &alphas[pick % alphas.len()];
        let engine = kernel_sets(&kb, alpha, &Budget::default()).unwrap();
        let brute = brute_kernels(&kb, alpha).unwrap();
        prop_assert_eq!(member_sets(&engine.members), member_sets(&brute.members));
    }

    #[test]
    fn kernel_members_are_minimal(seed in any::<u64>()) {
        let (kb, target) = instance(seed);
        let alpha = HornClause::denial(vec![target]);
        let ks = kernel_sets(&kb, &alpha, &Budget::default()).unwrap();
        let naive = Naive::new(&kb, &[]).unwrap();
        for x in &ks.members {
            for c in x {
                let rest: Vec<&HornClause> = x.iter().filter(|d| *d != c).collect();
                let rules: Vec<(Atom, Vec<Atom>)> = rest
                    .iter()
                    .filter(|d| d.is_rule())
                    .map(|d| (d.head.clone().unwrap(), d.body_atoms().cloned().collect()))
                    .collect();
                let facts: Vec<&Atom> = rest.iter().filter(|d| d.is_fact()).filter_map(|d| d.head.as_ref()).collect();
                let m = hornrev::oracle::closure(rules.iter().map(|(h, b)| (h, b.as_slice())), facts.into_iter());
                let violated = naive.violates(&m) || alpha.body_atoms().all(|a| m.contains(a));
                prop_assert!(!violated, "{:?} minus {} is still inconsistent", x, c);
            }
        }
    }

    #[test]
    fn explanation_families_match_brute_force(seed in any::<u64>()) {
        let (kb, target) = instance(seed);
        let b = Budget::default();
        let brute = brute_explanations(&kb, &target).unwrap();
        prop_assert_eq!(minimal_explanations(&kb, &target, &b).unwrap().sets(), brute.minimal.clone());
        prop_assert_eq!(closed_explanations(&kb, &target, None, &b).unwrap().sets(), brute.closed.clone());
    }

    #[test]
    fn tree_candidates_relate_to_locally_minimal_family(seed in any::<u64>()) {
        let (kb, target) = instance(seed);
        let b = Budget::default();
        let brute = brute_explanations(&kb, &target).unwrap();
        let union: BTreeSet<Atom> = brute.locally_minimal.iter().flatten().cloned().collect();
        let tree = explanation_tree(&kb, &target, None).unwrap();
        for variant in [Variant::FilterFirst, Variant::CollectFirst] {
            let t = tree_explanations(&tree, &kb, variant, &b).unwrap();
            prop_assert!(brute.closed.is_subset(&t.family.sets()));
            for c in &t.candidates {
                prop_assert!(brute.locally_minimal.iter().any(|d| d.is_subset(&c.delta_plus)), "{:?}", c.delta_plus);
                prop_assert!(c.delta_plus.is_subset(&union), "{:?}", c.delta_plus);
            }
        }
    }

    #[test]
    fn explanations_with_deletions_realize_the_target(seed in any::<u64>()) {
        let (kb, target) = instance(seed);
        let naive = Naive::new(&kb, &[]).unwrap();
        let fam = closed_explanations(&kb, &target, None, &Budget::default()).unwrap();
        for e in &fam.explanations {
            let mut facts = kb.fact_set();
            facts.retain(|f| !e.delta_minus.contains(f));
            facts.extend(e.delta_plus.iter().cloned());
            let m = naive.closure(facts.iter());
            prop_assert!(m.contains(&target));
            prop_assert!(!naive.violates(&m));
        }
    }

    #[test]
    fn transactions_match_brute_force(seed in any::<u64>()) {
        let (kb, target) = instance(seed);
        let b = Budget::default();
        let n = kb.base_atom_universe(&[]).len();
        let brute: BTreeSet<_> = brute_transactions(&kb, &target, n, &b).unwrap().into_iter().collect();
        match generalized_revision(&kb, &target, &b) {
            Ok(r) if r.vacuous => prop_assert!(brute.is_empty()),
            Ok(r) => {
                let engine: BTreeSet<_> = r.alternatives.iter().cloned().collect();
                prop_assert_eq!(engine, brute);
            }
            Err(e) => prop_assert!(brute.is_empty(), "{}", e),
        }
    }

    #[test]
    fn revision_results_derive_and_satisfy_constraints(seed in any::<u64>()) {
        let (kb, target) = instance(seed);
        let naive = Naive::new(&kb, &[]).unwrap();
        if let Ok(r) = generalized_revision(&kb, &target, &Budget::default()) {
            if !r.vacuous {
                let m = naive.closure(r.kb_after.facts());
                prop_assert!(m.contains(&target));
                prop_assert!(!naive.violates(&m));
                prop_assert_eq!(&r.kb_after.immutable, &kb.immutable);
            }
        }
    }

    #[test]
    fn minimal_hitting_sets_match_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 8, 5, 4);
        let engine: BTreeSet<_> = minimal_hitting_sets(&fam).into_iter().collect();
        prop_assert_eq!(engine, brute_minimal_hitting_sets(&fam));
    }

    #[test]
    fn supersets_of_members_keep_minimal_hitting_sets(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_family(&mut rng, 8, 4, 3);
        let s2 = random_extension(&mut rng, &s, 8, 3, false);
        let a: BTreeSet<_> = minimal_hitting_sets(&s).into_iter().collect();
        let b: BTreeSet<_> = minimal_hitting_sets(&s2).into_iter().collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn bounded_supersets_keep_all_hitting_sets(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_family(&mut rng, 8, 4, 3);
        let s2 = random_extension(&mut rng, &s, 8, 3, true);
        let union: Vec<usize> = s.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
        for mask in 0..1u32 << union.len() {
            let h: BTreeSet<usize> = union.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| *x).collect();
            prop_assert_eq!(hits(&h, &s), hits(&h, &s2));
        }
    }
}
