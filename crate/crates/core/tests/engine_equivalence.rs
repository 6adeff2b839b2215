mod support;

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rebac_core::engine::{
    check_eager_liberal, check_eager_strict, check_lazy_liberal, check_lazy_strict, AccessRequest,
};
use rebac_core::hl::relationship_predicate;
use rebac_core::policy::{
    satisfies, AuthorizationRule, FormulaEntry, Guard, GuardKind, PolicyDocument, PolicyStore, PrincipalMatchingRule,
    Privilege, PrivilegeSet,
};
use rebac_core::AuthorizationGraph;

use support::hl_oracle::anchored_node;

struct Case {
    store: PolicyStore,
    graph: AuthorizationGraph,
    requests: Vec<AccessRequest>,
}

fn random_case(rng: &mut StdRng) -> Case {
    let inst = support::hl_oracle::random_instance(rng);
    let graph = inst.graph();
    let vars = vec!["resource".to_string(), "requestor".to_string()];
    let formulas: Vec<FormulaEntry> = (0..rng.gen_range(1..=4))
        .map(|i| {
            let depth = rng.gen_range(2..=5);
            FormulaEntry {
                id: format!("f{i}"),
                vars: vars.clone(),
                text: anchored_node(rng, depth, &vars, &inst.relations).to_string(),
            }
        })
        .collect();
    let privileges: Vec<String> = (0..6).map(|i| format!("p{i}")).collect();
    let mut doc = PolicyDocument {
        formulas: formulas.clone(),
        ..Default::default()
    };
    for i in 0..rng.gen_range(0..=7) {
        let principal = format!("ap{i}");
        doc.matching_rules.push(PrincipalMatchingRule {
            principal: principal.clone(),
            formula_id: formulas.choose(rng).unwrap().id.clone(),
        });
        let k = rng.gen_range(0..=3);
        doc.authorization_rules.push(AuthorizationRule {
            principal,
            privileges: privileges.choose_multiple(rng, k).map(|p| Privilege::from(p.as_str())).collect(),
        });
    }
    let store = PolicyStore::from_document(doc).unwrap();
    let requests = (0..8)
        .map(|_| {
            let kind = if rng.gen_bool(0.5) { GuardKind::AllOf } else { GuardKind::OneOf };
            let k = rng.gen_range(1..=3);
            let guard = Guard::new(kind, privileges.choose_multiple(rng, k).map(String::as_str)).unwrap();
            let r = inst.vertices.choose(rng).unwrap().clone();
            let u = inst.vertices.choose(rng).unwrap().clone();
            AccessRequest::new(r, u, guard)
        })
        .collect();
    Case { store, graph, requests }
}

#[test]
fn strategies_agree_and_semantics_nest() {
    let mut rng = StdRng::seed_from_u64(2024);
    let (mut total, mut liberal_allows, mut divergent) = (0, 0, 0);
    for _ in 0..1_500 {
        let case = random_case(&mut rng);
        let (store, g) = (&case.store, &case.graph);
        let distinct: BTreeSet<&str> = store.principals().iter().map(|p| p.formula_id.as_str()).collect();
        for req in &case.requests {
            total += 1;
            let el = check_eager_liberal(store, g, req).unwrap();
            let es = check_eager_strict(store, g, req).unwrap();
            let ll = check_lazy_liberal(store, g, req).unwrap();
            let ls = check_lazy_strict(store, g, req).unwrap();

            // decision oracle from the definitions
            let enabled: Vec<&PrivilegeSet> = store
                .principals()
                .iter()
                .filter(|p| {
                    let f = store.formulas().get(&p.formula_id).unwrap();
                    relationship_predicate(f, g, &req.resource, &req.user).unwrap()
                })
                .map(|p| &p.privileges)
                .collect();
            let pooled: PrivilegeSet = enabled.iter().flat_map(|s| s.iter().cloned()).collect();
            assert_eq!(el.allow, satisfies(&pooled, &req.guard));
            assert_eq!(es.allow, enabled.iter().any(|s| satisfies(s, &req.guard)));

            assert_eq!(ll.allow, el.allow, "liberal strategies disagree");
            assert_eq!(ls.allow, es.allow, "strict strategies disagree");
            assert!(!es.allow || el.allow, "strict allow without liberal allow");
            if req.guard.kind() == GuardKind::OneOf {
                assert_eq!(el.allow, es.allow);
            }
            for lazy in [&ll, &ls] {
                assert!(lazy.trace.formulas_evaluated <= el.trace.formulas_evaluated);
                assert!(lazy.trace.cache_hits <= lazy.trace.principals_considered);
            }
            assert!(el.trace.formulas_evaluated <= distinct.len());
            assert_eq!(el.trace.formulas_evaluated + el.trace.cache_hits, store.principals().len());

            let again = check_lazy_liberal(store, g, req).unwrap();
            assert_eq!(again.allow, ll.allow);
            assert_eq!(again.trace.principals_considered, ll.trace.principals_considered);
            liberal_allows += el.allow as usize;
            divergent += (el.allow != es.allow) as usize;
        }
    }
    assert!(liberal_allows > total / 20, "too few allows: {liberal_allows}/{total}");
    assert!(divergent > 0, "liberal and strict never diverged");
}
