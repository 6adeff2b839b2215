use std::collections::{BTreeSet, HashMap};
use std::fs;

use proptest::prelude::*;
use rebac_core::hl::{parse, parse_body, Node};
use rebac_core::policy::{validate, PolicyStore};
use rebac_core::{GuardKind, VertexKind};
use rebac_synth::graph::{
    graph_user_count, label_graph, parse_edge_list, select_users, type_violations, RawDigraph, MEMBER,
};
use rebac_synth::policy::{principal_id, CORPUS_VARS};
use rebac_synth::{
    corpus, synth_graph, synth_policy, synth_rbac, synth_requests, GraphSource, RbacCounts, SynthConfig, SynthError,
    SynthRng, Stream, Workload,
};

fn small(seed: u64, scale: f64) -> SynthConfig {
    SynthConfig::new(seed, scale).with_graph(GraphSource::Generated { nodes: 3_000, edges: 20_000 })
}

#[test]
fn full_scale_rbac_counts() {
    let rbac = synth_rbac(&SynthConfig::new(1, 1.0)).unwrap();
    assert_eq!(rbac.counts().as_tuple(), (10_000, 200, 67, 469, 50_000));
    assert_eq!(rbac.tables.role_count(), 67);
}

#[test]
fn scaled_counts_round_to_nearest() {
    assert_eq!(RbacCounts::at_scale(0.01).as_tuple(), (100, 2, 1, 5, 500));
    assert_eq!(RbacCounts::at_scale(0.1).as_tuple(), (1_000, 20, 7, 47, 5_000));
    assert_eq!(RbacCounts::at_scale(1e-9).as_tuple(), (1, 1, 1, 1, 1));
}

#[test]
fn infeasible_scale_is_reported() {
    // 5 grants over 1 role x 2 privileges cannot be distinct
    assert!(matches!(
        synth_rbac(&SynthConfig::new(1, 0.01)),
        Err(SynthError::InfeasibleScale { .. })
    ));
    assert!(matches!(synth_rbac(&SynthConfig::new(1, 0.0)), Err(SynthError::InvalidScale(_))));
}

#[test]
fn rbac_is_seed_deterministic() {
    let a = synth_rbac(&SynthConfig::new(9, 0.1)).unwrap();
    let b = synth_rbac(&SynthConfig::new(9, 0.1)).unwrap();
    let c = synth_rbac(&SynthConfig::new(10, 0.1)).unwrap();
    assert_eq!(a.tables, b.tables);
    assert_ne!(a.tables, c.tables);
}

#[test]
fn toy_graph_users_are_top_in_degree() {
    // in-degrees: 0 -> 1, 1 -> 2, 2 -> 3, 3 -> 0
    let raw = parse_edge_list("# toy\n0 2\n1 2\n3 2\n0 1\n3 1\n2 0\n").unwrap();
    assert_eq!(select_users(&raw, 2).unwrap(), vec![2, 1]);
    let g = label_graph(5, &raw, &[2, 1]).unwrap();
    assert_eq!(g.vertex("u0").unwrap().kind, VertexKind::User);
    assert_eq!(g.vertex("u1").unwrap().kind, VertexKind::User);
    assert_eq!(g.vertex("p0").unwrap().kind, VertexKind::Patient);
    assert_eq!(g.vertex("p3").unwrap().kind, VertexKind::Patient);
    assert!(type_violations(&g).is_empty());
    assert!(matches!(select_users(&raw, 5), Err(SynthError::TooManyUsers { .. })));
}

#[test]
fn in_degree_ties_prefer_smaller_ids() {
    let raw = parse_edge_list("5 9\n9 5\n1 7\n7 1\n").unwrap();
    assert_eq!(select_users(&raw, 3).unwrap(), vec![1, 5, 7]);
}

#[test]
fn edge_list_parsing() {
    let raw = parse_edge_list("1 2\n1 2\n\n# c\n2\t3\n").unwrap();
    assert_eq!(raw, RawDigraph { nodes: vec![1, 2, 3], edges: vec![(1, 2), (2, 3)] });
    assert!(matches!(parse_edge_list("1 2\nx y\n"), Err(SynthError::EdgeList { line: 2 })));
    assert!(matches!(parse_edge_list("1 2 3\n"), Err(SynthError::EdgeList { line: 1 })));
}

#[test]
fn generated_graph_respects_label_types() {
    let cfg = SynthConfig::new(3, 1.0).with_graph(GraphSource::Generated { nodes: 20_000, edges: 200_000 });
    let g = synth_graph(&cfg).unwrap();
    assert_eq!(g.vertex_count(), 20_000);
    assert_eq!(g.edge_count(), 200_000);
    assert!(type_violations(&g).is_empty());
    let users = g.vertices().iter().filter(|v| v.kind == VertexKind::User).count();
    assert_eq!(users, graph_user_count(&cfg, 20_000));
    assert_eq!(users, 125);

    let mut by_label: HashMap<String, BTreeSet<(VertexKind, VertexKind)>> = HashMap::new();
    for e in g.edges() {
        let k = |v: &str| g.vertex(v).unwrap().kind;
        by_label.entry(e.rel.clone()).or_default().insert((k(&e.src), k(&e.dst)));
    }
    assert_eq!(by_label["gp"], BTreeSet::from([(VertexKind::Patient, VertexKind::User)]));
    assert_eq!(by_label["dummy"], BTreeSet::from([(VertexKind::User, VertexKind::Patient)]));
    assert!(!by_label.contains_key(MEMBER));
    for label in ["gp", "register-ward", "referrer", "ward-nurse", "appoint-team", "team", "agent", "dummy"] {
        assert!(by_label.contains_key(label), "label {label} never used");
    }
}

#[test]
fn edge_list_source_uses_all_rbac_users_when_possible() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edges.txt");
    fs::write(&path, "0 1\n1 2\n2 0\n3 0\n").unwrap();
    let cfg = SynthConfig::new(1, 1.0).with_graph(GraphSource::EdgeList(path));
    // 10,000 RBAC users clamp to the 4 available nodes
    assert_eq!(graph_user_count(&cfg, 4), 4);
    let g = synth_graph(&cfg).unwrap();
    assert_eq!(g.vertex("u0").unwrap().kind, VertexKind::User);
    assert!(type_violations(&g).is_empty());
}

#[test]
fn corpus_texts_and_expansion() {
    let c: HashMap<String, String> = corpus().into_iter().collect();
    assert_eq!(c.len(), 10);
    assert_eq!(c["phi1"], "@patient <gp> requestor");
    assert_eq!(c["phi10"], "@patient <gp> requestor | @patient <-agent> <gp> requestor");
    let body = |id: &str| parse_body(&c[id]).unwrap();
    assert_eq!(body("phi3"), Node::or(body("phi1"), body("phi2")));
    assert_eq!(body("phi6"), Node::or(body("phi3"), body("phi5")));
    assert_eq!(body("phi9"), Node::or(body("phi6"), body("phi8")));
    for (id, text) in &c {
        let f = parse(text, &CORPUS_VARS).unwrap_or_else(|e| panic!("{id}: {e}"));
        assert_eq!(parse(&f.to_string(), &CORPUS_VARS).unwrap(), f);
    }
}

#[test]
fn policy_mirrors_roles() {
    let cfg = SynthConfig::new(4, 1.0);
    let rbac = synth_rbac(&cfg).unwrap();
    let store = PolicyStore::from_document(synth_policy(&cfg, &rbac)).unwrap();
    assert_eq!(store.principals().len(), 67);
    assert!(validate(&store).is_empty(), "{:?}", validate(&store));
    for role in &rbac.roles {
        let p = store.principals().iter().find(|p| p.id == principal_id(role)).unwrap();
        assert_eq!(Some(&p.privileges), rbac.tables.role_privileges(role));
    }
    let used: BTreeSet<&str> = store.principals().iter().map(|p| p.formula_id.as_str()).collect();
    assert!(used.len() >= 8, "formula choice looks skewed: {used:?}");
}

#[test]
fn requests_follow_the_recipe() {
    let cfg = small(8, 1.0);
    let rbac = synth_rbac(&cfg).unwrap();
    let g = synth_graph(&cfg).unwrap();
    for kind in [GuardKind::OneOf, GuardKind::AllOf] {
        let reqs = synth_requests(&cfg, &g, &rbac.privileges, kind).unwrap();
        assert_eq!(reqs.len(), 400);
        let mut sizes = BTreeSet::new();
        for r in &reqs {
            assert_eq!(r.guard.kind(), kind);
            sizes.insert(r.guard.privileges().len());
            assert_eq!(g.vertex(&r.user).unwrap().kind, VertexKind::User);
            assert_eq!(g.vertex(&r.resource).unwrap().kind, VertexKind::Patient);
        }
        assert_eq!(sizes, BTreeSet::from([1, 2, 3]));
        assert_eq!(reqs, synth_requests(&cfg, &g, &rbac.privileges, kind).unwrap());
    }
    let n = synth_requests(&cfg.clone().with_request_count(1_000), &g, &rbac.privileges, GuardKind::OneOf).unwrap();
    assert_eq!(n.len(), 1_000);
}

#[test]
fn written_workloads_are_byte_identical() {
    let cfg = small(21, 0.1);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    Workload::generate(&cfg).unwrap().write_to(a.path()).unwrap();
    Workload::generate(&cfg).unwrap().write_to(b.path()).unwrap();
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 5);
    for name in names {
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
            "{name:?} differs"
        );
    }
}

#[test]
fn written_workload_loads_back() {
    let cfg = small(2, 0.1);
    let dir = tempfile::tempdir().unwrap();
    let mut w = Workload::generate(&cfg).unwrap();
    w.write_to(dir.path()).unwrap();
    let g = rebac_core::load_graph(&fs::read_to_string(dir.path().join("graph.txt")).unwrap()).unwrap();
    assert_eq!(g.edges(), w.graph.edges());
    let store = rebac_core::load_policy(&fs::read_to_string(dir.path().join("policy.json")).unwrap()).unwrap();
    assert_eq!(store.principals(), w.store().unwrap().principals());
}

proptest! {
    #[test]
    fn distinct_samples_stay_distinct(seed in any::<u64>(), n in 1u64..500, frac in 0.0f64..=1.0) {
        let k = (n as f64 * frac) as usize;
        let v = SynthRng::stream(seed, Stream::Rbac).sample_distinct(n, k);
        let set: BTreeSet<_> = v.iter().copied().collect();
        prop_assert_eq!(set.len(), k);
        prop_assert!(v.iter().all(|&x| x < n));
    }

    #[test]
    fn bounded_draws_stay_in_range(seed in any::<u64>(), n in 1u64..u64::MAX) {
        let mut rng = SynthRng::stream(seed, Stream::Warmup);
        for _ in 0..8 {
            prop_assert!(rng.below(n) < n);
        }
    }
}
