use std::thread;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rebac_core::policy::attach;
use rebac_core::{
    check, enabled_principals, filter_collection, load_graph, load_policy, validate, AccessRequest, EngineConfig, Guard,
    GuardKind, Mode, Semantics, SharedGraph, Strategy,
};
use rebac_service::{Client, Pdp, Server, WireResponse};
use serde_json::json;

const GRAPH: &str = include_str!("../../../fixtures/referral/graph.txt");
const POLICY: &str = include_str!("../../../fixtures/referral/policy.json");

fn pdp() -> Pdp {
    let store = load_policy(POLICY).unwrap();
    assert!(validate(&store).is_empty(), "{:?}", validate(&store));
    let mut g = load_graph(GRAPH).unwrap();
    attach(&store, &mut g).unwrap();
    Pdp::new(SharedGraph::new(g), store, EngineConfig::default())
}

fn serve() -> (Pdp, std::net::SocketAddr) {
    let pdp = pdp();
    let addr = Server::bind("127.0.0.1:0", pdp.clone()).unwrap().spawn().unwrap();
    (pdp, addr)
}

fn code(r: &WireResponse) -> &str {
    &r.error.as_ref().expect("error response").code
}

#[test]
fn check_example() {
    let (_, addr) = serve();
    let mut c = Client::connect(addr).unwrap();
    let r = c
        .call_raw(r#"{"op":"check","resource":"rec1","user":"d1","guard":{"kind":"one-of","privileges":["view-record"]}}"#)
        .unwrap();
    assert!(r.ok);
    assert_eq!(r.result.unwrap()["allow"], json!(true));
    assert!(r.latency_us >= 0.0);
}

#[test]
fn bad_lines_keep_the_connection_open() {
    let (_, addr) = serve();
    let mut c = Client::connect(addr).unwrap();
    assert_eq!(code(&c.call_raw("{not json").unwrap()), "parse");
    assert_eq!(code(&c.call_raw(r#"{"op":"launch"}"#).unwrap()), "bad_request");
    assert_eq!(code(&c.call_raw(r#"{"op":"check","resource":"rec1"}"#).unwrap()), "bad_request");
    assert_eq!(
        code(&c.call_raw(r#"{"op":"check","resource":"rec1","user":"d1","guard":{"kind":"one-of","privileges":[]}}"#).unwrap()),
        "bad_request"
    );
    assert_eq!(
        code(&c.call(&json!({"op":"match","resource":"ghost","user":"d1"})).unwrap()),
        "unknown_vertex"
    );
    let r = c.call(&json!({"op":"match","resource":"rec1","user":"d1"})).unwrap();
    assert_eq!(r.result.unwrap(), json!({"principals": ["regional-staff", "treating-clinician"]}));
}

#[test]
fn filter_and_overrides() {
    let (_, addr) = serve();
    let mut c = Client::connect(addr).unwrap();
    let guard = json!({"kind":"one-of","privileges":["view-summary"]});
    let r = c.call(&json!({"op":"filter","user":"n","guard":guard,"resources":[]})).unwrap();
    assert_eq!(r.result.unwrap(), json!({"allowed": []}));
    let r = c
        .call(&json!({"op":"filter","user":"n","guard":guard,"resources":["rec2","rec1"]}))
        .unwrap();
    assert_eq!(r.result.unwrap(), json!({"allowed": ["rec1"]}));
    // the nurse has no RBAC role granting view-record, ReBAC alone says no too
    let req = json!({"op":"check","resource":"rec1","user":"n",
        "guard":{"kind":"one-of","privileges":["view-summary"]},"mode":"rbac-only"});
    assert_eq!(c.call(&req).unwrap().result.unwrap()["allow"], json!(true));
    let req = json!({"op":"check","resource":"rec1","user":"n",
        "guard":{"kind":"all-of","privileges":["view-summary","view-record"]},"mode":"rebac-only"});
    assert_eq!(c.call(&req).unwrap().result.unwrap()["allow"], json!(false));
}

#[test]
fn referral_over_the_wire() {
    let (pdp, addr) = serve();
    let mut c = Client::connect(addr).unwrap();
    let view = json!({"op":"check","resource":"rec1","user":"s",
        "guard":{"kind":"all-of","privileges":["view-record"]}});
    assert_eq!(c.call(&view).unwrap().result.unwrap()["allow"], json!(false));

    let enabled = c.call(&json!({"op":"admin.enabled","user":"d1","patient":"p"})).unwrap();
    assert_eq!(enabled.result.unwrap(), json!({"actions": ["Referral"]}));
    let none = c.call(&json!({"op":"admin.enabled","user":"d2","patient":"p"})).unwrap();
    assert_eq!(none.result.unwrap(), json!({"actions": []}));

    let exec = json!({"op":"admin.exec","action":"Referral","user":"d1","patient":"p","bindings":{"specialist":"s"}});
    let r = c.call(&exec).unwrap();
    assert!(r.ok, "{r:?}");
    assert_eq!(r.result.unwrap()["applied"][0]["edge"], json!({"src":"p","rel":"referred-clinician","dst":"s"}));
    assert!(pdp.graph().read().has_edge("p", "referred-clinician", "s").unwrap());
    assert_eq!(c.call(&view).unwrap().result.unwrap()["allow"], json!(true));
    assert_eq!(code(&c.call(&exec).unwrap()), "add_existing_edge");

    let wrong = json!({"op":"admin.exec","action":"Referral","user":"d2","patient":"p","bindings":{"specialist":"s"}});
    assert_eq!(code(&c.call(&wrong).unwrap()), "not_enabled");
    let unbound = json!({"op":"admin.exec","action":"Referral","user":"d1","patient":"p"});
    assert_eq!(code(&c.call(&unbound).unwrap()), "unbound_participant");
}

#[test]
fn concurrent_clients_get_ordered_responses() {
    let (_, addr) = serve();
    let workers: Vec<_> = (0..8)
        .map(|w| {
            thread::spawn(move || {
                let mut c = Client::connect(addr).unwrap();
                for i in 0..60 {
                    // alternate a request that allows with one that denies
                    let user = if (i + w) % 2 == 0 { "d1" } else { "d2" };
                    let r = c
                        .call(&json!({"op":"check","resource":"rec1","user":user,
                            "guard":{"kind":"one-of","privileges":["edit-record"]}}))
                        .unwrap();
                    assert_eq!(r.result.unwrap()["allow"], json!(user == "d1"), "worker {w} request {i}");
                }
            })
        })
        .collect();
    for w in workers {
        w.join().unwrap();
    }
}

#[test]
fn wire_matches_library() {
    let (pdp, addr) = serve();
    let store = pdp.store();
    let graph = pdp.graph().read();
    let vertices: Vec<String> = graph.vertices().iter().map(|v| v.id.clone()).collect();
    let privileges = ["view-record", "edit-record", "view-summary", "other"];
    let mut rng = StdRng::seed_from_u64(77);
    let mut c = Client::connect(addr).unwrap();
    for _ in 0..300 {
        let kind = if rng.gen_bool(0.5) { GuardKind::OneOf } else { GuardKind::AllOf };
        let k = rng.gen_range(1..=3);
        let guard = Guard::new(kind, privileges.choose_multiple(&mut rng, k).copied()).unwrap();
        let resource = vertices.choose(&mut rng).unwrap().clone();
        let user = vertices.choose(&mut rng).unwrap().clone();
        let cfg = EngineConfig {
            mode: *[Mode::RbacOnly, Mode::RebacOnly, Mode::Both].choose(&mut rng).unwrap(),
            semantics: *[Semantics::Liberal, Semantics::Strict].choose(&mut rng).unwrap(),
            strategy: *[Strategy::Eager, Strategy::Lazy].choose(&mut rng).unwrap(),
        };
        let wire = c
            .call(&json!({"op":"check","resource":resource,"user":user,"guard":guard,
                "mode":cfg.mode,"semantics":cfg.semantics,"strategy":cfg.strategy}))
            .unwrap();
        let lib = check(store, &graph, &AccessRequest::new(resource.clone(), user.clone(), guard.clone()), &cfg)
            .unwrap();
        assert_eq!(wire.result.unwrap(), serde_json::to_value(&lib).unwrap());

        let wire = c.call(&json!({"op":"match","resource":resource,"user":user})).unwrap();
        let lib = enabled_principals(store, &graph, &resource, &user).unwrap();
        assert_eq!(wire.result.unwrap(), json!({ "principals": lib }));

        let resources: Vec<String> = vertices.choose_multiple(&mut rng, 4).cloned().collect();
        let wire = c
            .call(&json!({"op":"filter","user":user,"guard":guard,"resources":resources,"mode":cfg.mode,
                "semantics":cfg.semantics,"strategy":cfg.strategy}))
            .unwrap();
        let lib = filter_collection(store, &graph, &user, &guard, &resources, &cfg).unwrap();
        assert_eq!(wire.result.unwrap(), json!({ "allowed": lib }));
    }
}
