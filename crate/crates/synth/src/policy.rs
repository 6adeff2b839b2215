//! The ten-formula corpus and the one-principal-per-role policy.

use rebac_core::policy::{
    AuthorizationRule, FormulaEntry, PolicyDocument, PrincipalMatchingRule, RelationEntry,
};
use rebac_core::{Privilege, RelationCategory};

use crate::graph::relation_names;
use crate::rbac::SynthRbac;
use crate::rng::{Stream, SynthRng};
use crate::SynthConfig;

pub const CORPUS_VARS: [&str; 2] = ["patient", "requestor"];

/// `(id, text)` for phi1 through phi10. Disjunctive formulas are spelled
/// out from the formulas they reference.
pub fn corpus() -> Vec<(String, String)> {
    let phi1 = "@patient <gp> requestor".to_string();
    let phi2 = "@patient <gp> <-referrer> requestor".to_string();
    let phi3 = format!("{phi1} | {phi2}");
    let phi4 = "@patient <gp> <-referrer> <appoint-team> requestor".to_string();
    let phi5 = "@patient <gp> <-referrer> <appoint-team> (requestor | <member> requestor)".to_string();
    let phi6 = format!("{phi3} | {phi5}");
    let phi7 = "@patient <register-ward> requestor".to_string();
    let phi8 = "@patient <register-ward> (requestor | <ward-nurse> requestor)".to_string();
    let phi9 = format!("{phi6} | {phi8}");
    let phi10 = "@patient <gp> requestor | @patient <-agent> <gp> requestor".to_string();
    [phi1, phi2, phi3, phi4, phi5, phi6, phi7, phi8, phi9, phi10]
        .into_iter()
        .enumerate()
        .map(|(i, text)| (format!("phi{}", i + 1), text))
        .collect()
}

/// The corpus as a `fmt check` file: `id(vars) = text` per line.
pub fn corpus_file() -> String {
    let mut out = String::from("# relationship predicates over (patient, requestor)\n");
    for (id, text) in corpus() {
        out.push_str(&format!("{id}({}) = {text}\n", CORPUS_VARS.join(", ")));
    }
    out
}

pub fn principal_id(role: &str) -> String {
    format!("ap-{role}")
}

/// One principal per role, granting that role's privileges and matched by
/// a corpus formula chosen uniformly at random.
pub fn synth_policy(cfg: &SynthConfig, rbac: &SynthRbac) -> PolicyDocument {
    let formulas: Vec<FormulaEntry> = corpus()
        .into_iter()
        .map(|(id, text)| FormulaEntry {
            id,
            vars: CORPUS_VARS.iter().map(|v| v.to_string()).collect(),
            text,
        })
        .collect();
    let mut rng = SynthRng::stream(cfg.seed, Stream::Policy);
    let mut matching_rules = Vec::new();
    let mut authorization_rules = Vec::new();
    for role in &rbac.roles {
        let principal = principal_id(role);
        matching_rules.push(PrincipalMatchingRule {
            principal: principal.clone(),
            formula_id: rng.choose(&formulas).id.clone(),
        });
        let privileges: Vec<Privilege> = rbac
            .tables
            .role_privileges(role)
            .map(|ps| ps.iter().cloned().collect())
            .unwrap_or_default();
        authorization_rules.push(AuthorizationRule { principal, privileges });
    }
    PolicyDocument {
        relations: relation_names()
            .into_iter()
            .map(|name| RelationEntry {
                name: name.to_string(),
                category: RelationCategory::UserManaged,
            })
            .collect(),
        formulas,
        matching_rules,
        authorization_rules,
        rbac: rbac.tables.to_document(),
        ..Default::default()
    }
}
