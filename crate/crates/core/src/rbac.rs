//! Flat RBAC: user-role and privilege-role assignment, no hierarchy and no
//! sessions. Every role assigned to a user is active.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::policy::{Guard, GuardKind, Privilege, PrivilegeSet};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RbacTables {
    roles: BTreeMap<String, PrivilegeSet>,
    user_roles: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RbacDocument {
    #[serde(default)]
    pub roles: Vec<RoleEntry>,
    #[serde(default)]
    pub user_roles: Vec<UserRolesEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleEntry {
    pub name: String,
    #[serde(default)]
    pub privileges: Vec<Privilege>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserRolesEntry {
    pub user: String,
    #[serde(default)]
    pub roles: Vec<String>,
}

impl RbacTables {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_role(&mut self, role: impl Into<String>) {
        self.roles.entry(role.into()).or_default();
    }

    pub fn grant(&mut self, role: impl Into<String>, privilege: impl Into<Privilege>) {
        self.roles.entry(role.into()).or_default().insert(privilege.into());
    }

    /// Assigns a role to a user. Unknown roles are recorded as-is and
    /// reported by [`RbacTables::undeclared_roles`].
    pub fn assign(&mut self, user: impl Into<String>, role: impl Into<String>) {
        self.user_roles.entry(user.into()).or_default().insert(role.into());
    }

    pub fn roles(&self) -> impl Iterator<Item = (&str, &PrivilegeSet)> {
        self.roles.iter().map(|(r, p)| (r.as_str(), p))
    }

    pub fn role_privileges(&self, role: &str) -> Option<&PrivilegeSet> {
        self.roles.get(role)
    }

    pub fn user_roles(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.user_roles.iter().map(|(u, r)| (u.as_str(), r))
    }

    pub fn roles_of(&self, user: &str) -> Option<&BTreeSet<String>> {
        self.user_roles.get(user)
    }

    pub fn role_count(&self) -> usize {
        self.roles.len()
    }

    pub fn user_count(&self) -> usize {
        self.user_roles.len()
    }

    pub fn privilege_assignment_count(&self) -> usize {
        self.roles.values().map(BTreeSet::len).sum()
    }

    pub fn user_assignment_count(&self) -> usize {
        self.user_roles.values().map(BTreeSet::len).sum()
    }

    /// (user, role) pairs referencing roles that were never declared.
    pub fn undeclared_roles(&self) -> Vec<(&str, &str)> {
        self.user_roles
            .iter()
            .flat_map(|(u, rs)| rs.iter().map(move |r| (u.as_str(), r.as_str())))
            .filter(|(_, r)| !self.roles.contains_key(*r))
            .collect()
    }

    pub fn from_document(doc: &RbacDocument) -> Self {
        let mut tables = RbacTables::new();
        for role in &doc.roles {
            tables.add_role(role.name.clone());
            for p in &role.privileges {
                tables.grant(role.name.clone(), p.clone());
            }
        }
        for entry in &doc.user_roles {
            for r in &entry.roles {
                tables.assign(entry.user.clone(), r.clone());
            }
        }
        tables
    }

    pub fn to_document(&self) -> RbacDocument {
        RbacDocument {
            roles: self
                .roles
                .iter()
                .map(|(name, ps)| RoleEntry {
                    name: name.clone(),
                    privileges: ps.iter().cloned().collect(),
                })
                .collect(),
            user_roles: self
                .user_roles
                .iter()
                .map(|(user, rs)| UserRolesEntry {
                    user: user.clone(),
                    roles: rs.iter().cloned().collect(),
                })
                .collect(),
        }
    }
}

/// Union of the privileges of every role assigned to `user`.
pub fn rbac_privileges(tables: &RbacTables, user: &str) -> PrivilegeSet {
    tables
        .roles_of(user)
        .into_iter()
        .flatten()
        .filter_map(|role| tables.role_privileges(role))
        .flatten()
        .cloned()
        .collect()
}

/// Same answer as `satisfies(&rbac_privileges(..), guard)` without
/// materializing the union.
pub fn rbac_check(tables: &RbacTables, user: &str, guard: &Guard) -> bool {
    let Some(roles) = tables.roles_of(user) else {
        return false;
    };
    let sets: Vec<&PrivilegeSet> = roles.iter().filter_map(|r| tables.role_privileges(r)).collect();
    union_satisfies(&sets, guard)
}

/// Whether the union of `sets` satisfies `guard`.
pub(crate) fn union_satisfies(sets: &[&PrivilegeSet], guard: &Guard) -> bool {
    let held = |p: &Privilege| sets.iter().any(|s| s.contains(p));
    match guard.kind() {
        GuardKind::OneOf => guard.privileges().iter().any(held),
        GuardKind::AllOf => guard.privileges().iter().all(held),
    }
}

/// Each user's privilege union as a bitset, for the decision hot path.
#[derive(Debug, Clone, Default)]
pub(crate) struct RbacIndex {
    privileges: HashMap<Privilege, usize>,
    users: HashMap<String, usize>,
    words: usize,
    held: Vec<u64>,
}

impl RbacIndex {
    pub(crate) fn build(tables: &RbacTables) -> Self {
        let mut privileges = HashMap::new();
        for p in tables.roles.values().flatten() {
            let next = privileges.len();
            privileges.entry(p.clone()).or_insert(next);
        }
        let words = privileges.len().div_ceil(64);
        let mut users = HashMap::with_capacity(tables.user_roles.len());
        let mut held = vec![0u64; words * tables.user_roles.len()];
        for (i, (user, roles)) in tables.user_roles.iter().enumerate() {
            users.insert(user.clone(), i);
            for p in roles.iter().filter_map(|r| tables.roles.get(r)).flatten() {
                let bit = privileges[p];
                held[i * words + bit / 64] |= 1 << (bit % 64);
            }
        }
        RbacIndex {
            privileges,
            users,
            words,
            held,
        }
    }

    pub(crate) fn check(&self, user: &str, guard: &Guard) -> bool {
        let Some(&u) = self.users.get(user) else {
            return false;
        };
        let held = |p: &Privilege| {
            self.privileges
                .get(p)
                .is_some_and(|&b| self.held[u * self.words + b / 64] >> (b % 64) & 1 == 1)
        };
        match guard.kind() {
            GuardKind::OneOf => guard.privileges().iter().any(held),
            GuardKind::AllOf => guard.privileges().iter().all(held),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::satisfies;
    use proptest::prelude::*;

    fn privs(names: &[&str]) -> PrivilegeSet {
        names.iter().map(|n| Privilege::from(*n)).collect()
    }

    #[test]
    fn single_role() {
        let mut t = RbacTables::new();
        t.grant("r1", "p1");
        t.grant("r1", "p2");
        t.assign("u", "r1");
        assert_eq!(rbac_privileges(&t, "u"), privs(&["p1", "p2"]));
        assert!(rbac_privileges(&t, "stranger").is_empty());
    }

    #[test]
    fn roles_union() {
        let mut t = RbacTables::new();
        t.grant("r1", "p1");
        t.grant("r2", "p1");
        t.grant("r2", "p3");
        t.assign("u", "r1");
        t.assign("u", "r2");
        assert_eq!(rbac_privileges(&t, "u"), privs(&["p1", "p3"]));
    }

    #[test]
    fn check_composes_guard() {
        let mut t = RbacTables::new();
        t.grant("r1", "p1");
        t.assign("u", "r1");
        let one = Guard::new(GuardKind::OneOf, ["p1", "p2"]).unwrap();
        let all = Guard::new(GuardKind::AllOf, ["p1", "p2"]).unwrap();
        assert!(rbac_check(&t, "u", &one));
        assert!(!rbac_check(&t, "u", &all));
        assert!(!rbac_check(&t, "nobody", &one));
    }

    #[test]
    fn document_round_trip() {
        let mut t = RbacTables::new();
        t.grant("r1", "p1");
        t.add_role("empty");
        t.assign("u", "r1");
        t.assign("u", "ghost");
        assert_eq!(RbacTables::from_document(&t.to_document()), t);
        assert_eq!(t.undeclared_roles(), vec![("u", "ghost")]);
    }

    proptest! {
        #[test]
        fn adding_a_role_never_revokes(
            grants in proptest::collection::vec((0u8..4, 0u8..6), 0..12),
            assigned in proptest::collection::btree_set(0u8..4, 0..4),
            extra in 0u8..4,
            guard_privs in proptest::collection::btree_set(0u8..6, 1..4),
            all in any::<bool>(),
        ) {
            let mut t = RbacTables::new();
            for (r, p) in &grants {
                t.grant(format!("r{r}"), format!("p{p}"));
            }
            for r in &assigned {
                t.assign("u", format!("r{r}"));
            }
            let kind = if all { GuardKind::AllOf } else { GuardKind::OneOf };
            let g = Guard::new(kind, guard_privs.iter().map(|p| format!("p{p}"))).unwrap();
            let before = rbac_check(&t, "u", &g);
            prop_assert_eq!(before, satisfies(&rbac_privileges(&t, "u"), &g));
            prop_assert_eq!(before, RbacIndex::build(&t).check("u", &g));
            t.assign("u", format!("r{extra}"));
            prop_assert!(!before || rbac_check(&t, "u", &g));
        }
    }
}
