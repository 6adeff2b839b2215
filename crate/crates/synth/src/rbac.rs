use rebac_core::RbacTables;

use crate::rng::{Stream, SynthRng};
use crate::{SynthConfig, SynthError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RbacCounts {
    pub users: usize,
    pub privileges: usize,
    pub roles: usize,
    pub privilege_assignments: usize,
    pub user_assignments: usize,
}

impl RbacCounts {
    /// 10,000 users and 200 privileges, a 1:3 role-to-privilege ratio,
    /// about 7 privileges per role and 5 roles per user.
    pub const BASE: [f64; 5] = [10_000.0, 200.0, 67.0, 469.0, 50_000.0];

    pub fn at_scale(scale: f64) -> Self {
        let [u, p, r, pa, ua] = Self::BASE.map(|b| crate::config::scaled(b, scale));
        RbacCounts {
            users: u,
            privileges: p,
            roles: r,
            privilege_assignments: pa,
            user_assignments: ua,
        }
    }

    pub fn as_tuple(&self) -> (usize, usize, usize, usize, usize) {
        (
            self.users,
            self.privileges,
            self.roles,
            self.privilege_assignments,
            self.user_assignments,
        )
    }
}

#[derive(Debug, Clone)]
pub struct SynthRbac {
    pub tables: RbacTables,
    pub users: Vec<String>,
    pub privileges: Vec<String>,
    pub roles: Vec<String>,
}

impl SynthRbac {
    pub fn counts(&self) -> RbacCounts {
        RbacCounts {
            users: self.users.len(),
            privileges: self.privileges.len(),
            roles: self.roles.len(),
            privilege_assignments: self.tables.privilege_assignment_count(),
            user_assignments: self.tables.user_assignment_count(),
        }
    }
}

pub fn user_id(i: usize) -> String {
    format!("u{i}")
}

pub fn synth_rbac(cfg: &SynthConfig) -> Result<SynthRbac, SynthError> {
    cfg.validate()?;
    let counts = RbacCounts::at_scale(cfg.scale);
    let (n_users, n_privs, n_roles) = (counts.users, counts.privileges, counts.roles);
    let pa_space = (n_roles * n_privs) as u64;
    let ua_space = (n_users * n_roles) as u64;
    if counts.privilege_assignments as u64 > pa_space || counts.user_assignments as u64 > ua_space {
        return Err(SynthError::InfeasibleScale { scale: cfg.scale, counts });
    }

    let users: Vec<String> = (0..n_users).map(user_id).collect();
    let privileges: Vec<String> = (0..n_privs).map(|i| format!("priv{i}")).collect();
    let roles: Vec<String> = (0..n_roles).map(|i| format!("r{i}")).collect();

    let mut rng = SynthRng::stream(cfg.seed, Stream::Rbac);
    let mut tables = RbacTables::new();
    for role in &roles {
        tables.add_role(role.clone());
    }
    for idx in rng.sample_distinct(pa_space, counts.privilege_assignments) {
        let (r, p) = (idx as usize / n_privs, idx as usize % n_privs);
        tables.grant(roles[r].clone(), privileges[p].clone());
    }
    for idx in rng.sample_distinct(ua_space, counts.user_assignments) {
        let (u, r) = (idx as usize / n_roles, idx as usize % n_roles);
        tables.assign(users[u].clone(), roles[r].clone());
    }
    Ok(SynthRbac {
        tables,
        users,
        privileges,
        roles,
    })
}
