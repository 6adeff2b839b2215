use std::fmt;
use std::str::FromStr;

use rebac_core::{EngineConfig, GuardKind, Mode, Semantics, Strategy};
use serde::{Deserialize, Serialize};

/// The eight benchmark configurations: RBAC-only (`Ro`) or ReBAC-only
/// (`Re`), one-of or all-of guards, eager or lazy matching, liberal or
/// strict grant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BenchConfiguration {
    RoOne,
    RoAll,
    ReOneEg,
    ReOneLz,
    ReAllEgLib,
    ReAllEgStr,
    ReAllLzLib,
    ReAllLzStr,
}

use BenchConfiguration::*;

impl BenchConfiguration {
    pub const ALL: [BenchConfiguration; 8] =
        [RoOne, RoAll, ReOneEg, ReOneLz, ReAllEgLib, ReAllEgStr, ReAllLzLib, ReAllLzStr];

    pub fn name(self) -> &'static str {
        match self {
            RoOne => "RoOne",
            RoAll => "RoAll",
            ReOneEg => "ReOneEg",
            ReOneLz => "ReOneLz",
            ReAllEgLib => "ReAllEgLib",
            ReAllEgStr => "ReAllEgStr",
            ReAllLzLib => "ReAllLzLib",
            ReAllLzStr => "ReAllLzStr",
        }
    }

    pub fn guard_kind(self) -> GuardKind {
        match self {
            RoOne | ReOneEg | ReOneLz => GuardKind::OneOf,
            _ => GuardKind::AllOf,
        }
    }

    pub fn is_rebac(self) -> bool {
        !matches!(self, RoOne | RoAll)
    }

    /// One-of guards make the two grant semantics coincide, so the one-of
    /// configurations run under liberal grant.
    pub fn engine_config(self) -> EngineConfig {
        let (mode, strategy, semantics) = match self {
            RoOne | RoAll => (Mode::RbacOnly, Strategy::default(), Semantics::default()),
            ReOneEg => (Mode::RebacOnly, Strategy::Eager, Semantics::Liberal),
            ReOneLz => (Mode::RebacOnly, Strategy::Lazy, Semantics::Liberal),
            ReAllEgLib => (Mode::RebacOnly, Strategy::Eager, Semantics::Liberal),
            ReAllEgStr => (Mode::RebacOnly, Strategy::Eager, Semantics::Strict),
            ReAllLzLib => (Mode::RebacOnly, Strategy::Lazy, Semantics::Liberal),
            ReAllLzStr => (Mode::RebacOnly, Strategy::Lazy, Semantics::Strict),
        };
        EngineConfig { semantics, strategy, mode }
    }
}

impl fmt::Display for BenchConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchConfiguration {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|c| c.name()).collect();
                format!("unknown configuration `{s}` (expected one of {})", names.join(", "))
            })
    }
}
