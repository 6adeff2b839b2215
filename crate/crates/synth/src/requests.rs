use rebac_core::{AccessRequest, AuthorizationGraph, Guard, GuardKind, VertexKind};

use crate::rng::{Stream, SynthRng};
use crate::{SynthConfig, SynthError};

pub const MAX_GUARD_SIZE: usize = 3;

/// Requests for one guard kind. Request `i` pairs the `i`-th sampled
/// clinician with the `i`-th sampled patient; the patient vertex is the
/// resource. Each guard holds 1 to 3 distinct privileges.
pub fn synth_requests(
    cfg: &SynthConfig,
    graph: &AuthorizationGraph,
    privileges: &[String],
    kind: GuardKind,
) -> Result<Vec<AccessRequest>, SynthError> {
    let of_kind = |k: VertexKind| -> Vec<&str> {
        graph
            .vertices()
            .iter()
            .filter(|v| v.kind == k)
            .map(|v| v.id.as_str())
            .collect()
    };
    let (users, patients) = (of_kind(VertexKind::User), of_kind(VertexKind::Patient));
    if users.is_empty() || patients.is_empty() || privileges.is_empty() {
        return Err(SynthError::EmptyPopulation);
    }
    let stream = match kind {
        GuardKind::OneOf => Stream::RequestsOneOf,
        GuardKind::AllOf => Stream::RequestsAllOf,
    };
    let mut rng = SynthRng::stream(cfg.seed, stream);
    let n = cfg.requests_per_kind();
    let max = MAX_GUARD_SIZE.min(privileges.len());
    let guards: Vec<Guard> = (0..n)
        .map(|_| {
            let size = 1 + rng.index(max);
            let picks = rng.sample_distinct(privileges.len() as u64, size);
            Guard::new(kind, picks.into_iter().map(|i| privileges[i as usize].as_str()))
                .expect("guard size is at least one")
        })
        .collect();
    let clinicians: Vec<&str> = (0..n).map(|_| *rng.choose(&users)).collect();
    let records: Vec<&str> = (0..n).map(|_| *rng.choose(&patients)).collect();
    Ok(guards
        .into_iter()
        .zip(clinicians.into_iter().zip(records))
        .map(|(guard, (user, patient))| AccessRequest::new(patient, user, guard))
        .collect())
}
