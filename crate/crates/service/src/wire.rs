use rebac_core::{Binding, Guard, Mode, Semantics, Strategy};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One request line. Engine settings default to the server's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum WireRequest {
    #[serde(rename = "check")]
    Check {
        resource: String,
        user: String,
        guard: Guard,
        #[serde(flatten)]
        overrides: Overrides,
    },
    #[serde(rename = "filter")]
    Filter {
        user: String,
        guard: Guard,
        resources: Vec<String>,
        #[serde(flatten)]
        overrides: Overrides,
    },
    #[serde(rename = "match")]
    Match { resource: String, user: String },
    #[serde(rename = "admin.enabled")]
    AdminEnabled { user: String, patient: String },
    #[serde(rename = "admin.exec")]
    AdminExec {
        action: String,
        user: String,
        patient: String,
        #[serde(default)]
        bindings: std::collections::BTreeMap<String, String>,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantics: Option<Semantics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
}

impl WireRequest {
    pub(crate) fn binding(user: &str, patient: &str, bindings: &std::collections::BTreeMap<String, String>) -> Binding {
        Binding {
            user: user.to_string(),
            patient: patient.to_string(),
            participants: bindings.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireError {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireResponse {
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<WireError>,
    pub latency_us: f64,
}

impl WireResponse {
    pub fn success(result: Value) -> Self {
        WireResponse {
            ok: true,
            result: Some(result),
            error: None,
            latency_us: 0.0,
        }
    }

    pub fn failure(code: &str, message: impl Into<String>) -> Self {
        WireResponse {
            ok: false,
            result: None,
            error: Some(WireError {
                code: code.to_string(),
                message: message.into(),
            }),
            latency_us: 0.0,
        }
    }
}
