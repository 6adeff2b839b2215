//! Network policy decision point.
//!
//! Clients send one JSON object per line, `{"op": ..., ...}`, and receive
//! one response line per request, in order:
//!
//! ```text
//! {"op":"check","resource":"rec1","user":"d1","guard":{"kind":"one-of","privileges":["read"]}}
//! {"ok":true,"result":{"allow":true,"trace":{...}},"latency_us":12.5}
//! ```
//!
//! Supported ops are `check`, `filter`, `match`, `admin.enabled` and
//! `admin.exec`. Reads share the graph; `admin.exec` takes the exclusive
//! write lock for the whole action.

mod pdp;
mod server;
mod wire;

pub use pdp::{admin_error_code, engine_error_code, Pdp};
pub use server::{serve_connection, Client, Server};
pub use wire::{Overrides, WireError, WireRequest, WireResponse};
