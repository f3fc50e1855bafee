//! Role-tagged message log for a protocol session. Payloads are recorded as
//! short SHA-256 digests only.

use std::fmt;

use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Eve,
    Bob,
    /// 1-based player index.
    Player(usize),
    Interceptor,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Eve => f.write_str("eve"),
            Role::Bob => f.write_str("bob"),
            Role::Player(i) => write!(f, "player{i}"),
            Role::Interceptor => f.write_str("interceptor"),
        }
    }
}

impl Serialize for Role {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageKind {
    Query,
    Share,
    Result,
    Destroyed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Message {
    pub step: usize,
    pub from: Role,
    pub to: Role,
    pub kind: MessageKind,
    pub digest: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    messages: Vec<Message>,
}

/// First 16 hex digits of the SHA-256 of `payload`.
pub fn digest(payload: &[u8]) -> String {
    let full = hex::encode(Sha256::digest(payload));
    full[..16].to_string()
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, from: Role, to: Role, kind: MessageKind, payload: &[u8]) {
        let step = self.messages.len();
        self.messages.push(Message { step, from, to, kind, digest: digest(payload) });
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn count(&self, kind: MessageKind) -> usize {
        self.messages.iter().filter(|m| m.kind == kind).count()
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for m in &self.messages {
            out.push_str(&serde_json::to_string(m)?);
            out.push('\n');
        }
        Ok(out)
    }
}
