//! Versioned JSON bundle holding everything needed to rebuild a code.

use serde::{Deserialize, Serialize};

use super::alist::{from_alist, to_alist};
use super::code::{build_concatenated_subcode, triangularize, KeyMap, SecretSharingCode};
use crate::error::CodeError;

pub const BUNDLE_FORMAT: &str = "wiretap-ldpc/code";
pub const BUNDLE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeBundle {
    pub format: String,
    pub version: u32,
    pub alist: String,
    /// Alist of the extra checks `H'` for a concatenated key map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_alist: Option<String>,
    pub column_perm: Vec<u32>,
    pub k: usize,
    pub seed: u64,
}

impl CodeBundle {
    pub fn from_code(code: &SecretSharingCode, seed: u64) -> Self {
        let extra_alist = match code.key_map() {
            KeyMap::Systematic => None,
            KeyMap::Syndrome { extra, .. } => Some(to_alist(extra)),
        };
        Self {
            format: BUNDLE_FORMAT.into(),
            version: BUNDLE_VERSION,
            alist: to_alist(code.graph()),
            extra_alist,
            column_perm: code.column_perm(),
            k: code.k(),
            seed,
        }
    }

    /// Rebuilds the code; triangularization is deterministic, so the stored
    /// permutation must be reproduced exactly.
    pub fn to_code(&self) -> Result<SecretSharingCode, CodeError> {
        if self.format != BUNDLE_FORMAT {
            return Err(CodeError::Bundle(format!(
                "unknown format {:?}",
                self.format
            )));
        }
        if self.version != BUNDLE_VERSION {
            return Err(CodeError::Bundle(format!(
                "unsupported version {}",
                self.version
            )));
        }
        let g = from_alist(&self.alist)?;
        let base = triangularize(&g)?;
        if base.column_perm() != self.column_perm {
            return Err(CodeError::Bundle(
                "column permutation does not match the parity-check matrix".into(),
            ));
        }
        let code = match &self.extra_alist {
            None => base.with_key_len(self.k)?,
            Some(a) => build_concatenated_subcode(&base, &from_alist(a)?)?,
        };
        if code.k() != self.k {
            return Err(CodeError::Bundle(format!(
                "stored k = {} but code gives {}",
                self.k,
                code.k()
            )));
        }
        Ok(code)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bundle serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CodeError> {
        serde_json::from_str(s).map_err(|e| CodeError::Bundle(e.to_string()))
    }
}
