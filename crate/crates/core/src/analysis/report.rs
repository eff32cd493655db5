//! Deterministic key-value reports for experiment outputs.
//!
//! Diagnostics are grouped into named sections and rendered as sorted
//! `key = value` lines, so identical inputs produce byte-identical
//! report files regardless of insertion order.

use std::collections::BTreeMap;
use std::fmt::Display;

#[derive(Debug, Clone, Default)]
pub struct DiagnosticsReport {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl DiagnosticsReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record `key = value` under `section`, overwriting any previous
    /// value for the same key.
    pub fn set(&mut self, section: &str, key: &str, value: impl Display) {
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    /// Render as `[section]` headers with sorted `key = value` lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, entries) in &self.sections {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push('[');
            out.push_str(name);
            out.push_str("]\n");
            for (key, value) in entries {
                out.push_str(key);
                out.push_str(" = ");
                out.push_str(value);
                out.push('\n');
            }
        }
        out
    }
}
