//! Regression pins: named floating-point constants captured on the first
//! run and asserted bit-identically on every later run.
//!
//! The audited inequalities hold with unnamed universal constants, so the
//! concrete minima observed on the reference grids are the only repeatable
//! artifacts. Pinning freezes each minimum as a 17-significant-digit
//! decimal string, which round-trips `f64` exactly; any later drift, even
//! in the last bit, is a regression and fails the comparison.
//!
//! File format, stable byte-for-byte under re-save:
//!
//! ```json
//! {
//!   "schema": 1,
//!   "pins": {
//!     "gamma_grid_min": "4.0000666696668452e0"
//!   }
//! }
//! ```

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use crate::report::fmt_float;

#[derive(Debug, thiserror::Error)]
pub enum PinError {
    #[error("pin file i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("pin file parse: {0}")]
    Parse(String),
}

/// Outcome of checking one value against the pin set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PinOutcome {
    /// No pin existed; the value is now recorded.
    Recorded,
    /// Pin existed and the value reproduced it bit for bit.
    Match,
    /// Pin existed and the value differs.
    Mismatch { pinned: f64, got: f64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PinSet {
    pins: BTreeMap<String, f64>,
}

impl PinSet {
    pub fn new() -> Self {
        PinSet::default()
    }

    /// Loads a pin file; a missing file is an empty set (pin mode).
    pub fn load(path: &Path) -> Result<Self, PinError> {
        if !path.exists() {
            return Ok(PinSet::new());
        }
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| PinError::Parse(e.to_string()))?;
        if value.get("schema").and_then(|v| v.as_u64()) != Some(1) {
            return Err(PinError::Parse("unsupported schema".into()));
        }
        let table = value
            .get("pins")
            .and_then(|v| v.as_object())
            .ok_or_else(|| PinError::Parse("missing pins object".into()))?;
        let mut pins = BTreeMap::new();
        for (name, entry) in table {
            let s = entry
                .as_str()
                .ok_or_else(|| PinError::Parse(format!("pin {name} is not a string")))?;
            let parsed: f64 = s
                .parse()
                .map_err(|_| PinError::Parse(format!("pin {name} is not a float: {s}")))?;
            pins.insert(name.clone(), parsed);
        }
        Ok(PinSet { pins })
    }

    /// Writes the set sorted by name. Byte-stable for a given content.
    pub fn save(&self, path: &Path) -> Result<(), PinError> {
        let mut out = Vec::new();
        writeln!(out, "{{")?;
        writeln!(out, "  \"schema\": 1,")?;
        writeln!(out, "  \"pins\": {{")?;
        let last = self.pins.len().saturating_sub(1);
        for (i, (name, value)) in self.pins.iter().enumerate() {
            let comma = if i == last { "" } else { "," };
            writeln!(
                out,
                "    \"{}\": \"{}\"{comma}",
                json_escape(name),
                fmt_float(*value)
            )?;
        }
        writeln!(out, "  }}")?;
        writeln!(out, "}}")?;
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.pins.get(name).copied()
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.pins.insert(name.to_string(), value);
    }

    pub fn is_empty(&self) -> bool {
        self.pins.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.pins.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// First run records the value; later runs demand bit identity.
    pub fn check(&mut self, name: &str, value: f64) -> PinOutcome {
        match self.pins.get(name) {
            None => {
                self.pins.insert(name.to_string(), value);
                PinOutcome::Recorded
            }
            Some(&pinned) if pinned.to_bits() == value.to_bits() => PinOutcome::Match,
            Some(&pinned) => PinOutcome::Mismatch { pinned, got: value },
        }
    }
}

fn json_escape(s: &str) -> String {
    s.chars()
        .flat_map(|c| match c {
            '"' => "\\\"".chars().collect::<Vec<_>>(),
            '\\' => "\\\\".chars().collect(),
            c if (c as u32) < 0x20 => format!("\\u{:04x}", c as u32).chars().collect(),
            c => vec![c],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("monocorr_pin_test_{name}_{}", std::process::id()));
        p
    }

    #[test]
    fn record_then_match_then_mismatch() {
        let mut pins = PinSet::new();
        assert_eq!(pins.check("alpha", 1.25), PinOutcome::Recorded);
        assert_eq!(pins.check("alpha", 1.25), PinOutcome::Match);
        match pins.check("alpha", 1.25 + 1e-16) {
            PinOutcome::Match => {} // 1.25 + 1e-16 rounds back to 1.25
            other => panic!("unexpected {other:?}"),
        }
        match pins.check("alpha", 1.2500000001) {
            PinOutcome::Mismatch { pinned, .. } => assert_eq!(pinned, 1.25),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn round_trip_is_bit_exact_and_byte_stable() {
        let mut pins = PinSet::new();
        pins.set("gamma_grid_min", 4.000066669666845250249);
        pins.set("majority_min_ratio", 0.3399345678901234);
        pins.set("tiny", 5.7255712225245768e-300);
        let path = tmp("round_trip");
        pins.save(&path).unwrap();
        let loaded = PinSet::load(&path).unwrap();
        for (name, value) in pins.iter() {
            assert_eq!(loaded.get(name).unwrap().to_bits(), value.to_bits(), "{name}");
        }
        let first = std::fs::read(&path).unwrap();
        loaded.save(&path).unwrap();
        let second = std::fs::read(&path).unwrap();
        assert_eq!(first, second);
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn missing_file_is_pin_mode() {
        let pins = PinSet::load(Path::new("/nonexistent/monocorr/pins.json")).unwrap();
        assert!(pins.is_empty());
    }

    #[test]
    fn malformed_files_are_rejected() {
        let path = tmp("malformed");
        std::fs::write(&path, b"{\"schema\": 2, \"pins\": {}}").unwrap();
        assert!(matches!(PinSet::load(&path), Err(PinError::Parse(_))));
        std::fs::write(&path, b"{\"schema\": 1, \"pins\": {\"a\": 1.0}}").unwrap();
        assert!(matches!(PinSet::load(&path), Err(PinError::Parse(_))));
        std::fs::write(&path, b"not json").unwrap();
        assert!(matches!(PinSet::load(&path), Err(PinError::Parse(_))));
        std::fs::remove_file(&path).unwrap();
    }
}
