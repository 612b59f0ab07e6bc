use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Returns true when `s` matches `[a-z_][a-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut bytes = s.bytes();
    match bytes.next() {
        Some(b) if b.is_ascii_lowercase() || b == b'_' => {}
        _ => return false,
    }
    bytes.all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid identifier {0:?}: expected [a-z_][a-z0-9_]*")]
pub struct InvalidIdentifier(pub String);

/// One atomic input item, e.g. `fatigue`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureId(String);

impl FeatureId {
    pub fn new(name: impl Into<String>) -> Result<Self, InvalidIdentifier> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(FeatureId(name))
        } else {
            Err(InvalidIdentifier(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for FeatureId {
    type Err = InvalidIdentifier;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureId::new(s)
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for FeatureId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Serialize for FeatureId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for FeatureId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        FeatureId::new(s).map_err(serde::de::Error::custom)
    }
}

/// Parses a feature-sequence file: one identifier per line, `#` comments,
/// blank lines ignored. Errors carry the 1-based line number.
pub fn parse_feature_list(text: &str) -> Result<Vec<FeatureId>, (usize, InvalidIdentifier)> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        out.push(FeatureId::new(line).map_err(|e| (idx + 1, e))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifier_grammar() {
        assert!(is_identifier("fatigue"));
        assert!(is_identifier("_x9"));
        assert!(is_identifier("prom_dysphoric_mood"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("9lives"));
        assert!(!is_identifier("Fatigue!"));
        assert!(!is_identifier("has-dash"));
    }

    #[test]
    fn feature_list_skips_comments_and_blanks() {
        let feats = parse_feature_list("# header\n\nfatigue  # first\n  talkative\n").unwrap();
        let names: Vec<_> = feats.iter().map(FeatureId::as_str).collect();
        assert_eq!(names, ["fatigue", "talkative"]);
    }

    #[test]
    fn feature_list_reports_line() {
        let err = parse_feature_list("fatigue\nBad\n").unwrap_err();
        assert_eq!(err.0, 2);
    }

    #[test]
    fn serde_rejects_malformed() {
        assert!(serde_json::from_str::<FeatureId>("\"Fatigue!\"").is_err());
        let f: FeatureId = serde_json::from_str("\"restless\"").unwrap();
        assert_eq!(f.as_str(), "restless");
    }
}
