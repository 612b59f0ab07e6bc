use serde::{Deserialize, Serialize};

use super::state::Status;
use crate::feature::FeatureId;

/// One line of a per-step table, in display order
/// `DEMON STATE CONF OLD DEATH ACCP REJCT FNUM REACT OR-BNS`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub demon: String,
    pub state: Status,
    /// `-1` for dead demons.
    pub conf: i32,
    pub old: i32,
    pub death: i32,
    pub accp: i32,
    pub rejct: i32,
    pub fnum: usize,
    pub react: i32,
    pub or_bns: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Event {
    Accept { demon: String, output: String },
    Death { demon: String },
    Reject { demon: String },
    UnknownFeature { feature: FeatureId },
}

impl Event {
    /// The line printed when a demon accepts.
    pub fn accept_line(&self) -> Option<String> {
        match self {
            Event::Accept { demon, output } => Some(format!("output from demon {demon}: {output}")),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub fnum: usize,
    pub feature: FeatureId,
    pub rows: Vec<TraceRow>,
    pub events: Vec<Event>,
}

impl StepReport {
    pub fn row(&self, demon: &str) -> Option<&TraceRow> {
        self.rows.iter().find(|r| r.demon == demon)
    }
}
