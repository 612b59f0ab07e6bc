use std::fmt;

use serde::{Deserialize, Serialize};

use crate::feature::FeatureId;
use crate::kb::DemonDef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Alive,
    Accepted,
    Rejected,
    Dead,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Alive => "ALIVE",
            Status::Accepted => "ACCEPTED",
            Status::Rejected => "REJECTED",
            Status::Dead => "DEAD",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-group progress. `prev_or_bonus` caches `B(satisfied_count)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GroupState {
    pub satisfied_count: usize,
    pub prev_or_bonus: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemonState {
    pub status: Status,
    /// Clamped to [-100, 100].
    pub confidence: i32,
    /// Confidence held just before the most recent change.
    pub old_confidence: i32,
    /// Unclamped sum of every applied delta; `confidence` is its clamp.
    pub evidence: i32,
    pub rcvd_features: Vec<FeatureId>,
    pub fnum: usize,
    pub group_states: Vec<GroupState>,
    pub accepted_latched: bool,
    pub last_react: i32,
    pub last_or_bonus: i32,
}

impl DemonState {
    pub fn fresh(def: &DemonDef) -> Self {
        DemonState {
            status: Status::Alive,
            confidence: 0,
            old_confidence: 0,
            evidence: 0,
            rcvd_features: Vec::new(),
            fnum: 0,
            group_states: vec![GroupState::default(); def.groups.len()],
            accepted_latched: false,
            last_react: 0,
            last_or_bonus: 0,
        }
    }

    pub fn has_received(&self, feature: &FeatureId) -> bool {
        self.rcvd_features.contains(feature)
    }

    pub fn is_dead(&self) -> bool {
        self.status == Status::Dead
    }
}
