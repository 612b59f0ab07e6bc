//! Read-only estimates over engine state: how much confidence a demon can
//! still gain, whether it can still trigger, and which question to ask next.

use serde::{Deserialize, Serialize};

use super::state::{DemonState, Status};
use super::Engine;
use crate::feature::FeatureId;
use crate::kb::DemonDef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Reachability {
    Accepted,
    Possible,
    Impossible,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionSuggestion {
    pub demon: String,
    pub feature: FeatureId,
    pub potential: i32,
}

/// Confidence still obtainable from features not yet received.
pub fn potential_remaining(def: &DemonDef, state: &DemonState) -> i32 {
    if state.is_dead() {
        return 0;
    }
    let leaves: i32 = def
        .leaves
        .iter()
        .filter(|l| !state.has_received(&l.feature))
        .map(|l| l.weight.max(0))
        .sum();
    let groups: i32 = def
        .groups
        .iter()
        .zip(&state.group_states)
        .map(|(g, gs)| g.full_bonus() - g.schedule.at(gs.satisfied_count))
        .sum();
    leaves + groups
}

pub fn reachability(def: &DemonDef, state: &DemonState) -> Reachability {
    if state.accepted_latched {
        Reachability::Accepted
    } else if state.status == Status::Dead || state.confidence + potential_remaining(def, state) < def.thresholds.accept {
        Reachability::Impossible
    } else {
        Reachability::Possible
    }
}

/// What answering `feature` could add to this demon right now.
pub fn marginal_potential(def: &DemonDef, state: &DemonState, feature: &FeatureId) -> i32 {
    if state.has_received(feature) {
        return 0;
    }
    let leaf = def.leaf_weight(feature).unwrap_or(0).max(0);
    let bonus: i32 = def
        .groups
        .iter()
        .zip(&state.group_states)
        .filter(|(g, _)| g.contains(feature))
        .map(|(g, gs)| g.schedule.at(gs.satisfied_count + 1) - g.schedule.at(gs.satisfied_count))
        .sum();
    leaf + bonus
}

/// The most valuable unresolved feature of the most confident demon that
/// is still undecided.
pub fn best_question(engine: &Engine) -> Option<QuestionSuggestion> {
    let mut candidates: Vec<(&DemonDef, &DemonState)> = engine
        .kb()
        .demons
        .iter()
        .zip(engine.states())
        .filter(|(_, s)| !s.is_dead() && !s.accepted_latched)
        .collect();
    candidates.sort_by(|a, b| b.1.confidence.cmp(&a.1.confidence).then_with(|| a.0.name.cmp(&b.0.name)));

    for (def, state) in candidates {
        let mut best: Option<(FeatureId, i32)> = None;
        // ascending feature order, so a strict `>` keeps the smallest name on ties
        for feature in def.features() {
            let pot = marginal_potential(def, state, &feature);
            if pot > 0 && best.as_ref().is_none_or(|(_, b)| pot > *b) {
                best = Some((feature, pot));
            }
        }
        if let Some((feature, potential)) = best {
            return Some(QuestionSuggestion { demon: def.name.clone(), feature, potential });
        }
    }
    None
}
