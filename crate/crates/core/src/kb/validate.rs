use std::collections::BTreeSet;

use super::diagnostic::{Diagnostic, Position};
use super::{DemonDef, KnowledgeBase, STANDARD_BEHAVIOR};
use crate::feature::is_identifier;

/// Highest confidence a demon could ever hold: every positive leaf plus every
/// group's full bonus, capped at 100.
pub fn max_attainable(def: &DemonDef) -> i32 {
    let leaves: i32 = def.leaves.iter().map(|l| l.weight.max(0)).sum();
    let groups: i32 = def.groups.iter().map(|g| g.full_bonus()).sum();
    (leaves + groups).min(100)
}

/// Validates against the built-in behavior only.
pub fn validate_kb(kb: &KnowledgeBase) -> Vec<Diagnostic> {
    validate_kb_with(kb, |id| id == STANDARD_BEHAVIOR)
}

/// Semantic checks. Structural rules the parser already enforces are
/// repeated here so that programmatically built knowledge bases get the
/// same guarantees.
pub fn validate_kb_with(kb: &KnowledgeBase, behavior_known: impl Fn(&str) -> bool) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut names = BTreeSet::new();
    for d in &kb.demons {
        let pos = d.position.unwrap_or(Position::NONE);
        let name = &d.name;
        if !is_identifier(name) {
            diags.push(Diagnostic::error(pos, "invalid_name", format!("demon name `{name}` is not an identifier")));
        }
        if !names.insert(name.as_str()) {
            diags.push(Diagnostic::error(pos, "duplicate_demon", format!("demon `{name}` is already defined")));
        }
        let t = d.thresholds;
        if !t.is_well_ordered() {
            let msg = format!(
                "demon `{name}`: thresholds must satisfy -100 <= death ({}) <= reject ({}) < accept ({}) <= 100",
                t.death, t.reject, t.accept
            );
            diags.push(Diagnostic::error(pos, "threshold_order", msg));
        }
        if !behavior_known(&d.behavior) {
            let msg = format!("demon `{name}` uses unregistered behavior `{}`", d.behavior);
            diags.push(Diagnostic::error(pos, "unknown_behavior", msg));
        }

        let mut leaf_seen = BTreeSet::new();
        for leaf in &d.leaves {
            if !leaf_seen.insert(&leaf.feature) {
                diags.push(Diagnostic::error(pos, "duplicate_leaf", format!("demon `{name}`: duplicate leaf `{}`", leaf.feature)));
            }
            if !(-100..=100).contains(&leaf.weight) {
                diags.push(Diagnostic::error(pos, "weight_range", format!("demon `{name}`: leaf `{}` out of range", leaf.feature)));
            }
        }
        for g in &d.groups {
            let gname = &g.name;
            if g.members.is_empty() {
                diags.push(Diagnostic::error(pos, "empty_group", format!("demon `{name}`: group `{gname}` has no members")));
            }
            let mut member_seen = BTreeSet::new();
            for m in &g.members {
                if !member_seen.insert(m) {
                    diags.push(Diagnostic::error(pos, "duplicate_member", format!("demon `{name}`: `{m}` repeated in group `{gname}`")));
                }
            }
            let sched = &g.schedule.cumulative;
            if !g.schedule.is_nondecreasing() {
                diags.push(Diagnostic::error(pos, "bonus_not_nondecreasing", format!("demon `{name}`: bonus not nondecreasing in group `{gname}`")));
            }
            if sched.iter().any(|v| !(0..=100).contains(v)) {
                diags.push(Diagnostic::error(pos, "bonus_range", format!("demon `{name}`: bonus out of range in group `{gname}`")));
            }
            if sched.len() > g.members.len() {
                diags.push(Diagnostic::error(pos, "bonus_too_long", format!("demon `{name}`: bonus list longer than members in group `{gname}`")));
            }
            if g.explicit_schedule && g.full_bonus() == 0 {
                let msg = format!("demon `{name}`: group `{gname}` never awards a bonus; its members count only through leaves");
                diags.push(Diagnostic::warning(pos, "zero_bonus_group", msg));
            }
        }

        let max = max_attainable(d);
        if t.is_well_ordered() && max < t.accept {
            let msg = format!("demon `{name}` can never reach accept (max {max} < {})", t.accept);
            diags.push(Diagnostic::warning(pos, "unreachable_accept", msg));
        }
    }
    diags
}
