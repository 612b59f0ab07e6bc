//! Knowledge-base model and the `.dune` text format.
//!
//! A knowledge base is an ordered list of demon definitions. Each demon
//! scores features through weighted leaves and count-based groups whose
//! cumulative bonus schedule pays out as more of the group's members are
//! observed.

mod diagnostic;
mod lexer;
mod parser;
mod serialize;
mod validate;

use std::collections::BTreeSet;

use crate::feature::FeatureId;

pub use diagnostic::{Diagnostic, Position, Severity};
pub use parser::parse_kb;
pub use serialize::serialize_kb;
pub use validate::{max_attainable, validate_kb, validate_kb_with};

pub const DEFAULT_ACCEPT: i32 = 90;
pub const DEFAULT_REJECT: i32 = 0;
pub const DEFAULT_DEATH: i32 = 0;
pub const STANDARD_BEHAVIOR: &str = "standard-data-demon";

/// Confidence cut points, in integer percent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdSet {
    pub death: i32,
    pub reject: i32,
    pub accept: i32,
}

impl Default for ThresholdSet {
    fn default() -> Self {
        ThresholdSet {
            death: DEFAULT_DEATH,
            reject: DEFAULT_REJECT,
            accept: DEFAULT_ACCEPT,
        }
    }
}

impl ThresholdSet {
    /// `-100 <= death <= reject < accept <= 100`
    pub fn is_well_ordered(&self) -> bool {
        -100 <= self.death && self.death <= self.reject && self.reject < self.accept && self.accept <= 100
    }
}

/// Cumulative bonus `B(k)` awarded once `k` members of a group are seen.
///
/// `B(0)` is always 0. Past the end of the list the last value repeats, and
/// an empty schedule pays nothing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BonusSchedule {
    pub cumulative: Vec<i32>,
}

impl BonusSchedule {
    pub fn new(cumulative: Vec<i32>) -> Self {
        BonusSchedule { cumulative }
    }

    pub fn at(&self, count: usize) -> i32 {
        if count == 0 {
            return 0;
        }
        match self.cumulative.get(count - 1) {
            Some(&v) => v,
            None => self.cumulative.last().copied().unwrap_or(0),
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.cumulative.windows(2).all(|w| w[0] <= w[1])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionGroup {
    pub name: String,
    pub members: Vec<FeatureId>,
    pub schedule: BonusSchedule,
    /// Whether the source text carried an explicit `bonus` list.
    pub explicit_schedule: bool,
}

impl CriterionGroup {
    pub fn contains(&self, feature: &FeatureId) -> bool {
        self.members.contains(feature)
    }

    /// Bonus once every member has been seen.
    pub fn full_bonus(&self) -> i32 {
        self.schedule.at(self.members.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leaf {
    pub feature: FeatureId,
    pub weight: i32,
}

#[derive(Debug, Clone)]
pub struct DemonDef {
    pub name: String,
    pub leaves: Vec<Leaf>,
    pub groups: Vec<CriterionGroup>,
    pub thresholds: ThresholdSet,
    pub behavior: String,
    pub output: Option<String>,
    /// Where the demon was declared, when it came from source text.
    pub position: Option<Position>,
}

// `position` is provenance only and takes no part in structural equality.
impl PartialEq for DemonDef {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.leaves == other.leaves
            && self.groups == other.groups
            && self.thresholds == other.thresholds
            && self.behavior == other.behavior
            && self.output == other.output
    }
}

impl Eq for DemonDef {}

impl DemonDef {
    pub fn new(name: impl Into<String>) -> Self {
        DemonDef {
            name: name.into(),
            leaves: Vec::new(),
            groups: Vec::new(),
            thresholds: ThresholdSet::default(),
            behavior: STANDARD_BEHAVIOR.to_string(),
            output: None,
            position: None,
        }
    }

    pub fn leaf_weight(&self, feature: &FeatureId) -> Option<i32> {
        self.leaves.iter().find(|l| &l.feature == feature).map(|l| l.weight)
    }

    /// Text announced when the demon accepts; defaults to its name.
    pub fn output_text(&self) -> &str {
        self.output.as_deref().unwrap_or(&self.name)
    }

    /// Whether the feature appears in a leaf or in any group.
    pub fn mentions(&self, feature: &FeatureId) -> bool {
        self.leaf_weight(feature).is_some() || self.groups.iter().any(|g| g.contains(feature))
    }

    /// Every feature this demon reacts to, leaves first then group members.
    pub fn features(&self) -> BTreeSet<FeatureId> {
        let mut out: BTreeSet<FeatureId> = self.leaves.iter().map(|l| l.feature.clone()).collect();
        for g in &self.groups {
            out.extend(g.members.iter().cloned());
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub demons: Vec<DemonDef>,
}

impl KnowledgeBase {
    pub fn new(demons: Vec<DemonDef>) -> Self {
        KnowledgeBase { demons }
    }

    /// Parses `.dune` text. The origin is only used in error messages.
    pub fn parse(text: &str) -> Result<Self, Vec<Diagnostic>> {
        parse_kb(text)
    }

    pub fn demon(&self, name: &str) -> Option<&DemonDef> {
        self.demons.iter().find(|d| d.name == name)
    }

    pub fn vocabulary(&self) -> BTreeSet<FeatureId> {
        self.demons.iter().flat_map(DemonDef::features).collect()
    }

    pub fn mentions(&self, feature: &FeatureId) -> bool {
        self.demons.iter().any(|d| d.mentions(feature))
    }
}

/// Union of all leaf and group-member features across demons.
pub fn vocabulary(kb: &KnowledgeBase) -> BTreeSet<FeatureId> {
    kb.vocabulary()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> FeatureId {
        FeatureId::new(s).unwrap()
    }

    #[test]
    fn schedule_pads_with_last_value() {
        let s = BonusSchedule::new(vec![0, 0, 28]);
        assert_eq!(s.at(0), 0);
        assert_eq!(s.at(2), 0);
        assert_eq!(s.at(3), 28);
        assert_eq!(s.at(4), 28);
        assert_eq!(BonusSchedule::default().at(5), 0);
    }

    #[test]
    fn threshold_ordering() {
        assert!(ThresholdSet::default().is_well_ordered());
        let bad = ThresholdSet { death: 0, reject: 60, accept: 50 };
        assert!(!bad.is_well_ordered());
        let equal = ThresholdSet { death: 0, reject: 50, accept: 50 };
        assert!(!equal.is_well_ordered());
    }

    #[test]
    fn vocabulary_includes_group_only_features() {
        let mut d = DemonDef::new("d");
        d.leaves.push(Leaf { feature: f("a"), weight: 3 });
        d.groups.push(CriterionGroup {
            name: "g".into(),
            members: vec![f("b")],
            schedule: BonusSchedule::new(vec![5]),
            explicit_schedule: true,
        });
        let kb = KnowledgeBase::new(vec![d]);
        let v: Vec<_> = kb.vocabulary().into_iter().map(|x| x.to_string()).collect();
        assert_eq!(v, ["a", "b"]);
        assert!(KnowledgeBase::default().vocabulary().is_empty());
    }

    #[test]
    fn output_text_defaults_to_name() {
        let mut d = DemonDef::new("depressive_ep");
        assert_eq!(d.output_text(), "depressive_ep");
        d.output = Some("major depression".into());
        assert_eq!(d.output_text(), "major depression");
    }
}
