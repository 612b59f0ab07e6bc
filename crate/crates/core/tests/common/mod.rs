//! Shared helpers for integration tests: an independent from-scratch
//! recomputation of confidences, and random knowledge-base generators.

#![allow(dead_code)]

use std::collections::BTreeSet;

use dune::kb::{BonusSchedule, CriterionGroup, Leaf, ThresholdSet};
use dune::{DemonDef, FeatureId, KnowledgeBase};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

pub fn f(s: &str) -> FeatureId {
    FeatureId::new(s).unwrap()
}

/// Cumulative bonus after `k` members, padding with the last value.
fn bonus_at(cumulative: &[i32], k: usize) -> i32 {
    if k == 0 {
        return 0;
    }
    cumulative.get(k - 1).or(cumulative.last()).copied().unwrap_or(0)
}

/// Confidence of one demon if it has seen exactly `seen`, clamped.
pub fn score(def: &DemonDef, seen: &BTreeSet<&FeatureId>) -> i32 {
    let leaves: i32 = def.leaves.iter().filter(|l| seen.contains(&l.feature)).map(|l| l.weight).sum();
    let groups: i32 = def
        .groups
        .iter()
        .map(|g| bonus_at(&g.schedule.cumulative, g.members.iter().filter(|m| seen.contains(m)).count()))
        .sum();
    (leaves + groups).clamp(-100, 100)
}

/// For every prefix of `features`, recompute each demon's confidence from
/// the set of features in that prefix. Once a demon drops below its death
/// threshold it reads -1 for the rest of the run.
pub fn oracle_matrix(kb: &KnowledgeBase, features: &[FeatureId]) -> Vec<Vec<i32>> {
    let mut dead = vec![false; kb.demons.len()];
    let mut columns = Vec::new();
    for end in 1..=features.len() {
        let seen: BTreeSet<&FeatureId> = features[..end].iter().collect();
        let column = kb
            .demons
            .iter()
            .enumerate()
            .map(|(i, def)| {
                if dead[i] {
                    return -1;
                }
                let conf = score(def, &seen);
                if conf < def.thresholds.death {
                    dead[i] = true;
                    -1
                } else {
                    conf
                }
            })
            .collect();
        columns.push(column);
    }
    columns
}

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_demons: usize,
    pub max_features: usize,
    pub max_groups: usize,
    pub leaf_range: (i32, i32),
    /// Upper bound on one group's full bonus.
    pub max_group_bonus: i32,
    /// Death threshold pinned to -100 so nothing ever dies.
    pub immortal: bool,
}

impl GenConfig {
    /// Wide weights: clamping and deaths both happen.
    pub const WILD: GenConfig = GenConfig {
        max_demons: 4,
        max_features: 6,
        max_groups: 3,
        leaf_range: (-60, 60),
        max_group_bonus: 100,
        immortal: false,
    };

    /// Totals stay inside [-100, 100] and no demon can die.
    pub const TAME: GenConfig = GenConfig {
        max_demons: 4,
        max_features: 6,
        max_groups: 3,
        leaf_range: (-10, 10),
        max_group_bonus: 13,
        immortal: true,
    };
}

pub fn feature_pool(n: usize) -> Vec<FeatureId> {
    (0..n).map(|i| f(&format!("f{i}"))).collect()
}

fn random_schedule(rng: &mut impl Rng, members: usize, max: i32) -> Vec<i32> {
    let len = rng.random_range(0..=members);
    let mut values: Vec<i32> = (0..len).map(|_| rng.random_range(0..=max)).collect();
    values.sort_unstable();
    values
}

pub fn random_demon(rng: &mut impl Rng, name: String, pool: &[FeatureId], cfg: &GenConfig) -> DemonDef {
    let mut def = DemonDef::new(name);
    for feat in pool {
        if rng.random_bool(0.6) {
            def.leaves.push(Leaf { feature: feat.clone(), weight: rng.random_range(cfg.leaf_range.0..=cfg.leaf_range.1) });
        }
    }
    def.leaves.shuffle(rng);
    for gi in 0..rng.random_range(0..=cfg.max_groups) {
        let mut members: Vec<FeatureId> = pool.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
        if members.is_empty() {
            members.push(pool.choose(rng).unwrap().clone());
        }
        members.shuffle(rng);
        let cumulative = random_schedule(rng, members.len(), cfg.max_group_bonus);
        def.groups.push(CriterionGroup {
            name: format!("g{gi}"),
            explicit_schedule: !cumulative.is_empty(),
            schedule: BonusSchedule::new(cumulative),
            members,
        });
    }
    def.thresholds = if cfg.immortal {
        ThresholdSet { death: -100, reject: rng.random_range(-100..=0), accept: rng.random_range(1..=100) }
    } else {
        let death = rng.random_range(-100..=0);
        let reject = rng.random_range(death..=20);
        let accept = rng.random_range(reject + 1..=100);
        ThresholdSet { death, reject, accept }
    };
    if rng.random_bool(0.2) {
        def.output = Some(format!("output of {}", def.name));
    }
    def
}

pub fn random_kb(rng: &mut impl Rng, cfg: &GenConfig) -> (KnowledgeBase, Vec<FeatureId>) {
    let pool = feature_pool(rng.random_range(1..=cfg.max_features));
    let demons = (0..rng.random_range(1..=cfg.max_demons))
        .map(|i| random_demon(rng, format!("d{i}"), &pool, cfg))
        .collect();
    (KnowledgeBase::new(demons), pool)
}

/// Random sequence over the pool plus one feature no demon knows.
pub fn random_sequence(rng: &mut impl Rng, pool: &[FeatureId], max_len: usize) -> Vec<FeatureId> {
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| {
            if rng.random_bool(0.1) {
                f("unheard_of")
            } else {
                pool.choose(rng).unwrap().clone()
            }
        })
        .collect()
}
