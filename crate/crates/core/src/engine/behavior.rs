//! Reaction modifiers. A demon's raw reaction passes through the behavior
//! named in its definition before it touches confidence.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::kb::STANDARD_BEHAVIOR;

/// A demon's uninhibited reaction to one feature.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Reaction {
    /// Leaf contribution.
    pub raw: i32,
    /// Sum of `group_deltas`.
    pub or_bonus: i32,
    /// Bonus delta per group that contains the feature.
    pub group_deltas: BTreeMap<String, i32>,
}

impl Reaction {
    pub fn new(raw: i32, or_bonus: i32) -> Self {
        Reaction { raw, or_bonus, group_deltas: BTreeMap::new() }
    }

    pub fn total(&self) -> i32 {
        self.raw + self.or_bonus
    }
}

/// Read-only view of the engine taken before a step begins.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Environment {
    pub alive_count: usize,
    pub confidences: Vec<(String, i32)>,
}

/// Turns a raw reaction into the delta actually applied to confidence.
pub trait Behavior: Send + Sync {
    fn modify(&self, reaction: &Reaction, env: &Environment) -> i32;
}

impl<F> Behavior for F
where
    F: Fn(&Reaction, &Environment) -> i32 + Send + Sync,
{
    fn modify(&self, reaction: &Reaction, env: &Environment) -> i32 {
        self(reaction, env)
    }
}

/// Standard data-demon control: the reaction passes through unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardDataDemon;

impl Behavior for StandardDataDemon {
    fn modify(&self, reaction: &Reaction, _env: &Environment) -> i32 {
        reaction.total()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("behavior `{0}` is already registered")]
    Duplicate(String),
    #[error("behavior id must not be empty")]
    EmptyId,
}

#[derive(Clone)]
pub struct BehaviorRegistry {
    entries: BTreeMap<String, Arc<dyn Behavior>>,
}

impl Default for BehaviorRegistry {
    fn default() -> Self {
        let mut entries: BTreeMap<String, Arc<dyn Behavior>> = BTreeMap::new();
        entries.insert(STANDARD_BEHAVIOR.to_string(), Arc::new(StandardDataDemon));
        BehaviorRegistry { entries }
    }
}

impl fmt::Debug for BehaviorRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.entries.keys()).finish()
    }
}

impl BehaviorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, id: impl Into<String>, behavior: impl Behavior + 'static) -> Result<(), RegistryError> {
        let id = id.into();
        if id.is_empty() {
            return Err(RegistryError::EmptyId);
        }
        if self.entries.contains_key(&id) {
            return Err(RegistryError::Duplicate(id));
        }
        self.entries.insert(id, Arc::new(behavior));
        Ok(())
    }

    /// Builder-style `register`.
    pub fn with(mut self, id: impl Into<String>, behavior: impl Behavior + 'static) -> Result<Self, RegistryError> {
        self.register(id, behavior)?;
        Ok(self)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.contains_key(id)
    }

    pub fn get(&self, id: &str) -> Option<&Arc<dyn Behavior>> {
        self.entries.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Applied delta for `reaction` under behavior `id`; `None` if `id` is not
/// registered.
pub fn modifier_pipeline(registry: &BehaviorRegistry, id: &str, reaction: &Reaction, env: &Environment) -> Option<i32> {
    registry.get(id).map(|b| b.modify(reaction, env))
}

/// Halves the applied delta, rounding toward zero.
pub fn halve(reaction: &Reaction, _env: &Environment) -> i32 {
    reaction.total() / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_behavior_is_identity() {
        let reg = BehaviorRegistry::new();
        let env = Environment::default();
        assert_eq!(modifier_pipeline(&reg, STANDARD_BEHAVIOR, &Reaction::new(5, 35), &env), Some(40));
        assert_eq!(modifier_pipeline(&reg, STANDARD_BEHAVIOR, &Reaction::new(0, 0), &env), Some(0));
        assert_eq!(modifier_pipeline(&reg, "nope", &Reaction::new(1, 0), &env), None);
    }

    #[test]
    fn custom_behavior_rounds_toward_zero() {
        let reg = BehaviorRegistry::new().with("half", halve).unwrap();
        let env = Environment::default();
        assert_eq!(modifier_pipeline(&reg, "half", &Reaction::new(4, 0), &env), Some(2));
        assert_eq!(modifier_pipeline(&reg, "half", &Reaction::new(-5, 0), &env), Some(-2));
        assert_eq!(modifier_pipeline(&reg, "half", &Reaction::new(3, 0), &env), Some(1));
    }

    #[test]
    fn builtin_is_reserved() {
        let mut reg = BehaviorRegistry::new();
        assert_eq!(
            reg.register(STANDARD_BEHAVIOR, StandardDataDemon),
            Err(RegistryError::Duplicate(STANDARD_BEHAVIOR.into()))
        );
        reg.register("half", halve).unwrap();
        assert!(matches!(reg.register("half", halve), Err(RegistryError::Duplicate(_))));
    }
}
