//! The demon engine.
//!
//! Every demon watches the same input stream. On each step the engine
//! snapshots the environment, lets each live demon compute its raw reaction
//! to the feature against that snapshot, runs the reaction through the
//! demon's behavior, and then commits all updates in declaration order.
//! Reactions never see updates made earlier in the same step.

mod behavior;
mod query;
mod report;
mod state;

use std::sync::Arc;

use crate::feature::FeatureId;
use crate::kb::{validate_kb_with, DemonDef, Diagnostic, KnowledgeBase};

pub use behavior::{halve, modifier_pipeline, Behavior, BehaviorRegistry, Environment, Reaction, RegistryError, StandardDataDemon};
pub use query::{best_question, marginal_potential, potential_remaining, reachability, QuestionSuggestion, Reachability};
pub use report::{Event, StepReport, TraceRow};
pub use state::{DemonState, GroupState, Status};

pub const MIN_CONFIDENCE: i32 = -100;
pub const MAX_CONFIDENCE: i32 = 100;
/// Confidence shown for dead demons.
pub const DEAD_SENTINEL: i32 = -1;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("knowledge base has errors:\n{}", render_diags(.0))]
    InvalidKb(Vec<Diagnostic>),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

fn render_diags(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

/// A demon's reaction to `feature`, computed without touching its state.
pub fn raw_reaction(def: &DemonDef, state: &DemonState, feature: &FeatureId) -> Reaction {
    if state.has_received(feature) {
        return Reaction::default();
    }
    let mut reaction = Reaction::new(def.leaf_weight(feature).unwrap_or(0), 0);
    for (g, gs) in def.groups.iter().zip(&state.group_states) {
        if g.contains(feature) {
            let delta = g.schedule.at(gs.satisfied_count + 1) - gs.prev_or_bonus;
            reaction.group_deltas.insert(g.name.clone(), delta);
            reaction.or_bonus += delta;
        }
    }
    reaction
}

#[derive(Debug, Clone)]
pub struct Engine {
    kb: Arc<KnowledgeBase>,
    states: Vec<DemonState>,
    step: usize,
    behaviors: BehaviorRegistry,
}

impl Engine {
    pub fn new(kb: impl Into<Arc<KnowledgeBase>>) -> Result<Self, EngineError> {
        Self::with_behaviors(kb, BehaviorRegistry::default())
    }

    /// Builds an engine whose demons may use any behavior in `behaviors`.
    /// Fails if validation reports any error.
    pub fn with_behaviors(kb: impl Into<Arc<KnowledgeBase>>, behaviors: BehaviorRegistry) -> Result<Self, EngineError> {
        let kb = kb.into();
        let diags = validate_kb_with(&kb, |id| behaviors.contains(id));
        let errors: Vec<Diagnostic> = diags.into_iter().filter(Diagnostic::is_error).collect();
        if !errors.is_empty() {
            return Err(EngineError::InvalidKb(errors));
        }
        let states = kb.demons.iter().map(DemonState::fresh).collect();
        Ok(Engine { kb, states, step: 0, behaviors })
    }

    pub fn register_behavior(&mut self, id: impl Into<String>, behavior: impl Behavior + 'static) -> Result<(), EngineError> {
        self.behaviors.register(id, behavior)?;
        Ok(())
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn kb_arc(&self) -> Arc<KnowledgeBase> {
        Arc::clone(&self.kb)
    }

    pub fn behaviors(&self) -> &BehaviorRegistry {
        &self.behaviors
    }

    /// Number of features ingested so far.
    pub fn step(&self) -> usize {
        self.step
    }

    /// States in declaration order.
    pub fn states(&self) -> &[DemonState] {
        &self.states
    }

    pub fn state(&self, demon: &str) -> Option<&DemonState> {
        let idx = self.kb.demons.iter().position(|d| d.name == demon)?;
        Some(&self.states[idx])
    }

    pub fn environment(&self) -> Environment {
        Environment {
            alive_count: self.states.iter().filter(|s| !s.is_dead()).count(),
            confidences: self
                .kb
                .demons
                .iter()
                .zip(&self.states)
                .map(|(d, s)| (d.name.clone(), s.confidence))
                .collect(),
        }
    }

    pub fn apply_step(&mut self, feature: &FeatureId) -> StepReport {
        let order: Vec<usize> = (0..self.states.len()).collect();
        self.apply_step_in_order(feature, &order)
    }

    /// Commits demon updates in `order`. The report is the same for every
    /// order because reactions only read the pre-step snapshot.
    fn apply_step_in_order(&mut self, feature: &FeatureId, order: &[usize]) -> StepReport {
        self.step += 1;
        let step = self.step;
        let env = self.environment();

        let deltas: Vec<Option<(Reaction, i32)>> = self
            .kb
            .demons
            .iter()
            .zip(&self.states)
            .map(|(def, state)| {
                if state.is_dead() {
                    return None;
                }
                let reaction = raw_reaction(def, state, feature);
                let applied = modifier_pipeline(&self.behaviors, &def.behavior, &reaction, &env)
                    .expect("behaviors are checked when the engine is built");
                Some((reaction, applied))
            })
            .collect();

        let mut demon_events: Vec<Option<Event>> = vec![None; self.states.len()];
        for &idx in order {
            if let Some((reaction, applied)) = &deltas[idx] {
                let def = &self.kb.demons[idx];
                demon_events[idx] = commit(def, &mut self.states[idx], feature, reaction, *applied, step);
            }
        }

        let mut events = Vec::new();
        if !self.kb.mentions(feature) {
            events.push(Event::UnknownFeature { feature: feature.clone() });
        }
        events.extend(demon_events.into_iter().flatten());

        StepReport { fnum: step, feature: feature.clone(), rows: self.snapshot(), events }
    }

    /// One row per demon in declaration order, as of the latest step.
    pub fn snapshot(&self) -> Vec<TraceRow> {
        self.kb
            .demons
            .iter()
            .zip(&self.states)
            .map(|(def, state)| trace_row(def, state, self.step))
            .collect()
    }

    pub fn potential_remaining(&self, demon: &str) -> Option<i32> {
        let def = self.kb.demon(demon)?;
        Some(potential_remaining(def, self.state(demon)?))
    }

    pub fn reachability(&self, demon: &str) -> Option<Reachability> {
        let def = self.kb.demon(demon)?;
        Some(reachability(def, self.state(demon)?))
    }

    /// Reachability for every demon in declaration order.
    pub fn reachabilities(&self) -> Vec<(String, Reachability)> {
        self.kb
            .demons
            .iter()
            .zip(&self.states)
            .map(|(d, s)| (d.name.clone(), reachability(d, s)))
            .collect()
    }

    pub fn best_question(&self) -> Option<QuestionSuggestion> {
        best_question(self)
    }
}

fn commit(def: &DemonDef, state: &mut DemonState, feature: &FeatureId, reaction: &Reaction, applied: i32, step: usize) -> Option<Event> {
    if !state.has_received(feature) {
        state.rcvd_features.push(feature.clone());
        for (g, gs) in def.groups.iter().zip(state.group_states.iter_mut()) {
            if g.contains(feature) {
                gs.satisfied_count += 1;
                gs.prev_or_bonus = g.schedule.at(gs.satisfied_count);
            }
        }
    }
    state.evidence += applied;
    let confidence = state.evidence.clamp(MIN_CONFIDENCE, MAX_CONFIDENCE);
    if confidence != state.confidence {
        state.old_confidence = state.confidence;
        state.confidence = confidence;
    }
    state.fnum = step;
    state.last_react = reaction.raw;
    state.last_or_bonus = reaction.or_bonus;

    let t = def.thresholds;
    let demon = def.name.clone();
    if confidence < t.death {
        state.status = Status::Dead;
        Some(Event::Death { demon })
    } else if state.accepted_latched {
        state.status = Status::Accepted;
        None
    } else if confidence >= t.accept {
        state.status = Status::Accepted;
        state.accepted_latched = true;
        Some(Event::Accept { demon, output: def.output_text().to_string() })
    } else if confidence < t.reject {
        let was = std::mem::replace(&mut state.status, Status::Rejected);
        (was != Status::Rejected).then_some(Event::Reject { demon })
    } else {
        state.status = Status::Alive;
        None
    }
}

fn trace_row(def: &DemonDef, state: &DemonState, step: usize) -> TraceRow {
    let dead = state.is_dead();
    // a demon that died in an earlier step no longer reacts
    let stale = dead && state.fnum < step;
    TraceRow {
        demon: def.name.clone(),
        state: state.status,
        conf: if dead { DEAD_SENTINEL } else { state.confidence },
        old: state.old_confidence,
        death: def.thresholds.death,
        accp: def.thresholds.accept,
        rejct: def.thresholds.reject,
        fnum: state.fnum,
        react: if stale { 0 } else { state.last_react },
        or_bns: if stale { 0 } else { state.last_or_bonus },
    }
}
