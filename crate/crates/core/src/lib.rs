//! DUNE-style expert-system shell.
//!
//! Many competing interpretation *demons* watch the same stream of input
//! features. Each keeps its own integer confidence, updated incrementally
//! from weighted leaves and count-based group bonuses, and moves through
//! `ALIVE`, `ACCEPTED`, `REJECTED` and `DEAD` as thresholds are crossed.
//! There is no global certainty factor: the overall picture is the set of
//! per-demon confidences.
//!
//! ```
//! use dune::{fixtures, replay, FeatureId, KnowledgeBase};
//!
//! let kb = KnowledgeBase::parse(fixtures::KB_RUN1).unwrap();
//! let features = fixtures::run1_features();
//! let (session, matrix) = replay(kb, &features).unwrap();
//! assert_eq!(matrix.row("depressive_ep").unwrap().last(), Some(&100));
//! assert_eq!(session.engine().step(), 9);
//! ```

pub mod cli;
pub mod engine;
pub mod feature;
pub mod fixtures;
pub mod kb;
pub mod render;
pub mod service;
pub mod session;

pub use engine::{
    best_question, potential_remaining, raw_reaction, reachability, Behavior, BehaviorRegistry, DemonState, Engine,
    EngineError, Environment, Event, QuestionSuggestion, Reachability, Reaction, Status, StepReport, TraceRow,
};
pub use feature::{parse_feature_list, FeatureId, InvalidIdentifier};
pub use kb::{parse_kb, serialize_kb, validate_kb, vocabulary, DemonDef, Diagnostic, KnowledgeBase, Severity};
pub use render::{render_step_table, render_summary_matrix};
pub use session::{load_log, replay, LoadError, Session, SummaryMatrix};
