//! Sessions: an engine plus an append-only log of step reports, with
//! replay and line-delimited JSON persistence.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::sync::Arc;

use chrono::{DateTime, SecondsFormat, Utc};

use crate::engine::{Engine, EngineError, StepReport};
use crate::feature::FeatureId;
use crate::kb::KnowledgeBase;

/// Confidence of every demon after every step; dead demons read `-1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SummaryMatrix {
    pub demons: Vec<String>,
    /// One column per step, one entry per demon in `demons` order.
    pub columns: Vec<Vec<i32>>,
}

impl SummaryMatrix {
    pub fn from_log(kb: &KnowledgeBase, log: &[StepReport]) -> Self {
        let demons: Vec<String> = kb.demons.iter().map(|d| d.name.clone()).collect();
        let columns = log
            .iter()
            .map(|report| {
                demons
                    .iter()
                    .map(|name| report.row(name).map_or(0, |r| r.conf))
                    .collect()
            })
            .collect();
        SummaryMatrix { demons, columns }
    }

    pub fn steps(&self) -> usize {
        self.columns.len()
    }

    /// A demon's confidences across all steps.
    pub fn row(&self, demon: &str) -> Option<Vec<i32>> {
        let idx = self.demons.iter().position(|d| d == demon)?;
        Some(self.columns.iter().map(|c| c[idx]).collect())
    }
}

pub struct Session {
    id: String,
    engine: Engine,
    log: Vec<StepReport>,
    created_at: DateTime<Utc>,
    sink: Option<Box<dyn Write + Send>>,
}

impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Session")
            .field("id", &self.id)
            .field("step", &self.engine.step())
            .field("created_at", &self.created_at_iso())
            .field("persisting", &self.sink.is_some())
            .finish()
    }
}

impl Session {
    pub fn new(kb: impl Into<Arc<KnowledgeBase>>) -> Result<Self, EngineError> {
        Ok(Self::with_engine(Engine::new(kb)?))
    }

    /// Wraps an engine that has not stepped yet.
    pub fn with_engine(engine: Engine) -> Self {
        assert_eq!(engine.step(), 0, "a session starts from a fresh engine");
        Session {
            id: uuid::Uuid::new_v4().to_string(),
            engine,
            log: Vec::new(),
            created_at: Utc::now(),
            sink: None,
        }
    }

    /// Every subsequent step is appended to `sink` as one JSON line.
    pub fn persist_to(&mut self, sink: impl Write + Send + 'static) {
        self.sink = Some(Box::new(sink));
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn log(&self) -> &[StepReport] {
        &self.log
    }

    pub fn created_at(&self) -> DateTime<Utc> {
        self.created_at
    }

    pub fn created_at_iso(&self) -> String {
        self.created_at.to_rfc3339_opts(SecondsFormat::Secs, true)
    }

    /// Applies one feature. The step is kept even if writing it to the
    /// persistence sink fails; the write error is returned alongside.
    pub fn submit(&mut self, feature: &FeatureId) -> (StepReport, io::Result<()>) {
        let report = self.engine.apply_step(feature);
        let persisted = match self.sink.as_mut() {
            Some(sink) => write_line(sink, &report).and_then(|_| sink.flush()),
            None => Ok(()),
        };
        self.log.push(report.clone());
        (report, persisted)
    }

    /// `submit` for callers without a persistence sink.
    pub fn submit_feature(&mut self, feature: &FeatureId) -> StepReport {
        self.submit(feature).0
    }

    pub fn matrix(&self) -> SummaryMatrix {
        SummaryMatrix::from_log(self.engine.kb(), &self.log)
    }

    pub fn persist_log(&self, sink: &mut impl Write) -> io::Result<()> {
        for report in &self.log {
            write_line(sink, report)?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.persist_log(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

fn write_line(sink: &mut (impl Write + ?Sized), report: &StepReport) -> io::Result<()> {
    let line = serde_json::to_string(report).map_err(io::Error::other)?;
    sink.write_all(line.as_bytes())?;
    sink.write_all(b"\n")
}

/// Feeds `features` in order through a fresh session.
pub fn replay(kb: impl Into<Arc<KnowledgeBase>>, features: &[FeatureId]) -> Result<(Session, SummaryMatrix), EngineError> {
    Ok(replay_with(Engine::new(kb)?, features))
}

pub fn replay_with(engine: Engine, features: &[FeatureId]) -> (Session, SummaryMatrix) {
    let mut session = Session::with_engine(engine);
    for f in features {
        session.submit_feature(f);
    }
    let matrix = session.matrix();
    (session, matrix)
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("reading log: {0}")]
    Io(#[from] io::Error),
    #[error("log line {line} is not a valid step record: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error("log diverges from recomputation at step {step}: {detail}")]
    Integrity { step: usize, detail: String },
}

impl LoadError {
    /// Step index of the first mismatch, for integrity failures.
    pub fn step(&self) -> Option<usize> {
        match self {
            LoadError::Integrity { step, .. } => Some(*step),
            LoadError::Parse { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Rebuilds a session from a persisted log against `kb`.
pub fn load_log(source: impl BufRead, kb: impl Into<Arc<KnowledgeBase>>) -> Result<Session, LoadError> {
    load_log_with(source, Engine::new(kb)?)
}

/// Re-runs every recorded feature on `engine` and checks that each
/// recomputed report matches the recorded one.
pub fn load_log_with(source: impl BufRead, engine: Engine) -> Result<Session, LoadError> {
    let mut session = Session::with_engine(engine);
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let step = idx + 1;
        let recorded: StepReport = serde_json::from_str(&line).map_err(|source| LoadError::Parse { line: step, source })?;
        if recorded.fnum != session.engine.step() + 1 {
            return Err(LoadError::Integrity {
                step,
                detail: format!("expected fnum {}, found {}", session.engine.step() + 1, recorded.fnum),
            });
        }
        let recomputed = session.submit_feature(&recorded.feature);
        if recomputed != recorded {
            return Err(LoadError::Integrity { step, detail: describe_mismatch(&recorded, &recomputed) });
        }
    }
    Ok(session)
}

fn describe_mismatch(recorded: &StepReport, recomputed: &StepReport) -> String {
    for (a, b) in recorded.rows.iter().zip(&recomputed.rows) {
        if a != b {
            return format!("row for `{}` recorded as {a:?}, recomputed as {b:?}", b.demon);
        }
    }
    if recorded.rows.len() != recomputed.rows.len() {
        return format!("{} rows recorded, {} recomputed", recorded.rows.len(), recomputed.rows.len());
    }
    format!("events recorded as {:?}, recomputed as {:?}", recorded.events, recomputed.events)
}
