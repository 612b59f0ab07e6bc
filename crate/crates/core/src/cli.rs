//! The `dune` command line: `replay`, `interactive`, `validate`, `serve`.
//!
//! Commands take their streams as arguments so they can be driven from
//! tests. Exit codes: 0 on success, 2 on usage errors or diagnostics.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::feature::{parse_feature_list, FeatureId};
use crate::kb::{parse_kb, validate_kb, Diagnostic, KnowledgeBase};
use crate::render::{render_paper_steps, render_rows, render_summary_matrix, render_tsv};
use crate::service::{self, AppState};
use crate::session::Session;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dune", version, about = "Multi-demon interpretation shell")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Feed a feature file through a knowledge base and print every step.
    Replay(ReplayArgs),
    /// Answer questions one feature at a time; type `done` to finish.
    Interactive(InteractiveArgs),
    /// Check a knowledge base and print its diagnostics.
    Validate(ValidateArgs),
    /// Run the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `inputN:` headings, one table per step, then the summary matrix.
    #[default]
    Paper,
    /// One line per step and demon.
    Tsv,
    /// The session log, one JSON object per step.
    Jsonl,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub kb: PathBuf,
    #[arg(long)]
    pub inputs: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Paper)]
    pub format: Format,
    #[arg(long, env = "DUNE_LOG_DIR")]
    pub log_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InteractiveArgs {
    #[arg(long)]
    pub kb: PathBuf,
    #[arg(long, env = "DUNE_LOG_DIR")]
    pub log_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub kb: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    pub port: u16,
    /// Every `*.dune` file here is registered at startup.
    #[arg(long)]
    pub kb_dir: Option<PathBuf>,
    #[arg(long, env = "DUNE_LOG_DIR")]
    pub log_dir: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match cli.command {
        Command::Replay(args) => cmd_replay(&args, out, err),
        Command::Interactive(args) => cmd_interactive(&args, stdin, out, err),
        Command::Validate(args) => cmd_validate(&args, out, err),
        Command::Serve(args) => cmd_serve(&args, out, err),
    }
}

fn print_diags(err: &mut dyn Write, path: &Path, diags: &[Diagnostic]) {
    for d in diags {
        let _ = writeln!(err, "{}:{d}", path.display());
    }
}

/// Reads, parses and validates a KB, reporting problems on `err`.
fn load_kb(path: &Path, err: &mut dyn Write) -> Option<KnowledgeBase> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
            return None;
        }
    };
    let kb = match parse_kb(&text) {
        Ok(kb) => kb,
        Err(diags) => {
            print_diags(err, path, &diags);
            return None;
        }
    };
    let errors: Vec<Diagnostic> = validate_kb(&kb).into_iter().filter(Diagnostic::is_error).collect();
    if !errors.is_empty() {
        print_diags(err, path, &errors);
        return None;
    }
    Some(kb)
}

fn open_session(kb: KnowledgeBase, log_dir: Option<&Path>, err: &mut dyn Write) -> Option<Session> {
    let mut session = match Session::new(kb) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return None;
        }
    };
    if let Some(dir) = log_dir {
        let path = dir.join(format!("{}.jsonl", session.id()));
        match File::create(&path) {
            Ok(file) => session.persist_to(BufWriter::new(file)),
            Err(e) => {
                let _ = writeln!(err, "error: cannot create {}: {e}", path.display());
                return None;
            }
        }
    }
    Some(session)
}

fn submit(session: &mut Session, feature: &FeatureId, err: &mut dyn Write) -> bool {
    let (_, persisted) = session.submit(feature);
    if let Err(e) = persisted {
        let _ = writeln!(err, "error: writing session log: {e}");
        return false;
    }
    true
}

pub fn cmd_replay(args: &ReplayArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(kb) = load_kb(&args.kb, err) else {
        return EXIT_FAILURE;
    };
    let text = match fs::read_to_string(&args.inputs) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", args.inputs.display());
            return EXIT_FAILURE;
        }
    };
    let features = match parse_feature_list(&text) {
        Ok(f) => f,
        Err((line, e)) => {
            let _ = writeln!(err, "{}:{line}: error: {e}", args.inputs.display());
            return EXIT_FAILURE;
        }
    };
    let Some(mut session) = open_session(kb, args.log_dir.as_deref(), err) else {
        return EXIT_FAILURE;
    };
    for f in &features {
        if !submit(&mut session, f, err) {
            return EXIT_FAILURE;
        }
    }
    let rendered = match args.format {
        Format::Paper => {
            let mut text = render_paper_steps(session.log());
            if !session.log().is_empty() {
                text.push('\n');
                text.push_str(&render_summary_matrix(&session.matrix()));
            }
            text
        }
        Format::Tsv => render_tsv(session.log()),
        Format::Jsonl => session.to_jsonl(),
    };
    if out.write_all(rendered.as_bytes()).is_err() {
        return EXIT_FAILURE;
    }
    EXIT_OK
}

pub fn cmd_interactive(args: &InteractiveArgs, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(kb) = load_kb(&args.kb, err) else {
        return EXIT_FAILURE;
    };
    let Some(mut session) = open_session(kb, args.log_dir.as_deref(), err) else {
        return EXIT_FAILURE;
    };
    let mut line = String::new();
    loop {
        let _ = out.write_all(render_rows(&session.engine().snapshot()).as_bytes());
        if let Some(q) = session.engine().best_question() {
            let _ = writeln!(out, "ask about: {}?", q.feature);
        }
        let _ = write!(out, "> ");
        let _ = out.flush();

        line.clear();
        match input.read_line(&mut line) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) => {
                let _ = writeln!(err, "error: reading input: {e}");
                return EXIT_FAILURE;
            }
        }
        let answer = line.trim();
        if answer == "done" {
            break;
        }
        if answer.is_empty() {
            continue;
        }
        let feature = match FeatureId::new(answer) {
            Ok(f) => f,
            Err(e) => {
                let _ = writeln!(out, "error: {e}");
                continue;
            }
        };
        if !submit(&mut session, &feature, err) {
            return EXIT_FAILURE;
        }
        if !session.engine().kb().mentions(&feature) {
            let _ = writeln!(out, "warning: no demon knows `{feature}`");
        }
    }
    let _ = writeln!(out);
    let _ = out.write_all(render_summary_matrix(&session.matrix()).as_bytes());
    for report in session.log() {
        for line in report.events.iter().filter_map(|e| e.accept_line()) {
            let _ = writeln!(out, "{line}");
        }
    }
    EXIT_OK
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match fs::read_to_string(&args.kb) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", args.kb.display());
            return EXIT_FAILURE;
        }
    };
    let diags = match parse_kb(&text) {
        Ok(kb) => validate_kb(&kb),
        Err(diags) => diags,
    };
    print_diags(out, &args.kb, &diags);
    let errors = diags.iter().filter(|d| d.is_error()).count();
    let _ = writeln!(out, "{}: {errors} error(s), {} warning(s)", args.kb.display(), diags.len() - errors);
    if errors == 0 {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

/// Registers every `*.dune` file in `dir`, in file-name order.
pub fn load_kb_dir(state: &AppState, dir: &Path, out: &mut dyn Write, err: &mut dyn Write) -> bool {
    let mut paths: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|ext| ext == "dune"))
            .collect(),
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", dir.display());
            return false;
        }
    };
    paths.sort();
    let mut ok = true;
    for path in paths {
        match fs::read_to_string(&path).map(|text| state.register_kb(&text)) {
            Ok(Ok(id)) => {
                let _ = writeln!(out, "registered {} as {id}", path.display());
            }
            Ok(Err(service::ServiceError::InvalidKb(diags))) => {
                print_diags(err, &path, &diags);
                ok = false;
            }
            Ok(Err(e)) => {
                let _ = writeln!(err, "error: {}: {e}", path.display());
                ok = false;
            }
            Err(e) => {
                let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
                ok = false;
            }
        }
    }
    ok
}

pub fn cmd_serve(args: &ServeArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut state = AppState::new();
    if let Some(dir) = &args.log_dir {
        if let Err(e) = fs::create_dir_all(dir) {
            let _ = writeln!(err, "error: cannot create {}: {e}", dir.display());
            return EXIT_FAILURE;
        }
        state = state.with_log_dir(dir);
    }
    if let Some(dir) = &args.kb_dir {
        if !load_kb_dir(&state, dir, out, err) {
            return EXIT_FAILURE;
        }
    }
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            let _ = writeln!(err, "error: starting runtime: {e}");
            return EXIT_FAILURE;
        }
    };
    let listener = match runtime.block_on(tokio::net::TcpListener::bind(("127.0.0.1", args.port))) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "error: cannot bind port {}: {e}", args.port);
            return EXIT_FAILURE;
        }
    };
    let _ = writeln!(out, "listening on http://127.0.0.1:{}", args.port);
    let _ = out.flush();
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    match runtime.block_on(service::serve(listener, Arc::new(state), shutdown)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}
